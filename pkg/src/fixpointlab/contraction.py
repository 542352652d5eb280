"""Pointwise-contraction data and its sample-based condition checks.

The certified structure is a triple: a family phi_n dominating the
distances between n-th iterates, its pointwise limit phi (with locally
uniform convergence), and a gate bound phi(x,y) <= psi(M(x,y)) where
M(x,y) is the max of the five point/image distances.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .certificates import INCONCLUSIVE, PASS, REFUTED, Certificate
from .expressions import compile_expression
from .gates import GateFunction
from .metric import (DEFAULT_SEED, MapApplicationError, MetricSpaceDescriptor,
                     Point, Region, is_scalar_point, _plain)

COMPONENT_NAMES = ("d(x,y)", "d(Tx,x)", "d(Ty,y)", "d(Ty,x)", "d(Tx,y)")

DOMINATION_TOL = 1e-12
GATE_BOUND_TOL = 1e-12
GAP_JITTER = 1e-9

DEFAULT_N_SCHEDULE = (1, 2, 5, 10, 20, 50, 100, 200, 500, 1000)


@dataclass(frozen=True)
class SelfMap:
    """A self-map of the space, with an optional declared domain."""

    fn: Callable[[Point], Point]
    label: str = "map"
    domain: Region | None = None

    def __call__(self, x: Point) -> Point:
        return self.fn(x)


@dataclass(frozen=True)
class PhiFamily:
    """Indexed dominating family phi_n plus its claimed pointwise limit."""

    phi_n: Callable[[int, Point, Point], float]
    phi_limit: Callable[[Point, Point], float]
    label: str = "family"


@dataclass(frozen=True)
class MaxTermValue:
    """max of the five distances, with the first maximizing component."""

    value: float
    argmax_component: str
    components: tuple[float, float, float, float, float]


def max_term(space: MetricSpaceDescriptor,
             T: SelfMap | Callable[[Point], Point],
             x: Point, y: Point) -> MaxTermValue:
    """M(x,y) = max{d(x,y), d(Tx,x), d(Ty,y), d(Ty,x), d(Tx,y)}.

    Ties resolve to the earliest component in that listed order.
    """
    tx, ty = T(x), T(y)
    comps = (space.distance(x, y),
             space.distance(tx, x),
             space.distance(ty, y),
             space.distance(ty, x),
             space.distance(tx, y))
    idx = 0
    for i in range(1, 5):
        if comps[i] > comps[idx]:
            idx = i
    return MaxTermValue(comps[idx], COMPONENT_NAMES[idx], comps)


# --- built-in families and parsing -------------------------------------------

def example1_family() -> PhiFamily:
    """Scaling-by-1/3 dominating family (1/3 + 1/(n+1))|x-y|, limit |x-y|/3."""
    return PhiFamily(
        phi_n=lambda n, x, y: (1.0 / 3.0 + 1.0 / (n + 1.0)) * abs(x - y),
        phi_limit=lambda x, y: abs(x - y) / 3.0,
        label="example1")


def power_family(alpha: float) -> PhiFamily:
    """Geometric family alpha^n |x-y| with limit 0 (0 < alpha < 1)."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0,1)")
    return PhiFamily(
        phi_n=lambda n, x, y: alpha ** n * abs(x - y),
        phi_limit=lambda x, y: 0.0,
        label=f"power:{alpha:g}")


def constant_family(fn: Callable[[Point, Point], float] | None = None,
                    label: str = "constant") -> PhiFamily:
    """phi_n identical to phi for every n (default phi = |x-y|)."""
    if fn is None:
        fn = lambda x, y: abs(x - y)
    return PhiFamily(phi_n=lambda n, x, y: fn(x, y), phi_limit=fn, label=label)


def expression_family(phi_n_src: str, phi_src: str) -> PhiFamily:
    """Family from closed-form expressions in x, y, n and x, y."""
    f_n = compile_expression(phi_n_src, ("x", "y", "n"))
    f_lim = compile_expression(phi_src, ("x", "y"))
    return PhiFamily(
        phi_n=lambda n, x, y: f_n(x=float(x), y=float(y), n=float(n)),
        phi_limit=lambda x, y: f_lim(x=float(x), y=float(y)),
        label=f"expr:{phi_n_src} -> {phi_src}")


def parse_family(spec: str) -> PhiFamily:
    """Parse a named family spec: "example1", "power:A", "constant[:EXPR]"."""
    kind, _, rest = spec.partition(":")
    kind = kind.strip().lower()
    if kind == "example1":
        return example1_family()
    if kind == "power":
        return power_family(float(rest))
    if kind == "constant":
        if rest.strip():
            fn = compile_expression(rest, ("x", "y"))
            return constant_family(lambda x, y: fn(x=float(x), y=float(y)),
                                   label=f"constant:{rest}")
        return constant_family()
    raise ValueError(f"unknown family spec {spec!r}")


# --- sampling -----------------------------------------------------------------

def sample_pairs(region: Region,
                 count: int,
                 seed: int = DEFAULT_SEED,
                 sampler: Callable[[Region, int, int], list[Point]] | None = None
                 ) -> list[tuple[Point, Point]]:
    """Deterministic pair sample: all corner/endpoint pairs plus seeded
    uniform pairs.  Extreme pairs catch suprema attained at the boundary;
    the random pairs guard against interior maxima.
    """
    if not region.is_bounded:
        raise ValueError("region must be bounded")
    corners = region.corners()
    pairs: list[tuple[Point, Point]] = [(a, b) for a in corners for b in corners]
    if count > 0:
        if sampler is not None:
            xs = sampler(region, count, seed)
            ys = sampler(region, count, seed + 1)
        else:
            s1, s2 = np.random.SeedSequence(seed).spawn(2)
            xs = region.sample_with_rng(np.random.default_rng(s1), count)
            ys = region.sample_with_rng(np.random.default_rng(s2), count)
        pairs.extend(zip(xs, ys))
    return pairs


class _OrbitCache:
    """Memoized orbit prefixes keyed by point, so sweeps over n cost one
    map application per point per index, not per pair."""

    def __init__(self, map_fn: Callable[[Point], Point]):
        self.map_fn = map_fn
        self._store: dict = {}

    @staticmethod
    def _key(p: Point):
        return float(p) if is_scalar_point(p) else np.asarray(p, float).tobytes()

    def prefix(self, p: Point, n: int) -> list[Point]:
        orb = self._store.setdefault(self._key(p), [p])
        while len(orb) <= n:
            try:
                orb.append(self.map_fn(orb[-1]))
            except Exception as exc:
                raise MapApplicationError(len(orb), orb[-1], exc) from exc
        return orb


# --- condition checks ----------------------------------------------------------

def check_domination(space: MetricSpaceDescriptor,
                     T: SelfMap | Callable[[Point], Point],
                     family: PhiFamily,
                     pairs: Sequence[tuple[Point, Point]],
                     n_max: int,
                     tol: float = DOMINATION_TOL) -> Certificate:
    """d(T^n x, T^n y) <= phi_n(x, y) for all sampled pairs, 1 <= n <= n_max.

    The index runs from 1: at n = 0 the inequality only says phi_0 >= d,
    which carries no information about the map.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    pairs = list(pairs)
    if not pairs:
        raise ValueError("pairs must be nonempty")
    cache = _OrbitCache(T)
    min_margin = np.inf
    for x, y in pairs:
        orb_x = cache.prefix(x, n_max)
        orb_y = cache.prefix(y, n_max)
        for n in range(1, n_max + 1):
            d_n = space.distance(orb_x[n], orb_y[n])
            bound = float(family.phi_n(n, x, y))
            margin = bound - d_n
            if margin < min_margin:
                min_margin = margin
            if d_n > bound + tol:
                return Certificate(
                    "iterate-domination", REFUTED,
                    witness={"x": _plain(x), "y": _plain(y), "n": n,
                             "iterate_distance": d_n, "phi_n": bound})
    return Certificate("iterate-domination", PASS,
                       details={"pairs": len(pairs), "n_max": n_max,
                                "min_margin": float(min_margin)})


def measure_sup_gap(family: PhiFamily,
                    pairs: Sequence[tuple[Point, Point]],
                    n: int) -> tuple[float, tuple[Point, Point]]:
    """Sampled sup of |phi_n - phi| over the pairs, with an argmax pair."""
    best = -1.0
    best_pair = pairs[0]
    for x, y in pairs:
        gap = abs(float(family.phi_n(n, x, y)) - float(family.phi_limit(x, y)))
        if gap > best:
            best = gap
            best_pair = (x, y)
    return best, best_pair


def check_local_uniform(family: PhiFamily,
                        region: Region,
                        sample_count: int = 4096,
                        seed: int = DEFAULT_SEED,
                        n_schedule: Sequence[int] | None = None,
                        targets: Sequence[float] | None = None,
                        jitter: float = GAP_JITTER,
                        sampler=None) -> Certificate:
    """Measured sup gaps G_n = sup |phi_n - phi| over the bounded region.

    Pass requires the gap table to be nonincreasing within ``jitter`` and
    to show convergence: with explicit ``targets``, every target must be
    dominated from some schedule point on; otherwise the final gap must
    fall to half the initial one (or start below jitter).  The full gap
    table is returned in the certificate details.
    """
    if not region.is_bounded:
        raise ValueError("region must be bounded")
    schedule = sorted(set(int(n) for n in (n_schedule or DEFAULT_N_SCHEDULE)))
    if not schedule or schedule[0] < 0:
        raise ValueError("n_schedule must contain nonnegative indices")
    pairs = sample_pairs(region, sample_count, seed, sampler)
    gaps = []
    for n in schedule:
        gap, _ = measure_sup_gap(family, pairs, n)
        gaps.append(gap)
    details = {
        "gap_table": [[int(n), float(g)] for n, g in zip(schedule, gaps)],
        "pairs": len(pairs),
        "note": "gaps measured on the declared region only",
    }
    for i in range(len(gaps) - 1):
        if gaps[i + 1] > gaps[i] + jitter:
            return Certificate(
                "local-uniform-convergence", REFUTED,
                witness={"n_lo": schedule[i], "n_hi": schedule[i + 1],
                         "gap_lo": gaps[i], "gap_hi": gaps[i + 1]},
                details=details, note="gap table not nonincreasing")
    if targets is not None:
        for target in targets:
            met_from = None
            for i in range(len(gaps)):
                if all(g <= target for g in gaps[i:]):
                    met_from = schedule[i]
                    break
            if met_from is None:
                return Certificate(
                    "local-uniform-convergence", REFUTED,
                    witness={"target": float(target), "final_gap": gaps[-1]},
                    details=details,
                    note="sampled gaps never settle below the target")
    elif gaps[0] > jitter and gaps[-1] > 0.5 * gaps[0]:
        return Certificate(
            "local-uniform-convergence", REFUTED,
            witness={"first_gap": gaps[0], "final_gap": gaps[-1]},
            details=details,
            note="no convergence evidence over the sampled schedule")
    return Certificate("local-uniform-convergence", PASS, details=details)


def check_global_uniform(family: PhiFamily,
                         probe_radii: Sequence[float],
                         n: int,
                         region_factory: Callable[[float], Region] | None = None,
                         sample_count: int = 1024,
                         seed: int = DEFAULT_SEED,
                         growth_threshold: float = 2.0,
                         sampler=None) -> Certificate:
    """Probe whether sup |phi_n - phi| at fixed n blows up with the radius.

    REFUTED here means "not globally uniform": the measured gap keeps
    growing by at least ``growth_threshold`` per radius step.  Anything
    else is INCONCLUSIVE — bounded samples cannot certify global
    uniformity.
    """
    radii = [float(r) for r in probe_radii]
    if len(radii) < 2 or any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("probe radii must be strictly increasing, >= 2 of them")
    if region_factory is None:
        region_factory = lambda r: Region(0.0, r)
    gaps = []
    for r in radii:
        pairs = sample_pairs(region_factory(r), sample_count, seed, sampler)
        gap, _ = measure_sup_gap(family, pairs, n)
        gaps.append(gap)
    details = {"radii": radii, "gaps": [float(g) for g in gaps], "n": int(n)}
    growing = all(g > 0 for g in gaps) and all(
        gaps[i + 1] >= growth_threshold * gaps[i] for i in range(len(gaps) - 1))
    if growing:
        return Certificate(
            "global-uniform-convergence", REFUTED, details=details,
            note="gap grows without bound as the probe radius increases: "
                 "convergence is not uniform on the whole space")
    return Certificate(
        "global-uniform-convergence", INCONCLUSIVE, details=details,
        note="no unbounded growth detected at these radii; global uniformity "
             "cannot be certified from bounded samples")


def check_gate_bound(space: MetricSpaceDescriptor,
                     T: SelfMap | Callable[[Point], Point],
                     family: PhiFamily,
                     psi: GateFunction,
                     pairs: Sequence[tuple[Point, Point]],
                     tol: float = GATE_BOUND_TOL) -> Certificate:
    """Limit bound phi(x,y) <= psi(M(x,y)) on every sampled pair."""
    pairs = list(pairs)
    if not pairs:
        raise ValueError("pairs must be nonempty")
    min_margin = np.inf
    for x, y in pairs:
        phi = float(family.phi_limit(x, y))
        m = max_term(space, T, x, y)
        bound = float(psi(m.value))
        margin = bound - phi
        if margin < min_margin:
            min_margin = margin
        if phi > bound + tol:
            return Certificate(
                "gate-bound", REFUTED,
                witness={"x": _plain(x), "y": _plain(y), "phi": phi,
                         "max_term": m.value, "psi_of_max_term": bound})
    return Certificate("gate-bound", PASS,
                       details={"pairs": len(pairs),
                                "min_margin": float(min_margin)})


def estimate_uniform_index(family: PhiFamily,
                           region: Region,
                           epsilon: float,
                           sample_count: int = 4096,
                           seed: int = DEFAULT_SEED,
                           n_cap: int = 1000,
                           sampler=None) -> int | None:
    """Least index m <= n_cap whose measured sup gap on the region is
    <= epsilon; None if no index qualifies.

    The scan starts at m = 0 so an already-converged family reports 0.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if not region.is_bounded:
        raise ValueError("region must be bounded")
    pairs = sample_pairs(region, sample_count, seed, sampler)
    for m in range(0, n_cap + 1):
        gap, _ = measure_sup_gap(family, pairs, m)
        if gap <= epsilon:
            return m
    return None
