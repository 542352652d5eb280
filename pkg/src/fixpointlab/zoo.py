"""Canonical mapping instances for the classical contraction classes.

Every entry is plain data: a self-map plus, where one exists, a
dominating family, a gate, and the known fixed point.  Checks route
through the generic machinery in ``contraction`` and ``solver``; the
class-specific single-step conditions (Banach/Boyd-Wong factor, the
five-distance quasi-contraction, the shrinking-factor condition) are
exposed as checkers here.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .certificates import PASS, REFUTED, Certificate
from .contraction import (PhiFamily, SelfMap, constant_family,
                          example1_family, max_term, power_family)
from .gates import GateFunction, linear_gate, piecewise_gate, zero_gate
from .metric import Point, Region, MetricSpaceDescriptor, _plain

CLASS_TAGS = ("banach", "rakotch", "boyd-wong", "ciric", "kirk-asymptotic",
              "example1", "nonexample-translation")

SINGLE_STEP_TOL = 1e-12


@dataclass(frozen=True)
class ZooEntry:
    self_map: SelfMap
    class_tag: str
    phi_family: PhiFamily | None = None
    gate: GateFunction | None = None
    expected_fixed_point: Point | None = None
    notes: str = ""
    extras: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.class_tag not in CLASS_TAGS:
            raise ValueError(f"unknown class tag {self.class_tag!r}")


# --- entry factories ----------------------------------------------------------

def banach(alpha: float) -> ZooEntry:
    """Linear scaling x -> alpha*x on the real line, 0 < alpha < 1."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0,1)")
    return ZooEntry(
        self_map=SelfMap(lambda x: alpha * x, label=f"x -> {alpha:g}*x"),
        class_tag="banach",
        phi_family=power_family(alpha),
        gate=linear_gate(alpha),
        expected_fixed_point=0.0,
        notes="constant-factor contraction; iterates shrink geometrically",
        extras={"alpha": alpha})


def example1() -> ZooEntry:
    """Scaling by 1/3 on [0, inf) with the slack family (1/3 + 1/(n+1))|x-y|.

    The family converges to |x-y|/3 uniformly on every bounded interval
    (gap R/(n+1) on [0,R]) but not on the whole half-line, where the sup
    gap at fixed n is infinite.
    """
    return ZooEntry(
        self_map=SelfMap(lambda x: x / 3.0, label="x -> x/3",
                         domain=Region(0.0, np.inf)),
        class_tag="example1",
        phi_family=example1_family(),
        gate=linear_gate(1.0 / 3.0),
        expected_fixed_point=0.0,
        notes="dominating family converges locally uniformly (gap R/(n+1) "
              "on [0,R]) but not globally; unique fixed point 0 attracts "
              "every start")


def ciric(alpha: float) -> ZooEntry:
    """Quasi-contraction instance: alpha*x on [0,1] checked against
    alpha times the five-distance max term."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0,1)")
    return ZooEntry(
        self_map=SelfMap(lambda x: alpha * x, label=f"x -> {alpha:g}*x",
                         domain=Region(0.0, 1.0)),
        class_tag="ciric",
        phi_family=power_family(alpha),
        gate=linear_gate(alpha),
        expected_fixed_point=0.0,
        notes="single-step bound uses the max of the five point/image "
              "distances; check with check_quasi_contraction",
        extras={"alpha": alpha})


def validate_shrinking_alpha(alpha_fn: Callable[[float], float],
                             grid: Sequence[float]) -> None:
    """Reject a shrinking factor that reaches 1 or increases on the grid.

    "Decreasing" is accepted weakly: a constant factor is allowed (it
    reduces to the constant-factor class).
    """
    ts = [float(t) for t in grid if t > 0]
    if len(ts) < 2:
        raise ValueError("validation grid needs at least 2 positive points")
    prev_t, prev_v = None, None
    for t in ts:
        v = float(alpha_fn(t))
        if v >= 1.0:
            raise ValueError(
                f"shrinking factor reaches 1: alpha({t:g}) = {v:g}")
        if prev_v is not None and v > prev_v + 1e-12:
            raise ValueError(
                f"shrinking factor increases: alpha({prev_t:g}) = {prev_v:g} "
                f"< alpha({t:g}) = {v:g}")
        prev_t, prev_v = t, v


def rakotch(alpha_fn: Callable[[float], float],
            T: SelfMap,
            grid: Sequence[float] | None = None,
            phi_family: PhiFamily | None = None,
            gate: GateFunction | None = None,
            expected_fixed_point: Point | None = None) -> ZooEntry:
    """Entry for a map with a decreasing distance-dependent contraction
    factor: d(Tx,Ty) <= alpha(d(x,y)) * d(x,y).

    The factor is validated on a grid before the entry is built.
    """
    if grid is None:
        grid = np.linspace(1e-6, 100.0, 512)
    validate_shrinking_alpha(alpha_fn, grid)
    return ZooEntry(
        self_map=T,
        class_tag="rakotch",
        phi_family=phi_family,
        gate=gate,
        expected_fixed_point=expected_fixed_point,
        notes="distance-dependent contraction factor, validated weakly "
              "decreasing and < 1 on the grid; check with "
              "check_shrinking_factor",
        extras={"alpha_fn": alpha_fn})


def _mobius(x: float) -> float:
    return x / (1.0 + x)


def default_rakotch() -> ZooEntry:
    """x -> x/(1+x) on [0,10] with factor alpha(t) = 1/(1+t).

    The n-th iterate is x/(1+n*x), so |T^n x - T^n y| equals
    |x-y| / ((1+n*x)(1+n*y)) exactly; that closed form serves as the
    dominating family, with limit 0.
    """
    fam = PhiFamily(
        phi_n=lambda n, x, y: abs(x - y) / ((1.0 + n * x) * (1.0 + n * y)),
        phi_limit=lambda x, y: 0.0,
        label="mobius-iterates")
    return rakotch(
        alpha_fn=lambda t: 1.0 / (1.0 + t),
        T=SelfMap(_mobius, label="x -> x/(1+x)", domain=Region(0.0, 10.0)),
        phi_family=fam,
        gate=GateFunction(_mobius, label="t/(1+t)"),
        expected_fixed_point=0.0)


def boyd_wong() -> ZooEntry:
    """Nonlinear single-step gate instance: x -> x/(1+x) with gate t/(1+t).

    Not a constant-factor contraction (the factor 1/((1+x)(1+y)) tends
    to 1 near the origin), yet d(Tx,Ty) <= psi(d(x,y)) holds everywhere
    on the domain.
    """
    fam = PhiFamily(
        phi_n=lambda n, x, y: abs(x - y) / ((1.0 + n * x) * (1.0 + n * y)),
        phi_limit=lambda x, y: 0.0,
        label="mobius-iterates")
    return ZooEntry(
        self_map=SelfMap(_mobius, label="x -> x/(1+x)",
                         domain=Region(0.0, 10.0)),
        class_tag="boyd-wong",
        phi_family=fam,
        gate=GateFunction(_mobius, label="t/(1+t)"),
        expected_fixed_point=0.0,
        notes="single-step gate bound with a genuinely nonlinear gate; "
              "convergence to 0 is slow (like 1/n), so iterate with "
              "moderate tolerances")


def kirk_asymptotic() -> ZooEntry:
    """Iterate-domination by scalar gates psi_n(t) = min(t,1)/3^n on [0,1].

    The scalar family converges to 0 uniformly on all of [0, inf), i.e.
    this entry meets the stronger global-uniform hypothesis.  The domain
    is kept bounded on purpose: a globally uniform scalar family cannot
    dominate a linear map on an unbounded domain.
    """
    def psi_n(n: int, t: float) -> float:
        return min(t, 1.0) / 3.0 ** n

    fam = PhiFamily(
        phi_n=lambda n, x, y: psi_n(n, abs(x - y)),
        phi_limit=lambda x, y: 0.0,
        label="scalar-gates min(t,1)/3^n")
    return ZooEntry(
        self_map=SelfMap(lambda x: x / 3.0, label="x -> x/3",
                         domain=Region(0.0, 1.0)),
        class_tag="kirk-asymptotic",
        phi_family=fam,
        gate=zero_gate(),
        expected_fixed_point=0.0,
        notes="scalar gate family converges uniformly on [0,inf) "
              "(sup gap 3^-n); bounded domain [0,1] keeps the domination "
              "valid",
        extras={"psi_n": psi_n})


def translation_nonexample() -> ZooEntry:
    """x -> x+1 on [0, inf): every condition check passes, no fixed point.

    With phi_n = phi = |x-y| and the gate t/2 below 1, t - 1/2 above,
    the three contraction conditions hold (the max term is always
    |x-y| + 1, and |x-y| <= psi(|x-y| + 1) = |x-y| + 1/2), yet every
    orbit is unbounded.  Demonstrates that the bounded-orbit premise
    cannot be dropped.
    """
    return ZooEntry(
        self_map=SelfMap(lambda x: x + 1.0, label="x -> x+1",
                         domain=Region(0.0, np.inf)),
        class_tag="nonexample-translation",
        phi_family=constant_family(),
        gate=piecewise_gate([(0.0, 0.5, 0.0), (1.0, 1.0, -0.5)],
                            label="t/2 then t-1/2"),
        expected_fixed_point=None,
        notes="all three condition checks pass with margin 1/2 on the "
              "gate bound, but there is no fixed point and every orbit "
              "diverges: boundedness of some orbit is essential")


_REGISTRY: dict[str, Callable[[], ZooEntry]] = {
    "banach": lambda: banach(0.5),
    "example1": example1,
    "ciric": lambda: ciric(0.5),
    "rakotch": default_rakotch,
    "boyd-wong": boyd_wong,
    "kirk-asymptotic": kirk_asymptotic,
    "nonexample-translation": translation_nonexample,
}


def tags() -> list[str]:
    return sorted(_REGISTRY)


def entry(tag: str) -> ZooEntry:
    try:
        factory = _REGISTRY[tag]
    except KeyError:
        raise ValueError(f"unknown zoo tag {tag!r}; known: {', '.join(tags())}")
    return factory()


def default_probe_region(e: ZooEntry, span: float = 100.0) -> Region:
    """Bounded region for sampling starts/pairs around an entry's domain."""
    dom = e.self_map.domain
    if dom is None:
        return Region(-span, span)
    if dom.is_bounded:
        return dom
    lo = float(np.asarray(dom.lo, dtype=float))
    return Region(lo, lo + span)


# --- class-specific single-step checkers ---------------------------------------

def check_single_step_gate(space: MetricSpaceDescriptor,
                           T: SelfMap | Callable[[Point], Point],
                           psi: GateFunction,
                           pairs: Sequence[tuple[Point, Point]],
                           tol: float = SINGLE_STEP_TOL) -> Certificate:
    """One-step gate condition d(Tx,Ty) <= psi(d(x,y)) on sampled pairs."""
    for x, y in pairs:
        lhs = space.distance(T(x), T(y))
        rhs = float(psi(space.distance(x, y)))
        if lhs > rhs + tol:
            return Certificate("single-step-gate", REFUTED,
                               witness={"x": _plain(x), "y": _plain(y),
                                        "d_Tx_Ty": lhs, "psi_d": rhs})
    return Certificate("single-step-gate", PASS,
                       details={"pairs": len(list(pairs))})


def check_quasi_contraction(space: MetricSpaceDescriptor,
                            T: SelfMap | Callable[[Point], Point],
                            alpha: float,
                            pairs: Sequence[tuple[Point, Point]],
                            tol: float = SINGLE_STEP_TOL) -> Certificate:
    """d(Tx,Ty) <= alpha * max of the five point/image distances."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0,1)")
    for x, y in pairs:
        lhs = space.distance(T(x), T(y))
        m = max_term(space, T, x, y)
        if lhs > alpha * m.value + tol:
            return Certificate("quasi-contraction", REFUTED,
                               witness={"x": _plain(x), "y": _plain(y),
                                        "d_Tx_Ty": lhs,
                                        "alpha_max_term": alpha * m.value})
    return Certificate("quasi-contraction", PASS,
                       details={"alpha": float(alpha),
                                "pairs": len(list(pairs))})


def check_shrinking_factor(space: MetricSpaceDescriptor,
                           T: SelfMap | Callable[[Point], Point],
                           alpha_fn: Callable[[float], float],
                           pairs: Sequence[tuple[Point, Point]],
                           tol: float = SINGLE_STEP_TOL) -> Certificate:
    """d(Tx,Ty) <= alpha(d(x,y)) * d(x,y) on sampled pairs."""
    for x, y in pairs:
        d = space.distance(x, y)
        lhs = space.distance(T(x), T(y))
        rhs = float(alpha_fn(d)) * d if d > 0 else 0.0
        if lhs > rhs + tol:
            return Certificate("shrinking-factor", REFUTED,
                               witness={"x": _plain(x), "y": _plain(y),
                                        "d_Tx_Ty": lhs, "alpha_d_times_d": rhs})
    return Certificate("shrinking-factor", PASS,
                       details={"pairs": len(list(pairs))})
