"""Comparison ("gate") functions and their monotone envelopes.

A gate is a scalar function psi: [0,inf) -> [0,inf).  The classical
requirements checked here: nondecreasing, right upper semicontinuous,
and strictly below the identity on (0,inf).  The envelope
g(t) = sup_{0<=s<=t} psi(s) converts a possibly non-monotone gate into a
nondecreasing, right-continuous one; it is computed on a resolution grid
with a cached running maximum so sweeps cost O(1) amortized per query.

Semicontinuity and right-continuity are limit properties, so their
checks are refutation-only: a pass means "no violation found at the
stated resolution" and the certificate note says so.
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .certificates import PASS, REFUTED, Certificate, combine

DEFAULT_DELTAS = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6)

# strictness margin for psi(t) < t, relative so large t does not drown it
STRICTNESS_REL_MARGIN = 1e-12

MONOTONE_TOL = 1e-12
RUSC_TOL = 1e-9


@dataclass(frozen=True)
class GateFunction:
    """Scalar gate psi with a label for reports."""

    fn: Callable[[float], float]
    label: str = "gate"

    def __call__(self, t: float) -> float:
        return float(self.fn(t))


def linear_gate(a: float) -> GateFunction:
    return GateFunction(lambda t: a * t, label=f"linear:{a:g}")


def zero_gate() -> GateFunction:
    return GateFunction(lambda t: 0.0, label="zero")


def piecewise_gate(segments: Sequence[tuple[float, float, float]],
                   label: str | None = None) -> GateFunction:
    """Piecewise-affine gate from (start, slope, intercept) segments.

    Segment i applies on [start_i, start_{i+1}); the first start must be 0.
    """
    segs = sorted((float(s), float(m), float(b)) for s, m, b in segments)
    if not segs or segs[0][0] != 0.0:
        raise ValueError("piecewise gate needs a segment starting at 0")
    starts = [s for s, _, _ in segs]

    def fn(t: float) -> float:
        i = bisect.bisect_right(starts, t) - 1
        _, m, b = segs[i]
        return m * t + b

    if label is None:
        label = "piecewise:" + ";".join(f"{s:g},{m:g},{b:g}" for s, m, b in segs)
    return GateFunction(fn, label=label)


def table_gate(pairs: Sequence[tuple[float, float]],
               label: str | None = None) -> GateFunction:
    """Tabulated gate with right-constant interpolation.

    psi(t) equals the tabulated value at the largest knot <= t; the first
    knot must be 0 so every t >= 0 is covered.
    """
    knots = sorted((float(t), float(v)) for t, v in pairs)
    if not knots or knots[0][0] != 0.0:
        raise ValueError("table gate needs a knot at t=0")
    ts = [t for t, _ in knots]
    vs = [v for _, v in knots]

    def fn(t: float) -> float:
        return vs[bisect.bisect_right(ts, t) - 1]

    if label is None:
        label = "table:" + ";".join(f"{t:g},{v:g}" for t, v in knots)
    return GateFunction(fn, label=label)


def parse_gate(spec: str) -> GateFunction:
    """Parse a config gate spec.

    Formats: "linear:A", "piecewise:S,M,B;S,M,B;...", "table:T,V;T,V;...",
    "zero".
    """
    kind, _, rest = spec.partition(":")
    kind = kind.strip().lower()
    try:
        if kind == "zero":
            return zero_gate()
        if kind == "linear":
            return linear_gate(float(rest))
        if kind == "piecewise":
            segs = [tuple(float(x) for x in chunk.split(","))
                    for chunk in rest.split(";") if chunk.strip()]
            if any(len(s) != 3 for s in segs):
                raise ValueError("each piecewise segment is START,SLOPE,INTERCEPT")
            return piecewise_gate(segs)  # type: ignore[arg-type]
        if kind == "table":
            pts = [tuple(float(x) for x in chunk.split(","))
                   for chunk in rest.split(";") if chunk.strip()]
            if any(len(p) != 2 for p in pts):
                raise ValueError("each table entry is T,VALUE")
            return table_gate(pts)  # type: ignore[arg-type]
    except ValueError as exc:
        raise ValueError(f"bad gate spec {spec!r}: {exc}") from exc
    raise ValueError(f"unknown gate kind {kind!r} in {spec!r}")


def default_grid(t_max: float = 100.0, count: int = 2048) -> np.ndarray:
    """Evaluation grid on [0, t_max]: geometric + uniform mix.

    The geometric half probes behavior near 0, where strictness below the
    identity degenerates.
    """
    if t_max <= 0:
        raise ValueError("t_max must be positive")
    if count < 8:
        raise ValueError("count must be >= 8")
    half = count // 2
    geo = np.geomspace(t_max * 1e-9, t_max, count - half)
    uni = np.linspace(t_max / half, t_max, half)
    return np.unique(np.concatenate([[0.0], geo, uni]))


# --- envelope ----------------------------------------------------------------

def _grid_index(t: float, h: float) -> int:
    """Largest k >= 0 with k*h <= t, robust to float division drift."""
    k = int(np.floor(t / h + 1e-9))
    if k < 0:
        k = 0
    while k > 0 and k * h > t:
        k -= 1
    while (k + 1) * h <= t:
        k += 1
    return k


def envelope_value(psi: GateFunction | Callable[[float], float],
                   t: float,
                   resolution: float) -> float:
    """sup of psi over [0, t], approximated on {0, h, 2h, ...} plus t itself.

    Exactly equal to psi(t) whenever psi is nondecreasing, since t is
    always included in the evaluation set.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    k = _grid_index(t, resolution)
    best = float(psi(t))
    for j in range(k + 1):
        v = float(psi(j * resolution))
        if v > best:
            best = v
    return best


class Envelope:
    """Running-supremum envelope of a gate on a fixed-resolution grid.

    Caches psi on the grid with an accumulated maximum, so an ascending
    sweep of queries costs one psi evaluation per new grid node.
    """

    def __init__(self, base: GateFunction | Callable[[float], float],
                 resolution: float):
        if resolution <= 0:
            raise ValueError("resolution must be positive")
        self.base = base
        self.resolution = float(resolution)
        self._runmax = np.empty(0, dtype=np.float64)

    def _ensure(self, k: int) -> None:
        have = self._runmax.size
        if k < have:
            return
        need = max(k + 1, 2 * have, 64)
        h = self.resolution
        fresh = np.array([float(self.base(j * h)) for j in range(have, need)])
        carry = self._runmax[-1] if have else -np.inf
        ext = np.maximum.accumulate(np.concatenate([[carry], fresh]))[1:]
        self._runmax = np.concatenate([self._runmax, ext])

    def value(self, t: float) -> float:
        if t < 0:
            raise ValueError("t must be >= 0")
        k = _grid_index(t, self.resolution)
        self._ensure(k)
        return max(float(self._runmax[k]), float(self.base(t)))

    __call__ = value


# --- gate checks -------------------------------------------------------------

def check_nondecreasing(psi: GateFunction,
                        grid: Sequence[float]) -> Certificate:
    """psi(t_i) <= psi(t_{i+1}) + 1e-12 on consecutive grid points."""
    g = np.asarray(grid, dtype=float)
    if g.size < 2:
        raise ValueError("grid needs at least 2 points")
    if np.any(g < 0):
        raise ValueError("grid points must be >= 0")
    if np.any(np.diff(g) <= 0):
        raise ValueError("grid must be strictly increasing")
    prev_t, prev_v = float(g[0]), psi(float(g[0]))
    for t in g[1:]:
        v = psi(float(t))
        if prev_v > v + MONOTONE_TOL:
            return Certificate(
                "gate-nondecreasing", REFUTED,
                witness={"t_lo": prev_t, "t_hi": float(t),
                         "psi_lo": prev_v, "psi_hi": v})
        prev_t, prev_v = float(t), v
    return Certificate("gate-nondecreasing", PASS,
                       details={"grid_points": int(g.size)})


def check_below_identity(psi: GateFunction,
                         grid: Sequence[float]) -> Certificate:
    """Strictness psi(t) < t on a positive grid, with relative margin.

    Tested as psi(t) <= t*(1 - 1e-12) so rounding at large t does not
    flip the verdict.
    """
    g = np.asarray(grid, dtype=float)
    if g.size == 0:
        raise ValueError("grid must be nonempty")
    if np.any(g <= 0):
        raise ValueError("grid points must be > 0")
    worst_margin = np.inf
    for t in g:
        t = float(t)
        v = psi(t)
        margin = t - v
        if margin < worst_margin:
            worst_margin = margin
        if v > t * (1.0 - STRICTNESS_REL_MARGIN):
            return Certificate("gate-below-identity", REFUTED,
                               witness={"t": t, "psi": v})
    return Certificate("gate-below-identity", PASS,
                       details={"min_margin": float(worst_margin),
                                "grid_points": int(g.size)})


def check_right_usc(psi: GateFunction,
                    anchors: Sequence[float],
                    deltas: Sequence[float] = DEFAULT_DELTAS,
                    window_points: int = 64,
                    tol: float = RUSC_TOL) -> Certificate:
    """Right upper semicontinuity probe at each anchor.

    For shrinking windows (t0, t0+delta] the max of psi is recorded; the
    anchor passes if the smallest window max stays within tol of psi(t0).
    Refutation-only: a pass means no violation at this resolution.
    """
    ds = list(deltas)
    if (not ds or any(d <= 0 for d in ds)
            or any(ds[i + 1] >= ds[i] for i in range(len(ds) - 1))):
        raise ValueError("deltas must be positive and strictly decreasing")
    note = (f"refutation-only: windows down to {min(ds):g}, "
            f"{window_points} samples per window")
    measured = {}
    for t0 in anchors:
        t0 = float(t0)
        if t0 < 0:
            raise ValueError("anchors must be >= 0")
        base = psi(t0)
        window_maxima = []
        for d in ds:
            offs = np.linspace(d / window_points, d, window_points)
            window_maxima.append(max(psi(t0 + o) for o in offs))
        right_limsup = min(window_maxima)
        measured[t0] = right_limsup
        if right_limsup > base + tol:
            return Certificate(
                "gate-right-usc", REFUTED,
                witness={"t0": t0, "psi_t0": base,
                         "right_limsup": right_limsup},
                note=note)
    return Certificate("gate-right-usc", PASS,
                       details={"right_limsups": {f"{k:g}": v
                                                  for k, v in measured.items()}},
                       note=note)


def check_envelope_properties(psi: GateFunction,
                              grid: Sequence[float] | None = None,
                              deltas: Sequence[float] = DEFAULT_DELTAS,
                              resolution: float = 1e-3) -> Certificate:
    """Check the envelope g of psi: monotone, zero at zero, below the
    identity (weakly then strictly), and right continuous.

    If psi itself fails the gate preconditions (nondecreasing, strict
    below identity, right u.s.c.) the result is labeled conditional: the
    envelope facts are only guaranteed for compliant gates.
    """
    if grid is None:
        grid = default_grid(10.0, 512)
    g = np.asarray(grid, dtype=float)
    env = Envelope(psi, resolution)
    g_vals = np.array([env.value(float(t)) for t in g])

    subs = []

    witness = None
    for i in range(g.size - 1):
        if g_vals[i] > g_vals[i + 1] + MONOTONE_TOL:
            witness = {"t_lo": float(g[i]), "t_hi": float(g[i + 1]),
                       "g_lo": float(g_vals[i]), "g_hi": float(g_vals[i + 1])}
            break
    subs.append(Certificate("envelope-nondecreasing",
                            REFUTED if witness else PASS, witness=witness))

    zero_val = env.value(0.0)
    subs.append(Certificate(
        "envelope-zero-at-zero",
        PASS if abs(zero_val) <= MONOTONE_TOL else REFUTED,
        witness=None if abs(zero_val) <= MONOTONE_TOL else {"g0": zero_val}))

    witness = None
    for t, v in zip(g, g_vals):
        if v > t + MONOTONE_TOL:
            witness = {"t": float(t), "g": float(v)}
            break
    subs.append(Certificate("envelope-below-identity",
                            REFUTED if witness else PASS, witness=witness))

    witness = None
    for t, v in zip(g, g_vals):
        if t > 0 and v > t * (1.0 - STRICTNESS_REL_MARGIN):
            witness = {"t": float(t), "g": float(v)}
            break
    subs.append(Certificate("envelope-strictly-below-identity",
                            REFUTED if witness else PASS, witness=witness))

    # right continuity of g, refutation-only via shrinking right windows
    anchors = [float(t) for t in g[:: max(1, g.size // 12)]]
    witness = None
    for t0 in anchors:
        base = env.value(t0)
        mins = []
        for d in deltas:
            offs = np.linspace(d / 16, d, 16)
            mins.append(max(env.value(t0 + o) for o in offs))
        if min(mins) > base + RUSC_TOL:
            witness = {"t0": t0, "g_t0": base, "right_limit_bound": min(mins)}
            break
    subs.append(Certificate(
        "envelope-right-continuous",
        REFUTED if witness else PASS, witness=witness,
        note="refutation-only: sampled right windows"))

    pos = g[g > 0]
    pre = [check_nondecreasing(psi, g),
           check_right_usc(psi, anchors[:8], deltas)]
    if pos.size:
        pre.append(check_below_identity(psi, pos))
    conditional = any(c.refuted for c in pre)
    note = ("conditional: base gate failed its own precondition checks"
            if conditional else "")
    cert = combine("envelope-properties", subs, note=note)
    cert.details["resolution"] = float(resolution)
    cert.details["gate_precondition_ok"] = not conditional
    return cert


def check_limsup_inequality(g: Envelope | Callable[[float], float],
                            sequence: Sequence[float],
                            tail_start: int,
                            tol: float = RUSC_TOL) -> Certificate:
    """Windowed check that limsup g(a_n) <= g(limsup a_n) on a finite tail.

    A = max tail value, B = max of g over the tail; passes iff
    B <= g(A) + tol.
    """
    seq = np.asarray(sequence, dtype=float)
    if seq.size == 0 or tail_start >= seq.size:
        raise ValueError("tail is empty")
    if tail_start < 0:
        raise ValueError("tail_start must be >= 0")
    if np.any(seq < 0):
        raise ValueError("sequence must be nonnegative")
    g_eval = g.value if isinstance(g, Envelope) else g
    tail = seq[tail_start:]
    a_sup = float(tail.max())
    g_tail = np.array([float(g_eval(float(a))) for a in tail])
    g_sup = float(g_tail.max())
    bound = float(g_eval(a_sup))
    details = {"tail_sup": a_sup, "g_tail_sup": g_sup, "g_of_tail_sup": bound}
    if g_sup > bound + tol:
        idx = int(tail_start + int(np.argmax(g_tail)))
        return Certificate("limsup-inequality", REFUTED,
                           witness={"index": idx, "a_n": float(seq[idx]),
                                    "g_a_n": g_sup},
                           details=details)
    return Certificate("limsup-inequality", PASS, details=details)
