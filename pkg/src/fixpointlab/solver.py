"""Picard iteration with tail-diameter diagnostics.

Convergence is detected through the windowed tail diameter of the
iterate trace (a Cauchy criterion) rather than the single-step distance,
which can fire spuriously for slowly contracting maps.  A converged
solve is post-verified by the residual d(Tz, z); boundedness of the
orbit is monitored against an escape radius and flagged, never proven.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .certificates import (HYPOTHESIS_FAILURE, INCONCLUSIVE, PASS, REFUTED,
                           Certificate)
from .gates import Envelope
from .metric import (MapApplicationError, MetricSpaceDescriptor, Point,
                     is_scalar_point, _plain)

VERDICT_CONVERGED = "converged"
VERDICT_MAX_ITER = "max-iter"
VERDICT_DIVERGED = "diverged-unbounded"
VERDICT_SUSPECT = "suspect"

# residual post-verification threshold, as a multiple of the Cauchy tol
RESIDUAL_FACTOR = 10.0

CONTRACTION_TOL = 1e-12

DEFAULT_WINDOW = 16
DEFAULT_MAX_ITER = 10_000
ESCAPE_FACTOR = 1e8


@dataclass
class OrbitTrace:
    """Iterates with per-step distances and suffix tail diameters.

    tail_diams[n] is b_n over the finite trace: the max pairwise distance
    among iterates with indices >= n, a lower bound for the infinite-tail
    quantity.  escape_index is the first index whose distance from x0
    reached the escape radius, if any.
    """

    points: list
    step_dists: np.ndarray
    tail_diams: np.ndarray
    bounded_flag: bool
    escape_index: int | None = None

    def __len__(self) -> int:
        return len(self.points)

    def to_csv(self, path) -> None:
        scalar = is_scalar_point(self.points[0])
        if scalar:
            header = ["n", "x_n", "step_dist", "tail_diam"]
        else:
            dim = int(np.asarray(self.points[0], dtype=float).size)
            header = (["n"] + [f"x_n_{i}" for i in range(dim)]
                      + ["step_dist", "tail_diam"])
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            last = len(self.points) - 1
            for n, p in enumerate(self.points):
                coords = ([f"{float(p):.17g}"] if scalar else
                          [f"{v:.17g}" for v in np.asarray(p, dtype=float)])
                step = f"{self.step_dists[n]:.17g}" if n < last else ""
                writer.writerow([n] + coords + [step,
                                                f"{self.tail_diams[n]:.17g}"])


@dataclass
class ConvergenceReport:
    verdict: str
    limit_point: Point | None
    iterations_used: int
    final_residual: float | None
    tail_limit_estimate: float | None

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "limit": None if self.limit_point is None else _plain(self.limit_point),
            "iterations": int(self.iterations_used),
            "residual": self.final_residual,
            "tail_limit_estimate": self.tail_limit_estimate,
        }


def _apply(T: Callable[[Point], Point], x: Point, index: int) -> Point:
    try:
        return T(x)
    except Exception as exc:
        raise MapApplicationError(index, x, exc) from exc


def _window_diameter(space: MetricSpaceDescriptor, pts: Sequence[Point],
                     scalar: bool) -> float:
    if scalar and space.kind == "real-line":
        return max(pts) - min(pts)
    best = 0.0
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            d = space.distance(pts[i], pts[j])
            if d > best:
                best = d
    return best


def tail_diameters(space: MetricSpaceDescriptor,
                   points: Sequence[Point],
                   window_end: int | None = None) -> np.ndarray:
    """b_n over the trace prefix x_0..x_N: max pairwise distance among
    iterates with indices in [n, N], for n = 0..N.

    Fast paths: O(N) suffix max/min on the real line, an O(N^2) compiled
    kernel for Euclidean vectors; other metrics take a direct pair scan
    through the distance callable.
    """
    pts = list(points)
    if not pts:
        raise ValueError("trace must be nonempty")
    n_last = len(pts) - 1 if window_end is None else int(window_end)
    if n_last < 0 or n_last > len(pts) - 1:
        raise ValueError("window_end outside the trace")
    pts = pts[:n_last + 1]
    if space.kind == "real-line" and is_scalar_point(pts[0]):
        return _kernels.suffix_diameters_scalar(np.asarray(pts, dtype=np.float64))
    if space.kind == "euclidean" and not is_scalar_point(pts[0]):
        arr = np.asarray([np.asarray(p, dtype=float) for p in pts])
        return _kernels.suffix_diameters_euclidean(arr)
    n = len(pts)
    out = np.zeros(n, dtype=np.float64)
    best = 0.0
    for i in range(n - 2, -1, -1):
        row = max(space.distance(pts[i], pts[j]) for j in range(i + 1, n))
        if row > best:
            best = row
        out[i] = best
    return out


def iterate_to_fixed_point(space: MetricSpaceDescriptor,
                           T: Callable[[Point], Point],
                           x0: Point,
                           tol: float,
                           max_iter: int = DEFAULT_MAX_ITER,
                           window: int = DEFAULT_WINDOW,
                           escape_radius: float | None = None
                           ) -> tuple[ConvergenceReport, OrbitTrace]:
    """Iterate x_{k+1} = T(x_k) until the windowed tail diameter of the
    last ``window`` iterates falls below ``tol``.

    On Cauchy detection the residual d(Tz, z) is post-verified: within
    10*tol the verdict is "converged", beyond it "suspect" (the map may
    be discontinuous at the limit).  The orbit is declared
    "diverged-unbounded" when d(x_k, x0) reaches the escape radius
    (default 1e8 * (1 + d(x0, Tx0)) — a heuristic flag, not a proof of
    unboundedness).  Exhausting max_iter returns verdict "max-iter" with
    the full trace, not an exception.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    if window < 2:
        raise ValueError("window must be >= 2")
    if escape_radius is not None and escape_radius <= 0:
        raise ValueError("escape_radius must be positive")

    scalar = is_scalar_point(x0)
    pts: list[Point] = [x0]
    steps: list[float] = []
    escape_index: int | None = None
    cauchy = False
    wd: float | None = None
    cur = x0

    for k in range(1, max_iter + 1):
        nxt = _apply(T, cur, k)
        steps.append(space.distance(nxt, cur))
        pts.append(nxt)
        cur = nxt
        if escape_radius is None:
            escape_radius = ESCAPE_FACTOR * (1.0 + steps[0])
        if space.distance(cur, x0) >= escape_radius:
            escape_index = k
            break
        if len(pts) >= window:
            wd = _window_diameter(space, pts[-window:], scalar)
            if wd < tol:
                cauchy = True
                break

    trace = OrbitTrace(points=pts,
                       step_dists=np.asarray(steps, dtype=np.float64),
                       tail_diams=tail_diameters(space, pts),
                       bounded_flag=escape_index is None,
                       escape_index=escape_index)

    iterations = len(pts) - 1
    if escape_index is not None:
        report = ConvergenceReport(VERDICT_DIVERGED, None, iterations,
                                   None, None)
    elif cauchy:
        z = cur
        residual = space.distance(_apply(T, z, iterations + 1), z)
        verdict = (VERDICT_CONVERGED if residual <= RESIDUAL_FACTOR * tol
                   else VERDICT_SUSPECT)
        report = ConvergenceReport(verdict, z, iterations, residual, wd)
    else:
        tail = _window_diameter(space, pts[-min(window, len(pts)):], scalar)
        residual = space.distance(_apply(T, cur, iterations + 1), cur)
        report = ConvergenceReport(VERDICT_MAX_ITER, None, iterations,
                                   residual, tail)
    return report, trace


def check_contraction_inequality(tail_diams: Sequence[float],
                                 g: Envelope | Callable[[float], float],
                                 m_shift: int,
                                 eps: float,
                                 tol: float = CONTRACTION_TOL) -> Certificate:
    """b_{n+m} <= g(b_n) + eps for every valid n along the trace."""
    if m_shift < 1:
        raise ValueError("m_shift must be >= 1")
    if eps < 0:
        raise ValueError("eps must be >= 0")
    b = np.asarray(tail_diams, dtype=float)
    if b.size < m_shift + 2:
        raise ValueError("trace shorter than m_shift + 2")
    g_eval = g.value if isinstance(g, Envelope) else g
    min_margin = np.inf
    for n in range(b.size - m_shift):
        bound = float(g_eval(float(b[n]))) + eps
        margin = bound - float(b[n + m_shift])
        if margin < min_margin:
            min_margin = margin
        if b[n + m_shift] > bound + tol:
            return Certificate(
                "tail-contraction-inequality", REFUTED,
                witness={"n": n, "b_n": float(b[n]),
                         "b_shifted": float(b[n + m_shift]),
                         "bound": bound})
    return Certificate("tail-contraction-inequality", PASS,
                       details={"m_shift": int(m_shift), "eps": float(eps),
                                "min_margin": float(min_margin)})


def uniqueness_probe(space: MetricSpaceDescriptor,
                     T: Callable[[Point], Point],
                     starts: Sequence[Point],
                     tol: float,
                     max_iter: int = DEFAULT_MAX_ITER,
                     window: int = DEFAULT_WINDOW,
                     escape_radius: float | None = None) -> Certificate:
    """Multi-start attraction probe: all converged limits must agree
    pairwise within 2*tol.

    A diverging start is a hypothesis failure (the bounded-orbit premise
    is violated), not a refutation of uniqueness; a max-iter start makes
    the probe inconclusive.
    """
    starts = list(starts)
    if len(starts) < 2:
        raise ValueError("need at least 2 starts")
    limits = []
    for x0 in starts:
        report, _ = iterate_to_fixed_point(space, T, x0, tol,
                                           max_iter=max_iter, window=window,
                                           escape_radius=escape_radius)
        if report.verdict == VERDICT_DIVERGED:
            return Certificate(
                "uniqueness-probe", HYPOTHESIS_FAILURE,
                witness={"start": _plain(x0), "verdict": report.verdict},
                note="orbit unbounded from this start; bounded-orbit "
                     "hypothesis violated, uniqueness not refuted")
        if report.verdict != VERDICT_CONVERGED:
            return Certificate(
                "uniqueness-probe", INCONCLUSIVE,
                witness={"start": _plain(x0), "verdict": report.verdict},
                note="a start did not converge within budget")
        limits.append(report.limit_point)
    max_gap = 0.0
    worst = None
    for i in range(len(limits)):
        for j in range(i + 1, len(limits)):
            d = space.distance(limits[i], limits[j])
            if d > max_gap:
                max_gap = d
                worst = (i, j)
    details = {"limits": [_plain(z) for z in limits],
               "max_pairwise_gap": float(max_gap)}
    if max_gap > 2.0 * tol:
        i, j = worst
        return Certificate("uniqueness-probe", REFUTED,
                           witness={"start_a": _plain(starts[i]),
                                    "start_b": _plain(starts[j]),
                                    "limit_a": _plain(limits[i]),
                                    "limit_b": _plain(limits[j]),
                                    "gap": float(max_gap)},
                           details=details)
    return Certificate("uniqueness-probe", PASS, details=details)
