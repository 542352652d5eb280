"""Generic metric-space layer: points, distances, diameters, orbits.

Points are opaque: the shipped instantiations are real scalars and
fixed-dimension real vectors (numpy arrays), but any point type works as
long as the registered distance callable accepts it.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np

from .certificates import PASS, REFUTED, Certificate

Point = Any

# distances this close to zero (from rounding in user metrics) are clamped
NEGATIVE_CLAMP = 1e-15

DEFAULT_SEED = 12345


class MetricViolationError(ValueError):
    """A registered distance callable returned a clearly negative value."""


class MapApplicationError(RuntimeError):
    """A self-map raised while building an orbit; carries the failing index."""

    def __init__(self, index: int, point: Point, cause: BaseException):
        super().__init__(f"self-map raised at iterate index {index}: {cause!r}")
        self.index = index
        self.point = point


def is_scalar_point(p: Point) -> bool:
    return isinstance(p, (int, float, np.floating, np.integer))


@dataclass(frozen=True)
class Region:
    """Axis-aligned bounded region: an interval on the line or a box in R^d."""

    lo: Any
    hi: Any

    def __post_init__(self) -> None:
        lo, hi = np.asarray(self.lo, dtype=float), np.asarray(self.hi, dtype=float)
        if lo.shape != hi.shape:
            raise ValueError("region bounds must have matching shapes")
        if np.any(lo > hi):
            raise ValueError("region lower bound exceeds upper bound")

    @property
    def dim(self) -> int:
        arr = np.asarray(self.lo, dtype=float)
        return 1 if arr.ndim == 0 else int(arr.size)

    @property
    def is_scalar(self) -> bool:
        return np.asarray(self.lo, dtype=float).ndim == 0

    @property
    def is_bounded(self) -> bool:
        return bool(np.all(np.isfinite(np.asarray(self.lo, dtype=float)))
                    and np.all(np.isfinite(np.asarray(self.hi, dtype=float))))

    @property
    def diameter(self) -> float:
        span = np.asarray(self.hi, dtype=float) - np.asarray(self.lo, dtype=float)
        return float(np.sqrt(np.sum(span * span)))

    def midpoint(self) -> Point:
        lo, hi = np.asarray(self.lo, dtype=float), np.asarray(self.hi, dtype=float)
        mid = (lo + hi) / 2.0
        return float(mid) if mid.ndim == 0 else mid

    def corners(self) -> list[Point]:
        if self.is_scalar:
            lo, hi = float(self.lo), float(self.hi)
            return [lo] if lo == hi else [lo, hi]
        lo = np.asarray(self.lo, dtype=float)
        hi = np.asarray(self.hi, dtype=float)
        if lo.size > 12:
            raise ValueError("corner enumeration limited to 12 dimensions")
        return [np.array(c, dtype=float)
                for c in itertools.product(*zip(lo.tolist(), hi.tolist()))]

    def contains(self, p: Point, tol: float = 0.0) -> bool:
        arr = np.asarray(p, dtype=float)
        lo, hi = np.asarray(self.lo, dtype=float), np.asarray(self.hi, dtype=float)
        return bool(np.all(arr >= lo - tol) and np.all(arr <= hi + tol))

    def sample_with_rng(self, rng: np.random.Generator, count: int) -> list[Point]:
        if not self.is_bounded:
            raise ValueError("cannot sample an unbounded region")
        if self.is_scalar:
            vals = rng.uniform(float(self.lo), float(self.hi), size=count)
            return [float(v) for v in vals]
        lo = np.asarray(self.lo, dtype=float)
        hi = np.asarray(self.hi, dtype=float)
        pts = rng.uniform(lo, hi, size=(count, lo.size))
        return [pts[i] for i in range(count)]

    def sample(self, count: int, seed: int = DEFAULT_SEED) -> list[Point]:
        """Seeded deterministic uniform sample of ``count`` points."""
        return self.sample_with_rng(np.random.default_rng(seed), count)


def parse_region(text: str) -> Region:
    """Parse an interval given as "LO:HI"."""
    parts = text.split(":")
    if len(parts) != 2:
        raise ValueError(f"region must be LO:HI, got {text!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise ValueError(f"region bounds must be numbers, got {text!r}") from exc
    return Region(lo, hi)


@dataclass(frozen=True)
class MetricSpaceDescriptor:
    """A metric space: a distance callable plus an optional bounded sampler.

    ``kind`` tags the built-in metrics ("real-line", "euclidean") so the
    tail-diameter kernels can take their fast paths; user-registered
    spaces default to "generic" and go through the distance callable.
    """

    fn: Callable[[Point, Point], float]
    bounded_sampler: Callable[[Region, int, int], list[Point]] | None = None
    kind: str = "generic"
    label: str = "metric space"

    def distance(self, x: Point, y: Point) -> float:
        v = float(self.fn(x, y))
        if v < 0.0:
            if v > -NEGATIVE_CLAMP:
                return 0.0
            raise MetricViolationError(
                f"{self.label}: distance({x!r}, {y!r}) = {v} is negative")
        return v


def _abs_distance(x: Point, y: Point) -> float:
    return abs(float(x) - float(y))


def _euclidean_distance(x: Point, y: Point) -> float:
    dx = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    return float(np.sqrt(np.sum(dx * dx)))


def _region_sampler(region: Region, count: int, seed: int) -> list[Point]:
    return region.sample(count, seed)


def real_line() -> MetricSpaceDescriptor:
    """The real line with the absolute-value metric."""
    return MetricSpaceDescriptor(fn=_abs_distance,
                                 bounded_sampler=_region_sampler,
                                 kind="real-line",
                                 label="real line")


def euclidean(dim: int) -> MetricSpaceDescriptor:
    """R^dim with the Euclidean metric."""
    if dim < 1:
        raise ValueError("dimension must be >= 1")
    return MetricSpaceDescriptor(fn=_euclidean_distance,
                                 bounded_sampler=_region_sampler,
                                 kind="euclidean",
                                 label=f"euclidean R^{dim}")


def finite_diameter(space: MetricSpaceDescriptor,
                    points: Sequence[Point]) -> float:
    """Max pairwise distance over a finite point list; 0 for singletons."""
    if len(points) == 0:
        raise ValueError("finite_diameter requires a nonempty point list")
    best = 0.0
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            d = space.distance(points[i], points[j])
            if d > best:
                best = d
    return best


def orbit(map_fn: Callable[[Point], Point], x0: Point, n_steps: int) -> list[Point]:
    """Iterates [x0, T x0, ..., T^n x0], length n_steps + 1.

    If the map raises, the error is re-raised as MapApplicationError
    carrying the index of the failing application.
    """
    if n_steps < 0:
        raise ValueError("n_steps must be >= 0")
    pts = [x0]
    cur = x0
    for k in range(n_steps):
        try:
            cur = map_fn(cur)
        except Exception as exc:
            raise MapApplicationError(k + 1, pts[-1], exc) from exc
        pts.append(cur)
    return pts


def check_metric_axioms(space: MetricSpaceDescriptor,
                        points: Sequence[Point],
                        tol: float = 0.0) -> Certificate:
    """Sampled symmetry + triangle-inequality check over all point triples.

    Exact (tol=0) for the built-in real-line metric; a small tolerance is
    appropriate for user metrics with rounding.
    """
    pts = list(points)
    for i, x in enumerate(pts):
        if space.distance(x, x) > tol:
            return Certificate("metric-axioms", REFUTED,
                               witness={"x": _plain(x), "d_xx": space.distance(x, x)})
    for x, y in itertools.combinations(pts, 2):
        dxy, dyx = space.distance(x, y), space.distance(y, x)
        if abs(dxy - dyx) > tol:
            return Certificate("metric-axioms", REFUTED,
                               witness={"x": _plain(x), "y": _plain(y),
                                        "d_xy": dxy, "d_yx": dyx})
    for x, y, z in itertools.permutations(pts, 3):
        if space.distance(x, z) > space.distance(x, y) + space.distance(y, z) + tol:
            return Certificate("metric-axioms", REFUTED,
                               witness={"x": _plain(x), "y": _plain(y), "z": _plain(z)})
    return Certificate("metric-axioms", PASS,
                       details={"triples_checked": len(pts) ** 3})


def _plain(p: Point):
    """JSON-friendly rendering of a point."""
    if is_scalar_point(p):
        return float(p)
    return [float(v) for v in np.asarray(p, dtype=float).ravel()]
