"""Finite metric (or semi-metric) spaces: diameters, covering numbers, entropy.

A finite point set with a distance matrix stands in for a compact index set.
Covering numbers use closed balls centered at points of the space; the greedy
construction is an upper bound and the exhaustive search (capped in size) is
the exact oracle.  Discretized covering numbers lower-bound continuum ones,
so condition checks built on them are resolution-limited by construction.
"""
from __future__ import annotations

import csv
import itertools
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import EmptySpace, TooLarge

#: Exhaustive minimum-cover search is only attempted up to this many points.
EXACT_SEARCH_CAP = 20

#: Largest point count for which the triangle inequality is fully checked.
_TRIANGLE_CHECK_CAP = 128


def _parse_metric(metric):
    """Accepts 'euclidean', 'sup', 'holder(alpha)' or ('holder', alpha)."""
    if isinstance(metric, tuple) and metric[0] == "holder":
        return "holder", float(metric[1])
    if not isinstance(metric, str):
        raise ValueError(f"unrecognized metric spec {metric!r}")
    name = metric.strip().lower()
    if name in ("euclidean", "sup"):
        return name, None
    if name.startswith("holder(") and name.endswith(")"):
        alpha = float(name[len("holder("):-1])
        if not (0.0 < alpha <= 1.0):
            raise ValueError("holder exponent must lie in (0, 1]")
        return "holder", alpha
    raise ValueError(f"unrecognized metric spec {metric!r}")


def _pairwise(coords: np.ndarray, metric) -> np.ndarray:
    kind, alpha = _parse_metric(metric)
    diff = coords[:, None, :] - coords[None, :, :]
    if kind == "sup":
        return np.abs(diff).max(axis=2)
    eucl = np.sqrt((diff ** 2).sum(axis=2))
    if kind == "euclidean":
        return eucl
    return eucl ** alpha


@dataclass(frozen=True)
class FiniteMetricSpace:
    """Points plus a symmetric nonnegative distance matrix with zero diagonal.

    Semi-distances are allowed (zero off-diagonal entries are fine); triangle
    inequality violations only raise a warning, since natural semi-distances
    need not satisfy it exactly at Monte Carlo resolution.
    """

    labels: tuple[str, ...]
    dist: np.ndarray
    coords: np.ndarray | None = None

    def __post_init__(self):
        d = np.asarray(self.dist, dtype=float)
        n = len(self.labels)
        if d.shape != (n, n):
            raise ValueError(f"distance matrix shape {d.shape} does not match {n} points")
        if n == 0:
            return
        if np.any(~np.isfinite(d)) or np.any(d < 0):
            raise ValueError("distances must be finite and nonnegative")
        if np.max(np.abs(d - d.T)) > 1e-9 * max(1.0, float(np.max(d))):
            raise ValueError("distance matrix must be symmetric")
        if np.max(np.abs(np.diag(d))) > 0:
            raise ValueError("distance matrix must have zero diagonal")
        if n <= _TRIANGLE_CHECK_CAP:
            tol = 1e-9 * max(1.0, float(np.max(d)))
            for k in range(n):
                if np.any(d > d[:, k][:, None] + d[k, :][None, :] + tol):
                    warnings.warn("triangle inequality fails; treating as a semi-distance",
                                  stacklevel=2)
                    break

    def __len__(self):
        return len(self.labels)

    @classmethod
    def from_matrix(cls, dist, labels=None) -> "FiniteMetricSpace":
        dist = np.asarray(dist, dtype=float)
        if labels is None:
            labels = tuple(f"x{i}" for i in range(dist.shape[0]))
        return cls(tuple(labels), dist)

    @classmethod
    def from_coords(cls, coords, metric="euclidean", labels=None) -> "FiniteMetricSpace":
        coords = np.asarray(coords, dtype=float)
        if coords.ndim == 1:
            coords = coords.reshape(-1, 1)
        d = _pairwise(coords, metric)
        np.fill_diagonal(d, 0.0)
        if labels is None:
            labels = tuple(f"x{i}" for i in range(coords.shape[0]))
        return cls(tuple(labels), d, coords=coords)

    @classmethod
    def grid_1d(cls, n: int, low: float = 0.0, high: float = 1.0,
                metric="euclidean") -> "FiniteMetricSpace":
        xs = np.linspace(low, high, n).reshape(-1, 1)
        return cls.from_coords(xs, metric=metric)


def load_distance_csv(path) -> FiniteMetricSpace:
    """n x n numeric CSV, optional single header row of labels."""
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh) if row]
    labels = None
    try:
        float(rows[0][0])
    except ValueError:
        labels = tuple(s.strip() for s in rows[0])
        rows = rows[1:]
    d = np.array([[float(v) for v in row] for row in rows])
    return FiniteMetricSpace.from_matrix(d, labels=labels)


def load_coords_csv(path, metric="euclidean") -> FiniteMetricSpace:
    """Coordinate rows (optionally headed), turned into a space under `metric`."""
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh) if row]
    try:
        float(rows[0][0])
    except ValueError:
        rows = rows[1:]
    coords = np.array([[float(v) for v in row] for row in rows])
    return FiniteMetricSpace.from_coords(coords, metric=metric)


# ---------------------------------------------------------------------------
# covering machinery
# ---------------------------------------------------------------------------

def diameter(space: FiniteMetricSpace) -> float:
    if len(space) == 0:
        raise EmptySpace("diameter of an empty space")
    return float(np.max(space.dist))


def covering_number_greedy(space: FiniteMetricSpace, eps: float) -> int:
    """Size of a greedy cover by closed eps-balls centered at points.

    Repeatedly picks the center covering the most uncovered points, breaking
    ties toward the lowest index; this upper-bounds the minimum cover size.
    """
    n = len(space)
    if n == 0:
        raise EmptySpace("covering an empty space")
    if eps <= 0:
        raise ValueError("eps must be positive")
    balls = space.dist <= eps
    uncovered = np.ones(n, dtype=bool)
    count = 0
    while uncovered.any():
        gains = (balls & uncovered[None, :]).sum(axis=1)
        center = int(np.argmax(gains))  # argmax takes the lowest index on ties
        uncovered &= ~balls[center]
        count += 1
    return count


def covering_number_exact(space: FiniteMetricSpace, eps: float,
                          cap: int = EXACT_SEARCH_CAP) -> int:
    """Minimum cover size by exhaustive subset search in increasing cardinality.

    Ball coverages are memoized as bitsets.  Intended as a test oracle;
    raises TooLarge above `cap` points.
    """
    n = len(space)
    if n == 0:
        raise EmptySpace("covering an empty space")
    if eps <= 0:
        raise ValueError("eps must be positive")
    if n > cap:
        raise TooLarge(f"{n} points exceeds the exhaustive-search cap of {cap}")
    balls = space.dist <= eps
    masks = []
    for i in range(n):
        m = 0
        for j in range(n):
            if balls[i, j]:
                m |= 1 << j
        masks.append(m)
    full = (1 << n) - 1
    upper = covering_number_greedy(space, eps)
    for k in range(1, upper + 1):
        for combo in itertools.combinations(range(n), k):
            acc = 0
            for i in combo:
                acc |= masks[i]
                if acc == full:
                    break
            if acc == full:
                return k
    return upper


def entropy(space: FiniteMetricSpace, eps: float, mode: str = "greedy") -> float:
    """Natural log of the covering number under the requested mode."""
    if mode == "greedy":
        return math.log(covering_number_greedy(space, eps))
    if mode == "exact":
        return math.log(covering_number_exact(space, eps))
    raise ValueError(f"mode must be 'greedy' or 'exact', got {mode!r}")


def holder_covering_bound(dim: int, alpha: float, c2: float, eps: float) -> float:
    """Model covering bound c2 * eps**(-dim/alpha) for a bounded set in R^dim
    carrying a distance dominated by C * |x1 - x2|**alpha."""
    if dim < 1 or not (0.0 < alpha <= 1.0) or c2 <= 0 or eps <= 0:
        raise ValueError("need dim >= 1, alpha in (0,1], c2 > 0, eps > 0")
    return c2 * eps ** (-dim / alpha)
