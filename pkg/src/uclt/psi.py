"""Generating functions for moment-indexed norm families and their calculus.

A generating function ``psi`` assigns to every moment order ``p`` a positive
weight, finite exactly on an open support interval ``(A, B)`` (``B`` may be
infinite).  The induced norm of a random quantity with moment curve
``c(p) = |xi|_p`` is ``sup_p c(p)/psi(p)``; the limiting degenerate shape
concentrated at a single order ``r`` recovers the plain ``L_r`` norm.

The module also provides the transforms built on top of psi:

* the moment-inequality rescaling ``psi_R(p) = (p/log p) * psi(p)``,
* the lower transform ``psi_*(x) = inf_{y in (0,1)} [x*y + log psi(1/y)]``,
* the restricted convex conjugate ``g*(y) = sup_{x >= 2} (x*y - g(x))``,
* the exponential tail bound and the matching Orlicz-type N-function.

Conventions: ``c/inf == 0`` when a weight is infinite, and every sup/inf over
a continuum is a log-spaced grid scan with golden-section refinement.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import gammaln

from ._gridopt import log_grid, maximize_on_grid, minimize_on_grid
from .errors import EmptyDomain, EmptySupportOverlap, InvalidSupport, MissingData

INF = math.inf

#: Grid cap standing in for an unbounded support endpoint.  Reported values
#: obtained under this truncation are labelled as such by callers.
DEFAULT_P_CAP = 1024.0

#: Default node count for 1-D extremization scans.
DEFAULT_NODES = 512

_FORMS = ("closed_power", "tabulated", "degenerate", "scaled", "rosenthal")


@dataclass(frozen=True)
class PsiFunction:
    """A positive generating function on an open support interval.

    Use the classmethod constructors; the raw constructor validates the
    invariants (positive values, ascending in-support grid, A >= 1 < B).
    """

    form: str
    support_low: float = 2.0
    support_high: float = INF
    q: float | None = None
    r: float | None = None
    grid: tuple[float, ...] | None = None
    values: tuple[float, ...] | None = None
    factor: float | None = None
    base: "PsiFunction | None" = None

    def __post_init__(self):
        if self.form not in _FORMS:
            raise ValueError(f"unknown form {self.form!r}")
        a, b = self.support_low, self.support_high
        if not (a >= 1.0 and b > a):
            raise ValueError(f"support must satisfy 1 <= A < B, got ({a}, {b})")
        if self.form == "closed_power":
            if not (self.q is not None and self.q > 0):
                raise ValueError("closed_power needs q > 0")
        elif self.form == "degenerate":
            if self.r is None or not (a < self.r < b):
                raise ValueError("degenerate needs r strictly inside the support")
        elif self.form == "tabulated":
            g = np.asarray(self.grid, dtype=float)
            v = np.asarray(self.values, dtype=float)
            if g.ndim != 1 or g.size == 0 or g.shape != v.shape:
                raise ValueError("tabulated needs matching nonempty grid/values")
            if np.any(np.diff(g) <= 0):
                raise ValueError("tabulated grid must be strictly ascending")
            if not (g[0] > a and g[-1] < b):
                raise ValueError("tabulated grid must lie strictly inside the support")
            if np.any(~np.isfinite(v)) or np.any(v <= 0):
                raise ValueError("tabulated values must be finite and positive")
        elif self.form == "scaled":
            if self.base is None or self.factor is None or self.factor <= 0:
                raise ValueError("scaled needs a base function and factor > 0")
        elif self.form == "rosenthal":
            if self.base is None:
                raise ValueError("rosenthal wrapper needs a base function")

    # -- constructors -------------------------------------------------------

    @classmethod
    def closed_power(cls, q: float, support: tuple[float, float] = (2.0, INF)) -> "PsiFunction":
        """psi(p) = p**(1/q) on the open interval `support`."""
        return cls(form="closed_power", support_low=support[0],
                   support_high=support[1], q=float(q))

    @classmethod
    def degenerate(cls, r: float, support: tuple[float, float] | None = None) -> "PsiFunction":
        """The discontinuous shape: 1 at p == r, infinite elsewhere."""
        if support is None:
            support = (max(1.0, r - 1.0), r + 1.0)
        return cls(form="degenerate", support_low=support[0],
                   support_high=support[1], r=float(r))

    @classmethod
    def tabulated(cls, grid: Sequence[float], values: Sequence[float],
                  support: tuple[float, float] | None = None) -> "PsiFunction":
        """Log-linear interpolation of the given (p, psi(p)) table.

        Evaluation outside the grid range returns +inf (no extrapolation).
        The default support is ((1 + grid[0]) / 2, +inf), wide enough to keep
        the grid strictly interior while honouring A >= 1.
        """
        grid = tuple(float(p) for p in grid)
        if support is None:
            if grid and grid[0] <= 1.0:
                raise ValueError("tabulated grid must start above p = 1")
            support = (0.5 * (1.0 + grid[0]), INF)
        return cls(form="tabulated", support_low=support[0], support_high=support[1],
                   grid=grid, values=tuple(float(v) for v in values))

    def scaled(self, factor: float) -> "PsiFunction":
        """factor * psi, same support."""
        return PsiFunction(form="scaled", support_low=self.support_low,
                           support_high=self.support_high, factor=float(factor), base=self)

    # -- evaluation ---------------------------------------------------------

    def value(self, p: float) -> float:
        """psi(p), +inf outside the open support or the tabulated range."""
        return float(self.value_array(np.array([p]))[0])

    def value_array(self, ps: np.ndarray) -> np.ndarray:
        ps = np.asarray(ps, dtype=float)
        a, b = self.support_low, self.support_high
        inside = (ps > a) & (ps < b)
        out = np.full(ps.shape, INF)
        if self.form == "closed_power":
            out[inside] = ps[inside] ** (1.0 / self.q)
        elif self.form == "degenerate":
            hit = inside & (np.abs(ps - self.r) <= 4.0 * np.finfo(float).eps * max(1.0, abs(self.r)))
            out[hit] = 1.0
        elif self.form == "tabulated":
            g = np.asarray(self.grid)
            v = np.asarray(self.values)
            ok = inside & (ps >= g[0]) & (ps <= g[-1])
            if np.any(ok):
                out[ok] = np.exp(np.interp(np.log(ps[ok]), np.log(g), np.log(v)))
        elif self.form == "scaled":
            base = self.base.value_array(ps)
            out[inside] = self.factor * base[inside]
        elif self.form == "rosenthal":
            base = self.base.value_array(ps)
            safe = inside & (ps > 1.0)
            out[safe] = (ps[safe] / np.log(ps[safe])) * base[safe]
        return out

    def bar(self, p: float) -> float:
        """The log-weighted accessor p * log(psi(p)); +inf off support."""
        v = self.value(p)
        return INF if math.isinf(v) else p * math.log(v)

    def bar_array(self, ps: np.ndarray) -> np.ndarray:
        v = self.value_array(ps)
        out = np.full(v.shape, INF)
        fin = np.isfinite(v)
        out[fin] = ps[fin] * np.log(v[fin])
        return out

    def finite_region(self, p_cap: float = DEFAULT_P_CAP):
        """Where psi is finite: ("point", r) or ("interval", lo, hi).

        Interval endpoints are open in principle; callers scan just inside.
        An unbounded upper endpoint is truncated at `p_cap`.
        """
        if self.form == "degenerate":
            return ("point", self.r)
        if self.form in ("scaled", "rosenthal"):
            kind, *rest = self.base.finite_region(p_cap)
            if kind == "point":
                return (kind, *rest)
            lo, hi = rest
            return ("interval", max(lo, self.support_low), min(hi, self.support_high, p_cap))
        if self.form == "tabulated":
            return ("interval", self.grid[0], self.grid[-1])
        hi = min(self.support_high, p_cap)
        return ("interval", self.support_low, hi)

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        sup = [self.support_low, None if math.isinf(self.support_high) else self.support_high]
        d = {"form": self.form, "support": sup}
        if self.form == "closed_power":
            d["q"] = self.q
        elif self.form == "degenerate":
            d["r"] = self.r
        elif self.form == "tabulated":
            d["grid"] = list(self.grid)
            d["values"] = list(self.values)
        elif self.form == "scaled":
            d["factor"] = self.factor
            d["base"] = self.base.to_dict()
        elif self.form == "rosenthal":
            d["base"] = self.base.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PsiFunction":
        sup = d.get("support", [2.0, None])
        support = (float(sup[0]), INF if sup[1] is None else float(sup[1]))
        form = d["form"]
        if form == "closed_power":
            return cls.closed_power(d["q"], support)
        if form == "degenerate":
            return cls.degenerate(d["r"], support)
        if form == "tabulated":
            return cls.tabulated(d["grid"], d["values"], support)
        if form == "scaled":
            return cls.from_dict(d["base"]).scaled(d["factor"])
        if form == "rosenthal":
            return rosenthal_transform(cls.from_dict(d["base"]))
        raise ValueError(f"unknown form {form!r}")

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, s: str) -> "PsiFunction":
        return cls.from_dict(json.loads(s))


def gaussian_lp_norm(p, scale: float = 1.0):
    """|scale * Z|_p for standard normal Z, from the absolute-moment formula.

    E|Z|**p = 2**(p/2) * Gamma((p+1)/2) / sqrt(pi), so the norm is
    sqrt(2) * (Gamma((p+1)/2)/sqrt(pi))**(1/p).  Accepts scalars or arrays.
    """
    p = np.asarray(p, dtype=float)
    val = scale * math.sqrt(2.0) * np.exp((gammaln((p + 1.0) / 2.0) - 0.5 * math.log(math.pi)) / p)
    return float(val) if val.ndim == 0 else val


@dataclass(frozen=True)
class MomentCurve:
    """Estimated or analytic L_p norms of one random quantity on a p grid.

    `provenance` is either {"kind": "analytic"} or
    {"kind": "monte_carlo", "seed": ..., "replications": ...}; Monte Carlo
    curves carry per-point standard errors and are allowed to violate
    monotonicity in p by up to `slack_se` standard errors.
    """

    p_grid: tuple[float, ...]
    norms: tuple[float, ...]
    provenance: dict = field(default_factory=lambda: {"kind": "analytic"})
    stderr: tuple[float, ...] | None = None
    slack_se: float = 3.0

    def __post_init__(self):
        ps = np.asarray(self.p_grid, dtype=float)
        ns = np.asarray(self.norms, dtype=float)
        if ps.ndim != 1 or ps.size == 0 or ps.shape != ns.shape:
            raise ValueError("p_grid and norms must be matching nonempty 1-D sequences")
        if np.any(ps < 1.0) or np.any(np.diff(ps) <= 0):
            raise ValueError("p_grid must be strictly ascending with p >= 1")
        if np.any(~np.isfinite(ns)) or np.any(ns < 0):
            raise ValueError("norms must be finite and nonnegative")
        se = np.zeros_like(ns) if self.stderr is None else np.asarray(self.stderr, dtype=float)
        slack = self.slack_se * (se[:-1] + se[1:])
        drops = ns[:-1] - ns[1:]
        if np.any(drops > slack + 1e-12 * np.maximum(ns[:-1], 1.0)):
            raise ValueError("norms must be nondecreasing in p (within Monte Carlo slack)")

    @classmethod
    def analytic(cls, p_grid, norms) -> "MomentCurve":
        return cls(tuple(float(p) for p in p_grid), tuple(float(v) for v in norms))

    @classmethod
    def zero(cls, p_grid) -> "MomentCurve":
        return cls.analytic(p_grid, [0.0] * len(tuple(p_grid)))

    @classmethod
    def standard_gaussian(cls, p_grid, scale: float = 1.0) -> "MomentCurve":
        p_grid = tuple(float(p) for p in p_grid)
        return cls.analytic(p_grid, [gaussian_lp_norm(p, scale) for p in p_grid])

    @classmethod
    def from_samples(cls, samples, p_grid, provenance: dict | None = None,
                     groups: int = 32) -> "MomentCurve":
        """Debias sample L_p norms by delete-a-group jackknife over `groups` blocks."""
        x = np.abs(np.asarray(samples, dtype=float)).ravel()
        n = x.size
        if n < 2:
            raise ValueError("need at least two samples")
        groups = max(2, min(groups, n))
        bounds = np.linspace(0, n, groups + 1).astype(int)
        p_grid = tuple(float(p) for p in p_grid)
        norms, errs = [], []
        for p in p_grid:
            v = x ** p
            total = float(v.sum())
            gsums = np.array([v[bounds[g]:bounds[g + 1]].sum() for g in range(groups)])
            gsizes = np.diff(bounds)
            full = (total / n) ** (1.0 / p)
            loo = ((total - gsums) / (n - gsizes)) ** (1.0 / p)
            jack = groups * full - (groups - 1) * float(loo.mean())
            se = math.sqrt((groups - 1) / groups * float(((loo - loo.mean()) ** 2).sum()))
            norms.append(max(jack, 0.0))
            errs.append(se)
        prov = provenance or {"kind": "monte_carlo", "seed": None, "replications": n}
        return cls(p_grid, tuple(norms), provenance=prov, stderr=tuple(errs))

    def value_at(self, p: float) -> float:
        for pv, nv in zip(self.p_grid, self.norms):
            if abs(pv - p) <= 4.0 * np.finfo(float).eps * max(1.0, abs(p)):
                return nv
        raise MissingData(f"moment curve has no entry at p = {p}")

    def stderr_at(self, p: float) -> float:
        if self.stderr is None:
            return 0.0
        for pv, sv in zip(self.p_grid, self.stderr):
            if abs(pv - p) <= 4.0 * np.finfo(float).eps * max(1.0, abs(p)):
                return sv
        raise MissingData(f"moment curve has no entry at p = {p}")

    def with_scale(self, c: float) -> "MomentCurve":
        """Curve of the variable scaled by |c| (L_p norms are homogeneous)."""
        c = abs(float(c))
        se = None if self.stderr is None else tuple(c * s for s in self.stderr)
        return MomentCurve(self.p_grid, tuple(c * v for v in self.norms),
                           provenance=self.provenance, stderr=se, slack_se=self.slack_se)

    def to_dict(self) -> dict:
        d = {"p_grid": list(self.p_grid), "norms": list(self.norms),
             "provenance": self.provenance}
        if self.stderr is not None:
            d["stderr"] = list(self.stderr)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "MomentCurve":
        se = d.get("stderr")
        return cls(tuple(d["p_grid"]), tuple(d["norms"]), provenance=d.get("provenance", {"kind": "analytic"}),
                   stderr=None if se is None else tuple(se))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, s: str) -> "MomentCurve":
        return cls.from_dict(json.loads(s))


# ---------------------------------------------------------------------------
# norms
# ---------------------------------------------------------------------------

def gls_norm(curve: MomentCurve, psi: PsiFunction) -> float:
    """sup over the curve's grid of norms(p)/psi(p), with c/inf == 0.

    Raises EmptySupportOverlap when no grid point lies inside the open
    support of psi.  Against the degenerate shape at r this returns the
    curve value at r exactly (division by 1.0 is exact).
    """
    a, b = psi.support_low, psi.support_high
    if not any(a < p < b for p in curve.p_grid):
        raise EmptySupportOverlap(
            f"no curve point inside support ({a}, {b}); grid = {curve.p_grid}")
    weights = psi.value_array(np.asarray(curve.p_grid))
    best = 0.0
    for nv, w in zip(curve.norms, weights):
        if math.isinf(w):
            continue
        best = max(best, nv / w)
    return best


def gls_norm_with_se(curve: MomentCurve, psi: PsiFunction) -> tuple[float, float]:
    """gls_norm plus a first-order standard error taken at the attaining point."""
    a, b = psi.support_low, psi.support_high
    if not any(a < p < b for p in curve.p_grid):
        raise EmptySupportOverlap(f"no curve point inside support ({a}, {b})")
    weights = psi.value_array(np.asarray(curve.p_grid))
    best, best_se = 0.0, 0.0
    for i, (nv, w) in enumerate(zip(curve.norms, weights)):
        if math.isinf(w):
            continue
        ratio = nv / w
        if ratio >= best:
            best = ratio
            best_se = (curve.stderr[i] / w) if curve.stderr is not None else 0.0
    return best, best_se


def subq_norm(curve: MomentCurve, q: float) -> float:
    """sup over grid points p >= 2 of norms(p) / p**(1/q)."""
    if q <= 0:
        raise ValueError("q must be positive")
    pts = [(p, v) for p, v in zip(curve.p_grid, curve.norms) if p >= 2.0]
    if not pts:
        raise EmptySupportOverlap(f"no curve point with p >= 2; grid = {curve.p_grid}")
    return max(v / p ** (1.0 / q) for p, v in pts)


# ---------------------------------------------------------------------------
# transforms
# ---------------------------------------------------------------------------

def rosenthal_transform(psi: PsiFunction) -> PsiFunction:
    """The moment-inequality rescaling psi_R(p) = (p / log p) * psi(p).

    Well defined whenever log p > 0 on the support, i.e. support_low >= 1;
    otherwise raises InvalidSupport.
    """
    if psi.support_low < 1.0:
        raise InvalidSupport("rescaling needs log p > 0, i.e. support_low >= 1")
    return PsiFunction(form="rosenthal", support_low=psi.support_low,
                       support_high=psi.support_high, base=psi)


def _closed_power_lower_star(psi: PsiFunction, x: float, lo: float, hi: float) -> float:
    """Exact lower transform of p**(1/q): interior stationary point p = q*x,
    clamped to the scan interval [lo, hi]."""
    q = psi.q
    p_star = q * x
    if p_star <= lo:
        p_star = lo
    elif p_star >= hi:
        p_star = hi
    else:
        return (1.0 / q) * (1.0 + math.log(q * x))
    return x / p_star + math.log(p_star) / q


def psi_lower_star(psi: PsiFunction, x: float, *, method: str = "auto",
                   nodes: int = DEFAULT_NODES, p_cap: float = DEFAULT_P_CAP,
                   tol: float = 1e-9) -> float:
    """inf over y in (0, 1) with 1/y in the support of [x*y + log psi(1/y)].

    In the substitution p = 1/y this is inf over admissible p of
    x/p + log psi(p).  The feasible p must exceed 1 (so that y < 1); for a
    degenerate shape the domain is the single point r and the value is
    x/r + log psi(r) exactly.  `method` is "auto" (closed form for the pure
    power shape when its stationary point is interior, grid otherwise),
    "grid", or "closed".
    """
    if x < 0:
        raise ValueError("x must be nonnegative")
    region = psi.finite_region(p_cap)
    if region[0] == "point":
        r = region[1]
        if r <= 1.0:
            raise EmptyDomain("no y in (0,1) maps into the support")
        return x / r + math.log(psi.value(r))
    lo, hi = max(region[1], 1.0), region[2]
    if not (hi > lo):
        raise EmptyDomain("no y in (0,1) maps into the support")

    if method == "closed":
        if psi.form != "closed_power":
            raise ValueError("closed form only available for the pure power shape")
        return _closed_power_lower_star(psi, x, lo, hi)
    if method == "auto" and psi.form == "closed_power":
        return _closed_power_lower_star(psi, x, lo, hi)

    # nudge just inside the open interval; for tabulated shapes the grid
    # endpoints themselves are admissible
    eps = 1e-9
    a = lo * (1.0 + eps) if psi.form != "tabulated" else lo
    b = hi * (1.0 - 1e-12) if (psi.form != "tabulated" and math.isfinite(psi.support_high)
                               and hi >= psi.support_high) else hi
    grid = log_grid(a, b, nodes)

    def f(p):
        v = psi.value(p)
        return INF if math.isinf(v) else x / p + math.log(v)

    def fvec(ps):
        v = psi.value_array(ps)
        out = np.full(ps.shape, INF)
        fin = np.isfinite(v)
        out[fin] = x / ps[fin] + np.log(v[fin])
        return out

    _, val = minimize_on_grid(f, grid, fvec=fvec, tol=tol)
    return val


def young_fenchel(g, y: float, *, x_min: float = 2.0, x_max: float = DEFAULT_P_CAP,
                  nodes: int = DEFAULT_NODES, tol: float = 1e-9) -> float:
    """Restricted convex conjugate sup over x in [x_min, x_max] of x*y - g(x).

    This is the conjugate with domain clipped to x >= 2, evaluated on a
    log-spaced grid with golden-section refinement; points where g is
    infinite do not contribute. Returns -inf if g is infinite everywhere
    on the scan range (extended-real semantics, no exceptions).
    """
    grid = log_grid(x_min, x_max, nodes)

    def obj(xv):
        gv = g(xv)
        return -INF if math.isinf(gv) else xv * y - gv

    _, val = maximize_on_grid(obj, grid, tol=tol)
    return val


def psi_bar_conjugate(psi: PsiFunction, y: float, *, x_min: float = 2.0,
                      x_max: float = DEFAULT_P_CAP, nodes: int = DEFAULT_NODES,
                      tol: float = 1e-9) -> float:
    """Conjugate of p * log psi(p), restricted to the finite region of psi.

    Degenerate shapes contribute a single point; interval shapes are scanned
    like :func:`young_fenchel`.  Returns -inf when the finite region misses
    [x_min, x_max] entirely.
    """
    region = psi.finite_region(x_max)
    if region[0] == "point":
        r = region[1]
        if r < x_min or r > x_max:
            return -INF
        return r * y - psi.bar(r)
    lo, hi = max(region[1], x_min), min(region[2], x_max)
    if not (hi > lo):
        return -INF
    if psi.form != "tabulated":
        lo = lo * (1.0 + 1e-9)
        if math.isfinite(psi.support_high) and hi >= psi.support_high:
            hi = hi * (1.0 - 1e-12)
    grid = log_grid(lo, hi, nodes)

    def f(xv):
        bv = psi.bar(xv)
        return INF if math.isinf(bv) else -(xv * y - bv)

    def fvec(xs):
        bv = psi.bar_array(xs)
        out = np.full(xs.shape, INF)
        fin = np.isfinite(bv)
        out[fin] = -(xs[fin] * y - bv[fin])
        return out

    _, negval = minimize_on_grid(f, grid, fvec=fvec, tol=tol)
    return -negval


def gls_tail_bound(psi: PsiFunction, gls_norm_value: float, u: float, *,
                   x_max: float = DEFAULT_P_CAP, nodes: int = DEFAULT_NODES) -> float:
    """Exponential tail bound min(1, 2 exp(-conj(log(u / norm)))).

    `conj` is the restricted conjugate of p * log psi(p).  The bound is a
    probability: it clamps to 1 whenever u <= norm, and the truncation of an
    unbounded support at `x_max` only weakens (never invalidates) it.
    """
    if u <= 0:
        raise ValueError("u must be positive")
    if gls_norm_value <= 0:
        raise ValueError("norm value must be positive")
    yv = math.log(u / gls_norm_value)
    star = psi_bar_conjugate(psi, yv, x_max=x_max, nodes=nodes)
    if star == -INF:
        return 1.0
    return min(1.0, 2.0 * math.exp(-star))


def orlicz_n_function(psi: PsiFunction, u: float, *, x_max: float = DEFAULT_P_CAP,
                      nodes: int = DEFAULT_NODES) -> float:
    """Exponential Orlicz-type N-function generated by psi.

    N(u) = exp(conj(log |u|)) for |u| > e**2 and C * u**2 below, with C fixed
    by continuity at |u| = e**2 (the stitching constant is otherwise free).
    Values beyond float range come back as +inf; see
    :func:`log_orlicz_n_function` for an overflow-safe log evaluation.
    """
    au = abs(u)
    e2 = math.exp(2.0)
    if au <= e2:
        c = math.exp(psi_bar_conjugate(psi, 2.0, x_max=x_max, nodes=nodes)) / math.exp(4.0)
        return c * au * au
    star = psi_bar_conjugate(psi, math.log(au), x_max=x_max, nodes=nodes)
    try:
        return math.exp(star)
    except OverflowError:
        return INF


def log_orlicz_n_function(psi: PsiFunction, u: float, *, x_max: float = DEFAULT_P_CAP,
                          nodes: int = DEFAULT_NODES) -> float:
    """log N(u) for the same stitched N-function; -inf at u = 0."""
    au = abs(u)
    if au == 0.0:
        return -INF
    e2 = math.exp(2.0)
    if au <= e2:
        star2 = psi_bar_conjugate(psi, 2.0, x_max=x_max, nodes=nodes)
        return star2 - 4.0 + 2.0 * math.log(au)
    return psi_bar_conjugate(psi, math.log(au), x_max=x_max, nodes=nodes)
