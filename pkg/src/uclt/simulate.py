"""Deterministic Monte Carlo laboratory for martingale-difference fields.

Models generate adapted difference sequences xi_i(x) on a finite coordinate
grid; the engine draws replications in fixed-size chunks, each chunk on its
own counter-based substream of the master seed, so results are byte-identical
for a given (model, seed, R) no matter how many worker threads run the
chunks.  Aggregation combines per-chunk partials in chunk order.

Shipped model kinds:

* ``iid_gaussian_field``  — i.i.d. Gaussian fields with a covariance kernel,
* ``weibull_field``       — i.i.d. symmetric stretched-exponential variables
                            times a spatial amplitude profile,
* ``garch_like``          — xi_i(x) = sigma_i(x) * eps_i(x) with sigma_i a
                            bounded function of past draws (dependent m.d.),
* ``bounded_sign``        — xi_i(x) = +-a_i(x) with an optional
                            past-dependent bounded amplitude (dependent m.d.).

All kinds accept ``bias`` (additive, deliberately breaking the difference
property for detector tests) and ``growth`` (deterministic index scaling
i**growth, used to manufacture exploding-variance examples).
"""
from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.special import erf, gamma as gamma_fn

from .distances import PairwiseMomentField, _pair_key
from .errors import HorizonExceeded
from .psi import MomentCurve, PsiFunction, gls_norm_with_se, rosenthal_transform
from .tails import TailFunction, w_operator

#: Universal constant in the martingale moment inequality
#: |n**-0.5 sum zeta_k|_p <= C * (p/ln p) * sqrt(mean of |zeta_k|_p**2).
OSEKOWSKI_CONSTANT = 15.5879

#: Sharp constant of the analogous inequality for independent summands.
ROSENTHAL_CONSTANT = 0.6535

_KINDS = ("iid_gaussian_field", "weibull_field", "garch_like", "bounded_sign")

#: Float budget per generated chunk (count * n * npoints).
_CHUNK_BUDGET = 1 << 21


# ---------------------------------------------------------------------------
# plain statistics helpers
# ---------------------------------------------------------------------------

def ks_two_sample(a, b) -> float:
    """Two-sample Kolmogorov-Smirnov statistic sup_x |F_a(x) - F_b(x)|."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    allv = np.concatenate([a, b])
    ca = np.searchsorted(a, allv, side="right") / a.size
    cb = np.searchsorted(b, allv, side="right") / b.size
    return float(np.max(np.abs(ca - cb)))


def ks_gaussian(samples, sigma: float) -> float:
    """One-sample KS distance of `samples` to a centered Gaussian with sd sigma."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    cdf = 0.5 * (1.0 + erf(x / (sigma * math.sqrt(2.0))))
    up = np.arange(1, n + 1) / n - cdf
    dn = cdf - np.arange(0, n) / n
    return float(max(up.max(), dn.max()))


def ks_two_sample_critical(n1: int, n2: int, alpha: float = 0.05) -> float:
    """Asymptotic two-sample rejection threshold at level alpha."""
    c = math.sqrt(-0.5 * math.log(alpha / 2.0))
    return c * math.sqrt((n1 + n2) / (n1 * n2))


# ---------------------------------------------------------------------------
# covariance kernels
# ---------------------------------------------------------------------------

def kernel_matrix(spec: dict, coords: np.ndarray) -> np.ndarray:
    """Covariance matrix of a named kernel on the coordinate rows."""
    name = spec.get("name")
    var = float(spec.get("variance", 1.0))
    if var <= 0:
        raise ValueError("kernel variance must be positive")
    if name == "white":
        return var * np.eye(coords.shape[0])
    if name == "rbf":
        ell = float(spec.get("length_scale", 0.5))
        d2 = ((coords[:, None, :] - coords[None, :, :]) ** 2).sum(axis=2)
        return var * np.exp(-0.5 * d2 / (ell * ell))
    if name in ("brownian", "fractional_brownian"):
        h = 0.5 if name == "brownian" else float(spec.get("hurst", 0.5))
        if not (0.0 < h <= 1.0):
            raise ValueError("hurst must lie in (0, 1]")
        norms = np.sqrt((coords ** 2).sum(axis=1))
        dists = np.sqrt(((coords[:, None, :] - coords[None, :, :]) ** 2).sum(axis=2))
        return var * 0.5 * (norms[:, None] ** (2 * h) + norms[None, :] ** (2 * h)
                            - dists ** (2 * h))
    raise ValueError(f"unknown kernel {name!r}")


def _cholesky(kmat: np.ndarray) -> np.ndarray:
    jitter = 1e-12 * max(1.0, float(np.max(np.diag(kmat))))
    return np.linalg.cholesky(kmat + jitter * np.eye(kmat.shape[0]))


# ---------------------------------------------------------------------------
# the model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MartingaleFieldModel:
    """A seeded generator of adapted difference fields on a coordinate grid."""

    name: str
    kind: str
    coords: tuple[tuple[float, ...], ...]
    params: dict
    horizon: int
    seed: int
    bias: float = 0.0
    growth: float = 0.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"kind must be one of {_KINDS}")
        if self.horizon < 1:
            raise ValueError("horizon must be at least 1")
        if len(self.coords) == 0:
            raise ValueError("need at least one coordinate")

    @property
    def npoints(self) -> int:
        return len(self.coords)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(f"x{i}" for i in range(self.npoints))

    @cached_property
    def _coord_array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)

    @cached_property
    def _chol(self) -> np.ndarray | None:
        if self.kind in ("iid_gaussian_field", "garch_like"):
            return _cholesky(kernel_matrix(self.params.get("kernel", {"name": "white"}),
                                           self._coord_array))
        return None

    def _amplitude(self) -> np.ndarray:
        slope = float(self.params.get("amplitude_slope", 0.0))
        amp = 1.0 + slope * self._coord_array[:, 0]
        if np.any(amp <= 0):
            raise ValueError("amplitude profile must stay positive on the grid")
        return amp

    # -- analytic companions -------------------------------------------------

    def analytic_covariance(self) -> np.ndarray | None:
        """Covariance of the normalized sums when known in closed form."""
        if self.bias != 0.0 or self.growth != 0.0:
            return None
        if self.kind == "iid_gaussian_field":
            return kernel_matrix(self.params.get("kernel", {"name": "white"}),
                                 self._coord_array)
        if self.kind == "weibull_field" and not self.params.get("cap"):
            q, K = float(self.params["q"]), float(self.params["K"])
            second = K * K * gamma_fn(1.0 + 2.0 / q)
            amp = self._amplitude()
            return second * np.outer(amp, amp)
        if self.kind == "bounded_sign" and float(self.params.get("modulation", 0.0)) == 0.0:
            amp = float(self.params.get("base", 1.0)) * self._amplitude()
            if self.params.get("cross", "shared") == "shared":
                return np.outer(amp, amp)
            return np.diag(amp ** 2)
        return None

    def marginal_limit_std(self) -> np.ndarray | None:
        cov = self.analytic_covariance()
        return None if cov is None else np.sqrt(np.diag(cov))

    def dominating_tail(self) -> TailFunction:
        """A tail function dominating every one-sided tail of xi_i(x).

        Ignores `growth`; with growth > 0 no fixed dominating tail exists and
        callers should not rely on this.
        """
        if self.kind == "iid_gaussian_field":
            kmat = kernel_matrix(self.params.get("kernel", {"name": "white"}),
                                 self._coord_array)
            smax = math.sqrt(float(np.max(np.diag(kmat))))
            return TailFunction.closed_weibull(smax * math.sqrt(2.0), 2.0)
        if self.kind == "weibull_field":
            q, K = float(self.params["q"]), float(self.params["K"])
            return TailFunction.closed_weibull(K * float(np.max(self._amplitude())), q)
        if self.kind == "garch_like":
            kmat = kernel_matrix(self.params.get("kernel", {"name": "white"}),
                                 self._coord_array)
            smax = math.sqrt(float(np.max(np.diag(kmat))))
            hi = float(self.params.get("vol_hi", 2.0))
            return TailFunction.closed_weibull(hi * smax * math.sqrt(2.0), 2.0)
        base = float(self.params.get("base", 1.0))
        m = float(self.params.get("modulation", 0.0))
        cutoff = base * float(np.max(self._amplitude())) * (1.0 + m)
        return TailFunction.step(cutoff)

    def to_dict(self) -> dict:
        return {"name": self.name, "kind": self.kind,
                "coords": [list(c) for c in self.coords], "params": self.params,
                "horizon": self.horizon, "seed": self.seed,
                "bias": self.bias, "growth": self.growth}


def grid_coords(n: int, low: float = 0.0, high: float = 1.0) -> tuple[tuple[float, ...], ...]:
    return tuple((float(v),) for v in np.linspace(low, high, n))


def default_model_suite(seed: int) -> list[MartingaleFieldModel]:
    """Shipped suite: an i.i.d. Gaussian field, a sign-valued dependent model
    and a volatility-modulated dependent model."""
    return [
        MartingaleFieldModel("iid-gaussian-rbf", "iid_gaussian_field", grid_coords(5),
                             {"kernel": {"name": "rbf", "length_scale": 0.5}},
                             horizon=1024, seed=seed + 1),
        MartingaleFieldModel("bounded-sign", "bounded_sign", grid_coords(5),
                             {"modulation": 0.25, "amplitude_slope": 0.5},
                             horizon=1024, seed=seed + 2),
        MartingaleFieldModel("garch-like", "garch_like", grid_coords(5),
                             {"kernel": {"name": "rbf", "length_scale": 0.5}},
                             horizon=1024, seed=seed + 3),
    ]


def model_from_config(cfg: dict, default_seed: int | None = None) -> MartingaleFieldModel:
    """Build a model from its JSON configuration block."""
    cfg = dict(cfg)
    xspec = cfg.pop("x_points")
    if isinstance(xspec, dict) and "grid_1d" in xspec:
        g = xspec["grid_1d"]
        coords = grid_coords(int(g["n"]), float(g.get("low", 0.0)), float(g.get("high", 1.0)))
    else:
        coords = tuple(tuple(float(v) for v in row) for row in xspec)
    kind = cfg.pop("kind")
    name = cfg.pop("name", kind)
    horizon = int(cfg.pop("horizon"))
    seed = int(cfg.pop("seed", default_seed if default_seed is not None else 0))
    bias = float(cfg.pop("bias", 0.0))
    growth = float(cfg.pop("growth", 0.0))
    return MartingaleFieldModel(name=name, kind=kind, coords=coords, params=cfg,
                                horizon=horizon, seed=seed, bias=bias, growth=growth)


# ---------------------------------------------------------------------------
# the chunked engine
# ---------------------------------------------------------------------------

def _chunk_spans(R: int, n: int, npts: int):
    # capped by the float budget, floored at 16, and small enough to give at
    # least ~16 chunks so that batch-means standard errors are meaningful
    size = int(min(8192, max(16, _CHUNK_BUDGET // max(1, n * npts)), max(16, R // 16)))
    spans = []
    start = 0
    ci = 0
    while start < R:
        count = min(size, R - start)
        spans.append((ci, start, count))
        start += count
        ci += 1
    return spans


def _chunk_rng(seed: int, chunk_index: int) -> np.random.Generator:
    seq = np.random.SeedSequence(seed, spawn_key=(chunk_index,))
    return np.random.Generator(np.random.Philox(seq))


def resolve_threads(threads: int | None) -> int:
    if threads is None:
        env = os.environ.get("UCLT_THREADS")
        threads = int(env) if env else 1
    return max(1, int(threads))


def _generate(model: MartingaleFieldModel, n: int, rng: np.random.Generator,
              count: int) -> np.ndarray:
    """One chunk of paths with shape (count, n, npoints)."""
    npts = model.npoints
    if model.kind == "iid_gaussian_field":
        z = rng.standard_normal((count, n, npts))
        paths = z @ model._chol.T
    elif model.kind == "weibull_field":
        q, K = float(model.params["q"]), float(model.params["K"])
        u = rng.random((count, n))
        radial = K * (-np.log1p(-u)) ** (1.0 / q)
        cap = model.params.get("cap")
        if cap is not None:
            radial = np.minimum(radial, float(cap))
        signs = rng.integers(0, 2, (count, n)) * 2.0 - 1.0
        paths = (signs * radial)[:, :, None] * model._amplitude()[None, None, :]
    elif model.kind == "garch_like":
        amp = float(model.params.get("vol_amp", 0.45))
        mem = float(model.params.get("memory", 0.7))
        lo = float(model.params.get("vol_lo", 0.5))
        hi = float(model.params.get("vol_hi", 2.0))
        chol = model._chol
        paths = np.empty((count, n, npts))
        state = np.zeros((count, npts))
        for i in range(n):
            sigma = np.clip(1.0 + amp * np.tanh(state), lo, hi)
            eps = rng.standard_normal((count, npts)) @ chol.T
            paths[:, i, :] = sigma * eps
            state = mem * state + (1.0 - mem) * eps
    else:  # bounded_sign
        base = float(model.params.get("base", 1.0))
        mod = float(model.params.get("modulation", 0.0))
        cross = model.params.get("cross", "shared")
        a0 = base * model._amplitude()
        if cross == "shared":
            signs = (rng.integers(0, 2, (count, n, 1)) * 2.0 - 1.0)
            signs = np.broadcast_to(signs, (count, n, npts))
        else:
            signs = rng.integers(0, 2, (count, n, npts)) * 2.0 - 1.0
        if mod == 0.0:
            paths = signs * a0[None, None, :]
        else:
            paths = np.empty((count, n, npts))
            running = np.zeros((count, npts))
            for i in range(n):
                ampl = a0[None, :] * (1.0 + mod * np.tanh(running / math.sqrt(max(i, 1))))
                paths[:, i, :] = signs[:, i, :] * ampl
                running += paths[:, i, :]
    if model.growth != 0.0:
        paths = paths * (np.arange(1, n + 1) ** model.growth)[None, :, None]
    if model.bias != 0.0:
        paths = paths + model.bias
    return paths


def _run_chunks(model: MartingaleFieldModel, n: int, R: int, worker,
                threads: int | None = None) -> list:
    """Generate chunks (optionally in parallel) and collect worker results
    in chunk order.  `worker(chunk_index, start, paths)` must only touch
    chunk-local state or disjoint output slices."""
    if n > model.horizon:
        raise HorizonExceeded(f"requested n = {n} beyond horizon {model.horizon}")
    spans = _chunk_spans(R, n, model.npoints)
    results: list = [None] * len(spans)

    def task(span):
        ci, start, count = span
        paths = _generate(model, n, _chunk_rng(model.seed, ci), count)
        results[ci] = worker(ci, start, paths)

    nt = resolve_threads(threads)
    if nt == 1 or len(spans) == 1:
        for span in spans:
            task(span)
    else:
        with ThreadPoolExecutor(max_workers=nt) as pool:
            list(pool.map(task, spans))
    return results


# ---------------------------------------------------------------------------
# simulation operations
# ---------------------------------------------------------------------------

def simulate_eta(model: MartingaleFieldModel, n: int, R: int,
                 threads: int | None = None) -> np.ndarray:
    """R replications of the normalized sums eta_n(x) = n**-0.5 sum_i xi_i(x);
    returns an array of shape (R, npoints)."""
    out = np.empty((R, model.npoints))
    scale = 1.0 / math.sqrt(n)

    def worker(ci, start, paths):
        out[start:start + paths.shape[0]] = paths.sum(axis=1) * scale
        return None

    _run_chunks(model, n, R, worker, threads)
    return out


def covariance_estimate(model: MartingaleFieldModel, n: int, R: int,
                        threads: int | None = None):
    """Empirical covariance matrix of eta_n across replications.

    Returns (cov, stderr, analytic) where stderr holds the per-entry Gaussian
    approximation sqrt((c_ii c_jj + c_ij**2) / R) and analytic is the model's
    closed-form covariance when available (else None).
    """
    npts = model.npoints
    scale = 1.0 / math.sqrt(n)

    def worker(ci, start, paths):
        eta = paths.sum(axis=1) * scale
        return eta.sum(axis=0), eta.T @ eta

    parts = _run_chunks(model, n, R, worker, threads)
    s1 = np.zeros(npts)
    s2 = np.zeros((npts, npts))
    for a, b in parts:
        s1 += a
        s2 += b
    mean = s1 / R
    cov = (s2 - R * np.outer(mean, mean)) / (R - 1)
    se = np.sqrt((np.outer(np.diag(cov), np.diag(cov)) + cov ** 2) / R)
    return cov, se, model.analytic_covariance()


def martingale_difference_check(model: MartingaleFieldModel, indices, x_index: int = 0,
                                R: int = 20000, threads: int | None = None) -> list[dict]:
    """Orthogonality test of the difference property.

    For each requested index i, E[xi_i * z] must vanish for every bounded
    function z of the past; tested with z in {1, tanh(previous value),
    tanh(normalized running sum)} at one grid point.  Each row reports the
    sample mean of xi_i * z, its standard error, and whether |mean| <= 3 se.
    """
    indices = sorted(set(int(i) for i in indices))
    n = max(indices)
    if min(indices) < 1:
        raise ValueError("indices are 1-based")
    names = ("const", "tanh(prev)", "tanh(runsum)")

    def worker(ci, start, paths):
        xs = paths[:, :, x_index]
        out = {}
        for i in indices:
            xi = xs[:, i - 1]
            prev = xs[:, i - 2] if i >= 2 else np.zeros_like(xi)
            runsum = xs[:, :i - 1].sum(axis=1) / math.sqrt(max(i - 1, 1))
            for nm, z in zip(names, (np.ones_like(xi), np.tanh(prev), np.tanh(runsum))):
                v = xi * z
                key = (i, nm)
                out[key] = (v.sum(), (v * v).sum(), v.size)
        return out

    parts = _run_chunks(model, n, R, worker, threads)
    rows = []
    for i in indices:
        for nm in names:
            s1 = sum(p[(i, nm)][0] for p in parts)
            s2 = sum(p[(i, nm)][1] for p in parts)
            cnt = sum(p[(i, nm)][2] for p in parts)
            mean = float(s1 / cnt)
            var = max(float(s2 / cnt) - mean * mean, 0.0)
            se = math.sqrt(var / cnt)
            rows.append({"index": i, "regressor": nm, "mean": mean, "se": se,
                         "ok": bool(abs(mean) <= 3.0 * se + 1e-15)})
    return rows


# -- moment estimation -------------------------------------------------------

def estimate_moment_curves(model: MartingaleFieldModel, pairs, p_grid, R: int, *,
                           points="all", i_max: int | None = None,
                           threads: int | None = None) -> PairwiseMomentField:
    """Monte Carlo moment curves for point values and pair increments.

    Norm estimates are debiased by a delete-a-group jackknife with the engine
    chunks as groups, which also supplies the standard errors.  `pairs` is a
    list of (label, label) tuples; `points` defaults to all grid points.
    """
    labels = model.labels
    idx = {lb: k for k, lb in enumerate(labels)}
    if points == "all":
        points = list(labels)
    pairs = [_pair_key(a, b) for (a, b) in pairs]
    p_grid = tuple(float(p) for p in p_grid)
    m = int(i_max if i_max is not None else model.horizon)
    if m > model.horizon:
        raise HorizonExceeded(f"i_max = {m} beyond horizon {model.horizon}")
    P = len(p_grid)
    parr = np.asarray(p_grid)

    def worker(ci, start, paths):
        pts = np.stack([paths[:, :, idx[x]] for x in points], axis=2) if points else None
        pt_pows = None
        if points:
            a = np.abs(pts)
            pt_pows = np.stack([(a ** p).sum(axis=0) for p in p_grid])  # (P, m, npts)
            pt_sum = pts.sum(axis=0)
            pt_sq = (pts ** 2).sum(axis=0)
        pr_pows = None
        if pairs:
            diffs = np.stack([paths[:, :, idx[a]] - paths[:, :, idx[b]] for a, b in pairs], axis=2)
            ad = np.abs(diffs)
            pr_pows = np.stack([(ad ** p).sum(axis=0) for p in p_grid])  # (P, m, npairs)
        return pt_pows, (pt_sum if points else None), (pt_sq if points else None), pr_pows, paths.shape[0]

    parts = _run_chunks(model, m, R, worker, threads)
    counts = np.array([p[4] for p in parts], dtype=float)
    G = len(parts)

    def jackknife(group_sums):
        """group_sums: (G, P, m, k) power sums; returns (norm, se) arrays (P, m, k)."""
        total = group_sums.sum(axis=0)
        full = (total / R) ** (1.0 / parr)[:, None, None]
        if G < 2:
            return full, np.zeros_like(full)
        loo = (total[None] - group_sums) / (R - counts)[:, None, None, None]
        loo = loo ** (1.0 / parr)[None, :, None, None]
        jack = G * full - (G - 1) * loo.mean(axis=0)
        se = np.sqrt((G - 1) / G * ((loo - loo.mean(axis=0)) ** 2).sum(axis=0))
        return np.maximum(jack, 0.0), se

    prov = {"kind": "monte_carlo", "seed": model.seed, "replications": R}
    point_curves, pair_curves, variances = {}, {}, {}
    if points:
        gs = np.stack([p[0] for p in parts])
        norms, ses = jackknife(gs)
        ssum = np.stack([p[1] for p in parts]).sum(axis=0)
        ssq = np.stack([p[2] for p in parts]).sum(axis=0)
        mean = ssum / R
        var = np.maximum((ssq - R * mean ** 2) / (R - 1), 0.0)
        for j, x in enumerate(points):
            for i in range(1, m + 1):
                point_curves[(i, x)] = MomentCurve(
                    p_grid, tuple(norms[:, i - 1, j]), provenance=dict(prov),
                    stderr=tuple(ses[:, i - 1, j]))
                variances[(i, x)] = float(var[i - 1, j])
    if pairs:
        gs = np.stack([p[3] for p in parts])
        norms, ses = jackknife(gs)
        for j, pr in enumerate(pairs):
            for i in range(1, m + 1):
                pair_curves[(i, pr)] = MomentCurve(
                    p_grid, tuple(norms[:, i - 1, j]), provenance=dict(prov),
                    stderr=tuple(ses[:, i - 1, j]))
    return PairwiseMomentField(labels, m, point_curves, pair_curves, variances,
                               meta={"model": model.name, "seed": model.seed,
                                     "replications": R})


# -- inequality checks --------------------------------------------------------

def osekowski_check(model: MartingaleFieldModel, p_grid, n_grid, R: int, *,
                    mode: str = "points", x_index: int = 0,
                    pair: tuple[str, str] | None = None,
                    rosenthal_allowance: float = 1.0,
                    threads: int | None = None) -> list[dict]:
    """Empirical check of the martingale moment inequality.

    For the series zeta_k (point values at one x, or increments of one pair)
    and each (p, n), the reported ratio is

        |n**-0.5 sum_{k<=n} zeta_k|_p / [(p / ln p) * sqrt(mean_k |zeta_k|_p**2)]

    with numerator and denominator estimated from the same replications.
    Rows carry a batch-means standard error and flags against the universal
    constant 15.5879 and the independent-case constant 0.6535 scaled by
    `rosenthal_allowance`.
    """
    p_grid = [float(p) for p in p_grid]
    if any(p < 2 for p in p_grid):
        raise ValueError("the inequality is checked for p >= 2 only")
    n_grid = sorted(int(n) for n in n_grid)
    n_max = n_grid[-1]
    labels = model.labels
    idx = {lb: k for k, lb in enumerate(labels)}

    def series_of(paths):
        if mode == "points":
            return paths[:, :, x_index]
        a, b = pair
        return paths[:, :, idx[a]] - paths[:, :, idx[b]]

    def worker(ci, start, paths):
        z = series_of(paths)
        csum = np.cumsum(z, axis=1)
        az = np.abs(z)
        num = np.empty((len(p_grid), len(n_grid)))
        den = np.empty((len(p_grid), n_max))
        for pi, p in enumerate(p_grid):
            den[pi] = (az ** p).sum(axis=0)
            for ni, n in enumerate(n_grid):
                num[pi, ni] = (np.abs(csum[:, n - 1] / math.sqrt(n)) ** p).sum()
        return num, den, z.shape[0]

    parts = _run_chunks(model, n_max, R, worker, threads)

    def ratio_from(num, den, cnt):
        out = np.empty((len(p_grid), len(n_grid)))
        for pi, p in enumerate(p_grid):
            lp = (den[pi] / cnt) ** (1.0 / p)
            for ni, n in enumerate(n_grid):
                lhs = (num[pi, ni] / cnt) ** (1.0 / p)
                rhs = (p / math.log(p)) * math.sqrt(float((lp[:n] ** 2).mean()))
                out[pi, ni] = lhs / rhs
        return out

    tot_num = sum(p[0] for p in parts)
    tot_den = sum(p[1] for p in parts)
    ratios = ratio_from(tot_num, tot_den, R)
    batch = np.stack([ratio_from(p[0], p[1], p[2]) for p in parts])
    se = batch.std(axis=0, ddof=1) / math.sqrt(len(parts)) if len(parts) > 1 \
        else np.zeros_like(ratios)
    rows = []
    for pi, p in enumerate(p_grid):
        for ni, n in enumerate(n_grid):
            r = float(ratios[pi, ni])
            s = float(se[pi, ni])
            rows.append({"p": p, "n": n, "ratio": r, "se": s,
                         "bound": OSEKOWSKI_CONSTANT,
                         "within_bound": r <= OSEKOWSKI_CONSTANT - 3.0 * s,
                         "rosenthal_ok": r <= ROSENTHAL_CONSTANT * rosenthal_allowance})
    return rows


def eta_increment_curves(model: MartingaleFieldModel, pairs, p_grid, n_grid, R: int,
                         threads: int | None = None) -> dict:
    """Moment curves of eta_n(x1) - eta_n(x2) per pair and per n in n_grid."""
    labels = model.labels
    idx = {lb: k for k, lb in enumerate(labels)}
    pairs = [_pair_key(a, b) for (a, b) in pairs]
    p_grid = tuple(float(p) for p in p_grid)
    n_grid = sorted(int(n) for n in n_grid)
    n_max = n_grid[-1]
    samples = {pr: np.empty((R, len(n_grid))) for pr in pairs}

    def worker(ci, start, paths):
        for pr in pairs:
            a, b = pr
            z = paths[:, :, idx[a]] - paths[:, :, idx[b]]
            csum = np.cumsum(z, axis=1)
            for ni, n in enumerate(n_grid):
                samples[pr][start:start + z.shape[0], ni] = csum[:, n - 1] / math.sqrt(n)
        return None

    _run_chunks(model, n_max, R, worker, threads)
    prov = {"kind": "monte_carlo", "seed": model.seed, "replications": R}
    out = {}
    for pr in pairs:
        out[pr] = {n: MomentCurve.from_samples(samples[pr][:, ni], p_grid, provenance=dict(prov))
                   for ni, n in enumerate(n_grid)}
    return out


def equicontinuity_check(model: MartingaleFieldModel, pairs, p_grid, n_grid, R: int, *,
                         psi: PsiFunction | None = None,
                         field: PairwiseMomentField | None = None,
                         threads: int | None = None) -> list[dict]:
    """Uniform-in-n modulus check for normalized-sum increments.

    The rescaled-psi norm of eta_n(x1) - eta_n(x2), maximized over the n
    grid, must stay below 15.5879 times the averaged increment distance of
    the pair.  psi defaults to the natural generating function estimated
    from the same model; domination is asserted with a 3-standard-error
    Monte Carlo margin on both sides.
    """
    from .distances import distance_bar, natural_function

    pairs = [_pair_key(a, b) for (a, b) in pairs]
    n_grid = sorted(int(n) for n in n_grid)
    if field is None:
        field = estimate_moment_curves(model, pairs, p_grid, R,
                                       i_max=max(n_grid), threads=threads)
    if psi is None:
        psi = natural_function(field)
    psi_r = rosenthal_transform(psi)
    curves = eta_increment_curves(model, pairs, p_grid, n_grid, R, threads=threads)
    rows = []
    for pr in pairs:
        lhs, lhs_se = 0.0, 0.0
        for n in n_grid:
            v, s = gls_norm_with_se(curves[pr][n], psi_r)
            if v > lhs:
                lhs, lhs_se = v, s
        dbar = float(distance_bar(field, pr[0], pr[1], psi, n_grid))
        rhs = OSEKOWSKI_CONSTANT * dbar
        lhs, lhs_se = float(lhs), float(lhs_se)
        rows.append({"pair": list(pr), "lhs": lhs, "lhs_se": lhs_se,
                     "dbar": dbar, "rhs": rhs,
                     "ok": bool(lhs <= rhs + 3.0 * lhs_se + 1e-12),
                     "ratio": lhs / rhs if rhs > 0 else (0.0 if lhs == 0 else math.inf)})
    return rows


def tail_domination_check(model: MartingaleFieldModel, tail: TailFunction | None,
                          x_values, n_values, R: int, *, x_index: int = 0,
                          threads: int | None = None) -> list[dict]:
    """Monte Carlo domination of normalized-sum tails by the uniform bound.

    `tail` defaults to the model's own dominating tail.  For each n the
    one-sided empirical tail max(P(eta > x), P(eta < -x)) is compared with
    the transform bound at x plus three binomial standard errors.
    """
    if tail is None:
        tail = model.dominating_tail()
    rows = []
    for n in sorted(int(n) for n in n_values):
        eta = simulate_eta(model, n, R, threads=threads)[:, x_index]
        for x in x_values:
            up = float((eta > x).mean())
            dn = float((eta < -x).mean())
            emp = max(up, dn)
            se = math.sqrt(max(emp * (1.0 - emp), 1.0 / R) / R)
            bound = w_operator(tail, float(x))
            rows.append({"n": n, "x": float(x), "empirical": emp, "se": se,
                         "bound": bound, "ok": emp <= bound + 3.0 * se})
    return rows


def weighted_tail_domination_check(model: MartingaleFieldModel, tail: TailFunction | None,
                                   x_values, weights, R: int, *, x_index: int = 0,
                                   threads: int | None = None) -> list[dict]:
    """Same domination check for sum_i b_i xi_i with unit sum of b_i**2."""
    b = np.asarray(weights, dtype=float)
    b = b / math.sqrt(float((b ** 2).sum()))
    if tail is None:
        tail = model.dominating_tail()
    n = b.size
    out = np.empty(R)

    def worker(ci, start, paths):
        out[start:start + paths.shape[0]] = paths[:, :, x_index] @ b
        return None

    _run_chunks(model, n, R, worker, threads)
    rows = []
    for x in x_values:
        emp = max(float((out > x).mean()), float((out < -x).mean()))
        se = math.sqrt(max(emp * (1.0 - emp), 1.0 / R) / R)
        bound = w_operator(tail, float(x))
        rows.append({"n": n, "x": float(x), "empirical": emp, "se": se,
                     "bound": bound, "ok": emp <= bound + 3.0 * se})
    return rows


def clt_diagnostic(model: MartingaleFieldModel, n_pair, R: int,
                   threads: int | None = None) -> dict:
    """Distributional-stabilization diagnostics for the normalized sums.

    Reports the two-sample KS statistic between the sup-over-x absolute
    values of eta at the two sample sizes, plus per-point one-sample KS
    against the closed-form Gaussian marginal when the model provides one.
    Small values are evidence of (not a proof of) a stabilizing law.
    """
    n_small, n_large = int(n_pair[0]), int(n_pair[1])
    if not n_small < n_large:
        raise ValueError("need n_small < n_large")
    eta_a = simulate_eta(model, n_small, R, threads=threads)
    eta_b = simulate_eta(model, n_large, R, threads=threads)
    ks_sup = ks_two_sample(np.abs(eta_a).max(axis=1), np.abs(eta_b).max(axis=1))
    stds = model.marginal_limit_std()
    per_point = None
    if stds is not None:
        per_point = {}
        for j, lb in enumerate(model.labels):
            per_point[lb] = {"n_small": ks_gaussian(eta_a[:, j], float(stds[j])),
                             "n_large": ks_gaussian(eta_b[:, j], float(stds[j]))}
    return {"n_small": n_small, "n_large": n_large, "replications": R,
            "ks_supnorm": ks_sup,
            "ks_critical_5pct": ks_two_sample_critical(R, R),
            "per_point_ks": per_point}


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SimulationReport:
    """Serializable outcome of one batch of checks on one model.

    For a fixed (model, seed, replications) the JSON rendering is
    byte-identical across runs and worker-thread counts.
    """

    model: str
    seed: int
    replications: int
    check: str
    rows: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"model": self.model, "seed": self.seed,
                "replications": self.replications, "check": self.check,
                "rows": self.rows, "meta": self.meta}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @property
    def all_ok(self) -> bool:
        return all(row.get("ok", row.get("within_bound", True)) for row in self.rows)
