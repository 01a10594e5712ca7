"""Batch command-line front end.

Four subcommands, driven by a single JSON config plus a few overrides:

* ``uclt check-theorem --config cfg.json``  simulate a model, estimate its
  moment field, natural generating function and distances, measure the
  entropy profile and classify the sufficient conditions for uniform
  tightness; exit 0 when every requested hypothesis is satisfied at the run
  resolution, 2 when one fails, 1 on config errors.
* ``uclt inequalities --config cfg.json``   run the moment-inequality,
  tail-domination, decay-slope and difference-property checks over a model
  suite; exit 2 if any check fails.
* ``uclt covering --config cfg.json``       covering numbers and entropy of
  a configured finite space, optionally with a power-law fit.
* ``uclt export --run DIR``                 consolidate a finished run
  directory into the four documented CSVs.

Outputs are UTF-8 with LF line endings and contain no timestamps; rerunning
any command with the same config and seed is byte-identical regardless of
``--threads`` (or the UCLT_THREADS fallback).
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import sys

import numpy as np

from . import covering as cov
from . import integrals as integ
from .distances import PairwiseMomentField, distance_matrix, natural_function, sigma_squared
from .errors import ConfigError, MissingRun, UcltError
from .psi import PsiFunction
from .simulate import (
    MartingaleFieldModel,
    SimulationReport,
    clt_diagnostic,
    default_model_suite,
    equicontinuity_check,
    estimate_moment_curves,
    martingale_difference_check,
    model_from_config,
    osekowski_check,
    resolve_threads,
    tail_domination_check,
)
from .tails import TailFunction, w_operator

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_CHECK_FAILED = 2


# ---------------------------------------------------------------------------
# config plumbing
# ---------------------------------------------------------------------------

def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"{path}: no such config file") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def config_hash(cfg: dict) -> str:
    canon = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


class _Schema:
    """Tiny strict validator: known keys only, typed leaves, path-precise errors."""

    def __init__(self, cfg: dict, path: str = "config"):
        if not isinstance(cfg, dict):
            raise ConfigError(f"{path}: expected an object")
        self.cfg = cfg
        self.path = path
        self.seen: set[str] = set()

    def sub(self, key: str, required: bool = False) -> "_Schema | None":
        self.seen.add(key)
        if key not in self.cfg:
            if required:
                raise ConfigError(f"{self.path}.{key}: required block missing")
            return None
        return _Schema(self.cfg[key], f"{self.path}.{key}")

    def get(self, key: str, kind, required: bool = False, default=None,
            positive: bool = False, minimum=None):
        self.seen.add(key)
        if key not in self.cfg:
            if required:
                raise ConfigError(f"{self.path}.{key}: required key missing")
            return default
        val = self.cfg[key]
        if kind is float and isinstance(val, int) and not isinstance(val, bool):
            val = float(val)
        if kind is not None and not isinstance(val, kind) or isinstance(val, bool) and kind in (int, float):
            raise ConfigError(f"{self.path}.{key}: expected {getattr(kind, '__name__', kind)}, "
                              f"got {type(val).__name__}")
        if positive and not val > 0:
            raise ConfigError(f"{self.path}.{key}: must be > 0, got {val}")
        if minimum is not None and val < minimum:
            raise ConfigError(f"{self.path}.{key}: must be >= {minimum}, got {val}")
        return val

    def number_list(self, key: str, required: bool = False, default=None,
                    positive: bool = False):
        self.seen.add(key)
        if key not in self.cfg:
            if required:
                raise ConfigError(f"{self.path}.{key}: required key missing")
            return default
        val = self.cfg[key]
        if not isinstance(val, list) or not val or \
                any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in val):
            raise ConfigError(f"{self.path}.{key}: expected a nonempty list of numbers")
        if positive and any(v <= 0 for v in val):
            raise ConfigError(f"{self.path}.{key}: entries must be > 0")
        return [float(v) for v in val]

    def raw(self, key: str, required: bool = False, default=None):
        self.seen.add(key)
        if key not in self.cfg:
            if required:
                raise ConfigError(f"{self.path}.{key}: required key missing")
            return default
        return self.cfg[key]

    def finish(self):
        unknown = set(self.cfg) - self.seen
        if unknown:
            raise ConfigError(f"{self.path}.{sorted(unknown)[0]}: unknown key")


_MODEL_KEYS = {"kind", "name", "x_points", "horizon", "seed", "bias", "growth",
               "kernel", "K", "q", "cap", "amplitude_slope", "base", "modulation",
               "cross", "vol_amp", "memory", "vol_lo", "vol_hi"}


def _validate_model(block: _Schema, default_seed: int) -> MartingaleFieldModel:
    kind = block.get("kind", str, required=True)
    if kind not in ("iid_gaussian_field", "weibull_field", "garch_like", "bounded_sign"):
        raise ConfigError(f"{block.path}.kind: unknown model kind {kind!r}")
    block.get("horizon", int, required=True, positive=True)
    block.raw("x_points", required=True)
    if kind == "weibull_field":
        block.get("K", float, required=True, positive=True)
        block.get("q", float, required=True, positive=True)
    for key in _MODEL_KEYS:
        block.seen.add(key)
    unknown = set(block.cfg) - _MODEL_KEYS
    if unknown:
        raise ConfigError(f"{block.path}.{sorted(unknown)[0]}: unknown key")
    try:
        return model_from_config(dict(block.cfg), default_seed=default_seed)
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"{block.path}: {exc}") from None


def _validate_psi(block: _Schema | None) -> PsiFunction | str:
    if block is None:
        return "natural"
    form = block.get("form", str, required=True)
    if form == "natural":
        block.finish()
        return "natural"
    for key in ("q", "r", "support", "grid", "values", "factor", "base"):
        block.seen.add(key)
    block.finish()
    try:
        return PsiFunction.from_dict(block.cfg)
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"{block.path}: {exc}") from None


# ---------------------------------------------------------------------------
# deterministic writers
# ---------------------------------------------------------------------------

def _write_json(path: str, obj: dict) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(json.dumps(obj, sort_keys=True, indent=2))
        fh.write("\n")


def _write_csv(path: str, header: list[str], rows, provenance: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(f"# {provenance}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in row])


def _finish_run(out: str, command: str, cfg_hash: str, seed: int, files: dict,
                conclusion: str, exit_code: int) -> None:
    _write_json(os.path.join(out, "run.json"),
                {"command": command, "config_sha256": cfg_hash, "seed": seed,
                 "files": files, "conclusion": conclusion, "exit_code": exit_code})


# ---------------------------------------------------------------------------
# check-theorem
# ---------------------------------------------------------------------------

def run_check_theorem(cfg: dict, args) -> int:
    s = _Schema(cfg)
    seed = args.seed if args.seed is not None else s.get("seed", int, required=True)
    s.seen.add("seed")
    reps = args.reps if args.reps is not None else s.get("replications", int, default=4000, positive=True)
    s.seen.add("replications")
    threads = resolve_threads(args.threads if args.threads is not None
                              else s.get("threads", int, default=None))
    out = args.out or s.get("out", str, default="uclt-check-theorem")
    model = _validate_model(s.sub("model", required=True), seed)
    psi_spec = _validate_psi(s.sub("psi"))
    p_grid = s.number_list("p_grid", default=[2.0, 2.5, 3.0, 4.0, 6.0, 8.0], positive=True)
    default_n = [n for n in (1, 2, 4, 8, 16, 32, 64) if n <= model.horizon]
    n_grid = [int(n) for n in s.number_list("n_grid", default=default_n, positive=True)]
    if max(n_grid) > model.horizon:
        raise ConfigError("config.n_grid: exceeds the model horizon")

    ent = s.sub("entropy")
    ent_nodes, ent_frac, ent_mode = 24, 1e-3, "greedy"
    if ent is not None:
        ent_nodes = ent.get("nodes", int, default=24, positive=True)
        ent_frac = ent.get("eps_min_frac", float, default=1e-3, positive=True)
        ent_mode = ent.get("mode", str, default="greedy")
        if ent_mode not in ("greedy", "exact"):
            raise ConfigError("config.entropy.mode: must be greedy or exact")
        ent.finish()
    quad = s.sub("integral")
    quad_nodes, quad_frac = 400, 1e-4
    if quad is not None:
        quad_nodes = quad.get("nodes", int, default=400, positive=True)
        quad_frac = quad.get("eps_lo_frac", float, default=1e-4, positive=True)
        quad.finish()
    t22 = s.sub("subq_level")
    q22 = None
    if t22 is not None:
        q22 = t22.get("q", float, required=True, positive=True)
        t22.finish()
    cltb = s.sub("clt")
    clt_spec = None
    if cltb is not None:
        pairn = cltb.number_list("n_pair", required=True, positive=True)
        if len(pairn) != 2 or not pairn[0] < pairn[1] or pairn[1] > model.horizon:
            raise ConfigError("config.clt.n_pair: need [n_small, n_large] within the horizon")
        clt_spec = (int(pairn[0]), int(pairn[1]),
                    cltb.get("replications", int, default=2000, positive=True))
        cltb.finish()
    growth_factor = s.get("variance_growth_factor", float, default=1.5, positive=True)
    s.seen.add("out")
    s.finish()

    cfg_hash = config_hash(cfg)
    prov = f"provenance: config_sha256={cfg_hash} seed={seed}"
    os.makedirs(out, exist_ok=True)

    labels = model.labels
    pairs = [(labels[a], labels[b]) for a in range(len(labels)) for b in range(a + 1, len(labels))]
    field = estimate_moment_curves(model, pairs, p_grid, reps,
                                   i_max=max(n_grid), threads=threads)
    field.meta["config_sha256"] = cfg_hash
    field.to_csv_dir(os.path.join(out, "field_csv"))
    psi = natural_function(field) if psi_spec == "natural" else psi_spec
    sigma2 = sigma_squared(field, n_grid, growth_factor=growth_factor)

    space = distance_matrix(field, "dbar", psi=psi, n_grid=n_grid, threads=threads)
    if cov.diameter(space) <= 0:
        raise ConfigError("config.model: averaged increment distance is identically zero; "
                          "no profile can be measured")
    profile = integ.measure_profile(space, mode=ent_mode, num=ent_nodes, eps_min_frac=ent_frac)
    verdict21 = integ.moment_level_check(sigma2, profile, psi,
                                      nodes=quad_nodes, eps_lo_frac=quad_frac)
    verdicts = {"moment_level": verdict21.to_dict()}
    files = {}

    from .psi import rosenthal_transform
    trace = integ.integrand_trace(profile, psi=rosenthal_transform(psi),
                                  nodes=quad_nodes, eps_lo_frac=quad_frac)
    integ_path = os.path.join(out, "entropy_trace.csv")
    _write_csv(integ_path, ["epsilon", "entropy", "integrand"], trace, prov)
    files["entropy_trace"] = "entropy_trace.csv"

    dmat_path = os.path.join(out, "dbar_matrix.csv")
    _write_csv(dmat_path, ["label"] + list(labels),
               [[lb] + [float(v) for v in row] for lb, row in zip(labels, space.dist)], prov)
    files["dbar_matrix"] = "dbar_matrix.csv"
    files["field_csv"] = "field_csv"

    satisfied = verdict21.satisfied
    if q22 is not None:
        space_q = distance_matrix(field, "rho_q", q=q22, threads=threads)
        prof_q = integ.measure_profile(space_q, mode=ent_mode, num=ent_nodes,
                                       eps_min_frac=ent_frac)
        verdict22 = integ.subq_level_check(prof_q, q22, sigma2,
                                          nodes=quad_nodes, eps_lo_frac=quad_frac)
        verdicts["subq_level"] = verdict22.to_dict()
        verdicts["exponent_comparison"] = integ.exponent_comparison(prof_q, q22,
                                                                    nodes=quad_nodes,
                                                                    eps_lo_frac=quad_frac)
        satisfied = satisfied and verdict22.satisfied

    ks_rows = []
    if clt_spec is not None:
        diag = clt_diagnostic(model, (clt_spec[0], clt_spec[1]), clt_spec[2], threads=threads)
        verdicts["clt_diagnostic"] = diag
        ks_rows.append([clt_spec[1], float(diag["ks_supnorm"]), "supnorm"])
        if diag["per_point_ks"]:
            for lb, two in sorted(diag["per_point_ks"].items()):
                ks_rows.append([clt_spec[1], float(two["n_large"]), lb])
    if ks_rows:
        _write_csv(os.path.join(out, "ks.csv"), ["n", "ks", "scope"], ks_rows, prov)
        files["ks"] = "ks.csv"

    verdict_doc = {"config_sha256": cfg_hash, "seed": seed, "model": model.to_dict(),
                   "replications": reps, "psi": (psi.to_dict()), "sigma2":
                       (None if math.isinf(sigma2) else sigma2),
                   "verdicts": verdicts}
    _write_json(os.path.join(out, "verdict.json"), verdict_doc)
    files["verdict"] = "verdict.json"

    if satisfied:
        conclusion = integ.CONCLUSION_SATISFIED
    elif not verdict21.satisfied:
        conclusion = verdicts["moment_level"]["conclusion"]
    else:
        conclusion = verdicts["subq_level"]["conclusion"]
    code = EXIT_OK if satisfied else EXIT_CHECK_FAILED
    _finish_run(out, "check-theorem", cfg_hash, seed, files, conclusion, code)
    print(f"check-theorem: {conclusion} (outputs in {out})")
    return code


# ---------------------------------------------------------------------------
# inequalities
# ---------------------------------------------------------------------------

def run_inequalities(cfg: dict, args) -> int:
    s = _Schema(cfg)
    seed = args.seed if args.seed is not None else s.get("seed", int, required=True)
    s.seen.add("seed")
    reps = args.reps if args.reps is not None else s.get("replications", int, default=20000, positive=True)
    s.seen.add("replications")
    threads = resolve_threads(args.threads if args.threads is not None
                              else s.get("threads", int, default=None))
    out = args.out or s.get("out", str, default="uclt-inequalities")
    s.seen.add("out")

    models_raw = s.raw("models")
    if models_raw is None:
        models = default_model_suite(seed)
    else:
        if not isinstance(models_raw, list) or not models_raw:
            raise ConfigError("config.models: expected a nonempty list")
        models = [_validate_model(_Schema(m, f"config.models[{i}]"), seed + i)
                  for i, m in enumerate(models_raw)]

    ose = s.sub("osekowski")
    ose_spec = None
    if ose is not None:
        ps = ose.number_list("p_grid", default=[2.0, 3.0, 4.0], positive=True)
        ns = [int(v) for v in ose.number_list("n_grid", default=[8, 64], positive=True)]
        mode = ose.get("mode", str, default="points")
        if mode not in ("points", "pairs"):
            raise ConfigError("config.osekowski.mode: must be points or pairs")
        ose_spec = (ps, ns, mode)
        ose.finish()
    lem = s.sub("tail_domination")
    lem_spec = None
    if lem is not None:
        xs = lem.number_list("x_values", default=[1.5, 2.0, 3.0], positive=True)
        if any(x <= 1 for x in xs):
            raise ConfigError("config.tail_domination.x_values: the bound needs x > 1")
        ns = [int(v) for v in lem.number_list("n_values", default=[16, 256], positive=True)]
        r2 = lem.get("replications", int, default=reps, positive=True)
        tail_raw = lem.raw("tail")
        tail = None
        if tail_raw is not None:
            try:
                tail = TailFunction.from_dict(tail_raw)
            except (KeyError, ValueError, TypeError) as exc:
                raise ConfigError(f"config.tail_domination.tail: {exc}") from None
        lem_spec = (xs, ns, r2, tail)
        lem.finish()
    slope = s.sub("weibull_slope")
    slope_spec = None
    if slope is not None:
        qs = slope.number_list("q_values", default=[1.0, 2.0], positive=True)
        kk = slope.get("K", float, default=1.0, positive=True)
        xlo = slope.get("x_lo", float, default=10.0, positive=True)
        xhi = slope.get("x_hi", float, default=100.0, positive=True)
        pts = slope.get("points", int, default=10, minimum=3)
        tol = slope.get("tol", float, default=0.05, positive=True)
        if not xhi > xlo:
            raise ConfigError("config.weibull_slope: need x_hi > x_lo")
        slope_spec = (qs, kk, xlo, xhi, pts, tol)
        slope.finish()
    mdc = s.sub("md_check")
    mdc_spec = None
    if mdc is not None:
        ids = [int(v) for v in mdc.number_list("indices", default=[2, 16], positive=True)]
        r3 = mdc.get("replications", int, default=reps, positive=True)
        mdc_spec = (ids, r3)
        mdc.finish()
    if ose_spec is None and lem_spec is None and slope_spec is None and mdc_spec is None:
        ose_spec = ([2.0, 3.0, 4.0], [8, 64], "points")
        lem_spec = ([1.5, 2.0, 3.0], [16, 256], reps, None)
        slope_spec = ([1.0, 2.0], 1.0, 10.0, 100.0, 10, 0.05)
        mdc_spec = ([2, 16], reps)
    s.finish()

    cfg_hash = config_hash(cfg)
    prov = f"provenance: config_sha256={cfg_hash} seed={seed}"
    os.makedirs(out, exist_ok=True)
    reports: list[SimulationReport] = []
    ose_rows, tail_rows, slope_rows = [], [], []
    all_ok = True

    for model in models:
        if ose_spec is not None:
            ps, ns, mode = ose_spec
            if max(ns) > model.horizon:
                raise ConfigError("config.osekowski.n_grid: exceeds a model horizon")
            pair = None
            if mode == "pairs":
                pair = (model.labels[0], model.labels[-1])
            rows = osekowski_check(model, ps, ns, reps, mode=mode, pair=pair, threads=threads)
            reports.append(SimulationReport(model.name, model.seed, reps, "osekowski", rows))
            ose_rows += [[model.name, r["p"], r["n"], r["ratio"], r["se"], r["bound"]] for r in rows]
            all_ok &= all(r["within_bound"] for r in rows)
        if lem_spec is not None:
            xs, ns, r2, tail = lem_spec
            if max(ns) > model.horizon:
                raise ConfigError("config.tail_domination.n_values: exceeds a model horizon")
            rows = tail_domination_check(model, tail, xs, ns, r2, threads=threads)
            reports.append(SimulationReport(model.name, model.seed, r2, "tail_domination", rows))
            tail_rows += [[model.name, r["n"], r["x"], r["empirical"], r["bound"], r["se"]]
                          for r in rows]
            all_ok &= all(r["ok"] for r in rows)
        if mdc_spec is not None:
            ids, r3 = mdc_spec
            ids = [i for i in ids if i <= model.horizon]
            rows = martingale_difference_check(model, ids, R=r3, threads=threads)
            reports.append(SimulationReport(model.name, model.seed, r3, "md_property", rows))
            all_ok &= all(r["ok"] for r in rows)

    if slope_spec is not None:
        qs, kk, xlo, xhi, pts, tol = slope_spec
        for q in qs:
            tail = TailFunction.closed_weibull(kk, q)
            xs = np.geomspace(xlo, xhi, pts)
            ws = [w_operator(tail, float(x)) for x in xs]
            logneg = np.log([-math.log(w) for w in ws])
            fit = float(np.polyfit(np.log(xs), logneg, 1)[0])
            need = 2.0 * q / (2.0 + q) - tol
            ok = fit >= need
            slope_rows.append([q, fit, need, ok])
            reports.append(SimulationReport("weibull-transform", 0, 0, "decay_slope",
                                            [{"q": q, "slope": fit, "required": need, "ok": ok}]))
            all_ok &= ok

    files = {}
    if ose_rows:
        _write_csv(os.path.join(out, "osekowski.csv"),
                   ["model", "p", "n", "ratio", "se", "bound"], ose_rows, prov)
        files["osekowski"] = "osekowski.csv"
    if tail_rows:
        _write_csv(os.path.join(out, "tail_bounds.csv"),
                   ["model", "n", "x", "empirical_tail", "bound", "stderr"], tail_rows, prov)
        files["tail_bounds"] = "tail_bounds.csv"
    if slope_rows:
        _write_csv(os.path.join(out, "slopes.csv"),
                   ["q", "slope", "required", "ok"], slope_rows, prov)
        files["slopes"] = "slopes.csv"
    _write_json(os.path.join(out, "inequalities.json"),
                {"config_sha256": cfg_hash, "seed": seed,
                 "reports": [r.to_dict() for r in reports]})
    files["inequalities"] = "inequalities.json"

    conclusion = "all-checks-passed" if all_ok else "check-failed"
    code = EXIT_OK if all_ok else EXIT_CHECK_FAILED
    _finish_run(out, "inequalities", cfg_hash, seed, files, conclusion, code)
    print(f"inequalities: {conclusion} (outputs in {out})")
    return code


# ---------------------------------------------------------------------------
# covering
# ---------------------------------------------------------------------------

def run_covering(cfg: dict, args) -> int:
    s = _Schema(cfg)
    seed = args.seed if args.seed is not None else s.get("seed", int, default=0)
    s.seen.add("seed")
    out = args.out or s.get("out", str, default="uclt-covering")
    s.seen.add("out")
    sp = s.sub("space", required=True)
    metric = sp.get("metric", str, default="euclidean")
    if "grid_1d" in sp.cfg:
        g = _Schema(sp.raw("grid_1d"), f"{sp.path}.grid_1d")
        n = g.get("n", int, required=True, minimum=1)
        low = g.get("low", float, default=0.0)
        high = g.get("high", float, default=1.0)
        g.finish()
        space = cov.FiniteMetricSpace.grid_1d(n, low, high, metric=metric)
    elif "coords_csv" in sp.cfg:
        space = cov.load_coords_csv(sp.get("coords_csv", str, required=True), metric=metric)
    elif "distance_csv" in sp.cfg:
        space = cov.load_distance_csv(sp.get("distance_csv", str, required=True))
    else:
        raise ConfigError(f"{sp.path}: need one of grid_1d, coords_csv, distance_csv")
    sp.finish()

    mode = s.get("mode", str, default="greedy")
    if mode not in ("greedy", "exact", "both"):
        raise ConfigError("config.mode: must be greedy, exact or both")
    eps_block = s.sub("eps")
    diam = cov.diameter(space)
    if eps_block is None:
        eps_values = list(np.geomspace(diam, 0.01 * diam, 16))
    else:
        vals = eps_block.number_list("values", positive=True)
        if vals is not None:
            eps_values = sorted(vals, reverse=True)
        else:
            num = eps_block.get("num", int, default=16, positive=True)
            frac = eps_block.get("min_frac", float, default=0.01, positive=True)
            eps_values = list(np.geomspace(diam, frac * diam, num))
        eps_block.finish()
    hf = s.sub("holder_fit")
    holder_spec = None
    if hf is not None:
        holder_spec = (hf.get("dim", int, required=True, minimum=1),
                       hf.get("alpha", float, required=True, positive=True))
        hf.finish()
    s.finish()

    cfg_hash = config_hash(cfg)
    prov = f"provenance: config_sha256={cfg_hash} seed={seed}"
    os.makedirs(out, exist_ok=True)
    rows = []
    for eps in eps_values:
        row = [float(eps)]
        ng = ne = None
        if mode in ("greedy", "both"):
            ng = cov.covering_number_greedy(space, eps)
            row.append(ng)
        if mode in ("exact", "both"):
            ne = cov.covering_number_exact(space, eps)
            row.append(ne)
        row.append(math.log(ne if ne is not None else ng))
        rows.append(row)
    header = ["epsilon"] + (["n_greedy"] if mode in ("greedy", "both") else []) \
        + (["n_exact"] if mode in ("exact", "both") else []) + ["entropy"]
    _write_csv(os.path.join(out, "covering.csv"), header, rows, prov)

    doc = {"config_sha256": cfg_hash, "seed": seed, "points": len(space),
           "diameter": diam, "mode": mode,
           "table": [dict(zip(header, r)) for r in rows]}
    if holder_spec is not None:
        dim, alpha = holder_spec
        counts = [r[1] for r in rows]
        c2 = max(cnt * eps ** (dim / alpha) for cnt, eps in zip(counts, [r[0] for r in rows]))
        doc["holder_fit"] = {"dim": dim, "alpha": alpha, "c2": c2,
                             "bound_at_eps": {repr(r[0]): cov.holder_covering_bound(dim, alpha, c2, r[0])
                                              for r in rows}}
    _write_json(os.path.join(out, "covering.json"), doc)
    _finish_run(out, "covering", cfg_hash, seed,
                {"covering": "covering.csv", "summary": "covering.json"},
                "covering-computed", EXIT_OK)
    print(f"covering: wrote {len(rows)} radii (outputs in {out})")
    return EXIT_OK


# ---------------------------------------------------------------------------
# export
# ---------------------------------------------------------------------------

def _read_csv_body(path: str) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="") as fh:
        lines = [ln for ln in fh.read().splitlines() if not ln.startswith("#")]
    rows = list(csv.reader(lines))
    return rows[0], rows[1:]


def run_export(args) -> int:
    rundir = args.run
    outdir = args.out or os.path.join(rundir, "export")
    manifests = []
    candidates = []
    if os.path.isdir(rundir):
        candidates = [rundir] + sorted(
            os.path.join(rundir, d) for d in os.listdir(rundir)
            if os.path.isdir(os.path.join(rundir, d)))
    for d in candidates:
        mpath = os.path.join(d, "run.json")
        if os.path.exists(mpath):
            with open(mpath) as fh:
                manifests.append((d, json.load(fh)))
    if not manifests:
        raise MissingRun(f"{rundir}: no completed run manifests found")
    os.makedirs(outdir, exist_ok=True)

    consolidated = {
        "entropy_trace.csv": (["epsilon", "entropy", "integrand"], []),
        "tail_bounds.csv": (["model", "n", "x", "empirical_tail", "bound", "stderr"], []),
        "ks_stats.csv": (["n", "ks", "scope"], []),
        "osekowski_ratios.csv": (["model", "p", "n", "ratio", "se", "bound"], []),
    }
    sources = {"entropy_trace.csv": "entropy_trace", "tail_bounds.csv": "tail_bounds",
               "ks_stats.csv": "ks", "osekowski_ratios.csv": "osekowski"}
    prov_parts = []
    for d, man in manifests:
        prov_parts.append(f"{man['command']}:{man['config_sha256'][:12]}:seed={man['seed']}")
        for target, key in sources.items():
            rel = man.get("files", {}).get(key)
            if rel is None:
                continue
            header, body = _read_csv_body(os.path.join(d, rel))
            want = consolidated[target][0]
            if header != want:
                raise MissingRun(f"{d}/{rel}: header {header} does not match contract {want}")
            consolidated[target][1].extend(body)
    prov = "provenance: " + " ".join(sorted(prov_parts))
    written = []
    for fname, (header, body) in consolidated.items():
        if not body:
            continue
        _write_csv(os.path.join(outdir, fname), header, body, prov)
        written.append(fname)
    if not written:
        raise MissingRun(f"{rundir}: manifests found but no exportable tables")
    print(f"export: wrote {', '.join(sorted(written))} (outputs in {outdir})")
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="uclt",
                                 description="Batch checks for uniform limit diagnostics "
                                             "of martingale-difference random fields.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("check-theorem", "inequalities", "covering"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--reps", type=int, default=None, help="override the replication count")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--threads", type=int, default=None,
                       help="worker cap (UCLT_THREADS fallback); never changes results")
    pe = sub.add_parser("export")
    pe.add_argument("--run", required=True, help="directory of completed runs")
    pe.add_argument("--out", default=None, help="destination (default RUN/export)")
    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "export":
            return run_export(args)
        cfg = _load_config(args.config)
        if args.command == "check-theorem":
            return run_check_theorem(cfg, args)
        if args.command == "inequalities":
            return run_inequalities(cfg, args)
        return run_covering(cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MissingRun as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except UcltError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
