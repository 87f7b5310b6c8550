"""Seeded randomized verification sweeps.

Every check is a pure function of ``(name, k, d, seed)`` plus the shared
configuration, so any record can be replayed bit-identically from its
coordinates. Sweeps run in a thread pool over independent instances; records
are sorted before assembly, so parallel and serial runs produce identical
reports.

Check catalog (record names):

=====================  =====================================================
eq1.2-monotone         U(k) norm dominated by the L^p_k norm
eq1.5-csg              cube inner product vs norm products (two-stage)
eq1.6-homogeneity      dual field of t*f equals t^(2^k-1) times dual field
eq2.1-lemma1           sup of dual field vs product of L^q_k norms
eq2.3-floor            dual-norm estimate at least the L^s_k norm
eq3.1-lemma2           dual-field pairings dominated by norm products
eq3.2-witness          dual norm of D_k f attains ||f||_U^(2^k - 1)
eq4.2-decompose        decomposition bounds, exactness, residual trail
eq4.9-corollary5       correlation floor of the constructed dual field
eq5.2-continuity       dual-field shift continuity vs telescoped majorant
eq5.4-product-identity product of dual fields vs literal double shift sum
eq5.6-product-bound    product of dual fields vs q_k norm products
eq5.7-fourier          transform norm of dual field vs p_k norm products
duality-identity       <f, D_k f> equals the 2^k-th power of the norm
oracle-norm            recursive norm route against the brute oracle
spectral-u2            order-2 spectral route against the brute oracle
=====================  =====================================================
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .antiuniform import AscentOptions, corollary5, decompose, dual_norm_lower
from .budget import BudgetExceededError
from .dual import (
    continuity_modulus,
    dual_rec,
    fourier_bound_gap,
    lemma1_gap,
    product_bound_gap,
    product_identity_gap,
)
from .exponents import exponent_triple
from .families import random_function, random_tuple, unit_p_norm
from .grid import inner, lp_norm, scale, shift
from .gridio import write_ghk
from .norms import (
    csg_gap,
    gowers_norm_brute,
    gowers_norm_rec,
    gowers_norm_spectral_u2,
)
from .records import CheckRecord, SuiteReport, config_hash, safe_ratio

DEFAULT_CONFIG = {
    "version": 1,
    "k": [2, 3],
    "d": [1],
    "n": 16,
    "spacing": 0.125,
    "base_seed": 20240,
    "reps": 100,
    "reps_overrides": {
        "eq2.3-floor": 25,
        "eq3.2-witness": 25,
        "eq4.2-decompose": 10,
        "eq4.9-corollary5": 10,
        "eq5.4-product-identity": 25,
        "eq5.7-fourier": 25,
        "oracle-norm": 50,
        "spectral-u2": 50,
        "duality-identity": 50,
        "eq5.2-continuity": 50,
    },
    "deltas": [0.5, 0.25],
    "ascent": {},
    "work_budget": None,
    "checks": None,  # None selects the full catalog
}


class _Ctx:
    def __init__(self, config):
        self.n_cap = int(config.get("n", 16))
        self.w = float(config.get("spacing", 0.125))
        self.deltas = [float(x) for x in config.get("deltas", [0.5, 0.25])]
        self.opts = AscentOptions(**config.get("ascent", {}))
        self.work_budget = config.get("work_budget")

    def n(self, preferred):
        return min(self.n_cap, preferred)

    def size(self, k, d, d1_by_k, dn_by_k):
        """Instance extent per axis: d = 1 sizes, shrunk for d >= 2 so the
        brute sweeps stay inside the default work budget."""
        table = d1_by_k if d == 1 else dn_by_k
        return self.n(table[0] if k == 2 else table[1])


def _alternating_family(seed):
    return "random-signed" if seed % 2 else "random-nonneg"


# each check: fn(ctx, k, d, seed) -> (CheckRecord, {filename: GridFunction})


def _chk_monotone(ctx, k, d, seed):
    n = ctx.size(k, d, (16, 8), (6, 4))
    f = random_function("random-nonneg", d, n, ctx.w, seed)
    lhs = gowers_norm_rec(f, k)
    rhs = lp_norm(f, exponent_triple(k).p_float)
    rec = CheckRecord(
        name="eq1.2-monotone",
        lhs=lhs,
        rhs=rhs,
        ratio=safe_ratio(lhs, rhs),
        passed=lhs <= rhs * (1.0 + 1e-9),
        params={"k": k, "d": d, "N": n, "w": ctx.w, "family": "random-nonneg"},
    )
    return rec, {"f": f}


def _chk_csg(ctx, k, d, seed):
    n = ctx.size(k, d, (16, 8), (6, 4))
    fs = random_tuple("random-nonneg", k, d, n, ctx.w, seed)
    rec = csg_gap(fs, work_budget=ctx.work_budget)
    rec.params.update({"k": k, "d": d, "N": n, "w": ctx.w, "family": "random-nonneg"})
    return rec, {f"f_{i}": g for i, g in enumerate(fs)}


def _chk_homogeneity(ctx, k, d, seed):
    n = ctx.size(k, d, (12, 8), (5, 4))
    family = _alternating_family(seed)
    f = random_function(family, d, n, ctx.w, seed)
    t = (-2.0, 0.5, 3.0)[seed % 3]
    left = dual_rec(scale(f, t), k)
    right = scale(dual_rec(f, k), t ** ((1 << k) - 1))
    diff = float(np.max(np.abs(left.values - right.values)))
    scale_ref = float(np.max(np.abs(right.values)))
    rec = CheckRecord(
        name="eq1.6-homogeneity",
        lhs=diff,
        rhs=scale_ref,
        ratio=safe_ratio(diff, scale_ref),
        passed=diff <= 1e-12 * max(scale_ref, 1e-300),
        params={"k": k, "d": d, "N": n, "w": ctx.w, "family": family, "t": t},
    )
    return rec, {"f": f}


def _chk_lemma1(ctx, k, d, seed):
    n = ctx.size(k, d, (12, 8), (6, 4))
    fs = random_tuple("random-nonneg", k, d, n, ctx.w, seed, punctured=True)
    rec = lemma1_gap(fs, work_budget=ctx.work_budget)
    rec.params["family"] = "random-nonneg"
    return rec, {f"f_{i}": g for i, g in enumerate(fs)}


def _chk_floor(ctx, k, d, seed):
    n = ctx.size(k, d, (8, 8), (5, 5))
    g = random_function("random-nonneg", d, n, ctx.w, seed)
    est = dual_norm_lower(g, k, ctx.opts)
    floor = lp_norm(g, exponent_triple(k).s_float)
    rec = CheckRecord(
        name="eq2.3-floor",
        lhs=est.value,
        rhs=floor,
        ratio=safe_ratio(est.value, floor),
        passed=est.value >= floor * (1.0 - 1e-9),
        params={"k": k, "d": d, "N": n, "w": ctx.w, "family": "random-nonneg"},
        extra={"iterations": est.iterations, "converged": est.converged},
    )
    return rec, {"g": g}


def _chk_lemma2(ctx, k, d, seed):
    n = ctx.size(k, d, (8, 8), (5, 5))
    fs = random_tuple("random-nonneg", k, d, n, ctx.w, seed, punctured=True)
    h = random_function("random-nonneg", d, n, ctx.w, seed + 7919)
    hu = gowers_norm_rec(h, k)
    if hu > 0:
        h = scale(h, 1.0 / hu)
    from .dual import dual_brute

    g = dual_brute(fs, work_budget=ctx.work_budget)
    lhs = inner(g, h)
    unorms = [gowers_norm_rec(f, k) for f in fs]
    pnorms = [lp_norm(f, exponent_triple(k).p_float) for f in fs]
    rhs = float(np.prod(unorms))
    rhs2 = float(np.prod(pnorms))
    rec = CheckRecord(
        name="eq3.1-lemma2",
        lhs=lhs,
        rhs=rhs,
        ratio=safe_ratio(lhs, rhs),
        passed=lhs <= rhs * (1.0 + 1e-9) and rhs <= rhs2 * (1.0 + 1e-9),
        params={"k": k, "d": d, "N": n, "w": ctx.w, "family": "random-nonneg"},
        extra={"rhs_lp": rhs2},
    )
    grids = {f"f_{i}": g_ for i, g_ in enumerate(fs)}
    grids["h"] = h
    return rec, grids


def _chk_witness(ctx, k, d, seed):
    n = ctx.size(k, d, (8, 8), (5, 5))
    f = random_function("random-nonneg", d, n, ctx.w, seed)
    g = dual_rec(f, k)
    u = gowers_norm_rec(f, k)
    pairing = inner(g, scale(f, 1.0 / u))
    target = u ** ((1 << k) - 1)
    est = dual_norm_lower(g, k, ctx.opts, candidates=(f,))
    identity_ok = abs(pairing - target) <= 1e-9 * max(target, 1e-300)
    attain_ok = est.value >= target * (1.0 - 1e-9)
    rec = CheckRecord(
        name="eq3.2-witness",
        lhs=pairing,
        rhs=target,
        ratio=safe_ratio(pairing, target),
        passed=identity_ok and attain_ok,
        params={"k": k, "d": d, "N": n, "w": ctx.w, "family": "random-nonneg"},
        extra={"dual_estimate": est.value},
    )
    return rec, {"f": f}


def _monotone_tail(history, window=10):
    tail = history[-window:]
    return all(tail[i + 1] <= tail[i] * (1.0 + 1e-9) for i in range(len(tail) - 1))


def _chk_decompose(ctx, k, d, seed):
    n = ctx.size(k, d, (8, 8), (6, 6))
    g = random_function("random-nonneg", d, n, ctx.w, seed)
    details = {}
    worst = 0.0
    all_ok = True
    for delta in ctx.deltas:
        res = decompose(g, k, delta, ctx.opts)
        dk = dual_rec(res.F, k)
        exact = bool(
            np.array_equal(dk.values + res.H.values, res.g_normalized.values)
        )
        mono = _monotone_tail(res.residual_history)
        ratios = {
            "F_p": res.norms["F_p"] * delta,
            "F_U": res.norms["F_U"],
            "H_s": res.norms["H_s"] / delta,
        }
        ok = (
            ratios["F_p"] <= 1.0 + 1e-6
            and ratios["F_U"] <= 1.0 + 1e-6
            and ratios["H_s"] <= 1.05
            and exact
            and mono
        )
        details[str(delta)] = {
            **ratios,
            "exact": exact,
            "monotone_tail": mono,
            "C": res.C,
            "iterations": res.iterations,
            "stationarity_residual": res.stationarity_residual,
        }
        worst = max(worst, ratios["H_s"])
        all_ok = all_ok and ok
    rec = CheckRecord(
        name="eq4.2-decompose",
        lhs=worst,
        rhs=1.05,
        ratio=safe_ratio(worst, 1.05),
        passed=all_ok,
        params={"k": k, "d": d, "N": n, "w": ctx.w, "family": "random-nonneg"},
        extra=details,
    )
    return rec, {"g": g}


def _chk_corollary5(ctx, k, d, seed):
    n = ctx.size(k, d, (8, 8), (6, 6))
    phi = unit_p_norm(random_function("random-nonneg", d, n, ctx.w, seed), k)
    theta = gowers_norm_rec(phi, k)
    f = corollary5(phi, k, ctx.opts)
    pairing = inner(dual_rec(f, k), phi)
    floor = (theta / 2.0) ** (1 << k) * (1.0 - 0.05)
    pn = lp_norm(f, exponent_triple(k).p_float)
    rec = CheckRecord(
        name="eq4.9-corollary5",
        lhs=pairing,
        rhs=floor,
        ratio=safe_ratio(pairing, floor),
        passed=pairing > floor and pn <= 1.0 + 1e-6,
        params={"k": k, "d": d, "N": n, "w": ctx.w, "family": "random-nonneg"},
        extra={"theta": theta, "f_p_norm": pn},
    )
    return rec, {"phi": phi, "f": f}


def _chk_continuity(ctx, k, d, seed):
    n = ctx.size(k, d, (8, 6), (5, 3))
    fs = random_tuple("random-nonneg", k, d, n, ctx.w, seed, punctured=True)
    v = (seed % (n // 2 + 1),) * d
    rec = continuity_modulus(fs, v, work_budget=ctx.work_budget)
    rec.params["family"] = "random-nonneg"
    return rec, {f"f_{i}": g for i, g in enumerate(fs)}


def _chk_product_identity(ctx, k, d, seed):
    n = ctx.size(k, d, (4, 4), (3, 3))
    fs1 = random_tuple("random-nonneg", k, d, n, ctx.w, seed, punctured=True)
    fs2 = random_tuple("random-nonneg", k, d, n, ctx.w, seed + 104729, punctured=True)
    rec = product_identity_gap(fs1, fs2, work_budget=ctx.work_budget)
    rec.params["family"] = "random-nonneg"
    grids = {f"a_{i}": g for i, g in enumerate(fs1)}
    grids.update({f"b_{i}": g for i, g in enumerate(fs2)})
    return rec, grids


def _chk_product_bound(ctx, k, d, seed):
    n = ctx.size(k, d, (8, 8), (5, 5))
    fs1 = random_tuple("random-nonneg", k, d, n, ctx.w, seed, punctured=True)
    fs2 = random_tuple("random-nonneg", k, d, n, ctx.w, seed + 104729, punctured=True)
    rec = product_bound_gap(fs1, fs2, work_budget=ctx.work_budget)
    rec.params["family"] = "random-nonneg"
    grids = {f"a_{i}": g for i, g in enumerate(fs1)}
    grids.update({f"b_{i}": g for i, g in enumerate(fs2)})
    return rec, grids


def _chk_fourier(ctx, k, d, seed):
    n = ctx.size(k, d, (4, 4), (3, 3))
    fs = random_tuple("random-nonneg", k, d, n, ctx.w, seed, punctured=True)
    rec = fourier_bound_gap(fs, work_budget=ctx.work_budget)
    rec.params["family"] = "random-nonneg"
    return rec, {f"f_{i}": g for i, g in enumerate(fs)}


def _chk_duality(ctx, k, d, seed):
    n = ctx.size(k, d, (12, 8), (6, 4))
    family = _alternating_family(seed)
    f = random_function(family, d, n, ctx.w, seed)
    lhs = inner(f, dual_rec(f, k))
    rhs = gowers_norm_rec(f, k) ** (1 << k)
    rec = CheckRecord(
        name="duality-identity",
        lhs=lhs,
        rhs=rhs,
        ratio=safe_ratio(lhs, rhs) if rhs > 0 else 0.0,
        passed=abs(lhs - rhs) <= 1e-9 * max(rhs, 1e-300),
        params={"k": k, "d": d, "N": n, "w": ctx.w, "family": family},
    )
    return rec, {"f": f}


def _chk_oracle(ctx, k, d, seed):
    n = ctx.size(k, d, (8, 8), (5, 5))
    f = random_function("random-nonneg", d, n, ctx.w, seed)
    brute = gowers_norm_brute(f, k, ctx.work_budget)
    recv = gowers_norm_rec(f, k)
    rec = CheckRecord(
        name="oracle-norm",
        lhs=recv,
        rhs=brute,
        ratio=safe_ratio(recv, brute),
        passed=abs(recv - brute) <= 1e-9 * max(1.0, brute),
        params={"k": k, "d": d, "N": n, "w": ctx.w, "family": "random-nonneg"},
    )
    return rec, {"f": f}


def _chk_spectral(ctx, k, d, seed):
    n = ctx.size(k, d, (12, 12), (6, 6))
    f = random_function(_alternating_family(seed), d, n, ctx.w, seed)
    spec = gowers_norm_spectral_u2(f)
    brute = gowers_norm_brute(f, 2, ctx.work_budget)
    rec = CheckRecord(
        name="spectral-u2",
        lhs=spec,
        rhs=brute,
        ratio=safe_ratio(spec, brute),
        passed=abs(spec - brute) <= 1e-8 * max(1.0, brute),
        params={"k": 2, "d": d, "N": n, "w": ctx.w, "family": _alternating_family(seed)},
    )
    return rec, {"f": f}


# name -> (fn, applicable(k))
CHECKS = {
    "eq1.2-monotone": (_chk_monotone, lambda k: True),
    "eq1.5-csg": (_chk_csg, lambda k: True),
    "eq1.6-homogeneity": (_chk_homogeneity, lambda k: True),
    "eq2.1-lemma1": (_chk_lemma1, lambda k: True),
    "eq2.3-floor": (_chk_floor, lambda k: True),
    "eq3.1-lemma2": (_chk_lemma2, lambda k: True),
    "eq3.2-witness": (_chk_witness, lambda k: True),
    "eq4.2-decompose": (_chk_decompose, lambda k: True),
    "eq4.9-corollary5": (_chk_corollary5, lambda k: True),
    "eq5.2-continuity": (_chk_continuity, lambda k: True),
    "eq5.4-product-identity": (_chk_product_identity, lambda k: k == 2),
    "eq5.6-product-bound": (_chk_product_bound, lambda k: k == 2),
    "eq5.7-fourier": (_chk_fourier, lambda k: k == 3),
    "duality-identity": (_chk_duality, lambda k: True),
    "oracle-norm": (_chk_oracle, lambda k: True),
    "spectral-u2": (_chk_spectral, lambda k: k == 2),
}


def resolved_config(config=None):
    merged = dict(DEFAULT_CONFIG)
    if config:
        merged.update(config)
    if merged.get("checks") is None:
        merged["checks"] = list(CHECKS)
    return merged


def run_check(config, name, k, d, seed):
    """Replay a single record from its coordinates, bit-identically."""
    if name not in CHECKS:
        raise ValueError(f"unknown check {name!r}")
    fn, applicable = CHECKS[name]
    if not applicable(k):
        raise ValueError(f"check {name} does not apply at k={k}")
    ctx = _Ctx(resolved_config(config))
    t0 = time.perf_counter()
    record, grids = fn(ctx, k, d, seed)
    record.seed = seed
    if record.runtime_ms == 0.0:
        record.runtime_ms = 1e3 * (time.perf_counter() - t0)
    return record, grids


def _write_failure_artifacts(directory, record, grids):
    tag = f"{record.name}-k{record.params.get('k')}-d{record.params.get('d')}-s{record.seed}"
    case_dir = os.path.join(directory, tag.replace("/", "_"))
    os.makedirs(case_dir, exist_ok=True)
    for name, g in grids.items():
        write_ghk(g, os.path.join(case_dir, f"{name}.ghk"))
    replay = (
        f"ghk verify --replay '{record.name}:{record.params.get('k')}:"
        f"{record.params.get('d')}:{record.seed}'"
    )
    with open(os.path.join(case_dir, "replay.txt"), "w") as fh:
        fh.write(replay + "\n")
    return case_dir


def run_suite(config=None, threads=None, artifacts_dir=None):
    """Execute all configured sweeps and aggregate a deterministic report.

    A work-budget overflow in any sub-check aborts the run after serializing
    the offending instance for replay. Failing (gated) instances are written
    as GHK1 grids plus a replay command when ``artifacts_dir`` is given.
    """
    config = resolved_config(config)
    ctx_probe = _Ctx(config)  # validate config eagerly
    del ctx_probe
    base_seed = int(config.get("base_seed", 0))
    reps_default = int(config.get("reps", 100))
    overrides = config.get("reps_overrides", {})

    tasks = []
    for name in config["checks"]:
        if name not in CHECKS:
            raise ValueError(f"unknown check {name!r} in config")
        _, applicable = CHECKS[name]
        reps = int(overrides.get(name, reps_default))
        for k in config["k"]:
            if not applicable(int(k)):
                continue
            for d in config["d"]:
                for i in range(reps):
                    tasks.append((name, int(k), int(d), base_seed + i))

    records = []
    failures = []
    n_threads = threads or os.cpu_count() or 1

    def _run(task):
        name, k, d, seed = task
        try:
            return task, run_check(config, name, k, d, seed)
        except BudgetExceededError as err:
            return task, err

    if n_threads > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            outcomes = list(pool.map(_run, tasks))
    else:
        outcomes = [_run(t) for t in tasks]

    budget_abort = None
    for task, outcome in outcomes:
        if isinstance(outcome, BudgetExceededError):
            if budget_abort is None:
                budget_abort = (task, outcome)
            continue
        record, grids = outcome
        records.append(record)
        if record.passed is False:
            failures.append((record, grids))

    if artifacts_dir:
        for record, grids in failures:
            _write_failure_artifacts(artifacts_dir, record, grids)

    if budget_abort:
        (name, k, d, seed), err = budget_abort
        replay = f"ghk verify --replay '{name}:{k}:{d}:{seed}'"
        if artifacts_dir:
            os.makedirs(artifacts_dir, exist_ok=True)
            with open(os.path.join(artifacts_dir, "budget-abort.txt"), "w") as fh:
                fh.write(replay + "\n")
        raise BudgetExceededError(err.kind, err.needed, err.budget) from err

    return SuiteReport(
        version=__version__, config_hash=config_hash(config), records=records
    )
