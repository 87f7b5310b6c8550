"""Cubic convolution products (dual functions) and their inequality checks.

The order-k dual field of a punctured vertex tuple is

    D_k(f_alpha)(x) = sum_h w^(kd) prod_{alpha != 0} f_alpha(x + alpha.h),

a continuous, compactly supported function. Public evaluation defaults to the
union bounding box of the inputs; checks that take a maximum over *all* x
evaluate on the provably covering box ``[-(N-1), 2N-1)`` per axis (derived
from the vertex relation e1 + e2 = e1+e2), where the field's natural support
ends.

``dual_rec`` peels the last cube coordinate,
``D_k f(x) = w^d sum_h f(x+h) D_(k-1)(f^h f)(x)``, with the order-2 base
evaluated by FFT; it matches ``dual_brute`` pointwise to float roundoff on
all-equal tuples at a fraction of the cost.
"""

from __future__ import annotations

import time

import numpy as np

from . import kernels
from .budget import brute_dual_work, check_work
from .cubes import FunctionTuple
from .exponents import exponent_triple
from .grid import (
    GridFunction,
    add,
    fourier,
    intersection_box,
    lp_norm,
    pointwise_mul,
    scale,
    shift,
)
from .records import CheckRecord, safe_ratio

INEQ_SLACK = 1e-9
IDENTITY_TOL = 1e-9
FOURIER_SLACK = 1e-8


def _require_punctured(fs, who):
    if not isinstance(fs, FunctionTuple):
        raise TypeError(f"{who} expects a FunctionTuple over the punctured cube")
    if not fs.vertex_set.punctured:
        raise ValueError(f"{who} needs the punctured vertex set (no zero vertex)")


def _resolve_out_box(frame_lo, frame_hi, out_box):
    """Relative evaluation box for a common frame of extents ``n``.

    ``None`` selects the frame box itself; ``"full"`` the covering box
    ``[-(n-1), 2n-1)`` per axis; an explicit ``(lo, hi)`` pair is absolute.
    """
    n = tuple(h - l for l, h in zip(frame_lo, frame_hi))
    if out_box is None:
        return (0,) * len(n), n
    if out_box == "full":
        return tuple(-(na - 1) for na in n), tuple(3 * na - 2 for na in n)
    lo, hi = out_box
    rel_lo = tuple(int(l) - fl for l, fl in zip(lo, frame_lo))
    shp = tuple(int(h) - int(l) for l, h in zip(lo, hi))
    if any(s < 1 for s in shp):
        raise ValueError(f"empty output box {out_box}")
    return rel_lo, shp


def dual_brute(fs, out_box=None, work_budget=None):
    """Brute-force cubic convolution product of a punctured tuple."""
    _require_punctured(fs, "dual_brute")
    lo, hi, stack = fs.stacked()
    rel_lo, out_shape = _resolve_out_box(lo, hi, out_box)
    extents = tuple(h - l for l, h in zip(lo, hi))
    check_work(brute_dual_work(extents, fs.k, out_shape), work_budget)
    raw = kernels.dual_field_sum(stack, fs.k, rel_lo, out_shape)
    values = raw * fs.spacing ** (fs.k * fs.dim)
    origin = tuple(fl + rl for fl, rl in zip(lo, rel_lo))
    return GridFunction(values, fs.spacing, origin)


def _gather_cyclic(z, out_lo, out_shape, sup_lo, sup_hi):
    # read z at cyclic index (y mod M) for y in the out box, zero outside the
    # known support window [sup_lo, sup_hi)
    d = z.ndim
    idxs = []
    masks = []
    for a in range(d):
        ys = out_lo[a] + np.arange(out_shape[a])
        masks.append((ys >= sup_lo[a]) & (ys < sup_hi[a]))
        idxs.append(np.mod(ys, z.shape[a]))
    out = z[np.ix_(*idxs)].copy()
    for a in range(d):
        shape = [1] * d
        shape[a] = out_shape[a]
        out *= masks[a].reshape(shape)
    return out


def _shift_window(values, h, out_lo, out_shape):
    # values read at (y + h) for y in the out box, zero-extended
    d = values.ndim
    out = np.zeros(out_shape)
    src = []
    dst = []
    for a in range(d):
        n = values.shape[a]
        y0 = max(out_lo[a], -h[a])
        y1 = min(out_lo[a] + out_shape[a], n - h[a])
        if y0 >= y1:
            return out
        dst.append(slice(y0 - out_lo[a], y1 - out_lo[a]))
        src.append(slice(y0 + h[a], y1 + h[a]))
    out[tuple(dst)] = values[tuple(src)]
    return out


def _axis_products(values, h):
    # f(x) * f(x+h) on the frame of f, zero where the shifted read leaves it
    shape = values.shape
    prod = np.zeros(shape)
    if any(abs(ha) >= n for ha, n in zip(h, shape)):
        return prod
    src = tuple(slice(max(0, ha), min(n, n + ha)) for ha, n in zip(h, shape))
    dst = tuple(slice(max(0, -ha), min(n, n - ha)) for ha, n in zip(h, shape))
    prod[dst] = values[dst] * values[src]
    return prod


def _h_range(extents, out_lo, out_shape):
    return [
        range(-(out_lo[a] + out_shape[a] - 1), extents[a] - out_lo[a])
        for a in range(len(extents))
    ]


_BATCH_ELEMENTS = 1 << 22


def _dual2_raw(values, out_lo, out_shape):
    d = values.ndim
    padded = tuple(3 * n for n in values.shape)
    spec = np.fft.fftn(values, s=padded, axes=tuple(range(values.ndim)))
    z = np.fft.ifftn(spec * spec * np.conj(spec)).real
    sup_lo = tuple(-(n - 1) for n in values.shape)
    sup_hi = tuple(2 * n - 1 for n in values.shape)
    return _gather_cyclic(z, out_lo, out_shape, sup_lo, sup_hi)


def _dual_rec_raw(values, k, out_lo, out_shape):
    if k == 2:
        return _dual2_raw(values, out_lo, out_shape)
    d = values.ndim
    shape = values.shape
    out = np.zeros(out_shape)
    ranges = _h_range(shape, out_lo, out_shape)
    hs = list(np.ndindex(*[len(r) for r in ranges]))
    if k == 3:
        # batch the order-2 FFT base across shifts
        padded = tuple(3 * n for n in shape)
        sup_lo = tuple(-(n - 1) for n in shape)
        sup_hi = tuple(2 * n - 1 for n in shape)
        rows_per_chunk = max(1, _BATCH_ELEMENTS // int(np.prod(padded)))
        for start in range(0, len(hs), rows_per_chunk):
            chunk = hs[start : start + rows_per_chunk]
            prods = np.stack(
                [
                    _axis_products(values, tuple(r[i] for r, i in zip(ranges, idx)))
                    for idx in chunk
                ]
            )
            spec = np.fft.fftn(prods, s=padded, axes=tuple(range(1, d + 1)))
            z = np.fft.ifftn(
                spec * spec * np.conj(spec), axes=tuple(range(1, d + 1))
            ).real
            for row, idx in enumerate(chunk):
                h = tuple(r[i] for r, i in zip(ranges, idx))
                outer = _shift_window(values, h, out_lo, out_shape)
                if not outer.any():
                    continue
                q = _gather_cyclic(z[row], out_lo, out_shape, sup_lo, sup_hi)
                out += outer * q
        return out
    for idx in np.ndindex(*[len(r) for r in ranges]):
        h = tuple(r[i] for r, i in zip(ranges, idx))
        outer = _shift_window(values, h, out_lo, out_shape)
        if not outer.any():
            continue
        prod = _axis_products(values, h)
        out += outer * _dual_rec_raw(prod, k - 1, out_lo, out_shape)
    return out


def dual_rec(f, k, out_box=None):
    """Recursive dual field for the all-equal tuple ``f_alpha = f``.

    Cost is ``(2N)^d`` order-(k-1) fields instead of the ``(2N)^(kd)`` shift
    sum; general (non-equal) tuples go through :func:`dual_brute`.
    """
    k = int(k)
    if k < 2:
        raise ValueError(f"dual_rec requires k >= 2, got {k}")
    lo, hi = f.box
    rel_lo, out_shape = _resolve_out_box(lo, hi, out_box)
    raw = _dual_rec_raw(np.asarray(f.values), k, rel_lo, out_shape)
    values = raw * f.spacing ** (k * f.dim)
    origin = tuple(fl + rl for fl, rl in zip(lo, rel_lo))
    return GridFunction(values, f.spacing, origin)


def dual_field(fs_or_f, k=None, algo="brute", out_box=None, work_budget=None):
    """Dispatch helper: tuple -> brute; single function -> brute or rec."""
    if isinstance(fs_or_f, FunctionTuple):
        if algo == "rec":
            raise ValueError("the recursive route applies to all-equal tuples only")
        return dual_brute(fs_or_f, out_box, work_budget)
    if k is None:
        raise ValueError("k is required for a single-function dual field")
    if algo == "rec":
        return dual_rec(fs_or_f, k, out_box)
    fs = FunctionTuple.constant(fs_or_f, k, punctured=True)
    return dual_brute(fs, out_box, work_budget)


# ---------------------------------------------------------------------------
# inequality and identity checks
# ---------------------------------------------------------------------------


def _tuple_params(fs):
    lo, hi, _ = fs.stacked()
    return {
        "k": fs.k,
        "d": fs.dim,
        "N": max(h - l for l, h in zip(lo, hi)),
        "w": fs.spacing,
    }


def lemma1_gap(fs, work_budget=None):
    """Sup-norm domination of the dual field by the product of L^q_k norms."""
    t0 = time.perf_counter()
    _require_punctured(fs, "lemma1_gap")
    trip = exponent_triple(fs.k)
    field = dual_brute(fs, out_box="full", work_budget=work_budget)
    nonneg = fs.is_nonnegative()
    lhs = float(np.max(field.values)) if nonneg else float(np.max(np.abs(field.values)))
    lhs = max(lhs, 0.0)
    rhs = float(np.prod([lp_norm(g, trip.q_float) for g in fs]))
    passed = lhs <= rhs * (1.0 + INEQ_SLACK) if nonneg else None
    return CheckRecord(
        name="eq2.1-lemma1",
        lhs=lhs,
        rhs=rhs,
        ratio=safe_ratio(lhs, rhs),
        passed=passed,
        params=_tuple_params(fs),
        runtime_ms=1e3 * (time.perf_counter() - t0),
    )


def continuity_modulus(fs, v, work_budget=None):
    """Shift-continuity of the dual field against its translation majorant.

    The majorant telescopes one vertex at a time: for each vertex, one factor
    is the q_k norm of ``f - f^(v w)`` and the rest are plain q_k norms.
    """
    t0 = time.perf_counter()
    _require_punctured(fs, "continuity_modulus")
    if np.isscalar(v):
        v = (v,) * fs.dim
    v = tuple(int(c) for c in v)
    trip = exponent_triple(fs.k)
    field = dual_brute(fs, out_box="full", work_budget=work_budget)
    diff = add(field, scale(shift(field, v), -1.0))
    lhs = lp_norm(diff, np.inf)
    qnorms = [lp_norm(g, trip.q_float) for g in fs]
    rhs = 0.0
    for i, g in enumerate(fs):
        shifted_gap = lp_norm(add(g, scale(shift(g, v), -1.0)), trip.q_float)
        prod = shifted_gap
        for j, q in enumerate(qnorms):
            if j != i:
                prod *= q
        rhs += prod
    passed = lhs <= rhs * (1.0 + INEQ_SLACK) if fs.is_nonnegative() else None
    params = _tuple_params(fs)
    params["v"] = list(v)
    return CheckRecord(
        name="eq5.2-continuity",
        lhs=lhs,
        rhs=rhs,
        ratio=safe_ratio(lhs, rhs),
        passed=passed,
        params=params,
        runtime_ms=1e3 * (time.perf_counter() - t0),
    )


def product_identity_gap(fs1, fs2, work_budget=None):
    """Pointwise product of two dual fields versus the literal double shift sum.

    The double sum is evaluated without the change of variables that proves
    the identity, so the two routes are independent. Work grows with the
    (2k)-fold shift space: smallest instances only.
    """
    t0 = time.perf_counter()
    _require_punctured(fs1, "product_identity_gap")
    _require_punctured(fs2, "product_identity_gap")
    if fs1.k != fs2.k:
        raise ValueError("tuples must share the cube order k")
    k = fs1.k
    g1 = dual_brute(fs1, work_budget=work_budget)
    g2 = dual_brute(fs2, work_budget=work_budget)
    lhs_field = pointwise_mul(g1, g2)
    box = intersection_box([g1.box, g2.box])
    if box is None:
        lhs = rhs_scale = 0.0
        diff = 0.0
    else:
        lo, hi, stacks = _joint_frames(fs1, fs2)
        rel_lo = tuple(b - fl for b, fl in zip(box[0], lo))
        out_shape = tuple(h - l for l, h in zip(*box))
        extents = tuple(h - l for l, h in zip(lo, hi))
        check_work(
            brute_dual_work(extents, 2 * k, out_shape), work_budget
        )
        raw = kernels.dual_pair_field_sum(stacks[0], stacks[1], k, rel_lo, out_shape)
        rhs_field = raw * fs1.spacing ** (2 * k * fs1.dim)
        diff = float(np.max(np.abs(lhs_field.values - rhs_field)))
        rhs_scale = float(np.max(np.abs(lhs_field.values)))
        lhs = diff
    record = CheckRecord(
        name="eq5.4-product-identity",
        lhs=lhs,
        rhs=rhs_scale,
        ratio=safe_ratio(lhs, rhs_scale),
        passed=(lhs <= IDENTITY_TOL * max(rhs_scale, 1e-300)) or (lhs == 0.0),
        params=_tuple_params(fs1),
        runtime_ms=1e3 * (time.perf_counter() - t0),
    )
    return record


def _joint_frames(fs1, fs2):
    from .grid import common_frame

    lo, hi, stack = common_frame(list(fs1) + list(fs2))
    m = len(fs1.functions)
    return lo, hi, (np.ascontiguousarray(stack[:m]), np.ascontiguousarray(stack[m:]))


def product_bound_gap(fs1, fs2, work_budget=None):
    """Sup bound for the product of two dual fields by the q_k norm products."""
    t0 = time.perf_counter()
    _require_punctured(fs1, "product_bound_gap")
    _require_punctured(fs2, "product_bound_gap")
    if fs1.k != fs2.k:
        raise ValueError("tuples must share the cube order k")
    trip = exponent_triple(fs1.k)
    g1 = dual_brute(fs1, out_box="full", work_budget=work_budget)
    g2 = dual_brute(fs2, out_box="full", work_budget=work_budget)
    prod = pointwise_mul(g1, g2)
    lhs = lp_norm(prod, np.inf)
    rhs = float(
        np.prod([lp_norm(g, trip.q_float) for g in fs1])
        * np.prod([lp_norm(g, trip.q_float) for g in fs2])
    )
    nonneg = fs1.is_nonnegative() and fs2.is_nonnegative()
    passed = lhs <= rhs * (1.0 + INEQ_SLACK) if nonneg else None
    return CheckRecord(
        name="eq5.6-product-bound",
        lhs=lhs,
        rhs=rhs,
        ratio=safe_ratio(lhs, rhs),
        passed=passed,
        params=_tuple_params(fs1),
        runtime_ms=1e3 * (time.perf_counter() - t0),
    )


def fourier_bound_gap(fs, work_budget=None):
    """Transform-norm bound for dual fields, valid from order 3 upward.

    For ``k >= 3`` the dual exponent ``s_k`` lies in [1, 2], so the transform
    maps L^{s_k} into the dual-lattice L^{p_k} with constant one; at ``k = 3``
    both exponents are 2 and the check is pure Parseval.
    """
    t0 = time.perf_counter()
    _require_punctured(fs, "fourier_bound_gap")
    if fs.k < 3:
        raise ValueError(f"fourier_bound_gap requires k >= 3, got {fs.k}")
    trip = exponent_triple(fs.k)
    g = dual_brute(fs, work_budget=work_budget)
    spec = fourier(g, tuple(2 * n for n in g.extents))
    lhs = spec.lp_norm(trip.p_float)
    rhs = float(np.prod([lp_norm(f, trip.p_float) for f in fs]))
    passed = lhs <= rhs * (1.0 + FOURIER_SLACK) if fs.is_nonnegative() else None
    return CheckRecord(
        name="eq5.7-fourier",
        lhs=lhs,
        rhs=rhs,
        ratio=safe_ratio(lhs, rhs),
        passed=passed,
        params=_tuple_params(fs),
        runtime_ms=1e3 * (time.perf_counter() - t0),
    )
