"""Rank-one free-boson vertex operators on the oscillator Fock space.

The field attached to a basis monomial is the normal-ordered product of
derivative fields of the single generating current; vertex_mode extracts
its modes exactly.  On top of that sit the weight-shifted fields
(x_mode), the exponential-coordinate bracket (y_bracket_apply), the
defining axioms, the classical three-delta identity (jacobi_check) and
the exponential-substitution identities reached from it (theorem_check).

Every check compares finitely many coefficients of an identity applied
to a target vector, exactly over Fraction, and returns a CheckReport.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

from . import calculus as ca
from .fock import (
    FockVector,
    basis_up_to,
    weight,
    weight_components,
)
from .fock import h_apply
from .reports import CheckReport, make_report, mismatch_entry, serialize_vector
from .series import (
    NEG_INF,
    POS_INF,
    Series,
    VarWindow,
    WindowInsufficientError,
    diff_on_box,
    mul,
)

F = Fraction

MISMATCH_CAP = 200


def generator() -> FockVector:
    """The weight-one state whose field is the current itself."""
    return FockVector.basis((1,))


def _omega() -> FockVector:
    return FockVector.basis((1, 1)).scaled(F(1, 2))


@dataclass(frozen=True)
class VoaConfig:
    """Structure constants of the rank-one free-boson algebra."""

    rank: Fraction = F(1)
    vacuum: FockVector = field(default_factory=FockVector.vacuum)
    omega: FockVector = field(default_factory=_omega)


def _wt_max(v: FockVector) -> int:
    return max((weight(p) for p, _ in v.terms()), default=0)


# ----------------------------------------------------------------------
# Modes of the free fields


def _tuples_with_sum(count: int, total: int, lo: int, hi: int):
    """Integer tuples of the given length summing to total, entries in [lo, hi]."""
    if count == 0:
        if total == 0:
            yield ()
        return
    rest = count - 1
    for m in range(max(lo, total - rest * hi), min(hi, total - rest * lo) + 1):
        for tail in _tuples_with_sum(rest, total - m, lo, hi):
            yield (m,) + tail


@lru_cache(maxsize=None)
def _mode_on_basis(
    u_parts: "tuple[int, ...]", n: int, v_parts: "tuple[int, ...]"
) -> FockVector:
    """Mode n of the field of one basis monomial, applied to another.

    The field of h(-n1)...h(-nk)|0> is the normal-ordered product of the
    (ni-1)-th derivative fields of the current scaled by 1/(ni-1)!, so
    the x^(-n-1) coefficient is a sum over current-mode tuples (m_i)
    with sum(m_i) = n + 1 - sum(n_i), each weighted by a product of
    binomial coefficients C(-m_i-1, n_i-1).
    """
    if not u_parts:
        return FockVector.basis(v_parts) if n == -1 else FockVector.zero()
    wv = sum(v_parts)
    total = n + 1 - sum(u_parts)
    # annihilators are bounded by the target weight and the remaining
    # factors are pinned by the fixed total, so the tuple set is finite
    out = FockVector.zero()
    for ms in _tuples_with_sum(len(u_parts), total, total - wv, wv):
        if 0 in ms:
            continue
        c = F(1)
        for m, ni in zip(ms, u_parts):
            c *= ca.binom(-m - 1, ni - 1)
            if not c:
                break
        if not c:
            continue
        vec = FockVector.basis(v_parts)
        for m in sorted(ms, reverse=True):
            vec = h_apply(m, vec)
            if not vec:
                break
        if vec:
            out = out + vec.scaled(c)
    return out


def vertex_mode(u: FockVector, n: int, v: FockVector) -> FockVector:
    """Coefficient of x^(-n-1) in the field of u, applied to v."""
    out = FockVector.zero()
    for up, cu in u.terms():
        for vp, cv in v.terms():
            w = _mode_on_basis(up, n, vp)
            if w:
                out = out + w.scaled(cu * cv)
    return out


def x_mode(u: FockVector, n: int, v: FockVector) -> FockVector:
    """Coefficient of x^(-n) in the weight-shifted field of u.

    Shifting by the weight of each homogeneous component makes the mode
    lower weights by exactly n."""
    out = FockVector.zero()
    for up, cu in u.terms():
        shifted = n - 1 + weight(up)
        for vp, cv in v.terms():
            w = _mode_on_basis(up, shifted, vp)
            if w:
                out = out + w.scaled(cu * cv)
    return out


# ----------------------------------------------------------------------
# Bracket coordinates


def y_bracket_apply(u: FockVector, v: FockVector, y_order: int) -> Series:
    """Field of u in exponential coordinates, applied to v.

    Substitutes x = e^y - 1 into the mode expansion and scales each
    weight component of u by e^(y*weight); the result is a Laurent
    series in y with FockVector coefficients, complete up to y_order,
    with pole depth at most wt(u) + wt(v)."""
    wt_v = _wt_max(v)
    terms = []
    for wu, comp in weight_components(u):
        lo = -(wu + wt_v)
        win = VarWindow("x", lo, y_order, lo, POS_INF)
        coeffs = {}
        for e in range(lo, y_order + 1):
            img = vertex_mode(comp, -e - 1, v)
            if img:
                coeffs[(e,)] = img
        g = Series([win], coeffs)
        g = ca.subst_em1(g, "x", "y", y_order)
        if wu:
            g = mul(g, ca.exp_series("y", y_order + wu + wt_v, wu))
        terms.append(g.restrict({"y": (NEG_INF, y_order)}))
    if not terms:
        return Series([VarWindow("y", NEG_INF, y_order, 0, POS_INF)], {})
    return ca.aligned_sum(terms)


def _bracket_slices(u: FockVector, v: FockVector, order: int) -> "dict[int, FockVector]":
    """y-coefficients of y_bracket_apply as a plain dict."""
    out: "dict[int, FockVector]" = {}
    for (q,), vec in y_bracket_apply(u, v, order).terms():
        out[q] = vec
    return out


# ----------------------------------------------------------------------
# Axioms


_AXIOMS = (
    "lower-truncation",
    "vacuum",
    "creation",
    "L(-1)-derivative",
    "L(0)-grading",
)


def _note_diff(mismatches, lhs, rhs, target, prefix=()):
    if lhs == rhs:
        return
    diff = lhs - rhs
    for parts, _ in diff.terms():
        if len(mismatches) >= MISMATCH_CAP:
            return
        mismatches.append(
            mismatch_entry(
                list(prefix) + list(parts), lhs.coeff(parts), rhs.coeff(parts), target
            )
        )


def axiom_check(axiom: str, weight_cap: int = 3, window: int = 3) -> CheckReport:
    """Verify one defining property of the field map on the graded basis."""
    if axiom not in _AXIOMS:
        raise ValueError(f"unknown axiom {axiom!r}")
    t0 = time.monotonic()
    mismatches: "list[dict]" = []
    states = basis_up_to(weight_cap)
    vac = FockVector.vacuum()
    omega = _omega()
    if axiom == "lower-truncation":
        for u in states:
            for v in states:
                bound = _wt_max(u) + _wt_max(v) - 1
                for n in range(bound + 1, bound + window + 1):
                    _note_diff(
                        mismatches, vertex_mode(u, n, v), FockVector.zero(), v, [n]
                    )
    elif axiom == "vacuum":
        for v in states:
            for n in range(-window - 1, window + 1):
                want = v if n == -1 else FockVector.zero()
                _note_diff(mismatches, vertex_mode(vac, n, v), want, v, [n])
    elif axiom == "creation":
        for v in states:
            for n in range(0, window + 1):
                _note_diff(
                    mismatches, vertex_mode(v, n, vac), FockVector.zero(), v, [n]
                )
            _note_diff(mismatches, vertex_mode(v, -1, vac), v, v, [-1])
    elif axiom == "L(-1)-derivative":
        for v in states:
            lv = vertex_mode(omega, 0, v)
            for t in states:
                for n in range(-window, window + 1):
                    lhs = vertex_mode(lv, n, t)
                    rhs = vertex_mode(v, n - 1, t).scaled(-n)
                    _note_diff(mismatches, lhs, rhs, t, [n])
    else:
        for v in states:
            lhs = vertex_mode(omega, 1, v)
            _note_diff(mismatches, lhs, v.scaled(_wt_max(v)), v)
    params = {"axiom": axiom, "weight-cap": weight_cap, "window": window}
    return make_report("AXIOMS", params, mismatches, int((time.monotonic() - t0) * 1000))


def axioms_check(weight_cap: int = 3, window: int = 3) -> CheckReport:
    """All five axioms in one report."""
    t0 = time.monotonic()
    mismatches: "list[dict]" = []
    for axiom in _AXIOMS:
        sub = axiom_check(axiom, weight_cap, window)
        mismatches.extend(sub.mismatches[: MISMATCH_CAP - len(mismatches)])
    params = {"axioms": list(_AXIOMS), "weight-cap": weight_cap, "window": window}
    return make_report("AXIOMS", params, mismatches, int((time.monotonic() - t0) * 1000))


# ----------------------------------------------------------------------
# Operator-product series on finite windows


def _ordered_pair_series(outer, ovar, inner, ivar, target, obox, ibox):
    """The two weight-shifted fields applied in order to target.

    The inner variable's support band is truncated at its box top;
    products against delta kernels never read above it because kernel
    exponents in that slot are nonnegative."""
    olo, ohi = obox
    ilo, ihi = ibox
    wt_t = _wt_max(target)
    coeffs = {}
    for ei in range(max(ilo, -wt_t), ihi + 1):
        ivec = x_mode(inner, -ei, target)
        if not ivec:
            continue
        for eo in range(max(olo, -(wt_t + ei)), ohi + 1):
            img = x_mode(outer, -eo, ivec)
            if img:
                coeffs[(eo, ei)] = img
    wins = [
        VarWindow(ovar, olo, ohi, -(wt_t + ihi), POS_INF),
        VarWindow(ivar, ilo, ihi, -wt_t, ihi),
    ]
    return Series(wins, coeffs)


def _x_on_series(g: Series, xvar: str, target: FockVector, box) -> Series:
    """Adjoin xvar to g: the weight-shifted field of each coefficient,
    applied to target.  Support above the box top is truncated; callers
    only pair the new variable against nonnegative kernel exponents."""
    lo, hi = box
    wt_t = _wt_max(target)
    data = {}
    for exps, vec in g.terms():
        for e in range(max(lo, -wt_t), hi + 1):
            img = x_mode(vec, -e, target)
            if img:
                data[exps + (e,)] = img
    wins = list(g.windows()) + [VarWindow(xvar, lo, hi, -wt_t, hi)]
    return Series(wins, data)


def _map_mode(g: Series, m: int, target: FockVector) -> Series:
    """One fixed x-mode of every coefficient, applied to target."""
    data = {}
    for exps, vec in g.terms():
        img = x_mode(vec, m, target)
        if img:
            data[exps] = img
    return Series(g.windows(), data)


def _as_vec(val) -> FockVector:
    return val if isinstance(val, FockVector) else FockVector.zero()


# ----------------------------------------------------------------------
# Exponential-of-logarithm kernel tables


@lru_cache(maxsize=None)
def _log_pow_coeffs(n: int, order: int) -> "tuple[Fraction, ...]":
    """Taylor coefficients of exp(n*log(1-t)) up to t^order.

    Composed from the truncated logarithm itself rather than from the
    binomial theorem, so the log series is exercised on every kernel."""
    log_terms = {e: c for (e,), c in ca.log1m("t", order).terms()}
    out = {0: F(1)}
    power = {0: F(1)}
    fact = 1
    for j in range(1, order + 1):
        power = ca.u_mul(power, log_terms, order)
        fact *= j
        scale = F(n) ** j / fact
        for e, c in power.items():
            if c:
                out[e] = out.get(e, F(0)) + scale * c
    return tuple(out.get(e, F(0)) for e in range(order + 1))


def _dilated_delta_product(f, out_var, pos_var, neg_var, box, n_sign):
    """f times sum_n n_sign^n e^{n log(1 - neg/pos)} pos^n out^{-n-1}.

    The exponential of the logarithmic substitution is expanded from
    _log_pow_coeffs; the kernel index n is pinned by the out box.
    Pieces whose positive-slot exponent overshoots the box contribute
    nothing inside it and are skipped, as in the plain delta kernel."""
    out_lo, out_hi = box[out_var]
    k_cap = box[neg_var][1] - int(f.window(neg_var).support_low)
    pos_w = f.window(pos_var)
    pos_room = box[pos_var][1] - int(min(pos_w.support_low, box[pos_var][1]))
    clip = dict(box)
    terms = []
    for n in range(-out_hi - 1, -out_lo):
        table = _log_pow_coeffs(n, k_cap)
        for k in range(max(0, n - pos_room), k_cap + 1):
            c = table[k] * F(n_sign) ** n
            if not c:
                continue
            piece = ca.monomial({out_var: -n - 1, pos_var: n - k, neg_var: k}, c)
            terms.append(mul(piece, f, clip=clip))
    out = ca.aligned_sum(terms)
    for nm in (out_var, pos_var, neg_var):
        out = ca.widen_band(out, nm, NEG_INF, POS_INF)
    return out


# ----------------------------------------------------------------------
# Classical three-delta identity


def jacobi_check(u: FockVector, v: FockVector, target: FockVector, windows: int) -> CheckReport:
    """The three-delta identity applied to target, compared on the cube
    of x0/x1/x2 exponents bounded by windows."""
    t0 = time.monotonic()
    w = windows
    wt_t = _wt_max(target)
    wt_uv = _wt_max(u) + _wt_max(v)
    params = {
        "identity": "JACOBI",
        "u": serialize_vector(u),
        "v": serialize_vector(v),
        "target": serialize_vector(target),
        "window": w,
    }
    cube = {"x0": (-w, w), "x1": (-w, w), "x2": (-w, w)}
    k_cap = w + wt_uv + wt_t
    obox = (-(wt_uv + wt_t + w), 3 * w + 1 + wt_uv + wt_t)
    ibox = (-(wt_uv + wt_t), w)
    try:
        g1 = _y_pair_series(u, "x1", v, "x2", target, obox, ibox)
        t1 = ca.delta_product(g1, "x0", "x1", "x2", cube)
        g2 = _y_pair_series(v, "x2", u, "x1", target, obox, ibox)
        t2 = ca.delta_product(g2, "x0", "x2", "x1", cube, n_sign=-1)
        lhs = t1 - t2
        # inner field first, then the outer field in x2 against target
        inner = _y_series(u, "x0", v, (-wt_uv, w))
        g3 = _y_on_series(
            inner, "x2", target, (-(wt_uv + wt_t + w), 3 * w + wt_uv + 1)
        )
        rhs = ca.delta_product(g3, "x2", "x1", "x0", cube)
        diffs = diff_on_box(lhs, rhs, cube)
    except WindowInsufficientError as exc:
        return make_report(
            "JACOBI", params, [], int((time.monotonic() - t0) * 1000), window_error=str(exc)
        )
    mismatches: "list[dict]" = []
    for exps, va, vb in diffs:
        mono = [exps["x0"], exps["x1"], exps["x2"]]
        _note_diff(mismatches, _as_vec(va), _as_vec(vb), target, mono)
    return make_report("JACOBI", params, mismatches, int((time.monotonic() - t0) * 1000))


def _y_series(u: FockVector, xvar: str, v: FockVector, box) -> Series:
    """Plain field of u in xvar, applied to v (classical mode exponents)."""
    lo, hi = box
    wt_uv = _wt_max(u) + _wt_max(v)
    coeffs = {}
    for e in range(max(lo, -wt_uv), hi + 1):
        img = vertex_mode(u, -e - 1, v)
        if img:
            coeffs[(e,)] = img
    return Series([VarWindow(xvar, lo, hi, -wt_uv, POS_INF)], coeffs)


def _y_pair_series(outer, ovar, inner, ivar, target, obox, ibox):
    """Composition of two plain fields applied to target; inner acts first.

    Same truncation convention as _ordered_pair_series, with classical
    mode exponents x^(-n-1)."""
    olo, ohi = obox
    ilo, ihi = ibox
    wt_t = _wt_max(target)
    wt_i = _wt_max(inner)
    wt_o = _wt_max(outer)
    coeffs = {}
    for ei in range(max(ilo, -(wt_i + wt_t)), ihi + 1):
        ivec = vertex_mode(inner, -ei - 1, target)
        if not ivec:
            continue
        floor_o = -(wt_o + wt_t + wt_i + ei)
        for eo in range(max(olo, floor_o), ohi + 1):
            img = vertex_mode(outer, -eo - 1, ivec)
            if img:
                coeffs[(eo, ei)] = img
    wins = [
        VarWindow(ovar, olo, ohi, -(wt_o + wt_t + wt_i + ihi), POS_INF),
        VarWindow(ivar, ilo, ihi, -(wt_i + wt_t), ihi),
    ]
    return Series(wins, coeffs)


def _y_on_series(g: Series, xvar: str, target: FockVector, box) -> Series:
    """Adjoin xvar to g: the plain field of each coefficient applied to
    target, with the same truncated-support convention as _x_on_series."""
    lo, hi = box
    wt_t = _wt_max(target)
    data = {}
    floor = 0
    for exps, vec in g.terms():
        lo_vec = -(_wt_max(vec) + wt_t)
        floor = min(floor, lo_vec)
        for e in range(max(lo, lo_vec), hi + 1):
            img = vertex_mode(vec, -e - 1, target)
            if img:
                data[exps + (e,)] = img
    wins = list(g.windows()) + [VarWindow(xvar, lo, hi, floor, hi)]
    return Series(wins, data)


# ----------------------------------------------------------------------
# Exponential-substitution identities


def _newjacobi_sides(u, v, target, win, x1_pad: int = 0):
    """Both sides of the exponential-delta identity applied to target.

    Returns (lhs, rhs) series over x0, x1, x2, complete on the cube of
    side 2*win (the x1 box top extended by x1_pad)."""
    w = win
    wt_t = _wt_max(target)
    wt_uv = _wt_max(u) + _wt_max(v)
    b_hi = w + x1_pad
    cube = {"x0": (-w, w), "x1": (-w, b_hi), "x2": (-w, w)}
    k_cap = w + wt_t
    g1 = _ordered_pair_series(
        u, "x1", v, "x2", target, (-(wt_t + w), b_hi + w + 1 + k_cap), (-wt_t, w)
    )
    t1 = _dilated_delta_product(g1, "x0", "x1", "x2", cube, 1)
    g2 = _ordered_pair_series(
        v, "x2", u, "x1", target,
        (-(wt_t + b_hi), 2 * w + 1 + (b_hi + wt_t)),
        (-wt_t, b_hi),
    )
    t2 = _dilated_delta_product(g2, "x0", "x2", "x1", cube, -1)
    lhs = t1 - t2
    # right side: the bracket field composed through the logarithmic
    # change of variable in s = x0/x1, then the ratio delta kernel
    s_cap = w + wt_uv
    bser = y_bracket_apply(u, v, s_cap)
    wser = ca.substitute_valuation(bser, "y", "s", ca.neg_log1m_unit, s_cap)
    xw = _x_on_series(wser, "x2", target, (-2 * w - wt_uv - 1, b_hi + 2 * w + 1))
    j_hi = s_cap + wt_uv
    pieces = []
    for n in range(-w - wt_uv, b_hi + w + 1):
        table = _log_pow_coeffs(n, j_hi)
        for j in range(j_hi + 1):
            if table[j]:
                pieces.append(
                    mul(
                        ca.monomial({"s": j, "x1": n, "x2": -n - 1}, table[j]),
                        xw,
                        clip={
                            "s": (-wt_uv, s_cap),
                            "x1": (-w - wt_uv, b_hi + w),
                            "x2": (-w, w),
                        },
                    )
                )
    h = ca.aligned_sum(pieces)
    rhs = ca.subst_monomial(h, "s", {"x0": 1, "x1": -1}, {"x0": w})
    box = {"x0": (-w, w), "x1": (-w, b_hi), "x2": (-w, w)}
    return lhs.restrict(box), rhs.restrict(box)


def _comm_sides(u, v, target, win, y_order):
    """Commutator of the weight-shifted fields vs the residue form."""
    w = win
    wt_uv = _wt_max(u) + _wt_max(v)
    data = {}
    for b in range(-w, w + 1):
        for c in range(-w, w + 1):
            vec = x_mode(u, -b, x_mode(v, -c, target)) - x_mode(
                v, -c, x_mode(u, -b, target)
            )
            if vec:
                data[(b, c)] = vec
    lhs = Series(
        [
            VarWindow("x1", -w, w, NEG_INF, POS_INF),
            VarWindow("x2", -w, w, NEG_INF, POS_INF),
        ],
        data,
    )
    order = max(y_order, 0)
    bser = y_bracket_apply(u, v, order)
    xw = _x_on_series(bser, "x2", target, (-2 * w - 1, 2 * w + 1))
    pieces = []
    for n in range(-w, w + 1):
        piece = mul(
            ca.monomial({"x1": n, "x2": -n}),
            ca.exp_series("y", order + wt_uv, -n),
        )
        pieces.append(
            mul(piece, xw, clip={"x1": (-w, w), "x2": (-w, w), "y": (-wt_uv, order)})
        )
    rhs = ca.aligned_sum(pieces).residue("y")
    return lhs, rhs


def _vector_cell_mismatches(mismatches, mono, va, vb, target):
    a = _as_vec(va)
    b = _as_vec(vb)
    diff = a - b
    for parts, _ in diff.terms():
        if len(mismatches) >= MISMATCH_CAP:
            return
        mismatches.append(mismatch_entry(list(mono), a.coeff(parts), b.coeff(parts), target))


def _residue_weights(depth: int) -> "dict[int, Fraction]":
    """Residue transport weights of the substitution x0 = x1*(1 - e^y):
    the x0^a slice contributes [y^{-1-a}] of (-1)^(a+1) em1_unit(y)^a e^y."""
    out = {}
    for a in range(-depth, 0):
        order = -1 - a
        unit_pow = ca.u_pow(ca.em1_unit(order), a, order)
        ey = {k: F(1, math.factorial(k)) for k in range(order + 1)}
        comp = ca.u_mul(unit_pow, ey, order)
        out[a] = comp.get(order, F(0)) * F(-1) ** (a + 1)
    return out


def residue_link_check(
    u: FockVector, v: FockVector, target: FockVector, win: int
) -> CheckReport:
    """Residue in x0 of the exponential-delta identity vs the commutator
    identity: the x0^(-1) slice, the change-of-variable evaluation of the
    same residue, and the residue-kernel right side must all agree."""
    t0 = time.monotonic()
    wt_uv = _wt_max(u) + _wt_max(v)
    params = {
        "identity": "RES-LINK",
        "u": serialize_vector(u),
        "v": serialize_vector(v),
        "target": serialize_vector(target),
        "window": win,
    }
    mismatches: "list[dict]" = []
    try:
        nj_lhs, nj_rhs = _newjacobi_sides(u, v, target, win, x1_pad=wt_uv)
        c_lhs, c_rhs = _comm_sides(u, v, target, win, wt_uv + 1)
        rho = _residue_weights(wt_uv)
        for b in range(-win, win + 1):
            for c in range(-win, win + 1):
                direct = _as_vec(nj_rhs.coefficient({"x0": -1, "x1": b, "x2": c}))
                via = FockVector.zero()
                for a, r in rho.items():
                    if r:
                        cell = _as_vec(
                            nj_rhs.coefficient({"x0": a, "x1": b - a - 1, "x2": c})
                        )
                        via = via + cell.scaled(r)
                comm = _as_vec(c_rhs.coefficient({"x1": b, "x2": c}))
                left_slice = _as_vec(nj_lhs.coefficient({"x0": -1, "x1": b, "x2": c}))
                left_comm = _as_vec(c_lhs.coefficient({"x1": b, "x2": c}))
                _vector_cell_mismatches(mismatches, [b, c, 0], direct, via, target)
                _vector_cell_mismatches(mismatches, [b, c, 1], via, comm, target)
                _vector_cell_mismatches(mismatches, [b, c, 2], left_slice, left_comm, target)
    except WindowInsufficientError as exc:
        return make_report(
            "RES-LINK", params, [], int((time.monotonic() - t0) * 1000), window_error=str(exc)
        )
    return make_report("RES-LINK", params, mismatches, int((time.monotonic() - t0) * 1000))


# ----------------------------------------------------------------------
# Theorem catalog


def _default_targets(params) -> "list[FockVector]":
    target = params.get("target")
    if target is not None:
        return [target]
    return basis_up_to(params["weight-cap"])


def _check_newjacobi(params, mismatches):
    w = params["x-window"]
    cube = {"x0": (-w, w), "x1": (-w, w), "x2": (-w, w)}
    for target in _default_targets(params):
        lhs, rhs = _newjacobi_sides(params["u"], params["v"], target, w)
        for exps, va, vb in diff_on_box(lhs, rhs, cube):
            mono = [exps["x0"], exps["x1"], exps["x2"]]
            _vector_cell_mismatches(mismatches, mono, va, vb, target)


def _check_comm(params, mismatches):
    w = params["x-window"]
    box = {"x1": (-w, w), "x2": (-w, w)}
    for target in _default_targets(params):
        lhs, rhs = _comm_sides(params["u"], params["v"], target, w, params["y-order"])
        for exps, va, vb in diff_on_box(lhs, rhs, box):
            _vector_cell_mismatches(
                mismatches, [exps["x1"], exps["x2"]], va, vb, target
            )


def _transported_mismatches(mismatches, diffs, w_orders, target, prefix):
    """Record mismatches of a dilation-transported comparison: the x1/x2
    exponent pair scales both sides by b^g1/g1! * c^g2/g2! at each
    requested dilation order, so a bare mismatch is reported once per
    order with a nonzero transport factor."""
    g1_cap, g2_cap = w_orders
    for exps, va, vb in diffs:
        b = exps["x1"]
        c = exps["x2"]
        for g1 in range(g1_cap + 1):
            for g2 in range(g2_cap + 1):
                fac = F(b**g1, math.factorial(g1)) * F(c**g2, math.factorial(g2))
                if not fac:
                    continue
                mono = list(prefix) + [g1, g2] + [exps[k] for k in sorted(exps)]
                _vector_cell_mismatches(
                    mismatches, mono, _as_vec(va).scaled(fac), _as_vec(vb).scaled(fac), target
                )


def _check_genjacobi(params, mismatches):
    w = params["x-window"]
    o1, o2 = params["y-orders"]
    cube = {"x0": (-w, w), "x1": (-w, w), "x2": (-w, w)}
    uslices = _bracket_slices(params["u1"], params["v1"], o1)
    vslices = _bracket_slices(params["u2"], params["v2"], o2)
    for target in _default_targets(params):
        for alpha, ua in sorted(uslices.items()):
            for beta, vb in sorted(vslices.items()):
                lhs, rhs = _newjacobi_sides(ua, vb, target, w)
                diffs = diff_on_box(lhs, rhs, cube)
                _transported_mismatches(
                    mismatches, diffs, params["w-orders"], target, [alpha, beta]
                )


def _check_gencomm(params, mismatches):
    w = params["x-window"]
    o1, o2 = params["y-orders"]
    box = {"x1": (-w, w), "x2": (-w, w)}
    uslices = _bracket_slices(params["u1"], params["v1"], o1)
    vslices = _bracket_slices(params["u2"], params["v2"], o2)
    for target in _default_targets(params):
        for alpha, ua in sorted(uslices.items()):
            for beta, vb in sorted(vslices.items()):
                lhs, rhs = _comm_sides(ua, vb, target, w, params["y-order"])
                diffs = diff_on_box(lhs, rhs, box)
                _transported_mismatches(
                    mismatches, diffs, params["w-orders"], target, [alpha, beta]
                )


def _bracket_on_series(u: FockVector, g: Series, yvar: str, order: int) -> Series:
    """Bracket field of u in a fresh variable, applied coefficientwise."""
    pieces = []
    for exps, vec in g.terms():
        br = y_bracket_apply(u, vec, order).rename({"y": yvar})
        pieces.append(mul(br, ca.monomial(dict(zip(g.variables, exps)))))
    if not pieces:
        wins = list(g.windows()) + [VarWindow(yvar, NEG_INF, order, 0, POS_INF)]
        return Series(wins, {})
    out = ca.aligned_sum(pieces)
    out = _inherit_claims(out, g)
    return out.restrict({yvar: (NEG_INF, order)})


def _bracket_series_arg(g: Series, v: FockVector, yvar: str, order: int) -> Series:
    """Bracket field with a series-valued first slot, applied to v."""
    pieces = []
    for exps, vec in g.terms():
        br = y_bracket_apply(vec, v, order).rename({"y": yvar})
        pieces.append(mul(br, ca.monomial(dict(zip(g.variables, exps)))))
    if not pieces:
        wins = list(g.windows()) + [VarWindow(yvar, NEG_INF, order, 0, POS_INF)]
        return Series(wins, {})
    out = ca.aligned_sum(pieces)
    out = _inherit_claims(out, g)
    return out.restrict({yvar: (NEG_INF, order)})


def _inherit_claims(out: Series, g: Series) -> Series:
    """Clamp completeness claims of a coefficientwise expansion to the
    box of the series it came from, and widen bands to match."""
    out = out.restrict({v: (g.window(v).low, g.window(v).high) for v in g.variables})
    for v in g.variables:
        gw = g.window(v)
        out = ca.widen_band(out, v, gw.support_low, gw.support_high)
    return out


def _negate_var(f: Series, var: str, new_name: str) -> Series:
    """Substitute var = -new_name: exponents survive, odd ones flip sign."""
    g = f.rename({var: new_name})
    idx = g.variables.index(new_name)
    data = {}
    for exps, val in g.terms():
        data[exps] = val if exps[idx] % 2 == 0 else -val
    return Series(g.windows(), data)


def _pole_depth(f: Series, var: str) -> int:
    lo = f.window(var).support_low
    return -int(min(0, lo)) if lo != NEG_INF else 0


def _mul_exp(f: Series, var: str, scale, hi_needed: int) -> Series:
    """Multiply by exp(scale*var), keeping completeness up to var^hi_needed."""
    cap = hi_needed + (_pole_depth(f, var) if var in f.variables else 0)
    return mul(f, ca.exp_series(var, max(cap, 0), scale))


def _shift_merge_residue(f: Series, var: str, res: str, sign: int) -> Series:
    """Residue in res of f with var replaced by var + sign*res.

    Only the res^(-1) cell is read afterwards, so shift slices beyond
    the pole depth of res are dropped: merged into res they land at
    res^0 and above, never at the residue cell."""
    depth = _pole_depth(f, res)
    t_cap = max(depth - 1, 0)
    sh = ca.taylor_shift(f, var, "__sh", sign, t_cap)
    merged = ca.subst_monomial(sh, "__sh", {res: 1}, {res: t_cap - depth})
    return merged.residue(res)


def _fourterm_chains(u1, v1, u2, v2, orders, levels):
    """Target-independent bracket chains of the four right-side terms."""
    o1, o2 = orders
    l1, l2, l3 = levels
    dv = _wt_max(v1) + _wt_max(v2)
    du = _wt_max(u1) + _wt_max(v2)
    dt4 = _wt_max(u2) + _wt_max(u1)

    r1 = y_bracket_apply(v1, v2, l1).rename({"y": "t1"})
    r3 = _bracket_on_series(
        u2, _bracket_on_series(u1, r1, "y1", o1 + max(dv - 1, 0)), "y2", o2
    )

    q1 = y_bracket_apply(u1, v2, l1).rename({"y": "t2"})
    q2 = _negate_var(_bracket_on_series(v1, q1, "__z", o1 + max(du - 1, 0)), "__z", "y1")
    q3 = _bracket_on_series(u2, q2, "y2", o2)

    s1 = y_bracket_apply(u2, v1, l2).rename({"y": "t3"})
    s2 = _bracket_on_series(u1, s1, "y1", o1)
    s3 = _bracket_series_arg(s2, v2, "y2", o2 + max(_wt_max(u2) + _wt_max(v1) - 1, 0))

    p1 = y_bracket_apply(u2, u1, l3).rename({"y": "t4"})
    p2 = _bracket_series_arg(p1, v1, "y1", o1)
    cap_a = o1 + _pole_depth(p2, "y1")
    cap_b = max(dt4 - 1, 0)
    z_hi = o2 + cap_a + cap_b
    p3 = _bracket_series_arg(p2, v2, "__z", z_hi)

    return {
        "a": r3,
        "b": (q3, o1 + max(du - 1, 0)),
        "c": (s3, o2 + _pole_depth(s1, "t3")),
        "d": (p3, cap_a, cap_b, z_hi),
        "orders": (o1, o2),
    }


def _fourterm_rhs(chains, target, b, m):
    o1, o2 = chains["orders"]
    ybox = {"y1": (NEG_INF, o1), "y2": (NEG_INF, o2)}

    # first term: innermost bracket in t1, y1 shifted upward by t1
    core = _mul_exp(_map_mode(chains["a"], m, target), "t1", -b, 0)
    term_a = _shift_merge_residue(core, "y1", "t1", 1).restrict(ybox)

    # second term: innermost bracket in t2, reversed middle bracket in -y1
    q3, y1_hi = chains["b"]
    core = _mul_exp(_map_mode(q3, m, target), "y1", b, y1_hi)
    term_b = _shift_merge_residue(core, "y1", "t2", -1).restrict(ybox)

    # third term: nested first slot, outer bracket in y2 shifted by -t3
    s3, y2_hi = chains["c"]
    core = _mul_exp(_map_mode(s3, m, target), "y2", -b, y2_hi)
    term_c = _shift_merge_residue(core, "y2", "t3", -1).restrict(ybox)

    # fourth term: doubly nested first slot, outer bracket evaluated at
    # y2 - y1 - t4 (the residue shift moves the whole kernel, so the
    # substituted variable absorbs it; the kernel factor
    # exp(b*(y1 - y2 + t4)) is exp(-b*z) on the nose, multiplied in
    # before the substitution)
    p3, cap_a, cap_b, z_hi = chains["d"]
    core = _mul_exp(_map_mode(p3, m, target), "__z", -b, z_hi)
    g = ca.subst_taylor_linear(
        core, "__z", "y2", [(-1, "__a"), (-1, "__b")],
        {"__a": cap_a, "__b": cap_b},
    )
    g = ca.subst_monomial(g, "__a", {"y1": 1}, {"y1": o1})
    g = ca.subst_monomial(g, "__b", {"t4": 1}, {"t4": cap_b - _pole_depth(g, "t4")})
    term_d = g.residue("t4").restrict(ybox)

    out = term_a + term_b - term_c - term_d
    return out.restrict(ybox)


def _check_fourterm(params, mismatches):
    u1, v1, u2, v2 = params["u1"], params["v1"], params["u2"], params["v2"]
    o1, o2 = params["y-orders"]
    w = params["x-window"]
    d1 = _wt_max(u1) + _wt_max(v1)
    d2 = _wt_max(u2) + _wt_max(v2)
    uslices = _bracket_slices(u1, v1, o1)
    vslices = _bracket_slices(u2, v2, o2)
    chains = _fourterm_chains(u1, v1, u2, v2, (o1, o2), tuple(params["inner-orders"]))
    box = {"y1": (-d1, o1), "y2": (-d2, o2)}
    for target in _default_targets(params):
        for b in range(-w, w + 1):
            for c in range(-w, w + 1):
                data = {}
                for alpha, ua in uslices.items():
                    for beta, vbv in vslices.items():
                        vec = x_mode(ua, -b, x_mode(vbv, -c, target)) - x_mode(
                            vbv, -c, x_mode(ua, -b, target)
                        )
                        if vec:
                            data[(alpha, beta)] = vec
                lhs = Series(
                    [
                        VarWindow("y1", -d1, o1, NEG_INF, POS_INF),
                        VarWindow("y2", -d2, o2, NEG_INF, POS_INF),
                    ],
                    data,
                )
                rhs = _fourterm_rhs(chains, target, b, -b - c)
                for exps, va, vb in diff_on_box(lhs, rhs, box):
                    mono = [b, c, exps["y1"], exps["y2"]]
                    _vector_cell_mismatches(mismatches, mono, va, vb, target)


def _check_bridge(params, mismatches):
    """Doubly dilated regularized pair field vs the weight-shifted field
    of the bracket of the generator with itself."""
    from .quadratic import gen_quadratic_coeff

    y_cap = params["y-order"]
    w_cap = params["w-order"]
    n_rng = params["mode-range"]
    g = generator()
    slices = _bracket_slices(g, g, y_cap + w_cap)
    gprime = _pole_scalar_coeffs()
    for target in _default_targets(params):
        for n in range(-n_rng, n_rng + 1):
            xw = {q: x_mode(vec, n, target) for q, vec in slices.items()}
            for a in range(-2, y_cap + 1):
                for bb in range(w_cap + 1):
                    if a >= 0:
                        lhs = gen_quadratic_coeff(a, bb, n, target, regularized=True)
                        lhs = lhs.scaled(2)
                    else:
                        scal = gprime.get(a, F(0)) if (n == 0 and bb == 0) else F(0)
                        lhs = target.scaled(scal)
                    rhs = FockVector.zero()
                    for k in range(bb + 1):
                        vec = xw.get(a + k)
                        if vec is None:
                            continue
                        fac = ca.binom(a + k, k) * F(-1) ** k
                        fac *= F((-n) ** (bb - k), math.factorial(bb - k))
                        if fac:
                            rhs = rhs + vec.scaled(fac)
                    _vector_cell_mismatches(mismatches, [a, bb, n], lhs, rhs, target)


def _pole_scalar_coeffs() -> "dict[int, Fraction]":
    """Pole part of the reordering scalar: coefficients of minus the
    derivative of the regularized geometric kernel at negative orders."""
    G = ca.todd_coeffs(3)
    return {-2: -(-1) * G[0], -1: F(0)}


def _check_specialize(params, mismatches):
    """The general commutator identity at four copies of the generator,
    dilations restored, against the dilated-pair bracket engine."""
    from .quadratic import dilated_bracket_lhs

    oy1, ow1, oy2, ow2 = params["y-orders"]
    w = params["x-window"]
    caps = (oy1 + ow1, ow1, oy2 + ow2, ow2)
    g = generator()
    uslices = _bracket_slices(g, g, oy1)
    vslices = _bracket_slices(g, g, oy2)
    box = {"x1": (-w, w), "x2": (-w, w)}
    for target in _default_targets(params):
        table = dilated_bracket_lhs(target, w, caps)
        for alpha in sorted(uslices):
            ua = uslices[alpha]
            for beta in sorted(vslices):
                vb = vslices[beta]
                lhs, rhs = _comm_sides(ua, vb, target, w, params["y-order"])
                for exps, va, vv in diff_on_box(lhs, rhs, box):
                    _vector_cell_mismatches(
                        mismatches, [alpha, beta, exps["x1"], exps["x2"]], va, vv, target
                    )
                if alpha < 0 or beta < 0:
                    # scalar slices commute; the bracket engine has no
                    # monomials there, so both sides must vanish
                    for b in range(-w, w + 1):
                        for c in range(-w, w + 1):
                            cell = _as_vec(lhs.coefficient({"x1": b, "x2": c}))
                            _vector_cell_mismatches(
                                mismatches,
                                [alpha, beta, b, c],
                                cell,
                                FockVector.zero(),
                                target,
                            )
                    continue
                for b in range(-w, w + 1):
                    for c in range(-w, w + 1):
                        mono_table = table.get((b, c), {})
                        cell = _as_vec(lhs.coefficient({"x1": b, "x2": c}))
                        for g1 in range(ow1 + 1):
                            for g2 in range(ow2 + 1):
                                pred = FockVector.zero()
                                for a1 in range(alpha, alpha + g1 + 1):
                                    a2 = g1 - (a1 - alpha)
                                    for a3 in range(beta, beta + g2 + 1):
                                        a4 = g2 - (a3 - beta)
                                        vec = mono_table.get((a1, a2, a3, a4))
                                        if vec is None:
                                            continue
                                        fac = ca.binom(a1, alpha) * ca.binom(a3, beta)
                                        if fac:
                                            pred = pred + vec.scaled(fac)
                                # the binomial resummation of the table
                                # already carries one transport factor
                                # b^g1/g1! c^g2/g2!, so only the cell is
                                # scaled before comparing
                                fac = F(b**g1, math.factorial(g1))
                                fac *= F(c**g2, math.factorial(g2))
                                _vector_cell_mismatches(
                                    mismatches,
                                    [alpha, g1, beta, g2, b, c],
                                    cell.scaled(fac),
                                    pred.scaled(4),
                                    target,
                                )


_THEOREM_IDS = (
    "NEWJACOBI",
    "COMM",
    "GENJACOBI",
    "GENCOMM",
    "FOURTERM",
    "SPECIALIZE",
    "BRIDGE",
)


def _theorem_defaults(check_id: str) -> dict:
    g = generator()
    if check_id == "NEWJACOBI":
        return {"u": g, "v": g, "x-window": 2, "weight-cap": 3}
    if check_id == "COMM":
        return {"u": g, "v": g, "x-window": 3, "y-order": 3, "weight-cap": 3}
    if check_id == "GENJACOBI":
        return {
            "u1": g, "v1": g, "u2": g, "v2": g,
            "y-orders": [1, 1], "w-orders": [1, 1],
            "x-window": 2, "weight-cap": 2,
        }
    if check_id == "GENCOMM":
        return {
            "u1": g, "v1": g, "u2": g, "v2": g,
            "y-orders": [1, 1], "w-orders": [1, 1], "y-order": 2,
            "x-window": 2, "weight-cap": 2,
        }
    if check_id == "FOURTERM":
        return {
            "u1": g, "v1": g, "u2": g, "v2": g,
            "y-orders": [1, 1], "inner-orders": [2, 2, 2],
            "x-window": 2, "weight-cap": 2,
        }
    if check_id == "SPECIALIZE":
        return {"y-orders": [1, 1, 1, 1], "y-order": 3, "x-window": 2, "weight-cap": 4}
    if check_id == "BRIDGE":
        return {"y-order": 2, "w-order": 2, "mode-range": 2, "weight-cap": 3}
    raise ValueError(f"unknown theorem id {check_id!r}")


_THEOREM_BODIES = {
    "NEWJACOBI": _check_newjacobi,
    "COMM": _check_comm,
    "GENJACOBI": _check_genjacobi,
    "GENCOMM": _check_gencomm,
    "FOURTERM": _check_fourterm,
    "SPECIALIZE": _check_specialize,
    "BRIDGE": _check_bridge,
}


def theorem_check(check_id: str, params: "Mapping | None" = None) -> CheckReport:
    """Verify one named identity coefficientwise on its finite window."""
    if check_id not in _THEOREM_IDS:
        raise ValueError(f"unknown theorem id {check_id!r}")
    t0 = time.monotonic()
    merged = _theorem_defaults(check_id)
    if params:
        for k, v in params.items():
            if k not in merged and k != "target":
                raise ValueError(f"unknown parameter {k!r} for {check_id}")
            merged[k] = v
    report_params = {"identity": check_id}
    for k in sorted(merged):
        val = merged[k]
        report_params[k] = serialize_vector(val) if isinstance(val, FockVector) else val
    mismatches: "list[dict]" = []
    try:
        _THEOREM_BODIES[check_id](merged, mismatches)
    except WindowInsufficientError as exc:
        return make_report(
            check_id,
            report_params,
            [],
            int((time.monotonic() - t0) * 1000),
            window_error=str(exc),
        )
    return make_report(
        check_id, report_params, mismatches, int((time.monotonic() - t0) * 1000)
    )
