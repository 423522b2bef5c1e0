"""Power-series toolbox built on the windowed series core.

Univariate coefficient kernels (exponentials, logarithms, Bernoulli and
Todd numbers), binomial expansions of variable differences, substitution
of series into formal variables, exponential dilation, and the pinned
convolution routines that multiply a series by doubly infinite
delta-type kernels which the generic product ruleset rightly refuses.

Every routine preserves the window discipline: result boxes only cover
coefficients fully determined by the input boxes, and result bands are
widened wherever a truncated slice enumeration could hide support.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Any, Callable, Iterable, Mapping, Sequence

from .series import (
    NEG_INF,
    POS_INF,
    IllDefinedProductError,
    Series,
    VariableMismatchError,
    VarWindow,
    WindowInsufficientError,
    mul,
    sum_series,
)

# ----------------------------------------------------------------------
# Univariate coefficient arithmetic on plain dicts {exponent: Fraction}.
# Exponents are nonnegative; ``order`` is an inclusive truncation cap.


def u_trim(a: Mapping[int, Fraction], order: int) -> "dict[int, Fraction]":
    return {k: v for k, v in a.items() if k <= order and v}


def u_mul(
    a: Mapping[int, Fraction], b: Mapping[int, Fraction], order: int
) -> "dict[int, Fraction]":
    out: "dict[int, Fraction]" = {}
    for i, x in a.items():
        if i > order or not x:
            continue
        for j, y in b.items():
            k = i + j
            if k > order:
                continue
            s = out.get(k, 0) + x * y
            if s:
                out[k] = s
            elif k in out:
                del out[k]
    return out


def u_inv(a: Mapping[int, Fraction], order: int) -> "dict[int, Fraction]":
    """Multiplicative inverse of a unit power series, exactly."""
    a0 = a.get(0, 0)
    if not a0:
        raise ZeroDivisionError("constant term vanishes; not a unit")
    inv0 = Fraction(1) / a0
    out = {0: inv0}
    for n in range(1, order + 1):
        acc = Fraction(0)
        for i in range(1, n + 1):
            ai = a.get(i, 0)
            if ai:
                bj = out.get(n - i, 0)
                if bj:
                    acc += ai * bj
        c = -inv0 * acc
        if c:
            out[n] = c
    return out


def u_pow(a: Mapping[int, Fraction], n: int, order: int) -> "dict[int, Fraction]":
    """n-th power of a power series; negative n needs a unit."""
    if n < 0:
        return u_pow(u_inv(a, order), -n, order)
    out: "dict[int, Fraction]" = {0: Fraction(1)}
    base = u_trim(a, order)
    while n:
        if n & 1:
            out = u_mul(out, base, order)
        n >>= 1
        if n:
            base = u_mul(base, base, order)
    return out


# ----------------------------------------------------------------------
# Named coefficient kernels


def binom(a: int, k: int) -> Fraction:
    """Generalized binomial coefficient with integer upper argument."""
    if k < 0:
        return Fraction(0)
    num = 1
    for i in range(k):
        num *= a - i
    return Fraction(num, math.factorial(k))


def em1_unit(order: int) -> "dict[int, Fraction]":
    """Coefficients of (exp(t) - 1)/t."""
    return {j: Fraction(1, math.factorial(j + 1)) for j in range(order + 1)}


def neg_log1m_unit(order: int) -> "dict[int, Fraction]":
    """Coefficients of -log(1 - t)/t."""
    return {j: Fraction(1, j + 1) for j in range(order + 1)}


def bernoulli_list(n: int) -> "list[Fraction]":
    """Bernoulli numbers B_0 .. B_n via inversion of (exp(x) - 1)/x.

    Convention with B_1 = -1/2."""
    inv = u_inv(em1_unit(n), n)
    return [inv.get(k, Fraction(0)) * math.factorial(k) for k in range(n + 1)]


def todd_coeffs(order: int) -> "list[Fraction]":
    """Taylor coefficients of t/(1 - exp(-t))."""
    unit = {j: Fraction((-1) ** j, math.factorial(j + 1)) for j in range(order + 1)}
    g = u_inv(unit, order)
    return [g.get(k, Fraction(0)) for k in range(order + 1)]


# ----------------------------------------------------------------------
# Elementary series builders

_EXP_CACHE: "dict[tuple[str, int, Any], Series]" = {}


def monomial(exps: Mapping[str, int], value: Any = 1) -> Series:
    """Fully known single-term series."""
    names = sorted(exps)
    if not value:
        return Series.zero(names)
    wins = tuple(VarWindow(nm, NEG_INF, POS_INF, exps[nm], exps[nm]) for nm in names)
    return Series(wins, {tuple(exps[nm] for nm in names): value})


def exp_series(var: str, order: int, scale: Any = 1) -> Series:
    """exp(scale * var) truncated at var^order (complete on that box)."""
    key = (var, order, scale)
    s = _EXP_CACHE.get(key)
    if s is not None:
        return s
    if order < 0:
        raise ValueError("exponential truncation order must be >= 0")
    if not scale:
        s = Series([VarWindow(var, NEG_INF, POS_INF, 0, 0)], {(0,): Fraction(1)})
    else:
        data = {}
        c = Fraction(1)
        for j in range(order + 1):
            data[(j,)] = c
            c = c * scale / (j + 1)
        s = Series([VarWindow(var, NEG_INF, order, 0, POS_INF)], data)
    _EXP_CACHE[key] = s
    return s


def binomial_difference(a_var: str, b_var: str, n: int, b_cap: int = 0) -> Series:
    """(a - b)^n expanded in nonnegative powers of b.

    For n >= 0 this is a complete polynomial.  For n < 0 the expansion
    is infinite; it is truncated at b^b_cap, capping the knowable a-box
    below at n - b_cap.
    """
    if a_var == b_var:
        raise VariableMismatchError("difference needs two distinct variables")
    k_hi = n if n >= 0 else b_cap
    data = {}
    for k in range(k_hi + 1):
        c = binom(n, k) * (-1) ** k
        if c:
            key = (n - k, k) if a_var < b_var else (k, n - k)
            data[key] = c
    if n >= 0:
        wins = [VarWindow(a_var, NEG_INF, POS_INF), VarWindow(b_var, NEG_INF, POS_INF)]
    else:
        wins = [
            VarWindow(a_var, n - b_cap, POS_INF, NEG_INF, n),
            VarWindow(b_var, NEG_INF, b_cap, 0, POS_INF),
        ]
    return Series(sorted(wins, key=lambda w: w.name), data)


# canonical name used by the check layer
binom_expand = binomial_difference


def delta_series(x: str, N: int) -> Series:
    """The formal delta distribution, truncated: sum of x^n for |n| <= N.

    Every integer exponent of the true object carries coefficient 1, so
    the support band is all of Z and only the box is finite."""
    if N < 0:
        raise ValueError("window must be nonnegative")
    win = VarWindow(x, -N, N, NEG_INF, POS_INF)
    return Series([win], {(n,): Fraction(1) for n in range(-N, N + 1)})


def log1m(t: str, order: int) -> Series:
    """log(1 - t) = -sum_{k>=1} t^k / k, complete up to t^order."""
    if order < 1:
        raise ValueError("order must be at least 1")
    win = VarWindow(t, NEG_INF, order, 1, POS_INF)
    return Series([win], {(k,): Fraction(-1, k) for k in range(1, order + 1)})


def residue(f: Series, x: str) -> Series:
    """Coefficient of x^(-1) as a series in the remaining variables."""
    return f.residue(x)


# ----------------------------------------------------------------------
# Window plumbing helpers


def aligned_sum(terms: "Sequence[Series]") -> Series:
    """Sum series over possibly different variable sets; missing
    variables are adjoined as genuine constants."""
    if not terms:
        raise ValueError("aligned_sum needs at least one term")
    names = sorted(set().union(*(set(t.variables) for t in terms)))
    padded = [
        t.with_variables([nm for nm in names if nm not in t.variables])
        for t in terms
    ]
    return sum_series(padded)


def widen_band(
    s: Series, name: str, lo: "int | float", hi: "int | float"
) -> Series:
    """Replace one support band by hull(band, [lo, hi]).

    A weaker promise, so always sound.  Needed after slice-enumerating
    constructions whose omitted slices may carry support the enumerated
    terms never showed.  An empty [lo, hi] adds nothing.
    """
    add_empty = lo > hi or lo == POS_INF or hi == NEG_INF
    wins = []
    for w in s.windows():
        if w.name == name:
            if add_empty:
                nlo, nhi = w.support_low, w.support_high
            elif w.band_empty:
                nlo, nhi = lo, hi
            else:
                nlo, nhi = min(w.support_low, lo), max(w.support_high, hi)
            wins.append(VarWindow(w.name, w.low, w.high, nlo, nhi))
        else:
            wins.append(w)
    return Series(wins, dict(s.terms()))


def _vanishes(f: Series) -> bool:
    """True when some empty band makes every completion of f zero."""
    return any(f.window(nm).band_empty for nm in f.variables)


def _band_floor(f: Series, name: str) -> "int | float":
    """Lowest possible exponent of a variable in f (0 when absent)."""
    if name not in f.variables:
        return 0
    w = f.window(name)
    return w.support_low


def _require_known_slices(f: Series, s: str, lo: int, hi: int) -> None:
    if lo > hi:
        return
    if not f.known_on({s: (lo, hi)}):
        raise WindowInsufficientError(
            f"substitution needs slices {s}^{lo}..{s}^{hi} but the box of "
            f"{s!r} is [{f.window(s).low}, {f.window(s).high}]"
        )


# ----------------------------------------------------------------------
# Substitutions.  Each routine eliminates one formal variable s of f by
# enumerating its slices; the enumeration cutoffs are justified against
# the result boxes, and bands are widened wherever slices beyond the
# cutoff could contribute support the boxes do not see.


def substitute_valuation(
    f: Series,
    s: str,
    t: str,
    unit_fn: "Callable[[int], Mapping[int, Fraction]]",
    t_cap: int,
    valuation: int = 1,
    shift_var: "str | None" = None,
    shift_mult: int = 1,
) -> Series:
    """Substitute s = shift_var^shift_mult * t^valuation * unit(t).

    ``unit_fn(order)`` must return the coefficients of an invertible
    power series in the fresh variable t, complete up to ``order``; a
    callable is required because negative slices of f need the unit to
    more t-orders than t_cap itself.  The slice s^a contributes from
    t^(a*valuation) upward; slices above t_cap // valuation fall
    outside the t box entirely (their shifted exponents ride along and
    stay sound for the same reason: the claim box is a product and
    their t coordinate escapes).
    """
    if t in f.variables:
        raise VariableMismatchError(f"target variable {t!r} already present")
    if valuation < 1:
        raise ValueError("substituted series must have positive valuation")
    if shift_mult < 1:
        raise ValueError("shift multiplier must be positive")
    if not unit_fn(0).get(0):
        raise ValueError("unit part must have nonzero constant term")
    names_out = sorted(
        set(f.variables) - {s} | {t} | ({shift_var} if shift_var else set())
    )
    if _vanishes(f):
        return Series.zero(names_out)
    w = f.window(s)
    if w.support_low == NEG_INF:
        raise IllDefinedProductError(
            f"unbounded negative powers of {s!r} cannot be substituted"
        )
    a_min = int(w.support_low)
    a_max = t_cap // valuation
    if a_min > a_max:
        # every slice lands above the t box: zero there, support beyond
        rest = []
        for ww in f.windows():
            if ww.name == s:
                continue
            if ww.name == shift_var and not ww.band_empty:
                lo = min(ww.support_low, ww.support_low + a_min * shift_mult)
                ww = VarWindow(ww.name, ww.low, ww.high, lo, POS_INF)
            rest.append(ww)
        have = {ww.name for ww in rest}
        wins = rest + [VarWindow(t, NEG_INF, t_cap, a_min * valuation, POS_INF)]
        if shift_var is not None and shift_var not in have:
            wins.append(
                VarWindow(shift_var, NEG_INF, POS_INF, a_min * shift_mult, POS_INF)
            )
        return Series(sorted(wins, key=lambda ww: ww.name), {})
    _require_known_slices(f, s, a_min, a_max)
    # the most negative slice needs the deepest unit expansion
    unit = unit_fn(t_cap - a_min * valuation)
    terms = []
    for a in range(a_min, a_max + 1):
        sl = f.slice_at(s, a)
        if shift_var is not None:
            if shift_var not in sl.variables:
                sl = sl.with_variables([shift_var])
            sl = sl.shift(shift_var, a * shift_mult)
        rem = t_cap - a * valuation
        up = u_pow(unit, a, rem)
        rep = Series(
            [VarWindow(t, NEG_INF, t_cap, a * valuation, POS_INF)],
            {(a * valuation + j,): c for j, c in up.items() if c},
        )
        terms.append(mul(sl, rep))
    out = aligned_sum(terms)
    if w.support_high > a_max and shift_var is not None:
        floor0 = _band_floor(f, shift_var)
        out = widen_band(out, shift_var, floor0 + a_min * shift_mult, POS_INF)
    return out


def subst_exp_minus_one(f: Series, s: str, t: str, t_cap: int) -> Series:
    """Substitute s = exp(t) - 1."""
    return substitute_valuation(f, s, t, em1_unit, t_cap)


# canonical name used by the check layer
subst_em1 = subst_exp_minus_one


def subst_monomial(
    f: Series,
    s: str,
    shifts: Mapping[str, int],
    caps: Mapping[str, int],
    exp_scales: "Sequence[tuple[str, int]]" = (),
    exp_order: int = 0,
) -> Series:
    """Substitute s = prod(var^mult) * prod(exp(scale*w)) with the
    exponential factors truncated at exp_order.

    ``caps`` bounds the result box of at least one positive-mult shift
    variable; the slice cutoff is derived from those caps, and omitted
    slices escape the capped boxes.
    """
    if not shifts or any(m == 0 for m in shifts.values()):
        raise ValueError("monomial substitution needs nonzero shift multipliers")
    names_out = sorted(
        set(f.variables) - {s} | set(shifts) | {wv for wv, _ in exp_scales}
    )
    if _vanishes(f):
        return Series.zero(names_out)
    w = f.window(s)
    if w.support_low == NEG_INF:
        raise IllDefinedProductError(
            f"unbounded negative powers of {s!r} cannot be substituted"
        )
    cut: "int | float" = POS_INF
    for v, m in shifts.items():
        if m > 0 and v in caps:
            floor = _band_floor(f, v)
            if floor != NEG_INF:
                cut = min(cut, (caps[v] - int(floor)) // m)
    if cut == POS_INF:
        raise IllDefinedProductError(
            "no capped positive-direction shift variable bounds the slices"
        )
    k_min = int(w.support_low)
    k_hi = int(min(cut, w.support_high))
    if k_min > k_hi:
        raise WindowInsufficientError("caps exclude every slice of the input")
    _require_known_slices(f, s, k_min, k_hi)
    terms = []
    for k in range(k_min, k_hi + 1):
        sl = f.slice_at(s, k)
        missing = [v for v in shifts if v not in sl.variables]
        if missing:
            sl = sl.with_variables(missing)
        for v, m in shifts.items():
            sl = sl.shift(v, k * m)
        for wv, sc in exp_scales:
            sl = mul(sl, exp_series(wv, exp_order, k * sc))
        terms.append(sl)
    out = aligned_sum(terms)
    out = out.restrict(
        {v: (NEG_INF, caps[v]) for v in caps if v in out.variables}
    )
    if w.support_high > k_hi:
        for v, m in shifts.items():
            if m > 0:
                out = widen_band(out, v, _band_floor(f, v) + k_min * m, POS_INF)
            else:
                ceil0 = 0 if v not in f.variables else f.window(v).support_high
                out = widen_band(out, v, NEG_INF, ceil0 + k_min * m)
        for wv, _ in exp_scales:
            out = widen_band(out, wv, 0, POS_INF)
    return out


def subst_sum(
    f: Series,
    s: str,
    parts: "Sequence[tuple[int, str]]",
    caps: Mapping[str, int],
) -> Series:
    """Substitute s = sum(coeff * var), expanded multinomially.

    f must hold only nonnegative powers of s.  ``caps`` bounds the
    result box of every part variable; slices beyond the combined cap
    cannot reach inside the capped boxes.
    """
    names = [v for _, v in parts]
    if len(set(names)) != len(names) or not names:
        raise VariableMismatchError("part variables must be distinct and nonempty")
    names_out = sorted(set(f.variables) - {s} | set(names))
    if _vanishes(f):
        return Series.zero(names_out)
    w = f.window(s)
    if w.support_low < 0:
        raise ValueError(f"negative powers of {s!r}; use a Laurent substitution")
    budget = 0
    for _, v in parts:
        if v not in caps:
            raise ValueError(f"part variable {v!r} needs a cap")
        floor = _band_floor(f, v)
        if floor == NEG_INF:
            raise IllDefinedProductError(
                f"part variable {v!r} is unbounded below in the input"
            )
        budget += max(0, caps[v] - int(floor))
    k_lo = int(w.support_low)
    k_hi = int(min(w.support_high, budget))
    if k_lo > k_hi:
        raise WindowInsufficientError("caps exclude every slice of the input")
    _require_known_slices(f, s, k_lo, k_hi)
    terms = []
    for k in range(k_lo, k_hi + 1):
        sl = f.slice_at(s, k)
        terms.append(mul(sl, _sum_power(parts, k)))
    out = aligned_sum(terms)
    out = out.restrict({v: (NEG_INF, caps[v]) for v in names})
    if w.support_high > k_hi:
        for v in names:
            out = widen_band(out, v, _band_floor(f, v), POS_INF)
    return out


def _compositions(k: int, m: int) -> "Iterable[tuple[int, ...]]":
    """All m-tuples of nonnegative integers summing to k."""
    if m == 1:
        yield (k,)
        return
    for first in range(k + 1):
        for rest in _compositions(k - first, m - 1):
            yield (first,) + rest


def _sum_power(parts: "Sequence[tuple[int, str]]", k: int) -> Series:
    """(sum coeff*var)^k as a complete polynomial series."""
    m = len(parts)
    perm = sorted(range(m), key=lambda i: parts[i][1])
    kfact = math.factorial(k)
    data: "dict[tuple[int, ...], Fraction]" = {}
    for js in _compositions(k, m):
        c = Fraction(kfact)
        for j in js:
            c /= math.factorial(j)
        for (coeff, _), j in zip(parts, js):
            c *= Fraction(coeff) ** j
        if c:
            data[tuple(js[i] for i in perm)] = c
    wins = [VarWindow(parts[i][1], NEG_INF, POS_INF) for i in perm]
    return Series(wins, data)


def subst_scaled_var(f: Series, s: str, t: str, scale: int) -> Series:
    """Substitute s = scale * t, merging into the existing variable t."""
    names_out = sorted(set(f.variables) - {s} | {t})
    if _vanishes(f):
        return Series.zero(names_out)
    w = f.window(s)
    if w.support_low < 0:
        raise ValueError(f"negative powers of {s!r} are not supported here")
    if t not in f.variables:
        f = f.with_variables([t])
    tw = f.window(t)
    cands: "list[int]" = []
    if tw.high != POS_INF and tw.support_low != NEG_INF:
        cands.append(int(tw.high - tw.support_low))
    if w.support_high != POS_INF:
        cands.append(int(w.support_high))
    if not cands:
        raise IllDefinedProductError(
            f"slices of {s!r} cannot be cut off against the box of {t!r}"
        )
    k_lo = int(w.support_low)
    k_hi = min(cands)
    if k_lo > k_hi:
        raise WindowInsufficientError("target box excludes every slice of the input")
    _require_known_slices(f, s, k_lo, k_hi)
    terms = []
    for k in range(k_lo, k_hi + 1):
        sl = f.slice_at(s, k)
        terms.append(sl.shift(t, k).scale(Fraction(scale) ** k))
    out = aligned_sum(terms)
    if w.support_high > k_hi:
        # omitted slices start at t^(k_hi + 1 + floor) = one past the t box
        out = out.restrict({t: (NEG_INF, tw.high)})
        out = widen_band(out, t, int(tw.support_low) + k_hi + 1, POS_INF)
    return out


def subst_taylor_linear(
    f: Series,
    s: str,
    base: str,
    parts: "Sequence[tuple[int, str]]",
    caps: Mapping[str, int],
) -> Series:
    """Substitute s = base + sum(coeff*var), Taylor-expanding around base.

    Slices may be Laurent: s^a maps to sum_j binom(a, j) base^(a-j) P^j
    with P the linear part.  base and the part variables must be fresh.
    The truncation j <= sum(caps) is complete inside the capped part
    boxes, and unknown slices above the s box cap the base box.
    """
    fresh = [base] + [v for _, v in parts]
    if len(set(fresh)) != len(fresh):
        raise VariableMismatchError("substitution variables must be distinct")
    for v in fresh:
        if v in f.variables:
            raise VariableMismatchError(f"substitution variable {v!r} not fresh")
    names_out = sorted(set(f.variables) - {s} | set(fresh))
    if _vanishes(f):
        return Series.zero(names_out)
    w = f.window(s)
    if w.support_low == NEG_INF:
        raise IllDefinedProductError(
            f"unbounded negative powers of {s!r} cannot be substituted"
        )
    j_cap = sum(caps[v] for _, v in parts)
    a_lo = int(w.support_low)
    complete = w.support_high <= w.high
    if complete:
        if w.support_high == POS_INF:
            raise IllDefinedProductError(f"infinitely many slices of {s!r}")
        a_hi = int(w.support_high)
    else:
        if w.high == POS_INF:
            raise IllDefinedProductError(f"infinitely many unknown slices of {s!r}")
        a_hi = int(w.high)
    if a_lo > a_hi:
        raise WindowInsufficientError("the s box excludes every slice of the input")
    _require_known_slices(f, s, a_lo, a_hi)
    m = len(parts)
    vars_all = fresh
    perm = sorted(range(m + 1), key=lambda i: vars_all[i])
    terms = []
    for a in range(a_lo, a_hi + 1):
        sl = f.slice_at(s, a)
        data: "dict[tuple[int, ...], Fraction]" = {}
        for j in range(j_cap + 1):
            cj = binom(a, j)
            if not cj:
                continue
            jfact = math.factorial(j)
            for js in _compositions(j, m) if m else [()]:
                c = cj * jfact
                for jj in js:
                    c /= math.factorial(jj)
                for (coeff, _), jj in zip(parts, js):
                    c *= Fraction(coeff) ** jj
                if c:
                    full = (a - j,) + tuple(js)
                    key = tuple(full[i] for i in perm)
                    prev = data.get(key, 0) + c
                    if prev:
                        data[key] = prev
                    elif key in data:
                        del data[key]
        wins = [VarWindow(vars_all[i], NEG_INF, POS_INF) for i in perm]
        piece = Series(wins, data)
        terms.append(mul(sl, piece))
    out = aligned_sum(terms)
    box: "dict[str, tuple[int | float, int | float]]" = {
        v: (NEG_INF, caps[v]) for _, v in parts
    }
    if not complete:
        box[base] = (NEG_INF, a_hi - j_cap)
    out = out.restrict(box)
    for _, v in parts:
        out = widen_band(out, v, 0, POS_INF)
    out = widen_band(out, base, NEG_INF, a_hi if complete else POS_INF)
    return out


def taylor_shift(f: Series, var: str, t: str, sign: int, t_cap: int) -> Series:
    """Replace var by var + sign*t (fresh t): formal exp(sign*t*d/dvar).

    Negative powers of var expand by the binomial convention in
    nonnegative powers of t, truncated at t_cap."""
    if t in f.variables:
        raise VariableMismatchError(f"shift variable {t!r} already present")
    if _vanishes(f):
        return Series.zero(sorted(set(f.variables) | {t}))
    tmp = "__shift_src"
    g = f.rename({var: tmp})
    return subst_taylor_linear(g, tmp, var, [(sign, t)], {t: t_cap})


# ----------------------------------------------------------------------
# Exponential dilation


def dilate(f: Series, x: str, w: str, w_order: int) -> Series:
    """Multiply the x^n slice of f by exp(n*w) truncated at w_order.

    Unknown x-slices stay excluded by the unchanged x box, so the
    result is complete wherever f was.
    """
    xw = f.window(x)
    terms = []
    for n, sl in f.slices(x).items():
        terms.append(mul(sl, exp_series(w, w_order, n)).attach(x, n, xw))
    # an empty frame keeps the windows honest when nothing is stored
    frame_wins = list(f.windows())
    if w in f.variables:
        iw = f.window(w)
        frame_wins = [
            VarWindow(w, iw.low, min(iw.high, w_order), iw.support_low, iw.support_high)
            if ww.name == w
            else ww
            for ww in frame_wins
        ]
    else:
        frame_wins.append(VarWindow(w, NEG_INF, w_order, 0, POS_INF))
    terms.append(Series(sorted(frame_wins, key=lambda ww: ww.name), {}))
    return aligned_sum(terms)


# ----------------------------------------------------------------------
# Pinned delta-kernel products.  These kernels carry support along a
# full diagonal line, so the per-variable window calculus cannot see
# their internal correlation; instead every lattice piece is a fully
# known monomial, multiplied exactly and clipped to the requested box.


def delta_product(
    f: Series,
    out_var: str,
    pos_var: str,
    neg_var: str,
    box: Mapping[str, "tuple[int, int]"],
    n_sign: int = 1,
    dilations: "Sequence[tuple[str, int, int, int]]" = (),
) -> Series:
    """f times sum_n n_sign^n (pos - neg)^n out^(-n-1), each difference
    power expanded in nonnegative powers of neg_var.

    One of out_var / pos_var must be absent from f so the kernel index
    is pinned by the requested finite ``box``.  Every ``dilations``
    entry (yvar, c_pos, c_neg, order) multiplies the (n, k) piece by
    exp(yvar*(c_pos*(n-k) + c_neg*k)) truncated at yvar^order.
    """
    for nm in (out_var, pos_var, neg_var):
        if nm not in box:
            raise ValueError(f"kernel variable {nm!r} needs a box entry")
    fvars = set(f.variables)
    out_lo, out_hi = box[out_var]
    pos_lo, pos_hi = box[pos_var]
    neg_hi = box[neg_var][1]
    neg_floor = _band_floor(f, neg_var)
    pos_floor = _band_floor(f, pos_var)
    if neg_floor == NEG_INF or pos_floor == NEG_INF:
        raise IllDefinedProductError(
            "kernel factors need inputs bounded below in the paired variables"
        )
    k_cap = neg_hi - int(min(neg_floor, neg_hi))
    if out_var not in fvars:
        n_lo, n_hi = -out_hi - 1, -out_lo - 1
    elif pos_var not in fvars:
        n_lo, n_hi = pos_lo, pos_hi + k_cap
    else:
        raise ValueError(
            "either the residue variable or the positive variable must be "
            "absent from the input to pin the kernel index"
        )
    clip = dict(box)
    terms = []
    for n in range(n_lo, n_hi + 1):
        k_hi_n = min(k_cap, n) if n >= 0 else k_cap
        k_lo_n = max(0, n - (pos_hi - int(min(pos_floor, pos_hi))))
        for k in range(k_lo_n, k_hi_n + 1):
            c = binom(n, k) * (-1) ** k * Fraction(n_sign) ** n
            if not c:
                continue
            piece = monomial({out_var: -n - 1, pos_var: n - k, neg_var: k}, c)
            for yvar, c_pos, c_neg, order in dilations:
                piece = mul(
                    piece, exp_series(yvar, order, c_pos * (n - k) + c_neg * k)
                )
            terms.append(mul(piece, f, clip=clip))
    if not terms:
        raise ValueError("empty kernel range; widen the requested box")
    out = aligned_sum(terms)
    for nm in (out_var, pos_var, neg_var):
        out = widen_band(out, nm, NEG_INF, POS_INF)
    for yvar, _, _, _ in dilations:
        out = widen_band(out, yvar, 0, POS_INF)
    return out


def delta_ratio_product(
    f: Series,
    pos_var: str,
    neg_var: str,
    y_pos: str,
    y_neg: str,
    y_order: int,
    box: Mapping[str, "tuple[int, int]"],
) -> Series:
    """f times sum_n exp(n*(y_pos - y_neg)) pos^n neg^(-n).

    pos_var must be absent from f, pinning n to the requested pos box.
    """
    if pos_var in f.variables:
        raise VariableMismatchError(
            f"ratio kernel needs {pos_var!r} absent from the input"
        )
    if pos_var not in box:
        raise ValueError(f"kernel variable {pos_var!r} needs a box entry")
    clip = dict(box)
    terms = []
    for n in range(box[pos_var][0], box[pos_var][1] + 1):
        piece = monomial({pos_var: n, neg_var: -n})
        piece = mul(piece, exp_series(y_pos, y_order, n))
        piece = mul(piece, exp_series(y_neg, y_order, -n))
        terms.append(mul(piece, f, clip=clip))
    if not terms:
        raise ValueError("empty kernel range; widen the requested box")
    out = aligned_sum(terms)
    for nm in (pos_var, neg_var):
        out = widen_band(out, nm, NEG_INF, POS_INF)
    for nm in (y_pos, y_neg):
        out = widen_band(out, nm, 0, POS_INF)
    return out


# ----------------------------------------------------------------------
# Regularized geometric kernel


def inv_one_minus_exp(y_pos: str, y_neg: str, order: int) -> Series:
    """Laurent expansion of 1/(1 - exp(y_neg - y_pos)) near the diagonal.

    Written as sum_k g_k (y_pos - y_neg)^(k-1) with g the Todd
    coefficients; the k = 0 pole is expanded in nonnegative powers of
    y_neg.  Complete on the box y_pos in [-1-order, order], y_neg up to
    order.
    """
    g = todd_coeffs(2 * order + 1)
    terms = [binomial_difference(y_pos, y_neg, -1, order).scale(g[0])]
    for k in range(1, 2 * order + 2):
        if g[k]:
            terms.append(binomial_difference(y_pos, y_neg, k - 1).scale(g[k]))
    out = aligned_sum(terms)
    out = out.restrict({y_pos: (NEG_INF, order), y_neg: (NEG_INF, order)})
    out = widen_band(out, y_pos, NEG_INF, POS_INF)
    out = widen_band(out, y_neg, 0, POS_INF)
    return out


# canonical name used by the check layer
reg_inv_one_minus_exp = inv_one_minus_exp


# ----------------------------------------------------------------------
# Residue invariance under change of variable


def residue_change_check(
    laurent: Mapping[int, Fraction], unit: Mapping[int, Fraction]
) -> bool:
    """Exact check that the residue of a Laurent polynomial is preserved
    by substituting x = y*unit(y) and multiplying by the derivative.

    ``unit`` must be invertible (nonzero constant term)."""
    if not unit.get(0):
        raise ValueError("change of variable must have nonzero leading coefficient")
    lhs = laurent.get(-1, Fraction(0))
    total = Fraction(0)
    fp = {k: (k + 1) * c for k, c in unit.items()}  # (y*unit)' shifted by y^-k
    for a, c in laurent.items():
        if not c or a >= 0:
            continue
        need = -1 - a
        comp = u_mul(u_pow(unit, a, need), fp, need)
        total += c * comp.get(need, Fraction(0))
    return total == lhs
