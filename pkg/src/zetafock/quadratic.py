"""Zeta-regularized quadratic mode operators and their bracket checks.

The operators here are the weighted quadratic sums

    Q(n) = (1/2) sum_j : j^{r1} h(j) (n-j)^{r2} h(n-j) :

acting on the free-boson Fock space, together with their regularized
variants: at mode zero with r1 = r2 = r the divergent constant is
assigned its zeta value and the operator gains (-1)^r (1/2) zeta(-2r-1)
times the identity.  For r = 0 these are the Virasoro modes and their
shift by -1/24.

The checks verify, coefficient by coefficient on explicit windows and
on every partition basis state up to a weight cap:

* the Virasoro bracket with central term (m^3 - m)/12,
* the shifted bracket whose central term is the pure monomial m^3/12,
* extraction of the identity component of mixed brackets of higher
  regularized operators (central_term / pure_monomial_check),
* the Wick rule splitting a product of two mode generating functions
  into its normal-ordered part and a geometric contraction kernel,
* the commutator identity for dilated quadratic generating functions
  (check id THEOREM1), whose right side combines dilation-shifted
  operators with an entire scalar kernel left over from regularization.

All arithmetic is exact; failures are reported, never tolerated.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

from . import calculus as ca
from .fock import FockVector, basis_up_to, h_apply, partitions_of
from .reports import CheckReport, make_report, mismatch_entry
from .series import NEG_INF, POS_INF, Series, VarWindow, diff_on_box

F = Fraction

__all__ = [
    "QuadraticOpSpec",
    "bernoulli",
    "zeta_neg",
    "reg_constant",
    "pair_apply",
    "quad_apply",
    "l_mode",
    "lbar_mode",
    "lbar_r",
    "gen_quadratic_coeff",
    "mixed_reg_constant",
    "virasoro_check",
    "modified_virasoro_check",
    "central_term",
    "pure_monomial_check",
    "wick_check",
    "theorem1_check",
    "dilated_bracket_lhs",
]


# ----------------------------------------------------------------------
# Exact Bernoulli / zeta input data


@lru_cache(maxsize=None)
def _bernoulli_row(n: int) -> tuple[Fraction, ...]:
    return tuple(ca.bernoulli_list(n))


def bernoulli(k: int) -> Fraction:
    """B_k with the B_1 = -1/2 convention, by inversion of (e^x - 1)/x."""
    if k < 0:
        raise ValueError("Bernoulli index must be nonnegative")
    return _bernoulli_row(k)[k]


def zeta_neg(k: int) -> Fraction:
    """zeta(-k+1) = -B_k / k, defined here for k >= 2 only.

    k = 1 is rejected: the B_1 sign convention would give +1/2 where the
    analytic value of zeta(0) is -1/2, so mode-zero regularization never
    consults this function at k = 1."""
    if k < 2:
        raise ValueError("zeta_neg needs k >= 2")
    return -bernoulli(k) / k


def reg_constant(r: int) -> Fraction:
    """Identity coefficient added at mode zero: (-1)^r (1/2) zeta(-2r-1)."""
    if r < 0:
        raise ValueError("order must be nonnegative")
    return F((-1) ** r, 2) * zeta_neg(2 * r + 2)


# ----------------------------------------------------------------------
# Normal-ordered quadratic application


@lru_cache(maxsize=None)
def _pair_on_basis(j: int, k: int, parts: tuple[int, ...]) -> FockVector:
    """:h(j)h(k): applied to one basis state; larger mode index acts first."""
    if j < k:
        j, k = k, j
    return h_apply(k, h_apply(j, FockVector.basis(parts)))


def pair_apply(j: int, k: int, v: FockVector) -> FockVector:
    """Normal-ordered pair :h(j)h(k): on an arbitrary vector."""
    if j < k:
        j, k = k, j
    acc: dict[tuple[int, ...], Fraction] = {}
    for parts, c in v._terms.items():
        for p2, c2 in _pair_on_basis(j, k, parts)._terms.items():
            s = acc.get(p2, F(0)) + c * c2
            if s:
                acc[p2] = s
            else:
                del acc[p2]
    return FockVector(acc)


@dataclass(frozen=True)
class QuadraticOpSpec:
    """Data selecting one quadratic operator.

    r_left and r_right are the polynomial weights on the two mode
    indices; they coincide for the named graded operators and differ
    only for generating-function coefficients."""

    r_left: int
    r_right: int
    n: int
    regularized: bool = False


def quad_apply(op: QuadraticOpSpec, v: FockVector) -> FockVector:
    """Exact image of v under the quadratic operator described by op.

    The mode sum runs over |j| <= weight + |n| per basis component;
    every term outside annihilates.  The regularizing constant enters
    only at n = 0 with r_left = r_right."""
    acc: dict[tuple[int, ...], Fraction] = {}
    for parts, c in v._terms.items():
        bound = sum(parts) + abs(op.n)
        for j in range(-bound, bound + 1):
            k = op.n - j
            if j == 0 or k == 0:
                continue
            wgt = j**op.r_left * k**op.r_right
            pv = _pair_on_basis(j, k, parts) if j >= k else _pair_on_basis(k, j, parts)
            if not pv._terms:
                continue
            s = c * wgt
            for p2, c2 in pv._terms.items():
                t = acc.get(p2, F(0)) + c2 * s
                if t:
                    acc[p2] = t
                else:
                    del acc[p2]
    out = FockVector(acc).scaled(F(1, 2))
    if op.regularized and op.n == 0 and op.r_left == op.r_right:
        out = out + v.scaled(reg_constant(op.r_left))
    return out


def l_mode(n: int, v: FockVector) -> FockVector:
    """Virasoro mode L(n)."""
    return quad_apply(QuadraticOpSpec(0, 0, n, False), v)


def lbar_mode(n: int, v: FockVector) -> FockVector:
    """Shifted Virasoro mode: L(n) for n != 0, L(0) - 1/24 at n = 0."""
    return quad_apply(QuadraticOpSpec(0, 0, n, True), v)


def lbar_r(r: int, n: int, v: FockVector) -> FockVector:
    """Regularized graded operator of order r at mode n."""
    return quad_apply(QuadraticOpSpec(r, r, n, True), v)


# ----------------------------------------------------------------------
# Generating-function coefficients

_fact = math.factorial


@lru_cache(maxsize=None)
def mixed_reg_constant(a: int, b: int) -> Fraction:
    """Identity part of the order-(a, b) generating coefficient at mode 0.

    Coefficient of y1^a y2^b in -(1/2) d/dy1 of the contraction kernel
    1/(1 - e^(y2 - y1)).  The kernel's pole contributes only negative
    powers of y1, so for a, b >= 0 a single Taylor coefficient of the
    derivative of t/(1 - e^-t) remains."""
    if a < 0 or b < 0:
        raise ValueError("orders must be nonnegative")
    m = a + b
    G = ca.todd_coeffs(m + 2)
    return -F(1, 2) * (m + 1) * G[m + 2] * ca.binom(m, b) * (-1) ** b


def gen_quadratic_coeff(
    a: int, b: int, n: int, v: FockVector, regularized: bool = False
) -> FockVector:
    """Coefficient of y1^a y2^b x^(-n) of the dilated quadratic field on v.

    Equals (1/2) sum over j+k=n of (-j)^a (-k)^b / (a! b!) :h(j)h(k): v,
    plus the mixed regularizing constant at n = 0 when requested."""
    if a < 0 or b < 0:
        raise ValueError("orders must be nonnegative")
    acc: dict[tuple[int, ...], Fraction] = {}
    for parts, c in v._terms.items():
        bound = sum(parts) + abs(n)
        for j in range(-bound, bound + 1):
            k = n - j
            if j == 0 or k == 0:
                continue
            wgt = (-j) ** a * (-k) ** b
            pv = _pair_on_basis(j, k, parts) if j >= k else _pair_on_basis(k, j, parts)
            for p2, c2 in pv._terms.items():
                t = acc.get(p2, F(0)) + c2 * c * wgt
                if t:
                    acc[p2] = t
                else:
                    del acc[p2]
    out = FockVector(acc).scaled(F(1, 2 * _fact(a) * _fact(b)))
    if regularized and n == 0:
        out = out + v.scaled(mixed_reg_constant(a, b))
    return out


# ----------------------------------------------------------------------
# Bracket checks on the mode level


def _mode_bracket_report(
    check_id: str,
    m: int,
    n: int,
    W: int,
    mode,
    central: Fraction,
) -> CheckReport:
    t0 = time.monotonic()
    mismatches: list[dict] = []
    for v in basis_up_to(W):
        lhs = mode(m, mode(n, v)) - mode(n, mode(m, v))
        rhs = mode(m + n, v).scaled(m - n)
        if m + n == 0:
            rhs = rhs + v.scaled(central)
        if lhs != rhs:
            diff = lhs - rhs
            for parts, _ in diff.terms():
                mismatches.append(
                    mismatch_entry(parts, lhs.coeff(parts), rhs.coeff(parts), v)
                )
    params = {"identity": check_id, "m": m, "n": n, "weight-cap": W}
    elapsed = int((time.monotonic() - t0) * 1000)
    return make_report(check_id, params, mismatches, elapsed)


def virasoro_check(m: int, n: int, W: int) -> CheckReport:
    """[L(m), L(n)] = (m-n) L(m+n) + (1/12)(m^3 - m) delta_{m+n,0}."""
    return _mode_bracket_report("VIRASORO", m, n, W, l_mode, F(m**3 - m, 12))


def modified_virasoro_check(m: int, n: int, W: int) -> CheckReport:
    """Shifted modes: [Lb(m), Lb(n)] = (m-n) Lb(m+n) + (1/12) m^3 delta."""
    return _mode_bracket_report("MODVIR", m, n, W, lbar_mode, F(m**3, 12))


# ----------------------------------------------------------------------
# Identity-component extraction for mixed regularized brackets


def _solve_exact(
    rows: "list[list[Fraction]]", rhs: "list[Fraction]"
) -> "list[Fraction] | None":
    """Solve an overdetermined rational system exactly.

    Returns a solution satisfying every row, or None when the rows are
    inconsistent.  Raises if the system leaves a free direction: the
    caller needs a unique answer."""
    if not rows:
        raise ValueError("no equations")
    ncols = len(rows[0])
    aug = [row[:] + [val] for row, val in zip(rows, rhs)]
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(aug)) if aug[i][col]), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        lead = aug[r][col]
        aug[r] = [x / lead for x in aug[r]]
        for i in range(len(aug)):
            if i != r and aug[i][col]:
                f = aug[i][col]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        pivots.append(col)
        r += 1
        if r == len(aug):
            break
    for i in range(r, len(aug)):
        if aug[i][ncols]:
            return None
    if len(pivots) < ncols:
        raise ValueError("system is underdetermined; raise the weight cap")
    sol = [F(0)] * ncols
    for i, col in enumerate(pivots):
        sol[col] = aug[i][ncols]
    return sol


def _diag_eigenvalue(t: int, parts: tuple[int, ...]) -> Fraction:
    """Eigenvalue of the order-t regularized operator at mode 0."""
    return F((-1) ** t) * sum((F(p) ** (2 * t + 1) for p in parts), F(0)) + reg_constant(t)


def central_term(r: int, s: int, m: int, W: "int | None" = None) -> Fraction:
    """Identity coefficient of the bracket of regularized operators.

    Computes [Q_r(m), Q_s(-m)] on every basis state of weight <= W,
    fits the unique diagonal combination of mode-zero regularized
    operators of orders 0..r+s plus a multiple of the identity that
    reproduces the action on all non-vacuum states, verifies the fit
    on the whole basis including the vacuum, and returns the identity
    coefficient.  Inconsistency at this W raises ValueError."""
    if m == 0:
        raise ValueError("mode must be nonzero")
    if W is None:
        W = 2 * r + 2 * s + 4
    T = r + s
    rows: list[list[Fraction]] = []
    vals: list[Fraction] = []
    actions: list[tuple[tuple[int, ...], FockVector]] = []
    for w in range(W + 1):
        for parts in partitions_of(w):
            v = FockVector.basis(parts)
            kv = lbar_r(r, m, lbar_r(s, -m, v)) - lbar_r(s, -m, lbar_r(r, m, v))
            actions.append((parts, kv))
            if w > 0:
                rows.append([_diag_eigenvalue(t, parts) for t in range(T + 1)] + [F(1)])
                vals.append(kv.coeff(parts))
    sol = _solve_exact(rows, vals)
    if sol is None:
        raise ValueError("identity-part extraction is inconsistent at this weight cap")
    coeffs, lam = sol[:-1], sol[-1]
    for parts, kv in actions:
        diag = sum(
            (c * _diag_eigenvalue(t, parts) for t, c in enumerate(coeffs)), lam
        )
        if kv != FockVector.basis(parts).scaled(diag):
            raise ValueError(
                "bracket is not a diagonal combination plus identity at this weight cap"
            )
    return lam


def pure_monomial_check(
    r: int, s: int, ms: Iterable[int], W: "int | None" = None
) -> "tuple[bool, list[tuple[int, Fraction]]]":
    """Whether central_term(r, s, m) / m^(2r+2s+3) is constant over ms."""
    values = [(m, central_term(r, s, m, W)) for m in ms]
    ratios = {lam / F(m) ** (2 * r + 2 * s + 3) for m, lam in values}
    return len(ratios) <= 1, values


# ----------------------------------------------------------------------
# Wick splitting of a product of two generating functions


def _dilated_geometric(N: int, y_order: int) -> Series:
    """sum over k >= 0 of (e^(y2-y1) x2/x1)^k, truncated to the window."""
    wins = (
        VarWindow("x1", -N, 0, NEG_INF, 0),
        VarWindow("x2", 0, N, 0, POS_INF),
        VarWindow("y1", 0, y_order, 0, POS_INF),
        VarWindow("y2", 0, y_order, 0, POS_INF),
    )
    data: dict[tuple[int, int, int, int], Fraction] = {}
    for k in range(N + 1):
        for c in range(y_order + 1):
            for d in range(y_order + 1):
                val = F((-k) ** c * k**d, _fact(c) * _fact(d))
                if val:
                    data[(-k, k, c, d)] = val
    return Series(wins, data)


def wick_check(N: int, W: int, y_order: int = 2) -> CheckReport:
    """Product of two mode generating functions vs normal order + kernel.

    Checks, on every basis state of weight <= W and all mode exponents
    with absolute value <= N: the x1^(-a) x2^(-b) coefficient of the
    product equals the normal-ordered coefficient plus the contraction
    a * delta_{b,-a} [a > 0] times the identity; the dilated variant
    carries the factor (-a)^c (-b)^d / (c! d!) on both sides and the
    kernel e^(k(y2-y1)) on the contraction.  Also checks the kernel
    identities: applying x2 d/dx2 to the dilated geometric series
    agrees with applying -d/dy1."""
    t0 = time.monotonic()
    mismatches: list[dict] = []

    geo = _dilated_geometric(N, y_order)
    lhs_kernel = geo.euler_derivative("x2")
    rhs_kernel = geo.derivative("y1").scale(-1)
    kernel_box = {
        "x1": (-N, 0),
        "x2": (0, N),
        "y1": (0, y_order - 1),
        "y2": (0, y_order),
    }
    for exps, va, vb in diff_on_box(lhs_kernel, rhs_kernel, kernel_box):
        key = [exps[nm] for nm in ("x1", "x2", "y1", "y2")]
        mismatches.append(mismatch_entry(key, va, vb, FockVector.vacuum()))

    for v in basis_up_to(W):
        for a in range(-N, N + 1):
            for b in range(-N, N + 1):
                if a == 0 or b == 0:
                    continue
                plain_lhs = h_apply(a, h_apply(b, v))
                contraction = a if (a > 0 and b == -a) else 0
                plain_rhs = pair_apply(a, b, v) + v.scaled(contraction)
                for c in range(y_order + 1):
                    for d in range(y_order + 1):
                        factor = F((-a) ** c * (-b) ** d, _fact(c) * _fact(d))
                        lhs = plain_lhs.scaled(factor)
                        rhs = pair_apply(a, b, v).scaled(factor)
                        if contraction:
                            # at b = -a the kernel factor matches the
                            # operator dilation factor exactly
                            rhs = rhs + v.scaled(
                                F(contraction * (-a) ** c * a**d, _fact(c) * _fact(d))
                            )
                        if lhs != rhs:
                            diff = lhs - rhs
                            for parts, _ in diff.terms():
                                mismatches.append(
                                    mismatch_entry(
                                        [-a, -b, c, d],
                                        lhs.coeff(parts),
                                        rhs.coeff(parts),
                                        v,
                                    )
                                )
                if plain_lhs != plain_rhs:
                    diff = plain_lhs - plain_rhs
                    for parts, _ in diff.terms():
                        mismatches.append(
                            mismatch_entry(
                                [-a, -b],
                                plain_lhs.coeff(parts),
                                plain_rhs.coeff(parts),
                                v,
                            )
                        )
    params = {"identity": "WICK", "x-window": N, "weight-cap": W, "y-order": y_order}
    elapsed = int((time.monotonic() - t0) * 1000)
    return make_report("WICK", params, mismatches, elapsed)


# ----------------------------------------------------------------------
# The dilated-bracket identity (THEOREM1)
#
# Both sides are assembled coefficientwise from closed forms.  Numerator
# integers accumulate separately from the shared denominator
# 4 a1! a2! a3! a4!, and the scalar sector uses the entire kernel
#   Phi_n(u) = g''(u)(e^(nu) - 1) + n g'(u)(1 + e^(nu)),
# g(u) = 1/(1 - e^(-u)), whose pole parts cancel identically.


def _phi_coeffs(n: int, order: int) -> "list[Fraction]":
    """Taylor coefficients 0..order of Phi_n; raises if a pole survives."""
    G = ca.todd_coeffs(order + 6)
    g1: dict[int, Fraction] = {}
    g2: dict[int, Fraction] = {}
    for k, gk in enumerate(G):
        if (k - 1) * gk:
            g1[k - 2] = (k - 1) * gk
        if (k - 1) * (k - 2) * gk:
            g2[k - 3] = (k - 1) * (k - 2) * gk
    expn = {p: F(n**p, _fact(p)) for p in range(order + 4)}
    em1 = dict(expn)
    em1[0] = em1[0] - 1
    ep1 = {p: n * c for p, c in expn.items()}
    ep1[0] = ep1[0] + n
    phi: dict[int, Fraction] = {}
    for src, mult in ((g2, em1), (g1, ep1)):
        for e1, c1 in src.items():
            for e2, c2 in mult.items():
                e = e1 + e2
                if e > order:
                    continue
                t = phi.get(e, F(0)) + c1 * c2
                if t:
                    phi[e] = t
                else:
                    phi.pop(e, None)
    bad = [e for e in phi if e < 0]
    if bad:
        raise ArithmeticError(f"scalar kernel kept pole terms at orders {bad}")
    return [phi.get(e, F(0)) for e in range(order + 1)]


def _int_items(vec: FockVector) -> "list[tuple[tuple[int, ...], int]]":
    # basis states have integral matrix elements; a fractional one here
    # means the caller fed a non-basis target into the integer fast path
    out = []
    for p, c in vec._terms.items():
        if c.denominator != 1:
            raise ArithmeticError("expected integral coefficients on basis states")
        out.append((p, c.numerator))
    return out


def _scalar_sector(
    n: int, caps: "tuple[int, int, int, int]"
) -> "dict[tuple[int, int, int, int], Fraction]":
    """Identity-coefficient of the bracket right side at (x1^n, x2^-n)."""
    total_order = sum(caps)
    phi = _phi_coeffs(n, total_order)

    def exp4(cvec: "tuple[int, int, int, int]") -> dict:
        out = {}
        for a1 in range(caps[0] + 1):
            for a2 in range(caps[1] + 1):
                for a3 in range(caps[2] + 1):
                    for a4 in range(caps[3] + 1):
                        num = (
                            cvec[0] ** a1 * cvec[1] ** a2 * cvec[2] ** a3 * cvec[3] ** a4
                        )
                        if num:
                            out[(a1, a2, a3, a4)] = F(
                                num, _fact(a1) * _fact(a2) * _fact(a3) * _fact(a4)
                            )
        return out

    def mul4(A: dict, B: dict) -> dict:
        out: dict = {}
        for ka, va in A.items():
            for kb, vb in B.items():
                k = (ka[0] + kb[0], ka[1] + kb[1], ka[2] + kb[2], ka[3] + kb[3])
                if (
                    k[0] > caps[0]
                    or k[1] > caps[1]
                    or k[2] > caps[2]
                    or k[3] > caps[3]
                ):
                    continue
                t = out.get(k, F(0)) + va * vb
                if t:
                    out[k] = t
                else:
                    del out[k]
        return out

    acc: dict = {}
    for u_coeffs, e_coeffs in (
        ((-1, 1, 1, -1), (n, 0, -n, 0)),
        ((-1, 1, -1, 1), (n, 0, 0, -n)),
    ):
        # linear form u in the four dilation variables, as a dict
        u_lin = {}
        units = ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1))
        for c, key in zip(u_coeffs, units):
            if c and key[0] <= caps[0] and key[1] <= caps[1] and key[2] <= caps[2] and key[3] <= caps[3]:
                u_lin[key] = F(c)
        env = exp4(e_coeffs)
        upow = {(0, 0, 0, 0): F(1)}
        for p, ph in enumerate(phi):
            if p:
                upow = mul4(upow, u_lin)
                if not upow:
                    break
            if not ph:
                continue
            for k, val in mul4(upow, env).items():
                t = acc.get(k, F(0)) + ph * val
                if t:
                    acc[k] = t
                else:
                    del acc[k]
    return {k: v / 4 for k, v in acc.items()}


def _dilated_lhs_blocks(
    v: FockVector, N: int, wbound: int, caps: "tuple[int, int, int, int]"
) -> dict:
    """Commutator of two dilated normal-ordered pairs applied to v.

    Returns {(e1, e2): block} keyed by the mode exponents e_i = -n_i,
    where block is a flat list over dilation monomials (a1, a2, a3, a4)
    in row-major order up to caps.  Each entry is either None or a dict
    mapping partition tuples to integer numerators; the true coefficient
    carries an implicit denominator 4 * a1! * a2! * a3! * a4!.

    wbound must dominate the weight of v; pair indices beyond
    wbound + |n1| + |n2| act as zero on both orderings."""
    nm1, nm2, nm3, nm4 = (c + 1 for c in caps)
    nmono = nm1 * nm2 * nm3 * nm4
    lhs: dict[tuple[int, int], list] = {}
    for n1 in range(-N, N + 1):
        for n2 in range(-N, N + 1):
            block = [None] * nmono
            lhs[(-n1, -n2)] = block
            jb = wbound + abs(n1) + abs(n2)
            for j2 in range(-jb, jb + 1):
                k2 = n2 - j2
                if j2 == 0 or k2 == 0:
                    continue
                cands = {-j2, -k2, n1 + j2, n1 + k2}
                inner = pair_apply(j2, k2, v)
                for j1 in cands:
                    k1 = n1 - j1
                    if j1 == 0 or k1 == 0:
                        continue
                    com = pair_apply(j1, k1, inner) - pair_apply(
                        j2, k2, pair_apply(j1, k1, v)
                    )
                    if not com._terms:
                        continue
                    items = _int_items(com)
                    idx = 0
                    for a1 in range(nm1):
                        w1 = (-j1) ** a1
                        for a2 in range(nm2):
                            w12 = w1 * (-k1) ** a2
                            for a3 in range(nm3):
                                w123 = w12 * (-j2) ** a3
                                for a4 in range(nm4):
                                    wgt = w123 * (-k2) ** a4
                                    d = block[idx]
                                    if d is None:
                                        d = block[idx] = {}
                                    for p, cc in items:
                                        d[p] = d.get(p, 0) + wgt * cc
                                    idx += 1
    return lhs


def dilated_bracket_lhs(
    v: FockVector, N: int, caps: "tuple[int, int, int, int]"
) -> dict:
    """Exact dilated-pair commutator coefficients applied to v.

    Returns {(e1, e2): {(a1, a2, a3, a4): FockVector}} with the
    1 / (4 * a1! * a2! * a3! * a4!) normalization folded in and zero
    entries dropped."""
    wbound = max((sum(p) for p, _ in v.terms()), default=0)
    nm1, nm2, nm3, nm4 = (c + 1 for c in caps)
    monos = [
        (a1, a2, a3, a4)
        for a1 in range(nm1)
        for a2 in range(nm2)
        for a3 in range(nm3)
        for a4 in range(nm4)
    ]
    denom = [
        4 * _fact(a1) * _fact(a2) * _fact(a3) * _fact(a4)
        for a1, a2, a3, a4 in monos
    ]
    out: dict = {}
    for key, block in _dilated_lhs_blocks(v, N, wbound, caps).items():
        table: dict = {}
        for idx, mono in enumerate(monos):
            d = block[idx]
            if not d:
                continue
            vec = FockVector({p: F(c, denom[idx]) for p, c in d.items() if c})
            if vec:
                table[mono] = vec
        if table:
            out[key] = table
    return out


def theorem1_check(
    y_orders: "tuple[int, int, int, int]", N: int, W: int
) -> CheckReport:
    """Commutator of two dilated quadratic fields vs its closed bracket form.

    Verifies, for every partition basis state of weight <= W, every
    coefficient with x1 and x2 exponents in [-N, N] and dilation-variable
    orders up to y_orders.  The zero-order dilation slice is additionally
    cross-checked against the shifted Virasoro bracket computed by
    quad_apply, so a transcription error in either engine cannot hide."""
    t0 = time.monotonic()
    o1, o2, o3, o4 = y_orders
    caps = (o1, o2, o3, o4)
    nm1, nm2, nm3, nm4 = (c + 1 for c in caps)
    nmono = nm1 * nm2 * nm3 * nm4
    denom = [
        4 * _fact(a1) * _fact(a2) * _fact(a3) * _fact(a4)
        for a1 in range(nm1)
        for a2 in range(nm2)
        for a3 in range(nm3)
        for a4 in range(nm4)
    ]
    monos = [
        (a1, a2, a3, a4)
        for a1 in range(nm1)
        for a2 in range(nm2)
        for a3 in range(nm3)
        for a4 in range(nm4)
    ]
    scalar_cache = {n: _scalar_sector(n, caps) for n in range(-N, N + 1)}

    mismatches: list[dict] = []
    recorded: set = set()

    def record(key, lhs_val, rhs_val, target):
        if key in recorded or len(mismatches) >= 200:
            return
        recorded.add(key)
        mismatches.append(mismatch_entry(list(key[0]), lhs_val, rhs_val, target))

    for v in basis_up_to(W):
        parts0 = next(iter(v._terms))
        # ---- left side: commutator of two normal-ordered dilated pairs
        lhs = _dilated_lhs_blocks(v, N, W, caps)
        # ---- right side operator sector: four dilation-shifted families
        rhs: dict[tuple[int, int], list] = {}
        for n in range(-N, N + 1):
            for n2p in range(-n - N, -n + N + 1):
                key = (n, -n - n2p)
                block = rhs.get(key)
                if block is None:
                    block = rhs[key] = [None] * nmono
                jb = W + abs(n2p)
                for jp in range(-jb, jb + 1):
                    kp = n2p - jp
                    if jp == 0 or kp == 0 or jp + n == 0:
                        continue
                    base = pair_apply(jp, kp, v)
                    if not base._terms:
                        continue
                    items = _int_items(base)
                    mult = -(jp + n)
                    A, B = -jp - n, -kp
                    idx = 0
                    for a1 in range(nm1):
                        for a2 in range(nm2):
                            ls = (
                                (jp + n) ** a1 * (-jp) ** a2
                                + (-jp) ** a1 * (jp + n) ** a2
                            )
                            if not ls:
                                idx += nm3 * nm4
                                continue
                            lsm = mult * ls
                            for a3 in range(nm3):
                                for a4 in range(nm4):
                                    q = A**a3 * B**a4 + B**a3 * A**a4
                                    if q:
                                        wgt = lsm * q
                                        d = block[idx]
                                        if d is None:
                                            d = block[idx] = {}
                                        for p, cc in items:
                                            d[p] = d.get(p, 0) + wgt * cc
                                    idx += 1
        # ---- compare, folding in the scalar sector on the diagonal
        for n1 in range(-N, N + 1):
            for n2 in range(-N, N + 1):
                e = (-n1, -n2)
                lblock = lhs.get(e) or [None] * nmono
                rblock = rhs.get(e) or [None] * nmono
                scal = scalar_cache[e[0]] if e[0] + e[1] == 0 else {}
                for idx, mono in enumerate(monos):
                    ld = lblock[idx] or {}
                    rd = rblock[idx] or {}
                    extra = scal.get(mono, F(0))
                    for p in sorted(set(ld) | set(rd) | ({parts0} if extra else set())):
                        lv = F(ld.get(p, 0), denom[idx])
                        rv = F(rd.get(p, 0), denom[idx])
                        if p == parts0:
                            rv = rv + extra
                        if lv != rv:
                            record((e + mono, p), lv, rv, v)
        # ---- zero-order slice against the mode-level bracket engine
        for n1 in range(-N, N + 1):
            for n2 in range(-N, N + 1):
                block = lhs.get((-n1, -n2))
                ld = (block[0] if block else None) or {}
                slice_vec = FockVector({p: F(c, 4) for p, c in ld.items()})
                expect = lbar_mode(n1 + n2, v).scaled(n1 - n2)
                if n1 + n2 == 0:
                    expect = expect + v.scaled(F(n1**3, 12))
                if slice_vec != expect:
                    diff = slice_vec - expect
                    for p, _ in diff.terms():
                        record(
                            ((-n1, -n2, 0, 0, 0, 0), p),
                            slice_vec.coeff(p),
                            expect.coeff(p),
                            v,
                        )

    params = {
        "identity": "THEOREM1",
        "y-orders": list(y_orders),
        "x-window": N,
        "weight-cap": W,
    }
    elapsed = int((time.monotonic() - t0) * 1000)
    return make_report("THEOREM1", params, mismatches, elapsed)
