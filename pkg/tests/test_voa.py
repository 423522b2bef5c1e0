"""Vertex-operator tests.

Modes of the current and of the conformal vector are checked against
the bare oscillator action and the quadratic-operator engine; the
exponential-coordinate bracket against the Todd-number vacuum oracle;
each named identity check runs at small windows, together with the
degenerations that tie the checks to one another.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction

import pytest

from zetafock import calculus as ca
from zetafock import quadratic as q
from zetafock import voa
from zetafock.fock import FockVector, basis_up_to, h_apply, weight

F = Fraction

VAC = FockVector.vacuum()
GEN = voa.generator()
OMEGA = FockVector.basis((1, 1)).scaled(F(1, 2))


def rand_vec(rng: random.Random, wcap: int) -> FockVector:
    out = FockVector.zero()
    for s in rng.sample(basis_up_to(wcap), k=3):
        c = rng.randrange(-3, 4)
        if c:
            out = out + s.scaled(F(c))
    return out


# ----------------------------------------------------------------------
# modes of concrete states


def test_generator_modes_are_oscillators():
    for v in basis_up_to(6):
        for n in range(-6, 7):
            assert voa.vertex_mode(GEN, n, v) == h_apply(n, v), (n, v)


def test_vacuum_field_is_identity():
    for v in basis_up_to(4):
        assert voa.vertex_mode(VAC, -1, v) == v
        for n in (-3, -2, 0, 1, 2):
            assert not voa.vertex_mode(VAC, n, v)


def test_omega_modes_match_virasoro():
    # omega_(n+1) = L(n), with L from the independent quadratic engine
    for v in basis_up_to(8):
        for n in range(-4, 5):
            assert voa.vertex_mode(OMEGA, n + 1, v) == q.l_mode(n, v), (n, v)


def test_derivative_state_modes():
    # the state h(-2)*vacuum generates the derivative of the current:
    # its mode n acts as -n h(n-1)
    u = FockVector.basis((2,))
    for v in basis_up_to(5):
        for n in range(-5, 6):
            assert voa.vertex_mode(u, n, v) == h_apply(n - 1, v).scaled(-n)


def test_mode_weight_law_and_linearity_seeded():
    rng = random.Random(7411)
    states = basis_up_to(4)
    for trial in range(25):
        u = rng.choice(states)
        v = rng.choice(states)
        wu = weight(next(iter(u.terms()))[0])
        wv = weight(next(iter(v.terms()))[0])
        n = rng.randrange(-4, 5)
        img = voa.vertex_mode(u, n, v)
        for parts, _ in img.terms():
            assert weight(parts) == wu + wv - n - 1, (trial, u, v, n)
        a, b = rng.randrange(-3, 4), rng.randrange(-3, 4)
        u2 = rng.choice(states)
        mixed = voa.vertex_mode(u.scaled(F(a)) + u2.scaled(F(b)), n, v)
        assert mixed == img.scaled(F(a)) + voa.vertex_mode(u2, n, v).scaled(F(b))
        t2 = rand_vec(rng, 3)
        assert voa.vertex_mode(u, n, v + t2) == img + voa.vertex_mode(u, n, t2)


def test_x_mode_is_weight_shifted():
    for u in (GEN, OMEGA, FockVector.basis((2,))):
        wu = weight(next(iter(u.terms()))[0])
        for v in basis_up_to(3):
            for n in range(-3, 4):
                assert voa.x_mode(u, n, v) == voa.vertex_mode(u, n - 1 + wu, v)
    # weight-shifted modes annihilate above the target weight
    t = FockVector.basis((2, 1))
    for m in range(4, 8):
        assert not voa.x_mode(OMEGA, m, t)
        assert not voa.x_mode(GEN, m, t)


# ----------------------------------------------------------------------
# axioms


def test_axiom_checks_pass():
    for axiom in voa._AXIOMS:
        rep = voa.axiom_check(axiom, weight_cap=2, window=2)
        assert rep.check_id == "AXIOMS"
        assert rep.passed, axiom
    combined = voa.axioms_check(weight_cap=2, window=2)
    assert combined.passed
    assert combined.params["axioms"] == list(voa._AXIOMS)


def test_axiom_check_rejects_unknown_name():
    with pytest.raises(ValueError):
        voa.axiom_check("associativity")


def test_mismatch_recording_shape():
    mm = []
    voa._vector_cell_mismatches(mm, [1, 2], VAC, VAC.scaled(F(2)), VAC)
    assert mm[0]["monomial"] == [1, 2]
    assert mm[0]["lhs"] == "1"
    assert mm[0]["rhs"] == "2"


# ----------------------------------------------------------------------
# the exponential-coordinate bracket


def test_bracket_on_vacuum_is_creation():
    for u in basis_up_to(3):
        slices = voa._bracket_slices(u, VAC, 2)
        assert slices[0] == u
        assert not any(qq < 0 for qq in slices)


def test_bracket_of_vacuum_is_identity():
    for v in basis_up_to(3):
        assert voa._bracket_slices(VAC, v, 3) == {0: v}


def test_bracket_vacuum_scalars_match_todd_numbers():
    # the scalar component of slice q of the current bracketed with
    # itself is -(q+1) times the Todd coefficient of degree q+2
    todd = ca.todd_coeffs(8)
    slices = voa._bracket_slices(GEN, GEN, 5)
    assert slices[-2].coeff(()) == 1
    assert -1 not in slices
    for qq in range(0, 5):
        assert slices[qq].coeff(()) == -(qq + 1) * todd[qq + 2], qq


def test_log_pow_coeffs_are_binomial():
    for n in range(-3, 4):
        row = voa._log_pow_coeffs(n, 6)
        for k in range(7):
            assert row[k] == F(-1) ** k * ca.binom(n, k), (n, k)


# ----------------------------------------------------------------------
# identity checks at small windows


def test_jacobi_small_grid():
    small = basis_up_to(2)
    for u in small:
        for v in small:
            for t in small:
                rep = voa.jacobi_check(u, v, t, 2)
                assert rep.passed, (u, v, t)


def test_jacobi_spot_window_three():
    assert voa.jacobi_check(GEN, GEN, VAC, 3).passed


def test_comm_heisenberg_oracle():
    # independent of the engine: [x-mode -b of the current, x-mode -c]
    # on any vector is -b delta_(b+c,0) times that vector
    for t in (VAC, FockVector.basis((2, 1))):
        for b in range(-3, 4):
            for c in range(-3, 4):
                got = voa.x_mode(GEN, -b, voa.x_mode(GEN, -c, t)) - voa.x_mode(
                    GEN, -c, voa.x_mode(GEN, -b, t)
                )
                want = t.scaled(-b) if b + c == 0 else FockVector.zero()
                assert got == want, (b, c)


def test_newjacobi_and_comm_pass():
    assert voa.theorem_check("NEWJACOBI", {"x-window": 1, "weight-cap": 2}).passed
    assert voa.theorem_check("COMM", {"x-window": 2, "y-order": 2, "weight-cap": 2}).passed


def test_gen_identities_pass_small():
    small = {"x-window": 1, "weight-cap": 1}
    assert voa.theorem_check("GENJACOBI", small).passed
    assert voa.theorem_check("GENCOMM", small).passed
    assert voa.theorem_check("FOURTERM", small).passed


def test_genjacobi_degenerates_to_newjacobi():
    # at bracket order zero against the vacuum the slice tables collapse
    # to the plain inputs, so the general identity IS the plain one
    assert voa._bracket_slices(GEN, VAC, 0) == {0: GEN}
    rep = voa.theorem_check(
        "GENJACOBI",
        {"v1": VAC, "v2": VAC, "y-orders": [0, 0], "w-orders": [0, 0],
         "x-window": 2, "weight-cap": 2},
    )
    assert rep.passed
    assert voa.theorem_check("NEWJACOBI", {"x-window": 2, "weight-cap": 2}).passed


def test_bridge_passes_and_vacuum_scalar():
    assert voa.theorem_check("BRIDGE", {"weight-cap": 2}).passed
    # order y^1 w^1 at mode zero on the vacuum: the regularized pair
    # side is -1/120, and the bracket side reduces to the scalar part
    # of slice 2, namely -2 * 1/240
    lhs = q.gen_quadratic_coeff(1, 1, 0, VAC, regularized=True).scaled(2)
    assert lhs == VAC.scaled(F(-1, 120))
    w2 = voa._bracket_slices(GEN, GEN, 2)[2]
    rhs = voa.x_mode(w2, 0, VAC).scaled(-2)
    assert rhs == VAC.scaled(F(-1, 120))


def test_specialize_passes_small():
    assert voa.theorem_check("SPECIALIZE", {"weight-cap": 2}).passed


def test_residue_link_small():
    rep = voa.residue_link_check(GEN, GEN, FockVector.basis((1, 1)), 2)
    assert rep.check_id == "RES-LINK"
    assert rep.passed
    # the slice at pole order one transports with weight exactly 1
    assert voa._residue_weights(3)[-1] == 1


def test_theorem_check_rejects_bad_input():
    with pytest.raises(ValueError):
        voa.theorem_check("NOSUCH")
    with pytest.raises(ValueError):
        voa.theorem_check("COMM", {"z-window": 2})


def test_theorem_report_serializes_vectors():
    rep = voa.theorem_check("NEWJACOBI", {"x-window": 1, "weight-cap": 1})
    assert rep.params["identity"] == "NEWJACOBI"
    assert rep.params["u"] == [{"parts": [1], "coeff": "1"}]
    assert rep.params["x-window"] == 1
