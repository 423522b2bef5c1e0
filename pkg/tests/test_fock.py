"""Fock-space basics: partition states, mode action, graded dimensions."""

from __future__ import annotations

import random
from fractions import Fraction

from zetafock import calculus as ca
from zetafock import fock as fo

F = Fraction


def test_make_partition_canonicalizes():
    assert fo.make_partition([1, 3, 2]) == (3, 2, 1)
    assert fo.make_partition([]) == ()
    assert fo.make_partition((2, 2)) == (2, 2)


def test_make_partition_rejects_nonpositive():
    for bad in ([0], [3, -1], [1, 0, 2]):
        try:
            fo.make_partition(bad)
        except ValueError:
            pass
        else:
            raise AssertionError(f"expected rejection of {bad}")


def test_vector_algebra():
    a = fo.FockVector.basis([2, 1])
    b = fo.FockVector.basis([3])
    v = a.scaled(F(1, 2)) + b.scaled(-2)
    assert v.coeff([1, 2]) == F(1, 2)
    assert v.coeff([3]) == -2
    assert v.coeff([1, 1, 1]) == 0
    assert (v - v) == 0
    assert not (v - v)
    assert v + (-v) == fo.FockVector.zero()
    # zero coefficients are dropped, not stored
    w = a + a.scaled(-1)
    assert len(w) == 0


def test_vector_terms_sorted_by_weight():
    v = fo.FockVector.basis([4]) + fo.FockVector.basis([1]) + fo.FockVector.basis([2, 1])
    got = [p for p, _ in v.terms()]
    assert got == [(1,), (2, 1), (4,)]


def test_h_apply_hand_values():
    vac = fo.FockVector.vacuum()
    assert fo.h_apply(-2, vac) == fo.FockVector.basis([2])
    assert fo.h_apply(2, fo.FockVector.basis([2])) == vac.scaled(2)
    assert fo.h_apply(1, fo.FockVector.basis([1, 1, 1])) == fo.FockVector.basis([1, 1]).scaled(3)
    assert fo.h_apply(3, fo.FockVector.basis([2, 1])) == 0
    assert fo.h_apply(0, fo.FockVector.basis([2, 1])) == 0
    assert fo.h_apply(-1, fo.FockVector.basis([2])) == fo.FockVector.basis([2, 1])


def test_h_apply_annihilates_above_weight():
    for w in range(7):
        for part in fo.partitions_of(w):
            b = fo.FockVector.basis(part)
            for n in range(w + 1, w + 4):
                assert fo.h_apply(n, b) == 0


def test_h_apply_linear():
    rng = random.Random(4501)
    pool = [p for w in range(6) for p in fo.partitions_of(w)]
    for _ in range(40):
        v = fo.FockVector({rng.choice(pool): F(rng.randint(-4, 4), rng.randint(1, 3))})
        w = fo.FockVector({rng.choice(pool): F(rng.randint(-4, 4), rng.randint(1, 3))})
        a, b = F(rng.randint(-3, 3)), F(rng.randint(-3, 3))
        n = rng.choice([m for m in range(-5, 6) if m])
        lhs = fo.h_apply(n, v.scaled(a) + w.scaled(b))
        rhs = fo.h_apply(n, v).scaled(a) + fo.h_apply(n, w).scaled(b)
        assert lhs == rhs


def test_heisenberg_commutators():
    # [h(m), h(n)] = m * delta(m+n, 0) * id on every state of weight <= 8
    states = fo.basis_up_to(8)
    for m in range(-5, 6):
        for n in range(-5, 6):
            expected_scale = m if m + n == 0 else 0
            for v in states:
                lhs = fo.h_apply(m, fo.h_apply(n, v)) - fo.h_apply(n, fo.h_apply(m, v))
                assert lhs == v.scaled(expected_scale), (m, n, v)


def test_weight_components():
    v = (
        fo.FockVector.basis([3, 1]).scaled(2)
        + fo.FockVector.basis([4])
        + fo.FockVector.vacuum().scaled(F(-1, 3))
    )
    comps = fo.weight_components(v)
    assert [w for w, _ in comps] == [0, 4]
    assert comps[0][1] == fo.FockVector.vacuum().scaled(F(-1, 3))
    assert comps[1][1] == fo.FockVector.basis([3, 1]).scaled(2) + fo.FockVector.basis([4])


def test_partitions_of_bounds():
    assert fo.partitions_of(0) == ((),)
    assert fo.partitions_of(4) == ((4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1))
    assert fo.partitions_of(5, 2) == ((2, 2, 1), (2, 1, 1, 1), (1, 1, 1, 1, 1))


def test_graded_dim_matches_enumeration():
    for n in range(31):
        assert fo.graded_dim(n) == len(fo.partitions_of(n))


def test_graded_dim_matches_product_formula():
    # coefficients of prod over k of (1 - q^k)^(-1), truncated at order 30
    order = 30
    prod = {0: F(1)}
    for k in range(1, order + 1):
        prod = ca.u_mul(prod, {0: F(1), k: F(-1)}, order)
    inv = ca.u_inv(prod, order)
    for n in range(order + 1):
        assert fo.graded_dim(n) == inv.get(n, F(0))


def test_graded_dim_known_values():
    assert [fo.graded_dim(n) for n in range(10)] == [1, 1, 2, 3, 5, 7, 11, 15, 22, 30]
    assert fo.graded_dim(30) == 5604


def test_character_offset():
    assert fo.character_offset() == F(-1, 24)
