import numpy as np
import pytest

import oracle
from unitlab.algebra import GroupAlgebra, ideal_coset_test
from unitlab.descriptor import build
from unitlab.field import FiniteField
from unitlab.groups import derived_subgroup, subgroup_closure, trivial, whole
from unitlab.units import (
    ThresholdExceeded,
    UnitGroupView,
    check_enumeration,
    check_quotient_iso,
    enumerate_v,
    generator_commutators,
    v_derived,
    v_generating_set,
    v_power_subgroup,
    v_size,
    v_subgroup,
)


def A(desc, p=2, k=1):
    return GroupAlgebra(FiniteField(p, k), build(desc))


def test_v_size_formula():
    assert v_size(A("D8")) == 128
    assert v_size(A("C2", 2, 2)) == 4
    assert v_size(A("H3", 3)) == 3**26


def test_enumeration_small():
    B = A("C2")
    assert sorted(x.render() for x in enumerate_v(B)) == ["1", "a"]
    C4 = A("C4")
    els = list(enumerate_v(C4))
    assert len(els) == 8
    assert all(x * x.inverse() == C4.one for x in els)


@pytest.mark.parametrize("desc,p,k", [("D8", 2, 1), ("Q8", 2, 2), ("C9", 3, 1), ("C4", 2, 2), ("C3", 3, 2), ("C5", 5, 1)])
def test_enumeration_count(desc, p, k):
    B = A(desc, p, k)
    assert check_enumeration(B) == v_size(B)


def test_enumeration_threshold():
    with pytest.raises(ThresholdExceeded) as exc:
        list(enumerate_v(A("H3", 3)))
    assert str(3**26) in str(exc.value)


def test_enumeration_matches_naive_units():
    # every element of augmentation 1 is a unit, and nothing else is
    B = A("D8")
    D8 = oracle.dihedral_perms(8)
    ring = oracle.NaiveRing(D8, oracle.perm_mul, tuple(range(4)), 2)
    assert len(oracle.naive_v(ring)) == sum(1 for _ in enumerate_v(B))


@pytest.mark.parametrize("desc,p,k", [("C2", 2, 1), ("C2", 2, 2), ("D8", 2, 1), ("Q8", 2, 1), ("C9", 3, 1), ("D8", 2, 2)])
def test_generating_set_verified(desc, p, k):
    B = A(desc, p, k)
    gens, verified = v_generating_set(B)
    assert verified
    assert len(gens) == (B.n - 1) * k
    assert len(v_subgroup(B, gens)) == v_size(B)


def test_naive_candidates_do_not_generate_over_prime_field():
    # over GF(2) the elements 1 + (g - 1) are just the group elements
    B = A("D8")
    cands = [B.one + (B.basis(g) - B.one) for g in range(1, B.n)]
    assert len(v_subgroup(B, cands)) == 8


def test_unverified_when_not_enumerable():
    gens, verified = v_generating_set(A("H3", 3))
    assert not verified
    assert len(gens) == 26


def test_v_subgroup_small():
    B = A("C4")
    assert len(v_subgroup(B, [])) == 1
    assert len(v_subgroup(B, [B.basis(1)])) == 4


def test_closure_threshold():
    B = A("D8")
    gens, _ = v_generating_set(B)
    with pytest.raises(ThresholdExceeded):
        v_subgroup(B, gens, threshold=64)


@pytest.mark.parametrize("desc", ["D8", "Q8"])
def test_derived_and_fourth_powers_against_naive(desc):
    B = A(desc)
    if desc == "D8":
        els, mul, e = oracle.dihedral_perms(8), oracle.perm_mul, tuple(range(4))
    else:
        (els, mul), e = oracle.quaternion_matrices(), ((1, 0), (0, 1))
    n, D, P = oracle.naive_derived_and_power(oracle.NaiveRing(els, mul, e, 2), 4)
    assert n == v_size(B)
    assert len(v_derived(B)) == len(D)
    assert len(v_power_subgroup(B, 4)) == len(P)


def test_derived_inside_one_plus_ideal():
    B = A("D8")
    Dg = derived_subgroup(B.group)
    Vd = v_derived(B)
    assert 2**4 % len(Vd) == 0
    assert all(ideal_coset_test(w - B.one, Dg) for w in Vd.elements())
    for _, _, w in generator_commutators(v_generating_set(B)[0]):
        assert w in Vd


def test_derived_abelian_trivial():
    assert len(v_derived(A("C2xC4"))) == 1


def test_power_subgroups():
    B = A("C4")
    assert len(v_power_subgroup(B, 1)) == 8
    squares = {(x * x).key for x in enumerate_v(B)}
    assert len(v_power_subgroup(B, 2)) == len(squares)  # V abelian: squares form a subgroup
    D = A("D8")
    P = v_power_subgroup(D, 4)
    assert not v_derived(D) <= P


def test_vsubgroup_lagrange():
    B = A("D8")
    for H in (v_derived(B), v_power_subgroup(B, 2)):
        assert v_size(B) % len(H) == 0
        rows = H.arrays()
        assert H.contains_rows(rows).all()


def test_quotient_iso_examples():
    B = A("D8")
    G = B.group
    r = check_quotient_iso(B, derived_subgroup(G))
    assert r["ok"] and r["v_size"] == 128 and r["kernel_size"] == 16 and r["quotient_v_size"] == 8
    r = check_quotient_iso(B, trivial(G))
    assert r["ok"] and r["kernel_size"] == 1 and r["quotient_v_size"] == 128
    r = check_quotient_iso(B, whole(G))
    assert r["ok"] and r["kernel_size"] == 128 and r["quotient_v_size"] == 1


def test_quotient_iso_requires_normal():
    B = A("D8")
    H = subgroup_closure(B.group, [B.group.generators["b"]])
    with pytest.raises(Exception):
        check_quotient_iso(B, H)


def test_unit_group_view():
    view = UnitGroupView(A("D8"))
    assert view.order == 128 and view.enumerable
    assert UnitGroupView(A("H3", 3)).enumerable is False


def test_random_units_normalized():
    B = A("Q8", 2, 2)
    X = B.random_units(50, np.random.default_rng(0))
    assert all(B.from_array(x).is_normalized() for x in X)
