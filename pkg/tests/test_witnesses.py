import pytest

from unitlab.descriptor import build
from unitlab.field import FiniteField
from unitlab.groups import Cyclic, Dihedral, Modular
from unitlab.witnesses import (
    ReplayError,
    central_product_structure,
    m_inverse_crosscheck,
    qualifying_pairs,
    replay_even,
    replay_odd,
)

STEPS_ODD = {"conjugation", "absorption", "square", "hat-square", "cube", "order", "shift", "final", "orders"}


def failed(report):
    return [e for e in report["identities"] if not e["passed"]]


@pytest.mark.parametrize("p,desc", [(3, "H3"), (3, "MOD3,1"), (5, "H5")])
def test_replay_odd(p, desc):
    r = replay_odd(p, build(desc), FiniteField(p))
    assert r["passed"], failed(r)
    assert r["orders"] == [p, p, p * p]
    assert {e["step"] for e in r["identities"]} == STEPS_ODD
    assert r["final"] != "1"


def test_replay_odd_every_qualifying_pair():
    G = build("H3")
    pairs = qualifying_pairs(G)
    assert len(pairs) > 1
    F = FiniteField(3)
    for pair in pairs:
        assert replay_odd(3, G, F, pair)["passed"]


def test_replay_odd_preconditions():
    with pytest.raises(ReplayError):
        replay_odd(2, build("D8"), FiniteField(2))
    with pytest.raises(ReplayError):
        replay_odd(3, build("C9"), FiniteField(3))


def test_report_records_offending_element():
    # feed a pair that is not a witness: a central b breaks the order claims
    G = build("H3")
    c = G.generators["c"]
    r = replay_odd(3, G, FiniteField(3), (G.generators["a"], c, c))
    assert not r["passed"]
    assert all("offending" in e for e in failed(r))


@pytest.mark.parametrize("desc", ["D8", "Q8", "M16", "C8 Y D8"])
def test_replay_even(desc):
    r = replay_even(build(desc), FiniteField(2))
    assert r["passed"], failed(r)
    steps = {e["step"] for e in r["identities"]}
    assert {"ideal-central", "ideal-square", "derived-in-ideal", "squares-central", "fourth-power"} <= steps
    assert r["squares_exhaustive"] == (desc != "C8 Y D8")


def test_replay_even_needs_small_derived():
    with pytest.raises(ReplayError):
        replay_even(build("D16"), FiniteField(2))


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_m_family(m):
    r = m_inverse_crosscheck(m)
    assert r["passed"], failed(r)
    assert isinstance(r["printed_inverse_matches"], bool)
    if m >= 2:
        assert r["support_outside_a"]


@pytest.mark.parametrize("base,r,order", [(Cyclic(8), 1, 32), (Cyclic(8), 2, 128), (Modular(2, 2), 1, 64), (Cyclic(16), 1, 64), (Modular(2, 2), 0, 16)])
def test_central_product_structure(base, r, order):
    rep = central_product_structure(base, r)
    assert rep["passed"], failed(rep)
    assert rep["order"] == order
    assert rep["certificate"]["kind"] == "SpanWitness"


def test_central_product_structure_preconditions():
    with pytest.raises(ReplayError):
        central_product_structure(Cyclic(8), 0)
    with pytest.raises(ReplayError):
        central_product_structure(Dihedral(8), 1)
    with pytest.raises(ReplayError):
        central_product_structure(Modular(2, 1), 1)


def test_fourth_power_identity_across_census():
    from unitlab.algebra import GroupAlgebra
    from unitlab.certify import check_fourth_power_samples
    from unitlab.groups import derived_subgroup

    total = 0
    for desc in ["D8", "Q8", "M16", "D8xC2", "C8YD8", "C8YD8YD8", "M16YD8", "C16YD8"]:
        G = build(desc)
        assert len(derived_subgroup(G)) == 2
        for k in (1, 2):
            A = GroupAlgebra(FiniteField(2, k), G)
            assert check_fourth_power_samples(A, 700, seed=k) == 0, (desc, k)
            total += 700
    assert total >= 10**4
