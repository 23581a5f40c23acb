import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hilbertdesk.errors import NotABijection, NotASubgroup, OrderCapExceeded
from hilbertdesk.fixtures import delta, toeplitz_geometric
from hilbertdesk.kernel import Kernel
from hilbertdesk.perm import (
    PermGroup,
    Permutation,
    all_subgroups,
    conjugacy_classes,
    coset_decompose,
    cosets,
    cyclic_group,
    is_invariant,
    orbit,
    orbits,
    setwise_stabilizer,
    stabilizer,
    symmetric_group,
)

D3 = ["1", "2", "3"]


def test_cycle_notation_round_trip():
    d = ["1", "2", "3", "4", "5"]
    p = Permutation.from_cycles("(1 2)(3 4 5)", d)
    assert p.to_cycles(d) == "(1 2)(3 4 5)"
    assert Permutation.from_cycles("()", d).is_identity()
    assert p.order() == 6
    assert (p * p.inverse()).is_identity()


def test_enumerate_examples():
    assert PermGroup.from_cycles(D3, ["(1 2)", "(1 2 3)"]).order() == 6
    assert PermGroup.from_cycles(["1", "2", "3", "4"], ["(1 2)(3 4)"]).order() == 2
    d8 = [str(i) for i in range(1, 9)]
    g = PermGroup.from_cycles(d8, ["(1 2 3 4 5 6 7 8)", "(1 2)"], cap=1000)
    with pytest.raises(OrderCapExceeded) as info:
        g.elements()
    assert info.value.lower_bound == 1001


def test_group_cap_environment(monkeypatch):
    monkeypatch.setenv("HW_GROUP_CAP", "100")
    with pytest.raises(OrderCapExceeded):
        symmetric_group(5).elements()
    monkeypatch.setenv("HW_GROUP_CAP", "120")
    assert symmetric_group(5).order() == 120


def test_orbit_examples():
    s3 = symmetric_group(D3)
    assert sorted(orbit(s3, "1")) == D3
    triv = PermGroup(D3, [])
    assert sorted(map(sorted, orbits(triv))) == [["1"], ["2"], ["3"]]
    g = PermGroup.from_cycles(D3, ["(1 2)"])
    assert sorted(map(sorted, orbits(g))) == [["1", "2"], ["3"]]


def test_stabilizer_examples():
    s3 = symmetric_group(D3)
    assert stabilizer(s3, "1").order() == 2
    assert setwise_stabilizer(s3, ["1", "2"]).order() == 2
    assert stabilizer(PermGroup(D3, []), "1").order() == 1


def test_coset_examples():
    s3 = symmetric_group(D3)
    reps = cosets(s3, stabilizer(s3, "1"))
    assert len(reps) == 3 and reps[0].is_identity()
    assert len(cosets(s3, s3)) == 1
    s4 = symmetric_group(4)
    assert len(cosets(s4, stabilizer(s4, "4"))) == 4
    with pytest.raises(NotASubgroup):
        cosets(s3, cyclic_group(3))


def test_is_invariant_examples():
    k, g = delta(4)
    assert is_invariant(k, g) == (True, None)
    t, _ = toeplitz_geometric(5)
    shift = {f"v{i}": f"v{i + 1}" for i in range(4)}
    with pytest.raises(NotABijection):
        Permutation.from_mapping(t.ids, shift)
    rev = Permutation.from_mapping(t.ids, {f"v{i}": f"v{4 - i}" for i in range(5)})
    assert is_invariant(t, PermGroup(t.ids, [rev]))[0]
    k = Kernel.from_function(D3, lambda x, y: 1 if {x, y} == {"1", "2"} else 0)
    ok, witness = is_invariant(k, PermGroup.from_cycles(D3, ["(2 3)"]))
    assert not ok and witness == ("(2 3)", "1", "2")


def test_subgroups_of_s4():
    s4 = symmetric_group(4)
    subs = all_subgroups(s4)
    assert len(subs) == 30
    assert sorted({h.order() for h in subs}) == [1, 2, 3, 4, 6, 8, 12, 24]
    assert sorted(len(c) for c in conjugacy_classes(s4)) == [1, 3, 6, 6, 8]


gen_lists = st.lists(st.permutations(range(5)), min_size=1, max_size=3)


def as_group(images):
    d = [str(i) for i in range(1, 6)]
    return PermGroup(d, [Permutation(p) for p in images])


@settings(max_examples=40, deadline=None)
@given(gen_lists)
def test_orbits_partition_and_orbit_stabilizer(images):
    g = as_group(images)
    orbs = orbits(g)
    assert sorted(x for o in orbs for x in o) == sorted(g.domain)
    for x in g.domain:
        assert len(orbit(g, x)) * stabilizer(g, x).order() == g.order()


@settings(max_examples=25, deadline=None)
@given(gen_lists, st.sampled_from(["1", "2", "3"]))
def test_cosets_cover_group_exactly_once(images, x):
    g = as_group(images)
    k = stabilizer(g, x)
    reps = cosets(g, k)
    assert len(reps) * k.order() == g.order()
    seen = {}
    for h in g.elements():
        i, rest = coset_decompose(reps, k, h)
        assert reps[i] * rest == h
        seen[h] = i
    assert len(seen) == g.order()


def test_symmetric_orders():
    for n in range(1, 6):
        assert symmetric_group(n).order() == math.factorial(n)
