from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hilbertdesk import linalg
from hilbertdesk.errors import NotNormal, ValidationRequired
from hilbertdesk.fixtures import bilinear, group_tower, linear_action, three_point, tower_family
from hilbertdesk.invsys import (
    InverseSystem,
    commute_check,
    cond_exp,
    conjugacy_system,
    decompose_l2,
    export_kernel,
    from_subgroup_family,
    l2_pair,
    product_formula_check,
    regularity_probe,
    strong_germ_check,
    validate,
    weak_limit_pair,
)
from hilbertdesk.kernel import check_psd
from hilbertdesk.perm import PermGroup, cyclic_group, symmetric_group
from hilbertdesk.reps import rational_irreducible_characters

F = Fraction


def one_point():
    return InverseSystem({"T": ["t"]}, [("S", ["T"])], {"t": 1}, [])


def test_validate_examples():
    z4 = group_tower("Z4")
    assert validate(z4).ok
    bad = z4.with_measure({"G/1:0": F(1, 5)})
    rep = validate(bad)
    assert not rep.axiom("5").ok
    assert rep.axiom("5").witness == ("class measure does not sum to 1", "G/1", F(19, 20))
    # oracle: mu({1}) = 1/2 against mu({1,2}) mu({1,3}) / mu(all) = (3/4)^2
    rep = validate(three_point())
    assert rep.axiom("7").witness == ("2-regularity", "A:12", "B:13", F(1, 2), F(9, 16))
    assert all(r.ok for r in rep.results if r.axiom != "7")


def test_unvalidated_systems_are_refused():
    bad = group_tower("Z4").with_measure({"G/1:0": F(1, 5)})
    with pytest.raises(ValidationRequired):
        decompose_l2(bad)


def test_subgroup_family_requires_normal_subgroups():
    s3 = symmetric_group(3)
    two = s3.subgroup([x for x in s3.elements() if x.order() <= 2 and x(2) == 2])
    with pytest.raises(NotNormal):
        from_subgroup_family(s3, [s3, two], ["G", "H"])


def test_l2_values():
    z4 = group_tower("Z4")
    assert l2_pair(z4, "G/1:0", "G/1:1") == 0
    assert l2_pair(z4, "G/1:0", "G/2Z:0") == F(1, 4)
    assert l2_pair(z4, "G/2Z:0", "G/2Z:0") == F(1, 2)
    assert check_psd(export_kernel(z4)).is_psd


def test_decompose_l2_examples():
    assert decompose_l2(group_tower("Z4")).dim_list == [1, 1, 2]
    rep = decompose_l2(group_tower("Z2xZ2_full"))
    assert rep.dim_list == [1, 1, 1, 1] and rep.total == 4
    assert decompose_l2(group_tower("Q8", conjugacy=True)).dim_list == [1, 3, 1]
    assert decompose_l2(one_point()).dim_list == [1]


def test_conditional_expectation_is_averaging():
    z4 = group_tower("Z4")
    ce = cond_exp(z4, "G/2Z", "G/1")
    f = [F(1), F(0), F(0), F(0)]  # indicator of G/1:0
    assert ce.apply(f) == [F(1, 2), F(0), F(1, 2), F(0)]


def test_commute_examples():
    v = group_tower("Z2xZ2_full")
    res = commute_check(v, "G/A", "G/B")
    assert res.ok and (res.ambient, res.meet) == ("G/1", "G/G")
    res = commute_check(three_point(), "A", "B")
    assert not res.ok and res.witness == "X:1"


def test_weak_limit_pair_examples():
    v = group_tower("Z2xZ2_full")
    pl = weak_limit_pair(v, "G/A:0", "G/B:0")
    assert pl.vector.coeffs == {"G/G:0": F(1, 2)} and pl.self_value == F(1, 4)
    z4 = group_tower("Z4")
    pl = weak_limit_pair(z4, "G/1:0", "G/1:2")
    assert pl.coefficient == 0 and pl.vector.coeffs == {}
    # no infinite continuation of disjoint cosets exists below G/2Z:0
    assert not pl.profile_agrees
    pl = weak_limit_pair(z4, "G/1:0", "G/1:0")
    assert pl.vector.coeffs == {"G/1:0": 1}


def test_product_formula():
    v = group_tower("Z2xZ2_full")
    res = product_formula_check(v, ["G/A:0"], "G/A", ["G/B:0"], "G/B", "G/G")
    assert res.hypothesis and res.holds and res.lhs == [F(1, 4)] * 4
    res = product_formula_check(v, ["G/A:0"], "G/A", ["G/A:0"], "G/A", "G/G")
    assert not res.hypothesis and res.holds is None


def test_regularity_probe_examples():
    b = bilinear(2, 3)
    assert regularity_probe(b, 2) == []
    violations = regularity_probe(b, 3)
    assert len(violations) == 840
    first = violations[0]
    assert first.elements == ("G/U[001]:<x,001>=0", "G/U[010]:<x,010>=0", "G/U[011]:<x,011>=0")
    assert (first.meet, first.lhs, first.rhs) == ("G/U[]:*", F(1, 4), F(1, 8))
    for name in ("Z4", "Z8", "Z2xZ2_full", "S3", "Q8", "D4"):
        assert regularity_probe(group_tower(name), 2) == []
    assert regularity_probe(one_point(), 2) == []


def test_strong_germ_check():
    sys, g = linear_action(2, 2, [[[0, 1], [1, 0]], [[1, 1], [0, 1]]])
    assert g.order() == 6
    res = strong_germ_check(sys, g, "G/U[01]:<x,01>=0")
    assert res.ok and res.norm2 == F(1, 3) and res.invariant_dim == 2


def test_conjugacy_system_measures():
    s3 = group_tower("S3", conjugacy=True)
    assert validate(s3).ok
    finest = [e for e in s3.elements() if s3.elem_class[e] == "C(G/1)"]
    assert sorted(s3.measure[e] for e in finest) == [F(1, 6), F(1, 3), F(1, 2)]


def _as_functions(sys, vectors, elems):
    return [[sum((c for p, c in v.items() if g in sys.coset_sets[p]), F(0)) for g in elems] for v in vectors]


@pytest.mark.parametrize("name", ["S3", "Q8", "D4"])
def test_conjugacy_blocks_are_rational_character_spans(name):
    g, subs, names = tower_family(name)
    sys = conjugacy_system(g, subs, names)
    classes, chars = rational_irreducible_characters(g)
    elems = g.elements()
    where = {x: i for i, c in enumerate(classes) for x in c}
    values = [[ch[where[x]] for x in elems] for ch in chars]
    kernels = [{x for x, v in zip(elems, row) if v == row[0]} for row in values]
    for comp in decompose_l2(sys).components:
        # conjugacy classes are named C(G/<subgroup>)
        h = set(subs[names.index(comp.source_class[4:-1])].elements())
        coarser = [set(s.elements()) for s in subs if set(s.elements()) > h]
        mine = [row for row, ker in zip(values, kernels) if h <= ker and not any(c <= ker for c in coarser)]
        block = _as_functions(sys, comp.vectors, elems)
        assert linalg.rank(block) == linalg.rank(mine) == linalg.rank(block + mine)


@settings(max_examples=15, deadline=None)
@given(st.sampled_from([2, 3, 4, 6, 8, 9, 12]))
def test_cyclic_divisor_towers(n):
    g = cyclic_group(n)
    r = g.generators[0]
    divisors = [d for d in range(1, n + 1) if n % d == 0]

    def power(d):
        out = g.identity()
        for _ in range(d):
            out = out * r
        return out

    subs = [g.subgroup(PermGroup(g.domain, [power(d)]).elements()) for d in divisors]
    sys = from_subgroup_family(g, subs, [f"d{d}" for d in divisors])
    assert validate(sys).ok
    assert regularity_probe(sys, 2) == []
    rep = decompose_l2(sys)
    assert rep.total == n == rep.rank
    # the block of G/<r^d> carries the characters of order exactly d
    phi = {d: sum(1 for k in range(1, d + 1) if gcd(k, d) == 1) for d in divisors}
    assert sorted(rep.dims[f"G/d{d}"] for d in divisors) == sorted(phi.values())
    k = export_kernel(sys)
    assert check_psd(k).is_psd
    for a in sys.class_ids:
        for b in sys.class_ids:
            assert commute_check(sys, a, b).ok
