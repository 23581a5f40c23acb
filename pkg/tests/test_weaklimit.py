from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hilbertdesk.errors import AmbiguousEventualValue, NotStrictlyDefinable
from hilbertdesk.fixtures import delta, equivalence, fcp_equivalence, group_tower, shifted_delta, toeplitz_geometric
from hilbertdesk.invsys import export_kernel
from hilbertdesk.kernel import check_psd
from hilbertdesk.weaklimit import (
    ZERO_ID,
    eventual_value,
    extend_action,
    find_chains,
    limit_order,
    limit_profile,
    median_type,
    strictness_report,
    weak_closure,
)

F = Fraction


def test_find_chains_examples():
    g, _ = shifted_delta(1, 4)
    (pat,) = find_chains(g, "x1", 3)
    assert (pat.diag, pat.off) == (2, 1)
    assert ("x1", "x2", "x3") in pat.chains
    (pat,) = find_chains(delta(4)[0], "x1", 3)
    assert (pat.diag, pat.off) == (1, 0)
    e, _ = equivalence([2, 3])
    (pat,) = find_chains(e, "c", 3)
    assert (pat.diag, pat.off, pat.chains) == (2, 1, [("c", "d", "e")])
    assert find_chains(e, "a", 3) == []


def test_limit_profile_examples():
    g, _ = shifted_delta(1, 4)
    tp = limit_profile(g, ["x1", "x2", "x3"], ["x4"])
    assert tp.profile == {"x4": 1} and tp.self_value == 1
    tp = limit_profile(delta(4)[0], ["x1", "x2", "x3"])
    assert set(tp.profile.values()) == {0} and tp.self_value == 0
    e, _ = equivalence([2, 3])
    tp = limit_profile(e, ["c", "d", "e"], ["a"])
    assert tp.profile == {"a": 0} and tp.self_value == 1


def test_eventual_value_needs_a_strict_majority():
    k, _ = delta(4)
    assert eventual_value(k, ["x1", "x2", "x3"], "x4") == 0
    with pytest.raises(AmbiguousEventualValue):
        eventual_value(k, ["x1", "x2"], "x1")


def test_weak_closure_examples():
    cl = weak_closure(*delta(4))
    assert cl.limit_ids == [ZERO_ID]
    cl = weak_closure(*shifted_delta(1, 4))
    assert cl.limit_ids == [ZERO_ID, "w1"]
    w = cl.limits[1]
    assert w.self_value == 1 and all(w.profile[x] == 1 for x in cl.ground)
    order = limit_order(cl)
    assert all(order.lt("w1", x) for x in cl.ground)
    assert order.lt(ZERO_ID, "w1")


def test_delta_order_has_only_zero_below():
    cl = weak_closure(*delta(3))
    order = limit_order(cl)
    strict = {(a, b) for a, b in order.leq_pairs if a != b}
    assert strict == {(ZERO_ID, x) for x in cl.ground}


def test_fcp_closure_depends_on_class_size():
    k, g = fcp_equivalence(6)
    cl = weak_closure(k, g, depth=3)
    # ids are e{size}_{j}: read the class size off the first chain member
    sizes = sorted(int(t.chain[0][1:].split("_")[0]) for t in cl.limits[1:])
    assert sizes == [3, 4, 5, 6]


def test_export_kernel_order_is_flat():
    # distinct cosets are orthogonal, so only the zero vector is a limit
    k = export_kernel(group_tower("Z4"))
    cl = weak_closure(k)
    assert cl.limit_ids == [ZERO_ID]
    order = limit_order(cl)
    assert all(a == b or a == ZERO_ID for a, b in order.leq_pairs)


def test_median_type_examples():
    res = median_type(shifted_delta(1, 8)[0], ["x1", "x2", "x3"], 2)
    assert res.accepted and set(res.type_point.profile.values()) == {1}
    res = median_type(delta(8)[0], ["x1", "x2", "x3"], 2)
    assert res.accepted and set(res.type_point.profile.values()) == {0}
    e, _ = equivalence([2, 3])
    res = median_type(e, ["c", "d", "e"], 2)
    assert not res.accepted and res.reason == "NoExtension"


def test_strictness_report_examples():
    assert strictness_report(delta(4)[0]).values == [0, 1]
    assert strictness_report(shifted_delta(1, 4)[0]).values == [1, 2]
    rep = strictness_report(toeplitz_geometric(5)[0])
    assert rep.value_count == 5 and not rep.strictly_definable
    with pytest.raises(NotStrictlyDefinable):
        weak_closure(toeplitz_geometric(5)[0])


def test_extend_action_fixes_the_limit():
    k, g = shifted_delta(1, 4)
    cl = weak_closure(k, g)
    full = extend_action(cl.kernel, g)
    assert all(full.act(h, "w1") == "w1" for h in full.generators)
    assert all(full.act(h, ZERO_ID) == ZERO_ID for h in full.generators)


def test_median_agrees_with_limit_profile_on_a_chain():
    k, _ = shifted_delta(2, 8)
    med = median_type(k, ["x1", "x2", "x3"], 2)
    lim = limit_profile(k, ["x1", "x2", "x3"], [x for x in k.ids if x not in ("x1", "x2", "x3")])
    assert med.accepted
    assert {p: v for p, v in med.type_point.profile.items() if p in lim.profile} == lim.profile
    assert med.type_point.self_value == lim.self_value


@settings(max_examples=25, deadline=None)
@given(st.fractions(min_value=0, max_value=5, max_denominator=4), st.integers(3, 6))
def test_closure_invariants_shifted_delta(c, n):
    k, g = shifted_delta(c, n)
    cl = weak_closure(k, g)
    assert check_psd(cl.kernel).is_psd
    allowed = strictness_report(k).values + [F(0)]
    assert all(cl.kernel.pair(a, b) in allowed for a in cl.kernel.ids for b in cl.kernel.ids)
    for t in cl.limits[1:]:
        assert t.self_value == c
        assert all(cl.kernel.pair(t.id, v) == c for v in t.chain)
    order = limit_order(cl)
    for a, b in order.leq_pairs:
        assert a == b or (b, a) not in order.leq_pairs


@settings(max_examples=20, deadline=None)
@given(st.lists(st.integers(1, 4), min_size=1, max_size=3))
def test_closure_invariants_equivalence(sizes):
    k, g = equivalence(sizes)
    cl = weak_closure(k, g)
    assert check_psd(cl.kernel).is_psd
    # one limit per class long enough for a chain, each with self value 1
    assert len(cl.limits) - 1 == sum(1 for s in sizes if s >= 3)
    assert all(t.self_value == 1 for t in cl.limits[1:])
