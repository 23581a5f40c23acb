from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hilbertdesk import linalg
from hilbertdesk.decomp import (
    check_asymptotic_freedom,
    check_independence,
    commutation_check,
    decompose,
    enumerate_type_classes,
    isometry_search,
    orthogonalize_types,
    scaling_growth_probe,
)
from hilbertdesk.errors import NotNested
from hilbertdesk.fixtures import (
    delta,
    equivalence,
    group_tower,
    shifted_delta,
    subsets,
    tuples,
)
from hilbertdesk.invsys import commute_check, decompose_l2, export_kernel
from hilbertdesk.kernel import FormalVector, inner, rank, same_vector, verify_embedding
from hilbertdesk.surd import Surd
from hilbertdesk.weaklimit import weak_closure

F = Fraction
e = FormalVector.basis


def test_type_class_order():
    cl = weak_closure(*shifted_delta(1, 4))
    classes = enumerate_type_classes(cl)
    assert [c.members for c in classes] == [["zero"], ["w1"], ["x1", "x2", "x3", "x4"]]
    cl = weak_closure(*delta(4))
    assert [c.members for c in enumerate_type_classes(cl)][1:] == [["x1", "x2", "x3", "x4"]]
    # an exported tower orders its classes coarse to fine
    cl = weak_closure(export_kernel(group_tower("Z4")))
    order = [c.members[0].split(":")[0] for c in enumerate_type_classes(cl)[1:]]
    assert order == ["G/G", "G/2Z", "G/1"]


def test_one_plus_delta_components():
    k, g = shifted_delta(1, 6)
    rep = decompose(k, g)
    w, block = rep.components
    assert w.sources == ["w1"] and w.rank == 1
    assert block.gram == [[k.pair(a, b) - 1 for b in k.ids] for a in k.ids]
    rep = decompose(*delta(4))
    assert len(rep.components) == 1 and rep.components[0].sources == delta(4)[0].ids


def test_export_decomposition_matches_l2():
    for name in ("Z4", "Z2xZ2_full", "S3", "Q8"):
        sys = group_tower(name)
        assert decompose(export_kernel(sys)).dims == decompose_l2(sys).dim_list


def test_orbit_classes_and_refinement_classes_agree():
    for k, g in (shifted_delta(1, 4), equivalence([3, 3]), subsets(2, 4)):
        cl = weak_closure(k, g)
        by_orbit = orthogonalize_types(cl, enumerate_type_classes(cl, g))
        by_colour = orthogonalize_types(cl, enumerate_type_classes(cl))
        assert by_orbit.dims == by_colour.dims


def test_freedom_examples():
    assert check_asymptotic_freedom(delta(4)[0]).free
    verdict = check_asymptotic_freedom(shifted_delta(1, 4)[0])
    assert not verdict.free and verdict.blocks == [["x1", "x2", "x3", "x4"]]
    verdict = check_asymptotic_freedom(equivalence([2, 3])[0])
    assert verdict.free and verdict.blocks == [["a", "b"], ["c", "d", "e"]]


def test_independence_examples():
    k, _ = delta(2)
    e1, e2 = e("x1"), e("x2")
    assert check_independence(e1, [], [e2], k).independent
    res = check_independence(e1, [], [e1 + e2], k)
    assert not res.independent and same_vector(res.via_c, (e1 + e2) * F(1, 2), k)
    with pytest.raises(NotNested):
        check_independence(e1, [e1], [e2], k)
    sys = group_tower("Z2xZ2")
    x = export_kernel(sys)
    coarse = [e("G/G:0")]
    other = coarse + [e(p) for p in sys.classes["G/B"]]
    assert check_independence(e("G/A:0"), coarse, other, x).independent


def test_commutation_examples():
    k, _ = delta(3)
    assert commutation_check([e("x1")], [e("x2")], k).ok
    k2, _ = delta(2)
    res = commutation_check([e("x1")], [e("x1") + e("x2")], k2, [e("x2")])
    assert not res.ok and res.witness == e("x2")
    sys = group_tower("Z2xZ2")
    x = export_kernel(sys)
    span_a = [e(p) for p in sys.classes["G/A"]]
    span_b = [e(p) for p in sys.classes["G/B"]]
    assert commutation_check(span_a, span_b, x).ok
    assert commute_check(sys, "G/A", "G/B").meet == "G/G"


def test_growth_probe():
    rep = scaling_growth_probe("shifted_delta", [2, 3, 4, 5, 6])
    assert rep.max_block == [2, 3, 4, 5, 6] and not rep.bounded
    rep = scaling_growth_probe("equivalence_capped", [2, 3, 4, 5, 6])
    assert rep.max_block == [2, 3, 3, 3, 3] and rep.bounded


def test_isometry_between_g_and_h_closures():
    clg = weak_closure(*shifted_delta(1, 3))
    clh = weak_closure(*shifted_delta(3, 3))
    dg, dh = decompose(clg, shifted_delta(1, 3)[1]), decompose(clh, shifted_delta(3, 3)[1])
    iso = isometry_search(dg, dh, clg.kernel, clh.kernel)
    assert iso.found and iso.scales == [3, 1]
    r3 = Surd.sqrt(3)
    assert iso.mapping["w1"].coeffs == {"w1": r3 / 3}
    assert iso.mapping["x1"].coeffs == {"x1": 1, "w1": -1 + r3 / 3}
    assert verify_embedding(clg.kernel, clh.kernel, iso.mapping).ok
    cld = weak_closure(*delta(3))
    miss = isometry_search(dg, decompose(cld, delta(3)[1]), clg.kernel, cld.kernel)
    assert not miss.found and "numbers of components" in miss.reason


def test_tuple_variants_diverge_structurally():
    pos = decompose(*tuples(4, 2, "positional"))
    mult = decompose(*tuples(4, 2, "multiset"))
    assert pos.dims == mult.dims == [4, 4]
    assert [c.sources[0][0] for c in pos.components] == ["w", "w"]
    assert [c.sources[0][0] for c in mult.components] == ["t", "t"]


def test_subsets_components():
    rep = decompose(*subsets(2, 4))
    assert rep.dims == [1, 3] and rep.span_complete


@settings(max_examples=20, deadline=None)
@given(st.lists(st.integers(1, 4), min_size=1, max_size=3), st.integers(1, 3))
def test_decomposition_invariants(sizes, within):
    k, g = equivalence(sizes, within=within, diag=within + 1)
    cl = weak_closure(k, g)
    rep = decompose(cl, g)
    assert rep.rank_sum == rep.closure_rank == rank(cl.kernel)
    comps = rep.components
    for i, a in enumerate(comps):
        assert linalg.rank(a.gram) == a.rank
        for b in comps[i + 1:]:
            assert all(inner(u, v, cl.kernel) == 0 for u in a.vectors for v in b.vectors)
