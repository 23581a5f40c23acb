from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hilbertdesk import linalg
from hilbertdesk.errors import DuplicateId, ExtensionNotPsd, MaxRoundsExceeded, UnknownPoint
from hilbertdesk.fixtures import delta, shifted_delta, toeplitz_geometric
from hilbertdesk.kernel import (
    FormalVector,
    Kernel,
    adjoin_point,
    alternating_projections,
    check_psd,
    inner,
    intersect_spans,
    norm2,
    points,
    project,
    rank,
    same_vector,
    span_rank,
    verify_embedding,
)
from hilbertdesk.surd import Surd, is_square

F = Fraction
e = FormalVector.basis


def small_kernel(ids, f):
    return Kernel.from_function(ids, f)


# --- linear algebra and surds


def test_rref_and_rank():
    a = [[F(1), F(2)], [F(2), F(4)]]
    assert linalg.rank(a) == 1
    assert linalg.nullspace(a) == [[F(-2), F(1)]]
    assert linalg.inverse([[F(2), F(1)], [F(1), F(1)]]) == [[F(1), F(-1)], [F(-1), F(2)]]
    assert linalg.solve([[F(1), F(0)], [F(0), F(0)]], [F(0), F(1)]) is None


def test_surd_arithmetic_is_exact():
    r3 = Surd.sqrt(3)
    assert r3 * r3 == 3
    assert 1 / r3 == Surd(0, F(1, 3), 3)
    assert Surd.sqrt(F(4, 9)) == F(2, 3)
    assert Surd.sqrt(12) == 2 * r3
    assert (1 + r3) * (1 - r3) == -2
    with pytest.raises(ValueError):
        r3 + Surd.sqrt(2)
    assert is_square(F(9, 4)) and not is_square(F(3))


@settings(max_examples=60, deadline=None)
@given(st.fractions(max_denominator=20), st.fractions(max_denominator=20), st.fractions(min_value=0, max_denominator=20))
def test_surd_field_axioms(a, b, q):
    x = Surd(a) + Surd.sqrt(q) * b
    if x:
        assert x * (1 / x) == 1
    assert x - x == 0 and x + 0 == x


# --- gram and PSD


def test_gram_examples():
    k, _ = delta(3)
    assert k.gram(["x1", "x2"]) == [[1, 0], [0, 1]]
    g, _ = shifted_delta(1, 3)
    assert g.gram() == [[2, 1, 1], [1, 2, 1], [1, 1, 2]]
    t, _ = toeplitz_geometric(3)
    assert t.gram() == [[1, F(1, 2), F(1, 4)], [F(1, 2), 1, F(1, 2)], [F(1, 4), F(1, 2), 1]]


def test_check_psd_examples():
    k, _ = delta(3)
    c = check_psd(k)
    assert c.is_psd and c.pivots == [1, 1, 1] and c.rank == 3
    g, _ = shifted_delta(1, 3)
    c = check_psd(g)
    assert c.is_psd and c.pivots == [2, F(3, 2), F(4, 3)]


def test_not_psd_witness():
    k = small_kernel("abc", lambda x, y: 1 if x == y else -1)
    c = check_psd(k)
    assert not c.is_psd
    # oracle: lambda = (1,1,1) evaluates directly to 3 - 6
    assert inner(e("a") + e("b") + e("c"), e("a") + e("b") + e("c"), k) == -3
    assert c.witness.coeffs == {"a": 2, "b": 1, "c": 1}
    assert c.witness_value == -4 == norm2(c.witness, k)


def test_zero_diagonal_next_to_negative_diagonal():
    k = Kernel(points("ab"), [[0, 0], [0, -1]])
    c = check_psd(k)
    assert not c.is_psd and c.witness_value == -1


def test_inner_examples():
    k, _ = delta(2)
    a, b = e("x1"), e("x2")
    assert inner(a, b, k) == 0
    assert inner(a + b, a + b, k) == 2
    g, _ = shifted_delta(1, 2)
    assert inner(a, a + b, g) == 3


def test_rank_examples():
    assert rank(delta(5)[0]) == 5
    assert rank(small_kernel("abcd", lambda x, y: 1)) == 1
    assert rank(shifted_delta(1, 5)[0]) == 5


def test_project_examples():
    k, _ = delta(2)
    a, b = e("x1"), e("x2")
    assert norm2(project(b, [a], k), k) == 0
    assert same_vector(project(a, [a + b], k), (a + b) * F(1, 2), k)
    g, _ = shifted_delta(1, 3)
    gw = adjoin_point(g, "w", {x: 1 for x in g.ids}, 1)
    assert same_vector(project(e("x1"), [e("w")], gw), e("w"), gw)


def test_adjoin_point_examples():
    g, _ = shifted_delta(1, 3)
    assert check_psd(adjoin_point(g, "w", {x: 1 for x in g.ids}, 1)).is_psd
    k, _ = delta(3)
    z = adjoin_point(k, "w", {x: 0 for x in k.ids}, 0)
    assert norm2(e("w"), z) == 0
    with pytest.raises(ExtensionNotPsd) as info:
        adjoin_point(k, "w", {x: 1 for x in k.ids}, 0)
    assert info.value.certificate.witness_value < 0
    with pytest.raises(DuplicateId):
        adjoin_point(k, "x1", {x: 0 for x in k.ids}, 0)


def test_alternating_projection_examples():
    k, _ = delta(3)
    e1, e2, e3 = (e(x) for x in k.ids)
    res = alternating_projections(e1 + e2 + e3, [e1, e2], [e2, e3], k)
    assert res.rounds_used == 1 and same_vector(res.final, e2, k)
    res = alternating_projections(e1 + e3, [e1, e2], [e1, e2], k)
    assert res.rounds_used == 1 and same_vector(res.final, e1, k)
    k2, _ = delta(2)
    # e2 is orthogonal to A, so the first P_A already lands on the intersection
    res = alternating_projections(e("x2"), [e("x1")], [e("x1") + e("x2")], k2)
    assert res.rounds_used == 1 and norm2(res.final, k2) == 0
    # starting from e1 the iterates halve forever
    with pytest.raises(MaxRoundsExceeded) as info:
        alternating_projections(e("x1"), [e("x1")], [e("x1") + e("x2")], k2, max_rounds=5)
    assert norm2(info.value.last, k2) == F(2, 4 ** 6)


def test_intersect_spans_examples():
    k, _ = delta(3)
    e1, e2, e3 = (e(x) for x in k.ids)
    (basis,) = intersect_spans([e1, e2], [e2, e3], k)
    assert span_rank([basis, e2], k) == 1
    assert span_rank(intersect_spans([e1, e2], [e1, e2], k), k) == 2
    assert intersect_spans([e1], [e2], k) == []


def test_verify_embedding_examples():
    k, _ = delta(3)
    assert verify_embedding(k, k, {x: e(x) for x in k.ids}).ok
    src = small_kernel("ab", lambda x, y: int(x == y))
    tgt = small_kernel("cde", lambda x, y: int(x == y))
    assert verify_embedding(src, tgt, {"a": e("c"), "b": e("d")}).ok
    bad = verify_embedding(src, tgt, {"a": e("c"), "b": e("c")})
    assert not bad.ok and bad.failing_pair == ("a", "b")
    with pytest.raises(UnknownPoint):
        verify_embedding(src, tgt, {"a": e("c")})


# --- properties

vectors = st.lists(st.lists(st.integers(-3, 3), min_size=3, max_size=3), min_size=1, max_size=5)


def gram_kernel(vs):
    ids = [f"p{i}" for i in range(len(vs))]
    return Kernel(points(ids), [[F(sum(x * y for x, y in zip(a, b))) for b in vs] for a in vs])


def combo(k, cs):
    return FormalVector({p: F(c) for p, c in zip(k.ids, cs)})


@settings(max_examples=40, deadline=None)
@given(vectors, st.lists(st.integers(-4, 4), min_size=5, max_size=5))
def test_gram_kernels_are_psd_and_norms_nonnegative(vs, cs):
    k = gram_kernel(vs)
    assert check_psd(k).is_psd
    assert norm2(combo(k, cs), k) >= 0


@settings(max_examples=40, deadline=None)
@given(vectors, st.lists(st.integers(-4, 4), min_size=5, max_size=5), st.integers(1, 3))
def test_projection_idempotent_and_residual_orthogonal(vs, cs, m):
    k = gram_kernel(vs)
    v = combo(k, cs)
    span = [e(p) for p in k.ids[:m]]
    p = project(v, span, k)
    assert same_vector(project(p, span, k), p, k)
    r = v - p
    assert all(inner(r, s, k) == 0 for s in span)


@settings(max_examples=40, deadline=None)
@given(vectors, st.lists(st.integers(-2, 2), min_size=5, max_size=5), st.integers(0, 3))
def test_adjoin_increases_rank_by_at_most_one(vs, cs, s):
    k = gram_kernel(vs)
    v = combo(k, cs)
    prof = {p: inner(v, e(p), k) for p in k.ids}
    try:
        ext = adjoin_point(k, "new", prof, norm2(v, k) + s)
    except ExtensionNotPsd:
        return
    assert rank(ext) - rank(k) in (0, 1)


@settings(max_examples=30, deadline=None)
@given(vectors, st.lists(st.integers(-3, 3), min_size=5, max_size=5))
def test_stabilized_alternation_equals_intersection_projection(vs, cs):
    k = gram_kernel(vs)
    v = combo(k, cs)
    a = [e(p) for p in k.ids[: (len(k) + 1) // 2]]
    b = [e(p) for p in k.ids[len(k) // 2:]]
    try:
        res = alternating_projections(v, a, b, k, max_rounds=30)
    except MaxRoundsExceeded:
        return
    assert same_vector(res.final, project(v, intersect_spans(a, b, k), k), k)
