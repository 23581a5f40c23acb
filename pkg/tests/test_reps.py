import random
from fractions import Fraction

import pytest

from hilbertdesk import linalg
from hilbertdesk.fixtures import delta, equivalence, shifted_delta, simplex_blocks
from hilbertdesk.perm import PermGroup, all_subgroups, cyclic_group, symmetric_group
from hilbertdesk.reps import (
    Representation,
    canonical_rep,
    char_inner,
    character,
    commutant_dim,
    coset_rep,
    direct_sum,
    fixed_projection,
    fixed_vectors,
    induce,
    intertwiner,
    is_irreducible,
    local_irreducibility,
    mackey_oracle,
    permutation_rep,
    rational_constituents,
    sign_rep,
    trivial_rep,
)
from hilbertdesk.weaklimit import weak_closure

F = Fraction


def s2_in_s3():
    s3 = symmetric_group(3)
    return s3, s3.subgroup([x for x in s3.elements() if x(2) == 2])


def by_class_size(ch):
    return sorted((len(c), v) for c, v in zip(ch.classes, ch.values))


def test_commutant_examples():
    s3 = symmetric_group(3)
    rep = permutation_rep(s3)
    assert commutant_dim(rep) == 2
    res = is_irreducible(rep)
    assert not res.irreducible
    (line,) = res.invariant_subspace
    assert len(set(line)) == 1 and line[0] != 0
    triv = is_irreducible(trivial_rep(s3))
    assert triv.irreducible and triv.commutant_dim == 1
    rot = Representation(cyclic_group(3), [[[0, -1], [1, -1]]])
    res = is_irreducible(rot)
    assert res.irreducible and res.kind == "complex" and res.commutant_dim == 2


def test_induce_examples():
    s3, s2 = s2_in_s3()
    ind = induce(s3, s2, trivial_rep(s2))
    assert ind.dim == 3
    assert by_class_size(character(ind)) == by_class_size(character(permutation_rep(s3)))
    ind = induce(s3, s2, sign_rep(s2))
    assert commutant_dim(ind) == 2
    assert by_class_size(character(ind)) == [(1, 3), (2, 0), (3, -1)]
    same = induce(s3, s3, permutation_rep(s3))
    assert same.gens == permutation_rep(s3).gens


def test_induced_restriction_contains_sigma_first():
    s3, s2 = s2_in_s3()
    sigma = sign_rep(s2)
    ind = induce(s3, s2, sigma)
    assert ind.coset_reps[0].is_identity()
    for k in s2.elements():
        m = ind.matrix_of(k)
        assert [row[:1] for row in m[:1]] == sigma.matrix_of(k)


def test_character_examples():
    s3 = symmetric_group(3)
    perm = character(permutation_rep(s3))
    assert by_class_size(perm) == [(1, 3), (2, 0), (3, 1)]
    triv = character(trivial_rep(s3))
    assert triv.values == [1, 1, 1] and char_inner(triv, triv) == 1
    assert char_inner(perm, triv) == 1


def test_mackey_examples():
    s3, s2 = s2_in_s3()
    assert not mackey_oracle(s3, s2, trivial_rep(s2)).irreducible
    a3 = s3.subgroup([x for x in s3.elements() if x.order() != 2])
    rot = rational_constituents(coset_rep(a3, PermGroup(a3.domain, [])))
    two = next(r for r in rot if r.dim == 2)
    # over the reals Ind(rotation) is twice the standard rep, so not irreducible
    res = mackey_oracle(s3, a3, two)
    assert not res.irreducible
    assert res.irreducible == is_irreducible(induce(s3, a3, two), extract=False).irreducible
    std = next(r for r in rational_constituents(permutation_rep(s3)) if r.dim == 2)
    assert mackey_oracle(s3, s3, std).irreducible


@pytest.mark.parametrize("name", ["D4", "Q8", "A4"])
def test_mackey_agrees_on_small_groups(name):
    if name == "D4":
        g = PermGroup.from_cycles(["1", "2", "3", "4"], ["(1 2 3 4)", "(1 3)"])
    elif name == "A4":
        g = PermGroup.from_cycles(["1", "2", "3", "4"], ["(1 2 3)", "(1 2)(3 4)"])
    else:
        from hilbertdesk.fixtures import _quaternion

        g = _quaternion()
    for k in all_subgroups(g):
        sigmas = [c for c in rational_constituents(coset_rep(k, PermGroup(k.domain, [])), max_dim=2)]
        ones = [c for c in sigmas if c.dim == 1]
        sigmas += [direct_sum(a, b) for a in ones for b in ones]
        for sigma in sigmas:
            expect = is_irreducible(induce(g, k, sigma), extract=False).irreducible
            assert mackey_oracle(g, k, sigma).irreducible == expect


def test_intertwiner_examples():
    k, g = delta(4)
    cert = intertwiner(k, g)
    assert cert.ok and cert.stabilizer_order == 6
    k, g = equivalence([2, 2])
    cert = intertwiner(k, g)
    assert cert.ok and len(cert.base_block) == 2
    k, g = equivalence([3])
    cert = intertwiner(k, g)
    assert cert.ok and cert.matrix == linalg.identity(3)


def test_fixed_projection_examples():
    k, g = shifted_delta(1, 3)
    cl = weak_closure(k, g)
    rep = canonical_rep(cl.kernel, g, quotient=False)
    lim = [cl.kernel.ids.index("w1")]
    (w,) = fixed_vectors(rep, within=lim)
    assert linalg.quad(rep.gram, w) == 1
    cl = weak_closure(*delta(3))
    rep = canonical_rep(cl.kernel, delta(3)[1], quotient=False)
    assert fixed_vectors(rep, within=[cl.kernel.ids.index("zero")]) == []
    triv = PermGroup(rep.group.domain, [])
    assert fixed_projection(rep, triv) == linalg.identity(rep.dim)


def test_fixed_projection_kills_orbit_differences():
    rep = permutation_rep(symmetric_group(4))
    p = fixed_projection(rep)
    n = rep.dim
    for g in rep.group.generators:
        for i in range(n):
            v = [F(int(r == i)) - F(int(r == g(i))) for r in range(n)]
            assert linalg.matvec(p, v) == [0] * n
    fixed = [F(1)] * n
    assert linalg.matvec(linalg.sub(linalg.identity(n), p), fixed) == [0] * n


def test_local_irreducibility_examples():
    rep = local_irreducibility(*delta(4), "x1")
    assert rep.irreducible and rep.block == ["x1"] and "finite size" in rep.caveat
    rep = local_irreducibility(*simplex_blocks(3), "a")
    assert rep.irreducible and rep.kind == "real"
    k, _ = delta(3)
    rep = local_irreducibility(k, PermGroup(k.ids, []), "x2")
    assert rep.irreducible and rep.stabilizer_order == 1


def test_representations_are_unitary_on_random_words():
    r = random.Random(7)
    for rep in (permutation_rep(symmetric_group(4)), canonical_rep(*simplex_blocks(2))):
        for _ in range(20):
            m = linalg.identity(rep.dim)
            for _ in range(r.randint(1, 8)):
                m = linalg.matmul(r.choice(rep.gens), m)
            assert linalg.matmul(linalg.transpose(m), linalg.matmul(rep.gram, m)) == rep.gram


def test_induced_dimension():
    s4 = symmetric_group(4)
    for k in all_subgroups(s4)[:12]:
        sigma = trivial_rep(k)
        assert induce(s4, k, sigma).dim == s4.order() // k.order()
