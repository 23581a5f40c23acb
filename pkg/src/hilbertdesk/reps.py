"""Exact orthogonal representations of finite permutation groups.

A representation assigns a rational matrix to each generator and carries an
invariant symmetric form (``gram``), so unitarity reads A^T G A == G.
Irreducibility is decided over the reals from the commutant, without
floating point.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import sympy

from . import linalg
from .decomp import check_asymptotic_freedom
from .errors import InconsistentHomomorphism, InputError, NotBlockTransitive, NotFree, NotInvariant
from .kernel import Kernel, check_psd
from .perm import (
    PermGroup,
    Permutation,
    conjugacy_classes,
    coset_decompose,
    cosets,
    setwise_stabilizer,
)


class Representation:
    def __init__(
        self,
        group: PermGroup,
        gens: Sequence[linalg.Matrix],
        gram: linalg.Matrix | None = None,
        labels: Sequence[str] | None = None,
    ):
        if len(gens) != len(group.generators):
            raise InputError("one matrix per group generator is required")
        self.group = group
        self.gens = [linalg.mat(a) for a in gens]
        self.dim = len(self.gens[0]) if self.gens else (len(gram) if gram is not None else 0)
        for a in self.gens:
            if len(a) != self.dim or any(len(r) != self.dim for r in a):
                raise InputError("generator matrices must be square of one size")
        self.labels = list(labels) if labels is not None else [str(i) for i in range(self.dim)]
        self._cache = None
        if gram is None:
            gram = self._averaged_form()
        self.gram = linalg.mat(gram)
        for k, a in enumerate(self.gens):
            if linalg.matmul(linalg.transpose(a), linalg.matmul(self.gram, a)) != self.gram:
                raise NotInvariant(f"generator {k} does not preserve the form")

    def _averaged_form(self):
        total = linalg.zeros(self.dim)
        mats = self.all_matrices()
        for a in mats.values():
            total = linalg.add(total, linalg.matmul(linalg.transpose(a), a))
        return linalg.scale(Fraction(1, len(mats)), total)

    def all_matrices(self) -> dict:
        """Matrix of every group element, checking the homomorphism property."""
        if self._cache is None:
            e = self.group.identity()
            cache = {e: linalg.identity(self.dim)}
            queue = deque([e])
            while queue:
                g = queue.popleft()
                for s, a in zip(self.group.generators, self.gens):
                    h = s * g
                    m = linalg.matmul(a, cache[g])
                    if h in cache:
                        if cache[h] != m:
                            raise InconsistentHomomorphism(f"two words for {self.group.cycles(h)} disagree")
                    else:
                        cache[h] = m
                        queue.append(h)
            self._cache = cache
        return self._cache

    def matrix_of(self, g: Permutation) -> linalg.Matrix:
        try:
            return self.all_matrices()[g]
        except KeyError:
            raise InputError("element is not in the group") from None

    def restrict(self, sub: PermGroup) -> "Representation":
        return Representation(sub, [self.matrix_of(g) for g in sub.generators], self.gram, self.labels)

    def to_json(self):
        return {
            "kind": "representation",
            "group": _group_json(self.group),
            "matrices": [[[str(x) for x in row] for row in a] for a in self.gens],
            "gram": [[str(x) for x in row] for row in self.gram],
            "labels": self.labels,
        }

    def __repr__(self):
        return f"Representation(dim={self.dim}, order={self.group.order()})"


def _group_json(group: PermGroup):
    return {"domain": list(group.domain), "generators": [group.cycles(g) for g in group.generators]}


def trivial_rep(group: PermGroup) -> Representation:
    return Representation(group, [[[1]] for _ in group.generators], [[1]])


def _parity(g: Permutation) -> int:
    seen, sign = set(), 1
    for i in range(len(g.images)):
        if i in seen:
            continue
        j, length = i, 0
        while j not in seen:
            seen.add(j)
            j = g(j)
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def sign_rep(group: PermGroup) -> Representation:
    return Representation(group, [[[_parity(g)]] for g in group.generators], [[1]])


def permutation_rep(group: PermGroup) -> Representation:
    n = group.degree
    mats = []
    for g in group.generators:
        a = linalg.zeros(n)
        for i in range(n):
            a[g(i)][i] = Fraction(1)
        mats.append(a)
    return Representation(group, mats, linalg.identity(n), group.domain)


def character_rep(group: PermGroup, values: dict) -> Representation:
    """One-dimensional real representation from generator values in {1, -1}."""
    return Representation(group, [[[values[k]]] for k in range(len(group.generators))], [[1]])


def direct_sum(a: Representation, b: Representation) -> Representation:
    if a.group is not b.group and a.group.generators != b.group.generators:
        raise InputError("direct sum needs the same group")

    def block(x, y):
        n, m = len(x), len(y)
        out = linalg.zeros(n + m)
        for i in range(n):
            out[i][:n] = x[i]
        for i in range(m):
            out[n + i][n:] = y[i]
        return out

    return Representation(a.group, [block(x, y) for x, y in zip(a.gens, b.gens)], block(a.gram, b.gram))


def subrepresentation(rep: Representation, basis: Sequence[Sequence[Fraction]]) -> Representation:
    """Restriction to an invariant subspace given by a basis (columns)."""
    b = [list(v) for v in basis]
    bt = linalg.transpose(b)  # dim x k
    gram = [[linalg.quad(rep.gram, u, v) for v in b] for u in b]
    mats = []
    for a in rep.gens:
        cols = []
        for v in b:
            img = linalg.matvec(a, v)
            c = linalg.solve(bt, img)
            if c is None:
                raise NotInvariant("subspace is not invariant")
            cols.append(c)
        mats.append(linalg.transpose(cols))
    return Representation(rep.group, mats, gram)


# ---------------------------------------------------------------------------
# Canonical representation of a kernel


def _coordinate_matrices(kernel: Kernel, group: PermGroup):
    from .weaklimit import extend_action

    full = extend_action(kernel, group)
    ids = kernel.ids
    pos = {p: i for i, p in enumerate(ids)}
    mats = []
    for g in full.generators:
        a = linalg.zeros(len(ids))
        for p in ids:
            a[pos[full.act(g, p)]][pos[p]] = Fraction(1)
        mats.append(a)
    return mats


def canonical_rep(kernel: Kernel, group: PermGroup, quotient: bool = True) -> Representation:
    """pi(g) sends the vector of x to the vector of g x.

    With ``quotient`` the action is written on the GNS space, in the basis of
    the first maximal independent set of points; otherwise on coordinates.
    """
    mats = _coordinate_matrices(kernel, group)
    if not quotient:
        return Representation(group, mats, kernel.gram(), kernel.ids)
    qm, gbb, labels = _quotient_matrices(kernel, mats)
    return Representation(group, qm, gbb, labels)


def _quotient_matrices(kernel: Kernel, mats: list):
    ids = kernel.ids
    g = kernel.gram()
    basis = linalg.rref(g)[1]
    gbb = [[g[i][j] for j in basis] for i in basis]
    qm = []
    for a in mats:
        cols = []
        for b in basis:
            img = next(i for i in range(len(ids)) if a[i][b] == 1)
            cols.append(linalg.solve(gbb, [g[i][img] for i in basis]))
        qm.append(linalg.transpose(cols))
    return qm, gbb, [ids[i] for i in basis]


# ---------------------------------------------------------------------------
# Commutant and irreducibility


def commutant(rep: Representation) -> list:
    return linalg.commutator_nullspace(rep.gens, rep.dim)


def commutant_dim(rep: Representation) -> int:
    return len(commutant(rep))


@dataclass
class IrreducibilityReport:
    irreducible: bool
    kind: str | None            # "real", "complex", "quaternionic" when irreducible
    commutant_dim: int
    invariant_subspace: list | None = None
    note: str = ""

    def to_json(self):
        return {
            "verdict": "Irreducible" if self.irreducible else "Reducible",
            "kind": self.kind,
            "commutant_dim": self.commutant_dim,
            "invariant_subspace": None
            if self.invariant_subspace is None
            else [[str(x) for x in v] for v in self.invariant_subspace],
            "note": self.note,
        }


def _trace_form_negative_definite(basis: list, dim: int) -> bool:
    """tr(X^2) < 0 on the trace-free part of the commutant."""
    trfree = []
    for x in basis:
        t = linalg.trace(x) / dim
        trfree.append(linalg.sub(x, linalg.scale(t, linalg.identity(dim))))
    flat = [[v for row in x for v in row] for x in trfree]
    keep = linalg.column_space_basis(flat)
    xs = [trfree[i] for i in keep]
    if not xs:
        return True
    b = [[-linalg.trace(linalg.matmul(x, y)) for y in xs] for x in xs]
    cert = check_psd(Kernel.from_function([str(i) for i in range(len(xs))], lambda i, j: b[int(i)][int(j)]))
    return cert.is_psd and cert.rank == len(xs)


def is_irreducible(rep: Representation, extract: bool = True) -> IrreducibilityReport:
    """Real irreducibility through the commutant algebra C.

    The representation is irreducible exactly when C is a division algebra,
    which for a semisimple real algebra is the same as tr(X^2) being negative
    definite on trace-free X.  The dimension of C then gives the type.
    """
    if rep.dim == 0:
        raise InputError("zero-dimensional representation")
    basis = commutant(rep)
    m = len(basis)
    if m == 1 or (m in (2, 4) and _trace_form_negative_definite(basis, rep.dim)):
        kind = {1: "real", 2: "complex", 4: "quaternionic"}[m]
        return IrreducibilityReport(True, kind, m)
    sub, note = (None, "")
    if extract:
        sub, note = _invariant_subspace(rep, basis)
    return IrreducibilityReport(False, None, m, sub, note)


def _minimal_poly(x: linalg.Matrix):
    n = len(x)
    powers = [linalg.identity(n)]
    flat = [[v for row in powers[0] for v in row]]
    while True:
        nxt = linalg.matmul(powers[-1], x)
        f = [v for row in nxt for v in row]
        # solve sum c_i P_i = P_k
        cols = linalg.transpose(flat)
        c = linalg.solve(cols, f)
        if c is not None:
            t = sympy.Symbol("t")
            coeffs = [-sympy.Rational(ci.numerator, ci.denominator) for ci in c]
            return sympy.Poly(t ** len(c) + sum(ci * t**i for i, ci in enumerate(coeffs)), t)
        powers.append(nxt)
        flat.append(f)


def _poly_at(poly, x):
    n = len(x)
    out = linalg.zeros(n)
    for c in poly.all_coeffs():
        out = linalg.add(linalg.matmul(out, x), linalg.scale(Fraction(int(c.p), int(c.q)), linalg.identity(n)))
    return out


def _invariant_subspace(rep, basis):
    n = rep.dim
    cands = [x for x in basis if not _is_scalar(x)]
    for i in range(len(cands)):
        for j in range(i + 1, len(cands)):
            cands.append(linalg.add(cands[i], linalg.scale(j + 1, cands[j])))
            if len(cands) > 40:
                break
    best = None
    for x in cands:
        p = _minimal_poly(x)
        _, factors = sympy.factor_list(p.as_expr(), p.gens[0])
        if len(factors) == 1 and factors[0][1] == 1:
            continue
        for f, _ in factors:
            ker = linalg.nullspace(_poly_at(sympy.Poly(f, p.gens[0]), x), n)
            if 0 < len(ker) < n and (best is None or len(ker) < len(best)):
                best = ker
        if best is not None and len(best) == 1:
            break
    if best is None:
        return None, "commutant elements split only over an extension of Q"
    # sanity: invariant under every generator
    bt = linalg.transpose(best)
    for a in rep.gens:
        for v in best:
            if linalg.solve(bt, linalg.matvec(a, v)) is None:
                raise AssertionError("extracted subspace is not invariant")
    return best, ""


def _is_scalar(x):
    n = len(x)
    return all(x[i][j] == (x[0][0] if i == j else 0) for i in range(n) for j in range(n))


def rational_constituents(rep: Representation, max_dim: int | None = None) -> list:
    """Split into subrepresentations that have no rational invariant subspace.

    ``max_dim`` keeps only the constituents of at most that dimension.
    """
    rep_irr = is_irreducible(rep)
    if rep_irr.irreducible or rep_irr.invariant_subspace is None:
        parts = [rep]
    else:
        w = rep_irr.invariant_subspace
        comp = _orthogonal_complement(rep, w)
        parts = rational_constituents(subrepresentation(rep, w)) + rational_constituents(subrepresentation(rep, comp))
    return [p for p in parts if max_dim is None or p.dim <= max_dim]


def _orthogonal_complement(rep, w):
    gw = [linalg.matvec(rep.gram, v) for v in w]
    return linalg.nullspace(gw, rep.dim)


# ---------------------------------------------------------------------------
# Induction and intertwiners


class InducedRep(Representation):
    subgroup: PermGroup
    sigma: Representation
    coset_reps: list


def induce(group: PermGroup, subgroup: PermGroup, sigma: Representation) -> InducedRep:
    """Ind_K^G sigma on the direct sum over coset representatives.

    For a generator s and representative g_i, write s g_i = g_j k; the block
    in position (j, i) is sigma(k).
    """
    reps = cosets(group, subgroup)
    d = sigma.dim
    n = len(reps)
    mats = []
    for s in group.generators:
        a = linalg.zeros(n * d)
        for i, gi in enumerate(reps):
            j, k = coset_decompose(reps, subgroup, s * gi)
            blk = sigma.matrix_of(k)
            for r in range(d):
                for c in range(d):
                    a[j * d + r][i * d + c] = blk[r][c]
        mats.append(a)
    gram = linalg.zeros(n * d)
    for i in range(n):
        for r in range(d):
            for c in range(d):
                gram[i * d + r][i * d + c] = sigma.gram[r][c]
    labels = [f"{group.cycles(g)}|{sigma.labels[r]}" for g in reps for r in range(d)]
    out = InducedRep.__new__(InducedRep)
    Representation.__init__(out, group, mats, gram, labels)
    out.subgroup, out.sigma, out.coset_reps = subgroup, sigma, reps
    return out


@dataclass
class IntertwinerCertificate:
    matrix: list
    coset_reps: list
    base_block: list
    stabilizer_order: int
    unitary_residual_zero: bool
    equivariance_residual_zero: bool
    bijective: bool

    @property
    def ok(self) -> bool:
        return self.unitary_residual_zero and self.equivariance_residual_zero and self.bijective

    def to_json(self):
        return {
            "ok": self.ok,
            "base_block": self.base_block,
            "stabilizer_order": self.stabilizer_order,
            "coset_reps": self.coset_reps,
            "unitary_residual_zero": self.unitary_residual_zero,
            "equivariance_residual_zero": self.equivariance_residual_zero,
            "bijective": self.bijective,
            "matrix": [[str(x) for x in row] for row in self.matrix],
        }


def intertwiner(kernel: Kernel, group: PermGroup) -> IntertwinerCertificate:
    """Exact isomorphism between the canonical representation and Ind_K^G(sigma).

    K is the setwise stabilizer of the block of the first point and sigma the
    action of K on that block.  U sends g_i (x) e_x to e_{g_i x}.
    """
    free = check_asymptotic_freedom(kernel)
    if not free.free:
        raise NotFree(free.reason)
    first = next(p for p in kernel.ids if p in group.index)
    base = next(b for b in free.blocks if first in b)
    for b in free.blocks:
        reach = any({group.act(g, x) for x in base} == set(b) for g in group.elements())
        if not reach:
            raise NotBlockTransitive(f"no group element maps {base} onto {b}")
    k = setwise_stabilizer(group, base)
    sub = kernel.restrict(base)
    # one block matrix per generator of K, including those acting trivially on the block
    bpos = {x: r for r, x in enumerate(base)}
    sigma_coords = []
    for gen in k.generators:
        a = linalg.zeros(len(base))
        for x in base:
            a[bpos[group.act(gen, x)]][bpos[x]] = Fraction(1)
        sigma_coords.append(a)
    sigma_k = Representation(k, sigma_coords, sub.gram(), base)
    ind = induce(group, k, sigma_k)
    ids = kernel.ids
    pos = {p: i for i, p in enumerate(ids)}
    n, d = len(ids), len(base)
    u = linalg.zeros(n, len(ind.coset_reps) * d)
    hit = []
    for i, gi in enumerate(ind.coset_reps):
        for r, x in enumerate(base):
            tgt = pos[group.act(gi, x)]
            u[tgt][i * d + r] = Fraction(1)
            hit.append(tgt)
    can = canonical_rep(kernel, group, quotient=False)
    g = kernel.gram()
    unit = linalg.matmul(linalg.transpose(u), linalg.matmul(g, u)) == ind.gram
    equi = all(
        linalg.matmul(u, a) == linalg.matmul(b, u) for a, b in zip(ind.gens, can.gens)
    )
    return IntertwinerCertificate(
        u,
        [group.cycles(x) for x in ind.coset_reps],
        list(base),
        k.order(),
        unit,
        equi,
        sorted(hit) == list(range(n)),
    )


# ---------------------------------------------------------------------------
# Characters and Mackey


@dataclass
class ClassFunction:
    group: PermGroup
    classes: list      # lists of elements
    values: list

    def value(self, g: Permutation):
        for c, v in zip(self.classes, self.values):
            if g in c:
                return v
        raise InputError("element not in group")

    def to_json(self):
        return {
            "classes": [self.group.cycles(c[0]) for c in self.classes],
            "sizes": [len(c) for c in self.classes],
            "values": [str(v) for v in self.values],
        }


def character(rep: Representation) -> ClassFunction:
    classes = conjugacy_classes(rep.group)
    return ClassFunction(rep.group, classes, [linalg.trace(rep.matrix_of(c[0])) for c in classes])


def char_inner(a: ClassFunction, b: ClassFunction) -> Fraction:
    order = sum(len(c) for c in a.classes)
    return sum((len(c) * x * b.value(c[0]) for c, x in zip(a.classes, a.values)), Fraction(0)) / order


@dataclass
class MackeyResult:
    irreducible: bool
    reason: str
    witness: str | None = None

    def to_json(self):
        return {"irreducible": self.irreducible, "reason": self.reason, "witness": self.witness}


REAL_IRREDUCIBLE = {(1, 1), (2, 0), (4, -2)}  # (<psi,psi>, Frobenius-Schur sum): real, complex, quaternionic


def _real_irreducible(norm, nu) -> bool:
    return (norm, nu) in REAL_IRREDUCIBLE


def mackey_oracle(group: PermGroup, subgroup: PermGroup, sigma: Representation) -> MackeyResult:
    """Character-only irreducibility test for Ind_K^G sigma over the reals.

    <Ind chi, Ind chi> is the Mackey sum of <chi, chi^g> over K meet gKg^-1
    for one g per double coset.  A real character psi belongs to an
    irreducible real representation exactly when (<psi,psi>, nu(psi)) is
    (1,1), (2,0) or (4,-2), nu being the Frobenius-Schur sum
    (1/|G|) sum psi(g^2).  For absolutely irreducible sigma this is the
    classical disjointness test; the other two cases cover sigma of complex
    or quaternionic type.  No commutant is computed here.
    """
    kel = subgroup.elements()
    kset = set(kel)
    chi = {h: linalg.trace(m) for h, m in sigma.all_matrices().items()}
    e = sum((chi[h] * chi[h] for h in kel), Fraction(0)) / len(kel)
    nu_k = sum((chi[h * h] for h in kel), Fraction(0)) / len(kel)
    if not _real_irreducible(e, nu_k):
        return MackeyResult(False, "sigma is reducible")
    # Mackey sum over double cosets K g K with g outside K
    seen, twist, witness = set(), Fraction(0), None
    for g in group.elements():
        if g in seen:
            continue
        dc = {a * g * b for a in kel for b in kel}
        seen |= dc
        if g in kset:
            continue
        gi = g.inverse()
        h = [x for x in kel if gi * x * g in kset]
        ip = sum((chi[x] * chi[gi * x * g] for x in h), Fraction(0)) / len(h)
        if ip and witness is None:
            witness = group.cycles(g)
        twist += ip
    norm = e + twist
    # induced character, then its Frobenius-Schur sum
    elems = group.elements()
    psi = {}
    for x in elems:
        tot = Fraction(0)
        for g in elems:
            y = g.inverse() * x * g
            if y in kset:
                tot += chi[y]
        psi[x] = tot / len(kel)
    nu = sum((psi[x * x] for x in elems), Fraction(0)) / len(elems)
    if _real_irreducible(norm, nu):
        if twist == 0:
            return MackeyResult(True, "sigma irreducible and all twists disjoint")
        return MackeyResult(True, f"twists overlap but <psi,psi>={norm}, nu={nu} is an irreducible real type", witness)
    return MackeyResult(False, f"<psi,psi>={norm}, nu={nu}: a twist shares a constituent", witness)


def fixed_projection(rep: Representation, subgroup: PermGroup | None = None) -> linalg.Matrix:
    """Average of rho(k) over the subgroup: the projection onto its fixed vectors."""
    sub = rep.group if subgroup is None else subgroup
    elems = sub.elements()
    total = linalg.zeros(rep.dim)
    for k in elems:
        total = linalg.add(total, rep.matrix_of(k))
    p = linalg.scale(Fraction(1, len(elems)), total)
    if linalg.matmul(p, p) != p:
        raise AssertionError("averaging operator is not idempotent")
    if linalg.matmul(linalg.transpose(p), rep.gram) != linalg.matmul(rep.gram, p):
        raise AssertionError("averaging operator is not self-adjoint")
    return p


def fixed_vectors(rep: Representation, subgroup: PermGroup | None = None, within: Sequence[int] | None = None) -> list:
    """Nonzero-norm fixed vectors obtained by averaging the chosen basis vectors."""
    p = fixed_projection(rep, subgroup)
    cols = range(rep.dim) if within is None else within
    vs = [[p[r][c] for r in range(rep.dim)] for c in cols]
    vs = [v for v in vs if linalg.quad(rep.gram, v) != 0]
    if not vs:
        return []
    g = [[linalg.quad(rep.gram, a, b) for b in vs] for a in vs]
    return [vs[i] for i in linalg.rref(g)[1]]


@dataclass
class LocalReport:
    irreducible: bool
    kind: str | None
    block: list
    stabilizer_order: int
    caveat: str

    def to_json(self):
        return {
            "verdict": "Irreducible" if self.irreducible else "Reducible",
            "kind": self.kind,
            "block": self.block,
            "stabilizer_order": self.stabilizer_order,
            "caveat": self.caveat,
        }


CAVEAT = (
    "verdict concerns the action of the block stabilizer on the block span; "
    "at finite size the global canonical representation may still split off "
    "invariant vectors that vanish in the infinite limit"
)


def local_irreducibility(kernel: Kernel, group: PermGroup, point: str) -> LocalReport:
    free = check_asymptotic_freedom(kernel)
    block = next(b for b in free.blocks if point in b)
    k = setwise_stabilizer(group, block)
    sub = kernel.restrict(block)
    pos = {x: i for i, x in enumerate(sub.ids)}
    mats = []
    # one matrix per generator of k, including those fixing the block pointwise
    for g in k.generators:
        a = linalg.zeros(len(sub.ids))
        for x in sub.ids:
            a[pos[group.act(g, x)]][pos[x]] = Fraction(1)
        mats.append(a)
    qm, gbb, labels = _quotient_matrices(sub, mats)
    sigma_k = Representation(k, qm, gbb, labels)
    rep = is_irreducible(sigma_k, extract=False)
    return LocalReport(rep.irreducible, rep.kind, list(block), k.order(), CAVEAT)


def rational_irreducible_characters(group: PermGroup) -> tuple[list, list]:
    """Characters of the irreducible rational representations, up to scale.

    Computed from the primitive idempotents of the centre of Q[G], found by
    factoring the minimal polynomial of a separating class-sum combination.
    Returns (classes, list of value lists).
    """
    classes = conjugacy_classes(group)
    m = len(classes)
    where = {}
    for i, c in enumerate(classes):
        for g in c:
            where[g] = i
    # structure constants: C_i C_j = sum_k a[i][j][k] C_k
    a = [[[0] * m for _ in range(m)] for _ in range(m)]
    for i, ci in enumerate(classes):
        for j, cj in enumerate(classes):
            counts = [0] * m
            for x in ci:
                for y in cj:
                    counts[where[x * y]] += 1
            for k in range(m):
                a[i][j][k] = Fraction(counts[k], len(classes[k]))
    t = sympy.Symbol("t")
    for attempt in range(1, 50):
        coef = [Fraction((attempt * (i + 1) ** 2) % 97 + i) for i in range(m)]
        lt = linalg.zeros(m)
        for i in range(m):
            for j in range(m):
                for k in range(m):
                    lt[k][j] += coef[i] * a[i][j][k]
        p = _minimal_poly(lt)
        if p.degree() == m:
            break
    else:
        raise AssertionError("no separating element found")
    _, factors = sympy.factor_list(p.as_expr(), t)
    chars = []
    e0 = [Fraction(int(i == 0)) for i in range(m)]
    for f, _ in factors:
        rest = sympy.quo(p.as_expr(), f, t)
        inv = sympy.invert(rest, f, t)
        u = sympy.Poly(sympy.rem(sympy.expand(rest * inv), p.as_expr(), t), t)
        coeffs = linalg.matvec(_poly_at(u, lt), e0)
        chars.append(coeffs)
    return classes, chars


def coset_rep(group: PermGroup, subgroup: PermGroup) -> Representation:
    """Permutation representation of ``group`` on the left cosets of ``subgroup``."""
    reps = cosets(group, subgroup)
    gens = []
    for g in group.generators:
        a = linalg.zeros(len(reps))
        for i, r in enumerate(reps):
            j, _ = coset_decompose(reps, subgroup, g * r)
            a[j][i] = Fraction(1)
        gens.append(a)
    return Representation(group, gens, linalg.identity(len(reps)))
