"""Orthogonal decomposition of a weak closure along its type classes."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from . import linalg
from .errors import DeskError, NotNested
from .kernel import (
    FormalVector,
    Kernel,
    in_span,
    inner,
    gram_of,
    is_null,
    project,
    project_out,
    rank,
    same_vector,
)
from .perm import PermGroup, orbits
from .weaklimit import Closure, extend_action, limit_order, weak_closure


@dataclass
class TypeClass:
    id: str
    members: list
    self_value: Fraction

    def to_json(self):
        return {"id": self.id, "members": list(self.members), "self": str(self.self_value)}


@dataclass
class FreedomVerdict:
    free: bool
    blocks: list
    reason: str

    def to_json(self):
        return {"free": self.free, "blocks": self.blocks, "reason": self.reason}


@dataclass
class Component:
    index: int
    source_class: str
    sources: list          # point ids whose projections generate the block
    vectors: list          # FormalVectors, one per source
    gram: list
    rank: int
    freedom: FreedomVerdict

    def to_json(self):
        return {
            "index": self.index,
            "source_class": self.source_class,
            "generators": {s: v.to_json() for s, v in zip(self.sources, self.vectors)},
            "gram": [[str(x) for x in row] for row in self.gram],
            "rank": self.rank,
            "free_blocks": self.freedom.blocks,
            "free": self.freedom.free,
        }


@dataclass
class DecompositionReport:
    classes: list
    components: list
    cross_orthogonal: bool
    cross_witness: tuple | None
    rank_sum: int
    closure_rank: int
    notes: list = field(default_factory=list)

    @property
    def span_complete(self) -> bool:
        return self.rank_sum == self.closure_rank

    @property
    def dims(self) -> list:
        return [c.rank for c in self.components]

    def to_json(self):
        return {
            "classes": [c.to_json() for c in self.classes],
            "components": [c.to_json() for c in self.components],
            "cross_orthogonal": self.cross_orthogonal,
            "cross_witness": list(self.cross_witness) if self.cross_witness else None,
            "rank_sum": self.rank_sum,
            "closure_rank": self.closure_rank,
            "span_complete": self.span_complete,
            "notes": list(self.notes),
        }


def _refine_colors(kernel: Kernel) -> dict:
    """Colour refinement on the complete weighted graph of the kernel."""
    ids = kernel.ids
    color = {p: (kernel.point(p).sort, kernel.point(p).limit, kernel.pair(p, p)) for p in ids}
    while True:
        sig = {
            p: (color[p], tuple(sorted((repr(color[q]), kernel.pair(p, q)) for q in ids if q != p)))
            for p in ids
        }
        canon = {s: i for i, s in enumerate(sorted(set(sig.values()), key=repr))}
        new = {p: canon[sig[p]] for p in ids}
        if len(set(new.values())) == len(set(color.values())):
            return new
        color = new


def enumerate_type_classes(closure: Closure, group: PermGroup | None = None) -> list[TypeClass]:
    """Type classes of the closure, ordered bottom-up.

    With a group the classes are orbits (the action is carried to limit points
    by profile transport); without one they are colour-refinement classes.
    Classes are topologically sorted by the limit order, ties broken by
    descending self value (coarser classes of an exported system first) and
    then by earliest member.
    """
    kernel = closure.kernel
    pos = {p: i for i, p in enumerate(kernel.ids)}
    if group is not None:
        full = extend_action(kernel, group)
        groups = [sorted(o, key=pos.__getitem__) for o in orbits(full)]
    else:
        col = _refine_colors(kernel)
        by = {}
        for p in kernel.ids:
            by.setdefault(col[p], []).append(p)
        groups = list(by.values())
    order = limit_order(closure)
    groups.sort(key=lambda g: pos[g[0]])
    classes = [TypeClass(f"T{i}", g, kernel.pair(g[0], g[0])) for i, g in enumerate(groups)]
    below = {
        c.id: {d.id for d in classes if d is not c and any(order.lt(x, y) for x in d.members for y in c.members)}
        for c in classes
    }
    out, done = [], set()
    while len(out) < len(classes):
        ready = [c for c in classes if c.id not in done and below[c.id] <= done]
        if not ready:
            raise DeskError("type classes are not ordered consistently")
        ready.sort(key=lambda c: (-c.self_value, pos[c.members[0]]))
        out.append(ready[0])
        done.add(ready[0].id)
    return out


def check_asymptotic_freedom(
    kernel: Kernel,
    vectors: Sequence[FormalVector] | None = None,
    labels: Sequence[str] | None = None,
    declared: Mapping[str, str | None] | None = None,
) -> FreedomVerdict:
    """Blocks of the nonzero-pairing graph, and whether each is declared bounded.

    Without vectors the kernel points themselves are used, with their
    ``bounded_block`` fields as the declaration.
    """
    if vectors is None:
        labels = kernel.ids
        vectors = [FormalVector.basis(p) for p in labels]
        declared = {p: kernel.point(p).bounded_block for p in labels}
    labels = list(labels) if labels is not None else [str(i) for i in range(len(vectors))]
    declared = declared or {}
    g = gram_of(list(vectors), kernel)
    n = len(labels)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if g[i][j] != 0:
                parent[find(i)] = find(j)
    comp = {}
    for i in range(n):
        comp.setdefault(find(i), []).append(labels[i])
    blocks = sorted(comp.values(), key=lambda b: labels.index(b[0]))
    for b in blocks:
        if len(b) == 1:
            continue
        tags = {declared.get(x) for x in b}
        if len(tags) != 1 or None in tags:
            return FreedomVerdict(False, blocks, f"block {b} is not inside one declared bounded block")
    return FreedomVerdict(True, blocks, "every block is a singleton or a declared bounded block")


def orthogonalize_types(closure: Closure, classes: Sequence[TypeClass]) -> DecompositionReport:
    """Project each class off the span of all earlier classes.

    Zero-norm projections are dropped and Gram-equal duplicates merged.  The
    report certifies cross-orthogonality and that the block ranks add up to
    the rank of the closure.
    """
    kernel = closure.kernel
    earlier: list[FormalVector] = []
    comps: list[Component] = []
    for cls in classes:
        srcs, vecs = [], []
        for p in cls.members:
            q = project_out(FormalVector.basis(p), earlier, kernel)
            if is_null(q, kernel) or any(same_vector(q, v, kernel) for v in vecs):
                continue
            srcs.append(p)
            vecs.append(q)
        earlier.extend(FormalVector.basis(p) for p in cls.members)
        if not vecs:
            continue
        g = gram_of(vecs, kernel)
        declared = {p: kernel.point(p).bounded_block for p in srcs}
        free = check_asymptotic_freedom(kernel, vecs, srcs, declared)
        comps.append(Component(len(comps), cls.id, srcs, vecs, g, linalg.rank(g), free))
    witness = None
    for i, a in enumerate(comps):
        for b in comps[i + 1:]:
            for sa, va in zip(a.sources, a.vectors):
                for sb, vb in zip(b.sources, b.vectors):
                    if witness is None and inner(va, vb, kernel) != 0:
                        witness = (a.index, sa, b.index, sb)
    total = sum(c.rank for c in comps)
    return DecompositionReport(list(classes), comps, witness is None, witness, total, rank(kernel))


def decompose(kernel_or_closure, group: PermGroup | None = None, depth: int = 3, **kw) -> DecompositionReport:
    closure = kernel_or_closure
    if isinstance(kernel_or_closure, Kernel):
        closure = weak_closure(kernel_or_closure, depth=depth, **kw)
    classes = enumerate_type_classes(closure, group)
    return orthogonalize_types(closure, classes)


# ---------------------------------------------------------------------------
# Independence and commuting projections


@dataclass
class IndependenceResult:
    independent: bool
    via_c: FormalVector
    via_b: FormalVector


def check_independence(a: FormalVector, span_b, span_c, kernel: Kernel) -> IndependenceResult:
    """Is P_C a equal to P_B a, for span B inside span C?"""
    for v in span_b:
        if not in_span(v, span_c, kernel):
            raise NotNested(f"{v} is not in the larger span")
    pc = project(a, span_c, kernel)
    pb = project(a, span_b, kernel)
    return IndependenceResult(same_vector(pc, pb, kernel), pc, pb)


@dataclass
class CommutationResult:
    ok: bool
    witness: FormalVector | None = None


def commutation_check(span_a, span_b, kernel: Kernel, tests: Sequence[FormalVector] | None = None) -> CommutationResult:
    """P_B P_A v == P_A P_B v == P_{A and B} v on every test vector."""
    from .kernel import intersect_spans

    if tests is None:
        tests = [FormalVector.basis(p) for p in kernel.ids]
    meet = intersect_spans(span_a, span_b, kernel)
    for v in tests:
        ab = project(project(v, span_a, kernel), span_b, kernel)
        ba = project(project(v, span_b, kernel), span_a, kernel)
        direct = project(v, meet, kernel)
        if not (same_vector(ab, ba, kernel) and same_vector(ab, direct, kernel)):
            return CommutationResult(False, v)
    return CommutationResult(True)


# ---------------------------------------------------------------------------
# Growth probe


@dataclass
class GrowthReport:
    family: str
    sizes: list
    max_block: list
    bounded: bool

    def to_json(self):
        return {
            "family": self.family,
            "sizes": self.sizes,
            "max_block": self.max_block,
            "verdict": "Free" if self.bounded else "NotFree",
        }


def scaling_growth_probe(family: str, sizes: Sequence[int], **params) -> GrowthReport:
    """Largest nonzero-pairing block of a kernel family at several sizes.

    A block size that has stopped growing over the second half of the sizes
    is the finite proxy for asymptotic freedom; growth means not free.
    """
    from .fixtures import kernel_family

    out = []
    for n in sizes:
        k = kernel_family(family, n=n, **params)
        blocks = check_asymptotic_freedom(k).blocks
        out.append(max(len(b) for b in blocks))
    half = out[len(out) // 2:]
    return GrowthReport(family, list(sizes), out, len(set(half)) == 1)


# ---------------------------------------------------------------------------
# Isometries between decompositions


@dataclass
class IsometryResult:
    found: bool
    mapping: dict = field(default_factory=dict)     # source point -> FormalVector over the target closure
    scales: list = field(default_factory=list)      # per component: Gram ratio r (target = r * source)
    pairing: list = field(default_factory=list)     # per component: source generator -> target generator
    check: object = None
    reason: str = ""

    def to_json(self):
        return {
            "found": self.found,
            "scales": [str(r) for r in self.scales],
            "pairing": self.pairing,
            "mapping": {k: {p: str(c) for p, c in v.items()} for k, v in self.mapping.items()},
            "verified": bool(self.check) if self.check is not None else False,
            "reason": self.reason,
        }


def _match_gram(ga, gb):
    """Bijection s and ratio r with gb[s i][s j] == r * ga[i][j], or None."""
    n = len(ga)
    if len(gb) != n:
        return None
    if n == 0:
        return [], Fraction(1)
    r = gb[0][0] / ga[0][0] if ga[0][0] else None
    assign: list = []

    def ok(i, j, r):
        return gb[assign[i]][assign[j]] == r * ga[i][j]

    def rec(i, r):
        if i == n:
            return r
        for cand in range(n):
            if cand in assign:
                continue
            rr = r
            if rr is None:
                if ga[i][i] == 0:
                    continue
                rr = gb[cand][cand] / ga[i][i]
            assign.append(cand)
            if rr > 0 and all(ok(i, j, rr) and ok(j, i, rr) for j in range(i + 1)):
                out = rec(i + 1, rr)
                if out is not None:
                    return out
            assign.pop()
        return None

    r = rec(0, None)
    return (list(assign), r) if r is not None else None


def isometry_search(a: "DecompositionReport", b: "DecompositionReport", ka: Kernel, kb: Kernel) -> IsometryResult:
    """Look for an isometry of closures that respects the decompositions.

    Components are paired in order.  Inside a pair, generators are matched so
    that the target Gram is a positive rational multiple r of the source
    Gram; the source generator then goes to the target one divided by
    sqrt(r), which lives in Q(sqrt r).  Every closure point is written as
    the sum of its component projections and sent accordingly; the result is
    checked with verify_embedding.
    """
    from .kernel import verify_embedding
    from .surd import Surd

    if len(a.components) != len(b.components):
        return IsometryResult(False, reason="different numbers of components")
    images: dict = {p: FormalVector() for p in ka.ids}
    scales, pairing = [], []
    for ca, cb in zip(a.components, b.components):
        m = _match_gram(ca.gram, cb.gram)
        if m is None:
            return IsometryResult(False, reason=f"components {ca.index} and {cb.index} are not proportional")
        s, r = m
        scales.append(r)
        pairing.append({ca.sources[i]: cb.sources[s[i]] for i in range(len(s))})
        inv = 1 / Surd.sqrt(r)
        for p in ka.ids:
            rhs = [inner(FormalVector.basis(p), q, ka) for q in ca.vectors]
            if not any(rhs):
                continue
            coef = linalg.solve(ca.gram, rhs)
            img = images[p]
            for i, c in enumerate(coef):
                if c:
                    img = img + cb.vectors[s[i]] * (c * inv)
            images[p] = img
    chk = verify_embedding(ka, kb, images)
    return IsometryResult(bool(chk), images, scales, pairing, chk, "" if chk else f"pair {chk.failing_pair} fails")
