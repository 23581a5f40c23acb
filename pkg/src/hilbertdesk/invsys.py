"""Finite inverse systems of finite measure spaces.

A system is a set of E-classes (finite sets of elements with a probability
measure), partially ordered so that finer classes sit higher, together with
sorts: down-closed collections of classes.  A class shared by several sorts
is stored once, so the bijective copy of a class in a larger sort is the
class itself.

The L2 inner product of two elements is the measure of their common
refinement ``x v y``: the elements of the least class above both that lie
above x and above y.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Iterable, Mapping, Sequence

from . import linalg
from .decomp import Component, check_asymptotic_freedom
from .errors import (
    ActionInvalid,
    DuplicateId,
    IncomparableWithoutJoin,
    InputError,
    NotClosedUnderJoin,
    NotClosedUnderMeet,
    NotNormal,
    UnknownPoint,
    ValidationFailed,
    ValidationRequired,
)
from .kernel import FormalVector, Kernel, Point, gram_of, inner, is_null, project, project_out, rank, same_vector
from .perm import PermGroup, Permutation, conjugacy_classes


class InverseSystem:
    def __init__(
        self,
        classes: Mapping[str, Sequence[str]],
        sorts: Sequence[tuple[str, Sequence[str]]],
        measure: Mapping[str, object],
        order: Iterable[tuple[str, str]],
    ):
        self.classes = {c: tuple(es) for c, es in classes.items()}
        self.class_ids = list(self.classes)
        self.sorts = [(s, tuple(cs)) for s, cs in sorts]
        self.elem_class: dict[str, str] = {}
        for c, es in self.classes.items():
            for e in es:
                if e in self.elem_class:
                    raise DuplicateId(f"element {e!r} appears in two classes")
                self.elem_class[e] = c
        for s, cs in self.sorts:
            for c in cs:
                if c not in self.classes:
                    raise UnknownPoint(f"sort {s!r} lists unknown class {c!r}")
        self.measure = {}
        for e in self.elem_class:
            if e not in measure:
                raise InputError(f"element {e!r} has no measure")
            self.measure[e] = Fraction(measure[e])
        self.edges = set()
        for x, y in order:
            if x not in self.elem_class or y not in self.elem_class:
                raise UnknownPoint(f"order edge ({x}, {y}) names an unknown element")
            self.edges.add((x, y))
        self.coset_sets: dict = {}      # element -> frozenset of group elements, for group systems
        self.group: PermGroup | None = None
        self._up = None
        self._cleq: dict = {}
        self._validated = None

    # -- order helpers ----------------------------------------------------

    def up(self, x: str) -> set:
        """Elements y with x <= y (reflexive-transitive closure of the edges)."""
        if self._up is None:
            succ: dict[str, list] = {e: [] for e in self.elem_class}
            for a, b in self.edges:
                succ[a].append(b)
            up = {}
            for e in self.elem_class:
                seen = {e}
                stack = [e]
                while stack:
                    for n in succ[stack.pop()]:
                        if n not in seen:
                            seen.add(n)
                            stack.append(n)
                up[e] = seen
            self._up = up
        return self._up[x]

    def leq(self, x: str, y: str) -> bool:
        return y in self.up(x)

    def class_leq(self, a: str, b: str) -> bool:
        if a == b:
            return True
        key = (a, b)
        if key not in self._cleq:
            bs = set(self.classes[b])
            self._cleq[key] = any(self.up(x) & bs for x in self.classes[a])
        return self._cleq[key]

    def class_lt(self, a: str, b: str) -> bool:
        return a != b and self.class_leq(a, b)

    def proj(self, y: str, a: str) -> str | None:
        """The unique element of class a below y, if there is exactly one."""
        below = [x for x in self.classes[a] if self.leq(x, y)]
        return below[0] if len(below) == 1 else None

    def join_class(self, a: str, b: str) -> str | None:
        ups = [c for c in self.class_ids if self.class_leq(a, c) and self.class_leq(b, c)]
        least = [c for c in ups if all(self.class_leq(c, d) for d in ups)]
        return least[0] if len(least) == 1 else None

    def meet_class(self, a: str, b: str) -> str | None:
        downs = [c for c in self.class_ids if self.class_leq(c, a) and self.class_leq(c, b)]
        great = [c for c in downs if all(self.class_leq(d, c) for d in downs)]
        return great[0] if len(great) == 1 else None

    def elem_join(self, xs: Sequence[str], cls: str | None = None) -> list:
        """x1 v ... v xn: elements of the join class lying above every xi."""
        if cls is None:
            cls = self.elem_class[xs[0]]
            for x in xs[1:]:
                cls = self.join_class(cls, self.elem_class[x])
                if cls is None:
                    raise IncomparableWithoutJoin(f"no join class above {xs}")
        return [w for w in self.classes[cls] if all(self.leq(x, w) for x in xs)]

    def mu(self, elems: Iterable[str]) -> Fraction:
        return sum((self.measure[e] for e in elems), Fraction(0))

    def topo_classes(self) -> list[str]:
        """Classes ordered coarse to fine, ties by declaration order."""
        out, done = [], set()
        while len(out) < len(self.class_ids):
            for c in self.class_ids:
                if c not in done and all(d in done for d in self.class_ids if self.class_lt(d, c)):
                    out.append(c)
                    done.add(c)
                    break
            else:
                raise InputError("class order has a cycle")
        return out

    def elements(self) -> list[str]:
        return [e for c in self.topo_classes() for e in self.classes[c]]

    def sort_sizes(self) -> list[int]:
        return [max(len(self.classes[c]) for c in cs) for _, cs in self.sorts]

    def to_json(self) -> dict:
        return {
            "kind": "invsys",
            "classes": [{"id": c, "elements": list(es)} for c, es in self.classes.items()],
            "sorts": [{"id": s, "classes": list(cs)} for s, cs in self.sorts],
            "measure": {e: str(self.measure[e]) for c in self.classes for e in self.classes[c]},
            "order": sorted([a, b] for a, b in self.edges),
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "InverseSystem":
        try:
            classes = {c["id"]: c["elements"] for c in data["classes"]}
            sorts = [(s["id"], s["classes"]) for s in data["sorts"]]
            return cls(classes, sorts, data["measure"], [tuple(e) for e in data["order"]])
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed inverse system: {exc}") from exc

    def with_measure(self, changes: Mapping[str, object]) -> "InverseSystem":
        m = dict(self.measure)
        m.update({k: Fraction(v) for k, v in changes.items()})
        new = InverseSystem(self.classes, self.sorts, m, self.edges)
        new.coset_sets, new.group = self.coset_sets, self.group
        return new


# ---------------------------------------------------------------------------
# Validation


@dataclass
class AxiomResult:
    axiom: str
    ok: bool
    witness: object = None

    def to_json(self):
        return {"axiom": self.axiom, "ok": self.ok, "witness": _jsonable(self.witness)}


def _jsonable(w):
    if w is None:
        return None
    if isinstance(w, (list, tuple)):
        return [_jsonable(x) for x in w]
    if isinstance(w, Fraction):
        return str(w)
    return w


@dataclass
class ValidationReport:
    results: list
    sort_sizes: list

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def axiom(self, name: str) -> AxiomResult:
        return next(r for r in self.results if r.axiom == name)

    def first_failure(self):
        for r in self.results:
            if not r.ok:
                return f"axiom {r.axiom}: {r.witness}"
        return None

    def to_json(self):
        return {
            "ok": self.ok,
            "sort_sizes": self.sort_sizes,
            "axioms": [r.to_json() for r in self.results],
        }


AXIOMS = ("1", "2", "2a", "2b", "3", "4a", "4b", "5", "6", "7")


def validate(sys: InverseSystem) -> ValidationReport:
    """Check the inverse-system axioms and 2-regularity, with witnesses."""
    res = []

    def add(name, witness):
        res.append(AxiomResult(name, witness is None, witness))

    # (1) finite nonempty classes, every class in some sort
    w = None
    for c, es in sys.classes.items():
        if not es:
            w = ("empty class", c)
            break
    in_sort = {c for _, cs in sys.sorts for c in cs}
    if w is None:
        loose = [c for c in sys.class_ids if c not in in_sort]
        if loose:
            w = ("class in no sort", loose[0])
    if w is None and not sys.sorts:
        w = ("no sorts",)
    add("1", w)

    # (2) antisymmetry, within-class order is trivial
    w = None
    for x in sys.elem_class:
        for y in sys.up(x):
            if x != y and (sys.leq(y, x) or sys.elem_class[x] == sys.elem_class[y]):
                w = ("order relation", x, y)
                break
        if w:
            break
    if w is None:
        for a, b in combinations(sys.class_ids, 2):
            if sys.class_leq(a, b) and sys.class_leq(b, a):
                w = ("classes below each other", a, b)
                break
    add("2", w)

    # (2a) relation between comparable classes is a surjection from the finer one
    w = None
    for a in sys.class_ids:
        for b in sys.class_ids:
            if not sys.class_lt(a, b):
                continue
            for y in sys.classes[b]:
                below = [x for x in sys.classes[a] if sys.leq(x, y)]
                if len(below) != 1:
                    w = ("not a function", b, a, y, len(below))
                    break
            if w is None:
                for x in sys.classes[a]:
                    if not any(sys.leq(x, y) for y in sys.classes[b]):
                        w = ("not onto", b, a, x)
                        break
            if w:
                break
        if w:
            break
    add("2a", w)

    # (2b) no class is a bijective copy of another
    w = None
    for a in sys.class_ids:
        for b in sys.class_ids:
            if sys.class_lt(a, b) and len(sys.classes[a]) == len(sys.classes[b]):
                w = ("bijective copy", a, b)
                break
        if w:
            break
    add("2b", w)

    # (3) sorts are down-closed
    w = None
    for s, cs in sys.sorts:
        for c in cs:
            for d in sys.class_ids:
                if d not in cs and sys.class_lt(d, c):
                    w = ("sort not down-closed", s, d, c)
                    break
            if w:
                break
        if w:
            break
    add("3", w)

    # (4a) meets inside each sort
    w = None
    for s, cs in sys.sorts:
        for a, b in combinations(cs, 2):
            lows = [d for d in cs if sys.class_leq(d, a) and sys.class_leq(d, b)]
            if not any(all(sys.class_leq(e, d) for e in lows) for d in lows):
                w = ("no meet", s, a, b)
                break
        if w:
            break
    add("4a", w)

    # (4b) for any two sorts, a sort containing both with all joins
    w = None
    for (si, ci), (sj, cj) in combinations(sys.sorts, 2):
        ok = False
        for sk, ck in sys.sorts:
            if not (set(ci) | set(cj)) <= set(ck):
                continue
            if all(_has_least(sys, ck, a, b) for a in ci for b in cj):
                ok = True
                break
        if not ok:
            w = ("no joining sort", si, sj)
            break
    if w is None:
        for s, cs in sys.sorts:
            bad = next(((a, b) for a in cs for b in cs if not _has_least(sys, cs, a, b)), None)
            if bad:
                w = ("no join inside sort", s) + bad
                break
    add("4b", w)

    # (5) probability measures
    w = None
    for c, es in sys.classes.items():
        bad = [e for e in es if not 0 <= sys.measure[e] <= 1]
        if bad:
            w = ("measure out of range", bad[0], sys.measure[bad[0]])
            break
        total = sys.mu(es)
        if total != 1:
            w = ("class measure does not sum to 1", c, total)
            break
    add("5", w)

    # (6) coherence under pullback
    w = None
    for a in sys.class_ids:
        for b in sys.class_ids:
            if not sys.class_lt(a, b):
                continue
            for x in sys.classes[a]:
                fibre = sys.mu(y for y in sys.classes[b] if sys.leq(x, y))
                if fibre != sys.measure[x]:
                    w = ("pullback measure", x, b, sys.measure[x], fibre)
                    break
            if w:
                break
        if w:
            break
    add("6", w)

    add("7", _regularity_witness(sys) if all(r.ok for r in res) else ("skipped: earlier axiom failed",))
    return ValidationReport(res, sys.sort_sizes())


def _has_least(sys, cs, a, b):
    ups = [d for d in cs if sys.class_leq(a, d) and sys.class_leq(b, d)]
    return any(all(sys.class_leq(d, e) for e in ups) for d in ups)


def _regularity_witness(sys):
    for s, cs in sys.sorts:
        for a, b in combinations(cs, 2):
            j = sys.join_class(a, b)
            m = sys.meet_class(a, b)
            if j is None or m is None:
                return ("missing join or meet", a, b)
            for x in sys.classes[a]:
                for y in sys.classes[b]:
                    ws = sys.elem_join([x, y], j)
                    if not ws:
                        continue
                    z = sys.proj(x, m)
                    if sys.measure[z] == 0:
                        continue
                    lhs = sys.mu(ws)
                    rhs = sys.measure[x] * sys.measure[y] / sys.measure[z]
                    if lhs != rhs:
                        return ("2-regularity", x, y, lhs, rhs)
    return None


def require_valid(sys: InverseSystem) -> ValidationReport:
    if sys._validated is None:
        sys._validated = validate(sys)
    if not sys._validated.ok:
        raise ValidationRequired(sys._validated.first_failure())
    return sys._validated


# ---------------------------------------------------------------------------
# Builders


def _is_normal(group: PermGroup, sub: frozenset) -> bool:
    return all(g * n * g.inverse() in sub for g in group.generators for n in sub)


def _family(group: PermGroup, subgroups: Sequence[PermGroup], names):
    sets = [frozenset(h.elements()) for h in subgroups]
    names = list(names) if names else [f"N{i}" for i in range(len(sets))]
    if len(names) != len(sets):
        raise InputError("one name per subgroup")
    gset = set(group.elements())
    for nm, s in zip(names, sets):
        if not s <= gset:
            raise InputError(f"{nm} is not inside the group")
        if not _is_normal(group, s):
            raise NotNormal(nm)
    uniq = {}
    for nm, s in zip(names, sets):
        uniq.setdefault(s, nm)
    if len(uniq) != len(sets):
        raise DuplicateId("subgroup listed twice")
    for (na, a), (nb, b) in combinations(zip(names, sets), 2):
        if a & b not in uniq:
            raise NotClosedUnderJoin(f"{na} and {nb}: intersection missing (join of sorts)")
        prod_set = frozenset(x * y for x in a for y in b)
        if prod_set not in uniq:
            raise NotClosedUnderMeet(f"{na} and {nb}: product missing (meet of classes)")
    return sets, names


def _coset_label(coset):
    m = min(coset)
    return ",".join(str(i) for i in m.images)


def from_subgroup_family(
    group: PermGroup,
    subgroups: Sequence[PermGroup],
    names: Sequence[str] | None = None,
    labeler=None,
) -> InverseSystem:
    """One class G/N per normal subgroup N, elements the cosets of N.

    The sort attached to N holds the classes G/N' for N' containing N.  A
    coset xN' sits below yN when N is inside N' and yN is inside xN'.
    """
    sets, names = _family(group, subgroups, names)
    elems = group.elements()
    classes, measure, cosets_of = {}, {}, {}
    for nm, s in zip(names, sets):
        seen, cos = set(), []
        for g in elems:
            if g in seen:
                continue
            c = frozenset(g * n for n in s)
            seen |= c
            cos.append(c)
        cos.sort(key=min)
        cid = f"G/{nm}"
        ids = []
        for k, c in enumerate(cos):
            eid = f"{cid}:{labeler(nm, c) if labeler else k}"
            ids.append(eid)
            measure[eid] = Fraction(len(c), len(elems))
            cosets_of[eid] = c
        classes[cid] = ids
    sorts = []
    for nm, s in zip(names, sets):
        cs = [f"G/{n2}" for n2, s2 in zip(names, sets) if s <= s2]
        sorts.append((f"S[{nm}]", cs))
    order = []
    for (n1, s1), (n2, s2) in product(zip(names, sets), repeat=2):
        if s1 < s2:  # G/n2 is coarser
            for y in classes[f"G/{n1}"]:
                for x in classes[f"G/{n2}"]:
                    if cosets_of[y] <= cosets_of[x]:
                        order.append((x, y))
    sys = InverseSystem(classes, sorts, measure, order)
    sys.coset_sets = cosets_of
    sys.group = group
    return sys


def conjugacy_system(
    group: PermGroup,
    subgroups: Sequence[PermGroup],
    names: Sequence[str] | None = None,
) -> InverseSystem:
    """Classes are the conjugacy classes of the quotients G/N.

    An element is stored as the union of the cosets in one conjugacy class
    of G/N, so the order is reverse inclusion of subsets of G.  The result
    is validated; a failure is raised, never silently kept.
    """
    sets, names = _family(group, subgroups, names)
    elems = group.elements()
    classes, measure, subsets = {}, {}, {}
    for nm, s in zip(names, sets):
        seen, parts = set(), []
        for g in elems:
            if g in seen:
                continue
            part = frozenset(h * g * h.inverse() * n for h in elems for n in s)
            seen |= part
            parts.append(part)
        parts.sort(key=lambda p: (len(p), min(p)))
        cid = f"C(G/{nm})"
        ids = []
        for k, p in enumerate(parts):
            eid = f"{cid}:{k}"
            ids.append(eid)
            measure[eid] = Fraction(len(p), len(elems))
            subsets[eid] = p
        classes[cid] = ids
    sorts = [(f"S[{nm}]", [f"C(G/{n2})" for n2, s2 in zip(names, sets) if s <= s2]) for nm, s in zip(names, sets)]
    order = []
    for (n1, s1), (n2, s2) in product(zip(names, sets), repeat=2):
        if s1 < s2:
            for y in classes[f"C(G/{n1})"]:
                for x in classes[f"C(G/{n2})"]:
                    if subsets[y] <= subsets[x]:
                        order.append((x, y))
    sys = InverseSystem(classes, sorts, measure, order)
    sys.coset_sets = subsets
    sys.group = group
    report = validate(sys)
    if not report.ok:
        raise ValidationFailed(report)
    sys._validated = report
    return sys


def group_action(sys: InverseSystem) -> PermGroup:
    """Left translation by the generating group on every element."""
    if sys.group is None:
        raise InputError("system was not built from a group")
    domain = sys.elements()
    index = {frozenset(v): k for k, v in sys.coset_sets.items()}
    gens = []
    for g in sys.group.generators:
        mapping = {}
        for e in domain:
            img = frozenset(g * x for x in sys.coset_sets[e])
            if img not in index:
                raise ActionInvalid(f"translation does not preserve {e!r}")
            mapping[e] = index[img]
        gens.append(Permutation.from_mapping(domain, mapping))
    return PermGroup(domain, gens)


# ---------------------------------------------------------------------------
# L2 structure


def l2_pair(sys: InverseSystem, x: str, y: str) -> Fraction:
    cx, cy = sys.elem_class[x], sys.elem_class[y]
    j = sys.join_class(cx, cy)
    if j is None:
        raise IncomparableWithoutJoin(f"{cx} and {cy} have no join")
    return sys.mu(sys.elem_join([x, y], j))


def l2_gram(sys: InverseSystem, elements: Sequence[str] | None = None) -> list:
    elements = sys.elements() if elements is None else list(elements)
    for e in elements:
        if e not in sys.elem_class:
            raise UnknownPoint(e)
    return [[l2_pair(sys, x, y) for y in elements] for x in elements]


def export_kernel(sys: InverseSystem) -> Kernel:
    ids = sys.elements()
    pts = [Point(e, sort=sys.elem_class[e], bounded_block=sys.elem_class[e]) for e in ids]
    return Kernel(pts, l2_gram(sys, ids))


@dataclass
class L2Decomposition:
    class_order: list
    components: list        # one Component per class with a nonzero block
    dims: dict              # class id -> block dimension (zeros included)
    cross_orthogonal: bool
    cross_witness: tuple | None
    total: int
    rank: int

    @property
    def dim_list(self) -> list:
        return [self.dims[c] for c in self.class_order if self.dims[c]]

    def to_json(self):
        return {
            "class_order": self.class_order,
            "dims": [self.dims[c] for c in self.class_order],
            "components": [c.to_json() for c in self.components],
            "cross_orthogonal": self.cross_orthogonal,
            "cross_witness": list(self.cross_witness) if self.cross_witness else None,
            "total": self.total,
            "rank": self.rank,
        }


def decompose_l2(sys: InverseSystem) -> L2Decomposition:
    """Block for class a: its elements projected off the span of all classes below a."""
    require_valid(sys)
    k = export_kernel(sys)
    order = sys.topo_classes()
    comps, dims = [], {}
    for a in order:
        below = [FormalVector.basis(e) for b in order if sys.class_lt(b, a) for e in sys.classes[b]]
        srcs, vecs = [], []
        for e in sys.classes[a]:
            q = project_out(FormalVector.basis(e), below, k)
            if not is_null(q, k):
                srcs.append(e)
                vecs.append(q)
        g = gram_of(vecs, k)
        r = linalg.rank(g) if vecs else 0
        dims[a] = r
        if r:
            free = check_asymptotic_freedom(k, vecs, srcs, {s: a for s in srcs})
            comps.append(Component(len(comps), a, srcs, vecs, g, r, free))
    witness = None
    for i, ca in enumerate(comps):
        for cb in comps[i + 1:]:
            for sa, va in zip(ca.sources, ca.vectors):
                for sb, vb in zip(cb.sources, cb.vectors):
                    if witness is None and inner(va, vb, k) != 0:
                        witness = (ca.source_class, sa, cb.source_class, sb)
    total = sum(dims.values())
    return L2Decomposition(order, comps, dims, witness is None, witness, total, rank(k))


# ---------------------------------------------------------------------------
# Conditional expectations


@dataclass
class CondExp:
    target: str
    ambient: str
    basis: list
    matrix: list

    def apply(self, f: Sequence[Fraction]) -> list:
        return linalg.matvec(self.matrix, f)


def cond_exp(sys: InverseSystem, a: str, ambient: str) -> CondExp:
    """Conditional expectation onto the functions of class a, on H(ambient)."""
    if not sys.class_leq(a, ambient):
        raise InputError(f"{a} is not below {ambient}")
    basis = list(sys.classes[ambient])
    pi = {y: sys.proj(y, a) for y in basis}
    m = [
        [sys.measure[y] / sys.measure[pi[y]] if pi[y] == pi[y2] else Fraction(0) for y in basis]
        for y2 in basis
    ]
    return CondExp(a, ambient, basis, m)


@dataclass
class CommuteResult:
    ok: bool
    witness: str | None = None
    ambient: str | None = None
    meet: str | None = None


def commute_check(sys: InverseSystem, a: str, b: str, vectors: Sequence[Sequence] | None = None) -> CommuteResult:
    """E_a E_b == E_b E_a == E_{a meet b} on H(a join b)."""
    c = sys.join_class(a, b)
    m = sys.meet_class(a, b)
    if c is None or m is None:
        raise IncomparableWithoutJoin(f"{a} and {b} lack a join or meet")
    ea, eb, em = (cond_exp(sys, x, c).matrix for x in (a, b, m))
    basis = list(sys.classes[c])
    if vectors is None:
        tests = [(y, [Fraction(int(y == z)) for z in basis]) for y in basis]
    else:
        tests = [(f"v{i}", [Fraction(x) for x in v]) for i, v in enumerate(vectors)]
    for label, v in tests:
        ab = linalg.matvec(ea, linalg.matvec(eb, v))
        ba = linalg.matvec(eb, linalg.matvec(ea, v))
        direct = linalg.matvec(em, v)
        if not (ab == ba == direct):
            return CommuteResult(False, label, c, m)
    return CommuteResult(True, None, c, m)


# ---------------------------------------------------------------------------
# Weak limits, products, regularity


@dataclass
class PairLimit:
    vector: FormalVector
    coefficient: Fraction
    meet: str | None
    self_value: Fraction
    profile_agrees: bool = True

    def to_json(self):
        return {
            "vector": self.vector.to_json(),
            "coefficient": str(self.coefficient),
            "meet": self.meet,
            "self": str(self.self_value),
            "profile_agrees": self.profile_agrees,
        }


def _element_meet(sys: InverseSystem, x0: str, x1: str):
    """Finest element lying below both x0 and x1, or None."""
    a, b = sys.elem_class[x0], sys.elem_class[x1]
    best = None
    for c in sys.class_ids:
        if not (sys.class_leq(c, a) and sys.class_leq(c, b)):
            continue
        z = sys.proj(x0, c)
        if z is None or z != sys.proj(x1, c):
            continue
        if best is None or sys.class_leq(sys.elem_class[best], c):
            best = z
    return best


def weak_limit_pair(sys: InverseSystem, x0: str, x1: str) -> PairLimit:
    """Limit of the indiscernible sequence started by x0, x1.

    The limit is (mu(x0 v x1) / mu(x0)) times the common coarsening of x0 and
    x1.  The result is cross-checked against the majority-profile limit on
    every element lying below the common coarsening class.
    """
    from .weaklimit import limit_profile

    require_valid(sys)
    k = export_kernel(sys)
    if x0 == x1:
        return PairLimit(FormalVector.basis(x0), Fraction(1), x0, sys.measure[x0])
    lam = k.pair(x0, x1)
    if k.pair(x0, x0) != k.pair(x1, x1):
        from .errors import NotExtendable

        raise NotExtendable(f"{x0} and {x1} have different self values")
    z = _element_meet(sys, x0, x1)
    m = sys.elem_class[z] if z else None
    if lam == 0 or z is None:
        w = FormalVector()
        coef = Fraction(0)
    else:
        coef = lam / sys.measure[x0]
        w = FormalVector.basis(z) * coef
    ctx = [e for c in sys.class_ids if m and sys.class_leq(c, m) for e in sys.classes[c]]
    tp = limit_profile(k, [x0, x1], ctx)
    agrees = all(inner(w, FormalVector.basis(y), k) == v for y, v in tp.profile.items())
    # Disjoint pairs below a common element have no infinite continuation
    # (disjoint sets of equal positive measure cannot accumulate inside z),
    # so only the formula's zero vector is returned and agreement is reported.
    if lam and not agrees:
        raise AssertionError("pair limit disagrees with the majority profile")
    selfv = inner(w, w, k)
    if selfv != lam or inner(w, FormalVector.basis(x0), k) != lam:
        raise AssertionError("pair limit violates the limit identities")
    return PairLimit(w, coef, z if coef else None, selfv, agrees)


@dataclass
class ProductCheck:
    hypothesis: bool
    holds: bool | None
    lhs: list | None = None
    rhs: list | None = None
    ambient: str | None = None


def _lift(sys, event_elems: Iterable[str], cls: str, ambient: str) -> list:
    ev = set(event_elems)
    for e in ev:
        if sys.elem_class.get(e) != cls:
            raise InputError(f"{e} is not an element of {cls}")
    return [Fraction(int(sys.proj(y, cls) in ev)) for y in sys.classes[ambient]]


def product_formula_check(
    sys: InverseSystem, phi: Iterable[str], a: str, psi: Iterable[str], b: str, c: str
) -> ProductCheck:
    """Product formula E_c(1_phi 1_psi) == E_c(1_phi) E_c(1_psi).

    Hypothesis: phi is independent from H(b) over H(c) and psi from H(a) over
    H(c), i.e. conditioning on the other class is the same as conditioning
    on c.  Checked on the ambient class a join b.
    """
    d = sys.join_class(a, b)
    if d is None:
        raise IncomparableWithoutJoin(f"{a} and {b} have no join")
    if not (sys.class_leq(c, a) and sys.class_leq(c, b)):
        raise InputError(f"{c} is not below both classes")
    f = _lift(sys, phi, a, d)
    g = _lift(sys, psi, b, d)
    ec, ea, eb = (cond_exp(sys, x, d) for x in (c, a, b))
    hyp = eb.apply(f) == ec.apply(f) and ea.apply(g) == ec.apply(g)
    if not hyp:
        return ProductCheck(False, None, ambient=d)
    lhs = ec.apply([x * y for x, y in zip(f, g)])
    rhs = [x * y for x, y in zip(ec.apply(f), ec.apply(g))]
    return ProductCheck(True, lhs == rhs, lhs, rhs, d)


@dataclass
class RegularityViolation:
    elements: tuple
    meet: str
    lhs: Fraction
    rhs: Fraction

    def to_json(self):
        return {"elements": list(self.elements), "meet": self.meet, "lhs": str(self.lhs), "rhs": str(self.rhs)}


def regularity_probe(sys: InverseSystem, n: int) -> list[RegularityViolation]:
    """n-regularity: mu(x1 v ... v xn) == prod mu(xi) / mu(z)^(n-1).

    Tuples range over elements of n distinct classes of one sort whose
    pairwise meets are a single common element z.
    """
    if n < 2:
        raise InputError("n must be at least 2")
    found = {}
    for _, cs in sys.sorts:
        for combo in combinations(cs, n):
            meets = {sys.meet_class(a, b) for a, b in combinations(combo, 2)}
            if None in meets:
                continue
            for xs in product(*(sys.classes[c] for c in combo)):
                zs, ok = set(), True
                for x, y in combinations(xs, 2):
                    mc = sys.meet_class(sys.elem_class[x], sys.elem_class[y])
                    zx = sys.proj(x, mc)
                    if zx is None or zx != sys.proj(y, mc):
                        ok = False
                        break
                    zs.add(zx)
                if not ok or len(zs) != 1:
                    continue
                z = zs.pop()
                if sys.measure[z] == 0:
                    continue
                lhs = sys.mu(sys.elem_join(list(xs)))
                rhs = Fraction(1)
                for x in xs:
                    rhs *= sys.measure[x]
                rhs /= sys.measure[z] ** (n - 1)
                if lhs != rhs:
                    found[xs] = RegularityViolation(xs, z, lhs, rhs)
    # coarsest tuples first, so the simplest witnesses lead the list
    size = lambda xs: (sum(len(sys.classes[sys.elem_class[x]]) for x in xs), xs)
    return [found[k] for k in sorted(found, key=size)]


# ---------------------------------------------------------------------------
# Strong germs


@dataclass
class GermResult:
    measure_constant: bool
    pair_constant: bool
    projection_matches_average: bool
    norm2: Fraction
    orbit: list
    invariant_dim: int

    @property
    def ok(self):
        return self.measure_constant and self.pair_constant and self.projection_matches_average

    def to_json(self):
        return {
            "measure_constant": self.measure_constant,
            "pair_constant": self.pair_constant,
            "projection_matches_average": self.projection_matches_average,
            "norm2": str(self.norm2),
            "orbit": self.orbit,
            "invariant_dim": self.invariant_dim,
        }


def _check_action(sys: InverseSystem, group: PermGroup):
    for g in group.generators:
        img = {e: group.act(g, e) for e in group.domain}
        for c, es in sys.classes.items():
            targets = {sys.elem_class[img[e]] for e in es}
            if len(targets) != 1 or len(sys.classes[targets.pop()]) != len(es):
                raise ActionInvalid(f"{group.cycles(g)} does not map {c} onto a class")
        for e in group.domain:
            if sys.measure[img[e]] != sys.measure[e]:
                raise ActionInvalid(f"{group.cycles(g)} does not preserve the measure of {e}")
        for x in group.domain:
            for y in sys.up(x):
                if not sys.leq(img[x], img[y]):
                    raise ActionInvalid(f"{group.cycles(g)} does not preserve the order")


def strong_germ_check(sys: InverseSystem, group: PermGroup, event: str) -> GermResult:
    """Averaging identities for the orbit of an event under a system automorphism group.

    V0 is spanned by the indicators of the group orbits on the finest class.
    The projection of the event onto V0 is compared with the average of its
    orbit, which is the finite counterpart of integrating over the parameter.
    """
    require_valid(sys)
    if set(group.domain) != set(sys.elem_class):
        raise ActionInvalid("the group must act on every element of the system")
    _check_action(sys, group)
    cls = sys.elem_class[event]
    top = cls
    for c in sys.class_ids:
        j = sys.join_class(top, c)
        if j is not None:
            top = j
    from .perm import orbit, orbits

    atoms = list(sys.classes[top])
    orb_sets = [o for o in orbits(group) if set(o) <= set(atoms)]
    k = export_kernel(sys)
    v0 = [FormalVector({e: 1 for e in o}) for o in orb_sets]
    ev_orbit = orbit(group, event)

    def lift(e):
        c = sys.elem_class[e]
        return FormalVector({y: 1 for y in atoms if sys.proj(y, c) == e})

    phi = lift(event)
    measure_ok = all(
        len({inner(lift(e), z, k) for e in ev_orbit}) == 1 for z in v0
    )
    pair_vals = set()
    for e1, e2 in combinations(ev_orbit, 2):
        c1, c2 = sys.elem_class[e1], sys.elem_class[e2]
        if c1 != c2 and sys.join_class(c1, c2):
            pair_vals.add(inner(lift(e1), lift(e2), k))
    pair_ok = len(pair_vals) <= 1
    p = project(phi, v0, k)
    avg = FormalVector()
    for e in ev_orbit:
        avg = avg + lift(e) * Fraction(1, len(ev_orbit))
    match = same_vector(p, avg, k) and inner(p, p, k) == inner(avg, avg, k)
    return GermResult(measure_ok, pair_ok, match, inner(p, p, k), ev_orbit, len(v0))
