"""Finite permutation groups on labelled domains.

Composition follows function notation: ``(g * h)(x) == g(h(x))``.  Groups
are enumerated by breadth-first closure under the generators, so every
element also comes with a word in the generators.
"""
from __future__ import annotations

import os
import re
from collections import deque
from typing import Iterable, Mapping, Sequence

from .errors import InputError, NotABijection, NotASubgroup, OrderCapExceeded, UnknownPoint

DEFAULT_CAP = 10**6


def default_cap() -> int:
    raw = os.environ.get("HW_GROUP_CAP")
    return int(raw) if raw else DEFAULT_CAP


class Permutation:
    __slots__ = ("images",)

    def __init__(self, images: Sequence[int]):
        images = tuple(images)
        if sorted(images) != list(range(len(images))):
            raise NotABijection(f"not a permutation: {images}")
        self.images = images

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(range(n))

    @classmethod
    def from_mapping(cls, domain: Sequence[str], mapping: Mapping[str, str]) -> "Permutation":
        index = {x: i for i, x in enumerate(domain)}
        images = []
        for x in domain:
            y = mapping.get(x, x)
            if y not in index:
                raise NotABijection(f"{x!r} maps outside the domain ({y!r})")
            images.append(index[y])
        if len(set(images)) != len(images):
            raise NotABijection("mapping is not injective on the domain")
        return cls(images)

    @classmethod
    def from_cycles(cls, text: str, domain: Sequence[str]) -> "Permutation":
        text = text.strip()
        if not re.fullmatch(r"(\(\s*[^()]*\))*", text.replace(" ", "")) and text != "()":
            raise InputError(f"bad cycle notation {text!r}")
        index = {x: i for i, x in enumerate(domain)}
        images = list(range(len(domain)))
        seen = set()
        for body in re.findall(r"\(([^()]*)\)", text):
            labels = body.split()
            for lab in labels:
                if lab not in index:
                    raise UnknownPoint(lab)
                if lab in seen:
                    raise InputError(f"label {lab!r} repeated in {text!r}")
                seen.add(lab)
            for a, b in zip(labels, labels[1:] + labels[:1]):
                images[index[a]] = index[b]
        return cls(images)

    def to_cycles(self, domain: Sequence[str]) -> str:
        seen = set()
        parts = []
        for start in range(len(self.images)):
            if start in seen or self.images[start] == start:
                continue
            cyc = [start]
            seen.add(start)
            j = self.images[start]
            while j != start:
                cyc.append(j)
                seen.add(j)
                j = self.images[j]
            parts.append("(" + " ".join(str(domain[i]) for i in cyc) + ")")
        return "".join(parts) or "()"

    def __call__(self, i: int) -> int:
        return self.images[i]

    def __mul__(self, other: "Permutation") -> "Permutation":
        return Permutation(tuple(self.images[j] for j in other.images))

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.images)
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(inv)

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))

    def order(self) -> int:
        k, g = 1, self
        while not g.is_identity():
            g = g * self
            k += 1
        return k

    def __eq__(self, other):
        return isinstance(other, Permutation) and self.images == other.images

    def __lt__(self, other):
        return self.images < other.images

    def __hash__(self):
        return hash(self.images)

    def __repr__(self):
        return f"Permutation({list(self.images)})"


class PermGroup:
    """Group generated by ``generators`` acting on ``domain`` labels."""

    def __init__(self, domain: Sequence[str], generators: Iterable[Permutation], cap: int | None = None):
        self.domain = tuple(str(x) for x in domain)
        if len(set(self.domain)) != len(self.domain):
            raise InputError("duplicate labels in group domain")
        self.index = {x: i for i, x in enumerate(self.domain)}
        gens = []
        for g in generators:
            if len(g.images) != len(self.domain):
                raise InputError("generator degree does not match the domain")
            if not g.is_identity() and g not in gens:
                gens.append(g)
        self.generators = gens
        self.cap = default_cap() if cap is None else cap
        self._elements = None
        self._words = None

    @classmethod
    def from_cycles(cls, domain: Sequence[str], cycles: Iterable[str], cap: int | None = None) -> "PermGroup":
        domain = [str(x) for x in domain]
        return cls(domain, [Permutation.from_cycles(c, domain) for c in cycles], cap)

    @property
    def degree(self) -> int:
        return len(self.domain)

    def identity(self) -> Permutation:
        return Permutation.identity(self.degree)

    def elements(self) -> list[Permutation]:
        if self._elements is None:
            self._enumerate()
        return self._elements

    def words(self) -> dict:
        if self._words is None:
            self._enumerate()
        return self._words

    def _enumerate(self):
        e = self.identity()
        words = {e: ()}
        queue = deque([e])
        order = [e]
        while queue:
            g = queue.popleft()
            for k, s in enumerate(self.generators):
                h = s * g
                if h not in words:
                    words[h] = (k,) + words[g]
                    order.append(h)
                    if len(order) > self.cap:
                        raise OrderCapExceeded(len(order))
                    queue.append(h)
        self._elements = order
        self._words = words

    def order(self) -> int:
        return len(self.elements())

    def __contains__(self, g: Permutation) -> bool:
        return g in self.words()

    def act(self, g: Permutation, label: str) -> str:
        return self.domain[g(self.index[label])]

    def cycles(self, g: Permutation) -> str:
        return g.to_cycles(self.domain)

    def subgroup(self, elements: Iterable[Permutation]) -> "PermGroup":
        """Subgroup generated by the given elements (greedy small generating set)."""
        gens: list[Permutation] = []
        span = {self.identity()}
        for g in sorted(set(elements)):
            if g not in span:
                gens.append(g)
                span = set(PermGroup(self.domain, gens, self.cap).elements())
        return PermGroup(self.domain, gens, self.cap)

    def is_subgroup_of(self, other: "PermGroup") -> bool:
        return self.domain == other.domain and all(g in other for g in self.generators)

    def __repr__(self):
        return f"PermGroup(degree={self.degree}, generators={[self.cycles(g) for g in self.generators]})"


def symmetric_group(domain: Sequence[str] | int, cap: int | None = None) -> PermGroup:
    if isinstance(domain, int):
        domain = [str(i) for i in range(1, domain + 1)]
    domain = list(domain)
    n = len(domain)
    if n < 2:
        return PermGroup(domain, [], cap)
    gens = ["(" + " ".join(domain[:2]) + ")"]
    if n > 2:
        gens.append("(" + " ".join(domain) + ")")
    return PermGroup.from_cycles(domain, gens, cap)


def cyclic_group(n: int) -> PermGroup:
    domain = [str(i) for i in range(n)]
    return PermGroup(domain, [Permutation([(i + 1) % n for i in range(n)])])


def orbit(group: PermGroup, label: str) -> list[str]:
    if label not in group.index:
        raise UnknownPoint(label)
    seen = {label}
    queue = deque([label])
    while queue:
        x = queue.popleft()
        for g in group.generators:
            y = group.act(g, x)
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return sorted(seen, key=group.index.__getitem__)


def orbits(group: PermGroup) -> list[list[str]]:
    out, seen = [], set()
    for x in group.domain:
        if x not in seen:
            o = orbit(group, x)
            seen.update(o)
            out.append(o)
    return out


def stabilizer(group: PermGroup, label: str) -> PermGroup:
    if label not in group.index:
        raise UnknownPoint(label)
    i = group.index[label]
    return group.subgroup(g for g in group.elements() if g(i) == i)


def setwise_stabilizer(group: PermGroup, block: Iterable[str]) -> PermGroup:
    idx = set()
    for x in block:
        if x not in group.index:
            raise UnknownPoint(x)
        idx.add(group.index[x])
    return group.subgroup(g for g in group.elements() if {g(i) for i in idx} == idx)


def cosets(group: PermGroup, subgroup: PermGroup) -> list[Permutation]:
    """Representatives of the left cosets gK; the first is the identity."""
    if not subgroup.is_subgroup_of(group):
        raise NotASubgroup("subgroup generators are not in the group")
    sub = subgroup.elements()
    covered = set()
    reps = []
    for g in group.elements():  # identity comes first
        if g in covered:
            continue
        reps.append(g)
        covered.update(g * k for k in sub)
    return reps


def coset_decompose(reps: Sequence[Permutation], subgroup: PermGroup, g: Permutation) -> tuple[int, Permutation]:
    """Write g = reps[j] * k with k in the subgroup; return (j, k)."""
    for j, r in enumerate(reps):
        k = r.inverse() * g
        if k in subgroup:
            return j, k
    raise NotASubgroup("element lies in no listed coset")


def is_invariant(kernel, group: PermGroup, extension: Mapping | None = None):
    """True iff every generator preserves the pairing on the acted-on points.

    Returns (ok, witness) where the witness is (generator cycles, x, y).
    """
    for g in group.generators:
        perm = point_map(kernel, group, g, extension)
        ids = list(perm)
        for i, x in enumerate(ids):
            for y in ids[i:]:
                if kernel.pair(perm[x], perm[y]) != kernel.pair(x, y):
                    return False, (group.cycles(g), x, y)
    return True, None


def point_map(kernel, group: PermGroup, g: Permutation, extension: Mapping | None = None) -> dict:
    """Action of g on all kernel points; points outside the domain are fixed."""
    out = {}
    for p in kernel.ids:
        if p in group.index:
            out[p] = group.act(g, p)
        elif extension is not None and (g, p) in extension:
            out[p] = extension[(g, p)]
        else:
            out[p] = p
    return out


def conjugacy_classes(group: PermGroup) -> list[list[Permutation]]:
    """Classes ordered by element order, then by least member."""
    elems = group.elements()
    seen = set()
    classes = []
    for g in elems:
        if g in seen:
            continue
        cls = sorted({h * g * h.inverse() for h in elems})
        seen.update(cls)
        classes.append(cls)
    classes.sort(key=lambda c: (c[0].order(), c[0]))
    return classes


def all_subgroups(group: PermGroup) -> list[PermGroup]:
    """Every subgroup, as the join closure of the cyclic subgroups."""
    elems = group.elements()

    def close(gens):
        return frozenset(PermGroup(group.domain, gens, group.cap).elements())

    cyclic = {close([g]) for g in elems}
    found = set(cyclic)
    frontier = list(cyclic)
    while frontier:
        nxt = []
        for h in frontier:
            for c in cyclic:
                if not c <= h:
                    j = close(list(h | c))
                    if j not in found:
                        found.add(j)
                        nxt.append(j)
        frontier = nxt
    ordered = sorted(found, key=lambda s: (len(s), sorted(s)))
    return [group.subgroup(s) for s in ordered]
