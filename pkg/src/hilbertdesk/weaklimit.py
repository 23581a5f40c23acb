"""Weak limits of indiscernible chains and the weak closure of a kernel.

A chain is a tuple of distinct points whose Gram matrix is constant: one
self value on the diagonal and one value off it.  Its limit is a new point
whose pairing with each context point is the value taken by a strict
majority of the chain, and whose self value is the off-diagonal value.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .errors import (
    AmbiguousEventualValue,
    CycleDetected,
    ExtensionNotPsd,
    InputError,
    NotInvariant,
    NotStrictlyDefinable,
    SearchBudgetExceeded,
)
from .kernel import Kernel, Point, adjoin_point
from .perm import PermGroup, Permutation, stabilizer

ZERO_ID = "zero"


@dataclass
class IndiscerniblePattern:
    diag: Fraction
    off: Fraction
    chains: list = field(default_factory=list)


@dataclass
class TypePoint:
    id: str | None
    profile: dict
    self_value: Fraction
    chain: tuple = ()

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "self": str(self.self_value),
            "chain": list(self.chain),
            "profile": {k: str(v) for k, v in self.profile.items()},
        }


def _is_constant_chain(kernel: Kernel, chain: Sequence[str]):
    diag = {kernel.pair(x, x) for x in chain}
    off = {kernel.pair(x, y) for x, y in combinations(chain, 2)}
    if len(diag) != 1 or len(off) > 1 or len(set(chain)) != len(chain):
        return None
    d = diag.pop()
    return d, (off.pop() if off else None)


def find_chains(
    kernel: Kernel,
    start: str,
    k: int,
    group: PermGroup | None = None,
    budget: int = 10**6,
    pool: Iterable[str] | None = None,
) -> list[IndiscerniblePattern]:
    """All Gram-constant chains of length k beginning at ``start``.

    The remaining members are listed in kernel order.  With a group, chains
    are kept only if they are the least image under the stabilizer of the
    start point (restricted to chains inside the group's domain).
    """
    if k < 2:
        raise InputError("chain length must be at least 2")
    kernel.point(start)
    cands = [p for p in (kernel.ids if pool is None else pool) if p != start]
    d0 = kernel.pair(start, start)
    cands = [p for p in cands if kernel.pair(p, p) == d0]
    found: dict = {}
    nodes = 0

    def extend(chain, lam, rest):
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise SearchBudgetExceeded(f"chain search exceeded {budget} nodes")
        if len(chain) == k:
            found.setdefault(lam, []).append(tuple(chain))
            return
        for i, p in enumerate(rest):
            val = kernel.pair(start, p)
            if lam is not None and val != lam:
                continue
            if all(kernel.pair(p, q) == val for q in chain[1:]):
                extend(chain + [p], val, rest[i + 1:])

    extend([start], None, cands)
    if group is not None and start in group.index:
        stab = stabilizer(group, start).elements()
        for lam, chains in found.items():
            found[lam] = [c for c in chains if _least_image(group, stab, c)]
    return [IndiscerniblePattern(d0, lam, chains) for lam, chains in sorted(found.items())]


def _least_image(group, stab, chain):
    if not all(p in group.index for p in chain):
        return True
    key = tuple(sorted(group.index[p] for p in chain[1:]))
    for g in stab:
        img = tuple(sorted(g(group.index[p]) for p in chain[1:]))
        if img < key:
            return False
    return True


def eventual_value(kernel: Kernel, chain: Sequence[str], y: str) -> Fraction:
    values = [kernel.pair(x, y) for x in chain]
    val, count = Counter(values).most_common(1)[0]
    if 2 * count <= len(values):
        raise AmbiguousEventualValue(y, [str(v) for v in values])
    return val


def limit_profile(kernel: Kernel, chain: Sequence[str], context: Iterable[str] | None = None) -> TypePoint:
    """Majority profile of a Gram-constant chain over the context points."""
    shape = _is_constant_chain(kernel, chain)
    if shape is None or shape[1] is None:
        raise InputError(f"{tuple(chain)} is not a Gram-constant chain")
    ctx = kernel.ids if context is None else list(context)
    profile = {y: eventual_value(kernel, chain, y) for y in ctx}
    return TypePoint(None, profile, shape[1], tuple(chain))


# ---------------------------------------------------------------------------
# Strict definability proxy


@dataclass
class StrictnessReport:
    value_count: int
    values: list
    strictly_definable: bool
    reason: str

    def to_json(self):
        return {
            "value_count": self.value_count,
            "values": [str(v) for v in self.values],
            "strictly_definable": self.strictly_definable,
            "reason": self.reason,
        }


def strictness_report(kernel: Kernel, max_values: int = 8) -> StrictnessReport:
    """Flag kernels whose value set is too large to come from finitely many types.

    Two triggers: more than ``max_values`` distinct values, or (for at least
    five points) as many distinct values as points, the signature of a
    family whose value set grows with its size.
    """
    vals = sorted(kernel.value_set())
    n = len(kernel)
    if len(vals) > max_values:
        return StrictnessReport(len(vals), vals, False, f"more than {max_values} distinct values")
    if n >= 5 and len(vals) >= n:
        return StrictnessReport(len(vals), vals, False, "value count grows with the point count")
    return StrictnessReport(len(vals), vals, True, "finite value set")


# ---------------------------------------------------------------------------
# Weak closure


@dataclass
class Closure:
    kernel: Kernel
    ground: list
    limits: list            # TypePoints in order of adjunction
    edges: set              # (lower, upper): lower is a chain limit from upper
    depth: int
    rejected: list = field(default_factory=list)

    @property
    def limit_ids(self):
        return [t.id for t in self.limits]

    def to_json(self) -> dict:
        return {
            "depth": self.depth,
            "ground": list(self.ground),
            "limits": [t.to_json() for t in self.limits],
            "edges": sorted([a, b] for a, b in self.edges),
            "rejected": [{"chain": list(c), "reason": r} for c, r in self.rejected],
        }


def weak_closure(
    kernel: Kernel,
    group: PermGroup | None = None,
    depth: int = 3,
    max_values: int = 8,
    budget: int = 10**6,
    max_limits: int = 500,
) -> Closure:
    """Close a kernel under limits of chains of length ``depth``.

    Chains are drawn from points flagged unbounded (limit points inherit the
    flag).  The zero vector is adjoined once as the bottom element.  Limit
    candidates whose adjunction would break PSD are recorded as rejected:
    at finite size they are artefacts of short chains.
    """
    report = strictness_report(kernel, max_values)
    if not report.strictly_definable:
        raise NotStrictlyDefinable(report.reason)
    zero = TypePoint(ZERO_ID, {p: Fraction(0) for p in kernel.ids}, Fraction(0))
    if ZERO_ID in kernel:
        raise InputError(f"point id {ZERO_ID!r} is reserved")
    cur = kernel.extended(Point(ZERO_ID, limit=True), zero.profile, 0)
    limits = [zero]
    edges: set = set()
    rejected = []
    seen_chains: set = set()
    counter = 1
    sort_of = {p.id: p.sort for p in kernel.points}
    changed = True
    while changed:
        changed = False
        pool = [p.id for p in cur.points if p.unbounded]
        for start in pool:
            for pat in find_chains(cur, start, depth, None, budget, pool):
                for chain in pat.chains:
                    if chain in seen_chains:
                        continue
                    seen_chains.add(chain)
                    cand = limit_profile(cur, chain)
                    match = _match(cur, cand)
                    if match is None:
                        pid = f"w{counter}"
                        try:
                            cur = adjoin_point(
                                cur,
                                Point(pid, sort=sort_of.get(start, "S"), unbounded=True, limit=True),
                                cand.profile,
                                cand.self_value,
                            )
                        except ExtensionNotPsd:
                            rejected.append((chain, "limit candidate breaks PSD"))
                            continue
                        counter += 1
                        cand.id = pid
                        limits.append(cand)
                        sort_of[pid] = sort_of.get(start, "S")
                        match = pid
                        changed = True
                        if len(limits) > max_limits:
                            raise SearchBudgetExceeded("too many limit points")
                    edges.add((match, start))
    return Closure(cur, list(kernel.ids), limits, edges, depth, rejected)


def _match(kernel: Kernel, cand: TypePoint):
    for p in kernel.ids:
        if kernel.pair(p, p) == cand.self_value and all(
            kernel.pair(p, q) == v for q, v in cand.profile.items()
        ):
            return p
    return None


@dataclass
class LimitOrder:
    ids: list
    leq_pairs: set

    def leq(self, a: str, b: str) -> bool:
        return (a, b) in self.leq_pairs

    def lt(self, a: str, b: str) -> bool:
        return a != b and (a, b) in self.leq_pairs

    def to_json(self):
        return sorted([a, b] for a, b in self.leq_pairs if a != b)


def limit_order(closure: Closure) -> LimitOrder:
    """Reflexive-transitive closure of the chain-limit relation.

    The zero vector sits below everything.  Raises CycleDetected if two
    distinct points end up below each other.
    """
    ids = closure.kernel.ids
    rel = {(x, x) for x in ids}
    rel |= set(closure.edges)
    rel |= {(ZERO_ID, x) for x in ids}
    changed = True
    while changed:
        changed = False
        for a, b in list(rel):
            for c, d in list(rel):
                if b == c and (a, d) not in rel:
                    rel.add((a, d))
                    changed = True
    for a, b in rel:
        if a != b and (b, a) in rel:
            raise CycleDetected([a, b])
    return LimitOrder(ids, rel)


# ---------------------------------------------------------------------------
# Median construction


@dataclass
class MedianResult:
    accepted: bool
    reason: str
    type_point: TypePoint | None = None
    family: list = field(default_factory=list)


def _median(values):
    s = sorted(values)
    return s[len(s) // 2]


def median_type(kernel: Kernel, tup: Sequence[str], m: int, budget: int = 10**6) -> MedianResult:
    """Median profile of an odd Gram-constant tuple, if it is m-extendable.

    The tuple must belong to a family of m pairwise related tuples inside the
    kernel (itself included): disjoint, Gram-constant with the same self and
    off values, pairing off across tuples, and with equal median profiles.
    """
    n = len(tup)
    if n < 3 or n % 2 == 0:
        raise InputError("tuple length must be odd and at least 3")
    shape = _is_constant_chain(kernel, tup)
    if shape is None:
        return MedianResult(False, "InconsistentPattern")
    diag, lam = shape
    ids = kernel.ids

    def med_profile(t):
        return tuple(_median([kernel.pair(x, z) for x in t]) for z in ids)

    target = med_profile(tup)
    cands = [
        p for p in ids
        if p not in tup and kernel.pair(p, p) == diag and all(kernel.pair(p, x) == lam for x in tup)
    ]
    family = [tuple(tup)]
    nodes = 0

    def compatible(p, used):
        return all(kernel.pair(p, q) == lam for q in used)

    def grow(need):
        nonlocal nodes
        if need == 0:
            return True
        used = [p for t in family[1:] for p in t]
        pool = [p for p in cands if p not in used and compatible(p, used)]
        for t in combinations(pool, n):
            nodes += 1
            if nodes > budget:
                raise SearchBudgetExceeded("median extension search exceeded budget")
            if any(kernel.pair(a, b) != lam for a, b in combinations(t, 2)):
                continue
            if med_profile(t) != target:
                continue
            family.append(t)
            if grow(need - 1):
                return True
            family.pop()
        return False

    if not grow(m - 1):
        return MedianResult(False, "NoExtension")
    profile = dict(zip(ids, target))
    tp = TypePoint(None, profile, lam, tuple(tup))
    adjoin_point(kernel, Point("__median__"), profile, lam)  # certifies PSD
    return MedianResult(True, "Accepted", tp, family)


# ---------------------------------------------------------------------------
# Group action on limit points


def extend_action(kernel: Kernel, group: PermGroup) -> PermGroup:
    """Extend a group acting on some kernel points to all of them.

    Points outside the domain are matched by profile transport: g sends w to
    the point whose pairings with g(x) equal those of w with x.  Raises
    NotInvariant when no consistent extension exists.
    """
    dom = [p for p in group.domain if p in kernel]
    extra = [p for p in kernel.ids if p not in group.index]
    domain = list(group.domain) + extra
    gens = []
    for g in group.generators:
        base = {x: group.act(g, x) for x in group.domain}
        for x in dom:
            for y in dom:
                if kernel.pair(base[x], base[y]) != kernel.pair(x, y):
                    raise NotInvariant(f"{group.cycles(g)} does not preserve the pairing")
        sigma = _transport(kernel, base, dom, extra)
        if sigma is None:
            raise NotInvariant(f"{group.cycles(g)} has no consistent action on limit points")
        full = dict(base)
        full.update(sigma)
        gens.append(Permutation.from_mapping(domain, full))
    return PermGroup(domain, gens, group.cap)


def _transport(kernel, base, dom, extra):
    options = {}
    for u in extra:
        opts = [
            c for c in extra
            if kernel.pair(c, c) == kernel.pair(u, u)
            and all(kernel.pair(c, base[x]) == kernel.pair(u, x) for x in dom)
        ]
        if not opts:
            return None
        options[u] = opts
    order = sorted(extra, key=lambda u: len(options[u]))
    assign: dict = {}

    def bt(i):
        if i == len(order):
            return True
        u = order[i]
        for c in options[u]:
            if c in assign.values():
                continue
            if all(kernel.pair(c, assign[v]) == kernel.pair(u, v) for v in assign):
                assign[u] = c
                if bt(i + 1):
                    return True
                del assign[u]
        return False

    return dict(assign) if bt(0) else None
