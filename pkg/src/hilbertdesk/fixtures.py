"""Named fixture families: kernels, groups and inverse systems."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Callable

from .errors import ParameterOutOfRange, UnknownFixture
from .invsys import InverseSystem, conjugacy_system, from_subgroup_family
from .kernel import Kernel, Point
from .perm import PermGroup, Permutation, cyclic_group, symmetric_group


def _kernel(ids, f, unbounded=True, blocks=None, sort="S"):
    blocks = blocks or {}
    pts = [Point(i, sort=sort, bounded_block=blocks.get(i), unbounded=unbounded) for i in ids]
    return Kernel(pts, [[f(a, b) for b in ids] for a in ids])


def _need(cond, msg):
    if not cond:
        raise ParameterOutOfRange(msg)


# ---------------------------------------------------------------------------
# Kernel families (each returns (kernel, group or None))


def delta(n: int = 4, unbounded: bool = True):
    _need(n >= 1, "n must be positive")
    ids = [f"x{i}" for i in range(1, n + 1)]
    return _kernel(ids, lambda a, b: int(a == b), unbounded), symmetric_group(ids)


def shifted_delta(c=1, n: int = 4, unbounded: bool = True):
    _need(n >= 1, "n must be positive")
    c = Fraction(c)
    _need(c >= 0, "shift must be nonnegative")
    ids = [f"x{i}" for i in range(1, n + 1)]
    return _kernel(ids, lambda a, b: c + 1 if a == b else c, unbounded), symmetric_group(ids)


def _tuple_id(t):
    return "t" + "_".join(str(x) for x in t)


def _diagonal_group(ids, base, decode):
    """S_base acting on every entry of each tuple at once."""
    sym = symmetric_group(base)
    gens = []
    for g in sym.generators:
        mapping = {}
        for i in ids:
            mapping[i] = _tuple_id(tuple(g(x - 1) + 1 for x in decode[i]))
        gens.append(Permutation.from_mapping(ids, mapping))
    return PermGroup(ids, gens)


def tuples(base: int = 4, k: int = 2, variant: str = "positional", unbounded: bool = True):
    """k-tuples over {1..base}: shared positions, or shared entries ignoring order."""
    _need(base >= 2 and k >= 1, "need base >= 2 and k >= 1")
    _need(variant in ("positional", "multiset"), "variant is positional or multiset")
    tl = list(product(range(1, base + 1), repeat=k))
    ids = [_tuple_id(t) for t in tl]
    decode = dict(zip(ids, tl))
    if variant == "positional":
        f = lambda a, b: sum(x == y for x, y in zip(decode[a], decode[b]))
    else:
        def f(a, b):
            ca, cb = decode[a], decode[b]
            return sum(min(ca.count(v), cb.count(v)) for v in set(ca))
    return _kernel(ids, f, unbounded), _diagonal_group(ids, base, decode)


def subsets(m: int = 2, n: int = 4, unbounded: bool = True):
    """m-element subsets of {1..n}, paired by the size of the intersection."""
    _need(1 <= m <= n, "need 1 <= m <= n")
    sl = list(combinations(range(1, n + 1), m))
    ids = [_tuple_id(s) for s in sl]
    decode = dict(zip(ids, sl))
    k = _kernel(ids, lambda a, b: len(set(decode[a]) & set(decode[b])), unbounded)
    sym = symmetric_group(n)
    gens = [
        Permutation.from_mapping(ids, {i: _tuple_id(tuple(sorted(g(x - 1) + 1 for x in decode[i]))) for i in ids})
        for g in sym.generators
    ]
    return k, PermGroup(ids, gens)


def consecutive(n: int = 5, unbounded: bool = True):
    """Path kernel: 2 on the diagonal, 1 between neighbours."""
    _need(n >= 2, "n must be at least 2")
    ids = [f"c{i}" for i in range(1, n + 1)]
    pos = {x: i for i, x in enumerate(ids)}
    k = _kernel(ids, lambda a, b: 2 if a == b else int(abs(pos[a] - pos[b]) == 1), unbounded)
    rev = Permutation.from_mapping(ids, {x: ids[n - 1 - i] for i, x in enumerate(ids)})
    return k, PermGroup(ids, [rev])


def toeplitz_geometric(n: int = 5, unbounded: bool = True):
    _need(n >= 1, "n must be positive")
    ids = [f"v{i}" for i in range(n)]
    pos = {x: i for i, x in enumerate(ids)}
    return _kernel(ids, lambda a, b: Fraction(1, 2 ** abs(pos[a] - pos[b])), unbounded), None


def equivalence(sizes=(2, 3), unbounded: bool = True, within=1, diag=2):
    """Classes of the given sizes: diag on the diagonal, ``within`` inside a class, 0 across."""
    _need(all(s >= 1 for s in sizes), "class sizes must be positive")
    total = sum(sizes)
    letters = "abcdefghijklmnopqrstuvwxyz"
    ids = list(letters[:total]) if total <= 26 else [f"e{i}" for i in range(total)]
    blocks, cls, start = {}, {}, 0
    for ci, s in enumerate(sizes):
        for x in ids[start:start + s]:
            blocks[x] = f"B{ci}"
            cls[x] = ci
        start += s
    def f(a, b):
        if a == b:
            return Fraction(diag)
        return Fraction(within) if cls[a] == cls[b] else Fraction(0)
    k = _kernel(ids, f, unbounded, blocks)
    return k, _block_wreath(ids, [ids[sum(sizes[:i]):sum(sizes[:i + 1])] for i in range(len(sizes))])


def _block_wreath(ids, blocks):
    """Symmetries of each block, plus permutations of equal-size blocks."""
    gens = []
    for b in blocks:
        if len(b) >= 2:
            gens.append(Permutation.from_mapping(ids, {b[0]: b[1], b[1]: b[0]}))
        if len(b) >= 3:
            gens.append(Permutation.from_mapping(ids, {x: b[(i + 1) % len(b)] for i, x in enumerate(b)}))
    for b1, b2 in zip(blocks, blocks[1:]):
        if len(b1) == len(b2):
            m = {}
            for x, y in zip(b1, b2):
                m[x], m[y] = y, x
            gens.append(Permutation.from_mapping(ids, m))
    return PermGroup(ids, gens)


def fcp_equivalence(N: int = 6, unbounded: bool = True):
    """One class of each size 1..N."""
    _need(N >= 1, "N must be positive")
    ids, blocks, cls = [], {}, {}
    for s in range(1, N + 1):
        for j in range(1, s + 1):
            x = f"e{s}_{j}"
            ids.append(x)
            blocks[x] = f"class{s}"
            cls[x] = s
    k = _kernel(ids, lambda a, b: 2 if a == b else int(cls[a] == cls[b]), unbounded, blocks)
    return k, _block_wreath(ids, [[x for x in ids if cls[x] == s] for s in range(1, N + 1)])


def pair_blocks(m: int = 3, unbounded: bool = True):
    """m classes of size two (wreath-type symmetry)."""
    return equivalence([2] * m, unbounded)


def simplex_blocks(m: int = 2, unbounded: bool = True):
    """Blocks of three points spanning a plane: 2 on the diagonal, -1 inside a block."""
    return equivalence([3] * m, unbounded, within=-1)


def equivalence_capped(n: int = 6, cap: int = 3, unbounded: bool = True):
    sizes = [cap] * (n // cap) + ([n % cap] if n % cap else [])
    return equivalence(sizes, unbounded)


KERNEL_FAMILIES: dict[str, Callable] = {
    "delta": delta,
    "shifted_delta": shifted_delta,
    "tuples": tuples,
    "subsets": subsets,
    "consecutive": consecutive,
    "toeplitz_geometric": toeplitz_geometric,
    "equivalence": equivalence,
    "fcp_equivalence": fcp_equivalence,
    "pair_blocks": pair_blocks,
    "simplex_blocks": simplex_blocks,
    "equivalence_capped": equivalence_capped,
}


def kernel_fixture(name: str, **params):
    if name not in KERNEL_FAMILIES:
        raise UnknownFixture(name)
    try:
        return KERNEL_FAMILIES[name](**params)
    except TypeError as exc:
        raise ParameterOutOfRange(str(exc)) from exc


def kernel_family(name: str, n: int, **params) -> Kernel:
    """Size-indexed member of a family, for growth probes."""
    if name == "fcp_equivalence":
        return kernel_fixture(name, N=n, **params)[0]
    return kernel_fixture(name, n=n, **params)[0]


# ---------------------------------------------------------------------------
# Groups


def regular_group(elements, mul, generators) -> PermGroup:
    """Left-regular permutation representation of an abstract group."""
    labels = [str(e) for e in elements]
    index = {e: i for i, e in enumerate(elements)}
    gens = [Permutation([index[mul(g, x)] for x in elements]) for g in generators]
    return PermGroup(labels, gens)


def _quaternion():
    names = ["1", "i", "j", "k"]
    table = {
        ("1", "1"): (1, "1"), ("1", "i"): (1, "i"), ("1", "j"): (1, "j"), ("1", "k"): (1, "k"),
        ("i", "1"): (1, "i"), ("i", "i"): (-1, "1"), ("i", "j"): (1, "k"), ("i", "k"): (-1, "j"),
        ("j", "1"): (1, "j"), ("j", "i"): (-1, "k"), ("j", "j"): (-1, "1"), ("j", "k"): (1, "i"),
        ("k", "1"): (1, "k"), ("k", "i"): (1, "j"), ("k", "j"): (-1, "i"), ("k", "k"): (-1, "1"),
    }
    elems = [(s, u) for s in (1, -1) for u in names]

    def mul(a, b):
        s, u = table[(a[1], b[1])]
        return (a[0] * b[0] * s, u)

    labels = {e: ("" if e[0] > 0 else "-") + e[1] for e in elems}

    class Q:
        def __init__(self, e):
            self.e = e

        def __eq__(self, o):
            return self.e == o.e

        def __hash__(self):
            return hash(self.e)

        def __str__(self):
            return labels[self.e]

    qe = [Q(e) for e in elems]
    return regular_group(qe, lambda a, b: Q(mul(a.e, b.e)), [Q((1, "i")), Q((1, "j"))])


def _sub(group: PermGroup, gens) -> PermGroup:
    return PermGroup(group.domain, gens)


def _power(g: Permutation, k: int) -> Permutation:
    out = Permutation.identity(len(g.images))
    for _ in range(k):
        out = out * g
    return out


def tower_family(name: str):
    """(group, subgroups, names) for a named tower."""
    if name in ("Z4", "Z8"):
        n = int(name[1:])
        g = cyclic_group(n)
        r = g.generators[0]
        subs, names = [], []
        d = 1
        while d <= n:
            subs.append(_sub(g, [_power(r, d)] if d < n else []))
            names.append(f"{d}Z" if d < n else "1")
            d *= 2
        if name == "Z8":
            # the chain 2Z > 4Z > 8Z (quotients of size 2, 4, 8)
            subs, names = subs[1:], names[1:]
        else:
            subs = [_sub(g, [r])] + subs[1:]
            names = ["G"] + names[1:]
        return g, subs, names
    if name in ("Z2xZ2", "Z2xZ2_full"):
        elems = [(a, b) for a in (0, 1) for b in (0, 1)]

        class V:
            def __init__(self, e):
                self.e = e

            def __eq__(self, o):
                return self.e == o.e

            def __hash__(self):
                return hash(self.e)

            def __str__(self):
                return f"{self.e[0]}{self.e[1]}"

        ve = [V(e) for e in elems]
        g = regular_group(ve, lambda a, b: V(((a.e[0] + b.e[0]) % 2, (a.e[1] + b.e[1]) % 2)), [V((1, 0)), V((0, 1))])
        ta, tb = g.generators
        subs = [g, _sub(g, [ta]), _sub(g, [tb]), _sub(g, [])]
        names = ["G", "A", "B", "1"]
        if name.endswith("full"):
            subs.insert(3, _sub(g, [ta * tb]))
            names.insert(3, "C")
        return g, subs, names
    if name == "S3":
        g = symmetric_group(3)
        a3 = _sub(g, [Permutation.from_cycles("(1 2 3)", g.domain)])
        return g, [_sub(g, []), a3, g], ["1", "A3", "S3"]
    if name == "Q8":
        g = _quaternion()
        minus = next(x for x in g.elements() if x.order() == 2)
        return g, [_sub(g, []), _sub(g, [minus]), g], ["1", "Z", "Q8"]
    if name == "D4":
        g = PermGroup.from_cycles(["1", "2", "3", "4"], ["(1 2 3 4)", "(1 3)"])
        r = g.generators[0]
        return g, [_sub(g, []), _sub(g, [r * r]), _sub(g, [r]), g], ["1", "Z", "R", "D4"]
    raise UnknownFixture(f"group tower {name!r}")


def group_tower(name: str = "Z4", conjugacy: bool = False) -> InverseSystem:
    g, subs, names = tower_family(name)
    if conjugacy:
        return conjugacy_system(g, subs, names)
    return from_subgroup_family(g, subs, names)


def three_point() -> InverseSystem:
    """Two partitions of a 3-point space that are not conditionally independent."""
    classes = {
        "T": ["t"],
        "A": ["A:12", "A:3"],
        "B": ["B:13", "B:2"],
        "X": ["X:1", "X:2", "X:3"],
    }
    measure = {
        "t": 1, "A:12": Fraction(3, 4), "A:3": Fraction(1, 4), "B:13": Fraction(3, 4), "B:2": Fraction(1, 4),
        "X:1": Fraction(1, 2), "X:2": Fraction(1, 4), "X:3": Fraction(1, 4),
    }
    order = [("t", e) for e in ["A:12", "A:3", "B:13", "B:2", "X:1", "X:2", "X:3"]]
    order += [("A:12", "X:1"), ("A:12", "X:2"), ("A:3", "X:3"), ("B:13", "X:1"), ("B:13", "X:3"), ("B:2", "X:2")]
    return InverseSystem(classes, [("S0", ["T", "A", "B", "X"])], measure, order)


# ---------------------------------------------------------------------------
# Bilinear forms over F_q


def _vectors(q, d):
    return list(product(range(q), repeat=d))


def _form(q, d, kind):
    if kind == "symmetric":
        return lambda x, y: sum(a * b for a, b in zip(x, y)) % q
    if kind == "symplectic":
        _need(d % 2 == 0, "symplectic form needs even dimension")
        return lambda x, y: sum(x[2 * i] * y[2 * i + 1] - x[2 * i + 1] * y[2 * i] for i in range(d // 2)) % q
    raise ParameterOutOfRange(f"unknown form {kind!r}")


def _subspaces(q, d):
    vs = _vectors(q, d)
    found = {frozenset([tuple([0] * d)])}
    frontier = list(found)
    while frontier:
        nxt = []
        for s in frontier:
            for v in vs:
                if v in s:
                    continue
                span = frozenset(tuple((a + c * b) % q for a, b in zip(u, v)) for u in s for c in range(q))
                if span not in found:
                    found.add(span)
                    nxt.append(span)
        frontier = nxt
    return sorted(found, key=lambda s: (len(s), sorted(s)))


def _basis(space, q):
    """Lexicographically greedy basis of a subspace."""
    basis, span = [], {tuple([0] * len(next(iter(space))))}
    for v in sorted(space):
        if v not in span:
            basis.append(v)
            span = {tuple((a + c * b) % q for a, b in zip(u, v)) for u in span for c in range(q)}
    return basis


def affine_space(q: int = 2, d: int = 3, form: str = "symmetric"):
    """Group tower of F_q^d over every subspace, classes by values of functionals.

    The class attached to a subspace U of functionals is the partition of
    F_q^d by the values <x, u> for u in a basis of U; it is the quotient by
    the annihilator of U.  Returns (system, vectors, translation group).
    """
    _need(q in (2, 3, 5, 7) and 1 <= d <= 4, "need prime q <= 7 and 1 <= d <= 4")
    _need(q ** d <= 81, "space too large for exact enumeration")
    bil = _form(q, d, form)
    vs = _vectors(q, d)
    index = {v: i for i, v in enumerate(vs)}
    labels = ["".join(map(str, v)) for v in vs]

    def translation(u):
        return Permutation([index[tuple((a + b) % q for a, b in zip(v, u))] for v in vs])

    unit = [tuple(int(i == j) for j in range(d)) for i in range(d)]
    g = PermGroup(labels, [translation(u) for u in unit])
    subs, names, bases = [], [], {}
    for u in _subspaces(q, d):
        ann = [v for v in vs if all(bil(v, w) == 0 for w in u)]
        subs.append(PermGroup(labels, [translation(v) for v in _basis(ann, q)] if len(ann) > 1 else []))
        b = _basis(u, q) if len(u) > 1 else []
        nm = "U[" + ",".join("".join(map(str, x)) for x in b) + "]"
        names.append(nm)
        bases[nm] = b

    def labeler(nm, coset):
        x = vs[next(iter(coset)).images[index[tuple([0] * d)]]]
        b = bases[nm]
        if not b:
            return "*"
        return ";".join(f"<x,{''.join(map(str, w))}>={bil(x, w)}" for w in b)

    sys = from_subgroup_family(g, subs, names, labeler)
    return sys, vs, g


def bilinear(q: int = 2, d: int = 3, form: str = "symmetric") -> InverseSystem:
    return affine_space(q, d, form)[0]


def linear_action(q: int, d: int, matrices, form: str = "symmetric"):
    """Action of invertible matrices on the elements of ``affine_space(q, d)``."""
    sys, vs, g = affine_space(q, d, form)
    index = {v: i for i, v in enumerate(vs)}
    lookup = {frozenset(c): e for e, c in sys.coset_sets.items()}
    domain = sys.elements()
    zero = index[tuple([0] * d)]

    def apply(m, v):
        return tuple(sum(m[i][j] * v[j] for j in range(d)) % q for i in range(d))

    def translation(u):
        return Permutation([index[tuple((a + b) % q for a, b in zip(v, u))] for v in vs])

    gens = []
    for m in matrices:
        mapping = {}
        for e in domain:
            img = frozenset(translation(apply(m, vs[t.images[zero]])) for t in sys.coset_sets[e])
            if img not in lookup:
                from .errors import ActionInvalid

                raise ActionInvalid("matrix does not preserve the subspace family")
            mapping[e] = lookup[img]
        gens.append(Permutation.from_mapping(domain, mapping))
    return sys, PermGroup(domain, gens)


# ---------------------------------------------------------------------------
# Float-only fixture


def circle_arc(n: int = 4, a: float = 0.0, b: float = math.pi / 2):
    """Real Gram matrix of z^0..z^(n-1) in L2 of the arc [a, b], normalised."""
    _need(n >= 1 and b > a, "need n >= 1 and b > a")
    length = b - a

    def val(k):
        if k == 0:
            return 1.0
        return (math.sin(k * b) - math.sin(k * a)) / (k * length)

    ids = [f"z{i}" for i in range(n)]
    return ids, [[val(i - j) for j in range(n)] for i in range(n)]


INVSYS_FAMILIES: dict[str, Callable] = {
    "group_tower": group_tower,
    "three_point": three_point,
    "bilinear": bilinear,
}


# ---------------------------------------------------------------------------
# Typed fixture specs (used by the command line)

INT, RAT, BOOL, STR, INTS, FLOAT = "int", "rational", "bool", "str", "int-list", "float"

PARAMS: dict[str, dict[str, str]] = {
    "delta": {"n": INT, "unbounded": BOOL},
    "shifted_delta": {"c": RAT, "n": INT, "unbounded": BOOL},
    "tuples": {"base": INT, "k": INT, "variant": STR, "unbounded": BOOL},
    "subsets": {"m": INT, "n": INT, "unbounded": BOOL},
    "consecutive": {"n": INT, "unbounded": BOOL},
    "toeplitz_geometric": {"n": INT, "unbounded": BOOL},
    "equivalence": {"sizes": INTS, "unbounded": BOOL},
    "fcp_equivalence": {"N": INT, "unbounded": BOOL},
    "pair_blocks": {"m": INT, "unbounded": BOOL},
    "simplex_blocks": {"m": INT, "unbounded": BOOL},
    "equivalence_capped": {"n": INT, "cap": INT, "unbounded": BOOL},
    "group_tower": {"name": STR, "conjugacy": BOOL},
    "three_point": {},
    "bilinear": {"q": INT, "d": INT, "form": STR},
    "circle_arc": {"n": INT, "a": FLOAT, "b": FLOAT},
}


@dataclass
class FixtureSpec:
    family: str
    parameters: dict = field(default_factory=dict)


def _coerce(family, name, kind, raw):
    bad = ParameterOutOfRange(f"{family}: parameter {name!r} expects {kind}, got {raw!r}")
    try:
        if kind == INT:
            if isinstance(raw, bool):
                raise bad
            v = int(raw) if not isinstance(raw, str) or raw.strip().lstrip("-").isdigit() else None
            if v is None or (isinstance(raw, float) and raw != v):
                raise bad
            return v
        if kind == RAT:
            if isinstance(raw, bool):
                raise bad
            return Fraction(raw) if isinstance(raw, (int, str, Fraction)) else Fraction(str(raw))
        if kind == FLOAT:
            return float(raw)
        if kind == BOOL:
            if isinstance(raw, bool):
                return raw
            if str(raw).lower() in ("true", "1", "yes"):
                return True
            if str(raw).lower() in ("false", "0", "no"):
                return False
            raise bad
        if kind == INTS:
            items = raw.split(",") if isinstance(raw, str) else list(raw)
            return [_coerce(family, name, INT, x) for x in items]
        if kind == STR:
            if not isinstance(raw, str):
                raise bad
            return raw
    except (ValueError, TypeError, ZeroDivisionError):
        raise bad
    raise bad


def check_spec(spec: FixtureSpec) -> dict:
    """Type-check parameters; returns coerced keyword arguments."""
    if spec.family not in PARAMS:
        raise UnknownFixture(spec.family)
    schema = PARAMS[spec.family]
    out = {}
    for k, v in spec.parameters.items():
        if k not in schema:
            raise ParameterOutOfRange(f"{spec.family}: unknown parameter {k!r}")
        out[k] = _coerce(spec.family, k, schema[k], v)
    return out


def build(spec: FixtureSpec):
    """Generate, validate and serialise a fixture.  Returns a JSON-ready dict."""
    from .invsys import validate
    from .kernel import check_psd
    from .serialize import float_kernel_to_json, kernel_to_json

    kw = check_spec(spec)
    if spec.family == "circle_arc":
        ids, m = circle_arc(**kw)
        from .floatmode import eigen_psd

        if not eigen_psd(m):
            raise ParameterOutOfRange("circle_arc Gram failed the float PSD check")
        return float_kernel_to_json(ids, m)
    if spec.family in INVSYS_FAMILIES:
        sys = INVSYS_FAMILIES[spec.family](**kw)
        rep = validate(sys)
        # the three-point system is built to fail regularity; everything else must pass
        if not rep.ok and spec.family != "three_point":
            from .errors import ValidationFailed

            raise ValidationFailed(rep)
        return sys.to_json()
    k, g = kernel_fixture(spec.family, **kw)
    cert = check_psd(k)
    if not cert.is_psd:
        from .errors import NotPsd

        raise NotPsd(cert)
    return kernel_to_json(k, g)
