"""Exact kernels, formal vectors and PSD certification.

A kernel is a finite symmetric table of rational pairings on named points.
Formal vectors are finite rational combinations of points; their inner
product is the bilinear extension of the table.  When the kernel is PSD this
is the (possibly degenerate) Gram form of the GNS space, and two formal
vectors are identified exactly when their difference has zero norm.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from . import linalg
from .errors import (
    DuplicateId,
    ExtensionNotPsd,
    InputError,
    MaxRoundsExceeded,
    NotPsd,
    UnknownPoint,
)


@dataclass(frozen=True)
class Point:
    id: str
    sort: str = "S"
    bounded_block: str | None = None
    unbounded: bool = False
    limit: bool = False  # True for points adjoined as weak limits

    def with_id(self, new_id: str) -> "Point":
        return Point(new_id, self.sort, self.bounded_block, self.unbounded, self.limit)


class FormalVector:
    """Sparse linear combination of point ids with exact coefficients."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: Mapping[str, object] | None = None):
        c = {}
        for k, v in (coeffs or {}).items():
            if not isinstance(v, Fraction) and isinstance(v, int):
                v = Fraction(v)
            if v:
                c[k] = v
        self._c = dict(sorted(c.items()))

    @classmethod
    def basis(cls, pid: str) -> "FormalVector":
        return cls({pid: Fraction(1)})

    @property
    def coeffs(self) -> dict:
        return dict(self._c)

    def support(self) -> list[str]:
        return list(self._c)

    def __getitem__(self, pid):
        return self._c.get(pid, Fraction(0))

    def items(self):
        return self._c.items()

    def __add__(self, other: "FormalVector") -> "FormalVector":
        c = dict(self._c)
        for k, v in other._c.items():
            c[k] = c.get(k, 0) + v
        return FormalVector(c)

    def __sub__(self, other: "FormalVector") -> "FormalVector":
        return self + other * -1

    def __neg__(self):
        return self * -1

    def __mul__(self, s) -> "FormalVector":
        return FormalVector({k: v * s for k, v in self._c.items()})

    __rmul__ = __mul__

    def __bool__(self):
        return bool(self._c)

    def __eq__(self, other):
        return isinstance(other, FormalVector) and self._c == other._c

    def __hash__(self):
        return hash(tuple(self._c.items()))

    def __repr__(self):
        if not self._c:
            return "FormalVector(0)"
        body = " + ".join(f"{v}*{k}" for k, v in self._c.items())
        return f"FormalVector({body})"

    def to_json(self) -> dict:
        return {k: str(v) for k, v in self._c.items()}


def vec(**coeffs) -> FormalVector:
    return FormalVector({k: Fraction(v) for k, v in coeffs.items()})


class Kernel:
    """Symmetric rational pairing on an ordered list of points."""

    def __init__(self, points: Sequence[Point], matrix: Sequence[Sequence]):
        self.points = tuple(points)
        self.index = {}
        for i, p in enumerate(self.points):
            if p.id in self.index:
                raise DuplicateId(p.id)
            self.index[p.id] = i
        n = len(self.points)
        m = [[_exact(x) for x in row] for row in matrix]
        if len(m) != n or any(len(row) != n for row in m):
            raise InputError(f"pairing table must be {n}x{n}")
        for i in range(n):
            for j in range(i):
                if m[i][j] != m[j][i]:
                    raise InputError(f"pairing not symmetric at ({self.points[i].id}, {self.points[j].id})")
        self.matrix = m

    @classmethod
    def from_function(cls, points: Sequence[Point | str], f: Callable) -> "Kernel":
        pts = [p if isinstance(p, Point) else Point(p) for p in points]
        m = [[f(a.id, b.id) for b in pts] for a in pts]
        return cls(pts, m)

    @property
    def ids(self) -> list[str]:
        return [p.id for p in self.points]

    def __len__(self):
        return len(self.points)

    def __contains__(self, pid):
        return pid in self.index

    def point(self, pid: str) -> Point:
        return self.points[self._idx(pid)]

    def _idx(self, pid: str) -> int:
        try:
            return self.index[pid]
        except KeyError:
            raise UnknownPoint(pid) from None

    def pair(self, x: str, y: str) -> Fraction:
        return self.matrix[self._idx(x)][self._idx(y)]

    def row(self, x: str) -> dict:
        i = self._idx(x)
        return {p.id: self.matrix[i][j] for j, p in enumerate(self.points)}

    def gram(self, ids: Sequence[str] | None = None) -> list:
        if ids is None:
            return [list(r) for r in self.matrix]
        idx = [self._idx(x) for x in ids]
        return [[self.matrix[i][j] for j in idx] for i in idx]

    def value_set(self) -> set:
        return {x for row in self.matrix for x in row}

    def restrict(self, ids: Sequence[str]) -> "Kernel":
        return Kernel([self.point(x) for x in ids], self.gram(ids))

    def relabel(self, mapping: Mapping[str, str]) -> "Kernel":
        pts = [p.with_id(mapping.get(p.id, p.id)) for p in self.points]
        return Kernel(pts, self.matrix)

    def extended(self, point: Point, profile: Mapping[str, Fraction], self_value) -> "Kernel":
        """New kernel with one more point; no PSD check."""
        if point.id in self.index:
            raise DuplicateId(point.id)
        missing = [p for p in self.ids if p not in profile]
        if missing:
            raise InputError(f"profile misses points {missing}")
        col = [_exact(profile[p]) for p in self.ids]
        m = [row + [c] for row, c in zip(self.matrix, col)]
        m.append(col + [_exact(self_value)])
        return Kernel(self.points + (point,), m)

    def coords(self, v: FormalVector) -> list:
        out = [Fraction(0)] * len(self.points)
        for k, c in v.items():
            out[self._idx(k)] = c
        return out

    def from_coords(self, xs: Sequence) -> FormalVector:
        return FormalVector({p.id: x for p, x in zip(self.points, xs)})

    def __eq__(self, other):
        return isinstance(other, Kernel) and self.points == other.points and self.matrix == other.matrix

    def __repr__(self):
        return f"Kernel({len(self.points)} points)"


def _exact(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool) or not isinstance(x, (int, str)):
        if type(x).__name__ == "Surd":
            return x
        raise InputError(f"pairing entries must be exact rationals, got {x!r}")
    try:
        return Fraction(x)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad rational {x!r}") from exc


# ---------------------------------------------------------------------------
# PSD certification


@dataclass
class PsdCertificate:
    verdict: str                 # "PSD" or "NotPSD"
    pivots: list                 # pivot values in elimination order
    order: list                  # point ids in elimination order
    rank: int
    witness: FormalVector | None = None
    witness_value: Fraction | None = None

    @property
    def is_psd(self) -> bool:
        return self.verdict == "PSD"

    def to_json(self) -> dict:
        out = {
            "verdict": self.verdict,
            "pivots": [str(p) for p in self.pivots],
            "order": list(self.order),
            "rank": self.rank,
        }
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
            out["witness_value"] = str(self.witness_value)
        return out


def check_psd(kernel: Kernel) -> PsdCertificate:
    """Symmetric elimination with largest-diagonal pivoting.

    Tracks, for every remaining index r, a formal vector u_r whose Gram matrix
    is the current Schur complement.  A negative diagonal entry, or a zero
    diagonal next to a nonzero off-diagonal entry, gives an explicit vector
    of negative norm.
    """
    ids = kernel.ids
    n = len(ids)
    s = kernel.gram()
    u = [{i: Fraction(1)} for i in range(n)]
    remaining = list(range(n))
    pivots, order = [], []

    def witness(combo):
        w = {}
        for c, r in combo:
            for k, v in u[r].items():
                w[ids[k]] = w.get(ids[k], 0) + c * v
        fv = FormalVector(w)
        return fv, inner(fv, fv, kernel)

    while remaining:
        neg = [r for r in remaining if s[r][r] < 0]
        if neg:
            fv, val = witness([(1, neg[0])])
            return PsdCertificate("NotPSD", pivots, order, _rank(pivots), fv, val)
        p = max(remaining, key=lambda r: (s[r][r], -r))
        d = s[p][p]
        if d == 0:
            for a in remaining:
                for b in remaining:
                    if a < b and s[a][b] != 0:
                        sign = -1 if s[a][b] > 0 else 1
                        fv, val = witness([(1, a), (sign, b)])
                        return PsdCertificate("NotPSD", pivots, order, _rank(pivots), fv, val)
            pivots.extend(Fraction(0) for _ in remaining)
            order.extend(ids[r] for r in sorted(remaining))
            break
        pivots.append(d)
        order.append(ids[p])
        remaining.remove(p)
        for r in remaining:
            f = s[r][p] / d
            if f:
                for k, v in u[p].items():
                    u[r][k] = u[r].get(k, 0) - f * v
                for t in remaining:
                    s[r][t] -= f * s[p][t]
    return PsdCertificate("PSD", pivots, order, _rank(pivots))


def _rank(pivots):
    return sum(1 for p in pivots if p > 0)


def rank(kernel: Kernel) -> int:
    cert = check_psd(kernel)
    if not cert.is_psd:
        raise NotPsd(cert)
    return cert.rank


# ---------------------------------------------------------------------------
# Vector operations


def inner(u: FormalVector, v: FormalVector, kernel: Kernel):
    total = Fraction(0)
    for a, x in u.items():
        i = kernel._idx(a)
        row = kernel.matrix[i]
        for b, y in v.items():
            pv = row[kernel._idx(b)]
            if pv:
                total = x * y * pv + total
    return total


def norm2(v: FormalVector, kernel: Kernel):
    return inner(v, v, kernel)


def is_null(v: FormalVector, kernel: Kernel) -> bool:
    return norm2(v, kernel) == 0


def same_vector(u: FormalVector, v: FormalVector, kernel: Kernel) -> bool:
    return is_null(u - v, kernel)


def gram_of(vectors: Sequence[FormalVector], kernel: Kernel) -> list:
    return [[inner(a, b, kernel) for b in vectors] for a in vectors]


def combine(vectors: Sequence[FormalVector], coeffs: Sequence) -> FormalVector:
    out = FormalVector()
    for v, c in zip(vectors, coeffs):
        if c:
            out = out + v * c
    return out


def project(v: FormalVector, span: Sequence[FormalVector], kernel: Kernel) -> FormalVector:
    """Orthogonal projection of v onto span(span), via the normal equations."""
    span = list(span)
    if not span:
        return FormalVector()
    g = gram_of(span, kernel)
    rhs = [inner(s, v, kernel) for s in span]
    c = linalg.solve(g, rhs)
    if c is None:  # only possible when the kernel is not PSD
        raise NotPsd(check_psd(kernel), "normal equations inconsistent")
    return combine(span, c)


def project_out(v: FormalVector, span: Sequence[FormalVector], kernel: Kernel) -> FormalVector:
    return v - project(v, span, kernel)


def independent_subset(vectors: Sequence[FormalVector], kernel: Kernel) -> list[int]:
    """Indices of a maximal Gram-independent subset, greedy in order."""
    if not vectors:
        return []
    return linalg.rref(gram_of(vectors, kernel))[1]


def span_rank(vectors: Sequence[FormalVector], kernel: Kernel) -> int:
    return linalg.rank(gram_of(vectors, kernel)) if vectors else 0


def in_span(v: FormalVector, span: Sequence[FormalVector], kernel: Kernel) -> bool:
    return is_null(project_out(v, span, kernel), kernel)


def adjoin_point(kernel: Kernel, point: Point | str, profile: Mapping[str, object], self_value) -> Kernel:
    """Extend the kernel by one point, certifying that PSD is preserved."""
    if isinstance(point, str):
        point = Point(point)
    new = kernel.extended(point, profile, self_value)
    cert = check_psd(new)
    if not cert.is_psd:
        raise ExtensionNotPsd(cert, f"adjoining {point.id!r} breaks positive semidefiniteness")
    return new


# ---------------------------------------------------------------------------
# Alternating projections and span intersection


@dataclass
class AlternatingResult:
    final: FormalVector
    rounds_used: int
    iterates: list = field(default_factory=list)


def alternating_projections(
    v: FormalVector,
    a: Sequence[FormalVector],
    b: Sequence[FormalVector],
    kernel: Kernel,
    max_rounds: int = 50,
) -> AlternatingResult:
    """Iterate x -> P_B P_A x from v until the iterate repeats exactly.

    ``rounds_used`` is the number of rounds after which the iterate no longer
    changes; one extra round is spent confirming it.  The fixed point is
    checked against the direct projection onto the intersection.
    """
    x = v
    iterates = [v]
    for n in range(1, max_rounds + 2):
        nxt = project(project(x, a, kernel), b, kernel)
        iterates.append(nxt)
        if n > 1 and same_vector(nxt, x, kernel):
            direct = project(v, intersect_spans(a, b, kernel), kernel)
            if not same_vector(x, direct, kernel):
                raise AssertionError("alternating projection fixed point disagrees with P_{A and B}")
            return AlternatingResult(x, n - 1, iterates[:-1])
        x = nxt
    raise MaxRoundsExceeded(x, max_rounds)


def intersect_spans(a: Sequence[FormalVector], b: Sequence[FormalVector], kernel: Kernel) -> list[FormalVector]:
    """Basis of span(a) and span(b) intersected, modulo zero-norm vectors.

    Works through x -> Gx, which is injective on the GNS quotient of a PSD
    kernel, so the intersection becomes ordinary linear algebra.
    """
    a, b = list(a), list(b)
    if not a or not b:
        return []
    g = kernel.gram()
    ga = [linalg.matvec(g, kernel.coords(x)) for x in a]
    gb = [linalg.matvec(g, kernel.coords(x)) for x in b]
    n = len(kernel)
    system = [[ga[j][r] for j in range(len(a))] + [-gb[j][r] for j in range(len(b))] for r in range(n)]
    sols = linalg.nullspace(system, len(a) + len(b))
    cands = [combine(a, s[: len(a)]) for s in sols]
    keep = independent_subset(cands, kernel)
    return [cands[i] for i in keep]


# ---------------------------------------------------------------------------
# Embeddings


@dataclass
class EmbeddingCheck:
    ok: bool
    failing_pair: tuple | None = None
    expected: object = None
    got: object = None

    def __bool__(self):
        return self.ok


def verify_embedding(source: Kernel, target: Kernel, mapping: Mapping[str, FormalVector]) -> EmbeddingCheck:
    """Check <map x, map y>_target == source(x, y) for every pair, exactly.

    Coefficients of the images may be quadratic surds; products are then
    evaluated exactly in the quadratic field.
    """
    ids = source.ids
    missing = [x for x in ids if x not in mapping]
    if missing:
        raise UnknownPoint(f"mapping misses {missing}")
    for i, x in enumerate(ids):
        for y in ids[i:]:
            got = inner(mapping[x], mapping[y], target)
            want = source.pair(x, y)
            if got != want:
                return EmbeddingCheck(False, (x, y), want, got)
    return EmbeddingCheck(True)


def points(ids: Iterable[str], **kw) -> list[Point]:
    return [Point(i, **kw) for i in ids]
