"""JSON text format shared by every command.

Rationals are written as "p/q" strings (integers as "p").  Every document
carries a "kind" field: kernel, invsys, representation or induced.
"""
from __future__ import annotations

import hashlib
import json
from fractions import Fraction

from .errors import InputError
from .kernel import Kernel, Point
from .perm import PermGroup, Permutation

SCHEMA_VERSION = "1"


class FormatError(InputError):
    """Malformed document; carries line and column when known."""

    def __init__(self, msg, line=None, column=None):
        where = f" at line {line}, column {column}" if line is not None else ""
        super().__init__(msg + where)
        self.line = line
        self.column = column


def report_schema_version() -> str:
    return SCHEMA_VERSION


def read_report(text: str) -> dict:
    """Parse a report, warning when it was written by another schema version."""
    import warnings

    rep = json.loads(text)
    if rep.get("schema_version") != SCHEMA_VERSION:
        warnings.warn(
            f"report schema {rep.get('schema_version')!r} differs from reader schema {SCHEMA_VERSION!r}",
            stacklevel=2,
        )
    return rep


def rat(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_rat(s) -> Fraction:
    if isinstance(s, bool):
        raise FormatError(f"expected a rational, got {s!r}")
    if isinstance(s, int):
        return Fraction(s)
    if isinstance(s, str):
        try:
            return Fraction(s.strip())
        except (ValueError, ZeroDivisionError):
            pass
    raise FormatError(f"expected a rational string 'p/q', got {s!r}")


def loads(text: str) -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(exc.msg, exc.lineno, exc.colno) from exc
    if not isinstance(data, dict) or "kind" not in data:
        raise FormatError("document must be an object with a 'kind' field")
    return data


def dumps(obj) -> str:
    """Canonical text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


# groups


def group_to_json(group: PermGroup) -> dict:
    return {
        "domain": list(group.domain),
        "generators": [g.to_cycles(group.domain) for g in group.generators],
    }


def group_from_json(data: dict, cap: int | None = None) -> PermGroup:
    try:
        domain = [str(x) for x in data["domain"]]
        gens = [Permutation.from_cycles(c, domain) for c in data.get("generators", [])]
    except (KeyError, TypeError) as exc:
        raise FormatError(f"bad group: {exc}") from exc
    return PermGroup(domain, gens, cap=cap)


# kernels


def kernel_to_json(kernel: Kernel, group: PermGroup | None = None) -> dict:
    pts = []
    for p in kernel.points:
        d = {"id": p.id, "sort": p.sort}
        if p.bounded_block is not None:
            d["bounded_block"] = p.bounded_block
        if p.unbounded:
            d["unbounded"] = True
        if p.limit:
            d["limit"] = True
        pts.append(d)
    ids = kernel.ids
    out = {
        "kind": "kernel",
        "points": pts,
        "pairing": [[rat(kernel.pair(ids[i], ids[j])) for j in range(i + 1)] for i in range(len(ids))],
    }
    if group is not None:
        out["group"] = group_to_json(group)
    return out


def kernel_from_json(data: dict, cap: int | None = None):
    """Returns (kernel, group or None)."""
    if data.get("kind") != "kernel":
        raise FormatError(f"expected kind 'kernel', got {data.get('kind')!r}")
    try:
        pts = [
            Point(
                str(p["id"]),
                sort=str(p.get("sort", "S")),
                bounded_block=p.get("bounded_block"),
                unbounded=bool(p.get("unbounded", False)),
                limit=bool(p.get("limit", False)),
            )
            for p in data["points"]
        ]
        rows = data["pairing"]
    except (KeyError, TypeError) as exc:
        raise FormatError(f"bad kernel: missing {exc}") from exc
    n = len(pts)
    if len(rows) != n or any(len(rows[i]) != i + 1 for i in range(n)):
        raise FormatError("pairing must be lower-triangular with one row per point")
    m = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1):
            m[i][j] = m[j][i] = parse_rat(rows[i][j])
    group = group_from_json(data["group"], cap) if data.get("group") else None
    k = Kernel(pts, m)
    if group is not None and set(group.domain) != set(k.ids):
        raise FormatError("group domain must equal the kernel's point ids")
    return k, group


def float_kernel_from_json(data: dict):
    """Float-mode kernel: ids and a matrix of floats (decimal strings allowed)."""
    ids = [str(p["id"]) for p in data["points"]]
    rows = data["pairing"]
    n = len(ids)
    m = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1):
            v = rows[i][j]
            v = float(Fraction(v)) if isinstance(v, str) and "/" in v else float(v)
            m[i][j] = m[j][i] = v
    return ids, m


def float_kernel_to_json(ids, matrix) -> dict:
    return {
        "kind": "kernel",
        "mode": "float",
        "points": [{"id": i, "sort": "S"} for i in ids],
        "pairing": [[repr(float(matrix[i][j])) for j in range(i + 1)] for i in range(len(ids))],
    }


# representations


def rep_to_json(rep) -> dict:
    return rep.to_json()


def rep_from_json(data: dict, cap: int | None = None):
    from .reps import Representation

    if data.get("kind") != "representation":
        raise FormatError(f"expected kind 'representation', got {data.get('kind')!r}")
    try:
        group = group_from_json(data["group"], cap)
        gens = [[[parse_rat(x) for x in row] for row in m] for m in data["matrices"]]
        gram = data.get("gram")
        gram = [[parse_rat(x) for x in row] for row in gram] if gram else None
    except (KeyError, TypeError) as exc:
        raise FormatError(f"bad representation: missing {exc}") from exc
    if len(gens) != len(group.generators):
        raise FormatError("one matrix per group generator is required")
    return Representation(group, gens, gram=gram)


def induced_from_json(data: dict, cap: int | None = None):
    """{kind: induced, group, subgroup_generators, sigma: representation of the subgroup}."""
    from .reps import Representation

    if data.get("kind") != "induced":
        raise FormatError(f"expected kind 'induced', got {data.get('kind')!r}")
    try:
        group = group_from_json(data["group"], cap)
        sub = PermGroup(
            group.domain,
            [Permutation.from_cycles(c, group.domain) for c in data["subgroup_generators"]],
            cap=cap,
        )
        mats = [[[parse_rat(x) for x in row] for row in m] for m in data["sigma"]]
    except (KeyError, TypeError) as exc:
        raise FormatError(f"bad induced document: missing {exc}") from exc
    if len(mats) != len(sub.generators):
        raise FormatError("sigma needs one matrix per subgroup generator")
    return group, sub, Representation(sub, mats)


def invsys_from_json(data: dict):
    from .invsys import InverseSystem

    if data.get("kind") != "invsys":
        raise FormatError(f"expected kind 'invsys', got {data.get('kind')!r}")
    try:
        return InverseSystem.from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad inverse system: {exc}") from exc
