"""Command line entry point.

Every command reads one JSON document, runs one library operation and
prints a short summary.  ``--out`` writes the machine report.  Exit codes:
0 success, 1 verdict failure (not PSD, failed validation, ...), 2 bad input.
"""
from __future__ import annotations

import argparse
import os
import sys

from . import __version__
from .errors import DeskError, InputError
from .perm import PermGroup, Permutation
from .serialize import (
    SCHEMA_VERSION,
    FormatError,
    dumps,
    float_kernel_from_json,
    induced_from_json,
    invsys_from_json,
    kernel_from_json,
    loads,
    rat,
    rep_from_json,
)

DEFAULT_CAP = 10**6


class VerdictFailure(Exception):
    """The command ran but its verdict is negative (exit code 1)."""


def _cap(args) -> int:
    if args.group_cap is not None:
        return args.group_cap
    env = os.environ.get("HW_GROUP_CAP")
    return int(env) if env else DEFAULT_CAP


def _read(path: str) -> tuple[str, dict]:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from exc
    return text, loads(text)


def _against(args, domain) -> list[PermGroup]:
    """Alternative generating sets given as ';'-separated cycle strings."""
    out = []
    for spec in args.against or []:
        gens = [Permutation.from_cycles(c, domain) for c in spec.split(";") if c.strip()]
        out.append(PermGroup(domain, gens, cap=_cap(args)))
    return out


def _kernel_input(args):
    text, data = _read(args.input)
    if data.get("mode") == "float":
        raise FormatError("float-mode kernels are only accepted by 'psd --float'")
    k, g = kernel_from_json(data, cap=_cap(args))
    return text, k, g


# ---------------------------------------------------------------------------
# commands; each returns (results dict, summary lines)


def cmd_psd(args):
    text, data = _read(args.input)
    if args.float or data.get("mode") == "float":
        args.float = True  # a float document selects float mode by itself
        from .floatmode import eigen_psd, float_rank

        ids, m = float_kernel_from_json(data)
        ok = eigen_psd(m)
        res = {"verdict": "PSD" if ok else "NotPSD", "rank": float_rank(m), "tolerance": "1e-9"}
        if not ok:
            raise VerdictFailure(res, [f"NotPSD (float oracle, {len(ids)} points)"])
        return res, [f"PSD (float oracle, rank {res['rank']})"]
    from .kernel import check_psd

    k, _ = kernel_from_json(data, cap=_cap(args))
    cert = check_psd(k)
    res = cert.to_json()
    if not cert.is_psd:
        w = ", ".join(f"{p}:{rat(c)}" for p, c in cert.witness.items())
        raise VerdictFailure(res, [f"NotPSD: witness {{{w}}} has self-pairing {rat(cert.witness_value)}"])
    return res, [f"PSD rank {cert.rank} pivots ({', '.join(rat(p) for p in cert.pivots)})"]


def cmd_closure(args):
    from .weaklimit import limit_order, weak_closure

    _, k, g = _kernel_input(args)
    cl = weak_closure(k, g, depth=args.depth)
    res = cl.to_json()
    res["order"] = limit_order(cl).to_json()
    lines = [f"{len(cl.limits)} limit points over {len(cl.ground)} points; {len(cl.rejected)} rejected"]
    for alt in _against(args, k.ids):
        other = weak_closure(k, alt, depth=args.depth)
        same = _limit_keys(other) == _limit_keys(cl)
        res.setdefault("against", []).append({"generators": [alt.cycles(x) for x in alt.generators], "agrees": same})
        if not same:
            raise VerdictFailure(res, lines + ["closure depends on the generating set"])
    return res, lines


def _limit_keys(cl):
    """Limit points up to renaming: self value and profile on the ground points."""
    return sorted((p.self_value, tuple(p.profile.get(x, 0) for x in cl.ground)) for p in cl.limits)


def cmd_decompose(args):
    from .decomp import decompose

    _, k, g = _kernel_input(args)
    rep = decompose(k, g, depth=args.depth)
    res = rep.to_json()
    lines = [
        f"{len(rep.components)} components, dims {rep.dims}",
        f"cross-orthogonal: {rep.cross_orthogonal}; rank sum {rep.rank_sum} of {rep.closure_rank}",
    ]
    for alt in _against(args, k.ids):
        other = decompose(k, alt, depth=args.depth)
        same = sorted(other.dims) == sorted(rep.dims)
        res.setdefault("against", []).append(
            {"generators": [alt.cycles(x) for x in alt.generators], "dims": other.dims, "agrees": same}
        )
        if not same:
            raise VerdictFailure(res, lines + ["dimensions depend on the generating set"])
    if not (rep.cross_orthogonal and rep.span_complete):
        raise VerdictFailure(res, lines)
    return res, lines


def cmd_invsys_validate(args):
    from .invsys import validate

    _, data = _read(args.input)
    rep = validate(invsys_from_json(data))
    res = rep.to_json()
    lines = [f"sort sizes {rep.sort_sizes}"]
    for r in rep.results:
        lines.append(f"  axiom {r.axiom}: {'ok' if r.ok else 'FAIL ' + str(r.witness)}")
    if not rep.ok:
        raise VerdictFailure(res, lines)
    return res, lines


def cmd_invsys_decompose(args):
    from .invsys import decompose_l2

    _, data = _read(args.input)
    d = decompose_l2(invsys_from_json(data))
    res = d.to_json()
    lines = [f"dimensions {d.dim_list} total {d.total}; cross-orthogonal: {d.cross_orthogonal}"]
    if not d.cross_orthogonal or d.total != d.rank:
        raise VerdictFailure(res, lines)
    return res, lines


def cmd_rep_induce(args):
    from .reps import induce, mackey_oracle

    _, data = _read(args.input)
    g, sub, sigma = induced_from_json(data, cap=_cap(args))
    ind = induce(g, sub, sigma)
    res = {"representation": ind.to_json(), "dim": ind.dim, "index": len(ind.coset_reps)}
    res["mackey"] = mackey_oracle(g, sub, sigma).to_json()
    return res, [f"induced representation of dimension {ind.dim} (index {len(ind.coset_reps)})"]


def cmd_rep_irr(args):
    from .reps import induce, is_irreducible

    _, data = _read(args.input)
    if data.get("kind") == "induced":
        g, sub, sigma = induced_from_json(data, cap=_cap(args))
        rep = induce(g, sub, sigma)
    else:
        rep = rep_from_json(data, cap=_cap(args))
    r = is_irreducible(rep)
    return r.to_json(), [f"{'irreducible' if r.irreducible else 'reducible'} ({r.kind}), commutant dim {r.commutant_dim}"]


def cmd_rep_intertwine(args):
    from .reps import intertwiner

    _, k, g = _kernel_input(args)
    if g is None:
        raise FormatError("rep-intertwine needs a kernel document with a 'group' field")
    groups = [g] + _against(args, k.ids)
    certs = [intertwiner(k, x) for x in groups]
    res = certs[0].to_json()
    if len(certs) > 1:
        res["against"] = [c.to_json() for c in certs[1:]]
    lines = [f"intertwiner certificate: {'ok' if all(c.ok for c in certs) else 'FAILED'}"]
    if not all(c.ok for c in certs):
        raise VerdictFailure(res, lines)
    return res, lines


def cmd_probe_regularity(args):
    from .invsys import regularity_probe

    _, data = _read(args.input)
    v = regularity_probe(invsys_from_json(data), args.n)
    res = {"n": args.n, "violations": [x.to_json() for x in v]}
    lines = [f"{len(v)} violations of {args.n}-regularity"]
    if v:
        lines.append(f"  first: {', '.join(v[0].elements)}: {rat(v[0].lhs)} vs {rat(v[0].rhs)}")
    return res, lines


def cmd_probe_growth(args):
    from .decomp import scaling_growth_probe

    params = _params(args.param)
    from .fixtures import FixtureSpec, check_spec

    kw = check_spec(FixtureSpec(args.family, params)) if params else {}
    sizes = [int(s) for s in args.sizes.split(",")]
    g = scaling_growth_probe(args.family, sizes, **kw)
    res = g.to_json()
    return res, [f"{args.family}: largest block per size {g.max_block} ({res['verdict']})"]


def cmd_fixture(args):
    from .fixtures import FixtureSpec, build

    obj = build(FixtureSpec(args.family, _params(args.param)))
    return obj, [f"{args.family}: {obj['kind']}"]


def _params(items) -> dict:
    out = {}
    for it in items or []:
        if "=" not in it:
            raise InputError(f"parameter {it!r} is not of the form key=value")
        k, v = it.split("=", 1)
        out[k.strip()] = v.strip()
    return out


COMMANDS = {
    "psd": cmd_psd,
    "closure": cmd_closure,
    "decompose": cmd_decompose,
    "invsys-validate": cmd_invsys_validate,
    "invsys-decompose": cmd_invsys_decompose,
    "rep-induce": cmd_rep_induce,
    "rep-irr": cmd_rep_irr,
    "rep-intertwine": cmd_rep_intertwine,
    "probe-regularity": cmd_probe_regularity,
    "probe-growth": cmd_probe_growth,
    "fixture": cmd_fixture,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="hilbertdesk",
        description="Exact decompositions of invariant kernels, inverse systems and group representations.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, takes_input=True):
        if takes_input:
            sp.add_argument("input", help="JSON document")
        sp.add_argument("--depth", type=int, default=3, help="closure depth (default 3)")
        sp.add_argument("--group-cap", type=int, default=None, help="largest group order enumerated")
        sp.add_argument("--float", action="store_true", help="float oracle mode (non-certifying)")
        sp.add_argument("--against", action="append", metavar="GENS",
                        help="alternative generating set, cycles separated by ';' (repeatable)")
        sp.add_argument("--out", help="write the JSON report here")
        return sp

    for name in COMMANDS:
        if name in ("probe-growth", "fixture"):
            continue
        sp = common(sub.add_parser(name))
        if name == "probe-regularity":
            sp.add_argument("--n", type=int, default=2, help="arity of the regularity identity")
    sp = common(sub.add_parser("probe-growth"), takes_input=False)
    sp.add_argument("family")
    sp.add_argument("--sizes", default="2,3,4,5,6")
    sp.add_argument("--param", action="append", metavar="KEY=VALUE")
    sp = common(sub.add_parser("fixture"), takes_input=False)
    sp.add_argument("family")
    sp.add_argument("--param", action="append", metavar="KEY=VALUE")
    return p


def _echo(argv) -> list:
    """Command echo without the output path, so reports depend only on inputs."""
    out, skip = [], False
    for a in argv:
        if skip:
            skip = False
        elif a == "--out":
            skip = True
        elif not a.startswith("--out="):
            out.append(a)
    return out


def _report(args, argv, results) -> dict:
    input_digest = None
    if getattr(args, "input", None):
        with open(args.input, "rb") as fh:
            import hashlib

            input_digest = hashlib.sha256(fh.read()).hexdigest()
    return {
        "schema_version": SCHEMA_VERSION,
        "command": {"name": args.command, "argv": _echo(argv)},
        "input_sha256": input_digest,
        "provenance": {
            "version": __version__,
            "mode": "float" if args.float else "exact",
            "certifying": not args.float,
            "depth": args.depth,
            "group_cap": _cap(args),
        },
        "results": results,
    }


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    code = 0
    try:
        results, lines = COMMANDS[args.command](args)
    except VerdictFailure as vf:
        results, lines = vf.args
        code = 1
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except DeskError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        cert = getattr(exc, "certificate", None)
        results = {"error": type(exc).__name__, "message": str(exc)}
        if cert is not None:
            results["certificate"] = cert.to_json()
        lines = []
        code = 1

    if args.command == "fixture" and code == 0:
        text = dumps(results)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return 0
    for ln in lines:
        print(ln)
    if args.float:
        print("(float mode: results are not certificates)")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(dumps(_report(args, argv, results)))
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
