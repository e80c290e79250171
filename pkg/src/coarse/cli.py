"""``coarse`` command line interface.

Every command prints (or writes with ``--out``) one JSON document.  Exit
codes: 0 verified or evidence found, 1 refuted, 2 budget exhausted, 64 and
above for usage errors.
"""

from __future__ import annotations

import argparse
import datetime as dt
import json
import logging
import os
import sys

from . import __version__
from .group_core import GroupError, parse_group
from .store import SpecError, atomic_write, parse_set, write_set
from .verdict import MalformedWitness, Status, Verdict, encode

EX_USAGE = 64
EX_DATAERR = 65
EX_NOINPUT = 66


class UsageError(Exception):
    def __init__(self, message, code=EX_USAGE):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _ints(text: str, field: str) -> list:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"{field}: expected comma-separated integers, got {text!r}") from None


def _elements(G, text: str, field: str) -> list:
    try:
        return [G.parse(t) for t in text.split(";") if t.strip()]
    except GroupError as exc:
        raise UsageError(f"{field}: {exc}") from None


def _load_json(path: str, field: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise UsageError(f"{field}: no such file {path!r}", EX_NOINPUT) from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{field}: invalid JSON in {path!r}: {exc}", EX_DATAERR) from None


def _threads() -> int:
    raw = os.environ.get("COARSE_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"COARSE_THREADS: expected a positive integer, got {raw!r}") from None
    if n < 1:
        raise UsageError("COARSE_THREADS: expected a positive integer")
    return n


# -- commands ----------------------------------------------------------------------
# each returns (result dict, exit code)

def _verdict(G, v: Verdict):
    return v.to_json(G), v.status.exit_code


def cmd_construct(args, G):
    from . import constructions as C

    name, N = args.name, args.stages
    if N < 1:
        raise UsageError("--stages: must be positive")
    prov = {"construction": name, "stage": N, "group": G.name}
    out: dict = {"construction": name, "stages": N}
    if name == "thmA":
        resume = None
        if args.resume:
            resume = C.ThmAState.from_json(G, _load_json(args.resume, "--resume"))
        st, A, cert, wits = C.build_thmA(G, N, checkpoint=args.checkpoint, resume=resume)
        out["state"] = st.to_json()
        if args.cert:
            atomic_write(args.cert, _dumps({"group": G.name, "certificate": cert.to_json(G)}))
    elif name == "infdiv":
        st, A, wits = C.build_infdiv(G, N)
        out["a"] = [G.format(x) for x in st.a]
        out["c"] = [G.format(x) for x in st.c]
    elif name == "isolated":
        res = C.build_isolated_absorbing(G, N)
        A = res.set
        out.update(g=[G.format(x) for x in res.g], h=[G.format(x) for x in res.h],
                   frontier=res.frontier, gap_certificate=res.certificate.to_json(G))
        if args.cert:
            atomic_write(args.cert, _dumps({"group": G.name,
                                            "certificate": res.certificate.to_json(G)}))
    elif name == "sparse":
        chain = C.build_sparse_chain(G, N)
        from .lazy_sets import LazySet
        A = LazySet.from_finite(G, chain.elements, tag=f"sparse[{N}]", frontier=chain.frontier)
        out["g"] = [G.format(x) for x in chain.elements]
    elif name == "products":
        g = G.parse(args.element) if args.element else G.generators[0]
        fam = C.build_injective_products(G, g, N)
        out["g"] = G.format(g)
        out["exponents"] = fam.exponents
        out["injective"] = [fam.is_injective(n) for n in range(1, N + 1)]
        return out, 0
    else:
        raise UsageError(f"construct: unknown construction {name!r}")
    out["size"] = len(A.finite)
    out["frontier"] = None if A.frontier == float("inf") else A.frontier
    if args.set_out:
        write_set(args.set_out, A, provenance=prov)
        out["set_file"] = args.set_out
    return out, 0


def _emitted_division(G, args):
    from . import constructions as C

    head, _, rest = args.set.partition(":")
    name, _, stage = rest.partition(":")
    if head != "construct" or name not in ("infdiv", "thmA"):
        raise UsageError("--witness: required unless --set is construct:infdiv:N or construct:thmA:N")
    if args.level is None:
        raise UsageError("--level: required with emitted witnesses")
    N = int(stage)
    if not 1 <= args.level < N:
        raise UsageError(f"--level: must lie in 1..{N - 1}")
    if name == "infdiv":
        st = C.build_infdiv(G, N)[0]
    else:
        st = C.build_thmA(G, N, verify=False)[0]
    return C.division_witness(G, st.a, st.c, args.level)[0]


def cmd_check(args, G):
    from . import absorbing, coarse_relations as relations, divisibility

    kind = args.check
    R = getattr(args, "radius", None)
    if kind == "bounded":
        A, B = parse_set(G, args.a, "--a"), parse_set(G, args.b, "--b")
        if args.witness:
            v = relations.check_witness(A, B, _elements(G, args.witness, "--witness"), R)
        else:
            v = relations.find_witness(A, B, R, args.max_norm, args.max_size)
        return _verdict(G, v)
    if kind == "equiv":
        A, B = parse_set(G, args.a, "--a"), parse_set(G, args.b, "--b")
        return _verdict(G, relations.check_equiv(A, B, R, args.max_norm, args.max_size))
    if kind == "divisible":
        A = parse_set(G, args.set, "--set")
        if args.witness:
            data = _load_json(args.witness, "--witness")
            try:
                parts = [parse_set(G, p, "--witness.parts") for p in data["parts"]]
                Fs = [_elements(G, ";".join(F), "--witness.F") for F in data["F"]]
            except KeyError as exc:
                raise UsageError(f"--witness: missing field {exc}") from None
            w = divisibility.DivisionWitness(parts, Fs)
        else:
            w = _emitted_division(G, args)
        if args.n is not None and args.n != w.n:
            raise UsageError(f"--n: witness has {w.n} parts, not {args.n}")
        return _verdict(G, divisibility.check_division(A, w, R))
    if kind == "absorbing":
        A = parse_set(G, args.set, "--set")
        v = absorbing.absorbing_up_to(A, args.f_radius, args.search_radius)
        return _verdict(G, v)
    if kind == "anti-absorbing":
        A = parse_set(G, args.set, "--set")
        data = _load_json(args.cert, "--cert")
        data = data.get("certificate", data)
        cert = absorbing.AntiAbsorbingCertificate()
        try:
            for p in data["pairs"]:
                T = (_elements(G, ";".join(p["T"]), "--cert.T") if "T" in p
                     else G.ball(int(p["T_radius"])))
                cert.add(T, G.parse(p["d"]), p.get("status", "window"))
        except (KeyError, GroupError) as exc:
            raise UsageError(f"--cert: malformed pair ({exc})") from None
        return _verdict(G, absorbing.check_anti_absorbing(A, cert, R))
    if kind == "gap":
        A = parse_set(G, args.set, "--set")
        res = divisibility.certify_not_2_divisible(A, _ints(args.targets, "--targets"),
                                                   max_radius=args.max_radius)
        if isinstance(res, Verdict):
            return _verdict(G, res)
        return {"status": Status.VERIFIED.value, "certificate": res.to_json(G)}, 0
    if kind == "paradoxical":
        A = parse_set(G, args.set, "--set")
        data = _load_json(args.witness, "--witness")

        def fam(key):
            try:
                return [(parse_set(G, p["piece"], f"--witness.{key}"), G.parse(p["g"]))
                        for p in data[key]]
            except KeyError as exc:
                raise UsageError(f"--witness: missing field {exc}") from None

        return _verdict(G, divisibility.check_paradoxical_witness(A, fam("first"), fam("second"), R))
    raise UsageError(f"check: unknown kind {kind!r}")


def cmd_limits(args, G):
    from . import translate_limits as limits

    if args.limits == "patterns":
        A = parse_set(G, args.set, "--set")
        classes = limits.enumerate_patterns(A, args.radius, args.range)
        rows = [{"pattern": c.pattern.hex, "count": c.count,
                 "samples": [G.format(g) for g in c.samples]} for c in classes]
        if args.csv:
            atomic_write(args.csv, "pattern,count\n" + "".join(
                f"{r['pattern']},{r['count']}\n" for r in rows))
        return {"order": limits.BALL_ORDER, "radius": args.radius, "range": args.range,
                "distinct": len(rows), "patterns": rows}, 0
    if args.limits == "preorder":
        A, B = parse_set(G, args.a, "--a"), parse_set(G, args.b, "--b")
        ev = limits.preorder_evidence(A, B, _ints(args.schedule, "--schedule"), args.range)
        if isinstance(ev, Verdict):
            return _verdict(G, ev)
        return ev.to_json(G), (2 if ev.missing else 0)
    if args.limits == "minimal-probe":
        A = parse_set(G, args.set, "--set")
        rep = limits.minimal_type_probe(A, args.radius, args.range)
        return rep.to_json(G), 0
    raise UsageError(f"limits: unknown kind {args.limits!r}")


def cmd_ideal(args, G):
    from .lazy_sets import IdealSpec, ideal_contains

    gens = [parse_set(G, s, f"--gen[{i}]") for i, s in enumerate(args.gen)]
    B = parse_set(G, args.set, "--set")
    v = ideal_contains(IdealSpec(gens), B, args.radius, args.max_norm, args.max_size)
    return _verdict(G, v)


# -- parser ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="coarse", description="Coarse combinatorics of group subsets.")
    p.add_argument("--version", action="version", version=f"coarse {__version__}")
    base = _Parser(add_help=False)
    base.add_argument("--group", required=True, help="Z, Z^d (d <= 4) or F_k (k <= 3)")
    base.add_argument("--no-timestamp", action="store_true", help="omit the timestamp field")
    base.add_argument("--format", choices=["json", "text"], default="json")
    base.add_argument("-v", "--verbose", action="store_true")
    common = _Parser(add_help=False, parents=[base])
    common.add_argument("--out", help="write the JSON document here instead of stdout")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("construct", parents=[base], help="run a construction")
    c.add_argument("name", choices=["thmA", "infdiv", "isolated", "sparse", "products"])
    c.add_argument("--stages", type=int, required=True)
    c.add_argument("--out", dest="set_out", help="JSONL file for the emitted prefix")
    c.add_argument("--report", dest="out", help="write the JSON document here instead of stdout")
    c.add_argument("--cert", help="certificate JSON output")
    c.add_argument("--checkpoint", help="thmA: state written after each stage")
    c.add_argument("--resume", help="thmA: continue from a checkpoint")
    c.add_argument("--element", help="products: infinite-order element (default first generator)")

    ch = sub.add_parser("check", help="finite-window checks")
    csub = ch.add_subparsers(dest="check", required=True, parser_class=_Parser)
    for kind in ("bounded", "equiv"):
        k = csub.add_parser(kind, parents=[common])
        k.add_argument("--a", required=True)
        k.add_argument("--b", required=True)
        k.add_argument("--radius", type=int, required=True)
        k.add_argument("--max-norm", type=int, default=4)
        k.add_argument("--max-size", type=int, default=16)
        if kind == "bounded":
            k.add_argument("--witness", help="translators separated by ';'")
    k = csub.add_parser("divisible", parents=[common])
    k.add_argument("--set", required=True)
    k.add_argument("--n", type=int)
    k.add_argument("--witness", help='JSON {"parts": [...], "F": [[...], ...]}')
    k.add_argument("--level", type=int, help="use the emitted 2^level division of a constructed set")
    k.add_argument("--radius", type=int, required=True)
    k = csub.add_parser("absorbing", parents=[common])
    k.add_argument("--set", required=True)
    k.add_argument("--f-radius", type=int, required=True)
    k.add_argument("--search-radius", type=int, required=True)
    k = csub.add_parser("anti-absorbing", parents=[common])
    k.add_argument("--set", required=True)
    k.add_argument("--cert", required=True)
    k.add_argument("--radius", type=int, required=True)
    k = csub.add_parser("gap", parents=[common])
    k.add_argument("--set", required=True)
    k.add_argument("--targets", required=True)
    k.add_argument("--max-radius", type=int, default=256)
    k = csub.add_parser("paradoxical", parents=[common])
    k.add_argument("--set", required=True)
    k.add_argument("--witness", required=True)
    k.add_argument("--radius", type=int, required=True)

    lm = sub.add_parser("limits", help="translate limits")
    lsub = lm.add_subparsers(dest="limits", required=True, parser_class=_Parser)
    k = lsub.add_parser("patterns", parents=[common])
    k.add_argument("--set", required=True)
    k.add_argument("--radius", type=int, required=True)
    k.add_argument("--range", type=int, required=True)
    k.add_argument("--csv", help="also write pattern counts as CSV")
    k = lsub.add_parser("preorder", parents=[common])
    k.add_argument("--a", required=True)
    k.add_argument("--b", required=True)
    k.add_argument("--schedule", required=True)
    k.add_argument("--range", type=int, required=True)
    k = lsub.add_parser("minimal-probe", parents=[common])
    k.add_argument("--set", required=True)
    k.add_argument("--radius", type=int, required=True)
    k.add_argument("--range", type=int, required=True)

    idl = sub.add_parser("ideal", help="left ideals generated by sets")
    isub = idl.add_subparsers(dest="ideal", required=True, parser_class=_Parser)
    k = isub.add_parser("contains", parents=[common])
    k.add_argument("--gen", action="append", required=True, help="generator set (repeatable)")
    k.add_argument("--set", required=True)
    k.add_argument("--radius", type=int, required=True)
    k.add_argument("--max-norm", type=int, default=4)
    k.add_argument("--max-size", type=int, default=16)
    return p


_COMMANDS = {"construct": cmd_construct, "check": cmd_check, "limits": cmd_limits,
             "ideal": cmd_ideal}


def _dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, ensure_ascii=False, indent=2) + "\n"


def _text(doc, indent=0) -> str:
    pad = "  " * indent
    lines = []
    for k, v in doc.items():
        if isinstance(v, dict):
            lines.append(f"{pad}{k}:")
            lines.append(_text(v, indent + 1))
        else:
            lines.append(f"{pad}{k}: {json.dumps(v, ensure_ascii=False)}")
    return "\n".join(lines)


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        threads = _threads()
        try:
            G = parse_group(args.group)
        except GroupError as exc:
            raise UsageError(f"--group: {exc}") from None
        sub = getattr(args, args.command, None) if args.command != "construct" else args.name
        result, code = _COMMANDS[args.command](args, G)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (SpecError, MalformedWitness) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EX_USAGE if isinstance(exc, SpecError) else EX_DATAERR
    doc = {"tool": "coarse", "version": __version__, "command": f"{args.command} {sub}",
           "group": G.name, "threads": threads, "result": encode(G, result)}
    if not args.no_timestamp:
        doc["timestamp"] = dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds")
    text = _dumps(doc) if args.format == "json" else _text(doc) + "\n"
    if args.out:
        atomic_write(args.out, text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
