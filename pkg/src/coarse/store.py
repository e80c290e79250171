"""Named set specifications and the JSONL set format.

A JSONL file holds a header object, one element per line in canonical
syntax, and a closing frontier marker.  Elements are written in canonical
order, so writing a set read from a file reproduces the file byte for byte.
"""

from __future__ import annotations

import functools
import json
import math
import os

from .group_core import FreeGroup, GroupError, GroupModel, IntegerLattice
from .lazy_sets import INF, LazySet, union

FORMAT = "coarse-set/1"


class SpecError(ValueError):
    """A set specification could not be understood."""


# -- JSONL ------------------------------------------------------------------------

def dump_lines(A: LazySet, radius: int | None = None, provenance: dict | None = None) -> str:
    G = A.group
    if A.finite is not None and radius is None:
        elems = A._sorted_finite
        frontier = A.frontier
    else:
        if radius is None:
            raise ValueError("infinite sets need a radius to be written")
        elems = A.restrict(radius)
        frontier = radius if A.frontier == INF else min(radius, A.frontier)
    fr = None if frontier == INF else frontier
    head = {"format": FORMAT, "group": G.name, "order": "shortlex-zigzag/1",
            "tag": A.tag, "count": len(elems), "frontier": fr,
            "provenance": provenance or dict(A.meta)}
    lines = [json.dumps(head, sort_keys=True, ensure_ascii=False)]
    lines += [json.dumps(G.format(x), ensure_ascii=False) for x in elems]
    tail = {"frontier": fr}
    if "stage" in head["provenance"]:
        tail["stage"] = head["provenance"]["stage"]
    lines.append(json.dumps(tail, sort_keys=True))
    return "\n".join(lines) + "\n"


def atomic_write(path: str, text: str):
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def write_set(path: str, A: LazySet, radius: int | None = None, provenance=None):
    atomic_write(path, dump_lines(A, radius, provenance))


def read_set(path: str, G: GroupModel | None = None) -> LazySet:
    from .group_core import parse_group

    with open(path, encoding="utf-8") as fh:
        rows = [ln for ln in fh.read().splitlines() if ln.strip()]
    if not rows:
        raise SpecError(f"{path}: empty file")
    try:
        head = json.loads(rows[0])
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}: bad header: {exc}") from None
    if head.get("format") != FORMAT:
        raise SpecError(f"{path}: not a {FORMAT} file")
    fileG = parse_group(head["group"])
    if G is not None and G != fileG:
        raise GroupError(f"{path} holds a subset of {fileG.name}, not {G.name}")
    G = fileG
    body = rows[1:]
    tail = None
    if body and body[-1].startswith("{"):
        tail = json.loads(body.pop())
    elems = [G.parse(json.loads(r)) for r in body]
    if len(elems) != head.get("count", len(elems)):
        raise SpecError(f"{path}: header count {head['count']} but {len(elems)} elements")
    fr = head.get("frontier") if tail is None else tail.get("frontier")
    return LazySet.from_finite(G, elems, tag=head["tag"] if "tag" in head else os.path.basename(path),
                               frontier=INF if fr is None else fr,
                               meta=head.get("provenance") or {})


# -- named specs -----------------------------------------------------------------------

def _int_only(G, name):
    if not (isinstance(G, IntegerLattice) and G.dim == 1):
        raise SpecError(f"{name!r} is defined on Z only, not {G.name}")


def _is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def _z_sets(G, name, args):
    _int_only(G, f"Z:{name}")
    P = lambda f, sub=False: LazySet.from_predicate(G, lambda x: f(x[0]), tag=f"Z:{name}",
                                                    subgroup=sub)
    if name == "evens":
        return P(lambda n: n % 2 == 0, True)
    if name == "odds":
        return P(lambda n: n % 2 == 1)
    if name == "squares":
        return P(_is_square)
    if name == "naturals":
        return P(lambda n: n >= 1)
    if name == "naturals-negsquares":
        return P(lambda n: n >= 1 or (n < 0 and _is_square(-n)))
    if name == "mult":
        k = _arg_int(args, 0, "Z:mult:<k>")
        if k < 1:
            raise SpecError("Z:mult needs k >= 1")
        s = P(lambda n: n % k == 0, True)
        s.tag = f"Z:mult:{k}"
        return s
    if name == "coset":
        k = _arg_int(args, 0, "Z:coset:<k>:<r>")
        r = _arg_int(args, 1, "Z:coset:<k>:<r>")
        s = P(lambda n: n % k == r % k)
        s.tag = f"Z:coset:{k}:{r}"
        return s
    raise SpecError(f"unknown set 'Z:{name}'")


def _arg_int(args, i, form):
    try:
        return int(args[i])
    except (IndexError, ValueError):
        raise SpecError(f"expected {form}") from None


def _free_sets(G, name, args):
    if not isinstance(G, FreeGroup):
        raise SpecError(f"'F:{name}' is defined on free groups only, not {G.name}")
    if name == "first":
        if not args:
            raise SpecError("expected F:first:<letter>")
        w = G.parse(args[0])
        if len(w) != 1:
            raise SpecError("F:first needs a single letter")
        s = w[0]
        return LazySet.from_predicate(G, lambda x: bool(x) and x[0] == s, tag=f"F:first:{args[0]}")
    if name == "cyclic":
        if not args:
            raise SpecError("expected F:cyclic:<word>")
        w = G.parse(args[0])
        if not w:
            raise SpecError("F:cyclic needs a nontrivial word")

        wi = G._inv(w)

        @functools.lru_cache(maxsize=1 << 16)
        def member(x):
            # |w^n| is strictly increasing in |n|, so stop once powers outgrow x
            if not x:
                return True
            for step in (w, wi):
                p = step
                while len(p) <= len(x):
                    if p == x:
                        return True
                    p = G._mul(p, step)
            return False

        return LazySet.from_predicate(G, member, tag=f"F:cyclic:{args[0]}", subgroup=True)
    raise SpecError(f"unknown set 'F:{name}'")


def _lattice_sets(G, name, args):
    if not isinstance(G, IntegerLattice):
        raise SpecError(f"'Zd:{name}' is defined on Z^d only, not {G.name}")
    if name == "axis":
        i = _arg_int(args, 0, "Zd:axis:<i>") if args else 0
        if not 0 <= i < G.dim:
            raise SpecError(f"axis {i} out of range for {G.name}")
        return LazySet.from_predicate(G, lambda x: all(c == 0 for j, c in enumerate(x) if j != i),
                                      tag=f"Zd:axis:{i}", subgroup=True)
    raise SpecError(f"unknown set 'Zd:{name}'")


CONSTRUCTIONS = ("thmA", "infdiv", "isolated", "sparse")


def construct_set(G, name, stage):
    from . import constructions as C

    if name == "thmA":
        return C.build_thmA(G, stage, verify=False)[1]
    if name == "infdiv":
        return C.build_infdiv(G, stage)[1]
    if name == "isolated":
        return C.build_isolated_absorbing(G, stage).set
    if name == "sparse":
        return LazySet.from_finite(G, C.build_sparse_chain(G, stage).elements,
                                   tag=f"sparse[{stage}]", frontier=stage)
    raise SpecError(f"unknown construction {name!r}; expected one of {', '.join(CONSTRUCTIONS)}")


def parse_set(G: GroupModel, spec: str, field: str = "set") -> LazySet:
    """Build a LazySet from a spec string.  Unions are written with '|'."""
    try:
        return _parse(G, spec.strip())
    except SpecError as exc:
        raise SpecError(f"{field}: {exc}") from None
    except GroupError as exc:
        raise SpecError(f"{field}: {exc}") from None


def _parse(G, spec):
    if not spec:
        raise SpecError("empty set spec")
    if spec.startswith("file:"):
        return read_set(spec[5:], G)
    if "|" in spec:
        return union(*(_parse(G, s.strip()) for s in spec.split("|")))
    head, _, rest = spec.partition(":")
    args = rest.split(":") if rest else []
    if head in ("all", "G") or spec == "Z:all":
        return LazySet.from_predicate(G, lambda x: True, tag="all", subgroup=True)
    if head in ("e", "identity"):
        return LazySet.from_finite(G, [G.identity], tag="{e}")
    if head == "finite":
        elems = [G.parse(t) for t in rest.split(";") if t.strip()] if rest else []
        return LazySet.from_finite(G, elems, tag=f"finite:{rest}")
    if head == "construct":
        if len(args) != 2:
            raise SpecError("expected construct:<name>:<stage>")
        return construct_set(G, args[0], _arg_int(args, 1, "construct:<name>:<stage>"))
    if head == "Z":
        return _z_sets(G, args[0] if args else "", args[1:])
    if head == "F":
        return _free_sets(G, args[0] if args else "", args[1:])
    if head == "Zd":
        return _lattice_sets(G, args[0] if args else "", args[1:])
    raise SpecError(f"unknown set spec {spec!r}")
