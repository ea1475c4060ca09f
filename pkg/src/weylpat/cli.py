"""``weylpat`` command line.

Exit status: 0 on success, 1 when a verification fails, 2 on usage errors
(unknown pattern, malformed matrix, rank cap exceeded, bad flags).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Optional, Sequence

from . import __version__
from .anmap import RankMismatch as ANRankMismatch
from .anmap import find_an_maps, paper_t_ambient
from .chamber import DEFAULT_RANK_CAP as CHAMBER_RANK_CAP
from .chamber import RankCapExceeded as ChamberRankCap
from .chamber import chambers, subdivision_report
from .claims import FAIL, run_all
from .embedsearch import DEFAULT_RANK_CAP as EMBED_RANK_CAP
from .embedsearch import RankCapExceeded, RankMismatch, classify, find_embeddings
from .embedsearch import first_form_ambient, second_form_ambient, to_intrinsic
from .exactlin import DimensionError, RationalMatrix, SingularMatrixError, distortion, fraction_to_str, is_conformal
from .pattern import maximal_families, pattern_from_spec, pattern_of, relatedness_graph, triads
from .rootsystem import UnsupportedRootSystem, build_root_system, parse_spec
from .weylgroup import generate

SCHEMA_VERSION = 1
INFO_CHAMBER_RANK = 4

NAMED_MAPS = {
    "paper-t": paper_t_ambient,
    "first-form": first_form_ambient,
    "second-form": second_form_ambient,
}


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# Parsing helpers


def parse_matrix(text: str) -> RationalMatrix:
    """Rows separated by ``;``, entries by ``,`` or whitespace; entries like ``3``, ``-1/2``.

    A JSON nested list (of numbers or "num/den" strings) is accepted too.
    """
    text = text.strip()
    try:
        if text.startswith("["):
            rows = [[Fraction(str(x)) for x in row] for row in json.loads(text)]
        else:
            rows = [[Fraction(x) for x in r.replace(",", " ").split()] for r in text.split(";") if r.strip()]
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise UsageError(f"malformed matrix {text!r}: {exc}") from None
    if not rows or any(len(r) != len(rows[0]) for r in rows) or not rows[0]:
        raise UsageError(f"malformed matrix {text!r}: rows must be nonempty and of equal length")
    return RationalMatrix(rows)


def _pattern(text: str):
    try:
        return pattern_from_spec(text)
    except UnsupportedRootSystem as exc:
        raise UsageError(str(exc)) from None


def _system(text: str):
    try:
        return build_root_system(*parse_spec(text))
    except UnsupportedRootSystem as exc:
        raise UsageError(str(exc)) from None


def resolve_map(name: str, rank: Optional[int]) -> RationalMatrix:
    if name in NAMED_MAPS:
        if rank is None:
            raise UsageError(f"--map {name} needs a rank")
        try:
            return NAMED_MAPS[name](rank)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    return parse_matrix(name)


def load_config(path: Optional[str]) -> dict:
    if path is None:
        return {}
    try:
        import tomllib
    except ModuleNotFoundError:  # Python < 3.11
        import tomli as tomllib
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    allowed = {"threads", "rank_cap", "rank_max"}
    unknown = set(data) - allowed
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    return data


# ---------------------------------------------------------------------------
# Output


def emit(args, payload: dict, text_lines: Sequence[str]) -> None:
    if args.json:
        out = {"schema_version": SCHEMA_VERSION, "command": args.command}
        out.update(payload)
        print(json.dumps(out, indent=2, sort_keys=False))
    else:
        for line in text_lines:
            print(line)


def _vec(v):
    return [fraction_to_str(x) for x in v]


# ---------------------------------------------------------------------------
# Commands


def cmd_info(args, cfg) -> int:
    p = _pattern(args.pattern)
    rs = p.origin_system
    w = generate(p)
    count_chambers = args.chambers or p.rank <= INFO_CHAMBER_RANK
    n_ch = len(chambers(p, rank_cap=max(p.rank, CHAMBER_RANK_CAP))) if count_chambers else None
    payload = {
        "root_system": rs.to_json(),
        "flags": list(rs.flags),
        "pattern": p.name,
        "hyperplanes": len(p),
        "hyperplane_labels": p.labels(),
        "weyl_order": w.order,
        "chambers": n_ch,
        "triads": len(triads(p)),
    }
    lines = [
        f"root system: {rs.name} ({len(rs.positive_roots)} positive roots)",
        f"pattern: {p.name}",
        f"hyperplanes: {len(p)}",
        f"Weyl order: {w.order}",
        f"chambers: {n_ch if n_ch is not None else 'not enumerated (pass --chambers)'}",
        f"triads: {len(triads(p))}",
    ]
    if rs.flags:
        lines.append("notes: " + "; ".join(rs.flags))
    emit(args, payload, lines)
    return 0


def cmd_families(args, cfg) -> int:
    p = _pattern(args.pattern)
    fams = maximal_families(p)
    g = relatedness_graph(p)
    payload = {"pattern": p.name, "families": [f.to_json() for f in fams], "related_pairs": g.number_of_edges()}
    lines = [f"{p.name}: {len(fams)} maximal families"]
    for f in fams:
        kind = "large" if f.large else "small"
        labels = ", ".join(h.label(p.sum_zero) for h in sorted(f.members))
        lines.append(f"  [{len(f)} {kind}] {labels}")
    emit(args, payload, lines)
    return 0


def _rank_cap(args, cfg, default):
    cap = args.rank_cap if getattr(args, "rank_cap", None) is not None else cfg.get("rank_cap", default)
    return int(cap)


def cmd_embed(args, cfg) -> int:
    src, dst = _pattern(args.src), _pattern(args.dst)
    try:
        embs = find_embeddings(src, dst, rank_cap=_rank_cap(args, cfg, EMBED_RANK_CAP), workers=args.threads)
    except (RankMismatch, RankCapExceeded) as exc:
        raise UsageError(str(exc)) from None
    if args.classes:
        classes = classify(embs)
        payload = {"src": src.name, "dst": dst.name, "embeddings": len(embs), "classes": [c.to_json() for c in classes]}
        lines = [f"{src.name} -> {dst.name}: {len(embs)} embeddings, {len(classes)} classes"]
        for k, c in enumerate(classes):
            d = c.distortion
            kind = "conformal" if c.conformal else f"K in [{float(d.lower):.7f}, {float(d.upper):.7f}]"
            lines.append(f"  class {k}: size {c.size}, {kind}")
            lines.append(f"    matrix {c.representative.ambient_matrix.to_strings()}")
            lines.append(f"    image  {', '.join(c.representative.image_labels())}")
    else:
        payload = {
            "src": src.name,
            "dst": dst.name,
            "embeddings": [
                {"matrix": e.ambient_matrix.to_strings(), "basis_matrix": e.matrix.to_strings(), "assignment": list(e.assignment)}
                for e in embs
            ],
        }
        lines = [f"{src.name} -> {dst.name}: {len(embs)} embeddings (up to scaling)"]
        lines += [f"  {list(e.assignment)}" for e in embs[: args.limit]]
        if len(embs) > args.limit:
            lines.append(f"  ... {len(embs) - args.limit} more (use --json or --classes)")
    emit(args, payload, lines)
    return 0


def cmd_anmap(args, cfg) -> int:
    src, dst = _system(args.src), _system(args.dst)
    try:
        maps = find_an_maps(src, dst)
    except ANRankMismatch as exc:
        raise UsageError(str(exc)) from None
    payload = {"src": src.name, "dst": dst.name, "maps": [m.to_json() for m in maps]}
    lines = [f"{src.name} -> {dst.name}: {len(maps)} AN-maps"]
    for m in maps:
        lines.append(f"  matrix {m.ambient_matrix.to_strings()}")
        for lam, eta in m.correspondence:
            lines.append(f"    {_vec(lam)} <- {_vec(eta)}")
    emit(args, payload, lines)
    return 0


def cmd_subdivide(args, cfg) -> int:
    src, dst = _pattern(args.src), _pattern(args.dst)
    t = resolve_map(args.map, src.rank)
    try:
        rep = subdivision_report(t, src, dst)
    except (ValueError, ChamberRankCap, DimensionError) as exc:
        raise UsageError(str(exc)) from None
    payload = {"src": src.name, "dst": dst.name, "map": args.map, "report": rep.to_json()}
    lines = [f"{src.name} -> {dst.name} under {args.map}"]
    lines += [f"  {label}: {count}" for label, count in zip(rep.labels, rep.counts)]
    lines.append(f"  total {rep.total}, average {fraction_to_str(rep.average)}")
    emit(args, payload, lines)
    return 0


def cmd_distortion(args, cfg) -> int:
    rank = args.rank
    src = _pattern(args.src) if args.src else None
    dst = _pattern(args.dst) if args.dst else None
    if args.map in NAMED_MAPS:
        if rank is None and src is not None:
            rank = src.rank
        if rank is None:
            raise UsageError(f"--map {args.map} needs --rank or --src")
        src = src or _pattern(f"A{rank}")
        dst = dst or _pattern(f"{'C' if args.map == 'paper-t' else 'BC'}{rank}")
    t = resolve_map(args.map, rank)
    gram_src = gram_dst = None
    if src is not None and dst is not None:
        m = to_intrinsic(t, src, dst) if t.shape != (dst.rank, src.rank) else t
        if m is None:
            raise UsageError("map does not carry the source space into the target space")
        t, gram_src, gram_dst = m, src.gram, dst.gram
    eps = Fraction(args.precision)
    try:
        bound = distortion(t, eps, gram_src, gram_dst)
    except (DimensionError, SingularMatrixError) as exc:
        raise UsageError(str(exc)) from None
    c = is_conformal(t, gram_src, gram_dst)
    payload = {"map": args.map, "distortion": bound.to_json(), "conformal": c is not None}
    lines = [
        f"K in [{fraction_to_str(bound.lower)}, {fraction_to_str(bound.upper)}]",
        f"   ~ [{float(bound.lower):.9f}, {float(bound.upper):.9f}]",
        f"conformal: {'yes, scalar ' + fraction_to_str(c) if c is not None else 'no'}",
    ]
    emit(args, payload, lines)
    return 0


def cmd_verify(args, cfg) -> int:
    rank_max = args.rank_max if args.rank_max is not None else cfg.get("rank_max")
    only = set(args.claim) if args.claim else None
    outcomes = run_all(rank_max, args.threads, only)
    payload = {"rank_max": rank_max, "outcomes": [o.to_json() for o in outcomes]}
    lines = [f"[{o.status.upper():7}] claim {o.claim_id:2d} ({o.seconds:6.2f}s) {o.locus}" for o in outcomes]
    emit(args, payload, lines)
    return 1 if any(o.status == FAIL for o in outcomes) else 0


# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit JSON (schema_version 1)")
    common.add_argument("--threads", type=int, default=None, help="worker processes for searches")
    common.add_argument("--config", default=None, help="TOML file with threads / rank_cap / rank_max")

    parser = _Parser(prog="weylpat", description="Weyl patterns, pattern embeddings and AN-maps, exactly.")
    parser.add_argument("--version", action="version", version=f"weylpat {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("info", parents=[common], help="pattern sizes, Weyl order, chamber count")
    p.add_argument("pattern")
    p.add_argument("--chambers", action="store_true", help=f"enumerate chambers above rank {INFO_CHAMBER_RANK}")

    p = sub.add_parser("families", parents=[common], help="maximal families of related hyperplanes")
    p.add_argument("pattern")

    p = sub.add_parser("embed", parents=[common], help="all pattern embeddings between equal-rank patterns")
    p.add_argument("src")
    p.add_argument("dst")
    p.add_argument("--classes", action="store_true", help="reduce by the Weyl groups and report classes")
    p.add_argument("--rank-cap", type=int, default=None)
    p.add_argument("--limit", type=int, default=20, help="assignments shown in text mode")

    p = sub.add_parser("anmap", parents=[common], help="all AN-maps between equal-rank root systems")
    p.add_argument("src")
    p.add_argument("dst")

    p = sub.add_parser("subdivide", parents=[common], help="chambers met by the image of each chamber")
    p.add_argument("src")
    p.add_argument("dst")
    p.add_argument("--map", required=True, help="paper-t, first-form, second-form or a matrix like '1,0;0,1'")

    p = sub.add_parser("distortion", parents=[common], help="quasiconformal distortion of a linear map")
    p.add_argument("--map", required=True)
    p.add_argument("--rank", type=int, default=None, help="rank n for named maps")
    p.add_argument("--src", default=None, help="source pattern giving the inner product")
    p.add_argument("--dst", default=None, help="target pattern giving the inner product")
    p.add_argument("--precision", default="1/1000000")

    p = sub.add_parser("verify", parents=[common], help="replay the registered classification claims")
    p.add_argument("--rank-max", type=int, default=None)
    p.add_argument("--claim", type=int, action="append", help="run only this claim id (repeatable)")
    return parser


COMMANDS = {
    "info": cmd_info,
    "families": cmd_families,
    "embed": cmd_embed,
    "anmap": cmd_anmap,
    "subdivide": cmd_subdivide,
    "distortion": cmd_distortion,
    "verify": cmd_verify,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a command is required: " + ", ".join(COMMANDS))
        cfg = load_config(args.config)
        if args.threads is None:
            args.threads = int(cfg.get("threads", 1))
        if args.threads < 1:
            raise UsageError("--threads must be positive")
        return COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        print(f"weylpat: error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
