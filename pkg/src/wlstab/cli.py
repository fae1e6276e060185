"""Command-line front end.

Input format: line 1 the declared number of colors, line 2 the vertex count n,
then n lines of n whitespace-separated non-negative integers.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
import time
from typing import IO, Iterable, Sequence

import numpy as np

from .core import ColorMatrix, StableResult, canonical_relabel, normalize
from .degree import preprocess_recolor
from .generators import FAMILIES
from .oracle import structure_constants, symbolic_closure, verify_coherent
from .stabcol import stabcol_closure
from .stabil import stabil_closure

__all__ = ["ParseError", "parse_input", "format_matrix", "emit_result", "closure", "run", "main"]

log = logging.getLogger(__name__)

ENGINES = ("stabil", "stabcol", "symbolic")

# smallest parameter for which the family's orbit-count formula holds
BENCH_START = {"benzene": 1, "moebius": 4, "dynkin": 5}


class ParseError(ValueError):
    def __init__(self, line: int, msg: str):
        super().__init__(f"line {line}: {msg}")
        self.line = line


def _int_fields(text: str, lineno: int) -> list[int]:
    try:
        vals = [int(tok) for tok in text.split()]
    except ValueError as exc:
        raise ParseError(lineno, f"malformed integer ({exc})") from None
    if any(v < 0 for v in vals):
        raise ParseError(lineno, "negative entry")
    return vals


def parse_input(stream: IO[str] | Iterable[str]) -> ColorMatrix:
    lines = [(i, ln) for i, ln in enumerate(stream, start=1) if ln.strip()]
    if len(lines) < 2:
        raise ParseError(len(lines) + 1, "expected a color count and a vertex count")
    (l_r, t_r), (l_n, t_n) = lines[0], lines[1]
    head_r = _int_fields(t_r, l_r)
    head_n = _int_fields(t_n, l_n)
    if len(head_r) != 1:
        raise ParseError(l_r, "expected a single color count")
    if len(head_n) != 1 or head_n[0] < 1:
        raise ParseError(l_n, "expected a single positive vertex count")
    declared, n = head_r[0], head_n[0]
    body = lines[2:]
    if len(body) != n:
        if len(body) > n:
            where = body[n][0]  # first surplus row
        else:
            where = body[-1][0] + 1 if body else l_n + 1
        raise ParseError(where, f"expected {n} matrix rows, found {len(body)}")
    rows = []
    for lineno, text in body:
        vals = _int_fields(text, lineno)
        if len(vals) != n:
            raise ParseError(lineno, f"expected {n} entries, found {len(vals)}")
        rows.append(vals)
    raw = np.array(rows, dtype=np.int64)
    observed = np.unique(raw).size
    if observed != declared:
        log.warning("declared %d colors but the matrix has %d distinct entries", declared, observed)
    return normalize(raw)


def format_matrix(m: ColorMatrix) -> str:
    return "\n".join(" ".join(str(c) for c in row) for row in m.tolist())


def format_input(m: ColorMatrix) -> str:
    return f"{m.r}\n{m.n}\n{format_matrix(m)}\n"


def emit_result(res: StableResult, constants: bool = False) -> str:
    """Header lines, the canonical stable matrix, then optional ``p i j k p`` lines."""
    canon, mapping = canonical_relabel(res.stable)
    out = [f"rank={res.rank}", f"cells={res.cells}", f"iterations={res.iterations}", format_matrix(canon)]
    if constants:
        table = res.constants if res.constants is not None else structure_constants(res.stable)
        table = table.relabel(mapping.tolist())
        for (i, j, k), p in sorted(table.items(), key=lambda kv: (kv[0][2], kv[0][0], kv[0][1])):
            out.append(f"p {i} {j} {k} {p}")
    return "\n".join(out) + "\n"


def closure(
    m: ColorMatrix, engine: str = "stabil", preprocess: bool = False, constants: bool = False
) -> StableResult:
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}")
    if preprocess:
        m = preprocess_recolor(m)
    if engine == "stabil":
        return stabil_closure(m, with_constants=constants)
    if engine == "stabcol":
        return stabcol_closure(m, with_constants=constants)
    res = symbolic_closure(m)
    if constants:
        res = StableResult(res.stable, res.iterations, structure_constants(res.stable))
    return res


def _read(path: str | None) -> ColorMatrix:
    if path is None or path == "-":
        return parse_input(sys.stdin)
    with open(path, encoding="utf-8") as fh:
        return parse_input(fh)


def _cmd_close(args, out: IO[str]) -> int:
    m = _read(args.input)
    res = closure(m, args.engine, args.preprocess, args.constants)
    out.write(emit_result(res, args.constants))
    if args.verify:
        verdict = verify_coherent(res.stable)
        out.write(f"verify={verdict.report()}\n")
        return 0 if verdict.ok else 1
    return 0


def _cmd_gen(args, out: IO[str]) -> int:
    build, _ = FAMILIES[args.family]
    out.write(format_input(build(args.param)))
    return 0


def _cmd_verify(args, out: IO[str]) -> int:
    verdict = verify_coherent(_read(args.input))
    out.write(verdict.report() + "\n")
    return 0 if verdict.ok else 1


def _cmd_bench(args, out: IO[str]) -> int:
    build, lowest = FAMILIES[args.family]
    start = args.min if args.min is not None else BENCH_START[args.family]
    if start < lowest:
        raise ValueError(f"{args.family} needs a parameter >= {lowest}")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["family", "param", "n", "cells", "colors", "ms"])
    for param in range(start, args.max + 1, args.step):
        m = build(param)
        t0 = time.perf_counter()
        res = closure(m, args.engine)
        ms = (time.perf_counter() - t0) * 1000.0
        writer.writerow([args.family, param, m.n, res.cells, res.rank, f"{ms:.1f}"])
    return 0


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wlstab", description="Weisfeiler-Leman coherent closure")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("close", help="compute the stable coloring of a matrix file")
    c.add_argument("input", nargs="?", help="matrix file (default: stdin)")
    c.add_argument("--engine", choices=ENGINES, default="stabil")
    c.add_argument("--preprocess", action="store_true", help="recolor by vertex valencies first")
    c.add_argument("--constants", action="store_true", help="print structure constants")
    c.add_argument("--verify", action="store_true", help="check the coherence axioms on the result")
    c.set_defaults(func=_cmd_close)

    g = sub.add_parser("gen", help="write a benchmark graph in the input format")
    g.add_argument("--family", choices=sorted(FAMILIES), required=True)
    g.add_argument("--param", type=int, required=True)
    g.set_defaults(func=_cmd_gen)

    v = sub.add_parser("verify", help="check whether a matrix is already coherent")
    v.add_argument("input", nargs="?")
    v.set_defaults(func=_cmd_verify)

    b = sub.add_parser("bench", help="sweep a family and report counts and wall time as CSV")
    b.add_argument("--family", choices=sorted(FAMILIES), required=True)
    b.add_argument("--max", type=int, required=True)
    b.add_argument("--min", type=int)
    b.add_argument("--step", type=int, default=1)
    b.add_argument("--engine", choices=ENGINES, default="stabil")
    b.set_defaults(func=_cmd_bench)
    return p


def run(argv: Sequence[str] | None = None, out: IO[str] | None = None) -> int:
    out = out if out is not None else sys.stdout
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except (ValueError, OSError) as exc:
        print(f"wlstab: error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    logging.basicConfig(level=logging.WARNING, format="wlstab: warning: %(message)s", stream=sys.stderr)
    sys.exit(run())
