"""Full-pass refinement: every arc is fingerprinted by its n triangles each iteration.

An arc (u, v) sees one triangle per vertex w, with nonbasis arcs (u, w) and
(w, v). Arcs of one color whose multisets of (color(u,w), color(w,v)) pairs
differ are split apart; the process repeats until no color splits.
"""

from __future__ import annotations

from collections import Counter
from typing import Iterator

import numpy as np

from .core import COLOR_DTYPE, ColorMatrix, Fingerprint, StableResult, StructureConstants, transpose_closure

__all__ = [
    "arc_fingerprint",
    "stabil_iteration",
    "iterate_stabil",
    "stabil_closure",
]

# upper bound on elements of the (block, n, n) code tensor held at once
_BLOCK_ELEMS = 1 << 22


def arc_fingerprint(m: ColorMatrix, u: int, v: int) -> Fingerprint:
    n = m.n
    if not (0 <= u < n and 0 <= v < n):
        raise IndexError(f"arc ({u}, {v}) out of range for n={n}")
    row = m.colors[u].tolist()
    col = m.colors[:, v].tolist()
    counts = Counter(zip(row, col))
    return tuple((i, j, p) for (i, j), p in sorted(counts.items()))


def _sorted_codes(colors: np.ndarray, r: int) -> Iterator[np.ndarray]:
    """Yield blocks of per-arc sorted pair codes, row-major over arcs.

    Code of the triangle (u, w, v) is colors[u, w] * r + colors[w, v]; a sorted
    row of n codes is an exact encoding of the arc's fingerprint.
    """
    n = colors.shape[0]
    step = max(1, _BLOCK_ELEMS // (n * n))
    left = colors * r
    right = colors.T
    for lo in range(0, n, step):
        block = left[lo : lo + step, None, :] + right[None, :, :]
        block.sort(axis=2)
        yield block.reshape(-1, n)


def _regroup(m: ColorMatrix) -> tuple[np.ndarray, int, dict[int, bytes]]:
    """One pass over all arcs: new color per arc, new rank, and one fingerprint per new color."""
    n, r = m.n, m.r
    old = m.colors.ravel().tolist()
    new = np.empty(n * n, dtype=COLOR_DTYPE)
    seen: dict[tuple[int, bytes], int] = {}
    kept = [False] * r
    reps: dict[int, bytes] = {}
    nxt = r
    idx = 0
    for block in _sorted_codes(m.colors, r):
        buf = block.tobytes()
        width = n * block.itemsize
        for off in range(0, len(buf), width):
            k = old[idx]
            key = (k, buf[off : off + width])
            c = seen.get(key)
            if c is None:
                if kept[k]:
                    c = nxt
                    nxt += 1
                else:
                    c = k
                    kept[k] = True
                seen[key] = c
                reps[c] = key[1]
            new[idx] = c
            idx += 1
    return new.reshape(n, n), nxt, reps


def stabil_iteration(m: ColorMatrix) -> tuple[ColorMatrix, bool]:
    """Split every color class by fingerprint.

    The group holding the first arc of a class in row-major order keeps the old
    id; the other groups get fresh ids r, r+1, ... in order of first occurrence.
    """
    colors, r_new, _ = _regroup(m)
    return ColorMatrix(colors), r_new > m.r


def iterate_stabil(m: ColorMatrix) -> Iterator[tuple[ColorMatrix, bool]]:
    """Yield (matrix, changed) after every pass, ending with the first unchanged pass.

    Starts from the transpose-closed refinement of ``m``, as the closure does.
    """
    cur = transpose_closure(m)
    while True:
        nxt, changed = stabil_iteration(cur)
        yield nxt, changed
        if not changed:
            return
        cur = nxt


def _decode(buf: bytes, r: int) -> dict[tuple[int, int], int]:
    codes = np.frombuffer(buf, dtype=COLOR_DTYPE)
    vals, counts = np.unique(codes, return_counts=True)
    return {(int(c) // r, int(c) % r): int(p) for c, p in zip(vals, counts)}


def stabil_closure(m: ColorMatrix, with_constants: bool = False) -> StableResult:
    """Fingerprint passes to the fixpoint, after making the input transpose-closed.

    ``iterations`` counts fingerprint passes including the one that confirms
    stability.
    """
    cur = transpose_closure(m)
    iterations = 0
    while True:
        colors, r_new, reps = _regroup(cur)
        iterations += 1
        if r_new == cur.r:
            break
        cur = ColorMatrix(colors)
    constants = None
    if with_constants:
        vals: dict[tuple[int, int, int], int] = {}
        for k, buf in reps.items():
            for (i, j), p in _decode(buf, cur.r).items():
                vals[(i, j, k)] = p
        constants = StructureConstants(vals, cur.r, cur.n)
    return StableResult(cur, iterations, constants)
