"""Incremental refinement that only revisits triangles touching a freshly split color.

Each round looks at the triangles (u, w, v) where (u, w) or (w, v) carries a
color created in the previous round. Every basis arc (u, v) of such a triangle
collects the multiset of nonbasis color pairs; arcs of one color are regrouped
by that multiset, with untouched arcs forming the group of the empty multiset.
In every split class the largest group keeps the old id, so each arc changes
to a fresh color at most log2(n^2) times.

Grouping uses stable LSD radix passes over 16-bit digits (numpy's stable sort
on uint16 keys is a counting/radix sort), never hashing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import COLOR_DTYPE, ColorMatrix, StableResult, StructureConstants, transpose_closure
from .stabil import arc_fingerprint

__all__ = ["WorkSet", "StabcolStats", "radix_argsort", "stabcol_round", "stabcol_closure"]

_DIGIT_BITS = 16
_DIGIT_MASK = (1 << _DIGIT_BITS) - 1


def radix_argsort(keys: Sequence[np.ndarray]) -> np.ndarray:
    """Stable lexicographic argsort; ``keys[0]`` is the most significant key.

    Keys must be non-negative integers. Each key is consumed as base-2^16
    digits, least significant first, one stable bucket pass per digit.
    """
    if not keys:
        raise ValueError("need at least one key")
    size = keys[0].shape[0]
    perm = np.arange(size)
    for key in reversed(keys):
        key = np.asarray(key, dtype=np.int64)
        top = int(key.max()) if size else 0
        shift = 0
        while True:
            digit = ((key[perm] >> shift) & _DIGIT_MASK).astype(np.uint16)
            perm = perm[np.argsort(digit, kind="stable")]
            shift += _DIGIT_BITS
            if top >> shift == 0:
                break
    return perm


@dataclass(frozen=True, eq=False)
class WorkSet:
    """Colors created last round and the basis arcs of triangles that touch them."""

    new_colors: frozenset[int]
    touched: np.ndarray

    @classmethod
    def for_colors(cls, m: ColorMatrix, colors) -> WorkSet:
        colors = frozenset(int(c) for c in colors)
        if colors and (min(colors) < 0 or max(colors) >= m.r):
            raise ValueError("new colors must be existing color ids")
        is_new = np.zeros(m.r, dtype=bool)
        is_new[list(colors)] = True
        mask = is_new[m.colors]
        # (u, v) is touched iff some (u, w) or (w, v) is new
        touched = mask.any(axis=1)[:, None] | mask.any(axis=0)[None, :]
        touched.setflags(write=False)
        return cls(colors, touched)

    @classmethod
    def initial(cls, m: ColorMatrix) -> WorkSet:
        return cls.for_colors(m, range(m.r))

    @property
    def touched_arcs(self) -> set[tuple[int, int]]:
        return {(int(u), int(v)) for u, v in zip(*np.nonzero(self.touched))}

    def __bool__(self) -> bool:
        return bool(self.new_colors)


@dataclass
class StabcolStats:
    """Instrumentation: triangles examined per round and keeper sizes per split."""

    triangles: list[int] = field(default_factory=list)
    # (round, old color, size kept under old id, largest sibling size)
    splits: list[tuple[int, int, int, int]] = field(default_factory=list)

    @property
    def total_triangles(self) -> int:
        return sum(self.triangles)


def _triangles(colors: np.ndarray, is_new: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Basis arc index u*n+v and nonbasis pair (color(u,w), color(w,v)) of every triangle in T_M."""
    n = colors.shape[0]
    mask = is_new[colors]
    verts = np.arange(n)
    # first nonbasis arc (u, w) new: every v
    a_u, a_w = np.nonzero(mask)
    u1 = np.repeat(a_u, n)
    w1 = np.repeat(a_w, n)
    v1 = np.tile(verts, a_u.size)
    # second nonbasis arc (w, v) new and first one old: avoids counting twice
    b_w, b_v = np.nonzero(mask)
    u2 = np.tile(verts, b_w.size)
    w2 = np.repeat(b_w, n)
    v2 = np.repeat(b_v, n)
    keep = ~mask[u2, w2]
    u = np.concatenate([u1, u2[keep]])
    w = np.concatenate([w1, w2[keep]])
    v = np.concatenate([v1, v2[keep]])
    return u * n + v, np.stack([colors[u, w], colors[w, v]])


def stabcol_round(
    m: ColorMatrix, w: WorkSet, stats: StabcolStats | None = None
) -> tuple[ColorMatrix, WorkSet]:
    n, r = m.n, m.r
    if not w.new_colors:
        return m, WorkSet.for_colors(m, ())
    is_new = np.zeros(r, dtype=bool)
    is_new[list(w.new_colors)] = True
    basis, pairs = _triangles(m.colors, is_new)
    tau = basis.size
    round_no = len(stats.triangles) if stats is not None else 0
    if stats is not None:
        stats.triangles.append(tau)

    # S(u, v): triangles ordered by basis arc, then lexicographically by pair
    order = radix_argsort([basis, pairs[0], pairs[1]])
    sb = basis[order]
    code = pairs[0][order] * r + pairs[1][order] + 1  # 0 pads short lists
    starts = np.flatnonzero(np.r_[True, sb[1:] != sb[:-1]])
    lengths = np.diff(np.r_[starts, tau])
    arcs = sb[starts]
    slot = np.arange(tau) - np.repeat(starts, lengths)
    lists = np.zeros((arcs.size, int(lengths.max())), dtype=np.int64)
    lists[np.repeat(np.arange(arcs.size), lengths), slot] = code

    flat = m.colors.ravel()
    arc_color = flat[arcs]
    row_order = radix_argsort([arc_color] + [lists[:, j] for j in range(lists.shape[1])])
    srt = lists[row_order]
    scol = arc_color[row_order]
    boundary = np.r_[True, (scol[1:] != scol[:-1]) | (srt[1:] != srt[:-1]).any(axis=1)]
    gid = np.cumsum(boundary) - 1
    g_first = np.flatnonzero(boundary)
    g_color = scol[g_first]
    g_size = np.diff(np.r_[g_first, arcs.size])

    # untouched arcs of a touched color form the empty-multiset group
    touched_per_color = np.bincount(arc_color, minlength=r)
    untouched_per_color = np.bincount(flat, minlength=r) - touched_per_color
    hit = np.flatnonzero(touched_per_color)
    u_colors = hit[untouched_per_color[hit] > 0]
    all_color = np.r_[u_colors, g_color]
    all_size = np.r_[untouched_per_color[u_colors], g_size]
    all_seq = np.r_[np.full(u_colors.size, -1), np.arange(g_color.size)]

    # keeper: largest group per color, ties to the smallest multiset (empty first)
    by_size = np.lexsort((all_seq, -all_size, all_color))
    first_of_color = np.r_[True, all_color[by_size][1:] != all_color[by_size][:-1]]
    is_keeper = np.zeros(all_color.size, dtype=bool)
    is_keeper[by_size[first_of_color]] = True

    fresh_order = np.lexsort((all_seq, all_color))
    fresh_order = fresh_order[~is_keeper[fresh_order]]
    target = all_color.copy()
    target[fresh_order] = r + np.arange(fresh_order.size)

    if stats is not None and fresh_order.size:
        kept_size = np.zeros(r, dtype=np.int64)
        kept_size[all_color[is_keeper]] = all_size[is_keeper]
        sib = np.zeros(r, dtype=np.int64)
        np.maximum.at(sib, all_color[~is_keeper], all_size[~is_keeper])
        for k in np.unique(all_color[~is_keeper]).tolist():
            stats.splits.append((round_no, k, int(kept_size[k]), int(sib[k])))

    new_flat = flat.copy()
    n_u = u_colors.size
    new_flat[arcs[row_order]] = target[n_u:][gid]
    remap = np.arange(r, dtype=COLOR_DTYPE)
    remap[u_colors] = target[:n_u]
    untouched = np.ones(n * n, dtype=bool)
    untouched[arcs] = False
    new_flat[untouched] = remap[flat[untouched]]

    refined = ColorMatrix(new_flat.reshape(n, n))
    nxt = WorkSet.for_colors(refined, range(r, r + fresh_order.size))
    return refined, nxt


def stabcol_closure(
    m: ColorMatrix, with_constants: bool = False, stats: StabcolStats | None = None
) -> StableResult:
    cur = transpose_closure(m)
    work = WorkSet.initial(cur)
    rounds = 0
    while work:
        cur, work = stabcol_round(cur, work, stats)
        rounds += 1
    constants = None
    if with_constants:
        constants = _constants(cur)
    return StableResult(cur, rounds, constants)


def _constants(stable: ColorMatrix) -> StructureConstants:
    flat = stable.colors.ravel()
    first = np.full(stable.r, flat.size, dtype=np.int64)
    np.minimum.at(first, flat, np.arange(flat.size))
    vals: dict[tuple[int, int, int], int] = {}
    for k, pos in enumerate(first.tolist()):
        for i, j, p in arc_fingerprint(stable, pos // stable.n, pos % stable.n):
            vals[(i, j, k)] = p
    return StructureConstants(vals, stable.r, stable.n)
