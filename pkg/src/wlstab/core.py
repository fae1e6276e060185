"""Colored complete directed graphs and the matrix-level views shared by all engines.

A coloring of the n*n positions of a square matrix is stored as a ColorMatrix:
diagonal entries are vertex colors, off-diagonal entries are arc colors, and the
two sets of ids never overlap.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

__all__ = [
    "ShapeError",
    "NotStableError",
    "ColorMatrix",
    "Coloring",
    "Fingerprint",
    "StructureConstants",
    "StableResult",
    "normalize",
    "canonical_form",
    "canonical_relabel",
    "same_partition",
    "is_automorphism",
    "cells",
    "coloring",
    "permute",
    "transpose_closure",
]

# color ids must hold up to n*n distinct values
COLOR_DTYPE = np.int64

# sorted (i, j, p) triples with p >= 1
Fingerprint = tuple[tuple[int, int, int], ...]


class ShapeError(ValueError):
    """Raised for non-square input or a size mismatch between matrices."""


class NotStableError(ValueError):
    """Raised when arcs of one color disagree on their triangle counts."""


@dataclass(frozen=True, eq=False)
class ColorMatrix:
    """Immutable n*n matrix of color ids with dense numbering 0..r-1.

    Construction validates the invariants; use :func:`normalize` to build one
    from an arbitrary integer matrix.
    """

    colors: np.ndarray
    n: int = field(init=False)
    r: int = field(init=False)

    def __post_init__(self) -> None:
        a = np.array(self.colors, dtype=COLOR_DTYPE, copy=True)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ShapeError(f"expected a square matrix, got shape {a.shape}")
        n = a.shape[0]
        if n < 1:
            raise ShapeError("a color matrix needs at least one vertex")
        if a.min() < 0:
            raise ValueError("color ids must be non-negative")
        present = np.zeros(int(a.max()) + 1, dtype=bool)
        present[a.ravel()] = True
        if not present.all():
            missing = np.flatnonzero(~present)[:5].tolist()
            raise ValueError(f"color ids are not dense; missing {missing}")
        diag = np.zeros_like(present)
        diag[np.diagonal(a)] = True
        off = a[~np.eye(n, dtype=bool)]
        if off.size and diag[off].any():
            shared = sorted(set(off[diag[off]].tolist()))[:5]
            raise ValueError(f"colors {shared} occur both on and off the diagonal")
        a.setflags(write=False)
        object.__setattr__(self, "colors", a)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "r", present.size)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ColorMatrix):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self.colors, other.colors))

    def __hash__(self) -> int:
        return hash((self.n, self.colors.tobytes()))

    def __repr__(self) -> str:
        return f"ColorMatrix(n={self.n}, r={self.r})"

    def __getitem__(self, pos: tuple[int, int]) -> int:
        return int(self.colors[pos])

    @property
    def diagonal_colors(self) -> list[int]:
        """Distinct vertex colors in order of first appearance on the diagonal."""
        return list(dict.fromkeys(np.diagonal(self.colors).tolist()))

    @property
    def num_cells(self) -> int:
        return len(set(np.diagonal(self.colors).tolist()))

    def class_sizes(self) -> np.ndarray:
        return np.bincount(self.colors.ravel(), minlength=self.r)

    def tolist(self) -> list[list[int]]:
        return self.colors.tolist()


@dataclass(frozen=True)
class Coloring:
    """Inverse view of a ColorMatrix: the arcs carrying each color."""

    arcs: dict[int, list[tuple[int, int]]]
    diagonal: dict[int, bool]

    @property
    def sizes(self) -> dict[int, int]:
        return {k: len(v) for k, v in self.arcs.items()}


@dataclass(frozen=True)
class StructureConstants:
    """Sparse table (i, j, k) -> p_ij^k of a stable coloring; zeros omitted."""

    values: dict[tuple[int, int, int], int]
    rank: int
    n: int

    def __post_init__(self) -> None:
        for (i, j, k), p in self.values.items():
            if not (0 <= i < self.rank and 0 <= j < self.rank and 0 <= k < self.rank):
                raise ValueError(f"key {(i, j, k)} out of range for rank {self.rank}")
            if p < 1:
                raise ValueError(f"zero or negative constant stored at {(i, j, k)}")

    def __getitem__(self, key: tuple[int, int, int]) -> int:
        return self.values.get(key, 0)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[tuple[int, int, int]]:
        return iter(self.values)

    def items(self):
        return self.values.items()

    def row_sums(self) -> dict[int, int]:
        """Sum over (i, j) of p_ij^k, per k. Equals n on a valid table."""
        out: dict[int, int] = {}
        for (_, _, k), p in self.values.items():
            out[k] = out.get(k, 0) + p
        return out

    def relabel(self, mapping: Sequence[int]) -> StructureConstants:
        """Rename colors through ``mapping[old] = new``."""
        vals = {(mapping[i], mapping[j], mapping[k]): p for (i, j, k), p in self.values.items()}
        return StructureConstants(vals, self.rank, self.n)

    def multiset(self) -> list[int]:
        return sorted(self.values.values())


@dataclass(frozen=True)
class StableResult:
    stable: ColorMatrix
    iterations: int
    constants: StructureConstants | None = None

    def __post_init__(self) -> None:
        if self.iterations < 1:
            raise ValueError("a closure always performs at least one pass")

    @property
    def rank(self) -> int:
        return self.stable.r

    @property
    def cells(self) -> int:
        return self.stable.num_cells


def _first_occurrence_ids(a: np.ndarray) -> np.ndarray:
    """Renumber the values of ``a`` by first appearance in row-major order."""
    flat = a.ravel()
    _, first, inverse = np.unique(flat, return_index=True, return_inverse=True)
    rank = np.empty(first.size, dtype=COLOR_DTYPE)
    rank[np.argsort(first, kind="stable")] = np.arange(first.size, dtype=COLOR_DTYPE)
    return rank[inverse.ravel()].reshape(a.shape)


def normalize(raw: Sequence[Sequence[int]] | np.ndarray) -> ColorMatrix:
    """Build a ColorMatrix from any square non-negative integer matrix.

    A value used both on and off the diagonal is split in two; the classes are
    otherwise kept and renumbered by first occurrence in a row-major scan.
    """
    a = np.asarray(raw)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise ShapeError(f"expected a non-empty square matrix, got shape {a.shape}")
    if a.dtype.kind not in "iu":
        if a.dtype.kind == "b":
            a = a.astype(COLOR_DTYPE)
        elif a.dtype.kind == "f" and np.all(np.mod(a, 1) == 0):
            a = a.astype(COLOR_DTYPE)
        else:
            raise ValueError("color matrix entries must be integers")
    if a.size and a.min() < 0:
        raise ValueError("color matrix entries must be non-negative")
    n = a.shape[0]
    keyed = a.astype(COLOR_DTYPE) * 2 + (~np.eye(n, dtype=bool)).astype(COLOR_DTYPE)
    return ColorMatrix(_first_occurrence_ids(keyed))


def transpose_closure(m: ColorMatrix) -> ColorMatrix:
    """Refine so that the color of (u, v) determines the color of (v, u).

    Positions are regrouped by the pair (colors(u, v), colors(v, u)). Within
    each old color the group of the first position in row-major order keeps
    the old id and the other groups get fresh ids r, r+1, ... in
    first-occurrence order. Returns ``m`` itself when nothing splits.
    """
    n, r = m.n, m.r
    key = (m.colors * r + m.colors.T).ravel()
    uniq, first, inverse = np.unique(key, return_index=True, return_inverse=True)
    if uniq.size == r:
        return m
    inverse = inverse.ravel()
    old = uniq // r
    by_first = np.argsort(first, kind="stable")
    seen = np.zeros(r, dtype=bool)
    ids = np.empty(uniq.size, dtype=COLOR_DTYPE)
    fresh = r
    for g in by_first.tolist():
        c = int(old[g])
        if not seen[c]:
            seen[c] = True
            ids[g] = c
        else:
            ids[g] = fresh
            fresh += 1
    return ColorMatrix(ids[inverse].reshape(n, n))


def canonical_relabel(m: ColorMatrix) -> tuple[ColorMatrix, np.ndarray]:
    """Return the canonical form together with ``mapping[old] = new``."""
    n = m.n
    flat = m.colors.ravel()
    first = np.full(m.r, flat.size, dtype=np.int64)
    np.minimum.at(first, flat, np.arange(flat.size))
    is_diag = np.zeros(m.r, dtype=bool)
    is_diag[np.diagonal(m.colors)] = True
    order = np.lexsort((first, ~is_diag))
    mapping = np.empty(m.r, dtype=COLOR_DTYPE)
    mapping[order] = np.arange(m.r, dtype=COLOR_DTYPE)
    return ColorMatrix(mapping[m.colors].reshape(n, n)), mapping


def canonical_form(m: ColorMatrix) -> ColorMatrix:
    """Vertex colors first, then arc colors; each group in row-major first-occurrence order."""
    return canonical_relabel(m)[0]


def same_partition(a: ColorMatrix, b: ColorMatrix) -> bool:
    """True iff ``a`` and ``b`` induce the same partition of the n*n positions."""
    if a.n != b.n:
        raise ShapeError(f"size mismatch: {a.n} vs {b.n}")
    if a.r != b.r:
        return False
    # a bijection between color ids exists iff the pair map is functional both ways
    pairs = np.unique(a.colors.ravel() * b.r + b.colors.ravel())
    return pairs.size == a.r


def _check_perm(perm: Sequence[int], n: int) -> np.ndarray:
    p = np.asarray(perm, dtype=np.int64)
    if p.shape != (n,) or not np.array_equal(np.sort(p), np.arange(n)):
        raise ValueError(f"not a permutation of 0..{n - 1}: {list(perm)}")
    return p


def is_automorphism(perm: Sequence[int], m: ColorMatrix) -> bool:
    """``perm[u]`` is the image of vertex u; checks colors(u,v) == colors(perm u, perm v)."""
    p = _check_perm(perm, m.n)
    return bool(np.array_equal(m.colors, m.colors[np.ix_(p, p)]))


def permute(m: ColorMatrix, perm: Sequence[int]) -> ColorMatrix:
    """Relabel vertices so that vertex u becomes ``perm[u]``."""
    p = _check_perm(perm, m.n)
    out = np.empty_like(m.colors)
    out[np.ix_(p, p)] = m.colors
    return ColorMatrix(out)


def cells(m: ColorMatrix) -> list[list[int]]:
    """Vertex classes by diagonal color, in canonical color order."""
    groups: dict[int, list[int]] = {}
    for u, c in enumerate(np.diagonal(m.colors).tolist()):
        groups.setdefault(c, []).append(u)
    return list(groups.values())


def coloring(m: ColorMatrix) -> Coloring:
    flat = m.colors.ravel()
    order = np.argsort(flat, kind="stable")
    bounds = np.cumsum(np.bincount(flat, minlength=m.r))[:-1]
    arcs: dict[int, list[tuple[int, int]]] = {}
    for k, idx in enumerate(np.split(order, bounds)):
        arcs[k] = [(int(i) // m.n, int(i) % m.n) for i in idx]
    diag = {k: bool(arcs[k] and arcs[k][0][0] == arcs[k][0][1]) for k in arcs}
    return Coloring(arcs, diag)


def class_size_multiset(m: ColorMatrix) -> list[int]:
    return sorted(m.class_sizes().tolist())


def from_rows(rows: Iterable[Iterable[int]]) -> ColorMatrix:
    """Shorthand used in fixtures: normalize a nested list."""
    return normalize(np.array([list(r) for r in rows]))
