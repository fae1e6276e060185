"""Benchmark graph families and colored molecular graphs as color matrices.

Plain graphs use three colors: vertices, edges, non-edges. Each undirected
edge becomes two arcs of one shared color.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .core import ColorMatrix, normalize

__all__ = [
    "MolecularSpec",
    "graph_matrix",
    "benzene_stack",
    "moebius_ladder",
    "dynkin",
    "molecular",
    "benzene_edges",
    "moebius_edges",
    "dynkin_edges",
    "FAMILIES",
]


def graph_matrix(n: int, edges: Iterable[tuple[int, int]], directed: bool = False) -> ColorMatrix:
    """Vertex color 0, edge color 1, non-edge color 2 (before normalization)."""
    a = np.full((n, n), 2, dtype=np.int64)
    for u, v in edges:
        if u == v:
            raise ValueError(f"loop at vertex {u}")
        a[u, v] = 1
        if not directed:
            a[v, u] = 1
    np.fill_diagonal(a, 0)
    return normalize(a)


def benzene_edges(k: int) -> list[tuple[int, int]]:
    """Edges of P_k; vertex x_i (x in a..f, stage i) is numbered 6*(i-1) + index(x)."""
    if k < 1:
        raise ValueError(f"benzene stack needs k >= 1, got {k}")
    a, b, c, d, e, f = range(6)
    edges = []
    for i in range(k):
        base = 6 * i
        edges += [(base + x, base + (x + 1) % 6) for x in range(6)]
    for j in range(1, k):
        # rungs alternate between {a,c,e} and {b,d,f}
        letters = (a, c, e) if j % 2 == 1 else (b, d, f)
        edges += [(6 * (j - 1) + x, 6 * j + x) for x in letters]
    return edges


def benzene_stack(k: int) -> ColorMatrix:
    return graph_matrix(6 * k, benzene_edges(k))


def moebius_edges(k: int) -> list[tuple[int, int]]:
    if k < 3:
        raise ValueError(f"Moebius ladder needs k >= 3, got {k}")
    n = 2 * k
    edges = set()
    for i in range(n):
        for x in (1, k, 2 * k - 1):
            j = (i + x) % n
            edges.add((min(i, j), max(i, j)))
    return sorted(edges)


def moebius_ladder(k: int) -> ColorMatrix:
    return graph_matrix(2 * k, moebius_edges(k))


def dynkin_edges(n: int) -> list[tuple[int, int]]:
    """Path 0..n-3, then leaves n-2 and n-1 hung on the last path vertex."""
    if n < 4:
        raise ValueError(f"Dynkin D_n needs n >= 4, got {n}")
    last = n - 3
    return [(i, i + 1) for i in range(last)] + [(last, n - 2), (last, n - 1)]


def dynkin(n: int) -> ColorMatrix:
    return graph_matrix(n, dynkin_edges(n))


@dataclass(frozen=True)
class MolecularSpec:
    """Atoms as category ids, bonds as (u, v, kind); unlisted pairs get ``nonbond``.

    Atom ids and bond kinds share one id space with the diagonal/off-diagonal
    split enforced on construction of the matrix, so they may overlap here.
    """

    atoms: list[int]
    bonds: list[tuple[int, int, int]] = field(default_factory=list)
    nonbond: int = 0

    def __post_init__(self) -> None:
        n = len(self.atoms)
        seen: set[frozenset[int]] = set()
        for u, v, _ in self.bonds:
            if u == v:
                raise ValueError(f"bond from atom {u} to itself")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"bond ({u}, {v}) references a missing atom")
            pair = frozenset((u, v))
            if pair in seen:
                raise ValueError(f"duplicate bond between atoms {u} and {v}")
            seen.add(pair)


def molecular_raw(spec: MolecularSpec) -> np.ndarray:
    n = len(spec.atoms)
    a = np.full((n, n), spec.nonbond, dtype=np.int64)
    for u, v, kind in spec.bonds:
        a[u, v] = a[v, u] = kind
    np.fill_diagonal(a, spec.atoms)
    return a


def molecular(spec: MolecularSpec) -> ColorMatrix:
    return normalize(molecular_raw(spec))


# name -> (constructor, smallest valid parameter)
FAMILIES = {
    "benzene": (benzene_stack, 1),
    "moebius": (moebius_ladder, 3),
    "dynkin": (dynkin, 4),
}
