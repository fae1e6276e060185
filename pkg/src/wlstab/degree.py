"""Depth-2 stabilization: valency refinement of vertices, and the edge recoloring built on it."""

from __future__ import annotations

import numpy as np

from .core import COLOR_DTYPE, ColorMatrix, normalize

__all__ = ["total_degree_partition", "preprocess_recolor", "vertex_classes"]


def _incidence_counts(colors: np.ndarray, labels: np.ndarray, num_labels: int, r: int) -> np.ndarray:
    """counts[u, k * L + c] = number of color-k arcs from u into class c; in-arcs follow."""
    n = colors.shape[0]
    width = r * num_labels
    target = colors * num_labels + labels[None, :]
    out_counts = np.zeros((n, width), dtype=np.int64)
    np.add.at(out_counts, (np.repeat(np.arange(n), n), target.ravel()), 1)
    source = colors.T * num_labels + labels[None, :]
    in_counts = np.zeros((n, width), dtype=np.int64)
    np.add.at(in_counts, (np.repeat(np.arange(n), n), source.ravel()), 1)
    return np.hstack([out_counts, in_counts])


def _rank_rows(keys: np.ndarray) -> np.ndarray:
    """Class ids numbered by the lexicographic order of the key rows."""
    _, inverse = np.unique(keys, axis=0, return_inverse=True)
    return inverse.ravel().astype(COLOR_DTYPE)


def vertex_classes(m: ColorMatrix) -> np.ndarray:
    """Label per vertex for the total degree partition."""
    colors = m.colors
    labels = _rank_rows(np.diagonal(colors)[:, None])
    while True:
        num = int(labels.max()) + 1
        keys = np.hstack([labels[:, None], _incidence_counts(colors, labels, num, m.r)])
        refined = _rank_rows(keys)
        if refined.max() + 1 == num:
            return labels
        labels = refined


def total_degree_partition(m: ColorMatrix) -> list[list[int]]:
    """Coarsest partition refining the vertex colors where vertices of one class
    send and receive equally many arcs of each color to and from every class."""
    labels = vertex_classes(m)
    classes: list[list[int]] = [[] for _ in range(int(labels.max()) + 1)]
    for u, c in enumerate(labels.tolist()):
        classes[c].append(u)
    return classes


def preprocess_recolor(m: ColorMatrix) -> ColorMatrix:
    """One round of vertex splitting by per-color arc counts, then one edge round.

    Vertices are split by (own color, out-counts per color, in-counts per color);
    an arc keeps its color only together with the new colors of both endpoints.
    """
    n, colors = m.n, m.colors
    out_counts = np.zeros((n, m.r), dtype=np.int64)
    in_counts = np.zeros((n, m.r), dtype=np.int64)
    rows = np.repeat(np.arange(n), n)
    np.add.at(out_counts, (rows, colors.ravel()), 1)
    np.add.at(in_counts, (rows, colors.T.ravel()), 1)
    keys = np.hstack([np.diagonal(colors)[:, None], out_counts, in_counts])
    vlab = _rank_rows(keys)
    q = int(vlab.max()) + 1
    raw = (colors * q + vlab[:, None]) * q + vlab[None, :]
    np.fill_diagonal(raw, vlab)
    # arc keys live above every vertex label so the two ranges cannot collide
    off = ~np.eye(n, dtype=bool)
    raw[off] += q
    return normalize(raw)
