"""Independent checks: the symbolic squaring engine and brute-force coherence tests.

Nothing here shares code with the numpy engines. The symbolic engine squares
the generic matrix sum_k t_k A_k with noncommuting indeterminates, written out
entry by entry as multisets of ordered color pairs.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .core import ColorMatrix, NotStableError, StableResult, StructureConstants

__all__ = [
    "Expression",
    "Violation",
    "Verdict",
    "symbolic_expressions",
    "symbolic_square",
    "symbolic_closure",
    "format_expression",
    "parse_expression",
    "structure_constants",
    "verify_coherent",
    "check_constants_by_multiplication",
]

# ordered pair (i, j) stands for the word t_i t_j
Expression = dict[tuple[int, int], int]


@dataclass(frozen=True)
class Violation:
    axiom: str
    color: int
    position: tuple[int, int]
    detail: str = ""

    def __str__(self) -> str:
        u, v = self.position
        return f"axiom {self.axiom}: color {self.color} at ({u}, {v}) {self.detail}".rstrip()


@dataclass
class Verdict:
    violations: list[Violation] = field(default_factory=list)
    # color -> color of the transposed class, when (iv) holds for it
    transpose: dict[int, int] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def report(self) -> str:
        if self.ok:
            return "ok"
        return "; ".join(str(v) for v in self.violations)


def _rows(m: ColorMatrix) -> tuple[list[list[int]], list[tuple[int, ...]]]:
    rows = m.colors.tolist()
    return rows, list(zip(*rows))


def symbolic_expressions(m: ColorMatrix) -> list[list[Expression]]:
    """Entry (u, v) of D*D as {(i, j): multiplicity}."""
    rows, cols = _rows(m)
    return [[dict(Counter(zip(row, col))) for col in cols] for row in rows]


def symbolic_square(m: ColorMatrix) -> ColorMatrix:
    """Recolor each position by (old color, its entry of D*D), numbered by first occurrence.

    Keeping the old color in the key makes every step a refinement.
    """
    rows, cols = _rows(m)
    ids: dict[tuple[int, frozenset], int] = {}
    out = []
    for row in rows:
        new_row = []
        for old, col in zip(row, cols):
            key = (old, frozenset(Counter(zip(row, col)).items()))
            new_row.append(ids.setdefault(key, len(ids)))
        out.append(new_row)
    return ColorMatrix(np.array(out))


def _pair_with_transpose(m: ColorMatrix) -> ColorMatrix:
    """Recolor (u, v) by (color(u, v), color(v, u)); identity when already paired."""
    rows = m.colors.tolist()
    ids: dict[tuple[int, int], int] = {}
    out = [[ids.setdefault((rows[u][v], rows[v][u]), len(ids)) for v in range(m.n)] for u in range(m.n)]
    if len(ids) == m.r:
        return m
    return ColorMatrix(np.array(out))


def symbolic_closure(m: ColorMatrix) -> StableResult:
    """Square the generic matrix until the partition stops changing.

    A directed input is first split by transposed colors, since squaring
    alone never separates (u, v) from (u', v') by their reverse arcs.
    """
    cur = _pair_with_transpose(m)
    iterations = 0
    while True:
        nxt = symbolic_square(cur)
        iterations += 1
        if nxt.r == cur.r:
            return StableResult(cur, iterations)
        cur = nxt


def format_expression(expr: Expression) -> str:
    """Render as e.g. ``t_1t_4 + t_2^2 + t_4t_1 + 3t_4^2``."""
    terms = []
    for (i, j), p in sorted(expr.items()):
        word = f"t_{i}^2" if i == j else f"t_{i}t_{j}"
        terms.append(word if p == 1 else f"{p}{word}")
    return " + ".join(terms)


def parse_expression(text: str) -> Expression:
    """Inverse of :func:`format_expression`; whitespace is ignored."""
    import re

    out: Expression = {}
    for term in text.replace(" ", "").split("+"):
        mt = re.fullmatch(r"(\d*)t_(\d+)(?:\^2|t_(\d+))", term)
        if mt is None:
            raise ValueError(f"cannot parse term {term!r}")
        coef = int(mt.group(1) or 1)
        i = int(mt.group(2))
        j = int(mt.group(3)) if mt.group(3) is not None else i
        out[(i, j)] = out.get((i, j), 0) + coef
    return out


def structure_constants(stable: ColorMatrix) -> StructureConstants:
    """Read p_ij^k off one arc per color, then confirm every other arc agrees."""
    rows, cols = _rows(stable)
    seen: dict[int, Counter] = {}
    for u, row in enumerate(rows):
        for v, col in enumerate(cols):
            k = row[v]
            counts = Counter(zip(row, col))
            ref = seen.setdefault(k, counts)
            if ref is not counts and ref != counts:
                raise NotStableError(f"arcs of color {k} disagree at ({u}, {v})")
    vals = {(i, j, k): p for k, c in seen.items() for (i, j), p in c.items()}
    return StructureConstants(vals, stable.r, stable.n)


def verify_coherent(m: ColorMatrix | np.ndarray | list) -> Verdict:
    """Check the coherent-configuration axioms on a coloring of all n*n positions.

    (i)/(iii) hold for any single matrix; (ii) vertex colors stay on the
    diagonal; (iv) each class transposes onto a class; (v) all arcs of a class
    share their triangle counts.
    """
    a = np.asarray(m.colors if isinstance(m, ColorMatrix) else m)
    verdict = Verdict()
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.size == 0:
        verdict.violations.append(Violation("i", -1, (0, 0), f"not a square matrix: {a.shape}"))
        return verdict
    n = a.shape[0]
    rows = a.tolist()

    diag = set(np.diagonal(a).tolist())
    for u in range(n):
        for v in range(n):
            if u != v and rows[u][v] in diag:
                verdict.violations.append(
                    Violation("ii", rows[u][v], (u, v), "vertex color used off the diagonal")
                )
                break
        else:
            continue
        break

    sizes = Counter(a.ravel().tolist())
    images: dict[int, set[int]] = {}
    witness: dict[int, tuple[int, int]] = {}
    for u in range(n):
        for v in range(n):
            k = rows[u][v]
            images.setdefault(k, set()).add(rows[v][u])
            witness.setdefault(k, (u, v))
    for k, img in images.items():
        if len(img) == 1 and sizes[k] == sizes[next(iter(img))]:
            verdict.transpose[k] = next(iter(img))
        else:
            verdict.violations.append(
                Violation("iv", k, witness[k], f"transpose meets colors {sorted(img)}")
            )

    cols = list(zip(*rows))
    first: dict[int, Counter] = {}
    flagged: set[int] = set()
    for u, row in enumerate(rows):
        for v, col in enumerate(cols):
            k = row[v]
            if k in flagged:
                continue
            counts = Counter(zip(row, col))
            ref = first.setdefault(k, counts)
            if ref is not counts and ref != counts:
                flagged.add(k)
                verdict.violations.append(
                    Violation("v", k, (u, v), f"triangle counts differ from {witness[k]}")
                )
    return verdict


def check_constants_by_multiplication(
    stable: ColorMatrix, c: StructureConstants, max_n: int = 64
) -> Verdict:
    """Materialize the basis and test A_i A_j == sum_k p_ij^k A_k entrywise.

    With the basis stacked as a column of blocks V = [A_0; A_1; ...] and a row
    of blocks H = [A_0 | A_1 | ...], block (i, j) of the sparse product V @ H
    is A_i A_j. Every path u -> w -> v lands in exactly one block, so the
    multiplication costs about n^3 regardless of the rank.
    """
    n, r = stable.n, stable.r
    if n > max_n:
        raise ValueError(f"n={n} exceeds max_n={max_n} for the brute-force product check")
    verdict = Verdict()
    flat = stable.colors.ravel()
    row_of = np.repeat(np.arange(n), n)
    col_of = np.tile(np.arange(n), n)
    ones = np.ones(n * n, dtype=np.int64)
    stacked = sparse.csr_matrix((ones, (flat * n + row_of, col_of)), shape=(r * n, n))
    side = sparse.csr_matrix((ones, (row_of, flat * n + col_of)), shape=(n, r * n))
    product = (stacked @ side).tocsr()

    items = list(c.items())
    if items:
        ijk = np.array([key for key, _ in items], dtype=np.int64).reshape(-1, 3)
        p = np.array([val for _, val in items], dtype=np.int64)
        order = np.argsort(flat, kind="stable")
        bounds = np.searchsorted(flat[order], np.arange(r + 1))
        sizes = np.diff(bounds)[ijk[:, 2]]
        owner = np.repeat(np.arange(len(items)), sizes)
        offset = np.arange(owner.size) - np.repeat(np.cumsum(sizes) - sizes, sizes)
        pos = order[bounds[ijk[owner, 2]] + offset]
        expected = sparse.csr_matrix(
            (p[owner], (ijk[owner, 0] * n + row_of[pos], ijk[owner, 1] * n + col_of[pos])),
            shape=(r * n, r * n),
        )
    else:
        expected = sparse.csr_matrix((r * n, r * n), dtype=np.int64)

    diff = (product - expected).tocoo()
    diff.eliminate_zeros()
    reported: set[int] = set()
    for big_row, big_col, delta in sorted(zip(diff.row.tolist(), diff.col.tolist(), diff.data.tolist())):
        i, u = divmod(big_row, n)
        j, v = divmod(big_col, n)
        if i in reported:
            continue
        reported.add(i)
        got = int(product[big_row, big_col])
        verdict.violations.append(
            Violation("v", i, (u, v), f"(A_{i} A_{j})[{u},{v}] = {got}, constants give {got - delta}")
        )
    return verdict
