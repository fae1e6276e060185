from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import reference_data as P
from wlstab.core import (
    ColorMatrix,
    ShapeError,
    StableResult,
    StructureConstants,
    canonical_form,
    canonical_relabel,
    cells,
    class_size_multiset,
    coloring,
    from_rows,
    is_automorphism,
    normalize,
    permute,
    same_partition,
    transpose_closure,
)


@st.composite
def raw_matrices(draw, max_n: int = 7, max_color: int = 4):
    n = draw(st.integers(1, max_n))
    flat = draw(st.lists(st.integers(0, max_color), min_size=n * n, max_size=n * n))
    return np.array(flat, dtype=np.int64).reshape(n, n)


@st.composite
def matrix_and_perm(draw):
    raw = draw(raw_matrices())
    perm = draw(st.permutations(range(raw.shape[0])))
    return normalize(raw), list(perm)


class TestColorMatrix:
    def test_rejects_non_square(self):
        with pytest.raises(ShapeError):
            ColorMatrix(np.zeros((2, 3), dtype=int))

    def test_rejects_empty(self):
        with pytest.raises(ShapeError):
            ColorMatrix(np.zeros((0, 0), dtype=int))

    def test_rejects_sparse_ids(self):
        with pytest.raises(ValueError, match="dense"):
            ColorMatrix(np.array([[0, 2], [2, 0]]))

    def test_rejects_shared_vertex_and_arc_color(self):
        with pytest.raises(ValueError, match="both on and off"):
            ColorMatrix(np.array([[0, 0], [1, 1]]))

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            ColorMatrix(np.array([[-1]]))

    def test_immutable(self):
        m = ColorMatrix(np.array([[0, 1], [1, 0]]))
        with pytest.raises(ValueError):
            m.colors[0, 0] = 1

    def test_input_array_is_copied(self):
        a = np.array([[0, 1], [1, 0]])
        m = ColorMatrix(a)
        a[0, 1] = 7
        assert m[0, 1] == 1

    def test_counts(self):
        m = ColorMatrix(np.array(P.ETHYLENE))
        assert (m.n, m.r, m.num_cells) == (6, 5, 2)
        assert m.class_sizes().sum() == 36

    def test_equality_and_hash(self):
        a = from_rows(P.ETHYLENE)
        b = from_rows(P.ETHYLENE)
        assert a == b and hash(a) == hash(b)
        assert a != from_rows(P.ETHYLENE_STABLE)


class TestNormalize:
    def test_ethylene_keeps_partition(self):
        m = normalize(P.ETHYLENE)
        assert m.r == 5
        assert same_partition(m, ColorMatrix(np.array(P.ETHYLENE)))

    def test_all_zero_two_by_two(self):
        m = normalize(np.zeros((2, 2), dtype=int))
        assert m.r == 2
        assert m.tolist() == [[0, 1], [1, 0]]

    def test_five_cycle(self):
        a = np.zeros((5, 5), dtype=int)
        for i in range(5):
            a[i, (i + 1) % 5] = a[(i + 1) % 5, i] = 1
        assert normalize(a).r == 3

    def test_first_occurrence_numbering(self):
        m = normalize([[7, 9], [4, 7]])
        assert m.tolist() == [[0, 1], [2, 0]]

    def test_boolean_input(self):
        m = normalize(np.array([[False, True], [True, False]]))
        assert m.r == 2

    def test_rejects_fractional(self):
        with pytest.raises(ValueError):
            normalize(np.array([[0.5]]))

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            normalize([[0, -1], [1, 0]])

    def test_rejects_ragged(self):
        with pytest.raises((ShapeError, ValueError)):
            normalize([[0, 1, 2], [1, 0, 2]])

    @given(raw_matrices())
    def test_refines_input_and_splits_only_shared_values(self, raw):
        m = normalize(raw)
        n = raw.shape[0]
        off = ~np.eye(n, dtype=bool)
        # equal normalized colors imply equal raw values
        for c in range(m.r):
            assert np.unique(raw[m.colors == c]).size == 1
        shared = set(np.diagonal(raw).tolist()) & set(raw[off].tolist())
        assert m.r == np.unique(raw).size + len(shared)

    @given(raw_matrices())
    def test_idempotent(self, raw):
        m = normalize(raw)
        assert normalize(m.colors) == m


class TestCanonicalForm:
    def test_cuneane_c_diagonal(self):
        c = normalize(P.CUNEANE_C)
        canon = canonical_form(c)
        assert same_partition(canon, c)
        assert sorted(set(np.diagonal(canon.colors).tolist())) == [0, 1, 2]
        # printed diagonal colors 1, 7, 16 become 0, 1, 2 in order of appearance
        raw_diag = np.diagonal(np.array(P.CUNEANE_C))
        assert {1: 0, 7: 1, 16: 2} == dict(zip(raw_diag.tolist(), np.diagonal(canon.colors).tolist()))

    def test_mapping_is_consistent(self):
        m = normalize(P.CUNEANE_B)
        canon, mapping = canonical_relabel(m)
        assert np.array_equal(mapping[m.colors], canon.colors)

    @given(raw_matrices())
    def test_idempotent(self, raw):
        c = canonical_form(normalize(raw))
        assert canonical_form(c) == c

    @given(raw_matrices(), st.randoms(use_true_random=False))
    def test_color_renaming_invariance(self, raw, rnd):
        m = normalize(raw)
        names = list(range(m.r))
        rnd.shuffle(names)
        renamed = ColorMatrix(np.array(names)[m.colors])
        assert canonical_form(renamed) == canonical_form(m)

    @given(matrix_and_perm())
    def test_relabeled_copy_has_same_class_sizes(self, mp):
        m, perm = mp
        assert class_size_multiset(canonical_form(permute(m, perm))) == class_size_multiset(canonical_form(m))


class TestSamePartition:
    def test_with_canonical_form(self):
        m = normalize(P.CUNEANE_C)
        assert same_partition(m, canonical_form(m))

    def test_swapped_colors(self):
        a = np.array(P.ETHYLENE_STABLE)
        b = a.copy()
        b[a == 3], b[a == 4] = 4, 3
        assert same_partition(normalize(a), normalize(b))

    def test_input_vs_stable(self):
        assert not same_partition(normalize(P.ETHYLENE), normalize(P.ETHYLENE_STABLE))

    def test_same_rank_different_partition(self):
        a = normalize([[0, 1, 1], [2, 0, 2], [2, 2, 0]])
        b = normalize([[0, 1, 2], [1, 0, 2], [2, 2, 0]])
        assert a.r == b.r and not same_partition(a, b)

    def test_size_mismatch(self):
        with pytest.raises(ShapeError):
            same_partition(normalize([[0]]), normalize([[0, 1], [1, 0]]))

    @given(raw_matrices(max_n=4), raw_matrices(max_n=4), raw_matrices(max_n=4))
    @settings(max_examples=200)
    def test_equivalence_relation(self, x, y, z):
        a, b, c = normalize(x), normalize(y), normalize(z)
        assert same_partition(a, a)
        if a.n == b.n:
            assert same_partition(a, b) == same_partition(b, a)
            if a.n == c.n and same_partition(a, b) and same_partition(b, c):
                assert same_partition(a, c)

    @given(raw_matrices())
    def test_matches_brute_force(self, raw):
        a = normalize(raw)
        b = normalize(np.where(raw == 0, 1, raw))
        pa = {}
        pb = {}
        for pos, (x, y) in enumerate(zip(a.colors.ravel().tolist(), b.colors.ravel().tolist())):
            pa.setdefault(x, set()).add(pos)
            pb.setdefault(y, set()).add(pos)
        expect = sorted(map(sorted, pa.values())) == sorted(map(sorted, pb.values()))
        assert same_partition(a, b) == expect


class TestAutomorphism:
    def test_square4_map(self):
        assert is_automorphism(P.SQUARE4_PERM, normalize(P.SQUARE4))

    def test_square4_non_automorphism(self):
        assert not is_automorphism([1, 0, 2, 3], normalize(P.SQUARE4))

    def test_identity(self):
        m = normalize(P.RING19)
        assert is_automorphism(list(range(19)), m)

    def test_five_point_group(self):
        m = normalize(P.FIVE_POINT)
        for cycles in P.FIVE_POINT_GROUP_CYCLES:
            assert is_automorphism(P.cycles_to_perm(5, cycles), m)

    def test_rejects_non_permutation(self):
        with pytest.raises(ValueError):
            is_automorphism([0, 0, 1, 2], normalize(P.SQUARE4))

    def test_permute_then_inverse(self):
        m = normalize(P.CUNEANE)
        perm = [3, 1, 4, 0, 7, 6, 2, 5]
        inv = np.argsort(perm)
        assert permute(permute(m, perm), inv) == m

    @given(matrix_and_perm())
    def test_orbit_averaged_coloring_is_invariant(self, mp):
        m, perm = mp
        # recolor (u, v) by the colors seen along its orbit under <perm>
        p = np.array(perm)
        q = np.arange(m.n)
        views = []
        while True:
            views.append(m.colors[np.ix_(q, q)])
            q = p[q]
            if np.array_equal(q, np.arange(m.n)):
                break
        signature = np.sort(np.stack(views), axis=0).reshape(len(views), -1).T
        codes = np.unique(signature, axis=0, return_inverse=True)[1].reshape(m.n, m.n)
        assert is_automorphism(perm, normalize(codes))


class TestTransposeClosure:
    DIRECTED = [[0, 1, 1, 1], [1, 0, 1, 1], [2, 1, 0, 2], [1, 2, 2, 0]]

    def test_splits_by_reverse_color(self):
        m = normalize(self.DIRECTED)
        t = transpose_closure(m)
        # colors 1 and 2 each split by the color of the reverse arc
        assert t.r == m.r + 2
        assert t[0, 1] == t[1, 0] != t[0, 2]

    def test_keeper_and_fresh_ids(self):
        t = transpose_closure(normalize(self.DIRECTED))
        assert (t[0, 1], t[0, 2], t[2, 0], t[2, 3]) == (1, 3, 2, 4)

    def test_symmetric_input_returned_as_is(self):
        m = normalize(P.CUNEANE)
        assert transpose_closure(m) is m

    @given(raw_matrices())
    def test_result_pairs_with_transpose(self, raw):
        t = transpose_closure(normalize(raw))
        pairs = np.unique(t.colors.ravel() * t.r + t.colors.T.ravel())
        assert pairs.size == t.r
        assert transpose_closure(t) is t


class TestCells:
    def test_ethylene_stable(self):
        assert sorted(cells(normalize(P.ETHYLENE_STABLE))) == [[0, 1], [2, 3, 4, 5]]

    def test_cuneane_stable(self):
        assert sorted(cells(normalize(P.CUNEANE_C))) == [[0, 7], [1, 2, 5, 6], [3, 4]]

    def test_uniform(self):
        assert cells(normalize(np.ones((4, 4), dtype=int))) == [[0, 1, 2, 3]]

    def test_coloring_view(self):
        col = coloring(normalize(P.ETHYLENE))
        assert sum(col.sizes.values()) == 36
        assert [k for k, d in col.diagonal.items() if d] == [0, 4]


class TestResults:
    def test_stable_result_rejects_zero_iterations(self):
        with pytest.raises(ValueError):
            StableResult(normalize([[0]]), 0)

    def test_structure_constants_validation(self):
        with pytest.raises(ValueError):
            StructureConstants({(0, 0, 3): 1}, rank=2, n=1)
        with pytest.raises(ValueError):
            StructureConstants({(0, 0, 0): 0}, rank=1, n=1)

    def test_structure_constants_views(self):
        c = StructureConstants({(0, 0, 0): 1, (0, 1, 1): 1, (1, 0, 1): 1}, rank=2, n=2)
        assert c[(1, 1, 1)] == 0
        assert c.row_sums() == {0: 1, 1: 2}
        assert c.relabel([1, 0])[(1, 0, 0)] == 1
        assert c.multiset() == [1, 1, 1]
