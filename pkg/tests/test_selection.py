import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from maoeacs.core import InvalidInputError, nondominated_indices
from maoeacs.corner import corner_search, estimate_nadir
from maoeacs.selection import (
    abs_select,
    angle,
    angle_matrix,
    closest_to_ideal_fill,
    denormalize,
    dsa_select,
    estimate_ideal,
    normalize,
    partition_inside_outside,
)
from oracles import bf_angle, replay_maximin

THETA_DIAGONAL = 0.785398163397448309616  # pi/4, mpmath
THETA_09_01 = 0.110657221173895646559  # atan(1/9), mpmath


def sphere_front(n, m, seed, radius_jitter=0.0):
    rng = np.random.default_rng(seed)
    Z = np.abs(rng.standard_normal((n, m)))
    Z /= np.linalg.norm(Z, axis=1, keepdims=True)
    return Z * (1.0 + radius_jitter * rng.random((n, 1)))


class TestIdealAndNormalize:
    def test_ideal_examples(self):
        np.testing.assert_array_equal(estimate_ideal(np.array([[0, 1], [1, 0]], float)), [0, 0])
        np.testing.assert_array_equal(estimate_ideal(np.array([[2, 3, 4]], float)), [2, 3, 4])

    def test_ideal_column_min(self):
        F = np.random.default_rng(0).random((100, 4))
        assert estimate_ideal(F).tolist() == [min(F[:, i]) for i in range(4)]

    def test_ideal_empty(self):
        with pytest.raises(InvalidInputError):
            estimate_ideal(np.empty((0, 2)))

    def test_normalize_examples(self):
        np.testing.assert_array_equal(normalize([1, 2], [0, 0], [2, 4]), [0.5, 0.5])
        np.testing.assert_array_equal(normalize([3, 1], [3, 1], [5, 6]), [0, 0])
        np.testing.assert_array_equal(normalize([5, 6], [3, 1], [5, 6]), [1, 1])

    def test_degenerate_denominator(self):
        out = normalize([[1.0, 2.0], [1.0, 3.0]], [1.0, 0.0], [1.0, 4.0])
        assert np.all(np.isfinite(out))
        np.testing.assert_array_equal(out[:, 0], 0.0)

    @given(arrays(np.float64, (5, 3), elements=st.floats(-10, 10)))
    def test_round_trip(self, F):
        z, znad = np.array([-1.0, 0.0, 2.0]), np.array([3.0, 5.0, 2.5])
        np.testing.assert_allclose(denormalize(normalize(F, z, znad), z, znad), F, atol=1e-9)


class TestAngle:
    @pytest.mark.parametrize(
        "a, b, expected",
        [((1, 0), (0, 1), math.pi / 2), ((1, 1), (1, 0), math.pi / 4), ((2, 0), (1, 0), 0.0)],
    )
    def test_examples(self, a, b, expected):
        assert angle(a, b) == pytest.approx(expected, abs=1e-15)

    def test_zero_vector_is_finite(self):
        assert np.isfinite(angle((0, 0), (1, 0)))

    @given(
        arrays(np.float64, (2, 4), elements=st.floats(0.01, 10)),
        st.floats(0.01, 100),
        st.floats(0.01, 100),
    )
    def test_symmetric_and_scale_invariant(self, ab, s, t):
        a, b = ab
        assert angle(a, b) == pytest.approx(angle(b, a), abs=1e-12)
        assert angle(s * a, t * b) == pytest.approx(angle(a, b), abs=1e-7)
        assert 0.0 <= angle(a, b) <= math.pi

    def test_matrix_matches_scalar(self):
        rng = np.random.default_rng(1)
        A, B = rng.random((6, 3)), rng.random((4, 3))
        M = angle_matrix(A, B)
        for i in range(6):
            for j in range(4):
                assert M[i, j] == pytest.approx(bf_angle(A[i], B[j]), abs=1e-12)


class TestAbsSelect:
    Q = np.array([[1.0, 0.0], [0.0, 1.0], [0.7, 0.7], [0.9, 0.1]])

    def test_example(self):
        out = abs_select(self.Q, [0, 1], [0, 0], [1, 1], 3)
        assert out.tolist() == [0, 1, 2]

    def test_example_angles(self):
        assert bf_angle(self.Q[2], self.Q[0]) == pytest.approx(THETA_DIAGONAL, abs=1e-15)
        assert bf_angle(self.Q[3], self.Q[0]) == pytest.approx(THETA_09_01, abs=1e-15)
        assert angle(self.Q[3], self.Q[0]) == pytest.approx(THETA_09_01, abs=1e-15)

    def test_n_equals_pc(self):
        assert abs_select(self.Q, [0, 1], [0, 0], [1, 1], 2).tolist() == [0, 1]

    def test_n_equals_q(self):
        assert sorted(abs_select(self.Q, [0, 1], [0, 0], [1, 1], 4).tolist()) == [0, 1, 2, 3]

    def test_pc_exceeds_n(self):
        with pytest.raises(InvalidInputError):
            abs_select(self.Q, [0, 1, 2], [0, 0], [1, 1], 2)

    def test_empty_seed_starts_at_index_zero(self):
        out = abs_select(self.Q, [], [0, 0], [1, 1], 2)
        assert out.tolist() == [0, 1]

    def test_greedy_replay_random(self):
        for seed in range(20):
            F = sphere_front(40, 3, seed, radius_jitter=0.3)
            pc = corner_search(F)
            z, znad = F.min(axis=0), estimate_nadir(F[pc])
            order = abs_select(F, pc, z, znad, 20)
            assert order[: len(pc)].tolist() == pc.tolist()
            replay_maximin(normalize(F, z, znad), order.tolist(), len(pc))

    def test_scale_invariance_of_choices(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            F = rng.random((15, 3)) + 0.05
            z, znad = np.zeros(3), np.ones(3)
            s = rng.uniform(0.1, 10.0, size=3)
            # scaling objectives and the nadir together leaves normalized vectors unchanged
            a = abs_select(F, [0], z, znad, 8)
            b = abs_select(F * s, [0], z, znad * s, 8)
            assert a.tolist() == b.tolist()
            # scaling each normalized vector by its own positive factor leaves angles unchanged
            rows = rng.uniform(0.1, 10.0, size=(15, 1))
            c = abs_select(F * rows, [0], z, znad, 8)
            assert a.tolist() == c.tolist()


class TestPartitionAndFill:
    def test_partition_example(self):
        inside, outside = partition_inside_outside(np.array([[0.5, 0.5], [1.5, 0.2]]), [1, 1])
        assert inside.tolist() == [0] and outside.tolist() == [1]

    def test_boundary_counts_as_inside(self):
        inside, outside = partition_inside_outside(np.array([[1.0, 1.0], [1.0, 1.0]]), [1, 1])
        assert inside.tolist() == [0, 1] and outside.size == 0

    def test_partition_predicate(self):
        F = np.random.default_rng(4).random((100, 3))
        znad = np.array([0.8, 0.9, 0.7])
        inside, outside = partition_inside_outside(F, znad)
        expected_out = [i for i, f in enumerate(F) if any(f[j] > znad[j] for j in range(3))]
        assert outside.tolist() == expected_out
        assert sorted(inside.tolist() + outside.tolist()) == list(range(100))

    def test_fill_example(self):
        assert closest_to_ideal_fill(np.array([[3.0, 4.0], [1.0, 1.0]]), [0, 0], 1).tolist() == [1]

    def test_fill_all(self):
        assert sorted(closest_to_ideal_fill(np.array([[3.0, 4.0], [1.0, 1.0]]), [0, 0], 2).tolist()) == [0, 1]

    def test_fill_sort_oracle(self):
        F = np.random.default_rng(5).random((50, 3))
        z = np.array([0.1, 0.0, 0.2])
        dist = [math.dist(f, z) for f in F]
        expected = sorted(range(50), key=lambda i: (dist[i], i))[:10]
        assert closest_to_ideal_fill(F, z, 10).tolist() == expected

    def test_fill_ties_by_index(self):
        F = np.array([[1.0, 0.0], [0.0, 1.0], [0.5, 0.5]])
        assert closest_to_ideal_fill(F, [0, 0], 2).tolist() == [2, 0]

    def test_fill_too_many(self):
        with pytest.raises(InvalidInputError):
            closest_to_ideal_fill(np.array([[1.0, 1.0]]), [0, 0], 2)


class TestDsaSelect:
    def test_chain_fill(self):
        R = np.array([[1, 1], [2, 2], [3, 3], [4, 4]], dtype=float)
        res = dsa_select(R, 2)
        assert res.selected.tolist() == [0, 1]
        assert res.case == "fill-dominated"
        np.testing.assert_array_equal(res.ideal, [1, 1])

    def test_exact_front(self):
        R = np.array([[0, 3], [1, 2], [2, 1], [3, 3], [4, 4]], dtype=float)
        res = dsa_select(R, 3)
        assert res.case == "exact" and res.selected.tolist() == [0, 1, 2]

    def test_too_small(self):
        with pytest.raises(InvalidInputError):
            dsa_select(np.array([[0.0, 1.0], [1.0, 0.0]]), 2)

    def test_angle_branch_matches_abs_select(self):
        F = sphere_front(60, 5, seed=6)
        res = dsa_select(F, 20)
        assert res.case == "angle"
        pc = corner_search(F)
        z, znad = F.min(axis=0), estimate_nadir(F[pc])
        expected = abs_select(F, pc, z, znad, 20)
        assert res.selected.tolist() == expected.tolist()
        replay_maximin(normalize(F, z, znad), res.selected.tolist(), len(pc))
        assert set(res.corners.tolist()) <= set(res.selected.tolist())

    def test_fill_outside_branch(self):
        # hand trace: axis picks are rows 3 and 1, nadir (1, 0.5, 0.5); rows 0 and 4
        # exceed it in f2 and tie on distance to the ideal, so row 0 fills the last slot
        F = np.array([[0.75, 0.75, 0.25], [0.5, 0.5, 0.5], [1.0, 0.5, 0.0], [1.0, 0.25, 0.25], [0.75, 0.75, 0.25]])
        res = dsa_select(F, 4)
        assert res.case == "fill-outside"
        assert res.corners.tolist() == [3, 1]
        np.testing.assert_array_equal(res.nadir, [1.0, 0.5, 0.5])
        assert res.selected.tolist() == [1, 2, 3, 0]

    def test_two_objective_fronts_are_never_outside(self):
        for seed in range(30):
            F = sphere_front(25, 2, seed, radius_jitter=0.5)
            F = F[nondominated_indices(F)]
            inside, outside = partition_inside_outside(F, estimate_nadir(F[corner_search(F)]))
            assert outside.size == 0

    def test_running_ideal(self):
        R = np.array([[1.0, 2.0], [2.0, 1.0], [3.0, 3.0]])
        res = dsa_select(R, 2, ideal=[0.5, 5.0])
        np.testing.assert_array_equal(res.ideal, [0.5, 1.0])

    def test_corner_positions(self):
        F = sphere_front(30, 3, seed=9)
        res = dsa_select(F, 10)
        pos = res.corner_positions()
        assert res.selected[pos].tolist() == res.corners.tolist()

    def test_too_many_corners_warns(self):
        F = np.array([[0.0, 1.0], [1.0, 0.0], [0.5, 0.5]])
        with pytest.warns(UserWarning, match="corner"):
            res = dsa_select(F, 1)
        assert res.case == "angle" and res.selected.tolist() == [1]

    @pytest.mark.filterwarnings("ignore:.*corner solutions exceed")
    @settings(max_examples=80, deadline=None)
    @given(
        st.tuples(st.sampled_from([2, 3, 4]), st.integers(8, 30)).flatmap(
            lambda shape: arrays(np.float64, (shape[1], shape[0]), elements=st.floats(0, 5))
        ),
        st.integers(2, 7),
    )
    def test_size_and_corner_retention(self, F, N):
        res = dsa_select(F, N)
        assert len(res.selected) == N
        assert len(set(res.selected.tolist())) == N
        if res.case in ("angle", "inside") and len(res.corners) <= N:
            assert set(res.corners.tolist()) <= set(res.selected.tolist())
