import math

import numpy as np
import pytest

from detproc.harness import random_frame
from detproc.process import (
    ConditioningError,
    Frame,
    SubsetEventSpec,
    counterexample_frame,
    enumerate_distribution,
    inclusion_prob,
)
from detproc.subspaces import (
    align_leading_coordinates,
    classify_case,
    jordan_angles,
    pair_containment_stats,
)


class TestJordanAngles:
    def test_identical_lines(self):
        e1 = np.array([1.0, 0.0, 0.0])
        dec = jordan_angles([e1], [e1 * 2.0])
        assert dec.k == 0
        assert dec.intersection.shape[1] == 1

    def test_orthogonal_lines(self):
        dec = jordan_angles([np.array([1.0, 0.0])], [np.array([0.0, 1.0])])
        assert dec.angles == pytest.approx([math.pi / 2])

    def test_quarter_turn(self):
        e1 = np.array([1.0, 0.0])
        diag = np.array([1.0, 1.0]) / math.sqrt(2)
        dec = jordan_angles([e1], [diag])
        assert dec.angles == pytest.approx([math.pi / 4])
        assert dec.u[:, 0] == pytest.approx([1.0, 0.0])
        assert abs(dec.w[1, 0]) == pytest.approx(1.0)
        # reconstruction v = u cos + w sin
        recon = dec.u[:, 0] * math.cos(dec.angles[0]) + dec.w[:, 0] * math.sin(dec.angles[0])
        assert recon == pytest.approx(dec.v[:, 0], abs=1e-12)

    def test_symmetry_and_rebasing_invariance(self):
        rng = np.random.default_rng(7)
        E1 = rng.standard_normal((6, 2))
        E2 = rng.standard_normal((6, 3))
        a12 = jordan_angles(E1, E2).angles
        a21 = jordan_angles(E2, E1).angles
        assert a12 == pytest.approx(a21, abs=1e-10)
        mix = rng.standard_normal((2, 2))
        assert jordan_angles(E1 @ mix, E2).angles == pytest.approx(a12, abs=1e-10)

    def test_dimension_accounting(self):
        rng = np.random.default_rng(9)
        E1 = rng.standard_normal((7, 3))
        E2 = rng.standard_normal((7, 4))
        dec = jordan_angles(E1, E2)
        assert dec.dim1 == 3 and dec.dim2 == 4
        assert dec.e2_only.shape[1] == 1
        basis = np.concatenate([dec.u, dec.w, dec.e2_only], axis=1)
        assert np.abs(basis.T @ basis - np.eye(basis.shape[1])).max() < 1e-10

    def test_rank_deficient_rejected(self):
        e1 = np.array([1.0, 0.0])
        with pytest.raises(ValueError):
            jordan_angles([e1, e1], [np.array([0.0, 1.0])])


class TestPairContainmentStats:
    def test_two_point_sine_identity(self):
        # for single points the wedge norm is the two-column Gram determinant
        g = random_frame(15, 6, 2)
        stats = pair_containment_stats(g, (1,), (2,))
        z1, z2 = g.column(1), g.column(2)
        expected = float(z1 @ z1) * float(z2 @ z2) * math.sin(stats.angles[0]) ** 2
        assert inclusion_prob(g, (1, 2)) == pytest.approx(expected, abs=1e-12)

    def test_orthogonal_subspaces(self):
        rows = np.zeros((4, 8))
        for i in range(4):
            rows[i, i] = math.sqrt(0.5)
            rows[i, i + 4] = math.sqrt(0.5)
        g = Frame(rows)
        stats = pair_containment_stats(g, (1, 2), (3, 4))
        assert stats.angles == pytest.approx([math.pi / 2] * 2)
        assert stats.cross_inner_sq == pytest.approx(0.0, abs=1e-14)
        assert stats.union_prob == pytest.approx(stats.kappa1 * stats.kappa2, abs=1e-12)

    def test_matches_oracle(self):
        g = random_frame(21, 8, 4)
        stats = pair_containment_stats(g, (1, 2), (4, 5, 6))
        dist = enumerate_distribution(g)
        assert stats.kappa1 == pytest.approx(dist.marginal((1, 2)), abs=1e-10)
        assert stats.kappa2 == pytest.approx(dist.marginal((4, 5, 6)), abs=1e-10)
        assert stats.union_prob == pytest.approx(dist.marginal((1, 2, 4, 5, 6)), abs=1e-10)
        assert stats.not_superset_prob == pytest.approx(
            dist.event_prob(SubsetEventSpec(not_supersets=((1, 2), (4, 5, 6)))), abs=1e-10
        )

    def test_item4_inequality(self):
        for seed in range(12):
            g = random_frame(seed, 7, 4)
            stats = pair_containment_stats(g, (1, 2), (3, 4))
            bound = stats.kappa1 * stats.kappa2 - stats.union_prob
            assert stats.cross_inner_sq <= bound + 1e-12

    def test_degenerate_kappa_rejected(self):
        rows = np.zeros((2, 4))
        rows[0, 0] = rows[1, 1] = 1.0
        with pytest.raises(ConditioningError):
            pair_containment_stats(Frame(rows), (1,), (2,))
        with pytest.raises(ValueError):
            pair_containment_stats(counterexample_frame(), (1,), (1, 2))


class TestAlignment:
    def test_already_aligned(self):
        rows = np.zeros((3, 6))
        rows[0, 0] = rows[1, 1] = rows[2, 2] = 1.0
        g = Frame(rows)
        aligned = align_leading_coordinates(g, (1,))
        assert abs(aligned.rows[1:, 0]).max() < 1e-12

    def test_law_unchanged(self):
        g = random_frame(33, 7, 3)
        aligned = align_leading_coordinates(g, (2, 5))
        before = enumerate_distribution(g).probs
        after = enumerate_distribution(aligned).probs
        assert np.abs(before - after).max() < 1e-10

    def test_split_structure(self):
        g = random_frame(35, 9, 6)
        cols = (1, 2, 3, 4)
        aligned = align_leading_coordinates(g, cols)
        chi = len(cols)
        assert np.abs(aligned.columns(cols)[chi:]).max() < 1e-12
        # the two extra points split as (leading part, tail part)
        assert aligned.column(5).shape == (6,)


class TestClassification:
    def test_equal_full(self):
        g = random_frame(41, 8, 4)
        cls = classify_case(g, (1, 2), (3, 4))
        assert cls.case_tag == "EQUAL_FULL"
        assert (cls.k1, cls.k2, cls.chi) == (2, 2, 4)

    def test_unequal_full(self):
        g = random_frame(43, 9, 5)
        assert classify_case(g, (1, 2), (3, 4, 5)).case_tag == "UNEQUAL_FULL"
        # argument order does not matter
        assert classify_case(g, (3, 4, 5), (1, 2)).case_tag == "UNEQUAL_FULL"

    def test_restricted(self):
        g = random_frame(45, 9, 6)
        assert classify_case(g, (1, 2), (3, 4)).case_tag == "RESTRICTED"

    def test_degenerate(self):
        g = random_frame(47, 8, 3)
        cls = classify_case(g, (1, 2), (3, 4))
        assert cls.case_tag == "DEGENERATE"
        assert cls.union_prob <= 1e-12

    def test_n1_fallback(self):
        g = random_frame(49, 8, 3)
        assert classify_case(g, (1,), (2, 3, 4)).case_tag == "N1_FALLBACK"

    def test_degenerate_kappa_raises(self):
        rows = np.zeros((2, 4))
        rows[0, 0] = rows[1, 1] = 1.0
        with pytest.raises(ConditioningError):
            classify_case(Frame(rows), (1,), (2,))
