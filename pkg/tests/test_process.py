import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from detproc.harness import random_frame
from detproc.process import (
    ConditioningError,
    EnumerationCapError,
    Frame,
    ProcessDistribution,
    SubsetEventSpec,
    condition_not_superset,
    condition_off_point,
    condition_on_point,
    counterexample_frame,
    elementary_prob,
    enumerate_distribution,
    inclusion_prob,
    is_rank2_determinantal_certificate,
    prob_event,
    sample,
    sample_many,
    shift_after_removal,
)

# hand-computed 2x2 minors of the counterexample frame
EXAMPLE_TABLE = {
    (1, 2): 0.25, (1, 3): 0.0, (1, 4): 0.25,
    (2, 3): 0.25, (2, 4): 0.0, (3, 4): 0.25,
}


@pytest.fixture
def f():
    return counterexample_frame()


class TestFrame:
    def test_validation(self):
        with pytest.raises(ValueError):
            Frame(np.ones((2, 2, 2)))
        with pytest.raises(ValueError):
            Frame(np.array([[np.inf, 0.0]]))
        with pytest.raises(ValueError):
            Frame(np.ones((3, 2)))  # p > N

    def test_reorthonormalization_flag(self):
        rows = np.array([[1.0, 1e-6, 0.0], [0.0, 1.0, 0.0]])
        fixed = Frame.from_rows(rows)
        assert fixed.reorthonormalized
        assert np.abs(fixed.rows @ fixed.rows.T - np.eye(2)).max() < 1e-12
        clean = Frame.from_rows(np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]))
        assert not clean.reorthonormalized
        with pytest.raises(ValueError):
            Frame.from_rows(rows, fix=False)

    def test_json_round_trip(self, f, tmp_path):
        path = tmp_path / "frame.json"
        path.write_text(f.to_json())
        back = Frame.from_json_file(str(path))
        assert np.allclose(back.rows, f.rows)
        data = json.loads(f.to_json())
        assert data["p"] == 2 and data["n"] == 4

    def test_csv_loader(self, f, tmp_path):
        path = tmp_path / "frame.csv"
        path.write_text("\n".join(",".join(repr(float(v)) for v in row) for row in f.rows))
        back = Frame.from_csv_file(str(path))
        assert np.allclose(back.rows, f.rows)

    def test_loader_rejects_degenerate_cardinality(self, tmp_path):
        path = tmp_path / "frame.json"
        path.write_text(json.dumps({"p": 1, "n": 3, "rows": [[1.0, 0.0, 0.0]]}))
        with pytest.raises(ValueError):
            Frame.from_json_file(str(path))

    def test_rows_frozen(self, f):
        with pytest.raises(ValueError):
            f.rows[0, 0] = 1.0


class TestInclusionAndElementary:
    def test_examples(self, f):
        assert inclusion_prob(f, (1,)) == pytest.approx(0.5, abs=1e-15)
        assert inclusion_prob(f, ()) == 1.0
        assert inclusion_prob(f, (1, 3)) == pytest.approx(0.0, abs=1e-15)
        assert inclusion_prob(f, (1, 2, 3)) == 0.0  # beyond cardinality
        with pytest.raises(ValueError):
            inclusion_prob(f, (0, 1))

    def test_elementary(self, f):
        assert elementary_prob(f, (1, 2)) == pytest.approx(0.25, abs=1e-15)
        assert elementary_prob(f, (2, 4)) == pytest.approx(0.0, abs=1e-15)
        with pytest.raises(ValueError):
            elementary_prob(f, (1,))

    def test_elementary_sums_to_one(self):
        g = random_frame(123, 8, 3)
        dist = enumerate_distribution(g)
        assert float(dist.probs.sum()) == pytest.approx(1.0, abs=1e-10)


class TestEnumeration:
    def test_counterexample_table(self, f):
        dist = enumerate_distribution(f)
        for combo, expected in EXAMPLE_TABLE.items():
            assert dist.prob_of(combo) == pytest.approx(expected, abs=1e-14)

    def test_near_deterministic_frame(self):
        rows = np.zeros((2, 3))
        rows[0, 0] = rows[1, 1] = 1.0
        dist = enumerate_distribution(Frame(rows))
        assert dist.prob_of((1, 2)) == pytest.approx(1.0)
        assert dist.marginal((1,)) == pytest.approx(1.0)

    def test_cap(self, f):
        with pytest.raises(EnumerationCapError):
            enumerate_distribution(f, cap=3)

    def test_distribution_invariants(self):
        with pytest.raises(ValueError):
            ProcessDistribution(4, 2, np.array([0.5, 0.5, 0.25, -1e-12, 0, 0.25 + 1e-12]))
        with pytest.raises(ValueError):
            ProcessDistribution(4, 2, np.full(6, 0.2))
        d = ProcessDistribution(4, 2, np.array([0.5, 0.25, 0.25, -5e-15, 5e-15, 0.0]))
        assert d.prob_of((2, 3)) == 0.0


class TestProbEvent:
    def test_closed_form_examples(self, f):
        spec = SubsetEventSpec(include=(3,), not_supersets=((1,), (2,)))
        assert prob_event(f, spec, method="closed") == pytest.approx(0.25, abs=1e-14)
        assert prob_event(f, SubsetEventSpec()) == 1.0
        spec = SubsetEventSpec(not_supersets=((1, 2),))
        assert prob_event(f, spec, method="closed") == pytest.approx(0.75, abs=1e-14)

    def test_overlap_rejected(self, f):
        with pytest.raises(ValueError, match="overlap"):
            prob_event(f, SubsetEventSpec(include=(1,), not_supersets=((1, 2),)))
        with pytest.raises(ValueError, match="overlap"):
            SubsetEventSpec(include=(1,), exclude=(1,)).validate(4)

    def test_exclusions_match_oracle(self):
        g = random_frame(17, 8, 4)
        dist = enumerate_distribution(g)
        spec = SubsetEventSpec(include=(1, 5), exclude=(2, 6), not_supersets=((3, 4),))
        closed = prob_event(g, spec, method="closed")
        assert closed == pytest.approx(dist.event_prob(spec), abs=1e-12)

    def test_three_blocks_routes_to_oracle(self):
        g = random_frame(29, 8, 4)
        spec = SubsetEventSpec(not_supersets=((1,), (2,), (3,)))
        auto = prob_event(g, spec)
        assert auto == pytest.approx(enumerate_distribution(g).event_prob(spec), abs=1e-12)
        with pytest.raises(ValueError):
            prob_event(g, spec, method="closed")

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10**6))
    def test_closed_equals_oracle(self, seed):
        g = random_frame(seed, 7, 3)
        rng = np.random.default_rng(seed)
        perm = list(rng.permutation(7) + 1)
        spec = SubsetEventSpec(
            include=tuple(sorted(perm[:1])),
            exclude=tuple(sorted(perm[1:2])),
            not_supersets=(tuple(sorted(perm[2:4])), tuple(sorted(perm[4:5]))),
        )
        closed = prob_event(g, spec, method="closed")
        oracle = enumerate_distribution(g).event_prob(spec)
        assert closed == pytest.approx(oracle, abs=1e-11)


class TestConditioning:
    def test_not_superset_law(self, f):
        psi = condition_not_superset(f, [(1, 2)])
        for combo in ((1, 4), (2, 3), (3, 4)):
            assert psi.prob_of(combo) == pytest.approx(1 / 3, abs=1e-12)
        assert psi.prob_of((1, 3)) == 0.0

    def test_empty_conditioning_is_identity(self, f):
        psi = condition_not_superset(f, [])
        assert np.allclose(psi.probs, enumerate_distribution(f).probs)

    def test_sure_event_conditioning(self, f):
        # {1,3} can never be contained, so conditioning changes nothing
        psi = condition_not_superset(f, [(1, 3)])
        assert np.allclose(psi.probs, enumerate_distribution(f).probs)

    def test_null_event_rejected(self):
        rows = np.zeros((2, 3))
        rows[0, 0] = rows[1, 1] = 1.0
        with pytest.raises(ConditioningError):
            condition_not_superset(Frame(rows), [(1,)])

    def test_condition_on_point_example(self, f):
        fy = condition_on_point(f, 1)
        assert (fy.p, fy.n) == (1, 3)
        # old points 2, 3, 4 are now 1, 2, 3
        assert inclusion_prob(fy, (1,)) == pytest.approx(0.5, abs=1e-12)
        assert inclusion_prob(fy, (2,)) == pytest.approx(0.0, abs=1e-12)
        assert inclusion_prob(fy, (3,)) == pytest.approx(0.5, abs=1e-12)

    def test_condition_on_point_identity_block(self):
        rows = np.zeros((3, 5))
        rows[0, 0] = rows[1, 1] = rows[2, 2] = 1.0
        fy = condition_on_point(Frame(rows), 2)
        dist = enumerate_distribution(fy)
        assert dist.prob_of((1, 2)) == pytest.approx(1.0)

    def test_condition_on_point_matches_oracle_law(self):
        g = random_frame(31, 7, 3)
        y = 4
        fy = condition_on_point(g, y)
        dy = enumerate_distribution(fy)
        dist = enumerate_distribution(g)
        py = dist.marginal((y,))
        for combo, pr in dy.items():
            original = tuple(sorted(i if i < y else i + 1 for i in combo) + [y])
            assert pr == pytest.approx(dist.prob_of(tuple(sorted(original))) / py, abs=1e-10)

    def test_condition_on_point_null(self):
        rows = np.zeros((2, 4))
        rows[0, 0] = rows[1, 1] = 1.0
        with pytest.raises(ConditioningError):
            condition_on_point(Frame(rows), 3)

    def test_condition_off_point_law(self):
        g = random_frame(37, 7, 3)
        y = 2
        fy, factor = condition_off_point(g, y)
        assert factor == pytest.approx(1.0 - inclusion_prob(g, (y,)), abs=1e-12)
        dist = enumerate_distribution(g)
        dy = enumerate_distribution(fy)
        for combo, pr in dy.items():
            original = tuple(i if i < y else i + 1 for i in combo)
            expected = dist.event_prob(SubsetEventSpec(include=original, exclude=(y,)))
            assert pr * factor == pytest.approx(expected, abs=1e-10)

    def test_shift_after_removal(self):
        assert shift_after_removal((1, 3, 5), 2) == (1, 2, 4)
        with pytest.raises(ValueError):
            shift_after_removal((2,), 2)


class TestInvariance:
    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 10**6))
    def test_row_rotation_preserves_law(self, seed):
        g = random_frame(seed, 7, 3)
        rng = np.random.default_rng(seed + 1)
        q, r = np.linalg.qr(rng.standard_normal((3, 3)))
        rotated = Frame(q @ g.rows)
        assert np.abs(
            enumerate_distribution(g).probs - enumerate_distribution(rotated).probs
        ).max() < 1e-10


class TestCertificate:
    def test_counterexample_certified(self, f):
        psi = condition_not_superset(f, [(1, 2)])
        verdict = is_rank2_determinantal_certificate(psi)
        assert verdict.status == "not determinantal"
        assert verdict.pair == (1, 2)
        (k_lo, r_lo), (k_hi, r_hi) = verdict.witness
        assert (k_lo, r_lo) == (3, pytest.approx(0.0, abs=1e-12))
        assert (k_hi, r_hi) == (4, pytest.approx(1.0, abs=1e-12))

    def test_true_law_not_flagged(self, f):
        verdict = is_rank2_determinantal_certificate(enumerate_distribution(f))
        assert verdict.status == "inconclusive"

    def test_wrong_cardinality(self):
        g = random_frame(3, 6, 3)
        verdict = is_rank2_determinantal_certificate(enumerate_distribution(g))
        assert verdict.status == "inapplicable"


class TestSampling:
    def test_determinism(self, f):
        assert sample(f, 99) == sample(f, 99)
        assert sample_many(f, 5, 10) == sample_many(f, 5, 10)

    def test_single_support(self):
        rows = np.zeros((2, 3))
        rows[0, 0] = rows[1, 1] = 1.0
        g = Frame(rows)
        assert all(s == (1, 2) for s in sample_many(g, 0, 50))

    def test_empirical_frequencies(self, f):
        draws = sample_many(f, 2024, 100_000)
        counts = {}
        for d in draws:
            counts[d] = counts.get(d, 0) + 1
        for combo in ((1, 2), (1, 4), (2, 3), (3, 4)):
            assert counts[combo] / 100_000 == pytest.approx(0.25, abs=0.01)
        assert (1, 3) not in counts and (2, 4) not in counts


def test_distribution_csv_export(f):
    text = enumerate_distribution(f).to_csv()
    lines = text.strip().splitlines()
    assert lines[0] == "subset,prob"
    assert lines[1].startswith("1-2,")
    assert len(lines) == 7


def test_marginal_consistency():
    g = random_frame(8, 8, 3)
    dist = enumerate_distribution(g)
    for S in ((2,), (1, 5), (3, 6, 8)):
        assert dist.marginal(S) == pytest.approx(inclusion_prob(g, S), abs=1e-10)
