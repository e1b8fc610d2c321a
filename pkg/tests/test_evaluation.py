from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lff.errors import DomainError, FormatError, TooShortError
from lff.evaluation import (
    Trial,
    compute_eer,
    cosine_score,
    read_scores,
    read_trial_list,
    score_trial,
    score_trials,
    segment_embeddings,
    segment_starts,
    write_scores,
    write_trial_list,
)
from lff.signal_io import AudioBuffer
from oracles import eer_max_min, exhaustive_eer_staircase


class ConstantModel:
    """Stub whose embedding ignores the audio."""

    def __init__(self, vec):
        self.vec = np.asarray(vec, dtype=float)

    def embed_batch(self, segments):
        return np.tile(self.vec, (len(segments), 1))


class EnergyModel:
    def embed_batch(self, segments):
        segments = np.asarray(segments)
        return np.stack([segments.std(axis=1), np.abs(segments).max(axis=1) + 0.1, np.ones(len(segments))], axis=1)


def _buf(seconds, seed=0):
    return AudioBuffer(np.random.default_rng(seed).standard_normal(int(seconds * 16000)), 16000)


class TestSegmentation:
    def test_four_seconds_one_segment(self):
        assert segment_starts(64000, 16000) == [0]

    def test_six_seconds_three_segments(self):
        assert segment_starts(96000, 16000) == [0, 16000, 32000]

    def test_too_short(self):
        with pytest.raises(TooShortError):
            segment_starts(63999, 16000)

    def test_embeddings_normalized(self):
        emb = segment_embeddings(_buf(6.5), EnergyModel())
        assert emb.shape == (3, 3)
        np.testing.assert_allclose(np.linalg.norm(emb, axis=1), 1.0)


class TestScoring:
    def test_identical_single_segment_utterances(self):
        a = _buf(4.0, seed=4)
        assert score_trial(a, a, EnergyModel()) == pytest.approx(1.0, abs=1e-6)

    def test_identical_multi_segment_is_pair_mean(self):
        # all enroll x test pairs are averaged, so cross-segment pairs pull a
        # multi-segment utterance scored against itself below 1
        a = _buf(5.5, seed=4)
        emb = EnergyModel().embed_batch(np.stack([a.samples[s : s + 64000] for s in (0, 16000)]))
        unit = emb / np.linalg.norm(emb, axis=1, keepdims=True)
        expected = np.mean([[float(np.dot(u, v)) for v in unit] for u in unit])
        got = score_trial(a, a, EnergyModel())
        assert got == pytest.approx(expected, abs=1e-12)
        assert got < 1.0

    def test_identical_with_constant_embeddings(self):
        a = _buf(6.0, seed=5)
        assert score_trial(a, a, ConstantModel([0.3, -1.0, 2.0])) == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal_stubs(self):
        enroll = segment_embeddings(_buf(4.0), ConstantModel([1.0, 0.0, 0.0]))
        test = segment_embeddings(_buf(4.0), ConstantModel([0.0, 2.0, 0.0]))
        assert cosine_score(enroll, test) == 0.0

    def test_score_trials_cache_and_loader(self):
        utts = {"a": _buf(4.0, 1), "b": _buf(5.0, 2)}
        calls = []

        def loader(uid):
            calls.append(uid)
            return utts[uid]

        trials = [Trial("a", "b", True), Trial("b", "a", False), Trial("a", "a", True)]
        pairs = score_trials(trials, loader, EnergyModel())
        assert sorted(calls) == ["a", "b"]
        assert pairs[0][0] == pytest.approx(pairs[1][0], abs=1e-12)
        assert [t for _, t in pairs] == [True, False, True]


def _random_score_set(rng):
    n_tar, n_non = int(rng.integers(1, 7)), int(rng.integers(1, 7))
    # a small alphabet of scores forces ties between and within classes
    values = rng.integers(0, 6, n_tar + n_non) / 4.0
    labels = [True] * n_tar + [False] * n_non
    return values.tolist(), labels


class TestEer:
    def test_separable(self):
        eer, thr = compute_eer([0.9, 0.8, 0.1, 0.2], [True, True, False, False])
        assert eer == 0.0
        assert 0.2 < thr <= 0.8

    def test_worked_example(self):
        eer, _ = compute_eer([0.6, 0.4, 0.5, 0.3], [True, True, False, False])
        assert eer == 0.25
        assert eer_max_min([0.6, 0.4, 0.5, 0.3], [True, True, False, False]) == Fraction(1, 4)

    def test_hull_never_exceeds_staircase(self):
        rng = np.random.default_rng(9)
        for _ in range(200):
            s, l = _random_score_set(rng)
            assert compute_eer(s, l)[0] <= exhaustive_eer_staircase(s, l) + 1e-12

    def test_matches_exact_oracle(self):
        rng = np.random.default_rng(1)
        for _ in range(300):
            s, l = _random_score_set(rng)
            assert abs(compute_eer(s, l)[0] - float(eer_max_min(s, l))) < 1e-12

    def test_shuffled_labels(self):
        rng = np.random.default_rng(0)
        scores = rng.standard_normal(4000)
        labels = rng.permutation(np.arange(4000) < 2000)
        assert abs(compute_eer(scores, labels)[0] - 0.5) <= 0.05

    def test_pairs_input(self):
        pairs = [(0.6, 1), (0.4, 1), (0.5, 0), (0.3, 0)]
        assert compute_eer(pairs) == compute_eer([0.6, 0.4, 0.5, 0.3], [1, 1, 0, 0])

    @pytest.mark.parametrize("labels", [[True, True], [False, False]])
    def test_needs_both_classes(self, labels):
        with pytest.raises(DomainError):
            compute_eer([0.1, 0.2], labels)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.tuples(st.integers(-20, 20), st.booleans()), min_size=2, max_size=25)
           .filter(lambda p: any(t for _, t in p) and not all(t for _, t in p)))
    def test_monotone_transform_invariance(self, pairs):
        s = np.array([v for v, _ in pairs], float)
        l = [t for _, t in pairs]
        a = compute_eer(s, l)[0]
        assert compute_eer(np.exp(s / 7.0), l)[0] == pytest.approx(a, abs=1e-12)
        assert compute_eer(3 * s - 11, l)[0] == pytest.approx(a, abs=1e-12)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.tuples(st.integers(-20, 20), st.booleans()), min_size=2, max_size=25)
           .filter(lambda p: any(t for _, t in p) and not all(t for _, t in p)))
    def test_label_swap_symmetry(self, pairs):
        s = np.array([v for v, _ in pairs], float)
        l = np.array([t for _, t in pairs])
        a = compute_eer(s, l)[0]
        assert 0.0 <= a <= 1.0
        assert compute_eer(-s, ~l)[0] == pytest.approx(a, abs=1e-12)


class TestFiles:
    def test_trial_list_round_trip(self, tmp_path):
        trials = [Trial("x/a.wav", "y/b.wav", True), Trial("c.wav", "d.wav", False)]
        write_trial_list(tmp_path / "t.txt", trials)
        assert read_trial_list(tmp_path / "t.txt") == trials

    def test_trial_list_bad_line(self, tmp_path):
        (tmp_path / "t.txt").write_text("yes a.wav b.wav\n")
        with pytest.raises(FormatError):
            read_trial_list(tmp_path / "t.txt")

    def test_scores_round_trip(self, tmp_path):
        pairs = [(0.1234567890123, True), (-0.5, False)]
        write_scores(tmp_path / "s.txt", pairs)
        assert read_scores(tmp_path / "s.txt") == pairs
