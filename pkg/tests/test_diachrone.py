import csv
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dialign import diachrone as D
from dialign.embed import TrainConfig, evaluate_pairs, train
from dialign.errors import TrainingError, UndefinedInputError, ValidationError
from dialign.synth import drift_corpus, two_topic_corpus

from conftest import make_unit

CFG = TrainConfig(dim=20, window=3, min_count=1, epochs=3, sample=0.0, seed=0)


def units_of(lengths, start=1_000_000):
    return [make_unit(" ".join(["w"] * n), ts=start + i, rid=f"u{i}") for i, n in enumerate(lengths)]


def stationary_periods(k=3, n_tokens=8_000, seed=0):
    return [two_topic_corpus(n_tokens, vocab_per_topic=20, seed=seed + i)[0] for i in range(k)]


class TestPartition:
    def test_equal_units(self):
        part = D.partition_equal_words(units_of([100] * 4), 4)
        assert [len(p) for p in part.periods] == [1, 1, 1, 1] and part.words == [100] * 4

    def test_hand_trace(self):
        part = D.partition_equal_words(units_of([1] * 10 + [10]), 2)
        assert part.words == [10, 10]

    def test_too_few(self):
        with pytest.raises(ValidationError):
            D.partition_equal_words(units_of([5, 5]), 3)

    @given(st.lists(st.integers(1, 40), min_size=1, max_size=40), st.integers(1, 6), st.randoms())
    @settings(max_examples=60, deadline=None)
    def test_partition_properties(self, lengths, k, rnd):
        if len(lengths) < k:
            return
        units = units_of(lengths)
        shuffled = units[:]
        rnd.shuffle(shuffled)
        part = D.partition_equal_words(shuffled, k)
        flat = [u for p in part.periods for u in p]
        assert flat == units  # every unit once, chronological
        assert all(p for p in part.periods)
        bounds = part.bounds()
        assert all(a[1] <= b[0] for a, b in zip(bounds, bounds[1:]))
        # each cut lands within one unit's length of its word budget
        total, longest = sum(lengths), max(lengths)
        cum = np.cumsum(part.words)[:-1]
        for i, c in enumerate(cum, 1):
            assert abs(c - i * total / k) <= longest

    def test_manifest(self, tmp_path):
        part = D.partition_equal_words(units_of([3, 3, 3, 3]), 2)
        D.write_manifest_csv(part, tmp_path / "m.csv")
        rows = list(csv.reader((tmp_path / "m.csv").open()))
        assert rows[0] == ["period", "start_ts", "end_ts", "words"]
        assert [r[3] for r in rows[1:]] == ["6", "6"]


class TestTraining:
    def test_sequential_single_period_is_train(self):
        docs = stationary_periods(1)[0]
        [model] = D.train_sequential([docs], CFG)
        ref = train(docs, CFG)
        assert np.array_equal(model.vectors, ref.vectors)

    def test_sequential_stationary(self):
        periods = stationary_periods(3)
        models = D.train_sequential(periods, CFG)
        pairs = [(f"alpha{i}", f"alpha{i + 1}") for i in range(10)] + [(f"beta{i}", f"beta{i + 1}") for i in range(10)]
        means = [evaluate_pairs(m, pairs).mean for m in models]
        assert max(means) - min(means) <= 0.05

    def test_sequential_independent_vocab(self):
        models = D.train_sequential([[["a", "b", "c"]] * 5, [["x", "y"]] * 5], CFG)
        assert set(models[1].words) == {"x", "y"}

    def test_incremental_superset(self):
        rng = random.Random(0)
        base = [[f"t{rng.randrange(30)}" for _ in range(8)] for _ in range(200)]
        periods = [base, base + [["new", "tokens", "appear"]] * 3, base + [["later", "still"]] * 3]
        models = D.train_incremental(periods, CFG)
        for a, b in zip(models, models[1:]):
            assert set(a.words) <= set(b.words)

    def test_incremental_empty_period(self):
        docs = stationary_periods(1)[0]
        models = D.train_incremental([docs, []], CFG)
        assert models[1].words == models[0].words
        assert np.array_equal(models[1].vectors, models[0].vectors)

    def test_error_names_period(self):
        with pytest.raises(TrainingError, match="period 2"):
            D.train_sequential([[["a", "b"]] * 3, [["a"]]], CFG)

    def test_text_units_accepted(self):
        units = drift_corpus(mix=(1.0, 0.0), sentences_per_period=200, seed=0)
        part = D.partition_equal_words(units, 2)
        models = D.train_incremental(part, CFG)
        assert "source" in models[0] and "source" in models[1]


class TestSeries:
    def test_trend_examples(self):
        assert D.monotonic_trend([0.1, 0.2, 0.3]) == D.INCREASING
        assert D.monotonic_trend([0.3, 0.1, 0.2]) == D.NO_TREND
        assert D.monotonic_trend([0.3, 0.3, 0.1]) == D.DECREASING

    def test_two_period_endpoints(self):
        assert D.monotonic_trend([0.388, 0.429]) == D.INCREASING
        assert D.monotonic_trend([0.418, 0.341]) == D.DECREASING

    def test_oov_skipped(self):
        assert D.monotonic_trend([None, 0.1, None, 0.4]) == D.INCREASING
        with pytest.raises(UndefinedInputError):
            D.monotonic_trend([None, 0.2])

    def test_plateau(self):
        assert D.monotonic_trend([0.2, 0.2]) == D.INCREASING

    def test_oov_marker(self, tmp_path):
        m1 = train([["src", "a", "b"]] * 5, CFG)
        m2 = train([["src", "b"]] * 5, CFG)
        [s] = D.shift_series([m1, m2], "src", ["a"])
        assert s.values[1] is None and len(s.values) == 2
        assert s.cells()[1] == D.OOV and s.trend == D.NO_TREND
        D.write_series_csv([s], tmp_path / "s.csv")
        rows = list(csv.reader((tmp_path / "s.csv").open()))
        assert rows[0] == ["source", "target", "period_1", "period_2", "trend"]
        assert rows[1][3] == D.OOV

    def test_source_always_oov(self):
        m = train([["a", "b"]] * 5, CFG)
        with pytest.raises(UndefinedInputError):
            D.shift_series([m, m], "zz", ["a"])

    def test_drift(self):
        assert D.drift([0.5, 0.6, None, 0.3]) == pytest.approx(0.2)
        assert D.drift([None]) == 0.0
