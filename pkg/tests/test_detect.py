"""Collection of tests for the weak-detection tests."""
import numpy as np

from gtaon import (BitMatrix, DesignKind, DesignSpec, DetectVerdict,
                   Hypothesis, Outcomes, PopulationParams, apply_model,
                   covered_count, detect_covered, detect_trivial,
                   gen_all_or_none, gen_bernoulli, sample_defective_set,
                   sample_null)
from gtaon.detect import (covered_threshold, decide_covered, detect_sampled,
                          sample_covered_statistic)
from gtaon.exceptions import InvalidDesignError, InvalidParameterError
from gtaon.seeding import make_rng


class TestVerdict:
    """Class for tests."""

    def test_ties_decide_p(self):
        assert(DetectVerdict.from_threshold(3, 3).decided is Hypothesis.P)
        assert(DetectVerdict.from_threshold(2.9, 3).decided is Hypothesis.Q)
        verdict = DetectVerdict.from_threshold(0, 1)
        assert(verdict.is_error("P"))
        assert(not verdict.is_error(Hypothesis.Q))


class TestTrivial:
    """Class for tests."""

    def setup_method(self):
        self.rng = make_rng(2)
        self.params = PopulationParams(20, 3)

    def test_model_always_detected(self):
        for _ in range(50):
            X = gen_all_or_none(20, 6, self.rng)
            S = sample_defective_set(self.params, self.rng)
            verdict = detect_trivial(X, apply_model(X, S))
            assert(verdict.decided is Hypothesis.P)
            assert(verdict.statistic == verdict.threshold == 6)

    def test_null_rarely_detected(self):
        spec = DesignSpec(DesignKind.ALL_OR_NONE, self.params, n=10)
        decided_p = 0
        for _ in range(200):
            X, Y = sample_null(spec, self.rng)
            decided_p += detect_trivial(X, Y).decided is Hypothesis.P
        # Expected 200 / 2^10.
        assert(decided_p <= 3)

    def test_no_tests(self):
        X = BitMatrix.zeros(0, 5)
        assert(detect_trivial(X, Outcomes([])).decided is Hypothesis.P)

    def test_mixed_rows(self):
        X = BitMatrix.from_dense([[1, 1, 1], [1, 0, 1]])
        try:
            detect_trivial(X, Outcomes([1, 1]))
            raise ValueError("Error was not caught!")
        except InvalidDesignError:
            pass
        try:
            detect_trivial(X, Outcomes([1]))
            raise ValueError("Error was not caught!")
        except InvalidParameterError:
            pass


class TestCovered:
    """Class for tests."""

    def setup_method(self):
        self.rng = make_rng(3)
        self.params = PopulationParams(200, 5)

    def test_covered_count(self):
        X = BitMatrix.from_dense([
            [1, 0, 0, 1],
            [0, 1, 0, 0],
            [0, 0, 0, 1],
        ])
        assert(covered_count(X, Outcomes([1, 1, 1])) == 4)
        assert(covered_count(X, Outcomes([0, 0, 0])) == 1)
        assert(covered_count(X, Outcomes([1, 0, 1])) == 3)

    def test_defectives_covered(self):
        for _ in range(200):
            X = gen_bernoulli(self.params, 30, self.rng)
            S = sample_defective_set(self.params, self.rng)
            assert(covered_count(X, apply_model(X, S)) >= 5)

    def test_all_positive_decides_q(self):
        X = gen_bernoulli(self.params, 30, self.rng)
        verdict = detect_covered(X, Outcomes(np.ones(30)), self.params)
        assert(verdict.decided is Hypothesis.Q)
        assert(verdict.threshold == 200 + 2.5)

    def test_threshold(self):
        threshold, q0 = covered_threshold(200, 5, 5)
        assert(abs(q0 - 0.5) < 1e-12)
        assert(abs(threshold - 102.5) < 1e-9)
        assert(decide_covered(103, 200, 5, 5).decided is Hypothesis.P)
        assert(decide_covered(102, 200, 5, 5).decided is Hypothesis.Q)

    def test_null_count_is_binomial(self):
        """Given n0 negatives, the null count is Binomial(p, q0)."""
        spec = DesignSpec(DesignKind.BERNOULLI, self.params, n=10)
        scores = []
        for _ in range(400):
            X, Y = sample_null(spec, self.rng)
            count = covered_count(X, Y)
            _, q0 = covered_threshold(200, 5, Y.n_negative())
            if Y.n_negative() == 0:
                assert(count == 200)
                continue
            scores.append((count - 200 * q0) / np.sqrt(200 * q0 * (1 - q0)))
        assert(abs(np.mean(scores)) < 5 / np.sqrt(len(scores)))
        assert(0.7 < np.var(scores) < 1.3)

    def test_population_mismatch(self):
        X = gen_bernoulli(self.params, 5, self.rng)
        try:
            detect_covered(X, Outcomes(np.zeros(5)), PopulationParams(100, 5))
            raise ValueError("Error was not caught!")
        except InvalidParameterError:
            pass

    def test_sampled_statistic(self):
        for _ in range(100):
            count, n_negative = sample_covered_statistic(
                200, 5, 20, "P", self.rng)
            assert(5 <= count <= 200)
            assert(0 <= n_negative <= 20)
        count, n_negative = sample_covered_statistic(200, 5, 0, "Q", self.rng)
        assert((count, n_negative) == (200, 0))
        verdict = detect_sampled(200, 5, 0, "P", self.rng)
        assert(verdict.decided is Hypothesis.Q)
        try:
            sample_covered_statistic(5, 6, 1, "P", self.rng)
            raise ValueError("Error was not caught!")
        except InvalidParameterError:
            pass

    def test_sampled_matches_materialised(self):
        """Mean covered counts agree under both hypotheses."""
        spec = DesignSpec(DesignKind.BERNOULLI, self.params, n=20)
        trials = 300
        for hypothesis in ["P", "Q"]:
            sampled = np.mean([
                sample_covered_statistic(200, 5, 20, hypothesis, self.rng)[0]
                for _ in range(trials)])
            counts = []
            for _ in range(trials):
                if hypothesis == "P":
                    X = gen_bernoulli(self.params, 20, self.rng)
                    S = sample_defective_set(self.params, self.rng)
                    Y = apply_model(X, S)
                else:
                    X, Y = sample_null(spec, self.rng)
                counts.append(covered_count(X, Y))
            assert(abs(sampled - np.mean(counts)) < 6.0)
