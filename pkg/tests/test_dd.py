"""Collection of tests for definite-defective identification."""
import math
import warnings

import numpy as np

from gtaon import (BitMatrix, DefectiveSet, Outcomes, PopulationParams,
                   Witness, apply_model, build_saffron, decode_saffron,
                   dd_negative_witness, gen_bernoulli, sample_defective_set)
from gtaon.dd import (block_outcomes, code_length, none_probability,
                      one_defective_probability, saffron_matrix,
                      saffron_test_count)
from gtaon.exceptions import (DegenerateDesignError,
                              IndeterminateWitnessWarning,
                              InvalidParameterError, ModelViolationError)
from gtaon.seeding import make_rng


class TestSaffron:
    """Class for tests."""

    def setup_method(self):
        self.rng = make_rng(5)
        self.blocks = build_saffron(64, 8, 2, self.rng)

    def test_code_length(self):
        assert(code_length(64, 8) == 3)
        assert(code_length(10, 5) == 1)
        assert(code_length(9, 4) == 2)
        assert(code_length(5, 5) == 0)
        assert(saffron_test_count(64, 8, 2) == 12)

    def test_codewords(self):
        block = self.blocks[0]
        assert(block.codeword(5).astype(int).tolist() == [1, 0, 1, 0, 1, 0])
        for i in range(len(block.subset)):
            assert(block.codeword(i).sum() == block.v)
            assert(block.local_index(block.codeword(i)[:block.v]) == i)
        try:
            block.codeword(len(block.subset))
            raise ValueError("Error was not caught!")
        except InvalidParameterError:
            pass

    def test_blocks(self):
        assert(len(self.blocks) == 2)
        for block in self.blocks:
            assert(len(block.subset) == 8)
            assert(len(set(block.subset.tolist())) == 8)
            assert(np.all(np.diff(block.subset) > 0))
        X = saffron_matrix(self.blocks, 64)
        assert(X.shape == (12, 64))
        assert(np.all(X.row_weights() == 4))

    def test_block_outcomes_match_model(self):
        X = saffron_matrix(self.blocks, 64)
        params = PopulationParams(64, 8)
        for _ in range(20):
            S = sample_defective_set(params, self.rng)
            assert(np.array_equal(block_outcomes(self.blocks, S),
                                  apply_model(X, S).y))

    def test_decode_single_defective(self):
        block = build_saffron(64, 8, 1, self.rng)[0]
        for i, item in enumerate(block.subset.tolist()):
            S = DefectiveSet([item], 64)
            result = decode_saffron([block], Outcomes(
                block_outcomes([block], S)))
            assert(result.identified == item)
            assert(result.block_outcomes == (block.v,))

    def test_decode_none(self):
        block = self.blocks[0]
        outside = np.setdiff1d(np.arange(64), block.subset)[:8]
        S = DefectiveSet(outside, 64)
        result = decode_saffron([block], Outcomes(block_outcomes([block], S)))
        assert(result.is_none)
        assert(result.block_outcomes == (0,))

    def test_model_violation(self):
        block = self.blocks[0]
        for y in [[1, 0, 0, 0, 0, 0], [1, 1, 0, 1, 0, 0]]:
            try:
                decode_saffron([block], Outcomes(y))
                raise ValueError("Error was not caught!")
            except ModelViolationError:
                pass
        # More than v positives: two or more defectives, skipped.
        result = decode_saffron([block], Outcomes([1, 1, 1, 1, 0, 0]))
        assert(result.is_none)
        try:
            decode_saffron([block], Outcomes([0, 0]))
            raise ValueError("Error was not caught!")
        except InvalidParameterError:
            pass

    def test_violation_after_identification(self):
        first = self.blocks[0].codeword(2).tolist()
        try:
            decode_saffron(self.blocks, Outcomes(first + [1, 0, 0, 0, 0, 0]))
            raise ValueError("Error was not caught!")
        except ModelViolationError:
            pass
        try:
            decode_saffron(self.blocks, Outcomes(first + [1, 1, 0, 1, 0, 0]))
            raise ValueError("Error was not caught!")
        except ModelViolationError:
            pass
        second = self.blocks[1].codeword(4).tolist()
        result = decode_saffron(self.blocks, Outcomes(first + second))
        assert(result.identified == int(self.blocks[0].subset[2]))
        assert(result.block_outcomes == (3, 3))

    def test_one_defective_frequency(self):
        """Blocks decode about a fraction exp(-1) of the time."""
        p, k, trials = 2000, 20, 3000
        params = PopulationParams(p, k)
        decoded = 0
        for _ in range(trials):
            blocks = build_saffron(p, k, 1, self.rng)
            S = sample_defective_set(params, self.rng)
            result = decode_saffron(blocks, Outcomes(block_outcomes(blocks, S)))
            decoded += int(not result.is_none)
        rate = decoded / trials
        expected = one_defective_probability(p, k)
        sigma = math.sqrt(expected * (1 - expected) / trials)
        assert(abs(rate - expected) < 5 * sigma)
        assert(abs(rate - math.exp(-1)) < 0.05)

    def test_no_false_identification(self):
        params = PopulationParams(200, 10)
        for _ in range(200):
            blocks = build_saffron(200, 10, 3, self.rng)
            S = sample_defective_set(params, self.rng)
            result = decode_saffron(blocks, Outcomes(block_outcomes(blocks, S)))
            assert(result.is_none or result.identified in S)

    def test_degenerate(self):
        try:
            build_saffron(10, 6, 1, self.rng)
            raise ValueError("Error was not caught!")
        except DegenerateDesignError:
            pass
        try:
            build_saffron(64, 8, 0, self.rng)
            raise ValueError("Error was not caught!")
        except InvalidParameterError:
            pass

    def test_probabilities(self):
        one = one_defective_probability(1000, 100)
        assert(abs(one - math.exp(-1)) < 0.03)
        assert(abs(none_probability(1000, 100, 2) - (1 - one) ** 2) < 1e-12)


class TestWitness:
    """Class for tests."""

    def setup_method(self):
        # Items 0..9 each sit in a single test, so no pair of them covers
        # all three positive tests.
        dense = np.zeros((3, 12), dtype=bool)
        for j in range(10):
            dense[j % 3, j] = True
        dense[[0, 1], 10] = True
        dense[2, 11] = True
        self.X = BitMatrix.from_dense(dense)
        self.S = DefectiveSet([10, 11], 12)
        self.Y = apply_model(self.X, self.S)

    def test_no_tests(self):
        params = PopulationParams(16, 2)
        rng = make_rng(1)
        X = gen_bernoulli(params, 0, rng)
        S = sample_defective_set(params, rng)
        Y = apply_model(X, S)
        assert(dd_negative_witness(X, Y, S, 2, 10 ** 5) is Witness.FOUND)

    def test_many_tests(self):
        params = PopulationParams(16, 2)
        for seed in range(5):
            rng = make_rng(seed)
            X = gen_bernoulli(params, 60, rng)
            S = sample_defective_set(params, rng)
            Y = apply_model(X, S)
            assert(dd_negative_witness(X, Y, S, 2, 10 ** 5) is Witness.ABSENT)

    def test_exhaustive_absent(self):
        assert(self.Y.to_list() == [1, 1, 1])
        assert(dd_negative_witness(self.X, self.Y, self.S, 2, 100) is
               Witness.ABSENT)

    def test_indeterminate(self):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            result = dd_negative_witness(
                self.X, self.Y, self.S, 2, 1, rng=make_rng(0))
        assert(result is Witness.INDETERMINATE)
        assert(any(issubclass(w.category, IndeterminateWitnessWarning)
                   for w in caught))

    def test_found(self):
        dense = self.X.to_dense()
        dense[:, 0] = True
        X = BitMatrix.from_dense(dense)
        assert(dd_negative_witness(X, self.Y, self.S, 2, 100) is
               Witness.FOUND)

    def test_invalid_budget(self):
        try:
            dd_negative_witness(self.X, self.Y, self.S, 2, 0)
            raise ValueError("Error was not caught!")
        except InvalidParameterError:
            pass
