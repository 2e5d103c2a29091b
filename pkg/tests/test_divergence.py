"""Collection of tests for chi2 divergences, bounds and tail controls."""
import math
import warnings

import numpy as np

from gtaon import (berry_esseen_binomial_tail, chi2_exact,
                   chi2_lemma3_bound, chi2_lower_terms,
                   pair_consistency_prob)
from gtaon.design import log2_binomial
from gtaon.divergence import (binomial_tail_exact, chi2_lemma3_log1p,
                              chi2_lower_two_terms, chi2_via_pair_consistency,
                              covered_error_bound, covered_q0, de_caen_bound,
                              disjoint_ratio, eta_for_tests, log_binomial,
                              log_overlap_weights, q0_bracket)
from gtaon.divergence import tests_for_eta as n_for_eta
from gtaon.exceptions import (InvalidParameterError, RegimeError,
                              RegimeWarning)
from gtaon.seeding import make_rng


class TestChi2:
    """Class for tests."""

    def test_small_values(self):
        report = chi2_exact(4, 1, 2)
        assert(abs(report.chi2 - 0.75) < 1e-12)
        assert(abs(report.log1p_chi2 - math.log(1.75)) < 1e-12)
        # A single k-set: chi2 = 2^n - 1.
        assert(abs(chi2_exact(3, 3, 2).chi2 - 3.0) < 1e-12)

    def test_no_tests(self):
        report = chi2_exact(100, 5, 0)
        assert(report.chi2 == 0.0)
        assert(report.log1p_chi2 == 0.0)
        assert(report.eta is None)
        assert(report.lemma3_bound == math.inf)

    def test_weights(self):
        for p, k in [(10, 3), (7, 7), (50, 25), (1000, 10)]:
            log_w = log_overlap_weights(p, k)
            assert(abs(math.fsum(np.exp(log_w)) - 1.0) < 1e-10)
        assert(abs(log_binomial(10, 3) - math.log(120)) < 1e-12)
        assert(log_binomial(5, 0) == 0.0)

    def test_monotone_in_n(self):
        values = [chi2_exact(50, 3, n).chi2 for n in range(21)]
        assert(all(b >= a for a, b in zip(values, values[1:])))

    def test_pair_consistency(self):
        assert(pair_consistency_prob(4, 0, 5) == 2.0 ** -5)
        assert(pair_consistency_prob(1, 1, 1) == 0.25)
        for n in range(11):
            exact = chi2_exact(20, 3, n).chi2
            other = chi2_via_pair_consistency(20, 3, n)
            assert(abs(exact - other) <= 1e-9 * max(1.0, exact))

        try:
            pair_consistency_prob(3, 4, 1)
            raise ValueError("Error was not caught!")
        except InvalidParameterError:
            pass

    def test_invalid_parameters(self):
        for p, k, n in [(3, 4, 1), (3, 0, 1), (3, 1, -1), (3.5, 1, 1)]:
            try:
                chi2_exact(p, k, n)
                raise ValueError("Error was not caught!")
            except InvalidParameterError:
                pass

    def test_report_json(self):
        j_data = chi2_exact(1000, 10, 40, eta=0.5).to_json()
        assert(j_data["eta"] == 0.5)
        assert(abs(j_data["log2_binomial"] - log2_binomial(1000, 10)) < 1e-12)
        assert(set(j_data) >= {"p", "k", "n", "chi2", "lemma3_bound"})

    def test_eta_round_trip(self):
        n = n_for_eta(1000, 10, 0.5)
        eta = eta_for_tests(1000, 10, n)
        assert(0.5 <= eta < 0.5 + 1.0 / log2_binomial(1000, 10) + 1e-12)
        assert(eta_for_tests(1000, 10, 10 ** 4) is None)
        try:
            n_for_eta(1000, 10, 1.0)
            raise ValueError("Error was not caught!")
        except InvalidParameterError:
            pass


class TestBounds:
    """Class for tests."""

    def test_upper_bound_dominates(self):
        """chi2 <= tight bound <= default bound below the threshold."""
        for p in [10 ** 3, 10 ** 4, 10 ** 5]:
            k = math.ceil(math.log2(p)) ** 2
            for eta in [0.3, 0.5, 0.7]:
                n = n_for_eta(p, k, eta)
                report = chi2_exact(p, k, n, eta=eta)
                tight = chi2_lemma3_log1p(p, k, eta, tight=True)
                loose = chi2_lemma3_log1p(p, k, eta)
                assert(report.log1p_chi2 <= tight + 1e-9)
                assert(tight <= loose + 1e-9)

    def test_upper_bound_monotone_in_k(self):
        values = [chi2_lemma3_bound(10 ** 4, k, 0.5) for k in range(1, 51)]
        assert(all(b > a for a, b in zip(values, values[1:])))
        assert(chi2_lemma3_bound(10, 9, 0.01) < math.inf)

    def test_lower_terms(self):
        for p in [10 ** 3, 10 ** 4, 10 ** 5, 10 ** 6]:
            k = math.ceil(p ** (1.0 / 3.0))
            n = math.ceil(0.5 * log2_binomial(p, k))
            with warnings.catch_warnings():
                warnings.simplefilter("error", RegimeWarning)
                lower = chi2_lower_terms(p, k, n, 0.5)
            assert(lower >= 0.01)
            chi2 = chi2_exact(p, k, n).chi2
            assert(lower <= chi2)
            assert(chi2_lower_two_terms(p, k, 0.5) <= chi2 * (1 + 1e-9))

    def test_lower_terms_regime(self):
        try:
            chi2_lower_terms(10, 6, 5, 0.5)
            raise ValueError("Error was not caught!")
        except RegimeError:
            pass
        try:
            chi2_lower_two_terms(10, 6, 0.5)
            raise ValueError("Error was not caught!")
        except RegimeError:
            pass
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            chi2_lower_terms(100, 5, 0, 0.5)
        assert(any(issubclass(w.category, RegimeWarning) for w in caught))

    def test_disjoint_ratio(self):
        assert(abs(disjoint_ratio(4, 2) - 1 / 6.) < 1e-12)
        assert(disjoint_ratio(3, 2) == 0.0)
        for p, k in [(100, 5), (1000, 10), (10 ** 6, 100)]:
            assert(disjoint_ratio(p, k) >= 1 - 2 * k * k / p)

    def test_de_caen(self):
        assert(de_caen_bound(16, 2, 0) == 1.0)
        values = [de_caen_bound(16, 2, n) for n in range(10)]
        assert(all(b <= a for a, b in zip(values, values[1:])))
        assert(0.0 < values[-1] < 1.0)


class TestTails:
    """Class for tests."""

    def test_berry_esseen_radius(self):
        for p in [1, 100, 10 ** 4]:
            _, radius = berry_esseen_binomial_tail(p, 0.5, 0.0)
            assert(abs(radius - 6.0 / math.sqrt(p)) < 1e-12)
        value, _ = berry_esseen_binomial_tail(100, 0.5, 0.0)
        assert(abs(value - 0.5) < 1e-12)

    def test_berry_esseen_covers_exact(self):
        rng = make_rng(21)
        for _ in range(50):
            p = int(rng.integers(10, 2001))
            q0 = float(rng.uniform(0.05, 0.95))
            lam = float(rng.uniform(-2.0, 2.0))
            value, radius = berry_esseen_binomial_tail(p, q0, lam)
            assert(abs(binomial_tail_exact(p, q0, lam) - value) <= radius)

    def test_berry_esseen_invalid(self):
        for q0 in [0.0, 1.0, -0.1]:
            try:
                berry_esseen_binomial_tail(100, q0, 0.0)
                raise ValueError("Error was not caught!")
            except InvalidParameterError:
                pass

    def test_q0(self):
        assert(abs(covered_q0(8, 8) - 0.5) < 1e-12)
        low, high = q0_bracket(8, 100, 0.2)
        assert(low < covered_q0(8, 50) < high)
        try:
            q0_bracket(8, 100, 1.0)
            raise ValueError("Error was not caught!")
        except InvalidParameterError:
            pass

    def test_covered_error_bound(self):
        assert(covered_error_bound(10 ** 5, 3000, 0.2) < 0.05)
        assert(covered_error_bound(10 ** 5, 8, 0.2) > 0.2)
        assert(covered_error_bound(5, 5, 0.3) == 1.0)
