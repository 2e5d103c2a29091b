"""End-to-end Monte Carlo checks of the main claims.

Most of them take minutes and only run with ``pytest --runslow``. The
parameter grids are a desk-scale calibration, see the README.
"""
import math

import pytest

from gtaon import berry_esseen_binomial_tail, chi2_exact
from gtaon.design import log2_binomial
from gtaon.divergence import binomial_tail_exact
from gtaon.harness import engine, experiments
from gtaon.harness.config import SweepConfig
from gtaon.harness.grid_parser import parse_k_rule
from gtaon.harness.stats import Rate
from gtaon.seeding import make_rng


class TestAcceptance:
    """Class for tests."""

    def test_chi2_without_tests(self):
        rng = make_rng(100)
        for _ in range(100):
            p = int(rng.integers(1, 10 ** 6))
            k = int(rng.integers(1, p + 1))
            assert(chi2_exact(p, k, 0).chi2 == 0.0)

    @pytest.mark.slow
    def test_trivial_detector(self):
        trials = 10 ** 6
        summary = experiments.run_detect_experiment(
            20, 2, 10, detector="trivial", trials=trials, seed=4)
        assert(summary["errors_p"] == 0)
        assert(Rate(summary["errors_q"], trials).within(2.0 ** -10, 5))

    @pytest.mark.slow
    def test_covered_detector(self):
        p = 10 ** 5
        k = parse_k_rule("ceil(p^0.7)")(p)
        n = int(math.floor(0.5 * k * math.log2(p / k)))
        dense = experiments.run_detect_experiment(
            p, k, n, trials=1000, seed=5, reduced=True)
        assert(dense["error_rate"] <= 0.1)

        n = int(math.floor(0.5 * 8 * math.log2(p / 8)))
        sparse = experiments.run_detect_experiment(
            p, 8, n, trials=1000, seed=5, reduced=True)
        assert(0.4 <= sparse["error_rate"] <= 0.6)

    @pytest.mark.slow
    def test_definite_defectives(self):
        trials = 10 ** 5
        for c in [1, 2, 3]:
            summary = experiments.run_dd_experiment(
                10 ** 4, 100, c, trials, seed=6)
            assert(summary["false_identifications"] == 0)
            none = Rate(int(round(summary["none_rate"] * trials)), trials)
            assert(none.within(summary["limit_none_rate"], 5))

    @pytest.mark.slow
    def test_witness_frequency(self):
        n = int(math.floor(0.5 * log2_binomial(16, 2)))
        trials = 10 ** 4
        summary = experiments.run_witness_experiment(
            16, 2, n, trials, seed=7)
        bound = summary["de_caen_bound"]
        sigma = math.sqrt(bound * (1.0 - bound) / trials)
        assert(summary["indeterminate"] == 0)
        assert(summary["frequency"] >= bound - 3 * sigma)

    @pytest.mark.slow
    def test_extra_test_predictor(self):
        frame = experiments.run_yprime_experiment(
            64, [0.0, 0.25, 0.5, 0.75, 1.0], 10 ** 5, seed=8)
        for _, row in frame.iterrows():
            rate = Rate(int(row["successes"]), int(row["trials"]))
            assert(rate.within(row["expected"], 5))
        assert(frame["rate"].iloc[-1] == 1.0)

    @pytest.mark.slow
    def test_recovery_contrast(self):
        """Weak recovery appears between half and 1.4 times k log2(p / k)."""
        config = SweepConfig(p=2 ** 16, k="8", betas=[0.5, 1.4], trials=500,
                             seed=9, delta=0.1)
        curve, _ = engine.run_sweep(config)
        low = curve.rate_at(0.5, "weak").rate
        high = curve.rate_at(1.4, "weak").rate
        assert(high - low >= 0.5)

    @pytest.mark.slow
    def test_exact_recovery(self):
        config = SweepConfig(p=2 ** 16, k="8", betas=[1.8], trials=200,
                             seed=10, decoder="ml_exhaustive")
        curve, records = engine.run_sweep(config)
        assert(curve.rate_at(1.8, "exact").rate >= 0.9)
        assert(sum(r.fallback for r in records) <= 10)

    @pytest.mark.slow
    def test_column_zeroed_saving(self):
        """Planning for fewer defectives helps below the threshold."""
        common = dict(p=2 ** 16, k="8", betas=[0.55], trials=500, seed=11,
                      delta=0.25)
        zeroed, _ = engine.run_sweep(SweepConfig(
            design="column_zeroed", alpha_prime=0.5, **common))
        bernoulli, _ = engine.run_sweep(SweepConfig(**common))
        assert(zeroed.rate_at(0.55, "weak").rate >=
               bernoulli.rate_at(0.55, "weak").rate + 0.15)

    @pytest.mark.slow
    def test_berry_esseen(self):
        rng = make_rng(12)
        for _ in range(50):
            p = int(rng.integers(10 ** 3, 10 ** 5 + 1))
            q0 = float(rng.uniform(0.05, 0.95))
            lam = float(rng.uniform(-3.0, 3.0))
            value, radius = berry_esseen_binomial_tail(p, q0, lam)
            assert(abs(binomial_tail_exact(p, q0, lam) - value) <= radius)
