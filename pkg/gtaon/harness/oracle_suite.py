"""Brute-force and Monte Carlo oracles for the closed-form calculators."""
import logging
import math

from dataclasses import dataclass

import numpy as np

from gtaon.bitmatrix import BitMatrix
from gtaon.design import apply_model, solve_nu
from gtaon.divergence import (chi2_exact, chi2_via_pair_consistency,
                              pair_consistency_prob,
                              berry_esseen_binomial_tail,
                              binomial_tail_exact)
from gtaon.enumeration import (chi2_enumerated, bayes_error_oracle,
                               ENUMERATION_GUARD)
from gtaon.exceptions import OracleFailure
from gtaon.harness.stats import binomial_sigma
from gtaon.seeding import trial_rng


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OracleResult:
    """One comparison between a calculator and its oracle."""

    oracle: str
    params: dict
    observed: float
    expected: float
    tolerance: float
    passed: bool

    @property
    def delta(self):
        return abs(self.observed - self.expected)

    def to_json(self):
        return {
            "oracle": self.oracle,
            "params": self.params,
            "observed": self.observed,
            "expected": self.expected,
            "delta": self.delta,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


class OracleReport(object):
    """Results of an oracle suite run."""

    def __init__(self, results=None):
        self.results = list(results or [])

    def add(self, oracle, params, observed, expected, tolerance, passed=None):
        if passed is None:
            passed = abs(observed - expected) <= tolerance
        result = OracleResult(
            oracle=oracle, params=dict(params), observed=float(observed),
            expected=float(expected), tolerance=float(tolerance),
            passed=bool(passed))
        if not result.passed:
            logger.warning(
                "oracle_mismatch oracle=%s params=%s observed=%.12g "
                "expected=%.12g", oracle, params, observed, expected)
        self.results.append(result)
        return result

    @property
    def passed(self):
        return all(r.passed for r in self.results)

    def failures(self):
        return [r for r in self.results if not r.passed]

    def raise_for_failures(self):
        """Raise `OracleFailure` naming every failed oracle."""
        failed = self.failures()
        if failed:
            raise OracleFailure(
                "{} oracle check(s) failed: {}".format(
                    len(failed),
                    ", ".join("{}{}".format(r.oracle, r.params)
                              for r in failed)))

    def to_json(self):
        by_oracle = {}
        for r in self.results:
            entry = by_oracle.setdefault(r.oracle, {"checks": 0, "failed": 0})
            entry["checks"] += 1
            entry["failed"] += not r.passed
        return {
            "passed": self.passed,
            "oracles": by_oracle,
            "results": [r.to_json() for r in self.results],
        }


def _enumeration_grid(max_p, max_k, max_n):
    for p in range(1, max_p + 1):
        for k in range(1, min(max_k, p) + 1):
            for n in range(0, max_n + 1):
                if n * p <= ENUMERATION_GUARD:
                    yield p, k, n


def check_chi2_enumeration(report, max_p, max_k, max_n):
    """chi2_exact against full enumeration of (X, Y)."""
    for p, k, n in _enumeration_grid(max_p, max_k, max_n):
        exact = chi2_exact(p, k, n).chi2
        report.add("chi2_enumeration", {"p": p, "k": k, "n": n},
                   exact, chi2_enumerated(p, k, n),
                   1e-9 * max(1.0, exact))


def check_chi2_pair_consistency(report, max_p, max_k, max_n):
    """chi2_exact against its pairwise-consistency form."""
    for p, k, n in _enumeration_grid(max_p, max_k, max_n):
        exact = chi2_exact(p, k, n).chi2
        report.add("chi2_pair_consistency", {"p": p, "k": k, "n": n},
                   exact, chi2_via_pair_consistency(p, k, n),
                   1e-9 * max(1.0, exact))


def check_bayes_error(report, max_p, max_k, max_n):
    """Bayes error within [1/2 - sqrt(chi2)/2, 1/2], nonincreasing in n."""
    for p in range(1, max_p + 1):
        for k in range(1, min(max_k, p) + 1):
            previous = None
            for n in range(0, max_n + 1):
                if n * p > ENUMERATION_GUARD:
                    break
                error = bayes_error_oracle(p, k, n)
                chi2 = chi2_exact(p, k, n).chi2
                low = max(0.0, 0.5 - 0.5 * math.sqrt(chi2))
                ok = low - 1e-12 <= error <= 0.5 + 1e-12
                if previous is not None:
                    ok = ok and error <= previous + 1e-12
                report.add("bayes_error_bounds", {"p": p, "k": k, "n": n},
                           error, min(max(error, low), 0.5), 1e-12, ok)
                previous = error


def check_pair_consistency(report, p=5, k=2, n=2, samples=10 ** 5, seed=0):
    """Monte Carlo estimate of P_Q[both sets consistent] per overlap."""
    q = solve_nu(k).q
    base = np.arange(k)
    for l in range(0, min(k, p - k) + 1):
        rng = trial_rng(seed, l)
        other = np.concatenate([base[:k - l], np.arange(k, k + l)])
        X = rng.random((samples, n, p)) < q
        Y = rng.random((samples, n)) < 0.5
        ok_a = (X[:, :, base].any(axis=2) == Y).all(axis=1)
        ok_b = (X[:, :, other].any(axis=2) == Y).all(axis=1)
        rate = float(np.mean(ok_a & ok_b))
        expected = pair_consistency_prob(k, l, n)
        report.add("pair_consistency", {"p": p, "k": k, "n": n, "l": l},
                   rate, expected, 5 * binomial_sigma(expected, samples))


def check_apply_model(report, max_p=12, cases=20, seed=0):
    """Vectorised OR outcomes against a per-entry double loop."""
    for case in range(cases):
        rng = trial_rng(seed, 1, case)
        p = int(rng.integers(1, max_p + 1))
        k = int(rng.integers(1, p + 1))
        n = int(rng.integers(0, 16))
        dense = rng.random((n, p)) < 0.3
        S = rng.choice(p, size=k, replace=False)
        naive = []
        for i in range(n):
            y = 0
            for j in S:
                y = y | int(dense[i, j])
            naive.append(y)
        got = apply_model(BitMatrix.from_dense(dense), S).to_list()
        mismatches = sum(a != b for a, b in zip(got, naive))
        report.add("apply_model_naive", {"p": p, "k": k, "n": n},
                   mismatches, 0, 0)


def check_berry_esseen(report, cases=50, seed=0):
    """Exact binomial tails within the Berry-Esseen radius of Q(lambda)."""
    rng = trial_rng(seed, 2)
    for _ in range(cases):
        p = int(rng.integers(10 ** 3, 10 ** 5 + 1))
        q0 = float(rng.uniform(0.05, 0.95))
        lam = float(rng.uniform(-3.0, 3.0))
        gaussian, radius = berry_esseen_binomial_tail(p, q0, lam)
        exact = binomial_tail_exact(p, q0, lam)
        report.add("berry_esseen", {"p": p, "q0": q0, "lambda": lam},
                   exact, gaussian, radius)


def run_oracle_suite(max_p=6, max_k=2, max_n=3, seed=0, samples=10 ** 5):
    """Run every oracle check.

    Returns
    -------
    OracleReport
        Call `raise_for_failures` to turn mismatches into an
        `OracleFailure`.
    """
    report = OracleReport()
    check_chi2_enumeration(report, max_p, max_k, max_n)
    check_chi2_pair_consistency(report, max_p, max_k, max_n)
    check_bayes_error(report, max_p, max_k, max_n)
    check_pair_consistency(report, samples=samples, seed=seed)
    check_apply_model(report, seed=seed)
    check_berry_esseen(report, seed=seed)
    logger.info("oracle_suite_done checks=%d failed=%d",
                len(report.results), len(report.failures()))
    return report
