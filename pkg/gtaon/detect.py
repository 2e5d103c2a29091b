"""Weak detection: telling the group testing model P from the null Q.

Two tests are implemented:

* `detect_trivial` for all-or-none designs, which declares P exactly
  when the positive tests are the all-ones rows;
* `detect_covered` for Bernoulli designs, which counts the covered
  columns (columns whose tests are all positive) and compares the count
  with p q0 + k/2, where q0 = (1 - nu/k)^n0 is the probability that a
  column independent of Y avoids the n0 negative tests.

`sample_covered_statistic` draws the covered count from its exact
conditional law without building X, which makes detection experiments
at p = 1e5 and thousands of tests cheap.
"""
import enum

from dataclasses import dataclass

import numpy as np

from gtaon.design import solve_nu
from gtaon.exceptions import (InvalidParameterError,
                              InvalidDesignError)


class Hypothesis(enum.Enum):
    """Group testing model P or null model Q."""

    P = "P"
    Q = "Q"


@dataclass(frozen=True)
class DetectVerdict:
    """Decision of a detector: P iff statistic >= threshold."""

    decided: Hypothesis
    statistic: float
    threshold: float

    @classmethod
    def from_threshold(cls, statistic, threshold):
        decided = Hypothesis.P if statistic >= threshold else Hypothesis.Q
        return cls(decided=decided, statistic=statistic, threshold=threshold)

    def is_error(self, truth):
        """Whether the verdict differs from the true hypothesis."""
        return self.decided is not Hypothesis(truth)


def _check_dimensions(X, Y):
    if Y.n != X.rows:
        raise InvalidParameterError(
            "Outcome vector has {} entries but the design has {} tests".format(
                Y.n, X.rows))


def detect_trivial(X, Y):
    """Detector for all-or-none designs.

    The statistic is the number of tests whose outcome equals the
    all-ones indicator of its row, the threshold is n. Under P the
    outcomes always match; under Q they match with probability 2^(-n).

    Raises
    ------
    InvalidDesignError
        If a row of X is neither all-zero nor all-one.
    """
    _check_dimensions(X, Y)
    weights = X.row_weights()
    mixed = (weights != 0) & (weights != X.cols)
    if mixed.any():
        raise InvalidDesignError(
            "Row {} has weight {}; all-or-none rows have weight 0 or {}".format(
                int(np.flatnonzero(mixed)[0]),
                int(weights[mixed][0]), X.cols))
    agree = int(np.count_nonzero((weights == X.cols) == Y.y))
    return DetectVerdict.from_threshold(agree, X.rows)


def covered_count(X, Y):
    """Number of columns with no 1 in any negative test."""
    _check_dimensions(X, Y)
    hit = X.unpack_mask(X.or_rows(Y.negatives()))
    return int(X.cols - np.count_nonzero(hit))


def covered_threshold(p, k, n_negative):
    """Threshold p q0 + k/2 and q0 = (1 - nu/k)^n0."""
    q0 = (1.0 - solve_nu(k).q) ** n_negative
    return p * q0 + k / 2.0, q0


def decide_covered(count, p, k, n_negative):
    """Verdict of the covered-column test from its sufficient statistics."""
    threshold, _ = covered_threshold(p, k, n_negative)
    return DetectVerdict.from_threshold(count, threshold)


def detect_covered(X, Y, params):
    """Covered-column detector for Bernoulli designs.

    Parameters
    ----------
    X : BitMatrix
        Bernoulli design with intensity from `gtaon.design.solve_nu`.
    Y : gtaon.design.Outcomes
    params : gtaon.design.PopulationParams

    Returns
    -------
    DetectVerdict
        P iff covered_count(X, Y) >= p q0 + k/2 (ties decide P).
    """
    if X.cols != params.p:
        raise InvalidParameterError(
            "Design has {} columns, population has {} items".format(
                X.cols, params.p))
    return decide_covered(
        covered_count(X, Y), params.p, params.k, Y.n_negative())


def sample_covered_statistic(p, k, n, hypothesis, rng):
    """Draw (covered count, number of negative tests) without building X.

    Under both hypotheses each test is negative with probability 1/2, so
    n0 ~ Binomial(n, 1/2). Given n0, every column independent of Y is
    covered with probability q0 = (1 - nu/k)^n0, independently; under P
    the k defective columns are covered surely.
    """
    if not 1 <= k <= p or n < 0:
        raise InvalidParameterError(
            "Expected 1 <= k <= p and n >= 0, got p={}, k={}, n={}".format(
                p, k, n))
    n_negative = int(rng.binomial(n, 0.5))
    _, q0 = covered_threshold(p, k, n_negative)
    if Hypothesis(hypothesis) is Hypothesis.P:
        count = k + int(rng.binomial(p - k, q0))
    else:
        count = int(rng.binomial(p, q0))
    return count, n_negative


def detect_sampled(p, k, n, hypothesis, rng):
    """Covered-column verdict on a sampled sufficient statistic."""
    count, n_negative = sample_covered_statistic(p, k, n, hypothesis, rng)
    return decide_covered(count, p, k, n_negative)
