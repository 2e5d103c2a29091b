"""Divergence between the group testing model and the null model.

For a Bernoulli design with intensity from `gtaon.design.solve_nu`, the
chi-squared divergence between P(X, Y) (outcomes from the OR model) and
Q(X, Y) = P(X) P(Y) (outcomes uniform and independent of X) is

    chi2 = sum_l w_l 2^(n (1 - l / k)) - 1,
    w_l  = C(k, l) C(p - k, l) / C(p, k),

where w_l is the hypergeometric probability that a uniformly drawn
k-set has l items outside a fixed k-set. Since the w_l sum to one,

    chi2 = sum_l w_l (2^(n (1 - l / k)) - 1),

a sum of non-negative terms, which is what `chi2_exact` accumulates in
log space. Bounds and the Berry-Esseen tail control used by the
covered-column detector live here as well.
"""
import math
import warnings

from dataclasses import dataclass

import numpy as np

from scipy.special import logsumexp
from scipy.stats import binom, norm

from gtaon.design import solve_nu, log2_binomial
from gtaon.exceptions import (InvalidParameterError,
                              RegimeError,
                              RegimeWarning)


LOG2 = math.log(2.0)


def _check_population(p, k):
    if int(p) != p or int(k) != k or not 1 <= k <= p:
        raise InvalidParameterError(
            "Expected integers 1 <= k <= p, got p={}, k={}".format(p, k))


def _check_tests(n):
    if int(n) != n or n < 0:
        raise InvalidParameterError(
            "Number of tests must be a non-negative integer, got {}".format(n))


def _check_eta(eta):
    if not 0.0 < eta < 1.0:
        raise InvalidParameterError(
            "eta must lie in (0, 1), got {}".format(eta))


def log_binomial(p, k):
    """Natural log of C(p, k), summed term by term for accuracy."""
    k = min(k, p - k)
    if k <= 0:
        return 0.0
    i = np.arange(k, dtype=np.float64)
    return math.fsum(np.log(p - i)) - math.fsum(np.log1p(i))


def log_overlap_weights(p, k):
    """log w_l for l = 0..min(k, p - k) (see module docstring)."""
    top = min(k, p - k)
    ell = np.arange(top, dtype=np.float64)
    steps = (np.log(k - ell) + np.log(p - k - ell) - 2.0 * np.log1p(ell))
    return -log_binomial(p, k) + np.concatenate([[0.0], np.cumsum(steps)])


def _log_expm1(a):
    """log(e^a - 1) for a > 0."""
    return a + np.log(-np.expm1(-a))


@dataclass(frozen=True)
class DivergenceReport:
    """chi2 divergence of one (p, k, n) cell with its upper bound.

    `log1p_chi2` is always finite for finite inputs, even when `chi2`
    overflows to infinity.
    """

    p: int
    k: int
    n: int
    eta: float
    chi2: float
    log1p_chi2: float
    lemma3_bound: float

    def to_json(self):
        return {
            "p": self.p,
            "k": self.k,
            "n": self.n,
            "eta": self.eta,
            "chi2": self.chi2,
            "log1p_chi2": self.log1p_chi2,
            "lemma3_bound": self.lemma3_bound,
            "log2_binomial": log2_binomial(self.p, self.k),
        }


def log_chi2(p, k, n):
    """Natural log of chi2(P || Q); -inf when chi2 = 0."""
    _check_population(p, k)
    _check_tests(n)
    if n == 0:
        return -math.inf
    log_w = log_overlap_weights(p, k)
    ell = np.arange(log_w.size, dtype=np.float64)
    a = n * (1.0 - ell / k) * LOG2
    live = a > 0
    if not live.any():
        return -math.inf
    return float(logsumexp(log_w[live] + _log_expm1(a[live])))


def eta_for_tests(p, k, n):
    """The eta with n = (1 - eta) log2 C(p, k), if it lies in (0, 1)."""
    threshold = log2_binomial(p, k)
    if threshold <= 0:
        return None
    eta = 1.0 - n / threshold
    return eta if 0.0 < eta < 1.0 else None


def tests_for_eta(p, k, eta):
    """floor((1 - eta) log2 C(p, k))."""
    _check_eta(eta)
    return int(math.floor((1.0 - eta) * log2_binomial(p, k)))


def chi2_exact(p, k, n, eta=None):
    """Exact chi2(P || Q) of a Bernoulli design with n tests.

    Parameters
    ----------
    p, k : int
        Population size and number of defectives, 1 <= k <= p.
    n : int
        Number of tests, n >= 0.
    eta : float, optional
        Slack of the upper bound reported alongside. Defaults
        to the eta with n = (1 - eta) log2 C(p, k); the bound is reported
        as infinite when no such eta in (0, 1) exists.

    Returns
    -------
    DivergenceReport
    """
    log_value = log_chi2(p, k, n)
    log1p = float(np.logaddexp(0.0, log_value))
    chi2 = math.exp(log_value) if log_value < 700 else math.inf
    if eta is None:
        eta = eta_for_tests(p, k, n)
    bound = math.inf if eta is None else chi2_lemma3_bound(p, k, eta)
    return DivergenceReport(
        p=p, k=k, n=n, eta=eta, chi2=chi2, log1p_chi2=log1p,
        lemma3_bound=bound)


def pair_consistency_prob(k, l, n):
    """Probability under Q that two k-sets sharing k - l items are both
    consistent with (X, Y): 2^(-n (1 + l / k)).
    """
    if int(k) != k or k < 1:
        raise InvalidParameterError(
            "k must be a positive integer, got {}".format(k))
    if not 0 <= l <= k:
        raise InvalidParameterError(
            "Expected 0 <= l <= k, got l={}, k={}".format(l, k))
    _check_tests(n)
    return 2.0 ** (-n * (1.0 + l / k))


def chi2_via_pair_consistency(p, k, n):
    """(4^n / C(p, k)) sum_l C(k, l) C(p-k, l) pair_consistency_prob - 1.

    Same quantity as `chi2_exact`, assembled from pairwise consistency
    probabilities; only meant for moderate values.
    """
    _check_population(p, k)
    _check_tests(n)
    log_w = log_overlap_weights(p, k)
    terms = [
        math.exp(log_w[l] + 2 * n * LOG2) * pair_consistency_prob(k, l, n)
        for l in range(log_w.size)
    ]
    return math.fsum(terms) - 1.0


def _lemma3_exponent(p, k, eta):
    return math.e ** (1.0 - eta) * k * (k / p) ** eta * p / (p - k + 1)


def chi2_lemma3_bound(p, k, eta, tight=False):
    """Upper bound on chi2 valid when n <= (1 - eta) log2 C(p, k).

    The default is exp[e^(1-eta) k (k/p)^eta p / (p-k+1)] - 1. With
    ``tight=True`` the intermediate bound
    [C(p, k)^((1-eta)/k) k / (p-k+1) + 1]^k - 1 is returned instead; it
    lies between chi2 and the default.
    """
    exponent = chi2_lemma3_log1p(p, k, eta, tight)
    return math.expm1(exponent) if exponent < 709.0 else math.inf


def chi2_lemma3_log1p(p, k, eta, tight=False):
    """log(1 + bound) for `chi2_lemma3_bound`."""
    _check_population(p, k)
    _check_eta(eta)
    if not tight:
        return _lemma3_exponent(p, k, eta)
    log_x = ((1.0 - eta) / k * log_binomial(p, k) + math.log(k) -
             math.log(p - k + 1))
    return k * float(np.logaddexp(0.0, log_x))


def disjoint_ratio(p, k):
    """C(p - k, k) / C(p, k), the chance that two random k-sets are disjoint."""
    _check_population(p, k)
    if 2 * k > p:
        return 0.0
    i = np.arange(k, dtype=np.float64)
    return math.exp(math.fsum(np.log1p(-k / (p - i))))


def _check_lower_regime(p, k, n, eta):
    _check_population(p, k)
    _check_eta(eta)
    if p - 2 * k + 1 <= 0:
        raise RegimeError(
            "Lower-bound terms need p - 2k + 1 > 0, got p={}, k={}".format(
                p, k))
    if n is not None:
        _check_tests(n)
        if n < (1.0 - eta) * log2_binomial(p, k):
            warnings.warn(
                "n={} is below (1 - eta) log2 C(p, k) = {:.3f}; the lower "
                "bound does not apply".format(
                    n, (1.0 - eta) * log2_binomial(p, k)),
                RegimeWarning)


def chi2_lower_terms(p, k, n, eta):
    """Lower bound on chi2 for n >= (1 - eta) log2 C(p, k).

    Returns -1 + r [1 + k^(1+eta) / p^eta * p / (p - 2k + 1)] with
    r = C(p - k, k) / C(p, k).

    Raises
    ------
    RegimeError
        If p - 2k + 1 <= 0.
    """
    _check_lower_regime(p, k, n, eta)
    r = disjoint_ratio(p, k)
    return -1.0 + r * (1.0 + k ** (1.0 + eta) / p ** eta * p / (p - 2 * k + 1))


def chi2_lower_two_terms(p, k, eta):
    """Two-term truncation of the chi2 sum (overlaps of k-1 and k items).

    -1 + r + k C(p-k, k-1) / C(p, k) * C(p, k)^((1-eta)/k), evaluated
    through C(p-k, k-1) = C(p-k, k) k / (p - 2k + 1).
    """
    _check_lower_regime(p, k, None, eta)
    r = disjoint_ratio(p, k)
    log_growth = (1.0 - eta) / k * log_binomial(p, k)
    return -1.0 + r + r * k * k / (p - 2 * k + 1) * math.exp(log_growth)


def de_caen_bound(p, k, n):
    """Lower bound 1 / (1 + chi2) on the chance that some k-set disjoint
    from the true one is consistent with the outcomes.
    """
    report = chi2_exact(p, k, n)
    return math.exp(-report.log1p_chi2)


def _berry_esseen_moments(q0):
    if not 0.0 < q0 < 1.0:
        raise InvalidParameterError(
            "q0 must lie in (0, 1), got {}".format(q0))
    rho = (1.0 - q0) ** 3 * q0 + q0 ** 3 * (1.0 - q0)
    sigma = math.sqrt((1.0 - q0) * q0)
    return rho, sigma


def berry_esseen_binomial_tail(p, q0, lam):
    """Gaussian approximation of a standardised Binomial(p, q0) tail.

    Returns
    -------
    gaussian_value : float
        Q(lam), the standard Gaussian upper tail.
    error_radius : float
        6 rho / (sigma^3 sqrt(p)); the exact tail
        P[(Z - p q0) / (sigma sqrt(p)) >= lam] lies within this radius.
    """
    if int(p) != p or p < 1:
        raise InvalidParameterError(
            "p must be a positive integer, got {}".format(p))
    rho, sigma = _berry_esseen_moments(q0)
    return float(norm.sf(lam)), 6.0 * rho / (sigma ** 3 * math.sqrt(p))


def binomial_tail_exact(p, q0, lam):
    """P[(Z - p q0) / (sigma sqrt(p)) >= lam] for Z ~ Binomial(p, q0)."""
    _, sigma = _berry_esseen_moments(q0)
    t = p * q0 + lam * sigma * math.sqrt(p)
    return float(binom.sf(math.ceil(t) - 1, p, q0))


def covered_q0(k, n_negative):
    """Probability (1 - nu/k)^n0 that a fresh column avoids n0 negative tests."""
    return 0.5 ** (n_negative / k)


def q0_bracket(k, n, zeta):
    """Typical-set bracket on q0 when the positive count is n(1 +- zeta)/2."""
    if not 0.0 < zeta < 1.0:
        raise InvalidParameterError(
            "zeta must lie in (0, 1), got {}".format(zeta))
    q = solve_nu(k).q
    return ((1.0 - q) ** ((1.0 + zeta) * n / 2.0),
            (1.0 - q) ** ((1.0 - zeta) * n / 2.0))


def covered_error_bound(p, k, q0):
    """Berry-Esseen bound on the covered-column detector's Bayes error.

    Given q0, the error with a uniform prior is at most
    1/2 [Q(k / (2 sqrt(p q0 (1-q0)))) + r_p]
    + 1/2 [1 - Q((q0 k - k/2) / sqrt((p-k) q0 (1-q0))) + r_(p-k)],
    capped at 1, where r_m is the Berry-Esseen radius for m summands.
    """
    _check_population(p, k)
    if k == p:
        return 1.0
    rho, sigma = _berry_esseen_moments(q0)
    r_p = 6.0 * rho / (sigma ** 3 * math.sqrt(p))
    r_pk = 6.0 * rho / (sigma ** 3 * math.sqrt(p - k))
    under_q = norm.sf(k / (2.0 * sigma * math.sqrt(p))) + r_p
    under_p = norm.cdf((q0 * k - k / 2.0) / (sigma * math.sqrt(p - k))) + r_pk
    return float(min(1.0, 0.5 * under_q + 0.5 * under_p))
