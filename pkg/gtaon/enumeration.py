"""Brute-force oracles over every design matrix of a tiny instance.

For n tests on p items there are 2^(np) matrices X. For each of them
and each of the C(p, k) defective sets the OR outcomes are computed,
giving the number c(X, y) of sets that produce outcome y. With
P(X) = q^w (1 - q)^(np - w) for a matrix of weight w,

    P(X, y) = P(X) c(X, y) / C(p, k),    Q(X, y) = P(X) 2^(-n),

so that

    chi2   = 2^n / C(p, k)^2 sum_w q^w (1-q)^(np-w) A_w - 1,
    P_err  = 1/2 sum_w q^w (1-q)^(np-w) B_w / (C(p, k) 2^n),

with A_w = sum c^2 and B_w = sum min(c 2^n, C(p, k)) over the matrices
of weight w and their outcomes. The integer sums are exact; the final
combination is done with 50 significant digits in sympy.
"""
import itertools

import numpy as np
import sympy

from gtaon.exceptions import (InvalidParameterError,
                              InstanceTooLargeError)


ENUMERATION_GUARD = 24

_CHUNK = 1 << 16
_DIGITS = 50


def _check(p, k, n):
    if int(p) != p or int(k) != k or not 1 <= k <= p:
        raise InvalidParameterError(
            "Expected integers 1 <= k <= p, got p={}, k={}".format(p, k))
    if int(n) != n or n < 0:
        raise InvalidParameterError(
            "Number of tests must be a non-negative integer, got {}".format(n))
    if n * p > ENUMERATION_GUARD:
        raise InstanceTooLargeError(
            "Enumerating 2^{} matrices exceeds the guard 2^{}".format(
                n * p, ENUMERATION_GUARD))


def _popcount(codes):
    as_bytes = codes.astype(np.uint32).view(np.uint8).reshape(-1, 4)
    return np.unpackbits(as_bytes, axis=1).sum(axis=1, dtype=np.int64)


def _weight_sums(p, k, n):
    """Exact per-weight sums (A_w, B_w) and C(p, k)."""
    set_masks = np.array(
        [sum(1 << j for j in c) for c in itertools.combinations(range(p), k)],
        dtype=np.int64)
    n_sets = set_masks.size
    scale = 1 << n
    row_mask = (1 << p) - 1
    A = np.zeros(n * p + 1, dtype=np.int64)
    B = np.zeros(n * p + 1, dtype=np.int64)
    total = 1 << (n * p)
    for start in range(0, total, _CHUNK):
        codes = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
        y = np.zeros((codes.size, n_sets), dtype=np.int64)
        for i in range(n):
            row = (codes >> (i * p)) & row_mask
            y |= ((row[:, None] & set_masks[None, :]) != 0).astype(
                np.int64) << i
        keys = (np.arange(codes.size, dtype=np.int64)[:, None] << n) | y
        keys, counts = np.unique(keys.ravel(), return_counts=True)
        weights = _popcount(codes)[keys >> n]
        counts = counts.astype(np.int64)
        np.add.at(A, weights, counts * counts)
        np.add.at(B, weights, np.minimum(counts * scale, n_sets))
    return A, B, n_sets


def _weight_probabilities(k, n, p):
    q = sympy.N(1 - sympy.Integer(2) ** sympy.Rational(-1, k), _DIGITS)
    return [q ** w * (1 - q) ** (n * p - w) for w in range(n * p + 1)]


def chi2_enumerated(p, k, n):
    """E_Q[(P/Q)^2] - 1 by full enumeration of (X, Y).

    Raises
    ------
    InstanceTooLargeError
        If n p > 24.
    """
    _check(p, k, n)
    A, _, n_sets = _weight_sums(p, k, n)
    probs = _weight_probabilities(k, n, p)
    acc = sum(prob * int(a) for prob, a in zip(probs, A))
    value = sympy.Integer(2) ** n * acc / sympy.Integer(n_sets) ** 2 - 1
    return float(value)


def bayes_error_oracle(p, k, n):
    """Smallest error of any test between P and Q under a uniform prior.

    Computed as 1/2 sum min(P(X, Y), Q(X, Y)) over all (X, Y).

    Raises
    ------
    InstanceTooLargeError
        If n p > 24.
    """
    _check(p, k, n)
    _, B, n_sets = _weight_sums(p, k, n)
    probs = _weight_probabilities(k, n, p)
    acc = sum(prob * int(b) for prob, b in zip(probs, B))
    value = acc / (2 * sympy.Integer(n_sets) * sympy.Integer(2) ** n)
    return float(value)
