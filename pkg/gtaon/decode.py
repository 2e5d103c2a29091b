"""Recovery decoders and recovery metrics.

Decoders take a design `X` (a `BitMatrix`), its outcomes `Y` and the
number of defectives `k`, and return an `Estimate` of size k:

* `decode_comp` -- COMP: keep the items that appear in no negative test;
* `decode_rank_overlap` -- COMP candidates ranked by the number of
  positive tests that contain them;
* `decode_ml_exhaustive` -- the lexicographically smallest k-set whose
  OR outcomes reproduce Y (a satisfying set).

All tie-breaks are by lowest item index. `score` compares an estimate
with the true defective set.
"""
import math

from dataclasses import dataclass

import numpy as np

from gtaon.design import DefectiveSet
from gtaon.bitmatrix import BitMatrix
from gtaon.exceptions import (InvalidParameterError,
                              InstanceTooLargeError,
                              NoConsistentSetError)


DEFAULT_GUARD = 10 ** 7

# Slack for float products such as alpha * k.
_EPS = 1e-9


class Estimate(DefectiveSet):
    """Decoder output: sorted, unique item indices (usually k of them)."""

    def __repr__(self):
        return "Estimate({}, p={})".format(self.items.tolist(), self.p)


def _check_dimensions(X, Y, k=None):
    if Y.n != X.rows:
        raise InvalidParameterError(
            "Outcome vector has {} entries but the design has {} tests".format(
                Y.n, X.rows))
    if k is not None and not 1 <= k <= X.cols:
        raise InvalidParameterError(
            "Expected 1 <= k <= p, got k={}, p={}".format(k, X.cols))


def _pad(chosen, k, p):
    """Complete `chosen` (ordered) to k items with lowest-index others."""
    chosen = list(chosen)[:k]
    if len(chosen) < k:
        taken = np.zeros(p, dtype=bool)
        taken[chosen] = True
        fill = np.flatnonzero(~taken)[:k - len(chosen)]
        chosen.extend(fill.tolist())
    return chosen


def comp_candidates(X, Y):
    """Mask of the items that appear in no negative test."""
    _check_dimensions(X, Y)
    excluded = X.unpack_mask(X.or_rows(Y.negatives()))
    return ~excluded


def definite_defectives(X, Y):
    """Candidates that are the only candidate of some positive test.

    In the noiseless model every such item is defective.
    """
    candidates = np.flatnonzero(comp_candidates(X, Y))
    pos = Y.positives()
    if candidates.size == 0 or not pos.any():
        return np.zeros(0, dtype=np.int64)
    cover = X.columns(candidates)[pos]
    lonely = cover.sum(axis=1) == 1
    hits = cover[lonely].argmax(axis=1)
    return np.unique(candidates[hits])


def decode_comp(X, Y, k):
    """COMP decoder.

    The candidate set is the set of items in no negative test; the
    estimate is its k lowest-index members, padded with the lowest-index
    non-candidates when fewer than k candidates exist.
    """
    _check_dimensions(X, Y, k)
    candidates = np.flatnonzero(comp_candidates(X, Y))
    return Estimate(_pad(candidates.tolist(), k, X.cols), X.cols)


def decode_rank_overlap(X, Y, k):
    """Rank COMP candidates by their number of positive tests.

    The k candidates with the largest counts are returned (lowest index
    first among equal counts), padded as in `decode_comp`.
    """
    _check_dimensions(X, Y, k)
    candidates = np.flatnonzero(comp_candidates(X, Y))
    if candidates.size == 0:
        return Estimate(_pad([], k, X.cols), X.cols)
    counts = X.columns(candidates)[Y.positives()].sum(axis=0)
    order = np.lexsort((candidates, -counts))
    return Estimate(_pad(candidates[order].tolist(), k, X.cols), X.cols)


def _column_masks(X, Y, candidates):
    """Positive-test coverage of each candidate as a Python int bitmask."""
    cover = X.columns(candidates)[Y.positives()]
    masks = []
    for j in range(cover.shape[1]):
        packed = np.packbits(cover[:, j], bitorder="little")
        masks.append(int.from_bytes(packed.tobytes(), "little"))
    return masks, (1 << cover.shape[0]) - 1


def decode_ml_exhaustive(X, Y, k, guard=DEFAULT_GUARD):
    """Lexicographically smallest k-set consistent with (X, Y).

    Every consistent set is made of COMP candidates and contains every
    definite defective, so the search runs over candidates only, in
    increasing index order, never skips a definite defective and prunes
    branches that can no longer cover every positive test. When
    C(#candidates, k) exceeds `guard` the search is limited to `guard`
    visited nodes.

    Raises
    ------
    InstanceTooLargeError
        If the bounded search runs out of nodes.
    NoConsistentSetError
        If no k-set reproduces Y.
    """
    _check_dimensions(X, Y, k)
    candidates = np.flatnonzero(comp_candidates(X, Y))
    m = candidates.size
    if m < k:
        raise NoConsistentSetError(
            "Only {} items avoid every negative test, need {}".format(m, k))
    masks, full = _column_masks(X, Y, candidates)
    forced = np.isin(candidates, definite_defectives(X, Y)).tolist()

    forced_after = [0] * (m + 1)
    for j in range(m - 1, -1, -1):
        forced_after[j] = forced_after[j + 1] + forced[j]
    if forced_after[0] > k:
        raise NoConsistentSetError(
            "{} definite defectives exceed k={}".format(forced_after[0], k))

    suffix = [0] * (m + 1)
    for j in range(m - 1, -1, -1):
        suffix[j] = suffix[j + 1] | masks[j]

    budget = None if math.comb(m, k) <= guard else guard
    visited = [0]
    chosen = []

    def search(start, covered, remaining):
        visited[0] += 1
        if budget is not None and visited[0] > budget:
            raise InstanceTooLargeError(
                "Satisfying-set search exceeded {} nodes "
                "({} candidates, k={})".format(budget, m, k))
        if forced_after[start] > remaining:
            return False
        if remaining == 0:
            return covered == full
        if covered | suffix[start] != full:
            return False
        for j in range(start, m - remaining + 1):
            chosen.append(j)
            if search(j + 1, covered | masks[j], remaining - 1):
                return True
            chosen.pop()
            if forced[j]:
                break
        return False

    if not search(0, 0, k):
        raise NoConsistentSetError(
            "No set of {} candidates covers every positive test".format(k))
    return Estimate(candidates[chosen].tolist(), X.cols)


DECODERS = {
    "comp": decode_comp,
    "rank_overlap": decode_rank_overlap,
    "ml_exhaustive": decode_ml_exhaustive,
}


def get_decoder(name):
    """Look a decoder up by name."""
    try:
        return DECODERS[name]
    except KeyError:
        raise InvalidParameterError(
            "Unknown decoder '{}', expected one of {}".format(
                name, sorted(DECODERS)))


def decode_reduced(X, Y, k, discarded, k_bar, decoder=decode_rank_overlap):
    """Decode a column-zeroed design.

    The decoder runs on the surviving columns with `k_bar` defectives;
    its output is mapped back to global indices and padded to k items
    with the lowest-index unused items.

    Returns
    -------
    estimate : Estimate
        Padded estimate of size k.
    pre_padding : Estimate
        The decoder's own output on the surviving items.
    """
    _check_dimensions(X, Y, k)
    keep = np.ones(X.cols, dtype=bool)
    keep[np.asarray(discarded, dtype=np.int64)] = False
    surviving = np.flatnonzero(keep)
    sub = BitMatrix.from_dense(X.columns(surviving))
    local = decoder(sub, Y, min(k_bar, surviving.size))
    found = surviving[local.items]
    pre_padding = Estimate(found.tolist(), X.cols)
    return Estimate(_pad(found.tolist(), k, X.cols), X.cols), pre_padding


CSV_COLUMNS = (
    "k", "size", "overlap", "false_positives", "false_negatives",
    "exact", "alpha", "alpha_approx", "delta", "weak",
)


@dataclass(frozen=True)
class RecoveryReport:
    """Comparison of an estimate with the true defective set."""

    k: int
    size: int
    overlap: int
    false_positives: int
    false_negatives: int
    exact: bool
    alpha: float
    alpha_approx: bool
    delta: float
    weak: bool

    def to_row(self):
        """Values in `CSV_COLUMNS` order."""
        return [getattr(self, c) for c in CSV_COLUMNS]


def is_alpha_approx(false_positives, false_negatives, k, alpha):
    return max(false_positives, false_negatives) <= alpha * k + _EPS


def is_weak(overlap, k, delta):
    return overlap >= delta * k - _EPS


def score(S, S_hat, alpha, delta):
    """Score an estimate.

    Parameters
    ----------
    S : DefectiveSet
        True defective set.
    S_hat : DefectiveSet
        Estimate.
    alpha : float
        Approximate-recovery tolerance: success iff
        max(|S_hat \\ S|, |S \\ S_hat|) <= alpha k.
    delta : float
        Weak-recovery level: success iff |S & S_hat| >= delta k.
    """
    overlap = int(np.intersect1d(S.items, S_hat.items,
                                 assume_unique=True).size)
    k = len(S)
    fp = len(S_hat) - overlap
    fn = k - overlap
    return RecoveryReport(
        k=k,
        size=len(S_hat),
        overlap=overlap,
        false_positives=fp,
        false_negatives=fn,
        exact=(fp == 0 and fn == 0),
        alpha=alpha,
        alpha_approx=is_alpha_approx(fp, fn, k, alpha),
        delta=delta,
        weak=is_weak(overlap, k, delta))


def predict_extra_test(S_hat, x_new):
    """Predict the outcome of a fresh test row from an estimate."""
    x = np.asarray(x_new, dtype=bool)
    if x.shape != (S_hat.p,):
        raise InvalidParameterError(
            "Test row must have length {}, got shape {}".format(
                S_hat.p, x.shape))
    return int(x[S_hat.items].any())


def yprime_success_probability(delta):
    """Success probability (1/2)^(1 - delta) of the extra-test predictor."""
    return 0.5 ** (1.0 - delta)


def planted_estimate(S, overlap, rng):
    """Estimate of size k sharing exactly `overlap` items with S."""
    k = len(S)
    if not 0 <= overlap <= k:
        raise InvalidParameterError(
            "Overlap must lie in [0, {}], got {}".format(k, overlap))
    if S.p - k < k - overlap:
        raise InvalidParameterError(
            "Population too small to plant {} outside items".format(
                k - overlap))
    kept = rng.choice(S.items, size=overlap, replace=False)
    outside = np.flatnonzero(~S.mask())
    extra = rng.choice(outside, size=k - overlap, replace=False)
    return Estimate(np.concatenate([kept, extra]).tolist(), S.p)


def planted_overlap(k, delta):
    """Number of planted shared items floor(delta k)."""
    return int(math.floor(delta * k + _EPS))
