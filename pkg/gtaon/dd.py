"""Definite-defective identification.

A SAFFRON-style block picks a random subset A of floor(p / k) items and
v = ceil(log2(p / k)) pairs of tests. The item with local index i
(position in A, ascending) is placed in the tests given by its codeword

    b_i = binary(i) ++ complement(binary(i)),

2v bits of weight exactly v, most significant bit first. If exactly one
defective falls in A, exactly v tests are positive and the first half
spells out its local index; no defective gives no positive test and two
or more give more than v. `decode_saffron` reads the c blocks in order
and outputs the first item it can decode, so it never names a
non-defective item.

`dd_negative_witness` looks for the event that forces any decoder with
zero false identifications to answer NONE: a k-set disjoint from the
true defective set that is consistent with the outcomes.
"""
import enum
import math
import warnings

from dataclasses import dataclass

import numpy as np

from scipy.stats import hypergeom

from gtaon.bitmatrix import BitMatrix
from gtaon.decode import decode_ml_exhaustive, comp_candidates
from gtaon.exceptions import (InvalidParameterError,
                              DegenerateDesignError,
                              InstanceTooLargeError,
                              NoConsistentSetError,
                              ModelViolationError,
                              IndeterminateWitnessWarning)
from gtaon.seeding import make_rng


def _check_population(p, k):
    if int(p) != p or int(k) != k or not 1 <= k <= p:
        raise InvalidParameterError(
            "Expected integers 1 <= k <= p, got p={}, k={}".format(p, k))


def code_length(p, k):
    """v = ceil(log2(p / k)), computed on integers."""
    _check_population(p, k)
    v = 0
    while (k << v) < p:
        v += 1
    return v


def subset_size(p, k):
    return p // k


@dataclass(frozen=True, eq=False)
class SaffronBlock:
    """One block of 2v tests over a subset of the items.

    Attributes
    ----------
    subset : numpy.ndarray
        Sorted global indices of the floor(p / k) items of the block.
    v : int
        Half-length of the codewords.
    """

    subset: np.ndarray
    v: int

    @property
    def n_tests(self):
        return 2 * self.v

    def codeword(self, i):
        """Codeword of local index i as a boolean vector of length 2v."""
        if not 0 <= i < len(self.subset):
            raise InvalidParameterError(
                "Local index {} out of range [0, {})".format(
                    i, len(self.subset)))
        shifts = np.arange(self.v - 1, -1, -1)
        first = ((i >> shifts) & 1).astype(bool)
        return np.concatenate([first, ~first])

    def to_bitmatrix(self, p):
        """The block's 2v x p tests."""
        dense = np.zeros((self.n_tests, p), dtype=bool)
        for i, item in enumerate(self.subset):
            dense[:, item] = self.codeword(i)
        return BitMatrix.from_dense(dense)

    def local_index(self, first_half):
        """Decode the first half of an observed codeword."""
        i = 0
        for bit in first_half:
            i = (i << 1) | int(bit)
        return i


@dataclass(frozen=True)
class DdResult:
    """Output of the definite-defective decoder.

    `identified` is a defective item index, or None when no block
    decodes. `block_outcomes` holds the number of positive tests of each
    block.
    """

    identified: int
    block_outcomes: tuple

    @property
    def is_none(self):
        return self.identified is None


def build_saffron(p, k, c, rng):
    """Draw c independent blocks.

    Each block uses its own uniformly random subset of floor(p / k)
    items, drawn without replacement inside the block and independently
    across blocks.

    Raises
    ------
    DegenerateDesignError
        If p / k < 2, in which case the codewords have no room.
    """
    _check_population(p, k)
    if int(c) != c or c < 1:
        raise InvalidParameterError(
            "Number of blocks must be a positive integer, got {}".format(c))
    if p < 2 * k:
        raise DegenerateDesignError(
            "SAFFRON blocks need p / k >= 2, got p={}, k={}".format(p, k))
    v = code_length(p, k)
    size = subset_size(p, k)
    blocks = []
    for _ in range(c):
        subset = np.sort(rng.choice(p, size=size, replace=False))
        subset.flags.writeable = False
        blocks.append(SaffronBlock(subset=subset, v=v))
    return blocks


def saffron_test_count(p, k, c):
    """Exact number of tests 2 c ceil(log2(p / k))."""
    return 2 * c * code_length(p, k)


def saffron_matrix(blocks, p):
    """Concatenate the tests of the blocks, in block order."""
    return BitMatrix.vstack([b.to_bitmatrix(p) for b in blocks])


def block_outcomes(blocks, S):
    """Noiseless outcomes of every block, concatenated.

    Equal to `apply_model(saffron_matrix(blocks, p), S)` without
    materialising the matrix.
    """
    chunks = []
    for block in blocks:
        y = np.zeros(block.n_tests, dtype=bool)
        hits = np.flatnonzero(np.isin(block.subset, S.items))
        for i in hits:
            y |= block.codeword(int(i))
        chunks.append(y)
    if not chunks:
        return np.zeros(0, dtype=bool)
    return np.concatenate(chunks)


def decode_saffron(blocks, outcomes):
    """Identify one defective item, or none.

    Parameters
    ----------
    blocks : list of SaffronBlock
    outcomes : gtaon.design.Outcomes
        Outcomes of the concatenated block tests.

    Returns
    -------
    DdResult

    Raises
    ------
    ModelViolationError
        If a block has between 1 and v - 1 positive tests, or exactly v
        positives that do not form a codeword. Neither can happen under
        the noiseless OR model.
    """
    y = outcomes.y
    expected = sum(b.n_tests for b in blocks)
    if y.size != expected:
        raise InvalidParameterError(
            "Blocks use {} tests, got {} outcomes".format(expected, y.size))
    identified = None
    counts = []
    start = 0
    for b, block in enumerate(blocks):
        local = y[start:start + block.n_tests]
        start += block.n_tests
        positives = int(local.sum())
        counts.append(positives)
        if positives == 0 or positives > block.v:
            continue
        if positives < block.v:
            raise ModelViolationError(
                "Block {} has {} positive tests, impossible with "
                "codewords of weight {}".format(b, positives, block.v))
        first, second = local[:block.v], local[block.v:]
        i = block.local_index(first)
        if not np.array_equal(first, ~second) or i >= len(block.subset):
            raise ModelViolationError(
                "Block {} outcomes {} are not a codeword".format(
                    b, local.astype(int).tolist()))
        # The first decodable block names the item; later ones are checked.
        if identified is None:
            identified = int(block.subset[i])
    return DdResult(identified=identified, block_outcomes=tuple(counts))


def one_defective_probability(p, k):
    """P[|A & S| = 1] for a block subset A of floor(p / k) items.

    Tends to exp(-1) when k grows and p / k stays an integer.
    """
    _check_population(p, k)
    return float(hypergeom.pmf(1, p, k, subset_size(p, k)))


def none_probability(p, k, c):
    """Probability that none of c independent blocks decodes."""
    return (1.0 - one_defective_probability(p, k)) ** c


class Witness(enum.Enum):
    """Result of a witness search."""

    FOUND = "found"
    ABSENT = "absent"
    INDETERMINATE = "indeterminate"


def dd_negative_witness(X, Y, S, k, budget, rng=None):
    """Look for a k-set disjoint from S that is consistent with (X, Y).

    Only COMP candidates outside S can belong to such a set. The search
    over them is exhaustive when there are at most `budget` k-subsets of
    candidates; otherwise a pruned search of `budget` nodes runs first,
    then `budget` uniformly random k-subsets are tried.

    Parameters
    ----------
    X : BitMatrix
        Bernoulli design.
    Y : gtaon.design.Outcomes
    S : gtaon.design.DefectiveSet
        True defective set.
    k : int
    budget : int
        Search budget, see above.
    rng : numpy.random.Generator, optional
        Source of the random subsets (a fixed seed by default).

    Returns
    -------
    Witness
        FOUND or ABSENT when decided, INDETERMINATE (with an
        `IndeterminateWitnessWarning`) when the budget ran out.
    """
    if budget < 1:
        raise InvalidParameterError(
            "Budget must be positive, got {}".format(budget))
    pool_mask = comp_candidates(X, Y)
    pool_mask[S.items] = False
    pool = np.flatnonzero(pool_mask)
    if pool.size < k:
        return Witness.ABSENT
    sub = BitMatrix.from_dense(X.columns(pool))
    try:
        decode_ml_exhaustive(sub, Y, k, guard=budget)
        return Witness.FOUND
    except NoConsistentSetError:
        return Witness.ABSENT
    except InstanceTooLargeError:
        pass

    rng = make_rng(0) if rng is None else rng
    cover = sub.to_dense()[Y.positives()]
    for _ in range(budget):
        pick = rng.choice(pool.size, size=k, replace=False)
        if cover[:, pick].any(axis=1).all():
            return Witness.FOUND
    warnings.warn(
        "No witness among {} random {}-subsets of {} candidates; "
        "C({}, {}) = {} subsets were not all visited".format(
            budget, k, pool.size, pool.size, k, math.comb(pool.size, k)),
        IndeterminateWitnessWarning)
    return Witness.INDETERMINATE
