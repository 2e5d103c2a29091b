"""Test designs and the group testing model.

This module contains the value types of a group testing instance and the
generators of the four supported designs:

* `gen_bernoulli` -- i.i.d. Bernoulli(nu / k) entries with nu chosen so
  that a test on k defectives is positive with probability exactly 1/2;
* `gen_column_zeroed` -- a Bernoulli design on a random subset of items,
  the other columns being all-zero;
* `gen_all_or_none` -- each test contains every item or no item;
* SAFFRON blocks, built by `gtaon.dd.build_saffron`.

`apply_model` computes the noiseless OR outcomes and `sample_null`
draws (X, Y) from the null model in which Y is uniform and independent
of X. Items are indexed from 0.
"""
import enum
import math

from dataclasses import dataclass

import numpy as np

from scipy.special import gammaln

from gtaon.bitmatrix import BitMatrix
from gtaon.exceptions import (InvalidParameterError,
                              DegenerateDesignError,
                              UnsupportedDesignError,
                              SerializationError)


def round_half_up(x):
    """Round to the nearest integer, halves away from zero for x >= 0."""
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class PopulationParams:
    """Population of `p` items, `k` of which are defective."""

    p: int
    k: int

    def __post_init__(self):
        if int(self.p) != self.p or int(self.k) != self.k:
            raise InvalidParameterError(
                "p and k must be integers, got p={}, k={}".format(
                    self.p, self.k))
        if not 1 <= self.k <= self.p:
            raise InvalidParameterError(
                "Expected 1 <= k <= p, got p={}, k={}".format(self.p, self.k))

    def to_json(self):
        return {"p": self.p, "k": self.k}


@dataclass(frozen=True)
class BernoulliParams:
    """Inclusion intensity `nu` and per-entry probability `q = nu / k`."""

    k: int
    nu: float
    q: float

    def __post_init__(self):
        if not 0.0 < self.q < 1.0:
            raise InvalidParameterError(
                "Inclusion probability must lie in (0, 1), got {}".format(
                    self.q))


def solve_nu(k):
    """Solve (1 - nu / k)^k = 1/2 for the inclusion intensity nu.

    The closed form is nu = k (1 - 2^(-1/k)); it is evaluated with
    `expm1` so that q = nu / k keeps full relative precision for large k.

    Parameters
    ----------
    k : int
        Number of defectives, k >= 1.

    Returns
    -------
    BernoulliParams

    Raises
    ------
    InvalidParameterError
        If k < 1.
    """
    if int(k) != k or k < 1:
        raise InvalidParameterError(
            "Number of defectives must be a positive integer, got {}".format(
                k))
    q = -math.expm1(-math.log(2.0) / k)
    return BernoulliParams(k=int(k), nu=k * q, q=q)


class DefectiveSet(object):
    """Sorted set of defective item indices.

    Parameters
    ----------
    items : iterable of int
        Distinct indices in ``[0, p)``.
    p : int
        Population size.
    """

    def __init__(self, items, p):
        arr = np.array(sorted(int(i) for i in items), dtype=np.int64)
        if arr.size and (arr[0] < 0 or arr[-1] >= p):
            raise InvalidParameterError(
                "Defective indices must lie in [0, {}), got {}".format(
                    p, arr.tolist()))
        if arr.size > 1 and np.any(np.diff(arr) == 0):
            raise InvalidParameterError(
                "Defective indices must be distinct, got {}".format(
                    arr.tolist()))
        arr.flags.writeable = False
        self.items = arr
        self.p = p

    @property
    def k(self):
        return int(self.items.size)

    def mask(self):
        """Boolean membership mask of length p."""
        m = np.zeros(self.p, dtype=bool)
        m[self.items] = True
        return m

    def __len__(self):
        return int(self.items.size)

    def __iter__(self):
        return iter(self.items.tolist())

    def __contains__(self, item):
        pos = np.searchsorted(self.items, item)
        return bool(pos < self.items.size and self.items[pos] == item)

    def __eq__(self, other):
        if not isinstance(other, DefectiveSet):
            return False
        return self.p == other.p and np.array_equal(self.items, other.items)

    def __hash__(self):
        return hash((self.p, self.items.tobytes()))

    def __repr__(self):
        return "DefectiveSet({}, p={})".format(self.items.tolist(), self.p)


class Outcomes(object):
    """Binary outcome vector Y of n tests."""

    def __init__(self, y):
        arr = np.array(y, dtype=bool, copy=True).reshape(-1)
        arr.flags.writeable = False
        self.y = arr

    @property
    def n(self):
        return int(self.y.size)

    def positives(self):
        """Boolean mask of positive tests."""
        return self.y

    def negatives(self):
        """Boolean mask of negative tests."""
        return ~self.y

    def n_positive(self):
        return int(self.y.sum())

    def n_negative(self):
        return self.n - self.n_positive()

    def to_list(self):
        return [int(v) for v in self.y]

    def __len__(self):
        return self.n

    def __eq__(self, other):
        if not isinstance(other, Outcomes):
            return False
        return np.array_equal(self.y, other.y)

    def __hash__(self):
        return hash(self.y.tobytes())

    def __repr__(self):
        return "Outcomes({})".format("".join(str(v) for v in self.to_list()))


class DesignKind(enum.Enum):
    """Kinds of test designs."""

    BERNOULLI = "bernoulli"
    COLUMN_ZEROED = "column_zeroed"
    ALL_OR_NONE = "all_or_none"
    SAFFRON = "saffron"


@dataclass(frozen=True, eq=False)
class GeneratedDesign:
    """A realised design: the matrix plus design-specific metadata."""

    matrix: BitMatrix
    discarded: np.ndarray = None
    blocks: tuple = ()


@dataclass(frozen=True)
class DesignSpec:
    """Description of which design to generate.

    Attributes
    ----------
    kind : DesignKind
    params : PopulationParams
    n : int
        Number of tests. For SAFFRON designs it is determined by the
        block structure and may be left as None.
    alpha_prime : float, optional
        Fraction of discarded items (column-zeroed designs).
    c : int, optional
        Number of independent blocks (SAFFRON designs).
    """

    kind: DesignKind
    params: PopulationParams
    n: int = None
    alpha_prime: float = None
    c: int = None

    def __post_init__(self):
        kind = DesignKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is DesignKind.COLUMN_ZEROED:
            if self.alpha_prime is None or not 0.0 < self.alpha_prime < 1.0:
                raise InvalidParameterError(
                    "Column-zeroed design requires alpha_prime in (0, 1), "
                    "got {}".format(self.alpha_prime))
        if kind is DesignKind.SAFFRON:
            if self.c is None or int(self.c) != self.c or self.c < 1:
                raise InvalidParameterError(
                    "SAFFRON design requires c >= 1, got {}".format(self.c))
            from gtaon.dd import saffron_test_count
            expected = saffron_test_count(self.params.p, self.params.k, self.c)
            if self.n is None:
                object.__setattr__(self, "n", expected)
            elif self.n != expected:
                raise InvalidParameterError(
                    "SAFFRON design with c={} uses {} tests, got n={}".format(
                        self.c, expected, self.n))
        if self.n is None or int(self.n) != self.n or self.n < 0:
            raise InvalidParameterError(
                "Number of tests must be a non-negative integer, "
                "got {}".format(self.n))

    def generate(self, rng):
        """Draw a design realisation from `rng`."""
        if self.kind is DesignKind.BERNOULLI:
            return GeneratedDesign(gen_bernoulli(self.params, self.n, rng))
        elif self.kind is DesignKind.COLUMN_ZEROED:
            matrix, discarded = gen_column_zeroed(
                self.params, self.n, self.alpha_prime, rng)
            return GeneratedDesign(matrix, discarded=discarded)
        elif self.kind is DesignKind.ALL_OR_NONE:
            return GeneratedDesign(
                gen_all_or_none(self.params.p, self.n, rng))
        else:
            from gtaon.dd import build_saffron, saffron_matrix
            blocks = build_saffron(
                self.params.p, self.params.k, self.c, rng)
            return GeneratedDesign(
                saffron_matrix(blocks, self.params.p), blocks=tuple(blocks))

    def to_json(self):
        """Create a JSON representation of the spec."""
        j_data = {"kind": self.kind.value, "n": self.n}
        j_data.update(self.params.to_json())
        if self.alpha_prime is not None:
            j_data["alpha_prime"] = self.alpha_prime
        if self.c is not None:
            j_data["c"] = self.c
        return j_data

    @classmethod
    def from_json(cls, json_data):
        """Create a spec from a JSON-like dictionary."""
        try:
            return cls(
                kind=DesignKind(json_data["kind"]),
                params=PopulationParams(json_data["p"], json_data["k"]),
                n=json_data.get("n"),
                alpha_prime=json_data.get("alpha_prime"),
                c=json_data.get("c"))
        except (KeyError, ValueError) as e:
            raise SerializationError(
                "Error loading design spec: {}".format(e))


def sample_defective_set(params, rng):
    """Draw S uniformly over the C(p, k) subsets of size k."""
    items = rng.choice(params.p, size=params.k, replace=False)
    return DefectiveSet(items, params.p)


def gen_bernoulli(params, n, rng):
    """Generate an n x p Bernoulli design with intensity from `solve_nu`.

    Parameters
    ----------
    params : PopulationParams
    n : int
        Number of tests, n >= 0.
    rng : numpy.random.Generator
    """
    if n < 0:
        raise InvalidParameterError(
            "Number of tests must be non-negative, got {}".format(n))
    q = solve_nu(params.k).q
    return BitMatrix.bernoulli(n, params.p, q, rng)


def reduced_defective_count(k, alpha_prime):
    """Planning value of the defective count after discarding items."""
    return max(1, round_half_up((1.0 - alpha_prime) * k))


def gen_column_zeroed(params, n, alpha_prime, rng):
    """Generate a Bernoulli design with a random fraction of zero columns.

    floor(alpha_prime * p) columns chosen uniformly at random are set to
    zero; the remaining columns are i.i.d. Bernoulli(nu / k_bar) with
    k_bar = max(1, round((1 - alpha_prime) k)) and nu re-solved for k_bar.

    Returns
    -------
    matrix : BitMatrix
    discarded : numpy.ndarray
        Sorted indices of the zeroed columns.

    Raises
    ------
    DegenerateDesignError
        If no column or every column would be discarded.
    """
    if not 0.0 < alpha_prime < 1.0:
        raise InvalidParameterError(
            "alpha_prime must lie in (0, 1), got {}".format(alpha_prime))
    if n < 0:
        raise InvalidParameterError(
            "Number of tests must be non-negative, got {}".format(n))
    n_discard = int(math.floor(alpha_prime * params.p))
    if n_discard in (0, params.p):
        raise DegenerateDesignError(
            "alpha_prime={} discards {} of {} items".format(
                alpha_prime, n_discard, params.p))
    discarded = np.sort(rng.choice(params.p, size=n_discard, replace=False))
    k_bar = reduced_defective_count(params.k, alpha_prime)
    full = BitMatrix.bernoulli(n, params.p, solve_nu(k_bar).q, rng)
    keep = np.ones(params.p, dtype=bool)
    keep[discarded] = False
    keep_packed = np.packbits(keep, bitorder="little")
    matrix = BitMatrix(n, params.p, full.bits & keep_packed)
    discarded.flags.writeable = False
    return matrix, discarded


def gen_all_or_none(p, n, rng):
    """Generate a design whose rows are all-ones or all-zeros w.p. 1/2."""
    if n < 0:
        raise InvalidParameterError(
            "Number of tests must be non-negative, got {}".format(n))
    if p < 1:
        raise InvalidParameterError(
            "Population must be positive, got {}".format(p))
    full_rows = rng.random(n) < 0.5
    dense = np.zeros((n, p), dtype=bool)
    dense[full_rows] = True
    return BitMatrix.from_dense(dense)


def apply_model(X, S):
    """Noiseless OR outcomes Y_i = OR_{j in S} X_ij.

    Raises
    ------
    InvalidParameterError
        If an index of S is not a column of X.
    """
    items = S.items if isinstance(S, DefectiveSet) else np.asarray(S)
    if items.size and (items.min() < 0 or items.max() >= X.cols):
        raise InvalidParameterError(
            "Defective indices out of range [0, {})".format(X.cols))
    if items.size == 0:
        return Outcomes(np.zeros(X.rows, dtype=bool))
    return Outcomes(X.columns(items).any(axis=1))


def sample_null(spec, rng):
    """Draw (X, Y) from the null model Q(X, Y) = P(X) P(Y).

    X follows the design's marginal and Y is uniform on {0, 1}^n,
    independent of X. Only Bernoulli and all-or-none designs are
    supported: for both, a test is positive with probability 1/2 under
    the group testing model, so the uniform Y has the right marginal.

    Raises
    ------
    UnsupportedDesignError
        For column-zeroed and SAFFRON designs.
    """
    if spec.kind is DesignKind.BERNOULLI:
        X = gen_bernoulli(spec.params, spec.n, rng)
    elif spec.kind is DesignKind.ALL_OR_NONE:
        X = gen_all_or_none(spec.params.p, spec.n, rng)
    else:
        raise UnsupportedDesignError(
            "Null model is not defined for '{}' designs".format(
                spec.kind.value))
    return X, Outcomes(rng.random(spec.n) < 0.5)


def log2_binomial(p, k):
    """log2 C(p, k) via log-gamma."""
    return float(
        (gammaln(p + 1) - gammaln(k + 1) - gammaln(p - k + 1)) / math.log(2))


def information_threshold(p, k):
    """Counting threshold log2 C(p, k)."""
    return log2_binomial(p, k)


def sparse_threshold(p, k):
    """All-or-nothing threshold k log2(p / k)."""
    return k * math.log2(p / k)


def tests_for_beta(p, k, beta):
    """Number of tests round(beta * k log2(p / k))."""
    return round_half_up(beta * sparse_threshold(p, k))


def defectives_surviving(discarded, S):
    """Number of defectives that are not among the discarded items."""
    return int(np.setdiff1d(S.items, discarded, assume_unique=True).size)
