"""Packed binary test matrices.

This module implements `BitMatrix`, the n x p binary design matrix of a
group testing procedure (row = test, column = item). Entries are stored
row-major in a `numpy.uint8` buffer of shape ``(n, ceil(p / 8))``:
column ``j`` of a row is bit ``j % 8`` (least significant first) of byte
``j // 8``, and padding bits past column ``p - 1`` are always zero.

The same layout is used by the hex dump produced by `BitMatrix.to_json`:
each row is written as the lowercase hex string of its bytes.
"""
import json
import os

import numpy as np

from gtaon.exceptions import (InvalidParameterError,
                              SerializationError)


_POPCOUNT = np.array([bin(i).count("1") for i in range(256)], dtype=np.int64)

# Rows generated at once when sampling large matrices.
_CHUNK_ENTRIES = 1 << 22


def _n_bytes(cols):
    return (cols + 7) // 8


def _padding_mask(cols):
    """Mask of the valid bits of the last byte of a row."""
    rem = cols % 8
    if rem == 0:
        return np.uint8(0xFF)
    return np.uint8((1 << rem) - 1)


class BitMatrix(object):
    """Immutable n x p binary matrix with packed row storage.

    Attributes
    ----------
    rows : int
        Number of tests n.
    cols : int
        Number of items p.
    bits : numpy.ndarray
        Read-only ``uint8`` array of shape ``(rows, ceil(cols / 8))``.
    """

    def __init__(self, rows, cols, bits=None):
        """Initialize a matrix from its packed buffer (all zeros if None)."""
        if rows < 0 or cols < 1:
            raise InvalidParameterError(
                "Matrix shape must have rows >= 0 and cols >= 1, "
                "got ({}, {})".format(rows, cols))
        n_bytes = _n_bytes(cols)
        if bits is None:
            buf = np.zeros((rows, n_bytes), dtype=np.uint8)
        else:
            buf = np.array(bits, dtype=np.uint8, copy=True)
            if buf.shape != (rows, n_bytes):
                raise InvalidParameterError(
                    "Packed buffer has shape {}, expected {}".format(
                        buf.shape, (rows, n_bytes)))
            if rows > 0:
                buf[:, -1] &= _padding_mask(cols)
        buf.flags.writeable = False
        self.rows = rows
        self.cols = cols
        self.bits = buf

    @classmethod
    def from_dense(cls, dense):
        """Create a matrix from a dense 0/1 (or boolean) array."""
        arr = np.asarray(dense)
        if arr.ndim != 2:
            raise InvalidParameterError(
                "Dense matrix must be two-dimensional, got {} dims".format(
                    arr.ndim))
        if arr.size and not np.isin(arr, (0, 1)).all():
            raise InvalidParameterError("Dense matrix entries must be 0 or 1")
        rows, cols = arr.shape
        packed = np.packbits(arr.astype(bool), axis=1, bitorder="little")
        if rows == 0:
            packed = np.zeros((0, _n_bytes(cols)), dtype=np.uint8)
        return cls(rows, cols, packed)

    @classmethod
    def zeros(cls, rows, cols):
        """All-zero matrix."""
        return cls(rows, cols)

    @classmethod
    def bernoulli(cls, rows, cols, q, rng):
        """Matrix with i.i.d. Bernoulli(q) entries drawn from `rng`."""
        n_bytes = _n_bytes(cols)
        packed = np.zeros((rows, n_bytes), dtype=np.uint8)
        step = max(1, _CHUNK_ENTRIES // cols)
        for start in range(0, rows, step):
            stop = min(rows, start + step)
            block = rng.random((stop - start, cols)) < q
            packed[start:stop] = np.packbits(block, axis=1, bitorder="little")
        return cls(rows, cols, packed)

    @classmethod
    def vstack(cls, matrices):
        """Concatenate matrices with equal column counts row-wise."""
        matrices = list(matrices)
        if not matrices:
            raise InvalidParameterError("Cannot stack an empty list")
        cols = matrices[0].cols
        for m in matrices:
            if m.cols != cols:
                raise InvalidParameterError(
                    "Cannot stack matrices with {} and {} columns".format(
                        cols, m.cols))
        bits = np.concatenate([m.bits for m in matrices], axis=0)
        return cls(bits.shape[0], cols, bits)

    @property
    def shape(self):
        return (self.rows, self.cols)

    def _check_row(self, i):
        if not 0 <= i < self.rows:
            raise InvalidParameterError(
                "Row index {} out of range [0, {})".format(i, self.rows))

    def _check_col(self, j):
        if not 0 <= j < self.cols:
            raise InvalidParameterError(
                "Column index {} out of range [0, {})".format(j, self.cols))

    def get(self, i, j):
        """Entry (i, j) as an int in {0, 1}."""
        self._check_row(i)
        self._check_col(j)
        return int((self.bits[i, j >> 3] >> (j & 7)) & 1)

    def row(self, i):
        """Row i as a boolean vector of length p."""
        self._check_row(i)
        return np.unpackbits(
            self.bits[i], count=self.cols, bitorder="little").astype(bool)

    def column(self, j):
        """Column j as a boolean vector of length n."""
        self._check_col(j)
        return ((self.bits[:, j >> 3] >> (j & 7)) & 1).astype(bool)

    def columns(self, items):
        """Dense ``(n, len(items))`` boolean sub-matrix of the given columns."""
        idx = np.asarray(items, dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= self.cols):
            raise InvalidParameterError(
                "Column indices out of range [0, {})".format(self.cols))
        byte_idx = idx >> 3
        shift = (idx & 7).astype(np.uint8)
        return ((self.bits[:, byte_idx] >> shift) & 1).astype(bool)

    def to_dense(self):
        """Dense boolean ``(n, p)`` copy."""
        if self.rows == 0:
            return np.zeros((0, self.cols), dtype=bool)
        return np.unpackbits(
            self.bits, axis=1, count=self.cols, bitorder="little"
        ).astype(bool)

    def row_weights(self):
        """Number of ones per row."""
        if self.rows == 0:
            return np.zeros(0, dtype=np.int64)
        return _POPCOUNT[self.bits].sum(axis=1)

    def column_weights(self, rows=None):
        """Number of ones per column, optionally over a row mask."""
        bits = self.bits if rows is None else self.bits[np.asarray(rows)]
        weights = np.zeros(self.cols, dtype=np.int64)
        step = max(1, _CHUNK_ENTRIES // self.cols)
        for start in range(0, bits.shape[0], step):
            block = np.unpackbits(
                bits[start:start + step], axis=1, count=self.cols,
                bitorder="little")
            weights += block.sum(axis=0, dtype=np.int64)
        return weights

    def or_rows(self, rows=None):
        """Packed OR of a subset of rows (a mask or index array)."""
        bits = self.bits if rows is None else self.bits[np.asarray(rows)]
        if bits.shape[0] == 0:
            return np.zeros(self.bits.shape[1], dtype=np.uint8)
        return np.bitwise_or.reduce(bits, axis=0)

    def unpack_mask(self, packed):
        """Unpack a packed row-like vector into a boolean item mask."""
        return np.unpackbits(
            packed, count=self.cols, bitorder="little").astype(bool)

    def count_ones(self):
        """Total number of ones."""
        return int(_POPCOUNT[self.bits].sum())

    def density(self):
        """Fraction of ones among the n * p entries."""
        if self.rows == 0:
            return 0.0
        return self.count_ones() / float(self.rows * self.cols)

    def __eq__(self, other):
        """Test equality with another matrix."""
        if not isinstance(other, BitMatrix):
            return False
        return (self.shape == other.shape and
                np.array_equal(self.bits, other.bits))

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((self.rows, self.cols, self.bits.tobytes()))

    def __repr__(self):
        return "BitMatrix(rows={}, cols={}, ones={})".format(
            self.rows, self.cols, self.count_ones())

    def to_hex(self):
        """Row-major hex dump, one string per row."""
        return [bytes(r).hex() for r in self.bits]

    @classmethod
    def from_hex(cls, hex_rows, cols):
        """Rebuild a matrix from `to_hex` output."""
        n_bytes = _n_bytes(cols)
        bits = np.zeros((len(hex_rows), n_bytes), dtype=np.uint8)
        for i, h in enumerate(hex_rows):
            try:
                raw = bytes.fromhex(h)
            except ValueError:
                raise SerializationError(
                    "Row {} is not a valid hex string".format(i))
            if len(raw) != n_bytes:
                raise SerializationError(
                    "Row {} has {} bytes, expected {}".format(
                        i, len(raw), n_bytes))
            row = np.frombuffer(raw, dtype=np.uint8)
            if row[-1] & ~_padding_mask(cols):
                raise SerializationError(
                    "Row {} has non-zero padding bits".format(i))
            bits[i] = row
        return cls(len(hex_rows), cols, bits)

    def to_json(self, k=None, design=None, seed=None):
        """Create a JSON representation: header plus hex dump.

        Parameters
        ----------
        k : int, optional
            Number of defectives the design was drawn for.
        design : dict, optional
            JSON form of the `DesignSpec` used.
        seed : int, optional
            Seed the matrix was generated from.
        """
        return {
            "header": {
                "p": self.cols,
                "k": k,
                "n": self.rows,
                "design": design,
                "seed": seed,
            },
            "hex": self.to_hex(),
        }

    @classmethod
    def from_json(cls, json_data):
        """Create a matrix from a JSON-like dictionary."""
        try:
            header = json_data["header"]
            hex_rows = json_data["hex"]
            cols = int(header["p"])
            rows = int(header["n"])
        except (KeyError, TypeError, ValueError):
            raise SerializationError(
                "Error loading matrix: header with 'p' and 'n' and a "
                "'hex' row list are required")
        if len(hex_rows) != rows:
            raise SerializationError(
                "Header announces {} rows, dump has {}".format(
                    rows, len(hex_rows)))
        return cls.from_hex(hex_rows, cols)

    def export(self, filename, k=None, design=None, seed=None):
        """Export the matrix to a JSON file."""
        with open(filename, "w") as f:
            json.dump(self.to_json(k=k, design=design, seed=seed), f)

    @classmethod
    def load(cls, filename):
        """Load a matrix from a JSON file.

        Raises
        ------
        SerializationError
            If the file does not exist or is malformed.
        """
        if not os.path.isfile(filename):
            raise SerializationError(
                "Error loading matrix: file '{}' does not exist!".format(
                    filename))
        with open(filename, "r") as f:
            try:
                j_data = json.loads(f.read())
            except ValueError:
                raise SerializationError(
                    "Error loading matrix: '{}' is not valid JSON".format(
                        filename))
        return cls.from_json(j_data)
