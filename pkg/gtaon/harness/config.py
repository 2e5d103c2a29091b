"""Sweep configurations."""
import json
import os
import warnings

from dataclasses import dataclass, field

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from gtaon.decode import DECODERS
from gtaon.design import (DesignKind, PopulationParams,
                          tests_for_beta, information_threshold,
                          reduced_defective_count)
from gtaon.exceptions import (ConfigError,
                              InvalidParameterError,
                              DuplicateTestCountWarning)
from gtaon.harness.grid_parser import parse_grid, parse_k_rule


DETECTORS = (None, "covered", "trivial")

SWEEP_DESIGNS = (
    DesignKind.BERNOULLI,
    DesignKind.COLUMN_ZEROED,
    DesignKind.ALL_OR_NONE,
)


@dataclass(frozen=True)
class Cell:
    """One point of a sweep grid."""

    cell_id: int
    beta: float
    n: int

    def to_json(self):
        return {"cell_id": self.cell_id, "beta": self.beta, "n": self.n}


@dataclass(frozen=True)
class SweepConfig:
    """Parameters of a phase-transition sweep.

    Attributes
    ----------
    p : int
        Population size.
    k : str
        Number of defectives or a k-rule such as ``ceil(p^0.7)``.
    betas : tuple of float
        Strictly increasing fractions of k log2(p / k); a grid expression
        (see `gtaon.harness.grid_parser`) is accepted on construction.
    design : str
        One of ``bernoulli``, ``column_zeroed``, ``all_or_none``.
    decoder : str
        Key of `gtaon.decode.DECODERS`.
    detector : str, optional
        ``covered`` (Bernoulli designs), ``trivial`` (all-or-none
        designs) or None.
    trials : int
        Trials per cell.
    seed : int
        Master seed.
    alpha, delta : float
        Approximate and weak recovery levels.
    alpha_prime : float, optional
        Discarded fraction of the column-zeroed design.
    output : str, optional
        Path of the per-cell CSV.
    dd_blocks : int, optional
        When set, every trial also runs the definite-defective scheme
        with this many blocks on the same defective set.
    """

    p: int
    k: str
    betas: tuple
    design: str = "bernoulli"
    decoder: str = "rank_overlap"
    detector: str = None
    trials: int = 500
    seed: int = 0
    alpha: float = 0.25
    delta: float = 0.1
    alpha_prime: float = None
    output: str = None
    workers: int = None
    dd_blocks: int = None
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        betas = self.betas
        if isinstance(betas, str):
            betas = parse_grid(betas)
        elif isinstance(betas, (int, float)):
            betas = [betas]
        betas = tuple(float(b) for b in betas)
        object.__setattr__(self, "betas", betas)
        object.__setattr__(self, "k", str(self.k).strip())
        self._validate()

    def _validate(self):
        if int(self.p) != self.p or self.p < 1:
            raise ConfigError(
                "p must be a positive integer, got {}".format(self.p))
        object.__setattr__(self, "_k_value", parse_k_rule(self.k)(self.p))
        try:
            PopulationParams(self.p, self.k_value)
        except InvalidParameterError as e:
            raise ConfigError(str(e))
        if not self.betas:
            raise ConfigError("The beta grid is empty")
        for a, b in zip(self.betas, self.betas[1:]):
            if not a < b:
                raise ConfigError(
                    "The beta grid must be strictly increasing, got {}".format(
                        list(self.betas)))
        if self.betas[0] < 0:
            raise ConfigError(
                "Beta values must be non-negative, got {}".format(
                    self.betas[0]))
        try:
            kind = DesignKind(self.design)
        except ValueError:
            raise ConfigError(
                "Unknown design '{}'".format(self.design))
        if kind not in SWEEP_DESIGNS:
            raise ConfigError(
                "Design '{}' cannot be swept, expected one of {}".format(
                    self.design, [d.value for d in SWEEP_DESIGNS]))
        if kind is DesignKind.COLUMN_ZEROED and (
                self.alpha_prime is None or
                not 0.0 < self.alpha_prime < 1.0):
            raise ConfigError(
                "Column-zeroed design needs alpha_prime in (0, 1), "
                "got {}".format(self.alpha_prime))
        if self.decoder not in DECODERS:
            raise ConfigError(
                "Unknown decoder '{}', expected one of {}".format(
                    self.decoder, sorted(DECODERS)))
        if self.detector not in DETECTORS:
            raise ConfigError(
                "Unknown detector '{}', expected one of {}".format(
                    self.detector, list(DETECTORS)))
        if self.detector == "covered" and kind is not DesignKind.BERNOULLI:
            raise ConfigError(
                "The covered-column detector needs a Bernoulli design")
        if self.detector == "trivial" and kind is not DesignKind.ALL_OR_NONE:
            raise ConfigError(
                "The trivial detector needs an all-or-none design")
        if int(self.trials) != self.trials or self.trials < 1:
            raise ConfigError(
                "trials must be a positive integer, got {}".format(
                    self.trials))
        if int(self.seed) != self.seed or self.seed < 0:
            raise ConfigError(
                "seed must be a non-negative integer, got {}".format(
                    self.seed))
        for name in ("alpha", "delta"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(
                    "{} must lie in [0, 1], got {}".format(name, value))
        if self.workers is not None and self.workers < 1:
            raise ConfigError(
                "workers must be positive, got {}".format(self.workers))
        if self.dd_blocks is not None:
            if int(self.dd_blocks) != self.dd_blocks or self.dd_blocks < 1:
                raise ConfigError(
                    "dd_blocks must be a positive integer, got {}".format(
                        self.dd_blocks))
            if self.p < 2 * self.k_value:
                raise ConfigError(
                    "Definite-defective blocks need p >= 2k, got p={}, "
                    "k={}".format(self.p, self.k_value))

    @property
    def k_value(self):
        """Number of defectives at this p."""
        return self._k_value

    @property
    def params(self):
        return PopulationParams(self.p, self.k_value)

    @property
    def design_kind(self):
        return DesignKind(self.design)

    @property
    def k_bar(self):
        """Planning defective count of the column-zeroed design."""
        if self.design_kind is not DesignKind.COLUMN_ZEROED:
            return self.k_value
        return reduced_defective_count(self.k_value, self.alpha_prime)

    def cells(self):
        """Grid cells with n = round(beta k log2(p / k)).

        A `DuplicateTestCountWarning` is emitted when two betas give the
        same n.
        """
        k = self.k_value
        cells = [
            Cell(cell_id=i, beta=b, n=tests_for_beta(self.p, k, b))
            for i, b in enumerate(self.betas)
        ]
        seen = {}
        for cell in cells:
            if cell.n in seen:
                warnings.warn(
                    "beta={} and beta={} both give n={}".format(
                        seen[cell.n], cell.beta, cell.n),
                    DuplicateTestCountWarning)
            seen.setdefault(cell.n, cell.beta)
        return cells

    def summary(self):
        """Derived quantities reported with the results."""
        k = self.k_value
        return {
            "k": k,
            "k_bar": self.k_bar,
            "log2_binomial": information_threshold(self.p, k),
            "cells": [c.to_json() for c in self.cells()],
        }

    def to_json(self):
        """Create a JSON representation of the configuration."""
        j_data = {
            "p": self.p,
            "k": self.k,
            "betas": list(self.betas),
            "design": self.design,
            "decoder": self.decoder,
            "detector": self.detector,
            "trials": self.trials,
            "seed": self.seed,
            "alpha": self.alpha,
            "delta": self.delta,
        }
        if self.alpha_prime is not None:
            j_data["alpha_prime"] = self.alpha_prime
        if self.output is not None:
            j_data["output"] = self.output
        if self.dd_blocks is not None:
            j_data["dd_blocks"] = self.dd_blocks
        return j_data

    @classmethod
    def from_json(cls, json_data):
        """Create a configuration from a JSON-like dictionary.

        Unknown keys are kept in `extra`.
        """
        known = set(cls.__dataclass_fields__) - {"extra"}
        missing = [key for key in ("p", "k", "betas") if key not in json_data]
        if missing:
            raise ConfigError(
                "Sweep configuration misses required keys {}".format(missing))
        kwargs = {k: v for k, v in json_data.items() if k in known}
        extra = {k: v for k, v in json_data.items() if k not in known}
        try:
            return cls(extra=extra, **kwargs)
        except TypeError as e:
            raise ConfigError("Invalid sweep configuration: {}".format(e))

    def export(self, filename):
        """Export the configuration to a JSON file."""
        with open(filename, "w") as f:
            json.dump(self.to_json(), f, indent=2, sort_keys=True)

    @classmethod
    def load(cls, filename):
        """Load a configuration from a JSON or TOML file.

        Files ending in ``.toml`` are read as TOML, anything else as JSON.

        Raises
        ------
        ConfigError
            If the file does not exist or cannot be decoded.
        """
        if not os.path.isfile(filename):
            raise ConfigError(
                "Error loading sweep configuration: file '{}' "
                "does not exist!".format(filename))
        if filename.endswith(".toml"):
            with open(filename, "rb") as f:
                try:
                    j_data = tomllib.load(f)
                except tomllib.TOMLDecodeError as e:
                    raise ConfigError(
                        "Error loading sweep configuration '{}': {}".format(
                            filename, e))
            j_data = j_data.get("sweep", j_data)
        else:
            with open(filename, "r") as f:
                try:
                    j_data = json.loads(f.read())
                except ValueError as e:
                    raise ConfigError(
                        "Error loading sweep configuration '{}': {}".format(
                            filename, e))
        return cls.from_json(j_data)

    def replace(self, **changes):
        """Copy of the configuration with some fields changed."""
        j_data = self.to_json()
        j_data.update(changes)
        if "workers" not in changes:
            j_data["workers"] = self.workers
        return SweepConfig.from_json(j_data)
