"""Seed derivation and random generators.

Every random draw in gtaon goes through a `numpy.random.Generator` built
on the counter-based `Philox` bit generator. Seeds of individual trials
are derived from a master seed with a SplitMix64 finaliser:

    h0 = mix(master)
    h1 = mix(h0 ^ cell_id)
    h2 = mix(h1 ^ trial_id)

where `mix` is the SplitMix64 output function on 64-bit words. The
derived seed only depends on the three integers, so the order in which
workers pick up trials cannot change any draw.
"""
import numpy as np

from gtaon.exceptions import InvalidParameterError


MASK64 = (1 << 64) - 1

_GOLDEN = 0x9E3779B97F4A7C15
_MUL1 = 0xBF58476D1CE4E5B9
_MUL2 = 0x94D049BB133111EB


def mix64(x):
    """SplitMix64 step applied to a 64-bit word."""
    z = (x + _GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * _MUL1) & MASK64
    z = ((z ^ (z >> 27)) * _MUL2) & MASK64
    return z ^ (z >> 31)


def trial_seed(master_seed, cell_id=0, trial_id=0):
    """Derive the 64-bit seed of one trial.

    Parameters
    ----------
    master_seed : int
        Non-negative master seed of a run.
    cell_id : int
        Index of the parameter cell.
    trial_id : int
        Index of the trial inside the cell.
    """
    for value, name in ((master_seed, "master_seed"),
                        (cell_id, "cell_id"),
                        (trial_id, "trial_id")):
        if value < 0:
            raise InvalidParameterError(
                "Seed component '{}' must be non-negative, got {}".format(
                    name, value))
    h = mix64(master_seed & MASK64)
    h = mix64(h ^ (cell_id & MASK64))
    return mix64(h ^ (trial_id & MASK64))


def make_rng(seed):
    """Create a Philox-backed generator from an integer seed."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.Philox(int(seed) & MASK64))


def trial_rng(master_seed, cell_id=0, trial_id=0):
    """Generator for one trial (see `trial_seed`)."""
    return make_rng(trial_seed(master_seed, cell_id, trial_id))


def spawn(rng, count):
    """Split `count` independent child generators off `rng`."""
    return [
        np.random.Generator(np.random.Philox(int(s)))
        for s in rng.integers(0, MASK64, size=count, dtype=np.uint64,
                              endpoint=True)
    ]
