"""Success rates with Wilson confidence intervals."""
import math

from dataclasses import dataclass

import pandas as pd

from scipy.stats import norm

from gtaon.exceptions import InvalidParameterError


METRICS = ("exact", "alpha_approx", "weak", "detect", "dd")


def wilson_interval(successes, trials, confidence=0.95):
    """Wilson score interval of a binomial proportion.

    Returns (0, 1) when there are no trials.
    """
    if trials < 0 or not 0 <= successes <= max(trials, 0):
        raise InvalidParameterError(
            "Expected 0 <= successes <= trials, got {} of {}".format(
                successes, trials))
    if not 0.0 < confidence < 1.0:
        raise InvalidParameterError(
            "Confidence must lie in (0, 1), got {}".format(confidence))
    if trials == 0:
        return 0.0, 1.0
    z = norm.ppf(0.5 + confidence / 2.0)
    rate = successes / trials
    denom = 1.0 + z * z / trials
    center = (rate + z * z / (2.0 * trials)) / denom
    half = z * math.sqrt(
        rate * (1.0 - rate) / trials + z * z / (4.0 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def binomial_sigma(prob, trials):
    """Standard deviation of an empirical rate around `prob`."""
    return math.sqrt(prob * (1.0 - prob) / trials)


@dataclass(frozen=True)
class Rate:
    """Empirical rate with its 95% Wilson interval."""

    successes: int
    trials: int

    @property
    def rate(self):
        return self.successes / self.trials if self.trials else 0.0

    @property
    def interval(self):
        return wilson_interval(self.successes, self.trials)

    def within(self, prob, sigmas):
        """Whether the rate lies within `sigmas` standard deviations of prob."""
        if prob in (0.0, 1.0):
            return self.rate == prob
        return abs(self.rate - prob) <= sigmas * binomial_sigma(
            prob, self.trials)

    def to_json(self):
        low, high = self.interval
        return {
            "successes": self.successes,
            "trials": self.trials,
            "rate": self.rate,
            "ci_low": low,
            "ci_high": high,
        }


class PhaseCurve(object):
    """Per-cell success rates of a sweep.

    Each cell carries a `Rate` for every metric it measured (`METRICS`);
    the detection rate counts correct verdicts over the paired P and Q
    trials.
    """

    def __init__(self):
        self.cells = []

    def add_cell(self, cell, k, rates, extra=None):
        row = {"cell_id": cell.cell_id, "beta": cell.beta, "n": cell.n,
               "k": k}
        if extra:
            row.update(extra)
        self.cells.append((row, dict(rates)))

    def rate(self, cell_id, metric):
        for row, rates in self.cells:
            if row["cell_id"] == cell_id:
                return rates[metric]
        raise KeyError(cell_id)

    def rate_at(self, beta, metric):
        """Rate of the cell with the given beta."""
        for row, rates in self.cells:
            if abs(row["beta"] - beta) < 1e-9:
                return rates[metric]
        raise KeyError(beta)

    def to_frame(self):
        """One row per cell: parameters then rate, ci_low, ci_high per metric."""
        records = []
        for row, rates in self.cells:
            record = dict(row)
            for metric in METRICS:
                if metric not in rates:
                    continue
                r = rates[metric]
                low, high = r.interval
                record["{}_successes".format(metric)] = r.successes
                record["{}_trials".format(metric)] = r.trials
                record["{}_rate".format(metric)] = r.rate
                record["{}_ci_low".format(metric)] = low
                record["{}_ci_high".format(metric)] = high
            records.append(record)
        return pd.DataFrame.from_records(records)

    def __len__(self):
        return len(self.cells)
