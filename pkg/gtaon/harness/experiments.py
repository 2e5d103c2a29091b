"""Experiments beyond recovery sweeps.

Each experiment takes its parameters and a master seed and returns a
JSON-like summary (or a data frame for tables); all randomness flows from
`gtaon.seeding.trial_rng`.
"""
import logging
import math

import numpy as np
import pandas as pd

from gtaon.dd import (build_saffron, block_outcomes, decode_saffron,
                      none_probability, one_defective_probability,
                      saffron_test_count, dd_negative_witness, Witness)
from gtaon.decode import (planted_estimate, planted_overlap,
                          yprime_success_probability)
from gtaon.design import (DesignKind, DesignSpec, PopulationParams,
                          Outcomes, apply_model, sample_null,
                          sample_defective_set, gen_bernoulli)
from gtaon.detect import (Hypothesis, detect_trivial, detect_covered,
                          detect_sampled)
from gtaon.divergence import chi2_exact, covered_error_bound
from gtaon.exceptions import InvalidParameterError
from gtaon.harness.stats import Rate
from gtaon.seeding import trial_rng


logger = logging.getLogger(__name__)

# Above this many matrix entries the covered detector is simulated from
# its sufficient statistics.
MATERIALISE_LIMIT = 5 * 10 ** 7


def run_yprime_experiment(k, deltas, tests, seed=0, p=None):
    """Predict fresh test outcomes from an estimate with planted overlap.

    For each delta an estimate sharing exactly floor(delta k) items with
    S is planted, `tests` fresh Bernoulli tests are drawn and the
    predicted outcomes are compared with the true ones.

    Returns
    -------
    pandas.DataFrame
        Columns delta, overlap, delta_effective, successes, trials, rate,
        ci_low, ci_high, expected.
    """
    p = 4 * k if p is None else p
    params = PopulationParams(p, k)
    rows = []
    for cell_id, delta in enumerate(deltas):
        if not 0.0 <= delta <= 1.0:
            raise InvalidParameterError(
                "delta must lie in [0, 1], got {}".format(delta))
        rng = trial_rng(seed, cell_id)
        S = sample_defective_set(params, rng)
        overlap = planted_overlap(k, delta)
        S_hat = planted_estimate(S, overlap, rng)
        X = gen_bernoulli(params, tests, rng)
        agree = int(np.count_nonzero(
            apply_model(X, S).y == apply_model(X, S_hat).y))
        rate = Rate(agree, tests)
        row = {"delta": delta, "overlap": overlap,
               "delta_effective": overlap / k,
               "expected": yprime_success_probability(overlap / k)}
        row.update(rate.to_json())
        rows.append(row)
        logger.info("yprime_done delta=%.3g rate=%.4f expected=%.4f",
                    delta, rate.rate, row["expected"])
    return pd.DataFrame(rows)


def _detect_materialised(detector, params, n, hypothesis, rng):
    kind = (DesignKind.ALL_OR_NONE if detector == "trivial"
            else DesignKind.BERNOULLI)
    spec = DesignSpec(kind=kind, params=params, n=n)
    if hypothesis is Hypothesis.P:
        S = sample_defective_set(params, rng)
        X = spec.generate(rng).matrix
        Y = apply_model(X, S)
    else:
        X, Y = sample_null(spec, rng)
    if detector == "trivial":
        return detect_trivial(X, Y)
    return detect_covered(X, Y, params)


def run_detect_experiment(p, k, n, detector="covered", trials=1000, seed=0,
                          reduced=None):
    """Paired detection trials under P and under Q.

    Parameters
    ----------
    detector : str
        ``covered`` (Bernoulli design) or ``trivial`` (all-or-none).
    reduced : bool, optional
        Simulate the covered detector from its sufficient statistics
        instead of materialising X. By default this happens when
        n p exceeds `MATERIALISE_LIMIT`.

    Returns
    -------
    dict
        Error counts per hypothesis, paired error rate with its Wilson
        interval and, for the covered detector, the Berry-Esseen bound
        at q0 = 2^(-n / (2k)).
    """
    if detector not in ("covered", "trivial"):
        raise InvalidParameterError(
            "Unknown detector '{}'".format(detector))
    params = PopulationParams(p, k)
    if reduced is None:
        reduced = detector == "covered" and n * p > MATERIALISE_LIMIT
    errors = {Hypothesis.P: 0, Hypothesis.Q: 0}
    for t in range(trials):
        for h_id, hypothesis in enumerate((Hypothesis.P, Hypothesis.Q)):
            rng = trial_rng(seed, h_id, t)
            if reduced:
                verdict = detect_sampled(p, k, n, hypothesis, rng)
            else:
                verdict = _detect_materialised(
                    detector, params, n, hypothesis, rng)
            errors[hypothesis] += verdict.is_error(hypothesis)
    paired = Rate(errors[Hypothesis.P] + errors[Hypothesis.Q], 2 * trials)
    summary = {
        "p": p, "k": k, "n": n, "detector": detector, "trials": trials,
        "reduced": bool(reduced),
        "errors_p": errors[Hypothesis.P],
        "errors_q": errors[Hypothesis.Q],
        "error_rate_p": errors[Hypothesis.P] / trials,
        "error_rate_q": errors[Hypothesis.Q] / trials,
        "error_rate": paired.rate,
        "error_ci": list(paired.interval),
    }
    if detector == "covered" and n > 0:
        summary["predicted_error_bound"] = covered_error_bound(
            p, k, 0.5 ** (n / (2.0 * k)))
    elif detector == "trivial":
        summary["predicted_error_rate_q"] = 2.0 ** (-n)
    logger.info("detect_done detector=%s n=%d error_rate=%.4f",
                detector, n, paired.rate)
    return summary


def run_dd_experiment(p, k, c, trials, seed=0):
    """Trials of the SAFFRON definite-defective scheme.

    Returns
    -------
    dict
        trials, identified_rate, none_rate, false_identifications, the
        exact NONE probability and its exp(-1) limit.
    """
    params = PopulationParams(p, k)
    identified = 0
    false_ids = 0
    for t in range(trials):
        rng = trial_rng(seed, 0, t)
        S = sample_defective_set(params, rng)
        blocks = build_saffron(p, k, c, rng)
        result = decode_saffron(blocks, Outcomes(block_outcomes(blocks, S)))
        if not result.is_none:
            identified += 1
            if result.identified not in S:
                false_ids += 1
    none = Rate(trials - identified, trials)
    summary = {
        "p": p, "k": k, "c": c, "trials": trials,
        "tests": saffron_test_count(p, k, c),
        "identified_rate": identified / trials,
        "none_rate": none.rate,
        "none_ci": list(none.interval),
        "false_identifications": false_ids,
        "one_defective_probability": one_defective_probability(p, k),
        "expected_none_rate": none_probability(p, k, c),
        "limit_none_rate": (1.0 - math.exp(-1.0)) ** c,
    }
    logger.info("dd_done c=%d none_rate=%.4f false_identifications=%d",
                c, none.rate, false_ids)
    return summary


def run_witness_experiment(p, k, n, trials, seed=0, budget=10 ** 5):
    """Frequency of a consistent k-set disjoint from S.

    Compared with the lower bound 1 / (1 + chi2) on that frequency.
    """
    params = PopulationParams(p, k)
    counts = {w: 0 for w in Witness}
    for t in range(trials):
        rng = trial_rng(seed, 0, t)
        S = sample_defective_set(params, rng)
        X = gen_bernoulli(params, n, rng)
        Y = apply_model(X, S)
        counts[dd_negative_witness(X, Y, S, k, budget, rng)] += 1
    found = Rate(counts[Witness.FOUND], trials)
    report = chi2_exact(p, k, n)
    bound = math.exp(-report.log1p_chi2)
    summary = {
        "p": p, "k": k, "n": n, "trials": trials,
        "found": counts[Witness.FOUND],
        "absent": counts[Witness.ABSENT],
        "indeterminate": counts[Witness.INDETERMINATE],
        "frequency": found.rate,
        "frequency_ci": list(found.interval),
        "chi2": report.chi2,
        "de_caen_bound": bound,
    }
    logger.info("witness_done n=%d frequency=%.4f bound=%.4f",
                n, found.rate, bound)
    return summary
