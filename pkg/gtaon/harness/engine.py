"""Seeded Monte Carlo engine for phase-transition sweeps.

A sweep is a list of cells (one per beta); every trial of a cell draws
its own generator from `gtaon.seeding.trial_seed(master, cell, trial)`,
so a trial can be replayed on its own and the schedule of the worker
pool has no influence on the results. Trials are processed in chunks
mapped over a `concurrent.futures.ProcessPoolExecutor`, and results are
gathered in submission order.
"""
import logging
import os
import time

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import repeat

import pandas as pd

from gtaon.dd import build_saffron, block_outcomes, decode_saffron
from gtaon.decode import (CSV_COLUMNS, score, get_decoder,
                          decode_reduced, decode_rank_overlap)
from gtaon.design import (DesignSpec, apply_model, sample_null,
                          sample_defective_set, Outcomes)
from gtaon.detect import Hypothesis, detect_trivial, detect_covered
from gtaon.exceptions import (ConfigError,
                              NoConsistentSetError,
                              InstanceTooLargeError)
from gtaon.harness import reporting
from gtaon.harness.stats import PhaseCurve, Rate
from gtaon.seeding import trial_seed, make_rng


logger = logging.getLogger(__name__)

THREADS_ENV = "GTAON_THREADS"

# Trials per task handed to a worker.
CHUNK_TRIALS = 50

TRIAL_COLUMNS = ("cell_id", "beta", "n", "trial_id", "seed") + \
    CSV_COLUMNS + ("fallback", "detect_p", "detect_q", "dd_identified",
                   "dd_false")


def resolve_workers(requested=None):
    """Number of worker processes, capped by GTAON_THREADS.

    Raises
    ------
    ConfigError
        If GTAON_THREADS is not a positive integer.
    """
    cap = os.environ.get(THREADS_ENV)
    if cap is None:
        cap = os.cpu_count() or 1
    else:
        try:
            cap = int(cap)
        except ValueError:
            cap = 0
        if cap < 1:
            raise ConfigError(
                "{} must be a positive integer, got '{}'".format(
                    THREADS_ENV, os.environ.get(THREADS_ENV)))
    if requested is None:
        return cap
    return max(1, min(requested, cap))


@dataclass(frozen=True)
class TrialRecord:
    """Outcome of one trial.

    `verdict_p` and `verdict_q` are the detector's verdicts on the
    trial's (X, Y) and on a draw from the null model; `fallback` tells
    that the configured decoder gave up and rank-overlap decoding was
    used instead. `dd` is the definite-defective result on the same S
    when the sweep asks for it, and `dd_false` tells that it named a
    non-defective item. `wall_time` does not take part in comparisons.
    """

    cell_id: int
    beta: float
    n: int
    trial_id: int
    seed: int
    report: object
    fallback: bool = False
    verdict_p: object = None
    verdict_q: object = None
    dd: object = None
    dd_false: bool = None
    wall_time: float = field(default=0.0, compare=False)

    def to_row(self):
        """Values in `TRIAL_COLUMNS` order."""
        return ([self.cell_id, self.beta, self.n, self.trial_id,
                 str(self.seed)] +
                self.report.to_row() +
                [self.fallback,
                 None if self.verdict_p is None else self.verdict_p.decided.value,
                 None if self.verdict_q is None else self.verdict_q.decided.value,
                 None if self.dd is None else self.dd.identified,
                 self.dd_false])


def _decode(config, X, Y, design):
    k = config.k_value
    decoder = get_decoder(config.decoder)
    try:
        if design.discarded is not None:
            estimate, _ = decode_reduced(
                X, Y, k, design.discarded, config.k_bar, decoder)
        else:
            estimate = decoder(X, Y, k)
        return estimate, False
    except (NoConsistentSetError, InstanceTooLargeError) as e:
        logger.debug("decode_fallback decoder=%s reason=%s", config.decoder, e)
    if design.discarded is not None:
        estimate, _ = decode_reduced(
            X, Y, k, design.discarded, config.k_bar, decode_rank_overlap)
    else:
        estimate = decode_rank_overlap(X, Y, k)
    return estimate, True


def _detect(config, X, Y):
    if config.detector == "trivial":
        return detect_trivial(X, Y)
    return detect_covered(X, Y, config.params)


def run_trial(config, cell, trial_id):
    """Run one trial of a cell.

    Draws S, the design, the outcomes, decodes and scores; with a
    detector, also runs it on (X, Y) and on a null-model draw, and with
    `dd_blocks` set, decodes fresh SAFFRON blocks on the same S.
    """
    start = time.perf_counter()
    seed = trial_seed(config.seed, cell.cell_id, trial_id)
    rng = make_rng(seed)
    params = config.params
    spec = DesignSpec(kind=config.design_kind, params=params, n=cell.n,
                      alpha_prime=config.alpha_prime)
    S = sample_defective_set(params, rng)
    design = spec.generate(rng)
    X = design.matrix
    Y = apply_model(X, S)
    estimate, fallback = _decode(config, X, Y, design)
    report = score(S, estimate, config.alpha, config.delta)
    verdict_p = verdict_q = None
    if config.detector is not None:
        verdict_p = _detect(config, X, Y)
        X0, Y0 = sample_null(spec, rng)
        verdict_q = _detect(config, X0, Y0)
    dd = dd_false = None
    if config.dd_blocks is not None:
        blocks = build_saffron(params.p, params.k, config.dd_blocks, rng)
        dd = decode_saffron(blocks, Outcomes(block_outcomes(blocks, S)))
        dd_false = not dd.is_none and dd.identified not in S
    return TrialRecord(
        cell_id=cell.cell_id, beta=cell.beta, n=cell.n, trial_id=trial_id,
        seed=seed, report=report, fallback=fallback,
        verdict_p=verdict_p, verdict_q=verdict_q, dd=dd, dd_false=dd_false,
        wall_time=time.perf_counter() - start)


def run_chunk(config, task):
    """Run the trials [start, stop) of a cell."""
    cell, start, stop = task
    return [run_trial(config, cell, t) for t in range(start, stop)]


def _tasks(config, cells):
    tasks = []
    for cell in cells:
        for start in range(0, config.trials, CHUNK_TRIALS):
            tasks.append((cell, start, min(config.trials, start + CHUNK_TRIALS)))
    return tasks


def run_trials(config, cells=None, workers=None):
    """All trial records of the sweep, ordered by cell then trial."""
    cells = config.cells() if cells is None else cells
    workers = resolve_workers(workers or config.workers)
    tasks = _tasks(config, cells)
    logger.info("sweep_start cells=%d trials=%d workers=%d",
                len(cells), config.trials, workers)
    if workers == 1 or len(tasks) == 1:
        chunks = [run_chunk(config, t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            chunks = list(executor.map(run_chunk, repeat(config), tasks))
    return [record for chunk in chunks for record in chunk]


def summarise_cell(config, cell, records):
    """Rates of one cell."""
    trials = len(records)
    rates = {
        "exact": Rate(sum(r.report.exact for r in records), trials),
        "alpha_approx": Rate(
            sum(r.report.alpha_approx for r in records), trials),
        "weak": Rate(sum(r.report.weak for r in records), trials),
    }
    if config.detector is not None:
        correct = sum(
            (r.verdict_p.decided is Hypothesis.P) +
            (r.verdict_q.decided is Hypothesis.Q) for r in records)
        rates["detect"] = Rate(correct, 2 * trials)
    if config.dd_blocks is not None:
        rates["dd"] = Rate(sum(not r.dd.is_none for r in records), trials)
    extra = {
        "mean_overlap": sum(r.report.overlap for r in records) / trials,
        "fallbacks": sum(r.fallback for r in records),
    }
    if config.dd_blocks is not None:
        extra["dd_false_identifications"] = sum(r.dd_false for r in records)
    logger.info(
        "cell_done cell_id=%d beta=%.4g n=%d exact=%.3f weak=%.3f",
        cell.cell_id, cell.beta, cell.n, rates["exact"].rate,
        rates["weak"].rate)
    return rates, extra


def trials_frame(records):
    """Data frame of trial records, one row each."""
    return pd.DataFrame([r.to_row() for r in records],
                        columns=list(TRIAL_COLUMNS))


def run_sweep(config, workers=None, trials_output=None):
    """Run a sweep and build its phase curve.

    When `config.output` is set, the per-cell CSV is written there (with
    its ``.meta.json``); `trials_output` receives one row per trial.

    Returns
    -------
    curve : PhaseCurve
    records : list of TrialRecord
    """
    started = time.time()
    cells = config.cells()
    records = run_trials(config, cells, workers)
    by_cell = {cell.cell_id: [] for cell in cells}
    for record in records:
        by_cell[record.cell_id].append(record)
    curve = PhaseCurve()
    k = config.k_value
    for cell in cells:
        rates, extra = summarise_cell(config, cell, by_cell[cell.cell_id])
        curve.add_cell(cell, k, rates, extra)

    meta = {
        "config": config.to_json(),
        "summary": config.summary(),
        "wall_time": time.time() - started,
        "trial_wall_time": sum(r.wall_time for r in records),
        "workers": resolve_workers(workers or config.workers),
    }
    if config.output is not None:
        reporting.write_csv(curve.to_frame(), config.output)
        reporting.write_meta(config.output, meta)
    if trials_output is not None:
        reporting.write_csv(trials_frame(records), trials_output)
        reporting.write_meta(trials_output, meta)
    return curve, records


def replay_trial(config, cell_id, trial_id):
    """Recompute a single trial of a sweep."""
    cells = config.cells()
    if not 0 <= cell_id < len(cells):
        raise ConfigError(
            "Cell {} out of range [0, {})".format(cell_id, len(cells)))
    if not 0 <= trial_id < config.trials:
        raise ConfigError(
            "Trial {} out of range [0, {})".format(trial_id, config.trials))
    return run_trial(config, cells[cell_id], trial_id)
