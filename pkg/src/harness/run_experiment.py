"""
Monte-Carlo sweep runner.

Every (scheme, sweep value, trial) triple is an independent work item. The
channel realization of a trial depends only on (master seed, trial), so all
schemes and sweep points of one trial see the same channel; scheme-side
randomness gets its own stream keyed on (scheme, sweep index, trial).
"""

from __future__ import annotations

import logging
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, List

import numpy as np

from src.channel.channel_model import sample_realization
from src.models.enums import SchemeName, TrialStatus
from src.models.schemas import AggregateRow, ExperimentSpec, ResultsTable, ScenarioConfig, TrialRecord
from src.schemes.registry import get_scheme


logger = logging.getLogger(__name__)

CHANNEL_STREAM = 0
SCHEME_STREAM = 1


@dataclass(frozen=True)
class WorkItem:
    scheme: SchemeName
    sweep_index: int
    sweep_value: float
    trial: int
    channel_seed: int
    seed: int
    config: ScenarioConfig


def _draw_seed(master_seed: int, *key: int) -> int:
    sequence = np.random.SeedSequence(master_seed, spawn_key=key)
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def channel_seed(master_seed: int, trial: int) -> int:
    return _draw_seed(master_seed, CHANNEL_STREAM, trial)


def scheme_seed(master_seed: int, scheme: SchemeName, sweep_index: int, trial: int) -> int:
    return _draw_seed(master_seed, SCHEME_STREAM, list(SchemeName).index(SchemeName(scheme)), sweep_index, trial)


def build_work_items(spec: ExperimentSpec) -> List[WorkItem]:
    items = []
    for sweep_index, value in enumerate(spec.sweep_values):
        config = spec.config_at(value)
        for scheme in spec.schemes:
            for trial in range(spec.trials):
                items.append(WorkItem(
                    scheme=scheme,
                    sweep_index=sweep_index,
                    sweep_value=value,
                    trial=trial,
                    channel_seed=channel_seed(spec.seed, trial),
                    seed=scheme_seed(spec.seed, scheme, sweep_index, trial),
                    config=config,
                ))
    return items


def run_trial(item: WorkItem) -> TrialRecord:
    """Run one work item; any failure is captured in the record instead of raised."""
    started = time.perf_counter()
    base = dict(scheme=item.scheme, sweep_value=item.sweep_value, trial=item.trial, seed=item.seed)
    try:
        realization = sample_realization(item.config, item.channel_seed)
        solution = get_scheme(item.scheme).run(item.config, realization, item.seed)
        report = solution.covertness
        if not report.feasible:
            raise ValueError(f"covert cap violated by {-report.slack:.3e} W")
        record = TrialRecord(
            **base,
            secrecy_rate_raw=solution.secrecy_rate_raw,
            secrecy_rate=solution.secrecy_rate,
            willie_power=report.willie_power,
            covert_slack=report.slack / item.config.sigma2,
            rounds=solution.rounds,
            wall_time=time.perf_counter() - started,
        )
    except Exception as exc:
        logger.warning(
            "trial %d of %s at %g failed: %s: %s",
            item.trial, item.scheme.value, item.sweep_value, type(exc).__name__, exc,
        )
        return TrialRecord(
            **base,
            status=TrialStatus.FAILED,
            error=f"{type(exc).__name__}: {exc}",
            wall_time=time.perf_counter() - started,
        )
    logger.debug("trial %d of %s at %g took %.3f s", item.trial, item.scheme.value, item.sweep_value, record.wall_time)
    return record


def aggregate(records: Iterable[TrialRecord], schemes: Iterable[SchemeName], sweep_values: Iterable[float]) -> List[AggregateRow]:
    """Mean and population std of the clamped secrecy rate per (scheme, sweep value); failed trials excluded."""
    records = list(records)
    rows = []
    for scheme in sorted(schemes, key=lambda s: list(SchemeName).index(s)):
        for value in sweep_values:
            matching = [r for r in records if r.scheme == scheme and r.sweep_value == value]
            rates = np.array([r.secrecy_rate for r in matching if r.status == TrialStatus.OK], dtype=float)
            rows.append(AggregateRow(
                scheme=scheme,
                sweep_value=value,
                mean_secrecy_rate=float(rates.mean()) if rates.size else float("nan"),
                std_secrecy_rate=float(rates.std()) if rates.size else float("nan"),
                trials=int(rates.size),
                failed=len(matching) - int(rates.size),
            ))
    return rows


def run_experiment(spec: ExperimentSpec) -> ResultsTable:
    items = build_work_items(spec)
    logger.info(
        "running %d trials: %s over %s = %s with %d worker(s)",
        len(items), ",".join(s.value for s in spec.schemes), spec.sweep_axis.value,
        ",".join(f"{v:g}" for v in spec.sweep_values), spec.jobs,
    )
    started = time.perf_counter()

    remaining = Counter((item.scheme, item.sweep_value) for item in items)
    records: List[TrialRecord] = []

    def collect(record: TrialRecord) -> None:
        records.append(record)
        key = (record.scheme, record.sweep_value)
        remaining[key] -= 1
        if remaining[key] == 0:
            logger.info("finished %s at %s = %g", record.scheme.value, spec.sweep_axis.value, record.sweep_value)

    if spec.jobs > 1:
        with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            for record in pool.map(run_trial, items):
                collect(record)
    else:
        for item in items:
            collect(run_trial(item))

    records.sort(key=TrialRecord.sort_key)
    table = ResultsTable(
        sweep_axis=spec.sweep_axis,
        records=records,
        aggregates=aggregate(records, spec.schemes, spec.sweep_values),
    )
    failed = sum(r.status == TrialStatus.FAILED for r in records)
    logger.info("experiment finished in %.1f s (%d failed trial(s))", time.perf_counter() - started, failed)
    return table
