import math

import numpy as np
import pytest

from src.harness import run_experiment as harness
from src.harness.results_io import write_csv
from src.harness.run_experiment import aggregate, build_work_items, channel_seed, run_experiment, scheme_seed
from src.models.enums import SchemeName, TrialStatus
from src.models.schemas import ExperimentSpec, TrialRecord


def make_spec(tmp_path, **overrides):
    data = dict(
        config={"n_antennas": 2, "max_rounds": 5},
        sweep_axis="pmax",
        sweep_values=[10.0, 20.0],
        schemes=["fpa", "rpa"],
        trials=2,
        seed=7,
        output_path=tmp_path / "out.csv",
    )
    data.update(overrides)
    return ExperimentSpec(**data)


def record(scheme, value, trial, rate=None, status=TrialStatus.OK):
    return TrialRecord(scheme=scheme, sweep_value=value, trial=trial, seed=0, status=status,
                       secrecy_rate=rate, secrecy_rate_raw=rate)


def test_channel_seed_depends_only_on_master_seed_and_trial():
    assert channel_seed(1, 0) == channel_seed(1, 0)
    assert channel_seed(1, 0) != channel_seed(1, 1)
    assert channel_seed(1, 0) != channel_seed(2, 0)
    assert 0 <= channel_seed(1, 0) < 2 ** 64


def test_scheme_seeds_are_independent_streams():
    seeds = {
        scheme_seed(3, scheme, sweep_index, trial)
        for scheme in SchemeName for sweep_index in range(3) for trial in range(4)
    }
    assert len(seeds) == 4 * 3 * 4
    assert channel_seed(3, 0) not in seeds


def test_work_items_share_channels_across_schemes_and_sweep_values(tmp_path):
    items = build_work_items(make_spec(tmp_path))
    assert len(items) == 2 * 2 * 2
    for trial in range(2):
        assert len({item.channel_seed for item in items if item.trial == trial}) == 1
    assert sorted({item.config.pmax for item in items}) == pytest.approx([0.01, 0.1])


def test_run_experiment_fills_the_grid(tmp_path):
    table = run_experiment(make_spec(tmp_path))

    assert len(table.records) == 8
    assert [(r.scheme, r.sweep_value, r.trial) for r in table.records] == [
        (scheme, value, trial)
        for scheme in (SchemeName.FPA, SchemeName.RPA) for value in (10.0, 20.0) for trial in range(2)
    ]
    assert all(r.status == TrialStatus.OK for r in table.records)
    assert all(r.secrecy_rate >= 0.0 and r.covert_slack >= -1e-8 for r in table.records)
    assert len(table.aggregates) == 4
    assert all(row.trials == 2 and row.failed == 0 for row in table.aggregates)


def test_identical_specs_give_identical_csv_bytes(tmp_path):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    write_csv(run_experiment(make_spec(tmp_path, trials=1)), first)
    write_csv(run_experiment(make_spec(tmp_path, trials=1)), second)
    assert first.read_bytes() == second.read_bytes()


def test_failed_trials_are_recorded_not_raised(tmp_path, monkeypatch):
    class Broken:
        @classmethod
        def run(cls, config, realization, seed):
            raise RuntimeError("solver exploded")

    monkeypatch.setattr(harness, "get_scheme", lambda name: Broken)
    table = run_experiment(make_spec(tmp_path, schemes=["fpa"], sweep_values=[20.0]))

    assert [r.status for r in table.records] == [TrialStatus.FAILED] * 2
    assert table.records[0].error == "RuntimeError: solver exploded"
    row = table.aggregates[0]
    assert row.trials == 0 and row.failed == 2
    assert math.isnan(row.mean_secrecy_rate)


def test_aggregate_uses_population_std_over_ok_trials():
    records = [
        record(SchemeName.FPA, 10.0, 0, 1.0),
        record(SchemeName.FPA, 10.0, 1, 3.0),
        record(SchemeName.FPA, 10.0, 2, status=TrialStatus.FAILED),
        record(SchemeName.PROPOSED, 10.0, 0, 2.0),
    ]
    rows = aggregate(records, [SchemeName.FPA, SchemeName.PROPOSED], [10.0])

    assert [row.scheme for row in rows] == [SchemeName.PROPOSED, SchemeName.FPA]
    fpa = rows[1]
    assert fpa.mean_secrecy_rate == pytest.approx(2.0)
    assert fpa.std_secrecy_rate == pytest.approx(1.0)
    assert (fpa.trials, fpa.failed) == (2, 1)
    assert rows[0].std_secrecy_rate == 0.0


def test_worker_pool_matches_serial_run(tmp_path):
    serial = run_experiment(make_spec(tmp_path, trials=1))
    pooled = run_experiment(make_spec(tmp_path, trials=1, jobs=2))
    strip = {"wall_time"}
    assert [r.model_dump(exclude=strip) for r in pooled.records] == [r.model_dump(exclude=strip) for r in serial.records]


@pytest.mark.slow
@pytest.mark.parametrize("axis, values", [
    ("pmax", [0.0, 5.0, 10.0, 15.0, 20.0]),
    ("epsilon", [0.05, 0.1, 0.2, 0.3, 0.4]),
])
def test_mean_rate_grows_along_the_sweep(tmp_path, axis, values):
    spec = make_spec(tmp_path, config={}, sweep_axis=axis, sweep_values=values,
                     schemes=["proposed", "fpa"], trials=100, jobs=4)
    table = run_experiment(spec)
    for scheme in (SchemeName.PROPOSED, SchemeName.FPA):
        means = np.array([row.mean_secrecy_rate for row in table.aggregates if row.scheme == scheme])
        assert np.all(np.diff(means) >= -1e-3 * np.abs(means[:-1])), f"{scheme.value}: {means}"

    if axis == "pmax":
        for value in values:
            rates = {
                (r.scheme, r.trial): r.secrecy_rate
                for r in table.records if r.sweep_value == value and r.status == TrialStatus.OK
            }
            trials = [t for t in range(100) if (SchemeName.PROPOSED, t) in rates and (SchemeName.FPA, t) in rates]
            wins = [rates[SchemeName.PROPOSED, t] >= rates[SchemeName.FPA, t] * (1.0 - 1e-6) for t in trials]
            assert len(trials) >= 95
            assert np.mean(wins) >= 0.9
