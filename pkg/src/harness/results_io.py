"""
CSV layout of a ResultsTable.

One header line and one line per trial record, then (if there are
aggregates) a blank line, the aggregate header and one line per
(scheme, sweep value). The sweep column is named after the axis, which is how
`read_csv` recovers it. Floats are written with 9 significant digits and
wall time is left out so that identical runs give identical bytes.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from src.models.enums import SchemeName, SweepAxis, TrialStatus
from src.models.schemas import AggregateRow, ResultsTable, TrialRecord


SWEEP_COLUMNS = {SweepAxis.PMAX: "pmax_dbm", SweepAxis.EPSILON: "epsilon"}
# TrialRecord.wall_time is not a column: it differs run to run and would break byte-identical output.
RECORD_FIELDS = [
    "scheme", None, "trial", "seed", "status", "secrecy_rate_raw", "secrecy_rate",
    "willie_power", "covert_slack", "rounds", "error",
]
AGGREGATE_FIELDS = [
    "scheme", None, "mean_secrecy_rate", "std_secrecy_rate", "trials", "failed", "averaging",
]
AVERAGING = "mean_of_clamped_rates"


def _format(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (SchemeName, TrialStatus)):
        return value.value
    if isinstance(value, float):
        return format(value, ".9g")
    return str(value)


def _header(fields: List[Optional[str]], sweep_column: str) -> List[str]:
    return [sweep_column if name is None else name for name in fields]


def write_csv(table: ResultsTable, path: Union[str, Path]) -> None:
    path = Path(path)
    sweep_column = SWEEP_COLUMNS[table.sweep_axis]
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(_header(RECORD_FIELDS, sweep_column))
        for record in sorted(table.records, key=TrialRecord.sort_key):
            values = record.model_dump()
            writer.writerow(_format(values[name or "sweep_value"]) for name in RECORD_FIELDS)
        if table.aggregates:
            writer.writerow([])
            writer.writerow(_header(AGGREGATE_FIELDS, sweep_column))
            for row in table.aggregates:
                values = {**row.model_dump(), "averaging": AVERAGING}
                writer.writerow(_format(values[name or "sweep_value"]) for name in AGGREGATE_FIELDS)


def _parse_row(header: List[str], row: List[str], sweep_column: str) -> Dict[str, Any]:
    parsed = {}
    for name, text in zip(header, row):
        key = "sweep_value" if name == sweep_column else name
        parsed[key] = None if text == "" else text
    return parsed


def read_csv(path: Union[str, Path]) -> ResultsTable:
    """Parse a file written by `write_csv` back into a ResultsTable (wall times read as 0)."""
    path = Path(path)
    with path.open("r", encoding="utf-8", newline="") as f:
        rows = list(csv.reader(f))
    if not rows:
        raise ValueError(f"{path}: empty results file")

    header = rows[0]
    axes = {column: axis for axis, column in SWEEP_COLUMNS.items()}
    if len(header) < 2 or header[1] not in axes:
        raise ValueError(f"{path}: unrecognized sweep column {header[1:2]}")
    sweep_column = header[1]

    records, aggregates = [], []
    body = rows[1:]
    split = body.index([]) if [] in body else len(body)
    for row in body[:split]:
        records.append(TrialRecord(**_parse_row(header, row, sweep_column)))
    if split < len(body):
        aggregate_header = body[split + 1]
        for row in body[split + 2:]:
            values = _parse_row(aggregate_header, row, sweep_column)
            values.pop("averaging", None)
            aggregates.append(AggregateRow(**values))
    return ResultsTable(sweep_axis=axes[sweep_column], records=records, aggregates=aggregates)
