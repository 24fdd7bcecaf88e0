"""Report files: observation tables and correlation matrices.

CSV and JSON writers produce byte-identical output for identical
inputs. Measure values are written with 12 significant digits in CSV;
an undefined correlation becomes an empty CSV cell and a JSON null.
Figures (PNG) are rendered next to the delimited files unless disabled.
"""

from __future__ import annotations

import csv
import json
import re
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

from .evolution import CorrelationMatrix, ObservationRow, ObservationTable
from .indexes import IndexKind
from .measures import (
    MEASURE_NAMES,
    MeasureReport,
    ReportMetadata,
    format_measure_value,
)

FORMATS = ("csv", "json")

_OBS_HEADER = ("gold_snapshot_id",) + MEASURE_NAMES
_OBS_NAME_RE = re.compile(r"observations_([a-z]+)\.csv")


def _check_formats(formats: Iterable[str]) -> tuple[str, ...]:
    chosen = tuple(dict.fromkeys(formats))
    bad = [f for f in chosen if f not in FORMATS]
    if bad:
        raise ValueError(f"unknown report formats: {bad}")
    # fixed canonical order, independent of how the caller spelled it
    return tuple(f for f in FORMATS if f in chosen)


def _write_csv(path: Path, rows: Iterable[Sequence[str]]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerows(rows)


def _write_json(path: Path, payload) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _observation_csv_rows(table: ObservationTable) -> list[list[str]]:
    rows = [list(_OBS_HEADER)]
    for row in table.rows:
        rows.append(
            [row.gold_snapshot_id]
            + [format_measure_value(row.report.values[n]) for n in MEASURE_NAMES]
        )
    return rows


def _observation_json(table: ObservationTable) -> dict:
    return {
        "index_kind": table.index_kind.value,
        "rows": [
            {
                "gold_snapshot_id": row.gold_snapshot_id,
                **{n: row.report.values[n] for n in MEASURE_NAMES},
            }
            for row in table.rows
        ],
    }


def _matrix_csv_rows(matrix: CorrelationMatrix) -> list[list[str]]:
    rows = [["measure", *matrix.measure_names]]
    for name, row in zip(matrix.measure_names, matrix.rho):
        rows.append(
            [name] + ["" if v is None else format_measure_value(v) for v in row]
        )
    return rows


def _matrix_json(matrix: CorrelationMatrix) -> dict:
    return {
        "index_kind": matrix.index_kind.value,
        "measures": list(matrix.measure_names),
        "rho": [list(row) for row in matrix.rho],
    }


def emit_reports(
    tables: Iterable[ObservationTable],
    matrices: Iterable[CorrelationMatrix],
    out_dir: Union[str, Path],
    formats: Iterable[str] = FORMATS,
    figures: bool = True,
) -> list[Path]:
    """Write observation and correlation files per kind; returns written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    chosen = _check_formats(formats)
    written: list[Path] = []
    for table in tables:
        kind = table.index_kind.value
        if "csv" in chosen:
            path = out / f"observations_{kind}.csv"
            _write_csv(path, _observation_csv_rows(table))
            written.append(path)
        if "json" in chosen:
            path = out / f"observations_{kind}.json"
            _write_json(path, _observation_json(table))
            written.append(path)
        if figures:
            from .figures import save_observation_series

            path = out / f"observations_{kind}.png"
            save_observation_series(table, path)
            written.append(path)
    for matrix in matrices:
        kind = matrix.index_kind.value
        if "csv" in chosen:
            path = out / f"correlation_{kind}.csv"
            _write_csv(path, _matrix_csv_rows(matrix))
            written.append(path)
        if "json" in chosen:
            path = out / f"correlation_{kind}.json"
            _write_json(path, _matrix_json(matrix))
            written.append(path)
        if figures:
            from .figures import save_correlation_heatmap

            path = out / f"correlation_{kind}.png"
            save_correlation_heatmap(matrix, path)
            written.append(path)
    return written


def write_measure_report(
    report: MeasureReport,
    out_dir: Union[str, Path],
    formats: Iterable[str] = FORMATS,
) -> list[Path]:
    """Write one comparison report as ``report_<kind>.csv`` / ``.json``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    chosen = _check_formats(formats)
    kind = report.metadata.index_kind.value
    written: list[Path] = []
    if "csv" in chosen:
        path = out / f"report_{kind}.csv"
        _write_csv(path, [list(MEASURE_NAMES), report.csv_row()])
        written.append(path)
    if "json" in chosen:
        path = out / f"report_{kind}.json"
        _write_json(path, report.to_json_dict())
        written.append(path)
    return written


def read_observation_table(
    csv_path: Union[str, Path],
    index_kind: Optional[IndexKind] = None,
) -> ObservationTable:
    """Rebuild an ObservationTable from an ``observations_<kind>.csv`` file."""
    path = Path(csv_path)
    kind = index_kind
    if kind is None:
        m = _OBS_NAME_RE.fullmatch(path.name)
        if m is None:
            raise ValueError(
                f"cannot infer index kind from file name {path.name!r}; "
                "expected observations_<kind>.csv"
            )
        try:
            kind = IndexKind(m.group(1))
        except ValueError:
            raise ValueError(f"unknown index kind in file name {path.name!r}") from None
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty observations file") from None
        if tuple(header) != _OBS_HEADER:
            raise ValueError(f"{path}: unexpected header {header!r}")
        rows = []
        for record in reader:
            if len(record) != len(_OBS_HEADER):
                raise ValueError(f"{path}: malformed row {record!r}")
            values = {
                name: float(cell) for name, cell in zip(MEASURE_NAMES, record[1:])
            }
            metadata = ReportMetadata(
                gold_snapshot_id=record[0],
                stale_snapshot_id="",
                index_kind=kind,
            )
            rows.append(
                ObservationRow(record[0], MeasureReport(values, metadata))
            )
    return ObservationTable(kind, tuple(rows))
