"""Snapshot-evolution harness and rank correlation of measure series.

The harness fixes an index over the first snapshot of a series and
scores it as-is against a gold-standard index built over each later
snapshot, yielding one observation row per comparison. Spearman's rho
is computed as Pearson correlation on fractional average ranks, so tied
values share the mean of the rank positions they occupy; a series with
zero rank variance has no defined correlation and is reported as None.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence, TextIO, Union

from .errors import LengthMismatchError, SnapshotError, TooFewRowsError
from .indexes import BuildOptions, IndexKind, build_indexes
from .measures import (
    DEFAULT_CONFIG,
    MEASURE_NAMES,
    MeasureConfig,
    MeasureReport,
    measure_all,
)
from .nquads import load_snapshot


@dataclass(frozen=True)
class SnapshotRef:
    snapshot_id: str
    path: Path


def _snapshot_id_for(path: Path) -> str:
    name = path.name
    if name.endswith(".nq.gz"):
        return name[: -len(".nq.gz")]
    if name.endswith(".nq"):
        return name[: -len(".nq")]
    return path.stem


@dataclass(frozen=True)
class SnapshotSeries:
    """An ordered, duplicate-free list of at least two snapshots."""

    entries: tuple[SnapshotRef, ...]

    def __post_init__(self) -> None:
        if len(self.entries) < 2:
            raise ValueError("a snapshot series needs at least 2 snapshots")
        seen = set()
        for ref in self.entries:
            if ref.snapshot_id in seen:
                raise ValueError(f"duplicate snapshot id {ref.snapshot_id!r}")
            seen.add(ref.snapshot_id)

    @classmethod
    def from_paths(cls, paths: Iterable[Union[str, Path]]) -> "SnapshotSeries":
        """Ids derive from file names; order is lexicographic by id.

        Passing the same name twice is allowed: later occurrences get an
        ordinal suffix so ids stay unique.
        """
        counts: dict[str, int] = {}
        refs = []
        for raw in paths:
            path = Path(raw)
            base = _snapshot_id_for(path)
            counts[base] = counts.get(base, 0) + 1
            sid = base if counts[base] == 1 else f"{base}.{counts[base]}"
            refs.append(SnapshotRef(sid, path))
        refs.sort(key=lambda r: r.snapshot_id)
        return cls(tuple(refs))

    @classmethod
    def from_manifest(cls, manifest_path: Union[str, Path]) -> "SnapshotSeries":
        """Read ``snapshot_id<TAB>path`` lines; the file order is authoritative."""
        manifest = Path(manifest_path)
        base_dir = manifest.parent
        refs = []
        for n, raw in enumerate(manifest.read_text(encoding="utf-8").splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0] or not parts[1]:
                raise ValueError(
                    f"{manifest}:{n}: expected 'snapshot_id<TAB>path'"
                )
            path = Path(parts[1])
            if not path.is_absolute():
                path = base_dir / path
            refs.append(SnapshotRef(parts[0], path))
        return cls(tuple(refs))


@dataclass(frozen=True)
class ObservationRow:
    gold_snapshot_id: str
    report: MeasureReport


@dataclass(frozen=True)
class ObservationTable:
    """Per-kind measure time series: one row per later snapshot."""

    index_kind: IndexKind
    rows: tuple[ObservationRow, ...]

    def series(self, measure: str) -> list[float]:
        return [row.report.values[measure] for row in self.rows]


def run_evolution(
    series: SnapshotSeries,
    kinds: Optional[Iterable[IndexKind]] = None,
    config: MeasureConfig = DEFAULT_CONFIG,
    options: Optional[BuildOptions] = None,
    parse_mode: str = "lenient",
    diagnostics: Optional[TextIO] = None,
) -> dict[IndexKind, ObservationTable]:
    """Fix an index over the first snapshot, score it against every later one."""
    wanted = tuple(IndexKind) if kinds is None else tuple(dict.fromkeys(kinds))
    base_ref = series.entries[0]
    try:
        base_data = load_snapshot(
            base_ref.path, base_ref.snapshot_id, parse_mode, diagnostics
        )
        base_indexes = build_indexes(base_data, wanted, options)
    except Exception as exc:
        raise SnapshotError(
            f"snapshot '{base_ref.snapshot_id}' ({base_ref.path}): {exc}"
        ) from exc
    rows: dict[IndexKind, list[ObservationRow]] = {kind: [] for kind in wanted}
    for ref in series.entries[1:]:
        try:
            gold_data = load_snapshot(ref.path, ref.snapshot_id, parse_mode, diagnostics)
            gold_indexes = build_indexes(gold_data, wanted, options)
            for kind in wanted:
                report = measure_all(
                    gold_data, base_data, gold_indexes[kind], base_indexes[kind], config
                )
                rows[kind].append(ObservationRow(ref.snapshot_id, report))
        except SnapshotError:
            raise
        except Exception as exc:
            raise SnapshotError(
                f"snapshot '{ref.snapshot_id}' ({ref.path}): {exc}"
            ) from exc
    return {kind: ObservationTable(kind, tuple(rows[kind])) for kind in wanted}


def average_ranks(values: Sequence[float]) -> list[float]:
    """1-based ranks; runs of equal values share the mean of their positions."""
    n = len(values)
    order = sorted(range(n), key=values.__getitem__)
    ranks = [0.0] * n
    i = 0
    while i < n:
        j = i
        v = values[order[i]]
        while j + 1 < n and values[order[j + 1]] == v:
            j += 1
        # positions i..j (0-based) hold equal values; mean 1-based rank
        rank = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = rank
        i = j + 1
    return ranks


def spearman(x: Sequence[float], y: Sequence[float]) -> Optional[float]:
    """Spearman's rho with tie handling; None when either side has no variance."""
    if len(x) != len(y):
        raise LengthMismatchError(f"series lengths differ: {len(x)} vs {len(y)}")
    if len(x) < 2:
        raise LengthMismatchError("need at least 2 paired observations")
    rx = average_ranks(x)
    ry = average_ranks(y)
    if all(r == rx[0] for r in rx) or all(r == ry[0] for r in ry):
        return None
    if rx == ry:
        return 1.0
    n = len(rx)
    mean = (n + 1) / 2  # ranks always average to this
    dx = [r - mean for r in rx]
    dy = [r - mean for r in ry]
    num = math.fsum(a * b for a, b in zip(dx, dy))
    den = math.sqrt(math.fsum(a * a for a in dx) * math.fsum(b * b for b in dy))
    return num / den


@dataclass(frozen=True)
class CorrelationMatrix:
    """Pairwise Spearman's rho between the eleven measure series."""

    index_kind: IndexKind
    measure_names: tuple[str, ...]
    rho: tuple[tuple[Optional[float], ...], ...]


def correlation_matrix(table: ObservationTable) -> CorrelationMatrix:
    if len(table.rows) < 2:
        raise TooFewRowsError(
            f"{table.index_kind.value}: need at least 2 rows, have {len(table.rows)}"
        )
    series = {name: table.series(name) for name in MEASURE_NAMES}
    n = len(MEASURE_NAMES)
    cells: list[list[Optional[float]]] = [[None] * n for _ in range(n)]
    for i, a in enumerate(MEASURE_NAMES):
        for j in range(i, n):
            value = spearman(series[a], series[MEASURE_NAMES[j]])
            cells[i][j] = value
            cells[j][i] = value
    return CorrelationMatrix(
        index_kind=table.index_kind,
        measure_names=MEASURE_NAMES,
        rho=tuple(tuple(row) for row in cells),
    )
