"""Shared fixtures: two tiny snapshots differing in one rdf:type statement."""

from __future__ import annotations

import pytest

from lodex import (
    MEASURE_NAMES,
    Dataset,
    IndexKind,
    MeasureReport,
    ObservationRow,
    ObservationTable,
    Quad,
    RdfTerm,
    ReportMetadata,
    format_quad,
)

EX = "http://ex/"


def iri(name: str) -> RdfTerm:
    return RdfTerm.iri(EX + name)


def lit(text: str, datatype: str | None = None, lang: str | None = None) -> RdfTerm:
    return RdfTerm.literal(text, datatype, lang)


def bnode(label: str) -> RdfTerm:
    return RdfTerm.bnode(label)


RDF_TYPE = RdfTerm.iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#type")

E1, E2 = iri("e1"), iri("e2")
PERSON, AUTHOR = iri("Person"), iri("Author")
NAME = iri("name")
C1, C2 = iri("c1"), iri("c2")

FIXTURE_A_QUADS = frozenset(
    {
        Quad(E1, RDF_TYPE, PERSON, C1),
        Quad(E1, NAME, lit("Ann"), C1),
        Quad(E2, RDF_TYPE, PERSON, C2),
        Quad(E2, RDF_TYPE, AUTHOR, C2),
        Quad(E2, NAME, lit("Bob"), C2),
    }
)
FIXTURE_B_QUADS = FIXTURE_A_QUADS - {Quad(E2, RDF_TYPE, AUTHOR, C2)}


@pytest.fixture
def fixture_a() -> Dataset:
    return Dataset("A", FIXTURE_A_QUADS)


@pytest.fixture
def fixture_b() -> Dataset:
    return Dataset("B", FIXTURE_B_QUADS)


def write_nq(path, dataset: Dataset) -> None:
    lines = sorted(format_quad(q) for q in dataset.quads)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


@pytest.fixture
def fixture_files(tmp_path, fixture_a, fixture_b):
    a_path = tmp_path / "A.nq"
    b_path = tmp_path / "B.nq"
    write_nq(a_path, fixture_a)
    write_nq(b_path, fixture_b)
    return a_path, b_path


def measure_columns(n_rows: int, **overrides: list[float]) -> dict[str, list[float]]:
    """Strictly increasing default series per measure, selectively overridden."""
    columns = {
        name: [float((m + 2) * (i + 1)) for i in range(n_rows)]
        for m, name in enumerate(MEASURE_NAMES)
    }
    for name, values in overrides.items():
        columns[name] = [float(v) for v in values]
    return columns


def make_observation_table(
    kind: IndexKind, columns: dict[str, list[float]]
) -> ObservationTable:
    """Assemble an ObservationTable directly from per-measure value columns."""
    n_rows = len(columns[MEASURE_NAMES[0]])
    rows = []
    for i in range(n_rows):
        values = {name: float(columns[name][i]) for name in MEASURE_NAMES}
        metadata = ReportMetadata(
            gold_snapshot_id=f"t{i + 1}",
            stale_snapshot_id="t0",
            index_kind=kind,
        )
        rows.append(ObservationRow(f"t{i + 1}", MeasureReport(values, metadata)))
    return ObservationTable(kind, tuple(rows))
