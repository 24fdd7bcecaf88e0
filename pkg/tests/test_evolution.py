"""Snapshot series handling, the evolution harness, and rank correlation."""

from __future__ import annotations

import io
import math
import random
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lodex import (
    MEASURE_NAMES,
    Dataset,
    IndexKind,
    LengthMismatchError,
    ObservationRow,
    ObservationTable,
    Quad,
    SnapshotError,
    SnapshotRef,
    SnapshotSeries,
    TooFewRowsError,
    average_ranks,
    build_index,
    correlation_matrix,
    measure_all,
    run_evolution,
    spearman,
)

from conftest import (
    FIXTURE_A_QUADS,
    FIXTURE_B_QUADS,
    iri,
    make_observation_table,
    measure_columns,
    write_nq,
)
from datagen import mutate_dataset, random_dataset


class TestAverageRanks:
    def test_strictly_increasing(self):
        assert average_ranks([10.0, 20.0, 30.0]) == [1.0, 2.0, 3.0]

    def test_tie_shares_mean_rank(self):
        assert average_ranks([10.0, 10.0, 30.0]) == [1.5, 1.5, 3.0]

    def test_all_tied(self):
        assert average_ranks([5.0, 5.0, 5.0]) == [2.0, 2.0, 2.0]

    def test_ranks_follow_input_positions(self):
        assert average_ranks([0.3, 0.1, 0.4]) == [2.0, 1.0, 3.0]

    @given(st.lists(st.integers(-50, 50).map(float), min_size=1, max_size=40))
    def test_rank_sum_and_bounds(self, values):
        ranks = average_ranks(values)
        n = len(values)
        assert math.fsum(ranks) == n * (n + 1) / 2
        assert all(1.0 <= r <= n for r in ranks)

    @given(st.lists(st.integers(-20, 20).map(float), min_size=2, max_size=25))
    def test_ranks_respect_value_order(self, values):
        ranks = average_ranks(values)
        for i, vi in enumerate(values):
            for j, vj in enumerate(values):
                if vi < vj:
                    assert ranks[i] < ranks[j]
                elif vi == vj:
                    assert ranks[i] == ranks[j]


class TestSpearman:
    def test_monotone_transform_is_perfect(self):
        x = [0.5, 1.0, 2.0, 1.5]
        assert spearman(x, [2.0**v for v in x]) == 1.0

    def test_reversal(self):
        x = [4.0, 1.0, 3.0, 2.0]
        assert spearman(x, [-v for v in x]) == -1.0

    def test_hand_ranked_pair(self):
        assert spearman([0.3, 0.1, 0.4], [3.0, 1.0, 4.0]) == 1.0

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatchError):
            spearman([1.0, 2.0], [1.0, 2.0, 3.0])

    def test_single_pair_rejected(self):
        with pytest.raises(LengthMismatchError):
            spearman([1.0], [2.0])

    def test_constant_series_undefined(self):
        assert spearman([1.0, 1.0, 1.0], [1.0, 2.0, 3.0]) is None
        assert spearman([1.0, 2.0, 3.0], [7.0, 7.0, 7.0]) is None

    def test_defined_results_bounded(self):
        rng = random.Random(11)
        for _ in range(50):
            n = rng.randint(2, 20)
            x = [float(rng.randint(0, 6)) for _ in range(n)]
            y = [float(rng.randint(0, 6)) for _ in range(n)]
            rho = spearman(x, y)
            if rho is not None:
                assert -1.0 <= rho <= 1.0

    def test_shortcut_formula_on_tie_free_data(self):
        # 1 - 6*sum(d^2)/(n*(n^2-1)) is valid only without ties; there the
        # rank-Pearson form must agree with it to high precision.
        rng = random.Random(7)
        for _ in range(40):
            n = rng.randint(2, 25)
            x = [float(v) for v in rng.sample(range(1000), n)]
            y = [float(v) for v in rng.sample(range(1000), n)]
            rho = spearman(x, y)
            d2 = math.fsum(
                (a - b) ** 2 for a, b in zip(average_ranks(x), average_ranks(y))
            )
            shortcut = 1.0 - 6.0 * d2 / (n * (n * n - 1))
            assert rho is not None
            assert abs(rho - shortcut) <= 1e-12

    def test_agrees_with_scipy_on_tied_data(self):
        import warnings

        from scipy.stats import spearmanr

        rng = random.Random(3)
        for _ in range(60):
            n = rng.randint(3, 15)
            x = [float(rng.randint(0, 4)) for _ in range(n)]
            y = [float(rng.randint(0, 4)) for _ in range(n)]
            got = spearman(x, y)
            with warnings.catch_warnings():
                # scipy warns about constant inputs; we assert NaN for those
                warnings.simplefilter("ignore")
                want = spearmanr(x, y).statistic
            if got is None:
                assert math.isnan(want)
            else:
                assert got == pytest.approx(float(want), abs=1e-12)

    @given(
        st.lists(st.integers(-300, 300).map(float), min_size=2, max_size=25),
        st.lists(st.integers(-300, 300).map(float), min_size=2, max_size=25),
    )
    def test_increasing_transform_preserves_rho(self, xs, ys):
        n = min(len(xs), len(ys))
        x, y = xs[:n], ys[:n]
        fx = [3.0 * v + 7.0 for v in x]  # exact and strictly increasing here
        assert average_ranks(fx) == average_ranks(x)
        assert spearman(fx, y) == spearman(x, y)


class TestSnapshotSeries:
    def test_needs_two_snapshots(self, tmp_path):
        with pytest.raises(ValueError, match="at least 2"):
            SnapshotSeries((SnapshotRef("a", tmp_path / "a.nq"),))

    def test_duplicate_ids_rejected(self, tmp_path):
        refs = (
            SnapshotRef("a", tmp_path / "a.nq"),
            SnapshotRef("a", tmp_path / "b.nq"),
        )
        with pytest.raises(ValueError, match="duplicate snapshot id"):
            SnapshotSeries(refs)

    def test_from_paths_strips_suffixes_and_sorts(self, tmp_path):
        series = SnapshotSeries.from_paths(
            [tmp_path / "c.nq", tmp_path / "a.nq.gz", str(tmp_path / "b.nq")]
        )
        assert [r.snapshot_id for r in series.entries] == ["a", "b", "c"]

    def test_from_paths_disambiguates_repeated_names(self, tmp_path):
        series = SnapshotSeries.from_paths(
            [tmp_path / d / "snap.nq" for d in ("x", "y", "z")]
        )
        assert [r.snapshot_id for r in series.entries] == [
            "snap",
            "snap.2",
            "snap.3",
        ]
        assert series.entries[1].path == tmp_path / "y" / "snap.nq"

    def test_from_manifest_order_and_relative_paths(self, tmp_path):
        manifest = tmp_path / "series.tsv"
        manifest.write_text(
            "# temporal order, oldest first\n"
            "t9\tdata/t9.nq\n"
            "\n"
            "t1\t/elsewhere/t1.nq\n",
            encoding="utf-8",
        )
        series = SnapshotSeries.from_manifest(manifest)
        # file order is authoritative, not id order
        assert [r.snapshot_id for r in series.entries] == ["t9", "t1"]
        assert series.entries[0].path == tmp_path / "data" / "t9.nq"
        assert series.entries[1].path == Path("/elsewhere/t1.nq")

    def test_from_manifest_malformed_line(self, tmp_path):
        manifest = tmp_path / "bad.tsv"
        manifest.write_text("a\tx.nq\nno tab here\n", encoding="utf-8")
        with pytest.raises(ValueError, match=r"bad\.tsv:2: expected"):
            SnapshotSeries.from_manifest(manifest)

    def test_from_manifest_empty_field_rejected(self, tmp_path):
        manifest = tmp_path / "bad.tsv"
        manifest.write_text("a\t\nb\ty.nq\n", encoding="utf-8")
        with pytest.raises(ValueError, match=r":1:"):
            SnapshotSeries.from_manifest(manifest)

    def test_from_manifest_too_short(self, tmp_path):
        manifest = tmp_path / "short.tsv"
        manifest.write_text("only\tone.nq\n", encoding="utf-8")
        with pytest.raises(ValueError, match="at least 2"):
            SnapshotSeries.from_manifest(manifest)


def _singleton_quads(subject_names: list[str]) -> list[Quad]:
    """One quad per subject, so every subject-index key has extension size 1."""
    pred, ctx = iri("p"), iri("g")
    return [Quad(iri(s), pred, iri("o-" + s), ctx) for s in subject_names]


def _write_series(tmp_path, named_quads) -> SnapshotSeries:
    paths = []
    for name, quads in named_quads:
        path = tmp_path / f"{name}.nq"
        write_nq(path, Dataset(name, frozenset(quads)))
        paths.append(path)
    return SnapshotSeries.from_paths(paths)


class TestRunEvolution:
    def test_three_snapshots_two_rows(self, tmp_path):
        base = _singleton_quads([f"s{i}" for i in range(4)])
        series = _write_series(
            tmp_path, [("t0", base), ("t1", base[:3]), ("t2", base[:2])]
        )
        tables = run_evolution(series, kinds=[IndexKind.SUBJECT])
        table = tables[IndexKind.SUBJECT]
        assert table.index_kind is IndexKind.SUBJECT
        assert [row.gold_snapshot_id for row in table.rows] == ["t1", "t2"]
        for row in table.rows:
            assert set(row.report.values) == set(MEASURE_NAMES)
        assert table.series("jaccard_keys") == [
            row.report.values["jaccard_keys"] for row in table.rows
        ]

    def test_identical_snapshot_yields_identity_row(self, tmp_path, fixture_a):
        series = _write_series(
            tmp_path, [("t0", FIXTURE_A_QUADS), ("t1", FIXTURE_A_QUADS)]
        )
        tables = run_evolution(series)
        assert set(tables) == set(IndexKind)
        for table in tables.values():
            values = table.rows[0].report.values
            for name in (
                "jaccard_triples",
                "jaccard_keys",
                "key_recall",
                "macro_precision",
                "macro_recall",
                "micro_precision",
                "micro_recall",
            ):
                assert values[name] == 1.0
            assert abs(values["kl_divergence"]) <= 1e-12

    def test_fixture_pair_reproduces_measure_battery(self, tmp_path):
        # The index is fixed over the smaller snapshot; the later, larger
        # snapshot provides the gold standard.
        series = _write_series(
            tmp_path, [("t0", FIXTURE_B_QUADS), ("t1", FIXTURE_A_QUADS)]
        )
        table = run_evolution(series, kinds=[IndexKind.TYPE])[IndexKind.TYPE]
        assert len(table.rows) == 1
        row = table.rows[0]
        assert row.gold_snapshot_id == "t1"
        values = row.report.values
        assert values["jaccard_triples"] == pytest.approx(0.8)
        assert values["jaccard_keys"] == pytest.approx(0.5)
        assert values["key_recall"] == pytest.approx(0.5)
        assert values["cross_entropy"] == pytest.approx(1.1338, abs=1e-3)
        assert values["kl_divergence"] == pytest.approx(0.1793, abs=1e-3)
        assert values["perplexity"] == pytest.approx(2.194, abs=1e-3)
        assert values["normalized_perplexity"] == pytest.approx(1.097, abs=1e-3)
        assert values["macro_precision"] == 0.5
        assert values["macro_recall"] == 0.5
        assert values["micro_precision"] == 1.0
        assert values["micro_recall"] == pytest.approx(2 / 3)

    def test_row_matches_direct_measure_all(self, tmp_path):
        series = _write_series(
            tmp_path, [("s0", FIXTURE_A_QUADS), ("s1", FIXTURE_B_QUADS)]
        )
        kind = IndexKind.PROPERTY_SET
        table = run_evolution(series, kinds=[kind])[kind]
        gold = Dataset("s1", FIXTURE_B_QUADS)
        stale = Dataset("s0", FIXTURE_A_QUADS)
        want = measure_all(
            gold, stale, build_index(gold, kind), build_index(stale, kind)
        )
        assert table.rows[0].report.values == want.values

    def test_requested_kinds_deduplicated(self, tmp_path):
        series = _write_series(
            tmp_path, [("t0", FIXTURE_A_QUADS), ("t1", FIXTURE_B_QUADS)]
        )
        tables = run_evolution(
            series, kinds=[IndexKind.TYPE, IndexKind.SUBJECT, IndexKind.TYPE]
        )
        assert set(tables) == {IndexKind.TYPE, IndexKind.SUBJECT}

    def test_missing_later_snapshot_attributed(self, tmp_path, fixture_a):
        good = tmp_path / "a0.nq"
        write_nq(good, fixture_a)
        series = SnapshotSeries.from_paths([good, tmp_path / "a1.nq"])
        with pytest.raises(SnapshotError, match=r"snapshot 'a1'.*does not exist"):
            run_evolution(series, kinds=[IndexKind.SUBJECT])

    def test_missing_base_snapshot_attributed(self, tmp_path, fixture_a):
        good = tmp_path / "b1.nq"
        write_nq(good, fixture_a)
        series = SnapshotSeries.from_paths([tmp_path / "b0.nq", good])
        with pytest.raises(SnapshotError, match=r"snapshot 'b0'"):
            run_evolution(series, kinds=[IndexKind.SUBJECT])

    def test_empty_snapshot_attributed(self, tmp_path, fixture_a):
        good = tmp_path / "c0.nq"
        write_nq(good, fixture_a)
        empty = tmp_path / "c1.nq"
        empty.write_text("# nothing here\n", encoding="utf-8")
        series = SnapshotSeries.from_paths([good, empty])
        with pytest.raises(SnapshotError, match=r"snapshot 'c1'.*no quads"):
            run_evolution(series, kinds=[IndexKind.SUBJECT])

    def test_strict_mode_aborts_on_bad_line(self, tmp_path, fixture_a):
        good = tmp_path / "d0.nq"
        write_nq(good, fixture_a)
        dirty = tmp_path / "d1.nq"
        dirty.write_text(
            '<http://ex/s> <http://ex/p> "ok" <http://ex/g> .\n'
            "this is not a quad\n",
            encoding="utf-8",
        )
        series = SnapshotSeries.from_paths([good, dirty])
        with pytest.raises(SnapshotError, match=r"snapshot 'd1'.*:2:"):
            run_evolution(series, kinds=[IndexKind.SUBJECT], parse_mode="strict")

    def test_lenient_mode_reports_and_continues(self, tmp_path, fixture_a):
        good = tmp_path / "e0.nq"
        write_nq(good, fixture_a)
        dirty = tmp_path / "e1.nq"
        dirty.write_text(
            '<http://ex/s> <http://ex/p> "ok" <http://ex/g> .\n'
            "this is not a quad\n",
            encoding="utf-8",
        )
        series = SnapshotSeries.from_paths([good, dirty])
        sink = io.StringIO()
        tables = run_evolution(
            series, kinds=[IndexKind.SUBJECT], diagnostics=sink
        )
        assert len(tables[IndexKind.SUBJECT].rows) == 1
        assert "ERR 2 " in sink.getvalue()


class TestCorrelationMatrix:
    def test_needs_two_rows(self, fixture_a, fixture_b):
        report = measure_all(
            fixture_a,
            fixture_b,
            build_index(fixture_a, IndexKind.TYPE),
            build_index(fixture_b, IndexKind.TYPE),
        )
        table = ObservationTable(IndexKind.TYPE, (ObservationRow("A", report),))
        with pytest.raises(TooFewRowsError, match="type"):
            correlation_matrix(table)

    def test_all_increasing_series_fully_correlated(self):
        matrix = correlation_matrix(make_observation_table(IndexKind.SUBJECT, measure_columns(5)))
        assert matrix.index_kind is IndexKind.SUBJECT
        assert matrix.measure_names == MEASURE_NAMES
        for row in matrix.rho:
            assert all(v == 1.0 for v in row)

    def test_constant_series_row_and_column_undefined(self):
        columns = measure_columns(4, jaccard_keys=[0.5, 0.5, 0.5, 0.5])
        matrix = correlation_matrix(make_observation_table(IndexKind.TYPE, columns))
        jk = MEASURE_NAMES.index("jaccard_keys")
        for i in range(len(MEASURE_NAMES)):
            assert matrix.rho[jk][i] is None
            assert matrix.rho[i][jk] is None
        ce = MEASURE_NAMES.index("cross_entropy")
        assert matrix.rho[ce][ce] == 1.0

    def test_opposed_series(self):
        columns = measure_columns(4, kl_divergence=[9.0, 7.0, 5.0, 3.0])
        matrix = correlation_matrix(make_observation_table(IndexKind.ECS, columns))
        kl = MEASURE_NAMES.index("kl_divergence")
        pp = MEASURE_NAMES.index("perplexity")
        assert matrix.rho[kl][pp] == -1.0
        assert matrix.rho[pp][kl] == -1.0


@pytest.fixture(scope="module")
def drift_tables(tmp_path_factory):
    rng = random.Random(923)
    out = tmp_path_factory.mktemp("drift")
    data = random_dataset(rng, "g0", max_quads=120, max_subjects=20)
    paths = []
    for i in range(7):
        path = out / f"g{i}.nq"
        write_nq(path, Dataset(f"g{i}", data.quads))
        paths.append(path)
        data = mutate_dataset(rng, data, f"g{i + 1}")
    series = SnapshotSeries.from_paths(paths)
    return run_evolution(series, kinds=[IndexKind.SUBJECT, IndexKind.PROPERTY_SET])


class TestMatrixOnGeneratedSeries:
    def test_matrix_invariants(self, drift_tables):
        n = len(MEASURE_NAMES)
        for table in drift_tables.values():
            matrix = correlation_matrix(table)
            for i in range(n):
                diag = matrix.rho[i][i]
                assert diag == 1.0 or diag is None
                for j in range(n):
                    assert matrix.rho[i][j] == matrix.rho[j][i]
                    if matrix.rho[i][j] is not None:
                        assert -1.0 <= matrix.rho[i][j] <= 1.0

    def test_cross_entropy_perplexity_locked(self, drift_tables):
        # 2^x is strictly increasing, so both series always share ranks.
        checked = 0
        ce = MEASURE_NAMES.index("cross_entropy")
        pp = MEASURE_NAMES.index("perplexity")
        for table in drift_tables.values():
            if len(set(table.series("cross_entropy"))) > 1:
                matrix = correlation_matrix(table)
                assert matrix.rho[ce][pp] == 1.0
                checked += 1
        assert checked  # drift must actually move the distributions


@pytest.fixture(scope="module")
def singleton_table(tmp_path_factory):
    out = tmp_path_factory.mktemp("singleton")
    base_names = [f"s{i:02d}" for i in range(50)]
    named = [("t0", _singleton_quads(base_names))]
    for t in range(1, 7):
        fresh = [f"new-t{t}-{j:02d}" for j in range(2 * t)]
        named.append((f"t{t}", _singleton_quads(base_names[t:] + fresh)))
    paths = []
    for name, quads in named:
        path = out / f"{name}.nq"
        write_nq(path, Dataset(name, frozenset(quads)))
        paths.append(path)
    series = SnapshotSeries.from_paths(paths)
    return run_evolution(series, kinds=[IndexKind.SUBJECT])[IndexKind.SUBJECT]


class TestSingleEntryRegime:
    """Subject-like regime: every index key has extension size exactly 1.

    Snapshot t drops t of the original subjects and introduces 2t fresh
    ones, so key overlap and retrieval scores fall together while the
    distribution divergence grows.
    """

    def test_key_overlap_shrinks(self, singleton_table):
        jk = singleton_table.series("jaccard_keys")
        assert all(a > b for a, b in zip(jk, jk[1:]))

    def test_key_vs_retrieval_measures_positive(self, singleton_table):
        for key_measure in ("jaccard_keys", "key_recall"):
            for retrieval_measure in (
                "macro_precision",
                "macro_recall",
                "micro_precision",
                "micro_recall",
            ):
                rho = spearman(
                    singleton_table.series(key_measure),
                    singleton_table.series(retrieval_measure),
                )
                assert rho is not None
                assert rho > 0.0

    def test_divergence_vs_recall_negative(self, singleton_table):
        rho = spearman(
            singleton_table.series("kl_divergence"),
            singleton_table.series("micro_recall"),
        )
        assert rho is not None
        assert rho < 0.0
