"""Command-line interface.

Commands: ``build`` (materialize indices over one snapshot), ``compare``
(score a stale snapshot against a gold one), ``evolve`` (run a snapshot
series), ``correlate`` (recompute rank-correlation matrices from
previously written observation CSVs).

Exit codes: 0 on success, 1 on data or processing errors, 2 on usage
errors. ``LODEX_OUT`` supplies the output directory when ``--out`` is
absent.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .errors import LodexError
from .evolution import SnapshotSeries, correlation_matrix, run_evolution
from .indexes import (
    BuildOptions,
    IndexKind,
    build_indexes,
    canonical_key_string,
)
from .measures import MeasureConfig, measure_all
from .nquads import load_snapshot
from .reports import emit_reports, read_observation_table, write_measure_report

COMMANDS = ("build", "compare", "evolve", "correlate")
DEFAULT_OUT = "lodex-out"

_ALL_KINDS = tuple(IndexKind)
_ALL_FORMATS = ("csv", "json")


@dataclass(frozen=True)
class CliConfig:
    command: str
    inputs: tuple[Path, ...]
    kinds: tuple[IndexKind, ...]
    lidstone_lambda: float
    schemex_strict: bool
    exclude_rdf_type_from_ps: bool
    quad_level_jaccard: bool
    strict_parse: bool
    out_dir: Path
    formats: tuple[str, ...]
    manifest: Optional[Path] = None
    dump: bool = False
    figures: bool = True


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--kind",
        action="append",
        dest="kinds",
        choices=[k.value for k in IndexKind],
        help="index kind to process (repeatable; default: all six)",
    )
    parser.add_argument(
        "--lambda",
        dest="lidstone_lambda",
        type=float,
        default=0.5,
        metavar="L",
        help="Lidstone smoothing constant (default 0.5)",
    )
    parser.add_argument("--schemex-strict", action="store_true",
                        help="universal-quantifier schemex construction")
    parser.add_argument("--exclude-rdf-type-from-ps", action="store_true",
                        help="drop rdf:type from property sets")
    parser.add_argument("--quad-level-jaccard", action="store_true",
                        help="Jaccard over quads instead of triple projections")
    parser.add_argument("--strict-parse", action="store_true",
                        help="abort on the first malformed line")
    parser.add_argument("--out", dest="out_dir", type=Path, default=None,
                        metavar="DIR", help="output directory (or $LODEX_OUT)")
    parser.add_argument(
        "--format",
        action="append",
        dest="formats",
        choices=list(_ALL_FORMATS),
        help="report file format (repeatable; default: both)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lodex",
        description="Index models and accuracy measures over N-Quads snapshots.",
    )
    parser.add_argument("--version", action="version", version=f"lodex {__version__}")
    sub = parser.add_subparsers(dest="command", required=True,
                                metavar="{build,compare,evolve,correlate}")

    p_build = sub.add_parser("build", help="materialize indices over one snapshot")
    p_build.add_argument("inputs", nargs=1, type=Path, metavar="SNAPSHOT")
    p_build.add_argument("--dump", action="store_true",
                         help="write canonical index dumps to the output directory")
    _add_common(p_build)

    p_compare = sub.add_parser("compare", help="score a stale snapshot against a gold one")
    # single-string metavar: tuple metavars crash 3.10 argparse when the
    # positional is missing entirely
    p_compare.add_argument("inputs", nargs=2, type=Path, metavar="GOLD_THEN_STALE")
    _add_common(p_compare)

    p_evolve = sub.add_parser("evolve", help="run a snapshot series")
    p_evolve.add_argument("inputs", nargs="*", type=Path, metavar="SNAPSHOT")
    p_evolve.add_argument("--manifest", type=Path, default=None,
                          help="snapshot_id<TAB>path file; its order is authoritative")
    p_evolve.add_argument("--no-figures", action="store_true",
                          help="skip PNG rendering")
    _add_common(p_evolve)

    p_corr = sub.add_parser("correlate",
                            help="recompute matrices from observation CSVs")
    p_corr.add_argument("inputs", nargs="+", type=Path, metavar="OBSERVATIONS_CSV")
    p_corr.add_argument("--no-figures", action="store_true",
                        help="skip PNG rendering")
    _add_common(p_corr)
    return parser


def parse_args(argv: Sequence[str]) -> CliConfig:
    parser = build_parser()
    ns = parser.parse_args(argv)
    if ns.lidstone_lambda <= 0:
        parser.error("--lambda must be > 0")
    if ns.command == "evolve":
        if ns.manifest is not None and ns.inputs:
            parser.error("pass snapshot paths or --manifest, not both")
        if ns.manifest is None and len(ns.inputs) < 2:
            parser.error("evolve needs at least 2 snapshots or --manifest")
    if ns.kinds:
        requested = {IndexKind(k) for k in ns.kinds}
        kinds = tuple(k for k in _ALL_KINDS if k in requested)
    else:
        kinds = _ALL_KINDS
    if ns.formats:
        requested_formats = set(ns.formats)
        formats = tuple(f for f in _ALL_FORMATS if f in requested_formats)
    else:
        formats = _ALL_FORMATS
    out_dir = ns.out_dir
    if out_dir is None:
        out_dir = Path(os.environ.get("LODEX_OUT") or DEFAULT_OUT)
    return CliConfig(
        command=ns.command,
        inputs=tuple(ns.inputs),
        kinds=kinds,
        lidstone_lambda=ns.lidstone_lambda,
        schemex_strict=ns.schemex_strict,
        exclude_rdf_type_from_ps=ns.exclude_rdf_type_from_ps,
        quad_level_jaccard=ns.quad_level_jaccard,
        strict_parse=ns.strict_parse,
        out_dir=out_dir,
        formats=formats,
        manifest=getattr(ns, "manifest", None),
        dump=getattr(ns, "dump", False),
        figures=not getattr(ns, "no_figures", False),
    )


def render_args(config: CliConfig) -> list[str]:
    """Canonical argv for a config; ``parse_args`` round-trips it."""
    args: list[str] = [config.command, *(str(p) for p in config.inputs)]
    if config.command == "evolve" and config.manifest is not None:
        args += ["--manifest", str(config.manifest)]
    if config.command == "build" and config.dump:
        args.append("--dump")
    if config.command in ("evolve", "correlate") and not config.figures:
        args.append("--no-figures")
    for kind in config.kinds:
        args += ["--kind", kind.value]
    args += ["--lambda", repr(config.lidstone_lambda)]
    if config.schemex_strict:
        args.append("--schemex-strict")
    if config.exclude_rdf_type_from_ps:
        args.append("--exclude-rdf-type-from-ps")
    if config.quad_level_jaccard:
        args.append("--quad-level-jaccard")
    if config.strict_parse:
        args.append("--strict-parse")
    args += ["--out", str(config.out_dir)]
    for fmt in config.formats:
        args += ["--format", fmt]
    return args


def _parse_mode(config: CliConfig) -> str:
    return "strict" if config.strict_parse else "lenient"


def _build_options(config: CliConfig) -> BuildOptions:
    return BuildOptions(
        exclude_rdf_type_from_ps=config.exclude_rdf_type_from_ps,
        schemex_strict=config.schemex_strict,
    )


def _measure_config(config: CliConfig) -> MeasureConfig:
    return MeasureConfig(
        lidstone_lambda=config.lidstone_lambda,
        quad_level_jaccard=config.quad_level_jaccard,
    )


def _snapshot_id(path: Path) -> str:
    name = path.name
    for suffix in (".nq.gz", ".nq"):
        if name.endswith(suffix):
            return name[: -len(suffix)]
    return name


def _run_build(config: CliConfig) -> int:
    path = config.inputs[0]
    data = load_snapshot(path, _snapshot_id(path), _parse_mode(config), sys.stderr)
    indexes = build_indexes(data, config.kinds, _build_options(config))
    summary = {}
    for kind in config.kinds:
        index = indexes[kind]
        all_items = set().union(*index.entries.values()) if index.entries else set()
        summary[kind.value] = {
            "snapshot_id": data.snapshot_id,
            "quad_count": data.quad_count,
            "triple_count": data.triple_count,
            "key_count": len(index.entries),
            "item_count": len(all_items),
            "payload_size": sum(len(v) for v in index.entries.values()),
        }
    print(json.dumps(summary, indent=2))
    if config.dump:
        out = config.out_dir
        out.mkdir(parents=True, exist_ok=True)
        for kind in config.kinds:
            dump_path = out / f"index_{kind.value}.dump"
            text = "\n".join(indexes[kind].dump_lines())
            dump_path.write_text(text + "\n" if text else "", encoding="utf-8")
    return 0


def _run_compare(config: CliConfig) -> int:
    gold_path, stale_path = config.inputs
    mode = _parse_mode(config)
    gold = load_snapshot(gold_path, _snapshot_id(gold_path), mode, sys.stderr)
    stale = load_snapshot(stale_path, _snapshot_id(stale_path), mode, sys.stderr)
    opts = _build_options(config)
    gold_indexes = build_indexes(gold, config.kinds, opts)
    stale_indexes = build_indexes(stale, config.kinds, opts)
    mcfg = _measure_config(config)
    payload = {}
    for kind in config.kinds:
        report = measure_all(gold, stale, gold_indexes[kind], stale_indexes[kind], mcfg)
        payload[kind.value] = report.to_json_dict()
        write_measure_report(report, config.out_dir, config.formats)
    print(json.dumps(payload, indent=2))
    return 0


def _run_evolve(config: CliConfig) -> int:
    if config.manifest is not None:
        series = SnapshotSeries.from_manifest(config.manifest)
    else:
        series = SnapshotSeries.from_paths(config.inputs)
    tables = run_evolution(
        series,
        config.kinds,
        _measure_config(config),
        _build_options(config),
        _parse_mode(config),
        sys.stderr,
    )
    row_count = len(series.entries) - 1
    if row_count >= 2:
        matrices = [correlation_matrix(t) for t in tables.values()]
    else:
        matrices = []
        print(
            "lodex: note: single observation row, correlation matrices skipped",
            file=sys.stderr,
        )
    emit_reports(tables.values(), matrices, config.out_dir,
                 config.formats, config.figures)
    return 0


def _run_correlate(config: CliConfig) -> int:
    matrices = []
    for path in config.inputs:
        table = read_observation_table(path)
        matrices.append(correlation_matrix(table))
    emit_reports((), matrices, config.out_dir, config.formats, config.figures)
    return 0


_RUNNERS = {
    "build": _run_build,
    "compare": _run_compare,
    "evolve": _run_evolve,
    "correlate": _run_correlate,
}


def run(config: CliConfig) -> int:
    try:
        return _RUNNERS[config.command](config)
    except (LodexError, OSError, ValueError) as exc:
        print(f"lodex: error: {exc}", file=sys.stderr)
        return 1


def main(argv: Optional[Sequence[str]] = None) -> int:
    config = parse_args(sys.argv[1:] if argv is None else list(argv))
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
