"""Index models and accuracy measures for evolving N-Quads snapshots."""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import (
    EmptyDatasetError,
    EmptyGoldError,
    EmptySnapshotError,
    EmptyUniverseError,
    KindMismatchError,
    LengthMismatchError,
    LodexError,
    SnapshotError,
    SnapshotParseError,
    TooFewRowsError,
    UniverseMismatchError,
    ZeroGoldKeysError,
)
from .terms import (
    RDF_TYPE,
    RDFS_CLASS,
    Quad,
    RdfTerm,
    TermKind,
    Triple,
    format_quad,
    format_term,
    term_sort_key,
)
from .nquads import (
    DEFAULT_GRAPH_IRI,
    Dataset,
    ParseError,
    load_snapshot,
    parse_nquads,
    triple_projection,
)
from .indexes import (
    BuildOptions,
    DataItem,
    Index,
    IndexKind,
    Key,
    SchemexKey,
    TermKey,
    TermSetKey,
    build_index,
    build_indexes,
    canonical_item_string,
    canonical_key_string,
    entity_property_set,
    entity_type_set,
    schemex_key,
    term_set_key,
)
from .measures import (
    DIVERGENCE_MEASURES,
    MEASURE_NAMES,
    SIMILARITY_MEASURES,
    MeasureConfig,
    MeasureReport,
    ReportMetadata,
    SmoothedDistribution,
    cross_entropy,
    entropy,
    format_measure_value,
    jaccard_keys,
    jaccard_triples,
    key_recall,
    kl_divergence,
    measure_all,
    measure_orientation,
    normalized_perplexity,
    perplexity,
    retrieval_scores,
    smoothed_distribution,
)
from .evolution import (
    CorrelationMatrix,
    ObservationRow,
    ObservationTable,
    SnapshotRef,
    SnapshotSeries,
    average_ranks,
    correlation_matrix,
    run_evolution,
    spearman,
)
from .reports import emit_reports, read_observation_table, write_measure_report

__all__ = [name for name in dir() if not name.startswith("_")]
