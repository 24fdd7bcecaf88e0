"""Accuracy measures comparing a stale index against a gold standard.

Set overlap (Jaccard on triples and on keys, key recall), distribution
divergence (Lidstone-smoothed cross-entropy, KL divergence, perplexity,
perplexity per gold key), and retrieval quality (macro and micro
precision/recall over per-key extensions). All logarithms are base 2.

Floating-point sums use ``math.fsum``, so results do not depend on set
iteration order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import AbstractSet, Mapping, Optional

from .errors import (
    EmptyGoldError,
    EmptyUniverseError,
    KindMismatchError,
    UniverseMismatchError,
    ZeroGoldKeysError,
)
from .indexes import Index, IndexKind, Key
from .nquads import Dataset

MEASURE_NAMES: tuple[str, ...] = (
    "jaccard_triples",
    "jaccard_keys",
    "key_recall",
    "cross_entropy",
    "kl_divergence",
    "perplexity",
    "normalized_perplexity",
    "macro_precision",
    "macro_recall",
    "micro_precision",
    "micro_recall",
)

# High values of a similarity measure mean the stale index still fits;
# high values of a divergence measure mean strong change.
SIMILARITY_MEASURES = frozenset(
    {
        "jaccard_triples",
        "jaccard_keys",
        "key_recall",
        "macro_precision",
        "macro_recall",
        "micro_precision",
        "micro_recall",
    }
)
DIVERGENCE_MEASURES = frozenset(MEASURE_NAMES) - SIMILARITY_MEASURES


def measure_orientation(name: str) -> str:
    if name in SIMILARITY_MEASURES:
        return "similarity"
    if name in DIVERGENCE_MEASURES:
        return "divergence"
    raise KeyError(f"unknown measure {name!r}")


@dataclass(frozen=True)
class MeasureConfig:
    """Knobs for the measure battery; the defaults match common practice."""

    lidstone_lambda: float = 0.5
    log_base: int = 2
    quad_level_jaccard: bool = False

    def __post_init__(self) -> None:
        if not self.lidstone_lambda > 0:
            raise ValueError("lidstone_lambda must be > 0")
        if self.log_base != 2:
            raise ValueError("only log base 2 is supported")


DEFAULT_CONFIG = MeasureConfig()


def _jaccard(gold: AbstractSet, other: AbstractSet) -> float:
    # Two empty sets are identical data, scored as perfect agreement.
    if not gold and not other:
        return 1.0
    return len(gold & other) / len(gold | other)


def jaccard_triples(gold_triples: AbstractSet, triples: AbstractSet) -> float:
    return _jaccard(gold_triples, triples)


def jaccard_keys(gold_keys: AbstractSet[Key], keys: AbstractSet[Key]) -> float:
    return _jaccard(gold_keys, keys)


def key_recall(gold_keys: AbstractSet[Key], keys: AbstractSet[Key]) -> float:
    if not gold_keys:
        raise EmptyGoldError("key recall needs a non-empty gold key set")
    return len(gold_keys & keys) / len(gold_keys)


@dataclass(frozen=True)
class SmoothedDistribution:
    """Lidstone-smoothed key-frequency distribution over a fixed universe."""

    universe: frozenset[Key]
    prob: Mapping[Key, float]


def smoothed_distribution(
    index: Index,
    universe: AbstractSet[Key],
    config: MeasureConfig = DEFAULT_CONFIG,
) -> SmoothedDistribution:
    """P(k) = (|ext(k)| + lambda) / sum over the universe of the same."""
    if not universe:
        raise EmptyUniverseError("cannot smooth over an empty key universe")
    if not index.key_set() <= frozenset(universe):
        raise UniverseMismatchError("index has keys outside the given universe")
    lam = config.lidstone_lambda
    counts = {k: index.extension_size(k) for k in universe}
    denom = sum(counts.values()) + lam * len(counts)
    prob = {k: (c + lam) / denom for k, c in counts.items()}
    return SmoothedDistribution(frozenset(universe), prob)


def entropy(dist: SmoothedDistribution) -> float:
    total = math.fsum(p * math.log2(p) for p in dist.prob.values())
    return -total if total != 0.0 else 0.0


def cross_entropy(gold: SmoothedDistribution, dist: SmoothedDistribution) -> float:
    if gold.universe != dist.universe:
        raise UniverseMismatchError("distributions cover different key universes")
    other = dist.prob
    total = math.fsum(p * math.log2(other[k]) for k, p in gold.prob.items())
    return -total if total != 0.0 else 0.0


def kl_divergence(gold: SmoothedDistribution, dist: SmoothedDistribution) -> float:
    return cross_entropy(gold, dist) - entropy(gold)


def perplexity(gold: SmoothedDistribution, dist: SmoothedDistribution) -> float:
    return 2.0 ** cross_entropy(gold, dist)


def normalized_perplexity(
    gold: SmoothedDistribution,
    dist: SmoothedDistribution,
    gold_key_count: int,
) -> float:
    if gold_key_count <= 0:
        raise ZeroGoldKeysError("normalized perplexity needs at least one gold key")
    return perplexity(gold, dist) / gold_key_count


def retrieval_scores(gold_index: Index, index: Index) -> dict[str, float]:
    """Macro and micro precision/recall of per-key extensions.

    Evaluated over every key with a non-empty extension on at least one
    side. A key the index does not hold scores precision 0; a key the
    gold index does not hold scores recall 0. Micro scores pool the
    intersection sizes against the pooled extension sizes.
    """
    if gold_index.kind is not index.kind:
        raise KindMismatchError(
            f"cannot compare {gold_index.kind.value} with {index.kind.value}"
        )
    universe = gold_index.key_set() | index.key_set()
    precisions: list[float] = []
    recalls: list[float] = []
    intersection_total = 0
    retrieved_total = 0
    gold_total = 0
    evaluated = 0
    for key in universe:
        got = index.select(key)
        want = gold_index.select(key)
        if not got and not want:
            continue
        evaluated += 1
        inter = len(got & want)
        precisions.append(inter / len(got) if got else 0.0)
        recalls.append(inter / len(want) if want else 0.0)
        intersection_total += inter
        retrieved_total += len(got)
        gold_total += len(want)
    if not evaluated:
        raise EmptyUniverseError("no keys with non-empty extensions to evaluate")
    return {
        "macro_precision": math.fsum(precisions) / evaluated,
        "macro_recall": math.fsum(recalls) / evaluated,
        "micro_precision": intersection_total / retrieved_total if retrieved_total else 0.0,
        "micro_recall": intersection_total / gold_total if gold_total else 0.0,
    }


@dataclass(frozen=True)
class ReportMetadata:
    gold_snapshot_id: str
    stale_snapshot_id: str
    index_kind: IndexKind
    key_count: Optional[int] = None
    gold_key_count: Optional[int] = None
    shared_key_count: Optional[int] = None

    def as_dict(self) -> dict:
        return {
            "gold_snapshot_id": self.gold_snapshot_id,
            "stale_snapshot_id": self.stale_snapshot_id,
            "index_kind": self.index_kind.value,
            "key_count": self.key_count,
            "gold_key_count": self.gold_key_count,
            "shared_key_count": self.shared_key_count,
        }


def format_measure_value(value: float) -> str:
    return f"{value:.12g}"


@dataclass(frozen=True)
class MeasureReport:
    """All eleven measure values for one gold/stale comparison."""

    values: Mapping[str, float]
    metadata: ReportMetadata

    def __post_init__(self) -> None:
        if set(self.values) != set(MEASURE_NAMES):
            missing = set(MEASURE_NAMES) - set(self.values)
            extra = set(self.values) - set(MEASURE_NAMES)
            raise ValueError(f"bad measure set: missing={missing} extra={extra}")

    def __getitem__(self, name: str) -> float:
        return self.values[name]

    def orientation(self, name: str) -> str:
        return measure_orientation(name)

    def to_json_dict(self) -> dict:
        out: dict = {name: self.values[name] for name in MEASURE_NAMES}
        out["metadata"] = self.metadata.as_dict()
        return out

    def csv_row(self) -> list[str]:
        return [format_measure_value(self.values[name]) for name in MEASURE_NAMES]


def measure_all(
    gold_data: Dataset,
    stale_data: Dataset,
    gold_index: Index,
    stale_index: Index,
    config: MeasureConfig = DEFAULT_CONFIG,
) -> MeasureReport:
    """Compute the full battery for one stale index against one gold index."""
    if gold_index.kind is not stale_index.kind:
        raise KindMismatchError(
            f"cannot compare {gold_index.kind.value} with {stale_index.kind.value}"
        )
    gold_keys = gold_index.key_set()
    stale_keys = stale_index.key_set()
    if config.quad_level_jaccard:
        jt = _jaccard(gold_data.quads, stale_data.quads)
    else:
        jt = jaccard_triples(gold_data.triples, stale_data.triples)
    jk = jaccard_keys(gold_keys, stale_keys)
    kr = key_recall(gold_keys, stale_keys)
    universe = gold_keys | stale_keys
    gold_dist = smoothed_distribution(gold_index, universe, config)
    stale_dist = smoothed_distribution(stale_index, universe, config)
    ce = cross_entropy(gold_dist, stale_dist)
    kl = ce - entropy(gold_dist)
    pp = 2.0**ce
    retrieval = retrieval_scores(gold_index, stale_index)
    values = {
        "jaccard_triples": jt,
        "jaccard_keys": jk,
        "key_recall": kr,
        "cross_entropy": ce,
        "kl_divergence": kl,
        "perplexity": pp,
        "normalized_perplexity": pp / len(gold_keys),
        **retrieval,
    }
    metadata = ReportMetadata(
        gold_snapshot_id=gold_data.snapshot_id,
        stale_snapshot_id=stale_data.snapshot_id,
        index_kind=gold_index.kind,
        key_count=len(stale_keys),
        gold_key_count=len(gold_keys),
        shared_key_count=len(gold_keys & stale_keys),
    )
    return MeasureReport(values=values, metadata=metadata)
