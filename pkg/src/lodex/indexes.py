"""The six index models: keys, data items, and exact materialization.

Every index maps a key to the set of data items matching it exactly:

- ``subject``: subject term -> triples with that subject
- ``type``: class term -> entities declared as instances of it
- ``typeset``: exact set of an entity's classes -> those entities
- ``propertyset``: exact set of an entity's predicates -> those entities
- ``ecs``: combined class + predicate profile -> those entities
- ``schemex``: (type set, set of (property set, object type set) edges)
  -> contexts containing the matching subjects

Only keys with observed support are materialized, with one exception:
the type index also keys classes declared via ``rdf:type rdfs:Class``,
whose extensions may be empty.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Optional, Union

from .errors import EmptyDatasetError, KindMismatchError
from .nquads import Dataset
from .terms import (
    RDF_TYPE,
    RDFS_CLASS,
    Quad,
    RdfTerm,
    TermKind,
    Triple,
    format_term,
    term_sort_key,
)


class IndexKind(Enum):
    SUBJECT = "subject"
    TYPE = "type"
    TYPE_SET = "typeset"
    PROPERTY_SET = "propertyset"
    ECS = "ecs"
    SCHEMEX = "schemex"


@dataclass(frozen=True)
class TermKey:
    term: RdfTerm


@dataclass(frozen=True)
class TermSetKey:
    """A set of terms held as a canonically ordered, duplicate-free tuple."""

    terms: tuple[RdfTerm, ...]


@dataclass(frozen=True)
class SchemexKey:
    type_set: TermSetKey
    edges: tuple[tuple[TermSetKey, TermSetKey], ...]


Key = Union[TermKey, TermSetKey, SchemexKey]

# Data items are terms (entity or context URIs) or (s, p, o) triples;
# the index kind determines which variant its extensions hold.
DataItem = Union[RdfTerm, Triple]


def term_set_key(terms: Iterable[RdfTerm]) -> TermSetKey:
    return TermSetKey(tuple(sorted(set(terms), key=term_sort_key)))


def schemex_key(
    type_set: TermSetKey, edges: Iterable[tuple[TermSetKey, TermSetKey]]
) -> SchemexKey:
    ordered = sorted(
        set(edges),
        key=lambda e: (canonical_key_string(e[0]), canonical_key_string(e[1])),
    )
    return SchemexKey(type_set, tuple(ordered))


def canonical_key_string(key: Key) -> str:
    """Injective text form of a key; equal keys serialize identically."""
    if isinstance(key, TermKey):
        return format_term(key.term)
    if isinstance(key, TermSetKey):
        return "{" + ",".join(format_term(t) for t in key.terms) + "}"
    if isinstance(key, SchemexKey):
        edges = ";".join(
            f"({canonical_key_string(ps)}->{canonical_key_string(ts)})"
            for ps, ts in key.edges
        )
        return f"({canonical_key_string(key.type_set)}|{edges})"
    raise TypeError(f"not a key: {key!r}")


def canonical_item_string(item: DataItem) -> str:
    if isinstance(item, RdfTerm):
        return format_term(item)
    return " ".join(format_term(t) for t in item)


_KEY_VARIANTS: dict[IndexKind, type] = {
    IndexKind.SUBJECT: TermKey,
    IndexKind.TYPE: TermKey,
    IndexKind.TYPE_SET: TermSetKey,
    IndexKind.PROPERTY_SET: TermSetKey,
    IndexKind.ECS: TermSetKey,
    IndexKind.SCHEMEX: SchemexKey,
}


@dataclass(frozen=True, eq=False)
class Index:
    """An immutable materialized index for one snapshot."""

    kind: IndexKind
    entries: Mapping[Key, frozenset[DataItem]]
    source_snapshot_id: str = ""

    def select(self, key: Key) -> frozenset[DataItem]:
        """Extension of ``key``; empty for unmaterialized keys of the right shape."""
        if not isinstance(key, _KEY_VARIANTS[self.kind]):
            raise KindMismatchError(
                f"{type(key).__name__} cannot address a {self.kind.value} index"
            )
        return self.entries.get(key, frozenset())

    def key_set(self) -> frozenset[Key]:
        return frozenset(self.entries)

    def extension_size(self, key: Key) -> int:
        return len(self.select(key))

    def dump_lines(self) -> list[str]:
        """Canonical dump: one ``key<TAB>item`` line per pair, sorted."""
        lines = [
            f"{canonical_key_string(key)}\t{canonical_item_string(item)}"
            for key, items in self.entries.items()
            for item in items
        ]
        lines.sort()
        return lines


@dataclass(frozen=True)
class BuildOptions:
    exclude_rdf_type_from_ps: bool = False
    schemex_strict: bool = False


def entity_type_set(dataset: Dataset, subject: RdfTerm) -> frozenset[RdfTerm]:
    """Objects of the subject's rdf:type statements (any context)."""
    return frozenset(q.o for q in dataset.quads if q.s == subject and q.p == RDF_TYPE)


def entity_property_set(
    dataset: Dataset, subject: RdfTerm, exclude_rdf_type: bool = False
) -> frozenset[RdfTerm]:
    """Predicates the subject is used with; rdf:type counts unless excluded."""
    return frozenset(
        q.p
        for q in dataset.quads
        if q.s == subject and not (exclude_rdf_type and q.p == RDF_TYPE)
    )


class _Profiles:
    """One pass over the quads, shared by all builders."""

    def __init__(self, dataset: Dataset, options: BuildOptions):
        by_subject: dict[RdfTerm, list[Quad]] = {}
        type_sets: dict[RdfTerm, set[RdfTerm]] = {}
        prop_sets: dict[RdfTerm, set[RdfTerm]] = {}
        instances: dict[RdfTerm, set[RdfTerm]] = {}
        declared: set[RdfTerm] = set()
        predicates: set[RdfTerm] = set()
        exclude = options.exclude_rdf_type_from_ps
        for q in dataset.quads:
            s, p = q.s, q.p
            bucket = by_subject.get(s)
            if bucket is None:
                by_subject[s] = [q]
                prop_sets[s] = set()
            else:
                bucket.append(q)
            predicates.add(p)
            is_type = p == RDF_TYPE
            if is_type:
                ts = type_sets.get(s)
                if ts is None:
                    type_sets[s] = {q.o}
                else:
                    ts.add(q.o)
                inst = instances.get(q.o)
                if inst is None:
                    instances[q.o] = {s}
                else:
                    inst.add(s)
                if q.o == RDFS_CLASS:
                    declared.add(s)
            if not (exclude and is_type):
                prop_sets[s].add(p)
        self.by_subject = by_subject
        self.type_sets = type_sets
        self.prop_sets = prop_sets
        self.instances = instances
        self.declared = declared
        self.predicates = predicates

    def type_set(self, term: RdfTerm) -> frozenset[RdfTerm]:
        ts = self.type_sets.get(term)
        return frozenset(ts) if ts else frozenset()


_EMPTY_SET: frozenset = frozenset()


def _build_subject(prof: _Profiles) -> dict[Key, frozenset[DataItem]]:
    return {
        TermKey(s): frozenset(q[:3] for q in quads)
        for s, quads in prof.by_subject.items()
    }


def _build_type(prof: _Profiles) -> dict[Key, frozenset[DataItem]]:
    keys = set(prof.instances) | prof.declared
    return {
        TermKey(t): frozenset(prof.instances.get(t, _EMPTY_SET)) for t in keys
    }


def _build_type_set(prof: _Profiles) -> dict[Key, frozenset[DataItem]]:
    groups: dict[frozenset[RdfTerm], set[RdfTerm]] = {}
    for s in prof.by_subject:
        ts = prof.type_sets.get(s)
        if not ts:
            continue
        groups.setdefault(frozenset(ts), set()).add(s)
    return {term_set_key(k): frozenset(v) for k, v in groups.items()}


def _build_property_set(prof: _Profiles) -> dict[Key, frozenset[DataItem]]:
    groups: dict[frozenset[RdfTerm], set[RdfTerm]] = {}
    for s in prof.by_subject:
        groups.setdefault(frozenset(prof.prop_sets[s]), set()).add(s)
    return {term_set_key(k): frozenset(v) for k, v in groups.items()}


def _build_ecs(prof: _Profiles) -> dict[Key, frozenset[DataItem]]:
    # An entity matches a key when both of its projections match exactly:
    # predicates against the global predicate universe, classes against the
    # global class universe. With disjoint vocabularies this reduces to
    # grouping by the union profile.
    classes = set(prof.instances) | prof.declared
    predicates = prof.predicates
    pairs: dict[tuple[frozenset, frozenset], set[RdfTerm]] = {}
    for s in prof.by_subject:
        pair = (
            frozenset(prof.prop_sets[s]),
            frozenset(prof.type_sets.get(s, _EMPTY_SET)),
        )
        pairs.setdefault(pair, set()).add(s)
    entries: dict[Key, frozenset[DataItem]] = {}
    for (props, types), subjects in pairs.items():
        union = props | types
        if (union & predicates, union & classes) == (props, types):
            entries[term_set_key(union)] = frozenset(subjects)
    return entries


def _build_schemex(prof: _Profiles, strict: bool) -> dict[Key, frozenset[DataItem]]:
    tsk_cache: dict[frozenset[RdfTerm], TermSetKey] = {}

    def tsk(terms: frozenset[RdfTerm]) -> TermSetKey:
        key = tsk_cache.get(terms)
        if key is None:
            key = term_set_key(terms)
            tsk_cache[terms] = key
        return key

    groups: dict[SchemexKey, set[RdfTerm]] = {}
    for s, quads in prof.by_subject.items():
        ps = frozenset(prof.prop_sets[s])
        ts = frozenset(prof.type_sets.get(s, _EMPTY_SET))
        if strict:
            edge_sets, contexts = _schemex_strict_subject(prof, quads, ps)
        else:
            edge_sets = set()
            contexts = set()
            for q in quads:
                contexts.add(q.c)
                if q.o.kind is not TermKind.LITERAL and q.p in ps:
                    edge_sets.add(frozenset(prof.type_sets.get(q.o, _EMPTY_SET)))
        key = schemex_key(tsk(ts), ((tsk(ps), tsk(tgt)) for tgt in edge_sets))
        groups.setdefault(key, set()).update(contexts)
    return {key: frozenset(ctxs) for key, ctxs in groups.items()}


def _schemex_strict_subject(
    prof: _Profiles, quads: list[Quad], ps: frozenset[RdfTerm]
) -> tuple[set[frozenset[RdfTerm]], set[RdfTerm]]:
    # Universal reading: an edge target only counts if the object is
    # reachable via every predicate of ps, and a context only counts if it
    # witnesses every edge on its own.
    obj_preds: dict[RdfTerm, set[RdfTerm]] = {}
    per_context: dict[RdfTerm, dict[RdfTerm, set[RdfTerm]]] = {}
    for q in quads:
        ctx_map = per_context.setdefault(q.c, {})
        if q.o.kind is TermKind.LITERAL:
            continue
        obj_preds.setdefault(q.o, set()).add(q.p)
        ctx_map.setdefault(q.o, set()).add(q.p)
    qualifying = [o for o, preds in obj_preds.items() if preds >= ps]
    edge_sets = {frozenset(prof.type_sets.get(o, _EMPTY_SET)) for o in qualifying}
    all_contexts = set(per_context)
    if not edge_sets:
        return edge_sets, all_contexts
    by_target: dict[frozenset[RdfTerm], list[RdfTerm]] = {}
    for o in qualifying:
        by_target.setdefault(
            frozenset(prof.type_sets.get(o, _EMPTY_SET)), []
        ).append(o)
    contexts = set()
    for c in all_contexts:
        ctx_map = per_context[c]
        if all(
            any(ctx_map.get(o, _EMPTY_SET) >= ps for o in objs)
            for objs in by_target.values()
        ):
            contexts.add(c)
    return edge_sets, contexts


def build_indexes(
    dataset: Dataset,
    kinds: Optional[Iterable[IndexKind]] = None,
    options: Optional[BuildOptions] = None,
) -> dict[IndexKind, Index]:
    """Materialize several index kinds over one dataset in a single pass."""
    if not dataset.quads:
        raise EmptyDatasetError(f"dataset '{dataset.snapshot_id}' has no quads")
    opts = options or BuildOptions()
    wanted = tuple(IndexKind) if kinds is None else tuple(dict.fromkeys(kinds))
    prof = _Profiles(dataset, opts)
    out: dict[IndexKind, Index] = {}
    for kind in wanted:
        if kind is IndexKind.SUBJECT:
            entries = _build_subject(prof)
        elif kind is IndexKind.TYPE:
            entries = _build_type(prof)
        elif kind is IndexKind.TYPE_SET:
            entries = _build_type_set(prof)
        elif kind is IndexKind.PROPERTY_SET:
            entries = _build_property_set(prof)
        elif kind is IndexKind.ECS:
            entries = _build_ecs(prof)
        elif kind is IndexKind.SCHEMEX:
            entries = _build_schemex(prof, opts.schemex_strict)
        else:  # pragma: no cover - enum is closed
            raise KindMismatchError(f"unknown index kind {kind!r}")
        out[kind] = Index(kind, entries, dataset.snapshot_id)
    return out


def build_index(
    dataset: Dataset,
    kind: IndexKind,
    options: Optional[BuildOptions] = None,
) -> Index:
    return build_indexes(dataset, (kind,), options)[kind]
