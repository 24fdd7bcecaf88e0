"""RDF terms, quads, and their canonical N-Quads text forms.

Terms compare structurally: two occurrences of the same IRI, blank node
label, or literal are equal no matter which snapshot they came from.
Literal comparison is bit-exact on the lexical form; no value-space
normalization is applied ("1" and "01" stay distinct).
"""

from __future__ import annotations

from enum import Enum
from typing import NamedTuple, Optional


class TermKind(str, Enum):
    IRI = "iri"
    BLANK_NODE = "bnode"
    LITERAL = "literal"


# Total order used wherever term sets need a canonical ordering.
_KIND_ORDER = {TermKind.IRI: 0, TermKind.BLANK_NODE: 1, TermKind.LITERAL: 2}


class RdfTerm(NamedTuple):
    """One RDF term. Use the factory methods, which validate invariants."""

    kind: TermKind
    lexical: str
    datatype_iri: Optional[str] = None
    language_tag: Optional[str] = None

    @classmethod
    def iri(cls, lexical: str) -> "RdfTerm":
        if not lexical:
            raise ValueError("empty IRI")
        # Only absolute IRIs are legal in N-Quads; a scheme separator must exist.
        if ":" not in lexical:
            raise ValueError(f"relative IRI <{lexical}>")
        return cls(TermKind.IRI, lexical)

    @classmethod
    def bnode(cls, label: str) -> "RdfTerm":
        if not label:
            raise ValueError("empty blank node label")
        if any(ch.isspace() for ch in label):
            raise ValueError(f"whitespace in blank node label {label!r}")
        return cls(TermKind.BLANK_NODE, label)

    @classmethod
    def literal(
        cls,
        lexical: str,
        datatype_iri: Optional[str] = None,
        language_tag: Optional[str] = None,
    ) -> "RdfTerm":
        if datatype_iri is not None and language_tag is not None:
            raise ValueError("literal cannot carry both a datatype and a language tag")
        if datatype_iri is not None and ":" not in datatype_iri:
            raise ValueError(f"relative datatype IRI <{datatype_iri}>")
        if language_tag == "":
            raise ValueError("empty language tag")
        return cls(TermKind.LITERAL, lexical, datatype_iri, language_tag)

    def n3(self) -> str:
        return format_term(self)


class Quad(NamedTuple):
    """One statement (s, p, o, c).

    Positional constraints (subject/context are IRI or blank node, the
    predicate an IRI) are guaranteed by the parser; code constructing
    quads directly is expected to respect them.
    """

    s: RdfTerm
    p: RdfTerm
    o: RdfTerm
    c: RdfTerm

    def triple(self) -> "Triple":
        return (self.s, self.p, self.o)


Triple = tuple[RdfTerm, RdfTerm, RdfTerm]

RDF_TYPE = RdfTerm.iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#type")
RDFS_CLASS = RdfTerm.iri("http://www.w3.org/2000/01/rdf-schema#Class")


def term_sort_key(term: RdfTerm) -> tuple:
    """Canonical total order: kind first, then lexical, then qualifiers."""
    return (
        _KIND_ORDER[term.kind],
        term.lexical,
        term.datatype_iri or "",
        term.language_tag or "",
    )


_LITERAL_ESCAPES = {
    "\\": "\\\\",
    '"': '\\"',
    "\n": "\\n",
    "\r": "\\r",
    "\t": "\\t",
}


def _escape_literal(text: str) -> str:
    if not any(ch in _LITERAL_ESCAPES for ch in text):
        return text
    return "".join(_LITERAL_ESCAPES.get(ch, ch) for ch in text)


def _escape_iri(text: str) -> str:
    # Characters the IRIREF production forbids raw can only be written back
    # as numeric escapes; everything else passes through untouched.
    if all(ch > "\x20" and ch not in '<>"{}|^`\\' for ch in text):
        return text
    out = []
    for ch in text:
        if ch <= "\x20" or ch in '<>"{}|^`\\':
            out.append(f"\\u{ord(ch):04X}")
        else:
            out.append(ch)
    return "".join(out)


def format_term(term: RdfTerm) -> str:
    """Serialize one term in N-Quads syntax; inverse of the parser."""
    if term.kind is TermKind.IRI:
        return f"<{_escape_iri(term.lexical)}>"
    if term.kind is TermKind.BLANK_NODE:
        return f"_:{term.lexical}"
    body = f'"{_escape_literal(term.lexical)}"'
    if term.language_tag is not None:
        return f"{body}@{term.language_tag}"
    if term.datatype_iri is not None:
        return f"{body}^^<{_escape_iri(term.datatype_iri)}>"
    return body


def format_quad(quad: Quad) -> str:
    return (
        f"{format_term(quad.s)} {format_term(quad.p)} "
        f"{format_term(quad.o)} {format_term(quad.c)} ."
    )
