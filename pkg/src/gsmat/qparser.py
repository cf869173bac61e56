"""N-Triples data parsing and a SPARQL BGP query parser.

Term canonical forms used throughout the engine:
  * IRIs are stored without their angle brackets,
  * blank nodes keep their ``_:label`` spelling,
  * literals keep quotes around the unescaped lexical form, followed by an
    optional ``@lang`` or ``^^<datatype>`` suffix.

Variables are normalized to a leading ``?``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .dictionary import TermDictionary
from .errors import ParseError, UnsupportedFeatureError

_IRI_BODY = r'[^<>"{}|^`\\\x00-\x20]*'
_IRI = rf"<({_IRI_BODY})>"
_BNODE = r"(_:[A-Za-z0-9][A-Za-z0-9_.-]*)"
_LIT = rf'"((?:[^"\\\n]|\\.)*)"(?:\^\^<({_IRI_BODY})>|@([A-Za-z]+(?:-[A-Za-z0-9]+)*))?'

_NT_LINE = re.compile(
    rf"^\s*(?:{_IRI}|{_BNODE})\s+{_IRI}\s+(?:{_IRI}|{_BNODE}|{_LIT})\s*\.\s*(?:#.*)?$"
)
_BLANK = re.compile(r"^\s*(?:#.*)?$")

_LIT_ESCAPES = {'"': '"', "\\": "\\", "n": "\n", "r": "\r", "t": "\t", "b": "\b", "f": "\f", "'": "'"}


def _unescape_literal(text: str, line: int | None = None) -> str:
    if "\\" not in text:
        return text
    out: list[str] = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c != "\\":
            out.append(c)
            i += 1
            continue
        e = text[i + 1]
        if e in _LIT_ESCAPES:
            out.append(_LIT_ESCAPES[e])
            i += 2
        elif e == "u":
            out.append(chr(int(text[i + 2 : i + 6], 16)))
            i += 6
        elif e == "U":
            out.append(chr(int(text[i + 2 : i + 10], 16)))
            i += 10
        else:
            raise ParseError(f"bad literal escape \\{e}", line)
    return "".join(out)


def _escape_literal(text: str) -> str:
    return (
        text.replace("\\", "\\\\")
        .replace('"', '\\"')
        .replace("\n", "\\n")
        .replace("\r", "\\r")
        .replace("\t", "\\t")
    )


def format_term(term: str) -> str:
    """Render a canonical term back in N-Triples surface syntax."""
    if term.startswith('"'):
        end = term.rfind('"')
        return '"' + _escape_literal(term[1:end]) + '"' + term[end + 1 :]
    if term.startswith("_:"):
        return term
    return f"<{term}>"


def parse_ntriples_line(line: str, lineno: int | None = None) -> tuple[str, str, str] | None:
    """Parse one N-Triples statement; blank and comment lines yield None."""
    if _BLANK.match(line):
        return None
    m = _NT_LINE.match(line)
    if m is None:
        raise ParseError(f"malformed N-Triples statement: {line.strip()!r}", lineno)
    s_iri, s_bnode, pred, o_iri, o_bnode, o_lex, o_dt, o_lang = m.groups()
    subject = s_iri if s_iri is not None else s_bnode
    if o_lex is not None:
        obj = '"' + _unescape_literal(o_lex, lineno) + '"'
        if o_dt is not None:
            obj += f"^^<{o_dt}>"
        elif o_lang is not None:
            obj += f"@{o_lang}"
    else:
        obj = o_iri if o_iri is not None else o_bnode
    return subject, pred, obj


def read_ntriples(lines: Iterable[str]) -> Iterator[tuple[str, str, str]]:
    for lineno, line in enumerate(lines, start=1):
        triple = parse_ntriples_line(line, lineno)
        if triple is not None:
            yield triple


# -- query parsing ----------------------------------------------------------


def is_var(term: str) -> bool:
    return term.startswith("?")


@dataclass(frozen=True)
class TriplePattern:
    s: str
    p: str
    o: str
    ordinal: int

    def variables(self) -> list[str]:
        return [t for t in (self.s, self.o) if is_var(t)]

    def text(self) -> str:
        def show(t: str) -> str:
            return t if is_var(t) else format_term(t)

        return f"{show(self.s)} {show(self.p)} {show(self.o)}"


@dataclass
class QueryGraph:
    patterns: list[TriplePattern]
    projection: list[str]
    select_all: bool = False
    distinct: bool = False
    variables: set[str] = field(default_factory=set)

    def __post_init__(self) -> None:
        if not self.variables:
            self.variables = {v for p in self.patterns for v in p.variables()}
        if self.select_all:
            # expansion in first-occurrence order across patterns
            seen: list[str] = []
            for p in self.patterns:
                for v in p.variables():
                    if v not in seen:
                        seen.append(v)
            self.projection = seen


_TOKEN = re.compile(
    rf"""
    (?P<iri><{_IRI_BODY}>)
  | (?P<literal>"(?:[^"\\\n]|\\.)*"(?:\^\^<{_IRI_BODY}>|@[A-Za-z]+(?:-[A-Za-z0-9]+)*)?)
  | (?P<var>[?$][A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[{{}}.*;,])
  | (?P<pname>[A-Za-z_][A-Za-z0-9_.-]*:[A-Za-z0-9_.-]*|_:[A-Za-z0-9_.-]+|:[A-Za-z0-9_.-]*)
  | (?P<word>[A-Za-z]+)
  | (?P<comment>\#[^\n]*)
  | (?P<ws>\s+)
  | (?P<bad>.)
    """,
    re.VERBOSE,
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens: list[tuple[str, str, int]] = []
    line = 1
    for m in _TOKEN.finditer(text):
        kind = m.lastgroup
        value = m.group()
        if kind == "bad":
            raise ParseError(f"unexpected character {value!r}", line)
        if kind not in ("ws", "comment"):
            tokens.append((kind, value, line))
        line += value.count("\n")
    return tokens


class _TokenStream:
    def __init__(self, tokens: list[tuple[str, str, int]]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> tuple[str, str, int] | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self, expect: str | None = None) -> tuple[str, str, int]:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of query")
        if expect is not None and tok[1].upper() != expect:
            raise ParseError(f"expected {expect!r}, found {tok[1]!r}", tok[2])
        self.pos += 1
        return tok


def _expand_pname(value: str, prefixes: dict[str, str], line: int) -> str:
    prefix, _, local = value.partition(":")
    if prefix not in prefixes:
        raise ParseError(f"unknown prefix {prefix!r}:", line)
    return prefixes[prefix] + local


def _parse_term(ts: _TokenStream, prefixes: dict[str, str]) -> str:
    kind, value, line = ts.next()
    if kind == "var":
        return "?" + value[1:]
    if kind == "iri":
        return value[1:-1]
    if kind == "literal":
        m = re.fullmatch(_LIT, value)
        assert m is not None
        lex, dt, lang = m.groups()
        term = '"' + _unescape_literal(lex, line) + '"'
        if dt is not None:
            term += f"^^<{dt}>"
        elif lang is not None:
            term += f"@{lang}"
        return term
    if kind == "pname":
        if value.startswith("_:"):
            return value
        return _expand_pname(value, prefixes, line)
    raise ParseError(f"expected a term, found {value!r}", line)


def parse_query(text: str) -> QueryGraph:
    """Parse ``PREFIX* SELECT [DISTINCT] (?v+ | *) WHERE { (s p o .)+ }``."""
    ts = _TokenStream(_tokenize(text))
    prefixes: dict[str, str] = {}

    while (tok := ts.peek()) is not None and tok[1].upper() == "PREFIX":
        ts.next()
        kind, pvalue, line = ts.next()
        if kind != "pname" or not pvalue.endswith(":"):
            raise ParseError(f"expected a prefix declaration, found {pvalue!r}", line)
        kind, ivalue, line = ts.next()
        if kind != "iri":
            raise ParseError(f"expected an IRI after PREFIX, found {ivalue!r}", line)
        prefixes[pvalue[:-1]] = ivalue[1:-1]

    ts.next(expect="SELECT")
    distinct = False
    tok = ts.peek()
    if tok is not None and tok[1].upper() == "DISTINCT":
        ts.next()
        distinct = True

    projection: list[str] = []
    select_all = False
    tok = ts.peek()
    if tok is not None and tok[1] == "*":
        ts.next()
        select_all = True
    else:
        while (tok := ts.peek()) is not None and tok[0] == "var":
            projection.append("?" + ts.next()[1][1:])
        if not projection:
            raise ParseError("SELECT clause names no variables", tok[2] if tok else None)

    ts.next(expect="WHERE")
    ts.next(expect="{")

    patterns: list[TriplePattern] = []
    while True:
        tok = ts.peek()
        if tok is None:
            raise ParseError("unterminated WHERE block")
        if tok[1] == "}":
            ts.next()
            break
        s = _parse_term(ts, prefixes)
        kind, pvalue, pline = ts.peek() or (None, "", 0)
        p = _parse_term(ts, prefixes)
        if is_var(p):
            raise UnsupportedFeatureError("variable predicates are not supported", pline)
        o = _parse_term(ts, prefixes)
        patterns.append(TriplePattern(s, p, o, ordinal=len(patterns) + 1))
        tok = ts.peek()
        if tok is not None and tok[1] == ".":
            ts.next()

    if ts.peek() is not None:
        kind, value, line = ts.peek()  # type: ignore[misc]
        raise ParseError(f"trailing tokens after query: {value!r}", line)
    if not patterns:
        raise ParseError("WHERE block contains no triple patterns")

    graph = QueryGraph(patterns, projection, select_all=select_all, distinct=distinct)
    missing = [v for v in graph.projection if v not in graph.variables]
    if missing:
        raise ParseError(f"projected variables not bound by any pattern: {', '.join(missing)}")
    return graph


# -- constant binding -------------------------------------------------------


@dataclass(frozen=True)
class EncodedPattern:
    """A triple pattern with constants replaced by dictionary ids.

    ``empty`` marks a pattern whose predicate or constant endpoint is absent
    from the dictionary: it cannot match anything, so the whole BGP is empty.
    """

    s: int | str
    p: int
    o: int | str
    ordinal: int
    source: TriplePattern
    empty: bool = False

    def variables(self) -> list[str]:
        return [t for t in (self.s, self.o) if isinstance(t, str)]

    def nodes(self) -> list[int | str]:
        """Endpoint identities for connectivity: variable names or node ids."""
        return [self.s, self.o]


@dataclass
class EncodedQuery:
    patterns: list[EncodedPattern]
    projection: list[str]
    distinct: bool
    variables: set[str]


def bind_constants(graph: QueryGraph, dictionary: TermDictionary) -> EncodedQuery:
    encoded: list[EncodedPattern] = []
    for pat in graph.patterns:
        empty = False
        pid = dictionary.lookup_predicate(pat.p)
        if pid is None:
            pid, empty = 0, True
        endpoints: list[int | str] = []
        for term in (pat.s, pat.o):
            if is_var(term):
                endpoints.append(term)
            else:
                nid = dictionary.lookup_node(term)
                if nid is None:
                    nid, empty = 0, True
                endpoints.append(nid)
        encoded.append(
            EncodedPattern(endpoints[0], pid, endpoints[1], pat.ordinal, pat, empty)
        )
    return EncodedQuery(encoded, list(graph.projection), graph.distinct, set(graph.variables))
