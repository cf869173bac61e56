"""Bijective term <-> id dictionaries for nodes and predicates.

Node terms (subjects and objects share one namespace) and predicate terms
get dense 1-based ids in first-occurrence order.  Predicates live in a
separate id space: predicate 1 and node 1 are unrelated terms.
"""

from __future__ import annotations

from pathlib import Path

from .errors import StoreFormatError, UnknownIdError

NODES_FILE = "nodes.dict"
PREDS_FILE = "preds.dict"


def escape_term(term: str) -> str:
    """Escape a term for one-term-per-line storage (no raw newlines)."""
    return (
        term.replace("\\", "\\\\")
        .replace("\n", "\\n")
        .replace("\r", "\\r")
        .replace("\t", "\\t")
    )


def unescape_term(text: str) -> str:
    if "\\" not in text:
        return text
    out: list[str] = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\\" and i + 1 < n:
            nxt = text[i + 1]
            out.append({"\\": "\\", "n": "\n", "r": "\r", "t": "\t"}.get(nxt, nxt))
            i += 2
        else:
            out.append(c)
            i += 1
    return "".join(out)


class TermDictionary:
    """Two first-occurrence-ordered bijections: node terms and predicate terms."""

    def __init__(self) -> None:
        self.node_terms: list[str] = []
        self.pred_terms: list[str] = []
        self.node_index: dict[str, int] = {}
        self.pred_index: dict[str, int] = {}

    # -- encoding -----------------------------------------------------------

    def encode_node(self, term: str) -> int:
        """Return the id of ``term``, assigning the next dense id if new."""
        nid = self.node_index.get(term)
        if nid is None:
            self.node_terms.append(term)
            nid = len(self.node_terms)
            self.node_index[term] = nid
        return nid

    def encode_predicate(self, term: str) -> int:
        pid = self.pred_index.get(term)
        if pid is None:
            self.pred_terms.append(term)
            pid = len(self.pred_terms)
            self.pred_index[term] = pid
        return pid

    # -- lookup without assignment -----------------------------------------

    def lookup_node(self, term: str) -> int | None:
        return self.node_index.get(term)

    def lookup_predicate(self, term: str) -> int | None:
        return self.pred_index.get(term)

    # -- decoding -----------------------------------------------------------

    def decode_node(self, id_: int) -> str:
        if not 1 <= id_ <= len(self.node_terms):
            raise UnknownIdError("node", id_)
        return self.node_terms[id_ - 1]

    def decode_predicate(self, id_: int) -> str:
        if not 1 <= id_ <= len(self.pred_terms):
            raise UnknownIdError("predicate", id_)
        return self.pred_terms[id_ - 1]

    # -- sizes --------------------------------------------------------------

    @property
    def node_count(self) -> int:
        return len(self.node_terms)

    @property
    def predicate_count(self) -> int:
        return len(self.pred_terms)

    # -- persistence --------------------------------------------------------

    def save(self, directory: Path | str) -> None:
        directory = Path(directory)
        for name, terms in ((NODES_FILE, self.node_terms), (PREDS_FILE, self.pred_terms)):
            with open(directory / name, "w", encoding="utf-8", newline="\n") as fh:
                for term in terms:
                    fh.write(escape_term(term))
                    fh.write("\n")

    @classmethod
    def load(cls, directory: Path | str) -> "TermDictionary":
        directory = Path(directory)
        d = cls()
        for name, encode in ((NODES_FILE, d.encode_node), (PREDS_FILE, d.encode_predicate)):
            path = directory / name
            if not path.exists():
                raise StoreFormatError(f"missing dictionary file {path}")
            with open(path, encoding="utf-8", newline="\n") as fh:
                for raw in fh:
                    encode(unescape_term(raw.rstrip("\n")))
        return d
