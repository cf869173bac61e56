"""Predicate-partitioned sparse matrix storage.

Each predicate's edge set is a sorted list of (row, col) pairs held in both
orientations (subject-major and object-major), with an auxiliary array per
orientation giving, for every non-empty row, its run length and 1-based
starting offset in the pair list.  That is a CSR row pointer restricted to
non-empty rows, and it is what the join executor navigates.
"""

from __future__ import annotations

import sys
from array import array
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple

from .dictionary import TermDictionary
from .errors import StoreFormatError, UnknownPredicateError

MAGIC = "GSMAT1"
META_FILE = "meta"
STATS_FILE = "stats.tsv"


class EncodedTriple(NamedTuple):
    s: int
    p: int
    o: int


class AuxEntry(NamedTuple):
    row: int
    num: int
    rpos: int  # 1-based offset of the row's first pair


def build_aux(pairs: list[tuple[int, int]]) -> list[AuxEntry]:
    """Run-length index over a pair list sorted on its first column."""
    entries: list[AuxEntry] = []
    prev_key: int | None = None
    run_start = 0
    for i, (key, _) in enumerate(pairs):
        if prev_key is not None and key < prev_key:
            raise ValueError(f"pair list not sorted at position {i}")
        if key != prev_key:
            if prev_key is not None:
                entries.append(AuxEntry(prev_key, i - run_start, run_start + 1))
            prev_key = key
            run_start = i
    if prev_key is not None:
        entries.append(AuxEntry(prev_key, len(pairs) - run_start, run_start + 1))
    return entries


@dataclass
class PredicateMatrix:
    """One predicate's edges, in both orientations, with row indexes."""

    pid: int
    so_pairs: list[tuple[int, int]]
    os_pairs: list[tuple[int, int]]
    so_index: list[AuxEntry] = field(default_factory=list)
    os_index: list[AuxEntry] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.so_index:
            self.so_index = build_aux(self.so_pairs)
        if not self.os_index:
            self.os_index = build_aux(self.os_pairs)
        self._so_runs = {e.row: e for e in self.so_index}
        self._os_runs = {e.row: e for e in self.os_index}

    @classmethod
    def from_edges(cls, pid: int, edges: Iterable[tuple[int, int]]) -> "PredicateMatrix":
        so = sorted(set(edges))
        os_ = sorted((o, s) for s, o in so)
        return cls(pid, so, os_)

    @property
    def cardinality(self) -> int:
        return len(self.so_pairs)

    def pairs_for_subject(self, s: int) -> list[tuple[int, int]]:
        e = self._so_runs.get(s)
        if e is None:
            return []
        return self.so_pairs[e.rpos - 1 : e.rpos - 1 + e.num]

    def pairs_for_object(self, o: int) -> list[tuple[int, int]]:
        e = self._os_runs.get(o)
        if e is None:
            return []
        return self.os_pairs[e.rpos - 1 : e.rpos - 1 + e.num]

    def contains(self, s: int, o: int) -> bool:
        return any(pair[1] == o for pair in self.pairs_for_subject(s))


class StatEntry(NamedTuple):
    cardinality: int
    distinct_subjects: int
    distinct_objects: int


@dataclass
class Store:
    """An immutable built store: dictionary, matrices, and predicate stats."""

    dictionary: TermDictionary
    matrices: dict[int, PredicateMatrix]
    stats: dict[int, StatEntry]

    @property
    def triple_count(self) -> int:
        return sum(m.cardinality for m in self.matrices.values())

    def matrix_for(self, pid: int) -> PredicateMatrix:
        try:
            return self.matrices[pid]
        except KeyError:
            raise UnknownPredicateError(pid) from None

    def triples(self) -> Iterator[EncodedTriple]:
        for pid in sorted(self.matrices):
            for s, o in self.matrices[pid].so_pairs:
                yield EncodedTriple(s, pid, o)

    def node_degrees(self) -> dict[int, int]:
        """Total (in + out) edge incidences per node id."""
        deg: dict[int, int] = {}
        for m in self.matrices.values():
            for s, o in m.so_pairs:
                deg[s] = deg.get(s, 0) + 1
                deg[o] = deg.get(o, 0) + 1
        return deg

    def degree_histogram(self, bounds: list[int] | None = None) -> list[tuple[int, float]]:
        """Percentage of nodes whose total degree is <= each bound.

        Buckets are half-open intervals between consecutive bounds; the
        default bounds grow geometrically (powers of ten) up to the maximum
        degree, so sparse stores show almost all mass in the first bucket.
        """
        degrees = list(self.node_degrees().values())
        if not degrees:
            return []
        max_deg = max(degrees)
        if bounds is None:
            bounds = [1]
            while bounds[-1] < max_deg:
                bounds.append(bounds[-1] * 10)
        elif bounds[-1] < max_deg:
            bounds = list(bounds) + [max_deg]
        total = len(degrees)
        hist: list[tuple[int, float]] = []
        lo = 0
        for bound in bounds:
            count = sum(1 for d in degrees if lo < d <= bound)
            hist.append((bound, 100.0 * count / total))
            lo = bound
        return hist


def build_store(dictionary: TermDictionary, triples: Iterable[EncodedTriple]) -> Store:
    """Partition encoded triples by predicate, deduplicate, sort, and index."""
    by_pred: dict[int, set[tuple[int, int]]] = {}
    for s, p, o in triples:
        by_pred.setdefault(p, set()).add((s, o))
    matrices = {
        pid: PredicateMatrix.from_edges(pid, edges) for pid, edges in by_pred.items()
    }
    stats = {
        pid: StatEntry(m.cardinality, len(m.so_index), len(m.os_index))
        for pid, m in matrices.items()
    }
    return Store(dictionary, matrices, stats)


# -- persistence ------------------------------------------------------------


def _pairs_to_bytes(pairs: list[tuple[int, int]]) -> bytes:
    flat = array("Q")
    for a, b in pairs:
        flat.append(a)
        flat.append(b)
    if sys.byteorder == "big":
        flat.byteswap()
    return flat.tobytes()


def _pairs_from_bytes(data: bytes, path: Path) -> list[tuple[int, int]]:
    if len(data) % 16 != 0:
        raise StoreFormatError(f"truncated pair file {path}: {len(data)} bytes")
    flat = array("Q")
    flat.frombytes(data)
    if sys.byteorder == "big":
        flat.byteswap()
    return [(flat[i], flat[i + 1]) for i in range(0, len(flat), 2)]


def persist(store: Store, directory: Path | str) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    store.dictionary.save(directory)
    with open(directory / META_FILE, "w", encoding="ascii", newline="\n") as fh:
        fh.write(f"{MAGIC}\n")
        fh.write(f"{store.triple_count}\n")
        fh.write(f"{len(store.matrices)}\n")
        fh.write(f"{store.dictionary.node_count}\n")
    with open(directory / STATS_FILE, "w", encoding="ascii", newline="\n") as fh:
        for pid in sorted(store.stats):
            st = store.stats[pid]
            fh.write(f"{pid}\t{st.cardinality}\t{st.distinct_subjects}\t{st.distinct_objects}\n")
    for pid in sorted(store.matrices):
        m = store.matrices[pid]
        (directory / f"p{pid}.so").write_bytes(_pairs_to_bytes(m.so_pairs))
        (directory / f"p{pid}.os").write_bytes(_pairs_to_bytes(m.os_pairs))


def load(directory: Path | str) -> Store:
    directory = Path(directory)
    meta_path = directory / META_FILE
    if not meta_path.exists():
        raise StoreFormatError(f"no store at {directory}: missing {META_FILE}")
    lines = meta_path.read_text(encoding="ascii").splitlines()
    if not lines or lines[0] != MAGIC:
        found = lines[0] if lines else "<empty>"
        raise StoreFormatError(f"bad magic in {meta_path}: expected {MAGIC}, found {found}")
    if len(lines) < 4:
        raise StoreFormatError(f"truncated meta file {meta_path}")
    triple_count, pred_count, node_count = (int(x) for x in lines[1:4])

    dictionary = TermDictionary.load(directory)
    if dictionary.node_count != node_count:
        raise StoreFormatError(
            f"meta declares {node_count} nodes but dictionary has {dictionary.node_count}"
        )

    stats_path = directory / STATS_FILE
    if not stats_path.exists():
        raise StoreFormatError(f"missing {stats_path}")
    stats: dict[int, StatEntry] = {}
    for raw in stats_path.read_text(encoding="ascii").splitlines():
        pid_s, card, ds, do = raw.split("\t")
        stats[int(pid_s)] = StatEntry(int(card), int(ds), int(do))
    if len(stats) != pred_count:
        raise StoreFormatError(
            f"meta declares {pred_count} predicates but stats has {len(stats)}"
        )

    matrices: dict[int, PredicateMatrix] = {}
    for pid in stats:
        so_path = directory / f"p{pid}.so"
        os_path = directory / f"p{pid}.os"
        if not so_path.exists() or not os_path.exists():
            raise StoreFormatError(f"missing pair files for predicate {pid}")
        so = _pairs_from_bytes(so_path.read_bytes(), so_path)
        os_ = _pairs_from_bytes(os_path.read_bytes(), os_path)
        if len(so) != stats[pid].cardinality:
            raise StoreFormatError(
                f"{so_path}: {len(so)} pairs but stats declares {stats[pid].cardinality}"
            )
        matrices[pid] = PredicateMatrix(pid, so, os_)
    store = Store(dictionary, matrices, stats)
    if store.triple_count != triple_count:
        raise StoreFormatError(
            f"meta declares {triple_count} triples but store holds {store.triple_count}"
        )
    return store
