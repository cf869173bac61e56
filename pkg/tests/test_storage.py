import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import D_G_TRIPLES, build_from_strings, random_store_triples
from gsmat import storage
from gsmat.errors import StoreFormatError, UnknownPredicateError
from gsmat.storage import AuxEntry, build_aux, build_store, load, persist


def test_example_graph_matrices(d_g_store):
    assert d_g_store.matrix_for(1).so_pairs == [(1, 2), (1, 3), (6, 3)]
    assert d_g_store.matrix_for(2).so_pairs == [(1, 4), (4, 6), (4, 7), (6, 7)]
    # (4,5) is B:related:h, (7,5) is D:related:h per the code table; see the
    # note in fixtures/d_g.nt on the conflicting printed rendering.
    assert d_g_store.matrix_for(3).so_pairs == [(4, 5), (7, 5)]


def test_matrix_for_unknown_predicate(d_g_store):
    assert d_g_store.matrix_for(1).cardinality == 3
    assert d_g_store.matrix_for(2).cardinality == 4
    with pytest.raises(UnknownPredicateError):
        d_g_store.matrix_for(99)


def test_empty_stream_and_duplicates():
    from gsmat.dictionary import TermDictionary

    empty = build_store(TermDictionary(), [])
    assert empty.matrices == {} and empty.triple_count == 0

    dup = build_from_strings([("a", "p", "b"), ("a", "p", "b")])
    assert dup.triple_count == 1


def test_aux_array_example_runs(d_g_store):
    m1 = d_g_store.matrix_for(1)
    assert m1.so_index == [AuxEntry(1, 2, 1), AuxEntry(6, 1, 3)]
    m2 = d_g_store.matrix_for(2)
    assert m2.so_index == [AuxEntry(1, 1, 1), AuxEntry(4, 2, 2), AuxEntry(6, 1, 4)]


def test_build_aux_empty_and_unsorted():
    assert build_aux([]) == []
    with pytest.raises(ValueError, match="not sorted"):
        build_aux([(2, 1), (1, 1)])


@given(
    st.lists(
        st.tuples(st.integers(1, 20), st.integers(1, 20)), min_size=0, max_size=60
    )
)
def test_aux_tiling_invariant(pairs):
    pairs = sorted(pairs)
    aux = build_aux(pairs)
    assert sum(e.num for e in aux) == len(pairs)
    assert all(e.num >= 1 for e in aux)
    for prev, cur in zip(aux, aux[1:]):
        assert cur.rpos == prev.rpos + prev.num
        assert cur.row > prev.row
    for e in aux:
        run = pairs[e.rpos - 1 : e.rpos - 1 + e.num]
        assert all(k == e.row for k, _ in run)


def test_orientations_agree(d_g_store):
    for m in d_g_store.matrices.values():
        assert sorted((o, s) for s, o in m.so_pairs) == m.os_pairs
        assert len(m.so_pairs) == d_g_store.stats[m.pid].cardinality


def test_stats(d_g_store):
    assert d_g_store.stats[1] == (3, 2, 2)
    assert d_g_store.stats[2] == (4, 3, 3)
    assert d_g_store.stats[3] == (2, 2, 1)


def test_degrees_and_histogram(d_g_store):
    names = d_g_store.dictionary.node_terms
    degrees = {names[n - 1]: d for n, d in d_g_store.node_degrees().items()}
    assert degrees == {"A": 3, "B": 4, "C": 3, "D": 3, "I1": 1, "I2": 2, "h": 2}
    hist = d_g_store.degree_histogram()
    assert sum(pct for _, pct in hist) == pytest.approx(100.0)


def test_single_triple_degrees():
    store = build_from_strings([("a", "p", "b")])
    assert store.node_degrees() == {1: 1, 2: 1}


def test_persist_round_trip_example(tmp_path, d_g_store):
    persist(d_g_store, tmp_path)
    # edge-proportional storage: 9 pairs = 18 integers per orientation
    so_bytes = sum((tmp_path / f"p{p}.so").stat().st_size for p in (1, 2, 3))
    assert so_bytes == 18 * 8
    reloaded = load(tmp_path)
    assert reloaded.stats == d_g_store.stats
    for pid, m in d_g_store.matrices.items():
        assert reloaded.matrix_for(pid).so_pairs == m.so_pairs
        assert reloaded.matrix_for(pid).os_index == m.os_index


def test_persist_is_deterministic(tmp_path):
    rng = random.Random(7)
    store = build_from_strings(random_store_triples(rng, 120, 4))
    a, b = tmp_path / "a", tmp_path / "b"
    persist(store, a)
    persist(load(a), b)
    for f in sorted(p.name for p in a.iterdir()):
        assert (a / f).read_bytes() == (b / f).read_bytes()


def test_load_errors(tmp_path):
    with pytest.raises(StoreFormatError, match="missing"):
        load(tmp_path / "nowhere")

    bad = tmp_path / "bad"
    bad.mkdir()
    (bad / storage.META_FILE).write_text("WRONG9\n")
    with pytest.raises(StoreFormatError, match="bad magic"):
        load(bad)

    trunc = tmp_path / "trunc"
    persist(build_from_strings(D_G_TRIPLES), trunc)
    so = trunc / "p1.so"
    so.write_bytes(so.read_bytes()[:-5])
    with pytest.raises(StoreFormatError, match="truncated|pairs"):
        load(trunc)


def test_total_pairs_equals_triples():
    rng = random.Random(3)
    triples = random_store_triples(rng, 200, 5)
    store = build_from_strings(triples)
    assert store.triple_count == len(set(triples))
