import random
from collections import Counter
from pathlib import Path

import pytest

from gsmat import qparser, storage
from gsmat.dictionary import TermDictionary
from gsmat.qparser import QueryGraph, TriplePattern

FIXTURES = Path(__file__).parent / "fixtures"

D_G_TRIPLES = [
    ("A", ":likes", "I1"),
    ("A", ":likes", "I2"),
    ("A", ":follows", "B"),
    ("B", ":related", "h"),
    ("B", ":follows", "C"),
    ("B", ":follows", "D"),
    ("C", ":likes", "I2"),
    ("C", ":follows", "D"),
    ("D", ":related", "h"),
]


def encode_triples(triples):
    dictionary = TermDictionary()
    encoded = [
        storage.EncodedTriple(
            dictionary.encode_node(s),
            dictionary.encode_predicate(p),
            dictionary.encode_node(o),
        )
        for s, p, o in triples
    ]
    return dictionary, encoded


def build_from_strings(triples):
    dictionary, encoded = encode_triples(triples)
    return storage.build_store(dictionary, encoded)


@pytest.fixture
def d_g_store():
    return build_from_strings(D_G_TRIPLES)


@pytest.fixture
def fig_query():
    return qparser.parse_query((FIXTURES / "fig_query.rq").read_text())


def random_store_triples(rng: random.Random, n_triples: int, n_predicates: int):
    """Small random graph with mildly skewed endpoint choice."""
    nodes = [f"n{i}" for i in range(1, max(4, n_triples // 3) + 1)]
    weights = [1.0 / (i + 1) ** 0.7 for i in range(len(nodes))]
    preds = [f"p{i}" for i in range(1, n_predicates + 1)]
    return [
        (
            rng.choices(nodes, weights=weights)[0],
            rng.choice(preds),
            rng.choices(nodes, weights=weights)[0],
        )
        for _ in range(n_triples)
    ]


def random_connected_query(rng: random.Random, triples, n_patterns: int, n_constants: int):
    """Grow a connected edge set in the data graph, then abstract nodes to
    variables (keeping up to ``n_constants`` as constants)."""
    by_node: dict[str, list[tuple[str, str, str]]] = {}
    for t in triples:
        by_node.setdefault(t[0], []).append(t)
        by_node.setdefault(t[2], []).append(t)

    chosen = [rng.choice(triples)]
    touched = {chosen[0][0], chosen[0][2]}
    for _ in range(n_patterns - 1):
        frontier = [t for node in touched for t in by_node[node]]
        t = rng.choice(frontier)
        chosen.append(t)
        touched.update((t[0], t[2]))

    node_list = sorted(touched)
    constants = set(rng.sample(node_list, min(n_constants, max(len(node_list) - 1, 0))))
    var_of = {n: f"?v{i}" for i, n in enumerate(node_list) if n not in constants}

    patterns = [
        TriplePattern(var_of.get(s, s), p, var_of.get(o, o), ordinal=i + 1)
        for i, (s, p, o) in enumerate(chosen)
    ]
    return QueryGraph(patterns, [], select_all=True)


def decoded_bag(result, dictionary) -> Counter:
    # count id tuples first so each distinct row is decoded only once
    by_ids = Counter(result.rows)
    return Counter(
        {
            tuple(dictionary.decode_node(v) for v in row): n
            for row, n in by_ids.items()
        }
    )
