"""Seeded synthetic N-Triples generation.

Predicate choice is Zipf-distributed; node endpoints are drawn with a
power-law bias so generated graphs keep the heavy-tailed degree profile of
real RDF data: a few hubs, a long tail of low-degree nodes.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterator

NODE_SKEW = 0.5  # power-law exponent for endpoint choice


@dataclass
class GenConfig:
    triples: int
    predicates: int
    zipf_s: float = 1.0
    seed: int = 0
    nodes: int | None = None

    def __post_init__(self) -> None:
        if self.triples < 1:
            raise ValueError("triples must be >= 1")
        if self.predicates < 1:
            raise ValueError("predicates must be >= 1")
        if self.nodes is None:
            self.nodes = max(4, self.triples // 4)


def _cumulative_weights(n: int, exponent: float) -> list[float]:
    acc = 0.0
    cum = []
    for i in range(1, n + 1):
        acc += i ** -exponent
        cum.append(acc)
    return cum


def generate_triples(cfg: GenConfig) -> Iterator[tuple[str, str, str]]:
    rng = random.Random(cfg.seed)
    pred_ids = list(range(1, cfg.predicates + 1))
    node_ids = list(range(1, (cfg.nodes or 1) + 1))
    pred_cum = _cumulative_weights(cfg.predicates, cfg.zipf_s)
    node_cum = _cumulative_weights(len(node_ids), NODE_SKEW)

    remaining = cfg.triples
    batch = 10_000
    while remaining > 0:
        k = min(batch, remaining)
        preds = rng.choices(pred_ids, cum_weights=pred_cum, k=k)
        subjects = rng.choices(node_ids, cum_weights=node_cum, k=k)
        objects = rng.choices(node_ids, cum_weights=node_cum, k=k)
        for p, s, o in zip(preds, subjects, objects):
            yield f"n{s}", f"p{p}", f"n{o}"
        remaining -= k


def generate_ntriples(cfg: GenConfig) -> Iterator[str]:
    for s, p, o in generate_triples(cfg):
        yield f"<{s}> <{p}> <{o}> ."
