"""Statistics-ordered join planning.

The strategy is greedy: start from the pattern with the smallest estimated
cardinality, then repeatedly take the cheapest remaining pattern that shares
an endpoint (variable or constant) with what has been planned so far.  A
disconnected query is planned per connected component, cheapest component
first, and each forced cross product is recorded as a warning.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .qparser import EncodedPattern, EncodedQuery
from .storage import StatEntry

_SATURATE = (1 << 63) - 1


def _sat_mul(a: int, b: int) -> int:
    r = a * b
    return r if r <= _SATURATE else _SATURATE


def _sat_add(a: int, b: int) -> int:
    r = a + b
    return r if r <= _SATURATE else _SATURATE


@dataclass(frozen=True)
class CostBounds:
    lower: int
    upper: int


def delta_bounds(cards: list[int]) -> CostBounds:
    """Bounds on the total intermediate-result count of a left-deep join.

    Lower: sum of running minima; upper: sum of running products.  Both sums
    start at the second relation; a single relation bounds to itself.
    """
    if not cards:
        raise ValueError("delta_bounds requires at least one cardinality")
    if len(cards) == 1:
        return CostBounds(cards[0], cards[0])
    lower = 0
    upper = 0
    run_min = cards[0]
    run_prod = cards[0]
    for c in cards[1:]:
        run_min = min(run_min, c)
        run_prod = _sat_mul(run_prod, c)
        lower = _sat_add(lower, run_min)
        upper = _sat_add(upper, run_prod)
    return CostBounds(lower, upper)


def estimate_cardinality(pattern: EncodedPattern, stats: dict[int, StatEntry]) -> int:
    """Estimated matches: predicate cardinality shrunk by constant endpoints."""
    if pattern.empty:
        return 0
    st = stats.get(pattern.p)
    if st is None:
        return 0
    est = st.cardinality
    if isinstance(pattern.s, int) and st.distinct_subjects > 0:
        est = -(-est // st.distinct_subjects)
    if isinstance(pattern.o, int) and st.distinct_objects > 0:
        est = -(-est // st.distinct_objects)
    return max(est, 1) if isinstance(pattern.s, int) and isinstance(pattern.o, int) else est


@dataclass
class PlanStep:
    pattern: EncodedPattern
    estimate: int
    join_vars: list[str]  # variables shared with the union of prior steps


@dataclass
class Plan:
    steps: list[PlanStep]
    warnings: list[str] = field(default_factory=list)

    @property
    def estimates(self) -> list[int]:
        return [s.estimate for s in self.steps]


def _components(patterns: list[EncodedPattern]) -> list[list[EncodedPattern]]:
    """Group patterns connected through shared endpoints (vars or constants)."""
    parent = list(range(len(patterns)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    by_node: dict[object, int] = {}
    for i, pat in enumerate(patterns):
        for node in pat.nodes():
            if node in by_node:
                parent[find(i)] = find(by_node[node])
            else:
                by_node[node] = i
    groups: dict[int, list[EncodedPattern]] = {}
    for i, pat in enumerate(patterns):
        groups.setdefault(find(i), []).append(pat)
    return list(groups.values())


def _plan_component(
    ranked: list[tuple[int, EncodedPattern]], warnings: list[str]
) -> list[tuple[int, EncodedPattern]]:
    """Greedy order within one connected component of the query graph."""
    remaining = list(ranked)
    ordered = [remaining.pop(0)]
    nodes: set[object] = set(ordered[0][1].nodes())
    while remaining:
        chosen = None
        for idx, (est, pat) in enumerate(remaining):
            if any(n in nodes for n in pat.nodes()):
                chosen = idx
                break
        if chosen is None:
            chosen = 0
            warnings.append(
                f"no connected pattern available; Cartesian product forced at "
                f"pattern {remaining[0][1].ordinal}"
            )
        est, pat = remaining.pop(chosen)
        nodes.update(pat.nodes())
        ordered.append((est, pat))
    return ordered


def make_plan(query: EncodedQuery, stats: dict[int, StatEntry]) -> Plan:
    """Order the query's patterns by the connected-minimal-upper-bound rule."""
    if not query.patterns:
        raise ValueError("cannot plan an empty query")
    warnings: list[str] = []

    components = _components(query.patterns)
    planned_components: list[list[tuple[int, EncodedPattern]]] = []
    for comp in components:
        ranked = sorted(
            ((estimate_cardinality(p, stats), p) for p in comp),
            key=lambda ep: (ep[0], ep[1].ordinal),
        )
        planned_components.append(_plan_component(ranked, warnings))
    planned_components.sort(key=lambda c: (c[0][0], c[0][1].ordinal))
    if len(planned_components) > 1:
        warnings.append(
            f"query graph has {len(planned_components)} components; "
            f"cross products between components are unavoidable"
        )

    steps: list[PlanStep] = []
    seen_vars: set[str] = set()
    for comp in planned_components:
        for est, pat in comp:
            shared = [v for v in pat.variables() if v in seen_vars]
            steps.append(PlanStep(pat, est, shared))
            seen_vars.update(pat.variables())
    return Plan(steps, warnings)


def explain_lines(plan: Plan) -> list[str]:
    """Tab-separated explain rows: step, pattern, estimate, join vars, bounds."""
    lines = []
    for i, step in enumerate(plan.steps, start=1):
        bounds = delta_bounds(plan.estimates[:i])
        joinvars = ",".join(step.join_vars) if step.join_vars else "-"
        lines.append(
            f"{i}\t{step.pattern.source.text()}\t{step.estimate}\t{joinvars}"
            f"\t{bounds.upper}\t{bounds.lower}"
        )
    return lines
