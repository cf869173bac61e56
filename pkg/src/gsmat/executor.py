"""Plan evaluation by iterated sparse-matrix joins.

Each plan step scans one predicate matrix into a binding table, then joins
it into the accumulated table on their shared variables.  The first shared
variable drives the matching (via hash grouping, the in-memory equivalent of
walking the auxiliary arrays); any remaining shared variables are checked as
secondary predicates before a row is emitted.

The parallel path mirrors the sequential one but first sizes a per-group
output region from first-variable match counts and their prefix sums, so
workers write into disjoint slices and a compaction pass drops the slots
lost to secondary-variable mismatches.
"""

from __future__ import annotations

import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .errors import ResourceLimitError
from .planner import Plan
from .qparser import EncodedPattern, EncodedQuery
from .storage import PredicateMatrix, Store

DEFAULT_ROW_BUDGET = 10**8

# Worker pools are cheap to keep around and expensive to rebuild per join.
_POOLS: dict[int, ThreadPoolExecutor] = {}


def _pool(worker_count: int) -> ThreadPoolExecutor:
    pool = _POOLS.get(worker_count)
    if pool is None:
        pool = _POOLS[worker_count] = ThreadPoolExecutor(max_workers=worker_count)
    return pool


@dataclass
class BindingTable:
    """An n-ary relation over variables, bag semantics."""

    schema: tuple[str, ...]
    rows: list[tuple[int, ...]]
    sorted_by: str | None = None

    def __len__(self) -> int:
        return len(self.rows)


@dataclass
class PreallocPlan:
    """Output-region sizing for one join, per left-key group.

    ``counts[i]`` is the number of first-variable matches group i can emit
    and ``offsets[i]`` its exclusive-prefix-sum start slot; rows lost to
    secondary join variables leave holes that compaction removes.
    """

    keys: list[int]
    counts: list[int]  # N
    offsets: list[int]  # P
    total: int


@dataclass
class StepReport:
    pattern_text: str
    rows: int
    prealloc_total: int
    seconds: float


@dataclass
class ExecutionReport:
    steps: list[StepReport] = field(default_factory=list)
    preparations: int = 0
    uses: int = 0

    @property
    def intermediate_total(self) -> int:
        return sum(s.rows for s in self.steps)

    def lines(self) -> list[str]:
        out = [
            f"{i}\t{s.pattern_text}\t{s.rows}\t{s.prealloc_total}\t{s.seconds:.6f}"
            for i, s in enumerate(self.steps, start=1)
        ]
        out.append(f"preparations\t{self.preparations}\tuses\t{self.uses}")
        return out


def scan(pattern: EncodedPattern, matrix: PredicateMatrix | None) -> BindingTable:
    """Materialize one triple pattern as a binding table.

    Constant endpoints filter through the matrix row indexes; a pattern
    flagged empty (term unknown to the dictionary) yields zero rows.
    """
    s, o = pattern.s, pattern.o
    s_var = isinstance(s, str)
    o_var = isinstance(o, str)
    schema: tuple[str, ...]
    if s_var and o_var:
        schema = (s,) if s == o else (s, o)
    elif s_var:
        schema = (s,)
    elif o_var:
        schema = (o,)
    else:
        schema = ()

    if pattern.empty or matrix is None:
        return BindingTable(schema, [])

    if s_var and o_var:
        if s == o:
            rows = [(a,) for a, b in matrix.so_pairs if a == b]
        else:
            rows = list(matrix.so_pairs)
    elif s_var:
        rows = [(a,) for _, a in matrix.pairs_for_object(o)]
    elif o_var:
        rows = [(b,) for _, b in matrix.pairs_for_subject(s)]
    else:
        rows = [()] if matrix.contains(s, o) else []
    return BindingTable(schema, rows)


def regroup(table: BindingTable, var: str) -> BindingTable:
    """Stable-group rows by ``var`` (first-occurrence key order)."""
    idx = table.schema.index(var)
    buckets: dict[int, list[tuple[int, ...]]] = {}
    for row in table.rows:
        buckets.setdefault(row[idx], []).append(row)
    rows = [row for bucket in buckets.values() for row in bucket]
    return BindingTable(table.schema, rows, sorted_by=var)


def _join_layout(left: BindingTable, right: BindingTable, join_vars: list[str]):
    li = left.schema.index(join_vars[0])
    ri = right.schema.index(join_vars[0])
    secondary = [
        (left.schema.index(v), right.schema.index(v)) for v in join_vars[1:]
    ]
    left_set = set(left.schema)
    rcols = [i for i, v in enumerate(right.schema) if v not in left_set]
    schema = left.schema + tuple(right.schema[i] for i in rcols)
    groups: dict[int, list[tuple[int, ...]]] = {}
    for row in right.rows:
        groups.setdefault(row[ri], []).append(row)
    return li, secondary, rcols, schema, groups


def cross_product(
    left: BindingTable, right: BindingTable, row_budget: int = DEFAULT_ROW_BUDGET
) -> BindingTable:
    total = len(left.rows) * len(right.rows)
    if total > row_budget:
        raise ResourceLimitError(
            f"cross product of {len(left.rows)} x {len(right.rows)} rows exceeds "
            f"budget {row_budget}"
        )
    rows = [lr + rr for lr in left.rows for rr in right.rows]
    return BindingTable(left.schema + right.schema, rows)


def sm_join(
    left: BindingTable,
    right: BindingTable,
    join_vars: list[str],
    row_budget: int = DEFAULT_ROW_BUDGET,
) -> BindingTable:
    """Hash join on the first shared variable, bag semantics.

    ``join_vars`` must be ordered by position in the left schema; variables
    past the first are checked per candidate pair.
    """
    if not join_vars:
        return cross_product(left, right, row_budget)
    li, secondary, rcols, schema, groups = _join_layout(left, right, join_vars)
    rows: list[tuple[int, ...]] = []
    empty: tuple = ()
    for lrow in left.rows:
        candidates = groups.get(lrow[li], empty)
        if not secondary:
            rows.extend(lrow + tuple(rrow[i] for i in rcols) for rrow in candidates)
        else:
            for rrow in candidates:
                if all(lrow[a] == rrow[b] for a, b in secondary):
                    rows.append(lrow + tuple(rrow[i] for i in rcols))
        if len(rows) > row_budget:
            raise ResourceLimitError(f"join output exceeds row budget {row_budget}")
    return BindingTable(schema, rows)


def preallocate(
    left: BindingTable, right: BindingTable, first_var: str
) -> PreallocPlan:
    """Size per-group output regions from first-variable match counts."""
    li = left.schema.index(first_var)
    ri = right.schema.index(first_var)
    right_counts = Counter(row[ri] for row in right.rows)
    group_sizes: dict[int, int] = {}
    for row in left.rows:
        key = row[li]
        group_sizes[key] = group_sizes.get(key, 0) + 1
    keys = list(group_sizes)
    counts = [group_sizes[k] * right_counts.get(k, 0) for k in keys]
    offsets: list[int] = []
    acc = 0
    for n in counts:
        offsets.append(acc)
        acc += n
    return PreallocPlan(keys, counts, offsets, acc)


def parallel_sm_join(
    left: BindingTable,
    right: BindingTable,
    join_vars: list[str],
    worker_count: int = 1,
    prealloc: PreallocPlan | None = None,
    row_budget: int = DEFAULT_ROW_BUDGET,
) -> BindingTable:
    """Bag-equal to :func:`sm_join`, filling a pre-allocated output region.

    Left-key groups are partitioned over workers; each group writes only into
    its own slice, then compaction drops unfilled slots.  With one worker the
    compacted output order equals the sequential order when the left table is
    grouped on the first join variable.
    """
    if not join_vars:
        return cross_product(left, right, row_budget)
    if prealloc is None:
        prealloc = preallocate(left, right, join_vars[0])
    if prealloc.total > row_budget:
        raise ResourceLimitError(
            f"pre-allocated join region of {prealloc.total} rows exceeds "
            f"budget {row_budget}"
        )
    li, secondary, rcols, schema, groups = _join_layout(left, right, join_vars)

    left_groups: dict[int, list[tuple[int, ...]]] = {k: [] for k in prealloc.keys}
    for row in left.rows:
        left_groups[row[li]].append(row)

    out: list[tuple[int, ...] | None] = [None] * prealloc.total

    def fill(group_range: range) -> None:
        for gi in group_range:
            key = prealloc.keys[gi]
            slot = prealloc.offsets[gi]
            candidates = groups.get(key, ())
            if not secondary:
                for lrow in left_groups[key]:
                    for rrow in candidates:
                        out[slot] = lrow + tuple(rrow[i] for i in rcols)
                        slot += 1
            else:
                for lrow in left_groups[key]:
                    for rrow in candidates:
                        if all(lrow[a] == rrow[b] for a, b in secondary):
                            out[slot] = lrow + tuple(rrow[i] for i in rcols)
                        slot += 1

    n_groups = len(prealloc.keys)
    if worker_count <= 1 or n_groups <= 1:
        fill(range(n_groups))
    else:
        chunk = -(-n_groups // worker_count)
        ranges = [
            range(start, min(start + chunk, n_groups))
            for start in range(0, n_groups, chunk)
        ]
        list(_pool(worker_count).map(fill, ranges))

    # Without secondary variables every slot is filled, so no holes to drop.
    rows = out if not secondary else [r for r in out if r is not None]
    return BindingTable(schema, rows)


def match_counts(
    left: BindingTable, right: BindingTable, join_vars: list[str]
) -> Counter:
    """Join result projected away from the join variables, with multiplicities.

    This reproduces the value cells of the boolean sparse-matrix product:
    partial products that agree on the non-join columns accumulate.
    """
    joined = sm_join(left, right, join_vars)
    keep = [i for i, v in enumerate(joined.schema) if v not in join_vars]
    return Counter(tuple(row[i] for i in keep) for row in joined.rows)


def execute(
    query: EncodedQuery,
    plan: Plan,
    store: Store,
    mode: str = "sequential",
    worker_count: int = 1,
    row_budget: int = DEFAULT_ROW_BUDGET,
    report: ExecutionReport | None = None,
) -> BindingTable:
    """Evaluate a plan and project the result onto the query's projection.

    Predicate matrices referenced by several steps are prepared once and
    reused; the report records preparation and use counts per execution.
    """
    if mode not in ("sequential", "parallel"):
        raise ValueError(f"unknown mode {mode!r}")
    if not plan.steps:
        raise ValueError("cannot execute an empty plan")

    prepared: dict[int, PredicateMatrix | None] = {}

    def matrix_of(pattern: EncodedPattern) -> PredicateMatrix | None:
        pid = pattern.p
        if pid not in prepared:
            prepared[pid] = store.matrices.get(pid)
            if report is not None:
                report.preparations += 1
        if report is not None:
            report.uses += 1
        return prepared[pid]

    def record(pattern: EncodedPattern, table: BindingTable, prealloc_total: int, t0: float):
        if report is not None:
            report.steps.append(
                StepReport(
                    pattern.source.text(), len(table), prealloc_total, time.perf_counter() - t0
                )
            )

    t0 = time.perf_counter()
    first = plan.steps[0].pattern
    current = scan(first, matrix_of(first))
    record(first, current, 0, t0)

    for step in plan.steps[1:]:
        t0 = time.perf_counter()
        right = scan(step.pattern, matrix_of(step.pattern))
        join_vars = [v for v in current.schema if v in set(right.schema)]
        if not join_vars:
            current = cross_product(current, right, row_budget)
            record(step.pattern, current, 0, t0)
            continue
        current = regroup(current, join_vars[0])
        prealloc = preallocate(current, right, join_vars[0])
        if mode == "parallel":
            current = parallel_sm_join(
                current, right, join_vars, worker_count, prealloc, row_budget
            )
        else:
            current = sm_join(current, right, join_vars, row_budget)
        record(step.pattern, current, prealloc.total, t0)

    proj_idx = [current.schema.index(v) for v in query.projection]
    rows = [tuple(row[i] for i in proj_idx) for row in current.rows]
    if query.distinct:
        seen: set[tuple[int, ...]] = set()
        deduped = []
        for row in rows:
            if row not in seen:
                seen.add(row)
                deduped.append(row)
        rows = deduped
    return BindingTable(tuple(query.projection), rows)
