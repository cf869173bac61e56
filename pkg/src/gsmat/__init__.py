"""gsmat: an embeddable RDF BGP query engine over predicate-partitioned
sparse matrices with statistics-ordered joins and a pre-allocated parallel
execution path."""

from .dictionary import TermDictionary
from .executor import BindingTable, ExecutionReport, execute
from .planner import Plan, delta_bounds, make_plan
from .qparser import QueryGraph, TriplePattern, bind_constants, parse_query
from .storage import EncodedTriple, PredicateMatrix, Store, build_store, load, persist

__all__ = [
    "TermDictionary",
    "BindingTable",
    "ExecutionReport",
    "execute",
    "Plan",
    "delta_bounds",
    "make_plan",
    "QueryGraph",
    "TriplePattern",
    "bind_constants",
    "parse_query",
    "EncodedTriple",
    "PredicateMatrix",
    "Store",
    "build_store",
    "load",
    "persist",
]

__version__ = "0.1.0"
