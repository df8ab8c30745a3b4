"""Loose Hamiltonian ell-cycles in k-uniform hypergraphs at desk scale."""
from .hgraph import (Hypergraph, HypergraphError, ImplicitHypergraph, InvalidQueryError,
                     ParseError, complete, empty, parse_khg, format_khg, read_khg, write_khg)
from .walks import EllWalk, WalkEnds, WalkError, ends, validate, validate_cycle, validate_path

__all__ = [
    "Hypergraph", "HypergraphError", "ImplicitHypergraph", "InvalidQueryError", "ParseError",
    "complete", "empty", "parse_khg", "format_khg", "read_khg", "write_khg",
    "EllWalk", "WalkEnds", "WalkError", "ends", "validate", "validate_cycle", "validate_path",
]

__version__ = "0.1.0"
