"""Sparse random-graph ensembles, triangle census and density-of-triangles bounds."""

from .census import CensusReport, TriangleRecord, census, count_kout, count_undirected
from .ensembles import EnsembleSpec, count, enumerate_graphs, sample
from .graphs import EdgeRef, KOutDigraph, UndirectedGraph, read_edge_list, validate, write_edge_list

__version__ = "0.1.0"

__all__ = [
    "CensusReport",
    "EdgeRef",
    "EnsembleSpec",
    "KOutDigraph",
    "TriangleRecord",
    "UndirectedGraph",
    "census",
    "count",
    "count_kout",
    "count_undirected",
    "enumerate_graphs",
    "read_edge_list",
    "sample",
    "validate",
    "write_edge_list",
]
