"""
图结构模块
"""

from .metric_graph import (
    MetricGraph,
    build_graph,
    incident_bonds,
    connected_components,
    euler_characteristic,
    incidence_matrix,
    split_edge,
    insert_degree2_vertex,
    normalize_loops,
    loop_edges,
    rev,
    bond_edge,
)

__all__ = [
    "MetricGraph",
    "build_graph",
    "incident_bonds",
    "connected_components",
    "euler_characteristic",
    "incidence_matrix",
    "split_edge",
    "insert_degree2_vertex",
    "normalize_loops",
    "loop_edges",
    "rev",
    "bond_edge",
]

from .generators import (
    interval,
    star,
    cycle,
    circle,
    rose,
    disjoint_edges,
    disjoint_union,
    random_graph,
    random_disconnected_graph,
)

__all__ += [
    "interval",
    "star",
    "cycle",
    "circle",
    "rose",
    "disjoint_edges",
    "disjoint_union",
    "random_graph",
    "random_disconnected_graph",
]
