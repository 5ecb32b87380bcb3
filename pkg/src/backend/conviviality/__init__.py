from src.backend.conviviality.graph import (
    ConvivialityGraph,
    ConvivialVertex,
    convivial,
    convivial_vertices,
    elementary_conviviality_graph,
    quotient_conviviality_graph,
)

__all__ = [
    "ConvivialityGraph",
    "ConvivialVertex",
    "convivial",
    "convivial_vertices",
    "elementary_conviviality_graph",
    "quotient_conviviality_graph",
]
