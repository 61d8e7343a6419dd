from .templates import (
    BOND_ORDERS,
    FREE_HEAVY_ATOMS,
    RING_COUNTS,
    SUBSTITUTIONS,
    TEMPLATES,
)
from .build import (
    DEGREE_CAP,
    EDGE_FEATURE_DIM,
    FAR_BUCKET,
    GraphBundle,
    MolecularGraph,
    NODE_FEATURE_DIM,
    PATH_CAP,
    PATH_FEATURE_DIM,
    SPD_CAP,
    UnsupportedResidueError,
    build_graph,
    canonicalize_sequence,
    degree_encoding,
    extract_path_features,
    graph_to_dict,
    hop_distances,
    mean_path_bond_features,
    prepare_graph,
    shortest_path_distances,
)
