"""Peptide molecular graph construction and graph-transformer feature maps."""

from collections import deque
from dataclasses import dataclass

import numpy as np

from .templates import BOND_ORDERS, SUBSTITUTIONS, TEMPLATES

ELEMENTS = ("C", "N", "O", "S")
DEGREE_CAP = 4
SPD_CAP = 20  # hop distances above this collapse into the "far" bucket
FAR_BUCKET = SPD_CAP + 1
PATH_CAP = 5  # maximum hop distance carrying explicit path features
NODE_FEATURE_DIM = len(ELEMENTS) + DEGREE_CAP + 1
EDGE_FEATURE_DIM = len(BOND_ORDERS)
PATH_FEATURE_DIM = PATH_CAP * EDGE_FEATURE_DIM + (PATH_CAP + 1)


class UnsupportedResidueError(ValueError):
    pass


@dataclass
class MolecularGraph:
    n_atoms: int
    node_features: np.ndarray  # [N, NODE_FEATURE_DIM]
    edges: np.ndarray  # [n_bonds, 2] undirected, a < b
    edge_features: np.ndarray  # [n_bonds, EDGE_FEATURE_DIM]
    atom_residue: np.ndarray  # [N] residue index per atom
    atom_names: list
    degrees: np.ndarray  # [N] true degrees (uncapped)

    @property
    def n_bonds(self):
        return len(self.edges)

    def adjacency(self):
        a = np.zeros((self.n_atoms, self.n_atoms), dtype=bool)
        for u, v in self.edges:
            a[u, v] = a[v, u] = True
        return a

    def neighbor_lists(self):
        nbrs = [[] for _ in range(self.n_atoms)]
        for u, v in self.edges:
            nbrs[u].append(v)
            nbrs[v].append(u)
        return [sorted(n) for n in nbrs]


def canonicalize_sequence(sequence):
    """Apply ambiguity substitutions; reject residues without a template."""
    if not sequence:
        raise UnsupportedResidueError("empty sequence")
    out = []
    for pos, ch in enumerate(sequence.upper()):
        ch = SUBSTITUTIONS.get(ch, ch)
        if ch not in TEMPLATES:
            raise UnsupportedResidueError(
                f"unsupported residue {ch!r} at position {pos}"
            )
        out.append(ch)
    return "".join(out)


def build_graph(sequence):
    """Instantiate residue templates and join them with peptide bonds.

    Heavy atoms only; the C-terminal carboxyl contributes one extra oxygen
    bonded to the final backbone C.
    """
    seq = canonicalize_sequence(sequence)
    atom_elem = []
    atom_arom = []
    atom_names = []
    atom_residue = []
    bonds = []  # (u, v, order index)
    prev_c = None
    for ri, letter in enumerate(seq):
        tpl = TEMPLATES[letter]
        base = len(atom_elem)
        index = {}
        for name, elem, arom in tpl.atoms:
            index[name] = base + len(index)
            atom_elem.append(elem)
            atom_arom.append(arom)
            atom_names.append(f"{ri}:{letter}:{name}")
            atom_residue.append(ri)
        for a, b, order in tpl.bonds:
            bonds.append((index[a], index[b], BOND_ORDERS.index(order)))
        if prev_c is not None:
            bonds.append((prev_c, index["N"], BOND_ORDERS.index("single")))
        prev_c = index["C"]
    # C-terminal carboxyl oxygen
    oxt = len(atom_elem)
    atom_elem.append("O")
    atom_arom.append(False)
    atom_names.append(f"{len(seq) - 1}:{seq[-1]}:OXT")
    atom_residue.append(len(seq) - 1)
    bonds.append((prev_c, oxt, BOND_ORDERS.index("single")))

    n = len(atom_elem)
    degrees = np.zeros(n, dtype=np.int64)
    edges = []
    edge_features = np.zeros((len(bonds), EDGE_FEATURE_DIM))
    for i, (u, v, oi) in enumerate(bonds):
        degrees[u] += 1
        degrees[v] += 1
        edges.append((min(u, v), max(u, v)))
        edge_features[i, oi] = 1.0

    node_features = np.zeros((n, NODE_FEATURE_DIM))
    for i in range(n):
        node_features[i, ELEMENTS.index(atom_elem[i])] = 1.0
        deg_slot = min(degrees[i], DEGREE_CAP) - 1
        node_features[i, len(ELEMENTS) + deg_slot] = 1.0
        node_features[i, -1] = float(atom_arom[i])

    return MolecularGraph(
        n_atoms=n,
        node_features=node_features,
        edges=np.array(edges, dtype=np.int64),
        edge_features=edge_features,
        atom_residue=np.array(atom_residue, dtype=np.int64),
        atom_names=atom_names,
        degrees=degrees,
    )


def hop_distances(graph):
    """Exact all-pairs BFS hop distances (uncapped)."""
    n = graph.n_atoms
    nbrs = graph.neighbor_lists()
    dist = np.full((n, n), -1, dtype=np.int64)
    for src in range(n):
        dist[src, src] = 0
        queue = deque([src])
        while queue:
            u = queue.popleft()
            for v in nbrs[u]:
                if dist[src, v] < 0:
                    dist[src, v] = dist[src, u] + 1
                    queue.append(v)
    if (dist < 0).any():
        raise AssertionError("peptide graph must be connected")
    return dist


def shortest_path_distances(graph, dist=None):
    """Hop distances bucketed at the cap: values > SPD_CAP map to FAR_BUCKET."""
    if dist is None:
        dist = hop_distances(graph)
    return np.where(dist > SPD_CAP, FAR_BUCKET, dist)


def degree_encoding(graph):
    """Per-node degree indices for centrality embeddings, capped at 4."""
    return np.minimum(graph.degrees, DEGREE_CAP)


def _lex_shortest_path(u, v, dist, nbrs):
    """Lexicographically smallest node sequence among shortest u->v paths."""
    path = [u]
    cur = u
    while cur != v:
        nxt = min(w for w in nbrs[cur] if dist[w, v] == dist[cur, v] - 1)
        path.append(nxt)
        cur = nxt
    return path


def extract_path_features(graph, dist=None):
    """Bond-order features along one shortest path per close node pair.

    Pairs at hop distance <= PATH_CAP get the concatenated bond features of
    the lexicographically smallest shortest path, zero-padded to PATH_CAP
    slots, plus a one-hot of the distance.  Farther pairs are marked
    out-of-range.  Returns ``(features [N,N,PATH_FEATURE_DIM], in_range
    [N,N])``.
    """
    if dist is None:
        dist = hop_distances(graph)
    n = graph.n_atoms
    nbrs = graph.neighbor_lists()
    bond_feat = {}
    for (u, v), feat in zip(graph.edges, graph.edge_features):
        bond_feat[(u, v)] = feat
        bond_feat[(v, u)] = feat
    features = np.zeros((n, n, PATH_FEATURE_DIM))
    in_range = dist <= PATH_CAP
    for u in range(n):
        for v in range(n):
            d = dist[u, v]
            if d > PATH_CAP:
                continue
            if u != v:
                path = _lex_shortest_path(u, v, dist, nbrs)
                for step in range(d):
                    lo = step * EDGE_FEATURE_DIM
                    features[u, v, lo : lo + EDGE_FEATURE_DIM] = bond_feat[
                        (path[step], path[step + 1])
                    ]
            features[u, v, PATH_CAP * EDGE_FEATURE_DIM + d] = 1.0
    return features, in_range


def mean_path_bond_features(graph, dist, features):
    """Mean bond-order one-hot along the shortest path, zero for far pairs."""
    n = graph.n_atoms
    out = np.zeros((n, n, EDGE_FEATURE_DIM))
    for u in range(n):
        for v in range(n):
            d = dist[u, v]
            if 0 < d <= PATH_CAP:
                slots = features[u, v, : d * EDGE_FEATURE_DIM]
                out[u, v] = slots.reshape(d, EDGE_FEATURE_DIM).mean(axis=0)
    return out


@dataclass
class GraphBundle:
    """Everything the graph encoders need, computed once per sequence."""

    graph: MolecularGraph
    spd: np.ndarray
    degrees: np.ndarray
    path_features: np.ndarray
    path_in_range: np.ndarray
    mean_bond: np.ndarray


def prepare_graph(sequence):
    graph = build_graph(sequence)
    dist = hop_distances(graph)
    pf, pr = extract_path_features(graph, dist)
    return GraphBundle(
        graph=graph,
        spd=shortest_path_distances(graph, dist),
        degrees=degree_encoding(graph),
        path_features=pf,
        path_in_range=pr,
        mean_bond=mean_path_bond_features(graph, dist, pf),
    )


def graph_to_dict(graph):
    """JSON-friendly dump used by the ``graph-dump`` CLI subcommand."""
    return {
        "n_atoms": int(graph.n_atoms),
        "n_bonds": int(graph.n_bonds),
        "atoms": [
            {
                "name": graph.atom_names[i],
                "residue": int(graph.atom_residue[i]),
                "degree": int(graph.degrees[i]),
                "features": graph.node_features[i].tolist(),
            }
            for i in range(graph.n_atoms)
        ],
        "bonds": [
            {
                "atoms": [int(u), int(v)],
                "order": BOND_ORDERS[int(np.argmax(f))],
            }
            for (u, v), f in zip(graph.edges, graph.edge_features)
        ],
    }
