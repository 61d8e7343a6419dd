"""Peptide graph construction checked against independent structural oracles.

Atom counts are verified against tabulated heavy-atom formulas of the free
amino acids (each peptide bond condenses out one water, i.e. one heavy atom);
shortest-path distances are verified against networkx BFS.
"""

import numpy as np
import networkx as nx
import pytest

from protbench.molgraph.build import (
    DEGREE_CAP,
    EDGE_FEATURE_DIM,
    ELEMENTS,
    FAR_BUCKET,
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
from protbench.molgraph.templates import (
    BOND_ORDERS,
    FREE_HEAVY_ATOMS,
    RING_COUNTS,
    TEMPLATES,
)

ALL_RESIDUES = "".join(sorted(TEMPLATES))


def expected_atoms(seq):
    # condensation removes one heavy atom (the water oxygen) per peptide bond
    return sum(FREE_HEAVY_ATOMS[ch] for ch in seq) - (len(seq) - 1)


def expected_rings(seq):
    return sum(RING_COUNTS[ch] for ch in seq)


def to_networkx(graph):
    g = nx.Graph()
    g.add_nodes_from(range(graph.n_atoms))
    g.add_edges_from(map(tuple, graph.edges))
    return g


class TestAtomAndBondCounts:
    @pytest.mark.parametrize("letter", list(ALL_RESIDUES))
    def test_single_residue_formula(self, letter):
        graph = build_graph(letter)
        assert graph.n_atoms == FREE_HEAVY_ATOMS[letter]
        # connected graph: bonds = atoms - 1 + independent cycles
        assert graph.n_bonds == graph.n_atoms - 1 + RING_COUNTS[letter]

    @pytest.mark.parametrize(
        "seq", ["GG", "ACDKW", "MKTWYE", "PPP", "WWHH", ALL_RESIDUES]
    )
    def test_peptide_formula(self, seq):
        graph = build_graph(seq)
        assert graph.n_atoms == expected_atoms(seq)
        assert graph.n_bonds == graph.n_atoms - 1 + expected_rings(seq)

    def test_random_peptides_formula(self):
        rng = np.random.default_rng(3)
        for _ in range(25):
            n = rng.integers(1, 15)
            seq = "".join(rng.choice(list(ALL_RESIDUES), size=n))
            graph = build_graph(seq)
            assert graph.n_atoms == expected_atoms(seq)
            assert graph.n_bonds == graph.n_atoms - 1 + expected_rings(seq)

    def test_glycine_exact_structure(self):
        graph = build_graph("G")
        assert graph.atom_names == [
            "0:G:N", "0:G:CA", "0:G:C", "0:G:O", "0:G:OXT"
        ]
        bonds = {tuple(e) for e in graph.edges}
        assert bonds == {(0, 1), (1, 2), (2, 3), (2, 4)}
        # C=O carbonyl is the only double bond
        orders = [BOND_ORDERS[int(np.argmax(f))] for f in graph.edge_features]
        assert orders.count("double") == 1

    def test_oxt_bonded_to_final_backbone_carbon(self):
        graph = build_graph("AG")
        oxt = graph.atom_names.index("1:G:OXT")
        c_last = graph.atom_names.index("1:G:C")
        assert {tuple(sorted((oxt, c_last)))} <= {tuple(e) for e in graph.edges}
        assert graph.degrees[oxt] == 1

    def test_peptide_bond_links_c_to_next_n(self):
        graph = build_graph("AG")
        c0 = graph.atom_names.index("0:A:C")
        n1 = graph.atom_names.index("1:G:N")
        assert tuple(sorted((c0, n1))) in {tuple(e) for e in graph.edges}

    def test_proline_ring_closure(self):
        graph = build_graph("P")
        n_idx = graph.atom_names.index("0:P:N")
        cd = graph.atom_names.index("0:P:CD")
        assert tuple(sorted((n_idx, cd))) in {tuple(e) for e in graph.edges}
        assert graph.degrees[n_idx] == 2


class TestNodeAndEdgeFeatures:
    def test_node_feature_layout(self):
        graph = build_graph("ACW")
        assert graph.node_features.shape == (graph.n_atoms, NODE_FEATURE_DIM)
        # one element slot and one degree slot per atom
        np.testing.assert_array_equal(
            graph.node_features[:, : len(ELEMENTS)].sum(axis=1), 1.0
        )
        np.testing.assert_array_equal(
            graph.node_features[:, len(ELEMENTS) : len(ELEMENTS) + DEGREE_CAP]
            .sum(axis=1),
            1.0,
        )

    def test_element_one_hot_matches_names(self):
        graph = build_graph("CM")  # two sulfur atoms
        s_col = ELEMENTS.index("S")
        s_atoms = [
            i for i, nm in enumerate(graph.atom_names)
            if nm.endswith(":SG") or nm.endswith(":SD")
        ]
        assert len(s_atoms) == 2
        assert all(graph.node_features[i, s_col] == 1.0 for i in s_atoms)

    def test_aromatic_flag(self):
        graph = build_graph("F")
        arom = graph.node_features[:, -1]
        assert int(arom.sum()) == 6  # benzene ring of phenylalanine
        ca = graph.atom_names.index("0:F:CA")
        assert arom[ca] == 0.0

    def test_edge_features_one_hot(self):
        graph = build_graph("WDE")
        assert graph.edge_features.shape == (graph.n_bonds, EDGE_FEATURE_DIM)
        np.testing.assert_array_equal(graph.edge_features.sum(axis=1), 1.0)

    def test_degree_matches_adjacency(self):
        graph = build_graph("RHW")
        np.testing.assert_array_equal(
            graph.degrees, graph.adjacency().sum(axis=0)
        )

    def test_degree_encoding_capped(self):
        graph = build_graph("VIT")  # branched side chains reach degree 4
        enc = degree_encoding(graph)
        assert enc.max() <= DEGREE_CAP
        np.testing.assert_array_equal(
            enc, np.minimum(graph.degrees, DEGREE_CAP)
        )


class TestDistances:
    @pytest.mark.parametrize("seq", ["A", "GG", "ACDKW", "WPH"])
    def test_bfs_matches_networkx(self, seq):
        graph = build_graph(seq)
        dist = hop_distances(graph)
        ref = dict(nx.all_pairs_shortest_path_length(to_networkx(graph)))
        for u in range(graph.n_atoms):
            for v in range(graph.n_atoms):
                assert dist[u, v] == ref[u][v]

    def test_spd_bucketing(self):
        seq = "A" * 12  # long enough for >20-hop pairs along the backbone
        graph = build_graph(seq)
        dist = hop_distances(graph)
        spd = shortest_path_distances(graph, dist)
        assert dist.max() > SPD_CAP
        assert spd.max() == FAR_BUCKET
        far = dist > SPD_CAP
        np.testing.assert_array_equal(spd[far], FAR_BUCKET)
        np.testing.assert_array_equal(spd[~far], dist[~far])

    def test_distance_is_metric(self):
        graph = build_graph("MKTW")
        dist = hop_distances(graph)
        np.testing.assert_array_equal(dist, dist.T)
        np.testing.assert_array_equal(np.diag(dist), 0)


class TestPathFeatures:
    def test_shapes_and_in_range(self):
        graph = build_graph("ACDKW")
        dist = hop_distances(graph)
        feats, in_range = extract_path_features(graph, dist)
        n = graph.n_atoms
        assert feats.shape == (n, n, PATH_FEATURE_DIM)
        np.testing.assert_array_equal(in_range, dist <= PATH_CAP)
        # out-of-range pairs carry no features at all
        np.testing.assert_array_equal(feats[~in_range], 0.0)

    def test_distance_one_hot_slot(self):
        graph = build_graph("AC")
        dist = hop_distances(graph)
        feats, in_range = extract_path_features(graph, dist)
        base = PATH_CAP * EDGE_FEATURE_DIM
        for u in range(graph.n_atoms):
            for v in range(graph.n_atoms):
                if in_range[u, v]:
                    one_hot = feats[u, v, base:]
                    assert one_hot.sum() == 1.0
                    assert one_hot[dist[u, v]] == 1.0

    def test_step_features_match_brute_force(self):
        """Each step's one-hot must equal the bond feature of SOME shortest
        path edge; verified by enumerating all shortest paths with networkx."""
        graph = build_graph("DW")
        dist = hop_distances(graph)
        feats, in_range = extract_path_features(graph, dist)
        g = to_networkx(graph)
        bond_feat = {}
        for (u, v), f in zip(graph.edges, graph.edge_features):
            bond_feat[(u, v)] = f
            bond_feat[(v, u)] = f
        for u in range(graph.n_atoms):
            for v in range(graph.n_atoms):
                d = dist[u, v]
                if not in_range[u, v] or u == v:
                    continue
                paths = list(nx.all_shortest_paths(g, u, v))
                candidates = []
                for path in paths:
                    steps = np.concatenate(
                        [bond_feat[(path[i], path[i + 1])] for i in range(d)]
                    )
                    candidates.append(steps)
                actual = feats[u, v, : d * EDGE_FEATURE_DIM]
                assert any(
                    np.array_equal(actual, c) for c in candidates
                ), f"pair ({u},{v}) features match no shortest path"
                # padding beyond the path length stays zero
                np.testing.assert_array_equal(
                    feats[u, v, d * EDGE_FEATURE_DIM : PATH_CAP * EDGE_FEATURE_DIM],
                    0.0,
                )

    def test_lexicographic_tie_break_is_deterministic(self):
        graph = build_graph("F")  # ring creates equal-length path pairs
        f1, _ = extract_path_features(graph)
        f2, _ = extract_path_features(graph)
        np.testing.assert_array_equal(f1, f2)

    def test_mean_bond_features(self):
        graph = build_graph("AD")
        dist = hop_distances(graph)
        feats, _ = extract_path_features(graph, dist)
        mean = mean_path_bond_features(graph, dist, feats)
        for u in range(graph.n_atoms):
            for v in range(graph.n_atoms):
                d = dist[u, v]
                if 0 < d <= PATH_CAP:
                    expect = feats[u, v, : d * EDGE_FEATURE_DIM].reshape(
                        d, EDGE_FEATURE_DIM
                    ).mean(axis=0)
                    np.testing.assert_allclose(mean[u, v], expect)
                else:
                    np.testing.assert_array_equal(mean[u, v], 0.0)


class TestCanonicalization:
    @pytest.mark.parametrize(
        "code,target", [("B", "N"), ("Z", "Q"), ("U", "C"), ("O", "K")]
    )
    def test_substitutions(self, code, target):
        assert canonicalize_sequence(f"A{code}G") == f"A{target}G"
        g1 = build_graph(f"A{code}G")
        g2 = build_graph(f"A{target}G")
        assert g1.n_atoms == g2.n_atoms
        np.testing.assert_array_equal(g1.node_features, g2.node_features)

    def test_lowercase_accepted(self):
        assert canonicalize_sequence("acd") == "ACD"

    @pytest.mark.parametrize("bad", ["X", "J", "A1C", "AXC"])
    def test_unsupported_residue_raises_with_position(self, bad):
        with pytest.raises(UnsupportedResidueError, match="position"):
            canonicalize_sequence(bad)

    def test_empty_raises(self):
        with pytest.raises(UnsupportedResidueError):
            canonicalize_sequence("")


class TestBundleAndDump:
    def test_prepare_graph_consistency(self):
        bundle = prepare_graph("ACD")
        n = bundle.graph.n_atoms
        assert bundle.spd.shape == (n, n)
        assert bundle.degrees.shape == (n,)
        assert bundle.path_features.shape == (n, n, PATH_FEATURE_DIM)
        assert bundle.path_in_range.shape == (n, n)
        assert bundle.mean_bond.shape == (n, n, EDGE_FEATURE_DIM)

    def test_graph_to_dict_round_trip_counts(self):
        graph = build_graph("WH")
        dump = graph_to_dict(graph)
        assert dump["n_atoms"] == graph.n_atoms
        assert dump["n_bonds"] == graph.n_bonds
        assert len(dump["atoms"]) == graph.n_atoms
        assert len(dump["bonds"]) == graph.n_bonds
        assert all(b["order"] in BOND_ORDERS for b in dump["bonds"])
        import json

        json.dumps(dump)  # must be JSON-serializable as-is
