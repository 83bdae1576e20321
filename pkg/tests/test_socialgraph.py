"""Graph construction, pruning, components, and neighborhood queries.

The neighborhood and component tests check the library against plain
BFS / union-find oracles written inline, on randomly generated graphs.
"""

from collections import deque

import numpy as np
import pytest

from socialstance.errors import InputDataError
from socialstance.socialgraph import (
    InteractionRecord,
    SocialGraph,
    WeightedGraph,
    build_interaction_graph,
    build_social_graph,
    exact_order_neighborhood,
    graph_stats,
    induced_subgraph,
    khop_neighborhood,
    largest_weakly_connected_component,
    load_edge_list,
    load_follower_edges,
    load_interactions,
    prune_edges,
    write_edge_list,
    write_nodes,
)


# -- oracles -----------------------------------------------------------------

def bfs_distances(adj, start):
    """Hop distance from start to every reachable node."""
    dist = {start: 0}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in adj.get(u, ()):
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


class UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


def random_graph(rng, max_nodes=50, p=0.1):
    n = int(rng.integers(2, max_nodes + 1))
    nodes = [f"n{i}" for i in range(n)]
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                edges.append((nodes[i], nodes[j]))
    return nodes, edges


def adjacency(nodes, edges):
    adj = {u: set() for u in nodes}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    return adj


# -- basic containers --------------------------------------------------------

class TestWeightedGraph:
    def test_accumulates_weight_undirected(self):
        g = WeightedGraph()
        g.add_edge("a", "b")
        g.add_edge("b", "a", 2)
        assert g.weight("a", "b") == 3
        assert g.weight("b", "a") == 3
        assert g.n_edges() == 1

    def test_self_loops_rejected(self):
        g = WeightedGraph()
        with pytest.raises(ValueError):
            g.add_edge("a", "a")


class TestSocialGraph:
    def test_dedup_and_sorted_neighbors(self):
        g = SocialGraph([("b", "a"), ("a", "b"), ("a", "c")])
        assert g.neighbors("a") == ("b", "c")
        assert g.n_edges() == 2
        assert len(g) == 3

    def test_isolated_nodes_kept(self):
        g = SocialGraph([("a", "b")], nodes=["a", "b", "lonely"])
        assert "lonely" in g
        assert g.degree("lonely") == 0
        assert len(g) == 3

    def test_unknown_node_raises_keyerror(self):
        g = SocialGraph([("a", "b")])
        with pytest.raises(KeyError):
            g.neighbors("zzz")


# -- interaction pipeline ----------------------------------------------------

class TestInteractionGraph:
    def test_weights_count_interactions(self):
        records = [
            InteractionRecord("u1", "u2", "retweet", 0),
            InteractionRecord("u2", "u1", "mention", 1),
            InteractionRecord("u1", "u3", "mention", 2),
        ]
        g = build_interaction_graph(records)
        assert g.weight("u1", "u2") == 2
        assert g.weight("u1", "u3") == 1

    def test_prune_keeps_nodes_drops_light_edges(self):
        records = [
            InteractionRecord("u1", "u2", "retweet", 0),
            InteractionRecord("u1", "u2", "retweet", 0),
            InteractionRecord("u2", "u3", "mention", 2),
        ]
        g = build_interaction_graph(records)
        pruned = prune_edges(g, min_weight=2)
        assert pruned.weight("u1", "u2") == 2
        assert pruned.weight("u2", "u3") == 0
        # u3 keeps its seat even with no surviving edges
        assert "u3" in pruned.nodes

    def test_prune_min_weight_one_is_identity(self):
        records = [InteractionRecord("a", "b", "mention", 0)]
        g = build_interaction_graph(records)
        pruned = prune_edges(g, min_weight=1)
        assert pruned.weight("a", "b") == 1
        assert pruned.nodes == g.nodes


class TestLargestComponent:
    def test_against_union_find(self):
        rng = np.random.default_rng(42)
        for _ in range(60):
            nodes, edges = random_graph(rng, max_nodes=40, p=0.06)
            g = WeightedGraph()
            for u in nodes:
                g.nodes.add(u)
            for u, v in edges:
                g.add_edge(u, v)
            got = largest_weakly_connected_component(g)

            uf = UnionFind(nodes)
            for u, v in edges:
                uf.union(u, v)
            comps = {}
            for u in nodes:
                comps.setdefault(uf.find(u), set()).add(u)
            best = max(comps.values(), key=lambda c: (len(c), min(c)))
            # ties break toward the component holding the smallest node id
            tied = [c for c in comps.values() if len(c) == len(best)]
            best = min(tied, key=min)
            assert set(got.node_ids) == best

    def test_returns_social_graph_with_inner_edges(self):
        g = WeightedGraph()
        for u, v in [("a", "b"), ("b", "c"), ("x", "y")]:
            g.add_edge(u, v)
        comp = largest_weakly_connected_component(g)
        assert isinstance(comp, SocialGraph)
        assert set(comp.node_ids) == {"a", "b", "c"}
        assert comp.neighbors("b") == ("a", "c")

    def test_empty_graph_is_error(self):
        with pytest.raises(InputDataError, match="empty graph"):
            largest_weakly_connected_component(WeightedGraph())


# -- neighborhood queries vs BFS oracle --------------------------------------

class TestNeighborhoods:
    def test_khop_zero_is_self(self):
        g = SocialGraph([("a", "b")])
        assert khop_neighborhood(g, "a", 0) == {"a"}

    def test_khop_includes_center(self):
        g = SocialGraph([("a", "b"), ("b", "c")])
        assert khop_neighborhood(g, "a", 2) == {"a", "b", "c"}

    def test_exact_order_zero_is_self(self):
        g = SocialGraph([("a", "b")])
        assert exact_order_neighborhood(g, "a", 0) == {"a"}

    def test_against_bfs(self):
        rng = np.random.default_rng(3)
        for _ in range(40):
            nodes, edges = random_graph(rng)
            g = SocialGraph(edges, nodes=nodes)
            adj = adjacency(nodes, edges)
            start = nodes[int(rng.integers(len(nodes)))]
            dist = bfs_distances(adj, start)
            for k in range(4):
                ball = {u for u, d in dist.items() if d <= k}
                shell = {u for u, d in dist.items() if d == k}
                assert khop_neighborhood(g, start, k) == ball
                assert exact_order_neighborhood(g, start, k) == shell

    def test_shells_partition_ball(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            nodes, edges = random_graph(rng)
            g = SocialGraph(edges, nodes=nodes)
            start = nodes[0]
            k = 3
            union = set()
            for order in range(k + 1):
                shell = exact_order_neighborhood(g, start, order)
                assert not (union & shell)
                union |= shell
            assert union == khop_neighborhood(g, start, k)

    def test_negative_order_is_error(self):
        g = SocialGraph([("a", "b")])
        with pytest.raises(ValueError):
            khop_neighborhood(g, "a", -1)
        with pytest.raises(ValueError):
            exact_order_neighborhood(g, "a", -1)

    def test_unknown_node_is_error(self):
        g = SocialGraph([("a", "b")])
        with pytest.raises(KeyError):
            khop_neighborhood(g, "zzz", 1)


class TestInducedSubgraph:
    def test_keeps_only_inner_edges(self):
        g = SocialGraph([("a", "b"), ("b", "c"), ("c", "d")])
        sub = induced_subgraph(g, ["a", "b", "d"])
        assert set(sub.node_ids) == {"a", "b", "d"}
        assert sub.neighbors("a") == ("b",)
        assert sub.degree("d") == 0


# -- file IO -----------------------------------------------------------------

class TestIO:
    def test_interactions_csv(self, tmp_path):
        path = tmp_path / "inter.csv"
        path.write_text(
            "source,target,kind,timestamp\nu1,u2,retweet,10\nu1,u2,mention,11\n")
        records = load_interactions(path)
        assert len(records) == 2
        assert records[0].kind == "retweet"
        assert records[1].timestamp == 11

    def test_self_interactions_dropped_on_load(self, tmp_path):
        path = tmp_path / "inter.csv"
        path.write_text("source,target,kind,timestamp\nu1,u1,retweet,10\n")
        assert load_interactions(path) == []

    def test_unknown_kind_rejected(self, tmp_path):
        path = tmp_path / "inter.csv"
        path.write_text("source,target,kind,timestamp\nu1,u2,like,10\n")
        with pytest.raises(InputDataError, match="unknown interaction kind"):
            load_interactions(path)

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "inter.csv"
        path.write_text("src,dst,kind,timestamp\n")
        with pytest.raises(InputDataError, match="header"):
            load_interactions(path)

    def test_follower_csv(self, tmp_path):
        path = tmp_path / "fol.csv"
        path.write_text("u,v\nu1,u2\nu3,u2\n")
        edges = load_follower_edges(path)
        assert edges == [("u1", "u2"), ("u3", "u2")]

    def test_edge_list_round_trip(self, tmp_path):
        g = SocialGraph([("a", "b"), ("b", "c")], nodes=["a", "b", "c", "iso"])
        epath, npath = tmp_path / "edges.csv", tmp_path / "nodes.txt"
        write_edge_list(g, epath)
        write_nodes(g, npath)
        loaded = load_edge_list(epath, npath)
        assert loaded.node_ids == g.node_ids
        assert loaded.edges() == g.edges()


# -- end-to-end builder ------------------------------------------------------

class TestBuildSocialGraph:
    def test_interaction_core_plus_followers(self):
        # u1-u2 interact twice (survives pruning); u3 brushes past once
        records = [
            InteractionRecord("u1", "u2", "retweet", 0),
            InteractionRecord("u1", "u2", "mention", 1),
            InteractionRecord("u2", "u3", "mention", 2),
        ]
        # follower edges only count between core members
        followers = [("u1", "u2"), ("u2", "u3"), ("u3", "u1")]
        g = build_social_graph(records, followers, min_weight=2)
        assert set(g.node_ids) == {"u1", "u2"}
        assert g.neighbors("u1") == ("u2",)

    def test_no_records_is_error(self):
        with pytest.raises(InputDataError):
            build_social_graph([], [])

    def test_no_follower_edges_among_core_is_error(self):
        records = [InteractionRecord("u1", "u2", "retweet", 0),
                   InteractionRecord("u1", "u2", "retweet", 0)]
        with pytest.raises(InputDataError, match="follower"):
            build_social_graph(records, [("u9", "u8")], min_weight=2)

    def test_interaction_only_when_no_followers_given(self):
        records = [InteractionRecord("u1", "u2", "retweet", 0),
                   InteractionRecord("u1", "u2", "retweet", 0)]
        g = build_social_graph(records, None, min_weight=2)
        assert set(g.node_ids) == {"u1", "u2"}
        assert g.n_edges() == 1


class TestStats:
    def test_hand_counts(self):
        g = SocialGraph([("a", "b"), ("b", "c")], nodes=["a", "b", "c", "iso"])
        stats = graph_stats(g)
        assert stats.n_nodes == 4
        assert stats.n_edges == 2
        assert stats.avg_degree == pytest.approx(4 / 4)
