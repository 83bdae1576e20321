"""Interaction and follower graph construction plus k-hop neighborhood queries.

The pipeline is: count pairwise interactions into a weighted undirected graph,
prune weak edges, keep the largest connected component, then (optionally)
restrict a follower edge list to those core users and keep its largest
component. The result is a :class:`SocialGraph` with sorted adjacency and
cached exact-distance shells, the input the stance encoder aggregates over.
"""

from collections import deque
from dataclasses import dataclass

from .errors import InputDataError

INTERACTION_HEADER = "source,target,kind,timestamp"
FOLLOWER_HEADER = "u,v"
INTERACTION_KINDS = ("retweet", "mention")


@dataclass(frozen=True)
class InteractionRecord:
    source: str
    target: str
    kind: str
    timestamp: int


class WeightedGraph:
    """Undirected graph with integer edge weights (interaction counts)."""

    def __init__(self):
        self.nodes = set()
        self._weights = {}

    @staticmethod
    def _key(u, v):
        return (u, v) if u <= v else (v, u)

    def add_edge(self, u, v, weight=1):
        if u == v:
            raise ValueError("self-edges are not allowed")
        self.nodes.add(u)
        self.nodes.add(v)
        key = self._key(u, v)
        self._weights[key] = self._weights.get(key, 0) + weight

    def weight(self, u, v):
        return self._weights.get(self._key(u, v), 0)

    def edges(self):
        """(u, v, weight) triples with u < v, sorted."""
        return [(u, v, w) for (u, v), w in sorted(self._weights.items())]

    def n_edges(self):
        return len(self._weights)

    def adjacency(self):
        adj = {n: set() for n in self.nodes}
        for u, v in self._weights:
            adj[u].add(v)
            adj[v].add(u)
        return adj


def load_interactions(path):
    """Read interaction records from CSV (source,target,kind,timestamp).

    Self-interactions are dropped here, so every record relates two distinct
    users. Raises InputDataError with a line number on malformed rows.
    """
    records = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != INTERACTION_HEADER:
            raise InputDataError(
                f"expected header {INTERACTION_HEADER!r}, got {header!r}")
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 4:
                raise InputDataError(f"line {lineno}: expected 4 fields, got {len(parts)}")
            source, target, kind, ts = parts
            if not source or not target:
                raise InputDataError(f"line {lineno}: empty source or target")
            if kind not in INTERACTION_KINDS:
                raise InputDataError(f"line {lineno}: unknown interaction kind {kind!r}")
            try:
                timestamp = int(ts)
            except ValueError:
                raise InputDataError(f"line {lineno}: non-integer timestamp {ts!r}") from None
            if source == target:
                continue
            records.append(InteractionRecord(source, target, kind, timestamp))
    return records


def load_follower_edges(path):
    """Read (u, v) follower pairs from CSV with header u,v."""
    edges = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != FOLLOWER_HEADER:
            raise InputDataError(f"expected header {FOLLOWER_HEADER!r}, got {header!r}")
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 2 or not parts[0] or not parts[1]:
                raise InputDataError(f"line {lineno}: expected two non-empty fields")
            edges.append((parts[0], parts[1]))
    return edges


def build_interaction_graph(records) -> WeightedGraph:
    """Count interactions per unordered user pair into edge weights."""
    graph = WeightedGraph()
    for rec in records:
        if rec.source == rec.target:
            continue
        graph.add_edge(rec.source, rec.target)
    return graph


def prune_edges(graph: WeightedGraph, min_weight: int = 2) -> WeightedGraph:
    """Keep edges with weight >= min_weight; every node is retained.

    min_weight=1 is the identity. Nodes whose edges are all pruned stay in
    the graph as isolated nodes; component extraction decides their fate.
    """
    if min_weight < 1:
        raise ValueError("min_weight must be >= 1")
    pruned = WeightedGraph()
    pruned.nodes = set(graph.nodes)
    for u, v, w in graph.edges():
        if w >= min_weight:
            pruned.add_edge(u, v, w)
    return pruned


def largest_weakly_connected_component(graph) -> "SocialGraph":
    """Induced subgraph on the largest component, as a SocialGraph.

    Accepts a WeightedGraph or a SocialGraph; edge weights are not carried
    over (the encoder treats the graph as unweighted). Size ties break
    toward the component containing the smallest node id, so the choice is
    deterministic.
    """
    if isinstance(graph, SocialGraph):
        nodes = graph.node_ids
        adj = {n: graph.neighbors(n) for n in nodes}
        all_edges = graph.edges()
    else:
        nodes = graph.nodes
        adj = graph.adjacency()
        all_edges = [(u, v) for u, v, _ in graph.edges()]
    if not nodes:
        raise InputDataError("empty graph")
    seen = set()
    best = None
    for start in sorted(nodes):
        if start in seen:
            continue
        component = {start}
        queue = deque([start])
        seen.add(start)
        while queue:
            node = queue.popleft()
            for nxt in adj[node]:
                if nxt not in seen:
                    seen.add(nxt)
                    component.add(nxt)
                    queue.append(nxt)
        # First-found wins ties: scanning start nodes by ascending id finds
        # each component at its minimum id, so an equal-sized later
        # component has a larger minimum id.
        if best is None or len(component) > len(best):
            best = component
    edges = [(u, v) for u, v in all_edges if u in best and v in best]
    return SocialGraph(edges, nodes=best)


class SocialGraph:
    """Undirected social graph with indexed nodes and sorted adjacency.

    Exact-distance shells are memoized per (node, depth) because the encoder
    asks for the same neighborhoods once per layer and per training epoch.
    """

    def __init__(self, edges, nodes=()):
        adj = {}
        for n in nodes:
            adj.setdefault(n, set())
        for u, v in edges:
            if u == v:
                raise ValueError("self-edges are not allowed")
            adj.setdefault(u, set()).add(v)
            adj.setdefault(v, set()).add(u)
        self.node_ids = tuple(sorted(adj))
        self._index = {n: i for i, n in enumerate(self.node_ids)}
        self._adj = {n: tuple(sorted(neigh)) for n, neigh in adj.items()}
        self._shell_cache = {}

    def __len__(self):
        return len(self.node_ids)

    def __contains__(self, node):
        return node in self._index

    def index(self, node) -> int:
        """Position of node in the sorted node_ids tuple."""
        if node not in self._index:
            raise KeyError(f"user not in social graph: {node!r}")
        return self._index[node]

    def neighbors(self, node):
        if node not in self._adj:
            raise KeyError(f"user not in social graph: {node!r}")
        return self._adj[node]

    def degree(self, node) -> int:
        return len(self.neighbors(node))

    def n_edges(self) -> int:
        return sum(len(a) for a in self._adj.values()) // 2

    def edges(self):
        """(u, v) pairs with u < v, sorted."""
        out = []
        for u in self.node_ids:
            for v in self._adj[u]:
                if u < v:
                    out.append((u, v))
        return out

    def shells(self, node, depth: int):
        """Exact-distance neighbor sets at distances 1..depth (BFS layers)."""
        if depth < 1:
            raise ValueError("depth must be >= 1")
        key = (node, depth)
        cached = self._shell_cache.get(key)
        if cached is not None:
            return cached
        if node not in self._adj:
            raise KeyError(f"user not in social graph: {node!r}")
        shells = []
        seen = {node}
        frontier = [node]
        for _ in range(depth):
            nxt = set()
            for cur in frontier:
                for neigh in self._adj[cur]:
                    if neigh not in seen:
                        nxt.add(neigh)
            seen.update(nxt)
            shells.append(frozenset(nxt))
            frontier = nxt
            if not frontier:
                break
        # Pad with empty shells so callers can zip shells with per-order
        # parameters even past the graph's radius.
        while len(shells) < depth:
            shells.append(frozenset())
        result = tuple(shells)
        self._shell_cache[key] = result
        return result


def khop_neighborhood(graph: SocialGraph, node, k: int):
    """The closed ball {u : d(u, node) <= k}; always contains the node.

    k=0 gives {node}. Unknown nodes raise KeyError.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    out = {node}
    if node not in graph:
        raise KeyError(f"user not in social graph: {node!r}")
    if k:
        for shell in graph.shells(node, k):
            out |= shell
    return out


def exact_order_neighborhood(graph: SocialGraph, node, order: int):
    """Nodes at distance exactly `order` from `node`; order 0 gives {node}."""
    if order < 0:
        raise ValueError("order must be >= 0")
    if node not in graph:
        raise KeyError(f"user not in social graph: {node!r}")
    if order == 0:
        return {node}
    return set(graph.shells(node, order)[order - 1])


def induced_subgraph(graph: SocialGraph, nodes) -> SocialGraph:
    """Subgraph on `nodes`, keeping edges with both endpoints inside."""
    keep = set(nodes)
    missing = keep - set(graph.node_ids)
    if missing:
        raise KeyError(f"user not in social graph: {sorted(missing)[0]!r}")
    edges = [(u, v) for u, v in graph.edges() if u in keep and v in keep]
    return SocialGraph(edges, nodes=keep)


def build_social_graph(records, follower_edges=None, min_weight: int = 2) -> SocialGraph:
    """End-to-end graph construction.

    Interaction counting, edge pruning at min_weight, and largest-component
    extraction come first. When follower_edges is given, those edges are
    restricted to the interaction core's users and the largest component of
    that follower graph becomes the result; follower direction is ignored.
    """
    if not records:
        raise InputDataError("no interaction records")
    interaction = build_interaction_graph(records)
    core = largest_weakly_connected_component(prune_edges(interaction, min_weight))
    if follower_edges is None:
        return core
    keep = set(core.node_ids)
    fg = WeightedGraph()
    for u, v in follower_edges:
        if u != v and u in keep and v in keep and not fg.weight(u, v):
            fg.add_edge(u, v)
    if not fg.nodes:
        raise InputDataError("empty graph: no follower edges among core users")
    return largest_weakly_connected_component(fg)


@dataclass(frozen=True)
class GraphStats:
    n_nodes: int
    n_edges: int
    avg_degree: float

    def as_dict(self):
        return {"n_nodes": self.n_nodes, "n_edges": self.n_edges,
                "avg_degree": self.avg_degree}


def graph_stats(graph) -> GraphStats:
    """Node count, edge count, and mean degree of either graph type."""
    if isinstance(graph, SocialGraph):
        n, e = len(graph), graph.n_edges()
    else:
        n, e = len(graph.nodes), graph.n_edges()
    avg = (2.0 * e / n) if n else 0.0
    return GraphStats(n_nodes=n, n_edges=e, avg_degree=avg)


def write_edge_list(graph: SocialGraph, path) -> None:
    """Write the undirected edge list as CSV with header u,v."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(FOLLOWER_HEADER + "\n")
        for u, v in graph.edges():
            fh.write(f"{u},{v}\n")


def write_nodes(graph: SocialGraph, path) -> None:
    """Write the node set, one id per line, sorted."""
    with open(path, "w", encoding="utf-8") as fh:
        for node in graph.node_ids:
            fh.write(f"{node}\n")


def load_edge_list(path, nodes_path=None) -> SocialGraph:
    """Rebuild a SocialGraph from a write_edge_list file.

    A nodes file restores isolated nodes the edge list cannot carry.
    """
    nodes = ()
    if nodes_path is not None:
        with open(nodes_path, encoding="utf-8") as fh:
            nodes = [line.strip() for line in fh if line.strip()]
    return SocialGraph(load_follower_edges(path), nodes=nodes)
