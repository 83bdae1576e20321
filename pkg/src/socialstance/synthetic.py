"""Seeded synthetic datasets for benchmarks and demos.

Two generators live here. heterophily_benchmark builds a social network in
which connected users mostly hold opposite stances and a fraction of users
write sarcastically (their text signal is inverted), the regime the graph
encoder exists for: text alone caps out at the non-sarcastic share, while
neighborhood aggregates recover the true stance. change_benchmark builds
theme-exposure feature vectors whose planted rule links negative-theme
exposure to attitude drops, for exercising the boosted-tree predictor.
"""

from dataclasses import dataclass

import numpy as np

from .corpus import Corpus, Post, StanceLabel
from .embed import PrecomputedStore
from .hesitancy import N_THEMES, ChangeLabel, Theme
from .socialgraph import SocialGraph

_NEGATIVE_THEMES = (
    Theme.NegativeNews, Theme.DistrustGovernment, Theme.DissatisfactionPolicy,
    Theme.Conspiracy, Theme.NegativePersonal, Theme.NegativeInfo,
)
_POSITIVE_THEMES = (
    Theme.PositiveNews, Theme.PharmaPerception, Theme.HealthBeliefs,
    Theme.PositivePersonal, Theme.PositiveInfo,
)

HISTORY_BASE_TS = 100
TARGET_TS = 1_000_000


@dataclass(frozen=True)
class HeterophilyBenchmark:
    """One generated stance network.

    corpus holds every user's history posts plus one labelled target post;
    store maps every post id to its embedding; flipped marks the sarcastic
    users whose text signal is inverted.
    """

    corpus: Corpus
    graph: SocialGraph
    store: PrecomputedStore
    labels: dict        # user id -> StanceLabel
    flipped: frozenset  # user ids with inverted text signal


def _node_name(i: int) -> str:
    return f"u{i:04d}"


def heterophily_benchmark(n_nodes: int = 500, embed_dim: int = 16,
                          cross_prob: float = 0.9, flip_rate: float = 0.3,
                          mean_degree: int = 6, history_len: int = 3,
                          noise: float = 0.3, seed: int = 0) -> HeterophilyBenchmark:
    """Two stance populations wired mostly across the stance divide.

    Users alternate between supportive (PO) and opposed (NG). Each edge
    endpoint is drawn from the opposite population with probability
    cross_prob, so direct neighbors disagree and 2-hop neighbors agree.
    Every post embedding is the author's population signature plus noise;
    flip_rate of the users emit the opposite signature in all their posts.
    Each user gets history_len history posts and one labelled target post.
    """
    rng = np.random.default_rng(seed)
    names = [_node_name(i) for i in range(n_nodes)]
    classes = np.array([i % 2 for i in range(n_nodes)])
    by_class = [np.flatnonzero(classes == c) for c in (0, 1)]

    edges = set()

    def connect(i: int) -> None:
        other = int(classes[i] == 0)
        for _ in range(20):
            pool = by_class[other] if rng.random() < cross_prob else by_class[classes[i]]
            j = int(pool[rng.integers(pool.size)])
            if j != i and (min(i, j), max(i, j)) not in edges:
                edges.add((min(i, j), max(i, j)))
                return

    for _ in range(mean_degree // 2):
        for i in range(n_nodes):
            connect(i)
    degree = np.zeros(n_nodes, dtype=np.int64)
    for u, v in edges:
        degree[u] += 1
        degree[v] += 1
    for i in np.flatnonzero(degree == 0):
        connect(int(i))
    graph = SocialGraph(((names[u], names[v]) for u, v in edges), nodes=names)

    signature = rng.normal(size=embed_dim)
    signature /= np.linalg.norm(signature)
    flipped = rng.random(n_nodes) < flip_rate

    posts = []
    vectors = {}
    labels = {}
    for i, name in enumerate(names):
        stance = StanceLabel.PO if classes[i] == 0 else StanceLabel.NG
        labels[name] = stance
        sign = 1.0 if classes[i] == 0 else -1.0
        if flipped[i]:
            sign = -sign
        for m in range(history_len):
            pid = f"{name}-h{m}"
            posts.append(Post(id=pid, author_id=name,
                              timestamp=HISTORY_BASE_TS + m, text=""))
            vectors[pid] = sign * signature + noise * rng.normal(size=embed_dim)
        pid = f"{name}-t"
        posts.append(Post(id=pid, author_id=name, timestamp=TARGET_TS,
                          text="", label=stance))
        vectors[pid] = sign * signature + noise * rng.normal(size=embed_dim)

    return HeterophilyBenchmark(
        corpus=Corpus(posts),
        graph=graph,
        store=PrecomputedStore(vectors, dim=embed_dim),
        labels=labels,
        flipped=frozenset(names[i] for i in np.flatnonzero(flipped)),
    )


def change_benchmark(n_samples: int = 200, noise_rate: float = 0.1,
                     seed: int = 0, margin: int = 2):
    """Theme-exposure counts with a planted attitude-change rule.

    Each sample is a vector of 11 small counts. When negative-theme
    exposure outweighs positive-theme exposure by at least `margin` the
    attitude drops, the mirror case raises it, and anything closer leaves
    it unchanged; noise_rate of the labels are re-rolled uniformly.
    Returns (features, labels) as float64/int64 arrays.
    """
    rng = np.random.default_rng(seed)
    features = rng.integers(0, 5, size=(n_samples, N_THEMES)).astype(np.float64)
    neg = features[:, [int(t) for t in _NEGATIVE_THEMES]].sum(axis=1)
    pos = features[:, [int(t) for t in _POSITIVE_THEMES]].sum(axis=1)
    labels = np.full(n_samples, int(ChangeLabel.unchanged), dtype=np.int64)
    labels[neg - pos >= margin] = int(ChangeLabel.decreased)
    labels[pos - neg >= margin] = int(ChangeLabel.increased)
    flip = rng.random(n_samples) < noise_rate
    labels[flip] = rng.integers(0, len(ChangeLabel), size=int(flip.sum()))
    return features, labels
