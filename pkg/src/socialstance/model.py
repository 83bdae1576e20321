"""Stance classification model and training loop.

A labelled post is classified from two signals: the text embedding of the
post itself and a social code built by running a shell-attention encoder
over the author's k-hop neighborhood, where every neighborhood node is
summarized by a position-weighted aggregate of its recent post history.

forward() evaluates one post: it induces the subgraph on the author's k-hop
ball, builds each ball node's history vector from its last history_len posts
before the target's timestamp, encodes, and applies a softmax head to
[z_social || z_text]. Training runs the same computation through the
autograd engine on per-sample compiled structures (index arrays instead of
dict lookups), so analytic gradients come from the exact inference path.

reference_probabilities() recomputes forward() by composing the public
numpy ops from encoder.py; tests hold the two routes to 1e-10.
"""

import json
import math
from dataclasses import dataclass, replace

import numpy as np

from . import autograd as ag
from .autograd import Tensor
from .corpus import StanceLabel, recent_posts
from .encoder import (AGGREGATOR_KINDS, AggregateParams, EncoderParams,
                      aggregate_history_mean, aggregate_history_pe,
                      init_position_weights, social_encode)
from .errors import InputDataError, TrainingDivergedError
from .metrics import stance_report
from .socialgraph import induced_subgraph, khop_neighborhood

HISTORY_KINDS = ("pe", "mean")
N_CLASSES = 4
PROB_FLOOR = 1e-12
LEAKY_SLOPE = 0.2
CHECKPOINT_VERSION = 1
METRIC_LOG_HEADER = "epoch,train_loss,val_accuracy"


@dataclass
class TrainConfig:
    """Hyperparameters and data handling for one training run.

    hops is both the encoder depth and the shell range of every layer.
    history_len caps how many recent posts form a node's history vector.
    aggregator picks attention ("gat") or mean ("gcn") shell pooling;
    history picks trainable position weights ("pe") or a plain mean.
    """

    epochs: int = 400
    learning_rate: float = 1e-5
    weight_decay: float = 5e-4
    hops: int = 2
    history_len: int = 3
    embed_dim: int = 64
    hidden_dim: int = 64
    batch_size: int = 32
    seed: int = 0
    split: tuple = (0.8, 0.1, 0.1)
    aggregator: str = "gat"
    history: str = "pe"

    def __post_init__(self):
        if self.epochs < 1:
            raise InputDataError("epochs must be >= 1")
        if self.learning_rate <= 0:
            raise InputDataError("learning_rate must be positive")
        if self.weight_decay < 0:
            raise InputDataError("weight_decay must be non-negative")
        for name in ("hops", "history_len", "embed_dim", "hidden_dim", "batch_size"):
            if getattr(self, name) < 1:
                raise InputDataError(f"{name} must be >= 1")
        if self.aggregator not in AGGREGATOR_KINDS:
            raise InputDataError(f"unknown aggregator {self.aggregator!r}")
        if self.history not in HISTORY_KINDS:
            raise InputDataError(f"unknown history kind {self.history!r}")
        self.split = tuple(float(f) for f in self.split)
        if len(self.split) != 3 or any(f <= 0 for f in self.split):
            raise InputDataError("split must be three positive fractions")
        if abs(sum(self.split) - 1.0) > 1e-9:
            raise InputDataError("split fractions must sum to 1")

    def as_dict(self):
        out = {k: getattr(self, k) for k in self.__dataclass_fields__}
        out["split"] = list(self.split)
        return out

    @classmethod
    def from_dict(cls, data):
        fields = set(cls.__dataclass_fields__)
        unknown = set(data) - fields
        if unknown:
            raise InputDataError(f"unknown config keys: {sorted(unknown)}")
        kwargs = dict(data)
        if "split" in kwargs:
            kwargs["split"] = tuple(kwargs["split"])
        return cls(**kwargs)


@dataclass(frozen=True)
class Prediction:
    probabilities: np.ndarray  # (4,), sums to 1
    label: StanceLabel


@dataclass(frozen=True)
class EpochStats:
    epoch: int
    train_loss: float
    val_accuracy: float


def social_code_dim(config: TrainConfig) -> int:
    return config.hidden_dim * (1 + config.hops ** 2)


class ModelParams:
    """Named float64 parameter arrays of one model instance.

    tensors maps names ("position_weights", "input.w", "layer1.order2.a",
    "head.w", ...) to the live arrays; the optimizer updates them in place.
    The mean-history variant carries no position_weights entry.
    """

    def __init__(self, config: TrainConfig, tensors=None):
        self.config = config
        if tensors is not None:
            self.tensors = {k: np.asarray(v, dtype=np.float64) for k, v in tensors.items()}
            return
        rng = np.random.default_rng(config.seed)

        def xavier(fan_in, fan_out, shape):
            limit = math.sqrt(6.0 / (fan_in + fan_out))
            return rng.uniform(-limit, limit, size=shape)

        d, h, k = config.embed_dim, config.hidden_dim, config.hops
        self.tensors = {}
        if config.history == "pe":
            self.tensors["position_weights"] = init_position_weights(config.history_len)
        self.tensors["input.w"] = xavier(d, h, (d, h))
        self.tensors["input.b"] = np.zeros(h, dtype=np.float64)
        for layer in range(1, k + 1):
            in_dim = h if layer == 1 else k * h
            for order in range(1, k + 1):
                base = f"layer{layer}.order{order}"
                self.tensors[base + ".w"] = xavier(in_dim, h, (in_dim, h))
                self.tensors[base + ".a"] = xavier(2 * h, 1, (2 * h,))
        z_dim = social_code_dim(config) + d
        self.tensors["head.w"] = xavier(z_dim, N_CLASSES, (z_dim, N_CLASSES))
        self.tensors["head.b"] = np.zeros(N_CLASSES, dtype=np.float64)

    def copy(self) -> "ModelParams":
        return ModelParams(self.config, {k: v.copy() for k, v in self.tensors.items()})

    def load_from(self, other: "ModelParams") -> None:
        for name, arr in self.tensors.items():
            arr[...] = other.tensors[name]

    def encoder_params(self) -> EncoderParams:
        """View the encoder slice of the tensors as public EncoderParams."""
        k = self.config.hops
        layers = []
        for layer in range(1, k + 1):
            layers.append([
                AggregateParams(
                    w_proj=self.tensors[f"layer{layer}.order{order}.w"],
                    attn=self.tensors[f"layer{layer}.order{order}.a"],
                    leaky_slope=LEAKY_SLOPE,
                )
                for order in range(1, k + 1)
            ])
        return EncoderParams(w_in=self.tensors["input.w"],
                             b_in=self.tensors["input.b"], layers=layers)


# -- sample compilation ------------------------------------------------------


@dataclass
class _CompiledSample:
    post_id: str
    author_row: int
    n_nodes: int
    hist: np.ndarray          # (B, history_len, d); zero-padded slots
    hist_counts: np.ndarray   # (B,) available history lengths
    z_hist_mean: np.ndarray   # (B, d) constant history means
    shell_edges: tuple        # per order: (centers, neighbors) int arrays
    z_text: np.ndarray        # (d,)
    gold: int | None


def _check_provider(provider, config: TrainConfig) -> None:
    if provider.dim != config.embed_dim:
        raise InputDataError(
            f"provider dim {provider.dim} != config embed_dim {config.embed_dim}")


def _compile_sample(post, graph, corpus, provider, config: TrainConfig) -> _CompiledSample:
    k = config.hops
    ball = sorted(khop_neighborhood(graph, post.author_id, k))
    index = {node: i for i, node in enumerate(ball)}
    members = set(ball)
    local_adj = [
        tuple(index[u] for u in graph.neighbors(node) if u in members)
        for node in ball
    ]
    # Exact-distance shells inside the induced subgraph, one BFS per node.
    edges = [([], []) for _ in range(k)]
    for center in range(len(ball)):
        seen = {center}
        frontier = [center]
        for order in range(k):
            nxt = set()
            for cur in frontier:
                for neigh in local_adj[cur]:
                    if neigh not in seen:
                        nxt.add(neigh)
            if not nxt:
                break
            seen.update(nxt)
            for neigh in sorted(nxt):
                edges[order][0].append(center)
                edges[order][1].append(neigh)
            frontier = nxt
    shell_edges = tuple(
        (np.asarray(ci, dtype=np.intp), np.asarray(ni, dtype=np.intp))
        for ci, ni in edges
    )
    d, lam = config.embed_dim, config.history_len
    hist = np.zeros((len(ball), lam, d), dtype=np.float64)
    counts = np.zeros(len(ball), dtype=np.intp)
    for i, node in enumerate(ball):
        history = recent_posts(corpus, node, post.timestamp, lam)
        counts[i] = len(history)
        for m, past in enumerate(history):
            hist[i, m] = provider.embed_post(past)
    z_hist_mean = hist.sum(axis=1) / np.maximum(counts, 1)[:, None]
    return _CompiledSample(
        post_id=post.id,
        author_row=index[post.author_id],
        n_nodes=len(ball),
        hist=hist,
        hist_counts=counts,
        z_hist_mean=z_hist_mean,
        shell_edges=shell_edges,
        z_text=np.asarray(provider.embed_post(post), dtype=np.float64),
        gold=None if post.label is None else int(post.label),
    )


# -- engine forward ----------------------------------------------------------


def _make_tensors(params: ModelParams, requires_grad: bool):
    return {name: Tensor(arr, requires_grad=requires_grad)
            for name, arr in params.tensors.items()}


def _sample_logits(ts, sample: _CompiledSample, config: TrainConfig) -> Tensor:
    B, h, k = sample.n_nodes, config.hidden_dim, config.hops
    if config.history == "pe":
        z_hist = None
        for m in range(config.history_len):
            term = ts["position_weights"][m] * Tensor(sample.hist[:, m, :])
            z_hist = term if z_hist is None else z_hist + term
    else:
        z_hist = Tensor(sample.z_hist_mean)
    state = z_hist @ ts["input.w"] + ts["input.b"]
    collected = [state]
    for layer in range(1, k + 1):
        parts = []
        for order in range(1, k + 1):
            centers, neighbors = sample.shell_edges[order - 1]
            if centers.size == 0:
                parts.append(Tensor(np.zeros((B, h))))
                continue
            base = f"layer{layer}.order{order}"
            projected = state @ ts[base + ".w"]
            if config.aggregator == "gat":
                attn = ts[base + ".a"]
                center_scores = projected @ attn[:h]
                neighbor_scores = projected @ attn[h:]
                scores = ag.leaky_relu(
                    center_scores[centers] + neighbor_scores[neighbors], LEAKY_SLOPE)
                # Max-shifted softmax per center; the shift is a constant.
                shift = np.full(B, -np.inf)
                np.maximum.at(shift, centers, scores.data)
                expd = ag.exp(scores - Tensor(shift[centers]))
                denom = ag.segment_sum(expd, centers, B)
                weights = expd / denom[centers]
                messages = weights.reshape((centers.size, 1)) * projected[neighbors]
                parts.append(ag.segment_sum(messages, centers, B))
            else:
                sums = ag.segment_sum(projected[neighbors], centers, B)
                counts = np.bincount(centers, minlength=B)
                inv = 1.0 / np.maximum(counts, 1)
                parts.append(sums * Tensor(inv[:, None]))
        state = ag.concat(parts, axis=1)
        collected.append(state)
    z_social = ag.concat(collected, axis=1)[sample.author_row]
    z = ag.concat([z_social, Tensor(sample.z_text)], axis=0)
    return ag.relu(z) @ ts["head.w"] + ts["head.b"]


def _sample_loss(ts, sample: _CompiledSample, config: TrainConfig) -> Tensor:
    if sample.gold is None:
        raise ValueError(f"post {sample.post_id!r} has no label")
    logits = _sample_logits(ts, sample, config)
    shifted = logits - float(np.max(logits.data))
    expd = ag.exp(shifted)
    probs = expd / expd.sum()
    return -ag.log(ag.clip_min(probs[sample.gold], PROB_FLOOR))


def _batch_loss(ts, samples, config: TrainConfig) -> Tensor:
    if not samples:
        raise ValueError("empty batch")
    total = None
    for sample in samples:
        term = _sample_loss(ts, sample, config)
        total = term if total is None else total + term
    return total * (1.0 / len(samples))


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - np.max(logits)
    expd = np.exp(shifted)
    return expd / expd.sum()


# -- public inference --------------------------------------------------------


def forward(post, graph, corpus, provider, params: ModelParams,
            config: TrainConfig) -> Prediction:
    """Class probabilities and argmax label for one post.

    The author must be a node of `graph`; ties in the probabilities resolve
    to the lowest class index.
    """
    _check_provider(provider, config)
    if post.author_id not in graph:
        raise KeyError(f"user not in social graph: {post.author_id!r}")
    sample = _compile_sample(post, graph, corpus, provider, config)
    ts = _make_tensors(params, requires_grad=False)
    probs = _softmax(_sample_logits(ts, sample, config).data)
    return Prediction(probabilities=probs, label=StanceLabel(int(np.argmax(probs))))


def classify(post, graph, corpus, provider, params: ModelParams,
             config: TrainConfig) -> StanceLabel:
    return forward(post, graph, corpus, provider, params, config).label


def loss(batch, graph, corpus, provider, params: ModelParams,
         config: TrainConfig) -> float:
    """Mean cross-entropy of gold labels over a batch of labelled posts."""
    _check_provider(provider, config)
    samples = [_compile_sample(p, graph, corpus, provider, config) for p in batch]
    ts = _make_tensors(params, requires_grad=False)
    return float(_batch_loss(ts, samples, config).data)


def gradients(batch, graph, corpus, provider, params: ModelParams,
              config: TrainConfig) -> dict:
    """Analytic gradient of loss() for every named parameter.

    Parameters a batch never touches (a shell that is empty in every
    sample) get zero gradients. Non-finite values raise immediately, naming
    the parameter.
    """
    _check_provider(provider, config)
    samples = [_compile_sample(p, graph, corpus, provider, config) for p in batch]
    ts = _make_tensors(params, requires_grad=True)
    return _gradients_from_samples(ts, samples, config)[1]


def _gradients_from_samples(ts, samples, config):
    total = _batch_loss(ts, samples, config)
    if not np.isfinite(total.data):
        raise ValueError("non-finite loss")
    total.backward()
    grads = {}
    for name, tensor in ts.items():
        grad = tensor.grad if tensor.grad is not None else np.zeros_like(tensor.data)
        if not np.all(np.isfinite(grad)):
            raise ValueError(f"non-finite gradient for parameter {name!r}")
        grads[name] = grad
    return float(total.data), grads


# -- reference route ---------------------------------------------------------


def reference_probabilities(post, graph, corpus, provider, params: ModelParams,
                            config: TrainConfig) -> np.ndarray:
    """forward() recomputed by composing the public encoder ops.

    Kept deliberately straight-line; tests compare it against forward() so
    the vectorized engine path and the readable path must agree.
    """
    _check_provider(provider, config)
    if post.author_id not in graph:
        raise KeyError(f"user not in social graph: {post.author_id!r}")
    ball = sorted(khop_neighborhood(graph, post.author_id, config.hops))
    sub = induced_subgraph(graph, ball)
    d = config.embed_dim
    rows = []
    for node in sub.node_ids:
        history = [provider.embed_post(p)
                   for p in recent_posts(corpus, node, post.timestamp, config.history_len)]
        if config.history == "pe":
            rows.append(aggregate_history_pe(history, params.tensors["position_weights"], dim=d))
        else:
            rows.append(aggregate_history_mean(history, dim=d))
    codes = social_encode(sub, np.stack(rows), params.encoder_params(),
                          kind=config.aggregator)
    z = np.concatenate([codes[sub.index(post.author_id)], provider.embed_post(post)])
    logits = np.maximum(z, 0.0) @ params.tensors["head.w"] + params.tensors["head.b"]
    return _softmax(logits)


# -- optimizer ---------------------------------------------------------------


@dataclass
class AdamState:
    m: dict
    v: dict
    step: int = 0

    @classmethod
    def fresh(cls, tensors) -> "AdamState":
        return cls(m={k: np.zeros_like(a) for k, a in tensors.items()},
                   v={k: np.zeros_like(a) for k, a in tensors.items()})


def adam_step(tensors: dict, grads: dict, state: AdamState, learning_rate: float,
              weight_decay: float = 0.0, beta1: float = 0.9, beta2: float = 0.999,
              eps: float = 1e-8) -> None:
    """One in-place Adam update with decoupled weight decay.

    Decay shrinks the parameter before the moment update (theta -=
    lr * wd * theta), so it never enters the moment estimates.
    """
    state.step += 1
    t = state.step
    for name, arr in tensors.items():
        grad = grads[name]
        if weight_decay:
            arr -= learning_rate * weight_decay * arr
        state.m[name] = beta1 * state.m[name] + (1.0 - beta1) * grad
        state.v[name] = beta2 * state.v[name] + (1.0 - beta2) * grad * grad
        m_hat = state.m[name] / (1.0 - beta1 ** t)
        v_hat = state.v[name] / (1.0 - beta2 ** t)
        arr -= learning_rate * m_hat / (np.sqrt(v_hat) + eps)


# -- data splitting ----------------------------------------------------------


def split_dataset(items, fractions=(0.8, 0.1, 0.1), seed: int = 0):
    """Shuffle items with the seed and cut at cumulative-floor boundaries.

    Cut points are floor(n*f1) and floor(n*(f1+f2)), so for n=18246 at
    0.8/0.1/0.1 the parts hold 14596/1825/1825 items. Every part must be
    non-empty.
    """
    fractions = tuple(float(f) for f in fractions)
    if len(fractions) != 3 or any(f <= 0 for f in fractions):
        raise InputDataError("split needs three positive fractions")
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise InputDataError("split fractions must sum to 1")
    items = list(items)
    n = len(items)
    perm = np.random.default_rng(seed).permutation(n)
    cut1 = math.floor(n * fractions[0])
    cut2 = math.floor(n * (fractions[0] + fractions[1]))
    train = [items[i] for i in perm[:cut1]]
    val = [items[i] for i in perm[cut1:cut2]]
    test = [items[i] for i in perm[cut2:]]
    if not train or not val or not test:
        raise InputDataError(f"split of {n} items leaves an empty part")
    return train, val, test


# -- training ----------------------------------------------------------------


def _compiled_accuracy(ts, samples, config) -> float:
    correct = 0
    for sample in samples:
        probs = _softmax(_sample_logits(ts, sample, config).data)
        if int(np.argmax(probs)) == sample.gold:
            correct += 1
    return correct / len(samples)


def eligible_training_posts(corpus, graph):
    """Labelled posts whose author is a graph node, in corpus order."""
    return [p for p in corpus.labelled() if p.author_id in graph]


def train(corpus, graph, provider, config: TrainConfig):
    """Train on the corpus's labelled in-graph posts.

    The labelled posts are split train/val/test with the config seed (the
    test part is left untouched for the caller). Minibatch Adam runs for
    config.epochs; the returned parameters are the snapshot with the best
    validation accuracy (earliest epoch wins ties). Also returns the per
    epoch EpochStats list.
    """
    _check_provider(provider, config)
    labelled = eligible_training_posts(corpus, graph)
    train_posts, val_posts, _ = split_dataset(labelled, config.split, config.seed)
    train_samples = [_compile_sample(p, graph, corpus, provider, config)
                     for p in train_posts]
    val_samples = [_compile_sample(p, graph, corpus, provider, config)
                   for p in val_posts]
    params = ModelParams(config)
    state = AdamState.fresh(params.tensors)
    rng = np.random.default_rng(config.seed)
    logs = []
    best_acc, best_params = -1.0, None
    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(len(train_samples))
        batch_losses = []
        for start in range(0, len(order), config.batch_size):
            batch = [train_samples[i] for i in order[start:start + config.batch_size]]
            ts = _make_tensors(params, requires_grad=True)
            try:
                batch_loss, grads = _gradients_from_samples(ts, batch, config)
            except ValueError as exc:
                raise TrainingDivergedError(epoch, str(exc)) from None
            adam_step(params.tensors, grads, state, config.learning_rate,
                      config.weight_decay)
            batch_losses.append(batch_loss)
        eval_ts = _make_tensors(params, requires_grad=False)
        val_acc = _compiled_accuracy(eval_ts, val_samples, config)
        logs.append(EpochStats(epoch=epoch, train_loss=float(np.mean(batch_losses)),
                               val_accuracy=val_acc))
        if val_acc > best_acc:
            best_acc = val_acc
            best_params = params.copy()
    params.load_from(best_params)
    return params, logs


def evaluate(posts, graph, corpus, provider, params: ModelParams,
             config: TrainConfig):
    """MetricReport of the model over labelled posts."""
    golds = []
    preds = []
    ts = _make_tensors(params, requires_grad=False)
    for post in posts:
        if post.label is None:
            raise ValueError(f"post {post.id!r} has no label")
        sample = _compile_sample(post, graph, corpus, provider, config)
        probs = _softmax(_sample_logits(ts, sample, config).data)
        preds.append(int(np.argmax(probs)))
        golds.append(int(post.label))
    return stance_report(preds, golds)


def sweep(corpus, graph, provider, config: TrainConfig, hops_values,
          history_len_values):
    """Grid over (hops, history_len); reports best validation accuracy."""
    rows = []
    for hops in hops_values:
        for history_len in history_len_values:
            cell = replace(config, hops=hops, history_len=history_len)
            _, logs = train(corpus, graph, provider, cell)
            rows.append({
                "hops": hops,
                "history_len": history_len,
                "val_accuracy": max(stat.val_accuracy for stat in logs),
            })
    return rows


# -- metric log file ---------------------------------------------------------


def save_metric_log(logs, path) -> None:
    """Write EpochStats rows as CSV (epoch,train_loss,val_accuracy)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(METRIC_LOG_HEADER + "\n")
        for stat in logs:
            fh.write(f"{stat.epoch},{stat.train_loss!r},{stat.val_accuracy!r}\n")


# -- checkpoints -------------------------------------------------------------


def save_checkpoint(params: ModelParams, path) -> None:
    """Write parameters plus the config echo; float64 round-trips bit-exactly."""
    meta = json.dumps({
        "format_version": CHECKPOINT_VERSION,
        "config": params.config.as_dict(),
    }, sort_keys=True)
    arrays = {f"param:{name}": arr for name, arr in params.tensors.items()}
    with open(path, "wb") as fh:
        np.savez(fh, __meta__=np.asarray(meta), **arrays)


def load_checkpoint(path) -> ModelParams:
    with np.load(path, allow_pickle=False) as data:
        if "__meta__" not in data:
            raise InputDataError("not a model checkpoint (missing metadata)")
        meta = json.loads(str(data["__meta__"][()]))
        if meta.get("format_version") != CHECKPOINT_VERSION:
            raise InputDataError(
                f"unsupported checkpoint version {meta.get('format_version')!r}")
        config = TrainConfig.from_dict(meta["config"])
        tensors = {key[len("param:"):]: data[key]
                   for key in data.files if key.startswith("param:")}
    expected = set(ModelParams(config).tensors)
    if set(tensors) != expected:
        raise InputDataError("checkpoint parameter names do not match its config")
    return ModelParams(config, tensors)


# -- text-only baseline ------------------------------------------------------


def train_text_baseline(posts, provider, config: TrainConfig, epochs: int = 300,
                        learning_rate: float = 0.05):
    """Softmax head on the post embedding alone, same split as train().

    Serves as the floor any graph-aware model must beat: it sees z_text and
    nothing else. Full-batch Adam; returns {"w": ..., "b": ...}.
    """
    train_posts, _, _ = split_dataset(posts, config.split, config.seed)
    features = np.stack([provider.embed_post(p) for p in train_posts])
    golds = np.array([int(p.label) for p in train_posts])
    rng = np.random.default_rng(config.seed)
    limit = math.sqrt(6.0 / (provider.dim + N_CLASSES))
    tensors = {
        "w": rng.uniform(-limit, limit, size=(provider.dim, N_CLASSES)),
        "b": np.zeros(N_CLASSES, dtype=np.float64),
    }
    state = AdamState.fresh(tensors)
    n = len(train_posts)
    rows = np.arange(n)
    for _ in range(epochs):
        w = Tensor(tensors["w"], requires_grad=True)
        b = Tensor(tensors["b"], requires_grad=True)
        logits = Tensor(features) @ w + b
        shifted = logits - Tensor(logits.data.max(axis=1, keepdims=True))
        expd = ag.exp(shifted)
        probs_gold = expd[rows, golds] / expd.sum(axis=1)
        total = -ag.log(ag.clip_min(probs_gold, PROB_FLOOR)).mean()
        total.backward()
        adam_step(tensors, {"w": w.grad, "b": b.grad}, state, learning_rate)
    return tensors


def classify_text_baseline(baseline, post, provider) -> StanceLabel:
    logits = provider.embed_post(post) @ baseline["w"] + baseline["b"]
    return StanceLabel(int(np.argmax(_softmax(logits))))
