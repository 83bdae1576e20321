"""Command-line surface for the pipeline.

One executable with subcommands: build-graph, train, classify, track,
hesitancy, predict-change, agreement, sweep. Settings come from an optional
key=value config file; flags win over config values. Exit codes: 0 success,
2 bad input or configuration, 3 runtime failure (including divergence),
4 empty result.

Every command is deterministic: identical inputs and seed produce
byte-identical outputs.
"""

import argparse
import csv
import json
import math
import sys
from datetime import datetime, timezone

import numpy as np

from . import gbdt
from .corpus import load_posts
from .errors import EmptyResultError, InputDataError, TrainingDivergedError
from .hesitancy import (classify_change, daily_label_proportions,
                        eligible_users, hesitancy_score, write_hesitancy_csv,
                        write_timeseries_csv)
from .embed import load_embedding_store
from .metrics import MetricReport, agreement_report, load_ratings_csv
from .model import (ModelParams, TrainConfig, eligible_training_posts,
                    evaluate, forward, load_checkpoint, save_checkpoint,
                    save_metric_log, split_dataset, sweep, train)
from .socialgraph import (build_social_graph, graph_stats, load_edge_list,
                          load_follower_edges, load_interactions,
                          write_edge_list, write_nodes)

CLASSIFY_HEADER = "post_id,label,p_PO,p_NG,p_NE,p_PD"
SWEEP_HEADER = "hops,history_len,val_accuracy"
CHANGE_HEADER = "user,before_score,after_score,change"

SECONDS_PER_DAY = 86_400

# Config keys that are not TrainConfig fields.
_PATH_KEYS = ("posts", "interactions", "followers", "embeddings",
              "checkpoint_out", "log_out")
_INT_KEYS = ("epochs", "hops", "history_len", "embed_dim", "hidden_dim",
             "batch_size", "seed", "min_weight")
_FLOAT_KEYS = ("learning_rate", "weight_decay")
_STR_KEYS = ("aggregator", "history")


def parse_timestamp(text: str) -> int:
    """Unix seconds from either an integer or a UTC YYYY-MM-DD date."""
    try:
        return int(text)
    except ValueError:
        pass
    try:
        day = datetime.strptime(text, "%Y-%m-%d")
    except ValueError:
        raise InputDataError(
            f"expected integer seconds or YYYY-MM-DD, got {text!r}") from None
    return int(day.replace(tzinfo=timezone.utc).timestamp())


def load_config_file(path) -> dict:
    """Parse UTF-8 key=value lines; '#' starts a comment; keys are unique."""
    settings = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if not sep or not key or not value:
                raise InputDataError(f"line {lineno}: expected key=value")
            if key in settings:
                raise InputDataError(f"line {lineno}: duplicate key {key!r}")
            settings[key] = value
    return settings


def _typed_settings(raw: dict) -> dict:
    """Convert raw config strings to typed values; unknown keys rejected."""
    out = {}
    for key, value in raw.items():
        if key in _PATH_KEYS or key in _STR_KEYS:
            out[key] = value
        elif key in _INT_KEYS:
            try:
                out[key] = int(value)
            except ValueError:
                raise InputDataError(f"config key {key!r}: expected integer, "
                                     f"got {value!r}") from None
        elif key in _FLOAT_KEYS:
            try:
                out[key] = float(value)
            except ValueError:
                raise InputDataError(f"config key {key!r}: expected number, "
                                     f"got {value!r}") from None
        elif key == "split":
            parts = value.split(",")
            if len(parts) != 3:
                raise InputDataError("config key 'split': expected three "
                                     "comma-separated fractions")
            out[key] = tuple(float(p) for p in parts)
        else:
            raise InputDataError(f"unknown config key {key!r}")
    return out


def _train_settings(args) -> dict:
    """Config file merged with overriding flags."""
    settings = _typed_settings(load_config_file(args.config)) if args.config else {}
    for key in (*_PATH_KEYS, *_INT_KEYS, *_FLOAT_KEYS, *_STR_KEYS):
        flag = getattr(args, key, None)
        if flag is not None:
            settings[key] = flag
    return settings


def _split_settings(settings: dict):
    """Separate path/plumbing keys from TrainConfig fields."""
    plumbing = {}
    for key in (*_PATH_KEYS, "min_weight"):
        if key in settings:
            plumbing[key] = settings.pop(key)
    return plumbing, TrainConfig.from_dict(settings)


def _require(plumbing: dict, keys) -> None:
    missing = [k for k in keys if k not in plumbing]
    if missing:
        raise InputDataError(f"missing settings: {', '.join(missing)}")


def _load_graph_from(plumbing: dict):
    records = load_interactions(plumbing["interactions"])
    followers = None
    if plumbing.get("followers"):
        followers = load_follower_edges(plumbing["followers"])
    return build_social_graph(records, followers,
                              min_weight=plumbing.get("min_weight", 2))


def _report_json(report: MetricReport) -> str:
    return json.dumps(report.as_dict(), sort_keys=True)


# -- subcommands ---------------------------------------------------------------


def cmd_build_graph(args) -> int:
    records = load_interactions(args.interactions)
    followers = load_follower_edges(args.followers) if args.followers else None
    graph = build_social_graph(records, followers, min_weight=args.min_weight)
    stats = graph_stats(graph)
    write_edge_list(graph, f"{args.out_dir}/edges.csv")
    write_nodes(graph, f"{args.out_dir}/nodes.txt")
    payload = json.dumps(stats.as_dict(), sort_keys=True)
    with open(f"{args.out_dir}/stats.json", "w", encoding="utf-8") as fh:
        fh.write(payload + "\n")
    print(payload)
    return 0


def cmd_train(args) -> int:
    plumbing, config = _split_settings(_train_settings(args))
    _require(plumbing, ("posts", "interactions", "embeddings"))
    corpus = load_posts(plumbing["posts"])
    graph = _load_graph_from(plumbing)
    provider = load_embedding_store(plumbing["embeddings"], config.embed_dim)
    params, logs = train(corpus, graph, provider, config)
    if plumbing.get("checkpoint_out"):
        save_checkpoint(params, plumbing["checkpoint_out"])
    if plumbing.get("log_out"):
        save_metric_log(logs, plumbing["log_out"])
    labelled = eligible_training_posts(corpus, graph)
    _, _, test_posts = split_dataset(labelled, config.split, config.seed)
    print(_report_json(evaluate(test_posts, graph, corpus, provider, params, config)))
    return 0


def cmd_classify(args) -> int:
    params = load_checkpoint(args.checkpoint)
    config = params.config
    corpus = load_posts(args.posts)
    if args.edges:
        graph = load_edge_list(args.edges, args.nodes)
    else:
        if not args.interactions:
            raise InputDataError("classify needs --edges or --interactions")
        graph = _load_graph_from({
            "interactions": args.interactions,
            "followers": args.followers,
            "min_weight": args.min_weight,
        })
    provider = load_embedding_store(args.embeddings, config.embed_dim)
    rows = []
    skipped = []
    for post in corpus:
        if post.author_id not in graph:
            skipped.append(post.author_id)
            continue
        prediction = forward(post, graph, corpus, provider, params, config)
        rows.append([post.id, prediction.label.name,
                     *(repr(float(p)) for p in prediction.probabilities)])
    for user in sorted(set(skipped)):
        print(f"skipped user not in social graph: {user}", file=sys.stderr)
    if not rows:
        raise EmptyResultError("no posts could be classified")
    out = open(args.out, "w", encoding="utf-8", newline="") if args.out else sys.stdout
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(CLASSIFY_HEADER.split(","))
        writer.writerows(rows)
    finally:
        if args.out:
            out.close()
    return 0


def cmd_track(args) -> int:
    corpus = load_posts(args.posts)
    start, end = parse_timestamp(args.start), parse_timestamp(args.end)
    per_day = daily_label_proportions(corpus, start, end)
    write_timeseries_csv(per_day, args.out if args.out else sys.stdout)
    return 0


def _windowed_records(corpus, start, end, min_posts):
    users = sorted(eligible_users(corpus, start, end, min_posts))
    return [hesitancy_score(corpus, user, start, end) for user in users]


def cmd_hesitancy(args) -> int:
    corpus = load_posts(args.posts)
    if args.period_start or args.period_end:
        if not (args.period_start and args.period_end):
            raise InputDataError("--period-start and --period-end go together")
        if args.start or args.end:
            raise InputDataError("--start/--end and --period-start/--period-end "
                                 "are mutually exclusive")
        period_start = parse_timestamp(args.period_start)
        period_end = parse_timestamp(args.period_end)
        margin = args.margin_days * SECONDS_PER_DAY
        before = (period_start - margin, period_start)
        after = (period_end, period_end + margin)
        users = sorted(
            eligible_users(corpus, *before, args.min_posts)
            & eligible_users(corpus, *after, args.min_posts))
        if not users:
            raise EmptyResultError("no users eligible in both windows")
        out = open(args.out, "w", encoding="utf-8", newline="") if args.out else sys.stdout
        try:
            writer = csv.writer(out, lineterminator="\n")
            writer.writerow(CHANGE_HEADER.split(","))
            for user in users:
                b = hesitancy_score(corpus, user, *before)
                a = hesitancy_score(corpus, user, *after)
                writer.writerow([user, repr(b.score), repr(a.score),
                                 classify_change(b.score, a.score).name])
        finally:
            if args.out:
                out.close()
        return 0
    if not (args.start and args.end):
        raise InputDataError("hesitancy needs --start/--end or "
                             "--period-start/--period-end")
    start, end = parse_timestamp(args.start), parse_timestamp(args.end)
    records = _windowed_records(corpus, start, end, args.min_posts)
    if not records:
        raise EmptyResultError("no eligible users in window")
    write_hesitancy_csv(records, args.out if args.out else sys.stdout)
    return 0


def cmd_predict_change(args) -> int:
    features, labels = gbdt.load_training_csv(args.data)
    config = gbdt.GbdtConfig(rounds=args.rounds, max_depth=args.max_depth,
                             shrinkage=args.shrinkage)
    n = features.shape[0]
    cut = math.floor(n * args.train_frac)
    if cut < 2 or cut >= n:
        raise InputDataError(
            f"train fraction {args.train_frac} leaves no usable split of {n} rows")
    reports = []
    baselines = []
    for session in range(args.sessions):
        perm = np.random.default_rng(args.seed + session).permutation(n)
        train_idx, test_idx = perm[:cut], perm[cut:]
        model = gbdt.fit(features[train_idx], labels[train_idx], config)
        reports.append(gbdt.evaluate(model, features[test_idx], labels[test_idx]))
        baselines.append(
            gbdt.majority_baseline_accuracy(labels[train_idx], labels[test_idx]))
    mean = {key: sum(getattr(r, key) for r in reports) / len(reports)
            for key in ("accuracy", "precision", "recall", "f1")}
    mean["sessions"] = args.sessions
    mean["majority_baseline_accuracy"] = sum(baselines) / len(baselines)
    print(json.dumps(mean, sort_keys=True))
    return 0


def cmd_agreement(args) -> int:
    rows = load_ratings_csv(args.ratings)
    print(json.dumps(agreement_report(rows), sort_keys=True))
    return 0


def cmd_sweep(args) -> int:
    plumbing, config = _split_settings(_train_settings(args))
    _require(plumbing, ("posts", "interactions", "embeddings"))
    hops_values = [int(v) for v in args.hops_grid.split(",")]
    lam_values = [int(v) for v in args.history_len_grid.split(",")]
    corpus = load_posts(plumbing["posts"])
    graph = _load_graph_from(plumbing)
    provider = load_embedding_store(plumbing["embeddings"], config.embed_dim)
    cells = sweep(corpus, graph, provider, config, hops_values, lam_values)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(SWEEP_HEADER.split(","))
            for cell in cells:
                writer.writerow([cell["hops"], cell["history_len"],
                                 repr(cell["val_accuracy"])])
    best = max(cells, key=lambda c: (c["val_accuracy"],
                                     -c["hops"], -c["history_len"]))
    print(json.dumps({"cells": cells, "best": best}, sort_keys=True))
    return 0


# -- argument parsing ----------------------------------------------------------


def _add_train_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="key=value settings file")
    for key in _PATH_KEYS:
        sub.add_argument(f"--{key.replace('_', '-')}", dest=key,
                         help=f"overrides config key {key}")
    for key in _INT_KEYS:
        sub.add_argument(f"--{key.replace('_', '-')}", dest=key, type=int,
                         help=f"overrides config key {key}")
    for key in _FLOAT_KEYS:
        sub.add_argument(f"--{key.replace('_', '-')}", dest=key, type=float,
                         help=f"overrides config key {key}")
    sub.add_argument("--aggregator", choices=("gat", "gcn"),
                     help="shell aggregation kind (overrides config)")
    sub.add_argument("--history", choices=("pe", "mean"),
                     help="history aggregation kind (overrides config)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="socialstance",
        description="Stance classification and attitude analytics for "
                    "social-network discourse.")
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser(
        "build-graph", help="build the social graph and export it")
    sub.add_argument("--interactions", required=True,
                     help="CSV of source,target,kind,timestamp")
    sub.add_argument("--followers", help="optional CSV of follower pairs u,v")
    sub.add_argument("--min-weight", type=int, default=2,
                     help="minimum interaction count per edge (default: %(default)s)")
    sub.add_argument("--out-dir", required=True,
                     help="directory for edges.csv, nodes.txt, stats.json")
    sub.set_defaults(handler=cmd_build_graph)

    sub = commands.add_parser(
        "train", help="train the stance classifier; prints the test report")
    _add_train_flags(sub)
    sub.set_defaults(handler=cmd_train)

    sub = commands.add_parser(
        "classify", help="label posts with a trained checkpoint")
    sub.add_argument("--checkpoint", required=True, help="trained model file")
    sub.add_argument("--posts", required=True, help="JSONL posts file")
    sub.add_argument("--embeddings", required=True, help="embedding store file")
    sub.add_argument("--edges", help="graph edge list from build-graph")
    sub.add_argument("--nodes", help="graph nodes file from build-graph")
    sub.add_argument("--interactions",
                     help="interaction CSV (alternative to --edges)")
    sub.add_argument("--followers", help="optional follower CSV")
    sub.add_argument("--min-weight", type=int, default=2,
                     help="interaction pruning threshold (default: %(default)s)")
    sub.add_argument("--out", help="output CSV path (default: stdout)")
    sub.set_defaults(handler=cmd_classify)

    sub = commands.add_parser(
        "track", help="daily stance-label fractions over a date range")
    sub.add_argument("--posts", required=True, help="JSONL posts file")
    sub.add_argument("--start", required=True,
                     help="range start, YYYY-MM-DD or Unix seconds (inclusive)")
    sub.add_argument("--end", required=True,
                     help="range end, YYYY-MM-DD or Unix seconds (exclusive)")
    sub.add_argument("--out", help="output CSV path (default: stdout)")
    sub.set_defaults(handler=cmd_track)

    sub = commands.add_parser(
        "hesitancy", help="per-user attitude scores in a window, or "
                          "before/after changes around a period")
    sub.add_argument("--posts", required=True, help="JSONL posts file")
    sub.add_argument("--start", help="window start (with --end)")
    sub.add_argument("--end", help="window end, exclusive (with --start)")
    sub.add_argument("--period-start", help="period start (with --period-end)")
    sub.add_argument("--period-end", help="period end (with --period-start)")
    sub.add_argument("--margin-days", type=int, default=14,
                     help="days before/after the period (default: %(default)s)")
    sub.add_argument("--min-posts", type=int, default=3,
                     help="stance-bearing posts required per user "
                          "(default: %(default)s)")
    sub.add_argument("--out", help="output CSV path (default: stdout)")
    sub.set_defaults(handler=cmd_hesitancy)

    sub = commands.add_parser(
        "predict-change", help="train and score the attitude-change predictor")
    sub.add_argument("--data", required=True,
                     help="training CSV of theme counts and change labels")
    sub.add_argument("--rounds", type=int, default=100,
                     help="boosting rounds (default: %(default)s)")
    sub.add_argument("--max-depth", type=int, default=5,
                     help="tree depth bound (default: %(default)s)")
    sub.add_argument("--shrinkage", type=float, default=0.1,
                     help="learning rate of the booster (default: %(default)s)")
    sub.add_argument("--train-frac", type=float, default=0.8,
                     help="training fraction per session (default: %(default)s)")
    sub.add_argument("--sessions", type=int, default=5,
                     help="seeded train/test sessions to average "
                          "(default: %(default)s)")
    sub.add_argument("--seed", type=int, default=0,
                     help="base RNG seed (default: %(default)s)")
    sub.set_defaults(handler=cmd_predict_change)

    sub = commands.add_parser(
        "agreement", help="inter-annotator agreement statistics")
    sub.add_argument("--ratings", required=True,
                     help="CSV of item_id,rater_id,label")
    sub.set_defaults(handler=cmd_agreement)

    sub = commands.add_parser(
        "sweep", help="grid search over hops and history length")
    _add_train_flags(sub)
    sub.add_argument("--hops-grid", default="1,2,3",
                     help="comma-separated hops values (default: %(default)s)")
    sub.add_argument("--history-len-grid", default="1,2,3,4,5",
                     help="comma-separated history lengths (default: %(default)s)")
    sub.add_argument("--out", help="CSV path for the accuracy table")
    sub.set_defaults(handler=cmd_sweep)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except EmptyResultError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except TrainingDivergedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (InputDataError, OSError, KeyError) as exc:
        message = exc.args[0] if exc.args else exc
        print(f"error: {message}", file=sys.stderr)
        return 2
    except Exception as exc:  # never abort uncleanly
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
