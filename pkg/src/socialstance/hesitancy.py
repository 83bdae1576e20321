"""Attitude analytics over labelled posts: per-user scores in a time window,
change classification between windows, daily label tracking, popular-post
selection, and perceived-theme exposure counts.

Windows are half-open [start, end) in Unix seconds; days are UTC days.
"""

import csv
import math
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from enum import IntEnum

import numpy as np

from .corpus import Corpus, StanceLabel
from .errors import InputDataError

THEME_ANNOTATION_HEADER = "post_id,theme"
TIMESERIES_HEADER = "date,PO,NG,NE,PD"
HESITANCY_HEADER = "user,window_start,window_end,n_pos,n_neg,score"

# Score changes smaller than this are reported as "unchanged".
CHANGE_THRESHOLD = 0.05

_POSITIVE = (StanceLabel.PO, StanceLabel.PD)
_NEGATIVE = (StanceLabel.NG,)


class Theme(IntEnum):
    """Content theme of a widely-shared post, from a fixed 11-way codebook.

    Indices are stable: they are the feature positions of a ThemeVector and
    of the change-prediction training data.
    """

    PositiveNews = 0
    NegativeNews = 1
    DistrustGovernment = 2
    DissatisfactionPolicy = 3
    PharmaPerception = 4
    Conspiracy = 5
    HealthBeliefs = 6
    PositivePersonal = 7
    NegativePersonal = 8
    PositiveInfo = 9
    NegativeInfo = 10


N_THEMES = len(Theme)


class ChangeLabel(IntEnum):
    """Direction of a user's attitude-score change between two windows."""

    increased = 0
    decreased = 1
    unchanged = 2


@dataclass(frozen=True)
class HesitancyRecord:
    """One user's attitude score over one window.

    score = (n_positive - n_negative) / (n_positive + n_negative), in
    [-1, 1]; higher means more supportive.
    """

    user: str
    window_start: int
    window_end: int
    n_positive: int
    n_negative: int
    score: float


def _check_window(start: int, end: int) -> None:
    if end <= start:
        raise InputDataError(f"empty window: [{start}, {end})")


def hesitancy_score(corpus: Corpus, user: str, start: int, end: int) -> HesitancyRecord:
    """Score one user's labelled posts in [start, end).

    PO and PD count as positive, NG as negative, NE is ignored. Originals,
    quotes, and retweets all count. A user with no stance-bearing posts in
    the window has no score and is an error; use eligible_users to filter.
    """
    _check_window(start, end)
    n_pos = n_neg = 0
    for post in corpus.posts_by(user):
        if post.label is None or not start <= post.timestamp < end:
            continue
        if post.label in _POSITIVE:
            n_pos += 1
        elif post.label in _NEGATIVE:
            n_neg += 1
    if n_pos + n_neg == 0:
        raise InputDataError(f"no stance-bearing posts for user {user!r} in window")
    score = (n_pos - n_neg) / (n_pos + n_neg)
    return HesitancyRecord(user, start, end, n_pos, n_neg, score)


def classify_change(before: float, after: float,
                    threshold: float = CHANGE_THRESHOLD) -> ChangeLabel:
    """Direction of the score change, with a dead zone of `threshold`.

    Strictly-smaller-than semantics: a change of exactly `threshold` is
    directional, not "unchanged". Categories follow the score value, so
    "increased" means the user got more supportive.
    """
    for name, value in (("before", before), ("after", after)):
        if not -1.0 <= value <= 1.0:
            raise InputDataError(f"{name} score {value} outside [-1, 1]")
    delta = after - before
    if abs(delta) < threshold:
        return ChangeLabel.unchanged
    return ChangeLabel.increased if delta > 0 else ChangeLabel.decreased


def eligible_users(corpus: Corpus, start: int, end: int, min_posts: int = 3):
    """Users with at least `min_posts` stance-bearing posts in the window.

    Stance-bearing means labelled PO, PD, or NG; NE posts express no
    attitude and do not count toward eligibility.
    """
    if min_posts < 1:
        raise InputDataError("min_posts must be >= 1")
    _check_window(start, end)
    counts = {}
    for post in corpus.posts:
        if post.label is None or post.label is StanceLabel.NE:
            continue
        if start <= post.timestamp < end:
            counts[post.author_id] = counts.get(post.author_id, 0) + 1
    return {user for user, n in counts.items() if n >= min_posts}


def _day_of(timestamp: int) -> str:
    return datetime.fromtimestamp(timestamp, tz=timezone.utc).date().isoformat()


def daily_label_proportions(corpus: Corpus, start: int, end: int) -> dict:
    """Per-UTC-day label mix of labelled posts in [start, end).

    Returns {iso_date: {label_name: fraction}} covering every day the
    window touches. On a day with posts the four fractions sum to 1; days
    without labelled posts map every label to None.
    """
    _check_window(start, end)
    tallies = {}
    for post in corpus.posts:
        if post.label is None or not start <= post.timestamp < end:
            continue
        day = tallies.setdefault(_day_of(post.timestamp), dict.fromkeys(StanceLabel, 0))
        day[post.label] += 1
    out = {}
    cursor = datetime.fromtimestamp(start, tz=timezone.utc).date()
    last = datetime.fromtimestamp(end - 1, tz=timezone.utc).date()
    while cursor <= last:
        key = cursor.isoformat()
        counts = tallies.get(key)
        if counts is None:
            out[key] = {label.name: None for label in StanceLabel}
        else:
            total = sum(counts.values())
            out[key] = {label.name: counts[label] / total for label in StanceLabel}
        cursor += timedelta(days=1)
    return out


def select_popular(posts, quantile: float = 0.25):
    """The most-retweeted ceil(quantile * n) authored posts.

    Only originals and quotes rank (a retweet's popularity belongs to its
    source). Ties in retweet_count break by id ascending, so the output is
    a deterministic prefix of the ranking. Empty input yields [].
    """
    if not 0.0 < quantile <= 1.0:
        raise InputDataError(f"quantile must be in (0, 1], got {quantile}")
    ranked = sorted(
        (p for p in posts if p.kind != "retweet"),
        key=lambda p: (-p.retweet_count, p.id),
    )
    if not ranked:
        return []
    return ranked[:math.ceil(quantile * len(ranked))]


def perceived_theme_vector(graph, corpus: Corpus, themes: dict, user: str,
                           start: int, end: int) -> np.ndarray:
    """Counts of themed popular posts the user's neighbors put in front of
    them during [start, end).

    `themes` maps popular post ids to Theme. A neighbor exposes the user to
    a themed post by originating it or by retweeting it inside the window;
    every such event counts, so three neighbors retweeting one post add 3.
    Returns an int64 vector of length 11 indexed by Theme.
    """
    _check_window(start, end)
    if user not in graph:
        raise KeyError(f"user not in social graph: {user!r}")
    counts = np.zeros(N_THEMES, dtype=np.int64)
    for neighbor in graph.neighbors(user):
        for post in corpus.posts_by(neighbor):
            if not start <= post.timestamp < end:
                continue
            if post.kind == "retweet":
                theme = themes.get(post.source_post_id)
            else:
                theme = themes.get(post.id)
            if theme is not None:
                counts[int(theme)] += 1
    return counts


def load_theme_annotations(path) -> dict:
    """Read post_id,theme CSV into {post_id: Theme}.

    Theme names must be canonical; duplicates and unknown names raise with
    the line number.
    """
    themes = {}
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != THEME_ANNOTATION_HEADER:
            raise InputDataError(
                f"expected header {THEME_ANNOTATION_HEADER!r}, got {header!r}")
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 2 or not all(parts):
                raise InputDataError(f"line {lineno}: expected two non-empty fields")
            post_id, name = parts
            if post_id in themes:
                raise InputDataError(f"line {lineno}: duplicate theme for post {post_id!r}")
            try:
                themes[post_id] = Theme[name]
            except KeyError:
                raise InputDataError(f"line {lineno}: unknown theme {name!r}") from None
    return themes


def _open_out(path_or_file):
    if hasattr(path_or_file, "write"):
        return path_or_file, False
    return open(path_or_file, "w", encoding="utf-8", newline=""), True


def write_hesitancy_csv(records, out) -> None:
    """Write HesitancyRecords as CSV; scores use repr for exact round-trip.

    `out` is a path or an open text file.
    """
    fh, owned = _open_out(out)
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(HESITANCY_HEADER.split(","))
        for rec in records:
            writer.writerow([rec.user, rec.window_start, rec.window_end,
                             rec.n_positive, rec.n_negative, repr(rec.score)])
    finally:
        if owned:
            fh.close()


def write_timeseries_csv(per_day: dict, out) -> None:
    """Write daily_label_proportions output as date,PO,NG,NE,PD.

    Days without posts leave their fraction cells empty. `out` is a path
    or an open text file.
    """
    fh, owned = _open_out(out)
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TIMESERIES_HEADER.split(","))
        for day in sorted(per_day):
            fractions = per_day[day]
            row = [day]
            for label in StanceLabel:
                value = fractions[label.name]
                row.append("" if value is None else repr(value))
            writer.writerow(row)
    finally:
        if owned:
            fh.close()
