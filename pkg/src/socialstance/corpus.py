"""Post corpus: loading, validation, text cleanup, and per-user history access.

Posts arrive as JSON Lines, one object per line, with the fields described on
:class:`Post`. A :class:`Corpus` wraps a validated list of posts and indexes
them by id and by author so downstream modules can ask for a user's recent
history in O(log n).
"""

import json
from bisect import bisect_left
from dataclasses import dataclass, replace
from enum import IntEnum
from urllib.parse import urlparse

from .errors import InputDataError

POST_KINDS = ("original", "retweet", "quote")

# Case-insensitive substrings that mark a post as vaccine-related. "vaccin"
# covers vaccine/vaccinated/vaccination; the German and Spanish/Portuguese
# stems keep multilingual feeds in scope.
VACCINE_KEYWORDS = (
    "vax", "vaccin", "covidvic", "impfstoff", "vacin", "vacuna", "impfung",
)


class StanceLabel(IntEnum):
    """Four-way vaccination stance.

    PO: positive. NG: negative. NE: neutral. PD: positive about vaccination
    itself but dissatisfied with how the rollout is managed (negative surface
    emotion over a supportive stance, worth separating so the classifier is
    not misled by angry-but-pro texts). Integer values fix the class-index
    order used by the classifier head and by metric reports.
    """

    PO = 0
    NG = 1
    NE = 2
    PD = 3


@dataclass(frozen=True)
class Post:
    """One social-media post.

    kind is "original", "retweet", or "quote"; source_post_id points at the
    reposted/quoted post and is required whenever kind != "original".
    timestamp is Unix seconds (UTC). label is None for unannotated posts.
    """

    id: str
    author_id: str
    timestamp: int
    text: str
    kind: str = "original"
    source_post_id: str | None = None
    retweet_count: int = 0
    label: StanceLabel | None = None


def _validate_post(post: Post) -> None:
    if not post.id:
        raise InputDataError("post id must be a non-empty string")
    if not post.author_id:
        raise InputDataError(f"post {post.id!r}: author_id must be non-empty")
    if post.kind not in POST_KINDS:
        raise InputDataError(f"post {post.id!r}: unknown kind {post.kind!r}")
    if post.kind != "original" and not post.source_post_id:
        raise InputDataError(
            f"post {post.id!r}: kind {post.kind!r} requires source_post_id")
    if not isinstance(post.timestamp, int) or isinstance(post.timestamp, bool):
        raise InputDataError(f"post {post.id!r}: timestamp must be an integer")
    if post.retweet_count < 0:
        raise InputDataError(f"post {post.id!r}: negative retweet_count")


class Corpus:
    """Validated post collection with id and per-user timestamp indexes."""

    def __init__(self, posts):
        self.posts = list(posts)
        self.by_id = {}
        for post in self.posts:
            _validate_post(post)
            if post.id in self.by_id:
                raise InputDataError(f"duplicate post id: {post.id!r}")
            self.by_id[post.id] = post
        self._by_user = {}
        for post in self.posts:
            self._by_user.setdefault(post.author_id, []).append(post)
        self._ts_by_user = {}
        for user, seq in self._by_user.items():
            # Ties on timestamp order by id so history windows are stable.
            seq.sort(key=lambda p: (p.timestamp, p.id))
            self._ts_by_user[user] = [p.timestamp for p in seq]

    def __len__(self):
        return len(self.posts)

    def __iter__(self):
        return iter(self.posts)

    def users(self):
        """Author ids present in the corpus, sorted."""
        return sorted(self._by_user)

    def posts_by(self, user_id: str):
        """All posts by one user, oldest first. Unknown user yields []."""
        return list(self._by_user.get(user_id, ()))

    def labelled(self):
        """Posts carrying a stance label, in corpus order."""
        return [p for p in self.posts if p.label is not None]


def _parse_label(raw, lineno):
    if raw is None:
        return None
    try:
        return StanceLabel[raw]
    except (KeyError, TypeError):
        raise InputDataError(f"line {lineno}: unknown label {raw!r}") from None


def load_posts(path) -> Corpus:
    """Read a JSONL post file into a Corpus.

    Raises InputDataError naming the offending line and field on malformed
    input, and naming the id on duplicates.
    """
    posts = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InputDataError(f"line {lineno}: invalid JSON ({exc.msg})") from None
            if not isinstance(obj, dict):
                raise InputDataError(f"line {lineno}: expected a JSON object")
            for field in ("id", "author_id", "timestamp", "text"):
                if field not in obj:
                    raise InputDataError(f"line {lineno}: missing field {field!r}")
            if not isinstance(obj["timestamp"], int) or isinstance(obj["timestamp"], bool):
                raise InputDataError(f"line {lineno}: field 'timestamp' must be an integer")
            if not isinstance(obj["text"], str):
                raise InputDataError(f"line {lineno}: field 'text' must be a string")
            rt = obj.get("retweet_count", 0)
            if not isinstance(rt, int) or isinstance(rt, bool) or rt < 0:
                raise InputDataError(
                    f"line {lineno}: field 'retweet_count' must be a non-negative integer")
            post = Post(
                id=str(obj["id"]),
                author_id=str(obj["author_id"]),
                timestamp=obj["timestamp"],
                text=obj["text"],
                kind=obj.get("kind", "original"),
                source_post_id=obj.get("source_post_id"),
                retweet_count=rt,
                label=_parse_label(obj.get("label"), lineno),
            )
            if post.id in seen:
                raise InputDataError(f"duplicate post id: {post.id!r}")
            seen.add(post.id)
            try:
                _validate_post(post)
            except InputDataError as exc:
                raise InputDataError(f"line {lineno}: {exc}") from None
            posts.append(post)
    return Corpus(posts)


def write_posts(posts, path) -> None:
    """Write posts as JSONL, the inverse of load_posts."""
    with open(path, "w", encoding="utf-8") as fh:
        for post in posts:
            obj = {
                "id": post.id,
                "author_id": post.author_id,
                "timestamp": post.timestamp,
                "text": post.text,
                "kind": post.kind,
            }
            if post.source_post_id is not None:
                obj["source_post_id"] = post.source_post_id
            if post.retweet_count:
                obj["retweet_count"] = post.retweet_count
            if post.label is not None:
                obj["label"] = post.label.name
            fh.write(json.dumps(obj, sort_keys=True) + "\n")


def _is_url(token: str) -> bool:
    try:
        parsed = urlparse(token)
    except ValueError:
        return False
    return parsed.scheme in ("http", "https") and bool(parsed.netloc)


def clean_text(text: str) -> str:
    """Strip @mentions, URLs, and leading RT markers; collapse whitespace.

    Idempotent: cleaning a cleaned string is a no-op. Every leading RT token
    is dropped (repost-of-repost prefixes stack), RT later in the text is
    kept. A lone ":" right after a removed mention goes too, so "RT @u :
    text" collapses fully. May return the empty string.
    """
    kept = []
    after_mention = False
    for token in text.split():
        if token.startswith("@") and len(token) > 1:
            after_mention = True
            continue
        if after_mention and token == ":":
            after_mention = False
            continue
        after_mention = False
        if _is_url(token):
            continue
        if token == "RT" and not kept:
            continue
        kept.append(token)
    return " ".join(kept)


def filter_vaccine_related(corpus: Corpus, keywords=VACCINE_KEYWORDS) -> Corpus:
    """Posts whose raw text contains any keyword, case-insensitive.

    Matching runs on the raw text (mentions and URLs may carry the keyword);
    cleaning is a concern of the embedding step, not of topic filtering.
    """
    if not keywords:
        raise InputDataError("keyword list must be non-empty")
    lowered = [k.lower() for k in keywords]
    hits = [p for p in corpus.posts if any(k in p.text.lower() for k in lowered)]
    return Corpus(hits)


def select_annotation_set(corpus: Corpus):
    """Greedy user-covering selection of high-visibility authored posts.

    Authored posts (kind original or quote; plain retweets add no new text)
    are ranked by retweet_count descending, ties by id ascending, then taken
    in order. Taking a post covers its author and every user whose retweet
    points at it. Selection stops as soon as every user in the corpus is
    covered, so the result is a prefix of the ranking.
    """
    if not corpus.posts:
        raise InputDataError("corpus is empty")
    retweeters = {}
    for post in corpus.posts:
        if post.kind == "retweet":
            retweeters.setdefault(post.source_post_id, set()).add(post.author_id)
    everyone = {p.author_id for p in corpus.posts}
    ranked = sorted(
        (p for p in corpus.posts if p.kind != "retweet"),
        key=lambda p: (-p.retweet_count, p.id),
    )
    covered = set()
    selected = []
    for post in ranked:
        if covered >= everyone:
            break
        covered.add(post.author_id)
        covered |= retweeters.get(post.id, set())
        selected.append(post)
    return selected


def recent_posts(corpus: Corpus, user_id: str, before: int, limit: int):
    """The user's last `limit` posts strictly before `before`, newest first.

    Unknown users yield an empty list. Equal timestamps order by post id, so
    the result is deterministic.
    """
    if limit < 0:
        raise InputDataError("limit must be non-negative")
    seq = corpus._by_user.get(user_id)
    if not seq:
        return []
    # seq is sorted by (timestamp, id); find the first index at `before`.
    cut = bisect_left(corpus._ts_by_user[user_id], before)
    start = max(0, cut - limit)
    return list(reversed(seq[start:cut]))


def relabel(corpus: Corpus, labels) -> Corpus:
    """Return a new Corpus with labels attached from a post_id -> label map."""
    unknown = set(labels) - set(corpus.by_id)
    if unknown:
        raise InputDataError(f"labels reference unknown post ids: {sorted(unknown)[:5]}")
    out = []
    for post in corpus.posts:
        if post.id in labels:
            out.append(replace(post, label=labels[post.id]))
        else:
            out.append(post)
    return Corpus(out)
