"""Post embedding providers.

Two providers cover the pipeline: a file-backed store of precomputed vectors
(the usual route when a sentence encoder ran offline) and a self-contained
hashed character n-gram encoder that needs no model weights, used by tests,
demos, and anywhere a deterministic lightweight text signal is enough. Both
expose `dim` and `embed_post`.
"""

import string

import numpy as np

from .corpus import clean_text
from .errors import InputDataError

# 64-bit FNV-1a constants.
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF

# Strip punctuation but keep '#' so hashtags survive normalization.
_PUNCT_TABLE = str.maketrans("", "", string.punctuation.replace("#", ""))


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a hash."""
    h = _FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * _FNV_PRIME) & _MASK64
    return h


class HashedNgramEncoder:
    """Character n-gram feature hashing into a fixed-width vector.

    Text is lowercased, stripped of punctuation except '#', and
    whitespace-collapsed. Every character 3-, 4-, and 5-gram of the result is
    hashed with 64-bit FNV-1a; the gram adds +1 or -1 (sign from the hash's
    top bit) to bucket hash % dim. The accumulated vector is L2-normalized,
    so any text with at least one n-gram embeds onto the unit sphere and
    shorter texts embed to the zero vector.
    """

    def __init__(self, dim: int = 64):
        if dim < 1:
            raise InputDataError("embedding dim must be >= 1")
        self.dim = dim

    @staticmethod
    def normalize(text: str) -> str:
        lowered = text.lower().translate(_PUNCT_TABLE)
        return " ".join(lowered.split())

    def _accumulate(self, normalized: str) -> np.ndarray:
        vec = np.zeros(self.dim, dtype=np.float64)
        for n in (3, 4, 5):
            for i in range(len(normalized) - n + 1):
                h = fnv1a64(normalized[i:i + n].encode("utf-8"))
                sign = -1.0 if h >> 63 else 1.0
                vec[h % self.dim] += sign
        return vec

    def encode_text(self, text: str) -> np.ndarray:
        vec = self._accumulate(self.normalize(text))
        norm = np.linalg.norm(vec)
        if norm > 0.0:
            vec /= norm
        return vec

    def embed_post(self, post) -> np.ndarray:
        """Embed a post's text, cleaning mentions/URLs/RT markers first."""
        return self.encode_text(clean_text(post.text))


class PrecomputedStore:
    """Embedding lookup for posts whose vectors were computed elsewhere."""

    def __init__(self, vectors, dim: int | None = None):
        self._vectors = {}
        self.dim = dim
        for post_id, vec in vectors.items():
            arr = np.asarray(vec, dtype=np.float64)
            if arr.ndim != 1:
                raise InputDataError(f"embedding for {post_id!r} is not a vector")
            if self.dim is None:
                self.dim = arr.shape[0]
            if arr.shape[0] != self.dim:
                raise InputDataError(
                    f"embedding for {post_id!r} has dim {arr.shape[0]}, expected {self.dim}")
            if not np.all(np.isfinite(arr)):
                raise InputDataError(f"embedding for {post_id!r} contains non-finite values")
            self._vectors[post_id] = arr
        if self.dim is None:
            raise InputDataError("embedding store is empty and no dim was given")

    def __len__(self):
        return len(self._vectors)

    def __contains__(self, post_id):
        return post_id in self._vectors

    def vector(self, post_id: str) -> np.ndarray:
        if post_id not in self._vectors:
            raise KeyError(f"unknown post id: {post_id!r}")
        return self._vectors[post_id]

    def embed_post(self, post) -> np.ndarray:
        return self.vector(post.id)

    def items(self):
        return self._vectors.items()


def precompute(corpus, encoder) -> PrecomputedStore:
    """Embed every post in the corpus with `encoder` into a store."""
    return PrecomputedStore(
        {post.id: encoder.embed_post(post) for post in corpus},
        dim=encoder.dim,
    )


def save_embedding_store(store: PrecomputedStore, path) -> None:
    """Write a store as 'd=<dim>' then one '<post_id>\\t<floats>' row per post.

    Floats are written with repr, which round-trips float64 bit-exactly.
    """
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"d={store.dim}\n")
        for post_id in sorted(store._vectors):
            floats = " ".join(repr(float(x)) for x in store._vectors[post_id])
            fh.write(f"{post_id}\t{floats}\n")


def load_embedding_store(path, dim: int | None = None) -> PrecomputedStore:
    """Read a save_embedding_store file back into a PrecomputedStore.

    When `dim` is given it must match the file's declared dimension; rows
    are always validated against the declared dimension, with the offending
    line named in the error.
    """
    vectors = {}
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if not header.startswith("d=") or not header[2:].isdigit():
            raise InputDataError(f"expected 'd=<int>' header, got {header!r}")
        file_dim = int(header[2:])
        if file_dim < 1:
            raise InputDataError("embedding dim must be >= 1")
        if dim is not None and dim != file_dim:
            raise InputDataError(
                f"store declares d={file_dim}, expected d={dim}")
        dim = file_dim
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            post_id, sep, rest = line.partition("\t")
            if not sep or not post_id:
                raise InputDataError(f"line {lineno}: expected '<post_id>\\t<floats>'")
            parts = rest.split()
            if len(parts) != dim:
                raise InputDataError(
                    f"line {lineno}: expected {dim} floats, got {len(parts)}")
            try:
                vec = np.array([float(p) for p in parts], dtype=np.float64)
            except ValueError:
                raise InputDataError(f"line {lineno}: non-numeric embedding value") from None
            if post_id in vectors:
                raise InputDataError(f"duplicate embedding for post {post_id!r}")
            vectors[post_id] = vec
    return PrecomputedStore(vectors, dim=dim)
