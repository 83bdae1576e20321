"""Hashed n-gram encoder and the precomputed vector store.

The hashing tests verify against an independent FNV-1a written inline and
against known reference digests of the 64-bit FNV-1a function.
"""

import numpy as np
import pytest

from socialstance.corpus import Corpus, Post
from socialstance.embed import (
    HashedNgramEncoder,
    PrecomputedStore,
    fnv1a64,
    load_embedding_store,
    precompute,
    save_embedding_store,
)
from socialstance.errors import InputDataError


def oracle_fnv1a64(data: bytes) -> int:
    h = 0xCBF29CE484222325
    for b in data:
        h = ((h ^ b) * 0x100000001B3) % (1 << 64)
    return h


class TestFnv:
    def test_known_vectors(self):
        # published FNV-1a 64-bit digests
        assert fnv1a64(b"") == 0xCBF29CE484222325
        assert fnv1a64(b"a") == 0xAF63DC4C8601EC8C
        assert fnv1a64(b"foobar") == 0x85944171F73967E8

    def test_matches_inline_oracle(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            data = bytes(rng.integers(0, 256, size=int(rng.integers(0, 20))))
            assert fnv1a64(data) == oracle_fnv1a64(data)


class TestNormalize:
    def test_lowercase_punct_whitespace(self):
        assert HashedNgramEncoder.normalize("Hello, World!  ") == "hello world"

    def test_hash_sign_kept(self):
        assert HashedNgramEncoder.normalize("#VaxFacts rocks.") == "#vaxfacts rocks"


class TestEncoder:
    def test_unit_norm(self):
        enc = HashedNgramEncoder(dim=32)
        vec = enc.encode_text("vaccines work fine")
        assert vec.shape == (32,)
        np.testing.assert_allclose(np.linalg.norm(vec), 1.0, atol=1e-12)

    def test_short_text_is_zero(self):
        enc = HashedNgramEncoder(dim=16)
        # normalized length < 3 leaves no character trigram
        assert np.all(enc.encode_text("ab") == 0.0)
        assert np.all(enc.encode_text("") == 0.0)

    def test_matches_bucket_oracle(self):
        enc = HashedNgramEncoder(dim=8)
        text = "Vax #Now!"
        norm = "vax #now"
        raw = np.zeros(8)
        for n in (3, 4, 5):
            for i in range(len(norm) - n + 1):
                h = oracle_fnv1a64(norm[i:i + n].encode("utf-8"))
                raw[h % 8] += -1.0 if h >> 63 else 1.0
        raw /= np.linalg.norm(raw)
        np.testing.assert_array_equal(enc.encode_text(text), raw)

    def test_deterministic(self):
        enc = HashedNgramEncoder(dim=64)
        a = enc.encode_text("some post text here")
        b = enc.encode_text("some post text here")
        np.testing.assert_array_equal(a, b)

    def test_embed_post_cleans_first(self):
        enc = HashedNgramEncoder(dim=64)
        noisy = Post(id="a", author_id="u", timestamp=0,
                     text="RT @x : vaccines are safe https://t.co/q")
        clean = Post(id="b", author_id="u", timestamp=0, text="vaccines are safe")
        np.testing.assert_array_equal(enc.embed_post(noisy), enc.embed_post(clean))

    def test_bad_dim(self):
        with pytest.raises(InputDataError):
            HashedNgramEncoder(dim=0)


class TestStore:
    def test_lookup_and_errors(self):
        store = PrecomputedStore({"a": [1.0, 2.0], "b": [0.0, 1.0]})
        assert store.dim == 2
        assert len(store) == 2
        np.testing.assert_array_equal(store.vector("a"), [1.0, 2.0])
        with pytest.raises(KeyError, match="unknown post id"):
            store.vector("zzz")

    def test_dim_mismatch_rejected(self):
        with pytest.raises(InputDataError):
            PrecomputedStore({"a": [1.0, 2.0], "b": [1.0]})

    def test_non_finite_rejected(self):
        with pytest.raises(InputDataError):
            PrecomputedStore({"a": [np.nan, 0.0]})

    def test_empty_needs_dim(self):
        with pytest.raises(InputDataError):
            PrecomputedStore({})
        assert PrecomputedStore({}, dim=4).dim == 4

    def test_precompute_covers_corpus(self):
        corpus = Corpus([
            Post(id="a", author_id="u", timestamp=0, text="vaccine drive today"),
            Post(id="b", author_id="v", timestamp=1, text="second dose done"),
        ])
        store = precompute(corpus, HashedNgramEncoder(dim=16))
        assert "a" in store and "b" in store
        assert store.dim == 16


class TestStoreIO:
    def test_round_trip_bit_exact(self, tmp_path):
        rng = np.random.default_rng(5)
        vectors = {f"p{i}": rng.standard_normal(6) for i in range(10)}
        store = PrecomputedStore(vectors)
        path = tmp_path / "store.tsv"
        save_embedding_store(store, path)
        loaded = load_embedding_store(path)
        assert loaded.dim == 6
        for pid, vec in vectors.items():
            np.testing.assert_array_equal(loaded.vector(pid), vec)

    def test_header_dim_validated(self, tmp_path):
        path = tmp_path / "store.tsv"
        path.write_text("d=3\na\t1.0 2.0 3.0\n")
        assert load_embedding_store(path, dim=3).dim == 3
        with pytest.raises(InputDataError, match="d=3"):
            load_embedding_store(path, dim=8)

    def test_row_width_validated(self, tmp_path):
        path = tmp_path / "store.tsv"
        path.write_text("d=3\na\t1.0 2.0\n")
        with pytest.raises(InputDataError, match="line 2"):
            load_embedding_store(path)

    def test_bad_header(self, tmp_path):
        path = tmp_path / "store.tsv"
        path.write_text("dim: 3\n")
        with pytest.raises(InputDataError, match="header"):
            load_embedding_store(path)

    def test_duplicate_post_rejected(self, tmp_path):
        path = tmp_path / "store.tsv"
        path.write_text("d=1\na\t1.0\na\t2.0\n")
        with pytest.raises(InputDataError, match="duplicate"):
            load_embedding_store(path)
