from __future__ import annotations

import json
import logging
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest
from hypothesis import given
from hypothesis import strategies as st

from repofill.similarity import (
    EmbeddingProviderError,
    EmbeddingVector,
    HttpEmbeddingProvider,
    SimilarityConfig,
    cosine,
    jaccard,
    name_sim,
    score_many,
    sim,
    top_k,
)
from repofill.tokens import BpeSplitter, code_tokens, count_tokens, split_identifier, tokenize


@pytest.mark.parametrize(
    "word, pieces",
    [
        ("getHTTPResponse2", ["get", "http", "response", "2"]),
        ("user_id", ["user", "id"]),
        ("URL", ["url"]),
        ("parseXMLFile", ["parse", "xml", "file"]),
        ("x", ["x"]),
        ("ABc", ["a", "bc"]),
    ],
)
def test_split_identifier(word, pieces):
    assert split_identifier(word) == pieces


def test_tokenize_is_a_set_of_lowercase_subwords():
    bag = tokenize("saveUser(user); user.save()")
    assert bag.tokens == {"save", "user"}
    assert bag.source_len == 5


def test_code_tokens_keep_case_and_punctuation():
    assert code_tokens('return a.b("x y");') == ["return", "a", ".", "b", "(", '"', "x", "y", '"', ")", ";"]


def test_count_tokens_scales_up():
    assert count_tokens("a b c") == 3
    assert count_tokens("a b c", 1.5) == 5


def test_bpe_splitter_applies_merges_in_rank_order(tmp_path):
    merges = tmp_path / "merges.txt"
    merges.write_text("#version 0\nr e\nre p\no s\n", encoding="utf-8")
    split = BpeSplitter.from_file(merges)
    assert split("repos") == ["rep", "os"]
    assert tokenize("getRepos", split).tokens == {"g", "e", "t", "rep", "os"}


def test_jaccard_edge_cases():
    empty = tokenize("")
    assert jaccard(empty, empty) == 1.0
    assert jaccard(empty, tokenize("a")) == 0.0
    assert jaccard(tokenize("saveUser"), tokenize("save_user")) == 1.0


def test_name_sim_example_values():
    assert name_sim("getUserById", "getUserByIdent") == pytest.approx(0.6)
    assert name_sim("getUserById", "getUser") == pytest.approx(0.5)
    assert name_sim("save", "delete") == 0.0


def test_top_k_orders_by_score_then_id():
    cands = [("b", "save user"), ("a", "save user"), ("c", "load"), ("d", "save")]
    assert top_k("save user", cands, 3) == [("a", 1.0), ("b", 1.0), ("d", 0.5)]
    assert top_k("save", cands, 0) == []
    with pytest.raises(ValueError):
        top_k("save", cands, -1)


@given(st.lists(st.text(alphabet="abcXYZ_1 (", max_size=20), max_size=15), st.text(alphabet="abcXYZ_1 (", max_size=20))
def test_scores_stay_in_unit_interval(texts, query):
    for s in score_many(query, texts):
        assert 0.0 <= s <= 1.0


@given(st.text(alphabet="abcXYZ_1 (", max_size=30), st.text(alphabet="abcXYZ_1 (", max_size=30))
def test_lexical_similarity_is_symmetric(a, b):
    assert sim(a, b) == sim(b, a)


def test_cosine_checks_provider_and_length():
    a = EmbeddingVector((1.0, 0.0), "p")
    assert cosine(a, EmbeddingVector((0.0, 2.0), "p")) == 0.0
    assert cosine(a, EmbeddingVector((0.0, 0.0), "p")) == 0.0
    with pytest.raises(ValueError):
        cosine(a, EmbeddingVector((1.0, 0.0), "q"))
    with pytest.raises(ValueError):
        cosine(a, EmbeddingVector((1.0,), "p"))
    with pytest.raises(ValueError):
        EmbeddingVector((float("nan"),), "p")


def test_semantic_mode_requires_provider():
    with pytest.raises(ValueError):
        SimilarityConfig("semantic")
    with pytest.raises(ValueError):
        SimilarityConfig("fuzzy")


# -- embedding endpoint stub ---------------------------------------------------


class _EmbeddingStub(BaseHTTPRequestHandler):
    seen_auth: list = []
    fail = False

    def log_message(self, *args):
        pass

    def do_POST(self):
        body = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
        type(self).seen_auth.append(self.headers.get("Authorization"))
        if type(self).fail:
            self.send_response(503)
            self.end_headers()
            return
        # two-dimensional vector: (count of "save", count of "load") plus a bias
        data = [
            {"index": i, "embedding": [text.count("save") + 0.1, text.count("load") + 0.1]}
            for i, text in enumerate(body["input"])
        ]
        payload = json.dumps({"data": data[::-1]}).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)


@pytest.fixture
def embedding_server():
    _EmbeddingStub.seen_auth = []
    _EmbeddingStub.fail = False
    server = ThreadingHTTPServer(("127.0.0.1", 0), _EmbeddingStub)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_address[1]}/v1/embeddings"
    server.shutdown()
    server.server_close()


def test_semantic_and_hybrid_scores(embedding_server, monkeypatch):
    monkeypatch.setenv("EMB_TOKEN", "sekrit-emb-token")
    provider = HttpEmbeddingProvider(embedding_server, "stub", token_env="EMB_TOKEN", batch_size=2)
    semantic = SimilarityConfig("semantic", provider)
    scores = score_many("save save", ["save it", "load it", "save"], semantic)
    assert scores[0] == pytest.approx(scores[2])
    assert scores[0] > scores[1]
    assert all(0.0 <= s <= 1.0 for s in scores)
    assert "Bearer sekrit-emb-token" in _EmbeddingStub.seen_auth

    hybrid = SimilarityConfig("hybrid", provider)
    lexical = score_many("save save", ["save it", "load it", "save"])
    for h, lx, sm in zip(score_many("save save", ["save it", "load it", "save"], hybrid), lexical, scores):
        assert h == pytest.approx((lx + sm) / 2)


def test_embedding_results_are_cached(embedding_server):
    provider = HttpEmbeddingProvider(embedding_server, "stub")
    provider.embed(["a", "b"])
    calls = len(_EmbeddingStub.seen_auth)
    provider.embed(["b", "a"])
    assert len(_EmbeddingStub.seen_auth) == calls


def test_provider_failure_is_reported_without_secrets(embedding_server, monkeypatch, caplog):
    monkeypatch.setenv("EMB_TOKEN", "sekrit-emb-token")
    _EmbeddingStub.fail = True
    provider = HttpEmbeddingProvider(embedding_server, "stub", token_env="EMB_TOKEN")
    with caplog.at_level(logging.DEBUG):
        with pytest.raises(EmbeddingProviderError, match="unavailable"):
            score_many("q", ["x"], SimilarityConfig("semantic", provider))
    assert "sekrit-emb-token" not in caplog.text
