import math

import numpy as np
import pytest
from numpy import testing

from geoscale.detect.config import DetectionConfig
from geoscale.detect.record import Record
from geoscale.detect.text import (
    TfIdfVector,
    Vocabulary,
    candidate_pairs,
    load_stop_words,
    pair_cosines,
    shares_term,
    term_support,
    tfidf_cosine,
    tokenize,
    tokenize_records,
)


def docs(*token_lists):
    return [
        Record(str(i), "u", 0.0, 0.0, 0.0, " ".join(t), tuple(t))
        for i, t in enumerate(token_lists)
    ]


def test_tokenize():
    assert tokenize("Protest at Zuccotti Park!") == ["protest", "zuccotti", "park"]
    assert tokenize("http http http", stop_words={"http"}) == []
    assert tokenize("aa") == []
    assert tokenize("OWS ows #OWS") == ["ows", "ows", "ows"]
    assert tokenize("Café_au_lait", min_len=2) == ["café", "au", "lait"]
    assert tokenize("x" * 31 + " ok1", min_len=3) == ["ok1"]


def test_load_stop_words(tmp_path):
    words = load_stop_words()
    assert "http" in words
    assert "and" in words
    assert not any(w.startswith("#") for w in words)
    path = tmp_path / "stop.txt"
    path.write_text("# custom\nFoo\n\nbar\n", encoding="utf-8")
    assert load_stop_words(str(path)) == frozenset({"foo", "bar"})


def test_tokenize_records():
    cfg = DetectionConfig()
    records = [Record("1", "u", 0.0, 0.0, 0.0, "The protest at Zuccotti http://t.co")]
    out = tokenize_records(records, cfg)
    assert out[0].tokens == ("protest", "zuccotti")
    assert records[0].tokens is None


def test_vocabulary():
    vocab = Vocabulary.from_token_lists([["a", "b"], ["a", "c"], ["d", "a"]])
    assert vocab.terms == ["a", "b", "c", "d"]
    assert vocab.n_docs == 3
    assert vocab.df == {"a": 3, "b": 1, "c": 1, "d": 1}
    testing.assert_allclose(vocab.idf, [0.0, math.log(3), math.log(3), math.log(3)])
    assert "a" in vocab
    assert "z" not in vocab
    assert len(vocab) == 4
    v = vocab.vectorize(["b", "b", "c", "zzz"])
    assert v.weights == {1: 2 * math.log(3), 2: math.log(3)}
    assert v.norm == pytest.approx(math.sqrt(5) * math.log(3))


def test_tfidf_vector():
    v = TfIdfVector.from_weights({0: 3.0, 1: 4.0, 2: 0.0})
    assert v.weights == {0: 3.0, 1: 4.0}
    assert v.norm == 5.0
    w = TfIdfVector.from_weights({1: 1.0})
    assert v.dot(w) == w.dot(v) == 4.0


def dense_cosine(token_lists, i, j):
    """Brute-force tf-idf over the full term-document matrix."""
    terms = sorted({t for tl in token_lists for t in tl})
    n = len(token_lists)
    tf = np.array([[tl.count(t) for t in terms] for tl in token_lists], dtype=float)
    df = (tf > 0).sum(axis=0)
    m = tf * np.log(n / df)
    a, b = m[i], m[j]
    return float(a @ b / (np.linalg.norm(a) * np.linalg.norm(b)))


def test_tfidf_cosine():
    lists = [["a", "b"], ["a", "c"], ["d"]]
    records = docs(*lists)
    vocab = Vocabulary.from_records(records)
    # "a" is in 2 of 3 documents, so the vectors share one positive weight
    expected = dense_cosine(lists, 0, 1)
    shared = math.log(1.5) ** 2
    assert expected == pytest.approx(shared / (shared + math.log(3) ** 2))
    assert tfidf_cosine(records[0], records[1], vocab) == pytest.approx(expected)
    assert tfidf_cosine(records[1], records[0], vocab) == pytest.approx(expected)
    assert tfidf_cosine(records[0], records[2], vocab) == 0.0
    assert tfidf_cosine(records[0], records[0], vocab) == pytest.approx(1.0)
    empty = Record("e", "u", 0.0, 0.0, 0.0, "", ())
    assert tfidf_cosine(records[0], empty, vocab) == 0.0


def test_tfidf_order_invariance():
    lists = [["ows", "park", "ows"], ["ows", "rally"], ["lunch", "park"], ["rally"]]
    records = docs(*lists)
    shuffled = [records[k] for k in (3, 1, 0, 2)]
    v1 = Vocabulary.from_records(records)
    v2 = Vocabulary.from_records(shuffled)
    assert v1.terms == v2.terms
    testing.assert_array_equal(v1.idf, v2.idf)
    assert tfidf_cosine(records[0], records[1], v1) == tfidf_cosine(
        records[0], records[1], v2,
    )


def test_matrix_and_pair_cosines():
    lists = [["ows", "park", "ows"], ["ows", "rally"], ["lunch", "park"], [], ["rally"]]
    records = docs(*lists)
    vocab = Vocabulary.from_records(records)
    X = vocab.matrix(lists)
    assert X.shape == (5, len(vocab))
    norms = np.sqrt(np.asarray(X.multiply(X).sum(axis=1)).ravel())
    testing.assert_allclose(norms, [1, 1, 1, 0, 1])
    i = np.array([0, 0, 1, 2, 3])
    j = np.array([1, 2, 4, 4, 4])
    expected = [tfidf_cosine(records[a], records[b], vocab) for a, b in zip(i, j)]
    testing.assert_allclose(pair_cosines(X, i, j), expected, atol=1e-12)
    assert pair_cosines(X, [], []).shape == (0,)


def test_candidate_pairs():
    records = docs(["a"], ["a"], ["b"])
    assert list(candidate_pairs(records, {"a", "b"})) == [(0, 1)]
    assert list(candidate_pairs(records, {"b"})) == []
    records = docs(["x", "y"], ["x"], ["y", "x"], ["x", "z"])
    pairs = list(candidate_pairs(records, {"x", "y"}))
    assert pairs == [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]


def test_candidate_pairs_superset():
    rng = np.random.default_rng(1)
    words = ["w%d" % k for k in range(12)]
    lists = [list(rng.choice(words, rng.integers(1, 5))) for _ in range(40)]
    records = docs(*lists)
    valid = set(words[:6])
    vocab = Vocabulary.from_records(docs(*[[t for t in tl if t in valid] for tl in lists]))
    pairs = set(candidate_pairs(records, valid))
    for a in range(len(records)):
        for b in range(a + 1, len(records)):
            if (a, b) not in pairs:
                ra = records[a].with_tokens(t for t in lists[a] if t in valid)
                rb = records[b].with_tokens(t for t in lists[b] if t in valid)
                assert tfidf_cosine(ra, rb, vocab) == 0.0
            else:
                assert shares_term(records[a], records[b], valid)


def test_term_support():
    records = docs(["a", "a", "b"], ["a"], [])
    assert term_support(records) == {"a": 2, "b": 1}
    assert shares_term(records[0], records[1])
    assert not shares_term(records[0], records[1], {"b"})
    assert not shares_term(records[0], records[2])
