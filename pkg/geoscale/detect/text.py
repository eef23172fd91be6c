"""Tokenization, tf-idf vectors and inverted-index candidate pairs."""

from __future__ import annotations

import math
import re
from collections import Counter, defaultdict
from dataclasses import dataclass
from importlib import resources

import numpy as np
from scipy import sparse

from .._logger import logger

__all__ = [
    "load_stop_words",
    "tokenize",
    "tokenize_records",
    "Vocabulary",
    "TfIdfVector",
    "tfidf_cosine",
    "candidate_pairs",
    "term_support",
    "shares_term",
]

# letters and digits of any script; underscores and punctuation split
_re_token = re.compile(r"[^\W_]+")


def load_stop_words(fname=None) -> frozenset:
    """Read a stop-word list, one term per line (UTF-8).

    With no fname the bundled English list (plus "http") is used.
    """
    if fname is None:
        text = (
            resources.files("geoscale")
            .joinpath("data", "stopwords.txt")
            .read_text(encoding="utf-8")
        )
    else:
        with open(fname, encoding="utf-8") as fp:
            text = fp.read()
    words = set()
    for line in text.splitlines():
        line = line.strip().lower()
        if line and not line.startswith("#"):
            words.add(line)
    return frozenset(words)


def tokenize(text, stop_words=frozenset(), min_len=3, max_len=30) -> list:
    """Split text into lowercased terms, keeping order and duplicates.

    Examples
    --------
    >>> tokenize("Protest at Zuccotti Park!")
    ['protest', 'zuccotti', 'park']

    """
    return [
        tok
        for tok in _re_token.findall(text.lower())
        if min_len <= len(tok) <= max_len and tok not in stop_words
    ]


def tokenize_records(records, cfg) -> list:
    """Return copies of records with tokens filled from their text."""
    return [
        rec.with_tokens(
            tokenize(rec.text, cfg.stop_words, cfg.min_term_len, cfg.max_term_len),
        )
        for rec in records
    ]


@dataclass(frozen=True)
class TfIdfVector:
    """Sparse tf-idf vector: term id -> weight, with its L2 norm."""

    weights: dict
    norm: float

    @classmethod
    def from_weights(cls, weights) -> TfIdfVector:
        weights = {k: float(v) for k, v in weights.items() if v > 0.0}
        return cls(weights, math.sqrt(sum(v * v for v in weights.values())))

    def dot(self, other) -> float:
        small, large = sorted((self.weights, other.weights), key=len)
        return sum(w * large[k] for k, w in small.items() if k in large)


class Vocabulary:
    """Document frequencies and term ids over a tokenized corpus.

    Term ids follow sorted term order so that they do not depend on the
    order of the documents. idf is ``ln(N / df)``.
    """

    def __init__(self, df, n_docs) -> None:
        self.n_docs = int(n_docs)
        self.terms = sorted(df)
        self.df = {t: int(df[t]) for t in self.terms}
        self.ids = {t: i for i, t in enumerate(self.terms)}
        self.idf = np.array(
            [math.log(self.n_docs / self.df[t]) for t in self.terms], dtype=float,
        )

    @classmethod
    def from_token_lists(cls, token_lists) -> Vocabulary:
        df = Counter()
        n_docs = 0
        for tokens in token_lists:
            df.update(set(tokens))
            n_docs += 1
        return cls(df, n_docs)

    @classmethod
    def from_records(cls, records) -> Vocabulary:
        return cls.from_token_lists(rec.tokens for rec in records)

    def __len__(self) -> int:
        return len(self.terms)

    def __contains__(self, term) -> bool:
        return term in self.ids

    def __repr__(self) -> str:
        return f"<{self.__class__.__name__}: {len(self)} terms, {self.n_docs} docs>"

    def vectorize(self, tokens) -> TfIdfVector:
        """Raw-count tf times idf; unknown terms are ignored."""
        counts = Counter(t for t in tokens if t in self.ids)
        return TfIdfVector.from_weights(
            {self.ids[t]: c * self.idf[self.ids[t]] for t, c in counts.items()},
        )

    def matrix(self, token_lists) -> sparse.csr_matrix:
        """Row-normalised tf-idf matrix, one row per token list.

        Rows of empty (or all zero-idf) documents stay zero.
        """
        rows, cols, vals = [], [], []
        n = 0
        for n, tokens in enumerate(token_lists, 1):
            for t, c in Counter(tokens).items():
                tid = self.ids.get(t)
                if tid is not None:
                    rows.append(n - 1)
                    cols.append(tid)
                    vals.append(c * self.idf[tid])
        X = sparse.csr_matrix(
            (vals, (rows, cols)), shape=(n, len(self.terms)), dtype=float,
        )
        norms = np.sqrt(np.asarray(X.multiply(X).sum(axis=1)).ravel())
        norms[norms == 0.0] = 1.0
        return sparse.diags(1.0 / norms).dot(X).tocsr()


def tfidf_cosine(a, b, vocab) -> float:
    """Cosine of the angle between the tf-idf vectors of two records."""
    va = vocab.vectorize(a.tokens or ())
    vb = vocab.vectorize(b.tokens or ())
    if va.norm == 0.0 or vb.norm == 0.0:
        return 0.0
    return min(1.0, max(0.0, va.dot(vb) / (va.norm * vb.norm)))


def pair_cosines(X, i, j) -> np.ndarray:
    """Batch cosines for index arrays i, j over a row-normalised matrix."""
    i = np.asarray(i, dtype=np.intp)
    j = np.asarray(j, dtype=np.intp)
    if i.size == 0:
        return np.zeros(0)
    sims = np.asarray(X[i].multiply(X[j]).sum(axis=1)).ravel()
    return np.clip(sims, 0.0, 1.0)


def inverted_index(records, valid_terms) -> dict:
    """Map each valid term to the sorted indices of records containing it."""
    index = defaultdict(list)
    for idx, rec in enumerate(records):
        for term in set(rec.tokens or ()):
            if term in valid_terms:
                index[term].append(idx)
    return index


def candidate_pairs(records, valid_terms):
    """Yield each unordered pair (i, j), i < j, sharing a valid term once.

    Pairs are produced in increasing order of i, then j.
    """
    index = inverted_index(records, valid_terms)
    logger.debug("inverted index over %d valid terms", len(index))
    for i, rec in enumerate(records):
        partners = set()
        for term in set(rec.tokens or ()):
            postings = index.get(term)
            if postings:
                partners.update(postings)
        for j in sorted(p for p in partners if p > i):
            yield i, j


def term_support(records) -> Counter:
    """Number of distinct records containing each term."""
    support = Counter()
    for rec in records:
        support.update(set(rec.tokens or ()))
    return support


def shares_term(a, b, terms=None) -> bool:
    """Whether two records have a token in common, optionally within terms."""
    common = set(a.tokens or ()) & set(b.tokens or ())
    if terms is not None:
        common &= terms
    return bool(common)
