"""TF-IDF index over Q/A documents and cosine-similarity retrieval.

Weighting scheme:

* tf(t, d) is the raw count of t in d.
* idf(t) = ln(N / df(t)), where df(t) is the number of documents containing
  t. Every vocabulary term has df >= 1, so the ratio is always defined; the
  "1 + df" corrected denominator is available behind ``smoothed_idf`` for
  experiments, at the cost of idf no longer being non-negative.
* Document and query vectors hold tf*idf components and are L2-normalized,
  so a match score is the cosine of the two vectors and lands in [0, 1].

Terms get ids by sorted order, postings are stored CSR-style with doc ids
ascending per term, and ties in retrieval break by ascending doc id — all of
which makes retrieval deterministic and bit-stable across runs and kernels.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from kccbot.corpus import NormalizationConfig, QaDocument
from kccbot.errors import DomainError, EmptyCorpus
from kccbot.retrieval.scoring import accumulate_scores, new_score_buffer

INDEX_FORMAT = "kccbot-tfidf-index"
INDEX_VERSION = 1


def compute_idf(df: int, n_docs: int, *, smoothed: bool = False) -> float:
    """Inverse document frequency of a term seen in `df` of `n_docs` documents.

    Natural log of n_docs/df: 0 for a term in every document, growing as the
    term gets rarer. ``smoothed`` switches the denominator to 1 + df.
    """
    if df < 1 or df > n_docs:
        raise DomainError(f"df={df} outside [1, {n_docs}]")
    if smoothed:
        return math.log(n_docs / (1 + df))
    return math.log(n_docs / df)


@dataclass
class Match:
    """One scored retrieval hit."""

    doc_id: int
    score: float
    query_type: str
    answer: str


@dataclass
class DocMeta:
    query_type: str
    answer: str
    raw_query: str


@dataclass
class TfIdfIndex:
    vocabulary: dict[str, int]
    doc_freq: np.ndarray  # int64, per term_id
    idf: np.ndarray  # float64, per term_id
    n_docs: int
    # Per-document sparse unit vectors (term ids ascending).
    doc_term_ids: list[np.ndarray]
    doc_weights: list[np.ndarray]
    doc_meta: list[DocMeta]
    zero_vector_docs: frozenset[int]
    smoothed_idf: bool
    norm_config: NormalizationConfig
    # Inverted postings, CSR layout: term_id -> slice of (doc_id, weight).
    postings_indptr: np.ndarray = field(repr=False, default=None)
    postings_docs: np.ndarray = field(repr=False, default=None)
    postings_weights: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        if self.postings_indptr is None:
            self._build_postings()

    def _build_postings(self) -> None:
        n_terms = len(self.vocabulary)
        counts = np.zeros(n_terms + 1, dtype=np.int64)
        for ids in self.doc_term_ids:
            counts[ids + 1] += 1
        indptr = np.cumsum(counts)
        docs = np.empty(indptr[-1], dtype=np.int32)
        weights = np.empty(indptr[-1], dtype=np.float64)
        cursor = indptr[:-1].copy()
        # Docs are walked in ascending doc_id, so each posting list stays sorted.
        for doc_id, (ids, w) in enumerate(zip(self.doc_term_ids, self.doc_weights)):
            pos = cursor[ids]
            docs[pos] = doc_id
            weights[pos] = w
            cursor[ids] += 1
        self.postings_indptr = indptr
        self.postings_docs = docs
        self.postings_weights = weights


def build_index(
    docs: Sequence[QaDocument],
    *,
    smoothed_idf: bool = False,
    norm_config: NormalizationConfig | None = None,
) -> TfIdfIndex:
    """Build the index: vocabulary, df, idf, and unit document vectors.

    Documents whose pre-normalization vector is all zero (every one of their
    terms appears in every document) are retained with an empty vector and
    flagged in ``zero_vector_docs``; they can never be retrieved.
    """
    if not docs:
        raise EmptyCorpus("cannot index an empty document list")
    if norm_config is None:
        norm_config = NormalizationConfig()

    terms = sorted({t for d in docs for t in d.query_tokens})
    vocabulary = {t: i for i, t in enumerate(terms)}
    n_docs = len(docs)

    doc_freq = np.zeros(len(terms), dtype=np.int64)
    for d in docs:
        for t in set(d.query_tokens):
            doc_freq[vocabulary[t]] += 1
    idf = np.array(
        [compute_idf(int(f), n_docs, smoothed=smoothed_idf) for f in doc_freq],
        dtype=np.float64,
    )

    doc_term_ids: list[np.ndarray] = []
    doc_weights: list[np.ndarray] = []
    doc_meta: list[DocMeta] = []
    zero_docs = set()
    for pos, d in enumerate(docs):
        if d.doc_id != pos:
            raise ValueError(f"doc_ids must be dense from 0; got {d.doc_id} at {pos}")
        ids, weights = _sparse_tfidf(d.query_tokens, vocabulary, idf)
        if ids.size == 0:
            zero_docs.add(d.doc_id)
        doc_term_ids.append(ids)
        doc_weights.append(weights)
        doc_meta.append(DocMeta(d.query_type, d.answer, d.raw_query))

    return TfIdfIndex(
        vocabulary=vocabulary,
        doc_freq=doc_freq,
        idf=idf,
        n_docs=n_docs,
        doc_term_ids=doc_term_ids,
        doc_weights=doc_weights,
        doc_meta=doc_meta,
        zero_vector_docs=frozenset(zero_docs),
        smoothed_idf=smoothed_idf,
        norm_config=norm_config,
    )


def _sparse_tfidf(
    tokens: Sequence[str], vocabulary: dict[str, int], idf: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """tf*idf over known tokens, L2-normalized; empty arrays if the norm is 0."""
    counts = Counter(tokens)
    entries = sorted(
        (vocabulary[t], n) for t, n in counts.items() if t in vocabulary
    )
    ids = np.array([i for i, _ in entries], dtype=np.int32)
    weights = np.array([n * idf[i] for i, n in entries], dtype=np.float64)
    nonzero = weights != 0.0
    ids, weights = ids[nonzero], weights[nonzero]
    norm = math.sqrt(float(np.dot(weights, weights)))
    if norm == 0.0:
        return np.empty(0, dtype=np.int32), np.empty(0, dtype=np.float64)
    return ids, weights / norm


def vectorize_query(tokens: Sequence[str], index: TfIdfIndex) -> tuple[np.ndarray, np.ndarray]:
    """Unit query vector as (term_ids, weights); both empty when all-OOV."""
    return _sparse_tfidf(tokens, index.vocabulary, index.idf)


def retrieve_top_k(tokens: Sequence[str], index: TfIdfIndex, k: int) -> list[Match]:
    """Top-k cosine matches, score descending, ties by ascending doc id.

    Zero-score documents are excluded, so an all-OOV query returns [].
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    q_ids, q_weights = vectorize_query(tokens, index)
    if q_ids.size == 0:
        return []
    scores = new_score_buffer(index.n_docs)
    accumulate_scores(
        index.postings_indptr,
        index.postings_docs,
        index.postings_weights,
        q_ids,
        q_weights,
        scores,
    )
    candidates = np.nonzero(scores > 0.0)[0]
    if candidates.size == 0:
        return []
    order = np.lexsort((candidates, -scores[candidates]))
    top = candidates[order[:k]]
    return [
        Match(
            doc_id=int(doc),
            score=min(float(scores[doc]), 1.0),
            query_type=index.doc_meta[doc].query_type,
            answer=index.doc_meta[doc].answer,
        )
        for doc in top
    ]


def classify_intent(tokens: Sequence[str], index: TfIdfIndex) -> tuple[str, float]:
    """Intent of the nearest document and its cosine score as confidence."""
    matches = retrieve_top_k(tokens, index, 1)
    if not matches:
        return ("UNKNOWN", 0.0)
    return (matches[0].query_type, matches[0].score)


def dump_term(index: TfIdfIndex, term: str) -> dict | None:
    """df and idf of one vocabulary term, for auditing; None if OOV."""
    term_id = index.vocabulary.get(term)
    if term_id is None:
        return None
    return {
        "term": term,
        "term_id": term_id,
        "df": int(index.doc_freq[term_id]),
        "idf": float(index.idf[term_id]),
        "n_docs": index.n_docs,
    }


def save_index(index: TfIdfIndex, path) -> None:
    """Write a versioned JSON snapshot; floats survive exactly via repr."""
    terms = [None] * len(index.vocabulary)
    for term, term_id in index.vocabulary.items():
        terms[term_id] = term
    payload = {
        "format": INDEX_FORMAT,
        "version": INDEX_VERSION,
        "smoothed_idf": index.smoothed_idf,
        "n_docs": index.n_docs,
        "terms": terms,
        "doc_freq": [int(f) for f in index.doc_freq],
        "normalization": {
            "stopwords": sorted(index.norm_config.stopwords),
            "min_token_len": index.norm_config.min_token_len,
            "strip_chars": index.norm_config.strip_chars,
        },
        "docs": [
            {
                "query_type": meta.query_type,
                "answer": meta.answer,
                "raw_query": meta.raw_query,
                "term_ids": ids.tolist(),
                "weights": weights.tolist(),
            }
            for meta, ids, weights in zip(index.doc_meta, index.doc_term_ids, index.doc_weights)
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False)


def load_index(path) -> TfIdfIndex:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("format") != INDEX_FORMAT:
        raise ValueError(f"not an index snapshot: {path}")
    if payload.get("version") != INDEX_VERSION:
        raise ValueError(f"unsupported index version {payload.get('version')}")

    vocabulary = {t: i for i, t in enumerate(payload["terms"])}
    doc_freq = np.array(payload["doc_freq"], dtype=np.int64)
    n_docs = payload["n_docs"]
    smoothed = payload["smoothed_idf"]
    idf = np.array(
        [compute_idf(int(f), n_docs, smoothed=smoothed) for f in doc_freq],
        dtype=np.float64,
    )
    norm_config = NormalizationConfig(
        stopwords=frozenset(payload["normalization"]["stopwords"]),
        min_token_len=payload["normalization"]["min_token_len"],
        strip_chars=payload["normalization"]["strip_chars"],
    )
    doc_term_ids, doc_weights, doc_meta = [], [], []
    zero_docs = set()
    for doc_id, doc in enumerate(payload["docs"]):
        ids = np.array(doc["term_ids"], dtype=np.int32)
        weights = np.array(doc["weights"], dtype=np.float64)
        if ids.size == 0:
            zero_docs.add(doc_id)
        doc_term_ids.append(ids)
        doc_weights.append(weights)
        doc_meta.append(DocMeta(doc["query_type"], doc["answer"], doc["raw_query"]))

    return TfIdfIndex(
        vocabulary=vocabulary,
        doc_freq=doc_freq,
        idf=idf,
        n_docs=n_docs,
        doc_term_ids=doc_term_ids,
        doc_weights=doc_weights,
        doc_meta=doc_meta,
        zero_vector_docs=frozenset(zero_docs),
        smoothed_idf=smoothed,
        norm_config=norm_config,
    )
