"""Normalization of raw records into matchable documents, plus corpus statistics.

The KCC data is call-summary shorthand in inconsistent casing, so all matching
happens over a lowercased, punctuation-stripped, stopword-filtered token list.
Answers are passed through verbatim; only queries are normalized.
"""

from __future__ import annotations

import csv
import functools
import json
import string
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable

from kccbot.errors import EmptyCorpus
from kccbot.ingest import KccRecord

UNKNOWN_LABEL = "UNKNOWN"


def load_stopwords(path) -> frozenset[str]:
    """Read a stopword file: one token per line, # comments allowed."""
    words = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            token = line.split("#", 1)[0].strip().lower()
            if token:
                words.add(token)
    return frozenset(words)


@functools.lru_cache(maxsize=1)
def default_stopwords() -> frozenset[str]:
    text = resources.files("kccbot.data").joinpath("stopwords.txt").read_text("utf-8")
    words = set()
    for line in text.splitlines():
        token = line.split("#", 1)[0].strip().lower()
        if token:
            words.add(token)
    return frozenset(words)


def seed_corpus_path() -> str:
    """Path of the bundled sample corpus (Assam-style KCC rows)."""
    return str(resources.files("kccbot.data").joinpath("seed_corpus.csv"))


@functools.lru_cache(maxsize=8)
def _strip_table(strip_chars: str) -> dict[int, None]:
    return str.maketrans("", "", strip_chars)


@dataclass(frozen=True)
class NormalizationConfig:
    """Deterministic stand-in for the dataset's manual cleanup step."""

    stopwords: frozenset[str] = field(default_factory=default_stopwords)
    min_token_len: int = 1
    strip_chars: str = string.punctuation

    def __post_init__(self):
        if self.min_token_len < 1:
            raise ValueError("min_token_len must be >= 1")
        # Stopwords must themselves be in normalized form to ever match.
        table = _strip_table(self.strip_chars)
        normalized = frozenset(
            w for w in (word.lower().translate(table).strip() for word in self.stopwords) if w
        )
        object.__setattr__(self, "stopwords", normalized)


def normalize_text(text: str, config: NormalizationConfig | None = None) -> list[str]:
    """Lowercase, strip punctuation, split, drop stopwords and short tokens.

    Idempotent on its own output; empty or all-stopword input yields [].
    """
    if config is None:
        config = NormalizationConfig()
    tokens = text.lower().translate(_strip_table(config.strip_chars)).split()
    return [
        t for t in tokens if len(t) >= config.min_token_len and t not in config.stopwords
    ]


@dataclass
class QaDocument:
    """Normalized (query, answer, intent) triple used for matching."""

    doc_id: int
    query_type: str
    query_tokens: list[str]
    raw_query: str
    answer: str


def build_corpus(
    records: list[KccRecord], config: NormalizationConfig | None = None
) -> tuple[list[QaDocument], int]:
    """Turn validated records into documents with dense ids.

    Records that normalize to zero tokens are excluded and counted, not kept
    as unmatchable husks. Duplicate query texts stay distinct documents.
    """
    if config is None:
        config = NormalizationConfig()
    docs: list[QaDocument] = []
    excluded = 0
    for record in records:
        tokens = normalize_text(record.query_text, config)
        if not tokens:
            excluded += 1
            continue
        docs.append(
            QaDocument(
                doc_id=len(docs),
                query_type=record.query_type.strip() or UNKNOWN_LABEL,
                query_tokens=tokens,
                raw_query=record.query_text,
                answer=record.kcc_answer,
            )
        )
    if not docs:
        raise EmptyCorpus(f"all {len(records)} records normalized to zero tokens")
    return docs, excluded


@dataclass
class CorpusStats:
    total: int
    by_season: dict[str, int]
    by_sector: dict[str, int]
    by_query_type: dict[str, int]
    by_category: dict[str, int]


def _count_labels(labels: Iterable[str]) -> dict[str, int]:
    counts = Counter((label.strip() or UNKNOWN_LABEL) for label in labels)
    return dict(sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])))


def corpus_stats(records: list[KccRecord]) -> CorpusStats:
    """Exact per-label counts, ordered by descending count then label."""
    return CorpusStats(
        total=len(records),
        by_season=_count_labels(r.season for r in records),
        by_sector=_count_labels(r.sector for r in records),
        by_query_type=_count_labels(r.query_type for r in records),
        by_category=_count_labels(r.category for r in records),
    )


def stats_to_json(stats: CorpusStats) -> str:
    payload = {
        "total": stats.total,
        "by_season": stats.by_season,
        "by_sector": stats.by_sector,
        "by_query_type": stats.by_query_type,
        "by_category": stats.by_category,
    }
    return json.dumps(payload, indent=2, ensure_ascii=False)


def write_stats_csv(stats: CorpusStats, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["breakdown", "label", "count"])
        writer.writerow(["total", "", stats.total])
        for name, counts in (
            ("season", stats.by_season),
            ("sector", stats.by_sector),
            ("query_type", stats.by_query_type),
            ("category", stats.by_category),
        ):
            for label, count in counts.items():
                writer.writerow([name, label, count])
