import random
import sys
from datetime import date
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from kccbot.corpus import NormalizationConfig, QaDocument, build_corpus, seed_corpus_path
from kccbot.dialogue import DialoguePolicy
from kccbot.ingest import KccRecord, load_csv
from kccbot.retrieval import build_index

# Sample rows from the public KCC dataset (Assam), also the head of the
# bundled seed corpus.
SAMPLE_ROWS = [
    ("Plant Protection", "CONTROL OF APHIDS IN PADDY",
     "APPLY INDOFIL M-45/ANTRACOL @ 2 GRAM PER LITRE OF WATER"),
    ("Plant Protection", "ASKING CONTROL OF LEAF HOPPER ATTACK IN BORO RICE",
     "SPRAY EKALUX @ 3 ML PER LITRE OF WATER"),
    ("Plant Protection", "SEED TREATMENT IN PADDY",
     "TREAT THE SEED WITH MANCOZEB @ 2.5 GM LITER OF WATER FOR 24 HOUR"),
    ("Weather", "QUERY REGARDING WEATHER REPORT FOR CACHAR DISTRICT",
     "INFORAMATION GIVEN THAT MODERATE RAIN MAY OCCUR IN COMING 3 DAYS"),
    ("Nutrient Management", "Micronutrient FOR CUCUMBER",
     "ADVICED TO SPRAY TRACEL-2 @ 2GM/L OF WATER"),
]

MINI_STOPWORDS = frozenset({"of", "in", "for", "the", "a", "to"})


def make_record(query_text, query_type="Plant Protection", kcc_answer="ANSWER",
                created_on=date(2019, 6, 1), **overrides) -> KccRecord:
    fields = dict(
        season="RABI",
        sector="AGRICULTURE",
        category="Cereals",
        crop="Paddy",
        query_type=query_type,
        query_text=query_text,
        kcc_answer=kcc_answer,
        state_name="ASSAM",
        district="CACHAR",
        block_name="SONAI",
        created_on=created_on,
    )
    fields.update(overrides)
    return KccRecord(**fields)


def make_docs(token_lists, query_types=None) -> list[QaDocument]:
    docs = []
    for i, tokens in enumerate(token_lists):
        qt = query_types[i] if query_types is not None else f"type{i % 3}"
        docs.append(
            QaDocument(
                doc_id=i,
                query_type=qt,
                query_tokens=list(tokens),
                raw_query=" ".join(tokens),
                answer=f"answer {i}",
            )
        )
    return docs


def random_token_corpus(rng: random.Random, max_docs=100, max_terms=200):
    """Random document token lists for oracle-equivalence checks."""
    n_docs = rng.randint(2, max_docs)
    vocab = [f"t{i}" for i in range(rng.randint(3, max_terms))]
    return [
        [rng.choice(vocab) for _ in range(rng.randint(1, 12))] for _ in range(n_docs)
    ]


@pytest.fixture
def mini_config():
    return NormalizationConfig(stopwords=MINI_STOPWORDS)


@pytest.fixture
def sample_records():
    return [make_record(q, query_type=t, kcc_answer=a) for t, q, a in SAMPLE_ROWS]


@pytest.fixture
def sample_docs(sample_records, mini_config):
    docs, _ = build_corpus(sample_records, mini_config)
    return docs


@pytest.fixture
def sample_index(sample_docs, mini_config):
    return build_index(sample_docs, norm_config=mini_config)


@pytest.fixture
def policy():
    return DialoguePolicy(call_center_number="1800-180-1551")


@pytest.fixture(scope="session")
def seed_records():
    return load_csv(seed_corpus_path()).records


@pytest.fixture(scope="session")
def seed_index(seed_records):
    config = NormalizationConfig()
    docs, _ = build_corpus(seed_records, config)
    return build_index(docs, norm_config=config)
