import math
import random

import numpy as np
import pytest

from conftest import make_docs, random_token_corpus
from kccbot.errors import DomainError, EmptyCorpus
from kccbot.retrieval import (
    build_index,
    classify_intent,
    compute_idf,
    dump_term,
    load_index,
    retrieve_top_k,
    save_index,
    vectorize_query,
)
from kccbot.retrieval.scoring import available_kernels, new_score_buffer
from oracle import brute_force_idf, brute_force_top_k

INV_SQRT2 = 1 / math.sqrt(2)


class TestComputeIdf:
    def test_half_the_corpus(self):
        assert compute_idf(2, 4) == pytest.approx(0.6931471805599453, abs=1e-12)

    def test_term_in_every_document(self):
        assert compute_idf(7, 7) == 0.0

    def test_rare_term(self):
        assert compute_idf(1, 4) == pytest.approx(1.3862943611198906, abs=1e-12)

    @pytest.mark.parametrize("df,n", [(0, 4), (-1, 4), (5, 4)])
    def test_domain_errors(self, df, n):
        with pytest.raises(DomainError):
            compute_idf(df, n)

    def test_matches_independent_evaluation(self):
        rng = random.Random(99)
        for _ in range(500):
            n = rng.randint(1, 10_000)
            df = rng.randint(1, n)
            got = compute_idf(df, n)
            want = brute_force_idf(df, n)
            assert got == pytest.approx(want, rel=1e-12, abs=1e-12)

    def test_strictly_decreasing_in_df(self):
        rng = random.Random(5)
        for _ in range(200):
            n = rng.randint(2, 1000)
            df1 = rng.randint(1, n - 1)
            df2 = rng.randint(df1 + 1, n)
            assert compute_idf(df1, n) > compute_idf(df2, n)

    def test_zero_exactly_when_term_is_everywhere(self):
        rng = random.Random(6)
        for _ in range(200):
            n = rng.randint(1, 1000)
            df = rng.randint(1, n)
            assert (compute_idf(df, n) == 0.0) == (df == n)

    def test_smoothed_denominator(self):
        assert compute_idf(1, 4, smoothed=True) == pytest.approx(math.log(2), abs=1e-12)
        assert compute_idf(4, 4, smoothed=True) < 0.0


class TestBuildIndex:
    def test_single_document_all_idf_zero(self):
        index = build_index(make_docs([["paddy", "aphids"]]))
        assert np.all(index.idf == 0.0)
        assert index.zero_vector_docs == {0}
        assert retrieve_top_k(["paddy"], index, 1) == []

    def test_disjoint_documents_orthogonal(self):
        index = build_index(make_docs([["paddy", "aphids"], ["tea", "mite"]]))
        matches = retrieve_top_k(["paddy", "aphids"], index, 5)
        assert [m.doc_id for m in matches] == [0]
        assert matches[0].score == pytest.approx(1.0, abs=1e-9)

    def test_sample_paddy_df_and_idf(self, sample_index):
        info = dump_term(sample_index, "paddy")
        assert info["df"] == 2
        assert info["idf"] == pytest.approx(math.log(5 / 2), abs=1e-12)

    def test_document_vectors_unit_norm(self, seed_index):
        for doc_id, weights in enumerate(seed_index.doc_weights):
            if doc_id in seed_index.zero_vector_docs:
                assert weights.size == 0
            else:
                assert float(np.dot(weights, weights)) == pytest.approx(1.0, abs=1e-9)

    def test_vocabulary_covers_all_tokens(self, sample_docs, sample_index):
        tokens = {t for d in sample_docs for t in d.query_tokens}
        assert set(sample_index.vocabulary) == tokens
        assert sorted(sample_index.vocabulary.values()) == list(range(len(tokens)))

    def test_df_bounds(self, seed_index):
        assert np.all(seed_index.doc_freq >= 1)
        assert np.all(seed_index.doc_freq <= seed_index.n_docs)
        assert np.all(seed_index.idf >= 0.0)

    def test_empty_corpus(self):
        with pytest.raises(EmptyCorpus):
            build_index([])

    def test_non_dense_doc_ids_rejected(self):
        docs = make_docs([["a"], ["b"]])
        docs[1].doc_id = 7
        with pytest.raises(ValueError):
            build_index(docs)

    def test_smoothed_flag_changes_idf(self, sample_docs):
        index = build_index(sample_docs, smoothed_idf=True)
        info = dump_term(index, "paddy")
        assert info["idf"] == pytest.approx(math.log(5 / 3), abs=1e-12)


class TestVectorizeQuery:
    def test_document_tokens_reproduce_stored_vector(self, sample_index, sample_docs):
        for doc in sample_docs:
            ids, weights = vectorize_query(doc.query_tokens, sample_index)
            assert np.array_equal(ids, sample_index.doc_term_ids[doc.doc_id])
            assert np.array_equal(weights, sample_index.doc_weights[doc.doc_id])

    def test_all_oov_is_zero_vector(self, sample_index):
        ids, weights = vectorize_query(["transformer", "attention"], sample_index)
        assert ids.size == 0 and weights.size == 0

    def test_known_two_term_query(self, sample_index):
        ids, weights = vectorize_query(["control", "paddy"], sample_index)
        assert ids.tolist() == sorted(
            [sample_index.vocabulary["control"], sample_index.vocabulary["paddy"]]
        )
        # Both terms have df=2, so equal idf and an even split of the unit mass.
        assert weights.tolist() == pytest.approx([INV_SQRT2, INV_SQRT2], abs=1e-12)

    def test_oov_terms_dropped_not_smoothed(self, sample_index):
        ids_a, w_a = vectorize_query(["control", "paddy"], sample_index)
        ids_b, w_b = vectorize_query(["control", "zzz", "paddy"], sample_index)
        assert np.array_equal(ids_a, ids_b)
        assert np.array_equal(w_a, w_b)


class TestRetrieveTopK:
    def test_self_retrieval(self, sample_index, sample_docs):
        for doc in sample_docs:
            matches = retrieve_top_k(doc.query_tokens, sample_index, 1)
            assert matches[0].doc_id == doc.doc_id
            assert matches[0].score == pytest.approx(1.0, abs=1e-9)

    def test_frozen_weather_query(self, sample_index):
        matches = retrieve_top_k(["weather", "report", "cachar"], sample_index, 5)
        assert matches[0].doc_id == 3
        assert matches[0].score == pytest.approx(0.7071067811865476, abs=1e-9)
        assert matches[0].answer == (
            "INFORAMATION GIVEN THAT MODERATE RAIN MAY OCCUR IN COMING 3 DAYS"
        )

    def test_full_sentence_match(self, sample_index, mini_config):
        from kccbot.corpus import normalize_text

        tokens = normalize_text("control of aphids in paddy", mini_config)
        matches = retrieve_top_k(tokens, sample_index, 1)
        assert matches[0].doc_id == 0
        assert matches[0].answer == "APPLY INDOFIL M-45/ANTRACOL @ 2 GRAM PER LITRE OF WATER"

    def test_no_overlap_returns_empty(self, sample_index):
        assert retrieve_top_k(["transformer"], sample_index, 3) == []

    def test_k_caps_results(self, sample_index):
        matches = retrieve_top_k(["paddy"], sample_index, 1)
        assert len(matches) == 1

    def test_k_below_one_rejected(self, sample_index):
        with pytest.raises(ValueError):
            retrieve_top_k(["paddy"], sample_index, 0)

    def test_zero_scores_excluded(self, sample_index):
        matches = retrieve_top_k(["paddy"], sample_index, 10)
        assert all(m.score > 0 for m in matches)
        assert {m.doc_id for m in matches} == {0, 2}

    def test_duplicate_documents_tie_break_by_doc_id(self):
        docs = make_docs([["tea", "mite"], ["paddy", "aphids"], ["paddy", "aphids"]])
        index = build_index(docs)
        matches = retrieve_top_k(["paddy", "aphids"], index, 3)
        assert [m.doc_id for m in matches] == [1, 2]
        assert matches[0].score == pytest.approx(matches[1].score, abs=1e-15)

    def test_scale_invariance(self, sample_index):
        base = retrieve_top_k(["control", "paddy"], sample_index, 5)
        tripled = retrieve_top_k(["control", "paddy"] * 3, sample_index, 5)
        assert [m.doc_id for m in base] == [m.doc_id for m in tripled]
        for a, b in zip(base, tripled):
            assert a.score == pytest.approx(b.score, abs=1e-12)

    def test_deterministic_across_runs(self, seed_index):
        query = ["paddy", "control", "weather"]
        first = retrieve_top_k(query, seed_index, 10)
        for _ in range(3):
            again = retrieve_top_k(query, seed_index, 10)
            assert [(m.doc_id, m.score) for m in again] == [
                (m.doc_id, m.score) for m in first
            ]

    def test_scores_within_unit_interval(self, seed_index):
        rng = random.Random(12)
        vocab = list(seed_index.vocabulary)
        for _ in range(50):
            query = [rng.choice(vocab) for _ in range(rng.randint(1, 6))]
            for m in retrieve_top_k(query, seed_index, 10):
                assert 0.0 <= m.score <= 1.0


class TestOracleEquivalence:
    def test_random_corpora_match_brute_force(self):
        rng = random.Random(2024)
        for _ in range(10):
            token_lists = random_token_corpus(rng)
            index = build_index(make_docs(token_lists))
            for _ in range(5):
                source = rng.randrange(len(token_lists))
                query = [rng.choice(token_lists[source]) for _ in range(rng.randint(1, 6))]
                expected = brute_force_top_k(token_lists, query, 5)
                got = retrieve_top_k(query, index, 5)
                assert [m.doc_id for m in got] == [doc_id for doc_id, _ in expected]
                for m, (_, score) in zip(got, expected):
                    assert m.score == pytest.approx(score, abs=1e-9)


class TestKernels:
    def test_kernels_bit_identical(self, seed_index):
        kernels = available_kernels()
        if len(kernels) < 2:
            pytest.skip("compiled kernel not built")
        rng = random.Random(8)
        vocab = list(seed_index.vocabulary)
        for _ in range(20):
            query = [rng.choice(vocab) for _ in range(rng.randint(1, 8))]
            ids, weights = vectorize_query(query, seed_index)
            outs = []
            for kernel in kernels.values():
                buf = new_score_buffer(seed_index.n_docs)
                kernel(
                    seed_index.postings_indptr,
                    seed_index.postings_docs,
                    seed_index.postings_weights,
                    ids,
                    weights,
                    buf,
                )
                outs.append(buf)
            assert np.array_equal(outs[0], outs[1])


class TestClassifyIntent:
    def test_exact_duplicate_query(self, sample_index, sample_docs):
        intent, confidence = classify_intent(sample_docs[0].query_tokens, sample_index)
        assert intent == "Plant Protection"
        assert confidence == pytest.approx(1.0, abs=1e-9)

    def test_all_oov(self, sample_index):
        assert classify_intent(["transformer"], sample_index) == ("UNKNOWN", 0.0)

    def test_frozen_weather_intent(self, sample_index):
        intent, confidence = classify_intent(["weather", "report", "cachar"], sample_index)
        assert intent == "Weather"
        assert confidence == pytest.approx(0.7071067811865476, abs=1e-9)


class TestSnapshot:
    def test_round_trip_preserves_retrieval(self, seed_index, tmp_path):
        path = tmp_path / "index.json"
        save_index(seed_index, path)
        loaded = load_index(path)
        assert loaded.n_docs == seed_index.n_docs
        assert loaded.vocabulary == seed_index.vocabulary
        rng = random.Random(3)
        vocab = list(seed_index.vocabulary)
        for _ in range(20):
            query = [rng.choice(vocab) for _ in range(rng.randint(1, 6))]
            a = retrieve_top_k(query, seed_index, 5)
            b = retrieve_top_k(query, loaded, 5)
            assert [(m.doc_id, m.score, m.answer) for m in a] == [
                (m.doc_id, m.score, m.answer) for m in b
            ]

    def test_norm_config_round_trip(self, sample_index, tmp_path):
        path = tmp_path / "index.json"
        save_index(sample_index, path)
        loaded = load_index(path)
        assert loaded.norm_config.stopwords == sample_index.norm_config.stopwords
        assert loaded.norm_config.min_token_len == sample_index.norm_config.min_token_len

    def test_rejects_foreign_file(self, tmp_path):
        path = tmp_path / "other.json"
        path.write_text('{"format": "something-else"}', encoding="utf-8")
        with pytest.raises(ValueError):
            load_index(path)

    def test_dump_term_oov(self, sample_index):
        assert dump_term(sample_index, "transformer") is None
