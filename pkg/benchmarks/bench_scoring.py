#!/usr/bin/env python3
"""Benchmark the compiled scoring kernel against the pure-Python fallback.

Builds a synthetic corpus, runs the same query batch through every available
kernel, verifies they agree bit-for-bit, and prints a timing table.

    python3 benchmarks/bench_scoring.py --docs 20000 --queries 500
"""

import argparse
import random
import statistics
import time

from kccbot.corpus import QaDocument
from kccbot.retrieval import build_index, vectorize_query
from kccbot.retrieval.scoring import available_kernels, new_score_buffer


def synthetic_index(n_docs: int, vocab_size: int, tokens_per_doc: int, seed: int):
    rng = random.Random(seed)
    vocab = [f"w{i}" for i in range(vocab_size)]
    docs = [
        QaDocument(
            doc_id=i,
            query_type=f"type{i % 8}",
            query_tokens=[rng.choice(vocab) for _ in range(tokens_per_doc)],
            raw_query="",
            answer="",
        )
        for i in range(n_docs)
    ]
    return build_index(docs), docs


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--docs", type=int, default=20_000)
    parser.add_argument("--vocab", type=int, default=3_000)
    parser.add_argument("--tokens-per-doc", type=int, default=8)
    parser.add_argument("--queries", type=int, default=500)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    print(f"building index: {args.docs} docs, vocab {args.vocab} ...")
    started = time.perf_counter()
    index, docs = synthetic_index(args.docs, args.vocab, args.tokens_per_doc, args.seed)
    print(f"  built in {time.perf_counter() - started:.2f}s "
          f"({index.postings_docs.size} postings)")

    rng = random.Random(args.seed + 1)
    queries = []
    for _ in range(args.queries):
        source = docs[rng.randrange(len(docs))].query_tokens
        queries.append(vectorize_query(source[: rng.randint(2, len(source))], index))

    kernels = available_kernels()
    if len(kernels) < 2:
        print("note: compiled kernel not built; timing the fallback only")

    reference = None
    for name, kernel in kernels.items():
        timings = []
        for _ in range(args.repeats):
            started = time.perf_counter()
            checksum = 0.0
            for q_ids, q_weights in queries:
                scores = new_score_buffer(index.n_docs)
                kernel(
                    index.postings_indptr,
                    index.postings_docs,
                    index.postings_weights,
                    q_ids,
                    q_weights,
                    scores,
                )
                checksum += float(scores.sum())
            timings.append(time.perf_counter() - started)
        if reference is None:
            reference = checksum
        elif checksum != reference:
            raise SystemExit(f"kernel {name} disagrees: {checksum!r} != {reference!r}")
        best = min(timings)
        print(
            f"{name:>8}: best {best * 1000:8.1f} ms for {args.queries} queries "
            f"({best / args.queries * 1e6:7.1f} us/query, "
            f"median {statistics.median(timings) * 1000:.1f} ms)"
        )


if __name__ == "__main__":
    main()
