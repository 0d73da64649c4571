"""Independent brute-force retrieval oracle used to cross-check the index.

Deliberately shares no code with kccbot.retrieval: plain dicts and math,
recomputing tf, df, idf and cosine from scratch on every call.
"""

import math
from collections import Counter


def brute_force_idf(df: int, n_docs: int) -> float:
    # log(n) - log(df) is a different evaluation path than log(n / df).
    return math.log(n_docs) - math.log(df)


def _unit_vec(tokens, idf):
    counts = Counter(t for t in tokens if t in idf)
    vec = {t: c * idf[t] for t, c in counts.items()}
    vec = {t: w for t, w in vec.items() if w != 0.0}
    norm = math.sqrt(sum(w * w for _, w in sorted(vec.items())))
    if norm == 0.0:
        return {}
    return {t: w / norm for t, w in vec.items()}


def brute_force_top_k(doc_token_lists, query_tokens, k):
    """Rank documents by cosine over tf*idf, ties by ascending doc id."""
    n = len(doc_token_lists)
    df = Counter()
    for tokens in doc_token_lists:
        for t in set(tokens):
            df[t] += 1
    idf = {t: math.log(n / c) for t, c in df.items()}
    query = _unit_vec(query_tokens, idf)
    scored = []
    for doc_id, tokens in enumerate(doc_token_lists):
        doc = _unit_vec(tokens, idf)
        score = sum(query[t] * doc[t] for t in sorted(query) if t in doc)
        if score > 0.0:
            scored.append((doc_id, score))
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return scored[:k]
