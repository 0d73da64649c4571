from kccbot.retrieval.index import (
    Match,
    TfIdfIndex,
    build_index,
    classify_intent,
    compute_idf,
    dump_term,
    load_index,
    retrieve_top_k,
    save_index,
    vectorize_query,
)
from kccbot.retrieval.scoring import available_kernels, kernel_name

__all__ = [
    "Match",
    "TfIdfIndex",
    "build_index",
    "classify_intent",
    "compute_idf",
    "dump_term",
    "load_index",
    "retrieve_top_k",
    "save_index",
    "vectorize_query",
    "available_kernels",
    "kernel_name",
]
