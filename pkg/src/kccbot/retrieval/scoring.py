"""Score-accumulation kernel with compiled and pure-Python variants.

The hot loop of retrieval is "for each query term, walk its posting list and
accumulate weight products per document". A Cython build of that loop lives in
``_simkernel``; when the extension is unavailable (or KCCBOT_PURE_PYTHON is
set) a numpy fallback is selected at import. Both variants add the same
operands in the same order, so their outputs are bit-identical.
"""

from __future__ import annotations

import os

import numpy as np


def accumulate_scores_py(indptr, post_docs, post_weights, q_terms, q_weights, out) -> None:
    """Pure-Python (numpy) kernel: per-term sliced multiply-add.

    Doc ids within one term's postings are unique, so fancy-index += is safe.
    """
    for i in range(len(q_terms)):
        t = q_terms[i]
        s, e = indptr[t], indptr[t + 1]
        out[post_docs[s:e]] += q_weights[i] * post_weights[s:e]


try:
    from kccbot.retrieval._simkernel import accumulate_scores as _accumulate_scores_native
except ImportError:
    _accumulate_scores_native = None

if _accumulate_scores_native is not None and not os.environ.get("KCCBOT_PURE_PYTHON"):
    accumulate_scores = _accumulate_scores_native
    KERNEL_NAME = "cython"
else:
    accumulate_scores = accumulate_scores_py
    KERNEL_NAME = "python"


def kernel_name() -> str:
    """Which kernel was selected at import: 'cython' or 'python'."""
    return KERNEL_NAME


def available_kernels() -> dict[str, object]:
    """All importable kernels, for benchmarks comparing them."""
    kernels: dict[str, object] = {"python": accumulate_scores_py}
    if _accumulate_scores_native is not None:
        kernels["cython"] = _accumulate_scores_native
    return kernels


def new_score_buffer(n_docs: int) -> np.ndarray:
    return np.zeros(n_docs, dtype=np.float64)
