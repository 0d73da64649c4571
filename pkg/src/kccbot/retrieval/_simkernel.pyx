# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled score-accumulation kernel for sparse cosine retrieval."""


def accumulate_scores(
    const long long[::1] indptr,
    const int[::1] post_docs,
    const double[::1] post_weights,
    const int[::1] q_terms,
    const double[::1] q_weights,
    double[::1] out,
):
    """out[doc] += q_weight[t] * posting_weight[t, doc] over all query terms.

    Mirrors the numpy fallback exactly: same term order, same posting order,
    so results are bit-identical between the two kernels.
    """
    cdef Py_ssize_t i, j, start, end
    cdef double qw
    cdef long long t
    for i in range(q_terms.shape[0]):
        t = q_terms[i]
        qw = q_weights[i]
        start = indptr[t]
        end = indptr[t + 1]
        for j in range(start, end):
            out[post_docs[j]] += qw * post_weights[j]
