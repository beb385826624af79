# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled twin of ``_wsearch_py.search``; same data layout and results."""

from cpython.mem cimport PyMem_Malloc, PyMem_Free


cdef inline bint _feasible(int p, long* val, long* lo, long* hi,
                           long* cons_start, long* cons_end, long* cons_bound,
                           long* term_coef, long* term_start, long* term_end, long* factors,
                           long* watch_start, long* watch_end, long* watch) nogil:
    cdef long w, c, t, f, q, coef, prod, total, v
    for w in range(watch_start[p], watch_end[p]):
        c = watch[w]
        total = 0
        for t in range(cons_start[c], cons_end[c]):
            coef = term_coef[t]
            prod = coef
            for f in range(term_start[t], term_end[t]):
                q = factors[f]
                if q <= p:
                    v = val[q]
                elif coef > 0:
                    v = hi[q]
                else:
                    v = lo[q]
                prod *= v
                if prod == 0:
                    break
            total += prod
        if total < cons_bound[c]:
            return False
    return True


cdef long* _copy(object seq):
    cdef Py_ssize_t i, k = len(seq)
    cdef long* out = <long*> PyMem_Malloc((k + 1) * sizeof(long))
    if out == NULL:
        raise MemoryError()
    for i in range(k):
        out[i] = seq[i]
    return out


def search(int n, lo, hi, cons_start, cons_end, cons_bound, term_coef, term_start, term_end,
           factors, watch_start, watch_end, watch, long node_budget):
    if n == 0:
        return [], 0
    cdef long* clo = _copy(lo)
    cdef long* chi = _copy(hi)
    cdef long* cs = _copy(cons_start)
    cdef long* ce = _copy(cons_end)
    cdef long* cb = _copy(cons_bound)
    cdef long* tc = _copy(term_coef)
    cdef long* ts = _copy(term_start)
    cdef long* te = _copy(term_end)
    cdef long* fa = _copy(factors)
    cdef long* ws = _copy(watch_start)
    cdef long* we = _copy(watch_end)
    cdef long* wa = _copy(watch)
    cdef long* val = <long*> PyMem_Malloc((n + 1) * sizeof(long))
    cdef long nodes = 0
    cdef int p = 0
    cdef int found = 0
    try:
        with nogil:
            val[0] = clo[0] - 1
            while p >= 0:
                val[p] += 1
                if val[p] > chi[p]:
                    p -= 1
                    continue
                nodes += 1
                if nodes > node_budget:
                    break
                if _feasible(p, val, clo, chi, cs, ce, cb, tc, ts, te, fa, ws, we, wa):
                    if p == n - 1:
                        found = 1
                        break
                    p += 1
                    val[p] = clo[p] - 1
        if found:
            return [val[i] for i in range(n)], nodes
        return None, nodes
    finally:
        PyMem_Free(clo); PyMem_Free(chi); PyMem_Free(cs); PyMem_Free(ce); PyMem_Free(cb)
        PyMem_Free(tc); PyMem_Free(ts); PyMem_Free(te); PyMem_Free(fa)
        PyMem_Free(ws); PyMem_Free(we); PyMem_Free(wa); PyMem_Free(val)
