# cython: language_level=3
"""Compiled twin of elim_py.row_echelon_int (fraction-free Bareiss echelon).

Entries are Python ints (arbitrary precision is required), so the win over
the pure version comes from compiled loop/index overhead, not from C
arithmetic.  Semantics must match elim_py exactly; the test suite and the
benchmark run both backends against each other.
"""


def row_echelon_int(list rows, Py_ssize_t ncols):
    cdef Py_ssize_t nrows = len(rows)
    cdef Py_ssize_t r = 0, c, i, j, best
    cdef list pivots = []
    cdef list ri, pr
    prev = 1
    for c in range(ncols):
        if r >= nrows:
            break
        best = -1
        best_abs = 0
        for i in range(r, nrows):
            v = (<list>rows[i])[c]
            if v:
                a = -v if v < 0 else v
                if best < 0 or a < best_abs:
                    best = i
                    best_abs = a
        if best < 0:
            continue
        if best != r:
            rows[best], rows[r] = rows[r], rows[best]
        pr = <list>rows[r]
        piv = pr[c]
        for i in range(r + 1, nrows):
            ri = <list>rows[i]
            f = ri[c]
            if f:
                for j in range(c, ncols):
                    ri[j] = (piv * ri[j] - f * pr[j]) // prev
            elif prev != 1 or piv != 1:
                for j in range(c, ncols):
                    if ri[j]:
                        ri[j] = (piv * ri[j]) // prev
        pivots.append(c)
        prev = piv
        r += 1
    return r, pivots
