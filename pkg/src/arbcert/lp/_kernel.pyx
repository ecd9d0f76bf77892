# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled fraction-free simplex kernel on 64-bit integers.

Same algorithm and pivot sequence as ``_kernel_py``.  Any intermediate
product that leaves the int64 range aborts with ``OVERFLOW``; the tableau
is then unusable and the caller restarts on Python integers.
"""

cdef extern from *:
    """
    static inline int arb_mul_ovf(long long a, long long b, long long *r) {
        return __builtin_mul_overflow(a, b, r);
    }
    static inline int arb_sub_ovf(long long a, long long b, long long *r) {
        return __builtin_sub_overflow(a, b, r);
    }
    """
    bint arb_mul_ovf(long long a, long long b, long long *r) nogil
    bint arb_sub_ovf(long long a, long long b, long long *r) nogil

cdef enum:
    C_OPTIMAL = 0
    C_UNBOUNDED = 1
    C_OVERFLOW = 2

OPTIMAL = C_OPTIMAL
UNBOUNDED = C_UNBOUNDED
OVERFLOW = C_OVERFLOW

NAME = "cython"


cdef long long _pivot(long long[:, ::1] M, long long[::1] basis, long long det,
                      Py_ssize_t r, Py_ssize_t c) nogil:
    """Returns the new det, or 0 on overflow."""
    cdef Py_ssize_t i, k
    cdef Py_ssize_t m = M.shape[0]
    cdef Py_ssize_t n = M.shape[1]
    cdef long long p = M[r, c]
    cdef long long f, t1, t2, d
    for i in range(m):
        if i == r:
            continue
        f = M[i, c]
        if f == 0:
            if p == det:
                continue
            for k in range(n):
                if arb_mul_ovf(M[i, k], p, &t1):
                    return 0
                M[i, k] = t1 // det
        else:
            for k in range(n):
                if arb_mul_ovf(M[i, k], p, &t1):
                    return 0
                if arb_mul_ovf(f, M[r, k], &t2):
                    return 0
                if arb_sub_ovf(t1, t2, &d):
                    return 0
                M[i, k] = d // det
    basis[r - 2] = c
    return p


def pivot(long long[:, ::1] M, long long[::1] basis, long long det, Py_ssize_t r, Py_ssize_t c):
    cdef long long nd
    with nogil:
        nd = _pivot(M, basis, det, r, c)
    if nd == 0:
        raise OverflowError("int64 overflow in pivot")
    return nd


def run(long long[:, ::1] M, long long[::1] basis, long long det, Py_ssize_t obj, Py_ssize_t nenter):
    cdef Py_ssize_t m = M.shape[0]
    cdef Py_ssize_t rhs = M.shape[1] - 1
    cdef Py_ssize_t i, j, c, r
    cdef long long a, b, bn = 0, bd = 0, lhs, rr
    cdef long pivots = 0
    cdef int status = -1
    with nogil:
        while True:
            c = -1
            for j in range(nenter):
                if M[obj, j] < 0:
                    c = j
                    break
            if c < 0:
                status = C_OPTIMAL
                break
            r = -1
            for i in range(2, m):
                a = M[i, c]
                if a > 0:
                    b = M[i, rhs]
                    if r < 0:
                        r = i
                        bn = b
                        bd = a
                        continue
                    if arb_mul_ovf(b, bd, &lhs) or arb_mul_ovf(bn, a, &rr):
                        status = C_OVERFLOW
                        break
                    if lhs < rr or (lhs == rr and basis[i - 2] < basis[r - 2]):
                        r = i
                        bn = b
                        bd = a
            if status == C_OVERFLOW:
                break
            if r < 0:
                status = C_UNBOUNDED
                break
            det = _pivot(M, basis, det, r, c)
            if det == 0:
                status = C_OVERFLOW
                break
            pivots += 1
    return status, c, det, pivots
