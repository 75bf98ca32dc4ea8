# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled Aberth-Ehrlich kernel (double complex).

Same algorithm and operation order as ``_aberth_py``.
"""

import numpy as np

cdef extern from "complex.h" nogil:
    double cabs(double complex)


cdef inline double complex _ratio(const double complex[:] c, const double[:] ac,
                                  double complex z, double eps, bint *small) noexcept nogil:
    cdef Py_ssize_t n = c.shape[0] - 1
    cdef Py_ssize_t k
    cdef double az = cabs(z)
    cdef double aw, s
    cdef double complex p, dp, w, q, dq, denom
    if az <= 1.0:
        p = c[n]
        dp = 0
        s = ac[n]
        for k in range(n - 1, -1, -1):
            dp = dp * z + p
            p = p * z + c[k]
            s = s * az + ac[k]
        if p == 0:
            small[0] = True
            return 0
        small[0] = cabs(p) <= eps * s
        if dp == 0:
            return 0
        return p / dp
    w = 1.0 / z
    aw = cabs(w)
    q = c[0]
    dq = 0
    s = ac[0]
    for k in range(1, n + 1):
        dq = dq * w + q
        q = q * w + c[k]
        s = s * aw + ac[k]
    if q == 0:
        small[0] = True
        return 0
    small[0] = cabs(q) <= eps * s
    denom = w * (<double> n - w * dq / q)
    if denom == 0:
        return 0
    return 1.0 / denom


def aberth(coeffs, double complex[:] z, double tol, int max_iter, double eps):
    """Iterate in place on ``z``; returns ``(iterations, done)``."""
    cdef const double complex[:] c = np.ascontiguousarray(coeffs, dtype=np.complex128)
    cdef const double[:] ac = np.abs(np.asarray(c))
    cdef Py_ssize_t n = z.shape[0]
    cdef Py_ssize_t i, j
    cdef double bound = 4.0 * (n + 1) * eps
    cdef unsigned char[:] done = np.zeros(n, dtype=np.uint8)
    cdef Py_ssize_t remaining = n
    cdef int it = 0
    cdef bint small = False
    cdef double complex zi, ratio, acc, diff, corr
    with nogil:
        while it < max_iter and remaining > 0:
            it += 1
            for i in range(n):
                if done[i]:
                    continue
                zi = z[i]
                ratio = _ratio(c, ac, zi, bound, &small)
                if ratio == 0:
                    done[i] = 1
                    remaining -= 1
                    continue
                acc = 0
                for j in range(n):
                    if j != i:
                        diff = zi - z[j]
                        if diff != 0:
                            acc = acc + 1.0 / diff
                corr = ratio / (1.0 - ratio * acc)
                zi = zi - corr
                z[i] = zi
                if small or cabs(corr) < tol * (1.0 + cabs(zi)):
                    done[i] = 1
                    remaining -= 1
    return it, [bool(x) for x in done]
