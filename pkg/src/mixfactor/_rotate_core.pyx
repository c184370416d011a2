# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled planar varimax kernel; same API as ``_rotate_py``."""
from libc.math cimport acos, cos, fabs, sin, sqrt
from libc.stdlib cimport calloc, free

cdef double DEGENERATE = 1e-24


cdef double _angle(const double[:, ::1] A, Py_ssize_t l, Py_ssize_t t,
                   const Py_ssize_t[::1] col_var, Py_ssize_t p,
                   double* alpha, double* beta) nogil:
    cdef Py_ssize_t s, j, rows = A.shape[0]
    cdef double al, at, sa = 0.0, sb = 0.0, sab = 0.0, saa = 0.0, sbb = 0.0
    cdef double g, h, d, ratio, psi
    for j in range(p):
        alpha[j] = 0.0
        beta[j] = 0.0
    for s in range(rows):
        al = A[s, l]
        at = A[s, t]
        j = col_var[s]
        alpha[j] += al * al - at * at
        beta[j] += 2.0 * al * at
    for j in range(p):
        sa += alpha[j]
        sb += beta[j]
        sab += alpha[j] * beta[j]
        saa += alpha[j] * alpha[j]
        sbb += beta[j] * beta[j]
    g = 2.0 * p * sab - 2.0 * sa * sb
    h = p * (saa - sbb) - sa * sa + sb * sb
    d = g * g + h * h
    if d < DEGENERATE:
        return 0.0
    ratio = h / sqrt(d)
    if ratio > 1.0:
        ratio = 1.0
    elif ratio < -1.0:
        ratio = -1.0
    psi = acos(ratio)
    if g < 0:
        psi = -psi
    return psi / 4.0


cdef void _rotate_cols(double[:, ::1] X, Py_ssize_t l, Py_ssize_t t,
                       double c, double s) nogil:
    cdef Py_ssize_t i
    cdef double xl, xt
    for i in range(X.shape[0]):
        xl = X[i, l]
        xt = X[i, t]
        X[i, l] = c * xl + s * xt
        X[i, t] = c * xt - s * xl


def planar_angle(const double[:, ::1] A, Py_ssize_t l, Py_ssize_t t,
                 const Py_ssize_t[::1] col_var, Py_ssize_t p):
    cdef double* alpha = <double*> calloc(p, sizeof(double))
    cdef double* beta = <double*> calloc(p, sizeof(double))
    cdef double theta
    if alpha == NULL or beta == NULL:
        free(alpha)
        free(beta)
        raise MemoryError()
    try:
        theta = _angle(A, l, t, col_var, p, alpha, beta)
    finally:
        free(alpha)
        free(beta)
    return theta


def sweep(double[:, ::1] A, double[:, ::1] T, const Py_ssize_t[::1] col_var, Py_ssize_t p):
    cdef Py_ssize_t k = A.shape[1], l, t
    cdef double theta, c, s, max_theta = 0.0
    cdef double* alpha = <double*> calloc(p, sizeof(double))
    cdef double* beta = <double*> calloc(p, sizeof(double))
    if alpha == NULL or beta == NULL:
        free(alpha)
        free(beta)
        raise MemoryError()
    try:
        with nogil:
            for l in range(k - 1):
                for t in range(l + 1, k):
                    theta = _angle(A, l, t, col_var, p, alpha, beta)
                    if fabs(theta) > max_theta:
                        max_theta = fabs(theta)
                    if theta == 0.0:
                        continue
                    c = cos(theta)
                    s = sin(theta)
                    _rotate_cols(A, l, t, c, s)
                    _rotate_cols(T, l, t, c, s)
    finally:
        free(alpha)
        free(beta)
    return max_theta


def criterion(const double[:, ::1] A, const Py_ssize_t[::1] col_var, Py_ssize_t p):
    cdef Py_ssize_t k = A.shape[1], i, j, s
    cdef double total = 0.0, sq, sm, v
    cdef double* c = <double*> calloc(p, sizeof(double))
    if c == NULL:
        raise MemoryError()
    try:
        for i in range(k):
            for j in range(p):
                c[j] = 0.0
            for s in range(A.shape[0]):
                c[col_var[s]] += A[s, i] * A[s, i]
            sq = 0.0
            sm = 0.0
            for j in range(p):
                v = c[j]
                sq += v * v
                sm += v
            total += p * sq - sm * sm
    finally:
        free(c)
    return total
