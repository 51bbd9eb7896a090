# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled theta lattice-sum kernel (see ``_theta_py`` for the contract)."""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, cos, sin, M_PI

cnp.import_array()


def theta_terms(const double[:, ::1] Zr, const double[:, ::1] Zi, const double[::1] wr, const double[::1] wi,
                const double[::1] u, const double[::1] c, double R, const long[::1] lo, const long[::1] hi):
    cdef Py_ssize_t g = u.shape[0]
    cdef Py_ssize_t i, j, k, total = 1, count = 0
    for i in range(g):
        total *= hi[i] - lo[i] + 1
    out_np = np.empty(total, dtype=np.complex128)
    cdef double complex[::1] out = out_np
    cdef double[::1] x = np.empty(g)
    cdef long[::1] n = np.empty(g, dtype=np.int_)
    cdef double r2 = R * R, dist, qr, qi, lr, li, re, im, xi, e
    for i in range(g):
        n[i] = lo[i]
    for k in range(total):
        dist = 0.0
        for i in range(g):
            x[i] = n[i] + u[i]
            dist += (x[i] - c[i]) * (x[i] - c[i])
        if dist <= r2:
            qr = 0.0
            qi = 0.0
            lr = 0.0
            li = 0.0
            for i in range(g):
                xi = x[i]
                lr += xi * wr[i]
                li += xi * wi[i]
                for j in range(g):
                    qr += xi * Zr[i, j] * x[j]
                    qi += xi * Zi[i, j] * x[j]
            re = -M_PI * qi - 2.0 * M_PI * li
            im = M_PI * qr + 2.0 * M_PI * lr
            e = exp(re)
            out[count] = e * cos(im) + 1j * e * sin(im)
            count += 1
        # odometer, last index fastest
        i = g - 1
        while i >= 0:
            n[i] += 1
            if n[i] <= hi[i]:
                break
            n[i] = lo[i]
            i -= 1
    return out_np[:count]
