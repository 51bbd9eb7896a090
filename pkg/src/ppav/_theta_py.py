"""Numpy implementation of the theta lattice-sum kernel.

Same contract as the compiled ``_theta_kernel``: returns the summands for
``n`` in the integer box ``lo <= n <= hi`` (lexicographic, last index
fastest) with ``||n + u - c|| <= R``.
"""
import numpy as np


def theta_terms(Zr, Zi, wr, wi, u, c, R, lo, hi):
    g = len(u)
    axes = [np.arange(lo[i], hi[i] + 1, dtype=float) for i in range(g)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, g)
    x = grid + np.asarray(u, dtype=float)
    d = x - np.asarray(c, dtype=float)
    x = x[np.einsum("ij,ij->i", d, d) <= R * R]
    quad_r = np.einsum("ij,jk,ik->i", x, Zr, x)
    quad_i = np.einsum("ij,jk,ik->i", x, Zi, x)
    re = -np.pi * quad_i - 2.0 * np.pi * (x @ np.asarray(wi, dtype=float))
    im = np.pi * quad_r + 2.0 * np.pi * (x @ np.asarray(wr, dtype=float))
    return np.exp(re) * (np.cos(im) + 1j * np.sin(im))
