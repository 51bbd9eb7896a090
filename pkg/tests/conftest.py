import numpy as np
import pytest


def random_spd(rng, n, spread=1.0):
    a = rng.normal(size=(n, n))
    return a @ a.T + spread * n * 0.1 * np.eye(n) + 0.1 * np.eye(n)


def random_skew(rng, n, min_sv=0.05):
    """Random nondegenerate antisymmetric n x n matrix (n even)."""
    while True:
        a = rng.normal(size=(n, n))
        w = a - a.T
        s = np.linalg.svd(w, compute_uv=False)
        if s[-1] > min_sv * s[0]:
            return w


def random_siegel(rng, g, lam_min=0.3, lam_max=3.0):
    q, _ = np.linalg.qr(rng.normal(size=(g, g)))
    y = q @ np.diag(rng.uniform(lam_min, lam_max, size=g)) @ q.T
    x = rng.normal(size=(g, g))
    return 0.5 * (x + x.T) + 1j * 0.5 * (y + y.T)


def random_symplectic(rng, g, scale=0.5):
    """Product of elementary symplectic matrices (shears and block rotations)."""
    from ppav.forms import standard_complex_structure

    t = np.eye(2 * g)
    for _ in range(3):
        s = rng.normal(scale=scale, size=(g, g))
        s = s + s.T
        a = rng.normal(scale=scale, size=(g, g)) + np.eye(g) * 2
        shear = np.block([[np.eye(g), s], [np.zeros((g, g)), np.eye(g)]])
        diag = np.block([[a, np.zeros((g, g))], [np.zeros((g, g)), np.linalg.inv(a).T]])
        t = t @ shear @ diag @ standard_complex_structure(g)
    return t


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
