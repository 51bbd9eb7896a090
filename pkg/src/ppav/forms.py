"""Metrics, symplectic forms and the complex structure they jointly determine.

Conventions
-----------
All forms are given by real Gram matrices in a fixed basis of ``R^{2n}``::

    b(x, y) = x^T G y        omega(x, y) = x^T W y

The standard symplectic form is ``omega_0(x, y) = y^T J0 x``, i.e. its Gram
matrix is ``J0^T`` where ``J0 = [[0, 1], [-1, 0]]`` (blocks of size n).  With
this choice the pair (identity, omega_0) is tamed by ``J0`` itself.

Given a metric ``b`` and a nondegenerate skew form ``omega`` the operator
``A`` with ``omega(x, y) = b(Ax, y)`` is b-skew-adjoint; its b-polar
decomposition ``A = Q J`` yields the unique complex structure ``J`` that is
b-orthogonal, preserves ``omega`` and makes ``omega(x, Jy)`` positive
definite.  :func:`tame` computes it.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, ValidationError

DEFAULT_TOL = 1e-9
# condition number above which a skew form counts as degenerate
MAX_SKEW_CONDITION = 1e10
# relative eigenvalue floor for spd_sqrt
SPD_FLOOR = 1e-12


def _as_square(matrix, name: str) -> np.ndarray:
    arr = np.array(matrix, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"{name} must be a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} has non-finite entries")
    arr.setflags(write=False)
    return arr


def _rel(residual: np.ndarray, scale: np.ndarray | float) -> float:
    s = scale if np.isscalar(scale) else np.linalg.norm(scale)
    return float(np.linalg.norm(residual) / max(s, np.finfo(float).tiny))


def standard_complex_structure(n: int) -> np.ndarray:
    """The block matrix ``[[0, I_n], [-I_n, 0]]``."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]])


@dataclass(frozen=True)
class MetricForm:
    """Positive definite symmetric bilinear form, stored by its Gram matrix."""

    gram: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        g = _as_square(self.gram, "metric gram")
        if _rel(g - g.T, g) > self.tol:
            raise ValidationError("metric gram is not symmetric")
        g = 0.5 * (g + g.T)
        g.setflags(write=False)
        evals = np.linalg.eigvalsh(g)
        if evals[0] <= 0:
            raise ValidationError(f"metric gram is not positive definite (min eigenvalue {evals[0]:.3e})")
        object.__setattr__(self, "gram", g)

    @property
    def dim(self) -> int:
        return self.gram.shape[0]

    def __call__(self, x, y):
        return np.asarray(x) @ self.gram @ np.asarray(y)


@dataclass(frozen=True)
class SkewForm:
    """Nondegenerate antisymmetric bilinear form, stored by its Gram matrix."""

    gram: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        w = _as_square(self.gram, "skew gram")
        if w.shape[0] % 2:
            raise ValidationError("a nondegenerate skew form needs even dimension")
        if _rel(w + w.T, w) > self.tol:
            raise ValidationError("skew gram is not antisymmetric")
        w = 0.5 * (w - w.T)
        w.setflags(write=False)
        if w.shape[0] and np.linalg.cond(w) > MAX_SKEW_CONDITION:
            raise ValidationError("skew form is degenerate (condition number above 1e10)")
        object.__setattr__(self, "gram", w)

    @property
    def dim(self) -> int:
        return self.gram.shape[0]

    def __call__(self, x, y):
        return np.asarray(x) @ self.gram @ np.asarray(y)

    def __neg__(self) -> "SkewForm":
        return SkewForm(-self.gram, self.tol)

    @classmethod
    def standard(cls, n: int) -> "SkewForm":
        """``omega_0(x, y) = y^T J0 x`` on ``R^{2n}``."""
        return cls(standard_complex_structure(n).T)


@dataclass(frozen=True)
class ComplexStructureOp:
    """Real operator with ``J @ J = -I``."""

    matrix: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        j = _as_square(self.matrix, "complex structure")
        eye = np.eye(j.shape[0])
        if _rel(j @ j + eye, max(1.0, np.linalg.norm(j) ** 2)) > self.tol:
            raise ValidationError("matrix does not square to -identity")
        object.__setattr__(self, "matrix", j)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __neg__(self) -> "ComplexStructureOp":
        return ComplexStructureOp(-self.matrix, self.tol)

    @classmethod
    def standard(cls, n: int) -> "ComplexStructureOp":
        return cls(standard_complex_structure(n))


@dataclass(frozen=True)
class OperatorA:
    """The operator defined by ``omega(x, y) = b(Ax, y)``."""

    matrix: np.ndarray


@dataclass(frozen=True)
class CoherentPair:
    metric: MetricForm
    skew: SkewForm
    scale: float
    structure: ComplexStructureOp


def _check_dims(b: MetricForm, omega: SkewForm):
    if b.dim != omega.dim:
        raise ValidationError(f"dimension mismatch: metric {b.dim}, skew form {omega.dim}")


def operator_A(b: MetricForm, omega: SkewForm) -> OperatorA:
    """Solve ``omega(x, y) = b(Ax, y)`` for ``A``.

    In Gram terms ``W = A^T G``, hence ``A = -G^{-1} W``.
    """
    _check_dims(b, omega)
    a = -np.linalg.solve(b.gram, omega.gram)
    a.setflags(write=False)
    return OperatorA(a)


def spd_sqrt(p, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Unique symmetric positive definite square root of an SPD matrix.

    Eigenvalues at or below ``1e-12 * max_eigenvalue`` are treated as a
    failure of positive definiteness.
    """
    p = np.array(p, dtype=float)
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        raise ValidationError("spd_sqrt needs a square matrix")
    if _rel(p - p.T, p) > tol:
        raise ValidationError("spd_sqrt input is not symmetric")
    evals, evecs = np.linalg.eigh(0.5 * (p + p.T))
    if evals[-1] <= 0 or evals[0] <= SPD_FLOOR * evals[-1]:
        raise ValidationError(f"spd_sqrt input is not positive definite (eigenvalues {evals[0]:.3e}..{evals[-1]:.3e})")
    root = (evecs * np.sqrt(evals)) @ evecs.T
    return 0.5 * (root + root.T)


def _spd_sqrt_and_inverse(p):
    evals, evecs = np.linalg.eigh(p)
    if evals[0] <= SPD_FLOOR * evals[-1]:
        raise ValidationError("metric is numerically singular")
    r = np.sqrt(evals)
    root = (evecs * r) @ evecs.T
    inv_root = (evecs / r) @ evecs.T
    return 0.5 * (root + root.T), 0.5 * (inv_root + inv_root.T)


def _pow2_normalized(m: np.ndarray) -> np.ndarray:
    """``m`` divided by the power of two of its largest entry."""
    _, e = np.frexp(np.abs(m).max())
    return np.ldexp(m, -int(e))


def tame(b: MetricForm, omega: SkewForm, tol: float = DEFAULT_TOL) -> ComplexStructureOp:
    """The unique complex structure compatible with ``b`` and taming ``omega``.

    Works in b-orthonormal coordinates ``x' = G^{1/2} x`` where ``A`` becomes
    an honest skew-symmetric matrix, takes its orthogonal polar factor from
    an SVD and transforms back.  Both inputs are first rescaled by powers of two, which is
    lossless, so rescaling ``b`` or ``omega`` by a power of two leaves the
    output bitwise unchanged.
    """
    _check_dims(b, omega)
    gb = _pow2_normalized(b.gram)
    wn = _pow2_normalized(omega.gram)
    # tame(b, -omega) = -tame(b, omega): compute with a canonical sign of omega
    flat = wn.ravel()
    flip = flat[np.flatnonzero(flat)[0]] < 0
    if flip:
        wn = -wn
    s, s_inv = _spd_sqrt_and_inverse(gb)
    # A = -G^{-1} W in b-orthonormal coordinates
    a_on = -(s_inv @ wn @ s_inv)
    a_on = 0.5 * (a_on - a_on.T)
    u, sv, vt = np.linalg.svd(a_on)
    if sv[-1] <= SPD_FLOOR * sv[0]:
        raise ValidationError("skew form is numerically degenerate")
    q = (vt.T * sv) @ vt
    j_on = u @ vt
    comm = a_on @ q - q @ a_on
    if _rel(comm, np.linalg.norm(a_on) * np.linalg.norm(q)) > tol:
        raise NumericalError("A and its modulus Q fail to commute")
    j = s_inv @ j_on @ s
    if flip:
        j = -j

    n2 = j.shape[0]
    g, w = b.gram, omega.gram
    if np.linalg.norm(j @ j + np.eye(n2)) > tol * max(1.0, np.linalg.norm(j) ** 2):
        raise NumericalError("J^2 + I residual too large")
    if _rel(j.T @ g @ j - g, g) > tol:
        raise NumericalError("J is not b-orthogonal to tolerance")
    if _rel(j.T @ w @ j - w, w) > tol:
        raise NumericalError("J does not preserve omega to tolerance")
    return ComplexStructureOp(j, tol)


def induced_metric(omega: SkewForm, J: ComplexStructureOp, tol: float = DEFAULT_TOL) -> MetricForm:
    """Gram matrix of ``(x, y) -> omega(x, Jy)``; raises if ``J`` does not tame ``omega``."""
    if omega.dim != J.dim:
        raise ValidationError("dimension mismatch between skew form and complex structure")
    m = omega.gram @ J.matrix
    try:
        return MetricForm(m, tol)
    except ValidationError as exc:
        raise ValidationError(f"J does not tame omega: {exc}") from None


def hermitian_form(omega: SkewForm, J: ComplexStructureOp, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Complex Gram ``H`` of ``h(x, y) = omega(x, Jy) + i omega(x, y)``.

    ``h`` is complex linear in its second argument for the structure ``J``:
    ``h(x, Jy) = i h(x, y)`` and ``h(Jx, y) = -i h(x, y)``.
    """
    real = induced_metric(omega, J, tol).gram
    return real + 1j * omega.gram


def is_coherent(b: MetricForm, omega: SkewForm, tol: float = DEFAULT_TOL):
    """Return ``lam > 0`` with ``b = lam * b_{omega,J}`` or ``None``.

    The scale is the median of entrywise ratios over entries of the induced
    metric above a relative magnitude floor; the full residual then decides.
    """
    J = tame(b, omega, tol)
    induced = induced_metric(omega, J, tol).gram
    mask = np.abs(induced) > 1e-8 * np.abs(induced).max()
    lam = float(np.median(b.gram[mask] / induced[mask]))
    if not lam > 0:
        return None
    if _rel(b.gram - lam * induced, b.gram) > tol:
        return None
    return lam


def coherent_pair(b: MetricForm, omega: SkewForm, tol: float = DEFAULT_TOL) -> CoherentPair | None:
    lam = is_coherent(b, omega, tol)
    if lam is None:
        return None
    return CoherentPair(b, omega, lam, tame(b, omega, tol))


def group_act(gamma, b: MetricForm, omega: SkewForm) -> tuple[MetricForm, SkewForm]:
    """Pull back both forms along ``gamma``: ``b_gamma(x, y) = b(gamma x, gamma y)``."""
    g = _as_square(gamma, "gamma")
    _check_dims(b, omega)
    if g.shape[0] != b.dim:
        raise ValidationError("gamma has the wrong dimension")
    det = np.linalg.det(g)
    if not det > 0 or np.linalg.cond(g) > 1e12:
        raise ValidationError("gamma must be invertible and orientation preserving")
    return MetricForm(g.T @ b.gram @ g, b.tol), SkewForm(g.T @ omega.gram @ g, omega.tol)


def same_fiber(b: MetricForm, other: MetricForm, omega: SkewForm, tol: float = DEFAULT_TOL) -> bool:
    """True iff both metrics retract to the same complex structure for ``omega``."""
    j1 = tame(b, omega).matrix
    j2 = tame(other, omega).matrix
    return _rel(j1 - j2, j1) <= tol


def riemann_form_defect(omega: SkewForm, J: ComplexStructureOp, samples) -> tuple[float, float]:
    """Return (invariance residual, minimal ``omega(x, Jx)``) over sample rows."""
    w, j = omega.gram, J.matrix
    inv = _rel(j.T @ w @ j - w, w)
    xs = np.atleast_2d(np.asarray(samples, dtype=float))
    pos = np.einsum("ij,jk,ik->i", xs, w @ j, xs)
    return inv, float(pos.min())
