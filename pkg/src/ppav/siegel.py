"""Siegel upper half-space: period points, the symplectic action and the
dictionary between points ``Z = X + iY`` and complex structures tamed by the
standard symplectic form.

The action used here is

    <T> Z = (A + Z C)^{-1} (B + Z D),     T = [[A, B], [C, D]],

which agrees with the usual Moebius action for ``g = 1`` and on the base
point ``i 1``, preserves symmetry and positivity of ``Im Z`` for every
symplectic ``T`` and composes as a right action:
``<T1 T2> Z = <T2>(<T1> Z)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, ValidationError
from .forms import (
    DEFAULT_TOL,
    ComplexStructureOp,
    MetricForm,
    SkewForm,
    induced_metric,
    spd_sqrt,
    standard_complex_structure,
    tame,
)

MAX_CONDITION = 1e12


@dataclass(frozen=True)
class SiegelPoint:
    """Symmetric complex matrix with positive definite imaginary part."""

    Z: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        z = np.array(self.Z, dtype=complex)
        if z.ndim == 0:
            z = z.reshape(1, 1)
        if z.ndim != 2 or z.shape[0] != z.shape[1]:
            raise ValidationError("Siegel point must be a square matrix")
        if np.linalg.norm(z - z.T) > self.tol * max(1.0, np.linalg.norm(z)):
            raise ValidationError("Siegel point is not symmetric")
        z = 0.5 * (z + z.T)
        if np.linalg.eigvalsh(z.imag)[0] <= 0:
            raise ValidationError("imaginary part is not positive definite")
        z.setflags(write=False)
        object.__setattr__(self, "Z", z)

    @property
    def g(self) -> int:
        return self.Z.shape[0]

    @property
    def X(self) -> np.ndarray:
        return self.Z.real

    @property
    def Y(self) -> np.ndarray:
        return self.Z.imag

    @classmethod
    def base_point(cls, g: int) -> "SiegelPoint":
        return cls(1j * np.eye(g))


def is_symplectic(T, tol: float = DEFAULT_TOL) -> bool:
    t = np.asarray(T, dtype=float)
    if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] % 2:
        return False
    j0 = standard_complex_structure(t.shape[0] // 2)
    res = np.linalg.norm(t.T @ j0 @ t - j0)
    return bool(res <= tol * max(1.0, np.linalg.norm(t) ** 2))


@dataclass(frozen=True)
class SymplecticMatrix:
    T: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        t = np.array(self.T, dtype=float)
        if not is_symplectic(t, self.tol):
            raise ValidationError("matrix is not symplectic (T^T J0 T != J0)")
        t.setflags(write=False)
        object.__setattr__(self, "T", t)

    @property
    def g(self) -> int:
        return self.T.shape[0] // 2

    def blocks(self):
        g = self.g
        t = self.T
        return t[:g, :g], t[:g, g:], t[g:, :g], t[g:, g:]


def moebius_act(T: SymplecticMatrix, Z: SiegelPoint) -> SiegelPoint:
    if T.g != Z.g:
        raise ValidationError("genus mismatch between T and Z")
    a, b, c, d = T.blocks()
    z = Z.Z
    denom = a + z @ c
    if np.linalg.cond(denom) > MAX_CONDITION:
        raise NumericalError("A + ZC is singular")
    w = np.linalg.solve(denom, b + z @ d)
    if np.linalg.norm(w - w.T) > 1e-8 * max(1.0, np.linalg.norm(w)):
        raise NumericalError("Moebius image lost symmetry")
    return SiegelPoint(w, Z.tol)


def period_transform(Z: SiegelPoint) -> np.ndarray:
    """The symplectic ``T = [[Y^-1/2, Y^-1/2 X], [0, Y^1/2]]`` with ``<T> i1 = Z``."""
    y_half = spd_sqrt(Z.Y)
    y_mhalf = np.linalg.inv(y_half)
    y_mhalf = 0.5 * (y_mhalf + y_mhalf.T)
    zero = np.zeros_like(y_half)
    return np.block([[y_mhalf, y_mhalf @ Z.X], [zero, y_half]])


def siegel_to_structure(Z: SiegelPoint) -> tuple[ComplexStructureOp, MetricForm]:
    """Complex structure ``T^-1 J0 T`` and metric ``T^T T`` attached to ``Z``.

    The structure is tamed by the standard form and the metric is exactly
    its induced metric, so the returned pair is coherent with scale 1.
    """
    t = period_transform(Z)
    j0 = standard_complex_structure(Z.g)
    J = ComplexStructureOp(np.linalg.solve(t, j0 @ t))
    b = MetricForm(t.T @ t)
    return J, b


def symplectic_basis(J: ComplexStructureOp, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Symplectic ``T`` with ``T^-1 J0 T = J`` for ``J`` tamed by the standard form.

    Builds a basis ``e_1..e_g, f_1..f_g`` (columns of ``T^-1``) with
    ``f_k = -J e_k``, orthonormal for the induced metric, by Gram-Schmidt on
    ``J``-invariant planes.
    """
    n2 = J.dim
    g = n2 // 2
    omega0 = SkewForm.standard(g)
    gm = induced_metric(omega0, J, tol).gram
    j = J.matrix
    es, fs = [], []
    for k in range(n2):
        if len(es) == g:
            break
        v = np.zeros(n2)
        v[k] = 1.0
        for _ in range(2):
            for e, f in zip(es, fs):
                v = v - (e @ gm @ v) * e - (f @ gm @ v) * f
        norm = np.sqrt(v @ gm @ v)
        if norm < 1e-8:
            continue
        e = v / norm
        es.append(e)
        fs.append(-j @ e)
    if len(es) != g:
        raise NumericalError("symplectic Gram-Schmidt did not span the space")
    basis = np.column_stack(es + fs)
    return np.linalg.inv(basis)


def pair_to_siegel(b: MetricForm, tol: float = DEFAULT_TOL) -> SiegelPoint:
    """Period point of the structure taming the standard form compatibly with ``b``."""
    if b.dim % 2:
        raise ValidationError("metric must live on an even-dimensional space")
    g = b.dim // 2
    J = tame(b, SkewForm.standard(g), tol)
    t = symplectic_basis(J, tol)
    return moebius_act(SymplecticMatrix(t, 1e-8), SiegelPoint.base_point(g))


def _printed_blocks(Z: SiegelPoint):
    x, y = Z.X, Z.Y
    yi = np.linalg.inv(y)
    j = np.block([[-x @ yi, -y - x @ yi @ x], [yi, yi @ x]])
    b = np.block([[y, yi @ x], [x @ yi, x @ yi @ x + y]])
    return j, b


def dictionary_report(Z: SiegelPoint | None = None) -> dict:
    """Compare the closed-form block matrices for ``J`` and ``T^T T`` found in the
    literature with direct computation, symbolically for ``g = 1`` and
    numerically at ``Z``.

    Direct computation gives ``J = [[X Y^-1, Y + X Y^-1 X], [-Y^-1, -Y^-1 X]]``
    (the negative of the printed matrix) and ``T^T T`` with top-left block
    ``Y^-1`` where ``Y`` is printed.  Only the directly computed ``J`` is
    tamed by the standard form.
    """
    import sympy as sp

    x = sp.Symbol("x", real=True)
    y = sp.Symbol("y", positive=True)
    t = sp.Matrix([[1 / sp.sqrt(y), x / sp.sqrt(y)], [0, sp.sqrt(y)]])
    j0 = sp.Matrix([[0, 1], [-1, 0]])
    j_direct = sp.simplify(t.inv() * j0 * t)
    b_direct = sp.simplify(t.T * t)
    j_printed = sp.Matrix([[-x / y, -y - x**2 / y], [1 / y, x / y]])
    b_printed = sp.Matrix([[y, x / y], [x / y, x**2 / y + y]])
    report = {
        "symbolic_g1": {
            "J_direct": str(j_direct.tolist()),
            "J_printed": str(j_printed.tolist()),
            "J_printed_equals_minus_direct": sp.simplify(j_printed + j_direct) == sp.zeros(2, 2),
            "b_direct": str(b_direct.tolist()),
            "b_printed": str(b_printed.tolist()),
            "b_printed_equals_direct": sp.simplify(b_printed - b_direct) == sp.zeros(2, 2),
        }
    }
    if Z is not None:
        J, b = siegel_to_structure(Z)
        j_pr, b_pr = _printed_blocks(Z)
        omega0 = SkewForm.standard(Z.g)

        def tames(jm):
            m = omega0.gram @ jm
            sym = np.linalg.norm(m - m.T) <= 1e-9 * np.linalg.norm(m)
            return bool(sym and np.linalg.eigvalsh(0.5 * (m + m.T))[0] > 0)

        gdim = Z.g
        report["numeric"] = {
            "g": gdim,
            "J_printed_minus_direct": float(np.linalg.norm(j_pr - J.matrix)),
            "J_printed_plus_direct": float(np.linalg.norm(j_pr + J.matrix)),
            "b_printed_minus_direct": float(np.linalg.norm(b_pr - b.gram)),
            "b_top_left_direct_minus_Yinv": float(np.linalg.norm(b.gram[:gdim, :gdim] - np.linalg.inv(Z.Y))),
            "direct_J_tamed_by_standard_form": tames(J.matrix),
            "printed_J_tamed_by_standard_form": tames(j_pr),
        }
    return report
