"""Integral layer: skew forms on lattices, unimodularity, twisted pairings and
assembly of the polarized abelian variety ``J(Lambda, b, omega)``.

Lattices always sit in a fixed standard basis of ``Z^{2g}``.  Everything at
lattice level is exact (``int`` / :class:`fractions.Fraction`); floating
point enters only through the complex structure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce

import numpy as np

from .errors import ValidationError
from .forms import (
    DEFAULT_TOL,
    ComplexStructureOp,
    MetricForm,
    SkewForm,
    hermitian_form,
    induced_metric,
    is_coherent,
    standard_complex_structure,
    tame,
)
from .siegel import SiegelPoint, pair_to_siegel


def to_fraction(value) -> Fraction:
    """Accept ints, Fractions, and strings like ``"3/4"``; floats must be integral."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, (float, np.floating)) and float(value).is_integer():
        return Fraction(int(value))
    raise ValidationError(f"cannot read {value!r} as an exact rational")


def fraction_matrix(rows) -> tuple[tuple[Fraction, ...], ...]:
    m = tuple(tuple(to_fraction(x) for x in row) for row in rows)
    if not m or any(len(r) != len(m) for r in m):
        raise ValidationError("expected a non-empty square matrix")
    return m


def mat_mul(a, b):
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in zip(*b)) for row in a)


def transpose(a):
    return tuple(zip(*a))


def exact_det(matrix) -> Fraction:
    """Determinant over Q by clearing denominators and Bareiss elimination."""
    m = fraction_matrix(matrix)
    n = len(m)
    denom = reduce(math.lcm, (x.denominator for row in m for x in row), 1)
    a = [[int(x * denom) for x in row] for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return Fraction(0)
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return Fraction(sign * a[n - 1][n - 1], denom**n)


def _check_skew(m, what: str):
    n = len(m)
    if n % 2:
        raise ValidationError(f"{what} must have even rank")
    for i in range(n):
        for j in range(n):
            if m[i][j] != -m[j][i]:
                raise ValidationError(f"{what} is not antisymmetric")
    if exact_det(m) == 0:
        raise ValidationError(f"{what} is degenerate")


@dataclass(frozen=True)
class RationalSkewForm:
    """Nondegenerate antisymmetric form with exact rational Gram matrix."""

    gram: tuple

    def __post_init__(self):
        m = fraction_matrix(self.gram)
        _check_skew(m, "rational skew form")
        object.__setattr__(self, "gram", m)

    @property
    def rank(self) -> int:
        return len(self.gram)

    def as_float(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.gram])

    def scaled(self, n) -> "RationalSkewForm":
        n = to_fraction(n)
        return RationalSkewForm(tuple(tuple(n * x for x in row) for row in self.gram))


@dataclass(frozen=True)
class IntegralSkewForm:
    """Nondegenerate antisymmetric form on ``Z^{2g}`` with integer Gram matrix."""

    gram: tuple

    def __post_init__(self):
        m = fraction_matrix(self.gram)
        if any(x.denominator != 1 for row in m for x in row):
            raise ValidationError("integral skew form has non-integer entries")
        m = tuple(tuple(int(x) for x in row) for row in m)
        _check_skew(m, "integral skew form")
        object.__setattr__(self, "gram", m)

    @property
    def rank(self) -> int:
        return len(self.gram)

    def __call__(self, x, y) -> int:
        return sum(int(xi) * self.gram[i][j] * int(yj) for i, xi in enumerate(x) for j, yj in enumerate(y))

    def as_float(self) -> np.ndarray:
        return np.array(self.gram, dtype=float)

    def to_real(self) -> SkewForm:
        return SkewForm(self.as_float())

    @classmethod
    def standard(cls, g: int) -> "IntegralSkewForm":
        """Gram ``J0^T``, matching :meth:`ppav.forms.SkewForm.standard`."""
        return cls(standard_complex_structure(g).T.astype(int).tolist())

    @classmethod
    def from_rational(cls, form: RationalSkewForm) -> "IntegralSkewForm":
        return cls(form.gram)


def is_unimodular(omega: IntegralSkewForm) -> bool:
    return abs(exact_det(omega.gram)) == 1


def twist_pairing(omega: RationalSkewForm, gamma) -> RationalSkewForm:
    """Gram of ``(x, y) -> omega(gamma x, gamma y)``, computed exactly."""
    g = fraction_matrix(gamma)
    if len(g) != omega.rank:
        raise ValidationError("twist has the wrong dimension")
    if exact_det(g) == 0:
        raise ValidationError("twist is singular")
    return RationalSkewForm(mat_mul(mat_mul(transpose(g), omega.gram), g))


def minimal_integral_scale(omega: RationalSkewForm) -> int:
    """Least ``N >= 1`` with ``N * omega`` integral on the standard basis."""
    return reduce(math.lcm, (x.denominator for row in omega.gram for x in row), 1)


def _xgcd(a: int, b: int):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def _bezout(values):
    """Coefficients ``c`` with ``sum(c_i v_i) = gcd(values) >= 0``."""
    g, coeffs = 0, []
    for v in values:
        g_new, s, t = _xgcd(g, v)
        coeffs = [s * c for c in coeffs] + [t]
        g = g_new
    if g < 0:
        g, coeffs = -g, [-c for c in coeffs]
    return g, coeffs


def integer_row_basis(rows) -> list[list[int]]:
    """Basis of the Z-span of integer vectors via Euclidean row echelon form."""
    rows = [list(map(int, r)) for r in rows]
    if not rows:
        return []
    m, n = len(rows), len(rows[0])
    r = 0
    for col in range(n):
        while True:
            nz = [i for i in range(r, m) if rows[i][col] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(rows[i][col]))
            rows[r], rows[piv] = rows[piv], rows[r]
            clean = True
            for i in range(r + 1, m):
                if rows[i][col]:
                    q = rows[i][col] // rows[r][col]
                    rows[i] = [a - q * b for a, b in zip(rows[i], rows[r])]
                    clean = clean and rows[i][col] == 0
            if clean:
                break
        if any(rows[i][col] for i in range(r, m)):
            r += 1
        if r == m:
            break
    return [row for row in rows[:r] if any(row)]


def symplectic_lattice_basis(omega: IntegralSkewForm) -> np.ndarray:
    """Integer matrix ``P`` (det +-1) with ``P^T W P`` equal to the standard Gram.

    Columns are ``e_1..e_g, f_1..f_g`` with ``omega(e_i, f_j) = -delta_ij``.
    Requires a unimodular form.
    """
    if not is_unimodular(omega):
        raise ValidationError("a symplectic lattice basis needs a unimodular form")
    n = omega.rank
    basis = [[int(i == j) for j in range(n)] for i in range(n)]
    es, fs = [], []
    while basis:
        e = basis[0]
        vals = [omega(e, v) for v in basis]
        g, coeffs = _bezout(vals)
        if g != 1:
            raise ValidationError("form is not unimodular on the remaining sublattice")
        f = [-sum(c * v[k] for c, v in zip(coeffs, basis)) for k in range(n)]
        # now omega(e, f) == -1
        projected = []
        for v in basis:
            a, c = omega(v, f), omega(v, e)
            projected.append([v[k] + a * e[k] - c * f[k] for k in range(n)])
        es.append(e)
        fs.append(f)
        basis = integer_row_basis(projected)
    p = np.array(es + fs, dtype=np.int64).T
    check = p.T @ np.array(omega.gram, dtype=np.int64) @ p
    if not np.array_equal(check, IntegralSkewForm.standard(n // 2).as_float().astype(np.int64)):
        raise ValidationError("symplectic reduction failed")
    return p


@dataclass(frozen=True)
class PolarizedAbelianVariety:
    """The torus ``R^{2g} / Z^{2g}`` with complex structure ``J`` and Riemann form ``omega``."""

    rank: int
    J: ComplexStructureOp
    omega: IntegralSkewForm
    h: np.ndarray
    principal: bool
    metric: MetricForm | None = field(default=None, compare=False)

    @property
    def g(self) -> int:
        return self.rank // 2

    def siegel_point(self) -> SiegelPoint:
        """Period point in a symplectic basis of the lattice (principal case only)."""
        if not self.principal:
            raise ValidationError("period point is only defined here for principal polarizations")
        p = symplectic_lattice_basis(self.omega).astype(float)
        b = induced_metric(self.omega.to_real(), self.J).gram
        return pair_to_siegel(MetricForm(p.T @ b @ p))


def build_ppav(b: MetricForm, omega: IntegralSkewForm, tol: float = DEFAULT_TOL) -> PolarizedAbelianVariety:
    w = omega.to_real()
    if b.dim != omega.rank:
        raise ValidationError("metric and lattice rank differ")
    J = tame(b, w, tol)
    h = hermitian_form(w, J, tol)
    return PolarizedAbelianVariety(omega.rank, J, omega, h, is_unimodular(omega), b)


def twisted_coherence_probe(b: MetricForm, tau, omega, gamma, tol: float = DEFAULT_TOL):
    """Coherence scale of ``(b_tau, omega_gamma)`` by direct test, or ``None``.

    ``omega`` may be a :class:`SkewForm`, :class:`IntegralSkewForm` or
    :class:`RationalSkewForm`.
    """
    w = omega.gram if isinstance(omega, SkewForm) else omega.as_float()
    t = np.asarray(tau, dtype=float)
    g = np.asarray(gamma, dtype=float)
    for name, m in (("tau", t), ("gamma", g)):
        if m.shape != (b.dim, b.dim) or np.linalg.cond(m) > 1e12:
            raise ValidationError(f"{name} must be an invertible {b.dim}x{b.dim} matrix")
    return is_coherent(MetricForm(t.T @ b.gram @ t), SkewForm(g.T @ w @ g), tol)
