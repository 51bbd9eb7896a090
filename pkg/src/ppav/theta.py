"""Theta functions with characteristics and multipliers for unimodular skew forms.

    Theta[u, v](Z, z) = sum_{x in Z^g + u} exp(i pi <x, Z x>) exp(2 pi i <x, z + v>)

with the bilinear pairing ``<a, b> = a^T b``.  The lattice sum runs in a
compiled kernel when available (``ppav._theta_kernel``) and in numpy
otherwise; set ``PPAV_PURE_PYTHON=1`` to force the numpy path.
"""
from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .errors import NumericalError, ValidationError
from .lattice import IntegralSkewForm, is_unimodular
from .siegel import SiegelPoint

if os.environ.get("PPAV_PURE_PYTHON") == "1":
    from ._theta_py import theta_terms

    BACKEND = "python"
else:
    try:
        from ._theta_kernel import theta_terms

        BACKEND = "cython"
    except ImportError:  # extension not built
        from ._theta_py import theta_terms

        BACKEND = "python"

MAX_RADIUS = 40
MIN_TOL = 1e-14
HALF = Fraction(1, 2)


def _half_vector(values, g: int | None = None) -> tuple:
    out = []
    for x in values:
        f = Fraction(x) if not isinstance(x, str) else Fraction(x.strip())
        f = f - math.floor(f)
        if f not in (0, HALF):
            raise ValidationError(f"characteristic entries must be 0 or 1/2 mod 1, got {x}")
        out.append(f)
    if g is not None and len(out) != g:
        raise ValidationError(f"characteristic needs {g} entries")
    return tuple(out)


@dataclass(frozen=True)
class Characteristic:
    u: tuple
    v: tuple

    def __post_init__(self):
        u = _half_vector(self.u)
        v = _half_vector(self.v, len(u))
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    @property
    def g(self) -> int:
        return len(self.u)

    @classmethod
    def zero(cls, g: int) -> "Characteristic":
        return cls((0,) * g, (0,) * g)

    @classmethod
    def parse(cls, text: str) -> "Characteristic":
        """``"1/2,0:0,1/2"`` -> ``u = (1/2, 0), v = (0, 1/2)``."""
        try:
            us, vs = text.split(":")
            return cls(tuple(us.split(",")), tuple(vs.split(",")))
        except ValueError as exc:
            raise ValidationError(f"cannot parse characteristic {text!r}") from exc

    def __str__(self):
        return ",".join(map(str, self.u)) + ":" + ",".join(map(str, self.v))


def parity(ch: Characteristic) -> str:
    """``"odd"`` iff ``4 <u, v>`` is odd."""
    s = 4 * sum((a * b for a, b in zip(ch.u, ch.v)), Fraction(0))
    return "odd" if int(s) % 2 else "even"


def all_characteristics(g: int) -> list[Characteristic]:
    out = []
    for bits in itertools.product((0, HALF), repeat=2 * g):
        out.append(Characteristic(bits[:g], bits[g:]))
    return out


# --------------------------------------------------------------------------
# evaluation


@dataclass(frozen=True)
class ThetaTruncation:
    """Ball ``||x - center|| <= radius`` guaranteeing absolute tail error below ``tol``."""

    tol: float
    radius: float
    lambda_min: float
    center: np.ndarray
    bound: float


class ThetaResult(NamedTuple):
    value: complex
    radius: float
    terms: int


def _tail_bound(log_peak: float, lam: float, g: int, K: int) -> float:
    """``exp(log_peak) * sum_{k >= K} (2k+3)^g exp(-pi lam k^2)``."""
    total = 0.0
    k = K
    while True:
        log_t = log_peak + g * math.log(2 * k + 3) - math.pi * lam * k * k
        t = math.exp(log_t) if log_t < 700 else math.inf
        total += t
        if k > K and (t < 1e-300 or t < 1e-17 * total):
            return total
        k += 1


def truncation(Z: SiegelPoint, z, tol: float) -> ThetaTruncation:
    """Radius for the lattice sum at ``(Z, z)``.

    With ``Y = Im Z`` and ``c = -Y^{-1} Im z`` every summand satisfies
    ``|term(x)| = exp(pi c^T Y c) exp(-pi (x-c)^T Y (x-c))``.  Points with
    ``k <= ||x - c|| < k + 1`` number at most ``(2k+3)^g``, which bounds the
    tail outside radius ``K`` by ``exp(pi c^T Y c) sum_{k>=K} (2k+3)^g exp(-pi lam k^2)``.
    """
    if not tol >= MIN_TOL:
        raise ValidationError(f"tolerance must be at least {MIN_TOL}")
    g = Z.g
    y = Z.Y
    lam = float(np.linalg.eigvalsh(y)[0])
    if lam <= 0:
        raise ValidationError("Im Z is not positive definite")
    zi = np.imag(np.asarray(z, dtype=complex))
    c = -np.linalg.solve(y, zi)
    log_peak = math.pi * float(c @ y @ c)
    for K in range(0, MAX_RADIUS + 1):
        bound = _tail_bound(log_peak, lam, g, K)
        if bound < tol:
            return ThetaTruncation(tol, float(K), lam, c, bound)
    raise NumericalError(f"tolerance {tol} needs a radius beyond the cap {MAX_RADIUS}")


def pairwise_sum(values: np.ndarray) -> complex:
    """Fixed-shape tree reduction, independent of backend and thread count."""
    a = np.asarray(values, dtype=complex)
    if a.size == 0:
        return 0j
    while a.size > 1:
        if a.size % 2:
            a = np.append(a, 0j)
        a = a[0::2] + a[1::2]
    return complex(a[0])


def _as_z(z, g: int) -> np.ndarray:
    if z is None:
        return np.zeros(g, dtype=complex)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if z.shape != (g,):
        raise ValidationError(f"z must have {g} entries")
    return z


def theta_series(Z: SiegelPoint, ch: Characteristic | None = None, z=None, tol: float = 1e-12) -> ThetaResult:
    g = Z.g
    ch = Characteristic.zero(g) if ch is None else ch
    if ch.g != g:
        raise ValidationError("characteristic genus differs from Z")
    z = _as_z(z, g)
    tr = truncation(Z, z, tol)
    u = np.array([float(x) for x in ch.u])
    w = z + np.array([float(x) for x in ch.v])
    lo = np.ceil(tr.center - u - tr.radius).astype(np.int_)
    hi = np.floor(tr.center - u + tr.radius).astype(np.int_)
    terms = theta_terms(
        np.ascontiguousarray(Z.Z.real), np.ascontiguousarray(Z.Z.imag),
        np.ascontiguousarray(w.real), np.ascontiguousarray(w.imag),
        u, np.ascontiguousarray(tr.center), float(tr.radius), lo, hi,
    )
    value = pairwise_sum(terms)
    if not np.isfinite(value):
        raise NumericalError("theta sum overflowed")
    return ThetaResult(value, tr.radius, int(len(terms)))


def theta_eval(Z: SiegelPoint, ch: Characteristic | None = None, z=None, tol: float = 1e-12) -> complex:
    return theta_series(Z, ch, z, tol).value


def quasi_periodicity_defect(Z: SiegelPoint, ch: Characteristic | None, z, m, which: str = "integer", tol: float = 1e-12) -> float:
    """``|Theta(z + shift) - factor * Theta(z)|`` for an integer shift ``m``
    (``which="integer"``) or a period shift ``Z m`` (``which="period"``).

    Factors: ``exp(2 pi i <u, m>)`` and ``exp(-i pi <m, Z m> - 2 pi i <m, z + v>)``.
    The base value is evaluated to ``tol / |factor|`` so the defect is below ``2 tol``.
    """
    g = Z.g
    ch = Characteristic.zero(g) if ch is None else ch
    z = _as_z(z, g)
    m = np.atleast_1d(np.asarray(m, dtype=float))
    if m.shape != (g,) or not np.all(m == np.round(m)):
        raise ValidationError("m must be an integer vector")
    if not np.any(m):
        return 0.0
    u = np.array([float(x) for x in ch.u])
    v = np.array([float(x) for x in ch.v])
    if which == "integer":
        shifted = z + m
        factor = np.exp(2j * np.pi * (u @ m))
    elif which == "period":
        shifted = z + Z.Z @ m
        factor = np.exp(-1j * np.pi * (m @ Z.Z @ m) - 2j * np.pi * (m @ (z + v)))
    else:
        raise ValidationError("which must be 'integer' or 'period'")
    base_tol = max(MIN_TOL, tol / max(1.0, abs(factor)))
    lhs = theta_eval(Z, ch, shifted, tol)
    rhs = factor * theta_eval(Z, ch, z, base_tol)
    return float(abs(lhs - rhs))


# --------------------------------------------------------------------------
# multipliers


def _solve_mod2(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve ``a x = b`` over F_2 for invertible ``a``."""
    n = a.shape[0]
    m = np.concatenate([a % 2, (b % 2).reshape(-1, 1)], axis=1).astype(np.int64)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r, col]), None)
        if piv is None:
            raise ValidationError("system is singular mod 2")
        m[[col, piv]] = m[[piv, col]]
        for r in range(n):
            if r != col and m[r, col]:
                m[r] ^= m[col]
    return m[:, n].copy()


@dataclass(frozen=True)
class Multiplier:
    """``alpha(y) = (-1)^{q0(y) + omega(theta, y)}``, with ``q0(y) = sum_{i<j} y_i y_j W_ij``.

    ``q0`` carries the cocycle ``(-1)^{omega(x, y)}``; the theta vector picks
    out one of the ``2^{2g}`` multipliers.
    """

    omega: IntegralSkewForm
    theta: tuple

    def __post_init__(self):
        th = tuple(int(t) % 2 for t in self.theta)
        if len(th) != self.omega.rank:
            raise ValidationError("theta vector has the wrong length")
        object.__setattr__(self, "theta", th)

    def __call__(self, y) -> int:
        y = [int(t) for t in y]
        w = self.omega.gram
        n = len(y)
        q0 = sum(y[i] * y[j] * w[i][j] for i in range(n) for j in range(i + 1, n))
        return -1 if (q0 + self.omega(self.theta, y)) % 2 else 1

    def basis_values(self) -> tuple:
        n = self.omega.rank
        return tuple(self([int(i == j) for j in range(n)]) for i in range(n))

    def cocycle_defect(self, x, y) -> int:
        """0 when ``alpha(x+y) = (-1)^{omega(x,y)} alpha(x) alpha(y)``."""
        s = [int(a) + int(b) for a, b in zip(x, y)]
        sign = -1 if self.omega(x, y) % 2 else 1
        return int(self(s) != sign * self(x) * self(y))


def multiplier_from_basis(eps, omega: IntegralSkewForm) -> Multiplier:
    """Unique multiplier with ``alpha(b_j) = eps_j`` on the standard basis of ``Z^{2g}``."""
    if not is_unimodular(omega):
        raise ValidationError("multipliers are parametrized this way only for unimodular forms")
    eps = [int(e) for e in eps]
    if len(eps) != omega.rank or any(e not in (1, -1) for e in eps):
        raise ValidationError("basis values must be +-1, one per basis vector")
    s = np.array([0 if e == 1 else 1 for e in eps])
    w = np.array(omega.gram, dtype=np.int64)
    # omega(theta, b_j) = (W^T theta)_j
    theta = _solve_mod2(w.T, s)
    return Multiplier(omega, tuple(int(t) for t in theta))


def characteristic_from_multiplier(m: Multiplier) -> Characteristic:
    """``u = theta_1 / 2``, ``v = theta_2 / 2`` mod 1 along ``Z^g + Z^g`` (needs the standard form)."""
    g = m.omega.rank // 2
    if m.omega.gram != IntegralSkewForm.standard(g).gram:
        raise ValidationError("characteristics are read off in a symplectic basis; pass the standard form")
    th = m.theta
    return Characteristic(tuple(Fraction(t, 2) for t in th[:g]), tuple(Fraction(t, 2) for t in th[g:]))


def multiplier_from_characteristic(ch: Characteristic) -> Multiplier:
    theta = tuple(int(2 * x) for x in ch.u + ch.v)
    return Multiplier(IntegralSkewForm.standard(ch.g), theta)


def enumerate_multipliers(g: int) -> list[tuple[tuple, Multiplier, Characteristic]]:
    """All ``2^{2g}`` sign choices on the basis with their multiplier and characteristic."""
    omega = IntegralSkewForm.standard(g)
    out = []
    for eps in itertools.product((1, -1), repeat=2 * g):
        m = multiplier_from_basis(eps, omega)
        out.append((eps, m, characteristic_from_multiplier(m)))
    return out
