"""Polarized Hodge structures and the abelian varieties they produce.

Hodge structures are stored by explicit complex bases of their ``(p, q)``
pieces.  Lefschetz modules are synthetic graded data (dimensions, the
operator ``L`` and the wedge pairing into top degree).  The elliptic-curve
example at the end produces the non-holomorphic period map used as a
numerical sanity check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import NamedTuple

import numpy as np

from .errors import NumericalError, ValidationError
from .forms import ComplexStructureOp, MetricForm, SkewForm, hermitian_form
from .lattice import (
    IntegralSkewForm,
    PolarizedAbelianVariety,
    exact_det,
    fraction_matrix,
    is_unimodular,
)

RANK_TOL = 1e-9


def _rank(m: np.ndarray, tol: float = RANK_TOL) -> int:
    if m.size == 0:
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    return int(np.sum(s > tol * max(1.0, s[0])))


@dataclass(frozen=True)
class HodgeStructure:
    """Weight ``k`` decomposition ``C^n = sum W^{p,q}`` given by column bases."""

    weight: int
    dim: int
    pieces: tuple

    def __post_init__(self):
        pieces = []
        for p, q, basis in self.pieces:
            b = np.array(basis, dtype=complex)
            if b.ndim == 1:
                b = b.reshape(-1, 1)
            if b.shape[0] != self.dim:
                raise ValidationError(f"basis of W^{p},{q} has wrong ambient dimension")
            if p + q != self.weight:
                raise ValidationError(f"piece ({p},{q}) does not have weight {self.weight}")
            if _rank(b) != b.shape[1]:
                raise ValidationError(f"basis of W^{p},{q} is not independent")
            b.setflags(write=False)
            pieces.append((int(p), int(q), b))
        pieces.sort(key=lambda t: -t[0])
        object.__setattr__(self, "pieces", tuple(pieces))
        full = self.stacked()
        if full.shape[1] != self.dim or _rank(full) != self.dim:
            raise ValidationError("pieces do not span C^n as a direct sum")
        for p, q, b in pieces:
            partner = self.piece(q, p)
            if partner is None or partner.shape[1] != b.shape[1]:
                raise ValidationError(f"W^{q},{p} is missing or has the wrong dimension")
            if _rank(np.hstack([partner, b.conj()])) != b.shape[1]:
                raise ValidationError(f"W^{q},{p} is not the conjugate of W^{p},{q}")

    def piece(self, p: int, q: int):
        for pp, qq, b in self.pieces:
            if (pp, qq) == (p, q):
                return b
        return None

    def stacked(self) -> np.ndarray:
        return np.hstack([b for _, _, b in self.pieces])

    def hodge_numbers(self) -> dict:
        return {(p, q): b.shape[1] for p, q, b in self.pieces}

    def transformed(self, g) -> "HodgeStructure":
        """Push the structure forward by a real invertible matrix."""
        g = np.asarray(g, dtype=float)
        return HodgeStructure(self.weight, self.dim, tuple((p, q, g @ b) for p, q, b in self.pieces))


@dataclass(frozen=True)
class WeilOperator:
    C: np.ndarray
    weight: int
    tol: float = 1e-9

    def __post_init__(self):
        c = np.array(self.C, dtype=float)
        n = c.shape[0]
        res = np.linalg.norm(c @ c - (-1) ** self.weight * np.eye(n))
        if res > self.tol * max(1.0, np.linalg.norm(c) ** 2):
            raise ValidationError("C^2 != (-1)^k I")
        c.setflags(write=False)
        object.__setattr__(self, "C", c)


@dataclass(frozen=True)
class PolarizationForm:
    """Rational bilinear form, symmetric for even weight and antisymmetric for odd."""

    Q: tuple
    weight: int

    def __post_init__(self):
        m = fraction_matrix(self.Q)
        sign = -1 if self.weight % 2 else 1
        n = len(m)
        if any(m[i][j] != sign * m[j][i] for i in range(n) for j in range(n)):
            kind = "antisymmetric" if sign < 0 else "symmetric"
            raise ValidationError(f"weight {self.weight} polarization must be {kind}")
        if exact_det(m) == 0:
            raise ValidationError("polarization is degenerate")
        object.__setattr__(self, "Q", m)

    @property
    def dim(self) -> int:
        return len(self.Q)

    def as_float(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.Q])

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for row in self.Q for x in row)

    def is_unimodular(self) -> bool:
        return self.is_integral() and abs(exact_det(self.Q)) == 1


def weil_operator(hs: HodgeStructure) -> WeilOperator:
    b = hs.stacked()
    phases = np.concatenate([np.full(basis.shape[1], 1j ** ((p - q) % 4)) for p, q, basis in hs.pieces])
    c = b @ np.diag(phases) @ np.linalg.inv(b)
    if np.linalg.norm(c.imag) > 1e-9 * max(1.0, np.linalg.norm(c.real)):
        raise ValidationError("Weil operator is not real: pieces are not conjugate-symmetric")
    return WeilOperator(c.real, hs.weight)


def _q_matrix(Q) -> np.ndarray:
    if isinstance(Q, PolarizationForm):
        return Q.as_float()
    return np.asarray(Q, dtype=float)


def check_riemann(hs: HodgeStructure, Q, tol: float = 1e-9) -> tuple[bool, bool]:
    """The two Riemann conditions for ``Q`` on ``hs``.

    First: ``Q(W^{p,q}, W^{r,s}) = 0`` unless ``(r, s) = (q, p)``.
    Second: the hermitian form ``Q(Cx, conj(x))`` is positive definite on every piece.
    """
    q = _q_matrix(Q)
    scale = max(1.0, np.linalg.norm(q))
    first = True
    for p, qq, b1 in hs.pieces:
        for r, s, b2 in hs.pieces:
            if (r, s) == (qq, p):
                continue
            if np.linalg.norm(b1.T @ q @ b2) > tol * scale * np.linalg.norm(b1) * np.linalg.norm(b2):
                first = False
    C = weil_operator(hs).C
    second = True
    for _, _, b in hs.pieces:
        h = (C @ b).T @ q @ b.conj()
        herm = 0.5 * (h + h.conj().T)
        if np.linalg.norm(h - herm) > tol * scale * np.linalg.norm(b) ** 2:
            second = False
            continue
        if np.linalg.eigvalsh(herm)[0] <= tol * scale * np.linalg.norm(b) ** 2:
            second = False
    return first, second


def taming_sign(C: np.ndarray, Q: np.ndarray) -> int:
    """Sign ``s`` such that ``s*Q`` is tamed by ``C``: ``s Q(x, Cx) > 0``."""
    m = Q @ C
    sym = 0.5 * (m + m.T)
    ev = np.linalg.eigvalsh(sym)
    if ev[0] > 0:
        return 1
    if ev[-1] < 0:
        return -1
    raise ValidationError("neither Q nor -Q is positive against the Weil operator")


def weil_jacobian(hs: HodgeStructure, Q: PolarizationForm, return_sign: bool = False):
    """Torus ``R^n / Z^n`` with complex structure ``C`` and Riemann form ``+-Q``.

    For odd weight ``C`` is a complex structure.  The sign of ``Q`` is chosen so
    that ``omega(x, Cx) > 0``; pass ``return_sign=True`` to also get it.
    """
    if hs.weight % 2 == 0:
        raise ValidationError("the Weil jacobian needs odd weight")
    if not isinstance(Q, PolarizationForm):
        Q = PolarizationForm(Q, hs.weight)
    if not Q.is_integral():
        raise ValidationError("the Weil jacobian needs an integral polarization")
    first, second = check_riemann(hs, Q)
    if not (first and second):
        raise ValidationError(f"Riemann conditions fail (first={first}, second={second})")
    C = weil_operator(hs).C
    sign = taming_sign(C, Q.as_float())
    omega = IntegralSkewForm(tuple(tuple(sign * int(x) for x in row) for row in Q.Q))
    J = ComplexStructureOp(C)
    w = omega.to_real()
    h = hermitian_form(w, J)
    metric = MetricForm(w.gram @ C)
    av = PolarizedAbelianVariety(hs.dim, J, omega, h, is_unimodular(omega), metric)
    return (av, sign) if return_sign else av


class WeightOneData(NamedTuple):
    dim: int
    J: np.ndarray
    q: tuple


def even_to_weight_one(hs: HodgeStructure, Q: PolarizationForm) -> WeightOneData:
    """Weight-one structure on ``V = W + W^dual`` from an even-weight ``(W, Q)``.

    Coordinates ``(x, y)`` stand for ``x + Q^(y)``, where ``Q^`` is the isomorphism
    ``W -> W^dual`` induced by ``Q``.  Then ``J(x, y) = (-C y, C x)`` and
    ``q((x1, y1), (x2, y2)) = Q(x1, y2) - Q(y1, x2)``, the sign for which
    ``q(v, Jv) > 0``.  ``q`` is returned exactly.
    """
    if hs.weight % 2:
        raise ValidationError("even_to_weight_one needs even weight")
    if not isinstance(Q, PolarizationForm):
        Q = PolarizationForm(Q, hs.weight)
    first, second = check_riemann(hs, Q)
    if not (first and second):
        raise ValidationError(f"Riemann conditions fail (first={first}, second={second})")
    C = weil_operator(hs).C
    n = hs.dim
    zero = np.zeros((n, n))
    J = np.block([[zero, -C], [C, zero]])
    Qm = Q.Q
    z = Fraction(0)
    q = tuple(
        tuple(z for _ in range(n)) + tuple(Qm[i]) for i in range(n)
    ) + tuple(
        tuple(-Qm[i][j] for j in range(n)) + tuple(z for _ in range(n)) for i in range(n)
    )
    return WeightOneData(2 * n, J, q)


# --------------------------------------------------------------------------
# Lefschetz modules


@dataclass(frozen=True)
class LefschetzModule:
    """Graded real spaces ``H^0..H^{2d}`` with ``L: H^j -> H^{j+2}``.

    ``L[j]`` has shape ``(dims[j+2], dims[j])``.  ``pairing[j]`` has shape
    ``(dims[j], dims[2d-j])`` and represents ``integral(x ^ y)``.
    ``weil[j]`` optionally holds the Weil operator on ``H^j``.
    """

    d: int
    dims: tuple
    L: tuple
    pairing: tuple
    weil: dict = field(default_factory=dict)

    def __post_init__(self):
        d = self.d
        if len(self.dims) != 2 * d + 1:
            raise ValidationError("need dims for degrees 0..2d")
        Ls = tuple(np.array(m, dtype=float).reshape(self.dims[j + 2], self.dims[j]) for j, m in enumerate(self.L))
        if len(Ls) != 2 * d - 1 and d > 0:
            raise ValidationError("need L for degrees 0..2d-2")
        pair = tuple(np.array(m, dtype=float).reshape(self.dims[j], self.dims[2 * d - j]) for j, m in enumerate(self.pairing))
        if len(pair) != 2 * d + 1:
            raise ValidationError("need pairings for degrees 0..2d")
        object.__setattr__(self, "L", Ls)
        object.__setattr__(self, "pairing", pair)
        object.__setattr__(self, "weil", {int(k): np.array(v, dtype=float) for k, v in self.weil.items()})
        for j in range(d + 1):
            lk = self.L_power(j, d - j)
            if self.dims[j] != self.dims[2 * d - j] or _rank(lk) != self.dims[j]:
                raise ValidationError(f"hard Lefschetz fails in degree {j}")

    def L_power(self, j: int, r: int) -> np.ndarray:
        """Matrix of ``L^r`` on ``H^j``."""
        out = np.eye(self.dims[j])
        for s in range(r):
            if j + 2 * s + 2 > 2 * self.d:
                return np.zeros((0, self.dims[j]))
            out = self.L[j + 2 * s] @ out
        return out

    def primitive_basis(self, j: int) -> np.ndarray:
        """Orthonormal basis of ``ker L^{d-j+1}`` in ``H^j`` (empty for ``j > d``)."""
        if j > self.d or j < 0:
            return np.zeros((self.dims[j] if 0 <= j <= 2 * self.d else 0, 0))
        m = self.L_power(j, self.d - j + 1)
        if m.shape[0] == 0:
            return np.eye(self.dims[j])
        _, s, vt = np.linalg.svd(m)
        rank = int(np.sum(s > RANK_TOL * max(1.0, s[0] if s.size else 1.0)))
        return vt[rank:].T


def primitive_decomposition(lm: LefschetzModule, x, k: int) -> dict:
    """Components ``{r: x_r}`` with ``x = sum L^r x_r`` and ``x_r`` primitive of degree ``k - 2r``."""
    if not 0 <= k <= 2 * lm.d:
        raise ValidationError("degree out of range")
    x = np.asarray(x, dtype=float)
    if x.shape != (lm.dims[k],):
        raise ValidationError("element has the wrong dimension for its degree")
    blocks, rs = [], []
    for r in range(max(0, k - lm.d), k // 2 + 1):
        basis = lm.primitive_basis(k - 2 * r)
        if basis.shape[1]:
            blocks.append(lm.L_power(k - 2 * r, r) @ basis)
            rs.append((r, basis))
    if not blocks:
        if np.linalg.norm(x) == 0 or lm.dims[k] == 0:
            return {}
        raise ValidationError("inconsistent module: no primitive pieces in this degree")
    M = np.hstack(blocks)
    if M.shape[1] != lm.dims[k] or _rank(M) != lm.dims[k]:
        raise ValidationError("inconsistent module: primitive pieces do not decompose H^k")
    coeffs = np.linalg.solve(M, x)
    out, pos = {}, 0
    for r, basis in rs:
        n = basis.shape[1]
        out[r] = basis @ coeffs[pos : pos + n]
        pos += n
    return out


def reassemble(lm: LefschetzModule, parts: dict, k: int) -> np.ndarray:
    total = np.zeros(lm.dims[k])
    for r, xr in parts.items():
        total = total + lm.L_power(k - 2 * r, r) @ xr
    return total


def _eps(k: int) -> int:
    return (-1) ** (k * (k + 1) // 2)


def _mu(d: int, k: int, r: int) -> Fraction:
    return Fraction(math.factorial(r), math.factorial(d - k + r))


def riemann_form_kahler(lm: LefschetzModule, x, y, k: int) -> float:
    """``Q(x, y) = eps_k sum_r (-1)^r mu_r integral(L^{d-k+2r}(x_r ^ y_r))``."""
    if k > lm.d:
        raise ValidationError("the form is defined on degrees up to d")
    xs = primitive_decomposition(lm, x, k)
    ys = primitive_decomposition(lm, y, k)
    total = 0.0
    for r, xr in xs.items():
        if r not in ys:
            continue
        j = k - 2 * r
        val = xr @ lm.pairing[j] @ (lm.L_power(j, lm.d - j) @ ys[r])
        total += (-1) ** r * float(_mu(lm.d, k, r)) * val
    return _eps(k) * total


def riemann_form_gram(lm: LefschetzModule, k: int) -> np.ndarray:
    n = lm.dims[k]
    eye = np.eye(n)
    return np.array([[riemann_form_kahler(lm, eye[i], eye[j], k) for j in range(n)] for i in range(n)])


def weil_star(lm: LefschetzModule, x, k: int) -> np.ndarray:
    """``*(L^r x_r) = eps_k (-1)^r r!/(d-j-r)! L^{d-j-r} C x_r`` with ``j = k - 2r`` the primitive degree."""
    out = np.zeros(lm.dims[2 * lm.d - k])
    for r, xr in primitive_decomposition(lm, x, k).items():
        j = k - 2 * r
        if j not in lm.weil:
            raise ValidationError(f"no Weil operator given in degree {j}")
        cx = lm.weil[j] @ xr
        coeff = _eps(k) * (-1) ** r * float(Fraction(math.factorial(r), math.factorial(lm.d - j - r)))
        out = out + coeff * (lm.L_power(j, lm.d - j - r) @ cx)
    return out


def hodge_metric(lm: LefschetzModule, x, y, k: int) -> float:
    """``b(x, y) = Q(x, C y)`` on ``H^k``."""
    if k not in lm.weil:
        raise ValidationError(f"no Weil operator given in degree {k}")
    return riemann_form_kahler(lm, x, lm.weil[k] @ np.asarray(y, dtype=float), k)


def hodge_metric_gram(lm: LefschetzModule, k: int) -> np.ndarray:
    n = lm.dims[k]
    eye = np.eye(n)
    return np.array([[hodge_metric(lm, eye[i], eye[j], k) for j in range(n)] for i in range(n)])


def _wedge_sign(indices) -> int:
    """Sign of the permutation sorting ``indices`` (0 if there is a repeat)."""
    idx = list(indices)
    if len(set(idx)) != len(idx):
        return 0
    sign = 1
    for i in range(len(idx)):
        for j in range(i + 1, len(idx)):
            if idx[i] > idx[j]:
                sign = -sign
    return sign


def torus_lefschetz(d: int) -> LefschetzModule:
    """Exterior algebra of a flat complex torus of dimension ``d``.

    Real coordinates are ordered ``x_1, y_1, ..., x_d, y_d``; the Kahler class
    is ``sum dx_i ^ dy_i`` and the orientation is ``dx_1 ^ dy_1 ^ ... ``.  The
    Weil operator on ``H^j`` is the ``j``-th exterior power of
    ``dx -> -dy, dy -> dx``.
    """
    n = 2 * d
    bases = [list(combinations(range(n), j)) for j in range(n + 1)]
    index = [{b: i for i, b in enumerate(bs)} for bs in bases]
    dims = tuple(len(bs) for bs in bases)
    Ls = []
    for j in range(n - 1):
        m = np.zeros((dims[j + 2], dims[j]))
        for col, mono in enumerate(bases[j]):
            for i in range(d):
                word = (2 * i, 2 * i + 1) + mono
                s = _wedge_sign(word)
                if s:
                    m[index[j + 2][tuple(sorted(word))], col] += s
        Ls.append(m)
    pairs = []
    for j in range(n + 1):
        m = np.zeros((dims[j], dims[n - j]))
        for a, ma in enumerate(bases[j]):
            for b, mb in enumerate(bases[n - j]):
                m[a, b] = _wedge_sign(ma + mb)
        pairs.append(m)
    c1 = np.zeros((n, n))
    for i in range(d):
        c1[2 * i + 1, 2 * i] = -1.0
        c1[2 * i, 2 * i + 1] = 1.0
    weil = {}
    for j in range(n + 1):
        m = np.zeros((dims[j], dims[j]))
        for col, I in enumerate(bases[j]):
            for row, K in enumerate(bases[j]):
                m[row, col] = np.linalg.det(c1[np.ix_(K, I)]) if j else 1.0
        weil[j] = np.round(m)
    return LefschetzModule(d, dims, tuple(Ls), tuple(pairs), weil)


# --------------------------------------------------------------------------
# the elliptic-curve example


@dataclass(frozen=True)
class EtauFixture:
    tau: complex
    M: np.ndarray
    N: np.ndarray
    B: np.ndarray

    @property
    def stacked(self) -> np.ndarray:
        return np.vstack([self.M, self.N])


def _iota_cols(m: np.ndarray) -> np.ndarray:
    return m[:, ::-1]


# Column sets of the 4x8 matrix B for the two Pluecker coordinates compared below.
PLUCKER_COLUMNS = ((0, 1, 2, 3), (7, 1, 2, 3))


def etau_build(tau) -> EtauFixture:
    tau = complex(tau)
    if tau.imag <= 0:
        raise ValidationError("tau must lie in the upper half-plane")
    tb = tau.conjugate()
    M = np.array([[tau**2, tau, tau, 1], [tb**2, tb, tb, 1]], dtype=complex)
    N = np.array([[abs(tau) ** 2, -(tau + tb), 0, 1], [0, 1, -1, 0]], dtype=complex)
    B = np.block([[M, 1j * _iota_cols(M)], [N, -1j * _iota_cols(N)]])
    return EtauFixture(tau, M, N, B)


def etau_det_closed_form(tau) -> complex:
    tau = complex(tau)
    tb = tau.conjugate()
    return (tau - tb) * (tau**2 + 6 * abs(tau) ** 2 + tb**2)


def etau_plucker(tau) -> tuple[complex, complex]:
    fx = etau_build(tau)
    return tuple(complex(np.linalg.det(fx.B[:, list(cols)])) for cols in PLUCKER_COLUMNS)


def plucker_ratio_closed_form(tau) -> complex:
    tau = complex(tau)
    tb = tau.conjugate()
    if abs(tau + tb) < 1e-12 * max(1.0, abs(tau)):
        raise ValidationError("the ratio has a pole on the imaginary axis")
    return -1j * (tau**2 + 6 * abs(tau) ** 2 + tb**2) / (tau + tb) ** 2


def plucker_ratio(tau, rtol: float = 1e-9) -> complex:
    """Ratio of the two Pluecker coordinates, computed from determinants and from the
    closed form; raises if the two disagree."""
    closed = plucker_ratio_closed_form(tau)
    d1, d2 = etau_plucker(tau)
    via_det = d1 / d2
    if abs(via_det - closed) > rtol * max(1.0, abs(closed)):
        raise NumericalError(f"determinant and closed-form ratios disagree: {via_det} vs {closed}")
    return closed


def nonholomorphy_probe(tau, h: float = 1e-4, f=None) -> tuple[complex, complex]:
    """Central-difference Wirtinger derivatives ``(d/d tau-bar, d/d tau)`` of ``f``
    (default: the Pluecker ratio)."""
    if not 1e-6 <= h <= 1e-3:
        raise ValidationError("step must lie in [1e-6, 1e-3]")
    f = plucker_ratio_closed_form if f is None else f
    tau = complex(tau)
    fx = (f(tau + h) - f(tau - h)) / (2 * h)
    fy = (f(tau + 1j * h) - f(tau - 1j * h)) / (2 * h)
    return 0.5 * (fx + 1j * fy), 0.5 * (fx - 1j * fy)
