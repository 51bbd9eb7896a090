"""Exact characteristic-class calculus.

Everything here is exact over Q (:class:`fractions.Fraction`): the
multiplicative-sequence procedure turning a power series ``q(z)`` into
universal polynomials ``Q_j(p_1, ..., p_j)``, the A-hat series, the Chern
character, Pontryagin classes, and the twisted K-theoretic pairing
``omega_a(x, y) = integral(a * x * iota(y))`` on finite cohomology ring models.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

from .errors import ValidationError
from .lattice import exact_det, to_fraction

# cohomological degree of a variable of index 1, by family name
COHOMOLOGICAL_WEIGHT = {"p": 4, "c": 2}


class Poly:
    """Polynomial with Fraction coefficients in indexed variables such as ``p1``, ``c2``.

    A monomial is a sorted tuple of ``((family, index), exponent)`` pairs.
    The weight of a variable is its index.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        for mono, coeff in (terms or {}).items():
            coeff = Fraction(coeff)
            if coeff:
                clean[mono] = clean.get(mono, 0) + coeff
                if not clean[mono]:
                    del clean[mono]
        self.terms = clean

    @classmethod
    def var(cls, family: str, index: int) -> "Poly":
        return cls({(((family, index), 1),): 1})

    @classmethod
    def const(cls, value) -> "Poly":
        return cls({(): value})

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Poly(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Poly({m: c * other for m, c in self.terms.items()})
        if not isinstance(other, Poly):
            return NotImplemented
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        result = Poly.const(1)
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def weight(self, mono) -> int:
        return sum(idx * e for (_, idx), e in mono)

    def is_homogeneous(self, w: int) -> bool:
        return all(self.weight(m) == w for m in self.terms)

    def variables(self) -> set:
        return {v for m in self.terms for v, _ in m}

    def coefficient(self, *factors) -> Fraction:
        """Coefficient of a monomial given as ``("p", 1, 2), ("p", 2, 1)`` triples."""
        mono = tuple(sorted(((f, i), e) for f, i, e in factors))
        return self.terms.get(mono, Fraction(0))

    def substitute(self, mapping: dict):
        """Replace variables ``(family, index)`` by values supporting ``+`` and ``*``.

        Unmapped variables stay symbolic (only possible for Poly values).
        """
        total = None
        for mono, coeff in self.terms.items():
            term = None
            for v, e in mono:
                factor = mapping[v] if v in mapping else Poly({((v, 1),): 1})
                for _ in range(e):
                    term = factor if term is None else term * factor
            term = coeff if term is None else term * coeff
            total = term if total is None else total + term
        return Poly() if total is None else total

    def _sort_key(self, mono):
        idx = sorted((i for (_, i), e in mono for _ in range(e)), reverse=True)
        fams = [f for (f, _), _ in mono]
        return (idx, fams)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for mono in sorted(self.terms, key=self._sort_key, reverse=True):
            coeff = self.terms[mono]
            names = "*".join(f"{f}{i}" + (f"^{e}" if e > 1 else "") for (f, i), e in mono)
            if not names:
                body = str(abs(coeff))
            elif abs(coeff) == 1:
                body = names
            else:
                body = f"{abs(coeff)} {names}"
            sign = "-" if coeff < 0 else "+"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    __repr__ = __str__


def _mono_mul(m1, m2):
    d = dict(m1)
    for v, e in m2:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


def p(i: int) -> Poly:
    return Poly.var("p", i)


def c(i: int) -> Poly:
    return Poly.var("c", i)


# --------------------------------------------------------------------------
# multiplicative sequences


@dataclass(frozen=True)
class PowerSeriesQ:
    """Coefficients ``q_0 = 1, q_1, q_2, ...`` of ``q(z)``."""

    coeffs: tuple

    def __post_init__(self):
        cs = tuple(to_fraction(x) for x in self.coeffs)
        if not cs or cs[0] != 1:
            raise ValidationError("power series must start with q_0 = 1")
        object.__setattr__(self, "coeffs", cs)

    def __getitem__(self, k: int) -> Fraction:
        return self.coeffs[k] if k < len(self.coeffs) else Fraction(0)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1


def _root_product(q: PowerSeriesQ, n_roots: int, order: int) -> dict:
    """``prod_i q(beta_i z)`` as a dict over exponent vectors of beta (z-degree = total degree)."""
    poly = {(0,) * n_roots: Fraction(1)}
    for i in range(n_roots):
        nxt: dict = {}
        for exps, coeff in poly.items():
            room = order - sum(exps)
            for k in range(room + 1):
                qk = q[k]
                if not qk:
                    continue
                e = list(exps)
                e[i] += k
                key = tuple(e)
                nxt[key] = nxt.get(key, 0) + coeff * qk
        poly = {k: v for k, v in nxt.items() if v}
    return poly


def _beta_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            key = tuple(x + y for x, y in zip(e1, e2))
            out[key] = out.get(key, 0) + c1 * c2
    return {k: v for k, v in out.items() if v}


@lru_cache(maxsize=None)
def _elementary(n_roots: int, i: int):
    """Elementary symmetric polynomial e_i in n_roots variables, as a frozen item tuple."""
    from itertools import combinations

    terms = {}
    for combo in combinations(range(n_roots), i):
        e = [0] * n_roots
        for j in combo:
            e[j] = 1
        terms[tuple(e)] = Fraction(1)
    return tuple(terms.items())


def symmetric_to_elementary(poly: dict, n_roots: int, family: str = "p") -> Poly:
    """Rewrite a symmetric polynomial in the roots via elementary symmetric functions.

    Repeatedly strips the lexicographically leading monomial
    ``beta^a`` (``a`` non-increasing) with ``e_1^{a1-a2} ... e_m^{am}``.
    Raises if the input is not symmetric.
    """
    poly = dict(poly)
    result = Poly()
    while poly:
        lead = max(poly)
        coeff = poly[lead]
        if list(lead) != sorted(lead, reverse=True):
            raise ValidationError("polynomial in the roots is not symmetric")
        powers = [lead[k] - (lead[k + 1] if k + 1 < n_roots else 0) for k in range(n_roots)]
        expansion = {(0,) * n_roots: Fraction(1)}
        mono = Poly.const(1)
        for k, pw in enumerate(powers):
            for _ in range(pw):
                expansion = _beta_mul(expansion, dict(_elementary(n_roots, k + 1)))
            if pw:
                mono = mono * Poly.var(family, k + 1) ** pw
        for key, val in expansion.items():
            poly[key] = poly.get(key, 0) - coeff * val
            if not poly[key]:
                del poly[key]
        result = result + mono * coeff
    return result


def q_series_for_p(q: PowerSeriesQ, order: int, n_roots: int | None = None) -> list[Poly]:
    """Universal polynomials ``Q_1 .. Q_order`` of the q-series.

    Expands ``q(beta_1 z) ... q(beta_m z)`` in ``m = n_roots`` auxiliary roots
    (default ``m = order``, which makes every ``Q_j`` universal) and rewrites
    each z-coefficient in the elementary symmetric functions ``p_i``.
    """
    if order < 1:
        raise ValidationError("order must be at least 1")
    m = order if n_roots is None else n_roots
    if m < 1:
        raise ValidationError("need at least one root")
    product = _root_product(q, m, order)
    out = []
    for j in range(1, order + 1):
        part = {e: v for e, v in product.items() if sum(e) == j}
        out.append(symmetric_to_elementary(part, m, "p"))
    return out


def _invert_series(s: list[Fraction]) -> list[Fraction]:
    inv = [Fraction(1) / s[0]]
    for k in range(1, len(s)):
        acc = sum(s[i] * inv[k - i] for i in range(1, k + 1))
        inv.append(-acc / s[0])
    return inv


def a_hat_q_coefficients(order: int) -> PowerSeriesQ:
    """Coefficients of ``(z/2)/sinh(z/2)`` indexed by powers of ``z^2``.

    The index k coefficient multiplies ``z^{2k}``, the Pontryagin-root
    convention in which ``q_1 = -1/24`` and ``q_2 = 7/5760``.
    """
    if order < 0:
        raise ValidationError("order must be non-negative")
    sinh_ratio = [Fraction(1, 4**k * math.factorial(2 * k + 1)) for k in range(order + 1)]
    return PowerSeriesQ(tuple(_invert_series(sinh_ratio)))


def a_hat_series(order: int) -> list[Poly]:
    return q_series_for_p(a_hat_q_coefficients(order), order)


def chern_character(chern, order: int) -> list:
    """``ch_0 .. ch_order`` of a bundle from its Chern classes.

    ``chern`` is either a rank ``m`` (symbolic ``c_1..c_m``) or a list
    ``[c_1, ..., c_m]`` of Poly or ring elements.  ``ch_k = s_k / k!`` where the
    power sums ``s_k`` of the Chern roots come from Newton's identities, and
    ``c_i = 0`` for ``i > m``.
    """
    if isinstance(chern, int):
        chern = [c(i) for i in range(1, chern + 1)]
    chern = list(chern)
    rank = len(chern)
    if rank < 1:
        raise ValidationError("rank must be at least 1")
    if order < 0:
        raise ValidationError("order must be non-negative")
    zero = chern[0] * 0

    def e(i):
        return chern[i - 1] if i <= rank else zero

    s = [zero + rank]
    for k in range(1, order + 1):
        acc = e(k) * ((-1) ** (k - 1) * k)
        for i in range(1, k):
            acc = acc + e(i) * s[k - i] * (-1) ** (i - 1)
        s.append(acc)
    return [sk * Fraction(1, math.factorial(k)) for k, sk in enumerate(s)]


def complexified_chern(chern: list) -> list:
    """Total Chern class components ``[1, C_1, ..., C_2m]`` of ``F (x) C = F + conj(F)``.

    ``chern = [c_1, ..., c_m]`` may hold Poly or ring elements.
    """
    m = len(chern)
    full = [1] + list(chern)
    conj = [x if i % 2 == 0 else -x for i, x in enumerate(full)]
    out = []
    for k in range(2 * m + 1):
        acc = 0
        for i in range(max(0, k - m), min(k, m) + 1):
            acc = acc + full[i] * conj[k - i]
        out.append(acc)
    return out


def pontryagin_from_complexified(total: list) -> list:
    """``p_i = (-1)^i c_{2i}`` from components ``[1, c_1, c_2, ...]`` of the complexification."""
    return [total[2 * i] * (-1) ** i for i in range(1, (len(total) - 1) // 2 + 1)]


def pontryagin(chern: list) -> list:
    """Pontryagin classes ``p_1..p_m`` of the underlying real bundle of a complex bundle."""
    return pontryagin_from_complexified(complexified_chern(chern))


# --------------------------------------------------------------------------
# ring models


@dataclass(frozen=True, eq=False)
class RingElement:
    model: "CohomologyRingModel"
    coeffs: tuple

    def _lift(self, other):
        if isinstance(other, RingElement):
            if other.model is not self.model:
                raise ValidationError("elements live in different ring models")
            return other
        if isinstance(other, (int, Fraction)):
            return self.model.scalar(other)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return RingElement(self.model, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return RingElement(self.model, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return RingElement(self.model, tuple(a * other for a in self.coeffs))
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self.model.mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = self.model.one()
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return False
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        terms = [f"{c}*{n}" for c, n in zip(self.coeffs, self.model.names) if c]
        return " + ".join(terms) if terms else "0"

    def degree_part(self, d: int) -> "RingElement":
        return RingElement(self.model, tuple(c if deg == d else Fraction(0) for c, deg in zip(self.coeffs, self.model.degrees)))

    def degrees(self) -> set:
        return {deg for c, deg in zip(self.coeffs, self.model.degrees) if c}

    def is_homogeneous(self, d: int) -> bool:
        return self.degrees() <= {d}

    def exp(self) -> "RingElement":
        """Exponential of a nilpotent element (no degree-0 part)."""
        if 0 in self.degrees():
            raise ValidationError("exp needs an element without degree-0 part")
        total, term, k = self.model.one(), self.model.one(), 0
        while True:
            k += 1
            term = term * self * Fraction(1, k)
            if not any(term.coeffs):
                return total
            total = total + term

    def sqrt(self) -> "RingElement":
        """Square root of ``1 + nilpotent`` by the binomial series."""
        nil = self - 1
        if nil.degree_part(0) != self.model.zero() or self.degree_part(0) != self.model.one():
            raise ValidationError("sqrt needs degree-0 part equal to 1")
        total, power, k = self.model.one(), self.model.one(), 0
        coeff = Fraction(1)
        while True:
            k += 1
            coeff = coeff * (Fraction(1, 2) - (k - 1)) / k
            power = power * nil
            if not any(power.coeffs):
                return total
            total = total + power * coeff


@dataclass(frozen=True, eq=False)
class CohomologyRingModel:
    """Finite even-degree commutative Q-algebra with an integration functional.

    ``mult[(i, j)]`` is the coefficient vector of ``basis_i * basis_j``;
    missing pairs multiply to zero.  Basis element 0 must be the unit.
    ``lattice`` holds coefficient vectors of distinguished lattice generators.
    """

    names: tuple
    degrees: tuple
    mult: dict
    integral: tuple
    lattice: tuple = ()
    dimension_param: int = 0

    def __post_init__(self):
        n = len(self.names)
        if len(self.degrees) != n or len(self.integral) != n:
            raise ValidationError("ring model arrays have inconsistent lengths")
        if any(d % 2 for d in self.degrees):
            raise ValidationError("only even-degree ring models are supported")
        if self.degrees[0] != 0:
            raise ValidationError("basis element 0 must be the unit in degree 0")
        mult = {}
        for (i, j), vec in self.mult.items():
            vec = tuple(to_fraction(x) for x in vec)
            if len(vec) != n:
                raise ValidationError("structure constant vector has wrong length")
            for k, ck in enumerate(vec):
                if ck and self.degrees[k] != self.degrees[i] + self.degrees[j]:
                    raise ValidationError("multiplication is not graded")
            mult[(i, j)] = vec
        for (i, j), vec in mult.items():
            if mult.get((j, i), vec) != vec:
                raise ValidationError("multiplication is not commutative")
        sym = dict(mult)
        for (i, j), vec in mult.items():
            sym.setdefault((j, i), vec)
        object.__setattr__(self, "mult", sym)
        integral = tuple(to_fraction(x) for x in self.integral)
        top = max(self.degrees)
        if any(v and d != top for v, d in zip(integral, self.degrees)):
            raise ValidationError("integration must vanish off the top degree")
        object.__setattr__(self, "integral", integral)
        object.__setattr__(self, "lattice", tuple(tuple(to_fraction(x) for x in v) for v in self.lattice))
        unit = self.one()
        for k in range(n):
            e = self.basis(k)
            if self.mul(unit, e) != e:
                raise ValidationError("basis element 0 is not a unit")

    @property
    def top_degree(self) -> int:
        return max(self.degrees)

    def element(self, coeffs) -> RingElement:
        coeffs = tuple(to_fraction(x) for x in coeffs)
        if len(coeffs) != len(self.names):
            raise ValidationError("wrong number of coefficients")
        return RingElement(self, coeffs)

    def basis(self, k: int) -> RingElement:
        return RingElement(self, tuple(Fraction(int(i == k)) for i in range(len(self.names))))

    def zero(self) -> RingElement:
        return RingElement(self, (Fraction(0),) * len(self.names))

    def one(self) -> RingElement:
        return self.basis(0)

    def scalar(self, value) -> RingElement:
        return self.one() * Fraction(value)

    def mul(self, x: RingElement, y: RingElement) -> RingElement:
        n = len(self.names)
        if (0, 0) not in self.mult:
            # unit multiplication is implicit
            pass
        out = [Fraction(0)] * n
        for i, a in enumerate(x.coeffs):
            if not a:
                continue
            for j, b in enumerate(y.coeffs):
                if not b:
                    continue
                if i == 0:
                    out[j] += a * b
                    continue
                if j == 0:
                    out[i] += a * b
                    continue
                vec = self.mult.get((i, j))
                if vec is None:
                    continue
                for k, ck in enumerate(vec):
                    if ck:
                        out[k] += a * b * ck
        return RingElement(self, tuple(out))

    def integrate(self, x: RingElement) -> Fraction:
        return sum((a * w for a, w in zip(x.coeffs, self.integral)), Fraction(0))

    def iota(self, x: RingElement) -> RingElement:
        """+1 on degrees divisible by 4, -1 on degrees 2 mod 4."""
        return RingElement(self, tuple(a if d % 4 == 0 else -a for a, d in zip(x.coeffs, self.degrees)))

    def lattice_elements(self) -> list[RingElement]:
        return [RingElement(self, v) for v in self.lattice]


@dataclass(frozen=True)
class Involution:
    """``iota``: +1 on degrees divisible by 4, -1 on degrees 2 mod 4."""

    model: CohomologyRingModel

    def __call__(self, x: RingElement) -> RingElement:
        return self.model.iota(x)


def cp_model(n: int) -> CohomologyRingModel:
    """Cohomology of complex projective n-space: basis ``h^0..h^n``, ``integral h^n = 1``,
    lattice generators ``ch O(k) = e^{kh}`` for ``k = 0..n``."""
    names = tuple("1" if i == 0 else f"h^{i}" for i in range(n + 1))
    degrees = tuple(2 * i for i in range(n + 1))
    mult = {}
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i + j <= n:
                mult[(i, j)] = tuple(int(k == i + j) for k in range(n + 1))
    integral = tuple(int(i == n) for i in range(n + 1))
    lattice = tuple(tuple(Fraction(k**i, math.factorial(i)) for i in range(n + 1)) for k in range(n + 1))
    return CohomologyRingModel(names, degrees, mult, integral, lattice, 2 * n)


def cp3_model() -> CohomologyRingModel:
    return cp_model(3)


def cp_pontryagin(model: CohomologyRingModel) -> list[RingElement]:
    """Pontryagin classes of complex projective space from ``c(T) = (1+h)^{n+1}``."""
    n = len(model.names) - 1
    h = model.basis(1)
    chern = [h**i * math.comb(n + 1, i) for i in range(1, n + 1)]
    return pontryagin(chern)


def evaluate_in_ring(poly: Poly, model: CohomologyRingModel, assignment: dict, weights: dict | None = None) -> RingElement:
    """Evaluate ``poly`` after substituting ring elements for its variables.

    ``assignment`` maps ``(family, index)`` (or names like ``"p1"``) to
    homogeneous ring elements of cohomological degree ``weight[family] * index``.
    Unassigned variables evaluate to zero.  Products above the top degree
    vanish through the model's multiplication.
    """
    weights = {**COHOMOLOGICAL_WEIGHT, **(weights or {})}
    resolved = {}
    for key, val in assignment.items():
        if isinstance(key, str):
            fam = key.rstrip("0123456789")
            key = (fam, int(key[len(fam):]))
        fam, idx = key
        if fam not in weights:
            raise ValidationError(f"no cohomological weight known for variable family {fam!r}")
        want = weights[fam] * idx
        if not val.is_homogeneous(want):
            raise ValidationError(f"{fam}{idx} must be assigned an element of degree {want}")
        resolved[key] = val
    for v in poly.variables():
        resolved.setdefault(v, model.zero())
    total = model.zero()
    for mono, coeff in poly.terms.items():
        term = model.scalar(coeff)
        for v, e in mono:
            for _ in range(e):
                term = term * resolved[v]
        total = total + term
    return total


def a_hat_class(model: CohomologyRingModel, pontryagin_classes: list) -> RingElement:
    """Total A-hat class ``1 + Q_1(p) + Q_2(p) + ...`` truncated at the model's top degree."""
    order = max(1, model.top_degree // 4)
    assignment = {("p", i + 1): x for i, x in enumerate(pontryagin_classes[:order])}
    total = model.one()
    for q in a_hat_series(order):
        total = total + evaluate_in_ring(q, model, assignment)
    return total


def _check_multiplier_degrees(model, a: RingElement):
    if model.iota(a) != a:
        raise ValidationError("multiplier must live in degrees divisible by 4")


def twisted_k_pairing(model: CohomologyRingModel, a: RingElement, x: RingElement, y: RingElement) -> Fraction:
    """``integral(a * x * iota(y))``: for Chern characters ``x = ch xi``, ``y = ch eta``
    this is ``integral(a * ch(xi (x) conj(eta)))``."""
    _check_multiplier_degrees(model, a)
    return model.integrate(a * x * model.iota(y))


def is_normalized_multiplier(model: CohomologyRingModel, a: RingElement, generators=None) -> bool:
    if model.iota(a) != a:
        return False
    if a.degree_part(0) != model.one():
        return False
    gens = model.lattice_elements() if generators is None else generators
    return all(twisted_k_pairing(model, a, x, y).denominator == 1 for x in gens for y in gens)


class UnimodularityReport(NamedTuple):
    gram: tuple
    unimodular: bool

    @property
    def det(self) -> Fraction:
        return exact_det(self.gram)


def unimodularity_report(model: CohomologyRingModel, a: RingElement, generators=None) -> UnimodularityReport:
    gens = model.lattice_elements() if generators is None else list(generators)
    if len(gens) % 2:
        raise ValidationError("a skew pairing on a lattice of odd rank is degenerate")
    if not is_normalized_multiplier(model, a, gens):
        raise ValidationError("not a normalized multiplier on these generators")
    gram = tuple(tuple(int(twisted_k_pairing(model, a, x, y)) for y in gens) for x in gens)
    return UnimodularityReport(gram, abs(exact_det(gram)) == 1)
