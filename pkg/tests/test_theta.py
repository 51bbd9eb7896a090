import itertools
from fractions import Fraction

import numpy as np
import pytest

from conftest import random_siegel
from oracles import theta_brute
from ppav.errors import NumericalError, ValidationError
from ppav.lattice import IntegralSkewForm
from ppav.siegel import SiegelPoint
from ppav.theta import (
    Characteristic,
    Multiplier,
    all_characteristics,
    characteristic_from_multiplier,
    enumerate_multipliers,
    multiplier_from_basis,
    multiplier_from_characteristic,
    pairwise_sum,
    parity,
    quasi_periodicity_defect,
    theta_eval,
    theta_series,
    truncation,
)

ODD = Characteristic.parse("1/2:1/2")


def test_characteristic_parsing():
    ch = Characteristic.parse("1/2,0:0,1/2")
    assert ch.u == (Fraction(1, 2), 0) and ch.v == (0, Fraction(1, 2))
    assert str(ch) == "1/2,0:0,1/2"
    assert Characteristic.parse("3/2:1") == Characteristic.parse("1/2:0")
    for bad in ("1/3:0", "1/2,0:0", "x:0", "1/2"):
        with pytest.raises(ValidationError):
            Characteristic.parse(bad)


def test_parity_counts():
    for g, odd in ((1, 1), (2, 6), (3, 28)):
        chs = all_characteristics(g)
        assert len(chs) == 4**g
        assert sum(parity(c) == "odd" for c in chs) == odd


def test_odd_theta_vanishes(rng):
    tol = 1e-12
    for tau in (1j, 1 + 2j, complex(rng.normal(), rng.uniform(0.3, 2))):
        assert abs(theta_eval(SiegelPoint([[tau]]), ODD, tol=tol)) <= tol
    Z = SiegelPoint(random_siegel(rng, 2))
    for ch in all_characteristics(2):
        if parity(ch) == "odd":
            assert abs(theta_eval(Z, ch, tol=tol)) <= tol


def test_brute_force_oracle(rng):
    Z = SiegelPoint([[1j]])
    assert abs(theta_eval(Z, tol=1e-14) - theta_brute([[1j]], 0.0, 0.0, np.zeros(1))) <= 1e-12
    for ch in all_characteristics(2):
        Zm = random_siegel(rng, 2, 0.5, 2.0)
        z = rng.uniform(-0.5, 0.5, 2) + 1j * rng.uniform(-0.2, 0.2, 2)
        u = np.array([float(x) for x in ch.u])
        v = np.array([float(x) for x in ch.v])
        ref = theta_brute(Zm, u, v, z, box=8)
        assert abs(theta_eval(SiegelPoint(Zm), ch, z, tol=1e-13) - ref) <= 1e-11


def test_diagonal_factorization(rng):
    for g in (2, 3):
        taus = [complex(rng.normal(), rng.uniform(0.4, 2)) for _ in range(g)]
        z = rng.uniform(-0.5, 0.5, g) + 1j * rng.uniform(-0.2, 0.2, g)
        ch = all_characteristics(g)[int(rng.integers(4**g))]
        whole = theta_eval(SiegelPoint(np.diag(taus)), ch, z, tol=1e-13)
        parts = np.prod([theta_eval(SiegelPoint([[t]]), Characteristic((ch.u[i],), (ch.v[i],)), z[i], tol=1e-14) for i, t in enumerate(taus)])
        assert abs(whole - parts) <= 1e-10


def test_quasi_periodicity(rng):
    tol = 1e-9
    chs = {g: all_characteristics(g) for g in (1, 2, 3)}
    for _ in range(30):
        g = int(rng.integers(1, 4))
        Z = SiegelPoint(random_siegel(rng, g, 0.3, 1.0))
        z = rng.uniform(-0.5, 0.5, g) + 1j * rng.uniform(-0.3, 0.3, g)
        m = rng.integers(-1, 2, g)
        ch = chs[g][int(rng.integers(len(chs[g])))]
        for which in ("integer", "period"):
            assert quasi_periodicity_defect(Z, ch, z, m, which, tol) <= 2 * tol


def test_quasi_periodicity_validation():
    Z = SiegelPoint([[1j]])
    assert quasi_periodicity_defect(Z, None, [0.1], [0]) == 0.0
    with pytest.raises(ValidationError):
        quasi_periodicity_defect(Z, None, [0.1], [0.5])
    with pytest.raises(ValidationError):
        quasi_periodicity_defect(Z, None, [0.1], [1], which="other")


def test_truncation_is_sound(rng):
    for g in (1, 2, 3):
        Z = SiegelPoint(random_siegel(rng, g))
        z = rng.uniform(-0.5, 0.5, g) + 1j * rng.uniform(-0.5, 0.5, g)
        for tol in (1e-4, 1e-8, 1e-12):
            coarse = theta_series(Z, None, z, tol)
            fine = theta_series(Z, None, z, 1e-14)
            assert fine.radius >= coarse.radius
            assert abs(coarse.value - fine.value) <= tol + 1e-14 * abs(fine.value) * fine.terms


def test_truncation_limits():
    with pytest.raises(ValidationError):
        truncation(SiegelPoint([[1j]]), [0], 1e-15)
    with pytest.raises(NumericalError):
        theta_series(SiegelPoint([[1e-4j]]), tol=1e-14)
    with pytest.raises(ValidationError):
        theta_eval(SiegelPoint([[1j]]), Characteristic.zero(2))
    with pytest.raises(ValidationError):
        theta_eval(SiegelPoint([[1j]]), None, [0, 0])


def test_pairwise_sum_matches_fsum(rng):
    import math

    x = rng.normal(size=1001)
    assert abs(pairwise_sum(x) - math.fsum(x)) <= 1e-12
    assert pairwise_sum(np.array([])) == 0


# multipliers


def _random_vec(rng, n):
    return [int(t) for t in rng.integers(-3, 4, n)]


def test_cocycle_law(rng):
    omega = IntegralSkewForm.standard(3)
    mults = [m for _, m, _ in enumerate_multipliers(3)]
    for _ in range(500):
        m = mults[int(rng.integers(len(mults)))]
        assert m.cocycle_defect(_random_vec(rng, 6), _random_vec(rng, 6)) == 0
    assert Multiplier(omega, (0,) * 6)([0] * 6) == 1


def test_cocycle_law_nonstandard_basis(rng):
    g = np.eye(4, dtype=np.int64)
    g[0] += 2 * g[3]
    g[2] -= g[1]
    w = np.array(IntegralSkewForm.standard(2).gram)
    omega = IntegralSkewForm(tuple(map(tuple, (g.T @ w @ g).tolist())))
    for eps in itertools.product((1, -1), repeat=4):
        m = multiplier_from_basis(eps, omega)
        assert m.basis_values() == eps
        for _ in range(20):
            assert m.cocycle_defect(_random_vec(rng, 4), _random_vec(rng, 4)) == 0
    with pytest.raises(ValidationError):
        characteristic_from_multiplier(multiplier_from_basis((1, 1, 1, 1), omega))


def test_enumeration_bijection():
    for g in (1, 2, 3):
        rows = enumerate_multipliers(g)
        assert len(rows) == 4**g
        assert len({m.theta for _, m, _ in rows}) == 4**g
        assert {str(c) for _, _, c in rows} == {str(c) for c in all_characteristics(g)}
        for eps, m, ch in rows:
            assert m.basis_values() == eps
            assert multiplier_from_characteristic(ch) == m


def test_enumeration_g1_table():
    table = {eps: str(ch) for eps, _, ch in enumerate_multipliers(1)}
    assert table == {(1, 1): "0:0", (1, -1): "1/2:0", (-1, 1): "0:1/2", (-1, -1): "1/2:1/2"}
    assert parity(Characteristic.parse(table[(-1, -1)])) == "odd"


def test_multiplier_validation():
    omega = IntegralSkewForm.standard(1)
    with pytest.raises(ValidationError):
        multiplier_from_basis((1, 0), omega)
    with pytest.raises(ValidationError):
        multiplier_from_basis((1,), omega)
    with pytest.raises(ValidationError):
        multiplier_from_basis((1, 1), IntegralSkewForm(((0, 2), (-2, 0))))
