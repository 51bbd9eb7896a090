import numpy as np
import pytest
import sympy as sp

from conftest import random_siegel, random_spd, random_symplectic
from ppav.errors import ValidationError
from ppav.forms import MetricForm, SkewForm, induced_metric, is_coherent, standard_complex_structure, tame
from ppav.siegel import (
    SiegelPoint,
    SymplecticMatrix,
    dictionary_report,
    is_symplectic,
    moebius_act,
    pair_to_siegel,
    period_transform,
    siegel_to_structure,
)


def test_siegel_point_validation():
    with pytest.raises(ValidationError):
        SiegelPoint(np.array([[1j, 1], [0, 1j]]))
    with pytest.raises(ValidationError):
        SiegelPoint(np.array([[-1j]]))


def test_is_symplectic_examples():
    assert is_symplectic(np.eye(4))
    assert is_symplectic(standard_complex_structure(2))
    assert not is_symplectic(np.diag([2.0, 1, 1, 1]))


def test_moebius_identity_exact(rng):
    Z = SiegelPoint(random_siegel(rng, 3))
    W = moebius_act(SymplecticMatrix(np.eye(6)), Z)
    assert np.array_equal(W.Z, Z.Z)


def test_moebius_g1_matches_scalar_formula():
    # scalar oracle: (a + z c)^{-1} (b + z d)
    T = np.array([[0.0, 1.0], [-1.0, 0.0]])
    z = 0.3 + 1.7j
    W = moebius_act(SymplecticMatrix(T), SiegelPoint(np.array([[z]])))
    assert W.Z[0, 0] == pytest.approx(1 / (-z))
    assert W.Z[0, 0].imag > 0


def test_moebius_preserves_siegel_space_and_composes_on_the_right(rng):
    for g in (1, 2, 3):
        for _ in range(10):
            Z = SiegelPoint(random_siegel(rng, g))
            m1, m2 = random_symplectic(rng, g, 0.3), random_symplectic(rng, g, 0.3)
            T1, T2 = SymplecticMatrix(m1, 1e-8), SymplecticMatrix(m2, 1e-8)
            W = moebius_act(T1, Z)
            assert np.linalg.eigvalsh(W.Y)[0] > 0
            lhs = moebius_act(SymplecticMatrix(m1 @ m2, 1e-7), Z).Z
            rhs = moebius_act(T2, moebius_act(T1, Z)).Z
            assert np.linalg.norm(lhs - rhs) <= 1e-8 * max(1.0, np.linalg.norm(rhs))


def test_period_transform_moves_base_point(rng):
    Z = SiegelPoint(random_siegel(rng, 3))
    T = period_transform(Z)
    assert is_symplectic(T)
    W = moebius_act(SymplecticMatrix(T), SiegelPoint.base_point(3))
    assert np.allclose(W.Z, Z.Z, atol=1e-12)


def test_base_point_structure():
    for g in (1, 2, 4):
        J, b = siegel_to_structure(SiegelPoint.base_point(g))
        assert np.allclose(J.matrix, standard_complex_structure(g), atol=1e-12)
        assert np.allclose(b.gram, np.eye(2 * g), atol=1e-12)


def test_structure_is_tamed_and_coherent(rng):
    Z = SiegelPoint(random_siegel(rng, 3))
    J, b = siegel_to_structure(Z)
    T = period_transform(Z)
    assert np.allclose(b.gram, T.T @ T, rtol=1e-10, atol=1e-10)
    w0 = SkewForm.standard(3)
    assert np.allclose(induced_metric(w0, J).gram, b.gram, atol=1e-10)
    assert is_coherent(b, w0) == pytest.approx(1.0, rel=1e-9)


def test_g1_closed_form_against_sympy():
    x, y = sp.Rational(3, 10), sp.Rational(7, 5)
    J, b = siegel_to_structure(SiegelPoint(np.array([[float(x) + 1j * float(y)]])))
    # direct symbolic T^-1 J0 T
    t = sp.Matrix([[1 / sp.sqrt(y), x / sp.sqrt(y)], [0, sp.sqrt(y)]])
    j0 = sp.Matrix([[0, 1], [-1, 0]])
    ref = np.array((t.inv() * j0 * t).evalf(), dtype=float)
    assert np.allclose(J.matrix, ref, atol=1e-12)
    printed = np.array([[-x / y, -y - x**2 / y], [1 / y, x / y]], dtype=float)
    assert np.allclose(J.matrix, -printed, atol=1e-12)


def test_pair_to_siegel_examples(rng):
    Z = pair_to_siegel(MetricForm(np.eye(4)))
    assert np.allclose(Z.Z, 1j * np.eye(2), atol=1e-12)
    b = MetricForm(random_spd(rng, 4))
    Z = pair_to_siegel(b)
    J1 = tame(b, SkewForm.standard(2)).matrix
    J2, b2 = siegel_to_structure(Z)
    assert np.allclose(J1, J2.matrix, atol=1e-8)
    assert not np.allclose(b2.gram, b.gram, atol=1e-3)


def test_round_trip_recovers_Z(rng):
    for g in (1, 2, 3, 4):
        Z = SiegelPoint(random_siegel(rng, g))
        _, b = siegel_to_structure(Z)
        assert np.allclose(pair_to_siegel(b).Z, Z.Z, atol=1e-8)


def test_dictionary_report(rng):
    rep = dictionary_report(SiegelPoint(random_siegel(rng, 2)))
    assert rep["symbolic_g1"]["J_printed_equals_minus_direct"]
    assert not rep["symbolic_g1"]["b_printed_equals_direct"]
    num = rep["numeric"]
    assert num["J_printed_plus_direct"] < 1e-10
    assert num["b_top_left_direct_minus_Yinv"] < 1e-10
    assert num["direct_J_tamed_by_standard_form"] and not num["printed_J_tamed_by_standard_form"]
