import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from faberlab.asymptotics import build_interior_model, interior_model
from faberlab.conformal import two_corner_map
from faberlab.errors import A3ViolationError, DomainError, UnsupportedCaseError
from faberlab.faber import FaberPolynomial
from faberlab.zeros import (
    AccumulationProblem,
    CountingMeasure,
    accumulation_candidates,
    accumulation_locus_u2_irrational,
    accumulation_points_rational,
    accumulation_problem,
    equilibrium_mixed_moments,
    equilibrium_moments,
    faber_zeros,
    find_zeros,
    interior_zeros,
    measure_distance,
    taylor_shift,
    zero_free_check,
)


def _poly(ascending):
    return FaberPolynomial(len(ascending) - 1, np.array(ascending, dtype=complex))


def test_find_zeros_simple():
    nu = find_zeros(_poly([-1, 0, 1]))
    assert sorted(nu.points.real) == pytest.approx([-1, 1], abs=1e-14)
    assert nu.converged


def test_find_zeros_splits_exact_zero_roots():
    nu = find_zeros(_poly([0, 0, -4, 0, 1]))
    assert np.sum(nu.points == 0) == 2
    assert sorted(np.abs(nu.points[nu.points != 0])) == pytest.approx([2, 2])


def test_find_zeros_clustered_vieta():
    # (z^3 - 1)^4: every cube root of unity with multiplicity 4
    coeffs = np.polynomial.polynomial.polypow([-1, 0, 0, 1], 4)
    nu = find_zeros(_poly(coeffs))
    for k in range(1, 5):
        expected = 0.0 if k % 3 else 3 * 4 / 12  # mean of z^k
        assert abs(nu.moments(k)[k] - expected) < 1e-8


@given(st.lists(st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False), min_size=1, max_size=12))
@settings(max_examples=30, deadline=None)
def test_find_zeros_recovers_roots(roots):
    coeffs = np.polynomial.polynomial.polyfromroots(roots)
    nu = find_zeros(_poly(coeffs))
    scale = max(1.0, np.abs(coeffs).sum())
    assert np.max(np.abs(np.polynomial.polynomial.polyval(nu.points, coeffs))) < 1e-8 * scale


def test_taylor_shift():
    shifted = taylor_shift(np.array([1, 2, 3], dtype=complex), 1.0)
    # 1 + 2(x+1) + 3(x+1)^2 = 6 + 8x + 3x^2
    np.testing.assert_allclose(shifted, [6, 8, 3])


def test_faber_zeros_lemniscate(lem3):
    nu = faber_zeros(lem3, 100)
    assert nu.converged
    assert np.max(np.abs(nu.points ** 3 - 1)) < 1 + 1e-6
    assert np.sum(np.abs(nu.points) < 1e-12) == 1
    assert zero_free_check(nu, lem3) == []


def test_counting_measure_validation_and_json():
    with pytest.raises(DomainError):
        CountingMeasure([1, 2], 3)
    cm = CountingMeasure([1j, -1j], 2)
    assert cm.to_json()["zeros"] == [[0.0, 1.0], [0.0, -1.0]]
    np.testing.assert_allclose(cm.moments(2), [1, 0, -1])
    assert cm.mixed_moments(2)[1, 1] == pytest.approx(1)


def test_equilibrium_moments_lemniscate(lem2):
    # psi(w)^2 = w^2 + 1, so the moments are the constant terms of (w^2 + 1)^(k/2)
    mu = equilibrium_moments(lem2, 4)
    np.testing.assert_allclose(mu, [1, 0, 1, 0, 1], atol=1e-13)
    with pytest.raises(DomainError):
        equilibrium_moments(lem2, nodes=64)


def test_mixed_moments_consistent_with_holomorphic(corner34):
    hol = equilibrium_moments(corner34, 4)
    mixed = equilibrium_mixed_moments(corner34, 4)
    np.testing.assert_allclose(mixed[:, 0], hol, atol=1e-10)
    assert mixed[0, 0] == pytest.approx(1.0, abs=1e-12)


def test_measure_distance_modes(lem2):
    nu = CountingMeasure([1.0, -1.0], 2)
    assert measure_distance(nu, equilibrium_moments(lem2, 4), 4) < 1e-12
    assert measure_distance(nu, equilibrium_mixed_moments(lem2, 4), 4) > 0.1
    with pytest.warns(RuntimeWarning):
        measure_distance(CountingMeasure([1.0, 1e6], 2), equilibrium_moments(lem2, 2), 2)


def test_interior_zeros_margin(lem2):
    nu = CountingMeasure([0.5, 1.4, 3.0], 3)
    np.testing.assert_allclose(interior_zeros(nu, lem2), [0.5])


def test_accumulation_candidates_three_quarter(corner34):
    problem = accumulation_problem(corner34)
    assert problem.q == 4
    inside = accumulation_points_rational(problem)
    assert sorted(t.real for t in inside) == pytest.approx([-0.69105, -0.2706], abs=1e-4)
    model = build_interior_model(corner34)
    for cand in accumulation_candidates(problem):
        assert abs(interior_model(model, cand.residue)(cand.t)) < 1e-9


def test_accumulation_zeros_of_high_degree_near_candidate(corner34):
    nu = faber_zeros(corner34, 202)
    assert np.min(np.abs(nu.points + 0.2706)) < 1e-3


def test_apollonius_circle():
    problem = AccumulationProblem((Fraction(1), None), (2.0, 1.0), (0j, 1 + 0j))
    locus = accumulation_locus_u2_irrational(problem)
    assert locus.kind == "circle"
    assert complex(*locus.data["center"]) == pytest.approx(4 / 3)
    assert locus.data["radius"] == pytest.approx(2 / 3)
    for t in locus.sample(16):
        assert abs(2 * (t - 1)) == pytest.approx(abs(t), rel=1e-9)
    assert locus.contains(2.0)


def test_perpendicular_bisector_line():
    problem = AccumulationProblem((Fraction(1), None), (1.0, 1j), (-1j, 1j))
    locus = accumulation_locus_u2_irrational(problem)
    assert locus.kind == "line"
    assert locus.contains(5.0) and not locus.contains(0.5j)


def test_irrational_two_corner_locus_is_real_axis():
    b = two_corner_map(math.sqrt(2) * math.pi / 2)
    locus = accumulation_locus_u2_irrational(accumulation_problem(b))
    assert locus.kind == "line"
    assert locus.contains(-0.4) and locus.contains(0.2)
    assert locus.data["inside_samples"]


def test_accumulation_unsupported_and_degenerate(lem2):
    with pytest.raises(UnsupportedCaseError):
        accumulation_candidates(AccumulationProblem((Fraction(1), None), (1.0, 1.0), (0j, 1 + 0j)))
    with pytest.raises(UnsupportedCaseError):
        accumulation_locus_u2_irrational(AccumulationProblem((Fraction(1), Fraction(1, 2)), (1.0, 1.0), (0j, 1 + 0j)))
    with pytest.raises(A3ViolationError):
        accumulation_candidates(AccumulationProblem((Fraction(1), Fraction(1)), (1.0, -1.0), (0j, 0j)))
    with pytest.raises(DomainError):
        AccumulationProblem((Fraction(3, 2),), (1.0,), (0j,))
