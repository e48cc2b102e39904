import cmath
import math

import numpy as np
import pytest

from faberlab.asymptotics import (
    RationalModel,
    boundary_model,
    build_interior_model,
    corner_normalizer,
    error_rate_class,
    exterior_model,
    exterior_with_correction,
    interior_model,
    lemniscate_normalized,
    lemniscate_subsequence_model,
    normalize_interior,
    subsequence_rate,
)
from faberlab.conformal import CornerData, lemniscate_map
from faberlab.errors import DomainError, PoleError
from faberlab.faber import faber_lemniscate_closed, faber_value


def test_half_angle_normalizer_is_minus_one_over_two_pi():
    c = CornerData(theta=1.0, lam=0.5, z=0, A=1)
    assert corner_normalizer(c) == pytest.approx(-1 / (2 * math.pi), rel=1e-14)


def test_log_corner_normalizer():
    c = CornerData(theta=1.0, lam=1.0, z=0, A=1, r=2, m=3)
    # (-1)^(Lam - 1) m Lam with Lam = 3
    assert corner_normalizer(c) == 9


def test_interior_model_structure(corner34):
    model = build_interior_model(corner34)
    assert model.u == 2
    assert model.Lam == 0.5 and model.M == 0
    assert model.C1 == pytest.approx(-1 / (2 * math.pi))
    assert model.period == 4
    np.testing.assert_array_equal(model.phases(3), model.phases(7))


@pytest.mark.parametrize("s", [2, 3, 4, 5])
def test_lemniscate_interior_model_vanishes_off_one_residue(s):
    model = build_interior_model(lemniscate_map(s))
    for n in range(2, 4 * s):
        H = interior_model(model, n)
        assert H.is_zero == (n % s != s - 1)
        if not H.is_zero:
            assert abs(H(0.3)) > 1e-3


def test_interior_convergence_improves(corner34):
    model = build_interior_model(corner34)
    pts = np.array([-0.2 + 0.1j, 0.1 - 0.2j, -0.4])
    errs = []
    for n in (50, 200):
        F = faber_value(corner34, n, pts)
        H = interior_model(model, n)(pts)
        errs.append(np.max(np.abs(normalize_interior(model, n, F) - H)))
    assert errs[1] < errs[0]


def test_exterior_models(corner34):
    z = 1.5 + 0.5j
    n = 40
    F = faber_value(corner34, n, z)
    plain = exterior_model(corner34, n, z)
    corrected = exterior_with_correction(build_interior_model(corner34), n, z)
    assert abs(corrected - F) < abs(plain - F)
    assert abs(F / plain - 1) < 1e-3


def test_boundary_model_at_lemniscate_node(lem2):
    assert boundary_model(lem2, 5, 0.0) == pytest.approx(0, abs=1e-12)
    assert boundary_model(lem2, 4, 2 ** 0.5) == pytest.approx(1.0, abs=1e-9)


def test_rational_model_pole_and_zero():
    H = RationalModel([1.0, -1.0], [0.5, 0.5])
    assert H.is_zero and H(0.5) == 0
    H = RationalModel([1.0, 2.0], [0.0, 1.0])
    assert H(2.0) == pytest.approx(0.5 + 2.0)
    with pytest.raises(PoleError):
        H(1.0)


def test_subsequence_model_forms():
    model = lemniscate_subsequence_model(3, 1, 10, 0.5)
    assert model.leading == pytest.approx(-(3 ** (2 / 3)) * 0.5 ** -2)
    assert model.correction == pytest.approx(model.bracket / 10)
    printed = lemniscate_subsequence_model(3, 1, 10, 0.5, as_printed=True)
    assert printed.leading != pytest.approx(model.leading)


def test_subsequence_rate_approaches_bracket():
    bracket = lemniscate_subsequence_model(3, 1, 1, 0.5).bracket
    r100, r200 = subsequence_rate(3, 1, 100, 0.5), subsequence_rate(3, 1, 200, 0.5)
    assert abs(r200 - bracket) < abs(r100 - bracket)
    assert abs(r200 - bracket) < 0.1 * abs(bracket)


def test_lemniscate_normalized_small_m_matches_float():
    s, l, m, z = 2, 1, 3, 0.4
    F = faber_lemniscate_closed(s, s * m + l)(z)
    from faberlab.special import gamma_binomial

    expected = (-1) ** (m + 1) * F / gamma_binomial(s * m + l, l / s - 1)
    assert lemniscate_normalized(s, l, m, z) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("args", [(3, 0, 1, 0.5), (3, 3, 1, 0.5), (3, 1, 1, 0.0), (3, 1, 1, 2.0), (1, 1, 1, 0.5)])
def test_subsequence_domain(args):
    with pytest.raises(DomainError):
        lemniscate_subsequence_model(*args)


def test_error_rate_classes():
    assert error_rate_class(CornerData(theta=0, lam=0.5, z=0, A=1)).label == "n^-1 log n"
    assert error_rate_class(CornerData(theta=0, lam=1 / 3, z=0, A=1)).n_power == pytest.approx(1 / 3)
    assert error_rate_class(CornerData(theta=0, lam=1.5, z=0, A=1)).n_power == 1.0
    assert error_rate_class(CornerData(theta=0, lam=1.0, z=0, A=1, r=1, m=2)).log_power == -1.0
    with pytest.raises(DomainError):
        error_rate_class(CornerData(theta=0, lam=1.0, z=0, A=0))


def test_interior_model_needs_a_corner():
    from faberlab.conformal import LaurentMap, MapBundle

    b = MapBundle(LaurentMap(1.0, 0.0, np.array([1.0]), exact_tail=True), (), kind="laurent", params={})
    with pytest.raises(DomainError):
        build_interior_model(b)
