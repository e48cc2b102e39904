import cmath
import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from faberlab.conformal import (
    CornerData,
    LaurentMap,
    boundary_preimages,
    classify_point,
    exterior_inverse,
    extract_laurent,
    lemniscate_map,
    load_map_spec,
    parse_angle,
    two_corner_map,
)
from faberlab.errors import DomainError, NotOnBoundaryError


def test_lemniscate_value_at_two(lem3):
    assert lem3.map(2.0) == pytest.approx(9 ** (1 / 3), rel=1e-14)


def test_lemniscate_corners_and_constants():
    for s in (2, 3, 5):
        b = lemniscate_map(s)
        assert len(b.corners) == s
        for c in b.corners:
            assert c.lam == pytest.approx(1 / s)
            assert c.z == pytest.approx(0, abs=1e-12)
            analytic = s ** (1 / s) * cmath.exp(1j * math.pi * (s - 1) / s ** 2)
            assert abs(c.A) == pytest.approx(abs(analytic), rel=1e-10)


def test_lemniscate_rejects_bad_s():
    for s in (1, 2.5, 0):
        with pytest.raises(DomainError):
            lemniscate_map(s)


def test_two_corner_example(corner34):
    lmap = corner34.map
    assert lmap.leading.real == pytest.approx(1.082392, abs=1e-6)
    assert lmap.constant.real == pytest.approx(0.112085, abs=1e-6)
    zs = sorted((c.z for c in corner34.corners), key=lambda z: z.imag)
    assert zs[0] == pytest.approx(-0.58509 - 0.48864j, abs=1e-5)
    assert zs[1] == pytest.approx(-0.58509 + 0.48864j, abs=1e-5)
    assert corner34.u == 2


def test_two_corner_constants_match_local_quotient(corner34):
    # the local expansion runs in powers of h^(1/2), so the quotient at h carries an O(h^(1/2)) error
    h = 1e-10
    for c in corner34.corners:
        w = c.omega * (1 + h)
        quotient = (corner34.map(w) - c.z) / (h ** 0.5 * cmath.exp(0.5j * c.theta))
        assert abs(quotient - c.A) < 1e-4 * abs(c.A)


def test_two_corner_hat_constants(corner34):
    from faberlab.asymptotics import build_interior_model

    model = build_interior_model(corner34)
    assert model.A_hat[0] == pytest.approx(0.3311 + 0.4775j, abs=1e-4)
    assert model.A_hat[1] == pytest.approx(-0.5718 + 0.1036j, abs=1e-4)


def test_corner_consistency(corner34, lem3):
    for b in (corner34, lem3):
        for c in b.corners:
            assert abs(b.map(c.omega) - c.z) < 1e-10


def test_laurent_agrees_with_closed_form(corner34, lem3):
    assert corner34.map.agreement_residual() < 1e-13
    assert lem3.map.agreement_residual() < 1e-13


def test_extraction_is_idempotent(lem3):
    lmap = lem3.map
    again = extract_laurent(lmap.laurent, K=lmap.K)
    assert again.leading == pytest.approx(lmap.leading, abs=1e-13)
    assert again.constant == pytest.approx(lmap.constant, abs=1e-13)
    assert np.max(np.abs(again.tail[:64] - lmap.tail[:64])) < 1e-13


def test_exterior_inverse_examples(lem2):
    assert exterior_inverse(lem2, 5 ** 0.5) == pytest.approx(2.0, abs=1e-12)
    assert exterior_inverse(lem2, 10.0) == pytest.approx(99 ** 0.5, abs=1e-12)


@given(r=st.floats(1.05, 4.0), t=st.floats(0, 2 * math.pi))
@settings(max_examples=30, deadline=None)
def test_exterior_inverse_round_trip(corner34, r, t):
    w = r * cmath.exp(1j * t)
    assert abs(exterior_inverse(corner34, corner34.map(w)) - w) < 1e-9


@given(t=st.floats(0, 2 * math.pi))
@settings(max_examples=30, deadline=None)
def test_lemniscate_boundary_identity(lem3, t):
    z = lem3.map(cmath.exp(1j * t))
    assert abs(abs(z ** 3 - 1) - 1) < 1e-10


def test_exterior_inverse_rejects_interior(lem2):
    with pytest.raises(DomainError):
        exterior_inverse(lem2, 0.5)


def test_classify_point(lem2):
    assert classify_point(lem2, 0.5) == "interior"
    assert classify_point(lem2, 3.0) == "exterior"
    assert classify_point(lem2, 2 ** 0.5) == "boundary"
    labels = classify_point(lem2, np.array([0.5, 3.0]))
    assert list(labels) == ["interior", "exterior"]


def test_boundary_preimages_smooth_and_corner(lem2):
    pre = boundary_preimages(lem2, 2 ** 0.5)
    assert len(pre) == 1 and pre[0].w == pytest.approx(1.0, abs=1e-9) and pre[0].lam_hat == 1
    at_corner = boundary_preimages(lem2, 0.0)
    assert len(at_corner) == 2
    assert all(p.lam_hat == pytest.approx(0.5) for p in at_corner)
    with pytest.raises(NotOnBoundaryError):
        boundary_preimages(lem2, 0.5)


def test_corner_data_validation():
    with pytest.raises(DomainError):
        CornerData(theta=0.0, lam=2.5, z=0, A=1)
    with pytest.raises(DomainError):
        CornerData(theta=0.0, lam=0.5, z=0, A=0)
    with pytest.raises(DomainError):
        CornerData(theta=0.0, lam=0.5, z=0, A=1, r=1, m=1)
    assert CornerData(theta=0.0, lam=1.0, z=0, A=0).pair == (math.inf, 0)
    assert CornerData(theta=0.0, lam=1.0, z=0, A=1, r=2, m=3).pair == (3.0, 2)


def test_laurent_map_validation():
    with pytest.raises(DomainError):
        LaurentMap(0.0, 0.0, np.zeros(3))


def test_parse_angle():
    assert parse_angle("3/4pi") == Fraction(3, 4)
    assert parse_angle("1pi") == Fraction(1)
    assert parse_angle(2.5) == 2.5
    with pytest.raises(DomainError):
        parse_angle("three quarters")


def test_load_map_spec_inline_and_file(tmp_path):
    b = load_map_spec('{"kind": "two_corner", "theta1": "3/4pi"}')
    assert b.corners[0].theta_pi is not None
    path = tmp_path / "m.json"
    path.write_text(json.dumps({"kind": "lemniscate", "s": 3}))
    assert len(load_map_spec(str(path)).corners) == 3


def test_load_map_spec_laurent():
    spec = {"kind": "laurent", "leading": [1, 0], "constant": [0, 0], "tail": [[0.25, 0]],
            "corners": []}
    b = load_map_spec(json.dumps(spec))
    assert b.map(2.0) == pytest.approx(2.125)
    assert b.map.exact_tail


@pytest.mark.parametrize("text", ['{"kind": "nope"}', "{not json", '{"kind": "two_corner"}',
                                  '{"kind": "laurent", "tail": []}', "/no/such/file.json"])
def test_load_map_spec_errors(text):
    with pytest.raises(DomainError):
        load_map_spec(text)


def test_two_corner_rejects_bad_angle():
    with pytest.raises(DomainError):
        two_corner_map(Fraction(3, 2))
