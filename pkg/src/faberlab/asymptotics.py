"""Asymptotic models for F_n in the three regions: outside L, on L, and inside L.

Outside:  F_n(z) ~ phi(z)^n.
On L:     F_n(z) ~ sum over unit-circle preimages w_j of z of lam_j w_j^n,
          lam_j = 1 at smooth points and the exterior-angle ratio at corners.
Inside:   F_n(z) ~ C e^{i(n + Lam) Theta_1} alpha_{Lam-1, M}(n) H_n(z), with

              H_n(z) = sum_k Ahat_k e^{2 pi i n theta_k} / (z - z_k)

          summed over the corners with the smallest decay pair (Lam, M).
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .conformal import CornerData, MapBundle, boundary_preimages, exterior_inverse
from .errors import DomainError, PoleError, UnderflowError
from .faber import faber_lemniscate_closed
from .special import AlphaParams, alpha, gamma_binomial

POLE_TOL = 1e-12
ZERO_TOL = 1e-10


def corner_normalizer(corner: CornerData) -> float:
    """1/(Gamma(-lam) Gamma(lam)) for non-integer angles; (-1)^(Lam-1) m Lam with log terms."""
    lam = corner.lam
    if lam not in (1, 2):
        return 1.0 / (math.gamma(-lam) * math.gamma(lam))
    if corner.r is None:
        raise DomainError("corner with integer angle and no log terms is not relevant")
    big_lam = corner.r + lam
    return (-1) ** int(big_lam - 1) * corner.m * big_lam


def _unit_fraction(x: Fraction) -> Fraction:
    x = x % 1
    return Fraction(1) if x == 0 else x


@dataclass(frozen=True, eq=False)
class InteriorModel:
    bundle: MapBundle
    C1: float
    corners: tuple[CornerData, ...]
    A_hat: tuple[complex, ...]
    theta: tuple[float, ...]
    theta_exact: tuple[Fraction | None, ...]
    Lam: float
    M: int
    notes: tuple[str, ...] = field(default=())

    @property
    def u(self) -> int:
        return len(self.corners)

    @property
    def Theta1(self) -> float:
        return self.corners[0].theta

    @property
    def poles(self) -> tuple[complex, ...]:
        return tuple(c.z for c in self.corners)

    @property
    def period(self) -> int | None:
        """Common denominator q of the theta_k, when all are declared rational."""
        if any(t is None for t in self.theta_exact):
            return None
        return math.lcm(*(t.denominator for t in self.theta_exact))

    def phases(self, n: int) -> np.ndarray:
        out = np.empty(self.u, dtype=complex)
        for k, (t, tf) in enumerate(zip(self.theta, self.theta_exact)):
            if tf is not None:
                # reduce n theta_k mod 1 exactly so that H_{n+q} reproduces H_n bit for bit
                out[k] = cmath.exp(2j * math.pi * float((n * tf) % 1))
            else:
                out[k] = cmath.exp(2j * math.pi * ((n * t) % 1.0))
        return out


def build_interior_model(bundle: MapBundle) -> InteriorModel:
    minimal = bundle.minimal_corners
    if not minimal:
        raise DomainError("map has no relevant corner; the interior model is undefined")
    notes = []
    consts = [corner_normalizer(c) for c in minimal]
    if any(abs(c - consts[0]) > 1e-14 * abs(consts[0]) for c in consts):
        msg = "minimal corners carry different normalizing constants; the first one is used"
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
        notes.append(msg)
    big_lam, big_m = minimal[0].pair
    first = minimal[0]
    a_hat, theta, exact = [], [], []
    for c in minimal:
        a_hat.append(c.A * cmath.exp(1j * big_lam * (c.theta - first.theta)))
        t = ((c.theta - first.theta) / (2 * math.pi)) % 1.0
        theta.append(1.0 if t == 0 else t)
        if c.theta_pi is not None and first.theta_pi is not None:
            tf = _unit_fraction((c.theta_pi - first.theta_pi) / 2)
            exact.append(tf)
            theta[-1] = float(tf)
        else:
            exact.append(None)
    return InteriorModel(bundle, consts[0], minimal, tuple(a_hat), tuple(theta), tuple(exact),
                         float(big_lam), int(big_m), tuple(notes))


class RationalModel:
    """z -> sum_k weights_k / (z - poles_k)."""

    def __init__(self, weights, poles):
        self.weights = np.asarray(weights, dtype=complex)
        self.poles = np.asarray(poles, dtype=complex)
        # group equal poles: the model vanishes identically iff each group's weights cancel
        scale = max(float(np.abs(self.weights).sum()), 1e-300)
        self.is_zero = True
        for p in np.unique(self.poles):
            if abs(self.weights[self.poles == p].sum()) > ZERO_TOL * scale:
                self.is_zero = False
                break

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        if self.is_zero:
            return np.zeros(z.shape, dtype=complex) if z.ndim else 0j
        gap = z[..., None] - self.poles
        if np.min(np.abs(gap)) < POLE_TOL:
            raise PoleError(f"evaluation within {POLE_TOL} of a pole")
        out = (self.weights / gap).sum(axis=-1)
        return complex(out) if out.ndim == 0 else out


def interior_model(model: InteriorModel, n: int) -> RationalModel:
    """H_n as an evaluator; is_zero flags the identically vanishing case."""
    return RationalModel(np.array(model.A_hat) * model.phases(n), model.poles)


def interior_normalizer(model: InteriorModel, n: int) -> complex:
    if n < 2:
        raise DomainError("interior normalization needs n >= 2")
    a = alpha(AlphaParams(model.Lam - 1.0, model.M, int(n)))
    return model.C1 * cmath.exp(1j * (n + model.Lam) * model.Theta1) * a


def normalize_interior(model: InteriorModel, n: int, value):
    """F*_n = F_n / [C e^{i(n+Lam)Theta_1} alpha_{Lam-1,M}(n)]."""
    norm = interior_normalizer(model, n)
    if abs(norm) < 1e-300:
        raise UnderflowError(f"interior normalizer {abs(norm):.3e} underflows at n={n}")
    return np.asarray(value) / norm if np.ndim(value) else complex(value) / norm


def exterior_model(bundle: MapBundle, n: int, z) -> complex:
    """phi(z)^n for z outside L."""
    if n == 0:
        return 1.0 + 0j
    return exterior_inverse(bundle, z) ** int(n)


def exterior_with_correction(model: InteriorModel, n: int, z) -> complex:
    """phi(z)^n plus the interior-type term C e^{..} alpha(n) H_n(z)."""
    return exterior_model(model.bundle, n, z) + interior_normalizer(model, n) * interior_model(model, n)(z)


def boundary_model(bundle: MapBundle, n: int, z, tol: float = 1e-8) -> complex:
    """sum_j lam_j w_j^n over the unit-circle preimages w_j of z."""
    pre = boundary_preimages(bundle, z, tol=tol)
    return complex(sum(p.lam_hat * p.w ** int(n) for p in pre))


# ---------------------------------------------------------------------------
# Lemniscate subsequences


class SubsequenceModel(NamedTuple):
    leading: complex
    correction: complex
    bracket: complex


def _check_petal(s, l, z):
    if int(s) != s or s < 2:
        raise DomainError("s must be an integer >= 2")
    if not 1 <= l <= s - 1:
        raise DomainError("l must lie in 1..s-1")
    z = complex(z)
    if z == 0 or not abs(z ** s - 1) < 1:
        raise DomainError(f"{z} is not inside a petal of the lemniscate")
    return z


def lemniscate_subsequence_model(s: int, l: int, m: int, z, as_printed: bool = False) -> SubsequenceModel:
    """Model for the normalized subsequence (-1)^(m+1) binom(sm+l, l/s-1)^-1 F_{sm+l}(z).

    Default is the expansion derived from the closed-form coefficients:

        -s^(1-l/s) z^(l-s) [1 + r_m],
        r_m = (1/m)[(s-l)/(s z^s) - (s-1)(s-l)(2s-l)/(2 s^3)] + o(1/m).

    as_printed=True returns instead the variant with leading 1/(s^(l/s) z^(s-l))
    and bracket (s-1)(s-l)(2s-l)/(2s^3) - 1/(s z^s), which does not match the
    computed polynomials; it is kept so the discrepancy stays testable.
    """
    z = _check_petal(s, l, z)
    if m < 1:
        raise DomainError("m must be positive")
    cubic = (s - 1) * (s - l) * (2 * s - l) / (2 * s ** 3)
    if as_printed:
        leading = 1.0 / (s ** (l / s) * z ** (s - l))
        bracket = cubic - 1.0 / (s * z ** s)
    else:
        leading = -(s ** (1 - l / s)) * z ** (l - s)
        bracket = (s - l) / (s * z ** s) - cubic
    return SubsequenceModel(complex(leading), complex(bracket / m), complex(bracket))


def _gaussian_fraction(z):
    z = complex(z)
    return Fraction(z.real), Fraction(z.imag)


def lemniscate_normalized(s: int, l: int, m: int, z) -> complex:
    """(-1)^(m+1) binom(sm+l, l/s-1)^-1 F_{sm+l}(z), with F evaluated in exact rational arithmetic.

    The closed-form sum cancels heavily at large m, so the polynomial is
    evaluated on the exact binary value of z; only the final scaling is
    done in floating point.
    """
    z = _check_petal(s, l, z)
    coeffs = faber_lemniscate_closed(s, s * m + l, exact=True)
    re, im = _gaussian_fraction(z)
    acc_re, acc_im = Fraction(0), Fraction(0)
    for c in reversed(coeffs):
        acc_re, acc_im = acc_re * re - acc_im * im + c, acc_re * im + acc_im * re
    value = complex(float(acc_re), float(acc_im))
    norm = gamma_binomial(s * m + l, l / s - 1)
    return (-1) ** (m + 1) * value / norm


def subsequence_rate(s: int, l: int, m: int, z, as_printed: bool = False) -> complex:
    """m times the relative deviation of the normalized polynomial from the leading model."""
    model = lemniscate_subsequence_model(s, l, m, z, as_printed=as_printed)
    return m * (lemniscate_normalized(s, l, m, z) / model.leading - 1.0)


# ---------------------------------------------------------------------------
# Error-rate classes


@dataclass(frozen=True)
class RateClass:
    n_power: float  # decay n^-n_power
    log_power: float  # times (log n)^log_power
    label: str

    def __call__(self, n):
        return n ** (-self.n_power) * math.log(n) ** self.log_power


def error_rate_class(corner: CornerData) -> RateClass:
    """Decay class of the interior remainder contributed by one corner."""
    if not corner.relevant:
        raise DomainError("error rate is defined only for relevant corners")
    lam = corner.lam
    if lam == 0.5:
        return RateClass(1.0, 1.0, "n^-1 log n")
    if 0 < lam < 1:
        return RateClass(lam, 0.0, f"n^-{lam:g}")
    if 1 < lam < 2:
        return RateClass(1.0, 0.0, "n^-1")
    if corner.m >= 2:
        return RateClass(0.0, -1.0, "1/log n")
    p = math.floor((corner.r + 1) / lam) - 1
    return RateClass(1.0, float(p), f"n^-1 (log n)^{p}")
