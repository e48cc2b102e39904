"""Faber polynomials of an exterior map.

Expanding the generating function psi'(w)/(psi(w) - z) = sum F_n(z) w^-(n+1)
with psi(w) = c w + c0 + sum_j c_j w^-j and matching powers of w gives

    c F_k(z) = (z - c0) F_{k-1}(z) - sum_{j=1}^{k-1} c_j F_{k-1-j}(z) - (k-1) c_{k-1}

with F_0 = 1. The same recurrence is run on monomial coefficient vectors
(faber_sequence) and on point values (faber_values); the latter is the
numerically stable way to evaluate F_n at high degree, since Horner on the
monomial coefficients loses accuracy quickly once n is in the hundreds.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .conformal import LaurentMap, MapBundle, classify_point, exterior_inverse
from .errors import DomainError, IllConditionedContourError, PrecisionError

DEGREE_CAP = 300


def _as_map(obj) -> LaurentMap:
    return obj.map if isinstance(obj, MapBundle) else obj


@dataclass(frozen=True, eq=False)
class FaberPolynomial:
    n: int
    coeffs: np.ndarray  # ascending monomial coefficients, length n + 1
    source: LaurentMap | None = field(default=None, repr=False)

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=complex)
        if self.n < 0 or len(coeffs) != self.n + 1:
            raise DomainError(f"degree {self.n} needs {self.n + 1} coefficients, got {len(coeffs)}")
        if coeffs[-1] == 0:
            raise DomainError("leading coefficient of a Faber polynomial cannot vanish")
        object.__setattr__(self, "coeffs", coeffs)

    def __call__(self, z):
        return eval_faber(self, z)

    def values(self, z, derivative=False):
        """Values (and optionally derivatives) by the stable recurrence when the map is known."""
        if self.source is None:
            p = eval_faber(self, z)
            if not derivative:
                return p
            dp = np.polyval((np.arange(1, self.n + 1) * self.coeffs[1:])[::-1], np.asarray(z, dtype=complex))
            return p, dp
        return faber_value(self.source, self.n, z, derivative=derivative)

    def to_json(self) -> dict:
        return {"n": int(self.n), "coeffs": [[float(c.real), float(c.imag)] for c in self.coeffs]}


def _check_degree(lmap: LaurentMap, n_max: int, cap: int, force: bool):
    if n_max < 0:
        raise DomainError("degree must be non-negative")
    if n_max > cap:
        if not force:
            raise DomainError(f"degree {n_max} exceeds the cap {cap}; pass force=True to override")
        warnings.warn(f"degree {n_max} above the default cap {cap}; coefficients may be ill-conditioned",
                      RuntimeWarning, stacklevel=3)
    if not lmap.exact_tail and n_max - 1 > lmap.K:
        raise PrecisionError(n_max - 1, lmap.K)


def _tail(lmap: LaurentMap, length: int) -> np.ndarray:
    out = np.zeros(max(length, 0), dtype=complex)
    k = min(length, lmap.K)
    out[:k] = lmap.tail[:k]
    return out


def faber_sequence(bundle, n_max: int, cap: int = DEGREE_CAP, force: bool = False) -> list[FaberPolynomial]:
    """F_0, ..., F_{n_max} as monomial coefficient vectors."""
    lmap = _as_map(bundle)
    _check_degree(lmap, n_max, cap, force)
    c, c0 = lmap.leading, lmap.constant
    tail = _tail(lmap, n_max)
    coeffs = [np.ones(1, dtype=complex)]
    for k in range(1, n_max + 1):
        p = np.zeros(k + 1, dtype=complex)
        p[1:] += coeffs[k - 1]
        p[:-1] -= c0 * coeffs[k - 1]
        for j in range(1, k):
            p[: k - j] -= tail[j - 1] * coeffs[k - 1 - j]
        if k >= 2:
            p[0] -= (k - 1) * tail[k - 2]
        coeffs.append(p / c)
    return [FaberPolynomial(k, a, source=lmap) for k, a in enumerate(coeffs)]


def faber_values(bundle, n_max: int, z, derivative: bool = False, cap: int = DEGREE_CAP, force: bool = False):
    """F_0(z), ..., F_{n_max}(z) by the value recurrence; shape (n_max + 1, *z.shape).

    With derivative=True also returns F_k'(z) from the differentiated recurrence.
    """
    lmap = _as_map(bundle)
    _check_degree(lmap, n_max, cap, force)
    z = np.asarray(z, dtype=complex)
    c, c0 = lmap.leading, lmap.constant
    tail = _tail(lmap, n_max)
    shift = z - c0
    F = np.empty((n_max + 1,) + z.shape, dtype=complex)
    F[0] = 1.0
    dF = np.zeros_like(F) if derivative else None
    for k in range(1, n_max + 1):
        acc = shift * F[k - 1]
        if k >= 2:
            acc = acc - np.tensordot(tail[: k - 1], F[k - 2:: -1][: k - 1], axes=1) - (k - 1) * tail[k - 2]
        F[k] = acc / c
        if derivative:
            dacc = F[k - 1] + shift * dF[k - 1]
            if k >= 2:
                dacc = dacc - np.tensordot(tail[: k - 1], dF[k - 2:: -1][: k - 1], axes=1)
            dF[k] = dacc / c
    return (F, dF) if derivative else F


def faber_value(bundle, n: int, z, derivative: bool = False, force: bool = True):
    """F_n(z) alone (and F_n'(z)), via faber_values."""
    out = faber_values(bundle, n, z, derivative=derivative, force=force)
    if derivative:
        return out[0][n], out[1][n]
    return out[n]


def faber_lemniscate_closed(s: int, n: int, exact: bool = False):
    """Closed form for psi(w) = (w^s + 1)^{1/s}, n = s m + l:

        F_n(z) = sum_{j=0}^m (-1)^j binom(m + l/s, j) z^{s(m-j)+l}

    With exact=True returns the ascending coefficient list as Fractions.
    """
    if int(s) != s or s < 2:
        raise DomainError(f"lemniscate needs integer s >= 2, got {s}")
    if n < 0:
        raise DomainError("degree must be non-negative")
    m, l = divmod(int(n), int(s))
    top = m + Fraction(l, s)
    coeffs = [Fraction(0)] * (n + 1)
    b = Fraction(1)
    for j in range(m + 1):
        coeffs[s * (m - j) + l] = (-1) ** j * b
        b = b * (top - j) / (j + 1)
    if exact:
        return coeffs
    return FaberPolynomial(n, np.array([float(c) for c in coeffs], dtype=complex))


def eval_exact(coeffs, z: Fraction) -> Fraction:
    """Horner with rational arithmetic."""
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


def eval_faber(poly: FaberPolynomial, z):
    """Horner evaluation on the monomial coefficients."""
    out = np.polyval(poly.coeffs[::-1], np.asarray(z, dtype=complex))
    return complex(out) if np.ndim(out) == 0 else out


def _oracle_radius(n_max: int) -> float:
    # the integrand grows like R^{n+1}; keep that factor near 10 to limit rounding
    return float(np.clip(10.0 ** (1.0 / (n_max + 1)), 1.02, 1.5))


def contour_oracle(bundle: MapBundle, n, z, R: float | None = None, M: int | None = None):
    """F_n(z) from the trapezoid rule for (1/2 pi i) int_{|t|=R} t^n psi'(t) / (psi(t) - z) dt.

    For z outside the level curve psi(|t| = R) the residue at t = phi(z) is
    added back as phi(z)^n. The closed-form psi is used when present, so the
    result does not depend on the Laurent coefficients.
    """
    lmap = bundle.map
    scalar_n = np.ndim(n) == 0
    ns = np.atleast_1d(np.asarray(n, dtype=int))
    if ns.min() < 0:
        raise DomainError("degree must be non-negative")
    z = complex(z)
    n_max = int(ns.max())
    phi = None
    if classify_point(bundle, z) == "exterior":
        phi = exterior_inverse(bundle, z)
    auto_radius = R is None
    if auto_radius:
        R = _oracle_radius(n_max)
        if phi is not None and abs(abs(phi) / R - 1.0) < 0.05:
            R = abs(phi) / 1.06 if abs(phi) / 1.06 > 1.01 else abs(phi) * 1.06
    if not R > 1:
        raise DomainError("contour radius must exceed 1")
    nearest = R - 1.0
    if phi is not None:
        nearest = min(nearest, abs(abs(phi) - R))
    ratio = 1.0 + nearest / R
    needed = int(math.ceil(40.0 / math.log(ratio))) if ratio > 1 else 0
    M = max(M or 0, 512, 8 * (n_max + lmap.K), min(needed, 1 << 20))
    # extended precision: the summands reach R^{n+1} while the sum is O(|F_n|)
    two_pi = 8 * np.arctan(np.longdouble(1))
    theta = two_pi * np.arange(M, dtype=np.longdouble) / M
    unit = np.exp(1j * theta)
    t = np.longdouble(R) * unit
    denom = lmap(t) - z
    if np.min(np.abs(denom)) < 1e-8:
        raise IllConditionedContourError(f"z = {z} lies on the contour image for R = {R}; choose another R")
    g = lmap.derivative(t) / denom * t
    out = np.empty(len(ns), dtype=complex)
    for i, k in enumerate(ns):
        out[i] = complex(np.mean(g * unit ** int(k)) * np.longdouble(R) ** int(k))
        if phi is not None and abs(phi) > R:
            out[i] += phi ** int(k)
    return complex(out[0]) if scalar_n else out
