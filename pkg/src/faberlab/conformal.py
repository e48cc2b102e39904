"""Exterior conformal maps psi: {|w| > 1} -> complement of a compact set E.

A map is stored as a truncated Laurent series

    psi(w) = c w + c0 + sum_{j=1}^K c_j w^-j

optionally backed by a closed-form evaluator for psi and psi'. Corner data
(preimage on the unit circle, exterior angle, local expansion constant) sits
next to the series in a MapBundle. The boundary curve L = psi(|w| = 1) is
sampled once per bundle and reused for interior/exterior classification.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, NamedTuple

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import binom

from .errors import (
    ConvergenceError,
    DomainError,
    ExtractionError,
    NotOnBoundaryError,
    PrecisionError,
)

TWO_PI = 2.0 * math.pi
BOUNDARY_SAMPLES = 1 << 14
AGREEMENT_TOL = 1e-10
CORNER_TOL = 1e-10


def as_complex(w):
    """Complex array, keeping extended precision when the input carries it."""
    w = np.asarray(w)
    if w.dtype == np.clongdouble or w.dtype == np.longdouble:
        return w.astype(np.clongdouble)
    return w.astype(complex)


class ClosedForm(NamedTuple):
    psi: Callable
    dpsi: Callable


@dataclass(frozen=True, eq=False)
class LaurentMap:
    leading: complex
    constant: complex
    tail: np.ndarray
    closed_form: ClosedForm | None = None
    # tail holds every nonzero coefficient (finite Laurent polynomial or exact series)
    exact_tail: bool = False

    def __post_init__(self):
        if self.leading == 0:
            raise DomainError("leading Laurent coefficient must be nonzero")
        object.__setattr__(self, "leading", complex(self.leading))
        object.__setattr__(self, "constant", complex(self.constant))
        object.__setattr__(self, "tail", np.asarray(self.tail, dtype=complex).ravel())

    @property
    def K(self) -> int:
        return len(self.tail)

    def coefficient(self, j: int) -> complex:
        """Coefficient of w^-j for j >= 1."""
        if j <= self.K:
            return self.tail[j - 1]
        if self.exact_tail:
            return 0j
        raise PrecisionError(j, self.K)

    def laurent(self, w):
        w = as_complex(w)
        u = 1.0 / w
        body = np.polyval(self.tail[::-1], u) * u if self.K else 0.0
        return self.leading * w + self.constant + body

    def laurent_derivative(self, w):
        w = as_complex(w)
        u = 1.0 / w
        if not self.K:
            return np.full(w.shape, self.leading)
        j = np.arange(1, self.K + 1)
        return self.leading - u * u * np.polyval((j * self.tail)[::-1], u)

    def __call__(self, w):
        if self.closed_form is not None:
            return self.closed_form.psi(as_complex(w))
        return self.laurent(w)

    def derivative(self, w):
        if self.closed_form is not None:
            return self.closed_form.dpsi(as_complex(w))
        return self.laurent_derivative(w)

    def agreement_residual(self, radius=2.0, samples=256):
        """Max relative gap between Laurent and closed-form values on |w| = radius."""
        if self.closed_form is None:
            return 0.0
        w = radius * np.exp(1j * np.linspace(0, TWO_PI, samples, endpoint=False))
        exact = self.closed_form.psi(w)
        return float(np.max(np.abs(self.laurent(w) - exact) / np.abs(exact)))


@dataclass(frozen=True)
class CornerData:
    theta: float
    lam: float
    z: complex
    A: complex
    r: int | None = None
    m: int | None = None
    # theta / pi as an exact rational, when the angle is declared rational
    theta_pi: Fraction | None = None

    def __post_init__(self):
        if not self.lam > 0 or self.lam > 2:
            raise DomainError(f"corner exterior angle lambda must lie in (0, 2], got {self.lam}")
        theta = float(self.theta) % TWO_PI
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "z", complex(self.z))
        object.__setattr__(self, "A", complex(self.A))
        if (self.r is None) != (self.m is None):
            raise DomainError("r and m must be given together")
        if self.r is not None:
            if self.lam not in (1, 2):
                raise DomainError("log data (r, m) only applies when lambda is 1 or 2")
            if self.r < 1 or self.m < 1:
                raise DomainError("r and m must be positive integers")
        if self.relevant and self.A == 0:
            raise DomainError("relevant corners need a nonzero expansion constant A")

    @property
    def omega(self) -> complex:
        return complex(np.exp(1j * self.theta))

    @property
    def relevant(self) -> bool:
        return self.lam not in (1, 2) or self.r is not None

    @property
    def pair(self) -> tuple[float, int]:
        if self.lam not in (1, 2):
            return (float(self.lam), 0)
        if self.r is None:
            return (math.inf, 0)
        return (self.r + self.lam, self.m - 1)


def _pair_key(corner: CornerData):
    big_lam, big_m = corner.pair
    return (big_lam, -big_m)


@dataclass(frozen=True, eq=False)
class MapBundle:
    map: LaurentMap
    corners: tuple[CornerData, ...]
    kind: str = "laurent"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        corners = tuple(sorted(self.corners, key=_pair_key))
        object.__setattr__(self, "corners", corners)
        for c in corners:
            zc = complex(self.map(np.array([c.omega]))[0])
            if abs(zc - c.z) > CORNER_TOL * max(1.0, abs(c.z)):
                raise DomainError(f"corner at theta={c.theta:.6f}: psi(omega)={zc} but z={c.z}")

    @property
    def relevant_corners(self) -> tuple[CornerData, ...]:
        return tuple(c for c in self.corners if c.relevant)

    @property
    def leading_pair(self) -> tuple[float, int] | None:
        rel = self.relevant_corners
        return rel[0].pair if rel else None

    @property
    def u(self) -> int:
        rel = self.relevant_corners
        if not rel:
            return 0
        return sum(1 for c in rel if _pair_key(c) == _pair_key(rel[0]))

    @property
    def minimal_corners(self) -> tuple[CornerData, ...]:
        return self.relevant_corners[: self.u]

    @cached_property
    def boundary_curve(self) -> np.ndarray:
        """Closed polyline psi(e^{i theta}) with the corner images inserted exactly."""
        theta = np.linspace(0, TWO_PI, BOUNDARY_SAMPLES, endpoint=False)
        corner_theta = np.array([c.theta for c in self.corners])
        theta = np.unique(np.concatenate([theta, corner_theta]))
        pts = np.asarray(self.map(np.exp(1j * theta)), dtype=complex)
        for c in self.corners:
            pts[np.argmin(np.abs(theta - c.theta))] = c.z
        return np.append(pts, pts[0])

    @cached_property
    def _seed_grid(self):
        radii = 1.0 + np.geomspace(2e-3, 4.0, 40)
        angles = np.linspace(0, TWO_PI, 256, endpoint=False)
        w = (radii[:, None] * np.exp(1j * angles)[None, :]).ravel()
        return w, np.asarray(self.map(w), dtype=complex)


# ---------------------------------------------------------------------------
# Point classification relative to L


def winding_numbers(curve: np.ndarray, z) -> np.ndarray:
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    out = np.empty(z.shape, dtype=int)
    for idx in range(0, z.size, 64):
        chunk = z.ravel()[idx: idx + 64]
        rel = curve[:, None] - chunk[None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            turn = np.nan_to_num(np.angle(rel[1:] / rel[:-1])).sum(axis=0)
        out.ravel()[idx: idx + 64] = np.rint(turn / TWO_PI).astype(int)
    return out


def polyline_distance(curve: np.ndarray, z) -> np.ndarray:
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    a, b = curve[:-1], curve[1:]
    d = b - a
    dd = np.maximum(np.abs(d) ** 2, 1e-300)
    out = np.empty(z.shape)
    for idx in range(0, z.size, 64):
        chunk = z.ravel()[idx: idx + 64]
        rel = chunk[None, :] - a[:, None]
        t = np.clip((rel * np.conj(d)[:, None]).real / dd[:, None], 0.0, 1.0)
        out.ravel()[idx: idx + 64] = np.abs(rel - t * d[:, None]).min(axis=0)
    return out


def distance_to_boundary(bundle: MapBundle, z):
    """Euclidean distance from z to the sampled boundary curve L."""
    out = polyline_distance(bundle.boundary_curve, z)
    return float(out[0]) if np.ndim(z) == 0 else out


def classify_point(bundle: MapBundle, z, boundary_tol=1e-6):
    """'interior' (inside a bounded component of the complement of L), 'exterior' or 'boundary'."""
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    dist = polyline_distance(bundle.boundary_curve, z)
    wind = winding_numbers(bundle.boundary_curve, z)
    labels = np.where(dist < boundary_tol, "boundary", np.where(wind != 0, "interior", "exterior"))
    return str(labels[0]) if scalar else labels


# ---------------------------------------------------------------------------
# Preimages


class BoundaryPreimage(NamedTuple):
    w: complex
    lam_hat: float
    corner: int | None


def _polish_angle(lmap, t, z, steps=4):
    """Gauss-Newton on theta -> psi(e^{i theta}) - z; stops if the derivative is unusable."""
    for _ in range(steps):
        w = np.exp(1j * t)
        f = complex(lmap(w)) - z
        df = complex(1j * w * lmap.derivative(w))
        if not np.isfinite(df) or df == 0:
            break
        step = (np.conj(df) * f).real / abs(df) ** 2
        if abs(step) > 1e-3:
            break
        t -= step
    return t


def boundary_preimages(bundle: MapBundle, z, tol=1e-8, samples=8192):
    """All w on the unit circle with psi(w) = z, with their local weights.

    Corners contribute weight lambda_k; regular boundary points weight 1.
    """
    z = complex(z)
    samples = max(int(samples), 4096)
    found: list[BoundaryPreimage] = []
    for idx, c in enumerate(bundle.corners):
        if abs(c.z - z) <= tol:
            found.append(BoundaryPreimage(c.omega, c.lam, idx))

    theta = np.linspace(0, TWO_PI, samples, endpoint=False)
    vals = np.abs(np.asarray(bundle.map(np.exp(1j * theta))) - z)
    step = np.abs(np.diff(np.append(np.asarray(bundle.map(np.exp(1j * theta))), bundle.map(1.0 + 0j))))
    local = np.maximum(step, np.roll(step, 1))
    is_min = (vals <= np.roll(vals, 1)) & (vals <= np.roll(vals, -1)) & (vals <= 2 * local + tol)
    h = TWO_PI / samples

    def gap(t):
        return abs(complex(bundle.map(np.exp(1j * t))) - z)

    for i in np.flatnonzero(is_min):
        res = minimize_scalar(gap, bounds=(theta[i] - h, theta[i] + h), method="bounded",
                              options={"xatol": 1e-15})
        t = _polish_angle(bundle.map, float(res.x), z) % TWO_PI
        if gap(t) > tol:
            continue
        w = complex(np.exp(1j * t))
        if any(abs(w - p.w) < max(1e3 * tol, 1e-6) for p in found):
            continue
        found.append(BoundaryPreimage(w, 1.0, None))
    if not found:
        raise NotOnBoundaryError(f"{z} has no preimage on the unit circle within {tol}")
    return found


def exterior_inverse(bundle: MapBundle, z, tol=1e-12, max_iter=80):
    """The unique w with |w| > 1 and psi(w) = z, for z outside L."""
    z = complex(z)
    label = classify_point(bundle, z)
    if label != "exterior":
        raise DomainError(f"{z} is {label} to L; no exterior preimage")
    lmap = bundle.map
    target = tol * (1.0 + abs(z))
    seeds = []
    guess = (z - lmap.constant) / lmap.leading
    if abs(guess) > 1.5:
        seeds.append(guess)
    grid_w, grid_psi = bundle._seed_grid
    order = np.argsort(np.abs(grid_psi - z))[:3]
    seeds.extend(complex(grid_w[i]) for i in order)

    for w in seeds:
        f = complex(lmap(w)) - z
        for _ in range(max_iter):
            if abs(f) <= target:
                return w
            step = f / complex(lmap.derivative(w))
            for _ in range(40):
                w_new = w - step
                if abs(w_new) > 1.0:
                    f_new = complex(lmap(w_new)) - z
                    if abs(f_new) < abs(f):
                        break
                step *= 0.5
            else:
                break
            w, f = w_new, f_new
        if abs(f) <= target:
            return w
    raise ConvergenceError(f"Newton iteration for the exterior preimage of {z} did not converge")


# ---------------------------------------------------------------------------
# Coefficient extraction


def extract_laurent(evaluator, K=256, R=None, M=None, check=True):
    """Laurent coefficients of an analytic map by the discrete contour integral on |w| = R.

    `evaluator` is a ClosedForm, a LaurentMap or any vectorized callable.
    The default radius exp(2/K) keeps the rounding growth R^K bounded by e^2.
    """
    if K < 1:
        raise DomainError("truncation K must be positive")
    if isinstance(evaluator, LaurentMap):
        psi, closed = evaluator, evaluator.closed_form
    elif isinstance(evaluator, ClosedForm):
        psi, closed = evaluator.psi, evaluator
    else:
        psi, closed = evaluator, None
    if R is None:
        R = min(1.5, math.exp(2.0 / K))
    if not R > 1:
        raise DomainError("sampling radius must exceed 1")
    M = max(M or 0, 32 * K, 512)
    theta = TWO_PI * np.arange(M) / M
    coeff = np.fft.fft(np.asarray(psi(R * np.exp(1j * theta)), dtype=complex)) / M
    leading = coeff[1] / R
    constant = coeff[0]
    j = np.arange(1, K + 1)
    tail = coeff[M - j] * R ** j
    out = LaurentMap(leading, constant, tail, closed_form=closed)
    if check and closed is not None:
        res = out.agreement_residual()
        if res > AGREEMENT_TOL:
            raise ExtractionError(res)
    return out


# ---------------------------------------------------------------------------
# Corner expansion constants


def corner_constant(psi, theta, z_k, lam, h0=0.03, levels=8):
    """lim (psi(w) - z_k) / (w - omega)^lam along the outward radius at omega = e^{i theta}.

    The branch of (w - omega)^lam takes arg(w - omega) = theta. For the built-in
    corners the quotient is analytic in h = |w - omega|, so Neville
    extrapolation to h = 0 on a halving ladder removes the corrections.
    """
    omega = np.exp(1j * theta)
    h = h0 * 0.5 ** np.arange(levels)
    w = omega * (1.0 + h)
    table = (np.asarray(psi(w), dtype=complex) - z_k) / (h ** lam * np.exp(1j * lam * theta))
    for k in range(1, levels):
        table[: levels - k] = (h[k:] * table[: levels - k] - h[: levels - k] * table[1: levels - k + 1]) / (
            h[k:] - h[: levels - k]
        )
    return complex(table[0])


# ---------------------------------------------------------------------------
# Built-in families


def _snap(x):
    # radicands that vanish at a corner come out as rounding noise; a fractional
    # power would amplify that noise to eps^lambda, so treat it as exact zero
    x = as_complex(x)
    return np.where(np.abs(x) < 512 * np.finfo(float).eps, 0, x).astype(x.dtype)


def lemniscate_map(s: int, K: int = 256) -> MapBundle:
    """psi(w) = (w^s + 1)^{1/s}, the exterior map of the lemniscate |z^s - 1| = 1."""
    if int(s) != s or s < 2:
        raise DomainError(f"lemniscate needs integer s >= 2, got {s}")
    s = int(s)
    p = 1.0 / s

    def radicand(w):
        return _snap(1.0 + w ** (-s))

    def psi(w):
        return w * radicand(w) ** p

    def dpsi(w):
        with np.errstate(divide="ignore", invalid="ignore"):
            return radicand(w) ** (p - 1.0)

    closed = ClosedForm(psi, dpsi)
    tail = np.zeros(K, dtype=complex)
    for i in range(1, K // s + 2):
        if s * i - 1 <= K:
            tail[s * i - 2] = binom(p, i)
    lmap = LaurentMap(1.0, 0.0, tail, closed_form=closed)
    corners = []
    for k in range(1, s + 1):
        frac = Fraction(2 * k - 1, s)
        theta = math.pi * float(frac)
        A = corner_constant(psi, theta, 0.0, p)
        corners.append(CornerData(theta=theta, lam=p, z=0.0, A=A, theta_pi=frac))
    return MapBundle(lmap, tuple(corners), kind="lemniscate", params={"s": s})


def _two_corner_series(omega, K):
    """Exact Laurent data of the two-corner map from the Taylor series of 1/psi(1/u)."""
    k = np.arange(K + 3)
    a = -1j * np.sqrt(omega)
    b = 1j * np.sqrt(np.conj(omega))
    half = binom(0.5, k)
    g = a * half * (-1.0 / omega) ** k + b * half * (-1.0 / np.conj(omega)) ** k
    G = g[1:]  # g[0] vanishes by the choice of additive constant
    h = np.zeros(K + 2, dtype=complex)
    h[0] = 1.0 / G[0]
    for j in range(1, K + 2):
        h[j] = -np.dot(G[1: j + 1], h[j - 1:: -1]) / G[0]
    return h[0], h[1], h[2:]


def two_corner_map(theta1, K: int = 256) -> MapBundle:
    """Exterior map with two corners of exterior angle pi/2 at e^{+-i theta1}.

    theta1 is an angle in radians, or a Fraction meaning theta1 / pi.
    """
    theta_pi = theta1 if isinstance(theta1, Fraction) else None
    th = math.pi * float(theta1) if theta_pi is not None else float(theta1)
    if not math.pi / 2 - 1e-15 <= th < math.pi:
        raise DomainError(f"theta1 must lie in [pi/2, pi), got {th}")
    omega = complex(np.exp(1j * th))
    om_c = omega.conjugate()
    shift = 1j * np.sqrt(omega) - 1j * np.sqrt(om_c)

    def psi(w):
        u = 1.0 / w
        return 1.0 / (np.sqrt(_snap(u - omega)) + np.sqrt(_snap(u - om_c)) + shift)

    def dpsi(w):
        u = 1.0 / w
        r1, r2 = np.sqrt(_snap(u - omega)), np.sqrt(_snap(u - om_c))
        g = r1 + r2 + shift
        with np.errstate(divide="ignore", invalid="ignore"):
            dg = 0.5 / r1 + 0.5 / r2
        return dg / (g * g * w * w)

    lead, const, tail = _two_corner_series(omega, K)
    lmap = LaurentMap(lead, const, tail, closed_form=ClosedForm(psi, dpsi))
    res = lmap.agreement_residual()
    if res > AGREEMENT_TOL:
        raise ExtractionError(res)

    z1 = complex(psi(omega))
    z2 = z1.conjugate()
    a_hat1 = -1j * om_c * z1 ** 2
    a_hat2 = 1j * z2 ** 2
    th2 = TWO_PI - th
    # A_k carries the phase e^{i Lambda_1 (Theta_k - Theta_1)} relative to the hat constants
    a2 = a_hat2 * np.exp(-0.5j * (th2 - th))
    corners = (
        CornerData(theta=th, lam=0.5, z=z1, A=a_hat1, theta_pi=theta_pi),
        CornerData(theta=th2, lam=0.5, z=z2, A=a2, theta_pi=None if theta_pi is None else 2 - theta_pi),
    )
    return MapBundle(lmap, corners, kind="two_corner", params={"theta1": th, "theta1_pi": theta_pi})


# ---------------------------------------------------------------------------
# JSON map specifications

_ANGLE_RE = re.compile(r"^\s*([0-9]+)\s*(?:/\s*([0-9]+))?\s*\*?\s*pi\s*$")


def parse_angle(value):
    """Angle from a float (radians) or a string like '3/4pi'; strings return Fraction of pi."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if isinstance(value, str):
        m = _ANGLE_RE.match(value)
        if m:
            return Fraction(int(m.group(1)), int(m.group(2) or 1))
        try:
            return float(value)
        except ValueError:
            pass
    raise DomainError(f"cannot parse angle {value!r}")


def _complex(pair, name):
    if isinstance(pair, (int, float)) and not isinstance(pair, bool):
        return complex(pair)
    if not isinstance(pair, (list, tuple)) or len(pair) != 2:
        raise DomainError(f"{name} must be a [re, im] pair")
    return complex(float(pair[0]), float(pair[1]))


def bundle_from_spec(spec: dict, K: int = 256) -> MapBundle:
    if not isinstance(spec, dict) or "kind" not in spec:
        raise DomainError("map spec must be an object with a 'kind' field")
    kind = spec["kind"]
    if kind == "lemniscate":
        return lemniscate_map(spec.get("s"), K=K)
    if kind == "two_corner":
        if "theta1" not in spec:
            raise DomainError("two_corner spec needs theta1")
        return two_corner_map(parse_angle(spec["theta1"]), K=K)
    if kind == "laurent":
        try:
            tail = [_complex(t, "tail entry") for t in spec.get("tail", [])]
            lmap = LaurentMap(_complex(spec["leading"], "leading"), _complex(spec.get("constant", 0), "constant"),
                              np.array(tail, dtype=complex), exact_tail=True)
        except KeyError as exc:
            raise DomainError(f"laurent spec is missing {exc}") from None
        corners = []
        for c in spec.get("corners", []):
            theta = parse_angle(c["theta"])
            frac = theta if isinstance(theta, Fraction) else None
            th = math.pi * float(theta) if frac is not None else float(theta)
            corners.append(CornerData(theta=th, lam=float(c["lambda"]), z=_complex(c["z"], "z"),
                                      A=_complex(c.get("A", 0), "A"), r=c.get("r"), m=c.get("m"),
                                      theta_pi=frac))
        return MapBundle(lmap, tuple(corners), kind="laurent", params={})
    raise DomainError(f"unknown map kind {kind!r}")


def load_map_spec(source: str, K: int = 256) -> MapBundle:
    """Bundle from a JSON file path or an inline JSON string."""
    text = source
    if not source.lstrip().startswith("{"):
        try:
            with open(source) as fh:
                text = fh.read()
        except OSError as exc:
            raise DomainError(f"cannot read map spec {source!r}: {exc}") from None
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DomainError(f"map spec is not valid JSON: {exc}") from None
    return bundle_from_spec(spec, K=K)
