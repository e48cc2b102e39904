"""Zeros of Faber polynomials and where they accumulate.

Roots come from a simultaneous Aberth-Ehrlich iteration. For Faber
polynomials the values p, p' are taken from the three-term-style recurrence
rather than the monomial coefficients, which keeps the residuals at rounding
level for degrees in the hundreds. Zero distributions are compared with the
equilibrium measure of L through low-order moments.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, NamedTuple

import numpy as np

from .asymptotics import InteriorModel, build_interior_model
from .conformal import MapBundle, classify_point, distance_to_boundary, exterior_inverse
from .errors import A3ViolationError, DomainError, UnsupportedCaseError
from .faber import FaberPolynomial, faber_sequence

EPS = np.finfo(float).eps
GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))
FAR_ZERO = 1e3
STALL_SWEEPS = 20


@dataclass(frozen=True, eq=False)
class CountingMeasure:
    points: np.ndarray
    n: int
    residuals: np.ndarray | None = None
    converged: bool = True
    iterations: int = 0
    stalled: int = 0  # roots frozen because their residual stopped improving

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=complex).ravel()
        object.__setattr__(self, "points", pts)
        if len(pts) != self.n:
            raise DomainError(f"counting measure of degree {self.n} needs {self.n} points, got {len(pts)}")

    def moments(self, k_max: int) -> np.ndarray:
        """(1/n) sum z^k for k = 0..k_max."""
        k = np.arange(k_max + 1)
        return (self.points[None, :] ** k[:, None]).mean(axis=1)

    def mixed_moments(self, k_max: int) -> np.ndarray:
        """(1/n) sum z^j conj(z)^k for j + k <= k_max; other entries zero."""
        out = np.zeros((k_max + 1, k_max + 1), dtype=complex)
        zc = np.conj(self.points)
        for j in range(k_max + 1):
            for k in range(k_max + 1 - j):
                out[j, k] = np.mean(self.points ** j * zc ** k)
        return out

    def to_json(self) -> dict:
        res = self.residuals if self.residuals is not None else np.zeros(self.n)
        return {
            "n": int(self.n),
            "zeros": [[float(z.real), float(z.imag)] for z in self.points],
            "residuals": [float(r) for r in res],
        }


# ---------------------------------------------------------------------------
# Root finding


def _horner_pair(coeffs):
    rev = coeffs[::-1]
    drev = (np.arange(1, len(coeffs)) * coeffs[1:])[::-1]

    def evaluate(z):
        return np.polyval(rev, z), np.polyval(drev, z)

    return evaluate


def taylor_shift(coeffs, center):
    """Ascending coefficients of p(center + d) from those of p(z), by repeated synthetic division."""
    a = np.array(coeffs, dtype=complex)
    n = len(a) - 1
    for k in range(n):
        for j in range(n - 1, k - 1, -1):
            a[j] += center * a[j + 1]
    return a


def _clusters(points, radius):
    """Groups of indices whose points chain together within `radius`."""
    labels = -np.ones(len(points), dtype=int)
    groups = []
    for i in range(len(points)):
        if labels[i] >= 0:
            continue
        members, frontier = [i], [i]
        labels[i] = len(groups)
        while frontier:
            j = frontier.pop()
            near = np.flatnonzero((np.abs(points - points[j]) < radius) & (labels < 0))
            labels[near] = len(groups)
            members.extend(near.tolist())
            frontier.extend(near.tolist())
        groups.append(np.array(members))
    return groups


def refine_clusters(coeffs, points, radius=1e-2, sweeps=60):
    """Re-converge each multiple-root cluster on the polynomial shifted to the cluster mean.

    Near an m-fold root the monomial values are dominated by rounding, so the
    cluster members wander. After shifting, the low-order coefficients are
    tiny and the cluster is resolved as exact roots of a nearby polynomial,
    which keeps its symmetric functions (and so the Vieta sums) accurate.
    """
    points = np.array(points, dtype=complex)
    for group in _clusters(points, radius):
        if len(group) < 2:
            continue
        center = points[group].mean()
        shifted = taylor_shift(coeffs, center)
        rev = shifted[::-1]
        drev = (np.arange(1, len(shifted)) * shifted[1:])[::-1]
        delta = points - center
        for _ in range(sweeps):
            d = delta[group]
            with np.errstate(divide="ignore", invalid="ignore"):
                newton = np.polyval(rev, d) / np.polyval(drev, d)
                diff = d[:, None] - delta[None, :]
                diff[np.arange(len(group)), group] = np.inf
                step = newton / (1.0 - newton * (1.0 / diff).sum(axis=1))
            step = np.where(np.isfinite(step), step, 0.0)
            delta[group] = d - step
            if np.max(np.abs(step)) <= 4 * EPS * max(1.0, abs(center)):
                break
        points[group] = center + delta[group]
    return points


def find_zeros(poly: FaberPolynomial, tol: float = 1e-12, max_iter: int = 500,
               evaluator: Callable | None = None, start_radius: float | None = None,
               cluster_radius: float = 1e-2, max_refine_degree: int = 64) -> CountingMeasure:
    """All zeros of poly by Aberth-Ehrlich iteration.

    `evaluator(z) -> (p(z), p'(z))` overrides the value source; by default the
    Faber recurrence is used when the polynomial knows its map, otherwise
    Horner. Zero low-order coefficients are split off as exact roots at 0.
    Starting points sit on a circle whose radius is the coefficient bound
    1 + max |c_j/c_n|^(1/(n-j)), or `start_radius` if that is smaller.
    Clusters of nearby roots are refined by refine_clusters when the degree
    is small enough for the Taylor shift to be well conditioned.
    """
    n = poly.n
    if n < 1:
        raise DomainError("find_zeros needs degree >= 1")
    c = poly.coeffs
    absc = np.abs(c)
    norm1 = float(absc.sum())
    horner = evaluator is None and poly.source is None
    if evaluator is None:
        evaluator = _horner_pair(c) if horner else (lambda z: poly.values(z, derivative=True))
    low = int(np.argmax(c != 0))
    d = n - low

    def noise_floor(z):
        # rounding bound for Horner; recurrence values have no cheap bound, so rely on step size
        if not horner:
            return np.zeros(z.shape)
        return 4 * EPS * (n + 1) * np.polyval(absc[::-1], np.abs(z))

    roots = np.zeros(d, dtype=complex)
    iters = 0
    converged = True
    if d:
        top = c[low:]
        ratios = np.abs(top[:-1] / top[-1]) ** (1.0 / (d - np.arange(d)))
        radius = 1.0 + float(ratios.max())
        if start_radius is not None:
            radius = min(radius, start_radius)
        roots = radius * np.exp(1j * (GOLDEN_ANGLE * np.arange(d) + 0.25))
        active = np.ones(d, dtype=bool)
        last = np.full(d, np.inf)
        best = np.full(d, np.inf)
        since_best = np.zeros(d, dtype=int)
        stuck = np.zeros(d, dtype=bool)
        converged = False
        for iters in range(1, max_iter + 1):
            idx = np.flatnonzero(active)
            zi = roots[idx]
            p, dp = evaluator(zi)
            if low:
                dp = dp - low * p / zi
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                newton = p / dp
                diff = zi[:, None] - roots[None, :]
                diff[np.arange(len(idx)), idx] = np.inf
                s = (1.0 / diff).sum(axis=1)
                step = newton / (1.0 - newton * s)
            step = np.where(np.isfinite(step), step, 0.0)
            at_floor = np.abs(p) <= noise_floor(zi)
            roots[idx] = zi - np.where(at_floor, 0.0, step)
            size = np.abs(step)
            scale = 1.0 + np.abs(zi)
            # once a root is within 1e-8 a growing step means it is circling in rounding noise
            stalled = (last[idx] < 1e-8 * scale) & (size >= last[idx])
            # high-multiplicity clusters wander at radius ~ eps^(1/m) and never meet tol
            absp = np.abs(p)
            improved = absp < 0.5 * best[idx]
            best[idx] = np.where(improved, absp, best[idx])
            since_best[idx] = np.where(improved, 0, since_best[idx] + 1)
            plateau = since_best[idx] >= STALL_SWEEPS
            stuck[idx] = plateau & ~(size <= tol * scale)
            done = at_floor | (size <= tol * scale) | stalled | plateau
            last[idx] = size
            active[idx[done]] = False
            if not active.any():
                converged = True
                break
    if d and n <= max_refine_degree and cluster_radius > 0:
        roots = refine_clusters(c[low:], roots, radius=cluster_radius)
    points = np.concatenate([np.zeros(low, dtype=complex), roots])
    p_all = evaluator(points)[0]
    residuals = np.abs(np.asarray(p_all)) / norm1
    if not converged:
        warnings.warn(f"Aberth iteration did not converge in {max_iter} sweeps for degree {n}",
                      RuntimeWarning, stacklevel=2)
    return CountingMeasure(points, n, residuals, converged, iters, int(stuck.sum()) if d else 0)


def faber_zeros(bundle: MapBundle, n: int, **kwargs) -> CountingMeasure:
    poly = faber_sequence(bundle, n, force=True)[n]
    # the zeros cluster on or inside L, so start just outside it
    kwargs.setdefault("start_radius", 1.1 * float(np.abs(bundle.boundary_curve).max()))
    return find_zeros(poly, **kwargs)


# ---------------------------------------------------------------------------
# Equilibrium measure moments


def equilibrium_moments(bundle: MapBundle, k_max: int = 6, nodes: int = 1024) -> np.ndarray:
    """Holomorphic moments int z^k dmu_L, k = 0..k_max.

    The moment equals the constant Laurent term of psi^k, so the circle mean
    may be taken on |w| = 2 where the integrand is analytic.
    """
    if nodes < 512:
        raise DomainError("equilibrium_moments needs at least 512 nodes")
    theta = 2 * math.pi * np.arange(nodes) / nodes
    vals = np.asarray(bundle.map(2.0 * np.exp(1j * theta)), dtype=complex)
    k = np.arange(k_max + 1)
    return (vals[None, :] ** k[:, None]).mean(axis=1)


def _graded_rule(a, b, order=32, levels=14, ratio=0.15):
    """Gauss-Legendre panels on [a, b], refined geometrically toward both ends."""
    x, w = np.polynomial.legendre.leggauss(order)
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    edges = [half * ratio ** j for j in range(levels)] + [0.0]
    nodes, weights = [], []
    for hi, lo in zip(edges[:-1], edges[1:]):
        for left, right in ((a + lo, a + hi), (b - hi, b - lo)):
            h = 0.5 * (right - left)
            nodes.append(left + h * (x + 1))
            weights.append(h * w)
    nodes.append(np.array([mid]))
    weights.append(np.array([0.0]))
    return np.concatenate(nodes), np.concatenate(weights)


def equilibrium_mixed_moments(bundle: MapBundle, k_max: int = 6) -> np.ndarray:
    """int z^j conj(z)^k dmu_L for j + k <= k_max, integrated on the unit circle.

    Arcs between corner preimages get endpoint-graded Gauss-Legendre panels,
    since the boundary parametrization is only Hoelder continuous at corners.
    """
    cuts = sorted({c.theta for c in bundle.corners})
    if cuts:
        bounds = cuts + [cuts[0] + 2 * math.pi]
        parts = [_graded_rule(a, b) for a, b in zip(bounds[:-1], bounds[1:])]
        theta = np.concatenate([p[0] for p in parts])
        weight = np.concatenate([p[1] for p in parts])
    else:
        theta = 2 * math.pi * np.arange(4096) / 4096
        weight = np.full(4096, 2 * math.pi / 4096)
    z = np.asarray(bundle.map(np.exp(1j * theta)), dtype=complex)
    weight = weight / (2 * math.pi)
    out = np.zeros((k_max + 1, k_max + 1), dtype=complex)
    zc = np.conj(z)
    for j in range(k_max + 1):
        for k in range(k_max + 1 - j):
            out[j, k] = np.dot(weight, z ** j * zc ** k)
    return out


def measure_distance(nu: CountingMeasure, mu_moments, k_max: int = 6) -> float:
    """Largest moment gap between nu and the reference moments.

    A 1-d reference compares holomorphic moments z^k; a 2-d reference (from
    equilibrium_mixed_moments) compares z^j conj(z)^k over j + k <= k_max.
    Zeros with |z| > 1e3 are dropped with a warning.
    """
    mu = np.asarray(mu_moments, dtype=complex)
    pts = nu.points
    far = np.abs(pts) > FAR_ZERO
    if far.any():
        warnings.warn(f"{int(far.sum())} zeros with |z| > {FAR_ZERO:g} ignored as suspect",
                      RuntimeWarning, stacklevel=2)
        pts = pts[~far]
    if not len(pts):
        return math.inf
    trimmed = CountingMeasure(pts, len(pts))
    if mu.ndim == 1:
        k = min(k_max, len(mu) - 1)
        return float(np.max(np.abs(trimmed.moments(k) - mu[: k + 1])))
    k = min(k_max, mu.shape[0] - 1)
    gap = np.abs(trimmed.mixed_moments(k) - mu[: k + 1, : k + 1])
    return float(max(gap[j, i] for j in range(k + 1) for i in range(k + 1 - j)))


def interior_zeros(nu: CountingMeasure, bundle: MapBundle, margin: float = 0.1) -> np.ndarray:
    """Zeros strictly inside L and at least `margin` away from it."""
    pts = nu.points
    if not len(pts):
        return pts
    inside = classify_point(bundle, pts) == "interior"
    far = distance_to_boundary(bundle, pts) >= margin
    return pts[inside & far]


# ---------------------------------------------------------------------------
# Accumulation points


@dataclass(frozen=True, eq=False)
class AccumulationProblem:
    theta: tuple[Fraction | None, ...]
    A_hat: tuple[complex, ...]
    z: tuple[complex, ...]
    bundle: MapBundle | None = field(default=None, repr=False)

    def __post_init__(self):
        for t in self.theta:
            if t is not None and not 0 < t <= 1:
                raise DomainError(f"rational phase {t} must lie in (0, 1]")

    @property
    def u(self) -> int:
        return len(self.A_hat)

    @property
    def rational(self) -> bool:
        return all(t is not None for t in self.theta)

    @property
    def q(self) -> int | None:
        if not self.rational:
            return None
        return math.lcm(*(t.denominator for t in self.theta))


def accumulation_problem(source) -> AccumulationProblem:
    model = source if isinstance(source, InteriorModel) else build_interior_model(source)
    return AccumulationProblem(model.theta_exact, model.A_hat, model.poles, model.bundle)


class Candidate(NamedTuple):
    residue: int  # n mod q for which H_n vanishes at t
    t: complex
    interior: bool


def _cleared_numerator(weights, poles):
    """Coefficients (descending) of sum_k w_k prod_{j != k} (t - z_j)."""
    poly = np.zeros(1, dtype=complex)
    for k, wk in enumerate(weights):
        term = np.array([wk], dtype=complex)
        for j, zj in enumerate(poles):
            if j != k:
                term = np.polymul(term, [1.0, -zj])
        poly = np.polyadd(poly, term)
    return poly


def accumulation_candidates(problem: AccumulationProblem) -> list[Candidate]:
    """Roots of H_n for each residue class of n mod q, with interior flags."""
    if not problem.rational:
        raise UnsupportedCaseError("accumulation points need every corner phase declared rational")
    q = problem.q
    poles = np.array(problem.z, dtype=complex)
    groups = np.unique(poles)
    A = np.array(problem.A_hat, dtype=complex)
    scale = float(np.abs(A).sum())
    out, degenerate = [], 0
    for ell in range(1, q + 1):
        phases = np.array([np.exp(2j * math.pi * float((ell * t) % 1)) for t in problem.theta])
        weights = np.array([(A * phases)[poles == g].sum() for g in groups])
        numer = _cleared_numerator(weights, groups)
        if np.all(np.abs(numer) <= 1e-10 * scale * max(1.0, np.abs(groups).max()) ** (len(groups) - 1)):
            degenerate += 1
            continue
        nz = np.flatnonzero(np.abs(numer) > 1e-12 * scale)
        numer = numer[nz[0]:]
        for t in np.roots(numer) if len(numer) > 1 else []:
            inside = problem.bundle is not None and classify_point(problem.bundle, t) == "interior"
            out.append(Candidate(ell % q, complex(t), bool(inside)))
    if degenerate == q:
        raise A3ViolationError("H_n vanishes identically for every residue class")
    return out


def accumulation_points_rational(problem: AccumulationProblem, tol: float = 1e-9) -> list[complex]:
    """Interior accumulation points of zeros (finite set for rational phases)."""
    pts: list[complex] = []
    for cand in accumulation_candidates(problem):
        if cand.interior and all(abs(cand.t - p) > tol for p in pts):
            pts.append(cand.t)
    return pts


@dataclass(frozen=True)
class Locus:
    kind: str  # "line" or "circle"
    data: dict

    def contains(self, t, tol=1e-9) -> bool:
        t = complex(t)
        if self.kind == "line":
            p, d = complex(*self.data["point"]), complex(*self.data["direction"])
            return abs(((t - p) * d.conjugate()).imag) / abs(d) <= tol
        c = complex(*self.data["center"])
        return abs(abs(t - c) - self.data["radius"]) <= tol

    def sample(self, count=400, extent=4.0) -> np.ndarray:
        if self.kind == "line":
            p, d = complex(*self.data["point"]), complex(*self.data["direction"])
            return p + d / abs(d) * np.linspace(-extent, extent, count)
        c = complex(*self.data["center"])
        return c + self.data["radius"] * np.exp(2j * math.pi * np.arange(count) / count)

    def to_json(self) -> dict:
        return {"kind": self.kind, "data": self.data}


def accumulation_locus_u2_irrational(problem: AccumulationProblem, rtol: float = 1e-9) -> Locus:
    """Set of t with |Ahat_1 (t - z_2)| = |Ahat_2 (t - z_1)|: a line or an Apollonius circle."""
    if problem.u != 2:
        raise UnsupportedCaseError(f"locus construction handles exactly two minimal corners, got {problem.u}")
    if problem.theta[1] is not None:
        raise UnsupportedCaseError("second corner phase is declared rational; use accumulation_points_rational")
    z1, z2 = problem.z
    a1, a2 = abs(problem.A_hat[0]), abs(problem.A_hat[1])
    if abs(a1 - a2) <= rtol * max(a1, a2):
        mid, d = 0.5 * (z1 + z2), 1j * (z2 - z1)
        data = {"point": [mid.real, mid.imag], "direction": [d.real, d.imag]}
        locus = Locus("line", data)
    else:
        k = a2 / a1
        center = (z2 - k * k * z1) / (1 - k * k)
        radius = k * abs(z2 - z1) / abs(1 - k * k)
        locus = Locus("circle", {"center": [center.real, center.imag], "radius": radius})
    if problem.bundle is not None:
        pts = locus.sample(extent=4.0 * (1.0 + abs(z1) + abs(z2)))
        inside = pts[classify_point(problem.bundle, pts) == "interior"]
        locus.data["inside_samples"] = [[float(t.real), float(t.imag)] for t in inside]
    return locus


def zero_free_check(nu: CountingMeasure, bundle: MapBundle, margin: float = 0.1) -> list[tuple[complex, float]]:
    """Zeros z with |phi(z)| >= 1 + margin, i.e. clearly outside L."""
    pts = nu.points
    report = []
    if not len(pts):
        return report
    labels = classify_point(bundle, pts)
    for z, label in zip(pts, labels):
        if label != "exterior":
            continue
        r = abs(exterior_inverse(bundle, z))
        if r >= 1.0 + margin:
            report.append((complex(z), float(r)))
    return report
