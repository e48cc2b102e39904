"""Acceptance checks shared by the test suite and `faberlab verify`.

Every check returns a CheckResult with the measured quantities, so a failure
reports by how much it missed. Some criteria come in two variants: the form
as originally stated and a corrected form; both are run and reported.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .asymptotics import (
    boundary_model,
    build_interior_model,
    exterior_model,
    interior_model,
    lemniscate_subsequence_model,
    normalize_interior,
    subsequence_rate,
)
from .conformal import classify_point, distance_to_boundary, lemniscate_map, two_corner_map
from .faber import contour_oracle, faber_lemniscate_closed, faber_sequence, faber_values
from .special import AlphaParams, alpha, alpha_asymptotic, alpha_quadrature_oracle
from .zeros import (
    accumulation_candidates,
    accumulation_locus_u2_irrational,
    accumulation_problem,
    equilibrium_mixed_moments,
    equilibrium_moments,
    faber_zeros,
    find_zeros,
    interior_zeros,
    measure_distance,
)

INTERIOR_MARGIN = 0.1


@dataclass
class CheckResult:
    key: str
    name: str
    passed: bool
    metrics: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} [{self.key}] {self.name} ({self.seconds:.1f}s)"

    def to_json(self) -> dict:
        return {"key": self.key, "name": self.name, "passed": bool(self.passed),
                "seconds": round(self.seconds, 3), "metrics": _jsonable(self.metrics)}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


def _timed(key, name, fn, limit=None):
    start = time.perf_counter()
    passed, metrics = fn()
    seconds = time.perf_counter() - start
    if limit is not None:
        metrics["runtime_limit_s"] = limit
        passed = passed and seconds <= limit
    return CheckResult(key, name, bool(passed), metrics, seconds)


def three_quarter_map():
    return two_corner_map(Fraction(3, 4))


# ---------------------------------------------------------------------------


def check_closed_form(tol=1e-9, n_max=120, families=(2, 3, 5)):
    def run():
        worst = 0.0
        for s in families:
            seq = faber_sequence(lemniscate_map(s), n_max)
            for n in range(n_max + 1):
                ref = faber_lemniscate_closed(s, n).coeffs
                got = seq[n].coeffs
                nz = ref != 0
                rel = np.abs(got[nz] - ref[nz]) / np.abs(ref[nz])
                worst = max(worst, float(rel.max()), float(np.abs(got[~nz]).max(initial=0.0)))
        return worst <= tol, {"max_relative_error": worst, "tol": tol}

    return _timed("1", "closed-form lemniscate coefficients", run, limit=10.0)


def check_contour_oracle(tol=1e-8, seed=0, n_max=60, count=50):
    def run():
        rng = np.random.default_rng(seed)
        worst = {}
        for label, bundle in (("lemniscate s=2", lemniscate_map(2)), ("lemniscate s=3", lemniscate_map(3)),
                              ("two-corner 3pi/4", three_quarter_map())):
            r = np.sqrt(rng.uniform(0.25, 9.0, count))
            z = r * np.exp(2j * math.pi * rng.uniform(size=count))
            vals = faber_values(bundle, n_max, z)
            err = 0.0
            for i, zi in enumerate(z):
                ref = contour_oracle(bundle, np.arange(n_max + 1), zi)
                err = max(err, float(np.max(np.abs(vals[:, i] - ref) / (1 + np.abs(vals[:, i])))))
            worst[label] = err
        return max(worst.values()) <= tol, {"max_scaled_error": worst, "tol": tol, "seed": seed}

    return _timed("2", "recurrence vs contour-integral oracle", run, limit=30.0)


def check_alpha(tol=1e-8):
    def run():
        worst = 0.0
        for beta in (-0.5, 0.5, 1.0, 1.5):
            for m in range(3):
                for n in range(51):
                    p = AlphaParams(beta, m, n)
                    exact, quad = alpha(p), alpha_quadrature_oracle(p)
                    worst = max(worst, abs(exact - quad) / abs(quad))
        p0 = AlphaParams(0.5, 0, 10_000)
        exact_ratio = alpha(p0) / alpha_asymptotic(p0)
        ratios = {beta: alpha(AlphaParams(beta, 1, 10_000)) / alpha_asymptotic(AlphaParams(beta, 1, 10_000))
                  for beta in (-0.5, 0.5, 1.0, 1.5)}
        ok = worst <= tol and abs(exact_ratio - 1) <= 1e-12 and all(0.6 <= r <= 1.4 for r in ratios.values())
        return ok, {"max_relative_error": worst, "m0_ratio_minus_1": exact_ratio - 1, "m1_ratios_n1e4": ratios}

    return _timed("3", "alpha family: recurrence, quadrature, asymptotics", run)


def check_subsequence(as_printed=False, s=3, l=1, z=0.5, m_pair=(100, 200)):
    variant = "as stated" if as_printed else "corrected"

    def run():
        bracket = lemniscate_subsequence_model(s, l, 1, z, as_printed=as_printed).bracket
        rho = {m: subsequence_rate(s, l, m, z, as_printed=as_printed) for m in m_pair}
        gaps = {m: abs(rho[m] - bracket) for m in m_pair}
        lo, hi = m_pair
        ok = gaps[hi] <= gaps[lo] and gaps[hi] <= 0.5 * abs(bracket)
        return ok, {"bracket": bracket, "m_r_m": rho, "gap": gaps}

    key = "4" if as_printed else "4-corrected"
    return _timed(key, f"lemniscate subsequence first-order correction ({variant})", run, limit=5.0)


def interior_grid(bundle, count=20, corner_gap=0.3, edge_gap=0.05, resolution=41):
    """Deterministic lattice points strictly inside L and away from the corners."""
    curve = bundle.boundary_curve
    xs = np.linspace(curve.real.min(), curve.real.max(), resolution)
    ys = np.linspace(curve.imag.min(), curve.imag.max(), resolution)
    pts = (xs[None, :] + 1j * ys[:, None]).ravel()
    keep = classify_point(bundle, pts) == "interior"
    pts = pts[keep]
    pts = pts[distance_to_boundary(bundle, pts) >= edge_gap]
    for c in bundle.corners:
        pts = pts[np.abs(pts - c.z) >= corner_gap]
    if len(pts) < count:
        raise ValueError("interior grid too sparse")
    return pts[np.linspace(0, len(pts) - 1, count).round().astype(int)]


def check_interior_convergence(n_pair=(50, 200), fraction=0.9):
    def run():
        bundle = three_quarter_map()
        model = build_interior_model(bundle)
        grid = interior_grid(bundle)
        res = {}
        for n in n_pair:
            vals = faber_values(bundle, n, grid)[n]
            res[n] = np.abs(normalize_interior(model, n, vals) - interior_model(model, n)(grid))
        better = float(np.mean(res[n_pair[1]] < res[n_pair[0]]))
        return better >= fraction, {"fraction_improved": better,
                                    "median_residual": {n: float(np.median(r)) for n, r in res.items()}}

    return _timed("5", "interior model convergence", run, limit=60.0)


def check_exterior_boundary():
    def run():
        bundle = three_quarter_map()
        theta = np.linspace(0, 2 * math.pi, 10, endpoint=False) + 0.15
        z_ext = bundle.map(1.6 * np.exp(1j * theta))
        ext = {}
        for n in (20, 80):
            vals = faber_values(bundle, n, z_ext)[n]
            ext[n] = np.array([abs(v / exterior_model(bundle, n, z) - 1) for v, z in zip(vals, z_ext)])
        z_bd = bundle.map(np.exp(1j * theta))
        bd = {}
        for n in (50, 200):
            vals = faber_values(bundle, n, z_bd)[n]
            bd[n] = np.array([abs(v / boundary_model(bundle, n, z) - 1) for v, z in zip(vals, z_bd)])
        ext_ok = bool(np.all(ext[80] < ext[20]))
        bd_ok = bool(np.all(bd[200] < bd[50]))
        return ext_ok and bd_ok, {
            "exterior_max": {n: float(v.max()) for n, v in ext.items()},
            "boundary_max": {n: float(v.max()) for n, v in bd.items()},
            "boundary_fraction_improved": float(np.mean(bd[200] < bd[50])),
        }

    return _timed("6", "exterior and boundary models", run)


def check_cluster_zeros(s=3, m=4, radius=1e-2, tol=1e-8):
    def run():
        n = s * m
        poly = faber_sequence(lemniscate_map(s), n)[n]
        nu = find_zeros(poly)
        roots_of_unity = np.exp(2j * math.pi * np.arange(s) / s)
        nearest = np.argmin(np.abs(nu.points[:, None] - roots_of_unity[None, :]), axis=1)
        sizes = np.bincount(nearest, minlength=s)
        spread = float(np.max(np.abs(nu.points - roots_of_unity[nearest])))
        c = poly.coeffs
        sum_err = abs(nu.points.sum() + c[-2] / c[-1])
        prod_ref = (-1) ** n * c[0] / c[-1]
        prod_err = abs(np.prod(nu.points) - prod_ref) / abs(prod_ref)
        ok = bool(np.all(sizes == m)) and spread <= radius and sum_err <= tol and prod_err <= tol
        return ok, {"cluster_sizes": sizes.tolist(), "cluster_radius": spread,
                    "vieta_sum_error": sum_err, "vieta_product_error": prod_err}

    return _timed("7", "multiple-zero clusters of F_{sm}", run)


def check_zero_free(s=3, n_max=200, bound=1.1):
    def run():
        bundle = lemniscate_map(s)
        worst, bad_origin = 0.0, []
        for n in range(1, n_max + 1):
            if n % s == 0:
                continue
            nu = faber_zeros(bundle, n)
            worst = max(worst, float(np.max(np.abs(nu.points ** s - 1))))
            at_origin = int(np.sum(np.abs(nu.points) < 1e-6))
            if at_origin != n % s:
                bad_origin.append(n)
        return worst <= bound and not bad_origin, {"max_abs_zs_minus_1": worst, "origin_multiplicity_mismatch": bad_origin}

    return _timed("8", "no zeros outside the lemniscate; origin multiplicity", run)


def check_weak_star(mixed=True, k_max=6):
    variant = "mixed moments" if mixed else "holomorphic moments"

    def run():
        out = {}
        two = three_quarter_map()
        lem = lemniscate_map(3)
        ref = {}
        for label, b in (("two", two), ("lem", lem)):
            ref[label] = equilibrium_mixed_moments(b, k_max) if mixed else equilibrium_moments(b, k_max)

        def dist(label, bundle, n):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                return measure_distance(faber_zeros(bundle, n), ref[label], k_max)

        out["two_corner"] = {n: dist("two", two, n) for n in (60, 180)}
        # n = 60, 180 are multiples of 3, so use the neighbouring residues
        out["lemniscate"] = {n: dist("lem", lem, n) for n in (61, 62, 181, 182)}
        out["lemniscate_fixed_zero_n120"] = dist("lem", lem, 120)
        ok = (out["two_corner"][180] < out["two_corner"][60]
              and out["lemniscate"][181] < out["lemniscate"][61]
              and out["lemniscate"][182] < out["lemniscate"][62]
              and out["lemniscate_fixed_zero_n120"] >= 0.1)
        return ok, out

    key = "9-mixed" if mixed else "9"
    return _timed(key, f"weak-star trend of zero distributions ({variant})", run)


def _line_locus_check(n=200, fraction=0.8):
    bundle = two_corner_map(math.sqrt(2) * math.pi / 2)
    locus = accumulation_locus_u2_irrational(accumulation_problem(bundle))
    direction = complex(*locus.data.get("direction", (0.0, 0.0)))
    point = complex(*locus.data.get("point", (0.0, 1.0)))
    real_axis = locus.kind == "line" and abs(direction.imag) <= 1e-9 * abs(direction) and abs(point.imag) <= 1e-9
    inner = interior_zeros(faber_zeros(bundle, n), bundle, INTERIOR_MARGIN)
    near = float(np.mean(np.abs(inner.imag) <= 0.1)) if len(inner) else 0.0
    return real_axis and near >= fraction and len(inner) > 0, {
        "locus": locus.kind, "real_axis": real_axis, "interior_zeros": inner.tolist(), "fraction_near_axis": near}


def check_accumulation(paired_residue=True, radius=0.1):
    variant = "degree matched to residue class" if paired_residue else "F_200 only"

    def run():
        bundle = three_quarter_map()
        problem = accumulation_problem(bundle)
        cands = [c for c in accumulation_candidates(problem) if c.interior]
        q = problem.q
        zeros = {}
        report = []
        for cand in cands:
            n = 200 + (cand.residue - 200) % q if paired_residue else 200
            if n not in zeros:
                zeros[n] = faber_zeros(bundle, n).points
            gap = float(np.min(np.abs(zeros[n] - cand.t)))
            report.append({"t": cand.t, "residue": cand.residue, "degree": n, "nearest_zero": gap})
        ok_points = len(cands) <= 4 and all(r["nearest_zero"] <= radius for r in report)
        ok_line, line_metrics = _line_locus_check()
        return ok_points and ok_line, {"candidates": report, "line_locus": line_metrics}

    key = "10-paired" if paired_residue else "10"
    return _timed(key, f"interior accumulation prediction ({variant})", run)


def run_all(oracle_tol=1e-8, seed=0):
    """All acceptance checks, stated and corrected variants, in criterion order."""
    return [
        check_closed_form(),
        check_contour_oracle(tol=oracle_tol, seed=seed),
        check_alpha(),
        check_subsequence(as_printed=True),
        check_subsequence(as_printed=False),
        check_interior_convergence(),
        check_exterior_boundary(),
        check_cluster_zeros(),
        check_zero_free(),
        check_weak_star(mixed=False),
        check_weak_star(mixed=True),
        check_accumulation(paired_residue=False),
        check_accumulation(paired_residue=True),
    ]
