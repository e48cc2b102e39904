"""Command-line front end: faberlab {gen, zeros, predict, verify}."""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .asymptotics import (
    build_interior_model,
    error_rate_class,
    interior_model,
    interior_normalizer,
    lemniscate_subsequence_model,
)
from .checks import run_all
from .conformal import MapBundle, classify_point, load_map_spec
from .errors import A3ViolationError, DomainError, NumericError, UnsupportedCaseError
from .faber import DEGREE_CAP, faber_sequence
from .zeros import (
    accumulation_candidates,
    accumulation_locus_u2_irrational,
    accumulation_problem,
    faber_zeros,
    interior_zeros,
)

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    map: str | None = None
    degrees: list[int] = field(default_factory=list)
    out: str | None = None
    format: str = "json"
    tol: float | None = None
    seed: int = 0
    grid: str | None = None

    def __post_init__(self):
        if self.format not in ("json", "csv"):
            raise UsageError(f"format must be json or csv, got {self.format!r}")
        if any(n < 0 for n in self.degrees):
            raise UsageError("degrees must be non-negative")


def parse_degrees(text: str) -> list[int]:
    """'3', '1,4,9', '20..90' or a comma-separated mix; returns sorted unique degrees."""
    out: set[int] = set()
    for part in filter(None, (p.strip() for p in text.split(","))):
        try:
            if ".." in part:
                lo, hi = (int(x) for x in part.split("..", 1))
                if hi < lo:
                    raise UsageError(f"empty range {part!r}")
                out.update(range(lo, hi + 1))
            else:
                out.add(int(part))
        except ValueError:
            raise UsageError(f"cannot parse degree {part!r}") from None
    return sorted(out)


def _threads() -> int:
    try:
        cap = int(os.environ.get("FABERLAB_THREADS", "1"))
    except ValueError:
        cap = 1
    return max(1, min(cap, os.cpu_count() or 1))


def _write_atomic(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True) + "\n"


def _cplx(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _bundle(cfg: RunConfig) -> MapBundle:
    if not cfg.map:
        raise UsageError("--map is required")
    top = max(cfg.degrees, default=0)
    return load_map_spec(cfg.map, K=max(256, top + 1))


def _require_degrees(cfg: RunConfig):
    if not cfg.degrees:
        raise UsageError("degree list is empty")


def _out_dir(cfg: RunConfig) -> str:
    out = cfg.out or "."
    os.makedirs(out, exist_ok=True)
    return out


def cmd_gen(cfg: RunConfig) -> int:
    _require_degrees(cfg)
    bundle = _bundle(cfg)
    top = max(cfg.degrees)
    seq = faber_sequence(bundle, top, force=top > DEGREE_CAP)
    out = _out_dir(cfg)
    for n in cfg.degrees:
        poly = seq[n]
        if cfg.format == "json":
            _write_atomic(os.path.join(out, f"faber_{n}.json"), _dump(poly.to_json()))
        else:
            rows = ["k,re,im"] + [f"{k},{float(c.real)!r},{float(c.imag)!r}" for k, c in enumerate(poly.coeffs)]
            _write_atomic(os.path.join(out, f"faber_{n}.csv"), "\n".join(rows) + "\n")
    print(_dump({"written": len(cfg.degrees), "out": out, "format": cfg.format}), end="")
    return EXIT_OK


def cmd_zeros(cfg: RunConfig) -> int:
    _require_degrees(cfg)
    bundle = _bundle(cfg)
    out = _out_dir(cfg)
    degrees = [n for n in cfg.degrees if n >= 1]
    if not degrees:
        raise UsageError("zeros need degrees >= 1")
    kwargs = {} if cfg.tol is None else {"tol": cfg.tol}

    def solve(n):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            return faber_zeros(bundle, n, **kwargs)

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        results = list(pool.map(solve, degrees))
    rows = ["n,re,im"]
    summary = []
    for n, nu in zip(degrees, results):
        _write_atomic(os.path.join(out, f"zeros_{n}.json"), _dump(nu.to_json()))
        rows.extend(f"{n},{float(z.real)!r},{float(z.imag)!r}" for z in nu.points)
        inner = interior_zeros(nu, bundle) if bundle.corners else np.empty(0)
        summary.append({"n": n, "converged": nu.converged, "iterations": nu.iterations, "stalled": nu.stalled,
                        "max_residual": float(nu.residuals.max()), "interior_zeros": [_cplx(z) for z in inner]})
    _write_atomic(os.path.join(out, "zeros.csv"), "\n".join(rows) + "\n")
    _write_atomic(os.path.join(out, "zeros_summary.json"), _dump(summary))
    print(_dump({"degrees": degrees, "out": out, "all_converged": all(s["converged"] for s in summary)}), end="")
    return EXIT_OK


def parse_grid(text: str | None, bundle: MapBundle) -> np.ndarray:
    """'xmin,xmax,ymin,ymax,nx,ny' lattice; default 7x7 over the bounding box of L."""
    if text:
        try:
            x0, x1, y0, y1, nx, ny = text.split(",")
            xs = np.linspace(float(x0), float(x1), int(nx))
            ys = np.linspace(float(y0), float(y1), int(ny))
        except ValueError:
            raise UsageError("--grid expects xmin,xmax,ymin,ymax,nx,ny") from None
    else:
        curve = bundle.boundary_curve
        xs = np.linspace(curve.real.min(), curve.real.max(), 9)[1:-1]
        ys = np.linspace(curve.imag.min(), curve.imag.max(), 9)[1:-1]
    return (xs[None, :] + 1j * ys[:, None]).ravel()


def _accumulation_report(bundle: MapBundle):
    problem = accumulation_problem(bundle)
    if problem.rational:
        cands = accumulation_candidates(problem)
        return {"kind": "points", "data": [{"t": _cplx(c.t), "residue": c.residue, "interior": c.interior}
                                           for c in cands]}
    if problem.u == 2:
        locus = accumulation_locus_u2_irrational(problem)
        data = {k: v for k, v in locus.data.items() if k != "inside_samples"}
        return {"kind": locus.kind, "data": data}
    raise UnsupportedCaseError("accumulation locus for irrational phases needs exactly two minimal corners")


def cmd_predict(cfg: RunConfig) -> int:
    bundle = _bundle(cfg)
    degrees = cfg.degrees or [50, 100, 200]
    grid = parse_grid(cfg.grid, bundle)
    labels = classify_point(bundle, grid)
    report = {"kind": bundle.kind, "warnings": [], "corners": []}
    for c in bundle.corners:
        entry = {"theta": c.theta, "lambda": c.lam, "z": _cplx(c.z), "A": _cplx(c.A), "relevant": c.relevant,
                 "pair": [None if math.isinf(x) else x for x in c.pair]}
        if c.relevant:
            entry["rate"] = error_rate_class(c).label
        report["corners"].append(entry)
    if not bundle.relevant_corners:
        report["warnings"].append("no relevant corner: interior model undefined")
        _emit(cfg, "predict.json", report)
        return EXIT_OK
    model = build_interior_model(bundle)
    report["warnings"].extend(model.notes)
    report["interior_model"] = {
        "C1": model.C1, "Lambda": model.Lam, "M": model.M, "u": model.u,
        "A_hat": [_cplx(a) for a in model.A_hat], "theta": list(model.theta), "period": model.period,
    }
    inside = grid[labels == "interior"]
    report["grid"] = [_cplx(z) for z in inside]
    per_n = []
    for n in degrees:
        h = interior_model(model, n)
        row = {"n": n, "H_is_zero": bool(h.is_zero)}
        if n >= 2:
            row["normalizer"] = _cplx(interior_normalizer(model, n))
        try:
            row["H"] = [_cplx(v) for v in np.atleast_1d(h(inside))]
        except DomainError as exc:
            row["H_error"] = str(exc)
        per_n.append(row)
    report["degrees"] = per_n
    if bundle.kind == "lemniscate":
        s = bundle.params["s"]
        report["warnings"].append(f"H_n vanishes identically unless n = {s - 1} mod {s}; "
                                  "lemniscate subsequence model reported")
        sub = []
        for n in degrees:
            m, l = divmod(n, s)
            if l == 0 or m < 1:
                continue
            vals = []
            for z in inside:
                if abs(z ** s - 1) < 1 and z != 0:
                    model_l = lemniscate_subsequence_model(s, l, m, z)
                    vals.append({"z": _cplx(z), "leading": _cplx(model_l.leading),
                                 "correction": _cplx(model_l.correction)})
            sub.append({"n": n, "m": m, "l": l, "values": vals})
        report["lemniscate_subsequence"] = sub
    try:
        report["accumulation"] = _accumulation_report(bundle)
    except A3ViolationError as exc:
        report["warnings"].append(f"condition A.3 violated: {exc}")
    except UnsupportedCaseError as exc:
        report["warnings"].append(str(exc))
    _emit(cfg, "predict.json", report)
    return EXIT_OK


def _emit(cfg: RunConfig, name: str, payload):
    text = _dump(payload)
    if cfg.out:
        _write_atomic(os.path.join(_out_dir(cfg), name), text)
    print(text, end="")


def cmd_verify(cfg: RunConfig) -> int:
    results = run_all(oracle_tol=cfg.tol if cfg.tol is not None else 1e-8, seed=cfg.seed)
    for r in results:
        print(r.line())
    report = {"passed": all(r.passed for r in results), "checks": [r.to_json() for r in results]}
    text = _dump(report)
    if cfg.out:
        _write_atomic(os.path.join(_out_dir(cfg), "verify.json"), text)
    else:
        print(text, end="")
    return EXIT_OK if report["passed"] else EXIT_VERIFY


COMMANDS = {"gen": cmd_gen, "zeros": cmd_zeros, "predict": cmd_predict, "verify": cmd_verify}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="faberlab", description="Faber polynomials of maps with corners")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (("gen", "write Faber polynomial coefficients"),
                            ("zeros", "compute zeros and export plot-ready CSV"),
                            ("predict", "evaluate asymptotic models and accumulation predictions"),
                            ("verify", "run the acceptance checks")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--map", help="map spec: JSON file path or inline JSON")
        p.add_argument("--n", dest="degrees", help="degrees: list '1,2,5' or range 'a..b'")
        p.add_argument("--out", help="output directory")
        p.add_argument("--format", default="json", choices=("json", "csv"))
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=float)
        p.add_argument("--grid", help="xmin,xmax,ymin,ymax,nx,ny")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        degrees = parse_degrees(args.degrees) if args.degrees is not None else []
        if args.degrees is not None and not degrees:
            raise UsageError("degree list is empty")
        cfg = RunConfig(map=args.map, degrees=degrees, out=args.out, format=args.format, tol=args.tol,
                        seed=args.seed, grid=args.grid)
        return COMMANDS[args.command](cfg)
    except (UsageError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
