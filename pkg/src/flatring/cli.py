"""Command-line interface: eigen | coords | green | verify | dirichlet.

Exit codes: 0 success, 1 verification failure, 2 usage or domain error.
All output goes to stdout as JSON (default) or CSV.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import __version__
from .coords import CartesianPoint, FlatRingPoint, Variant, cartesian_to_flatring, flatring_to_cartesian
from .dirichlet import BoundaryData, FlatRingDomain, coefficients, solve_interior, solve_point_source
from .elliptic import Modulus
from .errors import DomainError
from .harmonics import (
    HarmonicIndex,
    HarmonicKind,
    Truncation,
    green_expansion,
    internal_harmonic,
    toroidal_green_expansion,
    warm_cache,
)
from .lame import eigenvalue_bracket, family_of_superscript, eigenpair
from .verify import SUITES, run_suites


def _emit(rows: list[dict], fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(rows, indent=2))
    else:
        if not rows:
            return
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
        sys.stdout.write(buf.getvalue())


def _parse_point(text: str) -> CartesianPoint:
    parts = text.split(",")
    if len(parts) != 3:
        raise DomainError(f"point must be 'x,y,z', got {text!r}")
    return CartesianPoint(*(float(p) for p in parts))


def _parse_range(text: str) -> list[int]:
    if ":" in text:
        a, b = text.split(":")
        return list(range(int(a), int(b) + 1))
    return [int(text)]


def cmd_eigen(args) -> int:
    m = Modulus.from_k(args.k)
    kind = "c" if args.family.lower() in ("ec", "c") else "s"
    rows = []
    for sup in _parse_range(args.n_range):
        fam, nz = family_of_superscript(kind, sup)
        pair = eigenpair(fam, args.nu, nz, m)
        lo, hi = eigenvalue_bracket(fam, args.nu, nz, m)
        rows.append({
            "family": "Ec" if kind == "c" else "Es",
            "nu": args.nu,
            "superscript": sup,
            "eigenvalue": pair.h,
            "bracket_lo": lo,
            "bracket_hi": hi,
            "zeros_in_0K": pair.n,
        })
    _emit(rows, args.format)
    return 0


def _figure_lines(m: Modulus, n_samples: int) -> list[dict]:
    k_big, kp = m.quarter_K, m.quarter_Kp
    rows = []
    for s_mult in (-1.5, -1.0, -0.5, 0.5, 1.0, 1.5):
        pts = []
        for t in np.linspace(1e-3 * kp, kp * (1.0 - 1e-3), n_samples):
            c = flatring_to_cartesian(FlatRingPoint(
                s=s_mult * k_big, t=float(t), phi=0.0, modulus=m))
            pts.append([c.x, c.z])
        rows.append({"kind": "s", "value": s_mult * k_big, "points": pts})
    for t_mult in (0.3, 0.5, 0.7):
        pts = []
        for s in np.linspace(-2.0 * k_big * (1.0 - 1e-4), 2.0 * k_big * (1.0 - 1e-4), n_samples):
            c = flatring_to_cartesian(FlatRingPoint(
                s=float(s), t=t_mult * kp, phi=0.0, modulus=m))
            pts.append([c.x, c.z])
        rows.append({"kind": "t", "value": t_mult * kp, "points": pts})
    return rows


def cmd_coords(args) -> int:
    m = Modulus.from_k(args.k)
    variant = Variant[f"V{args.variant}"]
    if args.mode == "forward":
        p = FlatRingPoint(s=args.s, t=args.t, phi=args.phi, modulus=m, variant=variant)
        c = flatring_to_cartesian(p)
        _emit([{"x": c.x, "y": c.y, "z": c.z}], args.format)
    elif args.mode == "inverse":
        q = _parse_point(args.point)
        p = cartesian_to_flatring(q, m, variant)
        _emit([{"s": p.s, "t": p.t, "phi": p.phi}], args.format)
    else:  # lines
        rows = _figure_lines(m, args.samples)
        if args.format == "json":
            print(json.dumps(rows, indent=2))
        else:
            flat = []
            for i, row in enumerate(rows):
                for x, z in row["points"]:
                    flat.append({"curve": i, "kind": row["kind"],
                                 "value": row["value"], "x": x, "z": z})
            _emit(flat, "csv")
    return 0


def cmd_green(args) -> int:
    m = Modulus.from_k(args.k)
    r = _parse_point(args.point)
    rs = _parse_point(args.point_star)
    tr = Truncation(args.m_max, args.n_max)
    direct = 1.0 / math.dist(r, rs)
    if args.toroidal:
        val, tail, shells = toroidal_green_expansion(r, rs, tr, return_shells=True)
    else:
        warm_cache(m, args.m_max, args.n_max)
        val, tail, shells = green_expansion(r, rs, tr, m, return_shells=True)
    report = {
        "value": val,
        "direct": direct,
        "relative_error": abs(val - direct) / direct,
        "tail_estimate": tail,
        "shells": [{"n": i, "magnitude": abs(s)} for i, s in enumerate(shells)],
    }
    if args.format == "json":
        print(json.dumps(report, indent=2))
    else:
        _emit([{"n": i, "magnitude": abs(s)} for i, s in enumerate(shells)], "csv")
        print(f"# value={val!r} direct={direct!r} rel={report['relative_error']!r}")
    return 0


def cmd_verify(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    checks = run_suites(names, seed=args.seed, tol_scale=args.tol)
    _emit(checks, args.format)
    return 0 if all(c["pass"] for c in checks) else 1


def _read_boundary_grid(path: str):
    """CSV with header s,phi,g on a full tensor grid."""
    from scipy.interpolate import RegularGridInterpolator

    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:3]] != ["s", "phi", "g"]:
            raise DomainError(f"{path}:1: expected header 's,phi,g'")
        for lineno, row in enumerate(reader, start=2):
            try:
                rows.append((float(row[0]), float(row[1]), float(row[2])))
            except (ValueError, IndexError) as exc:
                raise DomainError(f"{path}:{lineno}: malformed row {row!r}") from exc
    s_vals = np.array(sorted({r[0] for r in rows}))
    p_vals = np.array(sorted({r[1] for r in rows}))
    grid = np.full((s_vals.size, p_vals.size), np.nan)
    si = {v: i for i, v in enumerate(s_vals)}
    pi = {v: i for i, v in enumerate(p_vals)}
    for s, p, g in rows:
        grid[si[s], pi[p]] = g
    if np.any(np.isnan(grid)):
        raise DomainError(f"{path}: grid is not a full (s, phi) tensor product")
    interp = RegularGridInterpolator((s_vals, p_vals), grid,
                                     bounds_error=False, fill_value=None)
    return lambda s, phi: float(interp((s, phi)))


def cmd_dirichlet(args) -> int:
    m = Modulus.from_k(args.k)
    kp = m.quarter_Kp
    dom = FlatRingDomain(t0=args.t0 * kp, modulus=m)
    tr = Truncation(args.m_max, args.n_max)
    warm_cache(m, args.m_max, args.n_max, second=False)

    r_star = None
    if args.boundary == "point-source":
        r_star = _parse_point(args.source) if args.source else flatring_to_cartesian(
            FlatRingPoint(s=1.2 * m.quarter_K, t=0.8 * kp, phi=-0.7, modulus=m))
        coeffs = solve_point_source(dom, r_star, tr, n_s=args.n_s, n_phi=args.n_phi)
    elif args.boundary == "constant":
        coeffs = coefficients(dom, BoundaryData(
            g=lambda s, phi: 1.0, n_s=args.n_s, n_phi=args.n_phi), tr)
    elif args.boundary == "single-mode":
        idx = HarmonicIndex(m=1, n=2, kind=HarmonicKind.GC)
        data = BoundaryData.from_function(
            dom, lambda q: internal_harmonic(idx, q, m).real,
            n_s=args.n_s, n_phi=args.n_phi)
        coeffs = coefficients(dom, data, tr)
    else:
        sampler = _read_boundary_grid(args.boundary)
        coeffs = coefficients(dom, BoundaryData(
            g=sampler, n_s=args.n_s, n_phi=args.n_phi), tr)

    rng = np.random.default_rng(args.seed)
    probes = []
    if args.probes:
        for chunk in args.probes.split(";"):
            probes.append(_parse_point(chunk))
    else:
        for _ in range(args.n_probes):
            p = FlatRingPoint(
                s=float(rng.uniform(-2 * m.quarter_K + 0.2, 2 * m.quarter_K - 0.2)),
                t=float(rng.uniform(0.05 * kp, 0.6 * dom.t0)),
                phi=float(rng.uniform(-math.pi, math.pi)), modulus=m)
            probes.append(flatring_to_cartesian(p))
    rows = []
    for q in probes:
        row = {"x": q.x, "y": q.y, "z": q.z,
               "value": solve_interior(dom, coeffs, q)}
        if r_star is not None:
            row["direct"] = 1.0 / math.dist(q, r_star)
        rows.append(row)
    _emit(rows, args.format)
    print(f"# parseval_residual={coeffs.parseval_residual!r}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flatring",
        description="Flat-ring cyclide coordinates, Lame functions, and "
                    "fundamental-solution expansions",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eigen", help="simply-periodic Lame eigenvalues")
    p.add_argument("--k", type=float, default=0.5)
    p.add_argument("--family", choices=["Ec", "Es", "ec", "es"], default="Ec")
    p.add_argument("--nu", type=float, default=0.5)
    p.add_argument("--n-range", default="0:4", help="superscript range a:b")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=cmd_eigen)

    p = sub.add_parser("coords", help="coordinate conversions and figure data")
    p.add_argument("mode", choices=["forward", "inverse", "lines"])
    p.add_argument("--k", type=float, default=1.0 / math.sqrt(2.0),
                   help="modulus; the default corresponds to a = 2")
    p.add_argument("--variant", type=int, choices=[1, 2, 3], default=1)
    p.add_argument("--s", type=float, default=0.5)
    p.add_argument("--t", type=float, default=0.5)
    p.add_argument("--phi", type=float, default=0.0)
    p.add_argument("--point", default="0.5,0.0,0.3", help="x,y,z for inverse")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=cmd_coords)

    p = sub.add_parser("green", help="fundamental-solution expansion report")
    p.add_argument("--k", type=float, default=0.5)
    p.add_argument("--point",
                   default="0.72011603046361605,0.22275799214738415,0.15279435659577331",
                   help="inner point x,y,z (default: flat-ring (0.7K, 0.2K', 0.3) at k=0.5)")
    p.add_argument("--point-star",
                   default="0.71857320729349505,-0.39255833227947451,0.79566810056964099",
                   help="outer point x,y,z (default: flat-ring (1.1K, 0.6K', -0.5) at k=0.5)")
    p.add_argument("--m-max", type=int, default=20)
    p.add_argument("--n-max", type=int, default=20)
    p.add_argument("--toroidal", action="store_true",
                   help="use the toroidal-harmonic expansion instead")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=cmd_green)

    p = sub.add_parser("verify", help="run property suites")
    p.add_argument("--suite", choices=[*SUITES, "all"], default="all")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1.0,
                   help="scale factor applied to every tolerance")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("dirichlet", help="interior Dirichlet solve")
    p.add_argument("--k", type=float, default=0.5)
    p.add_argument("--t0", type=float, default=0.4, help="surface parameter in units of K'")
    p.add_argument("--boundary", default="point-source",
                   help="point-source | constant | single-mode | path to CSV grid")
    p.add_argument("--source", default=None, help="x,y,z of the point source")
    p.add_argument("--probes", default=None, help="semicolon-separated x,y,z list")
    p.add_argument("--n-probes", type=int, default=5)
    p.add_argument("--m-max", type=int, default=10)
    p.add_argument("--n-max", type=int, default=10)
    p.add_argument("--n-s", type=int, default=64)
    p.add_argument("--n-phi", type=int, default=48)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=cmd_dirichlet)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
