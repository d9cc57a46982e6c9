"""Self-contained property suites behind the `verify` CLI subcommand.

Each check returns {"check", "residual", "tolerance", "pass"}; a suite
passes when every check does.  Residuals are scaled so the listed tolerance
is meaningful regardless of the sampled magnitudes, and every random grid is
drawn from a seeded generator so runs are reproducible.
"""

from __future__ import annotations

import math

import numpy as np

from . import coords, dirichlet, harmonics, lame, legendre
from .elliptic import Modulus, complete_k, jacobi_imag, jacobi_real, ns2_series_coeffs
from .errors import DomainError

_DEFAULT_K = 0.5


def _check(name: str, residual: float, tolerance: float) -> dict:
    return {
        "check": name,
        "residual": float(residual),
        "tolerance": float(tolerance),
        "pass": bool(residual <= tolerance),
    }


def suite_elliptic(seed: int = 0, tol_scale: float = 1.0) -> list[dict]:
    rng = np.random.default_rng(seed)
    out = []
    worst = 0.0
    for _ in range(200):
        k = rng.uniform(0.05, 0.95)
        u = rng.uniform(-8.0, 8.0)
        m = Modulus.from_k(k)
        t = jacobi_real(u, m)
        worst = max(worst, abs(t.sn ** 2 + t.cn ** 2 - 1.0),
                    abs(t.dn ** 2 + k * k * t.sn ** 2 - 1.0))
    out.append(_check("jacobi.pythagorean", worst, 1e-13 * tol_scale))

    m = Modulus.from_k(_DEFAULT_K)
    worst = 0.0
    for u in rng.uniform(-4.0, 4.0, 50):
        a = jacobi_real(u, m)
        b = jacobi_real(u + 4.0 * m.quarter_K, m)
        c = jacobi_real(u + 2.0 * m.quarter_K, m)
        worst = max(worst, abs(a.sn - b.sn), abs(a.cn - b.cn), abs(a.dn - c.dn))
    out.append(_check("jacobi.periodicity", worst, 1e-12 * tol_scale))

    ks = np.linspace(0.05, 0.95, 19)
    kv = [complete_k(k) for k in ks]
    kpv = [complete_k(math.sqrt(1 - k * k)) for k in ks]
    mono = min(np.diff(kv)) > 0.0 and max(np.diff(kpv)) < 0.0
    out.append(_check("complete_k.monotone", 0.0 if mono else 1.0, 0.5))

    worst = 0.0
    for t in rng.uniform(0.0, 0.9 * m.quarter_Kp, 40):
        a = jacobi_imag(t, m)
        b = jacobi_imag(-t, m)
        worst = max(worst, abs(a.sn_im + b.sn_im), abs(a.cn - b.cn), abs(a.dn - b.dn))
    out.append(_check("jacobi_imag.parity", worst, 1e-14 * tol_scale))

    r = ns2_series_coeffs(m, 8)
    out.append(_check("ns2.constant_term", abs(r[0] - 1.0), 1e-15 * tol_scale))
    out.append(_check(
        "ns2.tau2_term",
        abs(r[1] - (1.0 + m.k_prime ** 2) / 3.0),
        1e-13 * tol_scale,
    ))
    return out


def suite_lame(seed: int = 0, tol_scale: float = 1.0) -> list[dict]:
    out = []
    m = Modulus.from_k(_DEFAULT_K)
    worst_bracket = 0.0
    worst_wronskian = 0.0
    worst_sup = 0.0
    for nu in (-0.5, 0.5, 2.5):
        for fam in lame.LameFamily:
            pairs = [lame.eigenpair(fam, nu, n, m) for n in range(5)]
            for p in pairs:
                lo, hi = p.bracket
                margin = max(lo - p.h, p.h - hi, 0.0)
                worst_bracket = max(worst_bracket, margin)
                grid = np.linspace(0.0, 4.0 * m.quarter_K, 40)
                sup = max(lame.eval_e_real(p, float(s)) ** 2 for s in grid)
                worst_sup = max(worst_sup, sup - p.sup_bound)
            sk = lame.second_kind_cached(pairs[2])
            for t in np.linspace(0.1, 0.9, 7) * m.quarter_Kp:
                w = (lame.eval_f_imag(sk, t) * lame.eval_e_imag(pairs[2], t, derivative=True)
                     - lame.eval_e_imag(pairs[2], t) * lame.eval_f_imag(sk, t, derivative=True))
                worst_wronskian = max(worst_wronskian, abs(w - 1.0))
    out.append(_check("lame.bracket", worst_bracket, 1e-8 * tol_scale))
    out.append(_check("lame.sup_bound", worst_sup, 0.0 + 1e-12))
    out.append(_check("lame.wronskian", worst_wronskian, 1e-9 * tol_scale))

    x, w = np.polynomial.legendre.leggauss(192)
    s_nodes = 0.5 * m.quarter_K * (x + 1.0)
    s_w = 0.5 * m.quarter_K * w
    pairs = [lame.eigenpair(lame.LameFamily.ES_ODD, 0.5, n, m) for n in range(6)]
    vals = np.array([[lame.eval_e_real(p, float(s)) for s in s_nodes] for p in pairs])
    gram = (vals * s_w) @ vals.T
    out.append(_check("lame.orthonormal", float(np.max(np.abs(gram - np.eye(6)))),
                      1e-9 * tol_scale))
    return out


def suite_harmonics(seed: int = 0, tol_scale: float = 1.0) -> list[dict]:
    rng = np.random.default_rng(seed)
    out = []
    m = Modulus.from_k(_DEFAULT_K)
    harmonics.warm_cache(m, 10, 10)

    idx = harmonics.HarmonicIndex(m=1, n=2, kind=harmonics.HarmonicKind.GC)
    worst = 0.0
    for _ in range(20):
        q = coords.CartesianPoint(rng.uniform(0.3, 1.2), rng.uniform(-0.5, 0.5),
                                  rng.uniform(0.1, 0.8))
        nrm2 = q.x ** 2 + q.y ** 2 + q.z ** 2
        sig = coords.CartesianPoint(q.x / nrm2, q.y / nrm2, q.z / nrm2)
        gv = harmonics.internal_harmonic(idx, q, m)
        gs = harmonics.internal_harmonic(idx, sig, m)
        worst = max(worst, abs(gs - math.sqrt(nrm2) * gv) / max(abs(gv), 1e-30))
    out.append(_check("harmonics.kelvin", worst, 1e-10 * tol_scale))

    worst = 0.0
    h = 1e-3
    for _ in range(12):
        q = coords.CartesianPoint(rng.uniform(0.35, 1.1), rng.uniform(-0.4, 0.4),
                                  rng.uniform(0.15, 0.7))
        c = harmonics.internal_harmonic(idx, q, m)
        acc = -6.0 * c
        mx = abs(c)
        for d in ((h, 0, 0), (-h, 0, 0), (0, h, 0), (0, -h, 0), (0, 0, h), (0, 0, -h)):
            v = harmonics.internal_harmonic(
                idx, coords.CartesianPoint(q.x + d[0], q.y + d[1], q.z + d[2]), m)
            acc += v
            mx = max(mx, abs(v))
        worst = max(worst, abs(acc) / mx)
    out.append(_check("harmonics.laplacian", worst, 1e-5 * tol_scale))

    K, Kp = m.quarter_K, m.quarter_Kp
    r = coords.flatring_to_cartesian(coords.FlatRingPoint(
        s=0.7 * K, t=0.2 * Kp, phi=0.3, modulus=m))
    rs = coords.flatring_to_cartesian(coords.FlatRingPoint(
        s=1.1 * K, t=0.65 * Kp, phi=-0.5, modulus=m))
    direct = 1.0 / math.dist(r, rs)
    val, _ = harmonics.green_expansion(r, rs, harmonics.Truncation(10, 10), m)
    out.append(_check("harmonics.green", abs(val - direct) / direct, 1e-4 * tol_scale))

    rt = coords.toroidal_to_cartesian(coords.ToroidalPoint(tau=2.0, psi=0.4, phi=0.1))
    rts = coords.toroidal_to_cartesian(coords.ToroidalPoint(tau=1.0, psi=-0.7, phi=0.9))
    direct = 1.0 / math.dist(rt, rts)
    val, _ = harmonics.toroidal_green_expansion(rt, rts, harmonics.Truncation(16, 16))
    out.append(_check("harmonics.toroidal_green", abs(val - direct) / direct,
                      1e-6 * tol_scale))

    rhs = harmonics.addition_theorem_rhs(1, 0.6 * K, 1.3 * K, 0.25 * Kp, 0.65 * Kp, 11, m)
    lhs = legendre.legendre_q(0.5, 0.0, harmonics.flatring_chi(
        0.6 * K, 0.25 * Kp, 1.3 * K, 0.65 * Kp, m))
    out.append(_check("harmonics.addition", abs(rhs - lhs) / abs(lhs), 1e-4 * tol_scale))

    lhs_i, rhs_i = harmonics.integral_relation_check(
        0.5, 0, "c", 0.8 * K, 0.2 * Kp, 0.7 * Kp, m, n_quad=256)
    out.append(_check("harmonics.integral_relation", abs(lhs_i - rhs_i) / abs(rhs_i),
                      1e-7 * tol_scale))
    return out


def suite_dirichlet(seed: int = 0, tol_scale: float = 1.0) -> list[dict]:
    rng = np.random.default_rng(seed)
    out = []
    m = Modulus.from_k(_DEFAULT_K)
    K, Kp = m.quarter_K, m.quarter_Kp
    harmonics.warm_cache(m, 8, 8)
    dom = dirichlet.FlatRingDomain(t0=0.4 * Kp, modulus=m)
    r_star = coords.flatring_to_cartesian(coords.FlatRingPoint(
        s=1.2 * K, t=0.8 * Kp, phi=-0.7, modulus=m))
    coeffs = dirichlet.solve_point_source(dom, r_star, harmonics.Truncation(8, 8),
                                          n_s=64, n_phi=48)
    worst = 0.0
    for _ in range(5):
        p = coords.FlatRingPoint(
            s=rng.uniform(-2 * K + 0.3, 2 * K - 0.3),
            t=rng.uniform(0.05 * Kp, 0.5 * dom.t0),
            phi=rng.uniform(-3.0, 3.0), modulus=m)
        q = coords.flatring_to_cartesian(p)
        u = dirichlet.solve_interior(dom, coeffs, q)
        f = 1.0 / math.dist(q, r_star)
        worst = max(worst, abs(u - f) / abs(f))
    out.append(_check("dirichlet.point_source", worst, 1e-6 * tol_scale))
    out.append(_check("dirichlet.parseval", coeffs.parseval_residual, 1e-6 * tol_scale))

    idx = harmonics.HarmonicIndex(m=1, n=0, kind=harmonics.HarmonicKind.HC)
    r_out = coords.flatring_to_cartesian(coords.FlatRingPoint(
        s=0.9 * K, t=0.8 * Kp, phi=0.5, modulus=m))
    via = dirichlet.external_from_boundary(dom, idx, r_out, n_s=96, n_phi=48)
    direct = harmonics.external_harmonic(idx, r_out, m)
    out.append(_check("dirichlet.integral_representation",
                      abs(via - direct) / abs(direct), 1e-6 * tol_scale))
    return out


def suite_limits(seed: int = 0, tol_scale: float = 1.0) -> list[dict]:
    out = []
    mt = Modulus.from_k(1e-3)
    worst = 0.0
    for sup in range(5):
        fam, nz = lame.family_of_superscript("c", sup)
        p = lame.eigenpair(fam, 0.5, nz, mt)
        worst = max(worst, abs(p.h - sup * sup))
    out.append(_check("limits.eigenvalue", worst, 5e-3 * tol_scale))

    fam, nz = lame.family_of_superscript("c", 2)
    p = lame.eigenpair(fam, 1.5, nz, mt)
    grid = np.linspace(0.0, mt.quarter_K, 30)
    lim = math.sqrt(4.0 / math.pi) * np.cos(2.0 * (0.5 * math.pi - grid))
    vals = np.array([lame.eval_e_real(p, float(s)) for s in grid])
    out.append(_check("limits.eigenfunction", float(np.max(np.abs(vals - lim))),
                      1e-2 * tol_scale))

    rows = harmonics.limit_comparison(1, 2, 1.2, 0.5, 0.4, 5.38, [0.1, 0.03, 0.01])
    diffs = [row["abs_diff"] for row in rows]
    monotone = all(a > b for a, b in zip(diffs, diffs[1:]))
    out.append(_check("limits.flatring_to_toroidal",
                      0.0 if monotone else 1.0, 0.5))
    out.append(_check("limits.final_gap", diffs[-1], 1e-4 * tol_scale))
    return out


SUITES = {
    "elliptic": suite_elliptic,
    "lame": suite_lame,
    "harmonics": suite_harmonics,
    "dirichlet": suite_dirichlet,
    "limits": suite_limits,
}


def run_suites(names: list[str], seed: int = 0, tol_scale: float = 1.0) -> list[dict]:
    checks = []
    for name in names:
        if name not in SUITES:
            raise DomainError(f"unknown suite {name!r}; choose from {sorted(SUITES)} or 'all'")
        checks.extend(SUITES[name](seed=seed, tol_scale=tol_scale))
    return checks
