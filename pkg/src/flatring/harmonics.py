"""Internal and external flat-ring harmonics, toroidal harmonics, the
double-series expansions of 1/|r - r*|, the half-integer addition theorem,
the Lame integral relations, and the small-k comparison of flat-ring and
toroidal expansion terms.

Harmonics are evaluated in the real-representative convention of the lame
module, so every quadruple product of Lame factors appearing in an expansion
is real; azimuthal pairing of +-m terms is folded into cosine sums.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .coords import (
    CartesianPoint,
    FlatRingPoint,
    ToroidalPoint,
    Variant,
    cartesian_to_flatring,
    cartesian_to_toroidal,
)
from .elliptic import Modulus, _sncndn, jacobi_imag
from .errors import DomainError, OrderingError
from .lame import (
    LameFamily,
    eigenpair,
    eval_e_imag,
    eval_e_real,
    eval_f_imag,
    family_of_superscript,
    second_kind_cached,
    warm_mixed,
    warm_second_kind,
)
from .legendre import gamma_ratio, legendre_p, legendre_q

_AXIS_GUARD = 1e-28  # on x^2 + y^2; external harmonics stay bounded near the axis


class HarmonicKind(enum.Enum):
    GC = "Gc"  # internal, cosine family
    GS = "Gs"  # internal, sine family
    HC = "Hc"  # external, cosine family
    HS = "Hs"  # external, sine family

    @property
    def internal(self) -> bool:
        return self in (HarmonicKind.GC, HarmonicKind.GS)

    @property
    def lame_kind(self) -> str:
        return "c" if self in (HarmonicKind.GC, HarmonicKind.HC) else "s"


@dataclass(frozen=True)
class HarmonicIndex:
    """Azimuthal order m, superscript n, and harmonic kind.

    The sine families carry superscripts >= 1; the stored n is the
    superscript itself, and the degree parameter is nu = |m| - 1/2.
    """

    m: int
    n: int
    kind: HarmonicKind

    def __post_init__(self):
        if self.kind.lame_kind == "s" and self.n < 1:
            raise DomainError("sine-family harmonics require superscript n >= 1")
        if self.kind.lame_kind == "c" and self.n < 0:
            raise DomainError("cosine-family harmonics require superscript n >= 0")

    @property
    def nu(self) -> float:
        return abs(self.m) - 0.5

    @property
    def family(self) -> LameFamily:
        return family_of_superscript(self.kind.lame_kind, self.n)[0]

    @property
    def zero_count(self) -> int:
        return family_of_superscript(self.kind.lame_kind, self.n)[1]


@dataclass
class Truncation:
    """Double-series limits plus the tail estimate of the last run."""

    m_max: int
    n_max: int
    tail_estimate: float = 0.0

    def __post_init__(self):
        if self.m_max < 0 or self.n_max < 0:
            raise DomainError("truncation limits must be non-negative")


def warm_cache(m: Modulus, m_max: int, n_max: int, second: bool = True) -> None:
    """Solve and memoize every eigenpair the (m_max, n_max) expansion needs.

    Builds per-(family, nu) batches; with second=True the second-kind
    companions are constructed as well.
    """
    for order in range(m_max + 1):
        nu = order - 0.5
        specs = [family_of_superscript("c", sup) for sup in range(n_max + 1)]
        specs += [family_of_superscript("s", sup) for sup in range(1, n_max + 2)]
        warm_mixed(specs, nu, m)
        if second:
            warm_second_kind([eigenpair(fam, nu, nz, m) for fam, nz in specs])


def _flatring_of(q: CartesianPoint, m: Modulus) -> tuple[FlatRingPoint, float]:
    r2 = q.x * q.x + q.y * q.y
    if r2 <= _AXIS_GUARD:
        raise DomainError("harmonic undefined on the z-axis")
    p = cartesian_to_flatring(q, m, Variant.V1)
    return p, r2 ** -0.25


def internal_harmonic(idx: HarmonicIndex, q: CartesianPoint, m: Modulus) -> complex:
    """Internal flat-ring harmonic Gc/Gs at a Cartesian point.

    Real-representative convention: for odd-parity Lame factors the returned
    value differs from the complex-convention one by a constant factor i,
    which cancels in every internal/external pairing.
    """
    if not idx.kind.internal:
        raise DomainError("internal_harmonic requires a Gc or Gs index")
    p, pref = _flatring_of(q, m)
    pair = eigenpair(idx.family, idx.nu, idx.zero_count, m)
    val = pref * eval_e_real(pair, p.s) * eval_e_imag(pair, p.t)
    return val * complex(math.cos(idx.m * p.phi), math.sin(idx.m * p.phi))


def external_harmonic(idx: HarmonicIndex, q: CartesianPoint, m: Modulus) -> complex:
    """External flat-ring harmonic Hc/Hs at a Cartesian point off the closed
    focal annulus b^2 <= x^2 + y^2 <= 1/b^2, z = 0."""
    if idx.kind.internal:
        raise DomainError("external_harmonic requires an Hc or Hs index")
    r = math.hypot(q.x, q.y)
    b = m.b_ring
    if abs(q.z) < 1e-10 and b - 1e-10 <= r <= 1.0 / b + 1e-10:
        raise DomainError("external harmonic undefined on the focal annulus")
    p, pref = _flatring_of(q, m)
    pair = eigenpair(idx.family, idx.nu, idx.zero_count, m)
    sk = second_kind_cached(pair)
    val = pref * eval_e_real(pair, p.s) * eval_f_imag(sk, p.t)
    return val * complex(math.cos(idx.m * p.phi), math.sin(idx.m * p.phi))


def _pair_values(m: Modulus, order: int, sup_c: int, s: float, s_star: float,
                 t: float, t_star: float) -> float:
    """One (|m|, n) block of the expansion summand:
    Ec(s)Ec(s*)Wc(t)Fc(t*) + Es(s)Es(s*)Ws(t)Fs(t*) with superscripts n, n+1."""
    nu = order - 0.5
    fam_c, nz_c = family_of_superscript("c", sup_c)
    pc = eigenpair(fam_c, nu, nz_c, m)
    fc = second_kind_cached(pc)
    total = (eval_e_real(pc, s) * eval_e_real(pc, s_star)
             * eval_e_imag(pc, t) * eval_f_imag(fc, t_star))
    fam_s, nz_s = family_of_superscript("s", sup_c + 1)
    ps = eigenpair(fam_s, nu, nz_s, m)
    fs = second_kind_cached(ps)
    total += (eval_e_real(ps, s) * eval_e_real(ps, s_star)
              * eval_e_imag(ps, t) * eval_f_imag(fs, t_star))
    return total


def _tail_from_shells(shells: list[float]) -> float:
    """Geometric extrapolation of the remaining tail from the last shells."""
    mags = [abs(s) for s in shells[-3:]]
    if len(mags) < 2 or mags[-1] == 0.0:
        return 0.0
    ratios = [mags[i + 1] / mags[i] for i in range(len(mags) - 1) if mags[i] > 0.0]
    if not ratios:
        return 0.0
    p = min(max(ratios), 0.95)
    return mags[-1] * p / (1.0 - p)


def green_expansion(
    r: CartesianPoint,
    r_star: CartesianPoint,
    tr: Truncation,
    m: Modulus,
    return_shells: bool = False,
):
    """Partial double series for 1/|r - r*| in flat-ring harmonics.

    Requires t(r) < t(r*) (the inner point first).  Returns (value,
    tail_estimate); with return_shells=True a list of per-n shell sums is
    appended to the result tuple.
    """
    p, pref = _flatring_of(r, m)
    p_star, pref_star = _flatring_of(r_star, m)
    if not p.t < p_star.t:
        raise OrderingError(
            f"expansion requires t < t*; got t = {p.t!r}, t* = {p_star.t!r}"
        )
    dphi = p.phi - p_star.phi
    shells = []
    total = 0.0
    m_tail = 0.0
    for sup in range(tr.n_max + 1):
        shell = 0.0
        last = prev = 0.0
        for order in range(tr.m_max + 1):
            w = 1.0 if order == 0 else 2.0
            term = _pair_values(m, order, sup, p.s, p_star.s, p.t, p_star.t)
            shell += w * math.cos(order * dphi) * term
            prev, last = last, 2.0 * abs(term)
        shell *= 0.5 * pref * pref_star
        shells.append(shell)
        total += shell
        # azimuthal tail of this shell, extrapolated geometrically
        if prev > 0.0 and last > 0.0:
            rho = min(last / prev, 0.95)
            m_tail += 0.5 * pref * pref_star * last * rho / (1.0 - rho)
    tail = _tail_from_shells(shells) + m_tail
    tr.tail_estimate = tail
    if return_shells:
        return total, tail, shells
    return total, tail


def toroidal_harmonic(m_order: int, n: int, p: ToroidalPoint, external: bool = False) -> complex:
    """Toroidal harmonic sqrt(cosh tau - cos psi) X(cosh tau) e^{i n psi} e^{i m phi},
    with X = Q (internal) or P (external) of half-integer degree |n| - 1/2."""
    d = math.cosh(p.tau) - math.cos(p.psi)
    nu = abs(n) - 0.5
    z = math.cosh(p.tau)
    x_val = legendre_p(nu, float(m_order), z) if external else legendre_q(nu, float(m_order), z)
    phase = n * p.psi + m_order * p.phi
    return math.sqrt(d) * x_val * complex(math.cos(phase), math.sin(phase))


def toroidal_summand(m_order: int, n: int, tau: float, tau_star: float) -> float:
    """Gamma-weighted radial product of one (m, n) toroidal expansion term."""
    nu = abs(n) - 0.5
    weight = (-1.0) ** abs(m_order) * gamma_ratio(n - m_order + 0.5, n + m_order + 0.5)
    return weight * legendre_q(nu, float(m_order), math.cosh(tau)) * legendre_p(
        nu, float(m_order), math.cosh(tau_star)
    )


def toroidal_green_expansion(
    r: CartesianPoint,
    r_star: CartesianPoint,
    tr: Truncation,
    return_shells: bool = False,
):
    """Partial double series for 1/|r - r*| in toroidal harmonics.

    Requires tau(r) > tau(r*).  The +-m and +-n quadrants are folded into
    cosine sums; the Gamma-ratio weight makes the folding exact.
    """
    p = cartesian_to_toroidal(r)
    p_star = cartesian_to_toroidal(r_star)
    if not p.tau > p_star.tau:
        raise OrderingError(
            f"toroidal expansion requires tau > tau*; got {p.tau!r} <= {p_star.tau!r}"
        )
    d = math.cosh(p.tau) - math.cos(p.psi)
    d_star = math.cosh(p_star.tau) - math.cos(p_star.psi)
    pref = math.sqrt(d * d_star) / math.pi
    dpsi = p.psi - p_star.psi
    dphi = p.phi - p_star.phi
    shells = []
    total = 0.0
    for n in range(tr.n_max + 1):
        eps_n = 1.0 if n == 0 else 2.0
        inner = 0.0
        for m_order in range(tr.m_max + 1):
            eps_m = 1.0 if m_order == 0 else 2.0
            inner += eps_m * math.cos(m_order * dphi) * toroidal_summand(
                m_order, n, p.tau, p_star.tau
            )
        shell = pref * eps_n * math.cos(n * dpsi) * inner
        shells.append(shell)
        total += shell
    tail = _tail_from_shells(shells)
    tr.tail_estimate = tail
    if return_shells:
        return total, tail, shells
    return total, tail


def addition_theorem_rhs(
    m_order: int,
    s: float,
    s_star: float,
    t: float,
    t_star: float,
    n_max: int,
    m: Modulus,
) -> float:
    """Lame product series whose limit is Q_{m-1/2}(chi), for 0 < t < t* < K'."""
    if m_order < 0:
        raise DomainError("azimuthal order must be >= 0")
    if not 0.0 < t < t_star < m.quarter_Kp:
        raise OrderingError("addition theorem requires 0 < t < t* < K'")
    total = 0.0
    for sup in range(n_max + 1):
        total += _pair_values(m, m_order, sup, s, s_star, t, t_star)
    return 0.5 * math.pi * total


def flatring_chi(s: float, t: float, s_star: float, t_star: float, m: Modulus) -> float:
    """chi of two flat-ring coordinate pairs via the elliptic product form."""
    k2 = m.k * m.k
    kp2 = m.k_prime * m.k_prime
    sn1, cn1, dn1 = _sncndn(s, m.k)
    sn2, cn2, dn2 = _sncndn(s_star, m.k)
    i1 = jacobi_imag(t, m)
    i2 = jacobi_imag(t_star, m)
    return (
        -k2 * sn1 * sn2 * i1.sn_im * i2.sn_im
        - k2 / kp2 * cn1 * cn2 * i1.cn * i2.cn
        + dn1 * dn2 * i1.dn * i2.dn / kp2
    )


def integral_relation_check(
    nu: float,
    superscript: int,
    kind: str,
    s_star: float,
    t: float,
    t_star: float,
    m: Modulus,
    n_quad: int = 512,
) -> tuple[float, float]:
    """Both sides of the Lame integral relation.

    lhs = integral over (-2K, 2K) of Q_nu(chi(s)) E(s) ds by Gauss-Legendre;
    rhs = 2 pi E(s*) E(it) F(it*), all in real-representative form.  kind is
    'c' or 's'; nu may be any real >= -1/2 (half-integer nu = m - 1/2 gives
    the azimuthal Fourier coefficients of the reciprocal distance).
    """
    if not 0.0 < t < t_star < m.quarter_Kp:
        raise OrderingError("integral relation requires 0 < t < t* < K'")
    fam, nz = family_of_superscript(kind, superscript)
    pair = eigenpair(fam, nu, nz, m)
    sk = second_kind_cached(pair)
    k_big = m.quarter_K
    x, w = np.polynomial.legendre.leggauss(n_quad)
    nodes = 2.0 * k_big * x
    weights = 2.0 * k_big * w
    lhs = 0.0
    for sj, wj in zip(nodes, weights):
        chi = flatring_chi(float(sj), t, s_star, t_star, m)
        lhs += wj * legendre_q(nu, 0.0, chi) * eval_e_real(pair, float(sj))
    rhs = 2.0 * math.pi * eval_e_real(pair, s_star) * eval_e_imag(pair, t) * eval_f_imag(sk, t_star)
    return lhs, rhs


def flatring_summand(
    m_order: int,
    n: int,
    tau: float,
    tau_star: float,
    psi: float,
    psi_star: float,
    m: Modulus,
) -> float:
    """Flat-ring expansion term A_{m,n} in the toroidal-limit parametrization
    s = 2K - psi, t = K' - tau; requires tau > tau* > 0."""
    kp = m.quarter_Kp
    if not 0.0 < tau_star < tau < kp:
        raise OrderingError("flat-ring summand requires 0 < tau* < tau < K'")
    k_big = m.quarter_K
    s, s_star = 2.0 * k_big - psi, 2.0 * k_big - psi_star
    t, t_star = kp - tau, kp - tau_star

    def t_factor(psi_v, tau_v):
        _, cn_p, dn_p = _sncndn(psi_v, m.k)
        sn_t, cn_t, dn_t = _sncndn(tau_v, m.k_prime)
        return (dn_p - cn_p * dn_t) / (m.k_prime * sn_t)

    pref = 0.5 * math.sqrt(t_factor(psi, tau) * t_factor(psi_star, tau_star))
    nu = abs(m_order) - 0.5
    fam_c, nz_c = family_of_superscript("c", n)
    pc = eigenpair(fam_c, nu, nz_c, m)
    fc = second_kind_cached(pc)
    total = (eval_e_real(pc, s) * eval_e_real(pc, s_star)
             * eval_e_imag(pc, t) * eval_f_imag(fc, t_star))
    if n >= 1:
        fam_s, nz_s = family_of_superscript("s", n)
        ps = eigenpair(fam_s, nu, nz_s, m)
        fs = second_kind_cached(ps)
        total += (eval_e_real(ps, s) * eval_e_real(ps, s_star)
                  * eval_e_imag(ps, t) * eval_f_imag(fs, t_star))
    return pref * total


def toroidal_limit_summand(
    m_order: int, n: int, tau: float, tau_star: float, psi: float, psi_star: float
) -> float:
    """Toroidal expansion term B_{m,n} (the k -> 0 limit of A_{m,n})."""
    eps_n = 1.0 if n == 0 else 2.0
    pref = math.sqrt((math.cosh(tau) - math.cos(psi)) * (math.cosh(tau_star) - math.cos(psi_star))) / math.pi
    return (pref * eps_n * math.cos(n * (psi - psi_star))
            * toroidal_summand(abs(m_order), n, tau, tau_star))


def limit_comparison(
    m_order: int,
    n: int,
    tau: float,
    tau_star: float,
    psi: float,
    psi_star: float,
    k_values: list[float],
) -> list[dict]:
    """Table of |A_{m,n}(k) - B_{m,n}| along a sequence of moduli k -> 0."""
    b_val = toroidal_limit_summand(m_order, n, tau, tau_star, psi, psi_star)
    rows = []
    for k in k_values:
        mk = Modulus.from_k(k)
        a_val = flatring_summand(m_order, n, tau, tau_star, psi, psi_star, mk)
        rows.append({"k": k, "A": a_val, "B": b_val, "abs_diff": abs(a_val - b_val)})
    return rows
