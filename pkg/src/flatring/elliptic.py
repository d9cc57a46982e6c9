"""Complete elliptic integrals and Jacobi elliptic functions.

Real arguments are handled by the descending Landen (AGM) transformation,
DLMF 22.20(ii); purely imaginary arguments go through the Jacobi imaginary
transformation, DLMF 22.6(iv), so every returned quantity is real.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PoleError

_EPS = float(np.finfo(float).eps)
POLE_GUARD = 1e-10  # arguments closer than this to a pole raise PoleError
_MAX_AGM = 32


def agm(a: float, b: float) -> float:
    """Arithmetic-geometric mean of two positive numbers."""
    for _ in range(_MAX_AGM):
        if abs(a - b) <= 2 * _EPS * abs(a):
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return 0.5 * (a + b)


def complete_k(k: float) -> float:
    """Complete elliptic integral of the first kind K(k), modulus convention."""
    if not 0.0 <= k < 1.0:
        raise DomainError(f"complete_k requires 0 <= k < 1, got {k!r}")
    kp = math.sqrt((1.0 - k) * (1.0 + k))
    return math.pi / (2.0 * agm(1.0, kp))


@dataclass(frozen=True)
class Modulus:
    """Elliptic modulus k with the derived quantities k', K(k), K(k')."""

    k: float
    k_prime: float
    quarter_K: float
    quarter_Kp: float

    def __post_init__(self):
        if not 0.0 < self.k < 1.0:
            raise DomainError(f"modulus must satisfy 0 < k < 1, got {self.k!r}")
        if abs(self.k * self.k + self.k_prime * self.k_prime - 1.0) > 1e-14:
            raise DomainError("k and k_prime are inconsistent")
        if not (self.quarter_K > 0.0 and self.quarter_Kp > 0.0):
            raise DomainError("quarter periods must be positive")

    @classmethod
    def from_k(cls, k: float) -> "Modulus":
        if not 0.0 < k < 1.0:
            raise DomainError(f"modulus must satisfy 0 < k < 1, got {k!r}")
        kp = math.sqrt((1.0 - k) * (1.0 + k))
        return cls(k=k, k_prime=kp, quarter_K=complete_k(k), quarter_Kp=complete_k(kp))

    @property
    def a(self) -> float:
        """Algebraic coordinate parameter a = 1/k**2."""
        return 1.0 / (self.k * self.k)

    @property
    def b_ring(self) -> float:
        """Inner radius b = (1-k)/k' of the focal annulus."""
        return (1.0 - self.k) / self.k_prime


@dataclass(frozen=True)
class JacobiTriple:
    """Values (sn, cn, dn) at a common real argument and modulus."""

    sn: float
    cn: float
    dn: float


@dataclass(frozen=True)
class JacobiImag:
    """Real representatives on the imaginary axis.

    For u = i*t: sn(it,k) = i*sn_im, cn(it,k) = cn, dn(it,k) = dn, with
    sn_im = sc(t,k'), cn = nc(t,k'), dn = dc(t,k').  The Pythagorean
    identities become cn**2 - sn_im**2 = 1 and dn**2 - k**2*sn_im**2 = 1.
    """

    sn_im: float
    cn: float
    dn: float


def _sncndn(u: float, k: float) -> tuple[float, float, float]:
    """Jacobi sn, cn, dn of real u at modulus k in [0, 1)."""
    if k == 0.0:
        return math.sin(u), math.cos(u), 1.0
    k2 = k * k
    kp2 = 1.0 - k2

    a = [1.0]
    b = math.sqrt(kp2)
    c = [k]
    while abs(c[-1]) > _EPS * a[-1] and len(a) < _MAX_AGM:
        an = 0.5 * (a[-1] + b)
        bn = math.sqrt(a[-1] * b)
        c.append(0.5 * (a[-1] - b))
        a.append(an)
        b = bn
    n = len(a) - 1

    # reduce by the full period 4K for phase accuracy at large |u|
    quarter = math.pi / (2.0 * a[n])
    period = 4.0 * quarter
    u = u - period * round(u / period)

    phi = (2.0 ** n) * a[n] * u
    for i in range(n, 0, -1):
        arg = c[i] / a[i] * math.sin(phi)
        arg = min(1.0, max(-1.0, arg))
        phi = 0.5 * (phi + math.asin(arg))
    sn = math.sin(phi)
    cn = math.cos(phi)
    # dn**2 = cn**2 + k'**2 sn**2 avoids cancellation in 1 - k**2 sn**2
    dn = math.sqrt(cn * cn + kp2 * sn * sn)
    return sn, cn, dn


def jacobi_real(u: float, m: Modulus) -> JacobiTriple:
    """sn, cn, dn at real argument u and modulus m.k."""
    if not math.isfinite(u):
        raise DomainError("jacobi_real requires finite u")
    sn, cn, dn = _sncndn(u, m.k)
    return JacobiTriple(sn=sn, cn=cn, dn=dn)


def jacobi_imag(t: float, m: Modulus) -> JacobiImag:
    """Real representatives of sn, cn, dn at the purely imaginary argument it.

    Poles sit at t = +-K'; arguments inside the guard band raise PoleError.
    """
    if not math.isfinite(t):
        raise DomainError("jacobi_imag requires finite t")
    kp = m.quarter_Kp
    if abs(t) >= kp - POLE_GUARD:
        raise PoleError(f"jacobi_imag pole at |t| = K' = {kp!r}, got t = {t!r}")
    sn, cn, dn = _sncndn(t, m.k_prime)
    return JacobiImag(sn_im=sn / cn, cn=1.0 / cn, dn=dn / cn)


def glaisher(t: float, kp: float, code: str) -> float:
    """Glaisher-notation quotient (sc, ns, nd, dc, cd, ds, cs, ...) at modulus kp.

    Raises PoleError when t is within the guard band of a zero of the
    denominator function: sn vanishes at even multiples of K(kp), cn at odd
    multiples.
    """
    if len(code) != 2 or any(ch not in "scdn" for ch in code):
        raise DomainError(f"unknown Glaisher code {code!r}")
    if not 0.0 <= kp < 1.0:
        raise DomainError(f"glaisher requires modulus in [0, 1), got {kp!r}")
    num_c, den_c = code
    if den_c in "sc":
        kq = complete_k(kp) if kp > 0.0 else 0.5 * math.pi
        y = t / kq
        nearest = 2.0 * round(0.5 * y) if den_c == "s" else 2.0 * round(0.5 * (y - 1.0)) + 1.0
        if abs(y - nearest) * kq < POLE_GUARD:
            raise PoleError(f"glaisher {code} pole near t = {t!r}")
    sn, cn, dn = _sncndn(t, kp)
    values = {"s": sn, "c": cn, "d": dn, "n": 1.0}
    den = values[den_c]
    if den == 0.0:
        raise PoleError(f"glaisher {code} pole at t = {t!r}")
    return values[num_c] / den


_NS2_MAX_ORDER = 64


def sn_series(kappa: float, count: int) -> np.ndarray:
    """Odd Maclaurin coefficients of sn(tau, kappa): sn = sum c[i] tau**(2i+1).

    Generated from sn'' = -(1 + kappa**2) sn + 2 kappa**2 sn**3.
    """
    m = kappa * kappa
    c = np.zeros(count)
    c[0] = 1.0
    for i in range(count - 1):
        j = 2 * i + 1
        # coefficient of tau**j in sn**3 uses c[0..i-1] only
        cube = 0.0
        for p in range(i):
            for q in range(i - p):
                cube += c[p] * c[q] * c[i - 1 - p - q]
        c[i + 1] = (-(1.0 + m) * c[i] + 2.0 * m * cube) / ((j + 2.0) * (j + 1.0))
    return c


def ns2_series_coeffs(m: Modulus, count: int) -> np.ndarray:
    """Even Taylor coefficients of tau**2 * ns(tau, k')**2 about tau = 0.

    The function is analytic and even with constant term 1; coefficient p
    multiplies tau**(2p).  At most 64 coefficients are supported.
    """
    if count < 1:
        raise DomainError("ns2_series_coeffs requires count >= 1")
    if count > _NS2_MAX_ORDER:
        raise DomainError(f"ns2_series_coeffs supports at most {_NS2_MAX_ORDER} coefficients")
    s = sn_series(m.k_prime, count + 1)
    # g = (sn/tau)**2, an even series with g[0] = 1
    g = np.zeros(count)
    for i in range(count):
        g[i] = sum(s[p] * s[i - p] for p in range(i + 1))
    # r = 1/g by the reciprocal recurrence
    r = np.zeros(count)
    r[0] = 1.0
    for i in range(1, count):
        r[i] = -sum(g[j] * r[i - j] for j in range(1, i + 1))
    return r
