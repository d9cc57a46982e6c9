"""Associated Legendre functions on (1, inf) for real degree.

P is evaluated through a Pfaff-transformed Gauss series in (z-1)/(z+1),
which has positive terms and converges for every z > 1; Q through the
hypergeometric series in 1/z**2 (DLMF 14.3.6/14.3.7 conventions).

Phase convention: the defining formula for Q carries a factor e^{i mu pi}.
For integer order m this equals (-1)**m and is kept inside the returned real
value, so connection formulas and Wronskians hold literally with no external
sign bookkeeping.  Non-integer orders of Q are rejected (they are genuinely
complex and never arise here).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.special import gammaln, gammasgn

from .errors import ConvergenceError, DomainError

_MAX_TERMS_2F1 = 100_000
_MAX_TERMS_P = 400_000
_MAX_TERMS_Q = 200_000
_Q_SLOW_Z = 1.05


def _is_integer(x: float, tol: float = 1e-12) -> bool:
    return abs(x - round(x)) <= tol


def gamma_ratio(a: float, b: float) -> float:
    """Gamma(a)/Gamma(b) in log space with sign tracking.

    Returns 0 when Gamma(b) has a pole and Gamma(a) does not; raises
    DomainError when Gamma(a) has a pole.
    """
    a_pole = a <= 0.0 and _is_integer(a)
    b_pole = b <= 0.0 and _is_integer(b)
    if a_pole and not b_pole:
        raise DomainError(f"gamma_ratio: Gamma({a!r}) pole in numerator")
    if b_pole and not a_pole:
        return 0.0
    if a_pole and b_pole:
        # ratio of residues: Gamma(-n+eps)/Gamma(-m+eps) -> (-1)**(n-m) m!/n!
        n, m = int(round(-a)), int(round(-b))
        sign = -1.0 if (n - m) % 2 else 1.0
        return sign * math.exp(gammaln(m + 1) - gammaln(n + 1))
    return gammasgn(a) * gammasgn(b) * math.exp(gammaln(a) - gammaln(b))


def hyp2f1(a: float, b: float, c: float, x: float) -> float:
    """Gauss hypergeometric series 2F1(a, b; c; x) for |x| < 1."""
    if abs(x) >= 1.0:
        raise DomainError(f"hyp2f1 series requires |x| < 1, got {x!r}")
    if c <= 0.0 and _is_integer(c):
        raise DomainError(f"hyp2f1: c = {c!r} is a non-positive integer")
    total = 1.0
    term = 1.0
    for n in range(_MAX_TERMS_2F1):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * x
        total += term
        if term == 0.0 or abs(term) <= 1e-17 * abs(total):
            return total
    raise ConvergenceError(
        f"hyp2f1({a}, {b}; {c}; {x}) did not converge in {_MAX_TERMS_2F1} terms",
        attained=abs(term),
    )


def _positive_series(a: float, b: float, c: float, x: float, max_terms: int, what: str) -> float:
    """Sum 2F1(a,b;c;x) for a,b,c > 0 and 0 <= x < 1 with compensated addition."""
    total = 1.0
    comp = 0.0
    term = 1.0
    for n in range(max_terms):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * x
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        if term <= 1e-17 * total:
            return total
    raise ConvergenceError(
        f"{what} series did not converge in {max_terms} terms",
        attained=term / total,
    )


@dataclass(frozen=True)
class LegendreIndex:
    """Degree/order pair with the Q-construction restriction recorded."""

    degree: float
    order: float = 0.0

    def __post_init__(self):
        s = self.degree + self.order
        if s < 0.0 and _is_integer(s) and round(s) <= -1:
            raise DomainError(
                f"degree + order = {s!r} is a negative integer; Q is undefined there"
            )

    def p(self, z: float) -> float:
        return legendre_p(self.degree, self.order, z)

    def q(self, z: float) -> float:
        return legendre_q(self.degree, self.order, z)


def legendre_p(nu: float, mu: float, z: float) -> float:
    """Associated Legendre function of the first kind P_nu^mu(z), z > 1."""
    if not z > 1.0:
        raise DomainError(f"legendre_p requires z > 1, got {z!r}")
    if mu > 0.0:
        if not _is_integer(mu):
            raise DomainError("legendre_p: positive non-integer order is unsupported")
        m = int(round(mu))
        ratio = gamma_ratio(nu + m + 1.0, nu - m + 1.0)
        return ratio * legendre_p(nu, -float(m), z)
    # mu <= 0: all series parameters are positive for nu >= -1/2
    if nu < -0.5:
        # degree symmetry P_{-nu-1} = P_nu
        nu = -nu - 1.0
    w = (z - 1.0) / (z + 1.0)
    f = _positive_series(nu + 1.0 - mu, nu + 1.0, 1.0 - mu, w, _MAX_TERMS_P, "legendre_p")
    log_pref = (
        -gammaln(1.0 - mu)
        + 0.5 * mu * (math.log(z + 1.0) - math.log(z - 1.0))
        - (nu + 1.0) * math.log(0.5 * (z + 1.0))
    )
    return math.exp(log_pref + math.log(f))


def legendre_q(nu: float, mu: float, z: float) -> float:
    """Associated Legendre function of the second kind Q_nu^mu(z), z > 1.

    Integer order only; the (-1)**m phase is folded into the real value.
    """
    if not z > 1.0:
        raise DomainError(f"legendre_q requires z > 1, got {z!r}")
    if not _is_integer(mu):
        raise DomainError("legendre_q: non-integer order is unsupported (complex-valued)")
    m = int(round(mu))
    s = nu + m
    if s < 0.0 and _is_integer(s) and round(s) <= -1:
        raise DomainError(f"legendre_q undefined: degree + order = {s!r} in -N")
    if m < 0:
        ratio = gamma_ratio(nu + m + 1.0, nu - m + 1.0)
        return ratio * legendre_q(nu, float(-m), z)
    if z < _Q_SLOW_Z:
        raise ConvergenceError(
            f"legendre_q converges too slowly for z = {z!r} < {_Q_SLOW_Z}",
            attained=None,
        )
    x = 1.0 / (z * z)
    a = 0.5 * (nu + m + 1.0)
    b = 0.5 * (nu + m + 2.0)
    c = nu + 1.5
    f = _positive_series(a, b, c, x, _MAX_TERMS_Q, "legendre_q")
    sign = -1.0 if m % 2 else 1.0
    log_pref = (
        0.5 * math.log(math.pi)
        + gammaln(nu + m + 1.0)
        - gammaln(nu + 1.5)
        + 0.5 * m * math.log((z - 1.0) * (z + 1.0))
        - (nu + 1.0) * math.log(2.0)
        - (nu + m + 1.0) * math.log(z)
    )
    return sign * math.exp(log_pref + math.log(f))
