"""Simply-periodic Lame functions of the first and second kind.

The eigenproblem E'' + (h - nu(nu+1) k^2 sn^2(s,k)) E = 0 on [0, K] splits
into four Sturm-Liouville families by boundary conditions.  Eigenvalues are
located by shooting: bisection on the Pruefer phase (monotone in h, its
target encodes the zero count), then a secant polish on the high-accuracy
boundary residual.  Eigenfunctions are stored as Chebyshev interpolants on
[0, K] and extended everywhere by parity and (anti)periodicity.

Integrations use a fixed-step RK8 kernel (DOP853 tableau) with the potential
precomputed at every stage abscissa, vectorized across a whole batch of
eigenvalues at once; step counts are chosen from the largest local frequency
so each sweep lands near machine accuracy.

On the imaginary axis the equation becomes W'' = (h + nu(nu+1) k^2 sc^2(t,k')) W.
Solutions grow roughly like exp(int sqrt(q)), so they are represented by
growth-limited piecewise Chebyshev panels.  Odd-parity values are stored as
the real representative W(t) = E(it)/i with W'(0) = E'(0); downstream
products always pair matching representatives, which reproduces the
complex-convention results exactly.

The second-kind function belongs to the exponent nu+1 at the regular
singular point t = K' (tau = K' - t = 0).  It is built from the even
Frobenius series there, continued by integration, and scaled so that
F(it) dE(it)/dt - E(it) dF(it)/dt = 1 in real-representative form.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import chebyshev as _cheb
from scipy.integrate._ivp.rk import DOP853 as _DOP853

from .elliptic import Modulus, _sncndn, ns2_series_coeffs
from .errors import BracketError, ConvergenceError, DomainError, PoleError

_C = _DOP853.C[:12].copy()
_A = _DOP853.A[:12, :12].copy()
_B = _DOP853.B.copy()
_A_ROWS = [np.ascontiguousarray(_A[i, :i]) for i in range(12)]

_STEPS_PER_RAD = 12.0       # high-accuracy sweeps: lambda * h <= 1/12
_STEPS_PER_RAD_PHASE = 4.0  # Pruefer sweeps only need ~1e-9
_CHEB_NODES = 161
_PANEL_DEG = 32
_PANEL_LOG_GROWTH = 4.0
_IMAG_T_CAP = 1.0 - 2e-6    # fraction of K' where imaginary-axis values give up
_OVERFLOW = 1e250
_FROBENIUS_TERMS = 64


class LameFamily(enum.Enum):
    """The four boundary-condition families on [0, K]."""

    EC_EVEN = "Ec-even"  # E'(0) = E'(K) = 0, eigenvalues a^(2n)
    EC_ODD = "Ec-odd"    # E(0) = 0, E'(K) = 0, eigenvalues a^(2n+1)
    ES_ODD = "Es-odd"    # E'(0) = 0, E(K) = 0, eigenvalues b^(2n+1)
    ES_EVEN = "Es-even"  # E(0) = E(K) = 0,     eigenvalues b^(2n+2)

    @property
    def kind(self) -> str:
        """'c' for the Ec families (eigenvalues a), 's' for Es (eigenvalues b)."""
        return "c" if self in (LameFamily.EC_EVEN, LameFamily.EC_ODD) else "s"

    @property
    def even_at_zero(self) -> bool:
        return self in (LameFamily.EC_EVEN, LameFamily.ES_ODD)

    @property
    def vanishes_at_k(self) -> bool:
        """True when the boundary condition at s = K is E(K) = 0."""
        return self.kind == "s"

    @property
    def reflect_k_sign(self) -> float:
        """Sign in E(2K - s) = sign * E(s): + for Ec, - for Es."""
        return 1.0 if self.kind == "c" else -1.0

    def superscript(self, n: int) -> int:
        """Paper-style superscript for zero count n in (0, K)."""
        if self is LameFamily.EC_EVEN:
            return 2 * n
        if self is LameFamily.EC_ODD or self is LameFamily.ES_ODD:
            return 2 * n + 1
        return 2 * n + 2


def family_of_superscript(kind: str, superscript: int) -> tuple[LameFamily, int]:
    """Map ('c'|'s', superscript) to (family, zero count)."""
    if kind == "c":
        if superscript < 0:
            raise DomainError("Ec superscript must be >= 0")
        if superscript % 2 == 0:
            return LameFamily.EC_EVEN, superscript // 2
        return LameFamily.EC_ODD, (superscript - 1) // 2
    if kind == "s":
        if superscript < 1:
            raise DomainError("Es superscript must be >= 1")
        if superscript % 2 == 1:
            return LameFamily.ES_ODD, (superscript - 1) // 2
        return LameFamily.ES_EVEN, (superscript - 2) // 2
    raise DomainError(f"kind must be 'c' or 's', got {kind!r}")


def eigenvalue_bracket(family: LameFamily, nu: float, n: int, m: Modulus) -> tuple[float, float]:
    """Two-sided eigenvalue bounds for the zero-count-n member of a family."""
    big_n = family.superscript(n)
    base = (math.pi * big_n / (2.0 * m.quarter_K)) ** 2
    shift = nu * (nu + 1.0) * m.k * m.k
    lo, hi = (base, base + shift) if nu >= 0.0 else (base + shift, base)
    return lo, hi


# --- potential caches ------------------------------------------------------

_SN2_CACHE: dict[float, np.ndarray] = {}


def _sn2_coeffs(m: Modulus) -> np.ndarray:
    """Chebyshev coefficients of sn(s,k)^2 on [0, K]; cached per modulus."""
    c = _SN2_CACHE.get(m.k)
    if c is None:
        deg = 128
        x = 0.5 * m.quarter_K * (1.0 - np.cos(np.pi * np.arange(deg + 1) / deg))
        vals = np.array([_sncndn(float(s), m.k)[0] ** 2 for s in x])
        c = _cheb.chebfit(2.0 * x / m.quarter_K - 1.0, vals, deg)
        _SN2_CACHE[m.k] = c
    return c


def _sn2_on(m: Modulus, s: np.ndarray) -> np.ndarray:
    return _cheb.chebval(2.0 * s / m.quarter_K - 1.0, _sn2_coeffs(m))


_SC2_CACHE: dict[float, tuple[np.ndarray, list[np.ndarray]]] = {}


def _sc2_panels(m: Modulus) -> tuple[np.ndarray, list[np.ndarray]]:
    """Piecewise Chebyshev data for sc(t,k')^2 on [0, K'), refined toward K'."""
    cached = _SC2_CACHE.get(m.k)
    if cached is None:
        kp = m.quarter_Kp
        edges = [0.0, 0.5 * kp]
        while kp - edges[-1] > 5e-7 * kp:
            edges.append(kp - 0.5 * (kp - edges[-1]))
        deg = 40
        coeff_list = []
        for lo, hi in zip(edges[:-1], edges[1:]):
            x = lo + 0.5 * (hi - lo) * (1.0 - np.cos(np.pi * np.arange(deg + 1) / deg))
            vals = np.empty(deg + 1)
            for i, t in enumerate(x):
                sn, cn, _ = _sncndn(float(t), m.k_prime)
                vals[i] = (sn / cn) ** 2
            coeff_list.append(_cheb.chebfit((2.0 * x - (lo + hi)) / (hi - lo), vals, deg))
        cached = (np.array(edges), coeff_list)
        _SC2_CACHE[m.k] = cached
    return cached


def _sc2_on(m: Modulus, t: np.ndarray) -> np.ndarray:
    """sc(t,k')^2 on an array of |t| values below the panel cap."""
    edges, coeffs = _sc2_panels(m)
    t = np.abs(np.asarray(t, dtype=float))
    if np.any(t > edges[-1]):
        raise PoleError("sc^2 evaluation too close to the pole at K'")
    idx = np.clip(np.searchsorted(edges, t, side="right") - 1, 0, len(coeffs) - 1)
    out = np.empty_like(t)
    for j in np.unique(idx):
        sel = idx == j
        lo, hi = edges[j], edges[j + 1]
        out[sel] = _cheb.chebval((2.0 * t[sel] - (lo + hi)) / (hi - lo), coeffs[j])
    return out


# --- fixed-step RK8 kernels ------------------------------------------------


def _rk_sweep(q_stages: np.ndarray, h_steps: np.ndarray, y0: np.ndarray, deriv, record_at=None):
    """March y' = deriv(q, y) across steps of size h_steps[j].

    q_stages[j, i] holds the precomputed potential at stage i of step j.
    When record_at is given (sorted step indices), returns the list of states
    after those steps; otherwise returns the final state.
    """
    y = y0.copy()
    nsteps = len(h_steps)
    stages = np.empty((12, y.size))
    records = []
    rec = set(record_at.tolist()) if record_at is not None else None
    for j in range(nsteps):
        h = h_steps[j]
        qrow = q_stages[j]
        stages[0] = deriv(qrow[0], y)
        for i in range(1, 12):
            tmp = y + h * (_A_ROWS[i] @ stages[:i])
            stages[i] = deriv(qrow[i], tmp)
        y = y + h * (_B @ stages)
        if rec is not None and j in rec:
            records.append(y.copy())
    return records if rec is not None else y


@dataclass
class _RealGrid:
    """Uniform step grid on [0, K] with stage-point sn^2 precomputed."""

    h: float
    q_stages: np.ndarray  # (nsteps, 12) of sn^2 values


_REAL_GRID_CACHE: dict[tuple, _RealGrid] = {}


def _real_grid(m: Modulus, nsteps: int) -> _RealGrid:
    key = (m.k, nsteps)
    g = _REAL_GRID_CACHE.get(key)
    if g is None:
        h = m.quarter_K / nsteps
        t0 = np.arange(nsteps) * h
        stage_t = t0[:, None] + h * _C[None, :]
        g = _RealGrid(h=h, q_stages=_sn2_on(m, stage_t))
        _REAL_GRID_CACHE[key] = g
    return g


# --- eigenpair objects ------------------------------------------------------


class _ImagPanels:
    """Growth-limited piecewise Chebyshev panels for a batch of solutions of
    W'' = (h + c sc^2(t,k')) W, one column per eigenvalue."""

    def __init__(self, m: Modulus, coef: float, h: np.ndarray, t0: float, state0: np.ndarray):
        self.m = m
        self.coef = coef
        self.h = np.asarray(h, dtype=float)
        self.t_start = float(t0)
        self.t_built = float(t0)
        self.state = np.asarray(state0, dtype=float)  # (2M,) = [W..., W'...]
        self.edges: list[float] = [float(t0)]
        self.coeff_w: list[np.ndarray] = []   # per panel: (M, deg+1)
        self.coeff_wp: list[np.ndarray] = []

    def _lambda(self, t: float) -> float:
        q = float(np.max(np.abs(self.h))) + abs(self.coef) * float(_sc2_on(self.m, np.array([t]))[0])
        return math.sqrt(max(q, 1.0))

    def _deriv_factory(self):
        mlen = self.h.size
        h_vec = self.h
        coef = self.coef

        def deriv(q, y):
            out = np.empty_like(y)
            out[:mlen] = y[mlen:]
            out[mlen:] = (h_vec + coef * q) * y[:mlen]
            return out

        return deriv

    def _build_panel(self, t_from: float, t_to: float) -> None:
        mlen = self.h.size
        lam = self._lambda(max(abs(t_from), abs(t_to)))
        if lam * abs(t_to - t_from) > 4.0 * _PANEL_LOG_GROWTH:
            # too oscillatory for one Chebyshev panel; split
            mid = 0.5 * (t_from + t_to)
            self._build_panel(t_from, mid)
            self._build_panel(mid, t_to)
            return
        deg = _PANEL_DEG
        # integrate segment-by-segment between Chebyshev-Lobatto nodes so the
        # recorded states interpolate with perfect conditioning
        nodes = t_from + (t_to - t_from) * 0.5 * (
            1.0 - np.cos(np.pi * np.arange(deg + 1) / deg)
        )
        t_list: list[float] = []
        h_list: list[float] = []
        seg_ends: list[int] = []
        for a, b in zip(nodes[:-1], nodes[1:]):
            gap = b - a
            sub = max(2, int(math.ceil(abs(gap) * lam * _STEPS_PER_RAD)))
            hh = gap / sub
            for j in range(sub):
                t_list.append(a + j * hh)
                h_list.append(hh)
            seg_ends.append(len(t_list) - 1)
        t_arr = np.asarray(t_list)
        h_arr = np.asarray(h_list)
        q_stages = _sc2_on(self.m, t_arr[:, None] + h_arr[:, None] * _C[None, :])
        states = _rk_sweep(q_stages, h_arr, self.state, self._deriv_factory(),
                           record_at=np.asarray(seg_ends))
        ys = np.vstack([self.state[None, :], np.array(states)])  # (deg+1, 2M)
        lo, hi = (t_from, t_to) if t_to > t_from else (t_to, t_from)
        x = (2.0 * nodes - (lo + hi)) / (hi - lo)
        fit = _cheb.chebfit(x, ys, deg)  # (deg+1, 2M)
        self.coeff_w.append(fit[:, :mlen].T.copy())
        self.coeff_wp.append(fit[:, mlen:].T.copy())
        self.edges.append(t_to)
        self.state = ys[-1]
        self.t_built = t_to
        if float(np.max(np.abs(self.state))) > _OVERFLOW:
            raise PoleError("imaginary-axis solution overflow approaching K'")

    def extend_to(self, t_req: float) -> None:
        cap = self.m.quarter_Kp * _IMAG_T_CAP
        if t_req < 0.0 or t_req > cap:
            raise PoleError(f"imaginary-axis argument t = {t_req!r} outside [0, {cap!r}]")
        lo_cov = min(self.t_start, self.t_built)
        hi_cov = max(self.t_start, self.t_built)
        if lo_cov - 1e-15 <= t_req <= hi_cov + 1e-15:
            return
        # the final panel overshoots the request rather than being cut short,
        # so repeated nearby requests cannot spawn degenerate slivers
        kp = self.m.quarter_Kp
        if t_req > hi_cov:
            while t_req > self.t_built + 1e-15:
                probe = min(self.t_built + _PANEL_LOG_GROWTH / self._lambda(self.t_built), t_req)
                lam = self._lambda(probe)
                step = _PANEL_LOG_GROWTH / lam
                if self.t_built + step < t_req:
                    t_next = self.t_built + step
                else:
                    # overshoot just enough to avoid sliver panels, never far
                    # past the request (the frequency explodes toward K')
                    over = min(0.25 * step, 0.02 * kp, 0.5 * max(cap - t_req, 0.0))
                    t_next = min(max(t_req, self.t_built + over), cap)
                self._build_panel(self.t_built, t_next)
        else:
            while t_req < self.t_built - 1e-15:
                lam = self._lambda(self.t_built)
                step = _PANEL_LOG_GROWTH / lam
                if self.t_built - step > t_req:
                    t_next = self.t_built - step
                else:
                    over = min(0.25 * step, 0.02 * kp)
                    t_next = max(min(t_req, self.t_built - over), 0.0)
                self._build_panel(self.t_built, t_next)

    def eval(self, col: int, t: float, derivative: bool = False) -> float:
        e = self.edges
        ascending = e[-1] >= e[0]
        for j in range(len(self.coeff_w)):
            lo, hi = (e[j], e[j + 1]) if ascending else (e[j + 1], e[j])
            if lo - 1e-13 <= t <= hi + 1e-13:
                x = (2.0 * t - (lo + hi)) / (hi - lo)
                c = self.coeff_wp[j][col] if derivative else self.coeff_w[j][col]
                return float(_cheb.chebval(x, c))
        raise DomainError(f"t = {t!r} outside the built panel range")


@dataclass(frozen=True)
class LameEigenpair:
    """One simply-periodic Lame eigenfunction, normalized on [0, K]."""

    family: LameFamily
    nu: float
    n: int  # zeros in (0, K)
    h: float
    modulus: Modulus
    norm_scale: float
    boundary_data: tuple[float, float]  # (E(0), E'(0)) after normalization
    bracket: tuple[float, float]
    _cheb_e: np.ndarray = field(repr=False, compare=False)
    _cheb_de: np.ndarray = field(repr=False, compare=False)
    _imag: _ImagPanels = field(repr=False, compare=False)
    _imag_col: int = field(repr=False, compare=False, default=0)

    @property
    def superscript(self) -> int:
        return self.family.superscript(self.n)

    @property
    def sup_bound(self) -> float:
        """Uniform bound: E(s)^2 <= 2/K + 2 k |nu|^(1/2) (nu+1)^(1/2)."""
        return 2.0 / self.modulus.quarter_K + 2.0 * self.modulus.k * math.sqrt(
            abs(self.nu) * (self.nu + 1.0)
        )


def _phase_setup(family: LameFamily, n: int) -> tuple[float, float]:
    theta0 = 0.5 * math.pi if family.even_at_zero else 0.0
    if family.vanishes_at_k:
        target = (n + 1.0) * math.pi
    else:
        target = 0.5 * math.pi + n * math.pi
    return theta0, target


def _solve_mixed(specs: list[tuple[LameFamily, int]], nu: float, m: Modulus) -> list[LameEigenpair]:
    """Solve a mixed batch of eigenpairs (possibly several families) at one
    (nu, k); every integration sweep is shared across the whole batch."""
    if nu < -0.5:
        raise DomainError(f"nu must be >= -1/2, got {nu!r}")
    if any(n < 0 for _, n in specs):
        raise DomainError("zero counts must be non-negative")
    specs = sorted(set((fam, int(n)) for fam, n in specs),
                   key=lambda fn: (fn[0].value, fn[1]))
    k_big = m.quarter_K
    coef = nu * (nu + 1.0) * m.k * m.k
    mlen = len(specs)

    even0 = np.array([fam.even_at_zero for fam, _ in specs])
    vanish = np.array([fam.vanishes_at_k for fam, _ in specs])
    theta0 = np.where(even0, 0.5 * math.pi, 0.0)
    targets = np.array([_phase_setup(fam, n)[1] for fam, n in specs])
    brackets = [eigenvalue_bracket(fam, nu, n, m) for fam, n in specs]
    pad = np.array([1e-7 * (1.0 + abs(lo) + abs(hi)) + 1e-9 for lo, hi in brackets])
    lo = np.array([b[0] for b in brackets]) - pad
    hi = np.array([b[1] for b in brackets]) + pad

    lam_max = math.sqrt(max(float(np.max(hi)) + max(-coef, 0.0), 1.0))
    n_phase = max(96, int(math.ceil(k_big * lam_max * _STEPS_PER_RAD_PHASE)))
    n_fine = max(224, int(math.ceil(k_big * lam_max * _STEPS_PER_RAD)))
    grid_phase = _real_grid(m, n_phase)
    grid_fine = _real_grid(m, n_fine)
    qc_phase = coef * grid_phase.q_stages
    qc_fine = coef * grid_fine.q_stages

    def theta_at_k(h_vec: np.ndarray) -> np.ndarray:
        # scaled Pruefer angle: E = r sin(theta), E' = r w cos(theta) with
        # w = sqrt(max(h, 1)); keeps the derivative Lipschitz scale at w
        w = np.sqrt(np.maximum(h_vec, 1.0))
        hw = h_vec / w

        def deriv(qc, th):
            st = np.sin(th)
            ct = np.cos(th)
            return w * ct * ct + (hw - qc / w) * st * st

        return _rk_sweep(qc_phase, np.full(n_phase, grid_phase.h), theta0.copy(), deriv)

    y0_shoot = np.zeros(2 * mlen)
    y0_shoot[:mlen] = np.where(even0, 1.0, 0.0)
    y0_shoot[mlen:] = np.where(even0, 0.0, 1.0)

    def residual(h_vec: np.ndarray) -> np.ndarray:
        def deriv(qc, y):
            out = np.empty_like(y)
            out[:mlen] = y[mlen:]
            out[mlen:] = (qc - h_vec) * y[:mlen]
            return out

        end = _rk_sweep(qc_fine, np.full(n_fine, grid_fine.h), y0_shoot, deriv)
        return np.where(vanish, end[:mlen], end[mlen:])

    g_lo = theta_at_k(lo) - targets
    g_hi = theta_at_k(hi) - targets
    bad = (g_lo > 0.0) | (g_hi < 0.0)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise BracketError(
            f"{specs[i][0]} nu={nu} n={specs[i][1]}: no sign change on the bracket",
            lo=float(lo[i]), hi=float(hi[i]),
        )

    # bisection on the monotone phase isolates each eigenvalue well inside
    # its family gap (the deep-well phase profile is steep near eigenvalues,
    # so derivative-free bracketing is the robust choice here)
    blo, bhi = lo.copy(), hi.copy()
    for _ in range(12):
        mid = 0.5 * (blo + bhi)
        below = (theta_at_k(mid) - targets) < 0.0
        blo = np.where(below, mid, blo)
        bhi = np.where(below, bhi, mid)

    # Illinois iteration on the machine-accuracy boundary residual inside a
    # widened window around the phase bracket (residual roots are the family
    # eigenvalues; the window is far narrower than the eigenvalue gap)
    wid = bhi - blo
    wa = blo - 4.0 * wid
    wb = bhi + 4.0 * wid
    ra = residual(wa)
    rb = residual(wb)
    for _ in range(4):
        bad = ra * rb > 0.0
        if not np.any(bad):
            break
        grow = 8.0 * (wb - wa)
        wa = np.where(bad, wa - grow, wa)
        wb = np.where(bad, wb + grow, wb)
        ra = np.where(bad, residual(wa), ra)
        rb = np.where(bad, residual(wb), rb)
    if np.any(ra * rb > 0.0):
        i = int(np.argmax(ra * rb > 0.0))
        raise BracketError(
            f"{specs[i][0]} nu={nu} n={specs[i][1]}: no residual sign change",
            lo=float(wa[i]), hi=float(wb[i]),
        )
    scale_h = 1.0 + np.abs(wb)
    # secant steps from the two most recent evaluations, kept honest by the
    # sign bracket (fall back to false position when secant leaves it)
    x_prev, r_prev = wa.copy(), ra.copy()
    x_cur, r_cur = wb.copy(), rb.copy()
    for _ in range(14):
        if np.all(wb - wa <= 4e-15 * scale_h):
            break
        denom = r_cur - r_prev
        ok = np.abs(denom) > 0.0
        hc = np.where(ok, x_cur - r_cur * (x_cur - x_prev) / np.where(ok, denom, 1.0),
                      0.5 * (wa + wb))
        fp_den = rb - ra
        fp = np.where(np.abs(fp_den) > 0.0, wb - rb * (wb - wa) / np.where(np.abs(fp_den) > 0.0, fp_den, 1.0), 0.5 * (wa + wb))
        inside = (hc > wa) & (hc < wb)
        hc = np.where(inside, hc, fp)
        inside = (hc > wa) & (hc < wb)
        hc = np.where(inside, hc, 0.5 * (wa + wb))
        rc = residual(hc)
        c_replaces_b = rc * rb > 0.0
        wa = np.where(c_replaces_b, wa, hc)
        ra = np.where(c_replaces_b, ra, rc)
        wb = np.where(c_replaces_b, hc, wb)
        rb = np.where(c_replaces_b, rc, rb)
        x_prev, r_prev = x_cur, r_cur
        x_cur, r_cur = hc, rc
    h_final = np.where(np.abs(ra) < np.abs(rb), wa, wb)

    # a wrong zero count would put theta off by a multiple of pi; for deeply
    # localized states d(theta)/dh is exponentially large at the eigenvalue,
    # so only gross deviations are meaningful here
    theta_err = np.abs(theta_at_k(h_final) - targets)
    if np.any(theta_err > 1e-2):
        i = int(np.argmax(theta_err))
        raise ConvergenceError(
            f"{specs[i][0]} nu={nu} n={specs[i][1]}: Pruefer phase check failed "
            f"(|theta - target| = {float(theta_err[i])!r})"
        )

    # final sweep on a Chebyshev-node-aligned grid, recording E, E', int E^2
    nodes = 0.5 * k_big * (1.0 - np.cos(np.pi * np.arange(_CHEB_NODES) / (_CHEB_NODES - 1)))
    t_list = []
    h_list = []
    seg_end_steps = []
    for a, b in zip(nodes[:-1], nodes[1:]):
        gap = b - a
        sub = max(1, int(math.ceil(gap * lam_max * _STEPS_PER_RAD)))
        hh = gap / sub
        for j in range(sub):
            t_list.append(a + j * hh)
            h_list.append(hh)
        seg_end_steps.append(len(t_list) - 1)
    t_arr = np.array(t_list)
    h_arr = np.array(h_list)
    q_stages = _sn2_on(m, t_arr[:, None] + h_arr[:, None] * _C[None, :])

    def deriv_full(q, y):
        out = np.empty_like(y)
        e = y[:mlen]
        out[:mlen] = y[mlen:2 * mlen]
        out[mlen:2 * mlen] = (coef * q - h_final) * e
        out[2 * mlen:] = e * e
        return out

    y0 = np.zeros(3 * mlen)
    y0[:mlen] = np.where(even0, 1.0, 0.0)
    y0[mlen:2 * mlen] = np.where(even0, 0.0, 1.0)
    recs = _rk_sweep(q_stages, h_arr, y0, deriv_full, record_at=np.array(seg_end_steps))
    ys = np.vstack([y0[None, :], np.array(recs)])  # (n_nodes, 3M)
    end = ys[-1]

    x_cheb = 2.0 * nodes / k_big - 1.0
    sigmas = end[2 * mlen:]
    scales = 1.0 / np.sqrt(sigmas)
    edges = np.where(vanish, end[mlen:2 * mlen], end[:mlen])
    # orient so E(K) > 0 (Ec) or E'(K) < 0 (Es), matching the k -> 0 limits
    flip = np.where(vanish, edges * scales > 0.0, edges * scales < 0.0)
    scales = np.where(flip, -scales, scales)

    e0_vec = np.where(even0, scales, 0.0)
    de0_vec = np.where(even0, 0.0, scales)
    imag_state = np.concatenate([e0_vec, de0_vec])
    imag = _ImagPanels(m, coef, h_final, 0.0, imag_state)

    # one least-squares Chebyshev fit for the whole batch
    fit_e = _cheb.chebfit(x_cheb, ys[:, :mlen] * scales[None, :], _CHEB_NODES - 1)
    fit_de = _cheb.chebfit(x_cheb, ys[:, mlen:2 * mlen] * scales[None, :], _CHEB_NODES - 1)

    pairs = []
    for i, (fam, n) in enumerate(specs):
        pairs.append(LameEigenpair(
            family=fam, nu=nu, n=n, h=float(h_final[i]), modulus=m,
            norm_scale=float(scales[i]),
            boundary_data=(float(e0_vec[i]), float(de0_vec[i])),
            bracket=brackets[i], _cheb_e=np.ascontiguousarray(fit_e[:, i]),
            _cheb_de=np.ascontiguousarray(fit_de[:, i]),
            _imag=imag, _imag_col=i,
        ))
    return pairs


def solve_eigenpairs(family: LameFamily, nu: float, ns: list[int], m: Modulus) -> list[LameEigenpair]:
    """Solve a batch of eigenpairs of one family at common (nu, k)."""
    return _solve_mixed([(family, n) for n in ns], nu, m)


def solve_eigenpair(family: LameFamily, nu: float, n: int, m: Modulus) -> LameEigenpair:
    """Solve a single eigenpair (see solve_eigenpairs)."""
    return _solve_mixed([(family, n)], nu, m)[0]


_EIGEN_CACHE: dict[tuple, LameEigenpair] = {}
_SECOND_CACHE: dict[tuple, "LameSecondKind"] = {}


def eigenpair(family: LameFamily, nu: float, n: int, m: Modulus) -> LameEigenpair:
    """Memoized eigenpair lookup; builds on miss."""
    key = (family, float(nu), int(n), m.k)
    pair = _EIGEN_CACHE.get(key)
    if pair is None:
        pair = solve_eigenpair(family, nu, n, m)
        _EIGEN_CACHE[key] = pair
    return pair


def warm_eigenpairs(family: LameFamily, nu: float, ns: list[int], m: Modulus) -> None:
    """Batch-solve and memoize all missing eigenpairs of one (family, nu, k)."""
    warm_mixed([(family, n) for n in ns], nu, m)


def warm_mixed(specs: list[tuple[LameFamily, int]], nu: float, m: Modulus) -> None:
    """Batch-solve and memoize a mixed-family batch at one (nu, k)."""
    missing = [fn for fn in set(specs)
               if (fn[0], float(nu), int(fn[1]), m.k) not in _EIGEN_CACHE]
    if not missing:
        return
    for pair in _solve_mixed(missing, nu, m):
        _EIGEN_CACHE[(pair.family, float(nu), pair.n, m.k)] = pair


def clear_caches() -> None:
    _EIGEN_CACHE.clear()
    _SECOND_CACHE.clear()


def eval_e_real(p: LameEigenpair, s: float, derivative: bool = False) -> float:
    """E(s) (or E'(s)) at any real s via parity and (anti)periodicity."""
    k_big = p.modulus.quarter_K
    period = 4.0 * k_big
    s1 = s - period * round(s / period)
    sign = 1.0
    dsign = 1.0
    if s1 < 0.0:
        p0 = 1.0 if p.family.even_at_zero else -1.0
        s1 = -s1
        sign *= p0
        dsign *= -p0
    if s1 > k_big:
        rk = p.family.reflect_k_sign
        s1 = 2.0 * k_big - s1
        sign *= rk
        dsign *= -rk
    x = 2.0 * s1 / k_big - 1.0
    if derivative:
        return sign * dsign * float(_cheb.chebval(x, p._cheb_de))
    return sign * float(_cheb.chebval(x, p._cheb_e))


def eval_e_imag(p: LameEigenpair, t: float, derivative: bool = False) -> float:
    """Real representative W(t) of E(it) (or its t-derivative).

    Even-parity families store W = E(it); odd-parity families store
    W = E(it)/i, so W(0) = 0 and W'(0) = E'(0).  Extended to t < 0 by parity.
    """
    sign = 1.0
    dsign = 1.0
    if t < 0.0:
        p0 = 1.0 if p.family.even_at_zero else -1.0
        t = -t
        sign *= p0
        dsign *= -p0
    if t == 0.0:
        return p.boundary_data[1] if derivative else p.boundary_data[0]
    p._imag.extend_to(t)
    val = p._imag.eval(p._imag_col, t, derivative=derivative)
    return (sign * dsign if derivative else sign) * val


@dataclass(frozen=True)
class LameSecondKind:
    """Second-kind companion with unit Wronskian against the first kind."""

    base: LameEigenpair
    frobenius_coeffs: np.ndarray  # of tau^(2p), scaled by wronskian_scale
    wronskian_scale: float
    tau0: float
    indicial_degenerate: bool
    _cont: _ImagPanels = field(repr=False, compare=False)
    _cont_col: int = field(repr=False, compare=False, default=0)


_NS2_SERIES_CACHE: dict[tuple, np.ndarray] = {}


def _ns2_series(m: Modulus, count: int) -> np.ndarray:
    key = (m.k, count)
    r = _NS2_SERIES_CACHE.get(key)
    if r is None:
        r = ns2_series_coeffs(m, count)
        _NS2_SERIES_CACHE[key] = r
    return r


def _frobenius_coeffs(nu: float, h: float, m: Modulus, count: int) -> np.ndarray:
    """Coefficients b_p of the exponent-(nu+1) Frobenius series in tau^(2p)."""
    r = _ns2_series(m, count)
    nn1 = nu * (nu + 1.0)
    a2 = nn1 * r
    a2 = a2.copy()
    a2[1] += h - nn1
    b = np.zeros(count)
    b[0] = 1.0
    rev = a2[::-1]
    for p in range(1, count):
        j = 2.0 * p
        acc = float(rev[count - 1 - p:count - 1] @ b[:p])
        b[p] = acc / (j * (j + 2.0 * nu + 1.0))
    return b


def _series_eval(coeffs: np.ndarray, nu: float, tau: float) -> tuple[float, float]:
    """Value and d/dtau of tau^(nu+1) * sum coeffs[p] tau^(2p)."""
    t2 = tau * tau
    u = 0.0
    du = 0.0
    for p in range(len(coeffs) - 1, 0, -1):
        u = (u + coeffs[p]) * t2
        du = (du + 2.0 * p * coeffs[p]) * t2
    u += coeffs[0]
    du /= tau
    pw = tau ** (nu + 1.0)
    f = pw * u
    df = (nu + 1.0) * pw / tau * u + pw * du
    return f, df


def second_kind(p: LameEigenpair) -> LameSecondKind:
    """Build the Wronskian-normalized second-kind companion of an eigenpair."""
    m = p.modulus
    nu = p.nu
    kp = m.quarter_Kp
    radius = 2.0 * min(m.quarter_K, kp)
    tau0 = min(0.1 * kp, 0.45 * radius)

    b = _frobenius_coeffs(nu, p.h, m, _FROBENIUS_TERMS)
    tail = abs(b[-1]) * tau0 ** (2 * (_FROBENIUS_TERMS - 1))
    f0, _ = _series_eval(b, nu, tau0)
    if not (math.isfinite(tail) and tail <= 1e-12 * abs(f0)):
        raise ConvergenceError(
            f"Frobenius series not converged at handoff radius {tau0!r}",
            attained=tail,
        )

    t1 = kp - tau0
    w_val = eval_e_imag(p, t1)
    w_der = eval_e_imag(p, t1, derivative=True)
    f_tau, df_tau = _series_eval(b, nu, tau0)
    f_t = -df_tau  # d/dt = -d/dtau
    omega = f_tau * w_der - w_val * f_t
    scale = 1.0 / omega

    coef = nu * (nu + 1.0) * m.k * m.k
    cont = _ImagPanels(m, coef, np.array([p.h]), t1,
                       np.array([scale * f_tau, scale * f_t]))
    return LameSecondKind(
        base=p,
        frobenius_coeffs=scale * b,
        wronskian_scale=scale,
        tau0=tau0,
        indicial_degenerate=abs(2.0 * nu + 1.0) < 1e-12,
        _cont=cont,
    )


def warm_second_kind(pairs: list[LameEigenpair]) -> None:
    """Build second-kind companions for a batch of eigenpairs sharing
    (nu, modulus); the continuation panels are shared across the batch."""
    pairs = [p for p in pairs
             if (p.family, float(p.nu), int(p.n), p.modulus.k) not in _SECOND_CACHE]
    if not pairs:
        return
    m = pairs[0].modulus
    nu = pairs[0].nu
    if any(q.modulus.k != m.k or q.nu != nu for q in pairs):
        raise DomainError("warm_second_kind requires a common (nu, modulus) batch")
    kp = m.quarter_Kp
    radius = 2.0 * min(m.quarter_K, kp)
    tau0 = min(0.1 * kp, 0.45 * radius)
    t1 = kp - tau0
    coef = nu * (nu + 1.0) * m.k * m.k

    states = np.zeros(2 * len(pairs))
    h_vec = np.zeros(len(pairs))
    entries = []
    for i, p in enumerate(pairs):
        b = _frobenius_coeffs(nu, p.h, m, _FROBENIUS_TERMS)
        f_tau, df_tau = _series_eval(b, nu, tau0)
        w_val = eval_e_imag(p, t1)
        w_der = eval_e_imag(p, t1, derivative=True)
        f_t = -df_tau
        omega = f_tau * w_der - w_val * f_t
        scale = 1.0 / omega
        states[i] = scale * f_tau
        states[len(pairs) + i] = scale * f_t
        h_vec[i] = p.h
        entries.append((p, b, scale))
    cont = _ImagPanels(m, coef, h_vec, t1, states)
    for i, (p, b, scale) in enumerate(entries):
        sk = LameSecondKind(
            base=p, frobenius_coeffs=scale * b, wronskian_scale=scale,
            tau0=tau0, indicial_degenerate=abs(2.0 * nu + 1.0) < 1e-12,
            _cont=cont, _cont_col=i,
        )
        _SECOND_CACHE[(p.family, float(p.nu), int(p.n), p.modulus.k)] = sk


def second_kind_cached(p: LameEigenpair) -> LameSecondKind:
    key = (p.family, float(p.nu), int(p.n), p.modulus.k)
    sk = _SECOND_CACHE.get(key)
    if sk is None:
        sk = second_kind(p)
        _SECOND_CACHE[key] = sk
    return sk


def eval_f_imag(f: LameSecondKind, t: float, derivative: bool = False) -> float:
    """Normalized second-kind value F(t) (real representative) or dF/dt."""
    kp = f.base.modulus.quarter_Kp
    if not 0.0 < t < kp:
        raise DomainError(f"eval_f_imag requires 0 < t < K', got {t!r}")
    tau = kp - t
    if tau <= f.tau0:
        val, dtau = _series_eval(f.frobenius_coeffs, f.base.nu, tau)
        return -dtau if derivative else val
    f._cont.extend_to(t)
    return f._cont.eval(f._cont_col, t, derivative=derivative)
