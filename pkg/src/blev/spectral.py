"""Spectral functions of a branching Lévy model and verdicts for its
moment, integrability and tail conditions.

Notation: ``chi`` is the tilted offspring mean E<e_theta, P>, ``phi`` the
cumulant of the motion, ``kappa = beta*(chi - 1) + phi``.  The offspring
weight X_theta = <e_theta, P> = sum_i exp(theta*S_i) appears in most
conditions.  All functions are pure; infinite values are ``math.inf``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConditionError, DomainError, UnsupportedCondition
from .model import (
    INF,
    BranchingModel,
    FixedConfiguration,
    IidDisplaced,
    Local,
    TwoSidedExponential,
    Zeta,
    _exp,
)

__all__ = [
    "ConditionVerdict",
    "SpectralProfile",
    "ThetaDomain",
    "CONDITIONS",
    "c_p_constant",
    "centering_m",
    "check_condition",
    "chi",
    "find_p_star",
    "find_theta_star",
    "kappa",
    "kappa_double_prime",
    "kappa_prime",
    "moment_Y_theta",
    "offspring_weight_second_moment",
    "phi",
    "sigma_theta_sq",
    "spectral_profile",
    "tail_prefactor",
    "theta_domain",
    "xi_tail",
]

_BISECT_RTOL = 1e-10
_BISECT_MAXITER = 200
_BRACKET_START = 1e-3
_BRACKET_CAP = 1e3


# --------------------------------------------------------------------------
# phi, chi, kappa and derivatives
# --------------------------------------------------------------------------


def _jump_mgf(motion, theta, order=0):
    law = motion.jump_law
    if law is None:
        return 1.0 if order == 0 else 0.0
    return (law.mgf, law.mgf1, law.mgf2)[order](theta)


def phi(model: BranchingModel, theta: float) -> float:
    """log E exp(theta * xi_1) for the simulated motion."""
    m = model.motion
    mj = _jump_mgf(m, theta)
    if mj == INF:
        return INF
    return m.drift * theta + 0.5 * m.diffusion**2 * theta**2 + m.jump_rate * (mj - 1.0)


def _phi_deriv(model, theta, order):
    m = model.motion
    mj = _jump_mgf(m, theta, order)
    if mj == INF:
        return INF
    if order == 1:
        return m.drift + m.diffusion**2 * theta + m.jump_rate * mj
    return m.diffusion**2 + m.jump_rate * mj


def _chi_order(model, theta, order):
    off = model.offspring
    if isinstance(off, Local):
        return off.count.mean if order == 0 else 0.0
    if isinstance(off, IidDisplaced):
        law = off.displacement
        val = (law.mgf, law.mgf1, law.mgf2)[order](theta)
        return INF if val == INF else off.count.mean * val
    pts = off.points
    return math.fsum(s**order * _exp(theta * s) for s in pts)


def chi(model: BranchingModel, theta: float) -> float:
    """E sum_i exp(theta * S_i)."""
    return _chi_order(model, theta, 0)


def kappa(model: BranchingModel, theta: float) -> float:
    """beta*(chi - 1) + phi, +inf outside the finiteness domain."""
    c = chi(model, theta)
    f = phi(model, theta)
    if c == INF or f == INF:
        return INF
    return model.beta * (c - 1.0) + f


def _require_interior(model, theta):
    lo, hi = _finite_interval(model)
    if not lo < theta < hi:
        raise DomainError(f"theta={theta} outside the open finiteness interval ({lo}, {hi}) of kappa")


def kappa_prime(model: BranchingModel, theta: float) -> float:
    _require_interior(model, theta)
    return model.beta * _chi_order(model, theta, 1) + _phi_deriv(model, theta, 1)


def kappa_double_prime(model: BranchingModel, theta: float) -> float:
    _require_interior(model, theta)
    return model.beta * _chi_order(model, theta, 2) + _phi_deriv(model, theta, 2)


# --------------------------------------------------------------------------
# Domain of finiteness and special points
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ThetaDomain:
    """Theta = (0, theta_plus) or (0, theta_plus]."""

    theta_plus: float
    closed: bool
    description: str

    def __contains__(self, theta):
        if theta <= 0:
            return False
        return theta < self.theta_plus or (self.closed and theta == self.theta_plus)

    def interior(self, theta) -> bool:
        return 0 < theta < self.theta_plus


def _abscissae(model):
    """Right and left MGF abscissae contributed by each family."""
    right, left = [], []
    m = model.motion
    if m.jump_law is not None:
        right.append(("jump law", m.jump_law.right_abscissa))
        left.append(("jump law", m.jump_law.left_abscissa))
    if isinstance(model.offspring, IidDisplaced):
        d = model.offspring.displacement
        right.append(("displacement law", d.right_abscissa))
        left.append(("displacement law", d.left_abscissa))
    return right, left


def _finite_interval(model):
    right, left = _abscissae(model)
    hi = min([a for _, a in right], default=INF)
    lo = -min([a for _, a in left], default=INF)
    return lo, hi


def theta_domain(model: BranchingModel) -> ThetaDomain:
    right, _ = _abscissae(model)
    finite = [(who, a) for who, a in right if a < INF]
    if not finite:
        return ThetaDomain(INF, False, "all MGFs entire: Theta = (0, inf)")
    who, a = min(finite, key=lambda x: x[1])
    # exponential tails: the MGF diverges at its rate, so the endpoint is excluded
    return ThetaDomain(a, False, f"Theta = (0, {a:g}), open at {a:g} ({who} exponential rate)")


def _search_cap(theta_plus):
    if theta_plus == INF:
        return _BRACKET_CAP
    return min(theta_plus - 1e-9 * max(1.0, theta_plus), _BRACKET_CAP)


def _bisect(f, lo, hi):
    flo = f(lo)
    for _ in range(_BISECT_MAXITER):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo <= _BISECT_RTOL * abs(mid) * 0.5:
            break
    return 0.5 * (lo + hi)


def _boundary_gap(model, theta):
    return theta * kappa_prime(model, theta) - kappa(model, theta)


def find_theta_star(model: BranchingModel) -> Optional[float]:
    """Root of theta*kappa'(theta) = kappa(theta) in the interior of Theta, or None."""
    cap = _search_cap(theta_domain(model).theta_plus)
    lo = _BRACKET_START
    if lo >= cap:
        return None
    if _boundary_gap(model, lo) >= 0:
        return None
    hi = lo
    while True:
        nxt = min(2 * hi, cap)
        if _boundary_gap(model, nxt) > 0:
            return _bisect(lambda x: _boundary_gap(model, x), hi, nxt)
        if nxt >= cap:
            return None
        hi = nxt


def find_p_star(model: BranchingModel, theta: float) -> Optional[float]:
    """Root p > 1 of kappa(p*theta) = p*kappa(theta), or None."""
    dom = theta_domain(model)
    if not dom.interior(theta):
        raise DomainError(f"theta={theta} not in the interior of Theta ({dom.description})")
    k = kappa(model, theta)

    def h(p):
        return kappa(model, p * theta) - p * k

    pcap = _search_cap(dom.theta_plus / theta) if dom.theta_plus < INF else _BRACKET_CAP
    d = 1e-3
    while h(1 + d) >= 0:
        d *= 0.5
        if d < 1e-12:
            return None
    lo = 1 + d
    if lo >= pcap:
        return None
    while True:
        nxt = min(1 + 2 * (lo - 1), pcap)
        if h(nxt) > 0:
            return _bisect(h, lo, nxt)
        if nxt >= pcap:
            return None
        lo = nxt


@dataclass(frozen=True)
class SpectralProfile:
    theta_grid: np.ndarray
    kappa: np.ndarray
    kappa1: np.ndarray
    kappa2: np.ndarray
    theta_plus: float
    theta_star: Optional[float]
    notes: str


def spectral_profile(model: BranchingModel, theta_grid) -> SpectralProfile:
    grid = np.sort(np.asarray(theta_grid, dtype=float))
    if np.any(grid <= 0):
        raise DomainError("theta grid must be positive")
    dom = theta_domain(model)
    k0, k1, k2 = [], [], []
    for th in grid:
        k0.append(kappa(model, th))
        if dom.interior(th):
            k1.append(kappa_prime(model, th))
            k2.append(kappa_double_prime(model, th))
        else:
            k1.append(INF)
            k2.append(INF)
    ts = find_theta_star(model)
    notes = dom.description + ("; no boundary point" if ts is None else f"; theta* = {ts:.10g}")
    return SpectralProfile(grid, np.array(k0), np.array(k1), np.array(k2), dom.theta_plus, ts, notes)


# --------------------------------------------------------------------------
# Closed-form constants
# --------------------------------------------------------------------------


def moment_Y_theta(model: BranchingModel, theta: float, r: float) -> float:
    """E Y^r for Y = exp(-kappa(theta)*tau + theta*xi_tau), tau ~ Exp(beta)."""
    if r == 0:
        return 1.0
    denom = model.beta + r * kappa(model, theta) - phi(model, r * theta)
    if not denom > 0 or math.isnan(denom):
        return INF
    return model.beta / denom


def offspring_weight_second_moment(model: BranchingModel, theta: float) -> float:
    """E <e_theta, P>^2."""
    off = model.offspring
    if isinstance(off, Local):
        return off.count.second_moment
    if isinstance(off, IidDisplaced):
        c = off.count
        m2, m1 = off.displacement.mgf(2 * theta), off.displacement.mgf(theta)
        if INF in (m2, m1, c.second_moment):
            return INF
        return c.mean * m2 + (c.second_moment - c.mean) * m1 * m1
    return math.fsum(_exp(theta * s) for s in off.points) ** 2


def sigma_theta_sq(model: BranchingModel, theta: float) -> float:
    """Variance of the limit of the additive martingale (needs H2)."""
    v = check_condition(model, "H2", theta=theta)
    if not v.holds:
        raise ConditionError(f"sigma_theta^2 undefined: {v.detail}", clause="H2")
    num = model.beta * (offspring_weight_second_moment(model, theta) - chi(model, 2 * theta))
    return num / (2 * kappa(model, theta) - kappa(model, 2 * theta)) - 1.0


def _require_tail_regime(model, theta, p):
    v = check_condition(model, "tailW", theta=theta, p=p)
    if not v.holds:
        raise ConditionError(v.detail, clause="tailW")


def tail_prefactor(model: BranchingModel, theta: float, p: float) -> float:
    """(beta + p kappa(theta) - phi(p theta)) / (p kappa(theta) - kappa(p theta))."""
    _require_tail_regime(model, theta, p)
    k, kp = kappa(model, theta), kappa(model, p * theta)
    return (model.beta + p * k - phi(model, p * theta)) / (p * k - kp)


def c_p_constant(model: BranchingModel, theta: float, p: float) -> float:
    """Scale constant of the stable fluctuation limit; Gamma(1-p) < 0 on (1, 2)."""
    pref = tail_prefactor(model, theta, p)
    g = math.gamma(1.0 - p)
    val = (-g * pref) ** (1.0 / p)
    if not math.isfinite(val):
        raise ConditionError(f"c_p overflows at p={p} (pole of Gamma at p=2)", clause="tailW")
    return val


def centering_m(model: BranchingModel, t: float) -> float:
    """c_* t - 3/(2 theta_*) log t with c_* = kappa(theta_*)/theta_*."""
    if not t > 0:
        raise ValueError("centering needs t > 0")
    ts = find_theta_star(model)
    if ts is None:
        raise ConditionError("no boundary point theta_* for this model", clause="theta_star")
    return kappa(model, ts) / ts * t - 1.5 / ts * math.log(t)


def xi_tail(model: BranchingModel, theta: float):
    """Regularly varying tail of Xi_theta = Y_theta * <e_theta, P>.

    Returns ``(p, l)`` with P(Xi_theta > x) ~ l x^{-p}, p in (1, 2), or None
    when the offspring weight is light-tailed (or its index falls outside
    (1, 2)).  Precondition for stable limits: ``check_condition('tailW')``.
    """
    off = model.offspring
    if isinstance(off, FixedConfiguration):
        return None
    count_tail = off.count.tail()
    if isinstance(off, Local):
        tail = count_tail
    else:
        disp = off.displacement
        disp_tail = disp.exp_tail(theta) if isinstance(disp, TwoSidedExponential) else None
        cands = []
        if count_tail is not None:
            cands.append((count_tail[0], count_tail[1] * disp.mgf(theta) ** count_tail[0]))
        if disp_tail is not None:
            cands.append((disp_tail[0], disp_tail[1] * off.count.mean))
        if not cands:
            return None
        p = min(c[0] for c in cands)
        tail = (p, math.fsum(c[1] for c in cands if c[0] == p))
    if tail is None:
        return None
    p, c = tail
    if not 1 < p < 2:
        return None
    ey = moment_Y_theta(model, theta, p)
    if ey == INF:
        return None
    return p, c * ey


# --------------------------------------------------------------------------
# Condition verdicts
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ConditionVerdict:
    condition_id: str
    holds: bool
    detail: str

    def __bool__(self):
        return self.holds


def _weight_moment_finite(model, theta, r, log_power=0.0):
    """Is E <e_theta,P>^r (log_+ <e_theta,P>)^log_power finite?  (r >= 1)"""
    off = model.offspring
    if isinstance(off, FixedConfiguration):
        return True
    if isinstance(off, Local):
        return off.count.moment_finite(r, log_power)
    # iid displacements: the sum has the r-th (log) moment iff N and e^{theta S} do
    return off.count.moment_finite(r, log_power) and off.displacement.mgf(r * theta) < INF


def _tilted_moment_finite(model, theta):
    """E sum |S_i|^r e^{theta S_i} and the jump integral are finite (any r >= 0)."""
    # polynomial factors never change finiteness for the catalog: only the
    # exponential abscissae matter, and theta must be strictly below them
    lo, hi = _finite_interval(model)
    return lo < theta < hi


class _Clauses:
    def __init__(self, cid):
        self.cid = cid
        self.failed = []
        self.passed = []

    def require(self, ok, text):
        (self.passed if ok else self.failed).append(text)
        return ok

    def verdict(self):
        if self.failed:
            return ConditionVerdict(self.cid, False, "violated: " + "; ".join(self.failed))
        return ConditionVerdict(self.cid, True, "holds: " + "; ".join(self.passed))


def _theta_in(model, theta, c):
    dom = theta_domain(model)
    return c.require(theta in dom, f"theta={theta:g} in Theta ({dom.description})")


def _cond_f_moment(model, theta, r=0.0, **_):
    c = _Clauses("f_moment")
    if _theta_in(model, theta, c):
        c.require(kappa(model, theta) < INF, "kappa(theta) < inf")
        c.require(_tilted_moment_finite(model, theta),
                  f"int_{{|y|>1}} f(y) n(dy) < inf and E sum f(S_i) < inf for f = |x|^{r:g} e^(theta x)")
    return c.verdict()


def _cond_kappa_prime(model, theta, **_):
    c = _Clauses("kappa_prime")
    if _theta_in(model, theta, c):
        c.require(_tilted_moment_finite(model, theta),
                  "E sum |S_i| e^(theta S_i) < inf and int_{|y|>1} |y| e^(theta y) n(dy) < inf")
    return c.verdict()


def _ui_clauses(model, theta, c):
    if not _theta_in(model, theta, c):
        return False
    if not c.require(_tilted_moment_finite(model, theta), "kappa'(theta) well defined"):
        return False
    ok1 = c.require(_boundary_gap(model, theta) < 0, "theta kappa'(theta) < kappa(theta)")
    ok2 = c.require(_weight_moment_finite(model, theta, 1.0, 1.0),
                    "E <e_theta,P> log_+ <e_theta,P> < inf")
    return ok1 and ok2


def _cond_ui(model, theta, **_):
    c = _Clauses("UI")
    _ui_clauses(model, theta, c)
    return c.verdict()


def _cond_wtp(model, theta, p, **_):
    c = _Clauses("wtp")
    if _theta_in(model, theta, c) and c.require(p > 1, "p > 1"):
        c.require(phi(model, p * theta) < INF, "phi(p theta) < inf")
        c.require(_weight_moment_finite(model, theta, p), f"E <e_theta,P>^{p:g} < inf")
    return c.verdict()


def _hp_clauses(model, theta, p, c):
    ok1 = c.require(kappa(model, p * theta) < p * kappa(model, theta), "kappa(p theta) < p kappa(theta)")
    ok2 = c.require(_weight_moment_finite(model, theta, p), f"E <e_theta,P>^{p:g} < inf")
    return ok1 and ok2


def _cond_hp(model, theta, p, **_):
    c = _Clauses("Hp")
    if _theta_in(model, theta, c) and c.require(p > 1, "p > 1"):
        _hp_clauses(model, theta, p, c)
    return c.verdict()


def _cond_kappa_p(model, theta, p, **_):
    c = _Clauses("kappa_p")
    if _theta_in(model, theta, c):
        c.require(kappa(model, p * theta) < p * kappa(model, theta), "kappa(p theta) < p kappa(theta)")
    return c.verdict()


def _cond_lp(model, theta, p, **_):
    c = _Clauses("Lp")
    if c.require(p > 1, "p > 1") and _ui_clauses(model, theta, c):
        _hp_clauses(model, theta, p, c)
    return c.verdict()


def _cond_h2(model, theta, **_):
    c = _Clauses("H2")
    if _theta_in(model, theta, c):
        c.require(kappa(model, 2 * theta) < 2 * kappa(model, theta), "kappa(2 theta) < 2 kappa(theta)")
        c.require(_weight_moment_finite(model, theta, 2.0), "E <e_theta,P>^2 < inf")
    return c.verdict()


def _cond_log_moment(model, theta, r, **_):
    c = _Clauses("log_moment")
    if _theta_in(model, theta, c) and c.require(r > 0, "r > 0"):
        ok = _tilted_moment_finite(model, theta)
        c.require(ok, "kappa'(theta) well defined")
        c.require(ok, f"E sum 1_(S_i>0) S_i^{r:g} e^(theta S_i) < inf and int_1^inf y^{r:g} e^(theta y) n(dy) < inf")
        c.require(_weight_moment_finite(model, theta, 1.0, r),
                  f"E <e_theta,P> (log_+ <e_theta,P>)^{r:g} < inf")
    return c.verdict()


def _cond_moment7(model, theta, r=0.0, **_):
    # L = (log_+)^r gives L*(x) = (log x)^(r+1) / (r+1)
    c = _Clauses("moment7")
    dom = theta_domain(model)
    if c.require(dom.interior(theta), f"theta={theta:g} in the interior of Theta"):
        c.require(_weight_moment_finite(model, theta, 1.0, r + 1.0),
                  f"E <e_theta,P> L*(<e_theta,P>) < inf with L*(x) ~ (log x)^{r + 1:g}")
    return c.verdict()


def _cond_wh(model, theta, p, r=0.0, **_):
    c = _Clauses("WH")
    dom = theta_domain(model)
    if _theta_in(model, theta, c) and c.require(p > 1, "p > 1"):
        c.require(_tilted_moment_finite(model, theta), "kappa'(theta) well defined")
        c.require(dom.interior(p * theta), "p theta in the interior of Theta")
        c.require(kappa(model, p * theta) < p * kappa(model, theta), "kappa(p theta) < p kappa(theta)")
        c.require(_weight_moment_finite(model, theta, p, r),
                  f"E <e_theta,P>^{p:g} (log_+ <e_theta,P>)^{r:g} < inf")
    return c.verdict()


def _spine_v_log_finite(model):
    """E V log_+ V < inf with V = sum 1_(S_i<=0) (-S_i) e^(theta_* S_i)."""
    off = model.offspring
    if isinstance(off, (Local, FixedConfiguration)):
        return True
    # (-s) e^{theta s} <= 1/(e theta) on s <= 0, so V <= N/(e theta_*)
    return off.count.moment_finite(1.0, 1.0)


def _theta_star_clause(model, c):
    ts = find_theta_star(model)
    c.require(ts is not None, "boundary point theta_* exists")
    return ts


def _cond_deriv(model, **_):
    c = _Clauses("deriv")
    ts = _theta_star_clause(model, c)
    if ts is not None:
        c.require(_weight_moment_finite(model, ts, 1.0, 2.0),
                  "E <e_theta*,P> log_+^2 <e_theta*,P> < inf")
        c.require(_spine_v_log_finite(model), "E V log_+ V < inf")
    return c.verdict()


def _cond_h3(model, epsilon=None, **_):
    c = _Clauses("H3")
    ts = _theta_star_clause(model, c)
    if ts is not None:
        eps = 0.5 * ts if epsilon is None else epsilon
        c.require(0 < eps < ts, "epsilon in (0, theta_*)")
        c.require(_tilted_moment_finite(model, ts), "kappa''(theta_*) < inf")
        c.require(_weight_moment_finite(model, ts, 1.0, 2.0),
                  "E <e_theta*,P> log_+^2 <e_theta*,P> < inf")
        c.require(_weight_moment_finite(model, ts - eps, 1.0, 1.0),
                  f"E <e_(theta*-eps),P> log_+ <e_(theta*-eps),P> < inf (eps={eps:g})")
    return c.verdict()


def _cond_max(model, **_):
    c = _Clauses("max")
    ts = _theta_star_clause(model, c)
    if ts is not None:
        c.require(theta_domain(model).interior(ts), "theta_* in the interior of Theta")
        off = model.offspring
        # a Zeta(s) count has E N^(1+delta) < inf exactly for delta < s - 2
        delta = 0.5 * (off.count.s - 2) if isinstance(getattr(off, "count", None), Zeta) else 1.0
        ok = isinstance(off, FixedConfiguration) or off.count.moment_finite(1.0 + delta)
        c.require(ok, f"E N^(1+delta) < inf (delta={delta:g})")
        lo, _ = _finite_interval(model)
        dm = min(1.0, -0.5 * lo)
        c.require(kappa(model, -dm) < INF, f"kappa(-delta_-) < inf (delta_-={dm:g})")
    return c.verdict()


def _cond_tail_boundary(model, theta, **_):
    c = _Clauses("tail_boundary")
    if not _theta_in(model, theta, c):
        return c.verdict()
    dom = theta_domain(model)
    ps = find_p_star(model, theta) if dom.interior(theta) else None
    if c.require(ps is not None, "p_* > 1 with kappa(p_* theta) = p_* kappa(theta) exists"):
        c.require(_weight_moment_finite(model, theta, ps), f"E <e_theta,P>^p_* < inf (p_*={ps:g})")
        c.require(_tilted_moment_finite(model, ps * theta),
                  "int_{y>1} y e^(p_* theta y) n(dy) < inf and E sum (S_i v 0) e^(p_* theta S_i) < inf")
    return c.verdict()


def _cond_tailw(model, theta, p, **_):
    c = _Clauses("tailW")
    dom = theta_domain(model)
    if _theta_in(model, theta, c):
        c.require(1 < p < 2, f"p={p:g} in (1, 2)")
        c.require(dom.interior(p * theta), "p theta in the interior of Theta")
        c.require(kappa(model, p * theta) < p * kappa(model, theta), "kappa(p theta) < p kappa(theta)")
        c.require(_tilted_moment_finite(model, theta), "kappa'(theta) well defined")
    return c.verdict()


CONDITIONS = {
    "f_moment": _cond_f_moment,
    "kappa_prime": _cond_kappa_prime,
    "UI": _cond_ui,
    "LLogL": _cond_ui,
    "wtp": _cond_wtp,
    "Hp": _cond_hp,
    "kappa_p": _cond_kappa_p,
    "Lp": _cond_lp,
    "H2": _cond_h2,
    "log_moment": _cond_log_moment,
    "moment7": _cond_moment7,
    "WH": _cond_wh,
    "deriv": _cond_deriv,
    "H3": _cond_h3,
    "max": _cond_max,
    "tail_boundary": _cond_tail_boundary,
    "tailW": _cond_tailw,
}


def check_condition(model: BranchingModel, condition_id: str, params=None, **kw) -> ConditionVerdict:
    """Decide a named moment/integrability condition analytically.

    ``params`` (or keyword arguments) supply ``theta``, ``p``, ``r`` or
    ``epsilon`` as the condition requires.
    """
    try:
        fn = CONDITIONS[condition_id]
    except KeyError:
        raise UnsupportedCondition(
            f"unsupported condition {condition_id!r}; known: {sorted(CONDITIONS)}"
        ) from None
    args = dict(params or {})
    args.update(kw)
    try:
        v = fn(model, **args)
    except TypeError as exc:
        raise ValueError(f"condition {condition_id!r}: missing parameter ({exc})") from None
    if v.condition_id != condition_id:
        v = ConditionVerdict(condition_id, v.holds, v.detail)
    return v
