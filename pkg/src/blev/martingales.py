"""Martingale and extremal functionals of population snapshots.

Empty snapshots map to W = 0, D = 0 and an absent maximum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Sequence, Union

import numpy as np

from . import spectral
from .errors import ConditionError, DomainError
from .model import BranchingModel
from .simulator import Snapshot

__all__ = [
    "MartingaleSample",
    "FunctionalSpec",
    "additive_W",
    "derivative_D",
    "maximum_M",
    "extremal_centered",
    "fluctuation",
    "fluctuation_exponent",
    "sample_functionals",
]


@lru_cache(maxsize=256)
def _theta_star(model: BranchingModel) -> Optional[float]:
    return spectral.find_theta_star(model)


@lru_cache(maxsize=1024)
def _checked_kappa(model: BranchingModel, theta: float) -> float:
    if theta not in spectral.theta_domain(model):
        raise DomainError(f"theta={theta} not in Theta ({spectral.theta_domain(model).description})")
    return spectral.kappa(model, theta)


def _positions(snapshot) -> np.ndarray:
    return np.asarray(snapshot.positions, dtype=float)


def _tilted_sum(pos: np.ndarray, theta: float, kt: float) -> float:
    if pos.size == 0:
        return 0.0
    return float(np.exp(theta * pos - kt).sum())


def additive_W(snapshot: Snapshot, model: BranchingModel, theta: float) -> float:
    """W_t(theta) = e^{-kappa(theta) t} sum_u e^{theta z_u(t)}."""
    k = _checked_kappa(model, float(theta))
    return _tilted_sum(_positions(snapshot), theta, k * snapshot.time)


def _require_theta_star(model):
    ts = _theta_star(model)
    if ts is None:
        raise ConditionError(
            "theta_* absent: theta kappa'(theta) < kappa(theta) on all of Theta", clause="theta_star"
        )
    return ts


def derivative_D(snapshot: Snapshot, model: BranchingModel) -> float:
    """D_t = sum_u (kappa(theta_*) t - theta_* z_u) e^{theta_* z_u - kappa(theta_*) t}."""
    ts = _require_theta_star(model)
    pos = _positions(snapshot)
    if pos.size == 0:
        return 0.0
    kt = spectral.kappa(model, ts) * snapshot.time
    gap = kt - ts * pos
    return float(np.sum(gap * np.exp(-gap)))


def maximum_M(snapshot: Snapshot) -> Optional[float]:
    pos = _positions(snapshot)
    return float(pos.max()) if pos.size else None


def extremal_centered(snapshot: Snapshot, model: BranchingModel) -> np.ndarray:
    """Positions shifted by the centering m(t) = c_* t - 3/(2 theta_*) log t."""
    _require_theta_star(model)
    if not snapshot.time > 0:
        raise ConditionError("extremal process needs t > 0", clause="t>0")
    return _positions(snapshot) - spectral.centering_m(model, snapshot.time)


def fluctuation_exponent(model: BranchingModel, theta: float, p: float) -> float:
    """kappa(theta) - kappa(p theta)/p."""
    return spectral.kappa(model, theta) - spectral.kappa(model, p * theta) / p


def _check_fluctuation_regime(model, theta, p):
    if p == 2:
        v = spectral.check_condition(model, "H2", theta=theta)
    elif 1 < p < 2:
        v = spectral.check_condition(model, "tailW", theta=theta, p=p)
    else:
        raise ConditionError(f"p={p} must be 2 (normal) or lie in (1, 2) (stable)", clause="p")
    if not v.holds:
        raise ConditionError(v.detail, clause=v.condition_id)


def fluctuation(
    snap_t: Snapshot,
    snap_T: Snapshot,
    model: BranchingModel,
    theta: float,
    p: float = 2.0,
    b_of_t: Union[float, Callable[[float], float]] = 1.0,
) -> float:
    """b(t) e^{(kappa(theta) - kappa(p theta)/p) t} (W_t(theta) - W_T(theta)).

    ``p = 2`` is the normal regime, ``p`` in (1, 2) the stable one; W_T is
    the proxy for W_infinity and both snapshots must come from one realization.
    """
    t, T = snap_t.time, snap_T.time
    if T < t:
        raise ValueError(f"need T >= t, got t={t}, T={T}")
    _check_fluctuation_regime(model, theta, p)
    b = b_of_t(t) if callable(b_of_t) else float(b_of_t)
    diff = additive_W(snap_t, model, theta) - additive_W(snap_T, model, theta)
    if diff == 0.0:
        return 0.0
    return b * math.exp(fluctuation_exponent(model, theta, p) * t) * diff


# --------------------------------------------------------------------------
# batched per-realization functionals
# --------------------------------------------------------------------------


@dataclass
class MartingaleSample:
    t: float
    W: dict
    mass: int
    W2theta: Optional[float] = None
    Wptheta: Optional[float] = None
    D: Optional[float] = None
    M: Optional[float] = None
    extra: dict = field(default_factory=dict)


@dataclass(frozen=True)
class FunctionalSpec:
    """Which functionals to evaluate on each snapshot of a realization."""

    thetas: tuple = ()
    p: Optional[float] = None
    derivative: bool = False
    maximum: bool = False

    def sampler(self, model: BranchingModel) -> Callable[[Snapshot], MartingaleSample]:
        thetas = tuple(float(th) for th in self.thetas)
        kap = {th: _checked_kappa(model, th) for th in thetas}
        base = thetas[0] if thetas else None
        k2 = _checked_kappa(model, 2 * base) if base is not None and self.p is not None else None
        kp = None
        if base is not None and self.p is not None and self.p != 2:
            kp = _checked_kappa(model, self.p * base)
        ts = _require_theta_star(model) if self.derivative else None
        kts = spectral.kappa(model, ts) if ts is not None else None
        want_max = self.maximum

        def sample(snap: Snapshot) -> MartingaleSample:
            pos = _positions(snap)
            t = snap.time
            out = MartingaleSample(t=t, W={th: _tilted_sum(pos, th, kap[th] * t) for th in thetas},
                                   mass=int(pos.size))
            if k2 is not None:
                out.W2theta = _tilted_sum(pos, 2 * base, k2 * t)
            if kp is not None:
                out.Wptheta = _tilted_sum(pos, self.p * base, kp * t)
            if ts is not None:
                if pos.size:
                    gap = kts * t - ts * pos
                    out.D = float(np.sum(gap * np.exp(-gap)))
                else:
                    out.D = 0.0
            if want_max:
                out.M = float(pos.max()) if pos.size else None
            return out

        return sample


def sample_functionals(
    snapshots: Sequence[Snapshot], model: BranchingModel, spec: FunctionalSpec
) -> list:
    s = spec.sampler(model)
    return [s(snap) for snap in snapshots]
