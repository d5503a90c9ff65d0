"""Model description: Lévy motion, offspring point process, branching rate.

Every law in the catalog knows its own moment generating function (MGF) and
the integrability facts the spectral module needs.  All laws are frozen and
hashable; a :class:`BranchingModel` round-trips through JSON field-for-field.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any, Optional, Union

from scipy.special import zeta as _hurwitz_zeta

from .errors import ModelError

INF = math.inf


def _exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return INF


def riemann_zeta(s: float) -> float:
    return float(_hurwitz_zeta(s, 1.0))


# --------------------------------------------------------------------------
# Real-valued laws (jump sizes, offspring displacements)
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Gaussian:
    mean: float = 0.0
    sd: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.mean) and math.isfinite(self.sd)) or self.sd < 0:
            raise ModelError(f"Gaussian needs finite mean and sd >= 0, got {self}")

    right_abscissa = INF
    left_abscissa = INF

    def mgf(self, theta: float) -> float:
        return _exp(self.mean * theta + 0.5 * self.sd**2 * theta**2)

    def mgf1(self, theta: float) -> float:
        return (self.mean + self.sd**2 * theta) * self.mgf(theta)

    def mgf2(self, theta: float) -> float:
        m = self.mean + self.sd**2 * theta
        return (m * m + self.sd**2) * self.mgf(theta)


@dataclass(frozen=True)
class TwoSidedExponential:
    """Exp(rate_plus) with probability prob_plus, minus Exp(rate_minus) otherwise."""

    prob_plus: float = 0.5
    rate_plus: float = 1.0
    rate_minus: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.prob_plus <= 1.0:
            raise ModelError(f"prob_plus must lie in [0, 1], got {self.prob_plus}")
        if not (self.rate_plus > 0 and self.rate_minus > 0):
            raise ModelError("TwoSidedExponential rates must be strictly positive")
        if not (math.isfinite(self.rate_plus) and math.isfinite(self.rate_minus)):
            raise ModelError("TwoSidedExponential rates must be finite")

    @property
    def right_abscissa(self) -> float:
        return self.rate_plus if self.prob_plus > 0 else INF

    @property
    def left_abscissa(self) -> float:
        return self.rate_minus if self.prob_plus < 1 else INF

    def _in_domain(self, theta):
        return -self.left_abscissa < theta < self.right_abscissa

    def mgf(self, theta: float) -> float:
        if not self._in_domain(theta):
            return INF
        q, a, c = self.prob_plus, self.rate_plus, self.rate_minus
        out = 0.0
        if q > 0:
            out += q * a / (a - theta)
        if q < 1:
            out += (1 - q) * c / (c + theta)
        return out

    def mgf1(self, theta: float) -> float:
        if not self._in_domain(theta):
            return INF
        q, a, c = self.prob_plus, self.rate_plus, self.rate_minus
        out = 0.0
        if q > 0:
            out += q * a / (a - theta) ** 2
        if q < 1:
            out -= (1 - q) * c / (c + theta) ** 2
        return out

    def mgf2(self, theta: float) -> float:
        if not self._in_domain(theta):
            return INF
        q, a, c = self.prob_plus, self.rate_plus, self.rate_minus
        out = 0.0
        if q > 0:
            out += 2 * q * a / (a - theta) ** 3
        if q < 1:
            out += 2 * (1 - q) * c / (c + theta) ** 3
        return out

    def exp_tail(self, theta: float):
        """(index, constant) with P(e^{theta S} > x) = constant * x^{-index}, x >= 1."""
        if self.prob_plus == 0 or theta <= 0:
            return None
        return self.rate_plus / theta, self.prob_plus


@dataclass(frozen=True)
class PointMasses:
    points: tuple = ((0.0, 1.0),)

    def __post_init__(self):
        pts = tuple((float(x), float(w)) for x, w in self.points)
        object.__setattr__(self, "points", pts)
        if not pts:
            raise ModelError("PointMasses needs at least one atom")
        if any(w < 0 or not math.isfinite(x) for x, w in pts):
            raise ModelError("PointMasses weights must be nonnegative, locations finite")
        if abs(sum(w for _, w in pts) - 1.0) > 1e-12:
            raise ModelError("PointMasses weights must sum to 1 within 1e-12")

    right_abscissa = INF
    left_abscissa = INF

    def mgf(self, theta):
        return math.fsum(w * _exp(theta * x) for x, w in self.points)

    def mgf1(self, theta):
        return math.fsum(w * x * _exp(theta * x) for x, w in self.points)

    def mgf2(self, theta):
        return math.fsum(w * x * x * _exp(theta * x) for x, w in self.points)


@dataclass(frozen=True)
class PointMass:
    s: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.s):
            raise ModelError("PointMass location must be finite")

    right_abscissa = INF
    left_abscissa = INF

    def mgf(self, theta):
        return _exp(theta * self.s)

    def mgf1(self, theta):
        return self.s * _exp(theta * self.s)

    def mgf2(self, theta):
        return self.s**2 * _exp(theta * self.s)


JumpLaw = Optional[Union[Gaussian, TwoSidedExponential, PointMasses]]
DisplacementLaw = Union[PointMass, Gaussian, TwoSidedExponential]


# --------------------------------------------------------------------------
# Offspring counts
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Deterministic:
    k: int = 2

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ModelError(f"Deterministic count needs integer k >= 1, got {self.k}")
        object.__setattr__(self, "k", int(self.k))

    @property
    def mean(self):
        return float(self.k)

    @property
    def second_moment(self):
        return float(self.k * self.k)

    def moment_finite(self, r, log_power=0.0):
        return True

    def tail(self):
        return None


@dataclass(frozen=True)
class Geometric:
    """P(N = k) = (1-p)^{k-1} p on k >= 1."""

    p: float = 0.5

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise ModelError(f"Geometric success probability must lie in (0, 1), got {self.p}")

    @property
    def mean(self):
        return 1.0 / self.p

    @property
    def second_moment(self):
        return (2.0 - self.p) / self.p**2

    def moment_finite(self, r, log_power=0.0):
        return True

    def tail(self):
        return None


@dataclass(frozen=True)
class PoissonPlusOne:
    """N = 1 + Poisson(lam)."""

    lam: float = 1.0

    def __post_init__(self):
        if not (self.lam >= 0 and math.isfinite(self.lam)):
            raise ModelError(f"PoissonPlusOne needs finite lam >= 0, got {self.lam}")

    @property
    def mean(self):
        return 1.0 + self.lam

    @property
    def second_moment(self):
        return 1.0 + 3.0 * self.lam + self.lam**2

    def moment_finite(self, r, log_power=0.0):
        return True

    def tail(self):
        return None


@dataclass(frozen=True)
class Zeta:
    """P(N = k) = k^{-s} / zeta(s) on k >= 1."""

    s: float = 2.5

    def __post_init__(self):
        if not (self.s > 2 and math.isfinite(self.s)):
            raise ModelError(f"Zeta count needs s > 2 for a finite mean, got {self.s}")

    @property
    def mean(self):
        return riemann_zeta(self.s - 1) / riemann_zeta(self.s)

    @property
    def second_moment(self):
        if self.s <= 3:
            return INF
        return riemann_zeta(self.s - 2) / riemann_zeta(self.s)

    def moment_finite(self, r, log_power=0.0):
        # sum_k k^{r-s} (log k)^q converges iff r - s < -1, or r - s = -1 and q < -1
        if r < self.s - 1:
            return True
        return r == self.s - 1 and log_power < -1

    def tail(self):
        """(index, c) with P(N > x) ~ c x^{-index}."""
        return self.s - 1, 1.0 / ((self.s - 1) * riemann_zeta(self.s))


CountLaw = Union[Deterministic, Geometric, PoissonPlusOne, Zeta]


# --------------------------------------------------------------------------
# Offspring point process, motion, full model
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Local:
    """All children at the parent's death site."""

    count: CountLaw


@dataclass(frozen=True)
class IidDisplaced:
    """N children, displacements iid and independent of N."""

    count: CountLaw
    displacement: DisplacementLaw

    def __post_init__(self):
        if not isinstance(self.displacement, (PointMass, Gaussian, TwoSidedExponential)):
            raise ModelError(f"IidDisplaced displacement must be PointMass, Gaussian or "
                             f"TwoSidedExponential, got {type(self.displacement).__name__}")


@dataclass(frozen=True)
class FixedConfiguration:
    points: tuple

    def __post_init__(self):
        pts = tuple(float(x) for x in self.points)
        object.__setattr__(self, "points", pts)
        if len(pts) < 2:
            raise ModelError("FixedConfiguration needs at least 2 points to be supercritical")
        if not all(math.isfinite(x) for x in pts):
            raise ModelError("FixedConfiguration points must be finite")


OffspringSpec = Union[Local, IidDisplaced, FixedConfiguration]


def offspring_mean(off: OffspringSpec) -> float:
    if isinstance(off, FixedConfiguration):
        return float(len(off.points))
    return off.count.mean


@dataclass(frozen=True)
class MotionSpec:
    """xi_t = drift*t + diffusion*B_t + compound Poisson(jump_rate, jump_law)."""

    drift: float = 0.0
    diffusion: float = 1.0
    jump_rate: float = 0.0
    jump_law: JumpLaw = None

    def __post_init__(self):
        if not (math.isfinite(self.drift) and math.isfinite(self.diffusion)):
            raise ModelError("drift and diffusion must be finite")
        if self.diffusion < 0:
            raise ModelError(f"diffusion must be >= 0, got {self.diffusion}")
        if not (self.jump_rate >= 0 and math.isfinite(self.jump_rate)):
            raise ModelError(f"jump_rate must be finite and >= 0, got {self.jump_rate}")
        if (self.jump_rate == 0) != (self.jump_law is None):
            raise ModelError("jump_rate = 0 exactly when jump_law is None")


@dataclass(frozen=True)
class BranchingModel:
    beta: float
    motion: MotionSpec
    offspring: OffspringSpec

    def __post_init__(self):
        if not (self.beta > 0 and math.isfinite(self.beta)):
            raise ModelError(f"beta must be finite and > 0, got {self.beta}")
        if not offspring_mean(self.offspring) > 1:
            raise ModelError("offspring law must be supercritical (E N > 1)")

    @property
    def mean_offspring(self) -> float:
        return offspring_mean(self.offspring)

    def to_dict(self) -> dict:
        return model_to_dict(self)

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


# --------------------------------------------------------------------------
# Catalog shortcuts
# --------------------------------------------------------------------------


def binary_bbm(beta: float = 1.0) -> BranchingModel:
    """Binary branching standard Brownian motion."""
    return BranchingModel(beta, MotionSpec(0.0, 1.0), Local(Deterministic(2)))


def drift_only(drift: float = 1.0, beta: float = 1.0, k: int = 2) -> BranchingModel:
    return BranchingModel(beta, MotionSpec(drift, 0.0), Local(Deterministic(k)))


def zeta_bbm(s: float = 2.5, beta: float = 1.0) -> BranchingModel:
    """Brownian motion with heavy-tailed Zeta(s) local offspring."""
    return BranchingModel(beta, MotionSpec(0.0, 1.0), Local(Zeta(s)))


# --------------------------------------------------------------------------
# JSON (strict: unknown fields rejected)
# --------------------------------------------------------------------------

_LAW_FIELDS = {
    "Gaussian": (Gaussian, ("mean", "sd")),
    "TwoSidedExponential": (TwoSidedExponential, ("prob_plus", "rate_plus", "rate_minus")),
    "PointMasses": (PointMasses, ("points",)),
    "PointMass": (PointMass, ("s",)),
    "Deterministic": (Deterministic, ("k",)),
    "Geometric": (Geometric, ("p",)),
    "PoissonPlusOne": (PoissonPlusOne, ("lam",)),
    "Zeta": (Zeta, ("s",)),
}
_JUMP_VARIANTS = ("Gaussian", "TwoSidedExponential", "PointMasses")
_DISP_VARIANTS = ("PointMass", "Gaussian", "TwoSidedExponential")
_COUNT_VARIANTS = ("Deterministic", "Geometric", "PoissonPlusOne", "Zeta")


def _law_to_dict(law) -> dict:
    name = type(law).__name__
    _, fields = _LAW_FIELDS[name]
    out: dict[str, Any] = {"variant": name}
    for f in fields:
        v = getattr(law, f)
        out[f] = [list(p) for p in v] if f == "points" else v
    return out


def model_to_dict(model: BranchingModel) -> dict:
    m = model.motion
    off = model.offspring
    if isinstance(off, Local):
        o = {"variant": "Local", "count": _law_to_dict(off.count)}
    elif isinstance(off, IidDisplaced):
        o = {"variant": "IidDisplaced", "count": _law_to_dict(off.count),
             "displacement": _law_to_dict(off.displacement)}
    else:
        o = {"variant": "FixedConfiguration", "points": list(off.points)}
    return {
        "beta": model.beta,
        "motion": {
            "drift": m.drift,
            "diffusion": m.diffusion,
            "jump_rate": m.jump_rate,
            "jump_law": None if m.jump_law is None else _law_to_dict(m.jump_law),
        },
        "offspring": o,
    }


def _expect_obj(obj, path, required, optional=()):
    if not isinstance(obj, dict):
        raise ModelError(f"{path}: expected an object, got {type(obj).__name__}")
    unknown = set(obj) - set(required) - set(optional)
    if unknown:
        raise ModelError(f"{path}: unknown field(s) {sorted(unknown)}")
    missing = [k for k in required if k not in obj]
    if missing:
        raise ModelError(f"{path}: missing field(s) {missing}")


def _num(v, path):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ModelError(f"{path}: expected a number, got {v!r}")
    return v


def _parse_law(obj, path, allowed):
    if not isinstance(obj, dict) or "variant" not in obj:
        raise ModelError(f"{path}: expected an object with a 'variant' field")
    name = obj["variant"]
    if name not in allowed:
        raise ModelError(f"{path}.variant: {name!r} not one of {list(allowed)}")
    cls, fields = _LAW_FIELDS[name]
    _expect_obj(obj, path, ("variant",) + fields)
    kwargs = {}
    for f in fields:
        v = obj[f]
        if f == "points":
            if not isinstance(v, list) or not all(
                isinstance(p, list) and len(p) == 2 for p in v
            ):
                raise ModelError(f"{path}.points: expected a list of [location, weight] pairs")
            kwargs[f] = tuple((_num(x, f"{path}.points"), _num(w, f"{path}.points")) for x, w in v)
        else:
            kwargs[f] = _num(v, f"{path}.{f}")
    try:
        return cls(**kwargs)
    except ModelError as exc:
        raise ModelError(f"{path}: {exc}") from None


def model_from_dict(obj) -> BranchingModel:
    _expect_obj(obj, "model", ("beta", "motion", "offspring"))
    mo = obj["motion"]
    _expect_obj(mo, "motion", ("drift", "diffusion", "jump_rate", "jump_law"))
    jl = mo["jump_law"]
    jump = None if jl is None else _parse_law(jl, "motion.jump_law", _JUMP_VARIANTS)
    try:
        motion = MotionSpec(
            _num(mo["drift"], "motion.drift"),
            _num(mo["diffusion"], "motion.diffusion"),
            _num(mo["jump_rate"], "motion.jump_rate"),
            jump,
        )
    except ModelError as exc:
        raise ModelError(f"motion: {exc}") from None

    of = obj["offspring"]
    if not isinstance(of, dict) or "variant" not in of:
        raise ModelError("offspring: expected an object with a 'variant' field")
    variant = of["variant"]
    if variant == "Local":
        _expect_obj(of, "offspring", ("variant", "count"))
        off = Local(_parse_law(of["count"], "offspring.count", _COUNT_VARIANTS))
    elif variant == "IidDisplaced":
        _expect_obj(of, "offspring", ("variant", "count", "displacement"))
        off = IidDisplaced(
            _parse_law(of["count"], "offspring.count", _COUNT_VARIANTS),
            _parse_law(of["displacement"], "offspring.displacement", _DISP_VARIANTS),
        )
    elif variant == "FixedConfiguration":
        _expect_obj(of, "offspring", ("variant", "points"))
        pts = of["points"]
        if not isinstance(pts, list):
            raise ModelError("offspring.points: expected a list of numbers")
        try:
            off = FixedConfiguration(tuple(_num(x, "offspring.points") for x in pts))
        except ModelError as exc:
            raise ModelError(f"offspring: {exc}") from None
    else:
        raise ModelError(
            f"offspring.variant: {variant!r} not one of ['Local', 'IidDisplaced', 'FixedConfiguration']"
        )
    try:
        return BranchingModel(_num(obj["beta"], "beta"), motion, off)
    except ModelError as exc:
        raise ModelError(f"model: {exc}") from None


def model_from_json(text: str) -> BranchingModel:
    """Parse a model file.  ``json.JSONDecodeError`` carries line/column."""
    return model_from_dict(json.loads(text))


def load_model(path) -> BranchingModel:
    with open(path, encoding="utf-8") as fh:
        return model_from_json(fh.read())
