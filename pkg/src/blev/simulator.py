"""Exact simulation of the branching Lévy particle system.

One realization is grown depth-first by a compiled kernel; all snapshot
times are captured on the same tree so statistics at different times are
coupled.  Randomness comes from one counter-based Philox stream per replica,
keyed by ``(seed, rng_stream)``, so any schedule of replicas over threads
reproduces the same numbers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import _kernel
from .errors import Explosion
from .model import BranchingModel, MotionSpec, OffspringSpec

DEFAULT_SEED = 0x5EED
DEFAULT_MAX_PARTICLES = 10**6

__all__ = [
    "DEFAULT_SEED",
    "DEFAULT_MAX_PARTICLES",
    "SimConfig",
    "Snapshot",
    "TreeRealization",
    "replica_stream",
    "sample_motion_increment",
    "sample_offspring",
    "simulate",
]


def replica_stream(seed: int, stream: int = 0) -> np.random.Generator:
    """Independent generator for replica ``stream`` under master ``seed``."""
    seed = int(seed) & 0xFFFFFFFFFFFFFFFF
    stream = int(stream) & 0xFFFFFFFFFFFFFFFF
    return np.random.Generator(np.random.Philox(key=(seed << 64) | stream))


@dataclass(frozen=True)
class SimConfig:
    snapshot_times: tuple
    max_particles: int = DEFAULT_MAX_PARTICLES
    rng_stream: int = 0

    def __post_init__(self):
        times = tuple(float(t) for t in np.atleast_1d(self.snapshot_times))
        object.__setattr__(self, "snapshot_times", times)
        if not times:
            raise ValueError("snapshot_times must be nonempty")
        if any(t < 0 or not np.isfinite(t) for t in times):
            raise ValueError("snapshot times must be finite and nonnegative")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("snapshot_times must be strictly increasing")
        if int(self.max_particles) != self.max_particles or self.max_particles < 1:
            raise ValueError("max_particles must be a positive integer")
        if not 0 <= int(self.rng_stream) < 2**64:
            raise ValueError("rng_stream must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class Snapshot:
    time: float
    positions: np.ndarray
    # index of each particle's ancestor in the previous snapshot (-1 for the first)
    ancestors: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    @property
    def mass(self) -> int:
        return int(self.positions.shape[0])

    def __len__(self):
        return self.mass


@dataclass(frozen=True)
class TreeRealization:
    snapshots: list
    extinct: bool
    truncated: bool
    root_lifetime: float

    def at(self, t: float) -> Snapshot:
        for s in self.snapshots:
            if s.time == t:
                return s
        raise KeyError(f"no snapshot at t={t}")


def sample_motion_increment(motion: MotionSpec, duration: float, rng: np.random.Generator,
                            size: Optional[int] = None):
    """Exact draw of xi over an interval of the given length.

    With ``size`` an array of independent draws is returned instead.
    """
    if duration < 0:
        raise ValueError("duration must be >= 0")
    p, locs, cumw = _kernel.pack_motion(motion)
    if size is not None:
        return _kernel.motion_increments(rng, p, locs, cumw, float(duration), int(size))
    return float(_kernel.motion_increment(rng, p, locs, cumw, float(duration)))


def sample_offspring(offspring: OffspringSpec, rng: np.random.Generator) -> np.ndarray:
    """Displacements of one brood relative to the parent's death site."""
    p = np.zeros(_kernel.NPARAM)
    fixed = _kernel.pack_offspring(offspring, p)
    return _kernel.offspring_draw(rng, p, fixed, 2**62)


def simulate(
    model: BranchingModel,
    config: SimConfig,
    rng: Optional[np.random.Generator] = None,
    seed: int = DEFAULT_SEED,
    initial_positions: Optional[Sequence[float]] = None,
) -> TreeRealization:
    """Grow one realization and capture all snapshot times.

    Without an explicit ``rng`` the stream ``replica_stream(seed, config.rng_stream)``
    is used.  ``initial_positions`` starts one fresh particle at each given
    site (default: a single particle at the origin); by the branching
    property this continues a snapshot exactly.  Raises :class:`Explosion` (carrying the truncated realization)
    when a snapshot holds more than ``config.max_particles`` particles.
    """
    if rng is None:
        rng = replica_stream(seed, config.rng_stream)
    roots = np.zeros(1) if initial_positions is None else np.asarray(initial_positions, dtype=float)
    packed = _kernel.pack_model(model)
    return _run(packed, np.asarray(config.snapshot_times), config.max_particles, rng, roots)


_ORIGIN = np.zeros(1)


def _run(packed, times, max_particles, rng, roots=_ORIGIN):
    p, locs, cumw, fixed = packed
    status, pos, snap, anc, counts, root_life = _kernel.simulate_tree(
        rng, p, locs, cumw, fixed, times, int(max_particles), roots
    )
    gpos, ganc, start = _kernel.group_by_snapshot(pos, snap, anc, counts)
    snaps = [
        Snapshot(float(t), gpos[start[j]:start[j + 1]], ganc[start[j]:start[j + 1]])
        for j, t in enumerate(times)
    ]
    truncated = status == _kernel.STATUS_EXPLOSION
    real = TreeRealization(snaps, extinct=(not truncated and int(counts[-1]) == 0),
                           truncated=truncated, root_lifetime=float(root_life))
    if truncated:
        raise Explosion(
            f"live particle count exceeded max_particles={max_particles}", realization=real
        )
    return real


def simulate_times(model: BranchingModel, times: Sequence[float], **kw) -> TreeRealization:
    """Convenience wrapper around :func:`simulate`."""
    cfg_kw = {k: kw.pop(k) for k in ("max_particles", "rng_stream") if k in kw}
    return simulate(model, SimConfig(tuple(times), **cfg_kw), **kw)
