"""Compiled simulation kernel.

A model is packed into a flat float64 parameter vector plus three arrays
(jump atoms, jump cumulative weights, fixed offspring configuration) so the
numba kernel has no Python objects to chase.  Everything here runs inside
``nogil`` so the replica runner can use threads.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .model import (
    Deterministic,
    FixedConfiguration,
    Gaussian,
    Geometric,
    IidDisplaced,
    Local,
    PointMass,
    PointMasses,
    PoissonPlusOne,
    TwoSidedExponential,
    Zeta,
)

# parameter vector layout
BETA, DRIFT, DIFF, JRATE, JKIND, J1, J2, J3, OKIND, CKIND, CPAR, DKIND, D1, D2, D3 = range(15)
NPARAM = 15

STATUS_OK = 0
STATUS_EXPLOSION = 1


def _pack_real_law(law):
    if isinstance(law, Gaussian):
        return 1, (law.mean, law.sd, 0.0)
    if isinstance(law, TwoSidedExponential):
        return 2, (law.prob_plus, law.rate_plus, law.rate_minus)
    if isinstance(law, PointMasses):
        return 3, (0.0, 0.0, 0.0)
    if isinstance(law, PointMass):
        return 0, (law.s, 0.0, 0.0)
    raise TypeError(f"unsupported law {law!r}")


def _pack_count(count):
    if isinstance(count, Deterministic):
        return 0, float(count.k)
    if isinstance(count, Geometric):
        return 1, count.p
    if isinstance(count, PoissonPlusOne):
        return 2, count.lam
    if isinstance(count, Zeta):
        return 3, count.s
    raise TypeError(f"unsupported count law {count!r}")


def pack_motion(motion):
    p = np.zeros(NPARAM)
    p[DRIFT], p[DIFF], p[JRATE] = motion.drift, motion.diffusion, motion.jump_rate
    locs = np.zeros(1)
    cumw = np.ones(1)
    if motion.jump_law is not None:
        kind, (a, b, c) = _pack_real_law(motion.jump_law)
        p[JKIND], p[J1], p[J2], p[J3] = kind, a, b, c
        if isinstance(motion.jump_law, PointMasses):
            locs = np.array([x for x, _ in motion.jump_law.points])
            cumw = np.cumsum([w for _, w in motion.jump_law.points])
    return p, locs, cumw


def pack_offspring(off, p):
    """Fill the offspring slots of ``p``; returns the fixed configuration array."""
    fixed = np.zeros(1)
    if isinstance(off, Local):
        p[OKIND] = 0
        p[CKIND], p[CPAR] = _pack_count(off.count)
    elif isinstance(off, IidDisplaced):
        p[OKIND] = 1
        p[CKIND], p[CPAR] = _pack_count(off.count)
        p[DKIND], (p[D1], p[D2], p[D3]) = _pack_real_law(off.displacement)
    elif isinstance(off, FixedConfiguration):
        p[OKIND] = 2
        fixed = np.array(off.points, dtype=np.float64)
    else:
        raise TypeError(f"unsupported offspring {off!r}")
    return fixed


def pack_model(model):
    """(params, jump_locs, jump_cumw, fixed_points) for the kernel."""
    p, locs, cumw = pack_motion(model.motion)
    p[BETA] = model.beta
    fixed = pack_offspring(model.offspring, p)
    return p, locs, cumw, fixed


# --------------------------------------------------------------------------
# samplers
# --------------------------------------------------------------------------


@njit(nogil=True, cache=True, inline="always")
def _real_draw(rng, kind, a, b, c):
    if kind == 0:
        return a
    if kind == 1:
        return a + b * rng.standard_normal()
    # kind 2: two-sided exponential
    if rng.random() < a:
        return rng.standard_exponential() / b
    return -rng.standard_exponential() / c


@njit(nogil=True, cache=True)
def _increment(rng, duration, drift, diff, jrate, jkind, j1, j2, j3, locs, cumw):
    if duration <= 0.0:
        return 0.0
    x = drift * duration
    if diff > 0.0:
        x += diff * math.sqrt(duration) * rng.standard_normal()
    if jrate > 0.0:
        k = rng.poisson(jrate * duration)
        for _ in range(k):
            if jkind == 3:
                i = np.searchsorted(cumw, rng.random(), side="right")
                if i >= locs.shape[0]:
                    i = locs.shape[0] - 1
                x += locs[i]
            else:
                x += _real_draw(rng, jkind, j1, j2, j3)
    return x


@njit(nogil=True, cache=True)
def motion_increment(rng, p, locs, cumw, duration):
    return _increment(rng, duration, p[DRIFT], p[DIFF], p[JRATE], int(p[JKIND]),
                      p[J1], p[J2], p[J3], locs, cumw)


@njit(nogil=True, cache=True)
def motion_increments(rng, p, locs, cumw, duration, n):
    out = np.empty(n)
    for i in range(n):
        out[i] = _increment(rng, duration, p[DRIFT], p[DIFF], p[JRATE], int(p[JKIND]),
                            p[J1], p[J2], p[J3], locs, cumw)
    return out


@njit(nogil=True, cache=True, inline="always")
def _zeta_draw(rng, s, cap):
    # rejection sampler of Devroye (Non-Uniform Random Variate Generation, X.6)
    am1 = s - 1.0
    b = 2.0**am1
    while True:
        u = 1.0 - rng.random()
        v = rng.random()
        x = math.floor(u ** (-1.0 / am1))
        if x < 1.0:
            continue
        t = (1.0 + 1.0 / x) ** am1
        if v * x * (t - 1.0) / (b - 1.0) <= t / b:
            # values beyond the cap only signal explosion; avoid int overflow
            if x > cap:
                return cap + 1
            return int(x)


@njit(nogil=True, cache=True, inline="always")
def _count_draw(rng, kind, par, cap):
    if kind == 0:
        return int(par)
    if kind == 1:
        u = 1.0 - rng.random()
        k = math.ceil(math.log(u) / math.log1p(-par))
        return max(int(k), 1)
    if kind == 2:
        return 1 + rng.poisson(par)
    return _zeta_draw(rng, par, cap)


@njit(nogil=True, cache=True)
def offspring_draw(rng, p, fixed, cap):
    """Displacements of one brood (length cap+1 flags an oversized brood)."""
    okind = int(p[OKIND])
    if okind == 2:
        return fixed.copy()
    k = _count_draw(rng, int(p[CKIND]), p[CPAR], cap)
    if k > cap:
        return np.zeros(cap + 1)
    out = np.zeros(k)
    if okind == 1:
        dk = int(p[DKIND])
        for i in range(k):
            out[i] = _real_draw(rng, dk, p[D1], p[D2], p[D3])
    return out


# --------------------------------------------------------------------------
# tree
# --------------------------------------------------------------------------


@njit(nogil=True, cache=True, inline="always")
def _grow(a, n):
    out = np.empty(max(2 * a.shape[0], n), a.dtype)
    out[: a.shape[0]] = a
    return out


_NEED_POS = 2
_NEED_STACK = 3
_DONE = 4
# integer / float resume state of the expansion loop
_SP, _N, _PK, _PLAST, _PJ = range(5)
_PD, _PX, _ROOT = range(3)


@njit(nogil=True, cache=True)
def _expand(rng, p, locs, cumw, fixed, times, max_particles,
            pos, snap, anc, counts, sb, sx, sl, sj, ist, fst):
    """Run the depth-first loop until done or a buffer is full.

    Buffers are never reallocated here (reassigning arrays inside the hot
    loop costs about a factor two); the caller grows them and resumes.
    """
    nsnap = times.shape[0]
    tlast = times[nsnap - 1]
    beta = p[BETA]
    # every lineage accrues drift*t in total, so positions are carried without
    # drift and it is added once per record; drift-only models are then exact
    adrift = p[DRIFT]
    drift, diff, jrate, jkind = 0.0, p[DIFF], p[JRATE], int(p[JKIND])
    j1, j2, j3 = p[J1], p[J2], p[J3]
    okind, ckind, cpar = int(p[OKIND]), int(p[CKIND]), p[CPAR]
    dkind, d1, d2, d3 = int(p[DKIND]), p[D1], p[D2], p[D3]
    nfixed = fixed.shape[0]
    cap = pos.shape[0]
    scap = sb.shape[0]
    sp, n = ist[_SP], ist[_N]
    root_life = fst[_ROOT]

    k = ist[_PK]
    d, x, last, j = fst[_PD], fst[_PX], ist[_PLAST], ist[_PJ]
    while True:
        if k > 0:
            # push the pending brood; in reverse so children expand in brood order
            if sp + k > scap:
                ist[_SP], ist[_N], ist[_PK], ist[_PLAST], ist[_PJ] = sp, n, k, last, j
                fst[_PD], fst[_PX], fst[_ROOT] = d, x, root_life
                return _NEED_STACK
            for i in range(k):
                if okind == 0:
                    y = x
                elif okind == 1:
                    y = x + _real_draw(rng, dkind, d1, d2, d3)
                else:
                    y = x + fixed[i]
                q = sp + k - 1 - i
                sb[q] = d
                sx[q] = y
                sl[q] = last
                sj[q] = j
            sp += k
            k = 0
        if sp == 0:
            break
        if n + nsnap > cap:
            ist[_SP], ist[_N], ist[_PK] = sp, n, 0
            fst[_ROOT] = root_life
            return _NEED_POS
        sp -= 1
        b, x, last, j = sb[sp], sx[sp], sl[sp], sj[sp]
        d = b + rng.standard_exponential() / beta
        if root_life < 0.0:
            root_life = d
        cur = b
        while j < nsnap and times[j] < d:
            dt = times[j] - cur
            if jrate > 0.0:
                x += _increment(rng, dt, drift, diff, jrate, jkind, j1, j2, j3, locs, cumw)
            elif diff > 0.0:
                x += diff * math.sqrt(dt) * rng.standard_normal()
            cur = times[j]
            pos[n] = x + adrift * cur
            snap[n] = j
            anc[n] = last
            last = n
            n += 1
            counts[j] += 1
            if counts[j] > max_particles:
                ist[_SP], ist[_N], ist[_PK] = sp, n, 0
                fst[_ROOT] = root_life
                return STATUS_EXPLOSION
            j += 1
        if d > tlast:
            continue
        dt = d - cur
        if jrate > 0.0:
            x += _increment(rng, dt, drift, diff, jrate, jkind, j1, j2, j3, locs, cumw)
        elif diff > 0.0:
            x += diff * math.sqrt(dt) * rng.standard_normal()
        if okind == 2:
            k = nfixed
        else:
            k = _count_draw(rng, ckind, cpar, max_particles)
        if k > max_particles:
            ist[_SP], ist[_N], ist[_PK] = sp, n, 0
            fst[_ROOT] = root_life
            return STATUS_EXPLOSION
    ist[_SP], ist[_N], ist[_PK] = 0, n, 0
    fst[_ROOT] = root_life
    return _DONE


@njit(nogil=True, cache=True)
def simulate_tree(rng, p, locs, cumw, fixed, times, max_particles, roots):
    """Depth-first exact simulation of one realization.

    Each particle lives Exp(beta); its position at every snapshot time inside
    its lifetime (birth <= s < death) is obtained from motion increments over
    the sub-intervals cut by the snapshot times.  Particles dying after the
    last snapshot time have irrelevant offspring and are not expanded.
    ``roots`` holds the starting positions (one particle each at time 0).

    Returns (status, pos, snap, anc, counts, root_lifetime) where record i is a
    particle at position pos[i] in snapshot snap[i] whose lineage was record
    anc[i] at the previous snapshot (-1 for the first snapshot).
    """
    nsnap = times.shape[0]
    counts = np.zeros(nsnap, np.int64)
    cap = 4096
    pos = np.empty(cap)
    snap = np.empty(cap, np.int64)
    anc = np.empty(cap, np.int64)
    nroot = roots.shape[0]
    scap = max(1024, 2 * nroot)
    sb = np.empty(scap)
    sx = np.empty(scap)
    sl = np.empty(scap, np.int64)
    sj = np.empty(scap, np.int64)
    for i in range(nroot):
        q = nroot - 1 - i
        sb[q], sx[q], sl[q], sj[q] = 0.0, roots[i], -1, 0
    ist = np.zeros(5, np.int64)
    ist[_SP] = nroot
    fst = np.zeros(3)
    fst[_ROOT] = -1.0
    while True:
        code = _expand(rng, p, locs, cumw, fixed, times, max_particles,
                       pos, snap, anc, counts, sb, sx, sl, sj, ist, fst)
        if code == _NEED_POS:
            pos = _grow(pos, 0)
            snap = _grow(snap, 0)
            anc = _grow(anc, 0)
        elif code == _NEED_STACK:
            need = ist[_SP] + ist[_PK]
            sb = _grow(sb, need)
            sx = _grow(sx, need)
            sl = _grow(sl, need)
            sj = _grow(sj, need)
        else:
            break
    status = STATUS_EXPLOSION if code == STATUS_EXPLOSION else STATUS_OK
    n = ist[_N]
    return status, pos[:n], snap[:n], anc[:n], counts, fst[_ROOT]


@njit(nogil=True, cache=True)
def group_by_snapshot(pos, snap, anc, counts):
    """Counting sort of records by snapshot; ancestors remapped to
    within-snapshot indices of the previous snapshot."""
    nsnap = counts.shape[0]
    start = np.zeros(nsnap + 1, np.int64)
    for j in range(nsnap):
        start[j + 1] = start[j] + counts[j]
    fill = start[:-1].copy()
    n = pos.shape[0]
    out_pos = np.empty(n)
    out_anc = np.empty(n, np.int64)
    where = np.empty(n, np.int64)
    for i in range(n):
        j = snap[i]
        k = fill[j]
        fill[j] += 1
        where[i] = k - start[j]
        out_pos[k] = pos[i]
        a = anc[i]
        out_anc[k] = -1 if a < 0 else where[a]
    return out_pos, out_anc, start
