import math

import numpy as np
import pytest
from scipy import stats as sps

from blev import spectral as sp
from blev.errors import Explosion
from blev.mc_lab.replicas import run_replicas
from blev.mc_lab.stats import ks_statistic
from blev.model import (
    BranchingModel,
    Deterministic,
    FixedConfiguration,
    Gaussian,
    Geometric,
    IidDisplaced,
    Local,
    MotionSpec,
    PointMasses,
    TwoSidedExponential,
    binary_bbm,
    drift_only,
)
from blev.simulator import (
    SimConfig,
    TreeRealization,
    replica_stream,
    sample_motion_increment,
    sample_offspring,
    simulate,
    simulate_times,
)

SEED = 2024


def masses(model, times, n, seed=SEED):
    cfg = SimConfig(tuple(times))
    rows = run_replicas(model, cfg, n, seed, lambda r: [s.mass for s in r.snapshots])
    return np.array(rows, dtype=float)


# -- motion and offspring draws ----------------------------------------------


def test_motion_increment_examples(rng):
    assert sample_motion_increment(MotionSpec(), 0.0, rng) == 0.0
    assert sample_motion_increment(MotionSpec(2.0, 0.0), 1.5, rng) == 3.0
    with pytest.raises(ValueError):
        sample_motion_increment(MotionSpec(), -1.0, rng)


def test_motion_increment_mgf_matches_phi():
    x = sample_motion_increment(MotionSpec(), 1.0, replica_stream(SEED, 0), size=10**6)
    assert np.exp(x).mean() == pytest.approx(math.exp(0.5), rel=0.01)


@pytest.mark.parametrize("law", [
    Gaussian(0.3, 0.5),
    TwoSidedExponential(0.3, 4.0, 2.0),
    PointMasses(((1.0, 0.25), (-0.5, 0.75))),
])
def test_jump_motion_mgf_matches_phi(law):
    motion = MotionSpec(0.2, 0.5, 1.5, law)
    model = BranchingModel(1.0, motion, Local(Deterministic(2)))
    x = sample_motion_increment(motion, 2.0, replica_stream(SEED, 1), size=4 * 10**5)
    e = np.exp(x)
    target = math.exp(2.0 * sp.phi(model, 1.0))
    assert abs(e.mean() - target) <= 4 * e.std() / math.sqrt(e.size)


def test_offspring_examples(rng):
    assert list(sample_offspring(Local(Deterministic(2)), rng)) == [0.0, 0.0]
    for _ in range(5):
        assert list(sample_offspring(FixedConfiguration((-1.0, 1.0)), rng)) == [-1.0, 1.0]


def test_iid_offspring_weight_matches_chi():
    off = IidDisplaced(Deterministic(3), Gaussian(0.0, 1.0))
    g = replica_stream(SEED, 2)
    w = np.array([np.exp(sample_offspring(off, g)).sum() for _ in range(10**5)])
    assert w.mean() == pytest.approx(3 * math.exp(0.5), rel=0.01)


def test_geometric_counts(rng):
    n = np.array([sample_offspring(Local(Geometric(0.4)), rng).size for _ in range(20000)])
    assert n.min() >= 1
    assert n.mean() == pytest.approx(1 / 0.4, abs=4 * n.std() / math.sqrt(n.size))


# -- realizations ------------------------------------------------------------


def test_time_zero_snapshot():
    real = simulate_times(binary_bbm(), [0.0])
    s = real.snapshots[0]
    assert s.time == 0.0 and list(s.positions) == [0.0]
    assert not real.extinct and not real.truncated


def test_drift_only_positions_exact():
    real = simulate_times(drift_only(0.7, k=3), [1.0, 2.5], seed=5)
    for s in real.snapshots:
        assert np.all(s.positions == 0.7 * s.time)
    assert real.at(2.5).mass >= real.at(1.0).mass


def test_snapshot_times_exact():
    times = (0.5, 1.0, 2.75)
    real = simulate_times(binary_bbm(), times)
    assert tuple(s.time for s in real.snapshots) == times
    with pytest.raises(KeyError):
        real.at(3.0)


def test_config_validation():
    with pytest.raises(ValueError):
        SimConfig(())
    with pytest.raises(ValueError):
        SimConfig((1.0, 1.0))
    with pytest.raises(ValueError):
        SimConfig((-1.0,))
    with pytest.raises(ValueError):
        SimConfig((1.0,), max_particles=0)


def test_mass_mean_matches_galton_watson():
    m = masses(binary_bbm(), (1.0, 2.0, 3.0), 10**4)
    for j, t in enumerate((1.0, 2.0, 3.0)):
        mean, se = m[:, j].mean(), m[:, j].std(ddof=1) / math.sqrt(len(m))
        assert abs(mean - math.exp(t)) <= 3 * se


def test_yule_mass_is_geometric():
    # binary branching at rate 1: mass at t is Geometric(e^{-t}) on k >= 1
    t = 1.5
    m = masses(binary_bbm(), (t,), 10**4)[:, 0]
    q = math.exp(-t)
    ks = np.arange(1, 9)
    obs = np.array([(m == k).sum() for k in ks] + [(m > ks[-1]).sum()])
    exp_p = np.append(q * (1 - q) ** (ks - 1), (1 - q) ** ks[-1])
    chi2 = sps.chisquare(obs, exp_p * m.size)
    assert chi2.pvalue > 0.001
    w = math.exp(-t) * m
    assert w.var(ddof=1) == pytest.approx(1 - math.exp(-t), rel=0.1)


@pytest.mark.parametrize("model", [
    binary_bbm(),
    BranchingModel(1.0, MotionSpec(0.1, 0.5, 1.0, TwoSidedExponential(0.5, 3.0, 3.0)),
                   IidDisplaced(Geometric(0.5), Gaussian(0.0, 0.5))),
    BranchingModel(0.7, MotionSpec(0.0, 1.0), FixedConfiguration((-0.5, 0.0, 0.8))),
])
def test_tilted_mass_growth(model):
    th = 0.6
    k = sp.kappa(model, th)
    cfg = SimConfig((1.0, 2.0))
    rows = np.array(run_replicas(model, cfg, 6000, SEED,
                                 lambda r: [np.exp(th * s.positions).sum() for s in r.snapshots]))
    for j, t in enumerate((1.0, 2.0)):
        x = rows[:, j] / math.exp(k * t)
        assert abs(x.mean() - 1) <= 3 * x.std(ddof=1) / math.sqrt(x.size)


def test_root_lifetime_is_exponential():
    beta = 1.7
    model = binary_bbm(beta)
    life = run_replicas(model, SimConfig((0.01,)), 10**4, SEED, lambda r: r.root_lifetime)
    _, pv = ks_statistic(life, lambda x: 1 - np.exp(-beta * x))
    assert pv > 0.01


def test_snapshot_lineage():
    model = binary_bbm()
    real = simulate_times(model, [1.0, 2.0, 3.0], seed=11)
    prev = None
    for s in real.snapshots:
        assert s.ancestors.shape == s.positions.shape
        if prev is None:
            assert np.all(s.ancestors == -1)
        else:
            assert s.mass >= prev.mass
            assert s.ancestors.min() >= 0 and s.ancestors.max() < prev.mass
        prev = s


def test_lineage_increments_are_brownian():
    # displacement from the ancestor at s=1 to t=2 is N(0, 1) for local offspring
    reals = run_replicas(binary_bbm(), SimConfig((1.0, 2.0)), 400, SEED)
    diffs = np.concatenate([r.snapshots[1].positions - r.snapshots[0].positions[r.snapshots[1].ancestors]
                            for r in reals])
    assert diffs.var() == pytest.approx(1.0, rel=0.05)
    assert abs(diffs.mean()) < 0.05


def test_determinism_and_thread_independence():
    model = binary_bbm()
    cfg = SimConfig((1.0, 3.0))
    a = simulate(model, cfg, seed=99)
    b = simulate(model, cfg, seed=99)
    for sa, sb in zip(a.snapshots, b.snapshots):
        assert np.array_equal(sa.positions, sb.positions)
    one = run_replicas(model, cfg, 40, 7)
    four = run_replicas(model, cfg, 40, 7, threads=4)
    for ra, rb in zip(one, four):
        assert all(np.array_equal(x.positions, y.positions) for x, y in zip(ra.snapshots, rb.snapshots))
    first = simulate(model, cfg, rng=replica_stream(7, 0))
    assert np.array_equal(first.snapshots[1].positions, one[0].snapshots[1].positions)


def test_different_streams_differ():
    a = simulate(binary_bbm(), SimConfig((3.0,), rng_stream=0))
    b = simulate(binary_bbm(), SimConfig((3.0,), rng_stream=1))
    assert not np.array_equal(a.snapshots[0].positions, b.snapshots[0].positions)


def test_explosion_carries_truncated_realization():
    with pytest.raises(Explosion) as exc:
        simulate(binary_bbm(), SimConfig((1.0, 8.0), max_particles=50))
    real = exc.value.realization
    assert isinstance(real, TreeRealization) and real.truncated


def test_replica_explosion_is_counted():
    with pytest.raises(Explosion) as exc:
        run_replicas(binary_bbm(), SimConfig((6.0,), max_particles=30), 20, 3)
    assert exc.value.replica is not None and "of 20 replicas" in str(exc.value)


def test_initial_positions_continue_a_snapshot():
    real = simulate(drift_only(1.0), SimConfig((1.0,)), initial_positions=[2.0, -1.0])
    assert set(np.unique(real.snapshots[0].positions)) == {3.0, 0.0}
