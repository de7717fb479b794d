from __future__ import annotations

import itertools
import math

import numpy as np
import pytest

from fpclab.ising import IsingModel, chain_model, square_lattice_model
from fpclab.mc import (CSV_HEADER, CrossingResult, ObservableRecord, Schedule,
                       SpinConfig, aggregate_records, binder_crossing,
                       binder_jackknife, blocking_error, default_carpet_schedule,
                       derive_stream, metropolis_sweep, read_records_csv,
                       run_schedule, thread_count, wolff_update,
                       write_records_csv)


def gibbs_probs(n: int, bonds, beta: float) -> np.ndarray:
    """Oracle: exact Gibbs weights, state index bit i = spin i up."""
    probs = np.zeros(2 ** n)
    for idx in range(2 ** n):
        v = [1.0 if idx >> i & 1 else -1.0 for i in range(n)]
        e = -sum(v[a] * v[b] for (a, b) in bonds)
        probs[idx] = math.exp(-beta * e)
    return probs / probs.sum()


def exact_energy_per_spin(n: int, bonds, beta: float) -> float:
    probs = gibbs_probs(n, bonds, beta)
    total = 0.0
    for idx in range(2 ** n):
        v = [1.0 if idx >> i & 1 else -1.0 for i in range(n)]
        total += probs[idx] * -sum(v[a] * v[b] for (a, b) in bonds)
    return total / n


CYCLE4 = [(0, 1), (1, 2), (2, 3), (0, 3)]


def test_derive_stream_is_stable_and_distinct():
    s = derive_stream(1234, 2, 5)
    assert s.dtype == np.uint64 and s.shape == (4,)
    assert np.array_equal(s, derive_stream(1234, 2, 5))
    others = [derive_stream(1234, 2, 6), derive_stream(1234, 3, 5),
              derive_stream(1235, 2, 5)]
    for o in others:
        assert not np.array_equal(s, o)
    assert derive_stream(0).any()  # the all-zero state is forbidden


def test_spin_config_cache_and_measurements():
    m = IsingModel(4, [(b, 1.0) for b in CYCLE4])
    cfg = SpinConfig(m, beta_scale=0.5)
    assert cfg.magnetization() == 1.0
    assert cfg.energy_per_spin() == -1.0  # all-up: every bond satisfied
    assert cfg.verify_cache()
    state = derive_stream(3)
    for _ in range(50):
        metropolis_sweep(cfg, state)
    assert cfg.verify_cache()
    with pytest.raises(ValueError):
        SpinConfig(m, values=np.array([1, 2, 1, 1]))
    with pytest.raises(ValueError):
        SpinConfig(m, beta_scale=-0.1)


def test_metropolis_visits_every_state_with_gibbs_frequencies():
    # fixed-seed regression: local-field ties must not trap the chain
    beta = 0.5
    m = IsingModel(4, [(b, 1.0) for b in CYCLE4])
    cfg = SpinConfig(m, beta_scale=beta)
    state = derive_stream(99)
    for _ in range(500):
        metropolis_sweep(cfg, state)
    n_sweeps = 40000
    counts = np.zeros(16)
    weights = np.arange(4)
    for _ in range(n_sweeps):
        metropolis_sweep(cfg, state)
        counts[int(((cfg.values > 0) << weights).sum())] += 1
    assert counts.min() > 0, "some states were never visited"
    probs = gibbs_probs(4, CYCLE4, beta)
    z = (counts / n_sweeps - probs) / np.sqrt(probs * (1 - probs) / n_sweeps)
    # autocorrelation inflates the iid z somewhat; 6 is far from the
    # broken-chain signature (absent states give z ~ -sqrt(n p))
    assert np.abs(z).max() < 6.0


def test_wolff_visits_every_state_with_gibbs_frequencies():
    beta = 0.5
    m = IsingModel(4, [(b, 1.0) for b in CYCLE4])
    cfg = SpinConfig(m, beta_scale=beta)
    state = derive_stream(123)
    n_updates = 40000
    counts = np.zeros(16)
    weights = np.arange(4)
    for _ in range(n_updates):
        wolff_update(cfg, state)
        counts[int(((cfg.values > 0) << weights).sum())] += 1
    assert counts.min() > 0
    probs = gibbs_probs(4, CYCLE4, beta)
    z = (counts / n_updates - probs) / np.sqrt(probs * (1 - probs) / n_updates)
    assert np.abs(z).max() < 6.0


@pytest.mark.parametrize("beta,tol", [(0.1, 0.025), (2.0, 0.005)])
def test_cycle_energy_matches_enumeration(beta, tol):
    # tolerances sit at ~4.5 sigma of the measured run-to-run spread
    m = chain_model(4, 1.0, periodic=True)
    rec = run_schedule(m, Schedule(betas=(beta,), sweeps=30000, burn_in=2000,
                                   replicas=1, seed=17, algorithm="metropolis"))[0]
    assert rec.energy == pytest.approx(exact_energy_per_spin(4, CYCLE4, beta), abs=tol)


def test_free_spins_have_inverse_size_m2():
    # at beta = 0 each replica holds an independent uniform configuration,
    # so <m^2> averaged over replicas approaches 1/num_spins
    m = square_lattice_model(4, 4, 1.0)
    recs = run_schedule(m, Schedule(betas=(0.0,), sweeps=16, burn_in=1,
                                    replicas=33, seed=5, algorithm="metropolis"))
    agg = aggregate_records(recs)[0]
    assert agg.replica == -1
    assert 0.01 < agg.m2 < 0.13  # 1/16 within ~3 sigma of the 33-replica mean


def test_wolff_and_metropolis_agree():
    m = square_lattice_model(4, 4, 1.0)
    rec_w = run_schedule(m, Schedule(betas=(0.35,), sweeps=20000, burn_in=2000,
                                     replicas=1, seed=31, algorithm="wolff"))[0]
    rec_m = run_schedule(m, Schedule(betas=(0.35,), sweeps=40000, burn_in=4000,
                                     replicas=1, seed=32, algorithm="metropolis"))[0]
    tol = 4 * math.hypot(rec_w.err_abs_m, rec_m.err_abs_m)
    assert rec_w.abs_m == pytest.approx(rec_m.abs_m, abs=max(tol, 0.02))


def test_wolff_requires_two_body():
    hyper = IsingModel(3, [((0, 1, 2), 0.4)])
    with pytest.raises(ValueError):
        run_schedule(hyper, Schedule(betas=(0.5,), sweeps=32, burn_in=1,
                                     seed=0, algorithm="wolff"))
    # auto falls back to metropolis for the same model
    run_schedule(hyper, Schedule(betas=(0.5,), sweeps=32, burn_in=1, seed=0))


def test_run_schedule_bitwise_deterministic():
    m = square_lattice_model(3, 3, 1.0)
    sched = Schedule(betas=(0.2, 0.6), sweeps=500, burn_in=100, replicas=2, seed=77)
    a = run_schedule(m, sched)
    b = run_schedule(m, sched)
    assert a == b
    # ordering contract: beta-major, replicas ascending inside
    assert [(r.beta, r.replica) for r in a] == [(0.2, 0), (0.2, 1), (0.6, 0), (0.6, 1)]
    # replicas are genuinely different streams
    assert a[0].abs_m != a[1].abs_m


def test_worker_count_does_not_change_results(monkeypatch):
    m = square_lattice_model(3, 3, 1.0)
    sched = Schedule(betas=(0.3, 0.5), sweeps=400, burn_in=50, replicas=2, seed=9)
    monkeypatch.setenv("FPC_LAB_THREADS", "1")
    serial = run_schedule(m, sched)
    monkeypatch.setenv("FPC_LAB_THREADS", "4")
    threaded = run_schedule(m, sched)
    assert serial == threaded


def test_thread_count_env_cap(monkeypatch):
    monkeypatch.setenv("FPC_LAB_THREADS", "2")
    assert 1 <= thread_count(8) <= 2  # env caps, cpu count may cap further
    monkeypatch.setenv("FPC_LAB_THREADS", "1")
    assert thread_count(8) == 1
    monkeypatch.delenv("FPC_LAB_THREADS")
    assert thread_count(1) == 1


def test_schedule_validation():
    ok = dict(sweeps=100, burn_in=10, seed=0)
    with pytest.raises(ValueError):
        Schedule(betas=(), **ok)
    with pytest.raises(ValueError):
        Schedule(betas=(0.5, 0.4), **ok)
    with pytest.raises(ValueError):
        Schedule(betas=(-0.1,), **ok)
    with pytest.raises(ValueError):
        Schedule(betas=(0.5,), sweeps=0, burn_in=10, seed=0)
    with pytest.raises(ValueError):
        Schedule(betas=(0.5,), sweeps=100, burn_in=10, stride=10, seed=0)  # 10 < 16 measurements
    with pytest.raises(ValueError):
        Schedule(betas=(0.5,), algorithm="gibbs", **ok)
    sched = default_carpet_schedule(seed=4, replicas=2)
    assert sched.algorithm == "wolff" and len(sched.betas) == 26
    assert sched.betas[0] == 0.2 and sched.betas[-1] == 1.2


def test_blocking_error_tracks_iid_sem():
    rng = np.random.default_rng(8)
    series = rng.normal(size=4096)
    err = blocking_error(series)
    sem = series.std(ddof=1) / math.sqrt(series.size)
    assert 0.4 * sem < err < 2.5 * sem
    with pytest.raises(ValueError):
        blocking_error(np.arange(8.0))  # fewer samples than blocks


def test_binder_jackknife_gaussian_is_near_zero():
    rng = np.random.default_rng(21)
    m_series = rng.normal(size=8192)
    u, err = binder_jackknife(m_series)
    assert err > 0
    assert abs(u) < 5 * err + 0.05


def _rec(beta, binder, replica=0, err_binder=0.01):
    return ObservableRecord(beta=beta, replica=replica, abs_m=0.5, m2=0.3,
                            m4=0.2, energy=-1.0, susceptibility=1.0,
                            binder=binder, err_abs_m=0.01, err_binder=err_binder)


def test_csv_roundtrip(tmp_path):
    m = square_lattice_model(3, 3, 1.0)
    recs = run_schedule(m, Schedule(betas=(0.3, 0.5), sweeps=200, burn_in=20,
                                    replicas=2, seed=3))
    main, agg = write_records_csv(recs, tmp_path / "obs.csv")
    assert main.endswith("obs.csv") and agg.endswith("obs_aggregated.csv")
    with open(main) as fh:
        assert fh.readline().rstrip("\n") == CSV_HEADER
    # rows carry no replica column; observables round-trip exactly
    back = read_records_csv(main)
    for got, want in zip(back, recs, strict=True):
        assert got.replica == -1
        for attr in ("beta", "abs_m", "m2", "m4", "energy", "susceptibility",
                     "binder", "err_abs_m", "err_binder"):
            assert getattr(got, attr) == getattr(want, attr)
    agg_back = read_records_csv(agg)
    assert agg_back == aggregate_records(recs)


def test_read_rejects_foreign_header(tmp_path):
    path = tmp_path / "x.csv"
    path.write_text("beta,magnetization\n0.5,0.3\n")
    with pytest.raises(ValueError):
        read_records_csv(path)


def test_aggregate_math():
    recs = [_rec(0.5, 0.3, replica=0, err_binder=0.03),
            _rec(0.5, 0.5, replica=1, err_binder=0.04)]
    agg = aggregate_records(recs)[0]
    assert agg.binder == pytest.approx(0.4)
    assert agg.err_binder == pytest.approx(math.hypot(0.03, 0.04) / 2)


def test_binder_crossing_linear_curves():
    betas = [0.2, 0.3, 0.4, 0.5]
    small = [_rec(b, 0.60 - 1.0 * b) for b in betas]   # U = .6 - b
    large = [_rec(b, 0.95 - 2.0 * b) for b in betas]   # U = .95 - 2b, cross at .35
    res = binder_crossing(small, large)
    assert res is not None and not res.degenerate
    assert res.beta == pytest.approx(0.35, abs=1e-12)
    assert res.uncertainty > 0
    again = binder_crossing(small, large)
    assert (res.beta, res.uncertainty) == (again.beta, again.uncertainty)


def test_binder_crossing_degenerate_and_absent():
    betas = [0.2, 0.3, 0.4]
    same = [_rec(b, 0.1) for b in betas]
    res = binder_crossing(same, [_rec(b, 0.1) for b in betas])
    assert res.degenerate
    assert res.beta == pytest.approx(0.3)
    apart = binder_crossing([_rec(b, 0.5) for b in betas],
                            [_rec(b, 0.1) for b in betas])
    assert apart is None
    with pytest.raises(ValueError):
        binder_crossing([_rec(b, 0.5) for b in (0.1, 0.2)],
                        [_rec(b, 0.1) for b in (0.3, 0.4)])
