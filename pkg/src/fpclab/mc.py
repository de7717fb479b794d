"""Monte Carlo simulation of generalized Ising models.

Metropolis handles arbitrary k-body interactions; Wolff clusters need
pure 2-body models.  All randomness flows from a 64-bit master seed
through splitmix64-style hashing into independent xoshiro256++ streams,
one per (beta index, replica), so results are bit-identical regardless
of how many worker threads run the schedule.

Energy is reported per spin with the physical sign, -sum_B J_B sigma_B / n,
using the unscaled couplings J (beta multiplies them only inside the
dynamics).  Magnetization is m = sum(sigma)/n per measurement.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .ising import IsingModel

__all__ = [
    "derive_stream",
    "SpinConfig",
    "Schedule",
    "ObservableRecord",
    "CrossingResult",
    "default_carpet_schedule",
    "metropolis_sweep",
    "wolff_update",
    "run_schedule",
    "aggregate_records",
    "blocking_error",
    "binder_jackknife",
    "write_records_csv",
    "read_records_csv",
    "binder_crossing",
    "thread_count",
    "CSV_HEADER",
]

CSV_HEADER = "beta,abs_m,m2,m4,energy,susceptibility,binder,err_abs_m,err_binder"

_M64 = (1 << 64) - 1


def _mix64(a: int, b: int) -> int:
    """splitmix64 finalizer over a combined word; the stream-seed hash."""
    z = (a ^ ((b * 0x9E3779B97F4A7C15) & _M64) ^ 0x736F6D6570736575) & _M64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return z ^ (z >> 31)


def derive_stream(master_seed: int, beta_index: int = 0, replica: int = 0) -> np.ndarray:
    """Independent xoshiro256++ state for one (beta, replica) job."""
    h = _mix64(master_seed & _M64, 0x5452414E)
    h = _mix64(h, (beta_index & _M64) + 0x100)
    h = _mix64(h, (replica & _M64) + 0x200)
    state = np.empty(4, dtype=np.uint64)
    x = h
    for i in range(4):
        x = (x + 0x9E3779B97F4A7C15) & _M64
        z = x
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
        state[i] = z ^ (z >> 31)
    if not state.any():
        state[0] = 1  # all-zero is the one forbidden xoshiro state
    return state


def _spin_csr(m: IsingModel) -> tuple[np.ndarray, np.ndarray]:
    """CSR of spin -> incident interaction indices."""
    counts = np.zeros(m.num_spins + 1, dtype=np.int64)
    for t in m.interactions:
        for s in t.support:
            counts[s + 1] += 1
    ptr = np.cumsum(counts).astype(np.int32)
    ints = np.empty(int(ptr[-1]), dtype=np.int32)
    cursor = ptr[:-1].astype(np.int64).copy()
    for b, t in enumerate(m.interactions):
        for s in t.support:
            ints[cursor[s]] = b
            cursor[s] += 1
    return ints, ptr


def _bond_arrays(m: IsingModel):
    """Adjacency CSR plus bond endpoint arrays; 2-body models only."""
    if m.max_arity() != 2 or any(len(t.support) != 2 for t in m.interactions):
        raise ValueError("cluster updates need a pure 2-body model")
    nb = m.num_interactions
    bond_u = np.empty(nb, dtype=np.int32)
    bond_v = np.empty(nb, dtype=np.int32)
    counts = np.zeros(m.num_spins + 1, dtype=np.int64)
    for b, t in enumerate(m.interactions):
        u, v = t.support
        bond_u[b] = u
        bond_v[b] = v
        counts[u + 1] += 1
        counts[v + 1] += 1
    ptr = np.cumsum(counts).astype(np.int32)
    nbr_spin = np.empty(int(ptr[-1]), dtype=np.int32)
    nbr_bond = np.empty(int(ptr[-1]), dtype=np.int32)
    cursor = ptr[:-1].astype(np.int64).copy()
    for b, t in enumerate(m.interactions):
        u, v = t.support
        nbr_spin[cursor[u]] = v
        nbr_bond[cursor[u]] = b
        cursor[u] += 1
        nbr_spin[cursor[v]] = u
        nbr_bond[cursor[v]] = b
        cursor[v] += 1
    return nbr_spin, nbr_bond, ptr, bond_u, bond_v


class SpinConfig:
    """A spin configuration bound to a model, with cached interaction
    parities (sigma_B products) and the flat arrays the kernels need.

    beta_scale multiplies the stored couplings for the dynamics; energy
    measurements always use the unscaled couplings.
    """

    def __init__(self, model: IsingModel, beta_scale: float = 1.0,
                 values: np.ndarray | None = None):
        if beta_scale < 0:
            raise ValueError("beta_scale must be >= 0")
        self.model = model
        self.beta_scale = float(beta_scale)
        if values is None:
            values = np.ones(model.num_spins, dtype=np.int8)
        else:
            values = np.asarray(values, dtype=np.int8).copy()
            if values.shape != (model.num_spins,) or not np.isin(values, (-1, 1)).all():
                raise ValueError("values must be +-1 per spin")
        self.values = values
        self.js = model.couplings()
        self.ks = self.js * self.beta_scale
        self.spin_ints, self.spin_ptr = _spin_csr(model)
        self.sigma = self._recompute_sigma()
        self.perm = np.arange(model.num_spins, dtype=np.int64)
        self._wolff = None

    def _recompute_sigma(self) -> np.ndarray:
        sigma = np.empty(self.model.num_interactions, dtype=np.int8)
        for b, t in enumerate(self.model.interactions):
            prod = 1
            for s in t.support:
                prod *= int(self.values[s])
            sigma[b] = prod
        return sigma

    def verify_cache(self) -> bool:
        return bool(np.array_equal(self.sigma, self._recompute_sigma()))

    def wolff_arrays(self):
        if self._wolff is None:
            nbr_spin, nbr_bond, ptr, bond_u, bond_v = _bond_arrays(self.model)
            p_add = 1.0 - np.exp(-2.0 * self.ks)
            stack = np.empty(self.model.num_spins, dtype=np.int64)
            self._wolff = (nbr_spin, nbr_bond, ptr, bond_u, bond_v, p_add, stack)
        return self._wolff

    def magnetization(self) -> float:
        return float(self.values.sum()) / max(1, self.values.size)

    def energy_per_spin(self) -> float:
        return float(-(self.js * self.sigma).sum()) / max(1, self.values.size)


def metropolis_sweep(config: SpinConfig, rng_state: np.ndarray) -> int:
    """One sweep: one attempted flip per spin in a freshly shuffled order;
    acceptance min(1, exp(-2 sum_{B owns j} K_B sigma_B)).  Returns the
    accepted-flip count.  The random order is what keeps the chain
    irreducible on models with exact local-field ties."""
    return int(_kernels.metropolis_sweep_kernel(
        config.values, config.sigma, config.ks,
        config.spin_ints, config.spin_ptr, config.perm, rng_state))


def wolff_update(config: SpinConfig, rng_state: np.ndarray) -> int:
    """One cluster update with bond probability 1 - exp(-2K); 2-body
    models only.  Returns the cluster size."""
    nbr_spin, nbr_bond, ptr, _, _, p_add, stack = config.wolff_arrays()
    size = int(_kernels.wolff_update_kernel(
        config.values, nbr_spin, nbr_bond, ptr, p_add, rng_state, stack))
    config.sigma = config._recompute_sigma()
    return size


@dataclass(frozen=True)
class Schedule:
    """Simulation plan: ascending beta grid, sweep counts, stride,
    replicas, and the master seed all randomness derives from."""

    betas: tuple[float, ...]
    sweeps: int = 100_000
    burn_in: int = 10_000
    stride: int = 1
    replicas: int = 1
    seed: int = 0
    algorithm: str = "auto"  # auto | metropolis | wolff

    def __post_init__(self):
        betas = tuple(float(b) for b in self.betas)
        object.__setattr__(self, "betas", betas)
        if not betas:
            raise ValueError("empty beta grid")
        if any(b < 0 for b in betas):
            raise ValueError("beta must be >= 0")
        if any(b2 <= b1 for b1, b2 in zip(betas, betas[1:])):
            raise ValueError("beta grid must be strictly ascending")
        if self.sweeps <= 0 or self.burn_in < 0 or self.stride <= 0 or self.replicas <= 0:
            raise ValueError("counts must be positive")
        if self.measurements < 16:
            raise ValueError("need at least 16 measurements for blocking errors")
        if self.algorithm not in ("auto", "metropolis", "wolff"):
            raise ValueError(f"unknown algorithm {self.algorithm!r}")

    @property
    def measurements(self) -> int:
        return self.sweeps // self.stride


def default_carpet_schedule(seed: int = 0, replicas: int = 1) -> Schedule:
    """26 beta points on [0.2, 1.2], 1e4 burn-in, 1e5 measured sweeps,
    cluster updates."""
    betas = tuple(np.linspace(0.2, 1.2, 26))
    return Schedule(betas=betas, sweeps=100_000, burn_in=10_000,
                    stride=1, replicas=replicas, seed=seed, algorithm="wolff")


@dataclass(frozen=True)
class ObservableRecord:
    """Per-(beta, replica) measurement summary.

    susceptibility = n * beta * (<m^2> - <|m|>^2); binder is the cumulant
    1 - <m^4>/(3<m^2>^2); errors come from 16-block blocking (abs_m) and
    a block jackknife (binder).  replica -1 marks an aggregate."""

    beta: float
    replica: int
    abs_m: float
    m2: float
    m4: float
    energy: float
    susceptibility: float
    binder: float
    err_abs_m: float
    err_binder: float


@dataclass(frozen=True)
class CrossingResult:
    beta: float
    uncertainty: float
    degenerate: bool = False
    bootstrap_hits: int = 0


def blocking_error(series: np.ndarray, n_blocks: int = 16) -> float:
    """Standard error of the mean from n_blocks block means."""
    series = np.asarray(series, dtype=np.float64)
    if series.size < n_blocks:
        raise ValueError(f"need >= {n_blocks} samples")
    per = series.size // n_blocks
    trimmed = series[: per * n_blocks].reshape(n_blocks, per)
    means = trimmed.mean(axis=1)
    return float(means.std(ddof=1) / math.sqrt(n_blocks))


def binder_jackknife(m_series: np.ndarray, n_blocks: int = 16) -> tuple[float, float]:
    """Binder cumulant and its leave-one-block-out jackknife error."""
    m = np.asarray(m_series, dtype=np.float64)
    if m.size < n_blocks:
        raise ValueError(f"need >= {n_blocks} samples")
    per = m.size // n_blocks
    m = m[: per * n_blocks].reshape(n_blocks, per)
    b2 = (m ** 2).mean(axis=1)
    b4 = (m ** 4).mean(axis=1)
    tot2, tot4 = float(b2.sum()), float(b4.sum())
    full = 1.0 - (tot4 / n_blocks) / (3.0 * (tot2 / n_blocks) ** 2) if tot2 > 0 else float("nan")
    jk = np.empty(n_blocks)
    for i in range(n_blocks):
        m2_i = (tot2 - b2[i]) / (n_blocks - 1)
        m4_i = (tot4 - b4[i]) / (n_blocks - 1)
        jk[i] = 1.0 - m4_i / (3.0 * m2_i ** 2) if m2_i > 0 else float("nan")
    if np.isnan(jk).any() or math.isnan(full):
        return full, float("nan")
    err = math.sqrt((n_blocks - 1) / n_blocks * float(((jk - jk.mean()) ** 2).sum()))
    return full, err


def thread_count(n_jobs: int) -> int:
    """Worker count: FPC_LAB_THREADS caps os.cpu_count()."""
    cap = os.cpu_count() or 1
    env = os.environ.get("FPC_LAB_THREADS")
    if env:
        try:
            cap = min(cap, max(1, int(env)))
        except ValueError:
            pass
    return max(1, min(cap, n_jobs))


def _resolve_algorithm(model: IsingModel, algorithm: str) -> str:
    if algorithm == "auto":
        return "wolff" if model.max_arity() == 2 and model.num_interactions > 0 else "metropolis"
    if algorithm == "wolff" and any(len(t.support) != 2 for t in model.interactions):
        raise ValueError("cluster updates need a pure 2-body model")
    return algorithm


def _run_point(model: IsingModel, schedule: Schedule, algorithm: str,
               beta_index: int, replica: int) -> ObservableRecord:
    beta = schedule.betas[beta_index]
    state = derive_stream(schedule.seed, beta_index, replica)
    # hot start from the same stream: a cold start at beta=0 would make
    # the all-accepting systematic sweep a deterministic global negation
    values = np.empty(model.num_spins, dtype=np.int8)
    _kernels.random_signs_kernel(values, state)
    config = SpinConfig(model, beta_scale=beta, values=values)
    meas = schedule.measurements
    out_m = np.empty(meas, dtype=np.float64)
    out_e = np.empty(meas, dtype=np.float64)
    if algorithm == "wolff":
        nbr_spin, nbr_bond, ptr, bond_u, bond_v, p_add, stack = config.wolff_arrays()
        _kernels.wolff_run_kernel(config.values, nbr_spin, nbr_bond, ptr, p_add,
                                  config.js, bond_u, bond_v,
                                  schedule.burn_in, meas, schedule.stride,
                                  state, out_m, out_e, stack)
    else:
        _kernels.metropolis_run_kernel(config.values, config.sigma, config.ks,
                                       config.js, config.spin_ints, config.spin_ptr,
                                       config.perm,
                                       schedule.burn_in, meas, schedule.stride,
                                       state, out_m, out_e)
    n = model.num_spins
    abs_m = float(np.abs(out_m).mean())
    m2 = float((out_m ** 2).mean())
    m4 = float((out_m ** 4).mean())
    energy = float(out_e.mean())
    chi = n * beta * (m2 - abs_m ** 2)
    binder, err_binder = binder_jackknife(out_m)
    err_abs_m = blocking_error(np.abs(out_m))
    return ObservableRecord(beta=beta, replica=replica, abs_m=abs_m, m2=m2, m4=m4,
                            energy=energy, susceptibility=chi, binder=binder,
                            err_abs_m=err_abs_m, err_binder=err_binder)


def run_schedule(model: IsingModel, schedule: Schedule) -> list[ObservableRecord]:
    """Simulate every (beta, replica) pair; records come back beta-major
    (beta ascending, replica ascending within each beta).

    Each pair owns an independent RNG stream derived from (seed, beta
    index, replica), so the output is identical for any worker count.
    """
    algorithm = _resolve_algorithm(model, schedule.algorithm)
    jobs = [(bi, r) for bi in range(len(schedule.betas)) for r in range(schedule.replicas)]
    workers = thread_count(len(jobs))
    results: dict[tuple[int, int], ObservableRecord] = {}
    if workers == 1:
        for bi, r in jobs:
            results[(bi, r)] = _run_point(model, schedule, algorithm, bi, r)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {(bi, r): pool.submit(_run_point, model, schedule, algorithm, bi, r)
                       for bi, r in jobs}
            for key, fut in futures.items():
                results[key] = fut.result()
    return [results[key] for key in jobs]


def aggregate_records(records: list[ObservableRecord]) -> list[ObservableRecord]:
    """Average replicas at each beta (replica set to -1); independent
    errors combine as sqrt(sum err^2)/count."""
    groups: dict[float, list[ObservableRecord]] = {}
    order: list[float] = []
    for rec in records:
        if rec.beta not in groups:
            groups[rec.beta] = []
            order.append(rec.beta)
        groups[rec.beta].append(rec)
    out = []
    for beta in order:
        rs = groups[beta]
        k = len(rs)

        def mean(attr):
            return sum(getattr(r, attr) for r in rs) / k

        def err(attr):
            return math.sqrt(sum(getattr(r, attr) ** 2 for r in rs)) / k

        out.append(ObservableRecord(beta=beta, replica=-1,
                                    abs_m=mean("abs_m"), m2=mean("m2"), m4=mean("m4"),
                                    energy=mean("energy"),
                                    susceptibility=mean("susceptibility"),
                                    binder=mean("binder"),
                                    err_abs_m=err("err_abs_m"),
                                    err_binder=err("err_binder")))
    return out


def _record_row(rec: ObservableRecord) -> str:
    # repr of a plain float is exact and round-trips; numpy scalars are not
    return ",".join(repr(float(v)) for v in (rec.beta, rec.abs_m, rec.m2, rec.m4,
                                             rec.energy, rec.susceptibility, rec.binder,
                                             rec.err_abs_m, rec.err_binder))


def write_records_csv(records: list[ObservableRecord], path) -> tuple[str, str]:
    """Write per-replica rows plus a <stem>_aggregated.csv beside them."""
    path = str(path)
    with open(path, "w", encoding="ascii") as fh:
        fh.write(CSV_HEADER + "\n")
        for rec in records:
            fh.write(_record_row(rec) + "\n")
    stem, ext = os.path.splitext(path)
    agg_path = stem + "_aggregated" + (ext or ".csv")
    with open(agg_path, "w", encoding="ascii") as fh:
        fh.write(CSV_HEADER + "\n")
        for rec in aggregate_records(records):
            fh.write(_record_row(rec) + "\n")
    return path, agg_path


def read_records_csv(path) -> list[ObservableRecord]:
    records = []
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise ValueError(f"unexpected CSV header {header!r}")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            vals = [float(x) for x in line.split(",")]
            records.append(ObservableRecord(beta=vals[0], replica=-1, abs_m=vals[1],
                                            m2=vals[2], m4=vals[3], energy=vals[4],
                                            susceptibility=vals[5], binder=vals[6],
                                            err_abs_m=vals[7], err_binder=vals[8]))
    return records


def _curve(records: list[ObservableRecord]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    agg = aggregate_records(records)
    betas = np.array([r.beta for r in agg])
    if np.any(np.diff(betas) <= 0):
        raise ValueError("beta grid must be ascending")
    u = np.array([r.binder for r in agg])
    e = np.array([0.0 if math.isnan(r.err_binder) else r.err_binder for r in agg])
    return betas, u, e


def _first_root(grid: np.ndarray, diff: np.ndarray) -> float | None:
    for i in range(diff.size - 1):
        a, b = diff[i], diff[i + 1]
        if a == 0.0:
            return float(grid[i])
        if a * b < 0:
            return float(grid[i] - a * (grid[i + 1] - grid[i]) / (b - a))
    if diff[-1] == 0.0:
        return float(grid[-1])
    return None


def binder_crossing(records_small, records_large, n_boot: int = 200,
                    boot_seed: int = 12345) -> CrossingResult | None:
    """Crossing of two Binder curves by linear interpolation.

    Returns the first sign change of U_small - U_large on the overlapping
    grid with a Gaussian-resampling bootstrap uncertainty; None when the
    curves never cross; the overlap midpoint flagged degenerate when the
    curves coincide.  Non-overlapping grids raise.
    """
    ba, ua, ea = _curve(records_small)
    bb, ub, eb = _curve(records_large)
    lo = max(ba[0], bb[0])
    hi = min(ba[-1], bb[-1])
    if lo > hi:
        raise ValueError("beta grids do not overlap")
    grid = np.unique(np.concatenate([ba, bb]))
    grid = grid[(grid >= lo) & (grid <= hi)]
    ua_g = np.interp(grid, ba, ua)
    ub_g = np.interp(grid, bb, ub)
    ea_g = np.interp(grid, ba, ea)
    eb_g = np.interp(grid, bb, eb)
    diff = ua_g - ub_g
    if np.all(np.abs(diff) < 1e-12):
        return CrossingResult(beta=float((lo + hi) / 2), uncertainty=float((hi - lo) / 2),
                              degenerate=True)
    root = _first_root(grid, diff)
    if root is None:
        return None
    rng = np.random.default_rng(boot_seed)
    roots = []
    for _ in range(n_boot):
        pert = (ua_g + rng.normal(0.0, 1.0, grid.size) * ea_g
                - ub_g - rng.normal(0.0, 1.0, grid.size) * eb_g)
        r = _first_root(grid, pert)
        if r is not None:
            roots.append(r)
    if len(roots) >= 2:
        unc = float(np.std(roots, ddof=1))
    else:
        unc = float("nan")
    return CrossingResult(beta=root, uncertainty=unc, degenerate=False,
                          bootstrap_hits=len(roots))
