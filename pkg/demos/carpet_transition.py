"""Locate the ordering transition of the carpet Z sector by Binder crossing.

Calibrates the pipeline on the square lattice (where the critical coupling
is known in closed form), then crosses two carpet generations.  Runs in
about half a minute; the shipped defaults use longer schedules.
"""

from __future__ import annotations

import math

from fpclab.carpet import CarpetSpec, build_carpet_graph
from fpclab.ising import graph_ising_model, square_lattice_model
from fpclab.mc import Schedule, binder_crossing, run_schedule


def carpet_model(l: int):
    g = build_carpet_graph(CarpetSpec(3, 1, l))
    return graph_ising_model(len(g.vertices), g.edges, 1.0)


def main() -> None:
    exact = 0.5 * math.log(1 + math.sqrt(2))
    betas = tuple(round(0.40 + 0.01 * i, 2) for i in range(9))
    curves = {}
    for size, seed in [(16, 1), (32, 2)]:
        sched = Schedule(betas=betas, sweeps=8000, burn_in=1000, replicas=1,
                         seed=seed, algorithm="wolff")
        curves[size] = run_schedule(square_lattice_model(size, size, 1.0), sched)
    res = binder_crossing(curves[16], curves[32])
    print(f"square lattice 16 vs 32: crossing at beta = {res.beta:.4f} "
          f"+- {res.uncertainty:.4f} (exact {exact:.4f})")

    betas = tuple(round(0.47 + 0.01 * i, 2) for i in range(7))
    curves = {}
    for l, seed in [(3, 3), (4, 4)]:
        sched = Schedule(betas=betas, sweeps=8000, burn_in=1000, replicas=1,
                         seed=seed, algorithm="wolff")
        curves[l] = run_schedule(carpet_model(l), sched)
    res = binder_crossing(curves[3], curves[4])
    print(f"carpet level 3 vs 4:     crossing at beta = {res.beta:.4f} "
          f"+- {res.uncertainty:.4f}")

    # Two-point sanity check on the larger carpet: disordered when hot,
    # fully magnetized when cold.
    model = carpet_model(4)
    recs = run_schedule(model, Schedule(betas=(0.2, 1.2), sweeps=3000,
                                        burn_in=500, replicas=1, seed=5,
                                        algorithm="wolff"))
    floor = 3 / math.sqrt(model.num_spins)
    print(f"level-4 carpet, {model.num_spins} spins: "
          f"|m|(beta=0.2) = {recs[0].abs_m:.4f} (noise floor {floor:.4f}), "
          f"|m|(beta=1.2) = {recs[1].abs_m:.4f}")


if __name__ == "__main__":
    main()
