"""Energy barrier growth across carpet levels."""

from __future__ import annotations

import math

from fpclab.carpet import CarpetSpec, barrier_closed_form, energy_barrier_cut


def main() -> None:
    for (b, c), levels in [((3, 1), range(4)), ((5, 3), range(3))]:
        print(f"({b},{c}) carpets, cheapest straight cut per level:")
        prev = None
        for l in levels:
            spec = CarpetSpec(b, c, l)
            cut = energy_barrier_cut(spec)
            closed = barrier_closed_form(spec)
            ratio = "" if prev is None else f"  x{cut.count / prev:.2f}"
            print(f"  level {l}: {cut.count:3d} crossed edges "
                  f"(closed form {closed}, exact = {cut.exact}){ratio}")
            prev = cut.count
        # asymptotically the barrier grows like (side)^theta
        s0, s1 = CarpetSpec(b, c, levels[-2]), CarpetSpec(b, c, levels[-1])
        n0 = energy_barrier_cut(s0).count
        n1 = energy_barrier_cut(s1).count
        theta = math.log(n1 / n0) / math.log(s1.side / s0.side)
        print(f"  growth exponent between the last two levels: {theta:.3f} "
              f"(limit log(b - c)/log b = "
              f"{math.log(b - c) / math.log(b):.3f})\n")

    # Even b has no uniform-digit column, so the scan is a bound, not a proof.
    spec = CarpetSpec(14, 12, 1)
    cut = energy_barrier_cut(spec)
    print(f"(14,12) level 1: best straight cut {cut.count} edges, "
          f"exact = {cut.exact}, closed form {barrier_closed_form(spec)}")
    print(f"  crossed at {cut.crossed_edges}")


if __name__ == "__main__":
    main()
