"""Build a few Sierpinski carpets and check the counting identities.

Draws the level-2 (3,1) carpet as ASCII, then tabulates vertex, edge,
and plaquette counts against the closed forms for several families.
"""

from __future__ import annotations

from fpclab.carpet import (CarpetSpec, build_carpet_cells, build_carpet_graph,
                           closed_form_counts, hausdorff_dimension)


def draw(spec: CarpetSpec) -> None:
    cells = build_carpet_cells(spec)
    side = spec.side
    for y in range(side - 1, -1, -1):
        print("".join("#" if (x, y) in cells else "." for x in range(side)))


def main() -> None:
    spec = CarpetSpec(3, 1, 2)
    print(f"SC(b=3, c=1, l=2), {spec.side}x{spec.side} cells:")
    draw(spec)
    print()

    print("family    level   V      E      P_int  P_ext   closed form agrees")
    for (b, c) in [(3, 1), (5, 1), (5, 3), (14, 12)]:
        for l in range(3):
            s = CarpetSpec(b, c, l)
            got = build_carpet_graph(s).counts()
            want = closed_form_counts(s)
            v, e, pi, pe = got
            print(f"({b:2d},{c:2d})  {l:5d}  {v:6d} {e:6d} {pi:6d} {pe:6d}"
                  f"   {got == want}")
        print(f"         Hausdorff dimension {hausdorff_dimension(b, c):.4f}")

    # Euler identity on a bigger instance: E = P_int + V - 1 + P_ext
    g = build_carpet_graph(CarpetSpec(3, 1, 4))
    v, e, pi, pe = g.counts()
    print(f"\nlevel-4 Euler check: E = {e}, "
          f"P_int + V - 1 + P_ext = {pi + v - 1 + pe}")


if __name__ == "__main__":
    main()
