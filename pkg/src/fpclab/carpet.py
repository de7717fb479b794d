"""Sierpinski carpet graphs and related lattice geometry.

A carpet SC(b, c, l) is built on the unit square by dividing into b x b
subsquares, deleting the central c x c block, and recursing l times into the
surviving subsquares.  Validity requires b > c >= 1 with b - c even, so the
deleted block is centered and never touches the boundary of its parent.

The carpet graph ("SC-hat") is the vertex/edge graph of the surviving cells
at resolution b^l.  Faces split into interior plaquettes (occupied unit
cells) and exterior plaquettes (one cycle per deleted hole; the outer face
is never counted).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

__all__ = [
    "CarpetSpec",
    "CarpetGraph",
    "DualCarpetGraph",
    "CutResult",
    "PerforatedLatticeSpec",
    "PerforatedLattice",
    "build_carpet_cells",
    "carpet_holes",
    "build_carpet_graph",
    "closed_form_counts",
    "hausdorff_dimension",
    "build_dual_graph",
    "energy_barrier_cut",
    "barrier_closed_form",
    "build_perforated_lattice",
    "graph_to_dict",
    "graph_from_dict",
    "save_graph",
    "load_graph",
]


@dataclass(frozen=True)
class CarpetSpec:
    """Parameters (b, c, l) of a Sierpinski carpet.

    b: subdivision base, c: deleted central block side, l: recursion level.
    Requires b > c >= 1, b - c even and positive, l >= 0.
    """

    b: int
    c: int
    l: int

    def __post_init__(self):
        if not (isinstance(self.b, int) and isinstance(self.c, int) and isinstance(self.l, int)):
            raise ValueError("carpet parameters must be integers")
        if self.c < 1:
            raise ValueError(f"need c >= 1, got c={self.c}")
        if self.b <= self.c:
            raise ValueError(f"need b > c, got b={self.b}, c={self.c}")
        if (self.b - self.c) % 2 != 0:
            raise ValueError(f"need b - c even, got b-c={self.b - self.c}")
        if self.l < 0:
            raise ValueError(f"need l >= 0, got l={self.l}")

    @property
    def side(self) -> int:
        """Cells per side at full resolution."""
        return self.b ** self.l


def build_carpet_cells(spec: CarpetSpec) -> set[tuple[int, int]]:
    """Occupied unit cells of SC(b, c, l) at resolution b^l."""
    cells, _ = _cells_and_holes(spec)
    return cells


def carpet_holes(spec: CarpetSpec) -> list[tuple[int, int, int]]:
    """Deleted blocks as (x0, y0, size), sorted by (size desc, y0, x0).

    There are (b^2 - c^2)^(t-1) holes of side c * b^(l-t) for t = 1..l.
    """
    _, holes = _cells_and_holes(spec)
    return holes


def _cells_and_holes(spec: CarpetSpec):
    b, c, l = spec.b, spec.c, spec.l
    lo = (b - c) // 2
    hi = lo + c
    cells: set[tuple[int, int]] = set()
    holes: list[tuple[int, int, int]] = []

    def subdivide(x0: int, y0: int, level: int) -> None:
        size = b ** level
        if level == 0:
            cells.add((x0, y0))
            return
        sub = b ** (level - 1)
        holes.append((x0 + lo * sub, y0 + lo * sub, c * sub))
        for j in range(b):
            for i in range(b):
                if lo <= i < hi and lo <= j < hi:
                    continue
                subdivide(x0 + i * sub, y0 + j * sub, level - 1)

    if l == 0:
        cells.add((0, 0))
    else:
        subdivide(0, 0, l)
    holes.sort(key=lambda h: (-h[2], h[1], h[0]))
    return cells, holes


@dataclass
class CarpetGraph:
    """Vertex/edge graph of a carpet with its face data.

    vertices: lattice points (x, y), ascending.
    edges: index pairs (i, j), i < j, ascending.
    interior_plaquettes: per occupied cell, 4 edge indices in cycle order
        (bottom, right, top, left).
    exterior_plaquettes: per hole, edge indices of its boundary cycle,
        counterclockwise from the lowest-leftmost vertex.
    interior_cells: cell coordinates aligned with interior_plaquettes.
    """

    spec: CarpetSpec
    vertices: list[tuple[int, int]]
    edges: list[tuple[int, int]]
    interior_plaquettes: list[tuple[int, int, int, int]]
    exterior_plaquettes: list[tuple[int, ...]]
    interior_cells: list[tuple[int, int]] = field(default_factory=list)
    _vindex: dict = field(default_factory=dict, repr=False)
    _eindex: dict = field(default_factory=dict, repr=False)

    def vertex_index(self, xy: tuple[int, int]) -> int:
        return self._vindex[xy]

    def edge_index(self, a: tuple[int, int], b: tuple[int, int]) -> int:
        i, j = self._vindex[a], self._vindex[b]
        return self._eindex[(min(i, j), max(i, j))]

    def counts(self) -> tuple[int, int, int, int]:
        return (len(self.vertices), len(self.edges),
                len(self.interior_plaquettes), len(self.exterior_plaquettes))


def build_carpet_graph(spec: CarpetSpec) -> CarpetGraph:
    """Enumerate SC-hat(b, c, l): vertices, edges, and both face families."""
    cells, holes = _cells_and_holes(spec)
    vset: set[tuple[int, int]] = set()
    eset: set[tuple[tuple[int, int], tuple[int, int]]] = set()
    for (x, y) in cells:
        corners = ((x, y), (x + 1, y), (x + 1, y + 1), (x, y + 1))
        vset.update(corners)
        eset.add(((x, y), (x + 1, y)))
        eset.add(((x + 1, y), (x + 1, y + 1)))
        eset.add(((x, y + 1), (x + 1, y + 1)))
        eset.add(((x, y), (x, y + 1)))

    vertices = sorted(vset)
    vindex = {v: i for i, v in enumerate(vertices)}
    edge_pairs = sorted((min(vindex[a], vindex[b]), max(vindex[a], vindex[b]))
                        for a, b in eset)
    eindex = {e: i for i, e in enumerate(edge_pairs)}

    def edge_of(a, b):
        i, j = vindex[a], vindex[b]
        return eindex[(min(i, j), max(i, j))]

    interior_cells = sorted(cells)
    interior = []
    for (x, y) in interior_cells:
        interior.append((edge_of((x, y), (x + 1, y)),
                         edge_of((x + 1, y), (x + 1, y + 1)),
                         edge_of((x, y + 1), (x + 1, y + 1)),
                         edge_of((x, y), (x, y + 1))))

    exterior = []
    for (hx, hy, size) in holes:
        cycle = []
        for t in range(size):          # bottom, left to right
            cycle.append(edge_of((hx + t, hy), (hx + t + 1, hy)))
        for t in range(size):          # right side, upward
            cycle.append(edge_of((hx + size, hy + t), (hx + size, hy + t + 1)))
        for t in range(size):          # top, right to left
            cycle.append(edge_of((hx + size - t, hy + size), (hx + size - t - 1, hy + size)))
        for t in range(size):          # left side, downward
            cycle.append(edge_of((hx, hy + size - t), (hx, hy + size - t - 1)))
        exterior.append(tuple(cycle))

    return CarpetGraph(spec=spec, vertices=vertices, edges=edge_pairs,
                       interior_plaquettes=interior, exterior_plaquettes=exterior,
                       interior_cells=interior_cells,
                       _vindex=vindex, _eindex=eindex)


def closed_form_counts(spec: CarpetSpec) -> tuple[int, int, int, int]:
    """Exact (|V|, |E|, |P_int|, |P_ext|) of SC-hat(b, c, l) in closed form.

    All divisions below are exact geometric sums; exactness is asserted.
    """
    b, c, l = spec.b, spec.c, spec.l
    a = b * b - c * c
    al = a ** l
    bl = b ** l
    q, r = divmod(al - 1, a - 1)
    assert r == 0
    p_ext = q
    q, r = divmod(al - bl, a - b)
    assert r == 0
    t = q
    n_v = al + 2 * c * t - p_ext + 2 * bl + 1
    n_e = 2 * al + 2 * c * t + 2 * bl
    return (n_v, n_e, al, p_ext)


def hausdorff_dimension(b: float, c: float) -> float:
    """Fractal dimension ln(b^2 - c^2) / ln(b).

    Accepts any b > c > 0 (the formula's domain); carpet constructors
    enforce the stricter integer/parity constraints separately.
    """
    if not (b > c > 0):
        raise ValueError("need b > c > 0")
    return math.log(b * b - c * c) / math.log(b)


@dataclass
class DualCarpetGraph:
    """Dual of a carpet graph restricted to interior faces.

    vertices: one per interior plaquette (the cell coordinate).
    edges: dual vertex index pairs, one per primal edge shared by two
        interior plaquettes.
    dangling: (dual vertex, primal edge index) half-edges, one per primal
        edge with exterior (hole or outer) face on the other side.
    primal_edge_role: per primal edge, ("pair", a, b) or ("half", a).
    """

    spec: CarpetSpec
    vertices: list[tuple[int, int]]
    edges: list[tuple[int, int]]
    dangling: list[tuple[int, int]]
    primal_edge_role: list[tuple]


def build_dual_graph(g: CarpetGraph) -> DualCarpetGraph:
    """Interior dual: adjacency of occupied cells plus boundary half-edges."""
    cell_index = {c: i for i, c in enumerate(g.interior_cells)}
    by_edge: dict[int, list[int]] = {}
    for ci, plaq in enumerate(g.interior_plaquettes):
        for e in plaq:
            by_edge.setdefault(e, []).append(ci)
    edges = []
    dangling = []
    role: list[tuple] = [None] * len(g.edges)
    for e in range(len(g.edges)):
        owners = by_edge.get(e, [])
        if len(owners) == 2:
            a, b = sorted(owners)
            edges.append((a, b))
            role[e] = ("pair", a, b)
        elif len(owners) == 1:
            dangling.append((owners[0], e))
            role[e] = ("half", owners[0])
        else:
            raise AssertionError("carpet edge bounded by no interior cell")
    return DualCarpetGraph(spec=g.spec, vertices=list(g.interior_cells),
                           edges=edges, dangling=dangling,
                           primal_edge_role=role)


@dataclass
class CutResult:
    """A vertical cut through the carpet graph.

    crossed_edges: horizontal edges ((x, y), (x+1, y)) severed by the cut.
    count: number of crossed edges.
    column: cell column x0 the cut passes through.
    exact: True when the column is a provably minimal straight cut
        (odd b); False marks the even-b heuristic.
    """

    crossed_edges: list[tuple[tuple[int, int], tuple[int, int]]]
    count: int
    column: int
    exact: bool


def energy_barrier_cut(spec: CarpetSpec) -> CutResult:
    """Minimal straight vertical cut separating left from right.

    A vertical line through cell column x0 severs the horizontal edges
    ((x0, y), (x0+1, y)) wherever a cell above or below is occupied.  For
    odd b the central column x0 = (b^l - 1) / 2 threads every generation
    of holes and crosses ((b-c)^(l+1) - 1) / ((b-c) - 1) + 1 edges, the
    straight-cut minimum.  For even b no column is central; the column
    with the fewest crossings is returned with exact=False.
    """
    cells = build_carpet_cells(spec)
    side = spec.side

    def crossings(x0: int) -> list[tuple[tuple[int, int], tuple[int, int]]]:
        return [((x0, y), (x0 + 1, y)) for y in range(side + 1)
                if (x0, y) in cells or (x0, y - 1) in cells]

    if spec.b % 2 == 1:
        best = (side - 1) // 2
        exact = True
    else:
        best = min(range(side), key=lambda x0: (len(crossings(x0)), x0))
        exact = False
    crossed = crossings(best)
    return CutResult(crossed_edges=crossed, count=len(crossed),
                     column=best, exact=exact)


def barrier_closed_form(spec: CarpetSpec) -> int | None:
    """Closed-form crossed-edge count for odd b (None for even b)."""
    if spec.b % 2 == 0:
        return None
    d = spec.b - spec.c
    return (d ** (spec.l + 1) - 1) // (d - 1) + 1


@dataclass(frozen=True)
class PerforatedLatticeSpec:
    """Square lattice of side L with block interiors hollowed out.

    The L x L cell grid is split into ceil(L^(1-alpha))^2 blocks; in each
    block only a border of width ceil(L^beta) survives.  Requires L >= 1,
    0 < alpha < 2 and 0 <= beta < alpha.
    """

    L: int
    alpha: float
    beta: float

    def __post_init__(self):
        if self.L < 1:
            raise ValueError("need L >= 1")
        if not (0 < self.alpha < 2):
            raise ValueError("need 0 < alpha < 2")
        if not (0 <= self.beta < self.alpha):
            raise ValueError("need 0 <= beta < alpha")

    @property
    def blocks_per_side(self) -> int:
        # Guard against float noise: 27**(1/3) evaluates just above 3.
        return math.ceil(self.L ** (1 - self.alpha) - 1e-9)

    @property
    def block_side(self) -> int:
        return -(-self.L // self.blocks_per_side)

    @property
    def border_width(self) -> int:
        return math.ceil(self.L ** self.beta - 1e-9)


@dataclass
class PerforatedLattice:
    """Site graph of a perforated lattice.

    degenerate is True when the border fills each block, reducing the
    construction to the full L x L lattice.
    """

    spec: PerforatedLatticeSpec
    sites: list[tuple[int, int]]
    edges: list[tuple[int, int]]
    degenerate: bool


def build_perforated_lattice(spec: PerforatedLatticeSpec) -> PerforatedLattice:
    """Enumerate retained sites and nearest-neighbor edges."""
    s = spec.block_side
    w = spec.border_width
    degenerate = 2 * w >= s
    sites = []
    for y in range(spec.L):
        for x in range(spec.L):
            if degenerate:
                sites.append((x, y))
                continue
            bx, by = x % s, y % s
            if min(bx, by, s - 1 - bx, s - 1 - by) < w:
                sites.append((x, y))
    sites.sort()
    sindex = {p: i for i, p in enumerate(sites)}
    edges = []
    for (x, y) in sites:
        for (nx, ny) in ((x + 1, y), (x, y + 1)):
            j = sindex.get((nx, ny))
            if j is not None:
                i = sindex[(x, y)]
                edges.append((min(i, j), max(i, j)))
    edges.sort()
    return PerforatedLattice(spec=spec, sites=sites, edges=edges,
                             degenerate=degenerate)


def graph_to_dict(g: CarpetGraph) -> dict:
    """JSON-ready form of a carpet graph."""
    return {
        "spec": {"b": g.spec.b, "c": g.spec.c, "l": g.spec.l},
        "vertices": [list(v) for v in g.vertices],
        "edges": [list(e) for e in g.edges],
        "interior_plaquettes": [list(p) for p in g.interior_plaquettes],
        "exterior_plaquettes": [list(p) for p in g.exterior_plaquettes],
    }


def graph_from_dict(d: dict) -> CarpetGraph:
    """Rebuild a CarpetGraph from its JSON form, revalidating structure."""
    spec = CarpetSpec(**d["spec"])
    g = build_carpet_graph(spec)
    got = graph_to_dict(g)
    for key in ("vertices", "edges", "interior_plaquettes", "exterior_plaquettes"):
        if got[key] != d[key]:
            raise ValueError(f"stored graph disagrees with construction on {key}")
    return g


def save_graph(g: CarpetGraph, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        json.dump(graph_to_dict(g), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_graph(path) -> CarpetGraph:
    with open(path, "r", encoding="ascii") as fh:
        return graph_from_dict(json.load(fh))
