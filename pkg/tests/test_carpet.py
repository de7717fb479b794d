from __future__ import annotations

import math

import pytest

from fpclab.carpet import (CarpetSpec, PerforatedLatticeSpec, barrier_closed_form,
                           build_carpet_cells, build_carpet_graph, build_dual_graph,
                           build_perforated_lattice, closed_form_counts,
                           energy_barrier_cut, hausdorff_dimension, load_graph,
                           save_graph)


def oracle_cells(b: int, c: int, l: int) -> set[tuple[int, int]]:
    """Direct recursion: keep a cell iff no ancestor digit pair is central."""
    lo = (b - c) // 2
    cells = set()
    for x in range(b ** l):
        for y in range(b ** l):
            keep = True
            xx, yy = x, y
            for _ in range(l):
                if lo <= xx % b < lo + c and lo <= yy % b < lo + c:
                    keep = False
                    break
                xx //= b
                yy //= b
            if keep:
                cells.add((x, y))
    return cells


def oracle_counts(b: int, c: int, l: int) -> tuple[int, int, int, int]:
    """Vertices/edges/faces/holes counted from scratch off the cell set."""
    cells = oracle_cells(b, c, l)
    verts = set()
    edges = set()
    for (x, y) in cells:
        quad = [(x, y), (x + 1, y), (x + 1, y + 1), (x, y + 1)]
        verts.update(quad)
        for i in range(4):
            edges.add(frozenset((quad[i], quad[(i + 1) % 4])))
    # holes: connected components of deleted cells inside the bounding box
    side = b ** l
    deleted = {(x, y) for x in range(side) for y in range(side)} - cells
    holes = 0
    seen = set()
    for start in deleted:
        if start in seen:
            continue
        holes += 1
        stack = [start]
        seen.add(start)
        while stack:
            cx, cy = stack.pop()
            for nxt in ((cx + 1, cy), (cx - 1, cy), (cx, cy + 1), (cx, cy - 1)):
                if nxt in deleted and nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
    return len(verts), len(edges), len(cells), holes


ORACLE_BATTERY = [(3, 1, 0), (3, 1, 1), (3, 1, 2), (5, 3, 0), (5, 3, 1),
                  (5, 3, 2), (5, 1, 1), (14, 12, 1)]


@pytest.mark.parametrize("b,c,l", ORACLE_BATTERY)
def test_counts_match_independent_enumeration(b, c, l):
    spec = CarpetSpec(b, c, l)
    want = oracle_counts(b, c, l)
    assert closed_form_counts(spec) == want
    assert build_carpet_graph(spec).counts() == want


def test_known_count_anchors():
    assert closed_form_counts(CarpetSpec(3, 1, 1)) == (16, 24, 8, 1)
    assert closed_form_counts(CarpetSpec(3, 1, 2)) == (96, 168, 64, 9)
    assert closed_form_counts(CarpetSpec(14, 12, 0)) == (4, 4, 1, 0)
    assert closed_form_counts(CarpetSpec(14, 12, 1)) == (104, 156, 52, 1)
    assert closed_form_counts(CarpetSpec(5, 3, 1)) == (32, 48, 16, 1)
    assert closed_form_counts(CarpetSpec(5, 1, 2)) == (660, 1260, 576, 25)


@pytest.mark.parametrize("b,c,l", ORACLE_BATTERY)
def test_euler_identity(b, c, l):
    # planar connected graph: |E| = |P_i| + |V| - 1 + |P_e|
    nv, ne, npi, npe = closed_form_counts(CarpetSpec(b, c, l))
    assert ne == npi + nv - 1 + npe


def test_spec_validation():
    for bad in [(3, 0, 1), (3, 3, 1), (4, 1, 1), (3, 1, -1)]:
        with pytest.raises(ValueError):
            CarpetSpec(*bad)
    with pytest.raises(ValueError):
        CarpetSpec(3.0, 1, 1)


def test_hausdorff_dimension():
    assert hausdorff_dimension(3, 1) == pytest.approx(math.log(8) / math.log(3))
    assert hausdorff_dimension(14, 12) == pytest.approx(math.log(52) / math.log(14))
    # approaches 2 as the deleted fraction vanishes
    assert hausdorff_dimension(101, 1) > 1.99


def test_plaquettes_are_edge_cycles():
    g = build_carpet_graph(CarpetSpec(3, 1, 2))
    for plaq in g.interior_plaquettes:
        assert len(plaq) == 4
        verts = set()
        for e in plaq:
            verts.update(g.edges[e])
        assert len(verts) == 4
    # 9 holes: the big central one (12 edges) and 8 generation-2 ones
    lengths = sorted(len(cycle) for cycle in g.exterior_plaquettes)
    assert lengths == [4] * 8 + [12]
    for cycle in g.exterior_plaquettes:
        degree: dict[int, int] = {}
        for e in cycle:
            for v in g.edges[e]:
                degree[v] = degree.get(v, 0) + 1
        assert all(d == 2 for d in degree.values())


def test_dual_graph_edge_accounting():
    g = build_carpet_graph(CarpetSpec(3, 1, 1))
    d = build_dual_graph(g)
    assert len(d.vertices) == 8
    # 8 faces x 4 sides = 2*pairs + halves and pairs + halves = 24 edges
    assert len(d.edges) == 8
    assert len(d.dangling) == 16
    assert all(role is not None for role in d.primal_edge_role)


def brute_force_min_cut(spec: CarpetSpec) -> int:
    """Fewest horizontal edges crossed by any straight vertical cut."""
    cells = build_carpet_cells(spec)
    side = spec.side
    best = None
    for x0 in range(side):
        n = sum(1 for y in range(side + 1)
                if (x0, y) in cells or (x0, y - 1) in cells)
        best = n if best is None else min(best, n)
    return best


@pytest.mark.parametrize("b,c,l,want", [
    (3, 1, 0, 2), (3, 1, 1, 4), (3, 1, 2, 8), (3, 1, 3, 16),
    (5, 3, 0, 2), (5, 3, 1, 4), (5, 3, 2, 8),
])
def test_barrier_closed_form_and_brute_force(b, c, l, want):
    spec = CarpetSpec(b, c, l)
    cut = energy_barrier_cut(spec)
    assert cut.count == want == barrier_closed_form(spec)
    assert cut.exact
    assert cut.count == brute_force_min_cut(spec)
    assert len(cut.crossed_edges) == cut.count


def test_barrier_even_base_is_heuristic():
    spec = CarpetSpec(14, 12, 1)
    cut = energy_barrier_cut(spec)
    assert not cut.exact
    assert barrier_closed_form(spec) is None
    assert cut.count == brute_force_min_cut(spec)


def test_barrier_cut_edges_are_real_edges():
    spec = CarpetSpec(3, 1, 2)
    g = build_carpet_graph(spec)
    for (a, b_) in energy_barrier_cut(spec).crossed_edges:
        g.edge_index(a, b_)  # raises KeyError if absent


def test_graph_roundtrip(tmp_path):
    g = build_carpet_graph(CarpetSpec(3, 1, 2))
    path = tmp_path / "g.json"
    save_graph(g, path)
    h = load_graph(path)
    assert h.vertices == g.vertices
    assert h.edges == g.edges
    assert h.interior_plaquettes == g.interior_plaquettes
    assert h.exterior_plaquettes == g.exterior_plaquettes
    assert h.spec == g.spec
    assert h.edge_index(g.vertices[0], g.vertices[1]) == g.edge_index(
        g.vertices[0], g.vertices[1])


def test_perforated_lattice():
    with pytest.raises(ValueError):
        PerforatedLatticeSpec(8, 2.5, 0.1)
    with pytest.raises(ValueError):
        PerforatedLatticeSpec(8, 0.5, 0.6)
    full = build_perforated_lattice(PerforatedLatticeSpec(9, 0.99, 0.98))
    assert full.degenerate and len(full.sites) == 81
    holey = build_perforated_lattice(PerforatedLatticeSpec(27, 1 / 3, 0.0))
    assert not holey.degenerate
    assert len(holey.sites) < 27 * 27
    # every edge joins two retained nearest neighbors
    for i, j in holey.edges:
        (x1, y1), (x2, y2) = holey.sites[i], holey.sites[j]
        assert abs(x1 - x2) + abs(y1 - y2) == 1
