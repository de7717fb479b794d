"""Chain complexes over GF(2) and the toric complex of a carpet graph.

A length-d complex holds spaces C_0 .. C_d and boundary maps
boundary(i): C_i -> C_(i-1) for i = 1..d, with boundary(i) . boundary(i+1)
= 0 verified at construction.  Homology and cohomology dimensions come from
ranks; over GF(2) they agree degree by degree, but cohomology_dim computes
with transposed matrices as an independent path.
"""

from __future__ import annotations

import json
import os

from .gf2 import BinaryMatrix, matmul, rank, read_matrix_text, write_matrix_text

__all__ = [
    "ComplexValidationError",
    "ChainComplex",
    "toric_complex",
    "dualize",
    "homology_dim",
    "cohomology_dim",
    "save_complex",
    "load_complex",
]


class ComplexValidationError(ValueError):
    """A structural invariant of a chain complex failed."""


class ChainComplex:
    """Spaces and boundary maps of a finite chain complex over GF(2).

    Args:
        space_dims: dimensions of C_0 .. C_d.
        boundaries: matrices [boundary_1, .., boundary_d]; boundary_i has
            shape space_dims[i-1] x space_dims[i].
        labels: optional per-space basis labels (lists of length
            space_dims[i]); carried through for provenance and slicing.
        validate: verify shapes and boundary-of-boundary = 0 (on by
            default; construction fails loudly on violation).
    """

    def __init__(self, space_dims, boundaries, labels=None, validate=True):
        self.space_dims = [int(x) for x in space_dims]
        self.boundaries = list(boundaries)
        self.labels = labels
        if len(self.boundaries) != len(self.space_dims) - 1:
            raise ComplexValidationError(
                f"{len(self.space_dims)} spaces need {len(self.space_dims) - 1} "
                f"boundary maps, got {len(self.boundaries)}")
        if any(d < 0 for d in self.space_dims):
            raise ComplexValidationError("negative space dimension")
        if labels is not None:
            if len(labels) != len(self.space_dims):
                raise ComplexValidationError("labels must cover every space")
            for i, lab in enumerate(labels):
                if lab is not None and len(lab) != self.space_dims[i]:
                    raise ComplexValidationError(f"labels for space {i} have wrong length")
        if validate:
            self._validate()

    def _validate(self) -> None:
        for i, m in enumerate(self.boundaries, start=1):
            want = (self.space_dims[i - 1], self.space_dims[i])
            if (m.n_rows, m.n_cols) != want:
                raise ComplexValidationError(
                    f"boundary_{i} has shape {m.n_rows}x{m.n_cols}, expected {want[0]}x{want[1]}")
        for i in range(1, len(self.boundaries)):
            if not matmul(self.boundaries[i - 1], self.boundaries[i]).is_zero():
                raise ComplexValidationError(
                    f"boundary_{i} . boundary_{i + 1} is nonzero")

    @property
    def length(self) -> int:
        """Top degree d."""
        return len(self.space_dims) - 1

    def dim(self, i: int) -> int:
        return self.space_dims[i]

    def boundary(self, i: int) -> BinaryMatrix:
        """The map C_i -> C_(i-1), for 1 <= i <= length."""
        if not 1 <= i <= self.length:
            raise IndexError(f"no boundary map at degree {i}")
        return self.boundaries[i - 1]

    def label(self, i: int, idx: int):
        if self.labels is None or self.labels[i] is None:
            return idx
        return self.labels[i][idx]

    def __repr__(self) -> str:
        return f"ChainComplex(dims={self.space_dims})"


def toric_complex(graph) -> ChainComplex:
    """Vertices / edges / interior plaquettes of a carpet graph.

    C_0 = vertices, C_1 = edges, C_2 = interior plaquettes only; holes and
    the outer face contribute nothing, which is what makes the homology
    nontrivial.
    """
    n_v = len(graph.vertices)
    n_e = len(graph.edges)
    n_p = len(graph.interior_plaquettes)
    d1 = BinaryMatrix(n_v, n_e,
                      [(v, e) for e, (a, b) in enumerate(graph.edges) for v in (a, b)])
    d2 = BinaryMatrix(n_e, n_p,
                      [(e, p) for p, plaq in enumerate(graph.interior_plaquettes)
                       for e in plaq])
    labels = [list(graph.vertices), list(graph.edges), list(graph.interior_cells)]
    return ChainComplex([n_v, n_e, n_p], [d1, d2], labels=labels)


def dualize(complex_: ChainComplex) -> ChainComplex:
    """Reverse a length-2 complex: C*_i = C_(2-i), boundaries transposed.

    Swapping the roles of vertices and plaquettes exchanges homology
    degrees 0 and 2.
    """
    if complex_.length != 2:
        raise ComplexValidationError("dualize expects a three-space complex")
    d1, d2 = complex_.boundaries
    labels = None
    if complex_.labels is not None:
        labels = list(reversed(complex_.labels))
    return ChainComplex(list(reversed(complex_.space_dims)),
                        [d2.transpose(), d1.transpose()], labels=labels)


def homology_dim(complex_: ChainComplex, i: int) -> int:
    """dim H_i = dim ker(boundary_i) - rank(boundary_(i+1))."""
    if not 0 <= i <= complex_.length:
        raise IndexError(f"degree {i} outside complex")
    r_in = rank(complex_.boundary(i)) if i >= 1 else 0
    r_out = rank(complex_.boundary(i + 1)) if i < complex_.length else 0
    return complex_.dim(i) - r_in - r_out


def cohomology_dim(complex_: ChainComplex, i: int) -> int:
    """dim H^i computed from the transposed (coboundary) maps.

    Over a field this equals homology_dim degree by degree; keeping the
    transposed computation separate gives tests an independent witness.
    """
    if not 0 <= i <= complex_.length:
        raise IndexError(f"degree {i} outside complex")
    # delta_i = transpose(boundary_i): C^(i-1) -> C^i; H^i = ker(delta_(i+1)) / im(delta_i)
    r_out = rank(complex_.boundary(i + 1).transpose()) if i < complex_.length else 0
    r_in = rank(complex_.boundary(i).transpose()) if i >= 1 else 0
    return complex_.dim(i) - r_out - r_in


def save_complex(complex_: ChainComplex, directory) -> list[str]:
    """Write header.json (space_dims) plus boundary_<i>.txt matrix files.

    Returns the list of file names written, for manifest digesting.
    """
    os.makedirs(directory, exist_ok=True)
    names = ["header.json"]
    with open(os.path.join(directory, "header.json"), "w", encoding="ascii") as fh:
        json.dump({"space_dims": complex_.space_dims}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    for i in range(1, complex_.length + 1):
        name = f"boundary_{i}.txt"
        write_matrix_text(complex_.boundary(i), os.path.join(directory, name))
        names.append(name)
    return names


def load_complex(directory) -> ChainComplex:
    """Read back a complex written by :func:`save_complex`, revalidating."""
    with open(os.path.join(directory, "header.json"), "r", encoding="ascii") as fh:
        header = json.load(fh)
    dims = header["space_dims"]
    boundaries = [read_matrix_text(os.path.join(directory, f"boundary_{i}.txt"))
                  for i in range(1, len(dims))]
    return ChainComplex(dims, boundaries)
