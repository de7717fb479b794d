"""CSS stabilizer codes from three-space chain complexes.

Qubits sit on the middle space.  X generator supports are the rows of
boundary_1 (one generator per degree-0 element); Z generator supports are
the rows of transpose(boundary_2) (one per degree-2 element).  Commutation
HX . HZ^T = 0 is exactly boundary_1 . boundary_2 = 0.

Logical operators are homology/cohomology class representatives: Z logicals
span ker(HX) / rowspace(HZ), X logicals span ker(HZ) / rowspace(HX), and
the bases are canonicalized so the anticommutation pairing is diagonal.
"""

from __future__ import annotations

import json
import os

import numpy as np

from .complexes import ChainComplex
from .gf2 import (BasisSet, BinaryMatrix, combination_for, in_span, kernel_basis,
                  mat_vec, matmul, pack_indices, rank, row_space_basis, stack_rows,
                  unpack_indices, read_matrix_text, write_matrix_text)

__all__ = [
    "CodeValidationError",
    "CssCode",
    "LogicalBasis",
    "code_from_complex",
    "num_logical_qubits",
    "logical_basis",
    "classify_global",
    "export_hamiltonian",
    "reduce_coset_weight",
    "sector_swap_maps",
    "save_code",
    "load_code",
]


class CodeValidationError(ValueError):
    """A stabilizer-code invariant failed."""


class CssCode:
    """Parity checks of a CSS code.

    Args:
        hx: X-generator supports, one row per generator.
        hz: Z-generator supports, one row per generator.
        provenance: free-form dict recording which construction produced
            the code (carpet parameters, complex kind, and so on).
    """

    def __init__(self, hx: BinaryMatrix, hz: BinaryMatrix, provenance: dict | None = None):
        if hx.n_cols != hz.n_cols:
            raise CodeValidationError("HX and HZ act on different qubit counts")
        if not matmul(hx, hz.transpose()).is_zero():
            raise CodeValidationError("stabilizers do not commute: HX . HZ^T != 0")
        self.hx = hx
        self.hz = hz
        self.provenance = dict(provenance or {})

    @property
    def n(self) -> int:
        return self.hx.n_cols

    def __repr__(self) -> str:
        return f"CssCode(n={self.n}, x_gens={self.hx.n_rows}, z_gens={self.hz.n_rows})"


class LogicalBasis:
    """Paired logical operator bases with a diagonal pairing.

    pairing lists (x index, z index) pairs with odd overlap; after
    canonicalization pair t is (t, t).  global_index marks the pair whose
    Z representative is the full-layer Kunneth class, when classified.
    """

    def __init__(self, x_logicals: BasisSet, z_logicals: BasisSet,
                 pairing: list[tuple[int, int]], global_index: int | None = None):
        self.x_logicals = x_logicals
        self.z_logicals = z_logicals
        self.pairing = list(pairing)
        self.global_index = global_index

    @property
    def k(self) -> int:
        return len(self.x_logicals)

    def __repr__(self) -> str:
        return f"LogicalBasis(k={self.k}, global_index={self.global_index})"


def code_from_complex(complex_: ChainComplex, provenance: dict | None = None) -> CssCode:
    """Interpret a three-space complex as a CSS code on its middle space."""
    if complex_.length != 2:
        raise CodeValidationError("a CSS code needs a three-space complex")
    hx = complex_.boundary(1)
    hz = complex_.boundary(2).transpose()
    return CssCode(hx, hz, provenance=provenance)


def num_logical_qubits(code: CssCode) -> int:
    """k = n - rank(HX) - rank(HZ)."""
    return code.n - rank(code.hx) - rank(code.hz)


def _quotient_reps(kernel: BasisSet, stabilizers: BasisSet, k: int) -> np.ndarray:
    """Representatives of kernel / span(stabilizers), as packed rows.

    Kernel vectors are reduced against the stabilizer span and previously
    accepted representatives; the k surviving reduced vectors are returned
    in deterministic order.
    """
    n = kernel.ambient_dim
    accepted: list[np.ndarray] = []
    for vec in kernel.packed():
        row = stabilizers._reduce(vec.copy())
        if not row.any():
            continue
        if accepted:
            row = BasisSet(n, np.vstack(accepted))._reduce(row)
        if row.any():
            accepted.append(row)
        if len(accepted) == k:
            break
    if len(accepted) != k:
        raise CodeValidationError("failed to assemble a full logical basis")
    return np.vstack(accepted)


def _pairing_matrix(x_words: np.ndarray, z_words: np.ndarray) -> np.ndarray:
    """Overlap parities as a uint8 matrix, x rows by z columns."""
    kx, kz = x_words.shape[0], z_words.shape[0]
    p = np.zeros((kx, kz), dtype=np.uint8)
    for i in range(kx):
        p[i] = (np.bitwise_count(x_words[i][None, :] & z_words).sum(axis=1) & 1)
    return p


def logical_basis(code: CssCode) -> LogicalBasis:
    """Canonical logical bases with the pairing made diagonal.

    Z logicals come from ker(HX) modulo rows of HZ, X logicals from
    ker(HZ) modulo rows of HX.  Gaussian elimination on the pairing matrix
    (with the deterministic pivot rule) transforms both bases so pair t
    anticommutes only with its partner t.  k = 0 yields empty bases.
    """
    n = code.n
    k = num_logical_qubits(code)
    if k < 0:
        raise CodeValidationError("negative logical count; checks are inconsistent")
    if k == 0:
        empty = BasisSet(n, np.zeros((0, pack_indices(n, []).shape[0]), dtype=np.uint64))
        return LogicalBasis(empty, empty, [])

    z_words = _quotient_reps(kernel_basis(code.hx), row_space_basis(code.hz), k)
    x_words = _quotient_reps(kernel_basis(code.hz), row_space_basis(code.hx), k)

    p = _pairing_matrix(x_words, z_words)
    for t in range(k):
        # Find the first (i, j) with odd pairing at or past t.
        found = None
        for i in range(t, k):
            nz = np.nonzero(p[i, t:])[0]
            if nz.size:
                found = (i, t + int(nz[0]))
                break
        if found is None:
            raise CodeValidationError("pairing matrix is singular")
        i, j = found
        if i != t:
            x_words[[t, i]] = x_words[[i, t]]
            p[[t, i]] = p[[i, t]]
        if j != t:
            z_words[[t, j]] = z_words[[j, t]]
            p[:, [t, j]] = p[:, [j, t]]
        for i2 in range(k):
            if i2 != t and p[i2, t]:
                x_words[i2] ^= x_words[t]
                p[i2] ^= p[t]
        for j2 in range(k):
            if j2 != t and p[t, j2]:
                z_words[j2] ^= z_words[t]
                p[:, j2] ^= p[:, t]
    if not np.array_equal(p, np.eye(k, dtype=np.uint8)):
        raise CodeValidationError("pairing diagonalization failed")

    return LogicalBasis(BasisSet(n, x_words), BasisSet(n, z_words),
                        [(t, t) for t in range(k)])


def classify_global(code: CssCode, prod) -> LogicalBasis:
    """Identify the global qubit of a product-of-carpet-complexes code.

    The global Z representative is the Kunneth class h0 (x) h2: a single
    degree-0 element of the left factor tensored with the top homology
    generator of the right factor, supported entirely on the first block
    of the middle level (one entry per right-factor top basis element, a
    full carpet-shaped layer).  The logical basis is transformed so this
    representative IS basis vector global_index, with the pairing kept
    diagonal.
    """
    mid_hx = prod.complex.boundary(2)
    mid_hz = prod.complex.boundary(3).transpose()
    if not (code.hx == mid_hx and code.hz == mid_hz):
        raise CodeValidationError("code was not built from this product's middle level")

    right = prod.right
    h2 = kernel_basis(right.boundary(2))
    if len(h2) != 1:
        raise CodeValidationError(
            f"right factor has top homology dimension {len(h2)}, expected 1")
    h2_support = h2.vectors()[0]
    # Degree-0 generator of the left factor: a single basis vertex. Any one
    # works when H_0 is one-dimensional; index 0 is the deterministic choice.
    z_rep_idx = [prod.index(2, 0, 0, b) for b in h2_support]
    z_rep = pack_indices(code.n, z_rep_idx)

    if mat_vec(code.hx, z_rep).any():
        raise CodeValidationError("global representative is not in ker(HX)")
    if in_span(z_rep, row_space_basis(code.hz)):
        raise CodeValidationError("global representative is a stabilizer")

    base = logical_basis(code)
    k = base.k
    z_words = base.z_logicals.packed()
    x_words = base.x_logicals.packed()

    # Coordinates of z_rep over [z basis; HZ rows]: the first k coefficients
    # express its logical class in the current basis.
    stacked = stack_rows([base.z_logicals.as_matrix(), code.hz])
    coeff = combination_for(stacked, z_rep)
    if coeff is None:
        raise CodeValidationError("global representative lies outside ker(HX)/im(HZ)")
    lam = coeff[:k]
    hot = np.nonzero(lam)[0]
    if hot.size == 0:
        raise CodeValidationError("global representative is logically trivial")
    g = int(hot[0])

    # Replace z_g by the explicit representative; repair the X side so the
    # pairing stays diagonal: x_b <- x_b + lam_b x_g for b != g.
    z_words[g] = z_rep
    for b in range(k):
        if b != g and lam[b]:
            x_words[b] ^= x_words[g]

    out = LogicalBasis(BasisSet(code.n, x_words), BasisSet(code.n, z_words),
                       [(t, t) for t in range(k)], global_index=g)
    if not np.array_equal(_pairing_matrix(out.x_logicals.packed(), out.z_logicals.packed()),
                          np.eye(k, dtype=np.uint8)):
        raise CodeValidationError("pairing lost while installing the global representative")
    return out


def export_hamiltonian(code: CssCode) -> list[tuple[str, tuple[int, ...]]]:
    """Term list of H = -sum(X generators) - sum(Z generators).

    One term per generator row, X terms first, each as (type, support).
    """
    terms = [("X", code.hx.row_indices(i)) for i in range(code.hx.n_rows)]
    terms += [("Z", code.hz.row_indices(i)) for i in range(code.hz.n_rows)]
    return terms


def reduce_coset_weight(vector, stabilizers: BinaryMatrix, passes: int = 4):
    """Greedily add stabilizer rows while the support shrinks.

    A cheap local search for a low-weight coset representative; no
    minimality guarantee.  Returns the packed reduced row.
    """
    row = pack_indices(stabilizers.n_cols, vector) if not isinstance(vector, np.ndarray) else vector.copy()
    words = stabilizers._words
    for _ in range(passes):
        improved = False
        weight = int(np.bitwise_count(row).sum())
        for i in range(stabilizers.n_rows):
            cand = row ^ words[i]
            w = int(np.bitwise_count(cand).sum())
            if w < weight:
                row, weight = cand, w
                improved = True
        if not improved:
            break
    return row


def sector_swap_maps(prod) -> tuple[list[int], list[int]]:
    """The qubit and generator relabelings exchanging the X and Z sectors.

    For a product of a complex with its dual, swapping tensor factors maps
    each middle-level block to itself, (i, a, b) -> (i, b, a), and sends
    level-1 links to level-3 cubes, (i, a, b) -> (i+1, b, a).  Returns
    (qubit permutation, link index -> cube index) such that the relabeled
    X supports equal the Z supports as a multiset.
    """
    left, right = prod.left, prod.right
    for j in range(3):
        if right.dim(j) != left.dim(2 - j):
            raise CodeValidationError("product factors are not dual to each other")
    c = prod.complex
    qubit_perm = [0] * c.dim(2)
    for idx in range(c.dim(2)):
        i, a, b = prod.decode(2, idx)
        qubit_perm[idx] = prod.index(2, i, b, a)
    link_to_cube = [0] * c.dim(1)
    for idx in range(c.dim(1)):
        i, a, b = prod.decode(1, idx)
        link_to_cube[idx] = prod.index(3, i + 1, b, a)
    return qubit_perm, link_to_cube


def save_code(code: CssCode, directory, logicals: LogicalBasis | None = None) -> list[str]:
    """Write code.json plus hx.txt / hz.txt matrix files.

    Returns the file names written.  The JSON references the matrices by
    relative file name and embeds logical supports when provided.
    """
    os.makedirs(directory, exist_ok=True)
    write_matrix_text(code.hx, os.path.join(directory, "hx.txt"))
    write_matrix_text(code.hz, os.path.join(directory, "hz.txt"))
    doc = {
        "n": code.n,
        "k": num_logical_qubits(code),
        "hx": "hx.txt",
        "hz": "hz.txt",
        "provenance": code.provenance,
        "logicals": None,
    }
    if logicals is not None:
        doc["logicals"] = {
            "x": [list(v) for v in logicals.x_logicals.vectors()],
            "z": [list(v) for v in logicals.z_logicals.vectors()],
            "pairing": [list(p) for p in logicals.pairing],
            "global_index": logicals.global_index,
        }
    with open(os.path.join(directory, "code.json"), "w", encoding="ascii") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return ["code.json", "hx.txt", "hz.txt"]


def load_code(directory) -> CssCode:
    """Read back a code written by :func:`save_code`, revalidating."""
    with open(os.path.join(directory, "code.json"), "r", encoding="ascii") as fh:
        doc = json.load(fh)
    hx = read_matrix_text(os.path.join(directory, doc["hx"]))
    hz = read_matrix_text(os.path.join(directory, doc["hz"]))
    code = CssCode(hx, hz, provenance=doc.get("provenance"))
    if code.n != doc["n"] or num_logical_qubits(code) != doc["k"]:
        raise CodeValidationError("stored n/k disagree with the matrices")
    return code
