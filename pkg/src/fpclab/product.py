"""Homological products of three-space chain complexes.

The product of two length-2 complexes is the length-4 total complex with
(C x D)_j = sum over i of C_i (x) D_(j-i), ordered by ascending left degree
i, pairs (a, b) in row-major order within a block.  The boundary acts as
d(a (x) b) = (d a) (x) b + a (x) (d b); over GF(2) no signs are needed.
"""

from __future__ import annotations

import numpy as np

from .complexes import ChainComplex, ComplexValidationError, homology_dim
from .gf2 import BinaryMatrix

__all__ = [
    "ProductComplex",
    "product",
    "middle_code_complex",
    "kunneth_check",
]


class ProductComplex:
    """A homological product with its block index bookkeeping.

    Attributes:
        complex: the five-space total complex.
        left, right: the factors.
        blocks: per level j, list of (i, left_dim, right_dim, offset) in
            ascending i, including empty blocks.
    """

    def __init__(self, left: ChainComplex, right: ChainComplex,
                 complex_: ChainComplex, blocks):
        self.left = left
        self.right = right
        self.complex = complex_
        self.blocks = blocks

    def index(self, level: int, i: int, a: int, b: int) -> int:
        """Flat index of basis element a (x) b of C_i (x) D_(level-i)."""
        for (bi, ld, rd, off) in self.blocks[level]:
            if bi == i:
                if not (0 <= a < ld and 0 <= b < rd):
                    raise IndexError("basis index outside block")
                return off + a * rd + b
        raise IndexError(f"no block with left degree {i} at level {level}")

    def decode(self, level: int, idx: int) -> tuple[int, int, int]:
        """Inverse of :meth:`index`: (left degree, left index, right index)."""
        for (bi, ld, rd, off) in self.blocks[level]:
            size = ld * rd
            if off <= idx < off + size:
                a, b = divmod(idx - off, rd)
                return (bi, a, b)
        raise IndexError(f"index {idx} outside level {level}")

    def block_of(self, level: int, i: int) -> tuple[int, int, int, int]:
        for blk in self.blocks[level]:
            if blk[0] == i:
                return blk
        raise IndexError(f"no block with left degree {i} at level {level}")

    def __repr__(self) -> str:
        return f"ProductComplex(dims={self.complex.space_dims})"


def product(left: ChainComplex, right: ChainComplex) -> ProductComplex:
    """Total complex of the double complex C_i (x) D_(j-i).

    Both factors must be three-space complexes; the result has five spaces
    and its boundary-of-boundary identity is revalidated on construction.
    """
    if left.length != 2 or right.length != 2:
        raise ComplexValidationError("product expects three-space factors")

    blocks = []
    for j in range(5):
        row = []
        off = 0
        for i in range(3):
            k = j - i
            if 0 <= k <= 2:
                ld, rd = left.dim(i), right.dim(k)
                row.append((i, ld, rd, off))
                off += ld * rd
        blocks.append(row)
    dims = [sum(ld * rd for (_, ld, rd, _) in blocks[j]) for j in range(5)]

    def block_offset(level, i):
        for (bi, ld, rd, off) in blocks[level]:
            if bi == i:
                return ld, rd, off
        return None

    boundaries = []
    for j in range(1, 5):
        parts = []
        for (i, ld, rd, off) in blocks[j]:
            k = j - i
            if ld == 0 or rd == 0:
                continue
            if i >= 1:
                # (d_i a) (x) b lands in block (i-1, k) of level j-1.
                tgt = block_offset(j - 1, i - 1)
                ent = left.boundary(i).entries()
                if tgt is not None and ent:
                    _, trd, toff = tgt
                    arr = np.asarray(ent, dtype=np.int64)
                    r, a = arr[:, 0], arr[:, 1]
                    bs = np.arange(rd, dtype=np.int64)
                    rows = (toff + r[:, None] * trd + bs[None, :]).ravel()
                    cols = (off + a[:, None] * rd + bs[None, :]).ravel()
                    parts.append(np.stack([rows, cols], axis=1))
            if k >= 1:
                # a (x) (d_k b) lands in block (i, k-1) of level j-1.
                tgt = block_offset(j - 1, i)
                ent = right.boundary(k).entries()
                if tgt is not None and ent:
                    _, trd, toff = tgt
                    arr = np.asarray(ent, dtype=np.int64)
                    s, b = arr[:, 0], arr[:, 1]
                    as_ = np.arange(ld, dtype=np.int64)
                    rows = (toff + as_[:, None] * trd + s[None, :]).ravel()
                    cols = (off + as_[:, None] * rd + b[None, :]).ravel()
                    parts.append(np.stack([rows, cols], axis=1))
        entries = np.concatenate(parts, axis=0) if parts else []
        boundaries.append(BinaryMatrix(dims[j - 1], dims[j], entries))

    total = ChainComplex(dims, boundaries)
    return ProductComplex(left, right, total, blocks)


def middle_code_complex(prod: ProductComplex) -> ChainComplex:
    """The middle three spaces (levels 1, 2, 3) of a product complex.

    This is the three-space complex whose middle space carries the qubits:
    X generators come from level-1 links, Z generators from level-3 cubes.
    """
    c = prod.complex
    return ChainComplex([c.dim(1), c.dim(2), c.dim(3)],
                        [c.boundary(2), c.boundary(3)])


def kunneth_check(left: ChainComplex, right: ChainComplex, i: int,
                  prod: ProductComplex | None = None) -> tuple[int, int, bool]:
    """Compare dim H_i of the product against the Kunneth sum.

    Returns (product homology dim, sum over j+k=i of dim H_j(C) dim H_k(D),
    equal?).  Pass a precomputed product to avoid rebuilding it per degree.
    """
    if prod is None:
        prod = product(left, right)
    lhs = homology_dim(prod.complex, i)
    rhs = 0
    for j in range(3):
        k = i - j
        if 0 <= k <= 2:
            rhs += homology_dim(left, j) * homology_dim(right, k)
    return lhs, rhs, lhs == rhs
