"""GF(2) linear algebra on bit-packed binary matrices.

Rows are stored as little-endian 64-bit words so that row operations work a
word at a time.  The interchange representation is the sparse coordinate set
``{(row, col)}``; packing is an internal detail.  Elimination is fully
deterministic: pivots are chosen scanning columns in ascending order and,
within a column, taking the first remaining row.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "BinaryMatrix",
    "BasisSet",
    "rank",
    "kernel_basis",
    "row_space_basis",
    "matmul",
    "mat_vec",
    "in_span",
    "combination_for",
    "stack_rows",
    "pack_indices",
    "unpack_indices",
    "write_matrix_text",
    "read_matrix_text",
]

_WORD_BITS = 64


def _n_words(n_cols: int) -> int:
    return max(1, (n_cols + _WORD_BITS - 1) // _WORD_BITS)


def pack_indices(n_cols: int, indices) -> np.ndarray:
    """Pack a set of column indices into a single bit row (uint64 words)."""
    row = np.zeros(_n_words(n_cols), dtype=np.uint64)
    idx = np.asarray(sorted(set(int(i) for i in indices)), dtype=np.int64)
    if idx.size:
        if idx[0] < 0 or idx[-1] >= n_cols:
            raise ValueError(f"index out of range for width {n_cols}")
        np.bitwise_or.at(row, idx // _WORD_BITS,
                         np.uint64(1) << (idx % _WORD_BITS).astype(np.uint64))
    return row


def unpack_indices(row: np.ndarray, n_cols: int) -> tuple[int, ...]:
    """Inverse of :func:`pack_indices`: the sorted support of a bit row."""
    bits = np.unpackbits(row.astype("<u8").view(np.uint8), bitorder="little")
    return tuple(int(i) for i in np.nonzero(bits[:n_cols])[0])


class BinaryMatrix:
    """An immutable matrix over GF(2).

    Args:
        n_rows: number of rows (>= 0).
        n_cols: number of columns (>= 0).
        entries: iterable of (row, col) positions holding a 1.  Repeated
            mentions of a position are collapsed; out-of-range positions
            raise ValueError.
    """

    __slots__ = ("n_rows", "n_cols", "_words")

    def __init__(self, n_rows: int, n_cols: int, entries=()):
        if n_rows < 0 or n_cols < 0:
            raise ValueError("matrix dimensions must be non-negative")
        self.n_rows = int(n_rows)
        self.n_cols = int(n_cols)
        words = np.zeros((self.n_rows, _n_words(self.n_cols)), dtype=np.uint64)
        ent = list(entries)
        if ent:
            arr = np.asarray(ent, dtype=np.int64)
            if arr.ndim != 2 or arr.shape[1] != 2:
                raise ValueError("entries must be (row, col) pairs")
            r, c = arr[:, 0], arr[:, 1]
            if r.min() < 0 or r.max() >= n_rows or c.min() < 0 or c.max() >= n_cols:
                raise ValueError("entry out of range")
            np.bitwise_or.at(words, (r, c // _WORD_BITS),
                             np.uint64(1) << (c % _WORD_BITS).astype(np.uint64))
        self._words = words

    @classmethod
    def _from_words(cls, n_rows: int, n_cols: int, words: np.ndarray) -> "BinaryMatrix":
        m = cls.__new__(cls)
        m.n_rows = n_rows
        m.n_cols = n_cols
        m._words = words
        return m

    @classmethod
    def zeros(cls, n_rows: int, n_cols: int) -> "BinaryMatrix":
        return cls(n_rows, n_cols)

    @classmethod
    def identity(cls, n: int) -> "BinaryMatrix":
        return cls(n, n, [(i, i) for i in range(n)])

    @classmethod
    def from_dense(cls, array) -> "BinaryMatrix":
        arr = np.asarray(array)
        if arr.ndim != 2:
            raise ValueError("expected a 2-d array")
        r, c = np.nonzero(arr % 2)
        return cls(arr.shape[0], arr.shape[1], zip(r.tolist(), c.tolist()))

    @classmethod
    def from_rows(cls, n_cols: int, rows) -> "BinaryMatrix":
        """Build from an iterable of per-row column index sets."""
        rows = list(rows)
        ent = [(i, j) for i, row in enumerate(rows) for j in row]
        return cls(len(rows), n_cols, ent)

    def to_dense(self) -> np.ndarray:
        bits = np.unpackbits(self._words.astype("<u8").view(np.uint8),
                             axis=1, bitorder="little")
        return bits[:, : self.n_cols]

    def entries(self) -> list[tuple[int, int]]:
        """Sparse coordinate form, ascending lexicographic (row, col)."""
        r, c = np.nonzero(self.to_dense())
        return list(zip(r.tolist(), c.tolist()))

    @property
    def nnz(self) -> int:
        return int(np.bitwise_count(self._words).sum())

    def row_indices(self, i: int) -> tuple[int, ...]:
        """Column support of row i."""
        return unpack_indices(self._words[i], self.n_cols)

    def row_weights(self) -> np.ndarray:
        return np.bitwise_count(self._words).sum(axis=1).astype(np.int64)

    def transpose(self) -> "BinaryMatrix":
        r, c = np.nonzero(self.to_dense())
        return BinaryMatrix(self.n_cols, self.n_rows, zip(c.tolist(), r.tolist()))

    def is_zero(self) -> bool:
        return not self._words.any()

    def __eq__(self, other) -> bool:
        if not isinstance(other, BinaryMatrix):
            return NotImplemented
        return (self.n_rows == other.n_rows and self.n_cols == other.n_cols
                and np.array_equal(self._words, other._words))

    def __hash__(self):
        raise TypeError("BinaryMatrix is not hashable")

    def __repr__(self) -> str:
        return f"BinaryMatrix({self.n_rows}x{self.n_cols}, nnz={self.nnz})"

    def __matmul__(self, other: "BinaryMatrix") -> "BinaryMatrix":
        return matmul(self, other)


def stack_rows(matrices: list[BinaryMatrix]) -> BinaryMatrix:
    """Vertical concatenation; all matrices must share n_cols."""
    if not matrices:
        raise ValueError("nothing to stack")
    n_cols = matrices[0].n_cols
    for m in matrices:
        if m.n_cols != n_cols:
            raise ValueError("column count mismatch in stack")
    words = np.vstack([m._words for m in matrices])
    return BinaryMatrix._from_words(sum(m.n_rows for m in matrices), n_cols, words)


def matmul(a: BinaryMatrix, b: BinaryMatrix) -> BinaryMatrix:
    """Matrix product over GF(2).

    Row i of the result is the XOR of the rows of ``b`` selected by the
    support of row i of ``a``.  Raises ValueError on inner-dimension
    mismatch.
    """
    if a.n_cols != b.n_rows:
        raise ValueError(f"cannot multiply {a.n_rows}x{a.n_cols} by {b.n_rows}x{b.n_cols}")
    out = np.zeros((a.n_rows, _n_words(b.n_cols)), dtype=np.uint64)
    dense_a = a.to_dense()
    bw = b._words
    for i in range(a.n_rows):
        idx = np.nonzero(dense_a[i])[0]
        if idx.size:
            out[i] = np.bitwise_xor.reduce(bw[idx], axis=0)
    return BinaryMatrix._from_words(a.n_rows, b.n_cols, out)


def _as_row(n_cols: int, v) -> np.ndarray:
    """Normalize a vector given as indices, packed words, or a 1-row matrix."""
    if isinstance(v, BinaryMatrix):
        if v.n_rows != 1 or v.n_cols != n_cols:
            raise ValueError("expected a single row of matching width")
        return v._words[0].copy()
    if isinstance(v, np.ndarray) and v.dtype == np.uint64:
        if v.shape != (_n_words(n_cols),):
            raise ValueError("packed vector has wrong word count")
        return v.copy()
    return pack_indices(n_cols, v)


def mat_vec(m: BinaryMatrix, v) -> np.ndarray:
    """Product M.v as a 0/1 uint8 array of length n_rows."""
    row = _as_row(m.n_cols, v)
    return (np.bitwise_count(m._words & row).sum(axis=1) & 1).astype(np.uint8)


def _eliminate(words: np.ndarray, n_cols: int, reduce_above: bool) -> list[int]:
    """In-place Gaussian elimination; returns pivot column list.

    Deterministic: columns scanned in ascending order; within a column the
    first remaining row is the pivot.
    """
    m = words.shape[0]
    pivots: list[int] = []
    r = 0
    for c in range(n_cols):
        if r == m:
            break
        w, b = divmod(c, _WORD_BITS)
        shift = np.uint64(b)
        col = (words[r:, w] >> shift) & np.uint64(1)
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            words[[r, p]] = words[[p, r]]
        if reduce_above:
            hit = ((words[:, w] >> shift) & np.uint64(1)).astype(bool)
            hit[r] = False
        else:
            hit = np.zeros(m, dtype=bool)
            below = np.nonzero((words[r + 1:, w] >> shift) & np.uint64(1))[0]
            hit[r + 1 + below] = True
        if hit.any():
            words[hit] ^= words[r]
        pivots.append(c)
        r += 1
    return pivots


def rank(m: BinaryMatrix) -> int:
    """Rank over GF(2)."""
    if m.n_rows == 0 or m.n_cols == 0:
        return 0
    work = m._words.copy()
    return len(_eliminate(work, m.n_cols, reduce_above=False))


class BasisSet:
    """An independent set of GF(2) vectors in a common ambient space.

    Vectors are kept in the order given; an echelonized copy is cached for
    membership queries.  Construction fails if the vectors are dependent.
    """

    __slots__ = ("ambient_dim", "_words", "_ech", "_piv")

    def __init__(self, ambient_dim: int, vectors):
        self.ambient_dim = int(ambient_dim)
        if isinstance(vectors, np.ndarray):
            words = vectors.astype(np.uint64, copy=True)
            if words.ndim != 2 or words.shape[1] != _n_words(ambient_dim):
                raise ValueError("packed vector array has wrong shape")
        else:
            rows = [pack_indices(ambient_dim, v) for v in vectors]
            words = (np.vstack(rows) if rows
                     else np.zeros((0, _n_words(ambient_dim)), dtype=np.uint64))
        ech = words.copy()
        piv = _eliminate(ech, ambient_dim, reduce_above=True)
        if len(piv) != words.shape[0]:
            raise ValueError("basis vectors are linearly dependent")
        self._words = words
        self._ech = ech
        self._piv = piv

    def __len__(self) -> int:
        return self._words.shape[0]

    def vectors(self) -> list[tuple[int, ...]]:
        """Each basis vector as a sorted tuple of support indices."""
        return [unpack_indices(self._words[i], self.ambient_dim)
                for i in range(len(self))]

    def packed(self) -> np.ndarray:
        return self._words.copy()

    def as_matrix(self) -> BinaryMatrix:
        return BinaryMatrix._from_words(len(self), self.ambient_dim,
                                        self._words.copy())

    def _reduce(self, row: np.ndarray) -> np.ndarray:
        for i, c in enumerate(self._piv):
            w, b = divmod(c, _WORD_BITS)
            if (row[w] >> np.uint64(b)) & np.uint64(1):
                row ^= self._ech[i]
        return row

    def __repr__(self) -> str:
        return f"BasisSet(dim={len(self)}, ambient={self.ambient_dim})"


def in_span(v, basis: BasisSet) -> bool:
    """Whether v lies in the span of the basis.

    v may be an index iterable, a packed uint64 row, or a 1-row matrix.
    """
    row = _as_row(basis.ambient_dim, v)
    return not basis._reduce(row).any()


def combination_for(m: BinaryMatrix, v) -> np.ndarray | None:
    """Coefficients x with x.M = v (combination of rows of M), or None.

    Returns a uint8 array of length n_rows in terms of the original row
    order.  When several solutions exist the one produced by deterministic
    elimination is returned.
    """
    target = _as_row(m.n_cols, v)
    k = m.n_rows
    nw = _n_words(m.n_cols)
    # The coefficient-tracking identity block starts on a word boundary so
    # matrix bits and tracking bits never share a word.
    track0 = nw * _WORD_BITS
    aug = np.zeros((k, nw + _n_words(max(1, k))), dtype=np.uint64)
    aug[:, :nw] = m._words
    for i in range(k):
        c = track0 + i
        aug[i, c // _WORD_BITS] |= np.uint64(1) << np.uint64(c % _WORD_BITS)
    # Eliminate on the first n_cols columns only; the tail records row ops.
    pivots: list[int] = []
    r = 0
    for c in range(m.n_cols):
        if r == k:
            break
        w, b = divmod(c, _WORD_BITS)
        shift = np.uint64(b)
        nz = np.nonzero((aug[r:, w] >> shift) & np.uint64(1))[0]
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            aug[[r, p]] = aug[[p, r]]
        hit = ((aug[:, w] >> shift) & np.uint64(1)).astype(bool)
        hit[r] = False
        if hit.any():
            aug[hit] ^= aug[r]
        pivots.append(c)
        r += 1
    coeff = np.zeros(aug.shape[1], dtype=np.uint64)
    row = target.copy()
    for i, c in enumerate(pivots):
        w, b = divmod(c, _WORD_BITS)
        if (row[w] >> np.uint64(b)) & np.uint64(1):
            row ^= aug[i, :nw]
            coeff ^= aug[i]
    if row.any():
        return None
    bits = np.unpackbits(coeff.astype("<u8").view(np.uint8), bitorder="little")
    return bits[track0: track0 + k].astype(np.uint8)


def kernel_basis(m: BinaryMatrix) -> BasisSet:
    """Basis of the right kernel {v : M.v = 0}, in echelon form.

    Satisfies rank + len(kernel) = n_cols.
    """
    if m.n_cols == 0:
        return BasisSet(0, np.zeros((0, 1), dtype=np.uint64))
    work = m._words.copy()
    pivots = _eliminate(work, m.n_cols, reduce_above=True)
    pivot_set = set(pivots)
    free = [c for c in range(m.n_cols) if c not in pivot_set]
    vecs = np.zeros((len(free), _n_words(m.n_cols)), dtype=np.uint64)
    for vi, f in enumerate(free):
        fw, fb = divmod(f, _WORD_BITS)
        vecs[vi, fw] |= np.uint64(1) << np.uint64(fb)
        for ri, c in enumerate(pivots):
            w, b = divmod(f, _WORD_BITS)
            if (work[ri, w] >> np.uint64(b)) & np.uint64(1):
                cw, cb = divmod(c, _WORD_BITS)
                vecs[vi, cw] |= np.uint64(1) << np.uint64(cb)
    return BasisSet(m.n_cols, vecs)


def row_space_basis(m: BinaryMatrix) -> BasisSet:
    """Echelon basis of the row space of M."""
    work = m._words.copy()
    pivots = _eliminate(work, m.n_cols, reduce_above=True)
    return BasisSet(m.n_cols, work[: len(pivots)].copy())


def write_matrix_text(m: BinaryMatrix, path) -> None:
    """Write the text interchange form: 'rows cols nnz' then 'i j' lines.

    Entries are emitted in ascending lexicographic (row, col) order.
    """
    ent = m.entries()
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"{m.n_rows} {m.n_cols} {len(ent)}\n")
        for i, j in ent:
            fh.write(f"{i} {j}\n")


def read_matrix_text(path) -> BinaryMatrix:
    """Read the text interchange form written by :func:`write_matrix_text`."""
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().split()
        if len(header) != 3:
            raise ValueError(f"{path}: malformed header")
        n_rows, n_cols, nnz = (int(x) for x in header)
        entries = []
        for lineno, line in enumerate(fh, start=2):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'i j'")
            entries.append((int(parts[0]), int(parts[1])))
    if len(entries) != nnz:
        raise ValueError(f"{path}: header promises {nnz} entries, found {len(entries)}")
    return BinaryMatrix(n_rows, n_cols, entries)
