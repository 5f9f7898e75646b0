"""Dense linear algebra over the prime field GF(p).

Vectors and matrices are numpy integer arrays with entries in 0..p-1.
Subspaces are represented canonically by their reduced row-echelon basis,
so two equal subspaces always compare equal row by row.

The StreamingSolver ingests homogeneous equations one at a time or in
sparse chunks and never materializes the full coefficient matrix; large
systems (millions of rows) reduce in memory bounded by O(ncols^2).
"""

from __future__ import annotations

import numpy as np
from scipy import sparse

from .errors import InternalConsistencyError


def modinv(a, p):
    return pow(int(a), p - 2, p)


def _matmul_mod(a, b, p):
    """Exact (a @ b) mod p via float BLAS; inner dim * (p-1)^2 must be
    representable exactly."""
    if a.size == 0 or b.size == 0:
        return np.zeros((a.shape[0], b.shape[1]), dtype=np.int32)
    bound = a.shape[-1] * (p - 1) ** 2
    if bound < 2 ** 24:
        c = np.dot(a.astype(np.float32), b.astype(np.float32))
    elif bound < 2 ** 53:
        c = np.dot(a.astype(np.float64), b.astype(np.float64))
    else:
        raise ValueError(f"modulus {p} too large for float-exact matmul")
    return np.asarray(np.rint(c), dtype=np.int64) % p


def gf_rref(mat, p):
    """Reduced row echelon form over GF(p).

    Returns (rows, pivots) with rows an r x ncols uint8 array in RREF and
    pivots the strictly increasing pivot column indices.
    """
    m = np.asarray(mat, dtype=np.int32) % p
    if m.ndim != 2:
        raise ValueError("matrix expected")
    nrows, ncols = m.shape
    r = 0
    pivots = []
    for c in range(ncols):
        if r == nrows:
            break
        col = m[r:, c]
        nz = np.nonzero(col)[0]
        if len(nz) == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            m[[r, pr]] = m[[pr, r]]
        inv = modinv(m[r, c], p)
        if inv != 1:
            m[r] = (m[r] * inv) % p
        other = m[:, c].copy()
        other[r] = 0
        sel = np.nonzero(other)[0]
        if len(sel):
            m[sel] = (m[sel] - np.outer(other[sel], m[r])) % p
        pivots.append(c)
        r += 1
    return m[:r].astype(np.uint8), np.array(pivots, dtype=np.int64)


class GFMatrix:
    """A matrix over GF(p): prime modulus, rows, column count."""

    __slots__ = ("p", "rows", "ncols")

    def __init__(self, rows, p, ncols=None):
        rows = np.asarray(rows)
        if rows.ndim == 1:
            rows = rows.reshape(1, -1)
        if rows.ndim != 2:
            raise ValueError("rows must form a 2-d array")
        if ncols is None:
            ncols = rows.shape[1]
        if rows.shape[1] != ncols:
            raise ValueError("row length does not match ncols")
        if p < 2:
            raise ValueError("modulus must be a prime >= 2")
        self.p = int(p)
        self.rows = (rows.astype(np.int64) % p).astype(np.uint8)
        self.ncols = int(ncols)

    @property
    def nrows(self):
        return self.rows.shape[0]


class RREFBasis:
    """Canonical basis of a subspace of GF(p)^ncols in reduced row echelon
    form; equal subspaces produce identical objects."""

    __slots__ = ("p", "ncols", "rows", "pivots")

    def __init__(self, rows, pivots, p, ncols):
        self.p = int(p)
        self.ncols = int(ncols)
        self.rows = np.ascontiguousarray(rows, dtype=np.uint8)
        self.rows.setflags(write=False)
        self.pivots = np.asarray(pivots, dtype=np.int64)
        self.pivots.setflags(write=False)

    @classmethod
    def from_rref_rows(cls, rows, p, ncols):
        """Build from rows believed to be in RREF (re-reduces to make sure)."""
        rows, pivots = gf_rref(np.asarray(rows).reshape(-1, ncols), p)
        return cls(rows, pivots, p, ncols)

    @classmethod
    def empty(cls, p, ncols):
        return cls(np.zeros((0, ncols), dtype=np.uint8),
                   np.zeros(0, dtype=np.int64), p, ncols)

    @property
    def dim(self):
        return self.rows.shape[0]

    def __eq__(self, other):
        return (isinstance(other, RREFBasis) and self.p == other.p
                and self.ncols == other.ncols
                and np.array_equal(self.rows, other.rows))

    def __ne__(self, other):
        return not self.__eq__(other)

    def __repr__(self):
        return f"RREFBasis(p={self.p}, ncols={self.ncols}, dim={self.dim})"

    def contains(self, v):
        return not reduce_mod(v, self).any()


def rref(m, p=None):
    """RREF basis of the row space of a GFMatrix (or raw array with p)."""
    if isinstance(m, GFMatrix):
        rows, prime = m.rows, m.p
    else:
        if p is None:
            raise ValueError("p required for a raw array")
        rows, prime = np.asarray(m), p
    ncols = rows.shape[1] if rows.ndim == 2 else len(rows)
    red, pivots = gf_rref(rows.reshape(-1, ncols), prime)
    return RREFBasis(red, pivots, prime, ncols)


def nullspace_of_rref(basis):
    """Canonical basis of {v : R v = 0} for a row-space RREF basis R."""
    p, ncols = basis.p, basis.ncols
    r = basis.dim
    if r == 0:
        eye = np.eye(ncols, dtype=np.uint8)
        return RREFBasis(eye, np.arange(ncols), p, ncols)
    pivotset = set(basis.pivots.tolist())
    free = np.array([c for c in range(ncols) if c not in pivotset],
                    dtype=np.int64)
    if len(free) == 0:
        return RREFBasis.empty(p, ncols)
    vecs = np.zeros((len(free), ncols), dtype=np.int64)
    vecs[np.arange(len(free)), free] = 1
    vecs[:, basis.pivots] = (-basis.rows[:, free].astype(np.int64).T) % p
    red, pivots = gf_rref(vecs, p)
    return RREFBasis(red, pivots, p, ncols)


def nullspace(m, p=None):
    """Basis of the solution space of the homogeneous system."""
    if isinstance(m, StreamingSolver):
        return m.nullspace()
    if isinstance(m, RREFBasis):
        return nullspace_of_rref(m)
    return nullspace_of_rref(rref(m, p))


def reduce_mod(v, basis):
    """Unique representative of v modulo rowspace(basis) whose coordinates
    at the basis pivot columns are zero."""
    v = np.asarray(v, dtype=np.int64) % basis.p
    single = v.ndim == 1
    v2 = v.reshape(1, -1) if single else v
    if v2.shape[-1] != basis.ncols:
        raise ValueError("dimension mismatch")
    if basis.dim:
        coeff = v2[:, basis.pivots]
        v2 = (v2 - _matmul_mod(coeff, basis.rows.astype(np.int64), basis.p)
              ) % basis.p
    v2 = v2.astype(np.uint8)
    return v2[0] if single else v2


def is_subspace(inner, outer):
    """rowspace(inner) <= rowspace(outer)?"""
    if inner.dim == 0:
        return True
    return not reduce_mod(inner.rows, outer).any()


def complement_basis(space, sub):
    """RREF basis W with rowspace(W) + rowspace(sub) = rowspace(space) and
    every vector of W in reduce_mod(.,sub) canonical form."""
    if not is_subspace(sub, space):
        raise ValueError("sub is not contained in space")
    reduced = reduce_mod(space.rows, sub)
    red, pivots = gf_rref(reduced, space.p)
    w = RREFBasis(red, pivots, space.p, space.ncols)
    if w.dim != space.dim - sub.dim:
        raise InternalConsistencyError("complement dimension mismatch")
    return w


def coset_enumerator(space, sub):
    """Iterate canonical representatives of rowspace(space)/rowspace(sub),
    exactly p^(dim space - dim sub) of them, in lexicographic order."""
    w = complement_basis(space, sub)
    p, d = w.p, w.dim
    if d == 0:
        yield np.zeros(w.ncols, dtype=np.uint8)
        return
    rows = w.rows.astype(np.int64)
    coeffs = np.zeros(d, dtype=np.int64)
    while True:
        yield ((coeffs @ rows) % p).astype(np.uint8)
        i = d - 1
        while i >= 0 and coeffs[i] == p - 1:
            coeffs[i] = 0
            i -= 1
        if i < 0:
            return
        coeffs[i] += 1


class StreamingSolver:
    """Accumulates homogeneous equations over GF(p) and maintains enough
    state to answer rank and nullspace queries.

    Internally the solver tracks a (non-canonical) basis of the current
    solution space, which shrinks as independent equations arrive; the
    row-space RREF basis is materialized on demand. Raw equations are
    buffered sparsely and reduced in batches so that memory stays within
    O(ncols^2) regardless of how many equations are ingested.
    """

    def __init__(self, p, ncols, batch_rows=None):
        self.p = int(p)
        self.ncols = int(ncols)
        self.batch_rows = int(batch_rows) if batch_rows else 4 * self.ncols
        self.equations_seen = 0
        self._kernel = None          # None means the full space (no equations)
        self._kernel_pivots = None   # set when the kernel is canonical RREF
        self._buf_cols = []
        self._buf_vals = []
        self._buf_lens = []
        self._row_basis = None

    # -- ingestion ----------------------------------------------------------

    def ingest(self, equation):
        """Add one dense coefficient vector."""
        eq = np.asarray(equation, dtype=np.int64)
        if eq.shape != (self.ncols,):
            raise ValueError("equation length does not match ncols")
        eq = eq % self.p
        cols = np.nonzero(eq)[0]
        self.ingest_sparse(cols, eq[cols])

    def ingest_sparse(self, cols, vals):
        """Add one equation given by its nonzero columns and values."""
        self.equations_seen += 1
        if len(cols) == 0:
            return
        self._buf_cols.append(np.asarray(cols, dtype=np.int64))
        self._buf_vals.append(np.asarray(vals, dtype=np.int64) % self.p)
        self._buf_lens.append(len(cols))
        if len(self._buf_lens) >= self.batch_rows:
            self.flush()

    def ingest_chunk(self, matrix):
        """Add many equations at once (dense array or scipy sparse)."""
        if sparse.issparse(matrix):
            chunk = matrix.tocsr()
        else:
            arr = np.asarray(matrix, dtype=np.int64) % self.p
            if arr.ndim != 2 or arr.shape[1] != self.ncols:
                raise ValueError("chunk shape does not match ncols")
            chunk = sparse.csr_matrix(arr)
        if chunk.shape[1] != self.ncols:
            raise ValueError("chunk shape does not match ncols")
        self.flush()
        self.equations_seen += chunk.shape[0]
        chunk.data %= self.p
        self._process(chunk)

    def flush(self):
        """Reduce all buffered equations into the solver state."""
        if not self._buf_lens:
            return
        indptr = np.concatenate([[0], np.cumsum(self._buf_lens)])
        data = np.concatenate(self._buf_vals)
        indices = np.concatenate(self._buf_cols)
        chunk = sparse.csr_matrix((data, indices, indptr),
                                  shape=(len(self._buf_lens), self.ncols))
        self._buf_cols, self._buf_vals, self._buf_lens = [], [], []
        self._process(chunk)

    # -- internal reduction ---------------------------------------------------

    def _process(self, chunk):
        """Shrink the kernel by the constraints in a csr chunk."""
        start = 0
        total = chunk.shape[0]
        while start < total:
            k = self.ncols if self._kernel is None else self._kernel.shape[0]
            step = 1024 if k > 2048 else 8192
            block = chunk[start:start + step]
            start += step
            self._shrink(block)
            if self._kernel is not None and self._kernel.shape[0] == 0:
                break  # only the zero solution is left
        self._row_basis = None

    def _shrink(self, block):
        p = self.p
        if self._kernel is None:
            m = block.toarray().astype(np.int32) % p
        else:
            kern = self._kernel
            if kern.shape[0] == 0:
                return
            m = _matmul_mod_sparse(block, kern.T, p)
        if not m.any():
            return
        red, pivots = gf_rref(m, p)
        r = len(pivots)
        if r == 0:
            return
        k = self.ncols if self._kernel is None else self._kernel.shape[0]
        pivotset = set(pivots.tolist())
        free = np.array([c for c in range(k) if c not in pivotset],
                        dtype=np.int64)
        if self._kernel is None:
            knew = np.zeros((len(free), self.ncols), dtype=np.int64)
            if len(free):
                knew[np.arange(len(free)), free] = 1
                knew[:, pivots] = (-red[:, free].astype(np.int64).T) % p
            self._kernel = knew.astype(np.uint8)
        else:
            if len(free) == 0:
                self._kernel = np.zeros((0, self.ncols), dtype=np.uint8)
            else:
                corr = _matmul_mod(red[:, free].astype(np.int64).T,
                                   self._kernel[pivots].astype(np.int64), p)
                knew = (self._kernel[free].astype(np.int64) - corr) % p
                self._kernel = knew.astype(np.uint8)
        self._kernel_pivots = None

    # -- queries --------------------------------------------------------------

    @property
    def nullity(self):
        self.flush()
        return self.ncols if self._kernel is None else self._kernel.shape[0]

    @property
    def rank(self):
        return self.ncols - self.nullity

    def nullspace(self):
        """Canonical RREF basis of the solution space."""
        self.flush()
        if self._kernel is None:
            eye = np.eye(self.ncols, dtype=np.uint8)
            return RREFBasis(eye, np.arange(self.ncols), self.p, self.ncols)
        if self._kernel_pivots is None:
            red, pivots = gf_rref(self._kernel, self.p)
            if red.shape[0] != self._kernel.shape[0]:
                raise InternalConsistencyError("kernel basis lost rank")
            self._kernel = red
            self._kernel_pivots = pivots
        return RREFBasis(self._kernel, self._kernel_pivots, self.p, self.ncols)

    def basis(self):
        """Row-space RREF basis of all ingested equations."""
        self.flush()
        if self._row_basis is None:
            self._row_basis = nullspace_of_rref(self.nullspace())
        return self._row_basis

    def merge(self, other):
        """Ingest another solver's row space (for per-worker merging)."""
        if other.p != self.p or other.ncols != self.ncols:
            raise ValueError("solvers are not compatible")
        rows = other.basis().rows
        if rows.shape[0]:
            self.ingest_chunk(rows)


def _matmul_mod_sparse(a_csr, b, p):
    """(sparse a) @ (dense b) mod p, exact."""
    # inner products have at most row-nnz terms, each < p^2
    max_terms = int(np.diff(a_csr.indptr).max(initial=0))
    bound = max(1, max_terms) * (p - 1) ** 2
    if bound < 2 ** 24:
        c = a_csr.astype(np.float32) @ b.astype(np.float32)
    elif bound < 2 ** 53:
        c = a_csr.astype(np.float64) @ b.astype(np.float64)
    else:
        raise ValueError(f"modulus {p} too large for float-exact matmul")
    return np.asarray(np.rint(c), dtype=np.int64).astype(np.int32) % p
