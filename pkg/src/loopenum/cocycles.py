"""Central extensions Q(F, A, theta) with A = Z_p, and the linear systems
whose solution spaces are the variety cocycles.

A cocycle theta: F x F -> GF(p) is stored as an n x n matrix and flattened
row-major, (x, y) -> x*n + y, whenever it is treated as a vector. All
cocycles are loop-normalized: theta(x, e) = theta(e, x) = 0.

Extensions live on F x Z_p with the index encoding (x, a) -> x*p + a, so
the kernel is {0, ..., p-1} and the canonical projection onto F is integer
division by p.
"""

from __future__ import annotations

import enum

import numpy as np
from scipy import sparse

from .errors import PreconditionError, UnsupportedStructureError
from .gf import GFMatrix, RREFBasis, StreamingSolver, rref
from .tables import LoopTable


class Variety(enum.Enum):
    BRUCK = "bruck"
    COMM_AUTOMORPHIC = "ca"


class Cocycle:
    """Loop-normalized cocycle with values in GF(p)."""

    __slots__ = ("n", "p", "entries")

    def __init__(self, entries, p):
        entries = (np.asarray(entries, dtype=np.int64) % p).astype(np.uint8)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ValueError("cocycle matrix must be square")
        if entries[0].any() or entries[:, 0].any():
            raise ValueError("cocycle is not loop-normalized")
        entries.setflags(write=False)
        self.n = entries.shape[0]
        self.p = int(p)
        self.entries = entries

    @classmethod
    def from_vector(cls, vec, n, p):
        vec = np.asarray(vec)
        if vec.shape != (n * n,):
            raise ValueError("vector length must be n^2")
        return cls(vec.reshape(n, n), p)

    @classmethod
    def zero(cls, n, p):
        return cls(np.zeros((n, n), dtype=np.uint8), p)

    def vector(self):
        return self.entries.reshape(-1).copy()

    def __eq__(self, other):
        return (isinstance(other, Cocycle) and self.p == other.p
                and np.array_equal(self.entries, other.entries))

    def __ne__(self, other):
        return not self.__eq__(other)

    def __hash__(self):
        return hash((self.p, self.entries.tobytes()))

    def __repr__(self):
        return f"Cocycle(n={self.n}, p={self.p})"


# ---------------------------------------------------------------------------
# coboundaries

def coboundary(F, tau, p):
    """The coboundary tau_hat(x,y) = tau(xy) - tau(x) - tau(y)."""
    tau = np.asarray(tau, dtype=np.int64) % p
    if tau.shape != (F.n,):
        raise ValueError("tau must assign a value to every element")
    if tau[0] % p != 0:
        raise ValueError("tau must vanish on the identity")
    t = F.table
    mat = (tau[t] - tau[:, None] - tau[None, :]) % p
    return Cocycle(mat, p)


def coboundary_space(F, p):
    """RREF basis of the space of loop coboundaries B(F, Z_p), spanned by
    the coboundaries of the delta maps at each non-identity element."""
    n = F.n
    t = F.table.astype(np.int64)
    c = np.arange(1, n)
    rows = ((t[None, :, :] == c[:, None, None]).astype(np.int64)
            - (np.arange(n)[None, :, None] == c[:, None, None])
            - (np.arange(n)[None, None, :] == c[:, None, None])) % p
    return rref(GFMatrix(rows.reshape(n - 1, n * n), p))


def shift_by_coboundary(F, theta, tau):
    """theta + tau_hat on the factor F, for a map tau with tau(identity) = 0.

    The extensions of theta and of the shifted cocycle are isomorphic via
    (x, a) -> (x, a + tau(x)).
    """
    hat = coboundary(F, tau, theta.p)
    return Cocycle((theta.entries.astype(np.int64) + hat.entries) % theta.p,
                   theta.p)


# ---------------------------------------------------------------------------
# equation generators

def _coo_to_csr(nrows, ncols, rows, cols, vals, p):
    m = sparse.coo_matrix(
        (np.concatenate(vals).astype(np.int64),
         (np.concatenate(rows), np.concatenate(cols))),
        shape=(nrows, ncols)).tocsr()
    m.sum_duplicates()
    m.data %= p
    m.eliminate_zeros()
    return m


def normalization_equations(n, p):
    """theta(x,e) = 0 and theta(e,x) = 0: 2n one-term equations."""
    x = np.arange(n)
    rows = [np.arange(2 * n)]
    cols = [np.concatenate([x * n, x])]
    vals = [np.ones(2 * n)]
    return _coo_to_csr(2 * n, n * n, rows, cols, vals, p)


def aip_equations(F, p):
    """theta(x,y) + theta(x',y') + theta(xy,(xy)') = theta(x,x') + theta(y,y')
    with ' the two-sided inverse: n^2 equations."""
    n = F.n
    t = F.table.astype(np.int64)
    inv = F.inverses().astype(np.int64)
    x = np.repeat(np.arange(n), n)
    y = np.tile(np.arange(n), n)
    xy = t[x, y]
    r = np.arange(n * n)
    rows = [r] * 5
    cols = [x * n + y,
            inv[x] * n + inv[y],
            xy * n + inv[xy],
            x * n + inv[x],
            y * n + inv[y]]
    vals = [np.ones(n * n), np.ones(n * n), np.ones(n * n),
            -np.ones(n * n), -np.ones(n * n)]
    return _coo_to_csr(n * n, n * n, rows, cols, vals, p)


def bol_equation_blocks(F, p):
    """theta(x,z) + theta(y,xz) + theta(x,y(xz)) = theta(y,x) + theta(x,yx)
    + theta(x(yx),z), one n^2-row block per x: n^3 equations total."""
    n = F.n
    t = F.table.astype(np.int64)
    y = np.repeat(np.arange(n), n)
    z = np.tile(np.arange(n), n)
    r = np.arange(n * n)
    ones = np.ones(n * n)
    for x in range(n):
        xz = t[x, z]
        yx = t[y, x]
        rows = [r] * 6
        cols = [x * n + z,
                y * n + xz,
                x * n + t[y, xz],
                y * n + x,
                x * n + yx,
                t[x, yx] * n + z]
        vals = [ones, ones, ones, -ones, -ones, -ones]
        yield _coo_to_csr(n * n, n * n, rows, cols, vals, p)


def commutativity_equations(F, p):
    """theta(x,y) = theta(y,x): n^2 equations."""
    n = F.n
    x = np.repeat(np.arange(n), n)
    y = np.tile(np.arange(n), n)
    r = np.arange(n * n)
    rows = [r, r]
    cols = [x * n + y, y * n + x]
    vals = [np.ones(n * n), -np.ones(n * n)]
    return _coo_to_csr(n * n, n * n, rows, cols, vals, p)


def left_automorphic_equation_blocks(F, p):
    """The twelve-term inner-mapping identity over all quadruples (x,y,z,u),
    one n^2-row block per pair (x,y): n^4 equations total."""
    n = F.n
    t = F.table.astype(np.int64)
    ld = F.ldiv.astype(np.int64)
    z = np.repeat(np.arange(n), n)
    u = np.tile(np.arange(n), n)
    zu = t[z, u]
    r = np.arange(n * n)
    ones = np.ones(n * n)
    for x in range(n):
        tx = t[x]
        for y in range(n):
            yx = t[y, x]
            lxy = ld[yx][t[y][tx]]       # L_{x,y} as a permutation
            lz = lxy[z]
            lu = lxy[u]
            rows = [r] * 12
            cols = [x * n + z,
                    x * n + u,
                    y * n + tx[z],
                    y * n + tx[u],
                    yx * n + lxy[zu],
                    lz * n + lu,
                    z * n + u,
                    np.full(n * n, y * n + x),
                    x * n + zu,
                    y * n + tx[zu],
                    yx * n + lz,
                    yx * n + lu]
            vals = [ones, ones, ones, ones, ones, ones,
                    -ones, -ones, -ones, -ones, -ones, -ones]
            yield _coo_to_csr(n * n, n * n, rows, cols, vals, p)


def variety_equation_chunks(F, p, variety):
    """All defining equations of C_V(F, Z_p) as sparse chunks."""
    yield normalization_equations(F.n, p)
    if variety is Variety.BRUCK:
        yield aip_equations(F, p)
        yield from bol_equation_blocks(F, p)
    elif variety is Variety.COMM_AUTOMORPHIC:
        yield commutativity_equations(F, p)
        yield from left_automorphic_equation_blocks(F, p)
    else:
        raise ValueError(f"unknown variety {variety!r}")


def check_in_variety(F, variety):
    """PreconditionError naming the failed identity if F is not in V."""
    if variety is Variety.BRUCK:
        if not F.is_left_bol():
            raise PreconditionError("factor violates the left Bol identity "
                                    "x(y(xz)) = (x(yx))z")
        try:
            aip = F.has_automorphic_inverse_property()
        except UnsupportedStructureError as exc:
            raise PreconditionError(str(exc)) from None
        if not aip:
            raise PreconditionError("factor violates the automorphic inverse "
                                    "property (xy)^-1 = x^-1 y^-1")
    elif variety is Variety.COMM_AUTOMORPHIC:
        if not F.is_commutative():
            raise PreconditionError("factor violates commutativity xy = yx")
        if not F.is_left_automorphic():
            raise PreconditionError("factor has an inner mapping L_{x,y} "
                                    "that is not an automorphism")
    else:
        raise ValueError(f"unknown variety {variety!r}")


def variety_cocycle_space(F, p, variety, batch_rows=None):
    """RREF basis of C_V(F, Z_p), the space of cocycles whose extensions
    lie in the variety; F must itself lie in the variety."""
    check_in_variety(F, variety)
    solver = StreamingSolver(p, F.n * F.n, batch_rows=batch_rows)
    for chunk in variety_equation_chunks(F, p, variety):
        solver.ingest_chunk(chunk)
    return solver.nullspace()


# ---------------------------------------------------------------------------
# extensions

def extension(F, p, theta):
    """The central extension on F x Z_p with product
    (x,a)(y,b) = (xy, a+b+theta(x,y))."""
    if theta.n != F.n:
        raise ValueError("cocycle size does not match the factor")
    if theta.p != p:
        raise ValueError("cocycle modulus does not match p")
    n = F.n
    t = F.table.astype(np.int64)
    a = np.arange(p, dtype=np.int64)
    high = t[:, None, :, None] * p
    low = (a[None, :, None, None] + a[None, None, None, :]
           + theta.entries[:, None, :, None]) % p
    big = (high + low).reshape(n * p, n * p)
    return LoopTable(big)


def kernel_elements(p):
    """Indices of the central kernel {(e, a)} in an extension."""
    return list(range(p))
