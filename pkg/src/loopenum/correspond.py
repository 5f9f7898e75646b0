"""The two bijective correspondences: involutory latin quandle <->
uniquely 2-divisible left Bruck loop, and odd-order left Bruck loop <->
gamma-loop, together with the square-root machinery they require.

Both correspondences are elementwise mutual inverses, which the tests
exercise on every catalogued table.
"""

from __future__ import annotations

import numpy as np

from .errors import InternalConsistencyError, UnsupportedStructureError
from .tables import (
    DTYPE,
    LoopTable,
    QuandleTable,
    cycle_structure,
    identity_perm,
    inverse_perm,
)


def element_sqrt(Q, x):
    """The unique y with y*y = x in a power-associative loop of odd order,
    computed as x^((m+1)/2) for m the order of x."""
    if Q.n % 2 == 0:
        raise UnsupportedStructureError("square roots need odd order")
    m = Q.element_order(x)
    if m % 2 == 0:
        raise UnsupportedStructureError(f"element {x} has even order")
    y = Q.left_power(x, (m + 1) // 2)
    if Q.mul(y, y) != x:
        raise UnsupportedStructureError(
            f"element {x} has no square root along left powers")
    return y


def permutation_sqrt(sigma):
    """The square root sigma^((m+1)/2) inside <sigma>, for odd-order sigma.

    Each cycle of odd length l is rotated by (l+1)/2; a cycle of even
    length means the permutation has even order and there is no root
    inside the generated cyclic group.
    """
    sigma = np.asarray(sigma)
    n = len(sigma)
    out = np.empty(n, dtype=sigma.dtype)
    seen = [False] * n
    sl = sigma.tolist()
    for i in range(n):
        if seen[i]:
            continue
        cycle = [i]
        j = sl[i]
        while j != i:
            cycle.append(j)
            j = sl[j]
        ln = len(cycle)
        if ln % 2 == 0:
            raise UnsupportedStructureError(
                "permutation of even order has no square root in its "
                "own cyclic group")
        shift = (ln + 1) // 2
        for k, c in enumerate(cycle):
            seen[c] = True
            out[c] = cycle[(k + shift) % ln]
    return out


def _sqrt_image(perm_list, start):
    """Image of one point under the square root of a permutation given as
    a list; walks only the cycle through the point."""
    cycle = [start]
    j = perm_list[start]
    while j != start:
        cycle.append(j)
        j = perm_list[j]
    ln = len(cycle)
    if ln % 2 == 0:
        raise InternalConsistencyError(
            "even translation-commutator cycle in an odd-order Bruck loop")
    return cycle[((ln + 1) // 2) % ln]


# ---------------------------------------------------------------------------
# quandle <-> Bruck loop

def quandle_to_bruck(Q, e=0):
    """Loop x + y = (x/e)(ey) on an involutory latin quandle, relabelled
    so the base point e becomes 0 (by swapping the labels 0 and e)."""
    if not isinstance(Q, QuandleTable):
        raise TypeError("expected a QuandleTable")
    if not 0 <= e < Q.n:
        raise ValueError(f"base point {e} out of range")
    n = Q.n
    t = Q.table.astype(np.int64)
    # right division by e: rde[x] = x/e, the unique z with z*e = x
    rde = np.empty(n, dtype=np.int64)
    rde[t[:, e]] = np.arange(n)
    plus = t[np.ix_(rde, t[e])]          # (x/e) * (e*y)
    swap = identity_perm(n).astype(np.int64)
    swap[0], swap[e] = e, 0
    relabelled = swap[plus[np.ix_(swap, swap)]]
    loop = LoopTable(relabelled)
    if n % 2 == 0:
        raise UnsupportedStructureError("quandle of even order cannot "
                                        "yield a uniquely 2-divisible loop")
    if not loop.is_left_bruck():
        raise InternalConsistencyError("conversion did not produce a left "
                                       "Bruck loop")
    return loop


def bruck_to_quandle(B):
    """Quandle x*y = 2x - y on a uniquely 2-divisible left Bruck loop."""
    if B.n % 2 == 0:
        raise UnsupportedStructureError("left Bruck loop must have odd order")
    if not B.is_left_bruck():
        failed = ("the left Bol identity" if not B.is_left_bol()
                  else "the automorphic inverse property")
        raise UnsupportedStructureError(f"input loop violates {failed}")
    t = B.table
    inv = B.inverses()
    rng = np.arange(B.n)
    two_x = t[rng, rng]
    quandle = t[np.ix_(two_x, inv)]       # (x+x) + (-y)
    return QuandleTable(quandle)


# ---------------------------------------------------------------------------
# Bruck loop <-> gamma-loop

def bruck_to_gamma(B):
    """Gamma-loop product x.y = sqrt(L_x L_y L_x^-1 L_y^-1)(y + x) on an
    odd-order left Bruck loop."""
    n = B.n
    if n % 2 == 0:
        raise UnsupportedStructureError("gamma correspondence needs odd order")
    t = B.table
    tinv = np.empty_like(t)
    rng = np.arange(n, dtype=DTYPE)
    for x in range(n):
        tinv[x, t[x]] = rng              # tinv[x] is L_x^-1
    out = np.empty((n, n), dtype=DTYPE)
    for x in range(n):
        lx, lxi = t[x], tinv[x]
        for y in range(n):
            comm = lx[t[y][lxi[tinv[y]]]]    # L_x L_y L_x^-1 L_y^-1
            out[x, y] = _sqrt_image(comm.tolist(), int(t[y, x]))
    gamma = LoopTable(out)
    if not gamma.is_gamma_loop():
        raise InternalConsistencyError("conversion did not produce a "
                                       "gamma-loop")
    return gamma


def gamma_to_bruck(G):
    """Bruck sum x + y = sqrt(x^-1 \\ (y^2 x)) on an odd-order gamma-loop."""
    n = G.n
    if n % 2 == 0:
        raise UnsupportedStructureError("gamma correspondence needs odd order")
    if not G.is_gamma_loop():
        raise UnsupportedStructureError("input is not a gamma-loop")
    t = G.table
    ld = G.ldiv
    inv = G.inverses()
    out = np.empty((n, n), dtype=DTYPE)
    for y in range(n):
        y2 = int(t[y, y])
        for x in range(n):
            z = int(ld[inv[x], t[y2, x]])
            out[x, y] = element_sqrt(G, z)
    bruck = LoopTable(out)
    if not bruck.is_left_bruck():
        raise InternalConsistencyError("conversion did not produce a left "
                                       "Bruck loop")
    return bruck
