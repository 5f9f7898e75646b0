"""Automorphism groups and the Aut(F) x Aut(Z_p) action on cocycles.

The action theta -> beta^-1 theta(alpha x, alpha y) permutes cocycle
cosets modulo coboundaries; classifying extensions only needs one
representative per orbit. Orbits are enumerated by BFS in coordinates
of a complement of the coboundary space, where the induced action is
linear, and the chosen representative is the lexicographically least
canonical coset form in the orbit.
"""

from __future__ import annotations

import numpy as np

from .cocycles import Cocycle
from .errors import InternalConsistencyError, RefusalError
from .gf import complement_basis, is_subspace, reduce_mod
from .iso import all_automorphisms
from .tables import identity_perm, inverse_perm

DEFAULT_COSET_LIMIT = 10 ** 8


class AutGroup:
    """The automorphism group of a loop: full element list (the order
    certificate), plus a small generating set used for orbit searches."""

    __slots__ = ("n", "elements", "generators", "order")

    def __init__(self, loop, elements):
        self.n = loop.n
        elements = sorted(elements, key=lambda p: p.tobytes())
        for p in elements:
            if not loop.is_automorphism(p):
                raise ValueError("non-automorphism in element list")
        self.elements = elements
        self.order = len(elements)
        self.generators = _generating_set(elements, self.n)
        if _closure_size(self.generators, self.n) != self.order:
            raise InternalConsistencyError(
                "generators do not reproduce the group order")

    def __repr__(self):
        return f"AutGroup(n={self.n}, order={self.order})"


def _generating_set(elements, n):
    ident = identity_perm(n).tobytes()
    have = {ident}
    gens = []
    for p in elements:
        if p.tobytes() in have:
            continue
        gens.append(p)
        have = _close(gens, n)
        if len(have) == len(elements):
            break
    return gens


def _close(gens, n):
    seen = {identity_perm(n).tobytes()}
    frontier = [identity_perm(n)]
    while frontier:
        new = []
        for q in frontier:
            for g in gens:
                r = g[q]
                key = r.tobytes()
                if key not in seen:
                    seen.add(key)
                    new.append(r)
        frontier = new
    return seen


def _closure_size(gens, n):
    return len(_close(gens, n))


def automorphism_group(Q):
    """The full automorphism group, by partition-refinement backtracking."""
    return AutGroup(Q, all_automorphisms(Q))


def automorphism_group_bruteforce(Q):
    """Exhaustive scan over identity-fixing bijections; only sensible for
    tiny loops (n <= 9). Cross-validation path for the search."""
    from itertools import permutations
    if Q.n > 9:
        raise ValueError("brute force limited to n <= 9")
    found = []
    for rest in permutations(range(1, Q.n)):
        p = np.array((0,) + rest, dtype=np.int16)
        if Q.is_automorphism(p):
            found.append(p)
    return AutGroup(Q, found)


# ---------------------------------------------------------------------------
# the action on cocycles

def act(theta, alpha, beta, factor=None):
    """theta^(alpha,beta)(x,y) = beta^-1 theta(alpha x, alpha y).

    If the factor loop is supplied, alpha is checked to be one of its
    automorphisms. The extension of the result is isomorphic to the
    extension of theta via (x, a) -> (alpha x, beta a).
    """
    p = theta.p
    beta = int(beta) % p
    if beta == 0:
        raise ValueError("beta must be a unit of GF(p)")
    alpha = np.asarray(alpha)
    if alpha.shape != (theta.n,):
        raise ValueError("alpha has the wrong size")
    if factor is not None and not factor.is_automorphism(alpha):
        raise ValueError("alpha is not an automorphism of the factor")
    beta_inv = pow(beta, p - 2, p)
    entries = (beta_inv * theta.entries[alpha][:, alpha].astype(np.int64)) % p
    return Cocycle(entries, p)


def _act_on_flat(vec, n, p, alpha, beta_inv):
    mat = vec.reshape(n, n)
    return ((beta_inv * mat[alpha][:, alpha].astype(np.int64)) % p).reshape(-1)


def _primitive_root(p):
    for g in range(2, p):
        x, seen = 1, 0
        for _ in range(p - 1):
            x = x * g % p
            seen += 1
            if x == 1:
                break
        if seen == p - 1:
            return g
    return 1


def orbit_decomposition(space, sub, group, p, coset_limit=DEFAULT_COSET_LIMIT):
    """Representatives and sizes of the orbits of Aut(F) x GF(p)^* on the
    coset space rowspace(space)/rowspace(sub).

    Refuses (RefusalError) when the coset count exceeds coset_limit.
    """
    if not is_subspace(sub, space):
        raise ValueError("sub is not a subspace of space")
    n2 = space.ncols
    n = int(round(n2 ** 0.5))
    if n * n != n2:
        raise ValueError("space does not consist of flattened cocycles")
    d = space.dim - sub.dim
    total = p ** d
    if total > coset_limit:
        raise RefusalError(
            f"{p}^{d} = {total} cosets exceed the limit {coset_limit}")

    gens = [(g, 1) for g in group.generators]
    root = _primitive_root(p)
    if root != 1:
        gens.append((identity_perm(n), root))

    # the action must fix both spaces setwise
    for alpha, beta in gens:
        beta_inv = pow(beta, p - 2, p)
        for basis in (sub, space):
            if basis.dim == 0:
                continue
            imgs = np.stack([_act_on_flat(r, n, p, alpha, beta_inv)
                             for r in basis.rows])
            if reduce_mod(imgs, basis).any():
                raise ValueError("the action does not preserve the "
                                 "cocycle spaces")

    w = complement_basis(space, sub)
    if d == 0:
        return [Cocycle.zero(n, p)], [1]

    # matrix of each generator in complement coordinates
    wrows = w.rows.astype(np.int64)
    mats = []
    for alpha, beta in gens:
        beta_inv = pow(beta, p - 2, p)
        imgs = np.stack([_act_on_flat(r, n, p, alpha, beta_inv)
                         for r in w.rows])
        canon = reduce_mod(imgs, sub)
        coords = canon[:, w.pivots].astype(np.int64)
        if ((coords @ wrows) % p != canon).any():
            raise InternalConsistencyError(
                "canonical forms left the complement space")
        mats.append(coords)

    powers = p ** np.arange(d - 1, -1, -1, dtype=np.int64)
    visited = np.zeros(total, dtype=bool)
    reps = []
    sizes = []
    scan = 0
    while True:
        off = int(np.argmin(visited[scan:])) if scan < total else 0
        scan0 = scan + off
        if scan0 >= total or visited[scan0]:
            break
        scan = scan0
        seed = scan
        # decode the seed; scanning in increasing code order makes the seed
        # the lexicographic minimum of its orbit
        digits = np.empty(d, dtype=np.int64)
        v = seed
        for i in range(d - 1, -1, -1):
            digits[i] = v % p
            v //= p
        visited[seed] = True
        frontier = digits.reshape(1, d)
        size = 0
        while len(frontier):
            size += len(frontier)
            nxt = []
            for m in mats:
                imgs = (frontier @ m) % p
                codes = imgs @ powers
                fresh = ~visited[codes]
                if fresh.any():
                    codes = codes[fresh]
                    imgs = imgs[fresh]
                    codes, idx = np.unique(codes, return_index=True)
                    visited[codes] = True
                    nxt.append(imgs[idx])
            frontier = np.concatenate(nxt) if nxt else np.empty((0, d),
                                                                dtype=np.int64)
        vec = (digits @ wrows) % p
        reps.append(Cocycle.from_vector(vec, n, p))
        sizes.append(size)
    if sum(sizes) != total:
        raise InternalConsistencyError("orbit sizes do not add up to the "
                                       "coset count")
    return reps, sizes


def orbit_representatives(space, sub, group, p,
                          coset_limit=DEFAULT_COSET_LIMIT):
    """One canonical cocycle per orbit of the action on the coset space."""
    return orbit_decomposition(space, sub, group, p, coset_limit)[0]
