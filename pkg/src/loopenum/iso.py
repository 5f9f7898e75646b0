"""Isomorphism testing for loops and quandles.

Element invariants partition a loop into blocks any isomorphism must
preserve; a loop fingerprint is the sorted multiset of those invariants
and pre-partitions collections of loops so that explicit searches only
run inside matching buckets. The search itself is backtracking over
images constrained to matching invariant cells, with closure propagation
through already-determined products.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass

import numpy as np

from .tables import LoopTable, QuandleTable, cycle_structure

# buckets larger than this get the quadratic associator invariant as well
I5_BUCKET_THRESHOLD = 8


# ---------------------------------------------------------------------------
# element invariants

@dataclass(frozen=True)
class ElementInvariant:
    """Per-element isomorphism invariants of a loop element.

    i1: cycle structure of the left translation
    i2: element order
    i3: preimage counts under y -> y^2, y^3, y^4
    i4: order -> #{y : x(xy) = (xx)y and |y| = order}
    i5: (a, b) -> #{(y, z) : y(zx) = (yz)x, |y| = a, |z| = b} (optional)
    i6: order -> #{y : xy = yx and |y| = order}
    """

    i1: tuple
    i2: int
    i3: tuple
    i4: tuple
    i6: tuple
    i5: tuple | None = None

    def key(self):
        return (self.i1, self.i2, self.i3, self.i4, self.i6,
                self.i5 if self.i5 is not None else ())


def _count_by_order(orders, mask):
    counted = np.bincount(orders[mask])
    return tuple((int(a), int(c)) for a, c in enumerate(counted) if c)


def _power_maps(Q):
    n = Q.n
    rng = np.arange(n)
    sq = Q.table[rng, rng]
    cube = Q.table[rng, sq]
    fourth = Q.table[rng, cube]
    return sq, cube, fourth


def element_invariant(Q, x, with_i5=False):
    """The invariant tuple of one element (computed by exhaustive scans)."""
    orders = Q.orders()
    sq, cube, fourth = _power_maps(Q)
    return _element_invariant(Q, x, orders, sq, cube, fourth, with_i5)


def _element_invariant(Q, x, orders, sq, cube, fourth, with_i5):
    t = Q.table
    i1 = cycle_structure(t[x])
    i2 = int(orders[x])
    i3 = (int((sq == x).sum()), int((cube == x).sum()),
          int((fourth == x).sum()))
    lalt = t[x][t[x]] == t[t[x, x]]          # x(xy) = (xx)y
    i4 = _count_by_order(orders, lalt)
    comm = t[x] == t[:, x]                   # xy = yx
    i6 = _count_by_order(orders, comm)
    i5 = None
    if with_i5:
        colx = t[:, x]
        assoc = t[:, colx] == colx[t]        # y(zx) = (yz)x, indexed [y, z]
        pairs = orders[:, None] * (int(orders.max()) + 1) + orders[None, :]
        counted = np.bincount(pairs[assoc])
        k = int(orders.max()) + 1
        i5 = tuple((int(v // k), int(v % k), int(c))
                   for v, c in enumerate(counted) if c)
    return ElementInvariant(i1, i2, i3, i4, i6, i5)


def element_invariants(Q, with_i5=False):
    """Invariants of all elements, as a list indexed by element."""
    orders = Q.orders()
    sq, cube, fourth = _power_maps(Q)
    return [_element_invariant(Q, x, orders, sq, cube, fourth, with_i5)
            for x in range(Q.n)]


# ---------------------------------------------------------------------------
# loop fingerprints

@dataclass(frozen=True)
class LoopFingerprint:
    """Order, center size and the sorted multiset of element invariants."""

    order: int
    center_size: int
    invariants: tuple          # sorted tuple of ElementInvariant keys
    has_i5: bool

    def serialize(self):
        """Canonical byte encoding: 'LFP1', order and center size as
        big-endian u32, then the invariant multiset rendered as a nested
        structure with counts in big-endian u32."""
        out = [b"LFP1", struct.pack(">II", self.order, self.center_size),
               b"\x01" if self.has_i5 else b"\x00"]
        _pack(self.invariants, out)
        return b"".join(out)

    def hash(self):
        return hashlib.sha256(self.serialize()).hexdigest()


def _pack(obj, out):
    if isinstance(obj, tuple):
        out.append(b"T" + struct.pack(">I", len(obj)))
        for item in obj:
            _pack(item, out)
    elif isinstance(obj, (int, np.integer)):
        out.append(b"I" + struct.pack(">q", int(obj)))
    else:
        raise TypeError(f"cannot serialize {type(obj)!r}")


def loop_fingerprint(Q, with_i5=False):
    cached = Q._fingerprint_i5 if with_i5 else Q._fingerprint
    if cached is not None:
        return cached
    invs = element_invariants(Q, with_i5=with_i5)
    fp = LoopFingerprint(Q.n, len(Q.center()),
                         tuple(sorted(inv.key() for inv in invs)),
                         with_i5)
    if with_i5:
        Q._fingerprint_i5 = fp
    else:
        Q._fingerprint = fp
    return fp


# ---------------------------------------------------------------------------
# backtracking search

def _search(t1, t2, candidates, seed_pairs, find_all=False):
    """Find bijections f with f(x*y) = f(x)*f(y), constrained to
    f(x) in candidates[x], extending seed_pairs.

    Tables are nested int lists; candidates is a list of candidate-image
    lists. Returns a list of image arrays (all solutions if find_all).
    """
    n = len(t1)
    img = [-1] * n
    used = [False] * n
    known = []
    trail = []
    solutions = []

    def assign(x, y):
        # returns False on conflict; all assignments are recorded on trail
        queue = [(x, y)]
        qi = 0
        while qi < len(queue):
            a, b = queue[qi]
            qi += 1
            if img[a] != -1:
                if img[a] != b:
                    return False
                continue
            if used[b]:
                return False
            img[a] = b
            used[b] = True
            trail.append(a)
            row_a, col_b = t1[a], t2[b]
            # close under products with everything already determined
            for c in known:
                ic = img[c]
                queue.append((row_a[c], col_b[ic]))
                queue.append((t1[c][a], t2[ic][b]))
            queue.append((row_a[a], col_b[b]))
            known.append(a)
        return True

    def undo(mark):
        while len(trail) > mark:
            a = trail.pop()
            used[img[a]] = False
            img[a] = -1
            known.pop()

    for x, y in seed_pairs:
        if not assign(x, y):
            return []

    order = sorted(range(n), key=lambda x: (len(candidates[x]), x))

    def dfs():
        x = -1
        for e in order:
            if img[e] == -1:
                x = e
                break
        if x == -1:
            solutions.append(np.array(img, dtype=np.int16))
            return not find_all
        for y in candidates[x]:
            if used[y]:
                continue
            mark = len(trail)
            if assign(x, y):
                if dfs():
                    return True
            undo(mark)
        return False

    dfs()
    return solutions


def _invariant_keys(Q):
    if Q._invkeys is None:
        Q._invkeys = [inv.key() for inv in element_invariants(Q)]
    return Q._invkeys


def _loop_candidates(Q1, Q2):
    keys1 = _invariant_keys(Q1)
    keys2 = _invariant_keys(Q2)
    cells = {}
    for y, k in enumerate(keys2):
        cells.setdefault(k, []).append(y)
    return [cells.get(k, []) for k in keys1]


def are_isomorphic(Q1, Q2):
    """An explicit isomorphism (image array) between the loops, or None.

    Any returned permutation is fully verified against both tables.
    """
    if Q1.n != Q2.n:
        return None
    if loop_fingerprint(Q1) != loop_fingerprint(Q2):
        return None
    candidates = _loop_candidates(Q1, Q2)
    if any(len(c) == 0 for c in candidates):
        return None
    found = _search(Q1.table.tolist(), Q2.table.tolist(), candidates,
                    seed_pairs=[(0, 0)])
    if not found:
        return None
    phi = found[0]
    if not _verify_isomorphism(Q1, Q2, phi):
        raise AssertionError("search returned a non-isomorphism")
    return phi


def _verify_isomorphism(Q1, Q2, phi):
    return bool((phi[Q1.table] == Q2.table[np.ix_(phi, phi)]).all())


def all_automorphisms(Q):
    """Every automorphism of the loop, found by invariant-constrained
    backtracking; deterministic order."""
    candidates = _loop_candidates(Q, Q)
    t = Q.table.tolist()
    sols = _search(t, t, candidates, seed_pairs=[(0, 0)], find_all=True)
    sols.sort(key=lambda p: p.tobytes())
    return sols


# ---------------------------------------------------------------------------
# filtering collections up to isomorphism

def filter_indices_up_to_iso(loops):
    """Indices of one representative per isomorphism class (first
    occurrence, input order preserved) plus the number of pairwise
    isomorphism checks performed.

    Candidates are bucketed by fingerprint; buckets still larger than
    I5_BUCKET_THRESHOLD are re-bucketed with the quadratic invariant
    before any pairwise checks run.
    """
    base_keys = [loop_fingerprint(q).hash() for q in loops]
    sizes = {}
    for key in base_keys:
        sizes[key] = sizes.get(key, 0) + 1
    kept = []
    kept_by_bucket = {}
    checks = 0
    for i, (q, key) in enumerate(zip(loops, base_keys)):
        if sizes[key] > I5_BUCKET_THRESHOLD:
            key = (key, loop_fingerprint(q, with_i5=True).hash())
        reps = kept_by_bucket.setdefault(key, [])
        duplicate = False
        for _, rep in reps:
            checks += 1
            if are_isomorphic(q, rep) is not None:
                duplicate = True
                break
        if not duplicate:
            reps.append((i, q))
            kept.append(i)
    return kept, checks


def filter_up_to_iso_with_stats(loops):
    """One representative per isomorphism class; returns (kept, checks)."""
    kept_idx, checks = filter_indices_up_to_iso(loops)
    return [loops[i] for i in kept_idx], checks


def filter_up_to_iso(loops):
    return filter_up_to_iso_with_stats(loops)[0]


# ---------------------------------------------------------------------------
# quandle isomorphism

def quandle_element_invariants(Q):
    """Identity-free invariants: cycle structure of L_x, the associator
    profile count and the commuting count."""
    t = Q.table
    out = []
    for x in range(Q.n):
        i1 = cycle_structure(t[x])
        colx = t[:, x]
        assoc = int((t[:, colx] == colx[t]).sum())
        comm = int((t[x] == t[:, x]).sum())
        out.append((i1, assoc, comm))
    return out


def are_isomorphic_quandles(Q1, Q2):
    """Explicit quandle isomorphism or None; the search does not pin any
    base point since quandles have no identity."""
    if Q1.n != Q2.n:
        return None
    keys1 = quandle_element_invariants(Q1)
    keys2 = quandle_element_invariants(Q2)
    if sorted(keys1) != sorted(keys2):
        return None
    cells = {}
    for y, k in enumerate(keys2):
        cells.setdefault(k, []).append(y)
    candidates = [cells.get(k, []) for k in keys1]
    if any(len(c) == 0 for c in candidates):
        return None
    found = _search(Q1.table.tolist(), Q2.table.tolist(), candidates,
                    seed_pairs=[])
    if not found:
        return None
    phi = found[0]
    if not bool((phi[Q1.table] == Q2.table[np.ix_(phi, phi)]).all()):
        raise AssertionError("search returned a non-isomorphism")
    return phi
