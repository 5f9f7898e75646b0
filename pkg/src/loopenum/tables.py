"""Finite loops and quandles as Cayley tables over element indices.

Conventions used everywhere in the package:

* elements of an order-n structure are the indices 0..n-1;
* for loops, element 0 is the two-sided identity;
* a permutation is an int array ``p`` with ``p[i]`` the image of ``i``;
* composition is ``compose(p, q)(i) = p[q[i]]``, i.e. q first.
"""

from __future__ import annotations

import numpy as np

from .errors import NonPowerAssociativeError, UnsupportedStructureError

DTYPE = np.int16


# ---------------------------------------------------------------------------
# permutations

def identity_perm(n):
    return np.arange(n, dtype=DTYPE)


def compose(p, q):
    """Permutation p applied after q."""
    return p[q]


def inverse_perm(p):
    inv = np.empty_like(p)
    inv[p] = np.arange(len(p), dtype=p.dtype)
    return inv


def is_permutation(p, n):
    p = np.asarray(p)
    if p.shape != (n,):
        return False
    seen = np.zeros(n, dtype=bool)
    valid = (p >= 0) & (p < n)
    if not valid.all():
        return False
    seen[p] = True
    return bool(seen.all())


def cycle_structure(p):
    """Sorted tuple of cycle lengths (fixed points included)."""
    n = len(p)
    seen = [False] * n
    lengths = []
    pl = p.tolist()
    for i in range(n):
        if seen[i]:
            continue
        ln = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = pl[j]
            ln += 1
        lengths.append(ln)
    lengths.sort()
    return tuple(lengths)


def perm_order(p):
    order = 1
    for ln in set(cycle_structure(p)):
        order = order * ln // np.gcd(order, ln)
    return int(order)


def perm_power(p, k):
    """p composed with itself k times (k >= 0)."""
    n = len(p)
    result = identity_perm(n)
    base = p
    while k:
        if k & 1:
            result = base[result]
        base = base[base]
        k >>= 1
    return result


# ---------------------------------------------------------------------------
# loops

class LoopTable:
    """A finite loop given by its n x n Cayley table, identity at index 0."""

    __slots__ = ("n", "table", "_ldiv", "_rdiv", "_inv", "_orders", "_center",
                 "_fingerprint", "_fingerprint_i5", "_invkeys")

    def __init__(self, table, validate=True):
        table = np.ascontiguousarray(np.asarray(table, dtype=DTYPE))
        if table.ndim != 2 or table.shape[0] != table.shape[1]:
            raise ValueError("Cayley table must be square")
        n = table.shape[0]
        if n == 0:
            raise ValueError("empty table")
        if validate:
            rng = np.arange(n, dtype=DTYPE)
            if (table < 0).any() or (table >= n).any():
                raise ValueError("table entries out of range")
            if not (np.sort(table, axis=1) == rng).all():
                raise ValueError("some row is not a permutation")
            if not (np.sort(table, axis=0) == rng[:, None]).all():
                raise ValueError("some column is not a permutation")
            if not (table[0] == rng).all() or not (table[:, 0] == rng).all():
                raise ValueError("element 0 is not a two-sided identity")
        table.setflags(write=False)
        self.n = n
        self.table = table
        self._ldiv = None
        self._rdiv = None
        self._inv = None
        self._orders = None
        self._center = None
        self._fingerprint = None
        self._fingerprint_i5 = None
        self._invkeys = None

    # -- basic structure ---------------------------------------------------

    def __eq__(self, other):
        return (isinstance(other, LoopTable) and self.n == other.n
                and np.array_equal(self.table, other.table))

    def __ne__(self, other):
        return not self.__eq__(other)

    def __hash__(self):
        return hash((self.n, self.table.tobytes()))

    def __repr__(self):
        return f"LoopTable(n={self.n})"

    def mul(self, x, y):
        return int(self.table[x, y])

    def left_translation(self, x):
        if not 0 <= x < self.n:
            raise ValueError(f"element {x} out of range")
        return self.table[x].copy()

    def right_translation(self, x):
        if not 0 <= x < self.n:
            raise ValueError(f"element {x} out of range")
        return self.table[:, x].copy()

    @property
    def ldiv(self):
        """ldiv[x][y] is the unique z with x*z = y."""
        if self._ldiv is None:
            ld = np.empty_like(self.table)
            rng = np.arange(self.n, dtype=DTYPE)
            for x in range(self.n):
                ld[x, self.table[x]] = rng
            ld.setflags(write=False)
            self._ldiv = ld
        return self._ldiv

    @property
    def rdiv(self):
        """rdiv[y][x] is the unique z with z*x = y."""
        if self._rdiv is None:
            rd = np.empty_like(self.table)
            rng = np.arange(self.n, dtype=DTYPE)
            for x in range(self.n):
                rd[self.table[:, x], x] = rng
            rd.setflags(write=False)
            self._rdiv = rd
        return self._rdiv

    def left_divide(self, x, y):
        """The unique z with x*z = y."""
        return int(self.ldiv[x, y])

    def right_divide(self, y, x):
        """The unique z with z*x = y."""
        return int(self.rdiv[y, x])

    # -- inverses and powers -------------------------------------------------

    def inverses(self):
        """Array of two-sided inverses; UnsupportedStructureError if any
        element lacks one."""
        if self._inv is None:
            left = self.ldiv[:, 0]        # x * left[x] = 0
            right = self.rdiv[0, :]       # right[x] * x = 0
            if not (left == right).all():
                bad = int(np.nonzero(left != right)[0][0])
                raise UnsupportedStructureError(
                    f"element {bad} has no two-sided inverse")
            left = left.copy()
            left.setflags(write=False)
            self._inv = left
        return self._inv

    def has_two_sided_inverses(self):
        try:
            self.inverses()
            return True
        except UnsupportedStructureError:
            return False

    def element_order(self, x):
        """Least m >= 1 with the left power x^m equal to the identity."""
        if not 0 <= x < self.n:
            raise ValueError(f"element {x} out of range")
        acc = 0
        for m in range(1, self.n + 1):
            acc = int(self.table[x, acc])
            if acc == 0:
                return m
        raise NonPowerAssociativeError(
            f"left powers of {x} do not reach the identity within n steps")

    def orders(self):
        """Vector of left-power orders of all elements."""
        if self._orders is None:
            n = self.n
            rng = np.arange(n)
            acc = np.zeros(n, dtype=DTYPE)
            out = np.zeros(n, dtype=np.int32)
            for m in range(1, n + 1):
                acc = self.table[rng, acc]
                hit = (acc == 0) & (out == 0)
                out[hit] = m
                if (out > 0).all():
                    break
            if (out == 0).any():
                bad = int(np.nonzero(out == 0)[0][0])
                raise NonPowerAssociativeError(
                    f"left powers of {bad} do not reach the identity")
            out.setflags(write=False)
            self._orders = out
        return self._orders

    def left_power(self, x, m):
        """Left-iterated power x^m, m >= 0, with x^(m+1) = x * x^m."""
        acc = 0
        for _ in range(m):
            acc = int(self.table[x, acc])
        return acc

    def exponent(self):
        exp = 1
        for m in set(self.orders().tolist()):
            exp = exp * m // np.gcd(exp, m)
        return int(exp)

    def check_power_associative(self):
        """Verify x^a * x^b = x^(a+b) for all x and 0 <= a,b <= |x|.

        Debug/test guard; left powers are used throughout and this checks
        they behave like powers in a cyclic group.
        """
        for x in range(self.n):
            m = self.element_order(x)
            powers = [0]
            for _ in range(2 * m):
                powers.append(int(self.table[x, powers[-1]]))
            for a in range(m + 1):
                for b in range(m + 1):
                    if int(self.table[powers[a], powers[b]]) != powers[a + b]:
                        return False
        return True

    # -- variety predicates --------------------------------------------------

    def is_commutative(self):
        return bool((self.table == self.table.T).all())

    def is_associative(self):
        t = self.table
        for x in range(self.n):
            # (x*y)*z vs x*(y*z) for all y, z
            if not (t[t[x]] == t[x][t]).all():
                return False
        return True

    def is_left_bol(self):
        """x(y(xz)) = (x(yx))z for all x, y, z."""
        t = self.table
        for x in range(self.n):
            tx = t[x]
            for y in range(self.n):
                lhs = tx[t[y][tx]]
                rhs = t[tx[t[y, x]]]
                if not (lhs == rhs).all():
                    return False
        return True

    def has_automorphic_inverse_property(self):
        """(xy)^-1 = x^-1 y^-1 for all x, y."""
        inv = self.inverses()
        lhs = inv[self.table]
        rhs = self.table[np.ix_(inv, inv)]
        return bool((lhs == rhs).all())

    def is_left_bruck(self):
        try:
            aip = self.has_automorphic_inverse_property()
        except UnsupportedStructureError:
            return False
        return aip and self.is_left_bol()

    def inner_mapping(self, kind, x, y=None):
        """Inner mapping generators: T_x, L_{x,y} or R_{x,y}.

        T_x = L_x^-1 R_x, L_{x,y} = L_{yx}^-1 L_y L_x,
        R_{x,y} = R_{xy}^-1 R_y R_x.
        """
        t = self.table
        if not 0 <= x < self.n:
            raise ValueError(f"element {x} out of range")
        if kind == "T":
            return self.ldiv[x][t[:, x]]
        if y is None:
            raise ValueError(f"inner mapping kind {kind!r} needs two elements")
        if not 0 <= y < self.n:
            raise ValueError(f"element {y} out of range")
        if kind == "L":
            return self.ldiv[t[y, x]][t[y][t[x]]]
        if kind == "R":
            # z -> ((z*x)*y) / (x*y)
            return self.rdiv[t[t[:, x], y], t[x, y]]
        raise ValueError(f"unknown inner mapping kind {kind!r}")

    def is_automorphism(self, p):
        """Does the permutation p preserve the table (and fix 0)?"""
        if p[0] != 0:
            return False
        return bool((p[self.table] == self.table[np.ix_(p, p)]).all())

    def is_left_automorphic(self):
        """L_{x,y} is an automorphism for all x, y."""
        t = self.table
        ld = self.ldiv
        for x in range(self.n):
            tx = t[x]
            for y in range(self.n):
                p = ld[t[y, x]][t[y][tx]]
                if not (p[t] == t[np.ix_(p, p)]).all():
                    return False
        return True

    def is_automorphic(self):
        """All inner mappings T_x, L_{x,y}, R_{x,y} are automorphisms."""
        t = self.table
        for x in range(self.n):
            if not self.is_automorphism(self.inner_mapping("T", x)):
                return False
        if not self.is_left_automorphic():
            return False
        for x in range(self.n):
            for y in range(self.n):
                p = self.rdiv[t[t[:, x], y], t[x, y]]
                if not (p[t] == t[np.ix_(p, p)]).all():
                    return False
        return True

    def is_gamma_loop(self):
        """Commutative AIP loop with L_x L_{x^-1} = L_{x^-1} L_x and
        P_x P_y P_x = P_{P_x(y)} for P_x = L_{x^-1}^-1 R_x."""
        if not self.is_commutative():
            raise UnsupportedStructureError("gamma-loop test needs a "
                                            "commutative loop")
        inv = self.inverses()  # raises UnsupportedStructureError if missing
        if not self.has_automorphic_inverse_property():
            return False
        t = self.table
        ld = self.ldiv
        n = self.n
        for x in range(n):
            xi = inv[x]
            if not (t[x][t[xi]] == t[xi][t[x]]).all():
                return False
        # P_x = L_{x^-1}^-1 R_x, as rows of a matrix
        P = np.empty_like(t)
        for x in range(n):
            P[x] = ld[inv[x]][t[:, x]]
        for x in range(n):
            px = P[x]
            for y in range(n):
                if not (px[P[y][px]] == P[px[y]]).all():
                    return False
        return True

    # -- center and quotients ------------------------------------------------

    def center(self):
        """Sorted array of elements fixed by every inner mapping."""
        if self._center is None:
            t = self.table
            n = self.n
            mask = (t == t.T).all(axis=1)            # T_y(x) = x for all y
            candidates = np.nonzero(mask)[0]
            keep = []
            for x in candidates:
                colx = t[:, x]
                rowx = t[x]
                # L_{y,z}(x) = x for all y,z:  z(yx) = (zy)x
                if not (t[:, colx] == colx[t]).all():
                    continue
                # R_{y,z}(x) = x for all y,z:  (xy)z = x(yz)
                if not (t[rowx] == rowx[t]).all():
                    continue
                keep.append(int(x))
            center = np.array(sorted(keep), dtype=DTYPE)
            center.setflags(write=False)
            self._center = center
        return self._center

    def central_subloops_of_order_p(self, p):
        """All p-element subgroups of the center, each as a sorted tuple
        containing 0. Empty list if p does not divide |Z(Q)|."""
        center = self.center()
        if len(center) % p != 0:
            return []
        subs = set()
        for x in center:
            x = int(x)
            if x == 0:
                continue
            if self.element_order(x) != p:
                continue
            sub = [0]
            acc = 0
            for _ in range(p - 1):
                acc = int(self.table[x, acc])
                sub.append(acc)
            subs.add(tuple(sorted(sub)))
        return sorted(subs)

    def quotient(self, Z):
        """Quotient loop by a central subloop Z (relabelled so the identity
        coset is 0 and cosets are ordered by their least element)."""
        Z = sorted(int(z) for z in Z)
        if 0 not in Z:
            raise ValueError("central subloop must contain the identity")
        zset = set(Z)
        center = set(self.center().tolist())
        if not zset <= center:
            raise ValueError("subloop is not contained in the center")
        for a in Z:
            for b in Z:
                if int(self.table[a, b]) not in zset:
                    raise ValueError("subloop is not closed under products")
        n = self.n
        k = len(Z)
        if n % k != 0:
            raise ValueError("subloop size does not divide the loop order")
        # coset of x is {x*z : z in Z}; label by least member
        coset_min = np.full(n, -1, dtype=np.int64)
        for x in range(n):
            members = self.table[x, Z]
            coset_min[x] = members.min()
        reps = np.unique(coset_min)
        if len(reps) != n // k:
            raise ValueError("cosets do not partition the loop")
        index_of = {int(r): i for i, r in enumerate(reps)}
        cid = np.array([index_of[int(c)] for c in coset_min], dtype=DTYPE)
        # well-definedness: coset of x*y must only depend on (cid x, cid y)
        prod = cid[self.table]
        qt = prod[np.ix_(reps, reps)]
        if not (prod == qt[np.ix_(cid, cid)]).all():
            raise ValueError("coset products depend on representatives")
        return LoopTable(qt)

    def direct_product(self, other):
        return direct_product(self, other)


def direct_product(q1, q2):
    """Componentwise product on pairs, (x1,x2) encoded as x1*n2 + x2."""
    n1, n2 = q1.n, q2.n
    t = (q1.table[:, None, :, None].astype(np.int64) * n2
         + q2.table[None, :, None, :])
    return LoopTable(t.reshape(n1 * n2, n1 * n2))


# ---------------------------------------------------------------------------
# quandles

class QuandleTable:
    """An involutory latin quandle as an n x n Cayley table.

    Invariants checked on construction: left translations are involutive
    bijections, the table is idempotent, left distributive and latin.
    """

    __slots__ = ("n", "table")

    def __init__(self, table, validate=True):
        table = np.ascontiguousarray(np.asarray(table, dtype=DTYPE))
        if table.ndim != 2 or table.shape[0] != table.shape[1]:
            raise ValueError("Cayley table must be square")
        n = table.shape[0]
        if validate:
            rng = np.arange(n, dtype=DTYPE)
            if (table < 0).any() or (table >= n).any():
                raise ValueError("table entries out of range")
            if not (np.sort(table, axis=1) == rng).all():
                raise ValueError("some row is not a permutation")
            if not (np.sort(table, axis=0) == rng[:, None]).all():
                raise ValueError("not latin: some column is not a permutation")
            if not (np.diagonal(table) == rng).all():
                raise ValueError("not idempotent")
            for x in range(n):
                row = table[x]
                if not (row[row] == rng).all():
                    raise ValueError("not involutory: L_x^2 != id")
                if not (row[table] == table[np.ix_(row, row)]).all():
                    raise ValueError("not left distributive")
        table.setflags(write=False)
        self.n = n
        self.table = table

    def __eq__(self, other):
        return (isinstance(other, QuandleTable) and self.n == other.n
                and np.array_equal(self.table, other.table))

    def __ne__(self, other):
        return not self.__eq__(other)

    def __hash__(self):
        return hash((self.n, self.table.tobytes()))

    def __repr__(self):
        return f"QuandleTable(n={self.n})"

    def mul(self, x, y):
        return int(self.table[x, y])

    def left_translation(self, x):
        if not 0 <= x < self.n:
            raise ValueError(f"element {x} out of range")
        return self.table[x].copy()

    def left_divide(self, x, y):
        """Unique z with x*z = y; equals x*y for involutory quandles."""
        return int(self.table[x, y])

    def right_divide(self, y, x):
        """Unique z with z*x = y; needs the latin property."""
        col = self.table[:, x]
        z = np.nonzero(col == y)[0]
        if len(z) != 1:
            raise UnsupportedStructureError("column is not a permutation")
        return int(z[0])


# ---------------------------------------------------------------------------
# constructors

def cyclic_group(n):
    """Addition table of Z_n."""
    rng = np.arange(n)
    return LoopTable((rng[:, None] + rng[None, :]) % n)


def abelian_group(*invariants):
    """Direct product of cyclic groups Z_{n1} x ... x Z_{nk}."""
    if not invariants:
        raise ValueError("need at least one cyclic factor")
    q = cyclic_group(invariants[0])
    for m in invariants[1:]:
        q = direct_product(q, cyclic_group(m))
    return q


def elementary_abelian(p, k):
    return abelian_group(*([p] * k))


def dihedral_quandle(n):
    """Core of Z_n: x*y = 2x - y mod n; involutory, latin for odd n."""
    rng = np.arange(n)
    return QuandleTable((2 * rng[:, None] - rng[None, :]) % n)


def loop_from_function(n, fn):
    t = [[fn(x, y) for y in range(n)] for x in range(n)]
    return LoopTable(t)
