import numpy as np
import pytest

from loopenum import PreconditionError, abelian_group, cyclic_group, \
    elementary_abelian
from loopenum.cocycles import (
    Cocycle,
    Variety,
    check_in_variety,
    coboundary,
    coboundary_space,
    extension,
    shift_by_coboundary,
    variety_cocycle_space,
    variety_equation_chunks,
)
from loopenum.gf import is_subspace, reduce_mod
from loopenum.iso import are_isomorphic


def brute_nullity(chunks, ncols, p):
    """Independent oracle: dense all-at-once elimination in plain python."""
    rows = []
    for ch in chunks:
        rows.extend(ch.toarray().tolist())
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(rows)) if rows[i][c] % p), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = pow(rows[r][c] % p, p - 2, p)
        rows[r] = [(v * inv) % p for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] % p:
                f = rows[i][c] % p
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], rows[r])]
        r += 1
    return ncols - r


def random_normalized_cocycle(rng, n, p):
    mat = np.zeros((n, n), dtype=int)
    mat[1:, 1:] = rng.integers(0, p, (n - 1, n - 1))
    return Cocycle(mat, p)


# ---------------------------------------------------------------------------
# cocycle type

def test_cocycle_requires_normalization():
    with pytest.raises(ValueError):
        Cocycle(np.ones((3, 3), dtype=int), 3)
    Cocycle.zero(3, 3)


def test_cocycle_vector_round_trip():
    rng = np.random.default_rng(0)
    th = random_normalized_cocycle(rng, 4, 3)
    again = Cocycle.from_vector(th.vector(), 4, 3)
    assert again == th


# ---------------------------------------------------------------------------
# coboundaries

def test_coboundary_formula():
    f = cyclic_group(9)
    rng = np.random.default_rng(1)
    tau = rng.integers(0, 3, 9)
    tau[0] = 0
    hat = coboundary(f, tau, 3)
    for x in range(9):
        for y in range(9):
            want = (tau[f.mul(x, y)] - tau[x] - tau[y]) % 3
            assert hat.entries[x, y] == want


def test_coboundary_space_dimensions():
    assert coboundary_space(cyclic_group(3), 3).dim == 1
    assert coboundary_space(elementary_abelian(3, 2), 3).dim == 6
    assert coboundary_space(cyclic_group(9), 3).dim == 7


def test_coboundary_space_normalized_rows():
    b = coboundary_space(cyclic_group(9), 3)
    for row in b.rows:
        mat = row.reshape(9, 9)
        assert not mat[0].any() and not mat[:, 0].any()


def test_coboundary_space_spans_coboundaries():
    f = elementary_abelian(3, 2)
    b = coboundary_space(f, 3)
    rng = np.random.default_rng(2)
    for _ in range(10):
        tau = rng.integers(0, 3, 9)
        tau[0] = 0
        hat = coboundary(f, tau, 3)
        assert not reduce_mod(hat.vector(), b).any()


# ---------------------------------------------------------------------------
# variety systems

def test_equation_counts_match_formula():
    f = cyclic_group(9)
    total = sum(ch.shape[0]
                for ch in variety_equation_chunks(f, 3, Variety.BRUCK))
    assert total == 2 * 9 + 9 ** 2 + 9 ** 3
    total = sum(ch.shape[0] for ch in
                variety_equation_chunks(f, 3, Variety.COMM_AUTOMORPHIC))
    assert total == 2 * 9 + 9 ** 2 + 9 ** 4


def test_bruck_space_dimensions():
    assert variety_cocycle_space(cyclic_group(3), 3, Variety.BRUCK).dim == 2
    assert variety_cocycle_space(elementary_abelian(3, 2), 3,
                                 Variety.BRUCK).dim == 10
    assert variety_cocycle_space(cyclic_group(9), 3, Variety.BRUCK).dim == 8


def test_bruck_space_z3_against_brute_oracle():
    f = cyclic_group(3)
    nullity = brute_nullity(variety_equation_chunks(f, 3, Variety.BRUCK),
                            9, 3)
    assert nullity == 2
    assert variety_cocycle_space(f, 3, Variety.BRUCK).dim == nullity


def test_ca_space_z9_against_brute_oracle():
    f = cyclic_group(9)
    nullity = brute_nullity(
        variety_equation_chunks(f, 3, Variety.COMM_AUTOMORPHIC), 81, 3)
    assert variety_cocycle_space(f, 3, Variety.COMM_AUTOMORPHIC).dim \
        == nullity


def test_coboundaries_inside_variety_space():
    for f in (cyclic_group(3), cyclic_group(9), elementary_abelian(3, 2)):
        b = coboundary_space(f, 3)
        for variety in (Variety.BRUCK, Variety.COMM_AUTOMORPHIC):
            c = variety_cocycle_space(f, 3, variety)
            assert is_subspace(b, c)


def test_variety_space_rows_are_normalized():
    c = variety_cocycle_space(cyclic_group(9), 3, Variety.BRUCK)
    for row in c.rows:
        mat = row.reshape(9, 9)
        assert not mat[0].any() and not mat[:, 0].any()


def test_inverse_symmetry_implied_by_bruck_system():
    # theta(x, x^-1) = theta(x^-1, x) holds for every basis vector even
    # though the equations are never generated
    for f in (cyclic_group(9), elementary_abelian(3, 2)):
        inv = f.inverses()
        c = variety_cocycle_space(f, 3, Variety.BRUCK)
        for row in c.rows:
            mat = row.reshape(f.n, f.n)
            for x in range(f.n):
                assert mat[x, inv[x]] == mat[inv[x], x]


def test_precondition_errors_name_the_identity():
    import itertools
    from loopenum import LoopTable
    elems = sorted(itertools.permutations(range(3)))
    index = {e: i for i, e in enumerate(elems)}
    t = [[index[tuple(a[b[k]] for k in range(3))] for b in elems]
         for a in elems]
    s3 = LoopTable(np.array(t))
    with pytest.raises(PreconditionError, match="inverse"):
        check_in_variety(s3, Variety.BRUCK)
    with pytest.raises(PreconditionError, match="commutativity"):
        check_in_variety(s3, Variety.COMM_AUTOMORPHIC)
    with pytest.raises(PreconditionError):
        variety_cocycle_space(s3, 3, Variety.BRUCK)


# ---------------------------------------------------------------------------
# extensions

def test_extension_zero_cocycle_is_direct_product():
    from loopenum import direct_product
    f = cyclic_group(3)
    q = extension(f, 3, Cocycle.zero(3, 3))
    assert q == direct_product(f, cyclic_group(3))


def test_extension_carry_cocycle_is_z9():
    carry = np.zeros((3, 3), dtype=int)
    for x in range(1, 3):
        for y in range(1, 3):
            if x + y >= 3:
                carry[x, y] = 1
    q = extension(cyclic_group(3), 3, Cocycle(carry, 3))
    assert q.is_associative()
    assert int(q.orders().max()) == 9


def test_extension_division_identity():
    # (x,a) \ (y,b) = (x \ y, b - a - theta(x, x\y))
    f = cyclic_group(9)
    c = variety_cocycle_space(f, 3, Variety.BRUCK)
    rng = np.random.default_rng(3)
    coeff = rng.integers(0, 3, c.dim)
    th = Cocycle.from_vector((coeff @ c.rows.astype(np.int64)) % 3, 9, 3)
    q = extension(f, 3, th)
    for _ in range(50):
        x, y = rng.integers(0, 9, 2)
        a, b = rng.integers(0, 3, 2)
        lhs = q.left_divide(x * 3 + a, y * 3 + b)
        xy = f.left_divide(x, y)
        rhs = xy * 3 + (b - a - int(th.entries[x, xy])) % 3
        assert lhs == rhs


def test_extension_kernel_is_central_and_quotient_is_factor():
    f = elementary_abelian(3, 2)
    c = variety_cocycle_space(f, 3, Variety.BRUCK)
    rng = np.random.default_rng(4)
    for _ in range(5):
        coeff = rng.integers(0, 3, c.dim)
        th = Cocycle.from_vector((coeff @ c.rows.astype(np.int64)) % 3, 9, 3)
        q = extension(f, 3, th)
        assert {0, 1, 2} <= set(q.center().tolist())
        assert q.quotient([0, 1, 2]) == f


def test_extension_rejects_mismatched_sizes():
    with pytest.raises(ValueError):
        extension(cyclic_group(3), 3, Cocycle.zero(4, 3))
    with pytest.raises(ValueError):
        extension(cyclic_group(3), 5, Cocycle.zero(3, 3))


# ---------------------------------------------------------------------------
# coboundary shifts

def test_shift_by_zero_is_identity():
    f = cyclic_group(9)
    th = Cocycle.zero(9, 3)
    assert shift_by_coboundary(f, th, np.zeros(9, dtype=int)) == th


def test_shift_of_zero_gives_isomorphic_direct_product():
    from loopenum import direct_product
    f = cyclic_group(9)
    rng = np.random.default_rng(5)
    tau = rng.integers(0, 3, 9)
    tau[0] = 0
    shifted = shift_by_coboundary(f, Cocycle.zero(9, 3), tau)
    q1 = extension(f, 3, shifted)
    q0 = direct_product(f, cyclic_group(3))
    # the explicit isomorphism (x, a) -> (x, a + tau(x)) maps the
    # unshifted extension onto the shifted one
    phi = np.array([x * 3 + (a + tau[x]) % 3
                    for x in range(9) for a in range(3)])
    assert (phi[q0.table] == q1.table[np.ix_(phi, phi)]).all()


def test_shift_keeps_extension_isomorphic():
    f = cyclic_group(9)
    c = variety_cocycle_space(f, 3, Variety.BRUCK)
    rng = np.random.default_rng(6)
    for _ in range(3):
        coeff = rng.integers(0, 3, c.dim)
        th = Cocycle.from_vector((coeff @ c.rows.astype(np.int64)) % 3, 9, 3)
        tau = rng.integers(0, 3, 9)
        tau[0] = 0
        shifted = shift_by_coboundary(f, th, tau)
        assert are_isomorphic(extension(f, 3, th),
                              extension(f, 3, shifted)) is not None


def test_shift_requires_vanishing_at_identity():
    f = cyclic_group(3)
    tau = np.array([1, 0, 0])
    with pytest.raises(ValueError):
        shift_by_coboundary(f, Cocycle.zero(3, 3), tau)


# ---------------------------------------------------------------------------
# the iff property at small scale (full version in acceptance)

def test_bruck_space_membership_iff_extension_is_bruck():
    f = cyclic_group(3)
    c = variety_cocycle_space(f, 3, Variety.BRUCK)
    for row in c.rows:
        th = Cocycle.from_vector(row, 3, 3)
        assert extension(f, 3, th).is_left_bruck()
    rng = np.random.default_rng(7)
    found = 0
    while found < 10:
        th = random_normalized_cocycle(rng, 3, 3)
        if not reduce_mod(th.vector(), c).any():
            continue
        found += 1
        assert not extension(f, 3, th).is_left_bruck()
