import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diophlab.core import PrimVec, Wedge2, pvec, wedge
from diophlab.latinv import (
    Invariants,
    companion_pair,
    distortion_below,
    invariants,
    lattice_minima,
    pair_basis,
    pair_in_lattice,
    reduced_basis,
    scan_minima,
    wedge_constraint_ok,
    wedge_from_pair,
)


def brute_minima_box(v):
    """Third route: plain box enumeration, no reduction, no class walk.

    Only usable for small heights; returns (L, Hhat) wedge triples.
    """
    # sup norm of the second minimum is at most max over the pair basis
    b1, b2 = pair_basis(v)
    bound = max(abs(c) for b in (b1, b2) for c in b)
    pts = []
    for x in range(-bound, bound + 1):
        for y in range(-bound, bound + 1):
            if (x, y) == (0, 0) or not pair_in_lattice(v, x, y):
                continue
            if y < 0 or (y == 0 and x < 0):
                continue  # one representative per +- class
            pts.append((max(abs(x), abs(y)), x * x + y * y, y, x))
    pts.sort()
    L = (pts[0][3], pts[0][2])
    H = next((p[3], p[2]) for p in pts if L[0] * p[2] - L[1] * p[3] != 0)
    return wedge_from_pair(v, *L), wedge_from_pair(v, *H)


def test_unit_lattice_minima():
    L, H = lattice_minima(pvec(0, 0, 1))
    assert L.as_tuple() == (0, 1, 0)
    assert H.as_tuple() == (0, 0, 1)


def test_basis_example_unit():
    basis = reduced_basis(pvec(0, 0, 1))
    assert basis.b1.as_tuple() == (0, 1, 0)
    assert basis.b2.as_tuple() == (0, 0, 1)
    assert abs(basis.pair_det) == 1
    assert basis.covolume == 1


def test_skew_node_minima():
    v = pvec(0, 1, 520)
    L, H = lattice_minima(v)
    assert L.as_tuple() == (0, 0, 1)
    assert H.as_tuple() == (1, 520, 0)
    basis = reduced_basis(v)
    assert abs(basis.pair_det) == 520
    assert basis.covolume == Fraction(1, 520)


def test_diagonal_node_second_minimum_half_covolume():
    # Under the sup norm the product |Hhat| * |L| can be half the height:
    # ((1,1),520) has L at pair (1,1) and Hhat at pair (-260,260).  The
    # Euclidean-geometry bound |Hhat| >= |v|/|L| does not survive the sup
    # norm here, which is why growth audits follow the axis-type nodes.
    inv = invariants(pvec(1, 1, 520))
    assert inv.absL == 1
    assert inv.L.as_tuple() == (0, 1, 1)
    assert inv.absLhat == 260
    assert inv.absLhat * inv.absL * 2 == inv.v.q


def test_slow_seed_minima():
    inv = invariants(pvec(67, 1, 1000))
    assert inv.L.as_tuple() == (-1, 5, 15)
    assert inv.absL == 15
    assert inv.Lhat.as_tuple() == (-3, -52, 44)
    assert inv.eps3 == Fraction(225, 1000)
    assert inv.exp3tau == Fraction(10 ** 6, 15)
    assert abs(inv.tau - math.log(10 ** 6 / 15) / 3) < 1e-12


def test_invariants_unit():
    inv = invariants(pvec(0, 0, 1))
    assert inv.absL == 1
    assert inv.eps3 == 1
    assert inv.exp3tau == 1
    assert inv.eps == 1.0
    assert inv.tau == 0.0
    assert inv.delta == 1.0


def test_invariants_psi_output_window():
    # a child with unit wedge at height 520: eps^{3/2} = 1/sqrt(520), so
    # 1/16 < eps < 1/8 (the half-open distortion window at eps = 1/8)
    inv = invariants(pvec(0, 1, 520))
    assert inv.eps3 == Fraction(1, 520)
    assert Fraction(1, 8) ** 3 > inv.eps3 > Fraction(1, 16) ** 3
    assert distortion_below(pvec(0, 1, 520), Fraction(1, 8))
    assert not distortion_below(pvec(0, 1, 520), Fraction(1, 16))


def test_distortion_strictness():
    assert distortion_below(pvec(0, 0, 1), Fraction(2))
    assert not distortion_below(pvec(0, 0, 1), Fraction(1))


def test_second_minimum_sandwich_on_chain_nodes():
    # |v|/|L| <= |Hhat| <= (1+eps(v)^3) |v|/|L| and |Hhat|^2 > eps^-3 |v|,
    # exact, on the axis-type chain nodes inside the 1/8 distortion class.
    eps = Fraction(1, 8)
    for v in (pvec(0, 1, 520), pvec(1, 266260, 138455200)):
        inv = invariants(v)
        lo = Fraction(v.q, inv.absL)
        assert lo <= inv.absLhat <= (1 + inv.eps3) * lo
        assert inv.absLhat ** 2 * eps ** 3 > v.q


def test_companion_pair_unit():
    v = pvec(0, 0, 1)
    up, um = companion_pair(v, Wedge2(0, 1, 0))
    assert up.as_tuple() == (1, 0, 1)
    assert um.as_tuple() == (-1, 0, 1)
    # equal heights: the doubled-sum branch
    assert up.q == um.q == v.q


def test_companion_pair_split():
    v = pvec(1, 1, 2)
    L = wedge(pvec(1, 0, 1), v)
    assert L.as_tuple() == (1, 1, -1)
    up, um = companion_pair(v, L)
    assert up.as_tuple() == (1, 0, 1)
    assert um.as_tuple() == (0, 1, 1)
    assert (up.p1 + um.p1, up.p2 + um.p2, up.q + um.q) == v.as_tuple()


def test_companion_pair_rejects_bad_wedge():
    with pytest.raises(ValueError):
        companion_pair(pvec(1, 1, 2), Wedge2(0, 1, 0))


def random_primvec(rng, hmax):
    while True:
        q = rng.randrange(1, hmax + 1)
        p1 = rng.randrange(-q, q + 1)
        p2 = rng.randrange(-q, q + 1)
        if math.gcd(math.gcd(abs(p1), abs(p2)), q) == 1:
            return pvec(p1, p2, q)


def test_minima_match_box_bruteforce():
    rng = random.Random(7)
    for _ in range(120):
        v = random_primvec(rng, 90)
        L, H = lattice_minima(v)
        Lb, Hb = brute_minima_box(v)
        assert L.pair == Lb.pair, v
        assert H.pair == Hb.pair, v


def test_minima_match_class_scan():
    rng = random.Random(8)
    for _ in range(200):
        v = random_primvec(rng, 10 ** 4)
        L, H = lattice_minima(v)
        Ls, Hs = scan_minima(v)
        assert L.as_tuple() == Ls.as_tuple(), v
        assert H.as_tuple() == Hs.as_tuple(), v


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 400), st.integers(-400, 400), st.integers(-400, 400))
def test_minima_routes_agree(q, p1, p2):
    if math.gcd(math.gcd(abs(p1), abs(p2)), q) != 1:
        return
    v = pvec(p1, p2, q)
    assert lattice_minima(v) == scan_minima(v)


def test_minima_basic_shape():
    rng = random.Random(9)
    for _ in range(300):
        v = random_primvec(rng, 10 ** 6)
        inv = invariants(v)
        L, H = inv.L, inv.Lhat
        # wedge-image membership and primitivity
        assert wedge_constraint_ok(L, v) and wedge_constraint_ok(H, v)
        assert math.gcd(math.gcd(abs(L.m12), abs(L.m13)), abs(L.m23)) == 1
        assert math.gcd(math.gcd(abs(H.m12), abs(H.m13)), abs(H.m23)) == 1
        assert inv.absL <= inv.absLhat
        # sup-norm Minkowski: |L|^2 <= |v| (measured constant is exactly 1)
        assert inv.absL ** 2 <= v.q
        # Euclidean distortion strictly below 2: |L|_E^2 < 2|v| exactly
        assert L.m13 ** 2 + L.m23 ** 2 < 2 * v.q
        # the companions of L sit at heights within (0, |v|]
        up, um = companion_pair(v, L)
        assert 0 < up.q <= v.q and 0 < um.q <= v.q


def test_minkowski_equality_attained():
    assert invariants(pvec(0, 0, 1)).absL ** 2 == 1
