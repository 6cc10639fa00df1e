from fractions import Fraction
from itertools import product

import pytest

from kfan.cones import (
    Cone,
    ConeNotInFan,
    DomainNotOpen,
    Fan,
    NotAFan,
    NotStronglyConvex,
    Subfan,
    UnsupportedRank,
    primitive,
    zero_cone,
)
from kfan.intlinalg import IntMatrix, Lattice, dot, in_row_span

Z1, Z2, Z3 = Lattice(1), Lattice(2), Lattice(3)


def in_cone_q(rays, v):
    """Oracle: is v a nonnegative *rational* combination of the rays?
    Solved exactly with Fractions by Gaussian elimination on the
    (dim <= 2 sufficient here) generator matrix, falling back to a
    coarse grid search for more generators."""
    rays = [r for r in rays]
    if not rays:
        return all(x == 0 for x in v)
    if len(rays) == 2 and len(v) == 2:
        (a, c), (b, d) = rays
        det = a * d - b * c
        if det != 0:
            s = Fraction(v[0] * d - b * v[1], det)
            t = Fraction(a * v[1] - v[0] * c, det)
            return s >= 0 and t >= 0
    # grid fallback: coefficients in k/8 for k = 0..80
    coeffs = [Fraction(k, 8) for k in range(81)]
    if len(rays) == 1:
        return any(all(c * r == x for r, x in zip(rays[0], v)) for c in coeffs)
    raise NotImplementedError


def test_quadrant_is_self_dual():
    c = Cone.from_rays(Z2, [(1, 0), (0, 1)])
    assert c.rays == ((0, 1), (1, 0))
    assert c.facets == ((0, 1), (1, 0))
    assert c.dim == 2


def test_skew_cone_facets_against_box_oracle():
    rays = [(1, 0), (1, 2)]
    c = Cone.from_rays(Z2, rays)
    assert set(c.facets) == {(0, 1), (2, -1)}
    for v in product(range(-5, 6), repeat=2):
        in_by_facets = all(dot(u, v) >= 0 for u in c.facets)
        assert in_by_facets == in_cone_q(rays, v)


def test_line_is_rejected():
    with pytest.raises(NotStronglyConvex):
        Cone.from_rays(Z2, [(1, 0), (-1, 0)])
    with pytest.raises(NotStronglyConvex):
        Cone.from_rays(Z2, [(1, 0), (0, 1), (-1, -1)])


def test_nonextreme_rays_are_reduced():
    c = Cone.from_rays(Z2, [(1, 0), (1, 1), (0, 1), (2, 6)])
    assert c.rays == ((0, 1), (1, 0))


def test_rays_are_primitivized():
    c = Cone.from_rays(Z2, [(2, 0), (0, 3)])
    assert c.rays == ((0, 1), (1, 0))


def test_dual_of_quadrant():
    c = Cone.from_rays(Z2, [(1, 0), (0, 1)])
    assert c.dual().rays == c.rays


def test_dual_of_skew_cone():
    c = Cone.from_rays(Z2, [(1, 0), (1, 2)])
    d = c.dual()
    assert set(d.rays) == {(0, 1), (2, -1)}
    assert set(d.facets) == {(1, 0), (1, 2)}


def test_dual_of_zero_cone_is_everything():
    c = zero_cone(Z2)
    d = c.dual()
    assert not d.pointed
    assert set(d.rays) == {(1, 0), (-1, 0), (0, 1), (0, -1)}
    for v in product(range(-2, 3), repeat=2):
        assert d.contains(v)


def test_dual_of_ray_is_halfplane():
    c = Cone.from_rays(Z2, [(1, 0)])
    d = c.dual()
    for v in product(range(-3, 4), repeat=2):
        assert d.contains(v) == (v[0] >= 0)


CORPUS_CONES = [
    (Z2, [(1, 0), (0, 1)]),
    (Z2, [(1, 0)]),
    (Z2, [(1, 0), (1, 2)]),
    (Z2, [(1, 0), (1, 3)]),
    (Z2, []),
    (Z3, [(0, 0, 1), (1, 0, 1), (0, 1, 1), (1, 1, 1)]),
    (Z3, [(1, 0, 0), (0, 1, 0), (0, 0, 1)]),
    (Z3, [(1, 0, 0), (1, 2, 0), (1, 0, 2), (1, 2, 2)]),
]


@pytest.mark.parametrize("lattice,rays", CORPUS_CONES)
def test_double_dual_is_identity(lattice, rays):
    c = Cone.from_rays(lattice, rays)
    assert c.dual().dual().rays == c.rays


@pytest.mark.parametrize("lattice,rays", CORPUS_CONES)
def test_dim_plus_perp_rank(lattice, rays):
    c = Cone.from_rays(lattice, rays)
    assert c.dim + c.perp_lattice().nrows == lattice.rank


def test_faces_of_quadrant():
    c = Cone.from_rays(Z2, [(1, 0), (0, 1)])
    fs = c.faces()
    assert len(fs) == 4
    assert zero_cone(Z2) in fs
    assert c in fs
    assert Cone.from_rays(Z2, [(1, 0)]) in fs


def test_faces_of_ray():
    c = Cone.from_rays(Z2, [(1, 0)])
    assert len(c.faces()) == 2


def test_faces_of_cone_over_square():
    # 1 zero + 4 rays + 4 two-dim + itself = 10
    c = Cone.from_rays(Z3, [(0, 0, 1), (1, 0, 1), (0, 1, 1), (1, 1, 1)])
    fs = c.faces()
    assert len(fs) == 10
    by_dim = {}
    for f in fs:
        by_dim[f.dim] = by_dim.get(f.dim, 0) + 1
    assert by_dim == {0: 1, 1: 4, 2: 4, 3: 1}


@pytest.mark.parametrize("lattice,rays", CORPUS_CONES)
def test_face_transitivity(lattice, rays):
    c = Cone.from_rays(lattice, rays)
    fs = c.faces()
    for tau in fs:
        for rho in tau.faces():
            assert rho.is_face(c)


def test_perp_lattice_of_zero_cone():
    c = zero_cone(Z2)
    p = c.perp_lattice()
    assert p.nrows == 2


def test_perp_lattice_of_ray_against_kernel_oracle():
    c = Cone.from_rays(Z2, [(1, 0)])
    p = c.perp_lattice()
    assert p.nrows == 1
    # oracle: every functional in a box vanishing on the ray lies in the span
    for u in product(range(-3, 4), repeat=2):
        if u[0] * 1 + u[1] * 0 == 0:
            assert in_row_span(p, u)
    assert in_row_span(IntMatrix([(0, 1)]), p.row(0))


def test_perp_lattice_of_fulldim_cone():
    c = Cone.from_rays(Z2, [(1, 0), (1, 2)])
    assert c.perp_lattice().nrows == 0


def test_character_quotient_ranks():
    assert zero_cone(Z2).character_quotient().coords_len == 0
    assert Cone.from_rays(Z2, [(1, 0)]).character_quotient().free_rank == 1
    assert Cone.from_rays(Z2, [(1, 0), (0, 1)]).character_quotient().free_rank == 2
    assert Cone.from_rays(Z2, [(1, 0), (1, 2)]).character_quotient().free_rank == 2


def test_smoothness():
    assert Cone.from_rays(Z2, [(1, 0), (0, 1)]).is_smooth()
    skew = Cone.from_rays(Z2, [(1, 0), (1, 2)])
    assert skew.is_simplicial() and not skew.is_smooth()
    square = Cone.from_rays(Z3, [(0, 0, 1), (1, 0, 1), (0, 1, 1), (1, 1, 1)])
    assert not square.is_simplicial() and not square.is_smooth()
    assert zero_cone(Z3).is_smooth()
    assert Cone.from_rays(Z3, [(1, 0, 0), (0, 1, 0)]).is_smooth()


# ---------------------------------------------------------------------------
# fans


def p1_fan():
    return Fan.from_rays_and_indices(Z1, [(1,), (-1,)], [[0], [1]])


def p2_fan():
    return Fan.from_rays_and_indices(
        Z2, [(1, 0), (0, 1), (-1, -1)], [[0, 1], [1, 2], [2, 0]]
    )


def test_p1_fan_has_three_cones():
    f = p1_fan()
    assert len(f.cones) == 3
    assert len(f.max_cones) == 2


def test_p2_fan_has_seven_cones():
    f = p2_fan()
    assert len(f.cones) == 7
    dims = sorted(c.dim for c in f.cones)
    assert dims == [0, 1, 1, 1, 2, 2, 2]


def test_overlapping_cones_are_not_a_fan():
    # oracle: (2,1) = 2*(1,0)+1*(0,1) and = 3/2*(1,1)+1/2*(1,-1) lies in
    # both cones, but their intersection <(1,0),(1,1)> is a face of neither
    q = Cone.from_rays(Z2, [(1, 0), (0, 1)])
    w = Cone.from_rays(Z2, [(1, 1), (1, -1)])
    assert q.contains((2, 1)) and w.contains((2, 1))
    with pytest.raises(NotAFan) as ei:
        Fan.from_max_cones(Z2, [q, w])
    assert ei.value.pair == (0, 1)


def test_fan_drops_redundant_face_cones():
    q = Cone.from_rays(Z2, [(1, 0), (0, 1)])
    r = Cone.from_rays(Z2, [(1, 0)])
    f = Fan.from_max_cones(Z2, [q, r])
    assert f.max_cones == (q,)


def test_empty_fan_is_the_zero_cone():
    f = Fan.from_max_cones(Z2, [])
    assert len(f.cones) == 1
    assert f.max_cones == (zero_cone(Z2),)


def test_star_open():
    f = p2_fan()
    sigma = f.max_cones[0]
    star = f.star_open(sigma)
    assert star.members == frozenset(f.faces_of(sigma))
    with pytest.raises(ConeNotInFan):
        f.star_open(Cone.from_rays(Z2, [(3, 1)]))


def test_subfan_must_be_downward_closed():
    f = p2_fan()
    sigma = f.max_cones[0]
    with pytest.raises(DomainNotOpen):
        Subfan(f, [sigma])


def test_subfans_closed_under_union_and_intersection():
    f = p2_fan()
    stars = [f.star_open(c) for c in f.max_cones]
    for a in stars:
        for b in stars:
            u = a.union(b)
            i = a.intersection(b)
            assert all(set(f.faces_of(c)) <= u.members for c in u.members)
            assert all(set(f.faces_of(c)) <= i.members for c in i.members)


def test_is_complete():
    assert p1_fan().is_complete()
    assert p2_fan().is_complete()
    affine = Fan.from_max_cones(Z2, [Cone.from_rays(Z2, [(1, 0), (0, 1)])])
    assert not affine.is_complete()


def test_is_complete_rank_cap():
    f = Fan.from_max_cones(
        Lattice(4), [Cone.from_rays(Lattice(4), [(1, 0, 0, 0)])]
    )
    with pytest.raises(UnsupportedRank):
        f.is_complete()


def test_fan_face_relation_transitive():
    f = p2_fan()
    for sigma in f.cones:
        for tau in f.faces_of(sigma):
            for rho in f.faces_of(tau):
                assert f.is_face(rho, sigma)


def test_fan_smoothness():
    assert p2_fan().is_smooth()
    skew = Cone.from_rays(Z2, [(1, 0), (1, 2)])
    f = Fan.from_max_cones(Z2, [skew])
    assert not f.is_smooth()


def test_primitive():
    assert primitive((2, 4)) == (1, 2)
    assert primitive((0, 0)) is None
    assert primitive((-3, 6)) == (-1, 2)


# ---------------------------------------------------------------------------
# randomized cross-checks


def _rational_solve_cols(cols, v):
    """Exact solution c of sum c_j cols_j = v over Q, or None."""
    n, k = len(v), len(cols)
    aug = [
        [Fraction(cols[j][i]) for j in range(k)] + [Fraction(v[i])]
        for i in range(n)
    ]
    row = 0
    pivots = []
    for col in range(k):
        p = next((r for r in range(row, n) if aug[r][col] != 0), None)
        if p is None:
            continue
        aug[row], aug[p] = aug[p], aug[row]
        aug[row] = [x / aug[row][col] for x in aug[row]]
        for r in range(n):
            if r != row and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[row])]
        pivots.append(col)
        row += 1
    for r in range(row, n):
        if aug[r][k] != 0:
            return None
    coeffs = [Fraction(0)] * k
    for r, col in enumerate(pivots):
        coeffs[col] = aug[r][k]
    for i in range(n):
        if sum(c * cols[j][i] for j, c in enumerate(coeffs)) != v[i]:
            return None
    return coeffs


def in_cone_caratheodory(rays, v, dim):
    """Oracle: v is a nonnegative rational combination of the rays iff
    it is one of at most dim of them (Caratheodory for cones)."""
    from itertools import combinations

    if all(x == 0 for x in v):
        return True
    for size in range(1, dim + 1):
        for subset in combinations(rays, size):
            c = _rational_solve_cols(list(subset), v)
            if c is not None and all(x >= 0 for x in c):
                return True
    return False


def test_fuzz_3d_facets_against_caratheodory_oracle():
    import random

    rng = random.Random(909)
    built = 0
    while built < 10:
        rays = [
            tuple(rng.randint(-3, 3) for _ in range(3))
            for _ in range(rng.randint(3, 5))
        ]
        try:
            c = Cone.from_rays(Z3, rays)
        except (NotStronglyConvex, ValueError):
            continue
        built += 1
        good_rays = [r for r in (primitive(r) for r in rays) if r]
        for v in product(range(-2, 3), repeat=3):
            assert c.contains(v) == in_cone_caratheodory(good_rays, v, 3), (
                rays,
                v,
            )


def _angular_sort(rays):
    from functools import cmp_to_key

    def half(v):
        return 0 if (v[1] > 0 or (v[1] == 0 and v[0] > 0)) else 1

    def cmp(a, b):
        if half(a) != half(b):
            return half(a) - half(b)
        cr = a[0] * b[1] - a[1] * b[0]
        return -1 if cr > 0 else (1 if cr < 0 else 0)

    return sorted(rays, key=cmp_to_key(cmp))


def test_fuzz_random_complete_2d_fans():
    import random

    rng = random.Random(4242)
    for _ in range(10):
        rays = {(1, 0), (0, 1), (-1, -1)}
        for _ in range(rng.randint(0, 4)):
            p = primitive((rng.randint(-4, 4), rng.randint(-4, 4)))
            if p:
                rays.add(p)
        ordered = _angular_sort(rays)
        cones = [
            Cone.from_rays(Z2, [ordered[i], ordered[(i + 1) % len(ordered)]])
            for i in range(len(ordered))
        ]
        fan = Fan.from_max_cones(Z2, cones)
        assert fan.is_complete()
        assert len(fan.max_cones) == len(ordered)
        assert fan.is_smooth() == all(c.is_smooth() for c in fan.max_cones)
        # topology sanity on a random pair of stars
        a = fan.star_open(fan.max_cones[0])
        b = fan.star_open(fan.max_cones[rng.randrange(len(fan.max_cones))])
        u = a.union(b)
        assert all(set(fan.faces_of(c)) <= u.members for c in u.members)
