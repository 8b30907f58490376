import cmath
import math
import random

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from tce_dynamics.iet import CapExceeded, IetSpec, first_hitting, iet_apply
from tce_dynamics.numeric import PHI
from tce_dynamics.tce import (
    TceParams,
    F_apply,
    boundary_distance,
    classify,
    conjugacy_check,
    hat_F_spec,
    hitting_time,
    in_reduction_region,
    iterate_batch,
    orbit,
    return_map,
    return_map_batch,
    return_map_via_interval,
)

SWAP = TceParams((0.5, math.pi - 2.5), (2, 1), PHI, 1 - PHI)
THREE = TceParams((0.4, 0.9, 0.7), (3, 1, 2), PHI, PHI ** 3)

angles = st.floats(min_value=1e-6, max_value=math.pi - 1e-6)
radii = st.floats(min_value=1e-3, max_value=50)


def polar(r, a):
    return r * complex(math.cos(a), math.sin(a))


def test_derived_quantities():
    p = SWAP
    assert p.d == 2
    assert p.beta == pytest.approx(1.0, abs=1e-15)
    assert p.nu == pytest.approx(math.tan(1.0))
    assert p.theta == pytest.approx((math.pi - 2.5, -0.5))
    lo, hi = p.cone_interval(1)
    assert (lo, hi) == pytest.approx((1.0, 1.5))
    assert p.cone_interval(0)[0] == 0 and p.cone_interval(3)[1] == math.pi


def test_classify_conventions():
    p = SWAP
    c, s = p.bdirs[0]
    assert classify(p, complex(c, s)) == 1           # arg = beta is in cone 1
    c, s = p.bdirs[1]
    assert classify(p, complex(c, s)) == 1           # arg = beta + a_1 still in cone 1
    c, s = p.bdirs[2]
    assert classify(p, complex(c, s)) == 2           # arg = pi - beta closes cone d
    assert classify(p, 1 + 0j) == 0
    assert classify(p, -1 + 0j) == 3
    with pytest.raises(ValueError):
        classify(p, 0j)
    with pytest.raises(ValueError):
        classify(p, 1 - 1j)


@given(radii, angles)
def test_classify_matches_angle(r, a):
    p = THREE
    edges = (0.0,) + p.bangles + (math.pi,)
    assume(all(abs(a - e) > 1e-9 for e in edges))
    j = sum(1 for b in p.bangles if a > b)
    assert classify(p, polar(r, a)) == j


def test_F_examples():
    p = SWAP
    assert F_apply(p, 10 + 0.1j) == (9 + 0.1j, 0)
    w, s = F_apply(p, -10 + 0.1j)
    assert s == 3 and w == pytest.approx(-10 + float(PHI) + 0.1j)
    r = 2.0
    z = r * cmath.exp(1j * (p.beta + 0.25))
    w, s = F_apply(p, z)
    assert s == 1
    assert w == pytest.approx(r * cmath.exp(1j * (p.beta + 0.25 + p.alpha[1])) - float(1 - PHI))


@given(radii, angles)
def test_rotation_and_circle_exchange(r, a):
    p = THREE
    z = polar(r, a)
    j = classify(p, z)
    assume(1 <= j <= p.d and boundary_distance(p, z) > 1e-9 * r)
    w = z * p.rot[j - 1]
    assert abs(abs(w) - abs(z)) <= 1e-13 * abs(z)
    inner = IetSpec(p.alpha, p.tau)
    expect = p.beta + iet_apply(inner, cmath.phase(z) - p.beta)
    assert cmath.phase(w) == pytest.approx(expect, abs=1e-12)
    assert cmath.phase(w) == pytest.approx(iet_apply(hat_F_spec(p), cmath.phase(z)), abs=1e-12)


@given(radii, angles)
def test_outer_cones_keep_height(r, a):
    for p in (SWAP, THREE):
        z = polar(r, a)
        j = classify(p, z)
        if j in (0, p.d + 1):
            assert F_apply(p, z)[0].imag == z.imag


def test_hat_F():
    spec = hat_F_spec(SWAP)
    assert spec.perm == (1, 3, 2, 4)
    assert math.fsum(spec.lengths) == pytest.approx(math.pi, abs=1e-15)
    ident = TceParams((0.5, 0.5), (1, 2), PHI, PHI ** 2)
    assert hat_F_spec(ident).translations == (0, 0, 0, 0)


def test_validation():
    with pytest.raises(ValueError):
        TceParams((2.0, 1.2), (2, 1), PHI, PHI ** 2)
    with pytest.raises(ValueError):
        TceParams((0.5, 0.5), (2, 1), PHI ** 2, PHI)
    with pytest.raises(ValueError):
        TceParams((0.5, 0.5), (2, 2), PHI, PHI ** 2)
    with pytest.raises(ValueError):
        TceParams((0.5, -0.1), (2, 1), PHI, PHI ** 2)
    with pytest.raises(ValueError):
        TceParams((0.5, 0.5, 0.5), (2, 1, 3), PHI, PHI ** 2, require_irreducible=True)
    TceParams((0.5, 0.5, 0.5), (2, 1, 3), PHI, PHI ** 2)


def test_hitting_time_trivial():
    p = SWAP
    # a point well inside cone 1 whose image sits in a middle cone
    z = 3 * cmath.exp(1j * 1.2)
    w, _ = F_apply(p, z)
    assert 1 <= classify(p, w) <= p.d
    assert hitting_time(p, z) == 1
    assert return_map(p, z).point == pytest.approx(w, abs=1e-14)


def test_orbit_far_right():
    pts = orbit(SWAP, 40.3 + 0.2j, 50)
    syms = [s for _, s in pts]
    assert len(pts) == 51
    run = next(i for i, s in enumerate(syms) if s != 0)
    assert abs(run - 40.3) < 2
    for (w, s) in pts:
        assert classify(SWAP, w) == s


def test_reduction_region_examples():
    p = SWAP
    z = 0.3 + 0.05j
    assert in_reduction_region(p, z)
    assert conjugacy_check(p, z, 0) <= 1e-15  # only the s, s^-1 round trip
    assert conjugacy_check(p, z, 200) < 1e-12
    with pytest.raises(ValueError):
        conjugacy_check(p, 1j, 3)


def test_conjugacy_random():
    rng = random.Random(1)
    p = SWAP
    cb = p.cot_beta
    count = 0
    while count < 200:
        y = rng.uniform(1e-4, 0.3)
        t = rng.uniform(-1, float(PHI))
        z = complex(t - y * cb, y)
        if not in_reduction_region(p, z):
            continue
        count += 1
        assert conjugacy_check(p, z, 10 ** 4) < 1e-10


def test_via_interval_matches_direct():
    rng = random.Random(2)
    p = SWAP
    checked = 0
    while checked < 300:
        z = polar(rng.uniform(0.01, 0.6), rng.uniform(p.beta, math.pi - p.beta))
        if boundary_distance(p, z) < 1e-6:
            continue
        w, _ = F_apply(p, z)
        if 2 * w.imag * p.cot_beta > p.lam_f:
            continue
        direct = return_map(p, z)
        if direct.min_boundary < 1e-9:
            continue
        via, k = return_map_via_interval(p, z)
        assert k == direct.k
        assert abs(via - direct.point) < 1e-9
        checked += 1
    with pytest.raises(ValueError):
        return_map_via_interval(p, 1 + 0.1j)


def test_hitting_time_from_interval_count():
    p = SWAP
    z = 0.2 * cmath.exp(1j * 1.3)
    w, _ = F_apply(p, z)
    ell = 2 * w.imag * p.cot_beta
    x = w.real + 1 + ell / 2
    n, _ = first_hitting(p.lam_f, ell, x)
    assert hitting_time(p, z) == 1 + n


def test_batch_matches_scalar():
    rng = np.random.default_rng(3)
    p = THREE
    r = rng.uniform(0.05, 2, 400)
    a = rng.uniform(p.beta, math.pi - p.beta, 400)
    zs = r * np.exp(1j * a)
    batch = return_map_batch(p, zs)
    for i, z in enumerate(zs):
        one = return_map(p, complex(z))
        if one.min_boundary < 1e-9:
            continue
        assert batch.k[i] == one.k
        assert batch.n0[i] == one.n0 and batch.nd[i] == one.nd
        assert batch.landing_cone[i] == one.landing_cone
        assert abs(batch.points[i] - one.point) < 1e-12
    with pytest.raises(ValueError):
        return_map_batch(p, [1 - 1j])


def test_iterate_batch_matches_orbit():
    p = SWAP
    zs = np.array([0.3 + 0.4j, -0.7 + 1.1j, 2.0 + 0.2j])
    final, minb = iterate_batch(p, zs, 300)
    for i, z in enumerate(zs):
        ref = orbit(p, complex(z), 300)[-1][0]
        assert abs(final[i] - ref) < 1e-12
    assert np.all(minb > 0)


def test_cap():
    # far to the right with a tiny cap never reaches the middle cones
    with pytest.raises(CapExceeded):
        return_map(SWAP, 1e4 + 1e-3j, cap=10)


def test_return_map_is_piecewise_isometric():
    rng = random.Random(4)
    p = SWAP
    h = 1e-7
    tested = 0
    for _ in range(3000):
        z = polar(rng.uniform(0.05, 0.5), rng.uniform(p.beta + 0.01, math.pi - p.beta - 0.01))
        trio = [z, z + h, z + 1j * h]
        res = [return_map(p, w) for w in trio]
        keys = {(r.k, r.n0, r.nd, r.cone, r.landing_cone) for r in res}
        if len(keys) != 1 or any(r.hit_boundary for r in res):
            continue
        tested += 1
        for i in range(3):
            for j in range(i + 1, 3):
                before = abs(trio[i] - trio[j])
                after = abs(res[i].point - res[j].point)
                assert abs(after - before) < 1e-12
    assert tested > 1000
