import math
import random

import pytest

import rcdesign as rc
from rcdesign.canonical import (
    autotrisotopism_histogram,
    brute_aut_order,
    brute_canonical_key,
    brute_canonical_key_full_relabel,
    canonical,
    is_isotopic,
    reduced_orbit_size,
    trisotopic_classes,
)
from rcdesign.heuristic import random_valid_array

LATIN2 = rc.from_matrix([[0, 1], [1, 0]], 2)


def _corpus():
    arrays = [
        LATIN2,
        rc.from_matrix([[0, 1, 2], [1, 2, 0], [2, 0, 1]], 3),
        rc.from_matrix([[3, 0, 1], [2, 3, 0], [1, 2, 3], [0, 1, 2]], 4),
    ]
    arrays += [random_valid_array(6, 3, 4, s) for s in range(4)]
    arrays += [random_valid_array(8, 4, 4, s) for s in range(4)]
    arrays += [random_valid_array(8, 4, 6, s) for s in range(2)]
    return arrays


def test_fast_canonical_matches_bruteforce():
    for a in _corpus():
        cf = canonical(a)
        assert cf.key == brute_canonical_key(a)
        assert cf.aut_order == brute_aut_order(a)


def test_greedy_relabel_is_optimal_tiny():
    # full symbol-permutation minimum agrees with first-occurrence relabel
    for a in _corpus():
        if a.v <= 6 and a.r * a.c <= 16:
            assert canonical(a).key == brute_canonical_key_full_relabel(a)


def test_idempotent():
    for a in _corpus():
        cf = canonical(a)
        again = canonical(cf.array)
        assert again.array == cf.array
        assert again.aut_order == cf.aut_order


def test_orbit_invariance_under_random_isotopes():
    rng = random.Random(5)
    for a in _corpus()[:6]:
        key = canonical(a).key
        for _ in range(25):
            rp = list(range(a.r)); rng.shuffle(rp)
            cp = list(range(a.c)); rng.shuffle(cp)
            sp = list(range(a.v)); rng.shuffle(sp)
            assert canonical(rc.isotope(a, rp, cp, sp)).key == key


def test_orbit_stabilizer():
    # (number of distinct relabelled frame images) * aut == r! * c!
    for a in _corpus():
        if a.r <= 4 and a.c <= 4:
            cf = canonical(a)
            assert reduced_orbit_size(a) * cf.aut_order == math.factorial(a.r) * math.factorial(a.c)


def test_latin2_aut_order_from_oracle():
    # brute force over all 8 frames: 4 fix the array, orbit has 2 elements
    cf = canonical(LATIN2)
    assert cf.aut_order == brute_aut_order(LATIN2) == 4
    assert reduced_orbit_size(LATIN2) == 1


def test_is_isotopic_random_isotope(fig1b):
    rng = random.Random(3)
    rp = list(range(fig1b.r)); rng.shuffle(rp)
    cp = list(range(fig1b.c)); rng.shuffle(cp)
    sp = list(range(fig1b.v)); rng.shuffle(sp)
    assert is_isotopic(fig1b, rc.isotope(fig1b, rp, cp, sp))


def test_is_isotopic_distinguishes_classes():
    rep = rc.enumerate_designs(rc.cc_target(6, 3, 4))
    a, b = rep.representatives["DA"]
    assert not is_isotopic(a, b)


def test_is_isotopic_dimension_mismatch(fig1a):
    # non-square transpose: false by definition, not an error
    assert not is_isotopic(fig1a, rc.transpose(fig1a))


def test_table5_small_double_aut_orders():
    rep = rc.enumerate_designs(rc.cc_target(6, 3, 4))
    orders = sorted(canonical(a).aut_order for a in rep.representatives["DA"])
    assert orders == [2, 3]


def test_trisotopism_single_self_transpose_class():
    cls = trisotopic_classes([LATIN2])
    assert len(cls) == 1 and cls[0].self_transpose
    assert cls[0].autotrisotopism_order == 8  # 2 * aut


def test_trisotopism_4x4_ao():
    rep = rc.enumerate_designs(rc.ao_target(8, 4, 4))
    cls = trisotopic_classes(rep.representatives["AO"])
    assert len(cls) == 12
    hist = autotrisotopism_histogram(cls)
    # forced by the isotopism histogram: 4 self-transpose classes double up
    assert hist == {4: 3, 8: 3, 16: 3, 32: 2, 128: 1}


def test_trisotopism_requires_square(fig1a):
    with pytest.raises(ValueError):
        trisotopic_classes([fig1a])
