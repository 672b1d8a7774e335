import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

import rcdesign as rc
from rcdesign.core import StructuralError, Violation
from rcdesign.heuristic import random_valid_array

LATIN2 = rc.from_matrix([[0, 1], [1, 0]], 2)
LATIN3 = rc.from_matrix([[0, 1, 2], [1, 2, 0], [2, 0, 1]], 3)


def test_validate_fig1a(fig1a):
    rep = rc.validate(fig1a)
    assert rep.ok
    assert fig1a.e == 3


def test_validate_latin2():
    assert rc.validate(LATIN2).ok
    assert LATIN2.e == 2


def test_validate_repeat_in_row():
    bad = rc.from_matrix([[0, 0], [1, 1]], 2)
    rep = rc.validate(bad)
    assert not rep.ok
    assert Violation("repeat-in-row", 0, 0) in rep.violations


def test_validate_repeat_in_column():
    bad = rc.from_matrix([[0, 1], [0, 1]], 2)
    rep = rc.validate(bad)
    assert not rep.ok
    assert any(v.kind == "repeat-in-column" for v in rep.violations)


def test_validate_non_equireplicate_fractional():
    # rc/v not an integer: verdict, not an exception
    a = rc.from_matrix([[0, 1, 2], [1, 2, 0]], 4)
    rep = rc.validate(a)
    assert not rep.ok
    assert any(v.kind == "non-equireplicate" for v in rep.violations)


def test_structural_errors():
    with pytest.raises(StructuralError):
        rc.RowColumnArray(v=2, cells=((0, 1), (1,)))
    with pytest.raises(StructuralError):
        rc.from_matrix([[0, 3]], 2)


def test_validate_matches_bruteforce_small_grids():
    # exhaustive over all 2x3 grids on <=3 symbols
    import itertools

    v, r, c = 3, 2, 3
    for cells in itertools.product(range(v), repeat=r * c):
        grid = [list(cells[i * c : (i + 1) * c]) for i in range(r)]
        a = rc.from_matrix(grid, v)
        ok = rc.validate(a).ok
        rows_ok = all(len(set(row)) == c for row in grid)
        cols_ok = all(len({grid[i][j] for i in range(r)}) == r for j in range(c))
        counts = [cells.count(s) for s in range(v)]
        equi = all(n * v == r * c for n in counts)
        assert ok == (rows_ok and cols_ok and equi)


def test_intersections_fig1a(fig1a):
    prof = rc.intersections(fig1a)
    assert prof.rr == (2,) * 6
    assert prof.rc == (3,) * 12
    assert prof.cc == (4,) * 3
    assert prof.mean_rc == Fraction(3)


def test_intersections_latin_square():
    prof = rc.intersections(LATIN3)
    assert prof.rr == (3, 3, 3) and prof.cc == (3, 3, 3)
    assert set(prof.rc) == {3}


def test_mean_rc_equals_e_on_random_arrays():
    # average row-column intersection equals rc/v exactly
    for seed in range(50):
        a = random_valid_array(10, 5, 6, seed)
        prof = rc.intersections(a)
        assert prof.mean_rc == Fraction(3)


def test_classify_fig1a_is_trivial_triple(fig1a):
    # v = r makes this a trivial sesqui array where all properties hold
    cl = rc.classify(fig1a)
    assert (cl.has_rr, cl.has_cc, cl.has_rc) == (True, True, True)
    assert cl.label == "TA"


def test_classify_fig2_proper_ao(fig2):
    cl = rc.classify(fig2)
    assert cl.label == "AO"
    assert cl.rc_constant == 6


def test_classify_latin3_triple():
    assert rc.classify(LATIN3).label == "TA"


def test_transpose_involution_and_flag_swap(fig1a, fig2):
    for a in (fig1a, fig2, LATIN3):
        t = rc.transpose(a)
        assert rc.transpose(t) == a
        ca, ct = rc.classify(a), rc.classify(t)
        assert (ca.rr_constant, ca.cc_constant) == (ct.cc_constant, ct.rr_constant)
        assert ca.rc_constant == ct.rc_constant


def test_transpose_swaps_sesqui_labels(fig1b):
    assert rc.classify(fig1b).label == "SA"
    assert rc.classify(rc.transpose(fig1b)).label == "SA_T"


def test_connectivity(fig1b, fig1c):
    assert not rc.connectivity(fig1b, "columns")
    assert rc.connectivity(fig1b, "rows")
    assert rc.connectivity(fig1c, "columns")
    assert rc.connectivity(LATIN3, "rows") and rc.connectivity(LATIN3, "columns")


def test_classification_isotopism_invariant(fig1b, fig3):
    rng = random.Random(11)
    for a in (fig1b, fig3):
        base = rc.classify(a).label
        for _ in range(100):
            rp = list(range(a.r)); rng.shuffle(rp)
            cp = list(range(a.c)); rng.shuffle(cp)
            sp = list(range(a.v)); rng.shuffle(sp)
            assert rc.classify(rc.isotope(a, rp, cp, sp)).label == base


def test_format_roundtrip(fig2):
    text = rc.format_array(fig2)
    back, tag = rc.parse_array(text)
    assert back == fig2 and tag == ""
    lst = rc.format_array_list([fig2, LATIN3])
    arrays = rc.parse_array_list(lst)
    assert arrays == [fig2, LATIN3]


def test_format_is_bit_exact(fig1a):
    assert rc.format_array(fig1a) == "4 4 3\n3 0 1\n2 3 0\n1 2 3\n0 1 2\n"


def test_format_tagged():
    text = rc.format_array(LATIN2, tag="YR")
    assert text.startswith("YR 2 2 2\n")
    back, tag = rc.parse_array(text)
    assert back == LATIN2 and tag == "YR"


@settings(max_examples=60, deadline=None)
@given(
    st.sampled_from([(6, 3, 4), (6, 4, 3), (8, 4, 4), (10, 5, 6), (12, 6, 4)]),
    st.integers(min_value=0, max_value=10_000),
    st.randoms(use_true_random=False),
)
def test_random_arrays_satisfy_invariants(params, seed, pyrandom):
    v, r, c = params
    a = random_valid_array(v, r, c, seed)
    assert rc.validate(a).ok
    prof = rc.intersections(a)
    assert len(prof.rr) == r * (r - 1) // 2
    assert len(prof.cc) == c * (c - 1) // 2
    assert len(prof.rc) == r * c
    # Bagchi average identity, exact
    assert prof.mean_rc == a.e
    # classification invariant under one random isotopism
    rp = list(range(r)); pyrandom.shuffle(rp)
    cp = list(range(c)); pyrandom.shuffle(cp)
    sp = list(range(v)); pyrandom.shuffle(sp)
    assert rc.classify(rc.isotope(a, rp, cp, sp)).label == rc.classify(a).label
