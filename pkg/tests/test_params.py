from fractions import Fraction

import pytest

from rcdesign.params import (
    ParameterError,
    TYPE_COLUMNS,
    brute_admissible_oracle,
    component_bibds,
    derive,
    enumerate_admissible,
    load_nonexistent_bibds,
    pyd_admissible_search,
    pyd_extra_dimension_report,
    pyd_main_series,
    search_small_v,
    search_small_v_naive,
)

# Expected admissibility skeleton for the master table up to v = 14.
# Cells in column order MA, SA^T, MA^T, SA, DA, TA, AO:
# 'a' admissible, '-' admissible but excluded by a forced property, '' not
# admissible.  Row order: v, then e, then smaller dimension first with its
# transpose immediately after.
SKELETON = [
    (6, 2, 3, 4, ("-", "-", "a", "a", "a", "a", "-")),
    (6, 2, 4, 3, ("a", "a", "-", "-", "a", "a", "-")),
    (8, 2, 4, 4, ("", "", "", "", "", "", "a")),
    (8, 3, 4, 6, ("", "", "a", "a", "", "", "-")),
    (8, 3, 6, 4, ("a", "a", "", "", "", "", "-")),
    (9, 2, 3, 6, ("", "", "a", "a", "", "", "-")),
    (9, 2, 6, 3, ("a", "a", "", "", "", "", "-")),
    (9, 4, 6, 6, ("", "", "", "", "", "", "a")),
    (10, 2, 4, 5, ("a", "a", "", "", "", "", "a")),
    (10, 2, 5, 4, ("", "", "a", "a", "", "", "a")),
    (10, 3, 5, 6, ("a", "a", "a", "a", "a", "a", "a")),
    (10, 3, 6, 5, ("a", "a", "a", "a", "a", "a", "a")),
    (10, 4, 5, 8, ("", "", "a", "a", "", "", "-")),
    (10, 4, 8, 5, ("a", "a", "", "", "", "", "-")),
    (12, 2, 3, 8, ("", "", "a", "a", "", "", "-")),
    (12, 2, 8, 3, ("a", "a", "", "", "", "", "-")),
    (12, 2, 4, 6, ("", "", "a", "a", "", "", "a")),
    (12, 2, 6, 4, ("a", "a", "", "", "", "", "a")),
    (12, 3, 4, 9, ("-", "-", "a", "a", "a", "a", "-")),
    (12, 3, 9, 4, ("a", "a", "-", "-", "a", "a", "-")),
    (12, 3, 6, 6, ("", "", "", "", "", "", "a")),
    (12, 4, 6, 8, ("", "", "", "", "", "", "a")),
    (12, 4, 8, 6, ("", "", "", "", "", "", "a")),
    (12, 5, 6, 10, ("", "", "a", "a", "", "", "-")),
    (12, 5, 10, 6, ("a", "a", "", "", "", "", "-")),
    (12, 6, 8, 9, ("a", "a", "", "", "", "", "a")),
    (12, 6, 9, 8, ("", "", "a", "a", "", "", "a")),
    (14, 2, 4, 7, ("", "", "", "", "", "", "a")),
    (14, 2, 7, 4, ("", "", "", "", "", "", "a")),
    (14, 3, 6, 7, ("a", "a", "", "", "", "", "a")),
    (14, 3, 7, 6, ("", "", "a", "a", "", "", "a")),
    (14, 4, 7, 8, ("a", "a", "a", "a", "a", "a", "a")),
    (14, 4, 8, 7, ("a", "a", "a", "a", "a", "a", "a")),
    (14, 5, 7, 10, ("", "", "", "", "", "", "a")),
    (14, 5, 10, 7, ("", "", "", "", "", "", "a")),
    (14, 6, 7, 12, ("", "", "a", "a", "", "", "-")),
    (14, 6, 12, 7, ("a", "a", "", "", "", "", "-")),
]


def test_derive_10_5_6():
    p = derive(10, 5, 6)
    assert p.e == 3
    assert p.lambda_rr == 3 and p.lambda_cc == 2 and p.lambda_rc == 3
    assert p.admissible_for == "all"
    assert not p.forced_rr and not p.forced_cc


def test_derive_6_4_3_forced_cc():
    p = derive(6, 4, 3)
    assert p.forced_cc and not p.forced_rr
    assert p.type_status("AO") == "-"
    assert p.type_status("SA") == "-"
    assert p.type_status("MA_T") == "-"
    assert p.type_status("MA") == "adm"


def test_derive_non_integral_e():
    p = derive(7, 3, 3)
    assert p.e == Fraction(9, 7)
    assert p.admissible_for == ""
    assert all(p.type_status(t) == "" for t in TYPE_COLUMNS)


def test_derive_parameter_errors():
    with pytest.raises(ParameterError):
        derive(6, 1, 4)
    with pytest.raises(ParameterError):
        derive(6, 4, 1)


def test_skeleton_matches_master_table():
    rows = enumerate_admissible(14)
    got = [
        (p.v, p.e_int, p.r, p.c,
         tuple({"adm": "a"}.get(p.type_status(t), p.type_status(t)) for t in TYPE_COLUMNS))
        for p in rows
    ]
    assert got == SKELETON


def test_enumerate_admissible_vmax6():
    rows = enumerate_admissible(6)
    assert [(p.v, p.r, p.c) for p in rows] == [(6, 3, 4), (6, 4, 3)]
    assert rows[0].type_status("AO") == "-"


def test_enumerate_admissible_vmax5_empty():
    assert enumerate_admissible(5) == []


def test_forced_iff_r_or_c_equals_e_plus_one():
    # the forced-property equalities rewrite to r = e+1 / c = e+1 in range
    for p in enumerate_admissible(50):
        e = p.e_int
        assert p.forced_rr == (p.r == e + 1)
        assert p.forced_cc == (p.c == e + 1)


def test_admissibility_agrees_with_naive_oracle():
    for v in range(6, 101):
        for p in [q for q in enumerate_admissible(v) if q.v == v]:
            for t in TYPE_COLUMNS:
                assert (p.type_status(t) != "") == brute_admissible_oracle(p.v, p.r, p.c, t)


def test_component_bibds_21_7_15():
    res = component_bibds(derive(21, 7, 15))
    bc = res["bibd_c"]
    assert bc["params"].short == (15, 5, 2)
    assert (bc["params"].points, bc["params"].blocks, bc["params"].replication,
            bc["params"].block_size, bc["params"].pair_count) == (15, 21, 7, 5, 2)
    assert bc["hint"] == "known-nonexistent"
    assert bc["params"].counts_consistent()


def test_component_bibds_10_5_6():
    res = component_bibds(derive(10, 5, 6))
    br = res["bibd_r"]
    assert (br["params"].points, br["params"].blocks, br["params"].replication,
            br["params"].block_size, br["params"].pair_count) == (5, 10, 6, 3, 3)


def test_component_bibds_6_3_4_both_exist():
    res = component_bibds(derive(6, 3, 4))
    assert res["bibd_r"]["hint"] == "exists"
    assert res["bibd_c"]["hint"] == "exists"


def test_component_bibd_missing_axis():
    res = component_bibds(derive(8, 4, 4))  # neither lambda integral
    assert res["bibd_r"] is None and res["bibd_c"] is None


def test_nonexistent_table_extensible(tmp_path):
    f = tmp_path / "extra.json"
    f.write_text("[[7, 3, 1]]")
    table = load_nonexistent_bibds(f)
    assert (7, 3, 1) in table and (15, 5, 2) in table


def test_search_small_v_1000_empty():
    assert search_small_v(1000) == []


def test_search_small_v_matches_naive():
    for relax in ("double", "rr-only", "cc-only", "ao"):
        assert sorted(search_small_v_naive(300, relax)) == search_small_v(300, relax)


def test_search_small_v_relaxed_examples():
    # keeping only the column condition admits (8,6,4); AO admits (9,6,6)
    cc_side = search_small_v(14, relax="cc-only")
    assert (8, 6, 4) in cc_side
    ao = search_small_v(14, relax="ao")
    assert (9, 6, 6) in ao
    assert search_small_v(14) == []


def test_pyd_main_series():
    p2 = pyd_main_series(2)
    assert (p2.v, p2.r, p2.e, p2.lambda_bibd) == (9, 6, 4, 5)
    p3 = pyd_main_series(3)
    assert (p3.v, p3.r) == (25, 10)
    p4 = pyd_main_series(4)
    assert (p4.v, p4.r) == (49, 28)  # Cheng family s = 7
    with pytest.raises(ParameterError):
        pyd_main_series(1)


def test_pyd_series_lambda_closed_forms():
    for i in range(2, 40):
        p = pyd_main_series(i)
        expected = i * (2 * i + 1) // 2 if i % 2 == 0 else (i - 1) * (2 * i - 3) // 2
        assert p.lambda_bibd == expected


def test_pyd_search_contains_series():
    found = pyd_admissible_search(100)
    pairs = {(p.v, p.r) for p in found}
    assert (9, 6) in pairs and (25, 10) in pairs


def test_pyd_search_non_odd_square_empty():
    assert pyd_admissible_search(3000, odd_squares_only=False) == []


def test_pyd_first_extra_dimension_is_289():
    report = pyd_extra_dimension_report(400)
    extra = [g for g in report if g["extra"]]
    assert extra and extra[0]["v"] == 289
    assert sorted(extra[0]["r_values"]) == [136, 204]
    assert extra[0]["main_series_r"] == 136
