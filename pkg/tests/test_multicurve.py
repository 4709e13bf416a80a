"""Tests for graded multicurves: coordinates, pair gradings, mirror,
twist, reduction, and the text format."""
from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thinfill.lineset import Z, Z2, is_exceptional, theta
from thinfill.localsys import companion_system, jordan_system, trivial_system
from thinfill.multicurve import (
    ARC,
    BN,
    HF,
    KH,
    RATIONAL,
    SPECIAL,
    CurveComponent,
    Multicurve,
    curve_component,
    delta_h,
    delta_pair,
    delta_v,
    format_multicurve,
    global_offset,
    is_exceptional_multicurve,
    mirror,
    multicurve,
    parse_multicurve,
    reduce_multicurve,
    twist,
)
from thinfill.qp1 import INF, angle_key, mapping_class, slope

HALF = Fraction(1, 2)


def rat(s, delta, mult=1, X=None, n=1):
    return curve_component(RATIONAL, s, n, delta, mult, X)


def spec_curve(s, delta, mult=1, n=1, punctures=None):
    return curve_component(SPECIAL, s, n, delta, mult, punctures=punctures)


# === coordinates ===========================================================


def test_vertical_from_horizontal_positive_slope():
    c = rat(slope(2), Fraction(3))
    assert delta_h(c) == 3
    assert delta_v(c) == Fraction(5, 2)


def test_vertical_from_horizontal_negative_slope():
    c = rat(slope(-2), Fraction(-1))
    assert delta_v(c) == -HALF


def test_slope_zero_stores_vertical():
    c = rat(slope(0), HALF)
    assert delta_v(c) == HALF
    with pytest.raises(ValueError):
        delta_h(c)


def test_slope_infinity_has_no_vertical():
    c = rat(INF, Fraction(0))
    assert delta_h(c) == 0
    with pytest.raises(ValueError):
        delta_v(c)


def test_half_integer_gradings_only():
    with pytest.raises(ValueError):
        curve_component(RATIONAL, slope(1), 1, Fraction(1, 3))


# === pair gradings =========================================================


def test_pair_same_slope_is_difference():
    a = rat(slope(3), Fraction(1))
    b = rat(slope(3), Fraction(4))
    assert delta_pair(HF, a, b) == 3
    assert delta_pair(KH, a, b) == 3
    assert delta_pair(HF, b, a) == -3


def test_pair_zero_infinity():
    a = rat(slope(0), HALF)       # vertical grading 1/2
    b = rat(INF, Fraction(2))     # horizontal grading 2
    assert delta_pair(HF, a, b) == 2 - HALF + HALF
    assert delta_pair(HF, b, a) == HALF - 2 + HALF
    assert delta_pair(KH, a, b) == 2 - HALF - HALF
    assert delta_pair(KH, b, a) == HALF - 2 - HALF


def test_pair_branch_overlap_consistent():
    # both branch clauses apply to mixed-sign finite slopes and must agree
    a = rat(slope(-1), Fraction(1))
    b = rat(slope(3), Fraction(2))
    lhs = delta_h(b) - delta_v(a) + HALF
    rhs = delta_v(b) - delta_h(a) + HALF
    assert lhs == rhs == delta_pair(HF, a, b)


def components_st(min_size=2, max_size=4):
    slopes_st = st.sampled_from(
        [INF] + [slope(p, q) for p in range(-3, 4) for q in range(1, 4)]
    )
    deltas = st.integers(-4, 4)

    def build(pairs, offset):
        comps = []
        for s, d in pairs:
            delta = Fraction(d) + offset
            if s == slope(0):
                delta = delta + HALF
            comps.append(rat(s, delta))
        return comps

    return st.builds(
        build,
        st.lists(st.tuples(slopes_st, deltas), min_size=min_size, max_size=max_size),
        st.sampled_from([Fraction(0), HALF]),
    )


@settings(max_examples=200, deadline=None)
@given(components_st(min_size=2, max_size=2), st.sampled_from([HF, KH]))
def test_pair_symmetry(comps, theory):
    a, b = comps
    total = delta_pair(theory, a, b) + delta_pair(theory, b, a)
    if a.s == b.s:
        assert total == 0
    elif theory == HF:
        assert total == 1
    else:
        assert total == -1


@settings(max_examples=200, deadline=None)
@given(components_st(min_size=3, max_size=3), st.sampled_from([HF, KH]))
def test_pair_transitivity(comps, theory):
    a, b, c = comps
    keys = [angle_key(x.s) for x in (a, b, c)]
    if len({x.s for x in (a, b, c)}) != 3:
        return
    if theory == KH and keys == sorted(keys):
        assert delta_pair(KH, a, c) == delta_pair(KH, a, b) + delta_pair(KH, b, c)
    if theory == HF and keys == sorted(keys, reverse=True):
        assert delta_pair(HF, a, c) == delta_pair(HF, a, b) + delta_pair(HF, b, c)


# === construction and liftability ==========================================


def test_mixed_offsets_rejected():
    with pytest.raises(ValueError, match="lift"):
        multicurve(KH, [rat(INF, Fraction(0)), rat(slope(2), HALF)])


def test_uniform_half_offset_allowed():
    G = multicurve(KH, [rat(INF, HALF), rat(slope(2), Fraction(3, 2))])
    assert global_offset(G) == HALF


def test_arcs_only_in_arc_theory():
    arc = curve_component(ARC, slope(1), 1, Fraction(0))
    multicurve(BN, [arc])
    with pytest.raises(ValueError):
        multicurve(KH, [arc])


def test_hf_rational_cables_rejected():
    with pytest.raises(ValueError):
        multicurve(HF, [rat(slope(1), Fraction(0), n=2)])


def test_nontrivial_local_system_outside_hf_rejected():
    X = jordan_system(2)
    multicurve(HF, [rat(slope(1), Fraction(0), X=X)])
    with pytest.raises(ValueError):
        multicurve(KH, [rat(slope(1), Fraction(0), X=X)])


def test_duplicate_components_merge():
    G = multicurve(KH, [rat(INF, Fraction(1)), rat(INF, Fraction(1))])
    assert len(G.components) == 1
    assert G.components[0].mult == 2


# === mirror ================================================================


def kh_p2m3():
    return parse_multicurve(
        """
        theory Kh
        curve s4(inf) : d^0
        curve r1(-2) : d^0
        """
    )


def test_mirror_negates_slopes_and_gradings():
    G = kh_p2m3()
    M = mirror(G)
    assert {c.s for c in M.components} == {INF, slope(2)}
    assert all(c.delta == 0 for c in M.components)


def test_mirror_is_an_involution():
    G = parse_multicurve(
        """
        theory Kh
        curve r2(1/2) : d^1 + d^2
        curve s4(0) : d^-1/2:v
        """
    )
    assert mirror(mirror(G)) == G


def test_mirror_flips_pair_grading():
    a = rat(slope(0), HALF)
    b = rat(INF, Fraction(2))
    G = multicurve(HF, [a, b])
    M = mirror(G)
    ma = next(c for c in M.components if c.s == slope(0))
    mb = next(c for c in M.components if c.s == INF)
    assert delta_pair(HF, ma, mb) == 1 - delta_pair(HF, a, b)


# === twist =================================================================


def test_twist_moves_slopes():
    G = kh_p2m3()
    T = twist(G, mapping_class(1, 0, 1, 1))
    assert {c.s for c in T.components} == {INF, slope(-1)}


TWISTS = [
    mapping_class(1, 1, 0, 1),
    mapping_class(1, 0, 1, 1),
    mapping_class(2, 1, 1, 1),
    mapping_class(0, -1, 1, 0),
]


@settings(max_examples=100, deadline=None)
@given(components_st(min_size=2, max_size=4), st.sampled_from([HF, KH]), st.sampled_from(TWISTS))
def test_twist_preserves_pair_gradings(comps, theory, m):
    G = multicurve(theory, comps)
    T = twist(G, m)
    # components map bijectively, so the multiset of pair gradings survives
    assert len(T.components) == len(G.components)
    before = sorted(
        delta_pair(theory, a, b) for a in G.components for b in G.components
    )
    after = sorted(
        delta_pair(theory, a, b) for a in T.components for b in T.components
    )
    assert before == after


@settings(max_examples=60, deadline=None)
@given(components_st(min_size=2, max_size=3), st.sampled_from([HF, KH]), st.sampled_from(TWISTS))
def test_twist_anchor_keeps_its_grading(comps, theory, m):
    G = multicurve(theory, comps)
    anchor = sorted(
        G.components, key=lambda c: (angle_key(c.s), c.delta, c.kind, c.n, c.mult)
    )[0]
    T = twist(G, m)
    assert any(c.s == m(anchor.s) and c.delta == anchor.delta for c in T.components)


def test_twist_identity_fixes():
    G = kh_p2m3()
    assert twist(G, mapping_class(1, 0, 0, 1)) == G


def test_twist_composes():
    G = kh_p2m3()
    m1 = mapping_class(1, 1, 0, 1)
    m2 = mapping_class(1, 0, 1, 1)
    m21 = mapping_class(
        m2.m[0][0] * m1.m[0][0] + m2.m[0][1] * m1.m[1][0],
        m2.m[0][0] * m1.m[0][1] + m2.m[0][1] * m1.m[1][1],
        m2.m[1][0] * m1.m[0][0] + m2.m[1][1] * m1.m[1][0],
        m2.m[1][0] * m1.m[0][1] + m2.m[1][1] * m1.m[1][1],
    )
    assert twist(twist(G, m1), m2) == twist(G, m21)


# === reduction =============================================================


def test_reduce_validates_and_builds_lines():
    G = kh_p2m3()
    L = reduce_multicurve(G, Z)
    slopes = {l.s for l in L.lines}
    assert slopes == {INF, slope(-2)}
    eps = {l.s: l.eps for l in L.lines}
    assert eps[INF] == 1 and eps[slope(-2)] == 0


def test_reduce_half_offset_lands_on_integers():
    G = multicurve(KH, [rat(INF, HALF), rat(slope(2), Fraction(3, 2))])
    L = reduce_multicurve(G, Z)
    assert all(isinstance(l.g, int) for l in L.lines)


def test_reduce_marks_inhibited_systems_special_in_hf():
    # companion of x^2+x+1 has no eigenvalue 1, so it pairs trivially
    X = companion_system(0b111)
    G = multicurve(HF, [rat(slope(1), Fraction(0), X=X), rat(INF, Fraction(0))])
    L = reduce_multicurve(G, Z)
    eps = {l.s: l.eps for l in L.lines}
    assert eps[slope(1)] == 1
    assert eps[INF] == 0


def test_reduce_unipotent_system_not_special():
    G = multicurve(HF, [rat(slope(1), Fraction(0), X=jordan_system(2))])
    L = reduce_multicurve(G, Z)
    assert all(l.eps == 0 for l in L.lines)


def test_reduce_trivial_system_not_special():
    G = multicurve(HF, [rat(slope(1), Fraction(0), X=trivial_system())])
    L = reduce_multicurve(G, Z)
    assert all(l.eps == 0 for l in L.lines)


def test_reduce_bn_rejected():
    arc = curve_component(ARC, slope(1), 1, Fraction(0))
    with pytest.raises(ValueError):
        reduce_multicurve(multicurve(BN, [arc]), Z)


def test_reduce_then_theta_runs_after_twist():
    G = kh_p2m3()
    T = twist(G, mapping_class(1, 1, 0, 1))
    theta(reduce_multicurve(G, Z))
    theta(reduce_multicurve(T, Z))
    theta(reduce_multicurve(T, Z2))


# === exceptional configurations ============================================


def test_hf_exceptional_example():
    # rational at -5/2 against a special block at infinity, constant grading 2
    G = multicurve(
        HF,
        [
            rat(slope(-5, 2), Fraction(0)),
            spec_curve(INF, Fraction(2), mult=2),
        ],
    )
    assert is_exceptional_multicurve(G)
    assert is_exceptional(reduce_multicurve(G, Z))


def test_kh_p2m3_not_exceptional():
    assert not is_exceptional_multicurve(kh_p2m3())


def test_single_slope_not_exceptional():
    G = multicurve(KH, [rat(INF, Fraction(0)), rat(INF, Fraction(3))])
    assert not is_exceptional_multicurve(G)


@pytest.mark.parametrize("b,expected", [(0, False), (1, False), (2, True), (-1, True)])
def test_hf_exceptional_iff_constant_avoids_zero_one(b, expected):
    r = rat(slope(-5, 2), Fraction(0))
    s = spec_curve(INF, Fraction(b), mult=2)
    G = multicurve(HF, [r, s])
    assert delta_pair(HF, r, s) == b
    assert is_exceptional_multicurve(G) is expected


# === text format ===========================================================


def test_parse_example_file():
    G = parse_multicurve(
        """
        theory Kh
        curve s4(inf) : d^-1
        curve 2*s4(inf) : d^3 + d^4
        curve r1(5/2) : d^0
        """
    )
    assert G.theory == KH
    specials = [c for c in G.components if c.kind == SPECIAL]
    assert sum(c.mult for c in specials) == 3
    assert all(c.n == 2 for c in specials)


def test_parse_local_system_attr():
    G = parse_multicurve(
        """
        theory HF
        curve r(5/2) [ls=[1,1;0,1]] : d^0
        """
    )
    c = G.components[0]
    assert c.X == jordan_system(2)
    assert c.n == 1


def test_parse_punctures_attr():
    G = parse_multicurve(
        """
        theory HF
        curve s4(0) [pi=4,1] : d^1/2:v
        """
    )
    c = G.components[0]
    assert c.punctures == (4, 1)
    assert c.n == 1


def test_parse_parenthesised_exponent():
    G = parse_multicurve(
        """
        theory Kh
        curve 4*r1(inf) : 4*d^(11/2)
        """
    )
    assert G.components[0].delta == Fraction(11, 2)
    assert G.components[0].mult == 4


def test_parse_vertical_suffix_converts():
    G = parse_multicurve(
        """
        theory Kh
        curve 2*s4(4) : d^3:v + d^4:v
        """
    )
    deltas = sorted(c.delta for c in G.components)
    assert deltas == [Fraction(7, 2), Fraction(9, 2)]


def test_mult_mismatch_rejected():
    with pytest.raises(ValueError, match="multiplicity"):
        parse_multicurve("theory Kh\ncurve 3*r1(0) : d^1/2:v")


def test_hf_special_length_multiple_of_four():
    with pytest.raises(ValueError):
        parse_multicurve("theory HF\ncurve s2(inf) : d^0")


def test_kh_special_length_even():
    with pytest.raises(ValueError):
        parse_multicurve("theory Kh\ncurve s3(inf) : d^0")


def test_format_round_trip():
    text = """
    theory Kh
    curve r1(-2) : d^0
    curve 2*s4(inf) : d^3 + d^4
    """
    G = parse_multicurve(text)
    assert parse_multicurve(format_multicurve(G)) == G


def test_format_round_trip_attrs():
    text = """
    theory HF
    curve r(5/2) [ls=[1,1;0,1]] : d^0
    curve s4(0) [pi=2,3] : d^1/2:v
    """
    G = parse_multicurve(text)
    assert parse_multicurve(format_multicurve(G)) == G


def test_comments_and_blank_lines_ignored():
    G = parse_multicurve(
        """
        # a tangle invariant
        theory Kh

        curve r1(0) : d^1/2:v  # the arc-like part
        """
    )
    assert len(G.components) == 1
