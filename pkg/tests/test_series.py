from fractions import Fraction
from math import factorial

import pytest

from lgfkit.series import (MultiPoly, RationalPoly, bessel_b_coefficients, build_b_coefficients,
                           build_expansion_pack, build_g2, build_g3, revert_series,
                           select_thresholds, ExpansionPack)
from lgfkit.stencils import SPLIT_IDS, get_stencil, q_poly

F = Fraction


def hankel_b(j, n):
    """b_j(n) from the large-argument expansion of exp(-x) I_n(x) at x = 2t."""
    a = F(1)
    for i in range(1, j + 1):
        a *= 4 * n * n - (2 * i - 1) ** 2
    a /= factorial(j) * 8**j
    return (-1) ** j * a / 2**j


def test_rational_poly_algebra():
    p = RationalPoly([1, 2])  # 1 + 2x
    q = RationalPoly([0, 1, F(1, 3)])
    assert (p * q)(F(3)) == p(F(3)) * q(F(3))
    assert (p**3)(F(1, 2)) == 8
    assert p.compose(q)(F(2)) == p(q(F(2)))
    assert list(q.derivative().coeffs) == [1, F(2, 3)]
    assert p.shift(1)(F(0)) == p(F(1))
    assert RationalPoly.from_strings(q.to_strings()) == q
    assert RationalPoly([1, 0, 3]).is_even() and not p.is_even()


def test_multipoly_roundtrip_and_symmetry():
    x, y = MultiPoly.variable(2, 0), MultiPoly.variable(2, 1)
    m = x * x + 3 * x * y + F(1, 2)
    assert m(2, 1) == 4 + 6 + F(1, 2)
    assert MultiPoly.from_json(2, m.to_json()) == m
    assert m.permuted([1, 0])(1, 2) == m(2, 1)
    assert m.substitute(0, 0)(5, 7) == F(1, 2)


@pytest.mark.parametrize("name", SPLIT_IDS)
def test_b_structure(name):
    b = build_b_coefficients(get_stencil(name), 6)
    assert len(b) == 6 and b[0] == RationalPoly([1])
    for j, p in enumerate(b):
        assert p.is_even() and p.degree == 2 * j


def test_order2_b_matches_bessel_expansion_exactly():
    b = build_b_coefficients(get_stencil("lgf2"), 9)
    ref = bessel_b_coefficients(9)
    assert b[1] == RationalPoly([F(1, 16), 0, F(-1, 4)])
    for j in range(9):
        assert b[j] == ref[j]
        for n in range(6):
            assert b[j](F(n)) == hankel_b(j, n)


def test_g3_g2_examples():
    b = build_b_coefficients(get_stencil("lgf2"), 4)
    g3 = build_g3(b, 4)
    g2 = build_g2(b, 4)
    assert g3[0](0, 0, 0) == 1
    assert g3[1](0, 0, 0) == F(1, 16)
    assert g3[1](1, 2, 3) == (b[1](1) + b[1](2) + b[1](3)) / 3
    assert g3[2](1, 2, 3) == g3[2](3, 1, 2)
    assert g2[1](3, 2) == F(-4 * 9 - 4 * 4, 16)
    for j in range(1, 4):
        assert g2[j](0, 0) == 0
        assert g2[j](1, 4) == g2[j](4, 1)


def test_threshold_formula_and_monotonicity():
    st = get_stencil("lgf2")
    b = build_b_coefficients(st, 3)
    t_min, _ = select_thresholds(b, 2, 1, 1e-15, 1e-15)
    bJ = abs(float(b[2](1)))
    direct = max((bJ / 1e-15) ** 0.5, (bJ / (1e-15 * (4 * 3.141592653589793) ** 0.5)) ** 0.4)
    assert t_min == pytest.approx(direct, rel=1e-14)
    assert select_thresholds(b, 2, 1, 1e-15, 5e-16)[0] >= t_min
    with pytest.raises(ValueError):
        select_thresholds(b[:2], 2, 1, 1e-15, 1e-15)
    p16 = build_expansion_pack(st, n_max=16)
    p32 = build_expansion_pack(st, n_max=32)
    assert p32.t_min > p16.t_min and p16.T_min >= p16.t_min


def test_pack_json_roundtrip():
    pk = build_expansion_pack(get_stencil("lgf4"), J=4, n_max=6, with_tails=True)
    back = ExpansionPack.from_json(pk.to_json())
    assert back.b == pk.b and back.b_next == pk.b_next and back.g3 == pk.g3
    assert back.t_min == pk.t_min and back.T_min == pk.T_min


# reference lambda(c) series near 1 for the closed-form small-c branch
SMALL_C_SERIES = {
    "lgf4": [F(1, 2), F(1, 24), F(1, 144), F(5, 3456), F(7, 20736), F(7, 82944),
             F(11, 497664)],
    "lgf6": [F(1, 2), F(1, 24), F(1, 720), F(-1, 1152), F(-149, 518400), F(-259, 6220800),
             F(163, 62208000)],
    "lgf8": [F(1, 2), F(1, 24), F(1, 720), F(1, 40320), F(577, 3628800), F(389, 6220800),
             F(34987, 3048192000)],
}


@pytest.mark.parametrize("name", sorted(SMALL_C_SERIES))
def test_small_c_root_series(name):
    # q(1 + mu) = -c; reverting in y = -c and flipping signs gives the series in c
    m = revert_series(q_poly(get_stencil(name)).shift(1).coeffs, 7)
    got = [m[i] * (-1) ** i for i in range(1, 8)]
    assert got == SMALL_C_SERIES[name]


def test_revert_series_identity():
    d = [F(0), F(2), F(3), F(-1)]
    m = revert_series(d, 5)
    # composing forward with the inverse gives y + O(y^6)
    x = RationalPoly(m)
    y = RationalPoly(d).compose(x)
    assert list(y.coeffs[:6]) == [0, 1, 0, 0, 0, 0]
