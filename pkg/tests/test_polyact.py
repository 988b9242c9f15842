"""Action and pairing algebra, checked against an independent sympy oracle."""

from __future__ import annotations

from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from rslift.polyact import (
    GMat,
    HomPoly,
    IDENT,
    S_MAT,
    W_INF,
    act_bar,
    act_star,
    action_matrix,
    alpha,
    pair,
    subst,
    w_p_mat,
)

_X, _Y = sympy.symbols("x y")


def _sympy_subst(h: HomPoly, g: GMat) -> HomPoly:
    """Oracle: substitution done entirely by sympy expansion."""
    d = h.degree
    expr = sum(
        sympy.Rational(c.numerator, c.denominator) * _X**i * _Y ** (d - i)
        for i, c in enumerate(h.coeffs)
    )
    a, b, c_, dd = (sympy.Rational(Fraction(e)) for e in g.entries())
    sub = sympy.expand(expr.subs({_X: a * _X + b * _Y, _Y: c_ * _X + dd * _Y}, simultaneous=True))
    poly = sympy.Poly(sub, _X, _Y)
    coeffs = []
    for i in range(d + 1):
        q = poly.coeff_monomial(_X**i * _Y ** (d - i)) if d else poly.coeff_monomial(1)
        coeffs.append(Fraction(int(sympy.numer(q)), int(sympy.denom(q))))
    return HomPoly(h.k, tuple(coeffs))


def _rand_poly(draw, k: int) -> HomPoly:
    n = 2 * k - 1
    coeffs = draw(
        st.lists(st.integers(min_value=-9, max_value=9), min_size=n, max_size=n)
    )
    return HomPoly.make(k, coeffs)


def _rand_any_mat(draw) -> GMat:
    a, b, c, d = (draw(st.integers(min_value=-6, max_value=6)) for _ in range(4))
    return GMat(a, b, c, d)


def _rand_gmat(draw) -> GMat:
    # lower * diagonal * upper keeps the determinant visibly nonzero
    x = draw(st.integers(min_value=-3, max_value=3))
    y = draw(st.integers(min_value=-3, max_value=3))
    u = draw(st.sampled_from([-3, -2, -1, 1, 2, 3]))
    v = draw(st.sampled_from([-3, -2, -1, 1, 2, 3]))
    return GMat(1, x, 0, 1) * GMat(u, 0, 0, v) * GMat(1, 0, y, 1)


def _rand_sl2(draw) -> GMat:
    word = draw(st.lists(st.tuples(st.booleans(), st.integers(-3, 3)), max_size=6))
    g = IDENT
    for use_s, n in word:
        g = g * (S_MAT if use_s else GMat(1, n, 0, 1))
    return g


_ks = st.integers(min_value=1, max_value=4)


# frozen hand-checked values


def test_subst_shift_on_xy():
    h = HomPoly.make(2, [0, 1, 0])  # XY
    t = GMat(1, 1, 0, 1)
    assert subst(h, t) == HomPoly.make(2, [1, 1, 0])  # Y^2 + XY


def test_subst_s_on_x_squared():
    h = HomPoly.make(2, [0, 0, 1])  # X^2
    assert subst(h, S_MAT) == HomPoly.make(2, [1, 0, 0])  # Y^2


def test_pair_frozen_values():
    x2 = HomPoly.make(2, [0, 0, 1])
    y2 = HomPoly.make(2, [1, 0, 0])
    xy = HomPoly.make(2, [0, 1, 0])
    assert pair(x2, y2) == 1
    assert pair(y2, x2) == 1
    assert pair(xy, xy) == Fraction(-1, 2)
    assert pair(x2, x2) == 0
    assert pair(x2, xy) == 0


def test_alpha_frozen():
    # alpha(X^2) = Y^2, alpha(XY) = -XY, alpha(Y^2) = X^2
    assert alpha(HomPoly.make(2, [0, 0, 1])) == HomPoly.make(2, [1, 0, 0])
    assert alpha(HomPoly.make(2, [0, 1, 0])) == HomPoly.make(2, [0, -1, 0])
    assert alpha(HomPoly.make(2, [1, 0, 0])) == HomPoly.make(2, [0, 0, 1])


def test_det_normalization_w_p():
    # act_bar by [[0,-1],[p,0]] twice is the identity for every weight
    wp = w_p_mat(5)
    for k in (1, 2, 3):
        h = HomPoly.make(k, range(1, 2 * k))
        assert act_bar(act_bar(h, wp), wp) == h


def test_w_inf_plain_substitution():
    h = HomPoly.make(3, [1, 2, 3, 4, 5])
    out = act_bar(h, W_INF)
    # X -> -X: coefficient of X^i flips sign for odd i
    assert out == HomPoly.make(3, [1, -2, 3, -4, 5])
    assert act_bar(out, W_INF) == h


# sympy-oracle and property tests


@settings(max_examples=60, deadline=None)
@given(st.data(), _ks)
def test_subst_matches_sympy(data, k):
    h = _rand_poly(data.draw, k)
    g = _rand_any_mat(data.draw)
    assert subst(h, g) == _sympy_subst(h, g)


@settings(max_examples=40, deadline=None)
@given(st.data(), _ks)
def test_bar_action_composes(data, k):
    h = _rand_poly(data.draw, k)
    g1 = _rand_gmat(data.draw)
    g2 = _rand_gmat(data.draw)
    assert act_bar(act_bar(h, g1), g2) == act_bar(h, g1 * g2)


@settings(max_examples=40, deadline=None)
@given(st.data(), _ks)
def test_star_action_composes(data, k):
    h = _rand_poly(data.draw, k)
    g1 = _rand_gmat(data.draw)
    g2 = _rand_gmat(data.draw)
    assert act_star(act_star(h, g1), g2) == act_star(h, g1 * g2)


@settings(max_examples=40, deadline=None)
@given(st.data(), _ks)
def test_alpha_intertwines_actions(data, k):
    # alpha(act_bar(h, g)) = act_star(alpha(h), g), any nonsingular g
    h = _rand_poly(data.draw, k)
    g = _rand_gmat(data.draw)
    assert alpha(act_bar(h, g)) == act_star(alpha(h), g)


@settings(max_examples=40, deadline=None)
@given(st.data(), _ks)
def test_pair_star_invariance_sl2(data, k):
    h1 = _rand_poly(data.draw, k)
    h2 = _rand_poly(data.draw, k)
    g = _rand_sl2(data.draw)
    assert pair(act_star(h1, g), act_star(h2, g)) == pair(h1, h2)


@settings(max_examples=40, deadline=None)
@given(st.data(), _ks)
def test_pair_adjunction(data, k):
    h1 = _rand_poly(data.draw, k)
    h2 = _rand_poly(data.draw, k)
    g = _rand_sl2(data.draw)
    ginv = GMat(g.d, -g.b, -g.c, g.a)  # exact integer inverse for det 1
    assert pair(act_star(h1, ginv), h2) == pair(h1, act_star(h2, g))


@settings(max_examples=30, deadline=None)
@given(st.data(), _ks)
def test_pair_symmetry_sign(data, k):
    # <h1, h2> = (-1)^d <h2, h1> with d = 2k-2 even, so the pairing is symmetric
    h1 = _rand_poly(data.draw, k)
    h2 = _rand_poly(data.draw, k)
    assert pair(h1, h2) == pair(h2, h1)


def test_action_matrix_columns():
    g = GMat(1, 2, 3, 4)
    m = action_matrix(g, 2)
    for i in range(3):
        img = act_bar(HomPoly.monomial(2, i), g)
        assert [m[r][i] for r in range(3)] == list(img.coeffs)


def test_json_round_trip():
    h = HomPoly.make(3, [Fraction(1, 3), -2, 0, Fraction(7, 5), 4])
    assert HomPoly.from_json(h.to_json()) == h
    g = GMat(2, -1, Fraction(1, 5), 3)
    assert GMat.from_json(g.to_json()) == g


def test_weight_mismatch_rejected():
    with pytest.raises(ValueError):
        pair(HomPoly.zero(2), HomPoly.zero(3))
