"""Quadratic form arithmetic against brute-force oracles.

Pell solutions are checked by direct search, the star action against the
polynomial star action, and reduction/cycle structure by exhaustion.
"""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from rslift.polyact import GMat, act_star
from rslift.qforms import (
    PROJ_INF,
    PROJ_ZERO,
    ProjRat,
    QForm,
    all_reduced_forms,
    automorph,
    automorph_label_perm,
    classes_for_disc,
    column_label,
    cycle,
    enumerate_classes,
    is_reduced,
    is_square,
    left_coset_reps,
    pell_fundamental,
    reduce_form,
    shintani_cycle,
    sl2_class_reps,
    valid_discriminants,
)


def _pell_brute(d: int, umax: int = 4000) -> tuple[int, int]:
    """Oracle: smallest u > 0 with 4 + d u^2 a perfect square."""
    from math import isqrt

    for u in range(1, umax + 1):
        val = 4 + d * u * u
        t = isqrt(val)
        if t * t == val:
            return t, u
    raise AssertionError(f"no Pell solution found for D={d} with u <= {umax}")


def _pell_sympy(d: int) -> tuple[int, int]:
    """Independent oracle: sympy's Pell machinery for x^2 - d y^2 = 4."""
    from sympy.solvers.diophantine.diophantine import diop_DN

    sols = [(abs(t), abs(u)) for t, u in diop_DN(d, 4) if u != 0]
    assert sols, f"sympy found no solution for D={d}"
    return min(sols)


def _rand_gamma0(rng: random.Random, p: int) -> GMat:
    g = GMat(1, 0, 0, 1)
    for _ in range(rng.randint(1, 6)):
        if rng.random() < 0.5:
            g = g * GMat(1, rng.randint(-3, 3), 0, 1)
        else:
            g = g * GMat(1, 0, p * rng.randint(-2, 2), 1)
    return g


def test_projrat_normalization():
    assert ProjRat(2, 4) == ProjRat(1, 2)
    assert ProjRat(-3, -6) == ProjRat(1, 2)
    assert ProjRat(3, -6) == ProjRat(-1, 2)
    assert ProjRat(5, 0) == PROJ_INF
    with pytest.raises(ValueError):
        ProjRat(0, 0)


def test_projrat_moebius():
    g = GMat(4, -1, 5, -1)
    assert PROJ_ZERO.apply(g) == ProjRat(1, 1)
    assert PROJ_INF.apply(g) == ProjRat(4, 5)
    # 1 maps to (4-1)/(5-1) = 3/4
    assert ProjRat(1, 1).apply(g) == ProjRat(3, 4)


def test_projrat_json_round_trip():
    for pt in (PROJ_INF, PROJ_ZERO, ProjRat(-7, 3)):
        assert ProjRat.from_json(pt.to_json()) == pt


def test_star_frozen_examples():
    q = QForm(1, 5, 5)
    assert q.star(GMat(1, 1, 0, 1)) == QForm(1, -5, 5)
    assert q.star(GMat(1, 0, 0, 1)) == q
    assert q.star(GMat(4, -1, 5, -1)) == q


def test_star_matches_polynomial_star():
    rng = random.Random(5)
    for _ in range(60):
        q = QForm(rng.randint(-9, 9), rng.randint(-9, 9), rng.randint(-9, 9))
        g = _rand_gamma0(rng, rng.choice([2, 3, 5]))
        for k in (2, 3):
            assert q.star(g).poly(k) == act_star(q.poly(k), g)


def test_star_preserves_disc_and_fp():
    rng = random.Random(11)
    p = 5
    q = QForm(1, 5, 5)
    for _ in range(100):
        g = _rand_gamma0(rng, p)
        q2 = q.star(g)
        assert q2.disc == q.disc
        assert q2.in_fp(p)


def test_star_rejects_nonunimodular():
    with pytest.raises(ValueError):
        QForm(1, 0, -1).star(GMat(2, 0, 0, 1))


def test_pell_frozen_values():
    assert (pell_fundamental(5).t, pell_fundamental(5).u) == (3, 1)
    assert (pell_fundamental(8).t, pell_fundamental(8).u) == (6, 2)
    assert (pell_fundamental(12).t, pell_fundamental(12).u) == (4, 1)
    assert (pell_fundamental(20).t, pell_fundamental(20).u) == (18, 4)
    assert (pell_fundamental(45).t, pell_fundamental(45).u) == (7, 1)


def test_pell_against_brute_force():
    for d in range(5, 61):
        if d % 4 in (0, 1) and not is_square(d):
            sol = pell_fundamental(d)
            assert sol.t * sol.t - d * sol.u * sol.u == 4
            assert (sol.t, sol.u) == _pell_brute(d)


def test_pell_against_sympy():
    for d in range(5, 200):
        if d % 4 in (0, 1) and not is_square(d):
            sol = pell_fundamental(d)
            assert (sol.t, sol.u) == _pell_sympy(d)


def test_pell_rejects_squares():
    with pytest.raises(ValueError):
        pell_fundamental(16)
    with pytest.raises(ValueError):
        pell_fundamental(-5)


def test_automorph_frozen_example():
    g = automorph(QForm(1, 5, 5), 5)
    assert g == GMat(4, -1, 5, -1)
    assert int(g.a) + int(g.d) == 3


def test_automorph_properties_random():
    rng = random.Random(23)
    p = 5
    base = classes_for_disc(p, 5) + classes_for_disc(p, 40) + classes_for_disc(p, 65)
    count = 0
    while count < 100:
        q = rng.choice(base).star(_rand_gamma0(rng, p))
        g = automorph(q, p)
        assert q.star(g) == q
        assert g.in_gamma0(p)
        assert g != GMat(1, 0, 0, 1) and g != GMat(-1, 0, 0, -1)
        count += 1


def test_automorph_of_imprimitive_form_is_generator():
    # content 2, disc 48 = 4 * 12: the stabilizer generator comes from the
    # primitive part's Pell pair (4, 1), not from pell(48) = (14, 2)
    q = QForm(2, 0, -6)
    g = automorph(q, 3)
    assert q.star(g) == q
    assert int(g.a) + int(g.d) == 4  # trace t0 of the primitive part
    # pell of the full discriminant would have produced trace 14
    assert pell_fundamental(48).t == 14


def test_reduction_reaches_reduced_and_preserves_class():
    rng = random.Random(31)
    for _ in range(60):
        while True:
            q = QForm(rng.randint(-12, 12), rng.randint(-12, 12), rng.randint(-12, 12))
            if q.disc > 0 and not is_square(q.disc):
                break
        red, g = reduce_form(q)
        assert is_reduced(red)
        assert q.star(g) == red


def test_cycle_closes_and_alternates_sign():
    for d in (12, 13, 40, 145):
        forms = all_reduced_forms(d)
        assert forms
        cyc, steps = cycle(forms[0])
        assert len(steps) == len(cyc)
        assert len(cyc) % 2 == 0
        for f in cyc:
            assert is_reduced(f)
            assert f.a * f.c < 0


def test_all_reduced_forms_exhaustive():
    # brute force over a box certainly containing all reduced forms
    for d in (5, 12, 21, 40):
        s = int(d**0.5)
        brute = set()
        for a in range(-s - 1, s + 2):
            for b in range(1, s + 1):
                if a == 0 or (b * b - d) % (4 * a):
                    continue
                q = QForm(a, b, (b * b - d) // (4 * a))
                if is_reduced(q):
                    brute.add(q.key())
        assert {q.key() for q in all_reduced_forms(d)} == brute


def test_sl2_reps_square_disc():
    assert [q.key() for q in sl2_class_reps(25)] == [(0, 5, j) for j in range(5)]
    assert [q.key() for q in sl2_class_reps(4)] == [(0, 2, 0), (0, 2, 1)]


def test_shintani_cycle_frozen():
    c1 = shintani_cycle(QForm(1, 5, 0), p=5)
    assert (c1.r, c1.s) == (PROJ_INF, ProjRat(1, 5))
    c2 = shintani_cycle(QForm(1, 5, 5), PROJ_ZERO, 5)
    assert (c2.r, c2.s) == (PROJ_ZERO, ProjRat(1, 1))
    c3 = shintani_cycle(QForm(1, 5, 5), PROJ_INF, 5)
    assert (c3.r, c3.s) == (PROJ_INF, ProjRat(4, 5))
    assert c3.omega == PROJ_INF
    assert c1.omega is None


def test_shintani_cycle_square_root_invariant():
    # finite endpoints of square-disc cycles are roots of Q(1, -t)
    for q in (QForm(1, 10, 0), QForm(3, 10, 0), QForm(-2, 10, 12), QForm(7, 15, 2)):
        d = q.disc
        if not is_square(d):
            continue
        cyc = shintani_cycle(q, p=5)
        for endpoint in (cyc.r, cyc.s):
            if not endpoint.is_infinity:
                t = endpoint.as_fraction()
                assert q.value(1, -t) == 0


def test_shintani_cycle_square_b_negative():
    cyc = shintani_cycle(QForm(1, -5, 0), p=5)
    assert cyc.r == ProjRat(1, -5)
    assert cyc.s == PROJ_INF


def test_column_labels_and_reps_cover():
    for p in (2, 3, 5, 7):
        reps = left_coset_reps(p)
        labels = [column_label(int(g.a), int(g.c), p) for g in reps]
        assert labels == list(range(p + 1))


def test_automorph_perm_is_permutation():
    q = QForm(1, 5, 5)
    perm = automorph_label_perm(automorph(q, 5), 5)
    assert sorted(perm) == list(range(6))


def test_classes_frozen_examples():
    d5 = classes_for_disc(5, 5)
    assert QForm(1, 5, 5) in d5
    d25 = classes_for_disc(5, 25)
    assert QForm(1, 5, 0) in d25
    with pytest.raises(ValueError):
        classes_for_disc(5, 7)


def test_classes_are_in_fp_with_right_disc():
    for p in (3, 5):
        for d, reps in enumerate_classes(p, 60):
            for q in reps:
                assert q.in_fp(p)
                assert q.disc == d


def test_classes_pairwise_distinct():
    for p in (3, 5):
        for _, reps in enumerate_classes(p, 60):
            assert len({q.key() for q in reps}) == len(reps)


def test_valid_discriminants():
    assert valid_discriminants(5, 30) == [5, 20, 25]
    assert valid_discriminants(3, 25) == [9, 12, 21, 24]
