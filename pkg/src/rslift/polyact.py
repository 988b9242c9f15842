"""Exact arithmetic for homogeneous polynomial coefficient modules.

This module provides the degree 2k-2 homogeneous polynomial module V_k over
the rationals together with the two right actions of 2x2 matrices used
throughout the package, the main involution `alpha`, and the bilinear
pairing that couples the two actions.

Conventions, pinned once here and relied on everywhere else:

* A polynomial h of degree d = 2k-2 is stored by its coefficient tuple
  ``coeffs`` with ``coeffs[i]`` the coefficient of X^i Y^(d-i).
* ``subst(h, g)`` is plain substitution h(aX + bY, cX + dY) for
  g = [[a, b], [c, d]]; no determinant factor.
* ``act_bar(h, g)`` ("bar" action) is |det g|^(1-k) * subst(h, g).  The
  absolute value makes the orientation-reversing involution (det -1) act by
  plain substitution while keeping h -> act_bar(h, g) multiplicative in g.
* ``act_star(h, g)`` ("star" action) is |det g|^(1-k) * h(dX - cY, -bX + aY),
  substitution by the transposed adjugate.  For unimodular g the two actions
  are intertwined by ``alpha``: alpha(act_bar(h, g)) = act_star(alpha(h), g).
* ``alpha(h)`` is substitution by [[0, 1], [-1, 0]].
* ``pair(h1, h2)`` is the pairing with <X^i Y^(d-i), X^j Y^(d-j)> =
  (-1)^i * binomial(d, i)^(-1) when i + j = d and 0 otherwise.  It is
  invariant when both arguments move by the star action of a unimodular
  matrix, and satisfies the adjunction
  pair(act_star(h1, ~g), h2) = pair(h1, act_star(h2, g)).

All arithmetic is exact (ints and fractions.Fraction).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Sequence

Scalar = int | Fraction


def _frac(x: Scalar) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def scalar_to_str(x: Scalar) -> str:
    """Canonical exact string for a rational: '3', '-4', '2/7'."""
    return str(_frac(x))


def scalar_from_str(s: str) -> Fraction:
    return Fraction(s)


@dataclass(frozen=True)
class GMat:
    """A 2x2 matrix with exact rational entries and nonzero determinant.

    Integer entries are the common case (elements of SL2(Z) or Gamma_0(p));
    rational entries occur for tree-edge representatives, which live in the
    determinant-one group over Z[1/p].
    """

    a: Scalar
    b: Scalar
    c: Scalar
    d: Scalar

    def det(self) -> Fraction:
        return _frac(self.a) * _frac(self.d) - _frac(self.b) * _frac(self.c)

    def is_integral(self) -> bool:
        return all(
            isinstance(x, int) or (isinstance(x, Fraction) and x.denominator == 1)
            for x in (self.a, self.b, self.c, self.d)
        )

    def in_sl2z(self) -> bool:
        return self.is_integral() and self.det() == 1

    def in_gamma0(self, p: int) -> bool:
        return self.in_sl2z() and _frac(self.c) % p == 0

    def mul(self, other: "GMat") -> "GMat":
        a, b, c, d = self.a, self.b, self.c, self.d
        e, f, g, h = other.a, other.b, other.c, other.d
        return GMat(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    def __mul__(self, other: "GMat") -> "GMat":
        return self.mul(other)

    def inv(self) -> "GMat":
        det = self.det()
        if det == 0:
            raise ZeroDivisionError("singular matrix")
        return GMat(
            _frac(self.d) / det,
            -_frac(self.b) / det,
            -_frac(self.c) / det,
            _frac(self.a) / det,
        )

    def neg(self) -> "GMat":
        return GMat(-self.a, -self.b, -self.c, -self.d)

    def entries(self) -> tuple[Scalar, Scalar, Scalar, Scalar]:
        return (self.a, self.b, self.c, self.d)

    def to_json(self) -> dict:
        return {
            "a": scalar_to_str(self.a),
            "b": scalar_to_str(self.b),
            "c": scalar_to_str(self.c),
            "d": scalar_to_str(self.d),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "GMat":
        vals = []
        for key in ("a", "b", "c", "d"):
            f = Fraction(obj[key])
            vals.append(int(f) if f.denominator == 1 else f)
        return cls(*vals)


IDENT = GMat(1, 0, 0, 1)
S_MAT = GMat(0, 1, -1, 0)
W_INF = GMat(-1, 0, 0, 1)


def w_p_mat(p: int) -> GMat:
    """The degree-p Fricke-type matrix [[0, -1], [p, 0]]."""
    return GMat(0, -1, p, 0)


@dataclass(frozen=True)
class HomPoly:
    """Homogeneous polynomial of degree 2k-2 with exact coefficients.

    coeffs[i] is the coefficient of X^i Y^(2k-2-i); len(coeffs) == 2k-1.
    """

    k: int
    coeffs: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if len(self.coeffs) != 2 * self.k - 1:
            raise ValueError(
                f"need {2 * self.k - 1} coefficients for k={self.k}, "
                f"got {len(self.coeffs)}"
            )

    @classmethod
    def make(cls, k: int, coeffs: Iterable[Scalar]) -> "HomPoly":
        return cls(k, tuple(_frac(c) for c in coeffs))

    @classmethod
    def zero(cls, k: int) -> "HomPoly":
        return cls(k, (Fraction(0),) * (2 * k - 1))

    @classmethod
    def monomial(cls, k: int, i: int) -> "HomPoly":
        """X^i Y^(2k-2-i)."""
        d = 2 * k - 2
        if not 0 <= i <= d:
            raise ValueError(f"monomial index {i} out of range for degree {d}")
        coeffs = [Fraction(0)] * (d + 1)
        coeffs[i] = Fraction(1)
        return cls(k, tuple(coeffs))

    @property
    def degree(self) -> int:
        return 2 * self.k - 2

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def __add__(self, other: "HomPoly") -> "HomPoly":
        self._check_compatible(other)
        return HomPoly(self.k, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "HomPoly") -> "HomPoly":
        self._check_compatible(other)
        return HomPoly(self.k, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "HomPoly":
        return HomPoly(self.k, tuple(-a for a in self.coeffs))

    def scale(self, s: Scalar) -> "HomPoly":
        s = _frac(s)
        return HomPoly(self.k, tuple(s * a for a in self.coeffs))

    def _check_compatible(self, other: "HomPoly") -> None:
        if self.k != other.k:
            raise ValueError(f"weight mismatch: k={self.k} vs k={other.k}")

    def evaluate(self, x: Scalar, y: Scalar) -> Fraction:
        d = self.degree
        x, y = _frac(x), _frac(y)
        return sum((c * x**i * y ** (d - i) for i, c in enumerate(self.coeffs)), Fraction(0))

    def to_json(self) -> dict:
        return {"k": self.k, "coeffs": [scalar_to_str(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, obj: dict) -> "HomPoly":
        return cls(int(obj["k"]), tuple(Fraction(c) for c in obj["coeffs"]))


def _linear_power_table(u: Scalar, v: Scalar, n: int) -> list[list[Fraction]]:
    """Coefficient lists of (u*X + v*Y)^i for i = 0..n.

    Entry [i][j] is the coefficient of X^j Y^(i-j) in (uX + vY)^i.
    """
    u, v = _frac(u), _frac(v)
    table = [[Fraction(1)]]
    for i in range(1, n + 1):
        prev = table[-1]
        cur = [Fraction(0)] * (i + 1)
        for j, c in enumerate(prev):
            cur[j] += c * v
            cur[j + 1] += c * u
        table.append(cur)
    return table


def subst(h: HomPoly, g: GMat) -> HomPoly:
    """Plain substitution h(aX + bY, cX + dY), no determinant factor."""
    d = h.degree
    if d == 0:
        return h
    pow_first = _linear_power_table(g.a, g.b, d)
    pow_second = _linear_power_table(g.c, g.d, d)
    out = [Fraction(0)] * (d + 1)
    for i, ci in enumerate(h.coeffs):
        if ci == 0:
            continue
        fa = pow_first[i]
        fb = pow_second[d - i]
        for j1, u in enumerate(fa):
            if u == 0:
                continue
            cu = ci * u
            for j2, w in enumerate(fb):
                if w != 0:
                    out[j1 + j2] += cu * w
    return HomPoly(h.k, tuple(out))


def _det_norm(g: GMat, k: int) -> Fraction:
    det = g.det()
    if det == 0:
        raise ZeroDivisionError("singular matrix acting on polynomials")
    return abs(det) ** (1 - k)


def act_bar(h: HomPoly, g: GMat) -> HomPoly:
    """Right action |det g|^(1-k) * h(aX + bY, cX + dY)."""
    res = subst(h, g)
    norm = _det_norm(g, h.k)
    return res if norm == 1 else res.scale(norm)


def act_star(h: HomPoly, g: GMat) -> HomPoly:
    """Right action |det g|^(1-k) * h(dX - cY, -bX + aY).

    The substitution matrix is the transposed adjugate of g, so
    g -> act_star(., g) is multiplicative, and for det g = 1 this is the
    inverse-transpose twist of act_bar.
    """
    twisted = GMat(g.d, -g.c, -g.b, g.a)
    res = subst(h, twisted)
    norm = _det_norm(g, h.k)
    return res if norm == 1 else res.scale(norm)


def alpha(h: HomPoly) -> HomPoly:
    """Substitution by [[0, 1], [-1, 0]]: h(X, Y) -> h(Y, -X)."""
    return subst(h, S_MAT)


def pair(h1: HomPoly, h2: HomPoly) -> Fraction:
    """Bilinear pairing, star-invariant under SL2(Z).

    <X^i Y^(d-i), X^(d-i) Y^i> = (-1)^i / binomial(d, i); other monomial
    pairs vanish.
    """
    if h1.k != h2.k:
        raise ValueError("pairing requires equal weights")
    d = h1.degree
    total = Fraction(0)
    for i, c1 in enumerate(h1.coeffs):
        if c1 == 0:
            continue
        c2 = h2.coeffs[d - i]
        if c2 == 0:
            continue
        sign = -1 if i % 2 else 1
        total += Fraction(sign, comb(d, i)) * c1 * c2
    return total


def action_matrix(g: GMat, k: int, action=act_bar) -> list[list[Fraction]]:
    """Matrix of h -> action(h, g) on the monomial basis, columns = images."""
    n = 2 * k - 1
    cols = [action(HomPoly.monomial(k, i), g).coeffs for i in range(n)]
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def canonical_json(obj) -> str:
    """Deterministic JSON used for every serialized artifact."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"
