"""Indefinite integral binary quadratic forms and their class lists.

Covers the form arithmetic feeding the lift: the star action of unimodular
matrices, the level set F_p = {[a,b,c] : disc > 0, p not | a, p | b, p | c},
fundamental Pell solutions and automorphs, oriented cycle endpoints, and the
enumeration of F_p orbits per discriminant.

The star action on forms matches the star action on polynomials under
Q -> Q(X, Y)^(k-1): (Q . g)(x, y) = Q(dx - cy, -bx + ay) for g = [[a,b],[c,d]].

Class enumeration splits each SL2(Z) class into Gamma_0(p) orbits through the
permutation that the form's automorph induces on the p + 1 left cosets,
indexed by the first column of a matrix mod p.  Square discriminants have no
infinite-order automorph; their SL2(Z) classes are parametrized directly by
[0, m, j] for 0 <= j < m = sqrt(D), and every coset gives its own orbit.

A subtlety worth the comment: for an imprimitive form Q = lam * Q0, the Pell
solution of disc(Q) = lam^2 * disc(Q0) builds a proper power of the stabilizer
generator, not the generator.  The automorph here is always assembled from the
primitive part, which for primitive forms is the textbook matrix
((t + bu)/2, -au; cu, (t - bu)/2).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt
from typing import Iterator, Sequence

from .polyact import GMat, HomPoly, Scalar


@dataclass(frozen=True)
class ProjRat:
    """A point of the projective rational line: num/den, or infinity (1, 0)."""

    num: int
    den: int

    def __post_init__(self) -> None:
        num, den = self.num, self.den
        if den == 0:
            if num == 0:
                raise ValueError("0/0 is not a projective point")
            num = 1
        else:
            g = gcd(num, den)
            if g:
                num //= g
                den //= g
            if den < 0:
                num, den = -num, -den
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @classmethod
    def infinity(cls) -> "ProjRat":
        return cls(1, 0)

    @classmethod
    def make(cls, value) -> "ProjRat":
        if isinstance(value, ProjRat):
            return value
        f = Fraction(value)
        return cls(f.numerator, f.denominator)

    @property
    def is_infinity(self) -> bool:
        return self.den == 0

    def as_fraction(self) -> Fraction:
        if self.is_infinity:
            raise ValueError("infinity has no fraction value")
        return Fraction(self.num, self.den)

    def apply(self, g: GMat) -> "ProjRat":
        """Moebius action g(x) = (a*num + b*den) / (c*num + d*den)."""
        top = Fraction(g.a) * self.num + Fraction(g.b) * self.den
        bot = Fraction(g.c) * self.num + Fraction(g.d) * self.den
        if top == 0 and bot == 0:
            raise ZeroDivisionError("degenerate Moebius image")
        if bot == 0:
            return ProjRat.infinity()
        q = top / bot
        return ProjRat(q.numerator, q.denominator)

    def __str__(self) -> str:
        if self.is_infinity:
            return "inf"
        return f"{self.num}/{self.den}" if self.den != 1 else str(self.num)

    def to_json(self):
        return str(self)

    @classmethod
    def from_json(cls, s: str) -> "ProjRat":
        if s == "inf":
            return cls.infinity()
        return cls.make(Fraction(s))


PROJ_ZERO = ProjRat(0, 1)
PROJ_INF = ProjRat.infinity()


@dataclass(frozen=True)
class QForm:
    """Integral binary quadratic form a x^2 + b xy + c y^2."""

    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def value(self, x, y) -> Fraction:
        x, y = Fraction(x), Fraction(y)
        return self.a * x * x + self.b * x * y + self.c * y * y

    def content(self) -> int:
        g = gcd(self.a, gcd(self.b, self.c))
        if g == 0:
            raise ValueError("zero form has no content")
        return g

    def primitive_part(self) -> tuple["QForm", int]:
        g = self.content()
        return QForm(self.a // g, self.b // g, self.c // g), g

    def in_fp(self, p: int) -> bool:
        return self.disc > 0 and self.a % p != 0 and self.b % p == 0 and self.c % p == 0

    def star(self, g: GMat) -> "QForm":
        """(Q . g)(x, y) = Q(dx - cy, -bx + ay); unimodular g only."""
        if not g.is_integral() or g.det() != 1:
            raise ValueError("star action requires an integral unimodular matrix")
        ga, gb, gc, gd = (int(x) for x in g.entries())
        a, b, c = self.a, self.b, self.c
        a2 = a * gd * gd - b * gb * gd + c * gb * gb
        b2 = -2 * a * gc * gd + b * (ga * gd + gb * gc) - 2 * c * ga * gb
        c2 = a * gc * gc - b * ga * gc + c * ga * ga
        return QForm(a2, b2, c2)

    def poly(self, k: int) -> HomPoly:
        """Q(X, Y)^(k-1) as a degree 2k-2 polynomial."""
        cur = [Fraction(1)]
        base = [Fraction(self.c), Fraction(self.b), Fraction(self.a)]
        for _ in range(k - 1):
            nxt = [Fraction(0)] * (len(cur) + 2)
            for i, u in enumerate(cur):
                if u == 0:
                    continue
                for j, v in enumerate(base):
                    nxt[i + j] += u * v
            cur = nxt
        return HomPoly(k, tuple(cur))

    def to_json(self) -> dict:
        return {"a": self.a, "b": self.b, "c": self.c}

    @classmethod
    def from_json(cls, obj: dict) -> "QForm":
        return cls(int(obj["a"]), int(obj["b"]), int(obj["c"]))

    def key(self) -> tuple[int, int, int]:
        return (self.a, self.b, self.c)


@dataclass(frozen=True)
class PellSolution:
    t: int
    u: int


@dataclass(frozen=True)
class ShintaniCycle:
    r: ProjRat
    s: ProjRat
    source_form: QForm
    omega: ProjRat | None


def is_square(n: int) -> bool:
    return n >= 0 and isqrt(n) ** 2 == n


def valid_disc(D: int) -> bool:
    return D > 0 and D % 4 in (0, 1)


# reduction theory for non-square positive discriminants


def is_reduced(q: QForm) -> bool:
    """|sqrt(D) - 2|a|| < b < sqrt(D), exact integer comparisons."""
    d = q.disc
    if d <= 0 or is_square(d):
        return False
    b = q.b
    if b <= 0 or b * b >= d:
        return False
    ta = 2 * abs(q.a)
    if d >= (ta + b) ** 2:
        return False
    if ta > b and (ta - b) ** 2 >= d:
        return False
    return True


def rho_step(q: QForm) -> tuple[QForm, GMat]:
    """One reduction step: Q -> Q . g with g = [[n, -1], [1, 0]].

    The new middle coefficient is the representative of -b mod 2|c| chosen in
    the reduction window, so iterating reaches a reduced form and then walks
    its cycle.  In substitution terms the step sends (x, y) to (-y, x + ny).
    """
    if q.c == 0:
        raise ValueError("rho step undefined for c = 0 (square discriminant)")
    d = q.disc
    s = isqrt(d)
    ac = abs(q.c)
    if ac > s:
        b2 = (-q.b) % (2 * ac)
        if b2 > ac:
            b2 -= 2 * ac
    else:
        b2 = s - ((s + q.b) % (2 * ac))
    num = q.b + b2
    den = 2 * q.c
    if num % den:
        raise ArithmeticError("reduction congruence failed")
    n = num // den
    c2num = b2 * b2 - d
    if c2num % (4 * q.c):
        raise ArithmeticError("discriminant not preserved in rho step")
    out = QForm(q.c, b2, c2num // (4 * q.c))
    return out, GMat(n, -1, 1, 0)


def reduce_form(q: QForm) -> tuple[QForm, GMat]:
    """Reduced representative R and g with Q . g = R."""
    if not valid_disc(q.disc) or is_square(q.disc):
        raise ValueError("reduction requires a positive non-square discriminant")
    cur = q
    total = GMat(1, 0, 0, 1)
    for _ in range(10000):
        if is_reduced(cur):
            return cur, total
        cur, g = rho_step(cur)
        total = total * g
    raise ArithmeticError(f"reduction did not terminate for {q}")


def cycle(q: QForm) -> tuple[list[QForm], list[GMat]]:
    """The rho cycle through a reduced form and the step matrices."""
    if not is_reduced(q):
        raise ValueError("cycle starts at a reduced form")
    forms = [q]
    steps: list[GMat] = []
    cur = q
    for _ in range(100000):
        cur, g = rho_step(cur)
        steps.append(g)
        if cur == q:
            return forms, steps
        forms.append(cur)
    raise ArithmeticError(f"cycle did not close for {q}")


def _divisors(n: int) -> Iterator[int]:
    i = 1
    while i * i <= n:
        if n % i == 0:
            yield i
            if i != n // i:
                yield n // i
        i += 1


def all_reduced_forms(D: int) -> list[QForm]:
    if not valid_disc(D) or is_square(D):
        raise ValueError("need a positive non-square discriminant")
    out = []
    s = isqrt(D)
    b0 = 2 - (D % 2)  # smallest positive b with b = D mod 2
    for b in range(b0, s + 1, 2):
        n = (D - b * b) // 4  # equals -ac > 0
        for a in _divisors(n):
            for aa in (a, -a):
                q = QForm(aa, b, -n // aa)
                if is_reduced(q):
                    out.append(q)
    return sorted(out, key=QForm.key)


def sl2_class_reps(D: int) -> list[QForm]:
    """One representative per SL2(Z) class of forms of discriminant D."""
    if is_square(D):
        m = isqrt(D)
        return [QForm(0, m, j) for j in range(m)]
    remaining = {q.key() for q in all_reduced_forms(D)}
    reps = []
    while remaining:
        start = QForm(*min(remaining))
        forms, _ = cycle(start)
        for f in forms:
            remaining.discard(f.key())
        reps.append(min(forms, key=QForm.key))
    return sorted(reps, key=QForm.key)


def pell_fundamental(D: int) -> PellSolution:
    """Minimal (t, u), both positive, with t^2 - D u^2 = 4.

    Walks one full reduction cycle of the principal form of discriminant D;
    the cycle's total transformation is the fundamental automorph, from which
    (t, u) is read off.
    """
    if D <= 0 or is_square(D):
        raise ValueError("Pell solutions require a positive non-square D")
    if D % 4 not in (0, 1):
        raise ValueError("discriminant must be 0 or 1 mod 4")
    sigma = D % 2
    principal = QForm(1, sigma, (sigma * sigma - D) // 4)
    red, _ = reduce_form(principal)
    _, steps = cycle(red)
    m = GMat(1, 0, 0, 1)
    for g in steps:
        m = m * g
    if m.a + m.d < 0:
        m = m.neg()
    t = int(m.a + m.d)
    if m.c % red.c:
        raise ArithmeticError("automorph shape violated on the cycle")
    u = abs(int(m.c) // red.c)
    if t <= 0 or u <= 0 or t * t - D * u * u != 4:
        raise ArithmeticError(f"cycle walk gave no Pell solution for D={D}")
    return PellSolution(t, u)


def automorph(q: QForm, p: int) -> GMat:
    """Generator (up to sign) of the stabilizer of q in SL2(Z).

    ((t + bu)/2, -au; cu, (t - bu)/2) with (t, u) the fundamental Pell pair of
    the primitive part's discriminant and (a, b, c) the primitive part; lands
    in Gamma_0(p) whenever q is in F_p.
    """
    if is_square(q.disc):
        raise ValueError("square discriminant: no infinite-order automorph")
    q0, _ = q.primitive_part()
    sol = pell_fundamental(q0.disc)
    t, u = sol.t, sol.u
    if (t + q0.b * u) % 2:
        raise ArithmeticError("parity violation in automorph assembly")
    g = GMat((t + q0.b * u) // 2, -q0.a * u, q0.c * u, (t - q0.b * u) // 2)
    if q.star(g) != q:
        raise ArithmeticError(f"automorph does not stabilize {q}")
    if q.in_fp(p) and not g.in_gamma0(p):
        raise ArithmeticError(f"automorph escaped Gamma_0({p}) for {q}")
    return g


def shintani_cycle(q: QForm, omega: ProjRat | None = None, p: int | None = None) -> ShintaniCycle:
    """Oriented geodesic endpoints attached to q.

    Non-square discriminant: (omega, gamma_q(omega)), default omega = 0.
    Square discriminant D = m^2: the rational root pair
    ((b+m)/(2c), (b-m)/(2c)) when c != 0, else (inf, a/b) for b > 0 and
    (a/b, inf) for b < 0.
    """
    D = q.disc
    if D <= 0:
        raise ValueError("cycles require indefinite forms")
    if is_square(D):
        m = isqrt(D)
        if q.c != 0:
            r = ProjRat(q.b + m, 2 * q.c)
            s = ProjRat(q.b - m, 2 * q.c)
        elif q.b > 0:
            r, s = PROJ_INF, ProjRat(q.a, q.b)
        else:
            r, s = ProjRat(q.a, q.b), PROJ_INF
        return ShintaniCycle(r, s, q, None)
    base = PROJ_ZERO if omega is None else omega
    gq = automorph(q, p if p is not None else 1)
    return ShintaniCycle(base, base.apply(gq), q, base)


# Gamma_0(p) orbit enumeration


def left_coset_reps(p: int) -> list[GMat]:
    """Representatives of Gamma_0(p) g, labeled by first column (x : y) mod p.

    Index t in 0..p-1 carries column (1 : t); index p carries (0 : 1).
    """
    reps = [GMat(1, 0, t, 1) for t in range(p)]
    reps.append(GMat(0, -1, 1, 0))
    return reps


def column_label(x: int, y: int, p: int) -> int:
    x, y = x % p, y % p
    if x == 0:
        if y == 0:
            raise ValueError("zero column has no label")
        return p
    return (y * pow(x, -1, p)) % p


def automorph_label_perm(g: GMat, p: int) -> list[int]:
    """Permutation of the p+1 column labels under left multiplication by g."""
    cols = [(1, t) for t in range(p)] + [(0, 1)]
    out = []
    for x, y in cols:
        nx = int(g.a) * x + int(g.b) * y
        ny = int(g.c) * x + int(g.d) * y
        out.append(column_label(nx, ny, p))
    return out


def _perm_orbits(perm: Sequence[int]) -> list[list[int]]:
    seen = [False] * len(perm)
    orbits = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        orbit = []
        t = start
        while not seen[t]:
            seen[t] = True
            orbit.append(t)
            t = perm[t]
        orbits.append(orbit)
    return orbits


def _rep_sort_key(q: QForm) -> tuple:
    return (
        max(abs(q.a), abs(q.b), abs(q.c)),
        0 if q.a > 0 else 1,
        0 if q.b > 0 else 1,
        q.key(),
    )


_GAMMA0_GEN_CACHE: dict[int, list[GMat]] = {}


def _gamma0_small_elements(p: int, bound: int = 8) -> list[GMat]:
    """All of Gamma_0(p) with |entries| <= bound and |c| <= 2p, up to sign.

    T and [[1,0],[p,1]] alone do not generate Gamma_0(p) for p >= 5, so the
    canonical-representative walk uses this richer ball instead.
    """
    if p in _GAMMA0_GEN_CACHE:
        return _GAMMA0_GEN_CACHE[p]
    out = []
    seen = set()
    for c in range(0, min(2 * p, bound) + 1, p):
        for a in range(-bound, bound + 1):
            for d in range(-bound, bound + 1):
                num = a * d - 1
                if c == 0:
                    if num != 0:
                        continue
                    bs = range(-bound, bound + 1)
                else:
                    if num % c:
                        continue
                    bval = num // c
                    bs = [bval] if abs(bval) <= bound else []
                for b in bs:
                    g = GMat(a, b, c, d)
                    key = (a, b, c, d) if (a, b, c, d) > (-a, -b, -c, -d) else (-a, -b, -c, -d)
                    if key in seen or (a, b, c, d) in ((1, 0, 0, 1), (-1, 0, 0, -1)):
                        continue
                    seen.add(key)
                    out.append(g)
    _GAMMA0_GEN_CACHE[p] = out
    return out


def canonical_rep(q: QForm, p: int) -> QForm:
    """Deterministic small representative of the Gamma_0(p) orbit of q.

    Greedy descent over a ball of small Gamma_0(p) elements, moving while the
    sort key improves.  Always returns an orbit member; minimality is
    best-effort but stable across runs.
    """
    gens = _gamma0_small_elements(p)
    best = q
    for _ in range(500):
        winner = best
        for g in gens:
            cand = best.star(g)
            if _rep_sort_key(cand) < _rep_sort_key(winner):
                winner = cand
        if winner == best:
            return best
        best = winner
    return best


def classes_for_disc(p: int, D: int) -> list[QForm]:
    """Gamma_0(p) orbit representatives of {Q in F_p : disc(Q) = D}."""
    if not (valid_disc(D) and D % p == 0):
        raise ValueError(f"D={D} is not a valid F_{p} discriminant")
    reps = left_coset_reps(p)
    out = []
    for q0 in sl2_class_reps(D):
        if is_square(D):
            orbit_reps = list(range(p + 1))
        else:
            perm = automorph_label_perm(automorph(q0, p), p)
            orbit_reps = [min(orbit) for orbit in _perm_orbits(perm)]
        for t in orbit_reps:
            cand = q0.star(reps[t])
            if cand.in_fp(p):
                out.append(canonical_rep(cand, p))
    return sorted(out, key=QForm.key)


def valid_discriminants(p: int, dmax: int) -> list[int]:
    return [D for D in range(1, dmax + 1) if D % p == 0 and D % 4 in (0, 1)]


def enumerate_classes(p: int, dmax: int) -> list[tuple[int, list[QForm]]]:
    if dmax < p:
        raise ValueError("dmax must be at least p")
    return [(D, classes_for_disc(p, D)) for D in valid_discriminants(p, dmax)]


def class_list_json(p: int, D: int, reps: Sequence[QForm]) -> dict:
    return {"p": p, "D": D, "reps": [q.to_json() for q in reps]}
