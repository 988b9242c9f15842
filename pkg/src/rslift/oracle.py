"""Independent verifiers for the exact pipeline.

Nothing here reuses the enumeration or lift plumbing it is meant to check.
Orbits are recomputed by exhaustive transporter search with explicit matrix
certificates, dimensions come from the classical genus count, Hecke
characteristic polynomials are checked for integrality and eigenvalue size
by exact root isolation, and a floating-point oracle integrates a cuspidal
eigenform along the closed geodesic of a form so the cycle integral can be
compared with the exact pairing route.

The numeric oracle is quarantined in this module on purpose: everything the
rest of the test suite treats as ground truth stays in rational arithmetic,
while period_oracle is allowed mpmath and advertises an error bound instead
of exactness.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from typing import Callable, Sequence

import mpmath as mp
import sympy

from . import linalg
from .modsym import MSSpace, ModSym, Vec
from .polyact import GMat, S_MAT, scalar_to_str
from .qforms import QForm, automorph, cycle, is_square, reduce_form
from .shintani import kronecker


# ---------------------------------------------------------------------------
# dimension formula


def dim_formula(p: int, k: int) -> tuple[int, int]:
    """Dimension of the weight-2k cusp space for Gamma_0(p), and cusp count.

    Genus count for prime level: mu = p + 1, e2 elliptic points of order 2,
    e3 of order 3, two cusps, g = (p+1)/12 - e2/4 - e3/3.  For even weight
    w = 2k >= 4 the cusp dimension is
    (w-1)(g-1) + (w/2 - 1)*2 + e2*floor(w/4) + e3*floor(w/3).
    """
    if not sympy.isprime(p):
        raise ValueError(f"p = {p} must be prime")
    if k < 2:
        raise ValueError("k >= 2 required; the weight-2 count is not covered")
    e2 = 1 if p == 2 else 1 + kronecker(-1, p)
    e3 = 1 if p == 3 else 1 + kronecker(-3, p)
    g = Fraction(p + 1, 12) - Fraction(e2, 4) - Fraction(e3, 3)
    if g.denominator != 1:
        raise ArithmeticError(f"genus formula gave a non-integer for p = {p}")
    w = 2 * k
    dim = (w - 1) * (int(g) - 1) + (w // 2 - 1) * 2 + e2 * (w // 4) + e3 * (w // 3)
    return dim, 2


# ---------------------------------------------------------------------------
# transporter search and orbit partitions


@dataclass(frozen=True)
class TransporterCertificate:
    """Witness that q1 . gamma = q2, or a record that none was found.

    gamma = None means the search up to entry bound `bound` was exhausted
    without a hit; a present gamma is checked exactly by verified().
    """

    q1: QForm
    q2: QForm
    gamma: GMat | None
    bound: int

    def verified(self, p: int) -> bool:
        g = self.gamma
        if g is None:
            return False
        return g.is_integral() and g.det() == 1 and g.in_gamma0(p) and self.q1.star(g) == self.q2

    def to_json(self) -> dict:
        return {
            "q1": self.q1.to_json(),
            "q2": self.q2.to_json(),
            "gamma": None if self.gamma is None else self.gamma.to_json(),
            "bound": self.bound,
        }


def _representations(q: QForm, n: int, bound: int) -> list[tuple[int, int]]:
    """Integer pairs (x, y) with q(x, y) = n and |x|, |y| <= bound."""
    if q.a == 0:
        raise ValueError("representation scan needs a nonzero leading coefficient")
    out = []
    d = q.disc
    for y in range(-bound, bound + 1):
        discx = d * y * y + 4 * q.a * n
        if discx < 0:
            continue
        s = isqrt(discx)
        if s * s != discx:
            continue
        for root in (s, -s) if s else (0,):
            num = -q.b * y + root
            if num % (2 * q.a):
                continue
            x = num // (2 * q.a)
            if abs(x) <= bound:
                out.append((x, y))
    return out


def transporter(q1: QForm, q2: QForm, p: int, bound: int) -> GMat | None:
    """gamma in Gamma_0(p) with entries bounded by `bound` and q1 . gamma = q2.

    The image form has leading coefficient q1(D, -B) and trailing coefficient
    q1(C, -A) for gamma = [[A, B], [C, D]], so candidate columns come from
    representations of q2.a and q2.c; only the determinant and the middle
    coefficient remain to check.  Returns None when the bounded search is
    exhausted, which proves nothing beyond the bound.
    """
    if q1.disc != q2.disc:
        return None
    second = _representations(q1, q2.a, bound)
    first = [(x, y) for x, y in _representations(q1, q2.c, bound) if x % p == 0]
    for x1, y1 in first:
        cc, aa = x1, -y1
        for x2, y2 in second:
            dd, bb = x2, -y2
            if aa * dd - bb * cc != 1:
                continue
            g = GMat(aa, bb, cc, dd)
            if q1.star(g) == q2:
                return g
    return None


_TRANS_CACHE: dict[tuple, tuple[GMat | None, int]] = {}


def _transporter_ladder(q1: QForm, q2: QForm, p: int, hmax: int) -> tuple[GMat | None, int]:
    """Doubling search 8, 16, ... capped at hmax, with a cross-run cache."""
    key = (p, q1.key(), q2.key())
    hit = _TRANS_CACHE.get(key)
    if hit is not None and (hit[0] is not None or hit[1] >= hmax):
        return hit
    b = 8
    while True:
        b = min(b, hmax)
        g = transporter(q1, q2, p, b)
        if g is not None or b >= hmax:
            _TRANS_CACHE[key] = (g, b)
            return g, b
        b *= 2


def forms_in_box(p: int, d: int, h: int) -> list[QForm]:
    """All forms of F_p with discriminant d and max(|a|,|b|,|c|) <= h."""
    if d <= 0:
        return []
    out = []
    for a in range(-h, h + 1):
        if a == 0 or a % p == 0:
            continue
        for b in range(-(h // p) * p, h + 1, p):
            num = b * b - d
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if abs(c) > h:
                continue
            q = QForm(a, b, c)
            if q.in_fp(p):
                out.append(q)
    return sorted(out, key=QForm.key)


@dataclass
class OrbitReport:
    p: int
    d: int
    h: int
    classes: list[list[QForm]]
    certificates: list[TransporterCertificate]

    def class_count(self) -> int:
        return len(self.classes)

    def certificates_verified(self) -> bool:
        return all(c.verified(self.p) for c in self.certificates if c.gamma is not None)

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "D": self.d,
            "H": self.h,
            "classes": [[q.to_json() for q in cls] for cls in self.classes],
            "certificates": [c.to_json() for c in self.certificates],
        }


def default_bound(p: int, d: int) -> int:
    return 4 * (isqrt(max(d, 0)) + 1) * p


def orbit_oracle(p: int, d: int, h: int | None = None) -> OrbitReport:
    """Partition the height-h box of F_p forms of discriminant d into
    Gamma_0(p) classes by exhaustive transporter search.

    Sound by construction: every merge carries a certificate that is checked
    exactly.  Complete only relative to h; a pair that is equivalent through
    matrices larger than h shows up as an extra class, never as a wrong merge.
    Forms are processed smallest first so class roots stay small and most
    joins succeed at tiny entry bounds.
    """
    if h is None:
        h = default_bound(p, d)
    forms = sorted(forms_in_box(p, d, h), key=lambda q: (max(abs(q.a), abs(q.b), abs(q.c)), q.key()))
    classes: list[list[QForm]] = []
    certs: list[TransporterCertificate] = []
    for q in forms:
        placed = False
        for members in classes:
            root = members[0]
            g, bound_used = _transporter_ladder(root, q, p, h)
            if g is not None:
                members.append(q)
                certs.append(TransporterCertificate(root, q, g, bound_used))
                placed = True
                break
            certs.append(TransporterCertificate(root, q, None, bound_used))
        if not placed:
            classes.append([q])
    for cls in classes:
        cls.sort(key=QForm.key)
    classes.sort(key=lambda cls: cls[0].key())
    return OrbitReport(p, d, h, classes, certs)


# ---------------------------------------------------------------------------
# Hecke characteristic polynomial checks


def _restrict(mat: linalg.Matrix, span: Sequence[Vec]) -> linalg.Matrix:
    """Matrix of the operator on a stable span, in the span's coordinates."""
    if not span:
        return []
    cols = linalg.transpose([list(v) for v in span])
    out_cols = []
    for v in span:
        sol = linalg.solve(cols, linalg.mat_vec(mat, list(v)))
        if sol is None:
            raise ArithmeticError("operator does not preserve the span")
        out_cols.append(sol)
    return linalg.transpose(out_cols)


@dataclass
class TraceReport:
    p: int
    k: int
    ell: int
    dim: int
    charpoly: list[Fraction]
    even_charpoly: list[Fraction]
    odd_charpoly: list[Fraction]
    integral: bool
    parts_equal: bool
    weil_ok: bool

    @property
    def passed(self) -> bool:
        return self.integral and self.parts_equal and self.weil_ok

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "k": self.k,
            "ell": self.ell,
            "dim": self.dim,
            "charpoly": [scalar_to_str(x) for x in self.charpoly],
            "even_charpoly": [scalar_to_str(x) for x in self.even_charpoly],
            "odd_charpoly": [scalar_to_str(x) for x in self.odd_charpoly],
            "integral": self.integral,
            "parts_equal": self.parts_equal,
            "weil_ok": self.weil_ok,
            "passed": self.passed,
        }


def _roots_inside(poly: Sequence[Fraction], bound_sq: int) -> bool:
    """True when all roots are real and lie strictly inside +-sqrt(bound_sq).

    Exact check: count real roots in [-B', B'] for a rational B' just below
    the bound and compare with the degree.  The 1e-9 shell between B' and the
    true bound can only turn a pass into a failure, never the reverse.
    """
    deg = len(poly) - 1
    if deg == 0:
        return True
    scale = 10**9
    blo = Fraction(isqrt(bound_sq * scale * scale), scale)
    x = sympy.Symbol("x")
    expr = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in poly], x)
    # root counting sees distinct roots, so certify the square-free part
    sqf = expr.quo(expr.gcd(expr.diff(x)))
    return sqf.count_roots(-blo, blo) == sqf.degree()


def hecke_trace_check(space: MSSpace, ell: int) -> TraceReport:
    """Integrality, even/odd agreement, and eigenvalue size for T_ell on the
    cuspidal p-new subspace.

    The size bound is |root| <= 2 l^(k - 1/2); both parts being totally real
    inside the bound is certified by exact root counting, not floating point.
    A zero subspace yields the empty passing report.
    """
    if ell == space.p:
        raise ValueError("the level prime has no trace check here; use the U operator")
    if not sympy.isprime(ell):
        raise ValueError(f"ell = {ell} must be prime")
    span = space.pnew_cuspidal_basis()
    if not span:
        one = [Fraction(1)]
        return TraceReport(space.p, space.k, ell, 0, one, one, one, True, True, True)
    even, odd = space.even_odd_split(span)
    mat = space.hecke_matrix(ell)
    cp = linalg.charpoly(_restrict(mat, span))
    cpe = linalg.charpoly(_restrict(mat, even))
    cpo = linalg.charpoly(_restrict(mat, odd))
    integral = all(c.denominator == 1 for c in cp + cpe + cpo)
    parts_equal = cpe == cpo
    weil = _roots_inside(cp, 4 * ell ** (2 * space.k - 1))
    return TraceReport(space.p, space.k, ell, len(span), cp, cpe, cpo, integral, parts_equal, weil)


# ---------------------------------------------------------------------------
# numeric period oracle


class EigenData:
    """Hecke data of a cuspidal eigen-symbol, enough to rebuild a(n).

    Prime eigenvalues are read off the symbol space's own operator matrices
    (each extraction re-verifies the eigenvector property), the eigenvalue at
    the level prime comes from U_p, and the Fricke sign from the w_p action
    on the same line.  Coefficients extend multiplicatively:
    a(l^(e+1)) = a_l a(l^e) - l^(2k-1) a(l^(e-1)) away from p, a(p^e) = a_p^e.
    """

    def __init__(
        self,
        p: int,
        k: int,
        eps: int,
        ap: Fraction,
        prime_fn: Callable[[int], Fraction] | None,
        coeff_override: Sequence[Fraction] | None = None,
        label: str = "",
    ):
        if eps not in (1, -1):
            raise ValueError("Fricke sign must be +-1")
        self.p = p
        self.k = k
        self.eps = eps
        self.ap = Fraction(ap)
        self._prime_fn = prime_fn
        self._override = None if coeff_override is None else [Fraction(x) for x in coeff_override]
        self.label = label
        self._coeffs: list[Fraction] | None = None

    @classmethod
    def from_symbol(cls, sym: ModSym, label: str = "") -> "EigenData":
        space = sym.space
        coords = [Fraction(x) for x in sym.coords]
        if all(x == 0 for x in coords):
            raise ValueError("zero symbol is not an eigenvector")
        if not space.is_cuspidal(coords):
            raise ValueError("period data requires a cuspidal eigen-symbol")

        def eig_of(mat: linalg.Matrix) -> Fraction:
            img = linalg.mat_vec(mat, coords)
            pivot = next(i for i, x in enumerate(coords) if x != 0)
            lam = Fraction(img[pivot]) / coords[pivot]
            if any(Fraction(y) != lam * x for x, y in zip(coords, img)):
                raise ValueError("input symbol is not an eigenvector")
            return lam

        eps = eig_of(space.w_p_matrix())
        if eps not in (1, -1):
            raise ValueError("w_p eigenvalue is not a sign")
        ap = eig_of(space.up_matrix())

        def prime_fn(ell: int) -> Fraction:
            return eig_of(space.hecke_matrix(ell))

        return cls(space.p, space.k, int(eps), ap, prime_fn, label=label)

    @classmethod
    def zero_stream(cls, p: int, k: int, nmax: int) -> "EigenData":
        """The identically-zero coefficient stream, for trivial checks."""
        return cls(p, k, 1, Fraction(0), None, coeff_override=[Fraction(0)] * (nmax + 1), label="zero")

    def prime_eigenvalue(self, ell: int) -> Fraction:
        if ell == self.p:
            return self.ap
        if self._prime_fn is None:
            raise ValueError("no eigenvalue source behind this data")
        return self._prime_fn(ell)

    def coefficients(self, nmax: int) -> list[Fraction]:
        """a(0..nmax) with a(0) = 0 and a(1) = 1 (or the explicit override)."""
        if self._override is not None:
            if nmax >= len(self._override):
                raise ValueError("explicit coefficient stream too short")
            return self._override[: nmax + 1]
        if self._coeffs is not None and len(self._coeffs) > nmax:
            return self._coeffs[: nmax + 1]
        a = [Fraction(0)] * (nmax + 1)
        if nmax >= 1:
            a[1] = Fraction(1)
        wt = 2 * self.k - 1
        for ell in sympy.primerange(2, nmax + 1):
            al = self.prime_eigenvalue(ell)
            power = ell
            prev, cur = Fraction(1), al
            while power <= nmax:
                a[power] = cur
                power *= ell
                if ell == self.p:
                    prev, cur = cur, cur * al
                else:
                    prev, cur = cur, al * cur - ell**wt * prev
        for n in range(2, nmax + 1):
            fac = sympy.factorint(n)
            if len(fac) > 1:
                val = Fraction(1)
                for ell, e in fac.items():
                    val *= a[ell**e]
                a[n] = val
        self._coeffs = a
        return a


def _as_int_gmat(g: GMat) -> GMat:
    if not g.is_integral():
        raise ValueError("expected an integral matrix")
    a, b, c, d = (int(x) for x in g.entries())
    return GMat(a, b, c, d)


def _word_sign(q0: QForm, p: int, word_product: GMat) -> int:
    """+1 when the reduction-cycle word is the fundamental automorph of q0,
    -1 when it is its inverse (the integral then runs backwards)."""
    gam = automorph(q0, p)
    if word_product in (gam, gam.neg()):
        return 1
    gam_inv = _as_int_gmat(gam.inv())
    if word_product in (gam_inv, gam_inv.neg()):
        return -1
    raise ArithmeticError("reduction cycle did not reproduce the fundamental automorph")


def _fseries(coeffs: Sequence[Fraction], tau, tail_dps: int | None = None) -> "mp.mpc":
    """sum a_n e^(2 pi i n tau), truncated where the tail drops below
    10^-(tail_dps + 8); raises when the stream is too short for the height.

    tail_dps is pinned by the caller rather than read from the ambient
    precision because the quadrature routine raises its working precision
    internally; tail terms below the advertised error are junk either way.
    """
    if tail_dps is None:
        tail_dps = mp.mp.dps
    qq = mp.exp(2j * mp.pi * tau)
    r = abs(qq)
    if not r < 1:
        raise ValueError("series evaluation needs positive imaginary part")
    need = int(mp.ceil((tail_dps + 8) * mp.log(10) / (-mp.log(r)))) + 1
    if need > len(coeffs) - 1:
        if any(c != 0 for c in coeffs):
            raise ValueError("coefficient stream too short for this evaluation height")
        need = len(coeffs) - 1
    acc = mp.mpc(0)
    for n in range(need, 0, -1):
        c = coeffs[n]
        acc = acc * qq + mp.mpf(c.numerator) / c.denominator
    return acc * qq


def period_oracle(data: EigenData, q: QForm, precision: int = 25):
    """Numeric cycle integral of the eigenform against Q(1, -tau)^(k-1).

    The closed geodesic of Q is walked as the reduction cycle of its
    primitive part; each step pulls back to a straight segment at height one,
    and the level structure enters through the Fricke relation, which turns
    every pulled-back evaluation into a series at height 1/p or better.  The
    basepoint drops out because the integrand is invariant under the
    stabilizer.  Advertised absolute error 10^(2 - precision).

    Only nonsquare positive discriminants name a closed geodesic; square
    ones are refused.
    """
    if precision < 8:
        raise ValueError("precision below 8 digits is refused")
    if q.disc <= 0 or is_square(q.disc):
        raise ValueError("the cycle integral needs a positive nonsquare discriminant")
    p, k = data.p, data.k
    q0, _ = q.primitive_part()
    red, amat = reduce_form(q0)
    _, steps = cycle(red)
    prod = amat
    pieces: list[tuple[GMat, int]] = []
    for m in steps:
        pieces.append((prod, int(m.a)))
        prod = prod * m
    word_product = _as_int_gmat(prod * amat.inv())
    sign = _word_sign(q0, p, word_product)
    workdps = precision + 12
    with mp.workdps(workdps):
        tail = workdps + 6
        # worst-case height along any piece is 1/p after the level fold
        need = int(p * ((tail + 8) * mp.log(10)) / (2 * mp.pi)) + 3
        coeffs = data.coefficients(need)
        total = mp.mpc(0)
        for h, n in pieces:
            h = _as_int_gmat(h)
            qp = q.star(h * S_MAT)
            if h.in_gamma0(p):
                shift = None
            else:
                shift = (int(h.d) * pow(int(h.c), -1, p)) % p
            scale = mp.mpf(data.eps) * mp.power(p, -k) if shift is not None else mp.mpf(1)

            def integrand(t, qp=qp, n=n, shift=shift, scale=scale):
                u = mp.mpc(t * n, 1)
                poly = (qp.a * u * u + qp.b * u + qp.c) ** (k - 1)
                arg = u if shift is None else (u + shift) / p
                return poly * scale * _fseries(coeffs, arg, tail) * n

            total += mp.quad(integrand, [0, 1])
        return +total * sign


@dataclass
class PeriodReport:
    """Ratio-constancy summary for one eigenform against several classes."""

    p: int
    k: int
    precision: int
    forms: list[QForm]
    numeric: list[complex]
    exact: list[Fraction]
    ratios: list[complex]
    max_deviation: float
    passed: bool

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "k": self.k,
            "precision": self.precision,
            "forms": [q.to_json() for q in self.forms],
            "numeric": [str(z) for z in self.numeric],
            "exact": [scalar_to_str(x) for x in self.exact],
            "ratios": [str(z) for z in self.ratios],
            "max_deviation": self.max_deviation,
            "passed": self.passed,
        }


def period_ratio_report(
    data: EigenData,
    exact_values: Sequence[tuple[QForm, Fraction]],
    precision: int = 25,
    digits: int = 10,
) -> PeriodReport:
    """Compare numeric cycle integrals against exact pairing values.

    Every (form, exact) pair must have a nonzero exact value; the report
    passes when all numeric/exact ratios agree to `digits` significant
    digits.  The common ratio is a period and its value is not asserted.
    """
    if any(v == 0 for _, v in exact_values):
        raise ValueError("ratio test needs nonzero exact values")
    forms = [q for q, _ in exact_values]
    exact = [Fraction(v) for _, v in exact_values]
    numeric = [period_oracle(data, q, precision) for q in forms]
    ratios = []
    with mp.workdps(precision + 12):
        for z, v in zip(numeric, exact):
            ratios.append(z * v.denominator / v.numerator)
        base = ratios[0]
        dev = 0.0
        for r in ratios:
            dev = max(dev, float(abs(r - base) / abs(base)))
    return PeriodReport(
        data.p,
        data.k,
        precision,
        forms,
        numeric,
        exact,
        ratios,
        dev,
        dev < 10.0 ** (-digits),
    )
