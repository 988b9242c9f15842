"""Modular symbols of level Gamma_0(p) with polynomial coefficients.

The space M of Gamma_0(p)-invariant modular symbols valued in the degree
2k-2 polynomial module is presented on Manin generators: a symbol m is the
vector of values nu(x) := m{g_x 0, g_x inf}|g_x indexed by the p + 1 right
cosets x of Gamma_0(p) in SL2(Z) (labels = bottom rows in P^1(F_p)), each
value a polynomial.  The presentation relations are the classical two and
three term ones,

    nu(x sigma) + nu(x)|sigma = 0,
    nu(x) + nu(x tau)|tau^2 + nu(x tau^2)|tau = 0,

with sigma = [[0,1],[-1,0]], tau = [[-1,-1],[1,0]] (tau^3 = 1).  Their exact
kernel is computed once per (p, k) and everything else is linear algebra in
the resulting coordinates: evaluation at arbitrary cusp pairs through
continued-fraction paths, Hecke operators, the two involutions, boundary
symbols spanning the Eisenstein part, the cuspidal subspace, and the p-new
subspace cut out by the two trace conditions.

Operator normalizations (pinned project-wide):
  * hecke_t(l), l != p, and up_ms are plain-substitution sums over the
    standard degeneracy matrices (no determinant factor), the classical
    Eichler-Shimura convention: Eisenstein symbols see eigenvalue
    1 + l^(2k-1) and up_ms^2 = p^(2k-2) on the p-new part.
  * w_inf and w_p act with the |det|^(1-k) factor, so both are involutions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from . import linalg
from .polyact import (
    GMat,
    HomPoly,
    S_MAT,
    W_INF,
    act_bar,
    scalar_from_str,
    scalar_to_str,
    subst,
    w_p_mat,
)
from .qforms import PROJ_INF, PROJ_ZERO, ProjRat

TAU = GMat(-1, -1, 1, 0)
TAU2 = GMat(0, 1, -1, -1)

Vec = tuple[Fraction, ...]


def _label_of_bottom_row(c: int, d: int, p: int) -> int:
    c, d = c % p, d % p
    if d == 0:
        if c == 0:
            raise ValueError("zero bottom row")
        return p
    return (c * pow(d, -1, p)) % p


def _bottom_rows(p: int) -> list[tuple[int, int]]:
    return [(j, 1) for j in range(p)] + [(1, 0)]


def coset_reps(p: int) -> list[GMat]:
    """Right coset reps of Gamma_0(p) in SL2(Z); rep j has bottom row (j, 1),
    rep p has bottom row (1, 0)."""
    return [GMat(1, 0, j, 1) for j in range(p)] + [GMat(0, -1, 1, 0)]


def _convergent_matrices(q: Fraction) -> list[GMat]:
    """Unimodular segment matrices for the path from inf to q.

    Each g satisfies g(0) = previous convergent, g(inf) = next convergent,
    det g = 1; the path inf -> a0 -> p1/q1 -> ... -> q telescopes m{inf, q}.
    """
    num, den = q.numerator, q.denominator
    terms = []
    while den:
        a = num // den
        terms.append(a)
        num, den = den, num - a * den
    mats = []
    p_prev, q_prev = 1, 0
    p_cur, q_cur = terms[0], 1
    s = -1  # p0*q(-1) - p(-1)*q0 = -1
    mats.append(GMat(p_cur, s * p_prev, q_cur, s * q_prev))
    for a in terms[1:]:
        p_nxt, q_nxt = a * p_cur + p_prev, a * q_cur + q_prev
        s = p_nxt * q_cur - p_cur * q_nxt
        mats.append(GMat(p_nxt, s * p_cur, q_nxt, s * q_cur))
        p_prev, q_prev, p_cur, q_cur = p_cur, q_cur, p_nxt, q_nxt
    return mats


def _egcd(a: int, b: int) -> tuple[int, int, int]:
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    return old_r, old_s, old_t


class MSSpace:
    """The exact modular-symbol space for one (p, k), with cached operators."""

    def __init__(self, p: int, k: int, basis: list[Vec]):
        if k < 1:
            raise ValueError("k must be >= 1")
        self.p = p
        self.k = k
        self.vdim = 2 * k - 1
        self.nlabels = p + 1
        self.ncols = self.nlabels * self.vdim
        self.reps = coset_reps(p)
        self.basis = basis
        self._solver: tuple[list[int], linalg.Matrix] | None = None
        self._ops: dict[str, linalg.Matrix] = {}
        self._subspaces: dict[str, list[Vec]] = {}

    # construction

    @classmethod
    def build(cls, p: int, k: int) -> "MSSpace":
        vdim = 2 * k - 1
        nlab = p + 1
        rows = _build_relation_rows(p, k)
        basis = linalg.kernel_basis(rows, nlab * vdim)
        return cls(p, k, basis)

    @property
    def dim(self) -> int:
        return len(self.basis)

    # vector plumbing

    def label_of(self, g: GMat) -> int:
        return _label_of_bottom_row(int(g.c) % self.p, int(g.d) % self.p, self.p)

    def block(self, vec: Sequence[Fraction], label: int) -> HomPoly:
        base = label * self.vdim
        return HomPoly(self.k, tuple(vec[base : base + self.vdim]))

    def vector_from_blocks(self, blocks: Sequence[HomPoly]) -> Vec:
        out: list[Fraction] = []
        for b in blocks:
            out.extend(b.coeffs)
        return tuple(out)

    def vector_of(self, coords: Sequence[Fraction]) -> Vec:
        out = [Fraction(0)] * self.ncols
        for c, bvec in zip(coords, self.basis):
            if c:
                for i, x in enumerate(bvec):
                    if x:
                        out[i] += c * x
        return tuple(out)

    def coords_of(self, vec: Sequence[Fraction]) -> Vec:
        """Coordinates in the stored basis; raises if vec is outside the span."""
        if self._solver is None:
            # pivot columns of the stacked basis rows = independent coordinate
            # positions; the square slice there inverts exactly
            _, prows = linalg.rref([list(b) for b in self.basis])
            sub = [[Fraction(self.basis[j][i]) for j in range(self.dim)] for i in prows]
            self._solver = (list(prows), linalg.mat_inv(sub))
        prows, inv = self._solver
        coords = linalg.mat_vec(inv, [Fraction(vec[i]) for i in prows])
        check = self.vector_of(coords)
        if tuple(Fraction(x) for x in vec) != check:
            raise ArithmeticError("vector is not in the modular-symbol space")
        return tuple(coords)

    # evaluation at cusp pairs

    def eval_vector(self, vec: Sequence[Fraction], r: ProjRat, s: ProjRat) -> HomPoly:
        """The value m{r, s} of the symbol with Manin vector `vec`."""
        return self._eval_inf(vec, s) - self._eval_inf(vec, r)

    def _eval_inf(self, vec: Sequence[Fraction], q: ProjRat) -> HomPoly:
        """m{inf, q} via the continued-fraction path."""
        if q.is_infinity:
            return HomPoly.zero(self.k)
        total = HomPoly.zero(self.k)
        for g in _convergent_matrices(q.as_fraction()):
            label = self.label_of(g)
            h = self.block(vec, label)
            if h.is_zero():
                continue
            ginv = GMat(int(g.d), -int(g.b), -int(g.c), int(g.a))
            total = total + subst(h, ginv)
        return total

    # operators

    def _transform(self, vec: Sequence[Fraction], mats: Sequence[GMat], normalized: bool) -> Vec:
        """Manin vector of m' with m'{r,s} = sum_t act(m{t r, t s}, t)."""
        action = act_bar if normalized else subst
        blocks = []
        for gx in self.reps:
            total = HomPoly.zero(self.k)
            for t in mats:
                tg = t * gx
                val = self.eval_vector(vec, PROJ_ZERO.apply(tg), PROJ_INF.apply(tg))
                total = total + action(val, tg)
            blocks.append(total)
        return self.vector_from_blocks(blocks)

    def _operator_matrix(self, mats: Sequence[GMat], normalized: bool) -> linalg.Matrix:
        cols = []
        for bvec in self.basis:
            image = self._transform(bvec, mats, normalized)
            cols.append(list(self.coords_of(image)))
        return linalg.transpose(cols)

    def hecke_matrix(self, l: int) -> linalg.Matrix:
        """T_l for prime l != p: plain-substitution degeneracy sum."""
        if l == self.p:
            raise ValueError("use up_matrix for the prime at the level")
        key = f"hecke_{l}"
        if key not in self._ops:
            mats = [GMat(1, a, 0, l) for a in range(l)] + [GMat(l, 0, 0, 1)]
            self._ops[key] = self._operator_matrix(mats, normalized=False)
        return self._ops[key]

    def up_matrix(self) -> linalg.Matrix:
        """U_p as plain-substitution sum; squares to p^(2k-2) on p-new."""
        if "up" not in self._ops:
            mats = [GMat(1, a, 0, self.p) for a in range(self.p)]
            self._ops["up"] = self._operator_matrix(mats, normalized=False)
        return self._ops["up"]

    def w_inf_matrix(self) -> linalg.Matrix:
        if "w_inf" not in self._ops:
            self._ops["w_inf"] = self._operator_matrix([W_INF], normalized=True)
        return self._ops["w_inf"]

    def w_p_matrix(self) -> linalg.Matrix:
        if "w_p" not in self._ops:
            self._ops["w_p"] = self._operator_matrix([w_p_mat(self.p)], normalized=True)
        return self._ops["w_p"]

    # trace conditions and the p-new subspace

    def _trace_condition_matrix(self) -> linalg.Matrix:
        """(2k-1) x dim matrix of m -> (sum_x m|g_x) evaluated at {0, inf}.

        An SL2(Z)-invariant symbol vanishes iff its value at {0, inf} does,
        so this single polynomial captures the whole first trace map.
        """
        if "trace1" not in self._ops:
            cols = []
            for bvec in self.basis:
                total = HomPoly.zero(self.k)
                for gx in self.reps:
                    val = self.eval_vector(bvec, PROJ_ZERO.apply(gx), PROJ_INF.apply(gx))
                    total = total + subst(val, gx)
                cols.append(list(total.coeffs))
            self._ops["trace1"] = linalg.transpose(cols)
        return self._ops["trace1"]

    def pnew_condition_matrix(self) -> linalg.Matrix:
        """Stacked exact conditions whose kernel is the p-new subspace."""
        if "pnew_cond" not in self._ops:
            c1 = self._trace_condition_matrix()
            c2 = linalg.mat_mul(c1, self.w_p_matrix())
            self._ops["pnew_cond"] = [list(r) for r in c1] + [list(r) for r in c2]
        return self._ops["pnew_cond"]

    def pnew_basis(self) -> list[Vec]:
        if "pnew" not in self._subspaces:
            cond = self.pnew_condition_matrix()
            self._subspaces["pnew"] = linalg.kernel_basis(cond, self.dim)
        return self._subspaces["pnew"]

    def is_pnew(self, coords: Sequence[Fraction]) -> bool:
        return linalg.is_zero_vec(linalg.mat_vec(self.pnew_condition_matrix(), list(coords)))

    # boundary (Eisenstein) symbols and the cuspidal subspace

    def _classify_cusp(self, pt: ProjRat) -> tuple[str, GMat]:
        """Which cusp class of Gamma_0(p) pt lies in, with delta(base) = pt.

        Returns ("inf", delta) with delta in Gamma_0(p), delta(inf) = pt when
        p divides the denominator, else ("zero", delta), delta(0) = pt.
        """
        u, v = pt.num, pt.den
        if v % self.p == 0:
            g, x, y = _egcd(u, v)
            assert g == 1
            return "inf", GMat(u, -y, v, x)
        g, x, y = _egcd(v, u)
        assert g == 1
        a, c = x, -y
        t = (-c * pow(v, -1, self.p)) % self.p
        return "zero", GMat(a + t * u, u, c + t * v, v)

    def _boundary_symbol_vector(self, which: str) -> Vec:
        """Manin vector of the boundary symbol supported on one cusp class.

        The class value is Y^(2k-2) at inf (invariant under the stabilizer
        of inf) and X^(2k-2) at 0; other cusps contribute zero.
        """
        base_val = HomPoly.monomial(self.k, 0 if which == "inf" else 2 * self.k - 2)
        blocks = []
        for gx in self.reps:
            val = HomPoly.zero(self.k)
            for pt, sign in ((PROJ_INF.apply(gx), 1), (PROJ_ZERO.apply(gx), -1)):
                cls, delta = self._classify_cusp(pt)
                if cls != which:
                    continue
                contrib = act_bar(base_val, delta.inv())
                val = val + (contrib if sign == 1 else -contrib)
            blocks.append(subst(val, gx))
        return self.vector_from_blocks(blocks)

    def eisenstein_basis(self) -> list[Vec]:
        """Coordinates of the boundary symbols that land in the space."""
        if "eisen" not in self._subspaces:
            vecs = []
            for which in ("inf", "zero"):
                coords = self.coords_of(self._boundary_symbol_vector(which))
                vecs.append(list(coords))
            keep: list[Vec] = []
            for v in vecs:
                if linalg.rank([list(w) for w in keep] + [v]) > len(keep):
                    keep.append(tuple(v))
            self._subspaces["eisen"] = keep
        return self._subspaces["eisen"]

    def cuspidal_basis(self) -> list[Vec]:
        """Basis of the cuspidal subspace, cut out Manin-Drinfeld style.

        chi(A) kills the Eisenstein part and is invertible on the cuspidal
        part (the Eisenstein T_l eigenvalue 1 + l^(2k-1) beats the cuspidal
        bound 2 l^(k-1/2) * l^(k-1) strictly), so its column space is exactly
        the cuspidal subspace.
        """
        if "cusp" not in self._subspaces:
            l0 = 2 if self.p != 2 else 3
            a = self.hecke_matrix(l0)
            eis = self.eisenstein_basis()
            if not eis:
                self._subspaces["cusp"] = [tuple(v) for v in
                                           linalg.row_space_basis(linalg.identity(self.dim))]
                return self._subspaces["cusp"]
            cols = linalg.transpose([list(v) for v in eis])
            restr_cols = []
            for v in eis:
                image = linalg.mat_vec(a, list(v))
                sol = linalg.solve(cols, image)
                if sol is None:
                    raise ArithmeticError("Hecke operator escaped the boundary span")
                restr_cols.append(sol)
            chi = linalg.charpoly(linalg.transpose(restr_cols))
            killed = linalg.mat_poly(chi, a)
            self._subspaces["cusp"] = [tuple(v) for v in linalg.column_space_basis(killed)]
        return self._subspaces["cusp"]

    def boundary_map(self, coords: Sequence[Fraction]) -> list[Fraction]:
        """Components of a symbol along the boundary (Eisenstein) directions.

        The kernel of this map is exactly the cuspidal subspace.
        """
        eis = self.eisenstein_basis()
        cusp = self.cuspidal_basis()
        cols = linalg.transpose([list(v) for v in eis] + [list(v) for v in cusp])
        sol = linalg.solve(cols, list(coords))
        if sol is None:
            raise ArithmeticError("boundary + cuspidal failed to span the space")
        return sol[: len(eis)]

    def is_cuspidal(self, coords: Sequence[Fraction]) -> bool:
        return all(x == 0 for x in self.boundary_map(coords))

    def pnew_cuspidal_basis(self) -> list[Vec]:
        if "pnew_cusp" not in self._subspaces:
            pnew = self.pnew_basis()
            self._subspaces["pnew_cusp"] = _intersect_spans(
                pnew, self.cuspidal_basis(), self.dim
            )
        return self._subspaces["pnew_cusp"]

    def even_odd_split(self, span: Sequence[Vec]) -> tuple[list[Vec], list[Vec]]:
        """Split a w_inf-stable span into even (+1) and odd (-1) parts."""
        w = self.w_inf_matrix()
        out: tuple[list[Vec], list[Vec]] = ([], [])
        for idx, sign in enumerate((1, -1)):
            proj = []
            for v in span:
                img = linalg.mat_vec(w, list(v))
                proj.append([(Fraction(x) + sign * y) / 2 for x, y in zip(v, img)])
            out[idx].extend(tuple(r) for r in linalg.row_space_basis(proj))
        return out

    # serialization

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "k": self.k,
            "basis": [[scalar_to_str(x) for x in v] for v in self.basis],
            "ops": {
                name: [[scalar_to_str(x) for x in row] for row in mat]
                for name, mat in sorted(self._ops.items())
            },
            "subspaces": {
                name: [[scalar_to_str(x) for x in v] for v in vecs]
                for name, vecs in sorted(self._subspaces.items())
            },
        }

    @classmethod
    def from_json(cls, obj: dict) -> "MSSpace":
        space = cls(
            int(obj["p"]),
            int(obj["k"]),
            [tuple(scalar_from_str(x) for x in v) for v in obj["basis"]],
        )
        for name, mat in obj.get("ops", {}).items():
            space._ops[name] = [[scalar_from_str(x) for x in row] for row in mat]
        for name, vecs in obj.get("subspaces", {}).items():
            space._subspaces[name] = [tuple(scalar_from_str(x) for x in v) for v in vecs]
        return space


def _build_relation_rows(p: int, k: int) -> list[list[Fraction]]:
    from .polyact import action_matrix

    vdim = 2 * k - 1
    nlab = p + 1
    rows_bottom = _bottom_rows(p)

    def label_after(row: tuple[int, int], g: GMat) -> int:
        c, d = row
        return _label_of_bottom_row(
            c * int(g.a) + d * int(g.c), c * int(g.b) + d * int(g.d), p
        )

    m_sigma = action_matrix(S_MAT, k)
    m_tau = action_matrix(TAU, k)
    m_tau2 = action_matrix(TAU2, k)
    rows: list[list[Fraction]] = []
    for x, brow in enumerate(rows_bottom):
        xs = label_after(brow, S_MAT)
        xt = label_after(brow, TAU)
        xtt = label_after(brow, TAU2)
        for r in range(vdim):
            row = [Fraction(0)] * (nlab * vdim)
            row[xs * vdim + r] += 1
            for c in range(vdim):
                row[x * vdim + c] += m_sigma[r][c]
            rows.append(row)
        for r in range(vdim):
            row = [Fraction(0)] * (nlab * vdim)
            row[x * vdim + r] += 1
            for c in range(vdim):
                row[xt * vdim + c] += m_tau2[r][c]
                row[xtt * vdim + c] += m_tau[r][c]
            rows.append(row)
    return rows


def _intersect_spans(b1: Sequence[Vec], b2: Sequence[Vec], n: int) -> list[Vec]:
    """Canonical basis of span(b1) & span(b2) inside F^n."""
    if not b1 or not b2:
        return []
    cols = [list(v) for v in b1] + [[-Fraction(x) for x in v] for v in b2]
    combined = linalg.transpose(cols)
    vecs = []
    for kv in linalg.kernel_basis(combined, len(cols)):
        u = kv[: len(b1)]
        member = [Fraction(0)] * n
        for c, bvec in zip(u, b1):
            for i, x in enumerate(bvec):
                member[i] += c * x
        vecs.append(member)
    return [tuple(v) for v in linalg.row_space_basis(vecs)] if vecs else []


@dataclass(frozen=True)
class ModSym:
    """A symbol in a fixed MSSpace, stored by basis coordinates."""

    space: MSSpace
    coords: Vec

    @classmethod
    def from_coords(cls, space: MSSpace, coords: Iterable) -> "ModSym":
        c = tuple(Fraction(x) for x in coords)
        if len(c) != space.dim:
            raise ValueError("coordinate length mismatch")
        return cls(space, c)

    def vector(self) -> Vec:
        return self.space.vector_of(self.coords)

    def eval(self, r: ProjRat, s: ProjRat) -> HomPoly:
        return self.space.eval_vector(self.vector(), r, s)

    def __add__(self, other: "ModSym") -> "ModSym":
        self._check(other)
        return ModSym(self.space, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "ModSym") -> "ModSym":
        self._check(other)
        return ModSym(self.space, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def scale(self, s) -> "ModSym":
        s = Fraction(s)
        return ModSym(self.space, tuple(s * a for a in self.coords))

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def _check(self, other: "ModSym") -> None:
        if self.space is not other.space:
            raise ValueError("symbols live in different spaces")

    def hecke(self, l: int) -> "ModSym":
        return self._apply(self.space.hecke_matrix(l))

    def up_ms(self) -> "ModSym":
        return self._apply(self.space.up_matrix())

    def w_inf(self) -> "ModSym":
        return self._apply(self.space.w_inf_matrix())

    def w_p(self) -> "ModSym":
        return self._apply(self.space.w_p_matrix())

    def _apply(self, mat: linalg.Matrix) -> "ModSym":
        return ModSym(self.space, tuple(linalg.mat_vec(mat, list(self.coords))))

    def to_json(self) -> dict:
        return {
            "p": self.space.p,
            "k": self.space.k,
            "coords": [scalar_to_str(c) for c in self.coords],
        }
