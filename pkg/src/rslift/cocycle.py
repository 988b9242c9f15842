"""Residue classes: harmonic, symbol-valued functions on tree edges.

A p-new modular symbol mu gives a function on the oriented edges of the
(p+1)-regular tree on which SL2(Z[1/p]) acts: the standard edge e0 (whose
oriented stabilizer is Gamma_0(p)) carries mu itself, translates carry
translated values, and flipping an edge negates.  The two trace conditions
defining the p-new subspace say exactly that the edge sums at the two
endpoints of e0 vanish, which by equivariance is harmonicity everywhere.

Conventions:
  * An edge is stored through a matrix g with g * e = e0 plus a flip bit;
    the cocycle value is c(e){r, s} = mu{g r, g s}|g (act_bar, so scaling
    g is harmless), negated when flipped.  Changing the choice of g
    multiplies it on the left by an element of Gamma_0(p) and leaves the
    value unchanged.
  * Vertex 0 is the source of e0, vertex 1 its target; the edges out of
    vertex 0 are u_j * e0 for the p + 1 left coset reps u_j, those out of
    vertex 1 are their w_p-conjugates applied to the flipped edge.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import linalg
from .modsym import ModSym, MSSpace
from .polyact import GMat, HomPoly, act_bar, scalar_from_str, scalar_to_str, w_p_mat
from .qforms import PROJ_INF, PROJ_ZERO, ProjRat, left_coset_reps


@dataclass(frozen=True)
class TreeEdge:
    """Oriented edge of the tree, as a transporter to the standard edge."""

    to_std: GMat
    flip: bool = False

    @classmethod
    def standard(cls) -> "TreeEdge":
        return cls(GMat(1, 0, 0, 1), False)

    def flipped(self) -> "TreeEdge":
        return TreeEdge(self.to_std, not self.flip)

    def translate(self, g: GMat) -> "TreeEdge":
        """The edge g * self; transporters compose on the right by g^-1."""
        return TreeEdge(self.to_std * g.inv(), self.flip)


def vertex_edges(p: int, vertex: int) -> list[TreeEdge]:
    """The p + 1 edges with the given endpoint of e0 as source."""
    if vertex == 0:
        return [TreeEdge(u.inv(), False) for u in left_coset_reps(p)]
    if vertex == 1:
        w = w_p_mat(p)
        winv = w.inv()
        return [
            TreeEdge((w * u * winv).inv(), True) for u in left_coset_reps(p)
        ]
    raise ValueError("vertex must be 0 or 1")


def _spanning_pairs(space: MSSpace) -> list[tuple[ProjRat, ProjRat]]:
    """Cusp pairs whose values determine any edge sum at either vertex."""
    pairs = [(PROJ_ZERO, PROJ_INF)]
    for g in space.reps:
        pairs.append((PROJ_ZERO.apply(g), PROJ_INF.apply(g)))
    return pairs


class CocycleRes:
    """A residue class: a p-new symbol spread harmonically over tree edges."""

    def __init__(self, symbol: ModSym, require_pnew: bool = True):
        if require_pnew and not symbol.space.is_pnew(symbol.coords):
            raise ValueError("symbol does not satisfy the p-new trace conditions")
        self.symbol = symbol
        self.space = symbol.space
        self.p = symbol.space.p
        self.k = symbol.space.k

    @classmethod
    def from_coords(cls, space: MSSpace, coords, require_pnew: bool = True) -> "CocycleRes":
        return cls(ModSym.from_coords(space, coords), require_pnew)

    def value(self, edge: TreeEdge, r: ProjRat, s: ProjRat) -> HomPoly:
        g = edge.to_std
        val = self.symbol.eval(r.apply(g), s.apply(g))
        out = act_bar(val, g)
        return -out if edge.flip else out

    def is_cuspidal(self) -> bool:
        return self.space.is_cuspidal(self.symbol.coords)

    def is_zero(self) -> bool:
        return self.symbol.is_zero()

    # operators

    def up(self) -> "CocycleRes":
        """U_p; on this p-new space it coincides with -p^(k-1) * w_p."""
        return CocycleRes(self.symbol.up_ms(), require_pnew=False)

    def w_p(self) -> "CocycleRes":
        return CocycleRes(self.symbol.w_p(), require_pnew=False)

    def w_inf(self) -> "CocycleRes":
        return CocycleRes(self.symbol.w_inf(), require_pnew=False)

    def hecke(self, l: int) -> "CocycleRes":
        return CocycleRes(self.symbol.hecke(l), require_pnew=False)

    def eigenvalue_of(self, mat: linalg.Matrix) -> Fraction:
        """The eigenvalue if self is an eigenvector of mat, else raises."""
        img = linalg.mat_vec(mat, list(self.symbol.coords))
        lam = None
        for a, b in zip(img, self.symbol.coords):
            if b != 0:
                lam = Fraction(a) / b
                break
        if lam is None:
            raise ValueError("zero symbol has no eigenvalue")
        if img != [lam * c for c in self.symbol.coords]:
            raise ValueError("symbol is not an eigenvector")
        return lam

    def ap(self) -> Fraction:
        return self.eigenvalue_of(self.space.up_matrix())

    # harmonicity

    def harmonicity_defects(
        self,
        vertex: int,
        pairs: Sequence[tuple[ProjRat, ProjRat]] | None = None,
    ) -> list[HomPoly]:
        """Edge-sum values at the given vertex over the test pairs.

        All zero on the default pairs iff the sum vanishes identically.
        """
        if pairs is None:
            pairs = _spanning_pairs(self.space)
        edges = vertex_edges(self.p, vertex)
        out = []
        for r, s in pairs:
            total = HomPoly.zero(self.k)
            for e in edges:
                total = total + self.value(e, r, s)
            out.append(total)
        return out

    def is_harmonic(self) -> bool:
        return all(
            d.is_zero()
            for vertex in (0, 1)
            for d in self.harmonicity_defects(vertex)
        )

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "k": self.k,
            "coords": [scalar_to_str(c) for c in self.symbol.coords],
            "cuspidal": self.is_cuspidal(),
        }

    @classmethod
    def from_json(cls, obj: dict, space: MSSpace) -> "CocycleRes":
        if space.p != int(obj["p"]) or space.k != int(obj["k"]):
            raise ValueError("space does not match serialized cocycle")
        coords = [scalar_from_str(c) for c in obj["coords"]]
        res = cls.from_coords(space, coords, require_pnew=False)
        stored = bool(obj.get("cuspidal", False))
        if stored != res.is_cuspidal():
            raise ValueError("serialized cuspidality flag is inconsistent")
        return res


def pnew_cocycles(space: MSSpace, cuspidal: bool = True) -> list[CocycleRes]:
    """Basis of residues: the p-new (optionally cuspidal) symbols."""
    basis = space.pnew_cuspidal_basis() if cuspidal else space.pnew_basis()
    return [CocycleRes.from_coords(space, v) for v in basis]
