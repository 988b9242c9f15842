"""Exact lifts of p-new modular symbols to half-integral weight q-series.

The pipeline: polynomial coefficient modules and matrix actions (polyact),
indefinite binary quadratic forms and their Gamma_0(p) classes (qforms),
modular symbol spaces with Hecke and involution operators (modsym), residue
cocycles on the local tree (cocycle), the lift itself and its half-integral
Hecke action (shintani), independent verifiers (oracle), and the workspace,
report, and cli plumbing around them.
"""

from .cocycle import CocycleRes, pnew_cocycles
from .modsym import ModSym, MSSpace
from .polyact import GMat, HomPoly
from .qforms import ProjRat, QForm, classes_for_disc, enumerate_classes
from .shintani import (
    QExpansion,
    equivariance_report,
    halfint_hecke,
    icoeff,
    lift,
    lift_pm,
    project_pm,
)
from .workspace import Workspace

__all__ = [
    "CocycleRes",
    "GMat",
    "HomPoly",
    "ModSym",
    "MSSpace",
    "ProjRat",
    "QExpansion",
    "QForm",
    "Workspace",
    "classes_for_disc",
    "enumerate_classes",
    "equivariance_report",
    "halfint_hecke",
    "icoeff",
    "lift",
    "lift_pm",
    "pnew_cocycles",
    "project_pm",
]

__version__ = "0.1.0"
