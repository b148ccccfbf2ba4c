"""Small named manifolds used as fixtures beyond the four-parameter family."""

from __future__ import annotations

from fractions import Fraction

from .algebra import EXACT, Arithmetic
from .family import FamilyParams, _brackets
from .lie import LieAlgebra, ManifoldSpec, standard_structure


def _spec(dim: int, brackets: dict, arith: Arithmetic) -> ManifoldSpec:
    return ManifoldSpec(LieAlgebra.from_brackets(dim, brackets, arith), standard_structure(dim, arith), arith)


def abelian(dim: int = 4, arith: Arithmetic = EXACT) -> ManifoldSpec:
    return ManifoldSpec(LieAlgebra.abelian(dim, arith), standard_structure(dim, arith), arith)


def heisenberg_plus_line(arith: Arithmetic = EXACT) -> ManifoldSpec:
    """[X1, X2] = X3: neither Kähler nor quasi-Kähler for the standard structure."""
    return _spec(4, {(0, 1): (0, 0, 1, 0)}, arith)


def sl2_plus_line(arith: Arithmetic = EXACT) -> ManifoldSpec:
    """[X1, X2] = X4, [X1, X4] = X2, [X2, X4] = −X1: quasi-Kähler, associated metric not Killing.

    The skew-torsion natural connection here has parallel torsion and a
    Kähler curvature tensor, so the parallel-torsion formulas apply.
    """
    return _spec(4, {(0, 1): (0, 0, 0, 1), (0, 3): (0, 1, 0, 0), (1, 3): (-1, 0, 0, 0)}, arith)


def solvable_isotropic(arith: Arithmetic = EXACT) -> ManifoldSpec:
    """[X1, X2] = X1 − X3, [X1, X3] = −X2 − X4, [X2, X3] = X1 + X3: quasi-Kähler and isotropic Kähler."""
    return _spec(4, {(0, 1): (1, 0, -1, 0), (0, 2): (0, -1, 0, -1), (1, 2): (1, 0, 1, 0)}, arith)


def family_plus_plane(p: FamilyParams, arith: Arithmetic = EXACT) -> ManifoldSpec:
    """The family algebra at ``p`` extended by an abelian J-invariant plane (dimension 6).

    Frame order X1, X2, Y1, X3, X4, Y2 so that the standard structure restricts
    to the family structure on the X's and J Y1 = Y2.
    """
    place = (0, 1, 3, 4)
    brackets = {}
    for (i, j), vec in _brackets(p).items():
        out = [Fraction(0)] * 6
        for k, v in enumerate(vec):
            out[place[k]] = v
        brackets[(place[i], place[j])] = tuple(out)
    return _spec(6, brackets, arith)


def named_specs(arith: Arithmetic = EXACT) -> dict[str, ManifoldSpec]:
    return {
        "abelian": abelian(4, arith),
        "heisenberg_plus_line": heisenberg_plus_line(arith),
        "sl2_plus_line": sl2_plus_line(arith),
        "solvable_isotropic": solvable_isotropic(arith),
    }
