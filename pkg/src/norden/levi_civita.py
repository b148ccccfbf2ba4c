"""Levi-Civita connection of a left-invariant Norden metric and the tensors built from it."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .algebra import DOWN, UP, Tensor, cyclic_sum, jform, max_abs
from .lie import ManifoldSpec, bracket_lowered, killing_associated_residual

KAHLER = "Kähler"
QUASI_KAHLER = "quasi-Kähler"
OTHER = "other"


class InconsistencyError(RuntimeError):
    """Two independent evaluations of the same quantity disagree."""


class NotKillingError(ValueError):
    pass


@dataclass(frozen=True)
class Connection:
    """Constant coefficients ``gamma[i, j, k] = Γ^k_ij``, i.e. ∇_{X_i} X_j = Γ^k_ij X_k."""

    gamma: Tensor

    def __post_init__(self):
        if self.gamma.valence != (DOWN, DOWN, UP):
            raise ValueError(f"connection coefficients need valence ddu, got {self.gamma.valence}")

    @property
    def data(self) -> np.ndarray:
        return self.gamma.data

    @property
    def dim(self) -> int:
        return self.gamma.dim

    def covariant(self, x, y) -> np.ndarray:
        """∇_x y for constant-coefficient vectors x, y."""
        return np.einsum("i,j,ijk->k", np.asarray(x), np.asarray(y), self.data, optimize=True)

    def __add__(self, other: "Connection") -> "Connection":
        return Connection(self.gamma + other.gamma)

    def __sub__(self, other: "Connection") -> "Connection":
        return Connection(self.gamma - other.gamma)

    def scale(self, c) -> "Connection":
        return Connection(self.gamma.scale(c))

    @classmethod
    def from_array(cls, data) -> "Connection":
        return cls(Tensor(data, (DOWN, DOWN, UP)))


@dataclass(frozen=True)
class FundamentalTensor:
    """F(x, y, z) = g((∇_x J) y, z)."""

    F: Tensor

    @property
    def data(self) -> np.ndarray:
        return self.F.data

    def property_residuals(self, spec: ManifoldSpec) -> dict[str, object]:
        """Max-norms of the three standard symmetries of F (all vanish on a Norden manifold)."""
        F, J = self.data, spec.J
        return {
            "F(x,y,z)=F(x,z,y)": max_abs(F - np.transpose(F, (0, 2, 1))),
            "F(x,y,z)=F(x,Jy,Jz)": max_abs(F - jform(F, J, "x,Jy,Jz->xyz")),
            "F(x,Jy,z)=-F(x,y,Jz)": max_abs(jform(F, J, "x,Jy,z->xyz") + jform(F, J, "x,y,Jz->xyz")),
        }


@dataclass(frozen=True)
class ClassVerdict:
    label: str
    cyclic_residual: Tensor
    F: FundamentalTensor

    @property
    def is_kahler(self) -> bool:
        return self.label == KAHLER

    @property
    def is_quasi_kahler(self) -> bool:
        """True for the class W3, which contains the Kähler class."""
        return self.label in (KAHLER, QUASI_KAHLER)


def levi_civita(spec: ManifoldSpec) -> Connection:
    """Koszul formula for left-invariant fields with constant metric components:

    2 g(∇_{X_i} X_j, X_k) = g([X_i,X_j],X_k) + g([X_k,X_i],X_j) + g([X_k,X_j],X_i).
    """
    spec.require_valid()
    return _levi_civita(spec)


@lru_cache(maxsize=256)
def _levi_civita(spec: ManifoldSpec) -> Connection:
    B = bracket_lowered(spec)
    half = spec.arith.scalar(Fraction(1, 2))
    lowered = half * (B + np.einsum("kij->ijk", B) + np.einsum("kji->ijk", B))
    return Connection.from_array(np.einsum("ijk,kl->ijl", lowered, spec.g_inv))


@lru_cache(maxsize=1024)
def nabla_J(spec: ManifoldSpec, conn: Connection) -> Tensor:
    """``out[i, j, k]`` = k-th component of (∇_{X_i} J) X_j = ∇_{X_i}(J X_j) − J ∇_{X_i} X_j."""
    G, J = conn.data, spec.J
    nab_Jx = np.einsum("mj,imk->ijk", J, G)
    J_nab = np.einsum("ijm,km->ijk", G, J)
    return Tensor(nab_Jx - J_nab, (DOWN, DOWN, UP))


def lower_last(spec: ManifoldSpec, t: Tensor | np.ndarray) -> np.ndarray:
    data = t.data if isinstance(t, Tensor) else t
    return np.tensordot(data, spec.g, axes=([-1], [0]))


def raise_last(spec: ManifoldSpec, t: Tensor | np.ndarray) -> np.ndarray:
    data = t.data if isinstance(t, Tensor) else t
    return np.tensordot(data, spec.g_inv, axes=([-1], [0]))


def f_tensor(spec: ManifoldSpec, conn: Connection | None = None) -> FundamentalTensor:
    conn = conn or levi_civita(spec)
    return FundamentalTensor(Tensor.covariant(lower_last(spec, nabla_J(spec, conn))))


@lru_cache(maxsize=256)
def classify(spec: ManifoldSpec) -> ClassVerdict:
    """Kähler if F vanishes, quasi-Kähler if only its cyclic sum does, otherwise ``other``."""
    F = f_tensor(spec)
    residual = Tensor.covariant(cyclic_sum(F.data))
    if spec.arith.is_zero(F.data):
        label = KAHLER
    elif spec.arith.is_zero(residual.data):
        label = QUASI_KAHLER
    else:
        label = OTHER
    return ClassVerdict(label, residual, F)


def _norm_forms(spec: ManifoldSpec):
    P = nabla_J(spec, levi_civita(spec)).data
    gi = spec.g_inv
    # P[i, k, :] is (∇_{e_i} J) e_k
    Pl = lower_last(spec, P)
    direct = np.einsum("ij,ks,ikm,jsm->", gi, gi, P, Pl, optimize=True)
    swapped = -2 * np.einsum("ij,ks,ikm,sjm->", gi, gi, P, Pl, optimize=True)
    return direct[()] if isinstance(direct, np.ndarray) else direct, (
        swapped[()] if isinstance(swapped, np.ndarray) else swapped
    )


@dataclass(frozen=True)
class SquareNorm:
    value: object
    swapped_form: object
    forms_agree: bool
    checked: bool  # whether agreement was required (quasi-Kähler input)


@lru_cache(maxsize=256)
def square_norm_report(spec: ManifoldSpec) -> SquareNorm:
    """‖∇J‖ by the defining contraction and by its swapped-index (−2×) form.

    The two forms are only proven equal on quasi-Kähler manifolds; there a
    mismatch raises :class:`InconsistencyError`, elsewhere it is reported.
    """
    direct, swapped = _norm_forms(spec)
    agree = spec.arith.equal(direct, swapped)
    required = classify(spec).is_quasi_kahler
    if required and not agree:
        raise InconsistencyError(f"square norm forms disagree: {direct} vs {swapped}")
    return SquareNorm(direct, swapped, agree, required)


def square_norm_nabla_j(spec: ManifoldSpec):
    return square_norm_report(spec).value


def is_isotropic_kahler(spec: ManifoldSpec) -> bool:
    return spec.arith.is_zero(square_norm_nabla_j(spec))


# --- closed forms valid when the associated metric is Killing ---------------


def _require_killing(spec: ManifoldSpec):
    if not spec.arith.is_zero(killing_associated_residual(spec)):
        raise NotKillingError("associated metric is not Killing")


def killing_levi_civita(spec: ManifoldSpec) -> Connection:
    """2∇_{X_i}X_j = [X_i,X_j] − J[X_i,JX_j] + J[JX_i,X_j]."""
    spec.require_valid()
    _require_killing(spec)
    C, J = spec.C, spec.J
    br_x_Jy = np.einsum("mj,imk->ijk", J, C)      # [X_i, J X_j]
    br_Jx_y = np.einsum("mi,mjk->ijk", J, C)      # [J X_i, X_j]
    two = C - np.einsum("ijm,km->ijk", br_x_Jy, J) + np.einsum("ijm,km->ijk", br_Jx_y, J)
    return Connection.from_array(two * spec.arith.scalar(Fraction(1, 2)))


def killing_nabla_j(spec: ManifoldSpec) -> Tensor:
    """2(∇_{X_i} J) X_j = J[JX_i, JX_j] + [JX_i, X_j]."""
    spec.require_valid()
    _require_killing(spec)
    C, J = spec.C, spec.J
    br_Jx_Jy = np.einsum("mi,nj,mnk->ijk", J, J, C, optimize=True)
    br_Jx_y = np.einsum("mi,mjk->ijk", J, C)
    two = np.einsum("ijm,km->ijk", br_Jx_Jy, J) + br_Jx_y
    return Tensor(two * spec.arith.scalar(Fraction(1, 2)), (DOWN, DOWN, UP))
