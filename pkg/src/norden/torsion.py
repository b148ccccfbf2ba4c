"""Torsion tensors, their four-part projection, and naturality tests for connections."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .algebra import Tensor, TensorError, jform, max_abs
from .levi_civita import Connection, f_tensor, levi_civita, lower_last, nabla_J
from .lie import ManifoldSpec


@dataclass(frozen=True)
class TorsionTensor:
    """T(x, y, z) = g(T(x, y), z); skew in its first two slots."""

    T: Tensor

    def __post_init__(self):
        d = self.T.data
        if d.ndim != 3:
            raise TensorError("torsion must be a (0,3)-tensor")
        if not self.T.arith.is_zero(d + np.transpose(d, (1, 0, 2))):
            raise TensorError("torsion tensor is not skew in its first two slots")

    @property
    def data(self) -> np.ndarray:
        return self.T.data

    def is_three_form(self) -> bool:
        return is_three_form(self.data)


def is_three_form(data: np.ndarray, tol: float | None = None) -> bool:
    t = Tensor.covariant(data)
    arith = t.arith if tol is None else type(t.arith)(t.arith.mode, tol)
    return arith.is_zero(data + np.transpose(data, (1, 0, 2))) and arith.is_zero(
        data + np.transpose(data, (0, 2, 1))
    )


@dataclass(frozen=True)
class TorsionProjectionSet:
    p1: Tensor
    p2: Tensor
    p3: Tensor
    p4: Tensor

    def __iter__(self):
        return iter((self.p1, self.p2, self.p3, self.p4))

    def total(self) -> Tensor:
        return self.p1 + self.p2 + self.p3 + self.p4

    def vanishing(self) -> tuple[bool, bool, bool, bool]:
        return tuple(p.is_zero() for p in self)


def torsion_of(spec: ManifoldSpec, conn: Connection) -> TorsionTensor:
    """T^k_ij = Γ^k_ij − Γ^k_ji − C^k_ij, lowered with g."""
    G = conn.data
    vec = G - np.transpose(G, (1, 0, 2)) - spec.C
    return TorsionTensor(Tensor.covariant(lower_last(spec, vec)))


# Each projector is a signed sum of T evaluated on permuted, partly J-rotated
# arguments; the tables list (coefficient, arguments) exactly as the identities read.
_P1 = (4, [(1, "x,y,z"), (-1, "Jx,Jy,z"), (-1, "Jx,y,Jz"), (-1, "x,Jy,Jz")])
_P2 = (4, [(1, "x,y,z"), (-1, "Jx,Jy,z"), (1, "Jx,y,Jz"), (1, "x,Jy,Jz")])
_P3 = (8, [
    (2, "x,y,z"), (-1, "y,z,x"), (-1, "z,x,y"), (-1, "Jy,z,Jx"),
    (-1, "z,Jx,Jy"), (2, "Jx,Jy,z"), (-1, "Jy,Jz,x"),
    (-1, "Jz,Jx,y"), (1, "y,Jz,Jx"), (1, "Jz,x,Jy"),
])
_P4 = (8, [
    (2, "x,y,z"), (1, "y,z,x"), (1, "z,x,y"), (1, "Jy,z,Jx"),
    (1, "z,Jx,Jy"), (2, "Jx,Jy,z"), (1, "Jy,Jz,x"),
    (1, "Jz,Jx,y"), (-1, "y,Jz,Jx"), (-1, "Jz,x,Jy"),
])


def _projector(spec: ManifoldSpec, T: np.ndarray, table) -> Tensor:
    denom, terms = table
    acc = sum(c * jform(T, spec.J, f"{args}->xyz") for c, args in terms)
    return Tensor.covariant(acc * spec.arith.scalar(Fraction(1, denom)))


def project_torsion(spec: ManifoldSpec, T: TorsionTensor | Tensor | np.ndarray) -> TorsionProjectionSet:
    if not isinstance(T, TorsionTensor):
        T = TorsionTensor(T if isinstance(T, Tensor) else Tensor.covariant(T))
    return TorsionProjectionSet(*(_projector(spec, T.data, tab) for tab in (_P1, _P2, _P3, _P4)))


def torsion_projection(spec: ManifoldSpec, T: TorsionTensor | Tensor | np.ndarray, which: int) -> Tensor:
    """The single projection p_which (1..4) of T."""
    data = T.data if isinstance(T, (TorsionTensor, Tensor)) else np.asarray(T)
    return _projector(spec, data, (_P1, _P2, _P3, _P4)[which - 1])


def hayden_q(T: TorsionTensor | Tensor | np.ndarray) -> Tensor:
    """Q(x,y,z) = ½{T(x,y,z) − T(y,z,x) + T(z,x,y)}: the metric connection with torsion T."""
    if not isinstance(T, TorsionTensor):
        T = TorsionTensor(T if isinstance(T, Tensor) else Tensor.covariant(T))
    d = T.data
    half = T.T.arith.scalar(Fraction(1, 2))
    return Tensor.covariant(half * (d - np.einsum("yzx->xyz", d) + np.einsum("zxy->xyz", d)))


def transformation_tensor(spec: ManifoldSpec, conn: Connection) -> np.ndarray:
    """Q(x, y, z) = g(∇'_x y − ∇_x y, z) relative to the Levi-Civita connection."""
    return lower_last(spec, conn.data - levi_civita(spec).data)


def naturality_residuals(spec: ManifoldSpec, conn: Connection):
    """(max |∇'J|, max |∇'g|); both vanish iff the connection is natural."""
    spec.require_valid()
    res_J = max_abs(nabla_J(spec, conn).data)
    Q = transformation_tensor(spec, conn)
    # (∇'_x g)(y, z) = −g(Q(x,y), z) − g(y, Q(x,z))
    res_g = max_abs(-Q - np.transpose(Q, (0, 2, 1)))
    return res_J, res_g


def natural_conditions_residual(spec: ManifoldSpec, Q, F=None):
    """Residuals of F(x,y,z) = Q(x,y,Jz) − Q(x,Jy,z) and Q(x,y,z) = −Q(x,z,y)."""
    Qd = Q.data if isinstance(Q, Tensor) else np.asarray(Q)
    Fd = (F if F is not None else f_tensor(spec)).data
    first = Fd - jform(Qd, spec.J, "x,y,Jz->xyz") + jform(Qd, spec.J, "x,Jy,z->xyz")
    second = Qd + np.transpose(Qd, (0, 2, 1))
    return max_abs(first), max_abs(second)
