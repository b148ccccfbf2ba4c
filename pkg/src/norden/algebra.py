"""Scalars, dense tensors over an invariant frame, and small exact linear algebra.

Two scalar modes are supported.  In rational mode every component is a
:class:`fractions.Fraction` held in a numpy ``object`` array and equality is
exact.  In float mode components are ``float64`` and equality means agreement
within a fixed tolerance.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

RATIONAL = "rational"
FLOAT = "float"
MODES = (RATIONAL, FLOAT)
DEFAULT_TOL = 1e-9

UP = "u"
DOWN = "d"

Scalar = "Fraction | float"


class TensorError(ValueError):
    """Shape, valence or slot mismatch."""


class LinearAlgebraError(ArithmeticError):
    pass


@dataclass(frozen=True)
class Arithmetic:
    """Scalar mode of one computation session."""

    mode: str = RATIONAL
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown scalar mode {self.mode!r}")

    @property
    def exact(self) -> bool:
        return self.mode == RATIONAL

    @property
    def dtype(self):
        return object if self.exact else np.float64

    def scalar(self, value):
        if self.exact:
            if isinstance(value, float):
                return Fraction(value).limit_denominator(10**12)
            return Fraction(value)
        return float(value)

    def array(self, values) -> np.ndarray:
        raw = np.asarray(values, dtype=object)
        out = np.empty(raw.shape, dtype=self.dtype)
        for idx, v in np.ndenumerate(raw):
            out[idx] = self.scalar(v)
        return out

    def zeros(self, shape) -> np.ndarray:
        if self.exact:
            out = np.empty(shape, dtype=object)
            out.fill(Fraction(0))
            return out
        return np.zeros(shape)

    def eye(self, n: int) -> np.ndarray:
        out = self.zeros((n, n))
        for i in range(n):
            out[i, i] = self.scalar(1)
        return out

    def is_zero(self, x) -> bool:
        m = max_abs(x)
        return m == 0 if self.exact else m <= self.tol

    def equal(self, a, b) -> bool:
        return self.is_zero(np.asarray(a) - np.asarray(b))

    @classmethod
    def from_env(cls, default: str = RATIONAL) -> "Arithmetic":
        return cls(os.environ.get("NORDEN_MODE", default) or default)


EXACT = Arithmetic(RATIONAL)
APPROX = Arithmetic(FLOAT)


def arithmetic_of(data: np.ndarray, tol: float = DEFAULT_TOL) -> Arithmetic:
    return Arithmetic(RATIONAL if np.asarray(data).dtype == object else FLOAT, tol)


def max_abs(x):
    """Max-norm of a scalar or array; exact for rational data."""
    arr = np.asarray(x)
    if arr.size == 0:
        return Fraction(0) if arr.dtype == object else 0.0
    if arr.dtype == object:
        return max(abs(v) for v in arr.flat)
    return float(np.max(np.abs(arr)))


def parse_scalar(text, mode: str = RATIONAL):
    """Parse ``"3/2"``, ``"-0.25"``, ``"4"`` or a number into the session scalar."""
    if isinstance(text, bool):
        raise ValueError(f"not a scalar: {text!r}")
    if isinstance(text, (int, Fraction)):
        value = Fraction(text)
    elif isinstance(text, float):
        value = Fraction(text) if mode == RATIONAL else text
    elif isinstance(text, str):
        s = text.strip().replace("−", "-")
        if not s:
            raise ValueError("empty scalar")
        try:
            value = Fraction(s)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a scalar: {text!r}") from exc
    else:
        raise ValueError(f"not a scalar: {text!r}")
    return Arithmetic(mode).scalar(value)


def format_scalar(x) -> str:
    """``p/q`` for rationals, shortest round-trip decimal for floats."""
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    q = Fraction(x)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class Tensor:
    """Dense components over a frame of size ``dim``.

    ``valence[s]`` is ``"u"`` (contravariant) or ``"d"`` (covariant) for slot
    ``s``.  Components are immutable once constructed.
    """

    data: np.ndarray
    valence: tuple[str, ...]

    def __post_init__(self):
        data = np.asarray(self.data)
        valence = tuple(self.valence)
        if data.ndim != len(valence):
            raise TensorError(f"{data.ndim} axes but valence {valence}")
        if any(v not in (UP, DOWN) for v in valence):
            raise TensorError(f"bad valence {valence}")
        if data.ndim:
            n = data.shape[0]
            if any(s != n for s in data.shape):
                raise TensorError(f"non-square shape {data.shape}")
            if n < 2 or n % 2:
                raise TensorError(f"frame size must be even and >= 2, got {n}")
        object.__setattr__(self, "data", _readonly(data))
        object.__setattr__(self, "valence", valence)

    @classmethod
    def covariant(cls, data) -> "Tensor":
        data = np.asarray(data)
        return cls(data, (DOWN,) * data.ndim)

    @classmethod
    def zeros(cls, dim: int, valence: Sequence[str], arith: Arithmetic = EXACT) -> "Tensor":
        return cls(arith.zeros((dim,) * len(valence)), tuple(valence))

    @property
    def dim(self) -> int:
        return self.data.shape[0] if self.data.ndim else 0

    @property
    def rank(self) -> int:
        return self.data.ndim

    @property
    def arith(self) -> Arithmetic:
        return arithmetic_of(self.data)

    def __getitem__(self, idx):
        return self.data[idx]

    def _same_kind(self, other: "Tensor"):
        if self.data.shape != other.data.shape or self.valence != other.valence:
            raise TensorError(
                f"shape/valence mismatch: {self.data.shape}{self.valence} vs "
                f"{other.data.shape}{other.valence}"
            )

    def __add__(self, other: "Tensor") -> "Tensor":
        self._same_kind(other)
        return Tensor(self.data + other.data, self.valence)

    def __sub__(self, other: "Tensor") -> "Tensor":
        self._same_kind(other)
        return Tensor(self.data - other.data, self.valence)

    def __neg__(self) -> "Tensor":
        return Tensor(-self.data, self.valence)

    def scale(self, c) -> "Tensor":
        return Tensor(self.data * self.arith.scalar(c), self.valence)

    def max_norm(self):
        return max_abs(self.data)

    def is_zero(self, tol: float = DEFAULT_TOL) -> bool:
        return arithmetic_of(self.data, tol).is_zero(self.data)

    def __repr__(self):
        return f"Tensor(dim={self.dim}, valence={''.join(self.valence)})"


def contract(t: Tensor, slot_a: int, slot_b: int, metric: Tensor | None = None) -> Tensor:
    """Trace of ``t`` over two slots.

    Mixed slots are traced directly.  A covariant pair needs the inverse
    metric (valence ``uu``); a contravariant pair needs the metric (``dd``).
    """
    r = t.rank
    if not (0 <= slot_a < r and 0 <= slot_b < r) or slot_a == slot_b:
        raise TensorError(f"invalid slots {slot_a}, {slot_b} for rank {r}")
    va, vb = t.valence[slot_a], t.valence[slot_b]
    letters = "abcdefghijklmnop"[:r]
    rest = "".join(ch for s, ch in enumerate(letters) if s not in (slot_a, slot_b))
    valence = tuple(v for s, v in enumerate(t.valence) if s not in (slot_a, slot_b))
    if va != vb:
        ins = letters.replace(letters[slot_b], letters[slot_a])
        data = np.einsum(f"{ins}->{rest}", t.data)
    else:
        need = (UP, UP) if va == DOWN else (DOWN, DOWN)
        if metric is None:
            kind = "metric_inverse" if va == DOWN else "metric"
            raise TensorError(f"contracting two {'co' if va == DOWN else 'contra'}variant slots needs {kind}")
        if metric.valence != need or metric.dim != t.dim:
            raise TensorError(f"metric has valence {metric.valence}, expected {need}")
        a, b = letters[slot_a], letters[slot_b]
        data = np.einsum(f"{letters},{a}{b}->{rest}", t.data, metric.data)
    if not valence:
        data = data[()] if isinstance(data, np.ndarray) else data
        return Tensor(np.asarray(data, dtype=t.data.dtype), ())
    return Tensor(data, valence)


def tensor_equal(a: Tensor, b: Tensor, tol: float = DEFAULT_TOL) -> bool:
    a._same_kind(b)
    return arithmetic_of(a.data, tol).equal(a.data, b.data)


_JTOKEN = re.compile(r"^(J?)([a-zA-Z])$")


def jform(t, J, pattern: str) -> np.ndarray:
    """Evaluate a tensor on frame arguments, some hit by ``J``.

    ``pattern`` reads like the formula it encodes: ``"Jy,z,Jx->xyz"`` gives
    the array ``out[x, y, z] = t(J e_y, e_z, J e_x)``.  ``J`` may only sit on
    covariant slots; ``J[m, a]`` is the ``m``-th component of ``J e_a``.
    """
    data = t.data if isinstance(t, Tensor) else np.asarray(t)
    Jm = J.data if isinstance(J, Tensor) else np.asarray(J)
    lhs, out = pattern.replace(" ", "").split("->")
    tokens = lhs.split(",")
    if len(tokens) != data.ndim:
        raise TensorError(f"pattern {pattern!r} has {len(tokens)} slots, tensor has {data.ndim}")
    names = []
    for slot, tok in enumerate(tokens):
        m = _JTOKEN.match(tok)
        if not m:
            raise TensorError(f"bad slot token {tok!r}")
        if m.group(1):
            data = _apply_on_slot(Jm, data, slot)
        names.append(m.group(2))
    return np.einsum(f"{''.join(names)}->{out}", data)


def _signed_permutation(M: np.ndarray):
    """(perm, signs) if every column of M is ± a standard basis vector, else None."""
    perm, signs = [], []
    for a in range(M.shape[1]):
        nz = [m for m in range(M.shape[0]) if M[m, a] != 0]
        if len(nz) != 1 or abs(M[nz[0], a]) != 1:
            return None
        perm.append(nz[0])
        signs.append(M[nz[0], a] > 0)
    return perm, signs


def _apply_on_slot(Jm: np.ndarray, data: np.ndarray, slot: int) -> np.ndarray:
    # Norden frames usually make J a signed permutation; indexing then avoids
    # a full contraction, which matters for object-dtype rationals.
    sp = _signed_permutation(Jm)
    if sp is None:
        return np.moveaxis(np.tensordot(Jm, data, axes=([0], [slot])), 0, slot)
    perm, signs = sp
    moved = np.moveaxis(data, slot, 0)
    out = np.stack([moved[p] if s else -moved[p] for p, s in zip(perm, signs)])
    return np.moveaxis(out, 0, slot)


def cyclic_sum(data: np.ndarray) -> np.ndarray:
    """Cyclic sum over the first three slots."""
    rest = "wvu"[: data.ndim - 3]
    return (
        data
        + np.einsum(f"yzx{rest}->xyz{rest}", data)
        + np.einsum(f"zxy{rest}->xyz{rest}", data)
    )


def basis_vector(dim: int, i: int, arith: Arithmetic = EXACT) -> np.ndarray:
    v = arith.zeros(dim)
    v[i] = arith.scalar(1)
    return v


# --- linear algebra over the session scalars -------------------------------


@dataclass(frozen=True)
class RowEchelon:
    rows: np.ndarray
    pivots: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.pivots)


def row_reduce(matrix, tol: float = DEFAULT_TOL) -> RowEchelon:
    """Reduced row echelon form by Gauss-Jordan elimination.

    Exact for object arrays of Fractions; float input uses partial pivoting
    and treats entries below ``tol`` as zero.
    """
    m = np.array(matrix, copy=True)
    exact = m.dtype == object
    n_rows, n_cols = m.shape
    pivots = []
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        if exact:
            piv = next((i for i in range(r, n_rows) if m[i, c] != 0), None)
        else:
            i = r + int(np.argmax(np.abs(m[r:, c])))
            piv = i if abs(m[i, c]) > tol else None
        if piv is None:
            continue
        if piv != r:
            m[[r, piv]] = m[[piv, r]]
        m[r] = m[r] / m[r, c]
        for i in range(n_rows):
            if i != r and (m[i, c] != 0 if exact else abs(m[i, c]) > 0):
                m[i] = m[i] - m[i, c] * m[r]
        if not exact:
            m[np.abs(m) <= tol] = 0.0
        pivots.append(c)
        r += 1
    return RowEchelon(m, tuple(pivots))


@dataclass(frozen=True)
class LinearSolution:
    particular: np.ndarray | None
    nullspace: tuple[np.ndarray, ...]
    rank: int

    @property
    def consistent(self) -> bool:
        return self.particular is not None

    @property
    def nullity(self) -> int:
        return len(self.nullspace)


def solve_linear(A, b, tol: float = DEFAULT_TOL) -> LinearSolution:
    """All solutions of ``A x = b``: one particular solution plus a nullspace basis."""
    A = np.asarray(A)
    b = np.asarray(b).reshape(-1, 1)
    n = A.shape[1]
    aug = np.concatenate([A, b.astype(A.dtype)], axis=1)
    ech = row_reduce(aug, tol)
    arith = arithmetic_of(A, tol)
    if n in ech.pivots:
        particular = None
        pivots = tuple(p for p in ech.pivots if p != n)
    else:
        pivots = ech.pivots
        particular = arith.zeros(n)
        for row, c in enumerate(pivots):
            particular[c] = ech.rows[row, n]
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = arith.zeros(n)
        v[f] = arith.scalar(1)
        for row, c in enumerate(pivots):
            v[c] = -ech.rows[row, f]
        basis.append(v)
    return LinearSolution(particular, tuple(basis), len(pivots))


def inverse(matrix, tol: float = DEFAULT_TOL) -> np.ndarray:
    m = np.asarray(matrix)
    n = m.shape[0]
    arith = arithmetic_of(m, tol)
    ech = row_reduce(np.concatenate([m, arith.eye(n)], axis=1), tol)
    if ech.pivots[:n] != tuple(range(n)):
        raise LinearAlgebraError("singular matrix")
    return ech.rows[:, n:]


def lagrange_signature(sym, tol: float = DEFAULT_TOL) -> tuple[int, int, int]:
    """(positive, negative, zero) counts of a symmetric form.

    Lagrange reduction by congruence: complete squares on a nonzero diagonal
    pivot, or split off a hyperbolic pair when the diagonal has vanished.
    Uses only field operations, so it is exact on rationals.
    """
    m = np.array(sym, copy=True)
    arith = arithmetic_of(m, tol)
    n = m.shape[0]
    pos = neg = 0
    active = list(range(n))
    while active:
        d = next((i for i in active if not arith.is_zero(m[i, i])), None)
        if d is None:
            pair = next(
                ((i, j) for i in active for j in active if i < j and not arith.is_zero(m[i, j])),
                None,
            )
            if pair is None:
                break
            i, j = pair
            # e_i + e_j has q = 2 m_ij != 0
            m[i, :] = m[i, :] + m[j, :]
            m[:, i] = m[:, i] + m[:, j]
            continue
        piv = m[d, d]
        if piv > 0:
            pos += 1
        else:
            neg += 1
        active.remove(d)
        for i in active:
            f = m[i, d] / piv
            m[i, :] = m[i, :] - f * m[d, :]
        for i in active:
            m[d, i] = m[i, d] = arith.scalar(0)
    return pos, neg, n - pos - neg


def as_matrix(rows: Iterable[Iterable], arith: Arithmetic = EXACT) -> np.ndarray:
    return arith.array([list(r) for r in rows])
