"""Left-invariant data on a Lie group: structure constants, J and g on the frame."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any

import numpy as np

from .algebra import (
    DOWN,
    EXACT,
    RATIONAL,
    UP,
    Arithmetic,
    Tensor,
    TensorError,
    format_scalar,
    inverse,
    lagrange_signature,
    max_abs,
    parse_scalar,
)


class SpecError(ValueError):
    """Malformed input (shape, parse or schema problems)."""


class ValidationError(ValueError):
    def __init__(self, report: "ValidationReport"):
        self.report = report
        first = report.first_failure
        super().__init__(f"invalid manifold spec: {first.name} fails at {first.witness}")


@dataclass(frozen=True)
class LieAlgebra:
    """Structure constants ``C[i, j, k] = C^k_ij`` with ``[X_i, X_j] = C^k_ij X_k``."""

    C: Tensor

    def __post_init__(self):
        if self.C.valence != (DOWN, DOWN, UP):
            raise SpecError(f"structure constants need valence ddu, got {self.C.valence}")

    @property
    def dim(self) -> int:
        return self.C.dim

    @classmethod
    def from_brackets(cls, dim: int, brackets: dict, arith: Arithmetic = EXACT) -> "LieAlgebra":
        """Build from ``{(i, j): coefficients of [X_i, X_j]}`` (0-based, i != j).

        The partner ``[X_j, X_i]`` is filled in by antisymmetry.
        """
        C = arith.zeros((dim, dim, dim))
        for (i, j), vec in brackets.items():
            for k, v in enumerate(vec):
                C[i, j, k] = arith.scalar(v)
                C[j, i, k] = -arith.scalar(v)
        return cls(Tensor(C, (DOWN, DOWN, UP)))

    @classmethod
    def abelian(cls, dim: int, arith: Arithmetic = EXACT) -> "LieAlgebra":
        return cls(Tensor(arith.zeros((dim,) * 3), (DOWN, DOWN, UP)))


@dataclass(frozen=True)
class NordenStructure:
    """``J[m, a]`` is the m-th component of ``J X_a``; ``g[a, b] = g(X_a, X_b)``."""

    J: Tensor
    g: Tensor

    def __post_init__(self):
        if self.J.valence != (UP, DOWN):
            raise SpecError(f"J needs valence ud, got {self.J.valence}")
        if self.g.valence != (DOWN, DOWN):
            raise SpecError(f"g needs valence dd, got {self.g.valence}")
        if self.J.dim != self.g.dim:
            raise SpecError("J and g have different frame sizes")

    @property
    def dim(self) -> int:
        return self.g.dim

    @cached_property
    def g_inv(self) -> Tensor:
        return Tensor(inverse(self.g.data), (UP, UP))

    @cached_property
    def g_assoc(self) -> Tensor:
        """g~(x, y) = g(x, Jy)."""
        return Tensor(self.g.data @ self.J.data, (DOWN, DOWN))


def standard_structure(dim: int, arith: Arithmetic = EXACT) -> NordenStructure:
    """J X_a = X_{a+n}, J X_{a+n} = −X_a and g = diag(1,…,1, −1,…,−1) on a 2n-frame."""
    if dim < 2 or dim % 2:
        raise SpecError(f"dimension must be even and at least 2, got {dim}")
    n = dim // 2
    J = arith.zeros((dim, dim))
    g = arith.zeros((dim, dim))
    for a in range(n):
        J[a + n, a] = arith.scalar(1)
        J[a, a + n] = arith.scalar(-1)
        g[a, a] = arith.scalar(1)
        g[a + n, a + n] = arith.scalar(-1)
    return NordenStructure(Tensor(J, (UP, DOWN)), Tensor(g, (DOWN, DOWN)))


@dataclass(frozen=True)
class ManifoldSpec:
    algebra: LieAlgebra
    norden: NordenStructure
    arith: Arithmetic = field(default=EXACT)

    def __post_init__(self):
        if self.algebra.dim != self.norden.dim:
            raise SpecError(f"algebra has dim {self.algebra.dim}, structure has dim {self.norden.dim}")

    @property
    def dim(self) -> int:
        return self.algebra.dim

    @property
    def C(self) -> np.ndarray:
        return self.algebra.C.data

    @property
    def J(self) -> np.ndarray:
        return self.norden.J.data

    @property
    def g(self) -> np.ndarray:
        return self.norden.g.data

    @property
    def g_inv(self) -> np.ndarray:
        return self.norden.g_inv.data

    @cached_property
    def report(self) -> "ValidationReport":
        return validate(self)

    def require_valid(self) -> "ManifoldSpec":
        if not self.report.ok:
            raise ValidationError(self.report)
        return self


@dataclass(frozen=True)
class InvariantCheck:
    name: str
    passed: bool
    witness: tuple[int, ...] | None = None  # 1-based frame indices
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "witness": list(self.witness) if self.witness is not None else None,
            "detail": self.detail,
        }


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[InvariantCheck, ...]
    signature: tuple[int, int, int] | None

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def first_failure(self) -> InvariantCheck | None:
        return next((c for c in self.checks if not c.passed), None)

    def check(self, name: str) -> InvariantCheck:
        return next(c for c in self.checks if c.name == name)

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "signature": list(self.signature) if self.signature else None,
            "checks": [c.to_dict() for c in self.checks],
        }


def _first_nonzero(residual: np.ndarray, arith: Arithmetic):
    for idx in itertools.product(range(residual.shape[0]), repeat=residual.ndim):
        if not arith.is_zero(residual[idx]):
            return tuple(i + 1 for i in idx)
    return None


def _check(name: str, residual: np.ndarray, arith: Arithmetic, detail: str = "") -> InvariantCheck:
    witness = _first_nonzero(residual, arith)
    return InvariantCheck(name, witness is None, witness, detail)


def jacobi_residual(C: np.ndarray) -> np.ndarray:
    """``res[i, j, s, l] = C^k_ij C^l_ks + C^k_js C^l_ki + C^k_si C^l_kj``."""
    return (
        np.einsum("ijk,ksl->ijsl", C, C)
        + np.einsum("jsk,kil->ijsl", C, C)
        + np.einsum("sik,kjl->ijsl", C, C)
    )


def validate(spec: ManifoldSpec) -> ValidationReport:
    arith = spec.arith
    n = spec.dim
    C, J, g = spec.C, spec.J, spec.g
    checks = [InvariantCheck("dimension", n >= 2 and n % 2 == 0, None if n % 2 == 0 else (n,))]
    checks.append(_check("antisymmetry", C + np.transpose(C, (1, 0, 2)), arith))
    checks.append(_check("jacobi", jacobi_residual(C), arith))
    checks.append(_check("J_squared", J @ J + arith.eye(n), arith, "J^2 = -Id"))
    checks.append(_check("g_symmetric", g - g.T, arith))

    signature = lagrange_signature(g, arith.tol)
    pos, neg, zero = signature
    checks.append(
        InvariantCheck("g_nondegenerate", zero == 0, None if zero == 0 else signature, f"signature {signature}")
    )
    checks.append(
        InvariantCheck("g_signature", pos == neg == n // 2, None if pos == neg == n // 2 else signature,
                       f"expected ({n // 2}, {n // 2})")
    )
    # g(Jx, Jy) + g(x, y)
    checks.append(_check("anti_isometry", J.T @ g @ J + g, arith))
    ga = g @ J
    checks.append(_check("g_assoc_symmetric", ga - ga.T, arith))
    return ValidationReport(tuple(checks), signature)


def bracket(spec: ManifoldSpec, x, y) -> np.ndarray:
    """Bilinear extension of the structure constants to coordinate vectors."""
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape != (spec.dim,) or y.shape != (spec.dim,):
        raise SpecError(f"vectors must have {spec.dim} components")
    return np.einsum("i,j,ijk->k", x, y, spec.C, optimize=True)


def bracket_lowered(spec: ManifoldSpec) -> np.ndarray:
    """``out[i, j, k] = g([X_i, X_j], X_k)``."""
    return np.einsum("ijs,sk->ijk", spec.C, spec.g)


def killing_associated_residual(spec: ManifoldSpec) -> np.ndarray:
    """``res[i, j, k] = g([X_i, X_j], J X_k) + g([X_i, X_k], J X_j)``."""
    B = np.einsum("ijs,st,tk->ijk", spec.C, spec.g, spec.J, optimize=True)
    return B + np.transpose(B, (0, 2, 1))


def check_killing_associated(spec: ManifoldSpec):
    """Max-norm of the Killing residual of the associated metric (zero iff Killing)."""
    return max_abs(killing_associated_residual(spec))


# --- JSON schema -----------------------------------------------------------


def _matrix(rows, n: int, mode: str, what: str) -> np.ndarray:
    if not isinstance(rows, list) or len(rows) != n or any(not isinstance(r, list) or len(r) != n for r in rows):
        raise SpecError(f"{what} must be a {n}x{n} list of lists")
    arith = Arithmetic(mode)
    out = arith.zeros((n, n))
    for a in range(n):
        for b in range(n):
            try:
                out[a, b] = parse_scalar(rows[a][b], mode)
            except ValueError as exc:
                raise SpecError(f"{what}[{a + 1}][{b + 1}]: {exc}") from exc
    return out


def spec_from_dict(doc: dict[str, Any], mode: str | None = None, tol: float | None = None) -> ManifoldSpec:
    """Build a spec from the JSON document layout (1-based indices).

    A structure constant given for ``(i, j, k)`` but not for ``(j, i, k)`` has
    its partner filled in by antisymmetry; if both are given, both are kept
    verbatim so that inconsistent input is caught by :func:`validate`.
    """
    if not isinstance(doc, dict):
        raise SpecError("spec document must be a JSON object")
    mode = mode or doc.get("mode", RATIONAL)
    if mode not in ("rational", "float"):
        raise SpecError(f"mode must be 'rational' or 'float', got {mode!r}")
    arith = Arithmetic(mode) if tol is None else Arithmetic(mode, tol)
    try:
        n = doc["dim"]
    except KeyError as exc:
        raise SpecError("missing 'dim'") from exc
    if not isinstance(n, int) or isinstance(n, bool) or n < 2:
        raise SpecError(f"dim must be an integer >= 2, got {n!r}")

    C = arith.zeros((n, n, n))
    given = set()
    for entry in doc.get("structure_constants", []):
        try:
            i, j, k = (int(entry[key]) - 1 for key in ("i", "j", "k"))
            value = parse_scalar(entry["value"], mode)
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecError(f"bad structure constant entry {entry!r}") from exc
        if not all(0 <= t < n for t in (i, j, k)):
            raise SpecError(f"structure constant index out of range: {entry!r}")
        C[i, j, k] = value
        given.add((i, j, k))
    for i, j, k in given:
        if (j, i, k) not in given:
            C[j, i, k] = -C[i, j, k]

    for key in ("J", "g"):
        if key not in doc:
            raise SpecError(f"missing {key!r}")
    J = _matrix(doc["J"], n, mode, "J")
    g = _matrix(doc["g"], n, mode, "g")
    try:
        norden = NordenStructure(Tensor(J, (UP, DOWN)), Tensor(g, (DOWN, DOWN)))
        return ManifoldSpec(LieAlgebra(Tensor(C, (DOWN, DOWN, UP))), norden, arith)
    except TensorError as exc:
        raise SpecError(str(exc)) from exc


def spec_to_dict(spec: ManifoldSpec) -> dict[str, Any]:
    n = spec.dim
    consts = []
    for i, j, k in itertools.product(range(n), repeat=3):
        v = spec.C[i, j, k]
        if v != 0:
            consts.append({"i": i + 1, "j": j + 1, "k": k + 1, "value": format_scalar(v)})
    return {
        "dim": n,
        "mode": spec.arith.mode,
        "structure_constants": consts,
        "J": [[format_scalar(v) for v in row] for row in spec.J],
        "g": [[format_scalar(v) for v in row] for row in spec.g],
    }


def load_spec(path: str | Path, mode: str | None = None) -> ManifoldSpec:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}: invalid JSON: {exc}") from exc
    return spec_from_dict(doc, mode)

