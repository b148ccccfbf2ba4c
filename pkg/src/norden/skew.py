"""The natural connection with totally skew-symmetric torsion, its relatives ∇ᴮ and ∇ᶜ,
and a brute-force check that it is the only one."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .algebra import Tensor, jform, max_abs, solve_linear
from .levi_civita import (
    OTHER,
    ClassVerdict,
    Connection,
    InconsistencyError,
    classify,
    levi_civita,
    lower_last,
    nabla_J,
    raise_last,
)
from .lie import ManifoldSpec
from .report import Check, Report
from .torsion import (
    TorsionTensor,
    is_three_form,
    natural_conditions_residual,
    naturality_residuals,
    project_torsion,
    torsion_projection,
    torsion_of,
)


class NotQuasiKahlerError(ValueError):
    """No natural connection with totally skew torsion exists outside the quasi-Kähler class."""

    def __init__(self, verdict: ClassVerdict):
        self.verdict = verdict
        super().__init__(f"manifold is {verdict.label}; a skew-torsion natural connection needs quasi-Kähler")


def q_from_f(spec: ManifoldSpec, F: np.ndarray) -> np.ndarray:
    """Q(x,y,z) = ¼{F(x,Jy,z) − F(Jx,y,z) − 2F(y,Jx,z)}."""
    J = spec.J
    acc = jform(F, J, "x,Jy,z->xyz") - jform(F, J, "Jx,y,z->xyz") - 2 * jform(F, J, "y,Jx,z->xyz")
    return acc * spec.arith.scalar(Fraction(1, 4))


def q_vector_form(spec: ManifoldSpec, P: np.ndarray) -> np.ndarray:
    """Q(x,y) = ¼{(∇_x J)Jy − (∇_{Jx} J)y − 2(∇_y J)Jx} as a vector-valued array."""
    J = spec.J
    acc = jform(P, J, "x,Jy,k->xyk") - jform(P, J, "Jx,y,k->xyk") - 2 * jform(P, J, "y,Jx,k->xyk")
    return acc * spec.arith.scalar(Fraction(1, 4))


def build_q(spec: ManifoldSpec) -> Tensor:
    spec.require_valid()
    verdict = classify(spec)
    if verdict.label == OTHER:
        raise NotQuasiKahlerError(verdict)
    Q = q_from_f(spec, verdict.F.data)
    P = nabla_J(spec, levi_civita(spec)).data
    Q_vec = lower_last(spec, q_vector_form(spec, P))
    if not spec.arith.equal(Q, Q_vec):
        raise InconsistencyError("scalar and vector forms of Q disagree")
    return Tensor.covariant(Q)


@dataclass(frozen=True)
class SkewConnectionBundle:
    levi_civita: Connection
    nabla_prime: Connection
    Q: Tensor
    T: TorsionTensor
    b_conn: Connection
    c_conn: Connection
    # derived quantities (curvatures and the like) memoized by their consumers
    cache: dict = field(default_factory=dict, compare=False, repr=False)

    def members(self) -> dict[str, Connection]:
        return {
            "levi_civita": self.levi_civita,
            "nabla_prime": self.nabla_prime,
            "b_conn": self.b_conn,
            "c_conn": self.c_conn,
        }


@lru_cache(maxsize=256)
def build_bundle(spec: ManifoldSpec) -> SkewConnectionBundle:
    """∇' = ∇ + Q, ∇ᴮ_X Y = ∇_X Y + ½(∇_X J)JY and ∇ᶜ = 2∇ᴮ − ∇'."""
    Q = build_q(spec)
    lc = levi_civita(spec)
    prime = lc + Connection.from_array(raise_last(spec, Q.data))
    P = nabla_J(spec, lc).data
    half = spec.arith.scalar(Fraction(1, 2))
    b = lc + Connection.from_array(half * jform(P, spec.J, "i,Jj,k->ijk"))
    c = b.scale(2) - prime
    return SkewConnectionBundle(lc, prime, Q, torsion_of(spec, prime), b, c)


# --- uniqueness by brute force ----------------------------------------------


def three_form_basis(dim: int, arith) -> list[tuple[tuple[int, int, int], np.ndarray]]:
    """Elementary 3-forms e^a∧e^b∧e^c (a<b<c) as dense arrays."""
    basis = []
    for a, b, c in itertools.combinations(range(dim), 3):
        e = arith.zeros((dim,) * 3)
        for perm, sign in _PERMS:
            idx = tuple((a, b, c)[p] for p in perm)
            e[idx] = arith.scalar(sign)
        basis.append(((a, b, c), e))
    return basis


_PERMS = [((0, 1, 2), 1), ((1, 2, 0), 1), ((2, 0, 1), 1), ((1, 0, 2), -1), ((0, 2, 1), -1), ((2, 1, 0), -1)]


def _natural_map(spec: ManifoldSpec, Q: np.ndarray) -> np.ndarray:
    return jform(Q, spec.J, "x,y,Jz->xyz") - jform(Q, spec.J, "x,Jy,z->xyz")


@dataclass(frozen=True)
class UniquenessVerdict:
    unknowns: int
    rank: int
    nullity: int
    consistent: bool
    unique: bool
    solution: Tensor | None
    matches_build_q: bool | None
    nullity_with_p1: int | None  # after also demanding that p1 of the torsion vanish

    def to_dict(self) -> dict:
        return {
            "unknowns": self.unknowns,
            "rank": self.rank,
            "nullity": self.nullity,
            "consistent": self.consistent,
            "unique": self.unique,
            "matches_build_q": self.matches_build_q,
            "nullity_with_p1": self.nullity_with_p1,
        }


@lru_cache(maxsize=256)
def uniqueness_oracle(spec: ManifoldSpec) -> UniquenessVerdict:
    """Solve F(x,y,z) = Q(x,y,Jz) − Q(x,Jy,z) over all 3-forms Q by elimination.

    The columns of the system are the images of the elementary 3-forms, so the
    solve never touches the closed-form Q it is checked against.
    """
    spec.require_valid()
    arith = spec.arith
    verdict = classify(spec)
    F = verdict.F.data
    basis = three_form_basis(spec.dim, arith)
    A = np.stack([_natural_map(spec, e).ravel() for _, e in basis], axis=1)
    sol = solve_linear(A, F.ravel(), arith.tol)

    # p1(T) = 0 for T = 2Q, a linear constraint on the same unknowns
    p1_rows = np.stack([torsion_projection(spec, 2 * e, 1).data.ravel() for _, e in basis], axis=1)
    sol_p1 = solve_linear(np.concatenate([A, p1_rows]), np.concatenate([F.ravel(), arith.zeros(p1_rows.shape[0])]),
                          arith.tol)

    solution = None
    matches = None
    if sol.consistent:
        q = sum(c * e for c, (_, e) in zip(sol.particular, basis))
        if sol.nullity == 0:
            solution = Tensor.covariant(q)
        if verdict.label != OTHER:
            built = build_q(spec).data
            resid = _natural_map(spec, built) - F
            in_solution_set = arith.is_zero(resid) and is_three_form(built, arith.tol)
            matches = in_solution_set and (sol.nullity > 0 or arith.equal(q, built))
    return UniquenessVerdict(
        unknowns=len(basis),
        rank=sol.rank,
        nullity=sol.nullity,
        consistent=sol.consistent,
        unique=sol.consistent and sol.nullity == 0,
        solution=solution,
        matches_build_q=matches,
        nullity_with_p1=sol_p1.nullity if sol_p1.consistent else None,
    )


def proportionality(a: Connection, b: Connection, factor, arith) -> object:
    """Max-norm of Γ_a − factor·Γ_b."""
    return max_abs(a.data - arith.scalar(factor) * b.data)


def skew_connection_report(spec: ManifoldSpec, expect_proportional: bool = False) -> Report:
    """Checks that the constructed ∇' has every property the existence theorem asserts.

    With ``expect_proportional`` the coefficient tables of ∇ᴮ and ∇ᶜ must be
    3/4 and 1/2 of those of ∇'; otherwise those ratios are reported only.
    """
    spec.require_valid()
    arith = spec.arith
    rep = Report("skew_connection")
    verdict = classify(spec)
    rep.data["class"] = verdict.label
    rep.add(Check.info("classification", verdict.cyclic_residual.max_norm(), label=verdict.label))

    if verdict.label == OTHER:
        oracle = uniqueness_oracle(spec)
        rep.data["uniqueness"] = oracle.to_dict()
        rep.add(Check.of("no_skew_natural_connection", not oracle.consistent,
                         detail="linear system over 3-forms must be inconsistent"))
        return rep

    bundle = build_bundle(spec)
    Q, T = bundle.Q.data, bundle.T.data
    res_J, res_g = naturality_residuals(spec, bundle.nabla_prime)
    rep.add(Check.of("natural_J", arith.is_zero(res_J), res_J))
    rep.add(Check.of("natural_g", arith.is_zero(res_g), res_g))
    c1, c2 = natural_conditions_residual(spec, Q, verdict.F)
    rep.add(Check.of("natural_conditions", arith.is_zero(c1) and arith.is_zero(c2), max(c1, c2)))
    rep.add(Check.of("torsion_three_form", is_three_form(T, arith.tol)))
    rep.add(Check.of("torsion_is_2Q", arith.equal(T, 2 * Q), max_abs(T - 2 * Q)))

    if verdict.is_kahler:
        for i in (1, 2, 3, 4):
            rep.add(Check.skip(f"p{i}", "Kähler: torsion vanishes"))
        rep.add(Check.of("coincide_with_levi_civita",
                         all(arith.is_zero((c - bundle.levi_civita).data) for c in bundle.members().values())))
        oracle = uniqueness_oracle(spec)
        rep.data["uniqueness"] = oracle.to_dict()
        rep.add(Check.info("uniqueness", oracle.nullity, consistent=oracle.consistent))
        return rep

    p = project_torsion(spec, bundle.T)
    zero = p.vanishing()
    rep.add(Check.of("p1_zero", zero[0], p.p1.max_norm()))
    rep.add(Check.of("p2_nonzero", not zero[1], p.p2.max_norm()))
    rep.add(Check.of("p3_zero", zero[2], p.p3.max_norm()))
    rep.add(Check.of("p4_nonzero", not zero[3], p.p4.max_norm()))
    rep.add(Check.of("projections_sum", arith.equal(p.total().data, T)))

    oracle = uniqueness_oracle(spec)
    rep.data["uniqueness"] = oracle.to_dict()
    rep.add(Check.of("oracle_consistent", oracle.consistent))
    rep.add(Check.of("oracle_contains_build_q", bool(oracle.matches_build_q)))
    rep.add(Check.of("oracle_unique", oracle.unique, oracle.nullity, nullity_with_p1=oracle.nullity_with_p1))

    ratio_b = proportionality(bundle.b_conn, bundle.nabla_prime, Fraction(3, 4), arith)
    ratio_c = proportionality(bundle.c_conn, bundle.nabla_prime, Fraction(1, 2), arith)
    if expect_proportional:
        rep.add(Check.of("b_is_three_quarters_prime", arith.is_zero(ratio_b), ratio_b))
        rep.add(Check.of("c_is_half_prime", arith.is_zero(ratio_c), ratio_c))
    else:
        rep.add(Check.info("b_is_three_quarters_prime", ratio_b))
        rep.add(Check.info("c_is_half_prime", ratio_c))
    return rep
