"""Curvature of constant-coefficient connections and the identities relating R' to R."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .algebra import (
    EXACT,
    Arithmetic,
    Tensor,
    cyclic_sum,
    inverse,
    jform,
    lagrange_signature,
    max_abs,
)
from .levi_civita import Connection, classify, levi_civita, nabla_J, raise_last, square_norm_nabla_j
from .lie import ManifoldSpec
from .report import Check, Report
from .skew import SkewConnectionBundle, three_form_basis


@dataclass(frozen=True)
class CurvatureData:
    R: Tensor  # R(x, y, z, w) = g(R(x, y)z, w)
    rho: Tensor
    tau: object
    tau_star_star: object


def _scalar(x):
    return x[()] if isinstance(x, np.ndarray) else x


def curvature_operator(spec: ManifoldSpec, conn: Connection) -> np.ndarray:
    """``out[i, j, k, l]`` = l-th component of R(X_i, X_j) X_k = ∇_i∇_j X_k − ∇_j∇_i X_k − ∇_{[X_i,X_j]} X_k."""
    G, C = conn.data, spec.C
    return (
        np.einsum("jks,isl->ijkl", G, G)
        - np.einsum("iks,jsl->ijkl", G, G)
        - np.einsum("ijs,skl->ijkl", C, G)
    )


def ricci(spec: ManifoldSpec, R: np.ndarray) -> np.ndarray:
    """ρ(y, z) = g^{ij} R(e_i, y, z, e_j)."""
    return np.einsum("ij,iyzj->yz", spec.g_inv, R)


def scalar_curvature(spec: ManifoldSpec, rho: np.ndarray):
    return _scalar(np.einsum("ij,ij->", spec.g_inv, rho))


def star_star(spec: ManifoldSpec, R: np.ndarray):
    """τ** = g^{ij} g^{ks} R(e_i, e_k, J e_s, J e_j)."""
    RJ = jform(R, spec.J, "i,k,Js,Jj->iksj")
    return _scalar(np.einsum("ij,ks,iksj->", spec.g_inv, spec.g_inv, RJ, optimize=True))


def riemann(spec: ManifoldSpec, conn: Connection) -> CurvatureData:
    spec.require_valid()
    R = np.tensordot(curvature_operator(spec, conn), spec.g, axes=([3], [0]))
    rho = ricci(spec, R)
    return CurvatureData(
        Tensor.covariant(R), Tensor.covariant(rho), scalar_curvature(spec, rho), star_star(spec, R)
    )


def bundle_curvatures(spec: ManifoldSpec, bundle: SkewConnectionBundle) -> tuple[CurvatureData, CurvatureData]:
    """(curvature of ∇, curvature of ∇'), computed once per bundle."""
    key = ("curvatures", id(spec))
    if key not in bundle.cache:
        bundle.cache[key] = (riemann(spec, bundle.levi_civita), riemann(spec, bundle.nabla_prime))
    return bundle.cache[key]


def parallel_torsion_residual(spec: ManifoldSpec, bundle: SkewConnectionBundle):
    """Max-norm of ∇'T."""
    key = ("nabla_prime_T", id(spec))
    if key not in bundle.cache:
        bundle.cache[key] = max_abs(covariant_derivative(spec, bundle.nabla_prime, bundle.T.data).data)
    return bundle.cache[key]


@dataclass(frozen=True)
class KahlerVerdict:
    antisymmetry: object
    bianchi: object
    j_compatible: object
    is_kahler: bool

    @property
    def curvature_like(self) -> bool:
        return self.is_kahler or (self.antisymmetry == 0 and self.bianchi == 0)

    def to_dict(self) -> dict:
        return {
            "antisymmetry": self.antisymmetry,
            "bianchi": self.bianchi,
            "j_compatible": self.j_compatible,
            "is_kahler": self.is_kahler,
        }


def kahler_residuals(spec: ManifoldSpec, L: np.ndarray) -> tuple[object, object, object]:
    anti = max(
        max_abs(L + np.transpose(L, (1, 0, 2, 3))),
        max_abs(L + np.transpose(L, (0, 1, 3, 2))),
    )
    bianchi = max_abs(cyclic_sum(L))
    jcomp = max_abs(jform(L, spec.J, "x,y,Jz,Jw->xyzw") + L)
    return anti, bianchi, jcomp


def is_kahler_tensor(spec: ManifoldSpec, L: Tensor | np.ndarray) -> KahlerVerdict:
    """Curvature-like (both antisymmetries and first Bianchi) plus L(x,y,Jz,Jw) = −L(x,y,z,w)."""
    data = L.data if isinstance(L, Tensor) else np.asarray(L)
    anti, bianchi, jcomp = kahler_residuals(spec, data)
    z = spec.arith.is_zero
    return KahlerVerdict(anti, bianchi, jcomp, z(anti) and z(bianchi) and z(jcomp))


def covariant_derivative(spec: ManifoldSpec, conn: Connection, t: Tensor | np.ndarray) -> Tensor:
    """(∇_x t)(a, b, ...) = −Σ_slots t(..., ∇_x e_slot, ...); the new slot comes first.

    Components are constant on the frame, so no derivative of components appears.
    """
    data = t.data if isinstance(t, Tensor) else np.asarray(t)
    G = conn.data
    letters = "abcdefgh"[: data.ndim]
    out = 0
    for s, ch in enumerate(letters):
        src = letters[:s] + "m" + letters[s + 1:]
        out = out - np.einsum(f"x{ch}m,{src}->x{letters}", G, data)
    return Tensor.covariant(out)


def _pair_products(spec: ManifoldSpec, Q: np.ndarray) -> np.ndarray:
    """``out[a, b, c, d] = g(Q(a, b), Q(c, d))``."""
    return np.einsum("abm,cdm->abcd", raise_last(spec, Q), Q)


def curvature_difference_residual(spec: ManifoldSpec, bundle: SkewConnectionBundle):
    """Max-norm of R' − [R + (∇_xQ)(y,z,w) − (∇_yQ)(x,z,w) + Q(x,Q(y,z),w) − Q(y,Q(x,z),w)]."""
    lc, pr = bundle_curvatures(spec, bundle)
    R, Rp = lc.R.data, pr.R.data
    Q = bundle.Q.data
    DQ = covariant_derivative(spec, bundle.levi_civita, Q).data
    Qv = raise_last(spec, Q)
    rhs = (
        R
        + DQ
        - np.transpose(DQ, (1, 0, 2, 3))
        + np.einsum("yzm,xmw->xyzw", Qv, Q)
        - np.einsum("xzm,ymw->xyzw", Qv, Q)
    )
    return max_abs(Rp - rhs)


def parallel_torsion_report(spec: ManifoldSpec, bundle: SkewConnectionBundle) -> Report:
    """Ricci and scalar curvature of ∇' against the parallel-torsion formulas.

    The formulas are theorems only when ∇'T = 0.  Otherwise their residuals
    are recorded as diagnostics and nothing is asserted.
    """
    arith = spec.arith
    rep = Report("parallel_torsion")
    dt = parallel_torsion_residual(spec, bundle)
    parallel = arith.is_zero(dt)
    rep.data["torsion_parallel"] = parallel
    rep.add(Check.info("nabla_prime_T", dt))

    lc, pr = bundle_curvatures(spec, bundle)
    Q = bundle.Q.data
    S = _pair_products(spec, Q)
    gi = spec.g_inv
    rho_rhs = lc.rho.data + 2 * np.einsum("ij,iyzj->yz", gi, S) - np.einsum("ij,izyj->yz", gi, S)
    tau_contracted = lc.tau + _scalar(np.einsum("ij,ks,iksj->", gi, gi, S, optimize=True))
    norm = square_norm_nabla_j(spec)
    tau_rhs = lc.tau - arith.scalar(Fraction(1, 8)) * norm
    rep.data.update(tau=lc.tau, tau_prime=pr.tau, square_norm=norm)

    residuals = {
        "ricci_prime": max_abs(pr.rho.data - rho_rhs),
        "tau_prime_contracted": abs(pr.tau - tau_contracted),
        "tau_prime_square_norm": abs(pr.tau - tau_rhs),
    }
    for name, value in residuals.items():
        if parallel:
            rep.add(Check.of(name, arith.is_zero(value), value))
        else:
            rep.add(Check.info(name, value, note="hypothesis ∇'T = 0 fails; not asserted"))
    if parallel:
        iso = arith.is_zero(norm)
        rep.add(Check.of("isotropic_iff_equal_scalar", iso == arith.equal(pr.tau, lc.tau)))
    return rep


@lru_cache(maxsize=256)
def kahler_condition_residual(spec: ManifoldSpec) -> object:
    """Max-norm over (x,y,z,w) of 𝔖_{x,y,z} g(A(x,y), A(z,w)), A(x,y) = (∇_xJ)Jy + (∇_{Jx}J)y."""
    P = nabla_J(spec, levi_civita(spec)).data
    A = jform(P, spec.J, "x,Jy,k->xyk") + jform(P, spec.J, "Jx,y,k->xyk")
    S = np.einsum("xym,mn,zwn->xyzw", A, spec.g, A, optimize=True)
    return max_abs(cyclic_sum(S))


def kahler_curvature_contraction_check(spec: ManifoldSpec, bundle: SkewConnectionBundle) -> Report:
    """Consequences of parallel torsion plus a Kähler curvature tensor for ∇'.

    The pointwise relation R(x,y,Jz,Jw) + R(x,y,z,w) = g(Q(x,y), (∇_{Jz}J)w + (∇_wJ)Jz)
    and its double contraction are asserted only under those hypotheses; the
    contraction of the right-hand side against −⅛‖∇J‖ is asserted always.
    """
    arith = spec.arith
    rep = Report("kahler_curvature_contraction")
    lc, pr = bundle_curvatures(spec, bundle)
    R = lc.R.data
    Q = bundle.Q.data
    P = nabla_J(spec, bundle.levi_civita).data
    V = jform(P, spec.J, "Jz,w,k->zwk") + jform(P, spec.J, "w,Jz,k->zwk")
    lhs = jform(R, spec.J, "x,y,Jz,Jw->xyzw") + R
    rhs = np.einsum("xyn,zwn->xyzw", Q, V)
    gi = spec.g_inv
    contraction = _scalar(np.einsum("ij,ks,ikn,sjn->", gi, gi, Q, V, optimize=True))
    tss_tau = lc.tau_star_star + lc.tau

    kahler_prime = is_kahler_tensor(spec, pr.R)
    hypotheses = arith.is_zero(parallel_torsion_residual(spec, bundle)) and kahler_prime.is_kahler
    rep.data.update(hypotheses=hypotheses, contraction=contraction, tau_star_star_plus_tau=tss_tau)

    pointwise = max_abs(lhs - rhs)
    contracted = abs(tss_tau - contraction)
    if hypotheses:
        rep.add(Check.of("pointwise_relation", arith.is_zero(pointwise), pointwise))
        rep.add(Check.of("contracted_relation", arith.is_zero(contracted), contracted))
    else:
        rep.add(Check.info("pointwise_relation", pointwise, note="hypotheses fail; not asserted"))
        rep.add(Check.info("contracted_relation", contracted, note="hypotheses fail; not asserted"))

    norm = square_norm_nabla_j(spec)
    eighth = arith.scalar(Fraction(-1, 8)) * norm
    rep.add(Check.of("contraction_is_minus_eighth_norm", arith.equal(contraction, eighth),
                     abs(contraction - eighth), contraction=contraction, square_norm=norm))
    if not arith.is_zero(norm):
        rep.add(Check.info("contraction_over_norm", contraction / norm))
    return rep


def star_star_identity_residual(spec: ManifoldSpec, lc: CurvatureData | None = None):
    """|τ** + τ + ½‖∇J‖| for the Levi-Civita curvature."""
    lc = lc or riemann(spec, levi_civita(spec))
    return abs(lc.tau_star_star + lc.tau + spec.arith.scalar(Fraction(1, 2)) * square_norm_nabla_j(spec))


# --- algebra of the quadratic curvature terms on synthetic 3-forms ----------


def random_rational(rng: random.Random, lo: int = -4, hi: int = 4, max_den: int = 3) -> Fraction:
    return Fraction(rng.randint(lo, hi), rng.randint(1, max_den))


def random_neutral_metric(dim: int, rng: random.Random, arith: Arithmetic = EXACT) -> tuple[np.ndarray, np.ndarray]:
    """A metric of signature (n, n) as Mᵀ η M for a random invertible integer M; returns (g, M)."""
    n = dim // 2
    eta = arith.zeros((dim, dim))
    for i in range(dim):
        eta[i, i] = arith.scalar(1 if i < n else -1)
    while True:
        M = arith.array([[rng.randint(-2, 2) for _ in range(dim)] for _ in range(dim)])
        for i in range(dim):
            M[i, i] = M[i, i] + arith.scalar(3)
        g = M.T @ eta @ M
        if lagrange_signature(g, arith.tol) == (n, n, 0):
            return g, M


def random_three_form(dim: int, rng: random.Random, arith: Arithmetic = EXACT) -> np.ndarray:
    return sum(
        arith.scalar(random_rational(rng)) * e for _, e in three_form_basis(dim, arith)
    )


def bracket_three_form(dim: int, rng: random.Random, arith: Arithmetic = EXACT) -> np.ndarray:
    """A 3-form whose induced bracket satisfies Jacobi for the diagonal neutral metric.

    Built from cross-product forms on disjoint frame triples, which are
    mutually orthogonal and each nondegenerate.
    """
    idx = list(range(dim))
    rng.shuffle(idx)
    Q = arith.zeros((dim,) * 3)
    basis = dict(three_form_basis(dim, arith))
    for t in range(dim // 3):
        a, b, c = sorted(idx[3 * t: 3 * t + 3])
        Q = Q + arith.scalar(random_rational(rng)) * basis[(a, b, c)]
    return Q


def quadratic_terms(Q: np.ndarray, g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(s, B) with s(x,y,z,w) = g(Q(x,y),Q(z,w)) and
    B = 2 s(x,y,z,w) − s(x,z,y,w) + s(y,z,x,w)."""
    Qv = np.tensordot(Q, inverse(g), axes=([2], [0]))
    s = np.einsum("xym,zwm->xyzw", Qv, Q)
    B = 2 * s - np.einsum("xzyw->xyzw", s) + np.einsum("yzxw->xyzw", s)
    return s, B


def quadratic_bianchi_check(dim: int, samples: int, seed: int = 0, arith: Arithmetic = EXACT) -> Report:
    """Cyclic-sum algebra of the quadratic part of R' − R for parallel skew torsion.

    For random 3-forms Q and neutral metrics g: 𝔖B equals a fixed multiple of
    𝔖s, so the Bianchi identity for B holds exactly when 𝔖s = 0.  For 3-forms
    with 𝔖s = 0, B reduces to s.
    """
    if dim < 4 or dim % 2:
        raise ValueError("dimension must be even and at least 4")
    rng = random.Random(seed)
    rep = Report(f"quadratic_bianchi_dim{dim}")
    worst = {3: 0, 4: 0}
    equiv_ok = True
    reduction = 0
    nonvanishing = 0
    for _ in range(samples):
        g, M = random_neutral_metric(dim, rng, arith)
        Q = random_three_form(dim, rng, arith)
        s, B = quadratic_terms(Q, g)
        cs, cb = cyclic_sum(s), cyclic_sum(B)
        for k in worst:
            worst[k] = max(worst[k], max_abs(cb - k * cs))
        equiv_ok &= arith.is_zero(cb) == arith.is_zero(cs)
        nonvanishing += not arith.is_zero(cs)

        # bracket-type form moved into the random frame: Q'(x,y,z) = Q0(Mx,My,Mz)
        Q0 = bracket_three_form(dim, rng, arith)
        Qm = np.einsum("abc,ax,by,cz->xyz", Q0, M, M, M, optimize=True)
        s2, B2 = quadratic_terms(Qm, g)
        if not arith.is_zero(cyclic_sum(s2)):
            raise AssertionError("bracket-type 3-form violates the cyclic condition")
        reduction = max(reduction, max_abs(B2 - s2))

    rep.data.update(samples=samples, seed=seed, cyclic_nonvanishing_samples=nonvanishing)
    rep.add(Check.of("cyclic_sum_equals_3x", arith.is_zero(worst[3]), worst[3]))
    rep.add(Check.of("cyclic_sum_equals_4x", arith.is_zero(worst[4]), worst[4]))
    rep.add(Check.of("bianchi_iff_cyclic_condition", equiv_ok))
    rep.add(Check.of("reduction_under_cyclic_condition", arith.is_zero(reduction), reduction))
    return rep


def curvature_report(spec: ManifoldSpec, bundle: SkewConnectionBundle | None) -> Report:
    """Curvature battery for one manifold."""
    arith = spec.arith
    rep = Report("curvature")
    R = riemann(spec, levi_civita(spec)) if bundle is None else bundle_curvatures(spec, bundle)[0]
    anti, bianchi, _ = kahler_residuals(spec, R.R.data)
    rep.add(Check.of("levi_civita_antisymmetry", arith.is_zero(anti), anti))
    rep.add(Check.of("levi_civita_bianchi", arith.is_zero(bianchi), bianchi))
    rep.data.update(tau=R.tau, tau_star_star=R.tau_star_star)
    verdict = classify(spec)
    if verdict.is_quasi_kahler:
        res = star_star_identity_residual(spec, R)
        rep.add(Check.of("tau_star_star_plus_tau", arith.is_zero(res), res))
    if bundle is None:
        return rep
    kv = is_kahler_tensor(spec, bundle_curvatures(spec, bundle)[1].R)
    rep.data["prime_kahler"] = kv.to_dict()
    rep.add(Check.of("prime_antisymmetry", arith.is_zero(kv.antisymmetry), kv.antisymmetry))
    rep.add(Check.info("prime_bianchi", kv.bianchi))
    rep.add(Check.info("prime_j_compatible", kv.j_compatible))
    rep.add(Check.info("kahler_condition_residual", kahler_condition_residual(spec)))
    diff = curvature_difference_residual(spec, bundle)
    rep.add(Check.of("curvature_difference", arith.is_zero(diff), diff))
    rep.sections.append(parallel_torsion_report(spec, bundle))
    rep.sections.append(kahler_curvature_contraction_check(spec, bundle))
    return rep
