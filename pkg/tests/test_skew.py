from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given

from norden.algebra import EXACT
from norden.catalog import abelian, family_plus_plane, heisenberg_plus_line, sl2_plus_line, solvable_isotropic
from norden.family import FamilyParams, family_spec
from norden.levi_civita import f_tensor
from norden.skew import (
    NotQuasiKahlerError,
    build_bundle,
    build_q,
    proportionality,
    skew_connection_report,
    three_form_basis,
    uniqueness_oracle,
)
from norden.torsion import is_three_form, project_torsion
from conftest import lambdas


class TestBuildQ:
    @given(lambdas)
    def test_torsion_is_twice_q_and_a_three_form(self, lam):
        spec = family_spec(FamilyParams.of(*lam))
        bundle = build_bundle(spec)
        assert is_three_form(bundle.Q.data)
        assert EXACT.equal(bundle.T.data, 2 * bundle.Q.data)

    @given(lambdas)
    def test_projection_pattern(self, lam):
        p = FamilyParams.of(*lam)
        parts = project_torsion(family_spec(p), build_bundle(family_spec(p)).T)
        assert parts.vanishing() == (True, p.is_zero, True, p.is_zero)

    def test_other_class_refused(self):
        with pytest.raises(NotQuasiKahlerError) as err:
            build_q(heisenberg_plus_line())
        assert err.value.verdict.label == "other"

    def test_kahler_gives_levi_civita(self):
        bundle = build_bundle(abelian())
        for conn in bundle.members().values():
            assert EXACT.is_zero((conn - bundle.levi_civita).data)

    @pytest.mark.parametrize("make", [sl2_plus_line, solvable_isotropic])
    def test_quasi_kahler_outside_family(self, make):
        rep = skew_connection_report(make())
        for name in ("natural_J", "natural_g", "natural_conditions", "torsion_three_form", "torsion_is_2Q",
                     "p1_zero", "p3_zero", "projections_sum", "oracle_unique"):
            assert not rep.check(name).failed, name


class TestUniquenessOracle:
    def test_basis_size(self):
        assert len(three_form_basis(4, EXACT)) == 4
        assert len(three_form_basis(6, EXACT)) == 20

    @given(lambdas)
    def test_family_solution_is_unique_and_matches(self, lam):
        spec = family_spec(FamilyParams.of(*lam))
        verdict = uniqueness_oracle(spec)
        assert verdict.unique and verdict.matches_build_q
        assert EXACT.equal(verdict.solution.data, build_q(spec).data)

    def test_other_class_has_no_solution(self):
        verdict = uniqueness_oracle(heisenberg_plus_line())
        assert not verdict.consistent
        assert skew_connection_report(heisenberg_plus_line()).check("no_skew_natural_connection").status == "pass"

    def test_dimension_six_leaves_two_free_directions(self):
        # naturality alone does not pin Q in dimension 6; killing p1 of the torsion does
        spec = family_plus_plane(FamilyParams.of(1, 2, 3, 4))
        verdict = uniqueness_oracle(spec)
        assert (verdict.unknowns, verdict.rank, verdict.nullity) == (20, 18, 2)
        assert verdict.consistent and verdict.matches_build_q
        assert verdict.nullity_with_p1 == 0
        rep = skew_connection_report(spec)
        assert rep.check("oracle_unique").failed
        assert not rep.check("p1_zero").failed


class TestProportionality:
    @given(lambdas)
    def test_family_ratios(self, lam):
        spec = family_spec(FamilyParams.of(*lam))
        b = build_bundle(spec)
        assert proportionality(b.b_conn, b.nabla_prime, Fraction(3, 4), EXACT) == 0
        assert proportionality(b.c_conn, b.nabla_prime, Fraction(1, 2), EXACT) == 0

    def test_b_and_c_defining_relation(self):
        b = build_bundle(sl2_plus_line())
        assert EXACT.equal((b.c_conn + b.nabla_prime).data, b.b_conn.scale(2).data)

    def test_report_all_pass_on_family(self):
        rep = skew_connection_report(family_spec(FamilyParams.of(2, -1, 3, 5)), expect_proportional=True)
        assert rep.ok, rep.first_failure()


def test_q_formula_by_components():
    # Q(x,y,z) = ¼{F(x,Jy,z) − F(Jx,y,z) − 2F(y,Jx,z)} with J e_a = e_{a+2}, J e_{a+2} = −e_a
    spec = family_spec(FamilyParams.of(1, 2, 3, 4))
    F = f_tensor(spec).data
    Q = build_q(spec).data

    def J(i):
        return ((i + 2) % 4, 1 if i < 2 else -1)

    for x, y, z in np.ndindex(4, 4, 4):
        jy, sy = J(y)
        jx, sx = J(x)
        want = Fraction(1, 4) * (sy * F[x, jy, z] - sx * F[jx, y, z] - 2 * sx * F[y, jx, z])
        assert Q[x, y, z] == want
