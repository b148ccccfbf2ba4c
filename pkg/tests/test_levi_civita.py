from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given

import oracles
from norden.algebra import APPROX, EXACT, cyclic_sum
from norden.catalog import abelian, heisenberg_plus_line, sl2_plus_line, solvable_isotropic
from norden.family import FamilyParams, family_spec
from norden.levi_civita import (
    KAHLER,
    OTHER,
    QUASI_KAHLER,
    NotKillingError,
    classify,
    f_tensor,
    is_isotropic_kahler,
    killing_levi_civita,
    killing_nabla_j,
    levi_civita,
    nabla_J,
    square_norm_report,
)
from norden.lie import ValidationError, spec_from_dict
from norden.torsion import naturality_residuals, torsion_of
from conftest import lambdas


def as_array(nested):
    return EXACT.array(np.array(nested, dtype=object))


class TestLeviCivita:
    @given(lambdas)
    def test_matches_loop_oracle(self, lam):
        spec = family_spec(FamilyParams.of(*lam))
        C = oracles.family_constants(*lam)
        want = oracles.levi_civita(C, oracles.standard_g(4))
        assert EXACT.equal(levi_civita(spec).data, as_array(want))

    @given(lambdas)
    def test_torsion_free_and_metric(self, lam):
        spec = family_spec(FamilyParams.of(*lam))
        lc = levi_civita(spec)
        assert torsion_of(spec, lc).T.is_zero()
        assert naturality_residuals(spec, lc)[1] == 0

    @given(lambdas)
    def test_closed_forms_for_killing_associated_metric(self, lam):
        spec = family_spec(FamilyParams.of(*lam))
        assert EXACT.equal(levi_civita(spec).data, killing_levi_civita(spec).data)
        assert EXACT.equal(nabla_J(spec, levi_civita(spec)).data, killing_nabla_j(spec).data)

    def test_closed_forms_refuse_non_killing(self):
        with pytest.raises(NotKillingError):
            killing_levi_civita(sl2_plus_line())

    def test_invalid_spec_refused(self):
        bad = spec_from_dict({
            "dim": 4,
            "structure_constants": [{"i": 1, "j": 2, "k": 3, "value": 1}, {"i": 2, "j": 3, "k": 1, "value": 1},
                                    {"i": 1, "j": 3, "k": 1, "value": 1}],
            "J": [[0, 0, -1, 0], [0, 0, 0, -1], [1, 0, 0, 0], [0, 1, 0, 0]],
            "g": [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, -1, 0], [0, 0, 0, -1]],
        })
        with pytest.raises(ValidationError):
            levi_civita(bad)


class TestFundamentalTensor:
    @given(lambdas)
    def test_matches_loop_oracle(self, lam):
        spec = family_spec(FamilyParams.of(*lam))
        g = oracles.standard_g(4)
        C = oracles.family_constants(*lam)
        P = oracles.nabla_J(oracles.levi_civita(C, g), oracles.standard_J(4))
        assert EXACT.equal(f_tensor(spec).data, as_array(oracles.lower(P, g)))

    @pytest.mark.parametrize("make", [abelian, heisenberg_plus_line, sl2_plus_line, solvable_isotropic])
    def test_norden_symmetries(self, make):
        spec = make()
        for name, residual in f_tensor(spec).property_residuals(spec).items():
            assert residual == 0, name

    @pytest.mark.parametrize("make, label", [
        (abelian, KAHLER),
        (heisenberg_plus_line, OTHER),
        (sl2_plus_line, QUASI_KAHLER),
        (solvable_isotropic, QUASI_KAHLER),
    ])
    def test_classification(self, make, label):
        assert classify(make()).label == label

    def test_family_point_values(self):
        # λ = (1, 0, 0, 0): nonzero F components by direct loop evaluation
        spec = family_spec(FamilyParams.of(1, 0, 0, 0))
        F = f_tensor(spec).data
        got = {(i + 1, j + 1, k + 1): F[i, j, k] for i, j, k in np.ndindex(4, 4, 4) if F[i, j, k] != 0}
        g = oracles.standard_g(4)
        P = oracles.nabla_J(oracles.levi_civita(oracles.family_constants(1, 0, 0, 0), g), oracles.standard_J(4))
        L = oracles.lower(P, g)
        want = {(i + 1, j + 1, k + 1): L[i][j][k] for i, j, k in np.ndindex(4, 4, 4) if L[i][j][k] != 0}
        assert got == want
        assert got[(4, 1, 1)] == 1
        assert got[(1, 2, 3)] == Fraction(1, 2)

    @given(lambdas)
    def test_family_is_quasi_kahler(self, lam):
        p = FamilyParams.of(*lam)
        verdict = classify(family_spec(p))
        assert verdict.is_quasi_kahler
        assert (verdict.label == KAHLER) == p.is_zero
        assert EXACT.is_zero(cyclic_sum(verdict.F.data))


class TestSquareNorm:
    @given(lambdas)
    def test_family_law(self, lam):
        p = FamilyParams.of(*lam)
        spec = family_spec(p)
        norm = square_norm_report(spec)
        assert norm.value == -4 * p.isotropy_form
        assert norm.forms_agree
        g = oracles.standard_g(4)
        P = oracles.nabla_J(oracles.levi_civita(oracles.family_constants(*lam), g), oracles.standard_J(4))
        assert oracles.square_norm(P, g) == norm.value

    def test_isotropic_kahler_without_being_kahler(self):
        spec = solvable_isotropic()
        assert is_isotropic_kahler(spec)
        assert classify(spec).label == QUASI_KAHLER
        assert is_isotropic_kahler(family_spec(FamilyParams.of(3, 4, 5, 0)))

    def test_swapped_form_differs_outside_quasi_kahler(self):
        # the two contractions agree only on quasi-Kähler structures
        norm = square_norm_report(heisenberg_plus_line())
        assert (norm.value, norm.swapped_form) == (4, -2)
        assert not norm.forms_agree and not norm.checked

    def test_float_mode_agrees(self):
        exact = square_norm_report(family_spec(FamilyParams.of(1, 2, 3, 4))).value
        approx = square_norm_report(family_spec(FamilyParams.of(1, 2, 3, 4), APPROX)).value
        assert abs(approx - float(exact)) < 1e-9
