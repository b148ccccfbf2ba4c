from __future__ import annotations

import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given

from norden.algebra import EXACT
from norden.catalog import abelian, heisenberg_plus_line, sl2_plus_line
from norden.family import FamilyParams, family_spec
from norden.lie import (
    LieAlgebra,
    ManifoldSpec,
    SpecError,
    ValidationError,
    bracket,
    check_killing_associated,
    load_spec,
    spec_from_dict,
    spec_to_dict,
    standard_structure,
    validate,
)
from conftest import lambdas


def doc(constants, J=None, g=None, dim=4):
    return {
        "dim": dim,
        "structure_constants": [{"i": i, "j": j, "k": k, "value": v} for i, j, k, v in constants],
        "J": J or [[0, 0, -1, 0], [0, 0, 0, -1], [1, 0, 0, 0], [0, 1, 0, 0]],
        "g": g or [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, -1, 0], [0, 0, 0, -1]],
    }


class TestValidation:
    def test_abelian_is_valid(self):
        rep = validate(abelian())
        assert rep.ok
        assert rep.signature == (2, 2, 0)

    def test_jacobi_violation_has_witness(self):
        # [X1,X2]=X3, [X2,X3]=X1, [X1,X3]=X1 is not a Lie algebra
        spec = spec_from_dict(doc([(1, 2, 3, 1), (2, 3, 1, 1), (1, 3, 1, 1)]))
        rep = validate(spec)
        jac = rep.check("jacobi")
        assert not jac.passed
        assert jac.witness is not None and all(1 <= w <= 4 for w in jac.witness)
        with pytest.raises(ValidationError, match="jacobi"):
            spec.require_valid()

    def test_inconsistent_antisymmetry(self):
        spec = spec_from_dict(doc([(1, 2, 3, 1), (2, 1, 3, 1)]))
        assert validate(spec).check("antisymmetry").witness == (1, 2, 3)

    def test_j_squared(self):
        spec = spec_from_dict(doc([], J=np.eye(4, dtype=int).tolist()))
        assert not validate(spec).check("J_squared").passed

    def test_definite_metric_is_not_norden(self):
        spec = spec_from_dict(doc([], g=np.eye(4, dtype=int).tolist()))
        rep = validate(spec)
        assert not rep.check("g_signature").passed
        assert not rep.check("anti_isometry").passed

    def test_degenerate_metric(self):
        g = [[1, 0, 0, 0], [0, 0, 0, 0], [0, 0, -1, 0], [0, 0, 0, 0]]
        rep = validate(spec_from_dict(doc([], g=g)))
        assert not rep.check("g_nondegenerate").passed

    def test_odd_dimension_rejected(self):
        with pytest.raises(SpecError):
            spec_from_dict({"dim": 3, "J": [[0] * 3] * 3, "g": [[0] * 3] * 3})

    def test_associated_metric_symmetric(self):
        for spec in (abelian(), heisenberg_plus_line(), sl2_plus_line()):
            ga = spec.norden.g_assoc.data
            assert EXACT.equal(ga, ga.T)

    @given(lambdas)
    def test_family_satisfies_all_invariants(self, lam):
        spec = family_spec(FamilyParams.of(*lam))
        assert validate(spec).ok
        assert check_killing_associated(spec) == 0

    def test_killing_fails_off_family(self):
        assert check_killing_associated(sl2_plus_line()) != 0


class TestSchema:
    def test_partner_filled_by_antisymmetry(self):
        spec = spec_from_dict(doc([(1, 2, 3, "3/2")]))
        assert spec.C[0, 1, 2] == Fraction(3, 2)
        assert spec.C[1, 0, 2] == Fraction(-3, 2)

    def test_roundtrip(self):
        spec = family_spec(FamilyParams.of(1, "-2/3", 0, 5))
        again = spec_from_dict(json.loads(json.dumps(spec_to_dict(spec))))
        assert EXACT.equal(again.C, spec.C)
        assert EXACT.equal(again.J, spec.J)
        assert EXACT.equal(again.g, spec.g)

    def test_float_mode(self):
        spec = spec_from_dict(doc([(1, 2, 1, "1/4")]), mode="float")
        assert spec.C.dtype == np.float64
        assert spec.C[1, 0, 0] == -0.25
        assert validate(spec).ok

    @pytest.mark.parametrize("bad", [
        [],
        {"dim": "4"},
        {"dim": 4, "J": [[0]], "g": [[0]]},
        {"dim": 4, "structure_constants": [{"i": 9, "j": 1, "k": 1, "value": 1}], "J": [], "g": []},
        {"dim": 4, "structure_constants": [{"i": 1, "j": 2, "k": 3, "value": "x"}]},
        {"dim": 4, "structure_constants": []},
    ])
    def test_malformed(self, bad):
        with pytest.raises(SpecError):
            spec_from_dict(bad)

    def test_load_rejects_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(SpecError):
            load_spec(path)


class TestBrackets:
    def test_family_first_parameter(self):
        spec = family_spec(FamilyParams.of(1, 0, 0, 0))
        e = [EXACT.array(np.eye(4, dtype=int)[i]) for i in range(4)]
        assert list(bracket(spec, e[0], e[1])) == [1, 0, 0, 0]
        assert list(bracket(spec, e[0], e[2])) == [0, 0, 0, -1]
        assert list(bracket(spec, e[1], e[2])) == [0, 0, 1, 0]
        nonzero = {(i, j) for i in range(4) for j in range(i + 1, 4) if any(spec.C[i, j])}
        assert nonzero == {(0, 1), (0, 2), (1, 2)}

    def test_family_second_parameter(self):
        spec = family_spec(FamilyParams.of(0, 1, 0, 0))
        assert list(spec.C[0, 1]) == [0, 1, 0, 0]
        assert list(spec.C[0, 3]) == [0, 0, 0, -1]
        assert list(spec.C[1, 3]) == [0, 0, 1, 0]

    def test_bracket_shape_checked(self):
        with pytest.raises(SpecError):
            bracket(abelian(), [1, 0], [0, 1])

    def test_dimension_mismatch(self):
        with pytest.raises(SpecError):
            ManifoldSpec(LieAlgebra.abelian(4), standard_structure(6))
