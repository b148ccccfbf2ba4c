from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from norden.algebra import (
    APPROX,
    EXACT,
    Arithmetic,
    Tensor,
    TensorError,
    LinearAlgebraError,
    contract,
    cyclic_sum,
    format_scalar,
    inverse,
    jform,
    lagrange_signature,
    parse_scalar,
    row_reduce,
    solve_linear,
    tensor_equal,
)
from conftest import small_rationals


def rational_array(draw_values, shape):
    return EXACT.array(np.array(draw_values, dtype=object).reshape(shape))


@st.composite
def rational_tensors(draw, dim=4, rank=3):
    values = draw(st.lists(small_rationals, min_size=dim**rank, max_size=dim**rank))
    return rational_array(values, (dim,) * rank)


@st.composite
def rational_matrices(draw, rows, cols):
    values = draw(st.lists(small_rationals, min_size=rows * cols, max_size=rows * cols))
    return rational_array(values, (rows, cols))


class TestScalars:
    @pytest.mark.parametrize("text, expected", [
        ("3/2", Fraction(3, 2)),
        ("-0.25", Fraction(-1, 4)),
        ("4", Fraction(4)),
        ("−1/3", Fraction(-1, 3)),
        (7, Fraction(7)),
    ])
    def test_parse_rational(self, text, expected):
        assert parse_scalar(text) == expected

    def test_parse_float_mode(self):
        assert parse_scalar("3/2", "float") == 1.5
        assert isinstance(parse_scalar("1", "float"), float)

    @pytest.mark.parametrize("bad", ["", "abc", "1/0", True, None, [1]])
    def test_parse_rejects(self, bad):
        with pytest.raises(ValueError):
            parse_scalar(bad)

    def test_format(self):
        assert format_scalar(Fraction(-3, 4)) == "-3/4"
        assert format_scalar(Fraction(5)) == "5"
        assert format_scalar(0.1) == "0.1"

    @given(small_rationals)
    def test_format_parse_roundtrip(self, q):
        assert parse_scalar(format_scalar(q)) == q

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            Arithmetic("decimal")

    def test_float_tolerance(self):
        assert APPROX.is_zero(np.array([1e-12, -5e-10]))
        assert not APPROX.is_zero(np.array([1e-6]))
        assert not EXACT.is_zero(np.array([Fraction(1, 10**15)], dtype=object))

    def test_mode_from_env(self, monkeypatch):
        monkeypatch.setenv("NORDEN_MODE", "float")
        assert Arithmetic.from_env().mode == "float"
        monkeypatch.delenv("NORDEN_MODE")
        assert Arithmetic.from_env().exact


class TestTensor:
    def test_components_are_read_only(self):
        t = Tensor.covariant(EXACT.zeros((4, 4)))
        with pytest.raises(ValueError):
            t.data[0, 0] = Fraction(1)

    @pytest.mark.parametrize("shape, valence", [
        ((3, 3), ("d", "d")),
        ((4, 2), ("d", "d")),
        ((4, 4), ("d",)),
        ((4, 4), ("d", "x")),
    ])
    def test_rejects_bad_shape_or_valence(self, shape, valence):
        with pytest.raises(TensorError):
            Tensor(EXACT.zeros(shape), valence)

    def test_arithmetic_requires_same_valence(self):
        a = Tensor(EXACT.zeros((4, 4)), ("d", "d"))
        b = Tensor(EXACT.zeros((4, 4)), ("u", "d"))
        with pytest.raises(TensorError):
            a + b

    def test_trace_of_mixed_tensor(self):
        m = EXACT.array([[1, 2], [3, 4]])
        assert contract(Tensor(m, ("u", "d")), 0, 1).data[()] == 5

    def test_covariant_pair_needs_metric(self):
        m = Tensor(EXACT.eye(2), ("d", "d"))
        with pytest.raises(TensorError):
            contract(m, 0, 1)
        ginv = Tensor(EXACT.array([[1, 0], [0, -1]]), ("u", "u"))
        assert contract(m, 0, 1, ginv).data[()] == 0

    @given(rational_tensors(rank=3), rational_tensors(rank=3), small_rationals)
    def test_contraction_is_linear(self, a, b, c):
        ginv = EXACT.array(np.diag([1, 1, -1, -1]))
        A = Tensor(a, ("d", "d", "u"))
        B = Tensor(b, ("d", "d", "u"))
        lhs = contract(A + B.scale(c), 0, 2)
        rhs = contract(A, 0, 2) + contract(B, 0, 2).scale(c)
        assert tensor_equal(lhs, rhs)
        G = Tensor(ginv, ("u", "u"))
        A2 = Tensor(a, ("d", "d", "d"))
        B2 = Tensor(b, ("d", "d", "d"))
        assert tensor_equal(contract(A2 + B2, 0, 1, G), contract(A2, 0, 1, G) + contract(B2, 0, 1, G))


def _jform_loop(t, J, slots_with_j, order):
    """out[order...] by explicit summation over J components."""
    n = t.shape[0]
    out = EXACT.zeros(t.shape)
    for idx in itertools.product(range(n), repeat=t.ndim):
        total = Fraction(0)
        ranges = [range(n) if s in slots_with_j else [idx[order[s]]] for s in range(t.ndim)]
        for args in itertools.product(*ranges):
            coef = Fraction(1)
            for s in slots_with_j:
                coef *= J[args[s], idx[order[s]]]
            total += coef * t[args]
        out[idx] = total
    return out


class TestJForm:
    @given(rational_tensors(rank=3))
    def test_signed_permutation_j_matches_loop(self, t):
        J = EXACT.array([[0, 0, -1, 0], [0, 0, 0, -1], [1, 0, 0, 0], [0, 1, 0, 0]])
        # out[x, y, z] = t(J e_y, e_z, J e_x)
        got = jform(t, J, "Jy,z,Jx->xyz")
        want = _jform_loop(t, J, {0, 2}, {0: 1, 1: 2, 2: 0})
        assert EXACT.equal(got, want)

    @given(rational_tensors(rank=3))
    def test_general_j_matches_loop(self, t):
        # a complex structure that is not a signed permutation: P J0 P^{-1}
        J0 = EXACT.array([[0, 0, -1, 0], [0, 0, 0, -1], [1, 0, 0, 0], [0, 1, 0, 0]])
        P = EXACT.array([[1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 1, 2], [0, 0, 0, 1]])
        J = P @ J0 @ inverse(P)
        assert EXACT.equal(J @ J, -EXACT.eye(4))
        got = jform(t, J, "x,Jy,Jz->xyz")
        want = _jform_loop(t, J, {1, 2}, {0: 0, 1: 1, 2: 2})
        assert EXACT.equal(got, want)

    def test_bad_pattern(self):
        with pytest.raises(TensorError):
            jform(EXACT.zeros((4, 4)), EXACT.eye(4), "x,y,z->xyz")
        with pytest.raises(TensorError):
            jform(EXACT.zeros((4, 4)), EXACT.eye(4), "Kx,y->xy")

    @given(rational_tensors(rank=3))
    def test_cyclic_sum_is_cyclic(self, t):
        s = cyclic_sum(t)
        assert EXACT.equal(s, np.einsum("yzx->xyz", s))


class TestLinearAlgebra:
    @given(rational_matrices(4, 6), st.lists(small_rationals, min_size=6, max_size=6))
    def test_solve_recovers_consistent_systems(self, A, x):
        b = A @ EXACT.array(x)
        sol = solve_linear(A, b)
        assert sol.consistent
        assert EXACT.equal(A @ sol.particular, b)
        for v in sol.nullspace:
            assert EXACT.is_zero(A @ v)
        assert sol.rank + sol.nullity == 6

    def test_inconsistent_system(self):
        A = EXACT.array([[1, 1], [2, 2]])
        b = EXACT.array([1, 3])
        assert not solve_linear(A, b).consistent

    def test_rank_of_reduced_form(self):
        A = EXACT.array([[1, 2, 3], [2, 4, 6], [1, 0, 1]])
        ech = row_reduce(A)
        assert ech.rank == 2
        assert ech.pivots == (0, 1)

    @given(rational_matrices(4, 4))
    def test_inverse(self, A):
        try:
            Ai = inverse(A)
        except LinearAlgebraError:
            assert row_reduce(A).rank < 4
            return
        assert EXACT.equal(A @ Ai, EXACT.eye(4))

    def test_float_solve(self):
        A = np.array([[2.0, 1.0], [1.0, 3.0]])
        sol = solve_linear(A, np.array([3.0, 5.0]))
        assert np.allclose(sol.particular, [0.8, 1.4])

    @given(rational_matrices(5, 5))
    def test_signature_matches_eigenvalues(self, M):
        sym = M + M.T
        pos, neg, zero = lagrange_signature(sym)
        eig = np.linalg.eigvalsh(sym.astype(float))
        scale = max(1.0, float(np.max(np.abs(eig))))
        assert pos == int(np.sum(eig > 1e-9 * scale))
        assert neg == int(np.sum(eig < -1e-9 * scale))
        assert zero == 5 - pos - neg

    def test_signature_with_zero_diagonal(self):
        hyperbolic = EXACT.array([[0, 1], [1, 0]])
        assert lagrange_signature(hyperbolic) == (1, 1, 0)
        assert lagrange_signature(EXACT.zeros((3, 3))) == (0, 0, 3)
