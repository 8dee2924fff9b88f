import numpy as np
import pytest

from mpursuit.linear_core import CoeffVector, axpy, basis_vector, dot, norm


def vec(*vals):
    return CoeffVector.of(*vals)


def test_dot_orthogonal_basis():
    assert dot(vec(1, 0), vec(0, 1)) == 0.0


def test_dot_unit_vector_with_itself():
    assert dot(vec(0.6, 0.8), vec(0.6, 0.8)) == pytest.approx(1.0, abs=1e-15)


def test_dot_hand_sum():
    assert dot(vec(1, 2, 3), vec(4, 5, 6)) == 32.0


def test_dot_mismatched_lengths_uses_shared_prefix():
    assert dot(vec(1, 2, 3), vec(2, 2)) == 6.0


def test_axpy_zero_scale():
    out = axpy(0.0, vec(7, -3), vec(1, 1))
    assert np.array_equal(out.coeffs, [1.0, 1.0])


def test_axpy_cancellation():
    out = axpy(-1.0, vec(1, 1), vec(1, 1))
    assert np.array_equal(out.coeffs, [0.0, 0.0])


def test_axpy_componentwise():
    out = axpy(2.0, vec(1, 0, 3), vec(0, 1, 0))
    assert np.array_equal(out.coeffs, [2.0, 1.0, 6.0])
    assert out.active_len == 3


def test_axpy_grows_to_longer_input():
    out = axpy(1.0, vec(1), vec(0, 0, 5))
    assert out.active_len == 3
    assert np.array_equal(out.coeffs, [1.0, 0.0, 5.0])


def test_basis_vector():
    e3 = basis_vector(3, n=5)
    assert e3.active_len == 5
    assert np.array_equal(e3.coeffs, [0, 0, 1, 0, 0])
    with pytest.raises(ValueError):
        basis_vector(0)


def test_vectors_are_immutable():
    v = vec(1.0, 2.0)
    with pytest.raises(ValueError):
        v.coeffs[0] = 5.0


def test_cauchy_schwarz_randomized(rng):
    for _ in range(200):
        n = int(rng.integers(1, 40))
        u = CoeffVector(rng.standard_normal(n))
        v = CoeffVector(rng.standard_normal(n))
        assert abs(dot(u, v)) <= norm(u) * norm(v) * (1 + 1e-12)


def test_axpy_norm_identity_randomized(rng):
    for _ in range(200):
        n = int(rng.integers(2, 60))
        a = float(rng.standard_normal())
        u = CoeffVector(rng.standard_normal(n))
        v = CoeffVector(rng.standard_normal(n))
        lhs = norm(axpy(a, u, v)) ** 2
        rhs = a * a * norm(u) ** 2 + 2 * a * dot(u, v) + norm(v) ** 2
        assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-12)


def test_dot_symmetric_bilinear_randomized(rng):
    for _ in range(200):
        n = int(rng.integers(2, 50))
        u = CoeffVector(rng.standard_normal(n))
        v = CoeffVector(rng.standard_normal(n))
        w = CoeffVector(rng.standard_normal(n))
        a, b = rng.standard_normal(2)
        assert dot(u, v) == dot(v, u)
        lhs = dot(axpy(a, u, CoeffVector(b * v.coeffs)), w)
        rhs = a * dot(u, w) + b * dot(v, w)
        scale = max(abs(lhs), abs(rhs), 1.0)
        assert abs(lhs - rhs) <= 1e-12 * scale


def test_norm_square_accuracy_large(rng):
    x = rng.standard_normal(10 ** 6)
    v = CoeffVector(x)
    reference = float(np.sum(x.astype(np.longdouble) ** 2))
    assert norm(v) ** 2 == pytest.approx(reference, rel=1e-12)
