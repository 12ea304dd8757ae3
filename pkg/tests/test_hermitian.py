from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ovm_cli.errors import DimensionError, DocumentError, DomainError
from ovm_cli.hermitian import (
    HermitianMatrix,
    apply_function,
    approx_eq,
    block_matrix,
    commutator_norm,
    eig,
    fractional_power,
    is_projection,
    is_psd,
    operator_norm,
    pinv_hermitian,
    random_contraction,
    random_hermitian,
    random_isometry,
    random_projection,
    random_psd,
    real_root,
    relative_residual,
)


def test_construction_symmetrizes() -> None:
    a = HermitianMatrix(np.array([[1.0, 2.0], [0.0, 3.0]]))

    assert np.allclose(a.data, [[1.0, 1.0], [1.0, 3.0]])
    assert not a.data.flags.writeable


def test_construction_rejects_non_square() -> None:
    with pytest.raises(DimensionError):
        HermitianMatrix(np.zeros((2, 3)))


def test_scalar_input_becomes_one_by_one() -> None:
    assert HermitianMatrix(np.array(2.5)).dim == 1


def test_from_dict_accepts_missing_imaginary_part() -> None:
    a = HermitianMatrix.from_dict({"re": [[2.0, 0.0], [0.0, 1.0]]})

    assert approx_eq(a, HermitianMatrix.diag([2.0, 1.0]))


def test_from_dict_reads_complex_entries() -> None:
    payload = {"re": [[1.0, 0.0], [0.0, 1.0]], "im": [[0.0, 1.0], [-1.0, 0.0]]}
    a = HermitianMatrix.from_dict(payload)

    assert a.entry(0, 1) == pytest.approx(1j)
    assert a.entry(1, 0) == pytest.approx(-1j)


def test_from_dict_collects_all_errors() -> None:
    with pytest.raises(DocumentError) as excinfo:
        HermitianMatrix.from_dict({"re": [[1.0, "x"]], "im": [[1.0], "row"]}, path="effect")

    errors = excinfo.value.errors
    assert any("effect.re[0][1]" in e for e in errors)
    assert any("effect.im" in e for e in errors)


def test_from_dict_rejects_non_finite() -> None:
    with pytest.raises(DocumentError, match="finite"):
        HermitianMatrix.from_dict({"re": [[float("nan")]]})


def test_from_dict_round_trips_to_dict() -> None:
    a = random_hermitian(np.random.default_rng(3), 3)

    assert approx_eq(HermitianMatrix.from_dict(a.to_dict()), a, 1e-15)


def test_dimension_mismatch_in_arithmetic() -> None:
    with pytest.raises(DimensionError):
        HermitianMatrix.identity(2) + HermitianMatrix.identity(3)


def test_complex_scaling_is_rejected() -> None:
    with pytest.raises(DomainError):
        HermitianMatrix.identity(2) * 1j


def test_negative_power_is_rejected() -> None:
    with pytest.raises(DomainError):
        HermitianMatrix.identity(2).power(-1)


def test_power_zero_is_identity() -> None:
    a = random_hermitian(np.random.default_rng(0), 3)

    assert approx_eq(a.power(0), HermitianMatrix.identity(3))


def test_eig_is_ascending_and_reconstructs() -> None:
    a = random_hermitian(np.random.default_rng(1), 4)
    dec = eig(a)

    assert np.all(np.diff(dec.eigenvalues) >= 0)
    assert approx_eq(dec.reconstruct(), a, 1e-12)


def test_eig_fixes_eigenvector_phases() -> None:
    a = random_hermitian(np.random.default_rng(2), 3)
    vectors = eig(a).eigenvectors

    for col in range(3):
        pivot = int(np.argmax(np.abs(vectors[:, col])))
        assert abs(vectors[pivot, col].imag) < 1e-12
        assert vectors[pivot, col].real > 0


def test_odd_root_is_defined_on_negative_spectrum() -> None:
    root, domain = real_root(3)
    result = apply_function(HermitianMatrix.diag([-8.0, 27.0]), root, domain)

    assert approx_eq(result, HermitianMatrix.diag([-2.0, 3.0]), 1e-12)


def test_even_root_rejects_negative_spectrum() -> None:
    root, domain = real_root(2)

    with pytest.raises(DomainError) as excinfo:
        apply_function(HermitianMatrix.diag([-1.0, 4.0]), root, domain)
    assert excinfo.value.value == pytest.approx(-1.0)


def test_tiny_negative_eigenvalues_are_clamped(caplog) -> None:
    root, domain = real_root(2)
    with caplog.at_level("WARNING", logger="ovm_cli.hermitian"):
        result = apply_function(HermitianMatrix.diag([-1e-13, 4.0]), root, domain)

    assert approx_eq(result, HermitianMatrix.diag([0.0, 2.0]), 1e-12)
    assert [r.levelname for r in caplog.records] == ["WARNING"]
    assert "Clamped 1 eigenvalue" in caplog.text


@pytest.mark.parametrize("seed", range(5))
def test_square_root_is_operator_monotone(seed: int) -> None:
    rng = np.random.default_rng(seed)
    a = random_psd(rng, 3)
    b = a + random_psd(rng, 3)

    gap = fractional_power(b, 0.5) - fractional_power(a, 0.5)

    assert is_psd(gap, 1e-9)


def test_real_root_rejects_order_zero() -> None:
    with pytest.raises(DomainError):
        real_root(0)


def test_fractional_power_zero_is_identity() -> None:
    a = HermitianMatrix.diag([0.0, 2.0])

    assert approx_eq(fractional_power(a, 0.0), HermitianMatrix.identity(2))


def test_fractional_power_square_root() -> None:
    a = HermitianMatrix.diag([4.0, 9.0])

    assert approx_eq(fractional_power(a, 0.5), HermitianMatrix.diag([2.0, 3.0]), 1e-12)


def test_is_psd_uses_relative_threshold() -> None:
    assert is_psd(HermitianMatrix.diag([-1e-12, 1e3]), 1e-10)
    assert not is_psd(HermitianMatrix.diag([-1e-3, 1.0]), 1e-10)


def test_is_projection() -> None:
    p = random_projection(np.random.default_rng(4), 4, 2)

    assert is_projection(p)
    assert not is_projection(p * 0.5)


def test_random_projection_rejects_bad_rank() -> None:
    with pytest.raises(DomainError):
        random_projection(np.random.default_rng(0), 3, 4)


def test_approx_eq_and_relative_residual() -> None:
    a = HermitianMatrix.identity(2)
    b = HermitianMatrix.diag([1.0, 1.0 + 1e-12])

    assert approx_eq(a, b)
    assert relative_residual(a, b) < 1e-12
    assert not approx_eq(a, HermitianMatrix.diag([1.0, 1.1]))


def test_commutator_norm_of_diagonals_is_zero() -> None:
    a, b = HermitianMatrix.diag([1.0, 2.0]), HermitianMatrix.diag([3.0, 4.0])

    assert commutator_norm(a, b) == 0


def test_pinv_hermitian_zeroes_null_space() -> None:
    result = pinv_hermitian(HermitianMatrix.diag([2.0, 0.0]))

    assert approx_eq(result, HermitianMatrix.diag([0.5, 0.0]), 1e-12)


def test_block_matrix_assembles_hermitian_blocks() -> None:
    one = HermitianMatrix.identity(1)
    m = block_matrix([[np.zeros((1, 1)), one], [one, one]])

    assert np.allclose(m.data, [[0.0, 1.0], [1.0, 1.0]])


def test_random_isometry_has_orthonormal_columns() -> None:
    v = random_isometry(np.random.default_rng(5), 5, 3)

    assert np.allclose(v.conj().T @ v, np.eye(3), atol=1e-12)


def test_random_contraction_norm_is_at_most_one() -> None:
    rng = np.random.default_rng(6)

    for _ in range(10):
        assert operator_norm(random_contraction(rng, 3)) <= 1.0 + 1e-12


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1), dim=st.integers(1, 4))
def test_functional_calculus_agrees_with_polynomials(seed: int, dim: int) -> None:
    a = random_hermitian(np.random.default_rng(seed), dim)

    assert approx_eq(apply_function(a, lambda t: t**3), a.power(3), 1e-10)
    assert approx_eq(apply_function(a, lambda t: t**2 - t), a.power(2) - a, 1e-10)


@settings(max_examples=30, deadline=None)
@given(
    values=st.lists(
        st.floats(min_value=0.5, max_value=3.0), min_size=1, max_size=4
    ),
    signs=st.lists(st.booleans(), min_size=4, max_size=4),
    seed=st.integers(min_value=0, max_value=2**32 - 1),
)
def test_odd_root_inverts_odd_power(values: list[float], signs: list[bool], seed: int) -> None:
    mu = [v if s else -v for v, s in zip(values, signs)]
    u = random_isometry(np.random.default_rng(seed), len(mu), len(mu))
    a = HermitianMatrix(u @ np.diag(mu) @ u.conj().T)
    root, domain = real_root(5)

    assert approx_eq(apply_function(a.power(5), root, domain), a, 1e-9)
