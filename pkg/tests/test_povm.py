from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ovm_cli.errors import DimensionError, DocumentError, DomainError, NormalizationError
from ovm_cli.hermitian import HermitianMatrix, approx_eq, is_psd
from ovm_cli.povm import (
    FiniteOVM,
    hankel,
    is_injective_on_support,
    is_spectral,
    moment,
    moment_real,
    power_mean_gap,
    pushforward,
    random_nonspectral_ovm,
    random_ovm,
    random_spectral_ovm,
    rescale,
    scalar_ovm,
    spectral_measure_of,
    standardize,
    variance,
)


def _half_half() -> FiniteOVM:
    return scalar_ovm({-1.0: 0.5, 1.0: 0.5})


def test_from_atoms_sorts_merges_and_drops() -> None:
    f = FiniteOVM.from_atoms([(2.0, 0.25), (1.0, 0.5), (2.0 + 1e-15, 0.25), (5.0, 0.0)])

    assert f.support == (1.0, 2.0)
    assert approx_eq(f.effects[1], HermitianMatrix.scalar(0.5))
    assert f.normalized


def test_from_atoms_flags_missing_mass() -> None:
    f = FiniteOVM.from_atoms([(0.0, 0.4), (1.0, 0.4)])

    assert not f.normalized
    assert f.normalization_defect == pytest.approx(0.2)
    with pytest.raises(NormalizationError):
        moment(f, 1)


def test_from_atoms_rejects_negative_effect() -> None:
    with pytest.raises(DomainError):
        FiniteOVM.from_atoms([(0.0, 1.5), (1.0, -0.5)])


def test_from_atoms_rejects_mixed_dimensions() -> None:
    with pytest.raises(DimensionError):
        FiniteOVM.from_atoms(
            [(0.0, HermitianMatrix.identity(1)), (1.0, HermitianMatrix.identity(2))]
        )


def test_from_atoms_rejects_empty_and_non_finite() -> None:
    with pytest.raises(DomainError):
        FiniteOVM.from_atoms([])
    with pytest.raises(DomainError):
        FiniteOVM.from_atoms([(float("inf"), 1.0)])


def test_from_dict_collects_every_atom_error() -> None:
    payload = {
        "dim": 1,
        "atoms": [
            {"lambda": "one", "effect": {"re": [[1.0]]}},
            {"lambda": 0.0, "effect": {"re": [[-1.0]]}},
            {"lambda": 1.0, "effect": {"re": [[1.0, 0.0], [0.0, 1.0]]}},
        ],
    }

    with pytest.raises(DocumentError) as excinfo:
        FiniteOVM.from_dict(payload)

    errors = excinfo.value.errors
    assert len(errors) == 3
    assert errors[0].startswith("atoms[0].lambda")
    assert "not positive semidefinite" in errors[1]
    assert "does not match dim=1" in errors[2]


def test_from_dict_rejects_bad_root() -> None:
    with pytest.raises(DocumentError):
        FiniteOVM.from_dict([])
    with pytest.raises(DocumentError) as excinfo:
        FiniteOVM.from_dict({"dim": 0, "atoms": []})
    assert len(excinfo.value.errors) == 2


def test_document_round_trip_keeps_digest() -> None:
    f = random_ovm(np.random.default_rng(7), 2, 3)
    again = FiniteOVM.from_dict(f.to_dict())

    assert again.digest() == f.digest()


def test_moment_zero_is_identity_and_moment_one_is_mean() -> None:
    f = scalar_ovm({0.0: 0.25, 2.0: 0.75}, dim=2)

    assert approx_eq(moment(f, 0), HermitianMatrix.identity(2))
    assert approx_eq(moment(f, 1), HermitianMatrix.identity(2) * 1.5)


def test_negative_moment_order_rejected() -> None:
    with pytest.raises(DomainError):
        moment(_half_half(), -1)


def test_variance_of_two_point_scalar_measure() -> None:
    var = variance(_half_half())

    assert approx_eq(var, HermitianMatrix.scalar(1.0))


def test_spectral_measure_has_zero_variance() -> None:
    t = HermitianMatrix.diag([1.0, 2.0, 2.0])
    f = spectral_measure_of(t)

    assert len(f) == 2
    assert is_spectral(f)
    assert variance(f).norm_fro() < 1e-12
    for k in range(5):
        assert approx_eq(moment(f, k), t.power(k))


def test_scalar_measure_with_two_atoms_is_not_spectral() -> None:
    assert not is_spectral(_half_half())


def test_random_spectral_ovm_is_spectral() -> None:
    rng = np.random.default_rng(8)

    for dim in (1, 2, 4):
        assert is_spectral(random_spectral_ovm(rng, dim))


def test_random_nonspectral_ovm_is_normalized_and_not_spectral() -> None:
    f = random_nonspectral_ovm(np.random.default_rng(9), 3)

    assert f.normalized
    assert not is_spectral(f, 1e-8)


def test_random_ovm_is_reproducible() -> None:
    a = random_ovm(np.random.default_rng(11), 3, 4)
    b = random_ovm(np.random.default_rng(11), 3, 4)

    assert a.digest() == b.digest()


def test_evaluate_sums_atoms_in_intervals() -> None:
    f = scalar_ovm({-1.0: 0.2, 0.0: 0.3, 2.0: 0.5})

    assert approx_eq(f.evaluate([(-1.0, 0.0)]), HermitianMatrix.scalar(0.5))
    assert approx_eq(f.evaluate([(-5.0, -2.0), (1.5, 3.0)]), HermitianMatrix.scalar(0.5))
    assert approx_eq(f.evaluate([]), HermitianMatrix.scalar(0.0))


def test_moment_real_uses_zero_power_convention() -> None:
    f = scalar_ovm({0.0: 0.5, 4.0: 0.5})

    assert approx_eq(moment_real(f, 0.0), HermitianMatrix.identity(1))
    assert approx_eq(moment_real(f, 0.5), HermitianMatrix.scalar(1.0))


def test_moment_real_rejects_negative_support_and_large_exponent() -> None:
    with pytest.raises(DomainError):
        moment_real(_half_half(), 0.5)
    with pytest.raises(DomainError):
        moment_real(scalar_ovm({1.0: 1.0}), 65.0)


def test_power_mean_gap_vanishes_only_for_spectral() -> None:
    spectral = spectral_measure_of(HermitianMatrix.diag([1.0, 4.0]))
    noisy = scalar_ovm({1.0: 0.5, 4.0: 0.5})

    assert power_mean_gap(spectral, 0.5).norm_fro() < 1e-12
    gap = power_mean_gap(noisy, 0.5)
    assert is_psd(gap)
    assert gap.norm_fro() > 1e-3


def test_power_mean_gap_rejects_exponent_one() -> None:
    with pytest.raises(DomainError):
        power_mean_gap(scalar_ovm({1.0: 1.0}), 1.0)


def test_pushforward_merges_colliding_atoms() -> None:
    f = _half_half()
    image = pushforward(f, lambda x: x * x)

    assert image.support == (1.0,)
    assert approx_eq(image.effects[0], HermitianMatrix.scalar(1.0))
    assert not is_injective_on_support(f, lambda x: x * x)
    assert is_injective_on_support(f, lambda x: x**3)


def test_rescale_scales_moments() -> None:
    f = random_ovm(np.random.default_rng(12), 2, 3)
    g = rescale(f, -2.0)

    assert approx_eq(moment(g, 3), moment(f, 3) * -8.0, 1e-12)


def test_rescale_by_zero_rejected() -> None:
    with pytest.raises(DomainError):
        rescale(_half_half(), 0.0)


def test_pushforward_by_cube_preserves_spectrality() -> None:
    rng = np.random.default_rng(31)
    spectral = random_spectral_ovm(rng, 3)
    noisy = random_nonspectral_ovm(rng, 3)

    assert is_spectral(pushforward(spectral, lambda x: x**3))
    assert not is_spectral(pushforward(noisy, lambda x: x**3))


def test_standardize_spreads_support_and_shrinks_variance() -> None:
    f = scalar_ovm({1.0: 0.25, 3.0: 0.5, 5.0: 0.25})
    g = standardize(f)

    assert g.support == pytest.approx((-1.0, 0.0, 1.0))
    assert approx_eq(variance(f), HermitianMatrix.scalar(2.0), 1e-12)
    assert approx_eq(variance(g), HermitianMatrix.scalar(0.5), 1e-12)


def test_standardize_point_mass_lands_on_zero() -> None:
    g = standardize(scalar_ovm({7.0: 1.0}))

    assert g.support == (0.0,)
    assert g.normalized


def test_hankel_rejects_negative_order() -> None:
    with pytest.raises(DomainError):
        hankel(_half_half(), -1)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1), dim=st.integers(1, 3))
def test_hankel_and_variance_are_psd(seed: int, dim: int) -> None:
    rng = np.random.default_rng(seed)
    f = random_ovm(rng, dim, int(rng.integers(1, 5)))

    assert f.normalized
    assert is_psd(variance(f), 1e-9)
    for n in range(4):
        assert is_psd(hankel(f, n), 1e-8)
