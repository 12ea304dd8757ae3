from __future__ import annotations

import numpy as np
import pytest

from ovm_cli.characterization import (
    certify_compression,
    certify_positive,
    certify_transported,
    certify_two_moment,
    holder_check,
    in_omega,
    recover_t_odd,
    search_positive_violation,
    search_violation,
)
from ovm_cli.counterexample import GOLDEN_RATIO, build_povm, fibonacci_example, solve_params
from ovm_cli.errors import DimensionError, DomainError
from ovm_cli.hermitian import (
    HermitianMatrix,
    approx_eq,
    fractional_power,
    random_hermitian,
    random_isometry,
    random_projection,
)
from ovm_cli.inequalities import CompressionMap
from ovm_cli.povm import (
    moment_real,
    random_nonspectral_ovm,
    rescale,
    scalar_ovm,
    spectral_measure_of,
)


@pytest.mark.parametrize(
    "p,q,expected",
    [
        (1, 2, True),
        (3, 8, True),
        (5, 6, True),
        (2, 3, False),
        (2, 4, False),
        (1, 3, False),
        (3, 3, False),
        (3, 2, False),
    ],
)
def test_in_omega(p: int, q: int, expected: bool) -> None:
    assert in_omega(p, q) is expected


def test_spectral_measure_of_t_is_certified() -> None:
    t = random_hermitian(np.random.default_rng(1), 3)
    verdict = certify_two_moment(t, spectral_measure_of(t), 1, 2)

    assert verdict.all_match
    assert verdict.pair_in_omega
    assert verdict.direct_spectral
    assert verdict.theorem_consistent
    assert verdict.criterion == "two-moment"


def test_counterexample_matches_without_being_spectral() -> None:
    t, f = build_povm(solve_params(2, 3))
    verdict = certify_two_moment(t, f, 2, 3)

    assert verdict.moments_match == (True, True)
    assert not verdict.pair_in_omega
    assert not verdict.direct_spectral
    assert verdict.theorem_consistent


def test_golden_ratio_measure_matches_second_and_third_moment() -> None:
    example = fibonacci_example()
    verdict = certify_two_moment(example.T, example.F, 2, 3)

    assert verdict.all_match
    assert not verdict.direct_spectral
    assert verdict.theorem_consistent


def test_golden_ratio_measure_fails_first_moment() -> None:
    example = fibonacci_example()
    verdict = certify_two_moment(example.T, example.F, 1, 2)

    assert verdict.moments_match == (False, True)
    assert verdict.residuals[0] == pytest.approx(1 / GOLDEN_RATIO)
    assert verdict.theorem_consistent


@pytest.mark.parametrize("factor", [0.02, 50.0])
def test_two_moment_verdict_ignores_overall_scale(factor: float) -> None:
    f = random_nonspectral_ovm(np.random.default_rng(17), 3)
    g = rescale(f, factor)
    base = certify_two_moment(recover_t_odd(f, 5), f, 5, 6)
    scaled = certify_two_moment(recover_t_odd(g, 5), g, 5, 6)

    assert scaled.moments_match == (True, False)
    assert scaled.theorem_consistent
    assert scaled.residuals[1] > 1e-6
    assert scaled.residuals[1] == pytest.approx(base.residuals[1], rel=1e-6)


def test_verdict_to_dict_carries_consistency_flag() -> None:
    t, f = build_povm(solve_params(2, 3))
    payload = certify_two_moment(t, f, 2, 3).to_dict()

    assert payload["theorem_consistent"] is True
    assert payload["exponents"] == [2.0, 3.0]
    assert set(payload) >= {"moments_match", "pair_in_omega", "direct_spectral", "residuals"}


def test_certify_two_moment_validates_inputs() -> None:
    f = scalar_ovm({0.0: 0.5, 1.0: 0.5})

    with pytest.raises(DimensionError):
        certify_two_moment(HermitianMatrix.identity(2), f, 1, 2)
    with pytest.raises(DomainError):
        certify_two_moment(HermitianMatrix.identity(1), f, 3, 2)
    with pytest.raises(DomainError):
        certify_two_moment(HermitianMatrix.identity(1), f, 0, 2)


def test_recover_t_odd_inverts_odd_moment() -> None:
    u = random_isometry(np.random.default_rng(2), 3, 3)
    t = HermitianMatrix(u @ np.diag([-1.5, 0.7, 2.0]) @ u.conj().T)

    assert approx_eq(recover_t_odd(spectral_measure_of(t), 3), t, 1e-9)


def test_recover_t_odd_rejects_even_exponent() -> None:
    with pytest.raises(DomainError):
        recover_t_odd(scalar_ovm({1.0: 1.0}), 2)


def test_certify_positive_accepts_spectral_measure() -> None:
    t = HermitianMatrix.diag([0.5, 2.0])
    verdict = certify_positive(t, spectral_measure_of(t), 0.5, 2.0)

    assert verdict.all_match
    assert verdict.direct_spectral
    assert verdict.criterion == "positive"


def test_certify_positive_rejects_non_spectral_measure() -> None:
    f = random_nonspectral_ovm(np.random.default_rng(3), 2, nonnegative=True)
    t = fractional_power(moment_real(f, 0.5), 2.0)
    verdict = certify_positive(t, f, 0.5, 2.0)

    assert verdict.moments_match[0]
    assert not verdict.moments_match[1]
    assert verdict.theorem_consistent


def test_certify_positive_validates_inputs() -> None:
    t = HermitianMatrix.identity(1)
    f = scalar_ovm({1.0: 1.0})

    with pytest.raises(DomainError):
        certify_positive(t, f, 1.0, 1.0)
    with pytest.raises(DomainError):
        certify_positive(t, f, -1.0, 2.0)
    with pytest.raises(DomainError):
        certify_positive(HermitianMatrix.scalar(-1.0), f, 1.0, 2.0)
    with pytest.raises(DomainError):
        certify_positive(t, scalar_ovm({-1.0: 0.5, 1.0: 0.5}), 1.0, 2.0)


def test_certify_transported_applies_for_injective_nonnegative_map() -> None:
    t = HermitianMatrix.diag([1.0, 2.0])
    f = spectral_measure_of(t)
    shifted = HermitianMatrix.diag([2.0, 3.0])

    verdict = certify_transported(f, lambda x: x + 1.0, shifted, 1, 3)

    assert verdict.pair_in_omega
    assert verdict.all_match
    assert verdict.direct_spectral
    assert verdict.criterion == "transported"


def test_certify_transported_does_not_apply_to_collapsing_map() -> None:
    f = scalar_ovm({-1.0: 0.5, 1.0: 0.5})

    verdict = certify_transported(f, lambda x: x * x, HermitianMatrix.identity(1), 1, 2)

    assert verdict.all_match
    assert not verdict.pair_in_omega
    assert not verdict.direct_spectral
    assert verdict.theorem_consistent


def test_certify_compression_commuting_operator_is_multiplicative() -> None:
    c = CompressionMap.from_isometry(np.eye(3)[:, :2])
    a = HermitianMatrix.diag([1.0, -2.0, 3.0])

    verdict = certify_compression(c, a, 1, 2)

    assert verdict.all_match
    assert verdict.direct_spectral
    assert verdict.theorem_consistent


def test_certify_compression_generic_operator_fails_second_moment() -> None:
    rng = np.random.default_rng(4)
    c = CompressionMap.from_projection(random_projection(rng, 4, 2))
    a = random_hermitian(rng, 4)

    verdict = certify_compression(c, a, 1, 2)

    assert verdict.moments_match == (True, False)
    assert not verdict.direct_spectral
    assert verdict.theorem_consistent


def test_certify_compression_needs_odd_p() -> None:
    c = CompressionMap.from_isometry(np.eye(2))

    with pytest.raises(DomainError):
        certify_compression(c, HermitianMatrix.identity(2), 2, 4)


@pytest.mark.parametrize("p,q", [(1, 2), (1, 4), (3, 4), (3, 8)])
def test_holder_bound_holds_for_even_q(p: int, q: int) -> None:
    rng = np.random.default_rng(p * 10 + q)

    for _ in range(50):
        alpha = float(rng.uniform(0.01, 0.99))
        l1, l2 = (float(x) for x in rng.uniform(-3.0, 3.0, 2))
        lhs, rhs = holder_check(alpha, l1, l2, p, q)
        assert lhs <= rhs * (1.0 + 1e-12) + 1e-15


def test_search_finds_no_witness_in_omega() -> None:
    outcome = search_violation(1, 2, trials=20, seed=0, dim_max=3)

    assert outcome.witness is None
    assert outcome.evaluated == 20
    assert outcome.min_residual > 1e-6


def test_search_without_witness_at_full_trial_count() -> None:
    outcome = search_violation(5, 6, trials=500, seed=42, dim_max=4)

    assert outcome.witness is None
    assert outcome.evaluated == 500
    assert outcome.min_residual > 1e-6


def test_search_is_independent_of_worker_count() -> None:
    serial = search_violation(3, 4, trials=12, seed=5, dim_max=3, workers=1)
    threaded = search_violation(3, 4, trials=12, seed=5, dim_max=3, workers=3)

    assert serial.residuals == threaded.residuals
    assert serial.to_dict() == threaded.to_dict()


def test_search_outside_omega_records_injected_counterexample() -> None:
    outcome = search_violation(2, 3, trials=5, seed=0, inject=[build_povm(solve_params(2, 3))])

    assert outcome.evaluated == 1
    assert outcome.witness is None
    assert outcome.matched is not None
    assert outcome.matched.trial == 5
    assert outcome.to_dict()["matched"]["moments_match"] == [True, True]


def test_search_rejects_zero_trials() -> None:
    with pytest.raises(DomainError):
        search_violation(1, 2, trials=0, seed=0)


def test_positive_search_finds_no_witness() -> None:
    outcome = search_positive_violation(0.5, 2.0, trials=10, seed=1, dim_max=3)

    assert outcome.witness is None
    assert outcome.evaluated == 10
