"""
Unit tests for sepscope/states.py - state families and closed forms.

Run with: uv run pytest tests/test_states.py -v
"""

import math

import numpy as np
import pytest

from sepscope.criteria import DensityMatrix, Verdict, ppt_test, rccn_test
from sepscope.errors import (
    DimensionMismatchError,
    DimensionTooSmallError,
    NotNormalizedError,
    ParamOutOfRangeError,
    SupportOverlapError,
    ValidationError,
    WeightsInvalidError,
)
from sepscope.matkernel import BipartiteIndex
from sepscope.realign import CoefficientMatrix
from sepscope.states import (
    StateFamily,
    StateSpec,
    WeightScheme,
    build_state,
    example39_is_ppt,
    example39_norm,
    example39_published_norm,
    example39_rho,
    example39_rho_t,
    example39_weights,
    geometric_tail_weights,
    isotropic,
    isotropic_norm,
    mixture,
    pure_from_coefficients,
    random_separable_state,
    rho_alpha,
    rho_alpha_norm,
    rho_eps_c,
    rho_t_alpha,
    sigma_tail,
    varrho_tail,
    werner_mc,
    werner_mc_norm,
)


def _norm(rho):
    return rccn_test(rho).value


def _min_eig(rho):
    return ppt_test(rho).value


def _diag_state(values, d):
    return DensityMatrix.from_matrix(np.diag(values), BipartiteIndex(d, d))


class TestPureAndMixture:
    """Tests for pure_from_coefficients() and mixture()."""

    def test_pure_bell(self):
        rho = pure_from_coefficients(CoefficientMatrix.from_amplitudes(np.eye(2) / np.sqrt(2)))
        assert rho.purity == pytest.approx(1.0)
        assert _norm(rho) == pytest.approx(2.0)

    def test_pure_not_normalized(self):
        with pytest.raises(NotNormalizedError):
            pure_from_coefficients(CoefficientMatrix.from_amplitudes(np.eye(2)))

    def test_single_component_is_identity(self, maximally_mixed):
        np.testing.assert_array_equal(mixture([(1.0, maximally_mixed)]).matrix, maximally_mixed.matrix)

    def test_classical_mixture(self):
        rho = mixture([(0.5, _diag_state([1, 0, 0, 0], 2)), (0.5, _diag_state([0, 0, 0, 1], 2))])
        np.testing.assert_allclose(np.diag(rho.matrix).real, [0.5, 0, 0, 0.5])
        assert rccn_test(rho).verdict is Verdict.INCONCLUSIVE

    def test_random_product_mixture_norm(self, rng):
        rho = random_separable_state(3, 3, rng, max_components=10)
        assert _norm(rho) <= 1 + 1e-12

    def test_weights_must_sum_to_one(self, maximally_mixed):
        with pytest.raises(WeightsInvalidError):
            mixture([(0.5, maximally_mixed), (0.4, maximally_mixed)])

    def test_negative_weight(self, maximally_mixed):
        with pytest.raises(WeightsInvalidError):
            mixture([(1.5, maximally_mixed), (-0.5, maximally_mixed)])

    def test_empty(self):
        with pytest.raises(WeightsInvalidError):
            mixture([])

    def test_dims_must_match(self, maximally_mixed):
        other = _diag_state([1] + [0] * 8, 3)
        with pytest.raises(DimensionMismatchError):
            mixture([(0.5, maximally_mixed), (0.5, other)])


class TestRhoAlpha:
    """Tests for rho_alpha(), sigma_tail() and rho_t_alpha()."""

    def test_closed_form_grid(self):
        for alpha in np.linspace(2, 5, 31):
            assert _norm(rho_alpha(alpha, 4)) == pytest.approx(rho_alpha_norm(alpha), abs=1e-9)

    @pytest.mark.parametrize("alpha", [2.0, 3.0])
    def test_boundary_values(self, alpha):
        assert rho_alpha_norm(alpha) == pytest.approx(1.0, abs=1e-15)
        assert _norm(rho_alpha(alpha, 4)) == pytest.approx(1.0, abs=1e-9)

    def test_norm_at_most_one_on_2_3(self):
        for alpha in np.linspace(2, 3, 11):
            assert _norm(rho_alpha(alpha, 4)) <= 1 + 1e-9

    def test_detection_onset(self):
        rho = rho_alpha(3.0001, 4)
        assert _norm(rho) > 1 + 1e-9
        assert rccn_test(rho).verdict is Verdict.ENTANGLED

    def test_alpha_4_value(self):
        assert rho_alpha_norm(4.0) == pytest.approx(19 / 21 + 2 * math.sqrt(7) / 21)
        assert _norm(rho_alpha(4.0, 8)) == pytest.approx(1.156738, abs=1e-6)

    def test_ppt_window(self):
        for alpha in np.linspace(3.1, 4.0, 10):
            assert _min_eig(rho_alpha(alpha, 4)) >= -1e-9

    def test_npt_above_four(self):
        assert ppt_test(rho_alpha(4.5, 3)).verdict is Verdict.ENTANGLED

    def test_alpha_out_of_range(self):
        with pytest.raises(ParamOutOfRangeError):
            rho_alpha(1.5, 4)

    def test_dim_too_small(self):
        with pytest.raises(DimensionTooSmallError):
            rho_alpha(3.0, 2)

    def test_sigma_tail_weights(self):
        weights = geometric_tail_weights(3, 8, 0.5)
        assert len(weights) == 5
        assert weights.sum() == pytest.approx(1.0, abs=1e-15)
        assert weights[1] / weights[0] == pytest.approx(0.5)

    def test_sigma_tail_separable_norm_one(self):
        for d in (4, 6, 12):
            rho = sigma_tail(d)
            assert _norm(rho) == pytest.approx(1.0, abs=1e-12)
            assert ppt_test(rho).verdict is Verdict.INCONCLUSIVE

    def test_sigma_tail_needs_room(self):
        with pytest.raises(DimensionTooSmallError):
            sigma_tail(3)

    def test_rho_t_alpha_ppt_entangled(self):
        rho = rho_t_alpha(0.5, 3.5, 8)
        assert rccn_test(rho).verdict is Verdict.ENTANGLED
        assert ppt_test(rho).verdict is Verdict.INCONCLUSIVE

    def test_rho_t_alpha_norm_split(self):
        for t in (0.1, 0.5, 0.9):
            assert _norm(rho_t_alpha(t, 4.0, 8)) == pytest.approx(t * rho_alpha_norm(4.0) + 1 - t, abs=1e-10)

    def test_rho_t_alpha_ranges(self):
        with pytest.raises(ParamOutOfRangeError):
            rho_t_alpha(0.0, 3.5, 8)
        with pytest.raises(ParamOutOfRangeError):
            rho_t_alpha(0.5, 3.0, 8)
        with pytest.raises(DimensionTooSmallError):
            rho_t_alpha(0.5, 3.5, 3)


class TestCyclicFamily:
    """Tests for the cyclic 4x4 family."""

    @pytest.mark.parametrize("q1,printed", [(1 / 7, 0.9866), (1 / 8, 0.9496), (1 / 100, 0.7264)])
    def test_printed_values(self, q1, printed):
        q = example39_weights(q1, WeightScheme.NON_PPT)
        assert example39_published_norm(q) == pytest.approx(printed, abs=5e-5)

    @pytest.mark.parametrize("q1", [1 / 7, 1 / 8, 1 / 100])
    def test_exact_norm_below_one(self, q1):
        q = example39_weights(q1, WeightScheme.NON_PPT)
        value = _norm(example39_rho(q, 4))
        assert value == pytest.approx(example39_norm(q), abs=1e-9)
        assert value < 1

    def test_exact_norm_at_one_seventh(self):
        q = example39_weights(1 / 7, WeightScheme.NON_PPT)
        assert example39_norm(q) == pytest.approx(0.934367, abs=1e-6)

    def test_closed_form_random_weights(self, rng):
        for _ in range(100):
            q = rng.dirichlet(np.ones(4))
            q = q / q.sum()
            assert _norm(example39_rho(q, 4)) == pytest.approx(example39_norm(q), abs=1e-9)

    def test_schemes(self):
        assert example39_weights(0.2, WeightScheme.PPT) == pytest.approx((0.2, 0.1, 0.2, 0.5))
        assert example39_weights(0.2, WeightScheme.NON_PPT) == pytest.approx((0.2, 0.2, 0.1, 0.5))

    def test_ppt_condition_matches_spectrum(self, rng):
        for _ in range(50):
            q = rng.dirichlet(np.ones(4))
            q = q / q.sum()
            is_ppt = _min_eig(example39_rho(q, 4)) >= -1e-12
            assert is_ppt == example39_is_ppt(q)

    def test_ppt_scheme_detected_above_one_sixth(self):
        q = example39_weights(0.19, WeightScheme.PPT)
        rho = example39_rho(q, 4)
        assert example39_is_ppt(q)
        assert ppt_test(rho).verdict is Verdict.INCONCLUSIVE
        assert rccn_test(rho).verdict is Verdict.ENTANGLED

    def test_non_ppt_scheme(self):
        q = example39_weights(1 / 7, WeightScheme.NON_PPT)
        assert not example39_is_ppt(q)
        assert ppt_test(example39_rho(q, 4)).verdict is Verdict.ENTANGLED

    def test_weights_invalid(self):
        with pytest.raises(WeightsInvalidError):
            example39_rho([0.5, 0.5, 0.5, 0.5], 4)
        with pytest.raises(WeightsInvalidError):
            example39_rho([1.0, 0.0, 0.0], 4)

    def test_rho_t_default_admixture(self):
        q = example39_weights(1 / 8, WeightScheme.NON_PPT)
        t = 0.05
        rho = example39_rho_t(q, t, d=12)
        assert _norm(rho) == pytest.approx((1 - t) * example39_norm(q) + t, abs=1e-10)
        assert rho.matrix[4 * 12 + 4, 4 * 12 + 4] == pytest.approx(t)

    def test_rho_t_support_overlap(self):
        d = 6
        overlapping = _diag_state([1.0] + [0.0] * (d * d - 1), d)
        with pytest.raises(SupportOverlapError):
            example39_rho_t((0.25, 0.25, 0.25, 0.25), 0.1, overlapping, d)

    def test_rho_t_dims_must_match(self):
        rho0 = _diag_state([0.0] * 35 + [1.0], 6)
        with pytest.raises(DimensionMismatchError):
            example39_rho_t((0.25, 0.25, 0.25, 0.25), 0.1, rho0, d=8)

    def test_rho_t_needs_room_for_default(self):
        with pytest.raises(DimensionTooSmallError):
            example39_rho_t((0.25, 0.25, 0.25, 0.25), 0.1, d=4)


class TestWerner:
    """Tests for werner_mc(), varrho_tail() and rho_eps_c()."""

    @pytest.mark.parametrize("m", [3, 4, 5])
    def test_piecewise_form(self, m):
        for c in np.linspace(-1, 1, 21):
            assert _norm(werner_mc(m, c, m)) == pytest.approx(werner_mc_norm(m, c), abs=1e-9)

    @pytest.mark.parametrize("m", [3, 4, 5])
    def test_ppt_iff_c_nonnegative(self, m):
        for c in np.linspace(-1, 1, 21):
            assert (_min_eig(werner_mc(m, c, m)) >= -1e-9) == (c >= 0)

    def test_kink(self):
        assert werner_mc_norm(3, 1 / 3) == pytest.approx(1 / 3)
        assert werner_mc_norm(3, 0.0) == pytest.approx(2 / 3)
        assert werner_mc_norm(3, 1.0) == pytest.approx(1.0)

    def test_embedding_does_not_change_norm(self):
        assert _norm(werner_mc(3, -0.5, 8)) == pytest.approx(_norm(werner_mc(3, -0.5, 3)), abs=1e-12)

    def test_ranges(self):
        with pytest.raises(ParamOutOfRangeError):
            werner_mc(2, 0.0)
        with pytest.raises(ParamOutOfRangeError):
            werner_mc(3, 1.5)
        with pytest.raises(DimensionTooSmallError):
            werner_mc(4, 0.0, 3)

    def test_varrho_tail(self):
        rho = varrho_tail(3, 8)
        assert _norm(rho) == pytest.approx(1.0, abs=1e-12)
        assert rho.matrix[0, 0] == 0

    def test_eps_zero_equals_werner(self):
        np.testing.assert_allclose(rho_eps_c(0.0, -0.3, 3, 8).matrix, werner_mc(3, -0.3, 8).matrix, atol=1e-16)

    def test_non_ppt_but_not_detected(self):
        rho = rho_eps_c(0.5, -0.3, 3, 8)
        assert ppt_test(rho).verdict is Verdict.ENTANGLED
        assert rccn_test(rho).verdict is Verdict.INCONCLUSIVE

    def test_norm_split(self):
        eps, c = 0.3, -0.2
        assert _norm(rho_eps_c(eps, c, 3, 8)) == pytest.approx(eps + (1 - eps) * werner_mc_norm(3, c), abs=1e-10)

    def test_lower_c_bound_accepted(self):
        rho = rho_eps_c(0.3, 2 / 3 - 1, 3, 8)
        assert _norm(rho) == pytest.approx(1.0, abs=1e-10)

    def test_eps_c_ranges(self):
        with pytest.raises(ParamOutOfRangeError):
            rho_eps_c(1.0, -0.2, 3, 8)
        with pytest.raises(ParamOutOfRangeError):
            rho_eps_c(0.5, 0.0, 3, 8)
        with pytest.raises(ParamOutOfRangeError):
            rho_eps_c(0.5, -0.5, 3, 8)
        with pytest.raises(DimensionTooSmallError):
            rho_eps_c(0.5, -0.2, 3, 3)


class TestIsotropic:
    """Tests for isotropic() and isotropic_norm()."""

    @pytest.mark.parametrize("m", [2, 3, 4])
    def test_closed_form(self, m):
        for p in np.linspace(-1 / (m * m - 1), 1, 9):
            assert _norm(isotropic(p, m)) == pytest.approx(isotropic_norm(p, m), abs=1e-10)

    @pytest.mark.parametrize("m", [2, 3])
    def test_criteria_switch_together(self, m):
        boundary = 1 / (m + 1)
        below, above = isotropic(boundary - 1e-3, m), isotropic(boundary + 1e-3, m)
        assert rccn_test(below).verdict is Verdict.INCONCLUSIVE
        assert ppt_test(below).verdict is Verdict.INCONCLUSIVE
        assert rccn_test(above).verdict is Verdict.ENTANGLED
        assert ppt_test(above).verdict is Verdict.ENTANGLED

    def test_range(self):
        with pytest.raises(ParamOutOfRangeError):
            isotropic(-0.5, 2)


class TestBuildState:
    """Tests for StateSpec and build_state()."""

    def test_rho_alpha_spec(self):
        spec = StateSpec(StateFamily.RHO_ALPHA, {"alpha": 4.0}, truncation_dim=8)
        assert _norm(build_state(spec)) == pytest.approx(rho_alpha_norm(4.0), abs=1e-9)

    def test_default_dims(self):
        assert StateSpec(StateFamily.RHO_ALPHA, {"alpha": 3.0}).dim() == 8
        assert StateSpec(StateFamily.EXAMPLE39_RHO_T, {}).dim() == 12

    def test_werner_spec(self):
        spec = StateSpec(StateFamily.WERNER_MC, {"m": 3.0, "c": -0.5}, truncation_dim=3)
        assert build_state(spec).dims == BipartiteIndex(3, 3)

    def test_example39_spec(self):
        spec = StateSpec(StateFamily.EXAMPLE39_RHO, {"q1": 0.25, "q2": 0.25, "q3": 0.25, "q4": 0.25}, truncation_dim=4)
        assert _norm(build_state(spec)) == pytest.approx(example39_norm((0.25,) * 4), abs=1e-9)

    def test_ratio_changes_tail_only(self):
        spec = StateSpec(StateFamily.RHO_T_ALPHA, {"t": 0.5, "alpha": 4.0}, truncation_dim=8, ratio=0.9)
        rho = build_state(spec)
        assert rho.matrix[4 * 8 + 4, 4 * 8 + 4] / rho.matrix[3 * 8 + 3, 3 * 8 + 3] == pytest.approx(0.9)

    def test_missing_parameter(self):
        with pytest.raises(ParamOutOfRangeError):
            build_state(StateSpec(StateFamily.RHO_ALPHA, {}))

    def test_pure_family_not_buildable(self):
        with pytest.raises(ValidationError):
            build_state(StateSpec(StateFamily.PURE, {}))

    def test_with_params(self):
        spec = StateSpec(StateFamily.RHO_T_ALPHA, {"alpha": 4.0}, ratio=0.5)
        updated = spec.with_params(t=0.2, dim=6)
        assert updated.params == {"alpha": 4.0, "t": 0.2}
        assert updated.truncation_dim == 6
        assert spec.params == {"alpha": 4.0}

    def test_min_dim(self):
        assert StateSpec(StateFamily.RHO_EPS_C, {"m": 4.0}).min_dim() == 5
        assert StateSpec(StateFamily.EXAMPLE39_RHO, {}).min_dim() == 4
