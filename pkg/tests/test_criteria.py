"""
Unit tests for sepscope/criteria.py - RCCN, PPT and symmetric-state checks.

Run with: uv run pytest tests/test_criteria.py -v
"""

import numpy as np
import pytest

from sepscope.criteria import (
    DensityMatrix,
    SchmidtSpectrum,
    Verdict,
    ccn,
    cross_norm_of_decomposition,
    full_report,
    is_symmetric,
    operator_schmidt_decomposition,
    ppt_test,
    pure_state_ccn_from_vector,
    rccn_test,
    schmidt_spectrum,
    symmetric_identity_check,
)
from sepscope.errors import DimensionMismatchError, NotNormalizedError, NotSymmetricError, ValidationError
from sepscope.matkernel import BipartiteIndex, singular_values
from sepscope.realign import flip_operator
from sepscope.states import (
    pure_from_coefficients,
    random_density_matrix,
    random_pure_coefficients,
    random_separable_state,
    random_symmetric_separable_state,
    random_symmetric_state,
    werner_mc,
)


def _random_dims(rng):
    return BipartiteIndex(int(rng.integers(2, 5)), int(rng.integers(2, 5)))


class TestDensityMatrix:
    """Tests for DensityMatrix.from_matrix() validation."""

    def test_accepts_maximally_mixed(self, maximally_mixed):
        assert maximally_mixed.dims == BipartiteIndex(2, 2)
        assert maximally_mixed.purity == pytest.approx(0.25)

    def test_trace(self, qubits):
        with pytest.raises(ValidationError) as exc:
            DensityMatrix.from_matrix(np.eye(4) * 0.9 / 4, qubits)
        assert exc.value.invariant == "trace"

    def test_hermitian(self, qubits):
        M = np.eye(4, dtype=complex) / 4
        M[0, 1] = 0.1
        with pytest.raises(ValidationError) as exc:
            DensityMatrix.from_matrix(M, qubits)
        assert exc.value.invariant == "hermitian"

    def test_positive(self, qubits):
        with pytest.raises(ValidationError) as exc:
            DensityMatrix.from_matrix(np.diag([0.6, 0.6, 0.0, -0.2]), qubits)
        assert exc.value.invariant == "positive"

    def test_shape(self, qubits):
        with pytest.raises(ValidationError) as exc:
            DensityMatrix.from_matrix(np.eye(3) / 3, qubits)
        assert exc.value.invariant == "shape"

    def test_stored_matrix_is_hermitian_and_read_only(self, qubits):
        M = np.eye(4, dtype=complex) / 4
        M[0, 1] = 1e-12
        rho = DensityMatrix.from_matrix(M, qubits)
        np.testing.assert_array_equal(rho.matrix, rho.matrix.conj().T)
        with pytest.raises(ValueError):
            rho.matrix[0, 0] = 1


class TestSchmidtSpectrum:
    """Tests for schmidt_spectrum() and SchmidtSpectrum."""

    def test_maximally_mixed(self, maximally_mixed):
        spectrum = schmidt_spectrum(maximally_mixed)
        np.testing.assert_allclose(spectrum.deltas, [0.5, 0, 0, 0], atol=1e-15)
        assert spectrum.total == pytest.approx(0.5)
        assert spectrum.schmidt_rank() == 1

    def test_bell(self, bell):
        spectrum = schmidt_spectrum(bell)
        np.testing.assert_allclose(spectrum.deltas, [0.5] * 4)
        assert spectrum.sum_sq == pytest.approx(1.0)
        assert spectrum.schmidt_rank() == 4

    def test_sorted_descending(self):
        spectrum = SchmidtSpectrum.from_deltas([0.1, 0.5, 0.2])
        np.testing.assert_array_equal(spectrum.deltas, [0.5, 0.2, 0.1])
        assert spectrum.total == pytest.approx(0.8)

    def test_rank_cutoff(self):
        spectrum = SchmidtSpectrum.from_deltas([1.0, 1e-3, 1e-14])
        assert spectrum.schmidt_rank() == 2
        assert spectrum.schmidt_rank(cutoff=1e-2) == 1


class TestCrossNorm:
    """Tests for ccn(), the operator Schmidt decomposition and their identities."""

    def test_bell_ccn(self, bell):
        assert ccn(bell) == pytest.approx(2.0)

    def test_decomposition_reconstructs_state(self, rng):
        rho = random_density_matrix(2, 3, rng)
        terms = operator_schmidt_decomposition(rho)
        rebuilt = sum(delta * np.kron(A, B) for delta, A, B in terms)
        np.testing.assert_allclose(rebuilt, rho.matrix, atol=1e-12)
        for _, A, B in terms:
            assert np.linalg.norm(A) == pytest.approx(1.0)
            assert np.linalg.norm(B) == pytest.approx(1.0)

    def test_other_decompositions_cost_more(self, rng, qubits):
        rho = random_density_matrix(2, 2, rng)
        # Expansion in the matrix-unit basis of A is also a valid decomposition
        blocks = rho.matrix.reshape(2, 2, 2, 2)
        terms = []
        for m in range(2):
            for n in range(2):
                A = np.zeros((2, 2))
                A[m, n] = 1
                terms.append((A, blocks[m, :, n, :]))
        np.testing.assert_allclose(sum(np.kron(A, B) for A, B in terms), rho.matrix, atol=1e-15)
        assert cross_norm_of_decomposition(terms) >= ccn(rho) - 1e-12

    def test_cross_norm_of_scaled_terms(self):
        terms = [(0.5, np.eye(2), np.eye(2))]
        assert cross_norm_of_decomposition(terms) == pytest.approx(1.0)

    def test_norm_identities(self, rng):
        for _ in range(200):
            idx = _random_dims(rng)
            rho = random_density_matrix(idx.dA, idx.dB, rng, rank=int(rng.integers(1, idx.side + 1)))
            spectrum = schmidt_spectrum(rho)
            norm = rccn_test(rho).value
            assert ccn(rho) == pytest.approx(norm, rel=1e-9)
            assert spectrum.total == pytest.approx(norm, rel=1e-9)
            assert cross_norm_of_decomposition(operator_schmidt_decomposition(rho)) == pytest.approx(norm, rel=1e-9)
            assert spectrum.sum_sq == pytest.approx(rho.purity, abs=1e-10)


class TestPureStates:
    """Tests for pure_state_ccn_from_vector() and the pure-state criterion."""

    def test_product(self):
        assert pure_state_ccn_from_vector([1.0, 0.0]) == pytest.approx(1.0)

    def test_maximally_entangled(self):
        assert pure_state_ccn_from_vector([1 / np.sqrt(2)] * 2) == pytest.approx(2.0)

    def test_not_normalized(self):
        with pytest.raises(NotNormalizedError):
            pure_state_ccn_from_vector([1.0, 1.0])

    def test_negative(self):
        with pytest.raises(NotNormalizedError):
            pure_state_ccn_from_vector([-1.0])

    def test_random_pure_states(self, rng):
        for _ in range(100):
            idx = _random_dims(rng)
            rank = int(rng.integers(1, min(idx.dA, idx.dB) + 1))
            D = random_pure_coefficients(idx.dA, idx.dB, rng, rank=rank)
            rho = pure_from_coefficients(D)
            lambdas = singular_values(D.matrix)
            value = ccn(rho)
            assert value == pytest.approx(pure_state_ccn_from_vector(lambdas), rel=1e-9)
            assert (abs(value - 1.0) <= 1e-9) == (rank == 1)
            expected = Verdict.INCONCLUSIVE if rank == 1 else Verdict.ENTANGLED
            assert rccn_test(rho).verdict is expected


class TestVerdicts:
    """Tests for rccn_test() and ppt_test()."""

    def test_bell_detected_by_both(self, bell):
        assert rccn_test(bell).verdict is Verdict.ENTANGLED
        result = ppt_test(bell)
        assert result.verdict is Verdict.ENTANGLED
        assert result.value == pytest.approx(-0.5)

    def test_maximally_mixed_inconclusive(self, maximally_mixed):
        assert rccn_test(maximally_mixed).verdict is Verdict.INCONCLUSIVE
        assert ppt_test(maximally_mixed).verdict is Verdict.INCONCLUSIVE

    def test_threshold_recorded(self, bell):
        assert rccn_test(bell).threshold == pytest.approx(1e-9)

    def test_labels(self):
        assert Verdict.ENTANGLED.label("rccn") == "ENTANGLED (norm > 1)"
        assert Verdict.ENTANGLED.label("ppt") == "ENTANGLED (partial transpose has a negative eigenvalue)"
        assert Verdict.INCONCLUSIVE.label("ppt") == "inconclusive (criterion is necessary-only)"

    def test_label_unknown_criterion(self):
        with pytest.raises(ValueError):
            Verdict.ENTANGLED.label("ccnr")

    def test_separable_mixtures_never_flagged(self, rng):
        for _ in range(200):
            idx = _random_dims(rng)
            rho = random_separable_state(idx.dA, idx.dB, rng)
            assert rccn_test(rho).verdict is Verdict.INCONCLUSIVE
            assert ppt_test(rho).verdict is Verdict.INCONCLUSIVE


class TestSymmetricStates:
    """Tests for is_symmetric() and symmetric_identity_check()."""

    def test_werner_symmetric_only_at_c_one(self):
        assert is_symmetric(werner_mc(3, 1.0, 3))
        assert not is_symmetric(werner_mc(3, 0.5, 3))

    def test_werner_is_swap_invariant(self):
        rho = werner_mc(3, 0.5, 3)
        F = flip_operator(3)
        np.testing.assert_allclose(F @ rho.matrix @ F, rho.matrix, atol=1e-15)

    def test_requires_equal_dims(self, rng):
        with pytest.raises(DimensionMismatchError):
            is_symmetric(random_density_matrix(2, 3, rng))

    def test_non_symmetric_rejected(self, maximally_mixed):
        with pytest.raises(NotSymmetricError):
            symmetric_identity_check(maximally_mixed)

    def test_identity_and_equivalence(self, rng):
        for k in range(100):
            d = int(rng.integers(2, 5))
            rho = random_symmetric_state(d, rng) if k % 2 else random_symmetric_separable_state(d, rng)
            assert is_symmetric(rho)
            assert symmetric_identity_check(rho) <= 1e-10
            below_one = rccn_test(rho).value <= 1 + 1e-9
            is_ppt = ppt_test(rho).value >= -1e-9
            assert below_one == is_ppt


class TestFullReport:
    """Tests for full_report()."""

    def test_bell_report(self, bell):
        report = full_report(bell)
        assert report.realignment_trace_norm == pytest.approx(2.0)
        assert report.ccn == pytest.approx(2.0)
        assert report.ppt_min_eigenvalue == pytest.approx(-0.5)
        assert report.is_symmetric
        assert report.schmidt_rank == 4
        assert report.purity == pytest.approx(1.0)
        assert report.thresholds_used["rccn_tolerance"] == pytest.approx(1e-9)

    def test_to_dict(self, maximally_mixed):
        data = full_report(maximally_mixed).to_dict()
        assert data["rccn_verdict"] == "inconclusive"
        assert data["realignment_trace_norm"] == pytest.approx(0.5)

    def test_rectangular_dims_not_symmetric(self, rng):
        assert not full_report(random_density_matrix(2, 3, rng)).is_symmetric

    def test_tolerance_from_config(self, tmp_path, monkeypatch, bell):
        from sepscope.config import reset_settings

        config = tmp_path / "strict.yaml"
        config.write_text("tolerances:\n  rccn: 2.0\n")
        monkeypatch.setenv("SEPSCOPE_CONFIG", str(config))
        reset_settings()
        assert rccn_test(bell).verdict is Verdict.INCONCLUSIVE
