"""
Separability criteria for bipartite density matrices.

Both criteria here are necessary conditions for separability only:
- RCCN: separable => ||rho^R||_Tr <= 1. A violation certifies entanglement.
- PPT:  separable => rho^{T_B} >= 0. A negative eigenvalue certifies entanglement.

A state passing a test is therefore reported as INCONCLUSIVE, never as separable.

The trace norm of rho^R equals the computable cross norm of rho: both are the
sum of the operator Schmidt coefficients delta_k, the singular values of rho^R.

Usage:
    from sepscope.criteria import DensityMatrix, full_report

    rho = DensityMatrix.from_matrix(matrix, BipartiteIndex(2, 2))
    report = full_report(rho)
    print(report.rccn_verdict, report.realignment_trace_norm)
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .config import get_settings
from .errors import DimensionMismatchError, NotNormalizedError, NotSymmetricError, ValidationError
from .matkernel import (
    BipartiteIndex,
    ComplexMatrix,
    as_matrix,
    hermitian_eigenvalues,
    hs_norm,
    max_abs,
    partial_transpose_A,
    partial_transpose_B,
    singular_values,
    svd,
    trace_norm,
)
from .realign import flip_operator, realign_row

logger = logging.getLogger("sepscope.criteria")

# What an ENTANGLED verdict was decided on, per criterion
ENTANGLED_REASONS = {
    "rccn": "norm > 1",
    "ppt": "partial transpose has a negative eigenvalue",
}


class Verdict(str, Enum):
    """Outcome of a necessary-condition separability test."""
    ENTANGLED = "entangled"
    INCONCLUSIVE = "inconclusive"

    def label(self, criterion: str) -> str:
        """Human wording for reports ('rccn' or 'ppt')."""
        if criterion not in ENTANGLED_REASONS:
            raise ValueError(f"unknown criterion '{criterion}'")
        if self is Verdict.ENTANGLED:
            return f"ENTANGLED ({ENTANGLED_REASONS[criterion]})"
        return "inconclusive (criterion is necessary-only)"


@dataclass(frozen=True)
class DensityMatrix:
    """
    A validated state on A ⊗ B.

    Attributes:
        matrix: Hermitian, PSD, trace-one operator of side dA*dB (read-only)
        dims: Local dimensions
    """
    matrix: ComplexMatrix = field(repr=False)
    dims: BipartiteIndex

    @classmethod
    def from_matrix(cls, matrix, dims: BipartiteIndex) -> "DensityMatrix":
        """
        Validate a matrix and wrap it.

        Inputs within the hermiticity tolerance are stored symmetrized.

        Raises:
            ValidationError: Names the failed invariant: shape, hermitian,
                trace or positive
        """
        tol = get_settings().tolerances
        M = as_matrix(matrix)
        if M.shape != (dims.side, dims.side):
            raise ValidationError(
                "shape", f"matrix shape {M.shape} does not match dims {dims.dA}x{dims.dB}"
            )

        deviation = max_abs(M - M.conj().T)
        if deviation > tol.hermiticity * max(1.0, max_abs(M)):
            raise ValidationError("hermitian", f"||rho - rho^dagger||_inf = {deviation:.3e}")
        M = (M + M.conj().T) / 2

        trace = float(np.trace(M).real)
        if abs(trace - 1.0) > tol.trace:
            raise ValidationError("trace", f"trace is {trace:.12g}, expected 1")

        min_eig = float(hermitian_eigenvalues(M)[-1])
        if min_eig < -tol.positivity:
            raise ValidationError("positive", f"minimum eigenvalue {min_eig:.3e} is negative")

        M.setflags(write=False)
        return cls(matrix=M, dims=dims)

    @property
    def purity(self) -> float:
        """Tr(rho^2)."""
        return hs_norm(self.matrix) ** 2


@dataclass(frozen=True)
class SchmidtSpectrum:
    """Operator Schmidt coefficients delta_k (singular values of rho^R), descending."""
    deltas: np.ndarray
    total: float
    sum_sq: float

    @classmethod
    def from_deltas(cls, deltas) -> "SchmidtSpectrum":
        values = np.sort(np.asarray(deltas, dtype=float))[::-1].copy()
        values.setflags(write=False)
        return cls(deltas=values, total=float(values.sum()), sum_sq=float(np.sum(values ** 2)))

    def schmidt_rank(self, cutoff: Optional[float] = None) -> int:
        """N_rho: deltas above cutoff * delta_1 (default from settings)."""
        if cutoff is None:
            cutoff = get_settings().tolerances.schmidt_cutoff
        if not self.deltas.size or self.deltas[0] == 0:
            return 0
        return int(np.count_nonzero(self.deltas > cutoff * self.deltas[0]))


@dataclass(frozen=True)
class CriterionResult:
    """Verdict of one test plus the scalar it was decided on."""
    verdict: Verdict
    value: float
    threshold: float


@dataclass(frozen=True)
class CriterionReport:
    """All criterion scalars and verdicts for one state."""
    realignment_trace_norm: float
    ccn: float
    ppt_min_eigenvalue: float
    is_symmetric: bool
    rccn_verdict: Verdict
    ppt_verdict: Verdict
    schmidt_rank: int
    purity: float
    thresholds_used: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        """Convert to dictionary for serialization."""
        return {
            "realignment_trace_norm": self.realignment_trace_norm,
            "ccn": self.ccn,
            "ppt_min_eigenvalue": self.ppt_min_eigenvalue,
            "is_symmetric": self.is_symmetric,
            "rccn_verdict": self.rccn_verdict.value,
            "ppt_verdict": self.ppt_verdict.value,
            "schmidt_rank": self.schmidt_rank,
            "purity": self.purity,
            "thresholds_used": dict(self.thresholds_used),
        }


def schmidt_spectrum(rho: DensityMatrix) -> SchmidtSpectrum:
    """Singular values of rho^R."""
    realigned = realign_row(rho.matrix, rho.dims)
    return SchmidtSpectrum.from_deltas(singular_values(realigned.matrix))


def ccn(rho: DensityMatrix) -> float:
    """Computable cross norm, attained by the operator Schmidt decomposition."""
    return schmidt_spectrum(rho).total


def operator_schmidt_decomposition(rho: DensityMatrix) -> list[tuple[float, ComplexMatrix, ComplexMatrix]]:
    """
    Terms (delta_k, A_k, B_k) with rho = sum_k delta_k A_k ⊗ B_k.

    A_k and B_k have unit Hilbert-Schmidt norm, and terms below the Schmidt
    cutoff are dropped.
    """
    dims = rho.dims
    U, s, Vh = svd(realign_row(rho.matrix, dims).matrix)
    spectrum = SchmidtSpectrum.from_deltas(s)
    terms = []
    for k in range(spectrum.schmidt_rank()):
        A = U[:, k].reshape(dims.dA, dims.dA)
        B = Vh[k, :].reshape(dims.dB, dims.dB)
        terms.append((float(s[k]), A, B))
    return terms


def cross_norm_of_decomposition(terms: Sequence[tuple]) -> float:
    """sum_k ||A_k||_2 ||B_k||_2 for terms (A_k, B_k) or (coef, A_k, B_k)."""
    total = 0.0
    for term in terms:
        if len(term) == 3:
            coef, A, B = term
            total += abs(coef) * hs_norm(A) * hs_norm(B)
        else:
            A, B = term
            total += hs_norm(A) * hs_norm(B)
    return total


def rccn_test(rho: DensityMatrix) -> CriterionResult:
    """Entangled iff ||rho^R||_Tr > 1 + rccn tolerance."""
    tol = get_settings().tolerances.rccn
    norm = trace_norm(realign_row(rho.matrix, rho.dims).matrix)
    verdict = Verdict.ENTANGLED if norm > 1.0 + tol else Verdict.INCONCLUSIVE
    return CriterionResult(verdict=verdict, value=norm, threshold=tol)


def ppt_test(rho: DensityMatrix) -> CriterionResult:
    """Entangled iff min eig(rho^{T_B}) < -ppt tolerance."""
    tol = get_settings().tolerances.ppt
    min_eig = float(hermitian_eigenvalues(partial_transpose_B(rho.matrix, rho.dims))[-1])
    verdict = Verdict.ENTANGLED if min_eig < -tol else Verdict.INCONCLUSIVE
    return CriterionResult(verdict=verdict, value=min_eig, threshold=tol)


def pure_state_ccn_from_vector(lambdas) -> float:
    """||rho_psi||_CCN = (sum_k lambda_k)^2 for vector Schmidt coefficients lambda_k."""
    values = np.asarray(lambdas, dtype=float)
    if np.any(values < 0):
        raise NotNormalizedError("Schmidt coefficients must be nonnegative")
    norm_sq = float(np.sum(values ** 2))
    if abs(norm_sq - 1.0) > get_settings().tolerances.normalization:
        raise NotNormalizedError(f"sum lambda_k^2 = {norm_sq:.12g}, expected 1")
    return float(np.sum(values)) ** 2


def is_symmetric(rho: DensityMatrix) -> bool:
    """True iff F rho = rho = rho F within the symmetry tolerance."""
    if rho.dims.dA != rho.dims.dB:
        raise DimensionMismatchError(
            f"Symmetric states need dA == dB, got {rho.dims.dA} and {rho.dims.dB}"
        )
    tol = get_settings().tolerances.symmetry
    F = flip_operator(rho.dims.dA)
    return max_abs(rho.matrix - F @ rho.matrix) <= tol and max_abs(rho.matrix - rho.matrix @ F) <= tol


def symmetric_identity_check(rho: DensityMatrix) -> float:
    """
    Residual ||F rho^R - rho^{T_A}||_2 for a symmetric state.

    Raises:
        NotSymmetricError: If rho is not symmetric
    """
    if not is_symmetric(rho):
        raise NotSymmetricError("F rho^R = rho^{T_A} only holds for symmetric states")
    F = flip_operator(rho.dims.dA)
    realigned = realign_row(rho.matrix, rho.dims).matrix
    return hs_norm(F @ realigned - partial_transpose_A(rho.matrix, rho.dims))


def full_report(rho: DensityMatrix) -> CriterionReport:
    """Run every criterion on rho and collect the results."""
    tol = get_settings().tolerances
    spectrum = schmidt_spectrum(rho)
    rccn = rccn_test(rho)
    ppt = ppt_test(rho)
    symmetric = rho.dims.dA == rho.dims.dB and is_symmetric(rho)

    logger.debug(
        "report dims=%dx%d norm=%.12g min_eig=%.3e",
        rho.dims.dA, rho.dims.dB, rccn.value, ppt.value,
    )

    return CriterionReport(
        realignment_trace_norm=rccn.value,
        ccn=spectrum.total,
        ppt_min_eigenvalue=ppt.value,
        is_symmetric=symmetric,
        rccn_verdict=rccn.verdict,
        ppt_verdict=ppt.verdict,
        schmidt_rank=spectrum.schmidt_rank(),
        purity=rho.purity,
        thresholds_used={
            "rccn_tolerance": tol.rccn,
            "ppt_tolerance": tol.ppt,
            "symmetry_tolerance": tol.symmetry,
            "schmidt_cutoff": tol.schmidt_cutoff,
        },
    )
