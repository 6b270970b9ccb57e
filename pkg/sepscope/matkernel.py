"""
Dense complex-matrix primitives shared by every other module.

Index convention (fixed everywhere): a bipartite composite index is
row-major and A-major, (m, mu) -> m * dB + mu with 0-based m and mu.
Reshaping a (dA*dB) x (dA*dB) matrix to (dA, dB, dA, dB) therefore
exposes entries as M[m, mu, n, nu].

Eigen- and singular-value problems go to LAPACK through numpy.linalg.
All functions are pure and never modify their inputs.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .config import get_settings
from .errors import (
    DimensionMismatchError,
    NoConvergenceError,
    NonSquareError,
    NotHermitianError,
    ValidationError,
)

logger = logging.getLogger("sepscope.matkernel")

# Dense complex128 array, shape (rows, cols)
ComplexMatrix = np.ndarray

# 1-D float64 array sorted descending
SingularValues = np.ndarray


@dataclass(frozen=True)
class BipartiteIndex:
    """Local dimensions of a bipartite system A ⊗ B."""
    dA: int
    dB: int

    def __post_init__(self):
        if self.dA < 1 or self.dB < 1:
            raise DimensionMismatchError(f"Local dimensions must be >= 1, got ({self.dA}, {self.dB})")

    @property
    def side(self) -> int:
        """Side length of operators on the composite space."""
        return self.dA * self.dB

    def composite(self, m: int, mu: int) -> int:
        """Composite index of the basis vector |m>|mu>."""
        return m * self.dB + mu

    def split(self, index: int) -> tuple[int, int]:
        """Inverse of composite()."""
        return divmod(index, self.dB)


def as_matrix(M) -> ComplexMatrix:
    """Coerce input to a finite 2-D complex128 array (copying)."""
    arr = np.array(M, dtype=np.complex128)
    if arr.ndim != 2:
        raise DimensionMismatchError(f"Expected a 2-D matrix, got {arr.ndim} dimensions")
    if arr.size and not np.all(np.isfinite(arr)):
        raise ValidationError("finite", "matrix has NaN or infinite entries")
    return arr


def max_abs(M) -> float:
    """Largest absolute entry, the ||.||_inf used by tolerance checks."""
    arr = np.asarray(M)
    return float(np.max(np.abs(arr))) if arr.size else 0.0


def _require_square(M: ComplexMatrix) -> None:
    if M.shape[0] != M.shape[1]:
        raise NonSquareError(f"Expected a square matrix, got shape {M.shape}")


def _require_bipartite(M: ComplexMatrix, idx: BipartiteIndex) -> None:
    if M.shape != (idx.side, idx.side):
        raise DimensionMismatchError(
            f"Matrix shape {M.shape} does not match dims {idx.dA}x{idx.dB} "
            f"(expected side {idx.side})"
        )


def _hermitian_part(M: ComplexMatrix) -> ComplexMatrix:
    """Check hermiticity within tolerance and return (M + M^dagger) / 2."""
    tol = get_settings().tolerances.hermiticity
    deviation = max_abs(M - M.conj().T)
    if deviation > tol * max(1.0, max_abs(M)):
        raise NotHermitianError(f"||M - M^dagger||_inf = {deviation:.3e} exceeds tolerance")
    if deviation > 0:
        logger.debug("symmetrizing matrix with hermiticity defect %.3e", deviation)
    return (M + M.conj().T) / 2


def hermitian_eigh(M) -> tuple[np.ndarray, ComplexMatrix]:
    """
    Eigenpairs of a Hermitian matrix, eigenvalues descending.

    Returns:
        (values, vectors) with vectors[:, k] the eigenvector of values[k]

    Raises:
        NonSquareError, NotHermitianError, NoConvergenceError
    """
    M = as_matrix(M)
    _require_square(M)
    H = _hermitian_part(M)
    try:
        values, vectors = np.linalg.eigh(H)
    except np.linalg.LinAlgError as e:
        raise NoConvergenceError(f"Hermitian eigensolver failed: {e}") from e
    return values[::-1].copy(), vectors[:, ::-1].copy()


def hermitian_eigenvalues(M) -> SingularValues:
    """All real eigenvalues of a Hermitian matrix, descending."""
    M = as_matrix(M)
    _require_square(M)
    H = _hermitian_part(M)
    try:
        values = np.linalg.eigvalsh(H)
    except np.linalg.LinAlgError as e:
        raise NoConvergenceError(f"Hermitian eigensolver failed: {e}") from e
    return values[::-1].copy()


def singular_values(M) -> SingularValues:
    """min(rows, cols) singular values, descending and nonnegative."""
    M = as_matrix(M)
    if M.size == 0:
        raise DimensionMismatchError("Singular values of an empty matrix are undefined")
    try:
        values = np.linalg.svd(M, compute_uv=False)
    except np.linalg.LinAlgError as e:
        raise NoConvergenceError(f"SVD failed: {e}") from e
    return np.clip(values, 0.0, None)


def svd(M) -> tuple[ComplexMatrix, SingularValues, ComplexMatrix]:
    """Thin SVD M = U @ diag(s) @ Vh, s descending."""
    M = as_matrix(M)
    if M.size == 0:
        raise DimensionMismatchError("SVD of an empty matrix is undefined")
    try:
        U, s, Vh = np.linalg.svd(M, full_matrices=False)
    except np.linalg.LinAlgError as e:
        raise NoConvergenceError(f"SVD failed: {e}") from e
    return U, s, Vh


def trace_norm(M) -> float:
    """||M||_Tr = Tr((M^dagger M)^(1/2)), the sum of singular values."""
    return float(np.sum(singular_values(M)))


def hs_norm(M) -> float:
    """Hilbert-Schmidt (Frobenius) norm."""
    M = as_matrix(M)
    return float(np.linalg.norm(M)) if M.size else 0.0


def kron(A, B) -> ComplexMatrix:
    """Kronecker product, (A ⊗ B)[(m mu), (n nu)] = A[m, n] * B[mu, nu]."""
    return np.kron(as_matrix(A), as_matrix(B))


def partial_transpose_B(M, idx: BipartiteIndex) -> ComplexMatrix:
    """rho^{T_B}: entry (m mu, n nu) of the result is M[(m nu), (n mu)]."""
    M = as_matrix(M)
    _require_bipartite(M, idx)
    T = M.reshape(idx.dA, idx.dB, idx.dA, idx.dB).transpose(0, 3, 2, 1)
    return T.reshape(idx.side, idx.side)


def partial_transpose_A(M, idx: BipartiteIndex) -> ComplexMatrix:
    """rho^{T_A}: entry (m mu, n nu) of the result is M[(n mu), (m nu)]."""
    M = as_matrix(M)
    _require_bipartite(M, idx)
    T = M.reshape(idx.dA, idx.dB, idx.dA, idx.dB).transpose(2, 1, 0, 3)
    return T.reshape(idx.side, idx.side)
