"""
Realignment of bipartite operators.

Row realignment maps T on A ⊗ B to the dA² x dB² matrix

    T^R[(m n), (mu nu)] = T[(m mu), (n nu)]

and column realignment to

    T^{R^c}[(n m), (nu mu)] = T[(m mu), (n nu)],

the transpose of the "tilde" matrix indexed [(nu mu), (n m)]. Both share
singular values: T^R = F_A T^{R^c} F_B with F the flip operators.

vec() flattens row-major, so |A> = vec(A) = [a_00, a_01, ..., a_10, ...].
"""

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .config import get_settings
from .errors import DimensionMismatchError, EmptyTermListError, NonSquareError, NotNormalizedError
from .matkernel import BipartiteIndex, ComplexMatrix, as_matrix, hs_norm


class RealignVariant(str, Enum):
    """Which realignment produced a RealignedOperator."""
    ROW = "row"
    COLUMN = "column"


@dataclass(frozen=True)
class RealignedOperator:
    """A realigned operator with its provenance."""
    matrix: ComplexMatrix
    variant: RealignVariant
    source_dims: BipartiteIndex

    def __post_init__(self):
        expected = (self.source_dims.dA ** 2, self.source_dims.dB ** 2)
        if self.matrix.shape != expected:
            raise DimensionMismatchError(
                f"Realigned matrix shape {self.matrix.shape} != {expected}"
            )
        self.matrix.setflags(write=False)


@dataclass(frozen=True)
class CoefficientMatrix:
    """Amplitudes d[m, mu] of |psi> = sum d[m, mu] |m>|mu>."""
    matrix: ComplexMatrix

    @classmethod
    def from_amplitudes(cls, D) -> "CoefficientMatrix":
        matrix = as_matrix(D)
        matrix.setflags(write=False)
        return cls(matrix)

    @property
    def dims(self) -> BipartiteIndex:
        return BipartiteIndex(*self.matrix.shape)

    def vector(self) -> np.ndarray:
        """|psi> in the composite basis."""
        return self.matrix.reshape(-1)

    def require_normalized(self) -> None:
        """Raise NotNormalizedError unless ||D||_2 = 1 within tolerance."""
        norm = hs_norm(self.matrix)
        if abs(norm - 1.0) > get_settings().tolerances.normalization:
            raise NotNormalizedError(f"||D||_2 = {norm:.12g}, expected 1")


def _as_bipartite(M, idx: BipartiteIndex) -> ComplexMatrix:
    M = as_matrix(M)
    if M.shape[0] != M.shape[1]:
        raise NonSquareError(f"Expected a square matrix, got shape {M.shape}")
    if M.shape != (idx.side, idx.side):
        raise DimensionMismatchError(
            f"Matrix shape {M.shape} does not match dims {idx.dA}x{idx.dB}"
        )
    return M


def realign_row(M, idx: BipartiteIndex) -> RealignedOperator:
    """Row realignment T^R[(m n), (mu nu)] = T[(m mu), (n nu)]."""
    M = _as_bipartite(M, idx)
    R = M.reshape(idx.dA, idx.dB, idx.dA, idx.dB).transpose(0, 2, 1, 3)
    return RealignedOperator(
        matrix=R.reshape(idx.dA ** 2, idx.dB ** 2).copy(),
        variant=RealignVariant.ROW,
        source_dims=idx,
    )


def realign_column(M, idx: BipartiteIndex) -> RealignedOperator:
    """Column realignment: build the tilde matrix, then transpose it."""
    M = _as_bipartite(M, idx)
    T = M.reshape(idx.dA, idx.dB, idx.dA, idx.dB)
    # tilde[(nu mu), (n m)] = T[(m mu), (n nu)]
    tilde = T.transpose(3, 1, 2, 0).reshape(idx.dB ** 2, idx.dA ** 2)
    return RealignedOperator(
        matrix=tilde.T.copy(),
        variant=RealignVariant.COLUMN,
        source_dims=idx,
    )


def flip_operator(d: int) -> ComplexMatrix:
    """Swap operator F on C^d ⊗ C^d, F|x>|y> = |y>|x>."""
    if d < 1:
        raise DimensionMismatchError(f"Flip operator needs d >= 1, got {d}")
    identity = np.eye(d * d, dtype=np.complex128).reshape(d, d, d, d)
    return identity.transpose(0, 1, 3, 2).reshape(d * d, d * d).copy()


def realign_pure(D: CoefficientMatrix) -> RealignedOperator:
    """(|psi><psi|)^R = D ⊗ conj(D)."""
    D.require_normalized()
    return RealignedOperator(
        matrix=np.kron(D.matrix, D.matrix.conj()),
        variant=RealignVariant.ROW,
        source_dims=D.dims,
    )


def realign_from_tensor_sum(terms: Sequence[tuple]) -> RealignedOperator:
    """
    Realign T = sum_k A_k ⊗ B_k as sum_k |A_k><B_k|.

    <B_k| is the plain transpose of vec(B_k), not the conjugate transpose.

    Raises:
        EmptyTermListError: If terms is empty
        DimensionMismatchError: If the A_k (or B_k) differ in shape or are not square
    """
    if not terms:
        raise EmptyTermListError("Tensor-sum realignment needs at least one term")

    pairs = [(as_matrix(A), as_matrix(B)) for A, B in terms]
    shape_a, shape_b = pairs[0][0].shape, pairs[0][1].shape
    for A, B in pairs:
        if A.shape != shape_a or B.shape != shape_b:
            raise DimensionMismatchError("All A_k (resp. B_k) must share one shape")
    if shape_a[0] != shape_a[1] or shape_b[0] != shape_b[1]:
        raise DimensionMismatchError("Tensor factors must be square")

    R = sum(np.outer(A.reshape(-1), B.reshape(-1)) for A, B in pairs)
    return RealignedOperator(
        matrix=np.asarray(R, dtype=np.complex128),
        variant=RealignVariant.ROW,
        source_dims=BipartiteIndex(shape_a[0], shape_b[0]),
    )
