"""
Constructors for the bipartite state families used to probe the criteria.

Every constructor returns a validated DensityMatrix on C^d ⊗ C^d (or on the
dims of its inputs). Families defined on a finite block are zero-padded up to
the truncation dimension d; infinite diagonal tails sum_{i>=start} p_i |ii><ii|
are truncated at d with geometric weights p_i ∝ r^(i - start), renormalized
to total weight one, so ||tail^R||_Tr = 1 at every d.

Families:
- rho_alpha:       (2/7)|w><w| + (alpha/7) sigma_+ + ((5-alpha)/7) sigma_-  on 3x3
- sigma_tail:      diagonal tail starting at |33>
- rho_t_alpha:     t rho_alpha + (1-t) sigma_tail
- example39_rho:   sum_i q_i rho_i on the 4x4 block
- example39_rho_t: (1-t) example39_rho + t rho_0, rho_0 outside the 4x4 block
- werner_mc:       ((m-c) P_m + (mc-1) F_m) / (m^3 - m)
- varrho_tail:     diagonal tail starting at |mm>
- rho_eps_c:       eps varrho_tail + (1-eps) werner_mc
- isotropic:       p |Phi_m><Phi_m| + (1-p) I/m^2
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .config import get_settings
from .criteria import DensityMatrix
from .errors import (
    DimensionMismatchError,
    DimensionTooSmallError,
    ParamOutOfRangeError,
    SupportOverlapError,
    ValidationError,
    WeightsInvalidError,
)
from .matkernel import BipartiteIndex, ComplexMatrix, hermitian_eigh, max_abs
from .realign import CoefficientMatrix, flip_operator

logger = logging.getLogger("sepscope.states")

# Slack on closed parameter intervals so that e.g. c = 2/m - 1 computed two ways is accepted
RANGE_SLACK = 1e-12

# First basis index of the diagonal tail mixed into rho_alpha
SIGMA_TAIL_START = 3

# Block size of the cyclic example39 states
EXAMPLE39_BLOCK = 4


class StateFamily(str, Enum):
    """Named state families a StateSpec can describe."""
    PURE = "pure"
    MIXTURE = "mixture"
    RHO_ALPHA = "rho_alpha"
    SIGMA_TAIL = "sigma_tail"
    RHO_T_ALPHA = "rho_t_alpha"
    EXAMPLE39_RHO = "example39_rho"
    EXAMPLE39_RHO_T = "example39_rho_t"
    WERNER_MC = "werner_mc"
    VARRHO_TAIL = "varrho_tail"
    RHO_EPS_C = "rho_eps_c"
    ISOTROPIC = "isotropic_like_custom"


class TailDistribution(str, Enum):
    """Weight profile of a truncated infinite tail."""
    GEOMETRIC = "geometric"


class WeightScheme(str, Enum):
    """One-parameter weight choices for example39_rho, keyed by q1."""
    PPT = "ppt"          # q2 = q1/2, q3 = 1/2 - 3 q1/2, q4 = 1/2
    NON_PPT = "non-ppt"  # q2 = 1/2 - 3 q1/2, q3 = q1/2, q4 = 1/2


@dataclass
class StateSpec:
    """Declarative description of a generated state."""
    family: StateFamily
    params: dict[str, float] = field(default_factory=dict)
    truncation_dim: Optional[int] = None
    tail_distribution: TailDistribution = TailDistribution.GEOMETRIC
    ratio: Optional[float] = None

    def dim(self) -> int:
        """Truncation dimension, falling back to the configured default."""
        if self.truncation_dim is not None:
            return self.truncation_dim
        settings = get_settings()
        if self.family in (StateFamily.EXAMPLE39_RHO, StateFamily.EXAMPLE39_RHO_T):
            return settings.example39_dim
        return settings.default_dim

    def tail_ratio(self) -> float:
        return self.ratio if self.ratio is not None else get_settings().default_ratio

    def min_dim(self) -> int:
        """Smallest truncation dimension holding the family's support."""
        m = int(self.params.get("m", 3))
        return {
            StateFamily.RHO_ALPHA: 3,
            StateFamily.SIGMA_TAIL: int(self.params.get("start", SIGMA_TAIL_START)) + 1,
            StateFamily.RHO_T_ALPHA: SIGMA_TAIL_START + 1,
            StateFamily.EXAMPLE39_RHO: EXAMPLE39_BLOCK,
            StateFamily.EXAMPLE39_RHO_T: EXAMPLE39_BLOCK + 1,
            StateFamily.WERNER_MC: m,
            StateFamily.VARRHO_TAIL: m + 1,
            StateFamily.RHO_EPS_C: m + 1,
            StateFamily.ISOTROPIC: m,
        }.get(self.family, 1)

    def with_params(self, **updates) -> "StateSpec":
        """Copy with some parameters replaced ('dim' sets truncation_dim)."""
        params = dict(self.params)
        dim = self.truncation_dim
        if "dim" in updates:
            dim = int(updates.pop("dim"))
        params.update(updates)
        return StateSpec(
            family=self.family,
            params=params,
            truncation_dim=dim,
            tail_distribution=self.tail_distribution,
            ratio=self.ratio,
        )

    def describe(self) -> str:
        """Compact 'name=value;...' rendering of the parameters."""
        return ";".join(f"{k}={v:.12g}" for k, v in self.params.items())


# -----------------------------------------------------------------------------
# Helpers
# -----------------------------------------------------------------------------

def _check_range(name: str, value: float, lo: float, hi: float,
                 lo_open: bool = False, hi_open: bool = False) -> None:
    below = value <= lo if lo_open else value < lo - RANGE_SLACK
    above = value >= hi if hi_open else value > hi + RANGE_SLACK
    if below or above:
        left = "(" if lo_open else "["
        right = ")" if hi_open else "]"
        raise ParamOutOfRangeError(f"{name}={value} outside {left}{lo:.12g}, {hi:.12g}{right}")


def _check_dim(d: int, minimum: int, family: str) -> None:
    if d < minimum:
        raise DimensionTooSmallError(f"{family} needs truncation dim >= {minimum}, got {d}")


def _ket(i: int, j: int, d: int) -> np.ndarray:
    v = np.zeros(d * d, dtype=np.complex128)
    v[i * d + j] = 1.0
    return v


def _diagonal_state(weights: dict[tuple[int, int], float], d: int) -> ComplexMatrix:
    """sum w |i j><i j| on C^d ⊗ C^d."""
    M = np.zeros((d * d, d * d), dtype=np.complex128)
    for (i, j), w in weights.items():
        M[i * d + j, i * d + j] += w
    return M


def _embed(block: ComplexMatrix, m: int, d: int) -> ComplexMatrix:
    """Zero-pad an operator on C^m ⊗ C^m into C^d ⊗ C^d."""
    if d == m:
        return block.copy()
    padded = np.zeros((d, d, d, d), dtype=np.complex128)
    padded[:m, :m, :m, :m] = block.reshape(m, m, m, m)
    return padded.reshape(d * d, d * d)


def _state(matrix: ComplexMatrix, d: int) -> DensityMatrix:
    return DensityMatrix.from_matrix(matrix, BipartiteIndex(d, d))


def geometric_tail_weights(start: int, d: int, ratio: float) -> np.ndarray:
    """p_i ∝ ratio^(i - start) for start <= i < d, summing to one."""
    _check_range("r", ratio, 0.0, 1.0, lo_open=True, hi_open=True)
    if d <= start:
        raise DimensionTooSmallError(f"Tail starting at {start} needs d > {start}, got {d}")
    weights = ratio ** np.arange(d - start, dtype=float)
    return weights / weights.sum()


# -----------------------------------------------------------------------------
# Generic builders
# -----------------------------------------------------------------------------

def pure_from_coefficients(D: CoefficientMatrix) -> DensityMatrix:
    """|psi><psi| with psi = vec(D)."""
    D.require_normalized()
    psi = D.vector()
    return DensityMatrix.from_matrix(np.outer(psi, psi.conj()), D.dims)


def mixture(components: Sequence[tuple[float, DensityMatrix]]) -> DensityMatrix:
    """
    Convex combination sum_i p_i rho_i.

    Raises:
        WeightsInvalidError: Negative weights, weights not summing to one, or no components
        DimensionMismatchError: Components on different spaces
    """
    if not components:
        raise WeightsInvalidError("A mixture needs at least one component")

    weights = np.array([w for w, _ in components], dtype=float)
    if np.any(weights < 0):
        raise WeightsInvalidError(f"Negative mixture weight in {weights.tolist()}")
    total = float(weights.sum())
    if abs(total - 1.0) > get_settings().tolerances.weights:
        raise WeightsInvalidError(f"Mixture weights sum to {total:.15g}, expected 1")

    dims = components[0][1].dims
    if any(rho.dims != dims for _, rho in components):
        raise DimensionMismatchError("All mixture components must share dims")

    matrix = sum(w * rho.matrix for w, rho in components)
    return DensityMatrix.from_matrix(matrix, dims)


# -----------------------------------------------------------------------------
# rho_alpha and its tail mixture
# -----------------------------------------------------------------------------

def rho_alpha(alpha: float, d: Optional[int] = None) -> DensityMatrix:
    """(2/7)|w><w| + (alpha/7) sigma_+ + ((5-alpha)/7) sigma_-, 2 <= alpha <= 5."""
    d = d if d is not None else get_settings().default_dim
    _check_range("alpha", alpha, 2.0, 5.0)
    _check_dim(d, 3, "rho_alpha")

    w = sum(_ket(i, i, d) for i in range(3)) / math.sqrt(3)
    sigma_plus = _diagonal_state({(i, (i + 1) % 3): 1 / 3 for i in range(3)}, d)
    sigma_minus = _diagonal_state({((i + 1) % 3, i): 1 / 3 for i in range(3)}, d)

    matrix = (2 / 7) * np.outer(w, w.conj()) + (alpha / 7) * sigma_plus + ((5 - alpha) / 7) * sigma_minus
    return _state(matrix, d)


def rho_alpha_norm(alpha: float) -> float:
    """Closed form of ||rho_alpha^R||_Tr."""
    return 19 / 21 + (2 / 21) * math.sqrt(19 - 15 * alpha + 3 * alpha ** 2)


def sigma_tail(d: Optional[int] = None, start: int = SIGMA_TAIL_START,
               ratio: Optional[float] = None) -> DensityMatrix:
    """sum_{start <= i < d} p_i |ii><ii| with renormalized geometric p_i."""
    d = d if d is not None else get_settings().default_dim
    ratio = ratio if ratio is not None else get_settings().default_ratio
    weights = geometric_tail_weights(start, d, ratio)
    diagonal = {(start + k, start + k): float(p) for k, p in enumerate(weights)}
    return _state(_diagonal_state(diagonal, d), d)


def rho_t_alpha(t: float, alpha: float, d: Optional[int] = None,
                ratio: Optional[float] = None) -> DensityMatrix:
    """t rho_alpha + (1-t) sigma, 0 < t <= 1, 3 < alpha <= 4."""
    d = d if d is not None else get_settings().default_dim
    _check_range("t", t, 0.0, 1.0, lo_open=True)
    _check_range("alpha", alpha, 3.0, 4.0, lo_open=True)
    _check_dim(d, SIGMA_TAIL_START + 1, "rho_t_alpha")
    return mixture([(t, rho_alpha(alpha, d)), (1 - t, sigma_tail(d, ratio=ratio))])


# -----------------------------------------------------------------------------
# Cyclic 4x4 family
# -----------------------------------------------------------------------------

def example39_weights(q1: float, scheme: WeightScheme) -> tuple[float, float, float, float]:
    """Weights (q1, q2, q3, q4) of a one-parameter scheme, 0 < q1 <= 1/3."""
    _check_range("q1", q1, 0.0, 1 / 3, lo_open=True)
    if scheme is WeightScheme.PPT:
        return (q1, q1 / 2, 0.5 - 1.5 * q1, 0.5)
    return (q1, 0.5 - 1.5 * q1, q1 / 2, 0.5)


def _check_weights(q: Sequence[float]) -> tuple[float, ...]:
    q = tuple(float(x) for x in q)
    if len(q) != 4:
        raise WeightsInvalidError(f"Expected four weights, got {len(q)}")
    if any(x < 0 for x in q):
        raise WeightsInvalidError(f"Weights must be nonnegative, got {q}")
    if abs(sum(q) - 1.0) > get_settings().tolerances.weights:
        raise WeightsInvalidError(f"Weights sum to {sum(q):.15g}, expected 1")
    return q


def example39_rho(q: Sequence[float], d: Optional[int] = None) -> DensityMatrix:
    """sum_i q_i rho_i: rho_1 maximally entangled on 4x4, rho_2..4 cyclic shifts."""
    d = d if d is not None else get_settings().example39_dim
    q = _check_weights(q)
    _check_dim(d, EXAMPLE39_BLOCK, "example39_rho")

    n = EXAMPLE39_BLOCK
    omega = sum(_ket(i, i, d) for i in range(n)) / 2
    matrix = q[0] * np.outer(omega, omega.conj())
    for shift in (1, 2, 3):
        matrix = matrix + q[shift] * _diagonal_state({(i, (i + shift) % n): 1 / n for i in range(n)}, d)
    return _state(matrix, d)


def example39_norm(q: Sequence[float]) -> float:
    """
    Exact ||rho^R||_Tr for example39_rho.

    rho^R is q1/4 on the twelve |ij>, i != j, directions plus a 4x4
    circulant with first row (q1, q2, q3, q4)/4 on span{|ii>}.
    """
    q1, q2, q3, q4 = _check_weights(q)
    circulant = 1 + abs(q1 - q2 + q3 - q4) + 2 * math.hypot(q1 - q3, q2 - q4)
    return 3 * q1 + circulant / 4


def example39_published_norm(q: Sequence[float]) -> float:
    """
    The published closed-form expression for this family.

    It reproduces the printed decimals 0.9866, 0.9496, 0.7264 but is not
    the trace norm of rho^R; see example39_norm for the exact value.
    """
    q1, q2, q3, q4 = _check_weights(q)
    squares = q1 ** 2 + q2 ** 2 + q3 ** 2 + q4 ** 2
    cyclic = q1 * q2 + q2 * q3 + q3 * q4 + q1 * q4
    return 0.75 * math.sqrt(squares - cyclic) + 0.25 * math.sqrt(squares + 3 * cyclic) + 3 * q1


def example39_is_ppt(q: Sequence[float]) -> bool:
    """example39_rho is PPT iff q2 q4 >= q1^2 and q3 >= q1."""
    q1, q2, q3, q4 = _check_weights(q)
    return q2 * q4 >= q1 ** 2 and q3 >= q1


def example39_rho_t(q: Sequence[float], t: float, rho0: Optional[DensityMatrix] = None,
                    d: Optional[int] = None) -> DensityMatrix:
    """
    (1-t) example39_rho + t rho_0.

    rho_0 defaults to |44><44| and must vanish on every row and column
    |i>|mu> with i, mu < 4.

    Raises:
        SupportOverlapError: rho_0 touches the 4x4 block
    """
    d = d if d is not None else (rho0.dims.dA if rho0 is not None else get_settings().example39_dim)
    _check_range("t", t, 0.0, 1.0)

    if rho0 is None:
        _check_dim(d, EXAMPLE39_BLOCK + 1, "example39_rho_t")
        rho0 = _state(_diagonal_state({(EXAMPLE39_BLOCK, EXAMPLE39_BLOCK): 1.0}, d), d)
    elif rho0.dims != BipartiteIndex(d, d):
        raise DimensionMismatchError(f"rho_0 dims {rho0.dims} do not match d={d}")

    block = [i * d + mu for i in range(EXAMPLE39_BLOCK) for mu in range(EXAMPLE39_BLOCK)]
    overlap = max(max_abs(rho0.matrix[block, :]), max_abs(rho0.matrix[:, block]))
    if overlap > get_settings().tolerances.support:
        raise SupportOverlapError(f"rho_0 has weight {overlap:.3e} on the 4x4 block")

    return mixture([(1 - t, example39_rho(q, d)), (t, rho0)])


# -----------------------------------------------------------------------------
# Werner-type family and its tail mixture
# -----------------------------------------------------------------------------

def _check_m(m) -> int:
    if int(m) != m or m < 3:
        raise ParamOutOfRangeError(f"m must be an integer >= 3, got {m}")
    return int(m)


def werner_mc(m: int, c: float, d: Optional[int] = None) -> DensityMatrix:
    """((m-c) P_m + (mc-1) F_m) / (m^3 - m) embedded in C^d ⊗ C^d, -1 <= c <= 1."""
    m = _check_m(m)
    d = d if d is not None else max(m, get_settings().default_dim)
    _check_range("c", c, -1.0, 1.0)
    _check_dim(d, m, "werner_mc")

    block = ((m - c) * np.eye(m * m) + (m * c - 1) * flip_operator(m)) / (m ** 3 - m)
    return _state(_embed(block, m, d), d)


def werner_mc_norm(m: int, c: float) -> float:
    """Closed form of ||rho_{m,c}^R||_Tr: 2/m - c below the kink c = 1/m, c above."""
    return 2 / m - c if c <= 1 / m else c


def varrho_tail(m: int, d: Optional[int] = None, ratio: Optional[float] = None) -> DensityMatrix:
    """Diagonal tail sum_{m <= i < d} p_i |ii><ii|."""
    m = _check_m(m)
    return sigma_tail(d, start=m, ratio=ratio)


def rho_eps_c(eps: float, c: float, m: int, d: Optional[int] = None,
              ratio: Optional[float] = None) -> DensityMatrix:
    """eps varrho + (1-eps) rho_{m,c}, 0 <= eps < 1, 2/m - 1 <= c < 0."""
    m = _check_m(m)
    d = d if d is not None else max(m + 1, get_settings().default_dim)
    _check_range("eps", eps, 0.0, 1.0, hi_open=True)
    _check_range("c", c, 2 / m - 1, 0.0, hi_open=True)
    _check_dim(d, m + 1, "rho_eps_c")
    return mixture([(eps, varrho_tail(m, d, ratio)), (1 - eps, werner_mc(m, c, d))])


# -----------------------------------------------------------------------------
# Isotropic family
# -----------------------------------------------------------------------------

def isotropic(p: float, m: int, d: Optional[int] = None) -> DensityMatrix:
    """p |Phi_m><Phi_m| + (1-p) I/m^2, -1/(m^2-1) <= p <= 1."""
    if int(m) != m or m < 2:
        raise ParamOutOfRangeError(f"m must be an integer >= 2, got {m}")
    m = int(m)
    d = d if d is not None else m
    _check_range("p", p, -1 / (m * m - 1), 1.0)
    _check_dim(d, m, "isotropic")

    phi = np.eye(m, dtype=np.complex128).reshape(-1) / math.sqrt(m)
    block = p * np.outer(phi, phi.conj()) + (1 - p) * np.eye(m * m) / (m * m)
    return _state(_embed(block, m, d), d)


def isotropic_norm(p: float, m: int) -> float:
    """Closed form of ||rho^R||_Tr for the isotropic family."""
    return 1 / m + (m * m - 1) * abs(p) / m


# -----------------------------------------------------------------------------
# StateSpec dispatch
# -----------------------------------------------------------------------------

def _param(spec: StateSpec, name: str, default: Optional[float] = None) -> float:
    value = spec.params.get(name, default)
    if value is None:
        raise ParamOutOfRangeError(f"{spec.family.value} needs parameter '{name}'")
    return float(value)


def build_state(spec: StateSpec) -> DensityMatrix:
    """
    Construct the state a StateSpec describes.

    pure and mixture states carry matrices rather than scalar parameters
    and cannot be built from a spec.
    """
    d = spec.dim()
    r = spec.tail_ratio()
    family = spec.family
    logger.debug("building %s d=%d params=%s", family.value, d, spec.params)

    if family is StateFamily.RHO_ALPHA:
        return rho_alpha(_param(spec, "alpha"), d)
    if family is StateFamily.SIGMA_TAIL:
        return sigma_tail(d, start=int(_param(spec, "start", SIGMA_TAIL_START)), ratio=r)
    if family is StateFamily.RHO_T_ALPHA:
        return rho_t_alpha(_param(spec, "t"), _param(spec, "alpha"), d, r)
    if family is StateFamily.EXAMPLE39_RHO:
        return example39_rho(_example39_q(spec), d)
    if family is StateFamily.EXAMPLE39_RHO_T:
        return example39_rho_t(_example39_q(spec), _param(spec, "t"), d=d)
    if family is StateFamily.WERNER_MC:
        return werner_mc(_param(spec, "m"), _param(spec, "c"), d)
    if family is StateFamily.VARRHO_TAIL:
        return varrho_tail(_param(spec, "m"), d, r)
    if family is StateFamily.RHO_EPS_C:
        return rho_eps_c(_param(spec, "eps"), _param(spec, "c"), _param(spec, "m"), d, r)
    if family is StateFamily.ISOTROPIC:
        return isotropic(_param(spec, "p"), _param(spec, "m"), d)

    raise ValidationError("family", f"{family.value} states cannot be built from scalar parameters")


def _example39_q(spec: StateSpec) -> tuple[float, ...]:
    return tuple(_param(spec, f"q{i}") for i in range(1, 5))


# -----------------------------------------------------------------------------
# Random states for property checks
# -----------------------------------------------------------------------------

def _ginibre(rows: int, cols: int, rng: np.random.Generator) -> ComplexMatrix:
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def random_unitary(d: int, rng: np.random.Generator) -> ComplexMatrix:
    """Eigenvector matrix of a random Hermitian matrix."""
    G = _ginibre(d, d, rng)
    _, vectors = hermitian_eigh((G + G.conj().T) / 2)
    return vectors


def random_density_matrix(dA: int, dB: int, rng: np.random.Generator,
                          rank: Optional[int] = None) -> DensityMatrix:
    """G G^dagger / Tr for a complex Gaussian G of the given rank."""
    n = dA * dB
    G = _ginibre(n, rank or n, rng)
    M = G @ G.conj().T
    return DensityMatrix.from_matrix(M / np.trace(M).real, BipartiteIndex(dA, dB))


def random_pure_coefficients(dA: int, dB: int, rng: np.random.Generator,
                             rank: Optional[int] = None) -> CoefficientMatrix:
    """Normalized random coefficient matrix with Schmidt rank min(rank, dA, dB)."""
    k = rank or min(dA, dB)
    D = _ginibre(dA, k, rng) @ _ginibre(k, dB, rng)
    return CoefficientMatrix.from_amplitudes(D / np.linalg.norm(D))


def random_product_state(dA: int, dB: int, rng: np.random.Generator) -> DensityMatrix:
    """rho_A ⊗ rho_B with random local states of random rank."""
    rho_a = random_density_matrix(dA, 1, rng, rank=int(rng.integers(1, dA + 1))).matrix
    rho_b = random_density_matrix(dB, 1, rng, rank=int(rng.integers(1, dB + 1))).matrix
    return DensityMatrix.from_matrix(np.kron(rho_a, rho_b), BipartiteIndex(dA, dB))


def random_separable_state(dA: int, dB: int, rng: np.random.Generator,
                           max_components: int = 10) -> DensityMatrix:
    """Random convex mixture of up to max_components product states."""
    count = int(rng.integers(1, max_components + 1))
    weights = rng.dirichlet(np.ones(count))
    weights = weights / weights.sum()
    return mixture([(float(w), random_product_state(dA, dB, rng)) for w in weights])


def random_symmetric_state(d: int, rng: np.random.Generator) -> DensityMatrix:
    """P rho' P / Tr(P rho' P) with P = (I + F)/2, so F rho = rho = rho F."""
    P = (np.eye(d * d) + flip_operator(d)) / 2
    rho_prime = random_density_matrix(d, d, rng).matrix
    M = P @ rho_prime @ P
    return DensityMatrix.from_matrix(M / np.trace(M).real, BipartiteIndex(d, d))


def random_symmetric_separable_state(d: int, rng: np.random.Generator,
                                     max_components: int = 6) -> DensityMatrix:
    """Mixture of |aa><aa| for random unit a; symmetric and separable."""
    count = int(rng.integers(1, max_components + 1))
    weights = rng.dirichlet(np.ones(count))
    M = np.zeros((d * d, d * d), dtype=np.complex128)
    for w in weights:
        a = _ginibre(d, 1, rng)[:, 0]
        a = a / np.linalg.norm(a)
        aa = np.kron(a, a)
        M += w * np.outer(aa, aa.conj())
    return DensityMatrix.from_matrix(M / np.trace(M).real, BipartiteIndex(d, d))
