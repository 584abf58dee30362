"""Finite-dimensional states, effects and a two-qubit concurrence oracle.

All matrix-valued types validate their defining constraints on construction
(Hermiticity to 1e-12, unit trace to 1e-12, positivity with 1e-10 slack) and
are treated as immutable afterwards.  Dimensions never exceed 6, so dense
Hermitian eigensolvers are used throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError

HERM_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_SLACK = 1e-10

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = np.stack([PAULI_X, PAULI_Y, PAULI_Z])

# spin-flip operator sigma_y (x) sigma_y used by the concurrence formula
_SIGYY = np.kron(PAULI_Y, PAULI_Y)


def _as_square(matrix) -> np.ndarray:
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise DimensionError(f"expected a non-empty square matrix, got shape {m.shape}")
    return m


@dataclass(frozen=True)
class DensityMatrix:
    """A d-dimensional density operator: Hermitian, unit trace, PSD."""

    matrix: np.ndarray

    def __post_init__(self):
        m = _as_square(self.matrix)
        if np.max(np.abs(m - m.conj().T)) > HERM_TOL:
            raise DomainError("density matrix is not Hermitian within 1e-12")
        if abs(np.trace(m).real - 1.0) > TRACE_TOL or abs(np.trace(m).imag) > TRACE_TOL:
            raise DomainError("density matrix does not have unit trace within 1e-12")
        if np.linalg.eigvalsh(m).min() < -PSD_SLACK:
            raise DomainError("density matrix has an eigenvalue below -1e-10")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class BlochState:
    """A qubit state given by Bloch-vector length and unit direction."""

    length: float
    direction: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.direction, dtype=float)
        if d.shape != (3,):
            raise DomainError("Bloch direction must be a real 3-vector")
        if abs(d @ d - 1.0) > 1e-12:
            raise DomainError("Bloch direction must have unit norm within 1e-12")
        if not 0.0 <= self.length <= 1.0:
            raise DomainError("Bloch-vector length must lie in [0, 1]")
        d.setflags(write=False)
        object.__setattr__(self, "direction", d)
        object.__setattr__(self, "length", float(self.length))


@dataclass(frozen=True)
class Effect:
    """A measurement effect E with 0 <= E <= 1 (eigenvalue slack 1e-10)."""

    matrix: np.ndarray

    def __post_init__(self):
        m = _as_square(self.matrix)
        if np.max(np.abs(m - m.conj().T)) > HERM_TOL:
            raise DomainError("effect is not Hermitian within 1e-12")
        ev = np.linalg.eigvalsh(m)
        if ev.min() < -PSD_SLACK or ev.max() > 1.0 + PSD_SLACK:
            raise DomainError("effect eigenvalues must lie in [0, 1] within 1e-10")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def complement(self) -> "Effect":
        """The effect of the opposite outcome, 1 - E."""
        return Effect(np.eye(self.dim) - self.matrix)


@dataclass(frozen=True)
class BinaryMeasurement:
    """Measure-and-prepare instrument for a binary (+/-) measurement.

    Holds the "+" effect (the "-" effect is its complement) together with
    the states re-prepared after each outcome.
    """

    effect_plus: Effect
    post_plus: DensityMatrix
    post_minus: DensityMatrix

    def __post_init__(self):
        d = self.effect_plus.dim
        if self.post_plus.dim != d or self.post_minus.dim != d:
            raise DimensionError("effect and post-measurement states must share dim")
        # raises if 1 - E_+ fails the effect constraints
        self.effect_plus.complement()

    @property
    def dim(self) -> int:
        return self.effect_plus.dim

    def effect(self, outcome: str) -> Effect:
        if outcome == "+":
            return self.effect_plus
        if outcome == "-":
            return self.effect_plus.complement()
        raise DomainError(f"unknown outcome {outcome!r}")

    def post_state(self, outcome: str) -> DensityMatrix:
        if outcome == "+":
            return self.post_plus
        if outcome == "-":
            return self.post_minus
        raise DomainError(f"unknown outcome {outcome!r}")


def purity(rho: DensityMatrix) -> float:
    """tr(rho^2), clamped to [1/d, 1]."""
    p = float(np.trace(rho.matrix @ rho.matrix).real)
    d = rho.dim
    if p < 1.0 / d - PSD_SLACK or p > 1.0 + PSD_SLACK:
        raise DomainError(f"computed purity {p} outside [1/{d}, 1] beyond slack")
    return min(max(p, 1.0 / d), 1.0)


def bloch_to_density(state: BlochState) -> DensityMatrix:
    """rho = (1 + p alpha.sigma) / 2."""
    vec = state.length * state.direction
    m = 0.5 * (np.eye(2, dtype=complex) + np.tensordot(vec, PAULI, axes=1))
    return DensityMatrix(m)


def density_to_bloch(rho: DensityMatrix) -> BlochState:
    """Inverse Bloch decomposition; zero vectors map to direction +z."""
    if rho.dim != 2:
        raise DimensionError("Bloch decomposition requires a qubit state")
    vec = np.array([np.trace(rho.matrix @ s).real for s in PAULI])
    p = float(np.linalg.norm(vec))
    if p < 1e-12:
        return BlochState(0.0, np.array([0.0, 0.0, 1.0]))
    return BlochState(min(p, 1.0), vec / p)


def bloch_length_from_purity(pur: float) -> float:
    """p = sqrt(2P - 1) for qubit purity P in [1/2, 1]."""
    if not 0.5 <= pur <= 1.0:
        raise DomainError("qubit purity must lie in [1/2, 1]")
    return float(np.sqrt(2.0 * pur - 1.0))


def partial_trace(rho: DensityMatrix, keep: str) -> DensityMatrix:
    """Reduce a two-qubit state to subsystem 'A' or 'B'."""
    if rho.dim != 4:
        raise DimensionError("partial trace implemented for two-qubit states only")
    if keep not in ("A", "B"):
        raise DomainError("subsystem must be 'A' or 'B'")
    t = rho.matrix.reshape(2, 2, 2, 2)
    if keep == "A":
        red = np.einsum("ikjk->ij", t)
    else:
        red = np.einsum("kikj->ij", t)
    return DensityMatrix(red)


def wootters_concurrence(rho: DensityMatrix) -> float:
    """Exact two-qubit concurrence via the spin-flip eigenvalue formula.

    C = max(0, l1 - l2 - l3 - l4) where l_i are the decreasingly sorted
    square roots of the eigenvalues of rho (sy x sy) rho* (sy x sy).
    """
    if rho.dim != 4:
        raise DimensionError("concurrence is defined for two-qubit states")
    m = rho.matrix
    r = m @ _SIGYY @ m.conj() @ _SIGYY
    ev = np.linalg.eigvals(r).real
    lam = np.sqrt(np.clip(ev, 0.0, None))
    lam.sort()
    c = lam[3] - lam[2] - lam[1] - lam[0]
    return float(min(max(c, 0.0), 1.0))


def random_density(dim: int, rank: int, seed: int) -> DensityMatrix:
    """Seeded Hilbert-Schmidt-style random state: normalized G G^dagger."""
    if not 1 <= rank <= dim:
        raise DomainError("rank must satisfy 1 <= rank <= dim")
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    m = g @ g.conj().T
    m /= np.trace(m).real
    m = 0.5 * (m + m.conj().T)
    return DensityMatrix(m)
