"""Two-time-step sequential measurement simulation and the B1 functional.

Correlations follow the measure-and-prepare rule
p(ab|xy) = tr(E_{a|x} rho_in) * tr(E_{b|y} rho_{a|x}),
where rho_{a|x} is the state re-prepared by measurement x after outcome a.
Probability-zero first-step branches simply contribute 0; no conditional
probability is ever formed by division.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError
from .quantum import (
    BinaryMeasurement,
    BlochState,
    DensityMatrix,
    Effect,
    bloch_to_density,
)

OUTCOMES = ("+", "-")
_IDX = {"+": 0, "-": 1}


@dataclass(frozen=True)
class ProtocolPair:
    """The two binary measurements, reused at both time steps."""

    meas0: BinaryMeasurement
    meas1: BinaryMeasurement

    def __post_init__(self):
        if self.meas0.dim != self.meas1.dim:
            raise DimensionError("both measurements must share the same dimension")

    @property
    def dim(self) -> int:
        return self.meas0.dim

    def measurement(self, setting: int) -> BinaryMeasurement:
        if setting == 0:
            return self.meas0
        if setting == 1:
            return self.meas1
        raise DomainError("measurement setting must be 0 or 1")

    def swapped(self) -> "ProtocolPair":
        return ProtocolPair(self.meas1, self.meas0)


@dataclass(frozen=True)
class CorrelationTable:
    """The 16 probabilities p(ab|xy), indexed [a, b, x, y] with +=0, -=1."""

    probs: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.probs, dtype=float)
        if t.shape != (2, 2, 2, 2):
            raise DomainError("correlation table must have shape (2, 2, 2, 2)")
        if t.min() < -1e-12 or t.max() > 1.0 + 1e-12:
            raise DomainError("correlation-table entries must lie in [0, 1]")
        sums = t.sum(axis=(0, 1))
        if np.max(np.abs(sums - 1.0)) > 1e-10:
            raise DomainError("each (x, y) slice must sum to 1 within 1e-10")
        t.setflags(write=False)
        object.__setattr__(self, "probs", t)

    def prob(self, a: str, b: str, x: int, y: int) -> float:
        return float(self.probs[_IDX[a], _IDX[b], x, y])


@dataclass(frozen=True)
class LinearFunctional:
    """A linear functional R = sum of weights[a, b, x, y] * p(ab|xy)."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (2, 2, 2, 2):
            raise DomainError("functional weights must have shape (2, 2, 2, 2)")
        if not np.all(np.isfinite(w)):
            raise DomainError("functional weights must be finite")
        if np.all(w == 0.0):
            raise DomainError("functional must have at least one nonzero weight")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)


def b1_weights() -> LinearFunctional:
    """Unit weights on p(++|00), p(++|11), p(+-|01), p(+-|10)."""
    w = np.zeros((2, 2, 2, 2))
    w[0, 0, 0, 0] = 1.0
    w[0, 0, 1, 1] = 1.0
    w[0, 1, 0, 1] = 1.0
    w[0, 1, 1, 0] = 1.0
    return LinearFunctional(w)


def correlations(rho_in: DensityMatrix, protocol: ProtocolPair) -> CorrelationTable:
    """Simulate all 16 two-step probabilities for a state and protocol."""
    if rho_in.dim != protocol.dim:
        raise DimensionError("state and protocol dimensions differ")
    t = np.empty((2, 2, 2, 2))
    for x in (0, 1):
        mx = protocol.measurement(x)
        for a in OUTCOMES:
            p_first = float(np.trace(mx.effect(a).matrix @ rho_in.matrix).real)
            p_first = min(max(p_first, 0.0), 1.0)
            post = mx.post_state(a)
            for y in (0, 1):
                my = protocol.measurement(y)
                for b in OUTCOMES:
                    p_second = float(
                        np.trace(my.effect(b).matrix @ post.matrix).real
                    )
                    p_second = min(max(p_second, 0.0), 1.0)
                    t[_IDX[a], _IDX[b], x, y] = p_first * p_second
    return CorrelationTable(t)


def b1(table: CorrelationTable) -> float:
    """p(++|00) + p(++|11) + p(+-|01) + p(+-|10)."""
    p = table.probs
    return float(p[0, 0, 0, 0] + p[0, 0, 1, 1] + p[0, 1, 0, 1] + p[0, 1, 1, 0])


def evaluate_functional(f: LinearFunctional, table: CorrelationTable) -> float:
    return float(np.sum(f.weights * table.probs))


def _maximally_mixed(dim: int) -> DensityMatrix:
    return DensityMatrix(np.eye(dim, dtype=complex) / dim)


def _basis_projector(dim: int, k: int) -> np.ndarray:
    m = np.zeros((dim, dim), dtype=complex)
    m[k, k] = 1.0
    return m


def theorem2_protocol(p: float, w: float) -> tuple[DensityMatrix, ProtocolPair]:
    """Canonical qubit protocol attaining the constrained-purity maximum.

    Initial state: Bloch length p along +z.  Measurement 0 announces "+"
    deterministically and re-prepares Bloch length w along -z.  Measurement 1
    projects onto the computational basis and re-prepares Bloch length w
    along +z for either outcome.
    """
    if not (0.0 <= p <= 1.0 and 0.0 <= w <= 1.0):
        raise DomainError("p and w must lie in [0, 1]")
    up = np.array([0.0, 0.0, 1.0])
    down = np.array([0.0, 0.0, -1.0])
    rho_in = bloch_to_density(BlochState(p, up))
    meas0 = BinaryMeasurement(
        effect_plus=Effect(np.eye(2, dtype=complex)),
        post_plus=bloch_to_density(BlochState(w, down)),
        post_minus=_maximally_mixed(2),
    )
    proj_plus = 0.5 * (np.eye(2, dtype=complex) + np.array([[1, 0], [0, -1]]))
    post1 = bloch_to_density(BlochState(w, up))
    meas1 = BinaryMeasurement(
        effect_plus=Effect(proj_plus),
        post_plus=post1,
        post_minus=post1,
    )
    return rho_in, ProtocolPair(meas0, meas1)


def qutrit_value4_protocol() -> tuple[DensityMatrix, ProtocolPair]:
    """A d=3 protocol with pure initial state reaching B1 = 4."""
    d = 3
    rho_in = DensityMatrix(_basis_projector(d, 0))
    meas0 = BinaryMeasurement(
        effect_plus=Effect(_basis_projector(d, 0) + _basis_projector(d, 1)),
        post_plus=DensityMatrix(_basis_projector(d, 1)),
        post_minus=_maximally_mixed(d),
    )
    meas1 = BinaryMeasurement(
        effect_plus=Effect(_basis_projector(d, 0) + _basis_projector(d, 2)),
        post_plus=DensityMatrix(_basis_projector(d, 2)),
        post_minus=_maximally_mixed(d),
    )
    return rho_in, ProtocolPair(meas0, meas1)


def qudit_maxmixed_protocol(d: int) -> tuple[DensityMatrix, ProtocolPair]:
    """Maximally mixed input protocol reaching B1 = 4(1 - 1/d) for d >= 4."""
    if d < 4:
        raise DomainError("qudit_maxmixed_protocol requires d >= 4")
    rho_in = _maximally_mixed(d)
    meas0 = BinaryMeasurement(
        effect_plus=Effect(np.eye(d, dtype=complex) - _basis_projector(d, 1)),
        post_plus=DensityMatrix(_basis_projector(d, 0)),
        post_minus=_maximally_mixed(d),
    )
    meas1 = BinaryMeasurement(
        effect_plus=Effect(np.eye(d, dtype=complex) - _basis_projector(d, 0)),
        post_plus=DensityMatrix(_basis_projector(d, 1)),
        post_minus=_maximally_mixed(d),
    )
    return rho_in, ProtocolPair(meas0, meas1)
