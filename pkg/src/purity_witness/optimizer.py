"""Numerical verification of the closed-form maxima by constrained search.

Every closed form has an independent numeric route here: multistart
Nelder-Mead over the effect parametrizations, with states supplied by the
analytically optimal construction (qubit case) or by exact inner
maximization (general linear functionals).  Search values must never exceed
the closed forms; attaining them within tolerance is the verification.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import expm
from scipy.optimize import minimize

from . import kernels
from .errors import DimensionError, DomainError
from .quantum import (
    PAULI,
    BinaryMeasurement,
    BlochState,
    DensityMatrix,
    Effect,
    bloch_to_density,
)
from .sequence import LinearFunctional, ProtocolPair, b1_weights
from .witness import b1_max_constrained, b1_max_initial

QUBIT_GAP_TOL = 1e-6
QUDIT_GAP_TOL = 1e-5
SOUNDNESS_TOL = 1e-7

_Z = np.array([0.0, 0.0, 1.0])

# search boxes for the five-parameter kernels
_QUBIT_LO = np.array([0.0, 0.0, 0.0, 0.0, 0.0])
_QUBIT_HI = np.array([1.0, 0.5, 1.0, 0.5, math.pi])
_QUDIT_LO = np.array([0.0, 0.0, 0.0, 0.0, 0.0])
_QUDIT_HI = np.array([1.0, 1.0, 1.0, 1.0, math.pi])


@dataclass(frozen=True)
class QubitEffectParams:
    """E_+ = r 1 + q v.sigma with 0 <= q <= r <= 1 - q."""

    r: float
    q: float
    v: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.v, dtype=float)
        if v.shape != (3,) or abs(v @ v - 1.0) > 1e-12:
            raise DomainError("v must be a unit 3-vector")
        if not (0.0 <= self.q <= self.r <= 1.0 - self.q):
            raise DomainError("parameters must satisfy 0 <= q <= r <= 1 - q")
        v.setflags(write=False)
        object.__setattr__(self, "v", v)

    def to_effect(self) -> Effect:
        m = self.r * np.eye(2, dtype=complex) + self.q * np.tensordot(
            self.v, PAULI, axes=1
        )
        return Effect(m)


@dataclass(frozen=True)
class QuditEffectParams:
    """E_+ = a (1_2 + b c.sigma) (+) 1_(d-2) on a d-dimensional space.

    The boundary a = 1/(1+b) is the family whose "-" effect is proportional
    to a rank-one projector, E_- = (u/2)(1_2 - c.sigma) with u = 1 - a(1-b).
    """

    a: float
    b: float
    c: np.ndarray
    dim: int

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        if c.shape != (3,) or abs(c @ c - 1.0) > 1e-12:
            raise DomainError("c must be a unit 3-vector")
        if not 0.0 <= self.b <= 1.0:
            raise DomainError("b must lie in [0, 1]")
        if not 0.0 <= self.a <= 1.0 / (1.0 + self.b) + 1e-15:
            raise DomainError("a must lie in [0, 1/(1+b)]")
        if self.dim < 2:
            raise DimensionError("dim must be at least 2")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)

    @property
    def u(self) -> float:
        return 1.0 - self.a * (1.0 - self.b)

    def to_effect(self) -> Effect:
        block = self.a * (
            np.eye(2, dtype=complex) + self.b * np.tensordot(self.c, PAULI, axes=1)
        )
        m = np.eye(self.dim, dtype=complex)
        m[:2, :2] = block
        return Effect(m)


@dataclass(frozen=True)
class OptimizationReport:
    """Best value found by a multistart search, against its closed form."""

    best_value: float
    best_params: np.ndarray
    closed_form: Optional[float]
    gap: Optional[float]
    restarts: int
    seed: int

    def __post_init__(self):
        if self.closed_form is not None:
            if self.best_value > self.closed_form + SOUNDNESS_TOL:
                raise DomainError(
                    f"search value {self.best_value} exceeds the analytic "
                    f"maximum {self.closed_form}: soundness violated"
                )

    def to_dict(self) -> dict:
        return {
            "best_value": self.best_value,
            "best_params": [float(v) for v in np.ravel(self.best_params)],
            "closed_form": self.closed_form,
            "gap": self.gap,
            "restarts": self.restarts,
            "seed": self.seed,
        }


def _normalize_or_z(vec: np.ndarray) -> np.ndarray:
    n = float(np.linalg.norm(vec))
    if n < 1e-12:
        return _Z.copy()
    return vec / n


def optimal_states_for_effects(
    e0: QubitEffectParams,
    e1: QubitEffectParams,
    p: float,
    w0: float,
    w1: float,
) -> tuple[BlochState, BlochState, BlochState]:
    """Optimal (initial, post0, post1) Bloch states for a pair of effects.

    The post states point along +/-(q0 v0 - q1 v1); the initial state along
    q0 X0 v0 + q1 X1 v1 with X_i = 1 + r_i - r_(1-i) + w_i |q0 v0 - q1 v1|.
    Degenerate zero vectors fall back to +z.
    """
    for name, val in (("p", p), ("w0", w0), ("w1", w1)):
        if not 0.0 <= val <= 1.0:
            raise DomainError(f"{name} must lie in [0, 1]")
    diff = e0.q * e0.v - e1.q * e1.v
    n = float(np.linalg.norm(diff))
    x0 = 1.0 + e0.r - e1.r + w0 * n
    x1 = 1.0 + e1.r - e0.r + w1 * n
    init_dir = _normalize_or_z(e0.q * x0 * e0.v + e1.q * x1 * e1.v)
    post0_dir = _normalize_or_z(diff)
    post1_dir = _normalize_or_z(-diff)
    return (
        BlochState(p, init_dir),
        BlochState(w0, post0_dir),
        BlochState(w1, post1_dir),
    )


def params_to_protocol(
    params: np.ndarray, p: float, w: float
) -> tuple[DensityMatrix, ProtocolPair]:
    """Build the concrete state and measure-and-prepare pair for a kernel
    parameter vector (r0, q0, r1, q1, theta), for cross-checking the
    closed-form objective against the full matrix simulation."""
    r0, q0, r1, q1, theta = params
    r0 = min(max(r0, 0.0), 1.0)
    q0 = min(max(q0, 0.0), min(r0, 1.0 - r0))
    r1 = min(max(r1, 0.0), 1.0)
    q1 = min(max(q1, 0.0), min(r1, 1.0 - r1))
    v0 = np.array([0.0, 0.0, 1.0])
    v1 = np.array([math.sin(theta), 0.0, math.cos(theta)])
    e0 = QubitEffectParams(r0, q0, v0)
    e1 = QubitEffectParams(r1, q1, v1)
    init, post0, post1 = optimal_states_for_effects(e0, e1, p, w, w)
    meas0 = BinaryMeasurement(
        e0.to_effect(), bloch_to_density(post0), bloch_to_density(post0)
    )
    meas1 = BinaryMeasurement(
        e1.to_effect(), bloch_to_density(post1), bloch_to_density(post1)
    )
    return bloch_to_density(init), ProtocolPair(meas0, meas1)


def _starts(rng: np.random.Generator, restarts: int, lo, hi) -> np.ndarray:
    return rng.uniform(lo, hi, size=(restarts, lo.shape[0]))


def maximize_b1_qubit(
    p: float, w: float, restarts: int = 100, seed: int = 0
) -> OptimizationReport:
    """Multistart search for the qubit maximum of B1 at fixed (p, w)."""
    if not (0.0 <= p <= 1.0 and 0.0 <= w <= 1.0):
        raise DomainError("p and w must lie in [0, 1]")
    if restarts < 1:
        raise DomainError("restarts must be >= 1")
    rng = np.random.default_rng(seed)
    starts = _starts(rng, restarts, _QUBIT_LO, _QUBIT_HI)
    best, params, _ = kernels.multistart_maximize(
        0, p, w, starts, _QUBIT_LO, _QUBIT_HI, 4000, 1e-12, 1e-10
    )
    closed = b1_max_constrained(p, w)
    return OptimizationReport(
        best_value=float(best),
        best_params=np.asarray(params),
        closed_form=closed,
        gap=closed - float(best),
        restarts=restarts,
        seed=seed,
    )


def maximize_b1_qudit_maxmixed(
    d: int, restarts: int = 100, seed: int = 0
) -> OptimizationReport:
    """Multistart search for B1 on the maximally mixed d-dimensional input.

    Search space: block effects with pure post states in the optimizing
    two-dimensional subspace.  closed_form is the analytic upper bound
    max(3, 4(1 - 1/d)); it is attained for d >= 4, while for d = 3 the
    search tops out at the attainable 4(1 - 1/3) = 8/3.
    """
    if d not in (3, 4, 5, 6):
        raise DomainError("d must be one of 3, 4, 5, 6")
    if restarts < 1:
        raise DomainError("restarts must be >= 1")
    rng = np.random.default_rng(seed)
    starts = _starts(rng, restarts, _QUDIT_LO, _QUDIT_HI)
    best, params, _ = kernels.multistart_maximize(
        1, float(d), 0.0, starts, _QUDIT_LO, _QUDIT_HI, 4000, 1e-12, 1e-10
    )
    closed = max(3.0, 4.0 * (1.0 - 1.0 / d))
    return OptimizationReport(
        best_value=float(best),
        best_params=np.asarray(params),
        closed_form=closed,
        gap=closed - float(best),
        restarts=restarts,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# General linear functionals: search over effects with exact inner states
# ---------------------------------------------------------------------------


def optimal_spectrum(g: np.ndarray, target_purity: float) -> tuple[float, np.ndarray]:
    """Maximize sum(q_i g_i) over the simplex with sum(q_i^2) fixed.

    g is sorted descending.  The optimum puts support on a top segment and
    is linear in the deviation of g from its segment mean.  Returns the
    maximal value and the optimal eigenvalue vector (same length as g).
    """
    d = g.shape[0]
    if not 1.0 / d - 1e-12 <= target_purity <= 1.0 + 1e-12:
        raise DomainError("target purity must lie in [1/d, 1]")
    pur = min(max(target_purity, 1.0 / d), 1.0)
    best_val = -np.inf
    best_q = None
    for k in range(1, d + 1):
        if pur < 1.0 / k - 1e-12:
            continue
        gs = g[:k]
        mean = gs.mean()
        dev = gs - mean
        nd = float(dev @ dev)
        q = np.zeros(d)
        if nd < 1e-28:
            # constant segment: any feasible q gives the same value; mix the
            # uniform point with a vertex to meet the purity
            lam_sq_coeff = 1.0 - 1.0 / k
            if lam_sq_coeff <= 0.0:
                lam = 0.0
            else:
                lam = math.sqrt(max(pur - 1.0 / k, 0.0) / lam_sq_coeff)
            q[:k] = (1.0 - lam) / k
            q[0] += lam
            val = float(mean)
        else:
            t = math.sqrt(max(pur - 1.0 / k, 0.0) / nd)
            qk = 1.0 / k + t * dev
            if qk.min() < -1e-12:
                continue
            q[:k] = np.clip(qk, 0.0, None)
            val = float(q[:k] @ gs)
        if val > best_val:
            best_val = val
            best_q = q
    if best_q is None:
        raise DomainError("no feasible spectrum found")
    return best_val, best_q


def _hermitian_from_params(v: np.ndarray, d: int) -> np.ndarray:
    h = np.zeros((d, d), dtype=complex)
    idx = 0
    for i in range(d):
        h[i, i] = v[idx]
        idx += 1
    for i in range(d):
        for j in range(i + 1, d):
            h[i, j] = v[idx] + 1j * v[idx + 1]
            h[j, i] = v[idx] - 1j * v[idx + 1]
            idx += 2
    return h


def _effect_from_params(v: np.ndarray, d: int) -> np.ndarray:
    """d eigenvalues (clipped to [0,1]) + d^2 - d unitary parameters."""
    eigs = np.clip(v[:d], 0.0, 1.0)
    if d == 2:
        theta, phi = v[2], v[3]
        direction = np.array(
            [
                math.sin(theta) * math.cos(phi),
                math.sin(theta) * math.sin(phi),
                math.cos(theta),
            ]
        )
        proj = 0.5 * (np.eye(2, dtype=complex) + np.tensordot(direction, PAULI, axes=1))
        return eigs[0] * proj + eigs[1] * (np.eye(2) - proj)
    u = expm(1j * _hermitian_from_params(v[d:], d))
    return (u * eigs) @ u.conj().T


def _n_effect_params(d: int) -> int:
    if d == 2:
        return 4
    return d + d * d


def _functional_value(
    weights: np.ndarray, effects: list[np.ndarray], dim: int, pur: float
) -> float:
    """Exact maximum of the functional over states, for fixed effects.

    Post states are top eigenvectors of F_(a|x) = sum_by w[a,b,x,y] E_(b|y);
    the initial state aligns an optimal fixed-purity spectrum with the
    eigenbasis of G = sum_ax s_(a|x) E_(a|x).
    """
    eff = [
        [effects[0], np.eye(dim) - effects[0]],
        [effects[1], np.eye(dim) - effects[1]],
    ]
    g = np.zeros((dim, dim), dtype=complex)
    for a in range(2):
        for x in range(2):
            f_ax = np.zeros((dim, dim), dtype=complex)
            for b in range(2):
                for y in range(2):
                    f_ax = f_ax + weights[a, b, x, y] * eff[y][b]
            s_ax = float(np.linalg.eigvalsh(f_ax)[-1])
            g = g + s_ax * eff[x][a]
    gev = np.linalg.eigvalsh(g)[::-1]
    val, _ = optimal_spectrum(gev, pur)
    return val


def maximize_linear_functional(
    f: LinearFunctional,
    dim: int,
    purity: float,
    restarts: int = 40,
    seed: int = 0,
) -> OptimizationReport:
    """Maximize a linear functional of the correlations at fixed purity.

    Searches over both effects (eigenvalues plus eigenbasis); post states
    and the initial state are resolved exactly inside the objective, so the
    reported value is attainable by an explicit protocol.
    """
    if dim not in (2, 3):
        raise DimensionError("dim must be 2 or 3")
    if not 1.0 / dim - 1e-12 <= purity <= 1.0 + 1e-12:
        raise DomainError("purity must lie in [1/dim, 1]")
    if restarts < 1:
        raise DomainError("restarts must be >= 1")
    pur = min(max(purity, 1.0 / dim), 1.0)
    npar = _n_effect_params(dim)
    weights = f.weights

    def negobj(v):
        e0 = _effect_from_params(v[:npar], dim)
        e1 = _effect_from_params(v[npar:], dim)
        return -_functional_value(weights, [e0, e1], dim, pur)

    rng = np.random.default_rng(seed)
    best_val = -np.inf
    best_x = None
    for _ in range(restarts):
        x0 = np.concatenate(
            [
                np.concatenate(
                    [
                        rng.uniform(0.0, 1.0, dim),
                        rng.uniform(-math.pi, math.pi, npar - dim),
                    ]
                )
                for _ in range(2)
            ]
        )
        res = minimize(
            negobj,
            x0,
            method="Nelder-Mead",
            options={"maxiter": 8000, "fatol": 1e-12, "xatol": 1e-10},
        )
        val, x = -res.fun, res.x
        for _ in range(3):
            res = minimize(
                negobj,
                x,
                method="Nelder-Mead",
                options={"maxiter": 8000, "fatol": 1e-12, "xatol": 1e-10},
            )
            if -res.fun <= val + 1e-13:
                if -res.fun > val:
                    val, x = -res.fun, res.x
                break
            val, x = -res.fun, res.x
        if val > best_val:
            best_val = val
            best_x = x
    closed = None
    if dim == 2 and np.array_equal(weights, b1_weights().weights):
        closed = b1_max_initial(math.sqrt(2.0 * pur - 1.0))
    return OptimizationReport(
        best_value=float(best_val),
        best_params=np.asarray(best_x),
        closed_form=closed,
        gap=None if closed is None else closed - float(best_val),
        restarts=restarts,
        seed=seed,
    )


def monotonicity_sweep(
    f: LinearFunctional,
    dim: int,
    purities: Sequence[float],
    restarts: int = 40,
    seed: int = 0,
) -> list[tuple[float, float]]:
    """Per-purity maxima of a functional, with common random restarts."""
    purs = list(purities)
    if any(b < a for a, b in zip(purs, purs[1:])):
        raise DomainError("purities must be sorted ascending")
    return [
        (pur, maximize_linear_functional(f, dim, pur, restarts, seed).best_value)
        for pur in purs
    ]


# ---------------------------------------------------------------------------
# Random protocol sampling (constraint-preserving), used by property tests
# ---------------------------------------------------------------------------


def random_unit_vector(rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=3)
    n = np.linalg.norm(v)
    while n < 1e-12:
        v = rng.normal(size=3)
        n = np.linalg.norm(v)
    return v / n


def random_qubit_effect_params(rng: np.random.Generator) -> QubitEffectParams:
    q = rng.uniform(0.0, 0.5)
    r = rng.uniform(q, 1.0 - q)
    return QubitEffectParams(r, q, random_unit_vector(rng))


def random_qubit_measurement(rng: np.random.Generator) -> BinaryMeasurement:
    from .quantum import random_density

    eff = random_qubit_effect_params(rng).to_effect()
    seed_a, seed_b = rng.integers(0, 2**31, size=2)
    return BinaryMeasurement(
        eff,
        random_density(2, int(rng.integers(1, 3)), int(seed_a)),
        random_density(2, int(rng.integers(1, 3)), int(seed_b)),
    )


def random_qubit_protocol(rng: np.random.Generator) -> ProtocolPair:
    return ProtocolPair(random_qubit_measurement(rng), random_qubit_measurement(rng))
