import numpy as np
import pytest

from purity_witness.errors import DimensionError, DomainError
from purity_witness.kernels import b1_qubit_bloch_batch
from purity_witness.optimizer import random_qubit_protocol
from purity_witness.quantum import (
    BinaryMeasurement,
    DensityMatrix,
    Effect,
    density_to_bloch,
    random_density,
)
from purity_witness.sequence import (
    CorrelationTable,
    LinearFunctional,
    ProtocolPair,
    b1,
    b1_weights,
    correlations,
    evaluate_functional,
    qudit_maxmixed_protocol,
    qutrit_value4_protocol,
    theorem2_protocol,
)


def _deterministic_plus_protocol() -> ProtocolPair:
    meas = BinaryMeasurement(
        Effect(np.eye(2)),
        DensityMatrix(np.eye(2) / 2),
        DensityMatrix(np.eye(2) / 2),
    )
    return ProtocolPair(meas, meas)


def _never_plus_protocol() -> ProtocolPair:
    meas = BinaryMeasurement(
        Effect(np.zeros((2, 2))),
        DensityMatrix(np.eye(2) / 2),
        DensityMatrix(np.eye(2) / 2),
    )
    return ProtocolPair(meas, meas)


def test_theorem2_table_entries_at_unit_lengths():
    rho, protocol = theorem2_protocol(1.0, 1.0)
    t = correlations(rho, protocol)
    assert t.prob("+", "+", 0, 0) == pytest.approx(1.0, abs=1e-12)
    assert t.prob("+", "+", 1, 1) == pytest.approx(1.0, abs=1e-12)
    assert t.prob("+", "-", 0, 1) == pytest.approx(1.0, abs=1e-12)
    assert t.prob("+", "-", 1, 0) == pytest.approx(0.0, abs=1e-12)
    assert b1(t) == pytest.approx(3.0, abs=1e-12)


def test_deterministic_plus_has_unit_plus_plus():
    t = correlations(DensityMatrix(np.eye(2) / 2), _deterministic_plus_protocol())
    for x in (0, 1):
        for y in (0, 1):
            assert t.prob("+", "+", x, y) == pytest.approx(1.0, abs=1e-12)
    assert b1(t) == pytest.approx(2.0, abs=1e-12)


def test_never_plus_gives_zero_b1():
    t = correlations(DensityMatrix(np.eye(2) / 2), _never_plus_protocol())
    assert b1(t) == pytest.approx(0.0, abs=1e-12)


def test_random_tables_normalized_per_setting():
    rng = np.random.default_rng(5)
    for k in range(200):
        protocol = random_qubit_protocol(rng)
        rho = random_density(2, int(rng.integers(1, 3)), k)
        t = correlations(rho, protocol)
        sums = t.probs.sum(axis=(0, 1))
        np.testing.assert_allclose(sums, 1.0, atol=1e-10)
        assert t.probs.min() >= -1e-12


def test_b1_invariant_under_setting_swap():
    rng = np.random.default_rng(17)
    for k in range(200):
        protocol = random_qubit_protocol(rng)
        rho = random_density(2, 2, k)
        assert b1(correlations(rho, protocol)) == pytest.approx(
            b1(correlations(rho, protocol.swapped())), abs=1e-12
        )


def test_dimension_mismatch_rejected():
    _, protocol = qutrit_value4_protocol()
    with pytest.raises(DimensionError):
        correlations(DensityMatrix(np.eye(2) / 2), protocol)


def test_evaluate_functional_b1_pattern_matches_b1():
    rng = np.random.default_rng(2)
    f = b1_weights()
    for k in range(50):
        rho = random_density(2, 2, k)
        t = correlations(rho, random_qubit_protocol(rng))
        assert evaluate_functional(f, t) == pytest.approx(b1(t), abs=1e-12)


def test_evaluate_functional_all_ones_gives_four():
    f = LinearFunctional(np.ones((2, 2, 2, 2)))
    t = correlations(DensityMatrix(np.eye(2) / 2), _deterministic_plus_protocol())
    assert evaluate_functional(f, t) == pytest.approx(4.0, abs=1e-12)


def test_zero_functional_rejected():
    # the type requires at least one nonzero weight
    with pytest.raises(DomainError):
        LinearFunctional(np.zeros((2, 2, 2, 2)))


def test_theorem2_closed_form_grid():
    for p in np.linspace(0.0, 1.0, 21):
        for w in np.linspace(0.0, 1.0, 21):
            rho, protocol = theorem2_protocol(float(p), float(w))
            val = b1(correlations(rho, protocol))
            expected = 1.0 + 0.5 * (1.0 + w) + 0.25 * (1.0 + p) * (1.0 + w)
            assert val == pytest.approx(expected, abs=1e-12)


def test_theorem2_worked_point():
    rho, protocol = theorem2_protocol(0.5, 0.5)
    assert b1(correlations(rho, protocol)) == pytest.approx(2.3125, abs=1e-12)


def test_theorem2_domain():
    with pytest.raises(DomainError):
        theorem2_protocol(1.2, 0.5)
    with pytest.raises(DomainError):
        theorem2_protocol(0.5, -0.1)


def test_qutrit_value4():
    rho, protocol = qutrit_value4_protocol()
    t = correlations(rho, protocol)
    assert b1(t) == pytest.approx(4.0, abs=1e-15)
    np.testing.assert_allclose(t.probs.sum(axis=(0, 1)), 1.0, atol=1e-12)


def test_qutrit_protocol_on_maximally_mixed_input():
    _, protocol = qutrit_value4_protocol()
    t = correlations(DensityMatrix(np.eye(3) / 3), protocol)
    val = b1(t)
    assert val == pytest.approx(8.0 / 3.0, abs=1e-12)
    assert val <= 3.0


@pytest.mark.parametrize("d,expected", [(4, 3.0), (5, 3.2), (8, 3.5)])
def test_qudit_maxmixed_values(d, expected):
    rho, protocol = qudit_maxmixed_protocol(d)
    assert b1(correlations(rho, protocol)) == pytest.approx(expected, abs=1e-12)


def test_qudit_maxmixed_domain():
    with pytest.raises(DomainError):
        qudit_maxmixed_protocol(3)


def test_qubit_ceiling_over_random_protocols():
    # dimension-witness property: no qubit protocol exceeds 3
    rng = np.random.default_rng(23)
    n = 10_000
    q0 = rng.uniform(0.0, 0.5, n)
    r0 = rng.uniform(q0, 1.0 - q0)
    q1 = rng.uniform(0.0, 0.5, n)
    r1 = rng.uniform(q1, 1.0 - q1)

    def dirs(m):
        v = rng.normal(size=(m, 3))
        return v / np.linalg.norm(v, axis=1, keepdims=True)

    def bloch_vecs(m):
        return dirs(m) * rng.uniform(0.0, 1.0, (m, 1))

    vals = b1_qubit_bloch_batch(
        r0, q0, dirs(n), r1, q1, dirs(n), bloch_vecs(n), bloch_vecs(n), bloch_vecs(n)
    )
    assert vals.max() <= 3.0 + 1e-10
    assert vals.min() >= 0.0


def test_bloch_batch_agrees_with_matrix_simulation():
    rng = np.random.default_rng(29)
    for k in range(100):
        protocol = random_qubit_protocol(rng)
        rho = random_density(2, 2, k)
        expected = b1(correlations(rho, protocol))

        def eff_params(meas):
            s = density_to_bloch  # shorthand below uses Bloch forms
            e = meas.effect_plus.matrix
            r = float(np.trace(e).real) / 2.0
            vec = np.array(
                [
                    float(np.trace(e @ np.array([[0, 1], [1, 0]])).real),
                    float(np.trace(e @ np.array([[0, -1j], [1j, 0]])).real),
                    float(np.trace(e @ np.array([[1, 0], [0, -1]])).real),
                ]
            ) / 2.0
            q = float(np.linalg.norm(vec))
            v = vec / q if q > 1e-14 else np.array([0.0, 0.0, 1.0])
            post = s(meas.post_plus)
            return r, q, v, post.length * post.direction

        r0, q0, v0, t0 = eff_params(protocol.meas0)
        r1, q1, v1, t1 = eff_params(protocol.meas1)
        s_in = density_to_bloch(rho)
        got = b1_qubit_bloch_batch(
            np.array([r0]),
            np.array([q0]),
            v0[None],
            np.array([r1]),
            np.array([q1]),
            v1[None],
            (s_in.length * s_in.direction)[None],
            t0[None],
            t1[None],
        )[0]
        assert got == pytest.approx(expected, abs=1e-10)


def test_correlation_table_validation():
    bad = np.full((2, 2, 2, 2), 0.25)
    bad[0, 0, 0, 0] = 0.5  # slice (0,0) now sums to 1.25
    with pytest.raises(DomainError):
        CorrelationTable(bad)
