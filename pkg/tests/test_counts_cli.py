import json
import math

import numpy as np
import pytest

from purity_witness.certificate import certify
from purity_witness.cli import main
from purity_witness.counts import (
    CountsRecord,
    counts_record_from_dict,
    estimate_b1,
    hoeffding_width,
    ingest_counts,
)
from purity_witness.errors import CountsFormatError, DomainError, QubitAssumptionError
from purity_witness.quantum import purity
from purity_witness.sequence import b1, correlations, theorem2_protocol
from purity_witness.witness import b1_max_constrained


def _record_from_protocol(p, w, shots=1000, claimed=None, label="t"):
    """Exact counts: each setting's probabilities times shots, which are
    integers for the canonical protocols at dyadic (p, w)."""
    rho, protocol = theorem2_protocol(p, w)
    table = correlations(rho, protocol)
    counts = {}
    for x in (0, 1):
        for y in (0, 1):
            block = {}
            for i, a in enumerate("+-"):
                for j, b_ in enumerate("+-"):
                    raw = table.probs[i, j, x, y] * shots
                    assert abs(raw - round(raw)) < 1e-9
                    block[a + b_] = int(round(raw))
            counts[(x, y)] = block
    return CountsRecord(label=label, claimed_initial_purity=claimed, counts=counts)


def _valid_dict(n=100):
    block = {"++": n, "+-": 0, "-+": 0, "--": 0}
    return {
        "label": "x",
        "claimed_initial_purity": None,
        "settings": [
            {"x": x, "y": y, "counts": dict(block)}
            for x in (0, 1)
            for y in (0, 1)
        ],
    }


def test_counts_roundtrip():
    rec = counts_record_from_dict(_valid_dict())
    assert counts_record_from_dict(rec.to_json_dict()) == rec


def test_counts_estimator_exact_point():
    rec = _record_from_protocol(0.5, 1.0, shots=1000)
    b1_hat, b1_low = estimate_b1(rec, 0.05)
    assert b1_hat == pytest.approx(2.75, abs=1e-12)
    width = 4 * hoeffding_width(1000, 0.05)
    assert b1_low == pytest.approx(2.75 - width, abs=1e-12)
    assert b1_low < b1_hat


def test_counts_estimator_matches_simulated_table():
    rec = _record_from_protocol(1.0, 1.0, shots=512)
    table = rec.empirical_table()
    assert b1(table) == pytest.approx(3.0, abs=1e-12)


def test_hoeffding_width_values():
    assert hoeffding_width(1000, 0.05) == pytest.approx(
        math.sqrt(math.log(8 / 0.05) / 2000), abs=1e-15
    )
    assert hoeffding_width(4000, 0.05) == pytest.approx(
        hoeffding_width(1000, 0.05) / 2, abs=1e-15
    )
    with pytest.raises(DomainError):
        hoeffding_width(0, 0.05)
    with pytest.raises(DomainError):
        hoeffding_width(100, 1.5)


@pytest.mark.parametrize(
    "mutate,fragment",
    [
        (lambda d: d.pop("label"), "label"),
        (lambda d: d.update(label=7), "label"),
        (lambda d: d.update(claimed_initial_purity="high"), "claimed_initial_purity"),
        (lambda d: d.update(claimed_initial_purity=0.3), "claimed_initial_purity"),
        (lambda d: d.update(settings="nope"), "settings"),
        (lambda d: d["settings"].pop(), "absent"),
        (lambda d: d["settings"][0].update(x=2), "must be 0 or 1"),
        (lambda d: d["settings"][0]["counts"].pop("+-"), "'+-' missing"),
        (lambda d: d["settings"][0]["counts"].update({"++": -1}), "non-negative"),
        (lambda d: d["settings"][0]["counts"].update({"+0": 3}), "unexpected"),
        (lambda d: d["settings"][1].update(x=0, y=0), "appears twice"),
        (
            lambda d: d["settings"][0].update(
                counts={"++": 0, "+-": 0, "-+": 0, "--": 0}
            ),
            "total count 0",
        ),
    ],
)
def test_counts_validation_messages(mutate, fragment):
    data = _valid_dict()
    mutate(data)
    with pytest.raises(CountsFormatError, match=None) as exc:
        counts_record_from_dict(data)
    assert fragment in str(exc.value)


def test_ingest_reports_json_position(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"label": "x",\n  "settings": [}\n')
    with pytest.raises(CountsFormatError) as exc:
        ingest_counts(str(path))
    assert "line 2" in str(exc.value)


def test_certificate_fields_and_digest_stability():
    rec = _record_from_protocol(0.5, 1.0, shots=4000, claimed=0.625)
    cert = certify(rec, delta=0.05)
    assert cert.b1_hat == pytest.approx(2.75, abs=1e-12)
    assert cert.purity_point.purity_lower == pytest.approx(0.625, abs=1e-12)
    assert cert.concurrence_point.upper == pytest.approx(math.sqrt(0.75), abs=1e-12)
    assert cert.postmeas_point is not None
    assert cert.postmeas_point.purity_lower == pytest.approx(1.0, abs=1e-9)
    # the confidence-adjusted bounds are never stronger than the point ones
    assert cert.purity_conf.purity_lower <= cert.purity_point.purity_lower + 1e-12
    assert cert.concurrence_conf.upper >= cert.concurrence_point.upper - 1e-12
    assert certify(rec).input_digest == cert.input_digest
    assert len(cert.input_digest) == 64
    # stable serialization
    assert cert.to_json() == certify(rec).to_json()
    payload = json.loads(cert.to_json())
    assert payload["provenance"]["tool_version"] == cert.tool_version
    assert "statistical_layer" in payload["provenance"]


def test_certificate_without_claimed_purity_has_no_postmeas():
    rec = _record_from_protocol(0.5, 1.0, shots=1000)
    cert = certify(rec)
    assert cert.postmeas_point is None
    assert json.loads(cert.to_json())["postmeasurement_purity_bound"]["point"] is None


def test_certificate_rejects_confident_super_qubit_value():
    # all mass on the winning outcomes with huge counts: b1_low > 3
    block_pp = {"++": 10**9, "+-": 0, "-+": 0, "--": 0}
    block_pm = {"++": 0, "+-": 10**9, "-+": 0, "--": 0}
    rec = CountsRecord(
        label="cheat",
        claimed_initial_purity=None,
        counts={
            (0, 0): dict(block_pp),
            (1, 1): dict(block_pp),
            (0, 1): dict(block_pm),
            (1, 0): dict(block_pm),
        },
    )
    with pytest.raises(QubitAssumptionError):
        certify(rec, delta=0.05)


def test_certificate_clamps_statistically_compatible_excess():
    # same counts but small: the point estimate is 4, yet the confidence
    # interval still reaches below 3, so the point bounds are clamped
    block_pp = {"++": 10, "+-": 0, "-+": 0, "--": 0}
    block_pm = {"++": 0, "+-": 10, "-+": 0, "--": 0}
    rec = CountsRecord(
        label="small",
        claimed_initial_purity=None,
        counts={
            (0, 0): dict(block_pp),
            (1, 1): dict(block_pp),
            (0, 1): dict(block_pm),
            (1, 0): dict(block_pm),
        },
    )
    cert = certify(rec, delta=0.05)
    assert cert.b1_hat == pytest.approx(4.0, abs=1e-12)
    assert cert.purity_point.purity_lower == pytest.approx(1.0, abs=1e-12)


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------


def test_cli_simulate_then_certify_roundtrip(tmp_path, capsys):
    counts_path = tmp_path / "counts.json"
    cert_path = tmp_path / "cert.json"
    rc = main(
        [
            "simulate",
            "theorem2",
            "--p",
            "1.0",
            "--w",
            "1.0",
            "--shots",
            "20000",
            "--seed",
            "7",
            "--claim-purity",
            "-o",
            str(counts_path),
        ]
    )
    assert rc == 0
    rec = ingest_counts(str(counts_path))
    assert rec.claimed_initial_purity == pytest.approx(1.0, abs=1e-12)
    rc = main(["certify", str(counts_path), "-o", str(cert_path)])
    assert rc == 0
    cert = json.loads(cert_path.read_text())
    assert cert["b1_hat"] == pytest.approx(3.0, abs=0.02)
    assert cert["purity_bound"]["confidence_adjusted"]["purity_lower"] > 0.5


def test_cli_simulate_deterministic(tmp_path):
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    args = ["simulate", "theorem2", "--shots", "500", "--seed", "3", "-o"]
    assert main(args + [str(p1)]) == 0
    assert main(args + [str(p2)]) == 0
    assert p1.read_text() == p2.read_text()


def test_cli_certify_validation_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["certify", str(bad)]) == 2
    assert "error:" in capsys.readouterr().err
    assert main(["certify", str(tmp_path / "missing.json")]) == 2


def test_cli_certify_qubit_assumption_exit_code(tmp_path, capsys):
    data = _valid_dict(n=10**9)
    for entry in data["settings"]:
        if entry["x"] != entry["y"]:
            entry["counts"] = {"++": 0, "+-": 10**9, "-+": 0, "--": 0}
    path = tmp_path / "cheat.json"
    path.write_text(json.dumps(data))
    assert main(["certify", str(path)]) == 3
    assert "qubit" in capsys.readouterr().err


def test_cli_surface_csv(tmp_path):
    out = tmp_path / "surface.csv"
    assert main(["surface", "--p-steps", "3", "--w-steps", "3", "-o", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "p,w,b1_max"
    assert len(lines) == 10
    for line in lines[1:]:
        p, w, v = (float(tok) for tok in line.split(","))
        assert v == pytest.approx(b1_max_constrained(p, w), abs=1e-10)


def test_cli_bounds_b1(capsys):
    assert main(["bounds", "--b1", "2.75"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["purity_lower_bound"]["purity_lower"] == pytest.approx(0.625)
    assert out["concurrence_upper"]["upper"] == pytest.approx(math.sqrt(0.75))


def test_cli_bounds_pw(capsys):
    assert main(["bounds", "--p", "0.5", "--w", "1.0"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["b1_max_constrained"] == pytest.approx(2.75)
    assert out["b1_max_initial"] == pytest.approx(2.75)
    assert out["threshold_w"] == pytest.approx(1.0 / 7.0)


def test_cli_bounds_postmeasurement(capsys):
    assert main(["bounds", "--b1", "3.0", "--purity", "1.0"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["postmeasurement_purity_bound"]["purity_lower"] == pytest.approx(1.0)


def test_cli_bounds_requires_arguments(capsys):
    assert main(["bounds"]) == 2


def test_cli_bounds_super_qubit_exit_code(capsys):
    assert main(["bounds", "--b1", "3.5"]) == 3


def test_cli_verify_theorem2_point(capsys):
    rc = main(
        ["verify", "theorem2", "--p", "1.0", "--w", "1.0", "--restarts", "30", "--seed", "1"]
    )
    captured = capsys.readouterr()
    assert rc == 0
    rep = json.loads(captured.out.strip().splitlines()[-1])
    assert rep["strategy"] == "projective-pair"
    assert abs(rep["gap"]) <= 1e-6


def test_cli_verify_theorem2_deterministic_branch(capsys):
    rc = main(
        ["verify", "theorem2", "--p", "0.0", "--w", "0.1", "--restarts", "30", "--seed", "1"]
    )
    captured = capsys.readouterr()
    assert rc == 0
    rep = json.loads(captured.out.strip().splitlines()[-1])
    assert rep["strategy"] == "deterministic"
    assert rep["best_value"] == pytest.approx(2.0, abs=1e-6)


def test_cli_verify_qudit_d4(capsys):
    rc = main(["verify", "qudit", "--d", "4", "--restarts", "40", "--seed", "1"])
    captured = capsys.readouterr()
    assert rc == 0
    rep = json.loads(captured.out.strip().splitlines()[-1])
    assert rep["best_value"] == pytest.approx(3.0, abs=1e-5)


def test_cli_verify_qudit_d3_reports_gap(capsys):
    # the analytic ceiling is not attainable in dimension 3, so the sweep
    # flags a verification gap
    rc = main(["verify", "qudit", "--d", "3", "--restarts", "40", "--seed", "1"])
    captured = capsys.readouterr()
    assert rc == 4
    assert "exceeds tolerance" in captured.err


def test_cli_simulate_validation(tmp_path, capsys):
    out = tmp_path / "c.json"
    assert main(["simulate", "theorem2", "--shots", "0", "-o", str(out)]) == 2
    assert main(["simulate", "theorem2", "--p", "1.5", "-o", str(out)]) == 2
    assert main(["simulate", "quditmm", "--d", "3", "-o", str(out)]) == 2


def test_cli_simulated_purity_claim_matches_protocol(tmp_path):
    out = tmp_path / "c.json"
    assert (
        main(
            [
                "simulate",
                "theorem2",
                "--p",
                "0.6",
                "--shots",
                "100",
                "--seed",
                "0",
                "--claim-purity",
                "-o",
                str(out),
            ]
        )
        == 0
    )
    rec = ingest_counts(str(out))
    rho, _ = theorem2_protocol(0.6, 1.0)
    assert rec.claimed_initial_purity == pytest.approx(purity(rho), abs=1e-12)


def test_cli_seed_env_fallback(tmp_path, monkeypatch):
    monkeypatch.setenv("PURITY_WITNESS_SEED", "99")
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["simulate", "theorem2", "--shots", "200", "-o", str(p1)]) == 0
    assert main(["simulate", "theorem2", "--shots", "200", "-o", str(p2)]) == 0
    assert p1.read_text() == p2.read_text()
    monkeypatch.setenv("PURITY_WITNESS_SEED", "abc")
    assert main(["simulate", "theorem2", "--shots", "200", "-o", str(p1)]) == 2
