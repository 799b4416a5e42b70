"""JSON/CSV artifacts and the command-line surface."""

import json
import subprocess
import sys

import numpy as np
import pytest

from gnlstab import serialize
from gnlstab.cli import main
from gnlstab.errors import FormatError
from gnlstab.evolve import EvolutionConfig, evolve_and_fit
from gnlstab.hill import SpectrumSummary, build_block, build_hill, check_propositions, spectrum
from gnlstab.scan import scan_kappa
from gnlstab.spectral import FULL, ParityBasis
from gnlstab.waves import WaveProfile

TWO_PI = 2.0 * np.pi


# ---------------------------------------------------------------------------
# JSON round trips


def test_wave_roundtrip_bit_identical(even_wave):
    again = serialize.loads(serialize.dumps(even_wave))
    assert isinstance(again, WaveProfile)
    assert again.params == even_wave.params
    assert np.array_equal(again.phi.values, even_wave.phi.values)
    assert again.phi.parity == even_wave.phi.parity
    assert again.phi.grid == even_wave.phi.grid
    assert again.ode_residual_norm == even_wave.ode_residual_norm
    assert again.functional_value == even_wave.functional_value
    assert again.constraint_value == even_wave.constraint_value
    assert again.detected_period == even_wave.detected_period


def test_spectrum_roundtrip(even_wave):
    summary = spectrum(build_hill(even_wave, "L1", ParityBasis(FULL, even_wave.phi.grid)))
    again = serialize.loads(serialize.dumps(summary))
    assert np.array_equal(again.eigenvalues, summary.eigenvalues)
    assert again.n_negative == summary.n_negative
    assert again.kernel_dimension == summary.kernel_dimension
    assert again.zero_tolerance == summary.zero_tolerance
    assert again.ambiguous == summary.ambiguous
    assert again.label == "L1" and again.wave_id == even_wave.wave_id


def test_propositions_roundtrip(even_wave):
    report = check_propositions(even_wave)
    again = serialize.loads(serialize.dumps(report))
    assert again.wave_id == report.wave_id
    assert again.parity == report.parity
    assert again.passed == report.passed
    assert again.notes == report.notes
    assert len(again.checks) == len(report.checks)
    for a, b in zip(again.checks, report.checks):
        assert (a.name, a.passed, a.expected, a.actual, a.margin) == (
            b.name,
            b.passed,
            b.expected,
            b.actual,
            b.margin,
        )


def test_hypotheses_roundtrip(even_hypotheses):
    again = serialize.loads(serialize.dumps(even_hypotheses))
    assert again.overall == even_hypotheses.overall
    for name in ("h0", "h1", "h2", "h3", "h4"):
        assert getattr(again, name) == getattr(even_hypotheses, name)


def test_scan_roundtrip(const_wave):
    scan = scan_kappa(const_wave, 0.3, 1.7, 8)
    again = serialize.loads(serialize.dumps(scan))
    assert again.wave_id == scan.wave_id
    assert again.sector == scan.sector
    assert again.verdict == scan.verdict
    assert np.array_equal(again.kappa_values, scan.kappa_values)
    assert again.band_edges == scan.band_edges
    assert len(again.records) == len(scan.records)
    for a, b in zip(again.records, scan.records):
        assert a.kappa == b.kappa
        assert np.array_equal(a.eigenvalues, b.eigenvalues)
        assert a.max_real_part == b.max_real_part
        assert a.num_unstable == b.num_unstable
        assert a.leading_lambda == b.leading_lambda
        if b.leading_v1 is None:
            assert a.leading_v1 is None
        else:
            assert np.array_equal(a.leading_v1.values, b.leading_v1.values)
            assert np.array_equal(a.leading_v2.values, b.leading_v2.values)


def test_growth_roundtrip(const_wave):
    gm = evolve_and_fit(const_wave, 1.0, EvolutionConfig(final_time=8.0))
    again = serialize.loads(serialize.dumps(gm))
    assert np.array_equal(again.times, gm.times)
    assert np.array_equal(again.norms, gm.norms)
    assert again.fitted_rate == gm.fitted_rate
    assert again.fit_residual == gm.fit_residual
    assert again.predicted_rate == gm.predicted_rate
    assert (again.kappa, again.sector, again.scheme, again.seed) == (
        gm.kappa,
        gm.sector,
        gm.scheme,
        gm.seed,
    )


# ---------------------------------------------------------------------------
# malformed input and refusal cases


def test_malformed_json_reports_byte_offset():
    with pytest.raises(FormatError, match="byte offset"):
        serialize.loads('{"schema_version": 1,')


def test_unsupported_schema_version(even_wave):
    text = serialize.dumps(even_wave).replace('"schema_version": 1', '"schema_version": 99')
    with pytest.raises(FormatError, match="schema_version"):
        serialize.loads(text)


def test_unknown_document_type():
    with pytest.raises(FormatError, match="unknown document type"):
        serialize.loads('{"schema_version": 1, "type": "mystery", "payload": {}}')


def test_top_level_must_be_object():
    with pytest.raises(FormatError):
        serialize.loads("[1, 2, 3]")


def test_nonfinite_floats_rejected(even_wave):
    summary = spectrum(build_hill(even_wave, "L2", ParityBasis(FULL, even_wave.phi.grid)))
    bad = SpectrumSummary(
        label=summary.label,
        wave_id=summary.wave_id,
        eigenvalues=np.array([0.0, np.nan]),
        n_negative=0,
        kernel_dimension=1,
        zero_tolerance=summary.zero_tolerance,
        ambiguous=False,
    )
    with pytest.raises(FormatError, match="non-finite"):
        serialize.dumps(bad)


# ---------------------------------------------------------------------------
# CSV exports


def test_spectrum_csv_shape(even_wave):
    summary = spectrum(build_block(even_wave, "Lcal"))
    text = serialize.spectrum_csv(summary)
    lines = text.splitlines()
    assert lines[0] == "index,eigenvalue"
    assert len(lines) == 1 + 256  # 2 * N eigenvalues for the block operator
    assert text.endswith("\n")


def test_scan_csv_header_and_stable_rows(const_wave):
    scan = scan_kappa(const_wave, 1.5, 2.5, 5)
    text = serialize.scan_csv(scan)
    lines = text.splitlines()
    assert lines[0] == "kappa,max_real_part,num_unstable_modes,leading_lambda_re,leading_lambda_im"
    assert len(lines) == 6
    for row in lines[1:]:
        cells = row.split(",")
        assert cells[2] == "0"
        # stable rows record a zero leading rate by convention
        assert float(cells[3]) == 0.0 and float(cells[4]) == 0.0


def test_growth_csv_header(const_wave):
    gm = evolve_and_fit(const_wave, 1.0, EvolutionConfig(final_time=8.0))
    text = serialize.growth_csv(gm)
    lines = text.splitlines()
    assert lines[0] == "t,norm"
    assert len(lines) == 1 + len(gm.times)


def test_scan_csv_bytes_deterministic(const_wave):
    a = serialize.scan_csv(scan_kappa(const_wave, 0.3, 1.7, 8))
    b = serialize.scan_csv(scan_kappa(const_wave, 0.3, 1.7, 8))
    assert a == b


# ---------------------------------------------------------------------------
# command-line surface (in-process)


def store_wave(wave, path) -> str:
    serialize.save(wave, path)
    return str(path)


def test_cli_solve_writes_wave(tmp_path, capsys):
    rc = main(
        [
            "solve",
            "--alpha",
            "2",
            "--omega",
            "1",
            "--tau",
            "12",
            "--modes",
            "64",
            "--out",
            str(tmp_path),
        ]
    )
    assert rc == 0
    wave = serialize.load(tmp_path / "wave.json")
    assert isinstance(wave, WaveProfile)
    assert wave.params.alpha == 2.0
    assert wave.phi.grid.size == 64
    assert "residual" in capsys.readouterr().out


def test_cli_solve_rejects_odd_cubic(tmp_path, capsys):
    rc = main(
        ["solve", "--alpha", "3", "--parity", "odd", "--tau", "5", "--out", str(tmp_path)]
    )
    assert rc == 1
    err = capsys.readouterr().err
    assert "odd parity requires even integer alpha" in err


def test_cli_solve_requires_tau(tmp_path, capsys):
    rc = main(["solve", "--alpha", "2", "--out", str(tmp_path)])
    assert rc == 1
    assert "--tau is required" in capsys.readouterr().err


def test_cli_spectrum_stored_constant(tmp_path, const_wave, capsys):
    wave_path = store_wave(const_wave, tmp_path / "cw.json")
    rc = main(["spectrum", "--wave", wave_path, "--out", str(tmp_path)])
    assert rc == 0
    l1 = serialize.load(tmp_path / "spectrum_L1.json")
    l2 = serialize.load(tmp_path / "spectrum_L2.json")
    assert l1.n_negative == 3 and l1.kernel_dimension == 0
    assert l2.n_negative == 0 and l2.kernel_dimension == 1
    assert (tmp_path / "spectrum_L1.csv").is_file()
    assert (tmp_path / "spectrum_L2.csv").is_file()
    out = capsys.readouterr().out
    assert "n_negative=3" in out and "kernel_dimension=1" in out


def test_cli_spectrum_csv_only(tmp_path, const_wave):
    wave_path = store_wave(const_wave, tmp_path / "cw.json")
    rc = main(
        ["spectrum", "--wave", wave_path, "--out", str(tmp_path / "csvonly"), "--format", "csv"]
    )
    assert rc == 0
    assert (tmp_path / "csvonly" / "spectrum_L1.csv").is_file()
    assert not (tmp_path / "csvonly" / "spectrum_L1.json").exists()


def test_cli_verify_even_wave(tmp_path, even_wave, capsys):
    wave_path = store_wave(even_wave, tmp_path / "wave.json")
    rc = main(["verify", "--wave", wave_path, "--out", str(tmp_path)])
    assert rc == 0
    assert (tmp_path / "propositions.json").is_file()
    assert (tmp_path / "hypotheses.json").is_file()
    assert "verification passed" in capsys.readouterr().out


def test_cli_verify_constant_fails_scientifically(tmp_path, const_wave, capsys):
    wave_path = store_wave(const_wave, tmp_path / "cw.json")
    rc = main(["verify", "--wave", wave_path, "--out", str(tmp_path)])
    assert rc == 2
    assert "verification FAILED" in capsys.readouterr().out


def test_cli_scan_stored_wave(tmp_path, even_wave):
    wave_path = store_wave(even_wave, tmp_path / "wave.json")
    rc = main(
        [
            "scan",
            "--wave",
            wave_path,
            "--kappa-min",
            "0.05",
            "--kappa-max",
            "1.8",
            "--kappa-steps",
            "12",
            "--out",
            str(tmp_path),
        ]
    )
    assert rc == 0
    scan = serialize.load(tmp_path / "scan.json")
    assert scan.verdict == "transversally unstable"
    assert (tmp_path / "scan.csv").read_text().startswith("kappa,")


def test_cli_dns_summary(tmp_path, even_wave, even_scan):
    wave_path = store_wave(even_wave, tmp_path / "wave.json")
    kappa = even_scan.most_unstable.kappa
    rc = main(
        ["dns", "--wave", wave_path, "--kappa", f"{kappa:.6f}", "--out", str(tmp_path)]
    )
    assert rc == 0
    summary = serialize.load(tmp_path / "dns_summary.json")
    assert set(summary) == {
        "kappa",
        "fitted_rate",
        "fit_residual",
        "scanner_lambda",
        "relative_gap",
    }
    assert summary["relative_gap"] <= 0.02
    assert (tmp_path / "growth.json").is_file()
    assert (tmp_path / "growth.csv").read_text().startswith("t,norm")


def test_cli_config_merge_and_flag_override(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(
        json.dumps({"alpha": 2.0, "omega": 1.0, "tau": 12.0, "modes": 128}),
        encoding="utf-8",
    )
    rc = main(
        ["solve", "--config", str(cfg), "--modes", "64", "--out", str(tmp_path)]
    )
    assert rc == 0
    wave = serialize.load(tmp_path / "wave.json")
    # explicit flag beats the config value
    assert wave.phi.grid.size == 64
    assert wave.params.tau == 12.0


def test_cli_config_missing(tmp_path, capsys):
    rc = main(
        ["solve", "--alpha", "2", "--tau", "1", "--config", str(tmp_path / "nope.json")]
    )
    assert rc == 1
    assert "config file not found" in capsys.readouterr().err


def test_cli_pipeline_report(tmp_path):
    rc = main(
        [
            "pipeline",
            "--alpha",
            "2",
            "--omega",
            "1",
            "--tau",
            "12",
            "--kappa-min",
            "0.05",
            "--kappa-max",
            "1.8",
            "--kappa-steps",
            "8",
            "--out",
            str(tmp_path),
        ]
    )
    assert rc == 0
    report = serialize.load(tmp_path / "pipeline_report.json")
    assert set(report) >= {
        "problem",
        "wave",
        "spectra",
        "propositions",
        "hypotheses",
        "scan",
        "convergence_certificate",
        "dns",
        "verdict",
        "overall_passed",
    }
    assert report["verdict"] == "transversally unstable"
    assert report["overall_passed"] is True
    cert = report["convergence_certificate"]
    assert cert["passed"] is True
    assert cert["max_delta"] <= cert["tolerance"] == 1e-9
    assert report["dns"]["relative_gap"] <= 0.02


def test_module_entry_point(tmp_path):
    out = subprocess.run(
        [
            sys.executable,
            "-m",
            "gnlstab.cli",
            "solve",
            "--alpha",
            "2",
            "--tau",
            "12",
            "--modes",
            "64",
            "--out",
            str(tmp_path),
        ],
        capture_output=True,
        text=True,
    )
    assert out.returncode == 0, out.stderr
    assert (tmp_path / "wave.json").is_file()
