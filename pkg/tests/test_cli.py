"""Command-line interface: exit codes, artifacts, reports, corruption handling."""

import json

import numpy as np
import pytest

import subexp_wavelets as sw
from subexp_wavelets import cli


@pytest.fixture(scope="module")
def system_file(ws, tmp_path_factory):
    """Reference system serialized once for all CLI tests."""
    path = tmp_path_factory.mktemp("cli") / "system.json"
    with open(path, "w") as fh:
        json.dump(ws.to_json_dict(), fh, sort_keys=True)
    return str(path)


def _read_report(path):
    with open(path) as fh:
        doc = json.load(fh)
    assert set(doc) == {"metadata", "report"}
    return doc["report"]


class TestBuild:
    def test_build_writes_artifacts(self, tmp_path):
        out = tmp_path / "sys.json"
        code = cli.main(["build", "--out", str(out)])
        assert code == cli.EXIT_OK
        assert out.exists()
        assert (tmp_path / "sys.psi.csv").exists()
        assert (tmp_path / "sys.phi.csv").exists()
        summary = _read_report(tmp_path / "sys.certificates.json")
        assert all(summary["certificates"].values())

    def test_invalid_width_is_config_error(self, tmp_path):
        code = cli.main(["build", "--a", "1.2",
                         "--out", str(tmp_path / "bad.json")])
        assert code == cli.EXIT_CONFIG_ERROR


class TestVerify:
    def test_all_suites_pass(self, system_file, tmp_path):
        report = tmp_path / "verify.json"
        code = cli.main(["verify", "--system", system_file,
                         "--report", str(report)])
        assert code == cli.EXIT_OK
        doc = _read_report(report)
        assert all(suite["pass"] for suite in doc["suites"].values())

    def test_unknown_suite_is_config_error(self, system_file):
        code = cli.main(["verify", "--system", system_file,
                         "--suite", "frobnicate"])
        assert code == cli.EXIT_CONFIG_ERROR

    def test_corrupt_json_is_io_error(self, tmp_path):
        bad = tmp_path / "broken.json"
        bad.write_text("this is not a stored system")
        code = cli.main(["verify", "--system", str(bad)])
        assert code == cli.EXIT_IO_ERROR

    def test_missing_file_is_io_error(self, tmp_path):
        code = cli.main(["verify", "--system", str(tmp_path / "nope.json")])
        assert code == cli.EXIT_IO_ERROR

    def test_tampered_spectrum_fails_orthonormality(self, system_file, tmp_path):
        # zero the wavelet spectrum on [2 pi, 8 pi/3]: still a well-formed
        # file, but the translate energy sum drops below 1 and the suite
        # must catch it
        with open(system_file) as fh:
            doc = json.load(fh)
        grid = doc["psi_hat"]["grid"]
        xi = grid["origin"] + grid["spacing"] * np.arange(grid["count"])
        kill = (xi >= 2 * np.pi) & (xi <= 8 * np.pi / 3)
        for part in ("re", "im"):
            vals = np.asarray(doc["psi_hat"][part])
            vals[kill] = 0.0
            doc["psi_hat"][part] = vals.tolist()
        tampered = tmp_path / "tampered.json"
        with open(tampered, "w") as fh:
            json.dump(doc, fh)
        code = cli.main(["verify", "--system", str(tampered),
                         "--suite", "orthonormality"])
        assert code == cli.EXIT_CHECK_FAILURE


class TestDecay:
    def test_report_matches_library_fit(self, ws, system_file, tmp_path):
        report = tmp_path / "decay.json"
        code = cli.main(["decay", "--system", system_file,
                         "--report", str(report)])
        doc = _read_report(report)
        fit = doc["fit"]
        # same computation through the library entry points
        table = sw.decay_profile(ws, 40.0, 1281)
        want = sw.subexp_decay_fit(table[table[:, 0] >= 5.0], "free")
        assert abs(fit["exponent"] - want.exponent) < 1e-12
        assert abs(fit["rate_c"] - want.rate_c) < 1e-9
        in_band = 0.40 <= fit["exponent"] <= 0.60 and fit["r_squared"] > 0.9
        assert code == (cli.EXIT_OK if in_band else cli.EXIT_CHECK_FAILURE)

    def test_fixed_mode_passes(self, system_file, tmp_path):
        report = tmp_path / "decay_fixed.json"
        code = cli.main(["decay", "--system", system_file,
                         "--exponent", "fixed", "--report", str(report)])
        assert code == cli.EXIT_OK
        doc = _read_report(report)
        assert doc["fit"]["exponent"] == 0.5
        assert doc["fit"]["r_squared"] > 0.9


class TestProjectExpand:
    def test_project_monotone(self, system_file, tmp_path):
        report = tmp_path / "project.json"
        code = cli.main(["project", "--system", system_file,
                         "--levels", "0..2", "--window", "12",
                         "--report", str(report)])
        assert code == cli.EXIT_OK
        doc = _read_report(report)
        assert doc["monotone_trend"] and doc["seminorms_bounded_3x"]
        errs = [row["sup_error"] for row in doc["rows"]]
        assert errs[-1] < 1e-6

    def test_expand_with_parseval(self, system_file, tmp_path):
        report = tmp_path / "expand.json"
        out = tmp_path / "coeffs.csv"
        code = cli.main(["expand", "--system", system_file, "--parseval",
                         "--out", str(out), "--report", str(report)])
        assert code == cli.EXIT_OK
        doc = _read_report(report)
        assert doc["parseval"]["gap"] < 1e-5
        assert out.exists()
        assert (tmp_path / "coeffs.csv.header.json").exists()

    def test_parseval_command(self, system_file, tmp_path):
        report = tmp_path / "parseval.json"
        code = cli.main(["parseval", "--system", system_file,
                         "--window", "4,16", "--report", str(report)])
        doc = _read_report(report)
        assert code == (cli.EXIT_OK if doc["gap"] < 1e-5
                        else cli.EXIT_CHECK_FAILURE)


class TestReport:
    def test_deterministic_report_body(self, system_file, tmp_path):
        paths = [tmp_path / "r1.json", tmp_path / "r2.json"]
        for p in paths:
            assert cli.main(["report", "--system", system_file,
                             "--report", str(p)]) == cli.EXIT_OK
        r1, r2 = (_read_report(p) for p in paths)
        assert r1 == r2
        assert r1["certificates"]

    def test_unknown_config_key_rejected(self, system_file, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"bogus_option": 1}))
        code = cli.main(["report", "--system", system_file,
                         "--config", str(cfg)])
        assert code == cli.EXIT_CONFIG_ERROR
