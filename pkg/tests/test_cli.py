import csv
import json

import pytest

from treebsm.cli import main


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


class TestSweep:
    def test_loss_sweep_rows_and_lossfree_value(self, tmp_path):
        out = tmp_path / "sweep.csv"
        rc = main([
            "sweep", "--protocol", "static", "--b", "15,15,2",
            "--eta", "0.7:1.0:61", "--output", str(out),
        ])
        assert rc == 0
        rows = read_csv(out)
        assert len(rows) == 61
        assert float(rows[-1]["pr_complete"]) == pytest.approx(1 - 2.0**-15, abs=1e-12)
        manifest = json.loads((tmp_path / "sweep.csv.manifest.json").read_text())
        assert manifest["command"] == "sweep"
        assert manifest["params"]["b"] == "15,15,2"

    def test_dynamic_beats_pair_ceiling_at_high_eta(self, tmp_path):
        out = tmp_path / "dyn.csv"
        assert main([
            "sweep", "--protocol", "dynamic", "--b", "15,15,2",
            "--eta", "0.5:1.0:51", "--output", str(out),
        ]) == 0
        # The pair ceiling eta^2 reaches 1 at eta = 1 while any finite tree
        # saturates at 1 - 2^-b0, so the comparison excludes that endpoint.
        for row in read_csv(out):
            if 0.85 <= float(row["eta"]) < 0.9999:
                assert float(row["pr_complete"]) > float(row["eta_sq"])

    def test_error_sweep_hits_correction_milestone(self, tmp_path):
        out = tmp_path / "err.csv"
        assert main([
            "sweep", "--protocol", "static", "--b", "74,15",
            "--eps", "1e-6:1e-3", "--eta", "0.95", "--output", str(out),
        ]) == 0
        rows = read_csv(out)
        assert len(rows) == 25
        at_target = [r for r in rows if float(r["eps"]) == pytest.approx(1e-5, rel=1e-9)]
        assert at_target
        row = at_target[0]
        assert float(row["err_complete"]) < float(row["eps_bsm"])

    def test_rerun_reproduces_identical_file(self, tmp_path):
        out = tmp_path / "s.csv"
        args = ["sweep", "--protocol", "dynamic", "--b", "3,2",
                "--eta", "0.5:0.9:5", "--output", str(out)]
        main(args)
        first = out.read_bytes()
        main(args)
        assert out.read_bytes() == first

    def test_malformed_vector_is_usage_error(self, tmp_path):
        rc = main(["sweep", "--protocol", "static", "--b", "2,x",
                   "--output", str(tmp_path / "x.csv")])
        assert rc == 1

    def test_unwritable_output_is_io_error(self):
        rc = main(["sweep", "--protocol", "static", "--b", "2",
                   "--output", "/nonexistent-dir/x.csv"])
        assert rc == 1


class TestThreshold:
    def test_static_defaults(self, capsys):
        assert main(["threshold", "--protocol", "static"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert 0.806 <= report["eta_star"] <= 0.84
        assert report["bracket"][0] <= report["eta_star"] <= report["bracket"][1]

    def test_dynamic_defaults(self, capsys):
        assert main(["threshold", "--protocol", "dynamic"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert 0.50 <= report["eta_star"] <= 0.60

    def test_unreachable_target_exit_code(self):
        assert main(["threshold", "--protocol", "static", "--target", "1.0"]) == 2

    def test_explicit_family(self, capsys):
        assert main([
            "threshold", "--protocol", "static", "--target", "0.7",
            "--family", "2,2;4,2",
        ]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["family_size"] == 2


class TestValidate:
    def test_static_known_point_passes(self, capsys):
        rc = main(["validate", "--protocol", "static", "--b", "2", "--eta", "0.9",
                   "--n", "100000", "--seed", "5"])
        assert rc == 0
        assert "ok" in capsys.readouterr().out

    def test_dynamic_with_errors_passes(self):
        rc = main(["validate", "--protocol", "dynamic", "--b", "3,2", "--eta", "0.8",
                   "--eps", "1e-3", "--n", "100000", "--seed", "6"])
        assert rc == 0

    def test_loss_only_reports_sample_only(self, capsys):
        rc = main(["validate", "--protocol", "loss-only", "--b", "2,2", "--eta", "0.8",
                   "--n", "20000", "--seed", "8"])
        assert rc == 0
        assert "sampled only" in capsys.readouterr().out


class TestVerifyGeneration:
    def test_pass_and_report(self, capsys):
        assert main(["verify-generation", "--b", "2,2"]) == 0
        out = capsys.readouterr().out
        assert "PASS" in out and "instructions=27" in out

    def test_seeded_random_outcomes(self, capsys):
        assert main(["verify-generation", "--b", "3,2", "--seed", "4"]) == 0
        assert "PASS" in capsys.readouterr().out


class TestSearch:
    def test_dynamic_reference_point(self, tmp_path):
        out = tmp_path / "front.csv"
        rc = main([
            "search", "--protocol", "dynamic", "--eta", "0.95", "--eps", "1e-5",
            "--max-depth", "3", "--max-branch", "20", "--max-n", "700",
            "--output", str(out),
        ])
        assert rc == 0
        rows = read_csv(out)
        ec = [r for r in rows if r["error_correcting"] == "1"]
        assert ec and ec[0]["b"] == "15,15,2" and ec[0]["n"] == "691"

    def test_static_small_bound_has_no_error_correction(self, tmp_path):
        out = tmp_path / "front.csv"
        rc = main([
            "search", "--protocol", "static", "--eta", "0.95", "--eps", "1e-5",
            "--max-n", "100", "--output", str(out),
        ])
        assert rc == 0
        assert all(r["error_correcting"] == "0" for r in read_csv(out))
