"""CLI contract: commands, exit codes, deterministic reports."""

import json

import pytest

from arithchern.cli import (
    EXIT_INCONCLUSIVE,
    EXIT_INPUT,
    EXIT_MISMATCH,
    EXIT_OK,
    main,
    run,
)


def write_config(tmp_path, cfg):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    return str(path)


class TestDelta:
    def test_fermat_quotient_of_two(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {"command": "delta", "a": "2", "primes": [3]})
        assert main(["--config", cfg]) == EXIT_OK
        doc = json.loads(capsys.readouterr().out)
        assert doc["results"][0]["p_derivation"] == ["-2"]

    def test_cyclotomic_element(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {
            "command": "delta", "N0": 2, "N": 4, "a": ["1", "1"], "primes": [3],
        })
        assert main(["--config", cfg]) == EXIT_OK
        doc = json.loads(capsys.readouterr().out)
        assert doc["results"][0]["frobenius"] == ["1", "-1"]
        assert doc["results"][0]["p_derivation"] == ["1", "-1"]


class TestLift:
    def test_rank1_q2_not_global(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {
            "command": "lift",
            "form": {"kind": "rank1", "q": 2},
            "primes": [3], "K": 12, "D": 3,
        })
        assert main(["--config", cfg]) == EXIT_OK
        doc = json.loads(capsys.readouterr().out)
        item = doc["results"][0]
        assert item["global_along_identity"] is False
        assert item["constant_term"] == [["-2"]]
        assert item["residual_deficits"] == [0, 0, 0]

    def test_sp2_global(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {
            "command": "lift",
            "form": {"kind": "sp", "n": 2},
            "primes": [3], "K": 16, "D": 3,
        })
        assert main(["--config", cfg]) == EXIT_OK
        doc = json.loads(capsys.readouterr().out)
        item = doc["results"][0]
        assert item["global_along_identity"] is True
        assert item["lift"]["certificate"]["passed"] is True


class TestVerifyTheorems:
    def test_pass_cases(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {
            "command": "verify-theorems",
            "forms": [{"kind": "rank1", "q": 1}, {"kind": "sp", "n": 2}],
            "primes": [3, 5], "K": 12, "D": 3,
        })
        assert main(["--config", cfg]) == EXIT_OK
        doc = json.loads(capsys.readouterr().out)
        assert doc["status"] == "pass"

    def test_inconclusive_exit_code(self, tmp_path, capsys):
        # sp(4) curvature has no nonzero coefficient below degree 6
        cfg = write_config(tmp_path, {
            "command": "verify-theorems",
            "forms": [{"kind": "sp", "n": 4}],
            "primes": [3, 5], "K": 16, "D": 3,
        })
        assert main(["--config", cfg]) == EXIT_INCONCLUSIVE
        doc = json.loads(capsys.readouterr().out)
        assert doc["status"] == "inconclusive"


class TestCurvature:
    def test_sp2_report(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {
            "command": "curvature",
            "form": {"kind": "sp", "n": 2},
            "primes": [3, 5], "K": 12, "D": 3,
        })
        assert main(["--config", cfg]) == EXIT_OK
        doc = json.loads(capsys.readouterr().out)
        assert [r["primes"] for r in doc["results"]] == [[3, 5]]
        assert doc["results"][0]["is_zero"] is True


class TestClassical:
    def test_runs_and_passes(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {"command": "classical", "seed": 1, "trials": 2})
        assert main(["--config", cfg]) == EXIT_OK
        doc = json.loads(capsys.readouterr().out)
        assert doc["all_passed"] is True


class TestContract:
    def test_unknown_command(self, tmp_path):
        cfg = write_config(tmp_path, {"command": "bogus"})
        assert main(["--config", cfg]) == EXIT_INPUT

    def test_missing_config(self):
        assert main(["--config", "/nonexistent/cfg.json"]) == EXIT_INPUT

    def test_empty_primes_rejected(self, tmp_path):
        cfg = write_config(tmp_path, {
            "command": "lift", "form": {"kind": "sp", "n": 2}, "primes": [],
        })
        assert main(["--config", cfg]) == EXIT_INPUT

    def test_byte_determinism(self, tmp_path):
        cfg = write_config(tmp_path, {
            "command": "curvature",
            "form": {"kind": "sp", "n": 2},
            "primes": [3, 5], "K": 12, "D": 3,
        })
        out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
        assert main(["--config", cfg, "--output", str(out1)]) == EXIT_OK
        assert main(["--config", cfg, "--output", str(out2)]) == EXIT_OK
        assert out1.read_bytes() == out2.read_bytes()

    @pytest.mark.parametrize("fmt", ["json", "csv", "markdown"])
    def test_formats_render(self, tmp_path, fmt):
        cfg = write_config(tmp_path, {"command": "delta", "a": "2", "primes": [3, 5]})
        out = tmp_path / f"report.{fmt}"
        assert main(["--config", cfg, "--output", str(out), "--format", fmt]) == EXIT_OK
        assert out.read_text()

    def test_no_floats_in_reports(self, tmp_path):
        cfg = write_config(tmp_path, {
            "command": "curvature",
            "form": {"kind": "so", "n": 4},
            "primes": [3, 5], "K": 16, "D": 4,
        })
        report, status = run(json.loads(open(cfg).read()))

        def walk(node):
            assert not isinstance(node, float)
            if isinstance(node, dict):
                for v in node.values():
                    walk(v)
            elif isinstance(node, list):
                for v in node:
                    walk(v)

        walk(report)
