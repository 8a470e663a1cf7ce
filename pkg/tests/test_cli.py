import json
import subprocess
import sys

import pytest

from bdlab import cli
from bdlab.report import Report


def run_cli(capsys, argv):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


GAMMA_INPUT = {
    "size": 1,
    "entries": [[{
        "n": 1,
        "algebra": {"kind": "circle", "angle": {"q": "0", "r": "1"}},
        "coeffs": {"u:1": {"z:0": [{"coeff": "1", "root": "0", "theta": "0"}]}},
    }]],
}


def feed_stdin(monkeypatch, payload):
    import io

    monkeypatch.setattr(sys, "stdin", io.StringIO(json.dumps(payload)))


class TestVerifyCommand:
    def test_passing_suite_exits_zero(self, capsys):
        code, out, err = run_cli(capsys, ["verify", "trace-compat", "--sizes", "1,2", "--count", "10"])
        assert code == 0
        data = json.loads(out)
        assert data["suite"] == "trace-compat" and data["failures"] == []
        assert "cases" in data and "s" in err  # wall time on stderr only

    def test_zero_count_trivially_passes(self, capsys):
        code, out, _ = run_cli(capsys, ["verify", "gamma-hom", "--sizes", "1,3", "--count", "0"])
        assert code == 0
        assert json.loads(out)["cases"] == 1  # only the unital check

    def test_unknown_suite_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            cli.main(["verify", "does-not-exist"])
        assert exc.value.code == 2

    def test_failures_exit_one(self, capsys, monkeypatch):
        broken = Report("fake")
        broken.record(0, False, lhs=1, rhs=2)
        monkeypatch.setattr(cli, "_run_suite", lambda args: broken)
        code, out, _ = run_cli(capsys, ["verify", "gamma-hom"])
        assert code == 1
        assert json.loads(out)["failures"][0]["case"] == 0

    def test_cyclic_algebra_suites(self, capsys):
        code, out, _ = run_cli(capsys, [
            "verify", "rho-hom", "--sizes", "1,3", "--algebra", "cyclic", "--modulus", "4",
            "--count", "5", "--seed", "3",
        ])
        assert code == 0 and json.loads(out)["failures"] == []

    def test_report_written_to_out_file(self, capsys, tmp_path):
        path = tmp_path / "report.json"
        code, out, _ = run_cli(capsys, [
            "verify", "flip", "--sizes", "1,2,6", "--out", str(path)])
        assert code == 0
        assert path.read_text() == out


class TestApplyCommand:
    def test_gamma_example(self, capsys, monkeypatch):
        feed_stdin(monkeypatch, GAMMA_INPUT)
        code, out, _ = run_cli(capsys, ["apply", "--map", "gamma", "--from", "1", "--to", "2"])
        assert code == 0
        data = json.loads(out)
        assert data["size"] == 2
        # u e_00 -> u_2 e_10 + e_01
        assert data["entries"][1][0]["coeffs"] == {"u:1": {"z:0": [{"coeff": "1", "root": "0", "theta": "0"}]}}
        assert data["entries"][0][1]["coeffs"] == {"u:0": {"z:0": [{"coeff": "1", "root": "0", "theta": "0"}]}}

    def test_gamma_identity_echoes(self, capsys, monkeypatch):
        feed_stdin(monkeypatch, GAMMA_INPUT)
        code, out, _ = run_cli(capsys, ["apply", "--map", "gamma", "--from", "1", "--to", "1"])
        assert code == 0
        from bdlab.crossed import MatrixElement

        assert MatrixElement.from_json(json.loads(out)) == MatrixElement.from_json(GAMMA_INPUT)

    def test_round_trip_parses_to_equal_element(self, capsys, monkeypatch):
        feed_stdin(monkeypatch, GAMMA_INPUT)
        code, out, _ = run_cli(capsys, ["apply", "--map", "gamma", "--from", "1", "--to", "2"])
        from bdlab.crossed import MatrixElement
        from bdlab.limits import gamma

        reparsed = MatrixElement.from_json(json.loads(out))
        assert reparsed == gamma(1, 2, MatrixElement.from_json(GAMMA_INPUT))

    def test_rho_example(self, capsys, monkeypatch):
        e01 = {
            "size": 2,
            "entries": [
                [
                    {"n": 2, "algebra": {"kind": "circle", "angle": {"q": "0", "r": "1"}}, "coeffs": {}},
                    {"n": 2, "algebra": {"kind": "circle", "angle": {"q": "0", "r": "1"}},
                     "coeffs": {"u:0": {"z:0": [{"coeff": "1", "root": "0", "theta": "0"}]}}},
                ],
                [
                    {"n": 2, "algebra": {"kind": "circle", "angle": {"q": "0", "r": "1"}}, "coeffs": {}},
                    {"n": 2, "algebra": {"kind": "circle", "angle": {"q": "0", "r": "1"}}, "coeffs": {}},
                ],
            ],
        }
        feed_stdin(monkeypatch, e01)
        code, out, _ = run_cli(capsys, ["apply", "--map", "rho", "--stage", "2", "--sizes", "1,2,6"])
        assert code == 0
        data = json.loads(out)
        # delta_0 U^1: unit value at index 0 only, exponent 1
        assert list(data["coeffs"]) == ["U:1"]
        values = data["coeffs"]["U:1"]["values"]
        assert values[0] == {"z:0": [{"coeff": "1", "root": "0", "theta": "0"}]} and values[1] == {}

    def test_stage_mismatch_is_usage_error(self, capsys, monkeypatch):
        feed_stdin(monkeypatch, GAMMA_INPUT)
        code, _, err = run_cli(capsys, ["apply", "--map", "gamma", "--from", "2", "--to", "4"])
        assert code == 2 and "size" in err

    def test_bad_json_is_usage_error(self, capsys, monkeypatch):
        import io

        monkeypatch.setattr(sys, "stdin", io.StringIO("{not json"))
        code, _, _ = run_cli(capsys, ["apply", "--map", "gamma", "--from", "1", "--to", "2"])
        assert code == 2

    def test_degree_cap_is_budget_exit(self, capsys, monkeypatch):
        big = {
            "size": 1,
            "entries": [[{
                "n": 1,
                "algebra": {"kind": "circle", "angle": {"q": "0", "r": "1"}},
                "coeffs": {"u:130": {"z:0": [{"coeff": "1", "root": "0", "theta": "0"}]}},
            }]],
        }
        feed_stdin(monkeypatch, big)
        code, _, err = run_cli(capsys, ["apply", "--map", "gamma", "--from", "1", "--to", "2"])
        assert code == 3 and "budget" in err.lower()


class TestTraceCommand:
    def _matrix(self, n, entries):
        tag = {"kind": "circle", "angle": {"q": "0", "r": "1"}}
        rows = [[{"n": n, "algebra": tag, "coeffs": entries.get((i, j), {})} for j in range(n)] for i in range(n)]
        return {"size": n, "entries": rows}

    UNIT_COEFF = {"u:0": {"z:0": [{"coeff": "1", "root": "0", "theta": "0"}]}}

    def test_identity_trace(self, capsys, monkeypatch):
        feed_stdin(monkeypatch, self._matrix(3, {(i, i): self.UNIT_COEFF for i in range(3)}))
        code, out, _ = run_cli(capsys, ["trace"])
        assert code == 0 and json.loads(out) == [{"coeff": "1", "root": "0", "theta": "0"}]

    def test_u_corner_trace_zero(self, capsys, monkeypatch):
        u_coeff = {"u:1": {"z:0": [{"coeff": "1", "root": "0", "theta": "0"}]}}
        feed_stdin(monkeypatch, self._matrix(2, {(0, 0): u_coeff}))
        code, out, _ = run_cli(capsys, ["trace"])
        assert code == 0 and json.loads(out) == []

    def test_corner_unit_quarter(self, capsys, monkeypatch):
        feed_stdin(monkeypatch, self._matrix(4, {(0, 0): self.UNIT_COEFF}))
        code, out, _ = run_cli(capsys, ["trace"])
        assert code == 0 and json.loads(out) == [{"coeff": "1/4", "root": "0", "theta": "0"}]


class TestClassifyCommand:
    CASES = [
        (["--theta1", "theta", "--delta1", "2^inf", "--theta2", "theta+1/4", "--delta2", "2^inf"], "isomorphic"),
        (["--theta1", "theta", "--delta1", "2^inf", "--theta2=-theta+1/8", "--delta2", "2^inf"], "isomorphic"),
        (["--theta1", "theta", "--delta1", "2^inf", "--theta2", "2*theta", "--delta2", "2^inf"], "not-isomorphic"),
        (["--theta1", "theta", "--delta1", "2^inf", "--theta2", "theta", "--delta2", "3^inf"], "not-isomorphic"),
        (["--theta1", "theta", "--delta1", "2^inf", "--theta2", "theta", "--delta2", "2^inf",
          "--amplify1", "2"], "not-isomorphic"),
    ]

    @pytest.mark.parametrize("argv,expected", CASES)
    def test_known_answers(self, capsys, argv, expected):
        code, out, _ = run_cli(capsys, ["classify", *argv])
        assert code == 0
        assert json.loads(out)["answer"] == expected

    def test_reflexive(self, capsys):
        code, out, _ = run_cli(capsys, ["classify", "--theta1", "theta", "--delta1", "2^inf",
                                        "--theta2", "theta", "--delta2", "2^inf"])
        assert code == 0 and json.loads(out)["answer"] == "isomorphic"


class TestKTheoryCommand:
    def test_presentation_and_normalization(self, capsys):
        code, out, _ = run_cli(capsys, ["ktheory", "--sizes", "1,2,4", "--tail", "2^inf",
                                        "--normalize", "3:1,5"])
        assert code == 0
        data = json.loads(out)
        assert data["delta"] == {"factors": {"2": "inf"}, "finiteEvidence": False}
        assert data["normalized"]["class"] == {"a": "1/4", "b": 5}

    def test_tau_enclosure(self, capsys):
        code, out, _ = run_cli(capsys, ["ktheory", "--sizes", "1,2", "--tau", "1/2,-1",
                                        "--theta-cf", "0,2,...", "--precision", "1/10000"])
        assert code == 0
        data = json.loads(out)["tau"]
        assert data["positive"] is True

    def test_budget_env_override(self, capsys, monkeypatch):
        monkeypatch.setenv("BD_LAB_BUDGET", "1")
        code, _, err = run_cli(capsys, ["ktheory", "--sizes", "1,2", "--tau", "1/2,-1",
                                        "--theta-cf", "0,2,...", "--precision", "1/100000000"])
        assert code == 3 and "budget" in err.lower()


class TestDeterminism:
    def test_in_process_reports_byte_identical(self, capsys):
        argv = ["verify", "gamma-hom", "--sizes", "1,2", "--count", "15", "--seed", "99"]
        _, out1, _ = run_cli(capsys, argv)
        _, out2, _ = run_cli(capsys, argv)
        assert out1 == out2

    def test_console_entry_byte_identical(self):
        argv = [sys.executable, "-m", "bdlab.cli", "verify", "rg", "--sizes", "1,2,6",
                "--count", "5", "--seed", "4"]
        first = subprocess.run(argv, capture_output=True, check=True)
        second = subprocess.run(argv, capture_output=True, check=True)
        assert first.stdout == second.stdout
        assert first.stdout.endswith(b"\n")
