import json

import pytest

from detproc.cli import main
from detproc.process import counterexample_frame


@pytest.fixture
def frame_path(tmp_path):
    path = tmp_path / "example1.json"
    path.write_text(counterexample_frame().to_json())
    return str(path)


class TestProb:
    def test_include_with_blocks(self, frame_path, capsys):
        code = main(["prob", "--frame", frame_path, "--include", "3",
                     "--not-superset", "1", "--not-superset", "2"])
        out = capsys.readouterr().out
        assert code == 0
        assert out.splitlines()[0] == "P(event) = 0.25"

    def test_empty_event(self, frame_path, capsys):
        code = main(["prob", "--frame", frame_path])
        assert code == 0
        assert capsys.readouterr().out.splitlines()[0] == "P(event) = 1"

    def test_overlap_is_usage_error(self, frame_path, capsys):
        code = main(["prob", "--frame", frame_path, "--include", "1",
                     "--not-superset", "1,2"])
        assert code == 2
        assert "overlap" in capsys.readouterr().err

    def test_json_format(self, frame_path, capsys):
        code = main(["prob", "--frame", frame_path, "--include", "3",
                     "--not-superset", "1,2", "--format", "json"])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["probability"] == pytest.approx(0.5)
        assert payload["oracle_delta"] < 1e-12

    def test_missing_frame(self, capsys):
        assert main(["prob", "--frame", "/nonexistent.json"]) == 2


class TestSample:
    def test_deterministic(self, frame_path, capsys):
        main(["sample", "--frame", frame_path, "--seed", "4", "--count", "6"])
        first = capsys.readouterr().out
        main(["sample", "--frame", frame_path, "--seed", "4", "--count", "6"])
        assert capsys.readouterr().out == first


class TestCs:
    def test_orthogonal_pair(self, frame_path, capsys):
        code = main(["cs", "--frame", frame_path, "--set-a", "1", "--set-b", "2"])
        out = capsys.readouterr().out
        assert code == 0
        assert "angles (deg): 90" in out
        assert "case tag: EQUAL_FULL" in out

    def test_degenerate_pair(self, frame_path, capsys):
        # columns 1 and 3 are proportional: kappa of {1,3} is degenerate
        code = main(["cs", "--frame", frame_path, "--set-a", "1,3", "--set-b", "2"])
        assert code == 2


class TestCounterexample:
    def test_certifies(self, capsys):
        code = main(["counterexample"])
        out = capsys.readouterr().out
        assert code == 0
        assert "kappa = 0.75" in out
        assert out.count("0.333333333333") == 3
        assert "not determinantal" in out
        assert "k=3 gives 0, k=4 gives 1" in out

    def test_repeatable(self, capsys):
        main(["counterexample"])
        first = capsys.readouterr().out
        main(["counterexample"])
        assert capsys.readouterr().out == first


class TestVerify:
    def test_unknown_identity(self, capsys):
        assert main(["verify", "nosuch"]) == 2

    def test_appendix_instance(self, capsys):
        angle = "0.7853981633974483"
        code = main(["verify", "appendix-M", "--k", "3",
                     "--angles", ",".join([angle] * 3)])
        out = capsys.readouterr().out
        assert code == 0
        assert "det = 0.109375" in out

    def test_appendix_k_mismatch(self, capsys):
        assert main(["verify", "appendix-M", "--k", "2", "--angles", "0.3,0.4,0.5"]) == 2

    def test_campaign_with_report(self, tmp_path, capsys):
        out_path = tmp_path / "report.json"
        code = main(["verify", "theorem1", "--campaign", "seed=7,n=24",
                     "--out", str(out_path)])
        assert code == 0
        payload = json.loads(out_path.read_text())
        assert payload["results"]["theorem1"]["fail"] == 0
        assert payload["campaign"]["seed"] == 7

    def test_campaign_bad_config(self, capsys):
        assert main(["verify", "theorem1", "--campaign", "seed=7,bogus=3"]) == 2

    def test_frame_instance(self, frame_path, capsys):
        code = main(["verify", "remark1", "--frame", frame_path,
                     "--set-a", "1,2", "--x", "3", "--x2", "4"])
        assert code == 0
        assert "remark1: pass" in capsys.readouterr().out

    def test_frame_instance_rejects_degenerate(self, frame_path, capsys):
        code = main(["verify", "n1-identity", "--frame", frame_path,
                     "--set-a", "1,3", "--x", "2", "--x2", "4"])
        assert code == 2

    def test_plucker_instance(self, capsys):
        code = main(["verify", "plucker", "--xs", "1,2,3,4", "--y", "5,6,7,8"])
        assert code == 0


class TestScan:
    def test_runs_and_reports(self, capsys):
        code = main(["scan", "--seed", "3", "--n-instances", "12"])
        out = capsys.readouterr().out
        assert code == 0
        assert "findings only" in out


def test_help_exits_zero(capsys):
    assert main(["--help"]) == 0
    assert main([]) == 2
