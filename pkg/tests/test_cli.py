import os
import subprocess
import sys
from pathlib import Path

import pytest

from baerkit.cli import main

DATA = Path(__file__).resolve().parent.parent / "data"


def run_cli(argv, capsys):
    rc = main(argv)
    out = capsys.readouterr()
    return rc, out.out, out.err


class TestMultiplier:
    def test_klein(self, capsys):
        rc, out, _ = run_cli(
            ["multiplier", "--file", str(DATA / "klein.grp"), "--class-c", "1"],
            capsys,
        )
        assert rc == 0
        assert "invariants: free_rank=0 torsion=[2]" in out

    def test_free_abelian_needs_bound(self, capsys):
        rc, _, err = run_cli(
            ["multiplier", "--file", str(DATA / "zz.grp")], capsys
        )
        assert rc == 3
        assert "--class-bound" in err

    def test_free_abelian_with_bound(self, capsys):
        rc, out, _ = run_cli(
            [
                "multiplier", "--file", str(DATA / "zz.grp"),
                "--class-c", "1", "--class-bound", "1",
            ],
            capsys,
        )
        assert rc == 0
        assert "invariants: free_rank=1 torsion=[]" in out

    def test_cyclic_high_c(self, capsys):
        rc, out, _ = run_cli(
            ["multiplier", "--file", str(DATA / "z5.grp"), "--class-c", "3"],
            capsys,
        )
        assert rc == 0
        assert "invariants: free_rank=0 torsion=[]" in out

    def test_parse_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.grp"
        bad.write_text("group G\n  gen x\n  rel q\nend\n")
        rc, _, err = run_cli(["multiplier", "--file", str(bad)], capsys)
        assert rc == 2
        assert "line 3" in err

    def test_missing_file(self, capsys):
        rc, _, _ = run_cli(["multiplier", "--file", "/nonexistent.grp"], capsys)
        assert rc == 2

    def test_machine_format(self, capsys):
        rc, out, _ = run_cli(
            [
                "multiplier", "--file", str(DATA / "klein.grp"),
                "--format", "machine",
            ],
            capsys,
        )
        assert rc == 0
        lines = dict(
            line.split("=", 1) for line in out.strip().splitlines()
        )
        assert lines["free_rank"] == "0"
        assert lines["torsion"] == "2"
        assert lines["class_bound"] == "1"


class TestSemidirect:
    def test_build_only(self, capsys):
        rc, out, _ = run_cli(
            ["semidirect", "--file", str(DATA / "d8.grp")], capsys
        )
        assert rc == 0
        assert "a^-2 b^-1 a^-1 b a" in out

    def test_verify_d8(self, capsys):
        rc, out, _ = run_cli(
            [
                "semidirect", "--file", str(DATA / "d8.grp"),
                "--class-c", "1", "--verify",
            ],
            capsys,
        )
        assert rc == 0
        assert "verdict: PASS" in out
        assert "invariants group:      free_rank=0 torsion=[2]" in out
        assert "invariants acting:     free_rank=0 torsion=[]" in out
        assert "invariants complement: free_rank=0 torsion=[2]" in out

    def test_verify_infinite_with_bound(self, capsys):
        rc, out, _ = run_cli(
            [
                "semidirect", "--file", str(DATA / "zz_trivial.grp"),
                "--class-c", "2", "--verify", "--class-bound", "1",
            ],
            capsys,
        )
        assert rc == 0
        assert "verdict: PASS" in out

    def test_bad_action_exit_five(self, tmp_path, capsys):
        text = (DATA / "d8.grp").read_text().replace("a -> a^-1", "a -> a^2")
        bad = tmp_path / "bad_action.grp"
        bad.write_text(text)
        rc, _, err = run_cli(["semidirect", "--file", str(bad)], capsys)
        assert rc == 5
        assert "surjectivity" in err

    def test_machine_verify(self, capsys):
        rc, out, _ = run_cli(
            [
                "semidirect", "--file", str(DATA / "klein_trivial.grp"),
                "--class-c", "2", "--verify", "--format", "machine",
            ],
            capsys,
        )
        assert rc == 0
        assert "verdict=pass" in out
        assert "group_torsion=2,2" in out


class TestLyndon:
    def test_listing(self, capsys):
        rc, out, _ = run_cli(["lyndon", "--letters", "2", "--weight", "3"], capsys)
        assert rc == 0
        assert "witt=2" in out
        assert "aab" in out and "abb" in out
        assert "[a,[a,b]]" in out

    def test_degree_one(self, capsys):
        rc, out, _ = run_cli(["lyndon", "--letters", "2", "--weight", "1"], capsys)
        assert rc == 0
        assert "witt=2" in out

    def test_witt_count_three_letters(self, capsys):
        rc, out, _ = run_cli(["lyndon", "--letters", "3", "--weight", "3"], capsys)
        assert rc == 0
        assert "witt=8" in out

    def test_capacity_guard(self, capsys, monkeypatch):
        monkeypatch.setenv("BAERKIT_CAP_GUARD", "10")
        rc, _, err = run_cli(["lyndon", "--letters", "4", "--weight", "6"], capsys)
        assert rc == 4
        assert "budget" in err


class TestSelftestCommand:
    def test_machine_line_shape(self, capsys):
        rc, out, _ = run_cli(["selftest", "--format", "machine"], capsys)
        assert rc == 0
        lines = out.strip().splitlines()
        assert all(
            line.startswith("check=") and ("status=pass" in line or "status=fail" in line)
            for line in lines[:-1]
        )
        assert lines[-1].startswith("checks=")

    def test_injected_cap_guard_aborts(self, capsys, monkeypatch):
        monkeypatch.setenv("BAERKIT_CAP_GUARD", "1")
        rc, _, err = run_cli(["selftest"], capsys)
        assert rc == 4
        assert "capacity guard" in err


def test_console_script_runs():
    env = dict(os.environ)
    proc = subprocess.run(
        [sys.executable, "-m", "baerkit", "lyndon", "--letters", "2", "--weight", "2"],
        capture_output=True,
        text=True,
        env=env,
    )
    assert proc.returncode == 0
    assert "witt=1" in proc.stdout


def test_determinism_of_machine_reports(capsys):
    argv = [
        "semidirect", "--file", str(DATA / "d8.grp"),
        "--class-c", "1", "--verify", "--format", "machine",
    ]
    rc1, out1, _ = run_cli(argv, capsys)
    rc2, out2, _ = run_cli(argv, capsys)
    assert (rc1, out1) == (rc2, out2)
