"""Command-line interface: golden outputs, exit codes, verify plumbing."""

from __future__ import annotations

import json

import pytest

from semiorbits import chebyshev, cyclotomic, parse_poly
from semiorbits.cli import OUT_DIR_ENV, main


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# -- golden outputs ------------------------------------------------------------


def test_order_golden(capsys):
    assert _run(capsys, "order", "7", "1", "3") == (0, "6\n", "")
    assert _run(capsys, "order", "7", "1", "1") == (0, "1\n", "")


def test_order_of_zero(capsys):
    code, out, err = _run(capsys, "order", "7", "1", "0")
    assert code == 3
    assert out == ""
    assert err.strip() == "zero has no multiplicative order"


def test_cyclotomic_golden(capsys):
    assert _run(capsys, "cyclotomic", "1") == (0, "X - 1\n", "")
    assert _run(capsys, "cyclotomic", "12") == (0, "X^4 - X^2 + 1\n", "")
    code, _, err = _run(capsys, "cyclotomic", "0")
    assert code == 3
    assert err != ""


def test_resultant_golden(capsys):
    assert _run(capsys, "resultant", "X - 1", "X + 1") == (0, "2\n", "")
    assert _run(capsys, "resultant", "X^2 + 1", "X^2 - 1") == (0, "4\n", "")


def test_resultant_parse_error(capsys):
    code, out, err = _run(capsys, "resultant", "X +", "X")
    assert code == 2
    assert "at position 3" in err


def test_orbit_golden(capsys):
    code, out, err = _run(capsys, "orbit", "7", "1", "X^2", "3")
    assert code == 0
    assert out == "T=3\n0 3\n1 2\n2 4\n"
    code, out, _ = _run(capsys, "orbit", "7", "1", "X^2", "1")
    assert code == 0
    assert out == "T=1\n0 1\n"


def test_orbit_json(capsys):
    code, out, _ = _run(capsys, "orbit", "7", "1", "--json", "X^2", "3")
    assert code == 0
    doc = json.loads(out)
    assert doc["start"] == 3
    assert doc["T"] == 3
    assert doc["truncated"] is False
    assert doc["levels"] == [
        {"element": 3, "level": 0},
        {"element": 2, "level": 1},
        {"element": 4, "level": 2},
    ]


def test_orbit_truncation_flag(capsys):
    code, out, _ = _run(capsys, "orbit", "5", "1", "--cap", "2", "X^2", "X^2 + 1", "0")
    assert code == 0
    assert out.splitlines()[0] == "T=2"
    assert "truncated" in out


def test_orbit_degenerate_generator(capsys):
    code, _, err = _run(capsys, "orbit", "5", "1", "5X^2 + X + 1", "0")
    assert code == 3
    assert "degenerate generator" in err


def test_orbit_needs_start(capsys):
    code, _, err = _run(capsys, "orbit", "7", "1", "X^2")
    assert code == 2
    assert "start point" in err


def test_btree_golden(capsys):
    assert _run(capsys, "btree", "2", "3") == (0, "7\n", "")


def test_gap_golden(capsys):
    code, out, _ = _run(capsys, "gap", "20", "0", "2", "4", "6", "8")
    assert code == 0
    assert out == "r=2 count=4\n"
    code, out, _ = _run(capsys, "gap", "--json", "20", "0", "2", "4", "6", "8")
    assert json.loads(out) == {"r": 2, "count": 4, "T": 5, "N": 20}


def test_gap_hypothesis_violated(capsys):
    code, _, err = _run(capsys, "gap", "8", "0", "2", "4", "6", "8")
    assert code == 3
    assert "T=5" in err


def test_special_golden(capsys):
    assert _run(capsys, "special", "X^2 - 2") == (0, "chebyshev_conjugate\n", "")
    assert _run(capsys, "special", "X^2 + 1") == (0, "non_special\n", "")


def test_special_json(capsys):
    code, out, _ = _run(capsys, "special", "--json", "X^2 - 2")
    doc = json.loads(out)
    assert doc["kind"] == "chebyshev_conjugate"
    assert doc["normal_form"] == "X^2 - 2"
    assert doc["witness"] == ["1", "0"]
    code, out, _ = _run(capsys, "special", "--json", "X^2 + 1")
    assert json.loads(out) == {"kind": "non_special"}


def test_gamma_golden(capsys):
    assert _run(capsys, "gamma", "7", "1", "3") == (0, "1 2 4 6\n", "")
    code, out, _ = _run(capsys, "gamma", "--json", "7", "1", "3")
    assert json.loads(out) == [1, 2, 4, 6]


def test_round_trip_printed_polynomials(capsys):
    for n in (1, 2, 12, 30, 105):
        _, out, _ = _run(capsys, "cyclotomic", str(n))
        assert parse_poly(out.strip()) == cyclotomic(n)
    _, out, _ = _run(capsys, "special", "--json", "9X^3 + 9X^2 - 1")
    assert parse_poly(json.loads(out)["normal_form"]) == chebyshev(3)


def test_usage_errors_exit_2(capsys):
    assert main(["order", "7"]) == 2
    assert main(["nonsense"]) == 2
    capsys.readouterr()


# -- verify plumbing -----------------------------------------------------------


THM44I_CFG = {
    "generators": ["X^2 + 1"],
    "primes": [11],
    "starts": [3],
    "t": 2,
    "N": 6,
}


def test_verify_unknown_id(capsys):
    code, _, err = _run(capsys, "verify", "thm99")
    assert code == 2
    assert "valid ids" in err
    assert "thm44i" in err and "prop21" in err


def test_verify_config_file(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(THM44I_CFG))
    out_path = tmp_path / "r.csv"
    code, out, err = _run(
        capsys, "verify", "thm44i", str(cfg), "--out", str(out_path)
    )
    assert code == 0, err
    assert "experiment=thm44i" in out
    assert "out=%s" % out_path in out
    lines = out_path.read_text().splitlines()
    assert lines[0] == "p,s,w,t,N,M,bound,ratio,word"
    assert lines[1].startswith("11,1,3,2,6,1,")
    assert lines[1].endswith("1-1-1-1-1-1")


def test_verify_flags_override_config(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(THM44I_CFG))
    out_path = tmp_path / "r.json"
    code, _, _ = _run(
        capsys, "verify", "thm44i", str(cfg), "--t", "3", "--out", str(out_path)
    )
    assert code == 0
    doc = json.loads(out_path.read_text())
    assert doc["config"]["t"] == 3
    assert doc["rows"][0][3] == 3  # t column reflects the override
    assert doc["header"]["created"]


def test_verify_flags_only(tmp_path, capsys):
    out_path = tmp_path / "p.csv"
    code, out, err = _run(
        capsys,
        "verify",
        "prop21",
        "--generators",
        "2X^2 + 1",
        "--n-max",
        "2",
        "--trials",
        "5",
        "--out",
        str(out_path),
    )
    assert code == 0, err
    assert out_path.read_text().splitlines()[0] == "trial,n,word,degree,height,bound,ratio"


def test_verify_out_dir_env(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(THM44I_CFG))
    monkeypatch.setenv(OUT_DIR_ENV, str(tmp_path))
    code, out, _ = _run(capsys, "verify", "thm44i", str(cfg))
    assert code == 0
    assert (tmp_path / "thm44i.csv").exists()


def test_verify_json_summary(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(THM44I_CFG))
    out_path = tmp_path / "r.csv"
    code, out, _ = _run(
        capsys, "verify", "thm44i", str(cfg), "--json", "--out", str(out_path)
    )
    doc = json.loads(out)
    assert doc["out"] == str(out_path)
    assert doc["summary"]["rows"] == 1


def test_verify_guard_violation_exit_4(tmp_path, capsys):
    code, _, err = _run(
        capsys,
        "verify",
        "prop21",
        "--generators",
        "X^3",
        "--n-max",
        "6",
        "--trials",
        "1",
        "--out",
        str(tmp_path / "x.csv"),
    )
    assert code == 4
    assert "guard" in err


def test_verify_special_precondition_exit_3(tmp_path, capsys):
    argv = [
        "verify",
        "thm44i",
        "--generators",
        "X^2",
        "--primes",
        "7",
        "--t",
        "2",
        "--N",
        "3",
        "--out",
        str(tmp_path / "x.csv"),
    ]
    code, _, err = _run(capsys, *argv)
    assert code == 3
    assert "allow_special" in err
    code, _, err = _run(capsys, *(argv + ["--allow-special"]))
    assert code == 0, err


def test_verify_bad_config_json(tmp_path, capsys):
    cfg = tmp_path / "broken.json"
    cfg.write_text("{oops")
    code, _, err = _run(capsys, "verify", "thm44i", str(cfg))
    assert code == 2
    assert "bad JSON" in err


def test_verify_missing_config_file(tmp_path, capsys):
    code, _, err = _run(capsys, "verify", "thm44i", str(tmp_path / "nope.json"))
    assert code == 2


def test_verify_unknown_config_field_exit(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(dict(THM44I_CFG, wrong_key=1)))
    code, _, err = _run(capsys, "verify", "thm44i", str(cfg))
    assert code == 4
    assert "wrong_key" in err


def test_console_script_installed():
    import shutil
    import subprocess

    exe = shutil.which("semiorbits")
    assert exe, "console script not on PATH"
    proc = subprocess.run([exe, "btree", "2", "3"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout == "7\n"
