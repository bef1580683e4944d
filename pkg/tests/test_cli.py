import json
import subprocess
import sys

import pytest

from arborcert import cli
from conftest import run_cli


def run(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr().out
    return code, out


def result(out):
    doc = json.loads(out)
    assert doc["schema"] == "1"
    return doc["result"]


def test_orbit(capsys):
    code, out = run(["orbit", "--map", "z^2-2", "--point", "0"], capsys)
    r = result(out)
    assert code == 0 and r["orbit"]["tail"] == 2 and r["orbit"]["cycle"] == 1
    code, out = run(["orbit", "--map", "z^2+1", "--point", "0", "--max-steps", "10"], capsys)
    assert result(out)["verdict"] == "escaping"


@pytest.mark.parametrize("args", [
    ["orbit", "--map", "z"],
    ["orbit", "--map", "z^2+"],
    ["family", "--b", "1"],
    ["certify", "quad-poly", "--map", "z^2-2"] + ["--levels", "0"],
    ["certify", "quad-ratmap", "--map", "z^2+1"],
    ["disc", "--map", "(z^2+1)/z"],
    ["nonsense"],
])
def test_input_errors_exit_2(args, capsys):
    assert cli.main(args) == 2


def test_cap_exit_3(capsys):
    assert cli.main(["family", "--b", "2", "--levels", "50"]) == 3
    assert cli.main(["disc", "--map", "z^2+1", "--iterate", "9", "--oracle"]) == 3


def test_expect(capsys):
    assert cli.main(["pcf", "--map", "z^2-2", "--expect", "PCF"]) == 0
    assert cli.main(["pcf", "--map", "z^2+1", "--expect", "PCF"]) == 1


def test_certify_hypothesis_failure_is_diagnosed(capsys):
    # infinity is a critical point, so the rational-map criterion does not apply
    assert cli.main(["certify", "quad-ratmap", "--map", "(z^2+3)/(z^2-2)", "--levels", "3"]) == 2
    assert "critical points" in capsys.readouterr().err


def test_certify_skips_search_after_proven_obstruction(capsys):
    code, out = run(["certify", "quad-poly", "--map", "z^2-2", "--levels", "3"], capsys)
    r = result(out)
    assert code == 0 and r["verdict"] == "InfiniteIndex(PCF)" and r["levels"] == []


def test_family_range(capsys):
    code, out = run(["family", "--b-range", "2..30", "--levels", "6"], capsys)
    r = result(out)
    assert code == 0 and r["verdict"] == "AllQualifyingIndexOne"
    assert [rec["b"] for rec in r["records"]] == sorted(rec["b"] for rec in r["records"])


def test_text_format(capsys):
    code, out = run(["stability", "--map", "z^2-z", "--levels", "4", "--format", "text"], capsys)
    assert out.splitlines()[0] == "stability: GrowingCounts"
    assert "counts: [2, 3, 4, 5]" in out


def test_sweep_is_deterministic(capsys):
    _, a = run(["sweep", "--seed", "7", "--count", "6"], capsys)
    _, b = run(["sweep", "--seed", "7", "--count", "6"], capsys)
    assert a == b and result(a)["mismatches"] == []


def test_big_integers_are_strings(capsys):
    _, out = run(["family", "--b", "2", "--levels", "8", "--sequences"], capsys)
    seq = result(out)["sequences"]
    assert all(isinstance(x["Pn_at_minus1"], str) for x in seq)


@pytest.mark.parametrize("args", [
    ["orbit", "--map", "z^2-2", "--point", "0"],
    ["pcf", "--map", "z^2-2"],
    ["stability", "--map", "z^2-z", "--levels", "4"],
    ["disc", "--map", "z^2-2", "--iterate", "1", "--t", "0", "--oracle"],
])
def test_goldens(args, tmp_path, capsys):
    code, produced, golden = run_cli(args, tmp_path)
    assert code == 0 and produced.read_text() == golden.read_text()


def test_module_entry_point_and_threads(tmp_path):
    env = {"ARBOR_CERT_THREADS": "2", "PATH": ""}
    proc = subprocess.run([sys.executable, "-m", "arborcert", "family", "--b-range", "2..8", "--levels", "4"],
                          capture_output=True, text=True, env=env)
    assert proc.returncode == 0
    serial = subprocess.run([sys.executable, "-m", "arborcert", "family", "--b-range", "2..8", "--levels", "4"],
                            capture_output=True, text=True)
    assert proc.stdout == serial.stdout
