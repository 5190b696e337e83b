import json
import re
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

from puritylab.cli import main
from puritylab.report import REPORT_SCHEMA

DATA = Path(__file__).resolve().parent.parent / "data"
NUMBER = re.compile(r"-?\d+(?:\.\d+)?(?:e[-+]?\d+)?")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def analyze_json(capsys, *argv):
    code, out, err = run(capsys, "analyze", "--format", "json", "--no-timing", *argv)
    assert code == 0, err
    return json.loads(out)


def test_rate_table1_row3(capsys):
    rep = analyze_json(capsys, "--state", "ghz(5) x ghz(4)", "--rate")
    assert rep["rate"]["e_total"] == {"num": 4, "den": 9, "value": 4 / 9}
    assert "mixed" not in rep


def test_product_state(capsys):
    rep = analyze_json(capsys, "--state", "|000>")
    assert rep["verdict"] == "SEPARABLE"
    assert rep["profile"]["gammas"] == [3, 3]


def test_mixed_fixture_file(capsys):
    rep = analyze_json(capsys, "--file", str(DATA / "mixed_example.json"), "--np")
    assert rep["mixed"]["n_p"] == 3
    assert rep["mixed"]["stage_gammas"] == [1, 1, 0]
    assert rep["input"]["kind"] == "mixed" and "rate" not in rep


def test_np_flag_forces_mixed_path(capsys):
    rep = analyze_json(capsys, "--state", "|010>", "--np")
    assert rep["input"]["kind"] == "mixed"
    assert rep["mixed"]["n_p"] == 3


def test_reports_match_schema(capsys):
    for argv in (["--state", "ghz(3) x bell"], ["--file", str(DATA / "mixed_example.json")],
                 ["--file", str(DATA / "maximally_mixed_pair.json"), "--profile"],
                 ["--state", "|0>"]):
        rep = analyze_json(capsys, *argv)
        jsonschema.validate(rep, REPORT_SCHEMA)
        assert json.loads(json.dumps(rep)) == rep


def test_text_numbers_appear_in_json(capsys):
    for argv in (["--state", "ghz(3) x bell"], ["--file", str(DATA / "mixed_example.json")],
                 ["--state", "3/5*|00> + 4/5*|11> x |0>"]):
        _, text, _ = run(capsys, "analyze", "--format", "text", *argv)
        _, body, _ = run(capsys, "analyze", "--format", "json", *argv)
        json_numbers = {float(x) for x in NUMBER.findall(body)}
        text_numbers = {float(x) for x in NUMBER.findall(text)}
        # timing values differ between the two runs
        text_numbers -= {float(x) for x in NUMBER.findall(text.split("timing (ms):")[-1])}
        assert text_numbers <= json_numbers, text_numbers - json_numbers


def test_text_shows_ceiling(capsys):
    _, text, _ = run(capsys, "analyze", "--format", "text", "--state", "ghz(3) x bell")
    assert "γ_2 = 1 / C(5,2) = 1 / 10" in text


def test_exit_by_verdict(capsys):
    assert run(capsys, "analyze", "--state", "|00>", "--exit-by-verdict")[0] == 0
    assert run(capsys, "analyze", "--state", "bell", "--exit-by-verdict")[0] == 3
    assert run(capsys, "analyze", "--file", str(DATA / "mixed_example.json"), "--exit-by-verdict")[0] == 3
    assert run(capsys, "analyze", "--file", str(DATA / "maximally_mixed_pair.json"),
               "--exit-by-verdict")[0] == 4
    assert run(capsys, "analyze", "--state", "bell")[0] == 0


def test_parse_error_exit_and_position(capsys):
    code, out, err = run(capsys, "analyze", "--state", "ghz(3) x fo")
    assert code == 1 and out == ""
    assert "column 10" in err and "^" in err


def test_cap_exit_code(capsys):
    code, _, err = run(capsys, "analyze", "--state", "ghz(13)")
    assert code == 2 and "cap" in err
    code, _, _ = run(capsys, "analyze", "--state", "ghz(13)", "--max-dim", "8192", "--format", "json")
    assert code == 0


def test_validation_failures(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"dims": [2], "matrix": [[[0.6, 0], [0, 0]], [[0, 0], [0.3, 0]]]}')
    code, _, err = run(capsys, "analyze", "--file", str(bad))
    assert code == 1 and "trace" in err
    assert run(capsys, "analyze", "--file", str(tmp_path / "missing.json"))[0] == 1
    assert run(capsys, "analyze", "--file", str(DATA / "mixed_example.json"), "--rate")[0] == 1


def test_expression_file_is_strict(capsys, tmp_path):
    f = tmp_path / "state.txt"
    f.write_text("|00> + |11>\n")
    code, _, err = run(capsys, "analyze", "--file", str(f))
    assert code == 1 and "norm" in err
    code, _, err = run(capsys, "analyze", "--file", str(f), "--normalize", "--format", "json")
    assert code == 0 and "warning" in err


def test_state_flag_is_lenient(capsys):
    code, out, err = run(capsys, "analyze", "--state", "|00> + |11>", "--format", "json")
    assert code == 0 and "warning: renormalizing" in err
    assert json.loads(out)["rate"]["e_total"]["num"] == 1


def test_hidden_oracle_subcommand(capsys):
    code, out, _ = run(capsys, "oracle", "--state", "bell")
    assert code == 0
    cuts = json.loads(out)["cuts"]
    assert [c["schmidt_rank"] for c in cuts] == [2, 2]
    code, out, _ = run(capsys, "oracle", "--file", str(DATA / "mixed_example.json"))
    checks = {tuple(c["cut"]): c["factor_check"] for c in json.loads(out)["cuts"]}
    assert checks[(0,)] and checks[(2, 3)] and not checks[(2,)]
    with pytest.raises(SystemExit):
        main(["--help"])
    assert "oracle" not in capsys.readouterr().out


def test_timing_present_by_default(capsys):
    code, out, _ = run(capsys, "analyze", "--state", "bell", "--format", "json")
    assert set(json.loads(out)["timing_ms"]) >= {"load", "separability", "factorization", "rate"}


def test_module_entry_point_pipes_json():
    proc = subprocess.run([sys.executable, "-m", "puritylab", "analyze", "--state", "ghz(3) x bell",
                           "--no-timing"], capture_output=True, text=True, check=True)
    rep = json.loads(proc.stdout)
    assert rep["schema"] == "purity-lab/1"
    assert [f["sites"] for f in rep["factorization"]["factors"]] == [[0, 1, 2], [3, 4]]
