import csv
import io
import json

import pytest
from click.testing import CliRunner

from veech_lagrange import errors
from veech_lagrange.cantor import read_hole_csv
from veech_lagrange.cli import main
from veech_lagrange.surface import builtin_torus, descriptor_to_dict

GOLDEN = ",".join(["b", "a_bar", "b_bar", "a"] * 15)


def run(*args):
    return CliRunner().invoke(main, [str(a) for a in args])


def as_json(result):
    assert result.exit_code == 0, result.output
    return json.loads(result.output)


def test_validate_builtin():
    data = as_json(run("validate"))
    assert data["schema"] == "veech-lagrange/validate/1"
    assert data["valid"] is True


def test_validate_truncated_file(tmp_path):
    path = tmp_path / "t.json"
    path.write_text('{"name": "torus",\n')
    result = run("validate", path)
    assert result.exit_code == 2
    assert "t.json:2:1" in result.output


def test_validate_corrupted_generator(tmp_path):
    data = descriptor_to_dict(builtin_torus())
    data["generators"]["a"] = [[1, 3], [0, 1]]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data))
    result = run("validate", path, "--format", "csv")
    assert result.exit_code == 1
    rows = list(csv.DictReader(io.StringIO(result.output)))
    failed = {r["check"] for r in rows if r["passed"] == "False"}
    assert "vertex_pairing" in failed


def test_lagrange_golden_word():
    data = as_json(run("lagrange", "--word", GOLDEN, "--depth", "40"))
    assert data["schema"] == "veech-lagrange/lagrange/1"
    assert abs(data["running_values"][-1] - 2.23607) < 1e-4
    assert abs(data["estimate"] - 2.2360679) < 1e-3
    assert data["faithful"] is False and data["L0"] > 0


def test_lagrange_csv():
    result = run("lagrange", "--word", GOLDEN, "--depth", "40", "--format", "csv")
    rows = list(csv.reader(io.StringIO(result.output)))
    assert rows[0] == ["n", "inverse_min_area"]
    assert abs(float(rows[-1][1]) - 2.23607) < 1e-4


def test_cuspidal_word_exits_one():
    result = run("lagrange", "--word", ",".join(["b", "a"] * 5 + ["a"] * 50), "--depth", "40")
    assert result.exit_code == 1
    assert "CuspidalDirection" in result.output


def test_bad_word_is_a_parse_error():
    assert run("lagrange", "--word", "a,,b").exit_code == 2
    assert run("lagrange", "--word", "random:x").exit_code == 2


def test_theta_and_word_are_exclusive():
    assert run("lagrange").exit_code == 2
    assert run("lagrange", "--theta", "0.3", "--word", "a").exit_code == 2


def test_seeded_runs_are_byte_identical():
    a = run("wedges", "--word", "random:80", "--seed", "7")
    b = run("wedges", "--word", "random:80", "--seed", "7")
    c = run("wedges", "--word", "random:80", "--seed", "8")
    assert a.exit_code == 0 and a.output == b.output != c.output


def test_expand():
    data = as_json(run("expand", "--theta", "0.3", "--depth", "12"))
    assert len(data["letters"].split(",")) == 12
    assert data["arc"]["length"] < 0.1
    data = as_json(run("expand", "--word", "b,a,b"))
    assert data["word"] == "b,a,b"


def test_wedges_csv_columns():
    result = run("wedges", "--theta", "0.3", "--depth", "10", "--format", "csv")
    header = result.output.splitlines()[0]
    assert header == "n,area_r,area_l,min_area,inverse_min"


def test_constants():
    data = as_json(run("constants", "--N", "3"))
    assert data["thresholds"]["c_flag"] == "scanned"
    assert len(data["table"]["M"]) == 5


def test_cantor_scan():
    data = as_json(run("cantor", "--N", "2-5", "--depth", "6"))
    assert data["schema"] == "veech-lagrange/cantor-scan/1"
    assert [row["N"] for row in data["scan"]] == [2, 3, 4, 5]
    assert data["smallest_passing_N"] == 4


def test_cantor_tiny_depth_reports_empty_ledger():
    data = as_json(run("cantor", "--depth", "0"))
    assert data["plus"]["holes"] == 0
    assert data["plus"]["gap"]["passed"] is True


def test_cantor_csv_parses_back(tmp_path):
    out = tmp_path / "holes.csv"
    result = run("cantor", "--depth", "3", "--format", "csv", "--out", out, "--sign", "-")
    assert result.exit_code == 0
    rows = read_hole_csv(out.read_text())
    assert len(rows) == 2 + 6 + 18


def test_hall_run():
    data = as_json(run("hall", "--prefix-len", "3000", "--depth", "8"))
    assert data["construction"]["c_flag"] == "scanned"
    assert data["report"]["passed_off"] is True
    assert data["report"]["stray_runs"] == []


def test_hall_below_ray():
    result = run("hall", "--L", "300", "--prefix-len", "1000", "--depth", "6")
    assert result.exit_code == errors.BelowRay.exit_code == 23
    assert "BelowRay" in result.output


def test_exit_codes_are_distinct():
    codes = {}
    for name in dir(errors):
        cls = getattr(errors, name)
        if isinstance(cls, type) and issubclass(cls, errors.VeechError) and cls is not errors.VeechError:
            codes.setdefault(cls.exit_code, []).append(name)
    shared = {code: sorted(names) for code, names in codes.items() if len(names) > 1}
    # parse errors share status 2; a cuspidal direction answers with status 1
    assert shared == {2: ["DescriptorParseError", "WordParseError"]}


def test_csv_refused_for_json_only_command():
    assert run("cantor", "--depth", "2", "--N", "4", "--format", "csv").exit_code == 0
    result = run("hall", "--prefix-len", "500", "--depth", "6", "--format", "csv")
    assert result.exit_code == 0
    assert result.output.startswith("block,index,inverse_area")


def test_version():
    result = run("--version")
    assert result.exit_code == 0 and "0.1.0" in result.output
