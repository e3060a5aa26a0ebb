import json
from fractions import Fraction

import pytest
from click.testing import CliRunner

from hmfslopes.cli_io import (RunConfig, compare_within, config_from_dict, emit, frac_str, jsonl_lines,
                              load_config, main, parse_level_text, parse_smset, parse_weight, read_fixture,
                              read_grids, read_jsonl, run)
from hmfslopes.errors import ConfigInvalid
from hmfslopes.slope_engine import SMSet


def test_fraction_strings():
    assert frac_str(Fraction(2, 3)) == "2/3"
    assert frac_str(4) == "4"
    sm = parse_smset("0:1 1/2:2 5/3:6")
    assert sm == [(0, 1), (Fraction(1, 2), 2), (Fraction(5, 3), 6)]


@pytest.mark.parametrize("text,k,char,tau", [
    ("[2,2]psi2", (2, 2), "psi2", 0),
    ("[2,2]psi2tau^2", (2, 2), "psi2", 2),
    ("2,4", (2, 4), "psi", 0),
    ("[4,4]", (4, 4), "psi", 0),
    ("[3,5]psi1tau^(2,4)", (3, 5), "psi1", (2, 4)),
])
def test_parse_weight(text, k, char, tau):
    assert parse_weight(text) == (k, char, tau)


def test_parse_weight_rejects():
    with pytest.raises(ConfigInvalid):
        parse_weight("weight two")


def test_parse_level():
    assert parse_level_text("9", 3) == (2, ())
    assert parse_level_text("8*p11.2", 2) == (3, (("p11.2", 1),))
    with pytest.raises(ConfigInvalid):
        parse_level_text("10", 3)


def test_config_validation():
    cfg = config_from_dict({"preset": "sqrt13-p3", "weights": "[2,2]psi2", "R": [10, "classical"],
                            "slope_bound": "5/2"})
    assert cfg.weights == ["[2,2]psi2"] and cfg.slope_bound == Fraction(5, 2)
    for bad in ({"R": [0]}, {"formats": ["csv"]}, {"colour": 1}, {"weights": ["x"]}, []):
        with pytest.raises(ConfigInvalid):
            config_from_dict(bad)


def test_config_file(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text("preset: sqrt13-p3\nweights: ['[2,2]psi2']\nR: [classical]\n")
    assert load_config(p).preset == "sqrt13-p3"
    p.write_text("preset: [unclosed\n")
    with pytest.raises(ConfigInvalid):
        load_config(p)


def test_empty_weight_list_gives_empty_report(tmp_path):
    report = run(RunConfig(preset="sqrt13-p3", weights=[], out=str(tmp_path)))
    assert report.records == [] and report.grids == []


def test_unknown_preset():
    with pytest.raises(ConfigInvalid):
        run(RunConfig(preset="sqrt2-p7", weights=["[2,2]"]))


def test_compare_within_horizon():
    a = SMSet([(0, 1), (5, 39), (Fraction(11, 2), 20)])
    b = SMSet([(0, 1), (5, 40), (Fraction(11, 2), 22)])
    assert compare_within(a, b, bound=Fraction(9, 2))
    assert not compare_within(a, b, bound=5)
    assert compare_within(a, a)


def test_fixture_files_parse():
    t1 = read_fixture("table1.txt")
    assert t1.meta["setting"] == "sqrt13-p3"
    assert len(t1.rows) == 21
    grids = read_grids()
    cols, rows, data = grids[("sqrt13-p3", "[2,2]psi2")]
    assert data == [[1, 1, 1], [1, 4, 1], [1, 1, 1]]


def test_report_round_trip_and_determinism(tmp_path):
    cfg = RunConfig(preset="sqrt13-p3", weights=["[2,2]psi2", "[3,3]psi1"], operators=["U_p", "U_q1"],
                    R=["classical", 3], slope_bound=Fraction(3), fixture="table1.txt",
                    out=str(tmp_path / "a"), formats=["json-lines", "tsv"])
    report = run(cfg)
    verdicts = {(r.weight, r.operator, r.R): r.verdict for r in report.records}
    assert verdicts[("[2,2]psi2", "U_p", "classical")] == "match"
    assert verdicts[("[3,3]psi1", "U_q1", "classical")] == "match"
    back = read_jsonl(tmp_path / "a" / "slopes.jsonl")
    for rec in report.records:
        key = (rec.operator, rec.weight, rec.R)
        assert compare_within(back[key], rec.slopes, horizon=rec.certified_upto if rec.R != "classical" else None)
    for line in (tmp_path / "a" / "slopes.jsonl").read_text().splitlines():
        row = json.loads(line)
        assert isinstance(row["slope"], str) and isinstance(row["certified"], bool)
    cfg.out = str(tmp_path / "b")
    run(cfg)
    assert (tmp_path / "a" / "slopes.jsonl").read_bytes() == (tmp_path / "b" / "slopes.jsonl").read_bytes()


def test_cli_commands(tmp_path):
    r = CliRunner()
    res = r.invoke(main, ["classical", "--field", "13", "--prime", "3", "--weight", "[2,2]psi2",
                          "--op", "U_q2", "--fixture", "table1.txt", "--out", str(tmp_path / "c")])
    assert res.exit_code == 0, res.output
    assert "(0, 3), (1/2, 6), (1, 3)" in res.output and "match" in res.output
    res = r.invoke(main, ["grid", "--preset", "sqrt13-p3", "--weight", "[2,2]psi2", "--out", str(tmp_path / "g")])
    assert res.exit_code == 0, res.output
    svg = (tmp_path / "g" / "grid-sqrt13-p3-2_2_psi2.svg").read_text()
    assert svg.startswith("<?xml")
    assert svg.count("> 4 <") + svg.count(">4<") == 1           # one centre label
    assert ">1/2<" in svg
    assert "1 4 1" in res.output
    res = r.invoke(main, ["hodge", "--h", "12", "--count", "2"])
    assert "(0,0) (12,0) (36,24)" in res.output
    res = r.invoke(main, ["conjecture", "--seed", "0:1 1/2:2 1:6 3/2:2 2:1", "--k", "4,4",
                          "--compare", "0:1 1/2:2 1:8 3/2:6 2:16 5/2:10 3:22 7/2:10 4:16 9/2:6 5:8 11/2:2 6:1"])
    assert res.exit_code == 0 and "match" in res.output
    res = r.invoke(main, ["slopes", "--preset", "sqrt13-p3", "--weight", "[2,2]psi2", "--R", "3",
                          "--slope-bound", "1", "--format", "tsv", "--out", str(tmp_path / "s")])
    assert res.exit_code == 0, res.output
    res = r.invoke(main, ["hecke", "--preset", "sqrt13-p3", "--cache-dir", str(tmp_path / "cache")])
    assert "h\t12" in res.output
    res = r.invoke(main, ["classical", "--preset", "nope", "--weight", "[2,2]"])
    assert res.exit_code != 0 and "ConfigInvalid" in res.output


def test_run_config_command(tmp_path):
    p = tmp_path / "run.yaml"
    p.write_text("preset: sqrt17-p2\nweights: ['[2,2]psi2']\noperators: [U_p]\nR: [classical]\n"
                 "fixture: table3.txt\nout: %s\nformats: [json-lines, tsv, svg-grid]\ngrids: ['[2,2]psi2']\n"
                 % (tmp_path / "o"))
    res = CliRunner().invoke(main, ["run", "--config", str(p)])
    assert res.exit_code == 0, res.output
    assert (tmp_path / "o" / "grid-sqrt17-p2-2_2_psi2.svg").exists()
    assert "match" in res.output and "mismatch" not in res.output
