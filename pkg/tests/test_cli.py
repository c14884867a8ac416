"""End-to-end checks of the command-line interface."""

import filecmp
import json
import math

import numpy as np
import pytest

import cubamin.cli as cli
from cubamin.cli import main, parse_rule_file
from cubamin.rules import ConstructionError
from cubamin.squaremin import moller_bound


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def build_small_even(tmp_path, capsys, fmt="json", m=2):
    out = tmp_path / ("even.%s" % fmt)
    code, _, err = run(capsys, "build", "square-even", "--alpha", "-0.5",
                       "--beta", "-0.5", "--gamma", "-0.5", "--m", str(m),
                       "--out", str(out), "--format", fmt)
    assert code == 0, err
    return out


def test_bound_examples(capsys):
    for n, want in ((24, 312), (2, 4), (40, 840)):
        code, out, _ = run(capsys, "bound", "--n", str(n))
        assert code == 0
        assert out.strip() == str(want)


def test_bound_rejects_nonpositive(capsys):
    code, _, err = run(capsys, "bound", "--n", "0")
    assert code == 1
    assert err != ""


def test_unknown_subcommand_is_usage_error(capsys):
    code, _, err = run(capsys, "frobnicate")
    assert code == 1
    assert err != ""


def test_build_biangle_small(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, stdout, _ = run(capsys, "build", "biangle", "--alpha", "-0.5",
                          "--beta", "-0.5", "--gamma", "-0.5", "--n", "3",
                          "--out", str(out))
    assert code == 0
    assert "6 nodes" in stdout and "degree 5" in stdout
    doc = json.loads(out.read_text())
    assert doc["family"] == "biangle"
    assert doc["alpha"] == -0.5 and doc["beta"] == -0.5
    assert doc["param_n_or_m"] == 3
    assert doc["node_count"] == 6 == len(doc["nodes"])
    assert doc["moller_bound"] == moller_bound(3)


def test_json_field_order_is_stable(tmp_path, capsys):
    out = build_small_even(tmp_path, capsys)
    pairs = json.loads(out.read_text(), object_pairs_hook=list)
    keys = [k for k, _ in pairs]
    assert keys == ["family", "alpha", "beta", "gamma", "ell", "param_n_or_m",
                    "degree", "node_count", "moller_bound", "nodes"]


def test_node_rows_are_lexicographically_sorted(tmp_path, capsys):
    out = build_small_even(tmp_path, capsys, m=3)
    doc = json.loads(out.read_text())
    nodes = doc["nodes"]
    assert nodes == sorted(nodes, key=lambda r: (r[0], r[1]))


def test_csv_layout(tmp_path, capsys):
    out = build_small_even(tmp_path, capsys, fmt="csv")
    raw = out.read_bytes()
    assert b"\r" not in raw
    lines = raw.decode().splitlines()
    assert lines[0] == "x1,x2,weight"
    assert len(lines) == 1 + moller_bound(4)
    for line in lines[1:]:
        assert len(line.split(",")) == 3


def test_csv_and_json_decode_to_the_same_rule(tmp_path, capsys):
    a = build_small_even(tmp_path, capsys, fmt="json")
    b = build_small_even(tmp_path, capsys, fmt="csv")
    nodes_a, weights_a, meta_a = parse_rule_file(str(a))
    nodes_b, weights_b, meta_b = parse_rule_file(str(b))
    # shortest round-trip decimals reproduce the doubles bit for bit
    assert np.array_equal(nodes_a, nodes_b)
    assert np.array_equal(weights_a, weights_b)
    assert meta_a is not None and meta_b is None


def test_build_is_byte_deterministic(tmp_path, capsys):
    one = tmp_path / "one.json"
    two = tmp_path / "two.json"
    for out in (one, two):
        code, _, _ = run(capsys, "build", "composed", "--ell", "2", "--m", "2",
                         "--alpha", "-0.5", "--beta", "-0.5", "--out", str(out))
        assert code == 0
    assert filecmp.cmp(one, two, shallow=False)


def test_composed_build_counts(tmp_path, capsys):
    out = tmp_path / "c.json"
    code, _, _ = run(capsys, "build", "composed", "--ell", "2", "--m", "2",
                     "--alpha", "-0.5", "--beta", "-0.5", "--out", str(out))
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["ell"] == 2
    assert doc["node_count"] == 40 == moller_bound(8)
    assert doc["degree"] == 15


def test_build_rejects_bad_gamma(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, _, err = run(capsys, "build", "square-even", "--alpha", "-0.5",
                       "--beta", "-0.5", "--gamma", "0.3", "--m", "2",
                       "--out", str(out))
    assert code == 1
    assert err != ""
    assert not out.exists()


def test_build_rejects_alpha_at_minus_one(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, _, err = run(capsys, "build", "biangle", "--alpha", "-1",
                       "--beta", "-0.5", "--gamma", "-0.5", "--n", "3",
                       "--out", str(out))
    assert code == 1
    assert not out.exists()


def test_construction_failure_leaves_no_partial_file(tmp_path, capsys, monkeypatch):
    def boom(spec, m):
        raise ConstructionError("synthetic failure for testing")

    monkeypatch.setattr(cli, "minimal_rule_even", boom)
    out = tmp_path / "r.json"
    code, _, err = run(capsys, "build", "square-even", "--alpha", "-0.5",
                       "--beta", "-0.5", "--gamma", "-0.5", "--m", "2",
                       "--out", str(out))
    assert code == 2
    assert "construction failed" in err
    assert not out.exists()


def test_verify_round_trip(tmp_path, capsys):
    out = build_small_even(tmp_path, capsys)
    report = tmp_path / "rep.json"
    code, stdout, _ = run(capsys, "verify", str(out), "--tol", "1e-9",
                          "--report", str(report))
    assert code == 0
    assert "OK" in stdout
    doc = json.loads(report.read_text())
    assert doc["ok"] is True
    assert doc["certified_degree"] >= doc["declared_degree"] == 7
    assert doc["failures"] == []


def test_verify_detects_the_degree_ceiling(tmp_path, capsys):
    """One degree past the declared exactness the defect is visible."""
    out = build_small_even(tmp_path, capsys)
    report = tmp_path / "rep.json"
    code, stdout, _ = run(capsys, "verify", str(out), "--max-degree", "8",
                          "--tol", "1e-9", "--report", str(report))
    assert code == 0
    doc = json.loads(report.read_text())
    assert doc["certified_degree"] == 7
    assert doc["max_degree_tested"] == 8
    assert any(i + j == 8 for i, j, _ in doc["failures"])


def test_verify_odd_family(tmp_path, capsys):
    out = tmp_path / "odd.json"
    code, _, _ = run(capsys, "build", "square-odd", "--alpha", "0.5",
                     "--beta", "-0.5", "--gamma", "0.5", "--m", "2",
                     "--out", str(out))
    assert code == 0
    code, stdout, _ = run(capsys, "verify", str(out))
    assert code == 0
    assert "OK" in stdout


def test_verify_biangle_round_trip(tmp_path, capsys):
    out = tmp_path / "b.json"
    code, _, _ = run(capsys, "build", "biangle", "--alpha", "0.5",
                     "--beta", "-0.5", "--gamma", "0.5", "--n", "4",
                     "--out", str(out))
    assert code == 0
    code, stdout, _ = run(capsys, "verify", str(out), "--tol", "1e-11")
    assert code == 0
    assert "OK" in stdout


def test_verify_fails_on_perturbed_weight(tmp_path, capsys):
    out = build_small_even(tmp_path, capsys)
    doc = json.loads(out.read_text())
    doc["nodes"][0][2] *= 1.01
    out.write_text(json.dumps(doc))
    code, stdout, _ = run(capsys, "verify", str(out))
    assert code == 3
    assert "FAIL" in stdout


def test_verify_with_low_ceiling_cannot_certify(tmp_path, capsys):
    out = build_small_even(tmp_path, capsys)
    code, _, _ = run(capsys, "verify", str(out), "--max-degree", "5")
    assert code == 3


def test_verify_csv_is_unverifiable(tmp_path, capsys):
    out = build_small_even(tmp_path, capsys, fmt="csv")
    code, _, err = run(capsys, "verify", str(out))
    assert code == 4
    assert "metadata" in err


def test_verify_unknown_family_is_unverifiable(tmp_path, capsys):
    out = build_small_even(tmp_path, capsys)
    doc = json.loads(out.read_text())
    doc["family"] = "hexagon"
    out.write_text(json.dumps(doc))
    code, _, err = run(capsys, "verify", str(out))
    assert code == 4
    assert "hexagon" in err


def test_verify_missing_file(tmp_path, capsys):
    code, _, err = run(capsys, "verify", str(tmp_path / "nope.json"))
    assert code == 1
    assert err != ""


def test_parse_rule_file_rejects_malformed(tmp_path):
    bad_csv = tmp_path / "bad.csv"
    bad_csv.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError):
        parse_rule_file(str(bad_csv))
    bad_json = tmp_path / "bad.json"
    bad_json.write_text(json.dumps({"family": "biangle", "nodes": []}))
    with pytest.raises(ValueError):
        parse_rule_file(str(bad_json))
    short_row = tmp_path / "short.csv"
    short_row.write_text("x1,x2,weight\n0.1,0.2\n")
    with pytest.raises(ValueError):
        parse_rule_file(str(short_row))


def test_plot_biangle_outline_and_markers(tmp_path, capsys):
    rule = tmp_path / "b.json"
    run(capsys, "build", "biangle", "--alpha", "-0.5", "--beta", "-0.5",
        "--gamma", "-0.5", "--n", "4", "--out", str(rule))
    svg = tmp_path / "b.svg"
    code, stdout, _ = run(capsys, "plot", str(rule), str(svg))
    assert code == 0
    text = svg.read_text()
    assert text.startswith("<svg")
    assert text.count("<circle") == 10
    # curved boundary drawn with a quadratic arc
    assert " Q " in text or "Q " in text.replace("\n", " ")
    assert 'fill="#ffffff"' in text


def test_plot_square_outline(tmp_path, capsys):
    rule = build_small_even(tmp_path, capsys)
    svg = tmp_path / "s.svg"
    code, _, _ = run(capsys, "plot", str(rule), str(svg), "--size", "300")
    assert code == 0
    text = svg.read_text()
    assert text.count("<circle") == moller_bound(4)
    assert " Q " not in text
    assert 'width="300"' in text


def test_plot_is_byte_deterministic(tmp_path, capsys):
    rule = build_small_even(tmp_path, capsys)
    one = tmp_path / "one.svg"
    two = tmp_path / "two.svg"
    for svg in (one, two):
        assert run(capsys, "plot", str(rule), str(svg))[0] == 0
    assert filecmp.cmp(one, two, shallow=False)


def test_plot_rejects_empty_node_file(tmp_path, capsys):
    empty = tmp_path / "empty.csv"
    empty.write_text("x1,x2,weight\n")
    code, _, err = run(capsys, "plot", str(empty), str(tmp_path / "e.svg"))
    assert code == 1
    assert err != ""


def test_plot_rejects_tiny_canvas(tmp_path, capsys):
    rule = build_small_even(tmp_path, capsys)
    code, _, _ = run(capsys, "plot", str(rule), str(tmp_path / "t.svg"),
                     "--size", "10")
    assert code == 1


def test_plot_accepts_csv_input(tmp_path, capsys):
    rule = build_small_even(tmp_path, capsys, fmt="csv")
    svg = tmp_path / "c.svg"
    code, _, _ = run(capsys, "plot", str(rule), str(svg))
    assert code == 0
    assert svg.read_text().count("<circle") == moller_bound(4)
