"""End-to-end command-line checks: parsing, schema diagnostics, exit codes,
determinism of emitted CSV, and the bundled fixtures."""

import json
import math

import numpy as np
import pytest

from degenex import cli
from degenex.core import LaurentMatrix, MultipartiteState
from degenex.degeneration import (
    CombinatorialSpec,
    Degeneration,
    Hypergraph,
    ghz_w_combinatorial,
    ghz_w_generic,
    k3_network,
)


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def fixture_path(data_dir, name):
    p = data_dir / name
    assert p.is_file(), p
    return str(p)


def test_bundled_fixtures_parse(data_dir):
    deg = cli.parse_degeneration_file(fixture_path(data_dir, "ghz_w_generic.json"))
    assert isinstance(deg, Degeneration)
    assert len(deg.maps) == 3
    assert deg.error_degree == 2

    spec = cli.parse_degeneration_file(fixture_path(data_dir, "ghz_w_combinatorial.json"))
    assert isinstance(spec, CombinatorialSpec)
    assert spec.q() == 0.75

    H = cli.parse_degeneration_file(fixture_path(data_dir, "k3_network.json"))
    assert isinstance(H, Hypergraph)
    assert H.vertex_count == 3 and len(H.edges) == 3


def test_bundled_fixtures_match_builders(data_dir):
    disk = cli.parse_degeneration_file(fixture_path(data_dir, "ghz_w_generic.json"))
    built = ghz_w_generic(3)
    for a, b in zip(disk.maps, built.maps):
        assert sorted(a.terms) == sorted(b.terms)
        for p in a.terms:
            assert np.allclose(a.terms[p], b.terms[p], atol=1e-12)
    assert np.allclose(disk.psi.amplitudes, built.psi.amplitudes, atol=1e-12)
    assert np.allclose(disk.phi.amplitudes, built.phi.amplitudes, atol=1e-12)

    spec = cli.parse_degeneration_file(fixture_path(data_dir, "ghz_w_combinatorial.json"))
    assert spec == ghz_w_combinatorial()
    assert cli.parse_degeneration_file(fixture_path(data_dir, "k3_network.json")).edges \
        == k3_network().edges


@pytest.mark.parametrize("name", ["ghz_w_generic.json", "ghz_w_combinatorial.json",
                                  "k3_network.json"])
def test_round_trip_serialization(data_dir, tmp_path, name):
    obj = cli.parse_degeneration_file(fixture_path(data_dir, name))
    out = tmp_path / name
    out.write_text(json.dumps(cli.serialize(obj)))
    again = cli.parse_degeneration_file(str(out))
    assert type(again) is type(obj)
    if isinstance(obj, Degeneration):
        for a, b in zip(obj.maps, again.maps):
            for p in a.terms:
                assert np.allclose(a.terms[p], b.terms[p], atol=1e-12)
    else:
        assert again == obj


def test_validate_fixture_ok(data_dir, capsys):
    code, out, err = run(["validate", fixture_path(data_dir, "ghz_w_generic.json")], capsys)
    assert code == 0
    assert "valid" in out


def test_validate_broken_target(data_dir, tmp_path, capsys):
    doc = json.loads((data_dir / "ghz_w_generic.json").read_text())
    amps = doc["phi"]["amplitudes"]
    nz = [i for i, a in enumerate(amps) if abs(a[0]) + abs(a[1]) > 1e-14]
    z0 = [i for i in range(len(amps)) if i not in nz]
    amps[nz[0]], amps[z0[0]] = amps[z0[0]], amps[nz[0]]
    p = tmp_path / "broken.json"
    p.write_text(json.dumps(doc))
    code, out, err = run(["validate", str(p)], capsys)
    assert code == 2
    assert "INVALID" in out


def test_schema_diagnostics_carry_paths(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"k": 3, "maps": "oops"}))
    code, out, err = run(["validate", str(p)], capsys)
    assert code == 2
    assert "$" in err

    p2 = tmp_path / "bad2.json"
    doc = {
        "k": 1,
        "maps": [{"rows": 1, "cols": 1,
                  "terms": [{"power": 0, "matrix": [[[1.0]]]}]}],  # not [re, im]
        "psi": {"dims": [1], "amplitudes": [[1.0, 0.0]]},
        "phi": {"dims": [1], "amplitudes": [[1.0, 0.0]]},
    }
    p2.write_text(json.dumps(doc))
    code, out, err = run(["validate", str(p2)], capsys)
    assert code == 2
    assert "$.maps[0]" in err


def test_duplicate_power_rejected(tmp_path, capsys):
    doc = {
        "k": 1,
        "maps": [{"rows": 1, "cols": 1,
                  "terms": [{"power": 0, "matrix": [[[1.0, 0.0]]]},
                            {"power": 0, "matrix": [[[2.0, 0.0]]]}]}],
        "psi": {"dims": [1], "amplitudes": [[1.0, 0.0]]},
        "phi": {"dims": [1], "amplitudes": [[1.0, 0.0]]},
    }
    p = tmp_path / "dup.json"
    p.write_text(json.dumps(doc))
    code, out, err = run(["validate", str(p)], capsys)
    assert code == 2
    assert "power" in err


def test_exponent_prints_reference_value(data_dir, capsys):
    code, out, err = run(
        ["exponent", "--method", "symmetric", fixture_path(data_dir, "ghz_w_generic.json")],
        capsys)
    assert code == 0
    assert "6.1699" in out


def test_exponent_json_certificate(data_dir, tmp_path, capsys):
    out_path = tmp_path / "exp.json"
    code, out, err = run(
        ["exponent", "--method", "symmetric", "--json", str(out_path),
         fixture_path(data_dir, "ghz_w_combinatorial.json")], capsys)
    assert code == 0
    doc = json.loads(out_path.read_text())
    assert doc["method"] == "symmetric"
    assert abs(doc["value_bits"] - math.log2(4.0 / 3.0)) < 1e-6
    assert abs(doc["radius"] - 1.0) < 1e-3


def test_exponent_not_symmetric_exit_code(tmp_path, capsys):
    s = 1.0 / math.sqrt(2.0)
    psi = MultipartiteState((2, 2), np.array([s, 0, 0, s], dtype=complex))
    skew = Degeneration(
        (LaurentMatrix({0: np.eye(2, dtype=complex),
                        1: np.diag([1.0, 0.0]).astype(complex)}),
         LaurentMatrix({0: np.eye(2, dtype=complex)})),
        psi, psi, 1)
    p = tmp_path / "skew.json"
    p.write_text(json.dumps(cli.serialize(skew)))
    code, out, err = run(["validate", str(p)], capsys)
    assert code == 0
    code, out, err = run(["exponent", "--method", "symmetric", str(p)], capsys)
    assert code == 3
    assert "arg z" in err


def test_finite_n_csv_contract(data_dir, tmp_path, capsys):
    csv = tmp_path / "fn.csv"
    argv = ["finite-n", "--n-list", "1,2,5", "--strategy", "fixed", "--radius", "1.0",
            fixture_path(data_dir, "ghz_w_combinatorial.json"), "--csv", str(csv)]
    code, out, err = run(argv, capsys)
    assert code == 0
    lines = csv.read_text().splitlines()
    assert lines[0] == "n,radius,log2_objective,bits_per_copy"
    assert len(lines) == 4
    row1 = lines[1].split(",")
    assert int(row1[0]) == 1
    assert float(row1[1]) == 1.0
    want = math.log2(4.0 / 3.0) - math.log2(7.0)
    assert abs(float(row1[3]) - want) < 1e-10


def test_repeated_runs_are_byte_identical(data_dir, tmp_path, capsys):
    outs = []
    for tag in ("a", "b"):
        csv = tmp_path / ("fn_%s.csv" % tag)
        run(["finite-n", "--n-list", "1,3,6", "--strategy", "optimize",
             fixture_path(data_dir, "ghz_w_combinatorial.json"), "--csv", str(csv)],
            capsys)
        outs.append(csv.read_bytes())
    assert outs[0] == outs[1]

    curves = []
    for tag in ("a", "b"):
        csv = tmp_path / ("tr_%s.csv" % tag)
        run(["tradeoff", fixture_path(data_dir, "ghz_w_combinatorial.json"),
             "--grid", "9", "--csv", str(csv)], capsys)
        base = csv.with_name(csv.stem + "_baseline.csv")
        curves.append(csv.read_bytes() + base.read_bytes())
    assert curves[0] == curves[1]


def test_tradeoff_emits_baseline(data_dir, tmp_path, capsys):
    csv = tmp_path / "curve.csv"
    code, out, err = run(
        ["tradeoff", fixture_path(data_dir, "ghz_w_combinatorial.json"),
         "--grid", "5", "--csv", str(csv)], capsys)
    assert code == 0
    assert csv.is_file()
    base = tmp_path / "curve_baseline.csv"
    assert base.is_file()
    rows = csv.read_text().splitlines()
    assert rows[0] == "R,r_bits,method"
    assert len(rows) == 6


def test_fekete_nats_flag(capsys):
    code_bits, out_bits, _ = run(
        ["fekete", "--domain", "circle:1.0", "--weights", "trivial", "--n", "7"], capsys)
    code_nats, out_nats, _ = run(
        ["fekete", "--domain", "circle:1.0", "--weights", "trivial", "--n", "7", "--nats"],
        capsys)
    assert code_bits == 0 and code_nats == 0
    bits = float(out_bits.split("=")[1].split()[0])
    nats = float(out_nats.split("=")[1].split()[0])
    assert nats == pytest.approx(bits * math.log(2.0), rel=1e-9)


def test_fekete_csv_points(tmp_path, capsys):
    csv = tmp_path / "pts.csv"
    code, out, err = run(
        ["fekete", "--domain", "annulus:0.5:2.0", "--weights", "trivial",
         "--n", "8", "--csv", str(csv)], capsys)
    assert code == 0
    rows = csv.read_text().splitlines()
    assert rows[0] == "re,im"
    assert len(rows) == 10  # header + n + 1 points
    pts = np.array([[float(x) for x in r.split(",")] for r in rows[1:]])
    mods = np.hypot(pts[:, 0], pts[:, 1])
    assert np.all(mods > 0.49) and np.all(mods < 2.01)


def test_hypergraph_command(data_dir, capsys):
    code, out, err = run(["hypergraph", fixture_path(data_dir, "k3_network.json")], capsys)
    assert code == 0
    assert "rate" in out and "2" in out
    assert "exponent" in out and "1" in out


def test_combinatorial_emit_round_trip(data_dir, tmp_path, capsys):
    induced = tmp_path / "induced.json"
    code, out, err = run(
        ["combinatorial", fixture_path(data_dir, "ghz_w_combinatorial.json"),
         "--emit", str(induced)], capsys)
    assert code == 0
    assert "0.415037" in out
    code, out, err = run(["validate", str(induced)], capsys)
    assert code == 0
    assert "valid" in out


def test_disconnected_hypergraph_exit_code(tmp_path, capsys):
    p = tmp_path / "disc.json"
    p.write_text(json.dumps({"vertices": 4, "edges": [[0, 1], [2, 3]]}))
    code, out, err = run(["hypergraph", str(p)], capsys)
    assert code == 2


def test_missing_file_is_validation_error(capsys):
    code, out, err = run(["validate", "/nonexistent/nowhere.json"], capsys)
    assert code == 2
