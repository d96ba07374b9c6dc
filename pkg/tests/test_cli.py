import json

import pytest

from altsurg import cli
from altsurg.acceptance import SINGLE_SLOPE_ROWS, TWO_SLOPE_ROWS
from altsurg.classify import AT_MOST_ONE, AT_MOST_TWO, INTERVAL_D, SCHEMA_VERSION


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_stable_from_polynomial(capsys):
    code, out, _ = run(capsys, "stable", "--alexander", "1,-1,0,1,-1,1")
    assert code == cli.EXIT_OK
    assert out.strip() == "rho=[3,2,2] g=5 N=19"
    code, out, _ = run(capsys, "stable", "--alexander", "1,-1,0,1,-1,1", "--json")
    assert json.loads(out) == {"rho": [3, 2, 2], "genus": 5, "N": 19}


def test_stable_unknot_and_rho(capsys):
    code, out, _ = run(capsys, "stable", "--alexander", "1")
    assert code == cli.EXIT_OK and "unknot" in out
    code, out, _ = run(capsys, "stable", "--rho", "5,4,3,2,2")
    assert code == cli.EXIT_OK and "N=60" in out


def test_stable_without_stable_coefficients(capsys):
    code, out, _ = run(capsys, "stable", "--alexander=-1,3")
    assert code == cli.EXIT_NO_STABLE


def test_bad_input(capsys):
    code, _, err = run(capsys, "stable", "--alexander=-3,1")
    assert code == cli.EXIT_INPUT and "error" in err
    assert cli.main(["stable", "--alexander", "1,x"]) == cli.EXIT_INPUT
    assert cli.main(["stable"]) == cli.EXIT_INPUT
    assert cli.main(["--version"]) == 0


def test_osb_found_half_integer(capsys, tmp_path):
    path = tmp_path / "cert.json"
    code, out, _ = run(capsys, "osb", "--rho", "3,2,2", "--slope", "18.5", "--out", str(path))
    assert code == cli.EXIT_OK
    assert "found" in out.lower() and "planar=True" in out and "det=37" in out
    cert = json.loads(path.read_text())
    assert cert["slope"] == "37/2" and cert["planar"] and cert["determinant"] == 37
    code, out, _ = run(capsys, "osb", "--rho", "3,2,2", "--slope", "37/2", "--json")
    assert json.loads(out)["content_hash"] == cert["content_hash"]


def test_osb_slope_too_small(capsys):
    assert run(capsys, "osb", "--rho", "2", "--slope", "3")[0] == cli.EXIT_SLOPE_TOO_SMALL
    # N - 1 = 22 for these coefficients, so 17 is below the range
    assert run(capsys, "osb", "--rho", "2,2,2,3", "--slope", "17", "--mode", "full")[0] == \
        cli.EXIT_SLOPE_TOO_SMALL


def test_osb_none_and_sigma(capsys):
    code, out, _ = run(capsys, "osb", "--rho", "2,2,2,3", "--slope", "22")
    assert code == cli.EXIT_NONE and "none" in out
    # one of the small-norm obstructed lattices, given by its changemaker vector
    code, _, _ = run(capsys, "osb", "--sigma", "1,1,2,2,2,3", "--slope", "23")
    assert code == cli.EXIT_NONE
    code, _, _ = run(capsys, "osb", "--sigma", "1,1,2", "--slope", "5")
    assert code == cli.EXIT_SLOPE_TOO_SMALL


def test_osb_quick_and_caps(capsys):
    code, _, _ = run(capsys, "osb", "--rho", "5,4,3,2,2", "--slope", "60", "--mode", "quick")
    assert code == cli.EXIT_INCONCLUSIVE
    code, _, err = run(capsys, "osb", "--rho", "5,4,3,2,2", "--slope", "60", "--cap-nodes", "3")
    assert code == cli.EXIT_INCONCLUSIVE and "error" in err


@pytest.mark.parametrize("text", ["7/3", "18.25", "abc", "1/0"])
def test_slope_scope(capsys, text):
    code, _, err = run(capsys, "osb", "--rho", "3,2,2", "--slope", text)
    assert code == cli.EXIT_INPUT and "slope" in err


def test_parse_slope():
    from fractions import Fraction
    assert cli.parse_slope("37/2") == cli.parse_slope("18.5") == Fraction(37, 2)
    assert cli.parse_slope("19") == 19


def test_classify_single(capsys):
    code, out, _ = run(capsys, "classify", "--alexander", "1,-1,0,1,-1,1", "--json")
    data = json.loads(out)
    assert code == cli.EXIT_OK
    assert data["outcome"] == INTERVAL_D and data["slope_window"] == [18, 19]
    assert data["schema_version"] == SCHEMA_VERSION
    code, out, _ = run(capsys, "classify", "--rho", "5,4,3,2,2")
    assert "AtMostOne" in out and "L_60 is excluded" in out


def test_classify_mirror(capsys):
    code, out, _ = run(capsys, "classify", "--rho", "3,2,2", "--mirror", "--json")
    assert json.loads(out)["slope_window"] == [-19, -18]


def test_classify_batch_needs_out(capsys, tmp_path):
    path = tmp_path / "in.txt"
    path.write_text("rho:2\n")
    assert run(capsys, "classify", "--batch", str(path))[0] == cli.EXIT_INPUT


BATCH = """# mixed inputs
pretzel,1;-1;0;1;-1;1
census,rho:5;4;3;2;2
trefoil,rho:2
figure8,-1;3
broken,-3;1
two,rho:12;9;5;4;2
"""


def read_records(path):
    return [json.loads(line) for line in path.read_text().splitlines()]


def test_batch_records(tmp_path):
    src = tmp_path / "in.txt"
    src.write_text(BATCH)
    out = tmp_path / "out.jsonl"
    assert cli.run_batch(str(src), str(out)) == 6
    records = {r["id"]: r for r in read_records(out)}
    assert records["pretzel"]["outcome"] == INTERVAL_D
    assert records["census"]["slope_window"] == [59]
    assert records["figure8"]["outcome"] == "NoStableCoefficients"
    assert records["broken"]["error"] == "NormalizationError"
    assert records["two"]["outcome"] == AT_MOST_TWO
    # a finished batch resumes to a no-op
    assert cli.run_batch(str(src), str(out)) == 0


def test_batch_resume_is_byte_identical(tmp_path):
    src = tmp_path / "in.txt"
    src.write_text(BATCH)
    whole = tmp_path / "whole.jsonl"
    cli.run_batch(str(src), str(whole))
    resumed = tmp_path / "resumed.jsonl"
    assert cli.run_batch(str(src), str(resumed), limit=2) == 2
    # simulate a crash in the middle of writing the third record
    with open(resumed, "a") as fh:
        fh.write('{"id":"trefoil","outc')
    assert cli.run_batch(str(src), str(resumed), limit=1) == 1
    assert cli.run_batch(str(src), str(resumed)) == 3
    assert resumed.read_bytes() == whole.read_bytes()


def test_batch_threads_match_serial(tmp_path):
    src = tmp_path / "in.txt"
    src.write_text(BATCH)
    serial, parallel = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    cli.run_batch(str(src), str(serial))
    cli.run_batch(str(src), str(parallel), threads=2)
    assert serial.read_bytes() == parallel.read_bytes()


def test_batch_refuses_foreign_output(tmp_path):
    src = tmp_path / "in.txt"
    src.write_text(BATCH)
    out = tmp_path / "out.jsonl"
    out.write_text('{"id":"other"}\n')
    with pytest.raises(ValueError):
        cli.run_batch(str(src), str(out))
    src.write_text("a,rho:2\na,rho:3\n")
    with pytest.raises(ValueError):
        cli.run_batch(str(src), str(tmp_path / "dup.jsonl"))
    src.write_text("a,rho:2\nb,1;x\n")
    with pytest.raises(ValueError, match="line 2"):
        cli.run_batch(str(src), str(tmp_path / "bad.jsonl"))


def rho_batch(rows, path):
    path.write_text("".join(f"{i},rho:{';'.join(map(str, rho))}\n" for i, rho in rows))


def test_single_slope_census_batch(tmp_path, capsys):
    src, out = tmp_path / "t1.txt", tmp_path / "t1.jsonl"
    rho_batch([(name, rho) for name, rho, _ in SINGLE_SLOPE_ROWS], src)
    code, _, _ = run(capsys, "classify", "--batch", str(src), "--out", str(out))
    assert code == cli.EXIT_OK
    records = read_records(out)
    assert len(records) == 12
    for record, (_, _, N) in zip(records, SINGLE_SLOPE_ROWS):
        assert record["outcome"] == AT_MOST_ONE and record["slope_window"] == [N - 1]


@pytest.mark.slow
def test_two_slope_batch(tmp_path, capsys):
    src, out = tmp_path / "t3.txt", tmp_path / "t3.jsonl"
    rho_batch([("-".join(map(str, params)), rho) for params, _, rho in TWO_SLOPE_ROWS], src)
    code, _, _ = run(capsys, "classify", "--batch", str(src), "--out", str(out))
    assert code == cli.EXIT_OK
    records = read_records(out)
    assert len(records) == 14
    for record, (_, N, _) in zip(records, TWO_SLOPE_ROWS):
        assert record["outcome"] == AT_MOST_TWO and record["slope_window"] == [N - 1, N]


def write_certificate(capsys, tmp_path, *argv):
    path = tmp_path / "cert.json"
    code, _, _ = run(capsys, "osb", *argv, "--out", str(path))
    assert code == cli.EXIT_OK
    return path


def test_emit_cycle(capsys, tmp_path):
    cert = write_certificate(capsys, tmp_path, "--sigma", "1,1,1", "--slope", "3")
    code, out, _ = run(capsys, "emit", str(cert))
    data = json.loads(out)
    assert code == cli.EXIT_OK
    assert data["crossing_count"] == 3 and data["determinant"] == 3


def test_emit_census(capsys, tmp_path):
    cert = write_certificate(capsys, tmp_path, "--rho", "5,4,3,2,2", "--slope", "59")
    out = tmp_path / "diagram.json"
    code, _, _ = run(capsys, "emit", str(cert), "--out", str(out))
    assert code == cli.EXIT_OK
    assert json.loads(out.read_text())["determinant"] == 59


def test_emit_not_planar(capsys, tmp_path, monkeypatch):
    cert = write_certificate(capsys, tmp_path, "--sigma", "1,1,1", "--slope", "3")
    monkeypatch.setattr(cli, "planarity", lambda graph: None)
    code, _, err = run(capsys, "emit", str(cert))
    assert code == cli.EXIT_NOT_PLANAR and "error" in err


def test_emit_rejects_empty_certificate(capsys, tmp_path):
    path = tmp_path / "none.json"
    assert run(capsys, "osb", "--rho", "2,2,2,3", "--slope", "22", "--out", str(path))[0] == cli.EXIT_NONE
    assert run(capsys, "emit", str(path))[0] == cli.EXIT_INPUT


def test_emit_rejects_tampered_vectors(capsys, tmp_path):
    cert = write_certificate(capsys, tmp_path, "--sigma", "1,1,1", "--slope", "3")
    data = json.loads(cert.read_text())
    data["vectors"][0] = [2, -2, 0]
    cert.write_text(json.dumps(data))
    assert run(capsys, "emit", str(cert))[0] == cli.EXIT_INPUT
