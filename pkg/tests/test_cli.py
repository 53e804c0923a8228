from __future__ import annotations

import json
from fractions import Fraction

import pytest

from fbx.cli import JobError, JobSpec, main, parse_job
from fbx.samples import kummer


def job_text(points, matrix, rank=None, **extra):
    doc = {
        "curve": {"finite_points": points, "include_infinity": True},
        "connection": {"rank": rank if rank is not None else len(matrix), "matrix": matrix},
    }
    doc.update(extra)
    return json.dumps(doc)


@pytest.fixture
def write_job(tmp_path):
    def write(points, matrix, **kw):
        path = tmp_path / "job.json"
        path.write_text(job_text(points, matrix, **kw))
        return str(path)

    return write


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_parse_kummer_job():
    job = parse_job(job_text(["0"], [["1/2 * 1/t"]]))
    assert job.finite_points == (Fraction(0),) and job.rank == 1
    assert job.connection() == kummer(Fraction(1, 2))


def test_parse_round_trip():
    job = parse_job(job_text(["1", "-1/2"], [["t", "1/(t-1)"], ["0", "2/(2*t+1)"]], options={"depth": 3}))
    assert parse_job(job.serialize()) == job
    assert isinstance(job, JobSpec) and job.option("depth") == 3


@pytest.mark.parametrize(
    "text,needle",
    [
        (job_text(["0"], [["1/(t-2)"]]), "vanishes outside"),
        (job_text([], [["0"]], rank=2), "does not match rank"),
        (job_text(["0", "0"], [["0"]]), "distinct"),
        (job_text([], [["0"]], colour="red"), "colour"),
        ("{not json", "malformed JSON"),
    ],
)
def test_parse_rejects(text, needle):
    with pytest.raises(JobError) as info:
        parse_job(text)
    assert any(needle in e for e in info.value.errors)


def test_parse_reports_every_error():
    text = json.dumps({
        "curve": {"finite_points": ["0", "x"], "include_infinity": False},
        "connection": {"rank": 2, "matrix": [["1/(t-3)"]]},
    })
    with pytest.raises(JobError) as info:
        parse_job(text)
    assert len(info.value.errors) == 4


def test_cohomology_json_on_affine_line(write_job, capsys):
    code, out = run(capsys, "cohomology", write_job([], [["0"]]), "--json")
    report = json.loads(out)
    assert code == 0
    assert report["schema_version"] == 1
    assert set(report) == {"schema_version", "job", "h_X", "h_boundary", "h_c", "pairings", "euler", "tate", "diagnostics"}
    assert report["h_X"]["dims"] == [1, 0] and report["h_c"]["dims"] == [0, 0, 1]


def test_json_is_byte_stable(write_job, capsys):
    path = write_job(["0", "1"], [["1/t", "t"], ["1/(t-1)^2", "0"]])
    first = run(capsys, "cohomology", path, "--json", "--verbose")
    second = run(capsys, "cohomology", path, "--json", "--verbose")
    assert first == second and first[0] == 0


def test_duality_table_on_gm(write_job, capsys):
    code, out = run(capsys, "duality", write_job(["0"], [["0"]]))
    assert code == 0
    assert "H0(bd,E) x H1(bd,E*)     shape [2, 2] rank 2 perfect True" in out


def test_other_commands(write_job, capsys):
    path = write_job(["0"], [["-1/t^2"]])
    assert run(capsys, "boundary", path, "--point", "inf", "--json")[0] == 0
    assert run(capsys, "compact", path, "--verbose")[0] == 0
    code, out = run(capsys, "tangent", path, "--json")
    assert code == 0 and json.loads(out)["h_X"]["tangent"] == {"-1": 1, "0": 1, "1": 0}
    code, out = run(capsys, "residues", path, "--form", "1/t + 3 dt", "--json")
    assert code == 0 and json.loads(out)["pairings"]["residues"] == {"0": "1", "inf": "-1"}
    code, out = run(capsys, "tate", "--twist", "-1", "--depth", "3", "--json")
    assert code == 0 and json.loads(out)["tate"]["serre"]["ok"]
    code, out = run(capsys, "tate", path, "--twist", "2", "--depth", "2", "--json")
    assert code == 0 and json.loads(out)["tate"]["hodge"]["matches"]


def test_selftest(capsys):
    code, out = run(capsys, "selftest")
    assert code == 0 and "FAILED" not in out


def test_exit_codes(write_job, tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2")
    assert run(capsys, "cohomology", str(bad))[0] == 2
    assert run(capsys, "cohomology", str(tmp_path / "missing.json"))[0] == 2
    assert run(capsys, "residues", write_job(["0"], [["0"]]), "--form", "1/(t-4) dt")[0] == 2
    code, out = run(capsys, "cohomology", write_job(["0"], [["1/t^4"]]), "--max-truncation", "8", "--json")
    assert code == 3 and "did not stabilize" in json.loads(out)["diagnostics"]["error"]
