"""Job files, reports, determinism, exit codes, CLI surface."""

import json
import subprocess
import sys

import pytest

from charp.errors import ParseError
from charp.jobs import parse_job_file, parse_job_text, run_job, validate_job
from charp.report import report_to_json, report_to_tsv

QUADRIC_JOB = """\
# quadric cone at the origin
p = 7
tolerance = 0.01

[component]
vars = x y z
ideal = x*y - z^2

[task hk]
component = 0
point = 0 0 0
e_max = 2

[task classify]
point = 0 0 0
e_max = 2
"""

PRODUCT_JOB = """\
p = 5

[component]
vars =
ideal =

[component]
vars =
ideal =

[task global_hk]
samples = 0:() 1:()
e_max = 2
"""


def _write(tmp_path, text, name="job.charp"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


# -- parsing -----------------------------------------------------------------

def test_parse_text_job():
    job = validate_job(parse_job_text(QUADRIC_JOB))
    assert job["p"] == 7
    assert job["components"][0]["vars"] == ["x", "y", "z"]
    assert job["tasks"][0]["kind"] == "hk"
    assert job["tasks"][1]["kind"] == "classify"


def test_unknown_keys_are_hard_errors():
    with pytest.raises(ParseError):
        parse_job_text("p = 5\nbogus = 1\n")
    with pytest.raises(ParseError):
        parse_job_text("p = 5\n[task hk]\nwhatever = 3\n")
    with pytest.raises(ParseError):
        parse_job_text("p = 5\n[task frobnicate]\n")


def test_json_job_equivalent(tmp_path):
    job_json = {
        "p": 7,
        "components": [{"vars": ["x", "y", "z"], "ideal": ["x*y - z^2"]}],
        "tasks": [{"kind": "hk", "component": 0, "point": [0, 0, 0], "e_max": 2}],
    }
    p1 = _write(tmp_path, json.dumps(job_json), "a.json")
    p2 = _write(tmp_path, QUADRIC_JOB.replace("[task classify]\npoint = 0 0 0\ne_max = 2\n", ""))
    r1 = run_job(parse_job_file(str(p1)))
    r2 = run_job(parse_job_file(str(p2)))
    assert r1["tasks"][0]["rows"] == r2["tasks"][0]["rows"]


def test_sample_syntax():
    job = validate_job(parse_job_text(PRODUCT_JOB))
    assert job["tasks"][0]["samples"] == [
        {"component": 0, "point": []},
        {"component": 1, "point": []},
    ]


# -- execution ---------------------------------------------------------------

def test_run_job_quadric():
    job = validate_job(parse_job_text(QUADRIC_JOB))
    report = run_job(job)
    assert report["status"] == "ok"
    hk_task = report["tasks"][0]
    rows = hk_task["rows"]
    assert [r["lambda"] for r in rows] == [73, 3601]
    # normalized values approach 3/2 (from below for the quadric cone)
    v1, v2 = (float(r["norm"]["decimal"]) for r in rows)
    assert abs(v2 - 1.5) < abs(v1 - 1.5) < 0.011
    flags = report["tasks"][1]["flags"]
    assert flags["hl_satisfied"] and flags["hl_near_equality"]


def test_run_job_product_global():
    job = validate_job(parse_job_text(PRODUCT_JOB))
    report = run_job(job)
    assert report["status"] == "ok"
    task = report["tasks"][0]
    assert task["value"]["fraction"] == "1/1"
    assert task["gamma"]["z_is_spec"] is True


def test_empty_task_list_ok():
    report = run_job(validate_job(parse_job_text("p = 5\n[component]\nvars = x\nideal =\n")))
    assert report["status"] == "ok"
    assert report["tasks"] == []


def test_task_error_is_embedded():
    job = validate_job(parse_job_text(
        "p = 5\n[component]\nvars = x y\nideal = x*y\n"
        "[task nu]\npoint = 0 0\na = x\ne = 1\n"))
    # nu of an ideal that is zero modulo I? (x) is nonzero mod (xy): runs fine
    report = run_job(job)
    assert report["status"] == "ok"
    job2 = validate_job(parse_job_text(
        "p = 5\n[component]\nvars = x y\nideal = x\n"
        "[task nu]\npoint = 0 0\na = x\ne = 1\n"))
    report2 = run_job(job2)
    assert report2["status"] == "error"
    assert "ZeroIdeal" in report2["tasks"][0]["error"]


def test_missing_required_task_keys_rejected():
    with pytest.raises(ParseError):
        validate_job(parse_job_text(
            "p = 5\n[component]\nvars = x\nideal =\n[task pair]\npoint = 0\n"))
    with pytest.raises(ParseError):
        validate_job(parse_job_text(
            "p = 5\n[component]\nvars = x\nideal =\n[task global_hk]\ne_max = 2\n"))


def test_component_index_out_of_range_is_task_error():
    job = validate_job(parse_job_text(
        "p = 5\n[component]\nvars = x\nideal =\n"
        "[task hk]\ncomponent = 3\npoint = 0\ne_max = 2\n"))
    report = run_job(job)
    assert report["tasks"][0]["status"] == "error"
    assert "out of range" in report["tasks"][0]["error"]
    job2 = validate_job(parse_job_text(
        "p = 5\n[component]\nvars = x\nideal =\n"
        "[task global_hk]\nsamples = 7:(0)\ne_max = 2\n"))
    report2 = run_job(job2)
    assert report2["tasks"][0]["status"] == "error"


def test_budget_error_isolated_to_task():
    job = validate_job(parse_job_text(
        "p = 5\nbudget_monomials = 10\n"
        "[component]\nvars = x y\nideal =\n"
        "[task hk]\npoint = 0 0\ne_max = 2\n"
        "[task fedder]\npoint = 0 0\n"))
    report = run_job(job)
    assert report["tasks"][0]["status"] == "error"
    assert "ResourceBudget" in report["tasks"][0]["error"]
    assert report["tasks"][1]["status"] == "ok"  # other tasks complete


def test_parallel_jobs_match_sequential():
    job = validate_job(parse_job_text(QUADRIC_JOB))
    seq = run_job(job, jobs=1)
    par = run_job(job, jobs=2)
    assert report_to_tsv(seq) == report_to_tsv(par)


# -- determinism ---------------------------------------------------------------

def test_tsv_byte_identical():
    job = validate_job(parse_job_text(QUADRIC_JOB))
    a = report_to_tsv(run_job(job))
    b = report_to_tsv(run_job(validate_job(parse_job_text(QUADRIC_JOB))))
    assert a == b
    assert a.startswith("task\tcomponent\tpoint\te\tq\tlambda\tnorm\ta_e\ts_e")


def test_json_identical_modulo_wall_time():
    job = validate_job(parse_job_text(QUADRIC_JOB))
    r1 = run_job(job)
    r2 = run_job(validate_job(parse_job_text(QUADRIC_JOB)))
    r1.pop("wall_time_s")
    r2.pop("wall_time_s")
    assert report_to_json(r1) == report_to_json(r2)


# -- CLI ---------------------------------------------------------------------

def _cli(args, **kw):
    return subprocess.run([sys.executable, "-m", "charp.cli", *args],
                          capture_output=True, text=True, **kw)


def test_cli_run_writes_reports(tmp_path):
    path = _write(tmp_path, QUADRIC_JOB, "quadric.charp")
    res = _cli(["run", str(path)])
    assert res.returncode == 0, res.stderr
    tsv = (tmp_path / "quadric.report.tsv").read_text()
    assert "3601" in tsv
    data = json.loads((tmp_path / "quadric.report.json").read_text())
    assert data["status"] == "ok"
    assert "wall_time_s" in data


def test_cli_composite_p_exits_1(tmp_path):
    path = _write(tmp_path, "p = 9\n[component]\nvars = x\nideal =\n")
    res = _cli(["run", str(path)])
    assert res.returncode == 1
    assert "NotPrime" in res.stderr or "not prime" in res.stderr


def test_cli_parse_error_exits_1(tmp_path):
    path = _write(tmp_path, "p = 5\nnonsense\n")
    res = _cli(["run", str(path)])
    assert res.returncode == 1


def test_cli_task_error_exits_2(tmp_path):
    path = _write(tmp_path,
                  "p = 5\nbudget_monomials = 10\n"
                  "[component]\nvars = x y\nideal =\n"
                  "[task hk]\npoint = 0 0\ne_max = 2\n")
    res = _cli(["run", str(path)])
    assert res.returncode == 2


def test_cli_json_only(tmp_path):
    path = _write(tmp_path, QUADRIC_JOB, "q.charp")
    res = _cli(["run", str(path), "--json-only"])
    assert res.returncode == 0
    assert (tmp_path / "q.report.json").exists()
    assert not (tmp_path / "q.report.tsv").exists()


def test_cli_env_budget_cap(tmp_path):
    import os

    path = _write(tmp_path, QUADRIC_JOB, "q2.charp")
    env = dict(os.environ, CHARP_BUDGET_MONOMIALS="10")
    res = _cli(["run", str(path)], env=env)
    assert res.returncode == 2  # capped budget makes the hk task fail


def test_cli_explain():
    res = _cli(["explain", "fedder"])
    assert res.returncode == 0
    assert "m^[p]" in res.stdout
    res = _cli(["explain", "hk"])
    assert "Kunz" in res.stdout


def test_demo_jobs_run_clean(tmp_path):
    import pathlib
    import shutil

    demo = pathlib.Path(__file__).resolve().parent.parent / "demo"
    for name in ("quadric.charp", "product.charp"):
        src = demo / name
        if not src.exists():
            pytest.skip("demo jobs not present")
        path = tmp_path / name
        shutil.copy(src, path)
        res = _cli(["run", str(path)])
        assert res.returncode == 0, res.stderr


def test_cli_run_byte_identical(tmp_path):
    p1 = _write(tmp_path, QUADRIC_JOB, "r1.charp")
    p2 = _write(tmp_path, QUADRIC_JOB, "r2.charp")
    assert _cli(["run", str(p1)]).returncode == 0
    assert _cli(["run", str(p2)]).returncode == 0
    t1 = (tmp_path / "r1.report.tsv").read_bytes()
    t2 = (tmp_path / "r2.report.tsv").read_bytes()
    assert t1 == t2
