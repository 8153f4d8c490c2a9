import json
import re
import shutil

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import CORPUS, ROOT
from dtangent.cli import main
from dtangent.jobs import (
    EXIT_INPUT,
    EXIT_INVARIANT,
    EXIT_OK,
    EXIT_RESOURCE,
    JobError,
    explain,
    format_job,
    parse_job,
    run_corpus,
    run_job,
)
from dtangent.poly import NotOnLocusError, PointedModel, Polynomial

NODE = """\
variables: [x, y]
ideal: ["x*y"]
point: ["0", "0"]
max_index: 4
tasks: [all]
"""


def test_parse_node_job():
    job = parse_job(NODE)
    assert job.model.ngens == 1
    assert job.tasks == ("all",) and job.max_index == 4
    assert job.expanded_tasks() == ["tangent", "classify", "bracket", "cone", "obstruct"]


def test_point_off_locus():
    with pytest.raises(NotOnLocusError, match="point not on zero locus"):
        parse_job(NODE.replace('["0", "0"]', '["1", "1"]'))


def test_python_power_is_a_syntax_error_with_position():
    with pytest.raises(JobError) as err:
        parse_job(NODE.replace('"x*y"', '"x**2"'))
    assert err.value.line == 2 and err.value.column == 11
    assert "'^'" in str(err.value)


@pytest.mark.parametrize(
    "old, new, fragment",
    [
        ('"x*y"', '"x*w"', "unknown variable"),
        ("[all]", "[everything]", "unknown task"),
        ('["0", "0"]', '["0"]', "coordinates"),
        ('["0", "0"]', "[0.5, 0]", "decimal"),
        ("max_index: 4", "max_index: 0", "at least 1"),
        ("[all]", "[cosection]", "needs a 'cosection'"),
        ("ideal:", "ideel:", "unknown field"),
        ('["x*y"]', '["x*y"', "syntax error"),
    ],
)
def test_input_errors(old, new, fragment):
    with pytest.raises(JobError, match=fragment):
        parse_job(NODE.replace(old, new))


def test_cosection_length_is_checked():
    with pytest.raises(JobError, match="components"):
        parse_job(NODE + 'cosection: ["1", "2"]\n')


def test_node_report():
    data = run_job(parse_job(NODE)).data
    r = data["results"]
    assert r["tangent"]["dims"] == [2, 1, 0, 0]
    assert r["classify"]["kind"] == "LCI"
    assert r["cone"]["cone_ideal"] == ["x*y"]
    assert r["bracket"]["tables"]["T1 x T1"]["matrix"] == [["0", "1"], ["1", "0"]]
    assert data["status"] == "ok"


def test_fat_point_report():
    job = parse_job(NODE.replace('["x*y"]', '["x^2", "x*y", "y^2"]'))
    data = run_job(job).data
    assert data["results"]["tangent"]["dims"] == [2, 3, 2, 3]
    assert data["results"]["classify"]["kind"] == "General"


def test_resource_cap_gives_status_three():
    text = NODE.replace('["x*y"]', '["x^2", "x*y", "y^2"]') + "caps: {generators: 6}\n"
    report = run_job(parse_job(text))
    assert report.status == EXIT_RESOURCE
    assert report.data["status"] == "resource cap"


def test_invalid_cosection_is_an_input_error():
    report = run_job(parse_job(NODE + 'cosection: ["1"]\n'))
    assert report.status == EXIT_INPUT
    assert report.data["results"]["cosection"]["valid"] is False


def test_timing_is_opt_in():
    job = parse_job(NODE)
    assert "timing" not in run_job(job).data
    assert "tangent" in run_job(job, timing=True).data["timing"]


@pytest.mark.parametrize("path", sorted(CORPUS.glob("*.yaml")), ids=lambda p: p.stem)
def test_corpus_round_trip_and_determinism(path):
    job = parse_job(path.read_text())
    assert parse_job(format_job(job)) == job
    assert run_job(job).to_json() == run_job(job).to_json()


coeff = st.integers(-3, 3)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 2), st.integers(0, 2), coeff), min_size=1, max_size=4),
       st.sampled_from(["tangent", "cone", "classify"]), st.integers(1, 5), st.none() | st.integers(0, 99))
def test_format_parse_round_trip(terms, task, n, seed):
    poly = Polynomial(("a", "b"), {(i, j): c for i, j, c in terms if i + j > 0})
    text = f'variables: [a, b]\nideal: ["{poly}"]\nmax_index: {n}\ntasks: [{task}]\n'
    text += f"sweep: {{order: 2, grid: 1, seed: {'null' if seed is None else seed}}}\n"
    job = parse_job(text)
    assert parse_job(format_job(job)) == job
    assert job.model == PointedModel(("a", "b"), (poly,), (0, 0))


def test_shipped_corpus_passes():
    result = run_corpus(CORPUS, write_missing=False)
    assert result.failed == 0 and result.missing == 0
    assert result.passed >= 8
    assert result.exit_code == EXIT_OK


def test_empty_corpus(tmp_path):
    assert run_corpus(tmp_path).summary() == "0 jobs"


def test_corrupted_golden_fails_with_diff(tmp_path):
    shutil.copy(CORPUS / "02_node.yaml", tmp_path)
    golden = json.loads((CORPUS / "02_node.expected.json").read_text())
    golden["results"]["tangent"]["dims"] = [2, 1, 0, 1]
    (tmp_path / "02_node.expected.json").write_text(json.dumps(golden, sort_keys=True, indent=2) + "\n")
    result = run_corpus(tmp_path)
    assert result.failed == 1 and result.exit_code == EXIT_INVARIANT
    assert any(line.startswith("  -") for line in result.lines)


def test_missing_golden_writes_candidate(tmp_path):
    shutil.copy(CORPUS / "01_parabola.yaml", tmp_path)
    result = run_corpus(tmp_path)
    assert result.missing == 1 and result.exit_code == EXIT_OK
    assert (tmp_path / "01_parabola.candidate.json").exists()


def test_explain_lists_generators_and_matrices():
    text = explain(parse_job(NODE.replace('["x*y"]', '["x^2", "x*y", "y^2"]')))
    assert "T2_1 : 2 : y*e1 - x*e2" in text
    assert "d_2: V_2 (2) -> V_1 (3), rank 0" in text


def test_cli_exit_codes(tmp_path, capsys):
    good = tmp_path / "node.yaml"
    good.write_text(NODE)
    assert main(["compute", str(good)]) == EXIT_OK
    assert "T1 = 2" in capsys.readouterr().out
    assert main(["compute", str(good), "--structured", "--task", "tangent", "--max-index", "2"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["results"]["tangent"]["dims"] == [2, 1]
    bad = tmp_path / "bad.yaml"
    bad.write_text(NODE.replace('["0", "0"]', '["1", "1"]'))
    assert main(["compute", str(bad)]) == EXIT_INPUT
    assert "point not on zero locus" in capsys.readouterr().err
    assert main(["compute", str(tmp_path / "missing.yaml")]) == EXIT_INPUT
    capped = tmp_path / "capped.yaml"
    capped.write_text(NODE.replace('["x*y"]', '["x^2", "x*y", "y^2"]') + "caps: {generators: 6}\n")
    assert main(["compute", str(capped)]) == EXIT_RESOURCE
    assert main(["explain", str(good)]) == EXIT_OK
    assert main(["corpus", str(CORPUS)]) == EXIT_OK


def test_documented_examples_run():
    text = (ROOT / "docs" / "job_format.md").read_text()
    blocks = re.findall(r"```yaml\n(.*?)```", text, re.S)
    assert len(blocks) == 3
    for block in blocks:
        assert run_job(parse_job(block)).status == EXIT_OK
