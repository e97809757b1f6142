import json

import pytest
from click.testing import CliRunner

from dsdomain.cli.main import ds

E1 = [[1, 0, 0], [0, 0, 0], [0, 0, 0]]
I3 = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]


@pytest.fixture
def runner():
    return CliRunner()


def test_build_example(runner):
    result = runner.invoke(ds, ["build", "--example"])
    assert result.exit_code == 0, result.output
    payload = json.loads(result.output)
    assert payload["counts"]["0"] == 6
    assert payload["bounded"] is True
    assert len(payload["facets"]) == 6


def test_check_exact_example(runner):
    result = runner.invoke(ds, ["check-exact", "--example"])
    assert result.exit_code == 0, result.output


def test_poset_example(runner):
    result = runner.invoke(ds, ["poset", "--example"])
    assert result.exit_code == 0, result.output
    assert len(json.loads(result.output)["satake_components"]) == 13


def test_busemann_eval_from_stdin(runner):
    request = {"kind": "type0", "alpha": E1, "reference": I3, "point": [[2, 0, 0], [0, 1, 0], [0, 0, "1/2"]], "level": 1}
    result = runner.invoke(ds, ["busemann-eval", "-"], input=json.dumps(request))
    assert result.exit_code == 0, result.output
    payload = json.loads(result.output)
    assert payload["value"] == "1/2"
    assert payload["values"] == [{"value": "1/2", "inside": True}]


def test_busemann_eval_rejects_unknown_fields(runner):
    request = {"alpha": E1, "reference": I3, "pts": [I3]}
    result = runner.invoke(ds, ["busemann-eval", "-"], input=json.dumps(request))
    assert result.exit_code == 1
    assert "ValidationError" in result.output


def test_busemann_eval_needs_a_point(runner):
    result = runner.invoke(ds, ["busemann-eval", "-"], input=json.dumps({"alpha": E1, "reference": I3}))
    assert result.exit_code == 2


def test_asymptotic_from_stdin(runner):
    spec = {"kind": "typek", "alpha": E1, "component": [[1, 0, 0], [0, 1, 0]], "reference": I3}
    request = {"spec": spec, "beta": [[1, 0, 0], [0, 1, 0], [0, 0, 0]], "Y": I3}
    result = runner.invoke(ds, ["asymptotic", "-"], input=json.dumps(request))
    assert result.exit_code == 0, result.output
    payload = json.loads(result.output)
    assert payload["tag"] == "finite"
    assert payload["column"] == 2
    assert payload["value"] == pytest.approx(1.0)


def test_interior_alpha_is_rejected(runner):
    request = {"alpha": I3, "reference": I3, "points": [I3]}
    result = runner.invoke(ds, ["busemann-eval", "-"], input=json.dumps(request))
    assert result.exit_code == 1
    assert "BusemannPreconditionError" in result.output


def test_missing_input_is_a_usage_error(runner):
    assert runner.invoke(ds, ["build"]).exit_code == 2


def test_proptest(runner):
    result = runner.invoke(ds, ["proptest", "--suite", "interlacing", "--trials", "10"])
    assert result.exit_code == 0, result.output


def test_slice_from_stdin(runner):
    request = {"busemann": {"alpha": E1, "reference": I3}, "s_range": [0, 1], "t_range": [0, 1],
               "resolution": [2, 2]}
    result = runner.invoke(ds, ["slice", "-"], input=json.dumps(request))
    assert result.exit_code == 0, result.output
    lines = [line for line in result.output.splitlines() if line]
    assert lines[0] == "s,t,value,in_1"
    assert len(lines) == 5


def test_bad_config(runner, tmp_path):
    path = tmp_path / "settings.json"
    path.write_text(json.dumps({"bogus": 1}))
    result = runner.invoke(ds, ["--config", str(path), "poset", "--example"])
    assert result.exit_code == 1
    assert "ValidationError" in result.output


def test_fixed_point_example(runner):
    result = runner.invoke(ds, ["fixed-point", "--example"])
    assert result.exit_code == 0, result.output
    payload = json.loads(result.output)
    assert payload["fixed_point"][0] == ["0", "0", "0"]
    assert len(payload["word"]) > 1
    assert payload["rank"] in (1, 2)


def test_express_example(runner):
    result = runner.invoke(ds, ["express", "--example", "--depth", "2"])
    assert result.exit_code == 0, result.output
    assert json.loads(result.output)["ok"] is True


def test_verify_example_lists_stages(runner):
    result = runner.invoke(ds, ["verify-example", "--samples", "2", "--trials", "5"])
    assert result.exit_code == 0, result.output
    assert "provenance" in result.output
    assert "cycle_invariance" in result.output
