import json
import math
import os
import pathlib
import subprocess
import sys

import pytest

import xlv

ROOT = pathlib.Path(__file__).resolve().parents[2]
FIXTURE = ROOT / "tests" / "fixtures" / "cli_mini"
TRACES = sorted((FIXTURE / "traces").glob("*.trace"))


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    out = tmp_path_factory.mktemp("pipeline")
    config = json.loads((FIXTURE / "config.json").read_text())
    config["out_dir"] = str(out)
    config["runtime_path"] = [str(pathlib.Path(xlv.__file__).resolve().parents[1])]
    config["resolver"]["rules"] = str(FIXTURE / "rules.json")
    config["docs"]["root"] = str(FIXTURE / "docs")
    for project in config["projects"]:
        for key in ("source_root", "schema", "trace_dir", "translated_src_dir", "test_results"):
            project[key] = str(FIXTURE / project[key])
    path = out / "config.json"
    path.write_text(json.dumps(config))
    code, stdout, stderr = xlv.run_cli(["resolve-types", "--config", str(path), "--offline"])
    assert code == 0, stderr
    return path, out


def test_semantic_equal_tolerates_float_noise():
    assert xlv.semantic_equal(0.1 + 0.2, 0.3)
    assert xlv.semantic_equal([1, {"a": (2, 3)}], [1, {"a": (2, 3)}])
    assert not xlv.semantic_equal([1, 2], [2, 1])
    assert xlv.semantic_equal(math.nan, math.nan)


def test_fixture_traces_are_canonical():
    assert len(TRACES) >= 30
    for trace in TRACES:
        text = trace.read_text()
        assert xlv.canonical_trace(text) == text
        assert xlv.count_invocations(text) > 0


def test_malformed_traces_raise_schema_errors():
    with pytest.raises(xlv.XlvError):
        xlv.canonical_trace('{"schema_version": "1"}')


def test_build_order_puts_callees_first():
    order = xlv.build_order(["A.f()V", "B.g()V", "C.h()V"], [("A.f()V", "B.g()V"), ("B.g()V", "C.h()V")])
    assert order == ["C.h()V", "B.g()V", "A.f()V"]


def test_classify_tests():
    assert xlv.classify_tests([]) == ("NT", "none")
    assert xlv.classify_tests(["pass", "fail_assert"]) == ("OTF", "AF")
    with pytest.raises(ValueError):
        xlv.classify_tests(["flaky"])


def test_cli_usage_errors():
    code, _, err = xlv.run_cli(["frobnicate"])
    assert code == 4
    assert err


def test_emitted_tests_run_against_committed_translations(pipeline, tmp_path):
    config, out = pipeline
    ctm = (out / "ctm" / "cli_mini.json").read_text()
    schema = (FIXTURE / "schema.json").read_text()
    trace = (FIXTURE / "traces" / "org.example.cli.HelpFormatterTest#testJoinTokens.trace").read_text()
    tests = xlv.emit_tests(schema, ctm, trace)
    assert tests
    env = dict(os.environ)
    env["PYTHONPATH"] = os.pathsep.join(
        [str(FIXTURE / "translated"), str(pathlib.Path(xlv.__file__).resolve().parents[1])]
    )
    for name, source in tests:
        compile(source, name, "exec")
        path = tmp_path / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(source)
        run = subprocess.run([sys.executable, str(path)], env=env, capture_output=True, text=True, timeout=60)
        result = [line for line in run.stdout.splitlines() if line.startswith(xlv.RESULT_TAG)]
        assert result, run.stderr
        assert json.loads(result[-1][len(xlv.RESULT_TAG):])["status"] == "pass", run.stderr


def test_report_on_empty_store(pipeline):
    config, _ = pipeline
    code, text, _ = xlv.run_cli(["report", "--config", str(config)])
    assert code == 0
    assert text.startswith("Subject\tAMF")
