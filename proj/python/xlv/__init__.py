"""Trace-driven validation of translated code fragments."""

import json
import sys
import unittest

from ._xlv import (
    SCHEMA_VERSION,
    ConfigError,
    DepthExceededError,
    EmitError,
    FieldAssignError,
    MockExhaustedError,
    PayloadError,
    SchemaError,
    Session,
    UnboundReferenceError,
    UnknownTypeError,
    VersionError,
    XlvError,
    build_order,
    canonical_trace,
    classify_tests,
    count_invocations,
    emit_tests,
    load_trace,
    reconstruct,
    run_cli,
    semantic_equal,
)

__all__ = [
    "SCHEMA_VERSION",
    "ConfigError",
    "DepthExceededError",
    "EmitError",
    "FieldAssignError",
    "MockExhaustedError",
    "PayloadError",
    "SchemaError",
    "Session",
    "UnboundReferenceError",
    "UnknownTypeError",
    "VersionError",
    "XlvError",
    "build_order",
    "canonical_trace",
    "classify_tests",
    "count_invocations",
    "emit_tests",
    "load_trace",
    "main",
    "reconstruct",
    "run_cli",
    "semantic_equal",
]

RESULT_TAG = "XLV-RESULT "


def _failed_checks(entries):
    checks = []
    for test, _ in entries:
        check = getattr(test, "params", {}).get("check")
        if check is not None:
            checks.append(check)
    return checks


def _summarize(result):
    checks = _failed_checks(result.errors) + _failed_checks(result.failures)
    if result.errors:
        return "fail_runtime", result.errors[0][1], checks
    if result.failures:
        return "fail_assert", result.failures[0][1], checks
    if result.unexpectedSuccesses:
        return "fail_assert", "unexpected success", checks
    return "pass", "", checks


def main(module="__main__"):
    """Runs the test cases of `module`, prints one result line and exits
    0 (pass), 1 (assertion failure) or 2 (runtime error)."""
    suite = unittest.defaultTestLoader.loadTestsFromModule(sys.modules[module])
    result = unittest.TextTestRunner(stream=sys.stderr, verbosity=1).run(suite)
    status, message, checks = _summarize(result)
    line = json.dumps({"status": status, "message": message, "failed_checks": checks})
    sys.stdout.write(RESULT_TAG + line + "\n")
    sys.stdout.flush()
    sys.exit({"pass": 0, "fail_assert": 1}.get(status, 2))
