from __future__ import annotations

import io
import json

import pytest

from k3lattice import cli

ACCEPTANCE: dict[str, str] = {}


def run_cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def run_json(*argv):
    code, out, err = run_cli(*argv, "--json")
    return code, json.loads(out) if out else None


@pytest.fixture
def cli_runner():
    return run_cli


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: (int("".join(c for c in k if c.isdigit())), k)):
        terminalreporter.write_line(ACCEPTANCE[key])
