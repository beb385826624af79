from __future__ import annotations

from importlib.resources import files

import pytest

from socheck.manifest import Manifest, parse_manifest, parse_term

_criteria: dict[int, tuple[str, str]] = {}


def load(name: str) -> Manifest:
    return parse_manifest(files("socheck").joinpath("corpus", f"{name}.sol").read_text())


def term(m: Manifest, text: str, allow_free: bool = False):
    return parse_term(m.signature, text, allow_free=allow_free)


@pytest.fixture(scope="session")
def corpus():
    cache: dict[str, Manifest] = {}

    def get(name: str) -> Manifest:
        if name not in cache:
            cache[name] = load(name)
        return cache[name]

    return get


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    num, desc = marker.args
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        prev = _criteria.get(num, ("PASS", desc))[0]
        _criteria[num] = ("PASS" if rep.passed and prev == "PASS" else "FAIL", desc)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for num in sorted(_criteria):
        status, desc = _criteria[num]
        terminalreporter.write_line(f"criterion {num:2d}: {status}  {desc}")
