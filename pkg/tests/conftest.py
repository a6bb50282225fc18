from __future__ import annotations

import random

import pytest

from fdcloud.annotate import Lexicon, compile_matcher
from fdcloud.docstore import DocumentStore
from fdcloud.fd_core import FormalContext


def pytest_configure(config):
    config.addinivalue_line(
        "markers",
        "acceptance(name): always print a PASS/FAIL verdict line for this guarantee",
    )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker and report.when == "call":
        verdict = "PASS" if report.passed else "FAIL"
        line = f"acceptance: {marker.args[0]}: {verdict}"
        capman = item.config.pluginmanager.getplugin("capturemanager")
        if capman is not None:
            # write through pytest's capture so the scorecard always shows
            with capman.global_and_fixture_disabled():
                print(line, flush=True)
        else:
            print(line, flush=True)


@pytest.fixture
def store(tmp_path):
    return DocumentStore(tmp_path / "data")


@pytest.fixture
def wheat_matcher():
    lexicon = Lexicon(
        entries={
            "wheat": "c1",
            "wheat rust": "c2",
            "rust": "c3",
            "barley": "c4",
        },
        version="t1",
    )
    return compile_matcher(lexicon)


@pytest.fixture
def small_context():
    return FormalContext(
        objects=frozenset({"doc1", "doc2"}),
        attributes=frozenset({"wheat", "rust"}),
        incidence=frozenset({("doc1", "wheat"), ("doc1", "rust"), ("doc2", "wheat")}),
    )


def random_context(rng: random.Random, max_side: int = 8) -> FormalContext:
    n_obj = rng.randint(1, max_side)
    n_attr = rng.randint(1, max_side)
    objects = frozenset(f"o{i}" for i in range(n_obj))
    attributes = frozenset(f"a{j}" for j in range(n_attr))
    incidence = frozenset(
        (o, a) for o in objects for a in attributes if rng.random() < 0.4
    )
    return FormalContext(objects=objects, attributes=attributes, incidence=incidence)
