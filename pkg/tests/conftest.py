import pytest
from hypothesis import HealthCheck, settings

from turkhpsg.grammar import demo_types, load_bundled
from turkhpsg.parser import Parser
from turkhpsg.tfs import TypeSystem

settings.register_profile("default", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def grammar():
    return load_bundled()


@pytest.fixture(scope="session")
def parser(grammar):
    return Parser(grammar)


@pytest.fixture(scope="session")
def types(grammar):
    """The grammar's signature without sort constraints."""
    return TypeSystem(grammar.signature)


@pytest.fixture(scope="session")
def demo():
    return demo_types()


@pytest.fixture(scope="session")
def lexicon(grammar):
    return grammar.lexicon


def count(parser, sentence):
    return len(parser.parse(sentence))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.RESULTS):
            terminalreporter.write_line(line)
