#!/usr/bin/env python3
"""Run the acceptance criteria and print one PASS/FAIL line each.

Exit status is 0 only if every criterion passes.
"""

import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent


class Scorecard:
    def __init__(self):
        self.lines = []

    def pytest_sessionfinish(self, session):
        mod = sys.modules.get("test_acceptance")
        if mod is not None:
            self.lines = sorted(mod.RESULTS)


def main() -> int:
    card = Scorecard()
    code = pytest.main(["-q", "-p", "no:cacheprovider", "--no-header", "--tb=short",
                        str(ROOT / "tests" / "test_acceptance.py")], plugins=[card])
    print()
    for line in card.lines:
        print(line)
    return int(code)


if __name__ == "__main__":
    sys.exit(main())
