"""Loading a grammar bundle: signature, constraints, rules, clauses and lexicon.

A bundle is a directory of ``.ale`` source files.  The bundled grammar lives
in the package's ``data`` directory; ``TURKHPSG_GRAMMAR`` points elsewhere.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

from . import morphophon
from .descr import Program, read_program
from .errors import GrammarError
from .lexicon import Lexicon, load_lexicon
from .principles import GoalEngine
from .signature import Signature, load_signature
from .tfs import TypeSystem

ENV_VAR = "TURKHPSG_GRAMMAR"

# read in this order; files missing from a bundle are skipped, except the signature
SOURCE_FILES = (
    "constraints.ale", "rules.ale", "clauses.ale", "lexicon.ale", "lexrules.ale",
    "reconstructed.ale", "extension_lexicon.ale",
)


@dataclass
class Limits:
    max_edges: int = 20000
    depth: int = 4


@dataclass
class Grammar:
    signature: Signature
    types: TypeSystem
    program: Program
    engine: GoalEngine
    lexicon: Lexicon
    limits: Limits = field(default_factory=Limits)
    source: str = ""
    _rules: list | None = None

    @property
    def rules(self):
        """Compiled phrase structure rules."""
        if self._rules is None:
            from .parser import compile_rule

            self._rules = [compile_rule(r, self) for r in self.program.rules]
        return self._rules

    def with_limits(self, max_edges: int | None = None, depth: int | None = None) -> "Grammar":
        """A view of this grammar with other limits; everything else is shared."""
        lim = Limits(self.limits.max_edges if max_edges is None else max_edges,
                     self.limits.depth if depth is None else depth)
        g = dataclasses.replace(self, limits=lim)
        g._rules = self.rules
        return g

    def sentence_templates(self):
        """Structures a complete sentence must be subsumed by."""
        from .tfs import describe

        return describe(("macro", "f_sent", []), self.types)


def _read_dir(path: Path) -> tuple[str, Program]:
    sig_file = path / "signature.ale"
    if not sig_file.is_file():
        raise GrammarError(f"no signature.ale in grammar bundle {path}")
    prog = Program()
    for name in SOURCE_FILES:
        f = path / name
        if f.is_file():
            prog.extend(read_program(f.read_text(encoding="utf-8"), name))
    return sig_file.read_text(encoding="utf-8"), prog


def build_grammar(sig_text: str, prog: Program, source: str = "") -> Grammar:
    sig = load_signature(sig_text)
    types = TypeSystem(sig, prog.cons, prog.macros)
    engine = GoalEngine(types, prog.clauses)
    kb = morphophon.KnowledgeBase(prog.facts)
    lex = load_lexicon([prog], types, engine, kb)
    limits = Limits(depth=prog.directives.get("lex_rule_depth", 4))
    return Grammar(sig, types, prog, engine, lex, limits, source)


def load_grammar(path: str | os.PathLike | None = None) -> Grammar:
    """Grammar from a bundle directory; defaults to the environment or the bundled one."""
    if path is None:
        path = os.environ.get(ENV_VAR)
    if path is None:
        return load_bundled()
    p = Path(path)
    if not p.is_dir():
        raise GrammarError(f"grammar bundle {p} is not a directory")
    sig_text, prog = _read_dir(p)
    return build_grammar(sig_text, prog, str(p))


@lru_cache(maxsize=1)
def demo_types() -> TypeSystem:
    """The small signature used for the introductory AVM examples."""
    text = (resources.files("turkhpsg") / "data" / "demo_signature.ale").read_text(encoding="utf-8")
    return TypeSystem(load_signature(text))


@lru_cache(maxsize=1)
def load_bundled() -> Grammar:
    with resources.as_file(resources.files("turkhpsg") / "data") as d:
        sig_text, prog = _read_dir(Path(d))
    return build_grammar(sig_text, prog, "bundled")
