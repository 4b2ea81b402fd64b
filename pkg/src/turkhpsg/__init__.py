"""Typed feature structure HPSG parser for Turkish."""

from .errors import (
    DescriptionError,
    EdgeLimitExceeded,
    GrammarError,
    LexiconError,
    ParseError,
    SignatureError,
    UnificationFailure,
    UnknownTokenError,
)
from .grammar import Grammar, load_bundled, load_grammar
from .parser import Parser, parse, tokenize
from .tfs import parse_description, render_avm, subsumes, unify

__all__ = [
    "DescriptionError", "EdgeLimitExceeded", "GrammarError", "LexiconError", "ParseError",
    "SignatureError", "UnificationFailure", "UnknownTokenError", "Grammar", "load_bundled",
    "load_grammar", "Parser", "parse", "tokenize", "parse_description", "render_avm",
    "subsumes", "unify",
]
