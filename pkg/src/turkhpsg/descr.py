"""Reader for the ALE-style grammar source language.

Descriptions are read into small tuple ASTs::

    ('sort', name)            ('var', name)        ('any',)
    ('feat', name, d)         ('and', [d, ...])    ('or', [d, ...])
    ('list', [d, ...], tail)  ('set', [d, ...])    ('macro', name, [d, ...])
    ('patheq', path, path)    ('ineq', d)

``tail`` is None for a closed list.  The same reader handles rule, lexicon,
constraint, macro, definite clause and lexical rule statements, and the
bracketed AVM notation produced by the renderer.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

from .errors import DescriptionError

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+|%[^\n]*)
  | (?P<arrow>--->|===>|\*\*>|:-|=\\=|==)
  | (?P<tag>\#\d+)
  | (?P<str>"[^"]*")
  | (?P<num>\d+)
  | (?P<var>[A-ZÇĞİÖŞÜ_][\w-]*)
  | (?P<name>[^\W\d_A-ZÇĞİÖŞÜ]\w*)
  | (?P<punct>[()\[\]{},;:|@.!<>])
    """,
    re.X,
)


@dataclass
class Tok:
    kind: str
    value: str
    line: int


def tokenize(text: str) -> list[Tok]:
    toks: list[Tok] = []
    pos = 0
    line = 1
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise DescriptionError(f"line {line}: unexpected character {text[pos]!r}")
        kind = m.lastgroup
        val = m.group()
        if kind != "ws":
            if kind == "punct" or kind == "arrow":
                kind = val
            toks.append(Tok(kind, val, line))
        line += val.count("\n")
        pos = m.end()
    toks.append(Tok("eof", "", line))
    return toks


class _Reader:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0
        self.anon = itertools.count()

    # -- token helpers --
    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, kind: str, value: str | None = None) -> bool:
        t = self.tok
        return t.kind == kind and (value is None or t.value == value)

    def at_word(self, word: str) -> bool:
        return self.tok.kind == "name" and self.tok.value == word

    def take(self, kind: str, value: str | None = None) -> Tok:
        t = self.tok
        if t.kind != kind or (value is not None and t.value != value):
            want = value or kind
            raise DescriptionError(f"line {t.line}: expected {want!r}, found {t.value or t.kind!r}")
        self.i += 1
        return t

    def accept(self, kind: str, value: str | None = None) -> bool:
        if self.at(kind, value):
            self.i += 1
            return True
        return False

    def fail(self, msg: str):
        raise DescriptionError(f"line {self.tok.line}: {msg}")

    # -- descriptions --
    def desc(self):
        alts = [self.conj()]
        while self.accept(";"):
            alts.append(self.conj())
        return alts[0] if len(alts) == 1 else ("or", alts)

    def conj(self):
        items = [self.colon()]
        while self.at(",") and not self._stop_comma():
            self.i += 1
            items.append(self.colon())
        return items[0] if len(items) == 1 else ("and", items)

    def _stop_comma(self) -> bool:
        return False

    def colon(self):
        t = self.tok
        if t.kind == "name" and self.peek().kind == ":":
            self.i += 2
            return ("feat", t.value, self.colon())
        return self.primary()

    def primary(self):
        t = self.tok
        k = t.kind
        if k == "name":
            self.i += 1
            return ("sort", t.value)
        if k == "var":
            self.i += 1
            if t.value == "_":
                return ("any",)
            return ("var", t.value)
        if k == "(":
            self.i += 1
            d = self.desc()
            self.take(")")
            return d
        if k == "[":
            lst = self.list_()
            if self.accept("=="):
                other = self.list_()
                return ("patheq", _as_path(lst, t.line), _as_path(other, t.line))
            return lst
        if k == "{":
            self.i += 1
            items = []
            if not self.at("}"):
                items.append(self.colon())
                while self.accept(","):
                    items.append(self.colon())
            self.take("}")
            return ("set", items)
        if k == "@":
            self.i += 1
            name = self.take("name").value
            args = []
            if self.accept("("):
                args.append(self.colon())
                while self.accept(","):
                    args.append(self.colon())
                self.take(")")
            return ("macro", name, args)
        if k == "=\\=":
            self.i += 1
            return ("ineq", self.primary())
        self.fail(f"unexpected {t.value or t.kind!r} in description")

    def list_(self):
        self.take("[")
        if self.accept("]"):
            return ("sort", "e_list")
        items = [self.colon()]
        while self.accept(","):
            items.append(self.colon())
        tail = None
        if self.accept("|"):
            tail = self.colon()
        self.take("]")
        return ("list", items, tail)

    # -- goals --
    def goal(self):
        t = self.tok
        if self.accept("!"):
            return ("cut",)
        if t.kind == "(":
            self.i += 1
            g = self.goals()
            self.take(")")
            return ("conj", g)
        name = self.take("name").value
        if name == "true":
            return ("true",)
        args = []
        if self.accept("("):
            args.append(self.colon())
            while self.accept(","):
                args.append(self.colon())
            self.take(")")
        return ("call", name, args)

    def goals(self) -> list:
        gs = [self.goal()]
        while self.accept(","):
            gs.append(self.goal())
        out = []
        for g in gs:  # flatten nested conjunctions
            if g[0] == "conj":
                out.extend(g[1])
            else:
                out.append(g)
        return out


def _as_path(lst, line):
    if lst == ("sort", "e_list"):
        return ()
    if lst[0] != "list" or lst[2] is not None or any(x[0] != "sort" for x in lst[1]):
        raise DescriptionError(f"line {line}: path equation needs feature lists")
    return tuple(x[1] for x in lst[1])


def parse_term(text: str):
    """Read a single description (no final period)."""
    if looks_like_avm(text):
        return parse_avm(text)
    r = _Reader(text)
    d = r.desc()
    r.accept(".")
    if not r.at("eof"):
        r.fail(f"trailing input {r.tok.value!r}")
    return d


# ---------------------------------------------------------------------------
# AVM notation

def looks_like_avm(text: str) -> bool:
    s = text.strip()
    if re.fullmatch(r"\[\s+\]", s):
        return True
    m = re.match(r"\[\s*(?:[^\W\d_A-ZÇĞİÖŞÜ][\w-]*\s+)?(#\d+\s+)?([A-ZÇĞİÖŞÜ][A-ZÇĞİÖŞÜ0-9_-]*)\s+(\S)", s)
    return bool(m) and m.group(3) not in ",|]"


def parse_avm(text: str):
    r = _Reader(text)
    d = _avm_value(r)
    if not r.at("eof"):
        r.fail(f"trailing input {r.tok.value!r}")
    return d


def _avm_value(r: _Reader):
    parts = []
    if r.at("tag"):
        parts.append(("var", "_T" + r.take("tag").value[1:]))
    t = r.tok
    if t.kind == "[":
        parts.append(_avm_matrix(r))
    elif t.kind == "name":
        r.i += 1
        parts.append(("sort", t.value))
    elif t.kind == "str":
        r.i += 1
        parts.append(_string_ast(t.value[1:-1]))
    elif t.kind == "<":
        r.i += 1
        items = []
        tail = None
        if not r.at(">"):
            items.append(_avm_value(r))
            while r.accept(","):
                items.append(_avm_value(r))
            if r.accept("|"):
                tail = _avm_value(r)
        r.take(">")
        parts.append(("list", items, tail) if items else ("sort", "e_list"))
    elif t.kind == "{":
        r.i += 1
        items = []
        if not r.at("}"):
            items.append(_avm_value(r))
            while r.accept(","):
                items.append(_avm_value(r))
        r.take("}")
        parts.append(("set", items) if items else ("sort", "e_list"))
    elif not parts:
        r.fail(f"unexpected {t.value or t.kind!r} in AVM")
    return parts[0] if len(parts) == 1 else ("and", parts)


def _avm_matrix(r: _Reader):
    r.take("[")
    parts = []
    if r.at("name"):
        parts.append(("sort", r.take("name").value))
    while r.at("var"):
        feat = r.take("var").value.lower().replace("-", "_")
        parts.append(("feat", feat, _avm_value(r)))
    r.take("]")
    if not parts:
        return ("any",)
    return parts[0] if len(parts) == 1 else ("and", parts)


def _string_ast(s: str):
    if not s:
        return ("sort", "e_list")
    return ("list", [("sort", ch) for ch in s], None)


# ---------------------------------------------------------------------------
# statements

@dataclass
class RuleDef:
    name: str
    mother: object
    daughters: list
    goals: list
    line: int


@dataclass
class ClauseDef:
    name: str
    args: list
    body: list
    line: int


@dataclass
class MacroDef:
    name: str
    params: list
    body: object
    line: int


@dataclass
class MorphPat:
    lhs: list
    rhs: list
    guard: object  # ('call', name, args) or None
    line: int = 0


@dataclass
class LexRuleDef:
    name: str
    inp: object
    out: object
    goals: list
    morphs: list
    line: int


@dataclass
class Program:
    """Everything read from one or more grammar source files."""

    rules: list = field(default_factory=list)
    cons: list = field(default_factory=list)  # (sort, ast, line)
    macros: dict = field(default_factory=dict)
    clauses: list = field(default_factory=list)
    lexicon: list = field(default_factory=list)  # (word, ast, line)
    empties: list = field(default_factory=list)  # (ast, line)
    lex_rules: list = field(default_factory=list)
    facts: list = field(default_factory=list)  # prolog: (head, body) with head ('call', ..)
    directives: dict = field(default_factory=dict)

    def extend(self, other: "Program") -> None:
        self.rules += other.rules
        self.cons += other.cons
        for k, v in other.macros.items():
            if k in self.macros:
                raise DescriptionError(f"line {v.line}: macro {k!r} defined twice")
            self.macros[k] = v
        self.clauses += other.clauses
        self.lexicon += other.lexicon
        self.empties += other.empties
        self.lex_rules += other.lex_rules
        self.facts += other.facts
        self.directives.update(other.directives)


def read_program(text: str, source: str = "<grammar>") -> Program:
    """Read every statement of a grammar source file."""
    r = _Reader(text)
    prog = Program()
    try:
        while not r.at("eof"):
            _statement(r, prog)
    except DescriptionError as e:
        raise DescriptionError(f"{source}: {e}") from None
    return prog


def _statement(r: _Reader, prog: Program) -> None:
    t = r.tok
    line = t.line
    if r.accept(":-"):
        # directives: name(value) with a numeric or atomic value
        name = r.take("name").value
        r.take("(")
        v = r.tok
        if v.kind not in ("num", "name"):
            r.fail("directive argument must be a number or an atom")
        r.i += 1
        r.take(")")
        r.take(".")
        prog.directives[name] = int(v.value) if v.kind == "num" else v.value
        return
    if t.kind != "name":
        r.fail(f"unexpected {t.value or t.kind!r} at start of statement")
    nxt = r.peek()
    if t.value == "empty" and nxt.kind != "--->":
        r.i += 1
        prog.empties.append((r.desc(), line))
        r.take(".")
        return
    if nxt.kind == "--->":
        r.i += 2
        prog.lexicon.append((t.value, r.desc(), line))
        r.take(".")
        return
    if nxt.kind == "name" and nxt.value in ("rule", "cons", "macro", "lex_rule"):
        r.i += 2
        kind = nxt.value
        if kind == "cons":
            prog.cons.append((t.value, r.desc(), line))
        elif kind == "macro":
            _add_macro(prog, MacroDef(t.value, [], r.desc(), line))
        elif kind == "rule":
            prog.rules.append(_rule_body(r, t.value, line))
        else:
            prog.lex_rules.append(_lex_rule_body(r, t.value, line))
        r.take(".")
        return
    # name(args) followed by macro / if / :- / .
    r.i += 1
    args = []
    if r.accept("("):
        args.append(r.colon())
        while r.accept(","):
            args.append(r.colon())
        r.take(")")
    if r.at_word("macro"):
        r.i += 1
        params = []
        for a in args:
            if a[0] != "var":
                r.fail("macro parameters must be variables")
            params.append(a[1])
        _add_macro(prog, MacroDef(t.value, params, r.desc(), line))
    elif r.at_word("if"):
        r.i += 1
        prog.clauses.append(ClauseDef(t.value, args, r.goals(), line))
    elif r.accept(":-"):
        prog.facts.append((("call", t.value, args), r.goals()))
    else:
        prog.facts.append((("call", t.value, args), []))
    r.take(".")


def _add_macro(prog: Program, m: MacroDef) -> None:
    if m.name in prog.macros:
        raise DescriptionError(f"line {m.line}: macro {m.name!r} defined twice")
    prog.macros[m.name] = m


def _rule_body(r: _Reader, name: str, line: int) -> RuleDef:
    mother = r.desc()
    r.take("===>")
    dtrs = []
    goals = []
    while True:
        w = r.take("name").value
        r.take(">")
        if w == "cat":
            dtrs.append(r.colon())
        elif w == "goal":
            goals.extend(_flat([r.goal()]))
        else:
            r.fail(f"unknown rule item {w!r}>")
        if not r.accept(","):
            break
    return RuleDef(name, mother, dtrs, goals, line)


def _flat(gs):
    out = []
    for g in gs:
        if g[0] == "conj":
            out.extend(g[1])
        else:
            out.append(g)
    return out


def _lex_rule_body(r: _Reader, name: str, line: int) -> LexRuleDef:
    inp = r.desc()
    r.take("**>")
    out = r.desc()
    goals = []
    if r.at_word("if"):
        r.i += 1
        goals = r.goals()
    if not r.at_word("morphs"):
        r.fail("expected 'morphs'")
    r.i += 1
    pats = [_morph(r)]
    while r.accept(","):
        pats.append(_morph(r))
    return LexRuleDef(name, inp, out, goals, pats, line)


def _morph(r: _Reader) -> MorphPat:
    line = r.tok.line
    lhs = _segments(r)
    if not r.at_word("becomes"):
        r.fail("expected 'becomes'")
    r.i += 1
    rhs = _segments(r)
    guard = None
    if r.at_word("when"):
        r.i += 1
        guard = r.goal()
    return MorphPat(lhs, rhs, guard, line)


def _segments(r: _Reader) -> list:
    """A morph side: X | (seg, seg, ...) with seg = Var | atom | [letters/vars]."""
    if r.accept("("):
        segs = [_segment(r)]
        while r.accept(","):
            segs.append(_segment(r))
        r.take(")")
        return segs
    return [_segment(r)]


def _segment(r: _Reader):
    t = r.tok
    if t.kind == "var":
        r.i += 1
        return ("seq", t.value)
    if t.kind == "name":
        r.i += 1
        return ("lit", t.value)
    if t.kind == "[":
        r.i += 1
        items = []
        while True:
            u = r.tok
            if u.kind == "var":
                items.append(("var", u.value))
            elif u.kind == "name":
                items.append(("lit", u.value))
            else:
                r.fail("bad letter in morph pattern")
            r.i += 1
            if not r.accept(","):
                break
        r.take("]")
        return ("chars", items)
    r.fail(f"unexpected {t.value!r} in morph pattern")


# ---------------------------------------------------------------------------
# macro expansion and disjunctive normal form

_fresh = itertools.count()


def expand(ast, macros: dict, _depth: int = 0) -> list:
    """Disjunctive normal form of ``ast`` with macros expanded.

    Returns a list of disjunction-free, macro-free ASTs.
    """
    if _depth > 50:
        raise DescriptionError("macro expansion too deep (recursive macro?)")
    k = ast[0]
    if k in ("sort", "var", "any", "patheq"):
        return [ast]
    if k == "feat":
        return [("feat", ast[1], d) for d in expand(ast[2], macros, _depth)]
    if k == "ineq":
        return [("ineq", d) for d in expand(ast[1], macros, _depth)]
    if k == "or":
        out = []
        for a in ast[1]:
            out.extend(expand(a, macros, _depth))
        return out
    if k == "and":
        combos = itertools.product(*(expand(a, macros, _depth) for a in ast[1]))
        return [("and", list(c)) for c in combos]
    if k == "list":
        parts = [expand(a, macros, _depth) for a in ast[1]]
        tails = expand(ast[2], macros, _depth) if ast[2] is not None else [None]
        return [("list", list(c[:-1]), c[-1]) for c in itertools.product(*parts, tails)]
    if k == "set":
        parts = [expand(a, macros, _depth) for a in ast[1]]
        return [("set", list(c)) for c in itertools.product(*parts)]
    if k == "macro":
        return expand(instantiate_macro(ast[1], ast[2], macros), macros, _depth + 1)
    raise DescriptionError(f"unknown description node {k!r}")


def instantiate_macro(name: str, args: list, macros: dict):
    m = macros.get(name)
    if m is None:
        raise DescriptionError(f"unknown macro @{name}")
    if len(args) != len(m.params):
        raise DescriptionError(
            f"macro @{name} expects {len(m.params)} argument(s), got {len(args)}")
    binding = dict(zip(m.params, args))
    suffix = f"~{next(_fresh)}"
    return _subst(m.body, binding, suffix)


def _subst(ast, binding: dict, suffix: str):
    k = ast[0]
    if k == "var":
        if ast[1] in binding:
            return binding[ast[1]]
        return ("var", ast[1] + suffix)
    if k in ("sort", "any", "patheq"):
        return ast
    if k == "feat":
        return ("feat", ast[1], _subst(ast[2], binding, suffix))
    if k == "ineq":
        return ("ineq", _subst(ast[1], binding, suffix))
    if k in ("and", "or"):
        return (k, [_subst(a, binding, suffix) for a in ast[1]])
    if k == "list":
        tail = _subst(ast[2], binding, suffix) if ast[2] is not None else None
        return ("list", [_subst(a, binding, suffix) for a in ast[1]], tail)
    if k == "set":
        return ("set", [_subst(a, binding, suffix) for a in ast[1]])
    if k == "macro":
        return ("macro", ast[1], [_subst(a, binding, suffix) for a in ast[2]])
    raise DescriptionError(f"unknown description node {k!r}")


def variables(ast, acc: set | None = None) -> set:
    acc = set() if acc is None else acc
    k = ast[0]
    if k == "var":
        acc.add(ast[1])
    elif k in ("feat",):
        variables(ast[2], acc)
    elif k == "ineq":
        variables(ast[1], acc)
    elif k in ("and", "or", "set"):
        for a in ast[1]:
            variables(a, acc)
    elif k == "list":
        for a in ast[1]:
            variables(a, acc)
        if ast[2] is not None:
            variables(ast[2], acc)
    elif k == "macro":
        for a in ast[2]:
            variables(a, acc)
    return acc
