"""Turkish phonology primitives and the guarded surface-pattern engine.

A morph pattern rewrites a stem when its guard holds, e.g.::

    (X,[L1,L2]) becomes (X,L1,[Y],[ı]) when b_u_yum([L1,L2],Y)

Guards are small Prolog predicates (``back/1``, ``kalin_hece/1``, ``yumusa/2``
...) defined by facts and Horn clauses in the lexical-rule source.  They are
run by the tiny resolution engine below, which supports cut.
"""

from __future__ import annotations

import unicodedata
from functools import lru_cache
from importlib import resources

from . import descr
from .errors import GrammarError

BACK = frozenset("aıou")
FRONT = frozenset("eiöü")
ROUNDED = frozenset("ouöü")
VOWELS = BACK | FRONT
SOFTENING = {"p": "b", "ç": "c", "t": "d", "k": "ğ"}


def nfc(s: str) -> str:
    return unicodedata.normalize("NFC", s)


def vowel_class(v: str) -> tuple[str, str]:
    """('back'|'front', 'rounded'|'unrounded') for a vowel letter."""
    v = nfc(v)
    if v not in VOWELS:
        raise ValueError(f"{v!r} is not a vowel")
    return ("back" if v in BACK else "front", "rounded" if v in ROUNDED else "unrounded")


def soften(c: str) -> str | None:
    """Voiced counterpart used before a vowel-initial suffix, or None."""
    return SOFTENING.get(nfc(c))


def last_window(stem: str) -> tuple[str, tuple[str, str] | None]:
    """Final letter and final two-letter window of a stem.

    These are the windows the guards inspect: ``[L]`` and ``[L1,L2]``.
    """
    stem = nfc(stem)
    if not stem:
        raise ValueError("empty stem")
    pair = (stem[-2], stem[-1]) if len(stem) >= 2 else None
    return stem[-1], pair


# ---------------------------------------------------------------------------
# a minimal Prolog for guards

class Var:
    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name

    def __repr__(self):
        return f"_{self.name}"


NIL = "[]"


def _cons(h, t):
    return (".", h, t)


def _term(ast, env: dict):
    """Prolog term from a description AST (atoms, variables, lists)."""
    k = ast[0]
    if k == "sort":
        return NIL if ast[1] == "e_list" else ast[1]
    if k == "var":
        v = env.get(ast[1])
        if v is None:
            v = env[ast[1]] = Var(ast[1])
        return v
    if k == "any":
        return Var("_")
    if k == "list":
        tail = NIL if ast[2] is None else _term(ast[2], env)
        for item in reversed(ast[1]):
            tail = _cons(_term(item, env), tail)
        return tail
    raise GrammarError(f"unsupported term in guard: {ast!r}")


def _walk(t, s: dict):
    while isinstance(t, Var) and t in s:
        t = s[t]
    return t


def _unify(a, b, s: dict) -> dict | None:
    a, b = _walk(a, s), _walk(b, s)
    if a is b:
        return s
    if isinstance(a, Var):
        return {**s, a: b}
    if isinstance(b, Var):
        return {**s, b: a}
    if isinstance(a, tuple) and isinstance(b, tuple) and len(a) == len(b):
        for x, y in zip(a, b):
            s = _unify(x, y, s)
            if s is None:
                return None
        return s
    return s if a == b else None


def resolve(t, s: dict):
    t = _walk(t, s)
    if isinstance(t, tuple):
        return tuple(resolve(x, s) for x in t)
    return t


def to_pylist(t) -> list | None:
    out = []
    while isinstance(t, tuple) and t[0] == ".":
        out.append(t[1])
        t = t[2]
    return out if t == NIL else None


def from_pylist(items) -> object:
    t = NIL
    for x in reversed(list(items)):
        t = _cons(x, t)
    return t


class KnowledgeBase:
    """Facts and clauses ``head :- body`` with depth-first search and cut."""

    def __init__(self, facts=()):
        self.preds: dict[tuple, list] = {}
        for head, body in facts:
            self.add(head, body)

    def add(self, head, body) -> None:
        key = (head[1], len(head[2]))
        self.preds.setdefault(key, []).append((head, body))

    def defines(self, name: str, arity: int) -> bool:
        return (name, arity) in self.preds

    def solve(self, goal, env: dict | None = None, s: dict | None = None):
        """Yield substitutions solving a ('call', name, args) goal."""
        env = {} if env is None else env
        s = {} if s is None else s
        yield from self._goals(_flat_goals([goal]), env, s, [False], 0)

    def _goals(self, goals, env, s, cut, depth):
        if not goals:
            yield s
            return
        g, rest = goals[0], goals[1:]
        if g[0] == "cut":
            cut[0] = True
            yield from self._goals(rest, env, s, [False], depth)
            return
        if g[0] == "true":
            yield from self._goals(rest, env, s, cut, depth)
            return
        for s1 in self._call(g, env, s, depth):
            yield from self._goals(rest, env, s1, cut, depth)
            if cut[0]:
                return

    def _call(self, g, env, s, depth):
        if depth > 200:
            raise GrammarError("guard recursion too deep")
        name, args = g[1], g[2]
        clauses = self.preds.get((name, len(args)))
        if clauses is None:
            raise GrammarError(f"undefined guard predicate {name}/{len(args)}")
        actual = [_term(a, env) for a in args]
        for head, body in clauses:
            local: dict = {}
            formal = [_term(a, local) for a in head[2]]
            s1 = _unify(tuple(formal), tuple(actual), s)
            if s1 is None:
                continue
            cut = [False]
            for s2 in self._goals(_flat_goals(body), local, s1, cut, depth + 1):
                yield s2
                if cut[0]:
                    break
            if cut[0]:
                return


def _flat_goals(gs) -> list:
    out = []
    for g in gs:
        if g[0] == "conj":
            out.extend(_flat_goals(g[1]))
        else:
            out.append(g)
    return out


# ---------------------------------------------------------------------------
# morph patterns

def _match(segs, word: str, env: dict, i: int = 0, pos: int = 0):
    """Enumerate bindings of the left-hand side against ``word``.

    Letter variables bind to a one-letter ``str``, sequence variables to a
    tuple of letters.  Sequences take the longest prefix first, so trailing
    windows are tried shortest first.
    """
    if i == len(segs):
        if pos == len(word):
            yield env
        return
    kind, val = segs[i]
    if kind == "seq":
        bound = env.get(val)
        if bound is not None:
            text = "".join(bound)
            if word.startswith(text, pos):
                yield from _match(segs, word, env, i + 1, pos + len(text))
            return
        for end in range(len(word), pos - 1, -1):
            yield from _match(segs, word, {**env, val: tuple(word[pos:end])}, i + 1, end)
    elif kind == "lit":
        if word.startswith(val, pos):
            yield from _match(segs, word, env, i + 1, pos + len(val))
    else:
        if pos + len(val) > len(word):
            return
        e = dict(env)
        for j, (ik, iv) in enumerate(val):
            ch = word[pos + j]
            if ik == "lit":
                if iv != ch:
                    return
            elif e.setdefault(iv, ch) != ch:
                return
        yield from _match(segs, word, e, i + 1, pos + len(val))


def _run_guard(kb: KnowledgeBase, guard, env: dict) -> dict | None:
    """Extend ``env`` with the first solution of ``guard``, or None."""
    if guard is None:
        return env
    penv: dict = {}
    s: dict = {}
    for name, value in env.items():
        v = penv[name] = Var(name)
        s[v] = value if isinstance(value, str) else from_pylist(value)
    for sol in kb.solve(guard, penv, s):
        out = dict(env)
        for name, v in penv.items():
            if name in out:
                continue
            val = resolve(v, sol)
            if isinstance(val, str) and val != NIL:
                out[name] = val
            else:
                lst = to_pylist(val)
                if lst is not None and all(isinstance(x, str) for x in lst):
                    out[name] = tuple(lst)
        return out
    return None


def _rhs(segs, env: dict) -> str | None:
    out = []
    for kind, val in segs:
        if kind == "seq":
            if val not in env:
                return None
            out.append("".join(env[val]))
        elif kind == "lit":
            out.append(val)
        else:
            for ik, iv in val:
                if ik == "lit":
                    out.append(iv)
                elif iv in env:
                    out.append("".join(env[iv]))
                else:
                    return None
    return "".join(out)


def apply_patterns(stem: str, patterns, kb: KnowledgeBase | None = None) -> str | None:
    """Rewrite ``stem`` with the first pattern whose guard holds, else None."""
    stem = nfc(stem)
    if not stem:
        raise ValueError("empty stem")
    kb = kb if kb is not None else default_kb()
    for pat in patterns:
        for env in _match(pat.lhs, stem, {}):
            res = _run_guard(kb, pat.guard, env)
            if res is None:
                continue
            out = _rhs(pat.rhs, res)
            if out is not None:
                return out
    return None


# ---------------------------------------------------------------------------
# the bundled rules

# suffix id -> lexical rule whose morphs realize it after a plain stem
CATALOG = {
    "plural": "plural",
    "acc": "accusative_a",
    "dat": "dative_a",
    "loc": "locative_a",
    "abl": "ablative_a",
    "gen": "genitive_a",
    "ins": "instrumental_a",
    "poss3s": "possessive_3_s",
    "poss1s": "possessive_1_s",
    "cop1s": "copula1_s",
    "cop3s": "copula3_s",
    "rlvz-ki": "relativizer",
}

_MORPH_FILES = ("lexrules.ale", "reconstructed.ale")


@lru_cache(maxsize=1)
def _bundled():
    prog = descr.Program()
    data = resources.files("turkhpsg") / "data"
    for name in _MORPH_FILES:
        prog.extend(descr.read_program((data / name).read_text(encoding="utf-8"), name))
    return KnowledgeBase(prog.facts), {r.name: r.morphs for r in prog.lex_rules}


def default_kb() -> KnowledgeBase:
    return _bundled()[0]


def harmonize_catalog(stem: str, suffix: str) -> str:
    """Surface of ``stem`` followed by the suffix named ``suffix``."""
    rule = CATALOG.get(suffix)
    if rule is None:
        raise KeyError(f"unknown suffix id {suffix!r}; known: {', '.join(CATALOG)}")
    kb, morphs = _bundled()
    out = apply_patterns(stem, morphs[rule], kb)
    if out is None:
        raise ValueError(f"no {suffix} pattern applies to {stem!r}")
    return out
