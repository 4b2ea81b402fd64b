"""Lexical entries, lexical rules and their closure.

A lexical rule pairs a feature-structure mapping (``In **> Out if Goals``)
with morph patterns that rewrite the surface form.  Rules that append a
boundary marker to PHON (``append(Phon,[ř,o,b,j],Phon2)``) are recognized:
the marker is kept in the entry's derivation trace and PHON receives the
rewritten surface instead.

Closure is computed lazily per token: only derivations whose surface can
still grow into the token are explored, which keeps lookup cheap even for a
closure depth of four.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import morphophon
from .descr import LexRuleDef
from .errors import DescriptionError, GrammarError, LexiconError
from .principles import GoalEngine, compile_goals
from .tfs import FeatureStructure, Store, TypeSystem, compile_skeleton, describe, unify

MARKER = "ř"


@dataclass(frozen=True)
class LexEntry:
    surface: str
    fs: FeatureStructure
    rules: tuple = ()  # names of the lexical rules applied, in order
    markers: tuple = field(default=(), compare=False)
    stem: str = field(default="", compare=False)  # surface of the base entry

    @property
    def base(self) -> str:
        return self.stem or self.surface

    @property
    def provenance(self) -> str:
        return "base" if not self.rules else " > ".join(self.rules)

    def key(self):
        return (self.surface, self.fs)


@dataclass
class LexicalRule:
    name: str
    skeletons: list
    body: list
    marker: str | None  # boundary marker text, without the leading ř
    phon_out: str | None  # root name bound to the output word's letters
    morphs: list
    line: int = 0


def _marker_goal(g):
    """(marker, output var) for append(Phon,[ř,...],Phon2), else None."""
    if g[0] != "call" or g[1] != "append" or len(g[2]) != 3:
        return None
    lst = g[2][1]
    if lst[0] != "list" or lst[2] is not None or not lst[1]:
        return None
    letters = [x[1] for x in lst[1] if x[0] == "sort"]
    if len(letters) != len(lst[1]) or letters[0] != MARKER:
        return None
    return "".join(letters[1:])


def compile_lex_rule(r: LexRuleDef, types: TypeSystem, engine: GoalEngine) -> LexicalRule:
    goals = list(r.goals)
    marker = None
    out_ast = None
    for i, g in enumerate(goals):
        m = _marker_goal(g)
        if m is not None:
            marker, out_ast = m, g[2][2]
            del goals[i]
            break
    named, body = compile_goals(goals, "g")
    engine.check_goals(body, r.line)
    extra = [("in", r.inp), ("out", r.out)] + named
    if out_ast is not None:
        extra.append(("phon2", out_ast))
    sks = compile_skeleton(types, extra)
    return LexicalRule(r.name, sks, body, marker, "phon2" if out_ast is not None else None,
                       r.morphs, r.line)


def _word_list(st: Store, surface: str) -> int:
    """A string node spelling ``surface``."""
    from .subcat import build_list

    return build_list(st, [st.new(ch) for ch in surface])


class Lexicon:
    """Base entries, empty categories and lexical rules of a grammar."""

    def __init__(self, types: TypeSystem, engine: GoalEngine, kb: morphophon.KnowledgeBase,
                 depth: int = 4):
        self.types = types
        self.engine = engine
        self.kb = kb
        self.depth = depth
        self.base: list[LexEntry] = []
        self.empties: list[FeatureStructure] = []
        self.rules: list[LexicalRule] = []
        self._derived: dict[tuple, list[LexEntry]] = {}  # (entry key, rule) -> outputs
        self._lookup: dict[tuple, list[LexEntry]] = {}

    # -- loading --

    def add_entry(self, word: str, ast, line: int = 0) -> list[LexEntry]:
        word = morphophon.nfc(word)
        fss = describe(ast, self.types)
        if not fss:
            raise LexiconError(f"line {line}: entry {word!r} {self._diagnose(ast)}")
        new = [LexEntry(word, fs) for fs in fss]
        self.base.extend(new)
        self._lookup.clear()
        return new

    def add_empty(self, ast, line: int = 0) -> None:
        fss = describe(ast, self.types)
        if not fss:
            raise LexiconError(f"line {line}: empty category {self._diagnose(ast)}")
        self.empties.extend(fss)

    def add_rule(self, r: LexRuleDef) -> None:
        self.rules.append(compile_lex_rule(r, self.types, self.engine))
        self._derived.clear()
        self._lookup.clear()

    def _diagnose(self, ast) -> str:
        """Name the sort constraint an inconsistent description violates."""
        bare = TypeSystem(self.types.sig, (), self.types.macros)
        try:
            fss = describe(ast, bare)
        except GrammarError as e:  # pragma: no cover - names were checked already
            return f"is ill-formed: {e}"
        if not fss:
            return "is inconsistent with the signature"
        fs = fss[0]
        for x, (s, _) in enumerate(fs.nodes):
            for c in self.types.cons_up[self.types.sid[s]]:
                st = Store(self.types)
                base = st.add(fs)
                sub = st.extract(base + x) if x else fs
                if not any(unify(sub, alt) is not None for alt in self.types.cons_alternatives(c)):
                    return f"violates the constraint on sort {self.types.names[c]!r} (at a node of sort {s!r})"
        return "violates the sort constraints"

    # -- rules --

    def apply_rule(self, rule: LexicalRule, entry: LexEntry) -> list[LexEntry]:
        """All results of one lexical rule on one entry."""
        key = (entry.key(), rule.name)
        hit = self._derived.get(key)
        if hit is not None:
            return hit
        out: list[LexEntry] = []
        self._derived[key] = out
        if rule.marker is not None and rule.marker in entry.markers:
            return out
        surface = morphophon.apply_patterns(entry.surface, rule.morphs, self.kb)
        if surface is None:
            return out
        markers = entry.markers + ((rule.marker,) if rule.marker is not None else ())
        seen = set()
        for sk in rule.skeletons:
            st = Store(self.types)
            roots = st.add_skeleton(sk)
            if not st.unify(roots["in"], st.add(entry.fs)):
                continue
            for st2 in self.engine.solve(st, rule.body, roots):
                if rule.phon_out is not None:
                    st2 = st2.copy()
                    if not st2.unify(roots[rule.phon_out], _word_list(st2, surface)):
                        continue
                if not st2.ineqs_ok():
                    continue
                fs = st2.extract(roots["out"])
                if fs is None or fs in seen:
                    continue
                seen.add(fs)
                out.append(LexEntry(surface, fs, entry.rules + (rule.name,), markers, entry.base))
        return out

    def close_entry(self, entry: LexEntry, depth: int | None = None, rules=None,
                    keep=None) -> list[LexEntry]:
        """All entries derivable from ``entry`` with at most ``depth`` rules.

        ``keep(surface)`` prunes derivations that cannot lead anywhere useful.
        Duplicates (same surface and structure) are dropped.
        """
        depth = self.depth if depth is None else depth
        rules = self.rules if rules is None else rules
        seen = {entry.key()}
        out = [entry]
        frontier = [entry]
        for _ in range(depth):
            nxt = []
            for e in frontier:
                for r in rules:
                    for d in self.apply_rule(r, e):
                        if d.key() in seen or (keep is not None and not keep(d.surface)):
                            continue
                        seen.add(d.key())
                        out.append(d)
                        nxt.append(d)
            frontier = nxt
            if not frontier:
                break
        return out

    # -- lookup --

    def entries(self, token: str, depth: int | None = None) -> list[LexEntry]:
        """Entries (base and derived) whose surface is ``token``."""
        token = morphophon.nfc(token)
        depth = self.depth if depth is None else depth
        hit = self._lookup.get((token, depth))
        if hit is not None:
            return hit

        def keep(surface: str) -> bool:
            # suffixes only grow the word; softening may change its last letter
            return surface == token or token.startswith(surface[:-1])

        found = []
        for b in self.base:
            if keep(b.surface):
                for e in self.close_entry(b, depth, keep=keep):
                    if e.surface == token:
                        found.append(e)
        self._lookup[(token, depth)] = found
        return found

    def lookup(self, token: str, depth: int | None = None) -> list[FeatureStructure]:
        out = []
        seen = set()
        for e in self.entries(token, depth):
            if e.fs not in seen:
                seen.add(e.fs)
                out.append(e.fs)
        return out

    def empty_categories(self) -> list[LexEntry]:
        return [LexEntry("", fs) for fs in self.empties]

    def rule(self, name: str) -> LexicalRule:
        for r in self.rules:
            if r.name == name:
                return r
        raise KeyError(name)

    # -- named rule applications --

    def _apply_named(self, name: str, entry: LexEntry) -> list[LexEntry]:
        return self.apply_rule(self.rule(name), entry)

    def apply_case(self, entry: LexEntry, case: str, mode: str = "a") -> list[LexEntry]:
        names = {"obj": "accusative", "dat": "dative", "loc": "locative", "abl": "ablative",
                 "gen": "genitive", "ins": "instrumental"}
        if case not in names or mode not in ("a", "b"):
            raise ValueError(f"unknown case {case!r} or mode {mode!r}")
        return self._apply_named(f"{names[case]}_{mode}", entry)

    def apply_poss(self, entry: LexEntry, person: str = "third") -> list[LexEntry]:
        return self._apply_named({"third": "possessive_3_s", "first": "possessive_1_s"}[person], entry)

    def apply_copula(self, entry: LexEntry, person: str = "third") -> list[LexEntry]:
        return self._apply_named({"third": "copula3_s", "first": "copula1_s"}[person], entry)

    def apply_non_ref_object(self, entry: LexEntry) -> list[LexEntry]:
        return self._apply_named("non_ref_object", entry)


def rule_catalog_rest() -> dict[str, str]:
    """The remaining lexical rules and what they do."""
    return {
        "relativizer": "-ki: a locative noun becomes a noun modifier (rel plus)",
        "adj_promotion": "an adjective used as a noun ('the red one')",
        "plural": "-lAr: number marking on nominative nouns",
        "obj_rel_to_compl": "zero derivation of an object participle into a complement clause",
        "complement_accusative": "accusative marking of a complement clause",
    }


def load_lexicon(programs, types: TypeSystem, engine: GoalEngine,
                 kb: morphophon.KnowledgeBase | None = None) -> Lexicon:
    """Lexicon from read programs (entries, empties, lexical rules, guard facts)."""
    facts = []
    depth = 4
    for p in programs:
        facts.extend(p.facts)
        depth = p.directives.get("lex_rule_depth", depth)
    kb = kb if kb is not None else morphophon.KnowledgeBase(facts)
    lex = Lexicon(types, engine, kb, depth)
    for p in programs:
        for word, ast, line in p.lexicon:
            lex.add_entry(word, ast, line)
        for ast, line in p.empties:
            lex.add_empty(ast, line)
        for r in p.lex_rules:
            try:
                lex.add_rule(r)
            except DescriptionError as e:
                raise LexiconError(f"lexical rule {r.name!r} (line {r.line}): {e}") from None
    return lex
