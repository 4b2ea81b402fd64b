"""Bottom-up chart parser over the phrase structure rules.

Edges are asserted right to left: the lexical edges of the last token first,
then those of the token before it, and so on.  Each asserted edge is paired
with the adjacent edges already in the chart, so every pair of neighbours is
tried exactly once, by whichever of the two arrives later.  Empty categories
sit at every position as zero-width edges; a mother is never zero-width.

Edges with the same span whose signs agree outside DTRS are packed into one
edge that keeps every derivation.  This merges the duplicates produced when
both subject-retrieval rules build the same phrase, and the orders in which
members of an unordered SUBCAT set were retrieved.
"""

from __future__ import annotations

import itertools
import unicodedata
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterator

from .errors import EdgeLimitExceeded, ParseError, UnknownTokenError
from .principles import compile_goals
from .tfs import FeatureStructure, Store, compile_skeleton, fs_compatible, quick_checks, subsumes

MEMO_LIMIT = 200_000  # cached rule applications per parser
_PUNCT = ".,;:!?…\"'«»"


def tokenize(sentence: str) -> list[str]:
    """Whitespace tokens in NFC with terminal punctuation stripped."""
    if not isinstance(sentence, str):
        raise ParseError("sentence must be text")
    toks = []
    for raw in unicodedata.normalize("NFC", sentence).split():
        t = raw.rstrip(_PUNCT)
        if t:
            toks.append(t)
    if not toks:
        raise ParseError("empty input")
    return toks


def turkish_lower(s: str) -> str:
    return s.replace("I", "ı").replace("İ", "i").lower()


# ---------------------------------------------------------------------------
# rules

@dataclass
class CompiledRule:
    name: str
    arity: int
    skeletons: list
    body: list
    line: int = 0
    checks: list = field(default_factory=list)  # per skeleton, per daughter

    def __repr__(self):
        return f"<rule {self.name}/{self.arity}>"


def compile_rule(r, grammar) -> CompiledRule:
    """A phrase structure rule over roots ``m``, ``d0``, ``d1`` and goal args."""
    named, body = compile_goals(r.goals, "g")
    grammar.engine.check_goals(body, r.line)
    roots = [("m", r.mother)] + [(f"d{i}", d) for i, d in enumerate(r.daughters)] + named
    sks = compile_skeleton(grammar.types, roots)
    if not sks:
        raise ParseError(f"rule {r.name!r} (line {r.line}) is unsatisfiable")
    checks = [tuple(quick_checks(grammar.types, sk.fs_nodes, sk.roots[f"d{i}"])
                    for i in range(len(r.daughters))) for sk in sks]
    return CompiledRule(r.name, len(r.daughters), sks, body, r.line, checks)


def apply_rule(rule: CompiledRule, daughters, engine) -> list[FeatureStructure]:
    """Mother structures licensed by ``rule`` over the given daughter structures."""
    if len(daughters) != rule.arity:
        return []
    out: list[FeatureStructure] = []
    seen = set()
    below = engine.types.below
    for k, sk in enumerate(rule.skeletons):
        if rule.checks and not all(fs_compatible(d, c) for d, c in zip(daughters, rule.checks[k])):
            continue
        st = Store(engine.types)
        roots = st.add_skeleton(sk)
        if not all(st.unify(roots[f"d{i}"], st.add(d)) for i, d in enumerate(daughters)):
            continue
        if any(below[sid] >> st.sort[st.find(roots[r])] & 1 for r, sid in sk.sort_guards):
            continue
        # goals only add information, so a goal no clause can match now never will
        if not all(engine.may_succeed(st, g[1], [roots[a] for a in g[2]])
                   for g in rule.body if g[0] == "call"):
            continue
        for st2 in engine.solve(st, rule.body, roots):
            if not st2.ineqs_ok():
                continue
            fs = st2.extract(roots["m"])
            if fs is not None and fs not in seen:
                seen.add(fs)
                out.append(fs)
    return out


# ---------------------------------------------------------------------------
# chart

@dataclass(eq=False)
class Edge:
    start: int
    end: int
    fs: FeatureStructure
    rule: str  # rule name, "lex" or "empty"
    daughters: tuple = ()
    label: str = ""  # surface or lexical provenance for leaves
    alternatives: list = field(default_factory=list)  # further (rule, daughters)
    id: int = -1

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.end)

    @property
    def width(self) -> int:
        return self.end - self.start

    def derivations(self):
        yield self.rule, self.daughters
        yield from self.alternatives

    def __repr__(self):
        return f"<edge {self.id} {self.rule} {self.start}-{self.end} {self.fs.sort_at('synsem|local|cat|head')}>"


def pack_key(fs: FeatureStructure) -> FeatureStructure:
    """The sign without its daughters: edges agreeing on this are packed."""
    if fs.path_value(("dtrs",)) is None:
        return fs
    st = Store(fs.types)
    r = st.add(fs)
    st.arcs[r] = {f: t for f, t in st.arcs[r].items() if f != "dtrs"}
    return st.extract(r)


class Chart:
    def __init__(self, n: int, max_edges: int):
        self.n = n
        self.max_edges = max_edges
        self.edges: list[Edge] = []
        self.by_start: list[list[Edge]] = [[] for _ in range(n + 1)]
        self.by_end: list[list[Edge]] = [[] for _ in range(n + 1)]
        self._index: dict[tuple, Edge] = {}
        self.agenda: deque[Edge] = deque()

    def __len__(self):
        return len(self.edges)

    def propose(self, edge: Edge) -> bool:
        """Queue ``edge`` unless an equivalent one exists; then add its derivation there."""
        key = (edge.start, edge.end, pack_key(edge.fs))
        old = self._index.get(key)
        if old is not None:
            d = (edge.rule, edge.daughters)
            if d not in list(old.derivations()):
                old.alternatives.append(d)
            return False
        if len(self.edges) >= self.max_edges:
            raise EdgeLimitExceeded(f"more than {self.max_edges} edges")
        edge.id = len(self.edges)
        self._index[key] = edge
        self.edges.append(edge)
        self.agenda.append(edge)
        return True

    def spanning(self) -> list[Edge]:
        return [e for e in self.by_start[0] if e.end == self.n]


def insert_empty_categories(chart: Chart, empties) -> Chart:
    """Seed every empty category as a zero-width edge at every position."""
    if chart.n == 0:
        return chart
    for i in range(chart.n, -1, -1):
        for e in empties:
            chart.propose(Edge(i, i, e.fs, "empty", label=e.provenance if e.rules else "∅"))
    return chart


@dataclass
class ParseResult:
    tokens: list
    chart: Chart
    sentences: list  # accepted spanning edges

    @property
    def spanning(self) -> list[Edge]:
        return self.chart.spanning()

    def __len__(self):
        return len(self.sentences)


class Parser:
    def __init__(self, grammar, trace: Callable | None = None):
        self.grammar = grammar
        self.rules = grammar.rules
        self.binary = [r for r in self.rules if r.arity == 2]
        self.unary = [r for r in self.rules if r.arity == 1]
        self.trace = trace
        self._sent = grammar.sentence_templates()
        # rule applications are deterministic, so results are shared across parses
        self._memo: dict[tuple, list] = {}

    def lexical_edges(self, tokens) -> list[list[Edge]]:
        lex = self.grammar.lexicon
        depth = self.grammar.limits.depth
        out = []
        for i, tok in enumerate(tokens):
            entries = lex.entries(tok, depth)
            if not entries and turkish_lower(tok) != tok:
                entries = lex.entries(turkish_lower(tok), depth)
            if not entries:
                raise UnknownTokenError(tok, i)
            seen = set()
            edges = []
            for e in entries:
                if e.fs in seen:
                    continue
                seen.add(e.fs)
                edges.append(Edge(i, i + 1, e.fs, "lex", label=f"{tok} ({e.provenance})"))
            out.append(edges)
        return out

    def parse(self, tokens, max_edges: int | None = None) -> ParseResult:
        if isinstance(tokens, str):
            tokens = tokenize(tokens)
        tokens = list(tokens)
        if not tokens:
            raise ParseError("empty input")
        limit = max_edges if max_edges is not None else self.grammar.limits.max_edges
        chart = Chart(len(tokens), limit)
        lexical = self.lexical_edges(tokens)
        empties = self.grammar.lexicon.empty_categories()
        # right to left: a position's words, then the empty categories before them
        for i in range(len(tokens) - 1, -1, -1):
            if i == len(tokens) - 1:
                for e in empties:
                    chart.propose(Edge(i + 1, i + 1, e.fs, "empty", label="∅"))
            for e in lexical[i]:
                chart.propose(e)
            for e in empties:
                chart.propose(Edge(i, i, e.fs, "empty", label="∅"))
            self._drain(chart)
        return ParseResult(tokens, chart, [e for e in chart.spanning() if self.accept(e)])

    def _drain(self, chart: Chart) -> None:
        while chart.agenda:
            e = chart.agenda.popleft()
            chart.by_start[e.start].append(e)
            chart.by_end[e.end].append(e)
            if self.trace:
                self.trace(e)
            if e.width:
                for r in self.unary:
                    self._combine(chart, r, (e,))
            for r in self.binary:
                for right in list(chart.by_start[e.end]):
                    if right is not e and (e.width or right.width):
                        self._combine(chart, r, (e, right))
                for left in list(chart.by_end[e.start]):
                    if left is not e and (e.width or left.width):
                        self._combine(chart, r, (left, e))

    def _combine(self, chart: Chart, rule: CompiledRule, dtrs) -> None:
        key = (rule.name,) + tuple(d.fs for d in dtrs)
        mothers = self._memo.get(key)
        if mothers is None:
            if len(self._memo) >= MEMO_LIMIT:
                self._memo.clear()
            mothers = self._memo[key] = apply_rule(rule, key[1:], self.grammar.engine)
        for fs in mothers:
            chart.propose(Edge(dtrs[0].start, dtrs[-1].end, fs, rule.name, tuple(dtrs)))

    def accept(self, edge: Edge, n: int | None = None) -> bool:
        if n is not None and (edge.start, edge.end) != (0, n):
            return False
        return self.is_sentence(edge.fs)

    def is_sentence(self, fs: FeatureStructure) -> bool:
        """Saturated, slash-free and finite or predicative."""
        return any(subsumes(t, fs) for t in self._sent)


def accept_sentence(edge: Edge, grammar=None, n: int | None = None) -> bool:
    """Spanning edge whose sign is a saturated finite or predicative phrase."""
    from .grammar import load_bundled

    return Parser(grammar or load_bundled()).accept(edge, n)


def parse(tokens, grammar=None, max_edges: int | None = None, trace=None) -> ParseResult:
    from .grammar import load_bundled

    return Parser(grammar or load_bundled(), trace).parse(tokens, max_edges)


# ---------------------------------------------------------------------------
# trees

def trees(edge: Edge, limit: int | None = None) -> Iterator[tuple]:
    """Derivation trees under ``edge`` as nested (label, children) tuples."""
    it = _trees(edge)
    return itertools.islice(it, limit) if limit is not None else it


def _trees(edge: Edge):
    for rule, dtrs in edge.derivations():
        if not dtrs:
            yield (edge.label or rule, ())
            continue
        for kids in itertools.product(*[list(_trees(d)) for d in dtrs]):
            yield (rule, kids)


def render_tree(t, indent: int = 0) -> str:
    label, kids = t
    if not kids:
        return "  " * indent + label
    return "\n".join(["  " * indent + label] + [render_tree(k, indent + 1) for k in kids])


def bracket(t) -> str:
    label, kids = t
    if not kids:
        return label
    return f"[{label} " + " ".join(bracket(k) for k in kids) + "]"

