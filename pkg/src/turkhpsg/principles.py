"""Principles invoked as goals by phrase structure and lexical rules.

Goals are resolved through a closed registry.  Most principles are written
as definite clauses in the grammar source (``name(Args) if Goals.``) and run
by :class:`GoalEngine`; list and subcat utilities, daughter bookkeeping and
set selection are native.

Clause semantics follow the grammar's Prolog-style reading: clauses are
tried in textual order, each disjunct of a clause head counts as a separate
clause, ``!`` commits to the first solution of the goals before it, and
``=\\= sort`` in a head requires the node not to be of that sort, while
``=\\= Var`` requires two nodes to stay distinct tokens.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterator

from . import subcat
from .errors import GrammarError
from .tfs import FeatureStructure, Skeleton, Store, TypeSystem, compile_skeleton, quick_checks

# Goals the grammar may call.  Names outside this set are rejected when a
# rule or clause is compiled.
CLAUSE_GOALS = frozenset({
    "head_feature_principle", "combine_semantics", "adjunct_principle",
    "checkposs", "checksubst", "nonlocal_principle", "check_rel",
    "apply_case", "check_case_mod", "apply_poss", "apply_copula",
    "apply_adj2noun", "apply_plural", "apply_reltvzr", "contentcop",
    "apply_vcase", "non_ref_object",
})


def _append_comp(st, dtrs, head, comp):
    yield from _attach(st, dtrs, head, comp, "complement")


def _append_spec(st, dtrs, head, adj):
    yield from _attach(st, dtrs, head, adj, "specifier")


def _selectset(st, arg, s, rest):
    """One top-level member of a set unifies with ``arg``; the rest stay a set."""
    probe = st.copy()
    members = subcat._spine(probe, s, "el", "els")
    if not members:
        return
    for i, m in enumerate(members):
        st2 = probe.copy()
        target = st2.val(m, "s_arg") if st2.is_a(m, "optionalcat") else m
        if target is None or not st2.unify(arg, target):
            continue
        others = members[:i] + members[i + 1:]
        cur = st2.new("e_list")
        for o in reversed(others):
            cell = st2._bare(st2.types.sid["ne_set"])
            st2.arcs[cell] = {"el": o, "els": cur}
            cur = cell
        if st2.unify(rest, cur):
            yield st2


NATIVE_GOALS: dict[str, Callable] = {
    "append": subcat.goal_append,
    "appends": subcat.goal_appends,
    "appendset": subcat.goal_appendset,
    "selectlast": subcat.goal_selectlast,
    "sselectlast": subcat.goal_selectlast,
    "selectfirst": subcat.goal_selectfirst,
    "selectset": _selectset,
    "append_comp": _append_comp,
    "append_spec": _append_spec,
}

REGISTRY = CLAUSE_GOALS | NATIVE_GOALS.keys()

# auxiliary predicates used only by the clause definitions of native goals
NATIVE_HELPERS = frozenset({"listlast", "permut", "removeop", "select", "surface"})


# ---------------------------------------------------------------------------
# daughters bookkeeping

def _set(st: Store, node: int, feat: str, value: int) -> bool:
    t = st.val(node, feat)
    if t is None:
        if not st.restrict(node, st.types.names[st.types.intro[feat]]):
            return False
        t = st.val(node, feat)
    return st.unify(t, value)


def _attach(st, dtrs, head, dtr, kind):
    """Record ``dtr`` in the mother's DTRS, starting from the head's daughters.

    A complement whose synsem is the very token in the head's SUBJ becomes
    the subject daughter.  An existing subject daughter is carried up.
    """
    st = st.copy()
    subj = st.path(head, ("synsem", "local", "cat", "subj"))
    dss = st.val(dtr, "synsem")
    is_subj = kind == "complement" and subj is not None and dss is not None and subj == dss
    if st.is_a(head, "word"):
        hd, comps, specs, sdtr = head, st.new("e_list"), st.new("e_list"), None
    else:
        hdtrs = st.val(head, "dtrs")
        if hdtrs is None:
            return
        hd = st.val(hdtrs, "hd_dtr")
        comps = st.val(hdtrs, "comp_dtrs")
        specs = st.val(hdtrs, "spec_dtrs")
        sdtr = st.val(hdtrs, "subj_dtr")
    if is_subj:
        sdtr = dtr
    elif kind == "complement":
        comps = subcat.build_list(st, [dtr], comps)
    else:
        specs = subcat.build_list(st, [dtr], specs)
    ok = (_set(st, dtrs, "hd_dtr", hd) and _set(st, dtrs, "comp_dtrs", comps)
          and _set(st, dtrs, "spec_dtrs", specs)
          and (sdtr is None or _set(st, dtrs, "subj_dtr", sdtr)))
    if ok:
        yield st


# ---------------------------------------------------------------------------
# compiled clauses and the solver

@dataclass
class CompiledClause:
    name: str
    arity: int
    skeleton: Skeleton
    body: list  # ('call', name, [root names]) | ('cut',)
    line: int
    checks: tuple = ()  # per head argument, for Store.compatible


def compile_goals(goals, prefix: str) -> tuple[list, list]:
    """Split goals into (named argument descriptions, compiled goal list)."""
    named = []
    body = []
    for j, g in enumerate(goals):
        if g[0] == "cut":
            body.append(("cut",))
        elif g[0] == "true":
            continue
        elif g[0] == "call":
            names = []
            for k, a in enumerate(g[2]):
                nm = f"{prefix}{j}_{k}"
                named.append((nm, a))
                names.append(nm)
            body.append(("call", g[1], names))
        else:
            raise GrammarError(f"unsupported goal {g!r}")
    return named, body


class GoalEngine:
    """Runs registered goals over stores."""

    def __init__(self, types: TypeSystem, clauses=(), trace: Callable | None = None):
        self.types = types
        self.clauses: dict[tuple, list[CompiledClause]] = {}
        self.trace = trace
        for c in clauses:
            if c.name in NATIVE_GOALS or c.name in NATIVE_HELPERS:
                continue  # reference definitions of native goals
            if c.name not in CLAUSE_GOALS:
                raise GrammarError(f"line {c.line}: {c.name!r} is not a registered goal")
            self.add_clause(c)

    def add_clause(self, c) -> None:
        head = [(f"h{i}", a) for i, a in enumerate(c.args)]
        named, body = compile_goals(c.body, "g")
        self.check_goals(body, c.line)
        sks = compile_skeleton(self.types, head + named)
        lst = self.clauses.setdefault((c.name, len(c.args)), [])
        for sk in sks:
            checks = tuple(quick_checks(self.types, sk.fs_nodes, sk.roots[f"h{i}"])
                           for i in range(len(c.args)))
            lst.append(CompiledClause(c.name, len(c.args), sk, body, c.line, checks))
        if not sks:
            # an unsatisfiable clause still counts as defined
            self.clauses.setdefault((c.name, len(c.args)), [])

    def check_goals(self, body, line=0) -> None:
        for g in body:
            if g[0] == "call" and g[1] not in REGISTRY:
                raise GrammarError(f"line {line}: unknown goal {g[1]!r}")

    # -- solving --

    def may_succeed(self, st: Store, name: str, args: list) -> bool:
        """False if no clause head of ``name`` can match ``args`` (cheap test)."""
        clauses = self.clauses.get((name, len(args)))
        if clauses is None:
            return True
        return any(all(st.compatible(a, ch) for a, ch in zip(args, c.checks)) for c in clauses)

    def solve(self, st: Store, goals: list, roots: dict, depth: int = 0) -> Iterator[Store]:
        """All stores satisfying ``goals``; goal arguments are root names."""
        yield from self._goals(st, goals, roots, [False], depth)

    def _goals(self, st, goals, roots, cut, depth):
        if not goals:
            yield st
            return
        g, rest = goals[0], goals[1:]
        if g[0] == "cut":
            cut[0] = True
            yield from self._goals(st, rest, roots, [False], depth)
            return
        for st1 in self.call(st, g[1], [roots[a] for a in g[2]], depth):
            yield from self._goals(st1, rest, roots, cut, depth)
            if cut[0]:
                return

    def call(self, st: Store, name: str, args: list, depth: int = 0) -> Iterator[Store]:
        if depth > 100:
            raise GrammarError(f"goal {name} recursion too deep")
        native = NATIVE_GOALS.get(name)
        if native is not None:
            for st1 in native(st, *args):
                if st1.ineqs_ok():
                    if self.trace:
                        self.trace("goal", name, True)
                    yield st1
            return
        clauses = self.clauses.get((name, len(args)))
        if clauses is None:
            raise GrammarError(f"no clauses for goal {name}/{len(args)}")
        sig_below = self.types.below
        for c in clauses:
            if not all(st.compatible(a, ch) for a, ch in zip(args, c.checks)):
                continue
            st1 = st.copy()
            roots = st1.add_skeleton(c.skeleton)
            if not all(st1.unify(roots[f"h{i}"], a) for i, a in enumerate(args)):
                continue
            if any(sig_below[sid] >> st1.sort[st1.find(roots[r])] & 1
                   for r, sid in c.skeleton.sort_guards):
                continue
            if not st1.ineqs_ok():
                continue
            cut = [False]
            for st2 in self._goals(st1, c.body, roots, cut, depth + 1):
                if self.trace:
                    self.trace("goal", name, True)
                yield st2
                if cut[0]:
                    break
            if cut[0]:
                return


# ---------------------------------------------------------------------------
# structure-level entry points

class GoalResult:
    """One solution of a goal: the arguments read back together.

    Token identity between arguments is preserved in :attr:`skeleton`, so
    :meth:`shared` can tell whether two paths end in the same node.
    """

    def __init__(self, st: Store, nodes: list):
        self._st = st
        self._nodes = nodes
        self.args = tuple(st.extract(n) for n in nodes)

    def shared(self, i: int, path_i, j: int, path_j) -> bool:
        a = self._st.path(self._nodes[i], _path(path_i))
        b = self._st.path(self._nodes[j], _path(path_j))
        return a is not None and b is not None and self._st.find(a) == self._st.find(b)


def _path(p):
    if isinstance(p, str):
        p = [x for x in p.replace("|", " ").split() if x]
    return tuple(f.lower().replace("-", "_") for f in p)


@lru_cache(maxsize=1)
def _default_engine():
    from .grammar import load_bundled

    return load_bundled().engine


def run_goal(name: str, *args: FeatureStructure, engine: GoalEngine | None = None) -> list[GoalResult]:
    """Solutions of goal ``name`` on fresh copies of ``args``."""
    engine = engine or _default_engine()
    st = Store(engine.types)
    nodes = [st.add(a) if isinstance(a, FeatureStructure) else st.new(a) for a in args]
    return [GoalResult(s, nodes) for s in engine.call(st, name, nodes)]


def head_feature_principle(mother, head_dtr, engine=None) -> list[GoalResult]:
    return run_goal("head_feature_principle", mother, head_dtr, engine=engine)


def adjunct_principle(mother, adjunct, head, engine=None) -> list[GoalResult]:
    return run_goal("adjunct_principle", mother, adjunct, head, engine=engine)


def possessive_barrier(target, engine=None) -> bool:
    """True iff a modifier may attach to ``target`` (a synsem).

    Combines the possessive check on the synsem and the predicative check on
    its category.
    """
    if not run_goal("checkposs", target, engine=engine):
        return False
    cat = target.sub("local|cat")
    return cat is not None and bool(run_goal("checksubst", cat, engine=engine))


def nonlocal_principle(arg, head, mother, engine=None) -> list[GoalResult]:
    return run_goal("nonlocal_principle", arg, head, mother, engine=engine)


def check_rel(arg, head, engine=None) -> bool:
    return bool(run_goal("check_rel", arg, head, engine=engine))


def combine_semantics(head, dtr, mother, engine=None) -> list[GoalResult]:
    return run_goal("combine_semantics", head, dtr, mother, engine=engine)


def attach_daughters(mother_dtrs, head, new_dtr, kind: str, engine=None) -> list[GoalResult]:
    """Add ``new_dtr`` to the daughters; ``kind`` is complement, specifier or subject.

    For ``subject`` the new daughter's synsem is first identified with the
    head's SUBJ value, as subject retrieval does.
    """
    engine = engine or _default_engine()
    st = Store(engine.types)
    nodes = [st.add(x) if isinstance(x, FeatureStructure) else st.new(x)
             for x in (mother_dtrs, head, new_dtr)]
    if kind == "subject":
        subj = st.path(nodes[1], ("synsem", "local", "cat", "subj"))
        ss = st.path(nodes[2], ("synsem",))
        if subj is None or ss is None or not st.unify(subj, ss):
            return []
        kind = "complement"
    if kind not in ("complement", "specifier"):
        raise ValueError(f"unknown daughter kind {kind!r}")
    return [GoalResult(s, nodes) for s in _attach(st, *nodes, kind)]
