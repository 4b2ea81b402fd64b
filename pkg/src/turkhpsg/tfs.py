"""Typed feature structures.

Two representations are used:

* :class:`FeatureStructure` is an immutable value.  Its nodes are numbered in
  depth-first order from the root, so two structures are equal (``==``) exactly
  when they are alphabetic variants.
* :class:`Store` is a mutable union-find graph in which unification and
  description evaluation happen.  Structures are copied into a store, combined,
  and read back with :meth:`Store.extract`.

Every node in a store is kept totally well-typed: all appropriate features are
present, their values lie below the declared value sorts, and the ``cons``
constraints of the node's sort (and its supersorts) hold.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable

from . import descr
from .errors import DescriptionError, GrammarError, UnificationFailure
from .signature import TOP, Signature

_UNIFY, _RESTRICT = 0, 1


class TypeSystem:
    """A signature plus sort constraints and macros."""

    def __init__(self, sig: Signature, cons=(), macros=None):
        self.sig = sig
        self.names = sig.sorts
        self.sid = sig.index
        self.glb = sig._glb
        self.below = sig.below
        self.bot = self.sid[TOP]
        self.macros = dict(macros or {})
        rank: dict[str, int] = {}
        for s in sig.sorts:
            for f in sig.approp[s]:
                rank.setdefault(f, len(rank))
        self.feat_rank = rank
        self.approp = [
            tuple((f, self.sid[v]) for f, v in sig.approp[s].items()) for s in sig.sorts
        ]
        self.approp_map = [dict(a) for a in self.approp]
        self.intro = {f: self.sid[s] for f, s in sig.feature_intro.items()}
        self._cons_src: dict[int, list] = {}
        for sort, ast, line in cons:
            if sort not in self.sid:
                raise DescriptionError(f"line {line}: constraint on unknown sort {sort!r}")
            self._cons_src.setdefault(self.sid[sort], []).append(ast)
        # supersorts carrying constraints, most general first
        depth = {s: len(sig.supersorts(s)) for s in sig.sorts}
        self.cons_up = []
        for s in sig.sorts:
            ups = [self.sid[u] for u in sig.supersorts(s) if self.sid[u] in self._cons_src]
            ups.sort(key=lambda i: depth[self.names[i]])
            self.cons_up.append(tuple(ups))
        self._cons_fs: dict[int, FeatureStructure] = {}
        self._cons_alts: dict[int, list[FeatureStructure]] = {}
        self._needed: dict[tuple, tuple] = {}
        self._tmpl: dict[int, FeatureStructure] = {}
        self._building: set[int] = set()

    # -- constraints and templates --

    def cons_needed(self, s: int, a: int, b: int) -> tuple:
        key = (s, a, b)
        r = self._needed.get(key)
        if r is None:
            have = set(self.cons_up[a]) | set(self.cons_up[b])
            r = tuple(c for c in self.cons_up[s] if c not in have)
            self._needed[key] = r
        return r

    def cons_alternatives(self, c: int) -> list[FeatureStructure]:
        """Each disjunct of the constraint on sort ``c`` as a structure."""
        alts = self._cons_alts.get(c)
        if alts is None:
            if c in self._building:
                raise GrammarError(f"constraint on {self.names[c]!r} is self-referential")
            self._building.add(c)
            try:
                alts = []
                for ast in self._cons_src[c]:
                    for conj in descr.expand(ast, self.macros):
                        st = Store(self)
                        root = st.new(self.bot)
                        if _eval(st, root, conj, {}, None):
                            fs = st.extract(root)
                            if fs is not None:
                                alts.append(fs)
                if not alts:
                    raise GrammarError(f"constraint on {self.names[c]!r} is unsatisfiable")
            finally:
                self._building.discard(c)
            self._cons_alts[c] = alts
        return alts

    def cons_fs(self, c: int) -> FeatureStructure:
        """The constraint applied to nodes of sort ``c``.

        A disjunctive constraint contributes the generalization of its
        disjuncts: the information common to every alternative.
        """
        fs = self._cons_fs.get(c)
        if fs is None:
            alts = self.cons_alternatives(c)
            fs = alts[0]
            for other in alts[1:]:
                fs = generalize(fs, other)
            self._cons_fs[c] = fs
        return fs

    def template(self, s: int) -> FeatureStructure:
        """Most general well-typed structure of sort ``s``."""
        fs = self._tmpl.get(s)
        if fs is None:
            if s in self._building or -s - 1 in self._building:
                raise GrammarError(f"sort {self.names[s]!r} has an infinite most general structure")
            self._building.add(-s - 1)
            try:
                st = Store(self)
                n = st._bare(s)
                st._specialize(n, s, self.bot, self.bot, [])
                if not st._drain():
                    raise GrammarError(f"sort {self.names[s]!r} admits no well-typed structure")
                fs = st.extract(n)
            finally:
                self._building.discard(-s - 1)
            self._tmpl[s] = fs
        return fs

    # -- conveniences --

    def sort_id(self, name: str) -> int:
        try:
            return self.sid[name]
        except KeyError:
            raise DescriptionError(f"unknown sort {name!r}") from None

    def parse(self, text: str, macros=None) -> list["FeatureStructure"]:
        return parse_description(text, self, macros)

    def parse_one(self, text: str, macros=None) -> "FeatureStructure":
        out = parse_description(text, self, macros)
        if len(out) != 1:
            raise DescriptionError(f"expected one structure, description has {len(out)}")
        return out[0]

    def top(self) -> "FeatureStructure":
        return self.template(self.bot)


# ---------------------------------------------------------------------------
# immutable structures

@dataclass(frozen=True)
class FeatureStructure:
    """Rooted sorted graph; node 0 is the root.

    ``nodes[i] = (sort, ((feature, target), ...))``.
    """

    nodes: tuple
    types: TypeSystem = field(compare=False, hash=False, repr=False)

    root = 0

    def __hash__(self) -> int:
        # structures are hashed a lot as cache keys; the node table never changes
        h = self.__dict__.get("_h")
        if h is None:
            h = hash(self.nodes)
            object.__setattr__(self, "_h", h)
        return h

    @property
    def sort(self) -> str:
        return self.nodes[0][0]

    def __len__(self) -> int:
        return len(self.nodes)

    def arcs(self, i: int = 0) -> dict:
        return dict(self.nodes[i][1])

    def path_value(self, path) -> int | None:
        """Node reached by following ``path`` (features, or 'A|B' text)."""
        if isinstance(path, str):
            path = [p for p in path.replace("|", " ").split() if p]
        n = 0
        for f in path:
            f = f.lower().replace("-", "_")
            for g, t in self.nodes[n][1]:
                if g == f:
                    n = t
                    break
            else:
                return None
        return n

    def sort_at(self, path) -> str | None:
        n = self.path_value(path)
        return None if n is None else self.nodes[n][0]

    def sub(self, path) -> "FeatureStructure | None":
        """The substructure rooted at ``path`` as its own structure."""
        n = self.path_value(path)
        if n is None:
            return None
        st = Store(self.types)
        base = st.add(self)
        return st.extract(base + n)

    def __str__(self) -> str:
        return render_avm(self)


class Skeleton:
    """Several named roots over one node table (compiled rule bodies etc.)."""

    __slots__ = ("fs_nodes", "roots", "ineqs", "types", "sort_guards", "_compiled")

    def __init__(self, nodes: tuple, roots: dict, types: TypeSystem, ineqs=()):
        self.fs_nodes = nodes
        self.roots = roots
        self.types = types
        self.ineqs = tuple(ineqs)
        # (root name, sort id): the node there must not be of that sort
        self.sort_guards: tuple = ()
        self._compiled = None


def quick_checks(types: TypeSystem, nodes: tuple, root: int, max_depth: int = 6,
                 limit: int = 48) -> tuple:
    """Informative ``(path, sort id)`` pairs under ``root`` for a cheap clash test.

    A node is informative when its sort is more specific than what its
    feature's appropriateness already guarantees.
    """
    out = []
    seen = {root}
    queue = [(root, (), types.bot)]
    for x, path, expect in queue:
        s, arcs = nodes[x]
        sid = types.sid[s]
        if sid != expect:
            out.append((path, sid))
            if len(out) >= limit:
                break
        if len(path) < max_depth:
            am = types.approp_map[sid]
            for f, t in arcs:
                if t not in seen:
                    seen.add(t)
                    queue.append((t, path + (f,), am[f]))
    return tuple(out)


def _compile(types: TypeSystem, nodes: tuple):
    sid = types.sid
    return [sid[s] for s, _ in nodes], [a for _, a in nodes]


# ---------------------------------------------------------------------------
# the mutable store

class Store:
    """Union-find graph of well-typed nodes."""

    __slots__ = ("types", "sort", "arcs", "par", "ineqs", "_stack")

    def __init__(self, types: TypeSystem):
        self.types = types
        self.sort: list[int] = []
        self.arcs: list[dict] = []
        self.par: list[int] = []
        self.ineqs: tuple = ()
        self._stack: list = []

    def copy(self) -> "Store":
        st = Store.__new__(Store)
        st.types = self.types
        st.sort = self.sort[:]
        st.arcs = self.arcs[:]
        st.par = self.par[:]
        st.ineqs = self.ineqs
        st._stack = []
        return st

    def __len__(self) -> int:
        return len(self.sort)

    # -- nodes --

    def find(self, x: int) -> int:
        par = self.par
        r = x
        while par[r] != r:
            r = par[r]
        while par[x] != r:
            par[x], x = r, par[x]
        return r

    def _bare(self, s: int) -> int:
        n = len(self.sort)
        self.sort.append(s)
        self.arcs.append({})
        self.par.append(n)
        return n

    def new(self, s: int | str) -> int:
        """Fresh most general well-typed node of sort ``s``."""
        if isinstance(s, str):
            s = self.types.sort_id(s)
        t = self.types.template(s)
        return self.add(t)

    def add(self, fs: FeatureStructure) -> int:
        """Copy ``fs`` in; returns the store id of its root."""
        return self._add_nodes(fs.nodes, getattr(fs, "_c", None) or _cache_compiled(fs))

    def add_skeleton(self, sk: Skeleton) -> dict:
        if sk._compiled is None:
            sk._compiled = _compile(sk.types, sk.fs_nodes)
        base = self._add_nodes(sk.fs_nodes, sk._compiled)
        if sk.ineqs:
            self.ineqs = self.ineqs + tuple((a + base, b + base) for a, b in sk.ineqs)
        return {k: v + base for k, v in sk.roots.items()}

    def _add_nodes(self, nodes, compiled) -> int:
        sorts, arcl = compiled
        base = len(self.sort)
        self.sort.extend(sorts)
        self.par.extend(range(base, base + len(sorts)))
        self.arcs.extend({f: t + base for f, t in a} for a in arcl)
        return base

    def val(self, x: int, f: str) -> int | None:
        t = self.arcs[self.find(x)].get(f)
        return None if t is None else self.find(t)

    def path(self, x: int, path) -> int | None:
        for f in path:
            x = self.val(x, f)
            if x is None:
                return None
        return x

    def sort_of(self, x: int) -> str:
        return self.types.names[self.sort[self.find(x)]]

    def is_a(self, x: int, s: str) -> bool:
        t = self.types
        return bool(t.below[t.sid[s]] >> self.sort[self.find(x)] & 1)

    # -- unification --

    def unify(self, a: int, b: int) -> bool:
        self._stack.append((_UNIFY, a, b))
        return self._drain()

    def restrict(self, a: int, s: int | str) -> bool:
        if isinstance(s, str):
            s = self.types.sort_id(s)
        self._stack.append((_RESTRICT, a, s))
        return self._drain()

    def _drain(self) -> bool:
        stack = self._stack
        types = self.types
        glb = types.glb
        sort = self.sort
        arcs = self.arcs
        find = self.find
        par = self.par
        while stack:
            kind, a, b = stack.pop()
            a = find(a)
            if kind == _UNIFY:
                b = find(b)
                if a == b:
                    continue
                sa, sb = sort[a], sort[b]
                s = glb[sa][sb]
                if s < 0:
                    stack.clear()
                    return False
                arcs_a, arcs_b = arcs[a], arcs[b]
                if len(arcs_b) > len(arcs_a):
                    a, b, sa, sb, arcs_a, arcs_b = b, a, sb, sa, arcs_b, arcs_a
                par[b] = a
                sort[a] = s
                merged = None
                for f, v in arcs_b.items():
                    w = arcs_a.get(f)
                    if w is None:
                        if merged is None:
                            merged = dict(arcs_a)
                        merged[f] = v
                    else:
                        stack.append((_UNIFY, w, v))
                if merged is not None:
                    arcs[a] = merged
                if s != sa and s != sb:
                    if not self._specialize(a, s, sa, sb, stack):
                        stack.clear()
                        return False
            else:
                sa = sort[a]
                s = glb[sa][b]
                if s < 0:
                    stack.clear()
                    return False
                if s != sa:
                    sort[a] = s
                    if not self._specialize(a, s, sa, types.bot, stack):
                        stack.clear()
                        return False
        return True

    def _specialize(self, a: int, s: int, sa: int, sb: int, stack) -> bool:
        """Node ``a`` has just become sort ``s``; restore well-typedness."""
        types = self.types
        below = types.below
        arcs = self.arcs
        cur = arcs[a]
        new = None
        for f, v in types.approp[s]:
            t = cur.get(f)
            if t is None:
                if new is None:
                    new = dict(cur)
                new[f] = self.add(types.template(v))
            else:
                t = self.find(t)
                if not below[v] >> self.sort[t] & 1:
                    stack.append((_RESTRICT, t, v))
        if new is not None:
            arcs[a] = new
            cur = new
        if len(cur) > len(types.approp[s]):
            ok = types.approp_map[s]
            if any(f not in ok for f in cur):
                return False
        for c in types.cons_needed(s, sa, sb):
            stack.append((_UNIFY, a, self.add(types.cons_fs(c))))
        return True

    def compatible(self, x: int, checks) -> bool:
        """False if some ``(path, sort id)`` in ``checks`` clashes with node ``x``.

        Paths missing under ``x`` are not evidence either way, so True means
        only that unification was not ruled out cheaply.
        """
        glb = self.types.glb
        sort = self.sort
        arcs = self.arcs
        find = self.find
        for path, sid in checks:
            n = find(x)
            for f in path:
                n = arcs[n].get(f)
                if n is None:
                    break
                n = find(n)
            else:
                if glb[sort[n]][sid] < 0:
                    return False
        return True

    def ineqs_ok(self) -> bool:
        return all(self.find(a) != self.find(b) for a, b in self.ineqs)

    def add_ineq(self, a: int, b: int) -> None:
        self.ineqs = self.ineqs + ((a, b),)

    # -- reading back --

    def extract(self, root: int) -> FeatureStructure | None:
        """Canonical immutable copy of the graph under ``root``; None if cyclic."""
        nodes, _ = self._extract([root])
        if nodes is None:
            return None
        return _make_fs(nodes, self.types)

    def extract_many(self, roots: dict) -> Skeleton | None:
        names = list(roots)
        nodes, num = self._extract([roots[k] for k in names])
        if nodes is None:
            return None
        sk = Skeleton(nodes, {k: num[self.find(roots[k])] for k in names}, self.types)
        ineqs = []
        for a, b in self.ineqs:
            a, b = self.find(a), self.find(b)
            if a == b:
                return None
            if a in num and b in num:
                ineqs.append((num[a], num[b]))
        sk.ineqs = tuple(ineqs)
        return sk

    def _extract(self, roots):
        find = self.find
        sort = self.sort
        arcs = self.arcs
        names = self.types.names
        approp = self.types.approp
        rank = self.types.feat_rank
        num: dict[int, int] = {}
        order: list[int] = []
        out_arcs: list = []
        onpath: set[int] = set()
        for r in roots:
            r = find(r)
            if r in num:
                continue
            # iterative pre-order DFS with explicit exit markers for cycle checks
            stack = [(r, False)]
            while stack:
                x, leaving = stack.pop()
                if leaving:
                    onpath.discard(x)
                    continue
                if x in num:
                    if x in onpath:
                        return None, None
                    continue
                num[x] = len(order)
                order.append(x)
                onpath.add(x)
                stack.append((x, True))
                a = arcs[x]
                if len(a) == len(approp[sort[x]]):
                    feats = [f for f, _ in approp[sort[x]]]
                else:
                    feats = sorted(a, key=rank.__getitem__)
                kids = [(f, find(a[f])) for f in feats]
                out_arcs.append(kids)
                for f, y in reversed(kids):
                    if y in onpath:
                        return None, None
                    stack.append((y, False))
        nodes = tuple(
            (names[sort[x]], tuple((f, num[y]) for f, y in kids))
            for x, kids in zip(order, out_arcs)
        )
        return nodes, num


def fs_compatible(fs: FeatureStructure, checks) -> bool:
    """Like :meth:`Store.compatible`, directly on an immutable structure."""
    glb = fs.types.glb
    sid = fs.types.sid
    nodes = fs.nodes
    for path, s in checks:
        n = 0
        for f in path:
            for g, t in nodes[n][1]:
                if g == f:
                    n = t
                    break
            else:
                break
        else:
            if glb[sid[nodes[n][0]]][s] < 0:
                return False
    return True


def _cache_compiled(fs: FeatureStructure):
    c = _compile(fs.types, fs.nodes)
    object.__setattr__(fs, "_c", c)
    return c


def _make_fs(nodes: tuple, types: TypeSystem) -> FeatureStructure:
    return FeatureStructure(nodes, types)


# ---------------------------------------------------------------------------
# description evaluation

def _eval(st: Store, node: int, ast, env: dict, guards: list | None) -> bool:
    """Constrain ``node`` by a disjunction-free, macro-free description."""
    k = ast[0]
    if k == "sort":
        return st.restrict(node, ast[1])
    if k == "and":
        return all(_eval(st, node, a, env, guards) for a in ast[1])
    if k == "feat":
        child = _feature(st, node, ast[1])
        return child is not None and _eval(st, child, ast[2], env, guards)
    if k == "var":
        other = env.get(ast[1])
        if other is None:
            env[ast[1]] = node
            return True
        return st.unify(other, node)
    if k == "any":
        return True
    if k == "list":
        cur = node
        for item in ast[1]:
            if not st.restrict(cur, "ne_list"):
                return False
            hd = _feature(st, cur, "hd")
            if hd is None or not _eval(st, hd, item, env, guards):
                return False
            cur = _feature(st, cur, "tl")
        if ast[2] is None:
            return st.restrict(cur, "e_list")
        return _eval(st, cur, ast[2], env, guards)
    if k == "set":
        cur = node
        for item in ast[1]:
            if not st.restrict(cur, "ne_set"):
                return False
            el = _feature(st, cur, "el")
            if el is None or not _eval(st, el, item, env, guards):
                return False
            cur = _feature(st, cur, "els")
        return st.restrict(cur, "e_list")
    if k == "patheq":
        p1 = _walk(st, node, ast[1])
        p2 = _walk(st, node, ast[2])
        return p1 is not None and p2 is not None and st.unify(p1, p2)
    if k == "ineq":
        if guards is None:
            raise DescriptionError("'=\\=' is only allowed in definite clause heads")
        guards.append((node, ast[1]))
        return True
    raise DescriptionError(f"cannot evaluate description node {k!r}")


def _feature(st: Store, node: int, f: str) -> int | None:
    types = st.types
    intro = types.intro.get(f)
    if intro is None:
        raise DescriptionError(f"unknown feature {f!r}")
    n = st.find(node)
    t = st.arcs[n].get(f)
    if t is None:
        if not st.restrict(n, intro):
            return None
        t = st.arcs[st.find(n)].get(f)
    return st.find(t)


def _walk(st: Store, node: int, path) -> int | None:
    for f in path:
        node = _feature(st, node, f)
        if node is None:
            return None
    return node


def evaluate(st: Store, node: int, ast, env: dict | None = None, guards=None) -> bool:
    """Public entry: evaluate one disjunction-free description on ``node``."""
    return _eval(st, node, ast, {} if env is None else env, guards)


def _check_names(ast, types: TypeSystem) -> None:
    k = ast[0]
    if k == "sort":
        types.sort_id(ast[1])
    elif k == "feat":
        if ast[1] not in types.intro:
            raise DescriptionError(f"unknown feature {ast[1]!r}")
        _check_names(ast[2], types)
    elif k in ("and", "or", "set"):
        for a in ast[1]:
            _check_names(a, types)
        if k == "and":
            _check_conjunction(ast[1], types)
    elif k == "list":
        for a in ast[1]:
            _check_names(a, types)
        if ast[2] is not None:
            _check_names(ast[2], types)
    elif k == "ineq":
        _check_names(ast[1], types)
    elif k == "patheq":
        for f in ast[1] + ast[2]:
            if f not in types.intro:
                raise DescriptionError(f"unknown feature {f!r}")
    elif k == "macro":
        for a in ast[2]:
            _check_names(a, types)


def _check_conjunction(parts, types: TypeSystem) -> None:
    """A sort literal next to a feature no subsort of it can carry."""
    sig = types.sig
    sorts = [a[1] for a in parts if a[0] == "sort"]
    for a in parts:
        if a[0] != "feat":
            continue
        for s in sorts:
            if sig.glb(s, sig.feature_intro[a[1]]) is None:
                raise DescriptionError(f"feature {a[1]!r} is not appropriate for sort {s!r}")


def parse_description(text: str, types: TypeSystem, macros=None) -> list[FeatureStructure]:
    """All structures described by ``text``, one per consistent disjunct.

    ``text`` may use the grammar's description syntax or the bracketed AVM
    notation produced by :func:`render_avm`.
    """
    ast = descr.parse_term(text) if isinstance(text, str) else text
    return describe(ast, types, macros)


def describe(ast, types: TypeSystem, macros=None) -> list[FeatureStructure]:
    mac = types.macros if macros is None else {**types.macros, **macros}
    _check_names(ast, types)
    out: list[FeatureStructure] = []
    seen = set()
    for conj in descr.expand(ast, mac):
        _check_names(conj, types)
        st = Store(types)
        root = st.new(types.bot)
        if not _eval(st, root, conj, {}, None):
            continue
        fs = st.extract(root)
        if fs is not None and fs not in seen:
            seen.add(fs)
            out.append(fs)
    return out


def compile_skeleton(types: TypeSystem, named: list, macros=None, extra_vars=()) -> list[Skeleton]:
    """Evaluate several descriptions over one shared variable scope.

    ``named`` is a list of (root-name, ast).  Variables listed in ``extra_vars``
    are exported as additional roots (for goal arguments).  One skeleton is
    returned per consistent disjunctive expansion.
    """
    mac = types.macros if macros is None else {**types.macros, **macros}
    expansions = [descr.expand(ast, mac) for _, ast in named]
    out = []
    for combo in itertools.product(*expansions):
        st = Store(types)
        env: dict = {}
        roots = {}
        guards: list = []
        ok = True
        for (name, _), conj in zip(named, combo):
            _check_names(conj, types)
            r = st.new(types.bot)
            roots[name] = r
            if not _eval(st, r, conj, env, guards):
                ok = False
                break
        if not ok:
            continue
        sort_guards = []
        for i, (node, g) in enumerate(guards):
            if g[0] == "sort":
                roots[f"?{i}"] = node
                sort_guards.append((f"?{i}", types.sort_id(g[1])))
            elif g[0] == "var":
                other = env.get(g[1])
                if other is None:
                    other = env[g[1]] = st.new(types.bot)
                st.add_ineq(node, other)
            else:
                raise DescriptionError("'=\\=' must be followed by a sort or a variable")
        for v in extra_vars:
            if v not in env:
                env[v] = st.new(types.bot)
        for v, n in env.items():
            roots.setdefault("$" + v, n)
        sk = st.extract_many(roots)
        if sk is not None:
            sk.sort_guards = tuple(sort_guards)
            out.append(sk)
    return out


# ---------------------------------------------------------------------------
# operations on immutable structures

def unify(a: FeatureStructure, b: FeatureStructure) -> FeatureStructure | None:
    """Most general structure subsumed by both, or None."""
    st = Store(a.types)
    ra = st.add(a)
    rb = st.add(b)
    if not st.unify(ra, rb):
        return None
    return st.extract(ra)


def unify_or_raise(a: FeatureStructure, b: FeatureStructure) -> FeatureStructure:
    r = unify(a, b)
    if r is None:
        raise UnificationFailure("structures do not unify")
    return r


def subsumes(general: FeatureStructure, specific: FeatureStructure) -> bool:
    """True iff ``specific`` carries all information of ``general``."""
    sig_below = general.types.below
    sid = general.types.sid
    g_nodes, s_nodes = general.nodes, specific.nodes
    m: dict[int, int] = {}
    stack = [(0, 0)]
    while stack:
        g, s = stack.pop()
        prev = m.get(g)
        if prev is not None:
            if prev != s:
                return False
            continue
        m[g] = s
        gs, garcs = g_nodes[g]
        ss, sarcs = s_nodes[s]
        if not sig_below[sid[gs]] >> sid[ss] & 1:
            return False
        sd = dict(sarcs)
        for f, t in garcs:
            u = sd.get(f)
            if u is None:
                return False
            stack.append((t, u))
    return True


def iso_equal(a: FeatureStructure, b: FeatureStructure) -> bool:
    return a.nodes == b.nodes


def generalize(a: FeatureStructure, b: FeatureStructure) -> FeatureStructure:
    """Most specific structure subsuming both (anti-unification)."""
    types = a.types
    sig = types.sig
    pairs: dict[tuple, int] = {}
    nodes: list = []

    def visit(x: int, y: int) -> int:
        key = (x, y)
        if key in pairs:
            return pairs[key]
        i = len(nodes)
        pairs[key] = i
        nodes.append(None)
        sx, ax = a.nodes[x]
        sy, ay = b.nodes[y]
        s = sig.lub(sx, sy)
        dy = dict(ay)
        kids = []
        for f, t in ax:
            if f in dy and f in types.approp_map[types.sid[s]]:
                kids.append((f, visit(t, dy[f])))
        nodes[i] = (s, kids)
        return i

    visit(0, 0)
    raw = FeatureStructure(tuple((s, tuple(k)) for s, k in nodes), types)
    # renumber canonically and restore well-typedness
    out = well_type(raw)
    if out is None:  # pragma: no cover - lub of well-typed values is well-typed
        raise GrammarError("generalization is not well-typed")
    return out


def well_type(fs: FeatureStructure) -> FeatureStructure | None:
    """Add missing appropriate features and push value restrictions down.

    Sort constraints of the type system are applied as well.  Returns None
    when a present feature is inappropriate or a value violates its
    restriction irreparably.
    """
    types = fs.types
    st = Store(types)
    base = len(st.sort)
    for s, arcs in fs.nodes:
        sid = types.sort_id(s)
        n = st._bare(sid)
        st.arcs[n] = {f: t + base for f, t in arcs}
    for i, (s, arcs) in enumerate(fs.nodes):
        sid = types.sid[s]
        ok = types.approp_map[sid]
        for f, _ in arcs:
            if f not in ok:
                return None
        if not st._specialize(base + i, sid, types.bot, types.bot, st._stack):
            return None
    if not st._drain():
        return None
    return st.extract(base)


def from_nodes(types: TypeSystem, nodes) -> FeatureStructure:
    """Raw structure from explicit (sort, {feature: index}) nodes, node 0 root.

    The result is not checked for well-typedness; pass it to :func:`well_type`.
    """
    norm = []
    for s, arcs in nodes:
        types.sort_id(s)
        items = arcs.items() if isinstance(arcs, dict) else arcs
        norm.append((s, tuple(sorted(items, key=lambda kv: types.feat_rank.get(kv[0], 1 << 30)))))
    return FeatureStructure(_renumber(tuple(norm)), types)


def _renumber(nodes: tuple) -> tuple:
    num: dict[int, int] = {}
    order = []
    stack = [0]
    while stack:
        x = stack.pop()
        if x in num:
            continue
        num[x] = len(order)
        order.append(x)
        for _, t in reversed(nodes[x][1]):
            if t not in num:
                stack.append(t)
    return tuple((nodes[x][0], tuple((f, num[t]) for f, t in nodes[x][1])) for x in order)


def check_sort_resolved(fs: FeatureStructure) -> list[tuple]:
    """Paths (shortest first) to nodes whose sort is not a leaf sort."""
    sig = fs.types.sig
    seen = {0: ()}
    queue = [0]
    out = []
    for x in queue:
        s, arcs = fs.nodes[x]
        if not sig.is_leaf(s):
            out.append(seen[x])
        for f, t in arcs:
            if t not in seen:
                seen[t] = seen[x] + (f,)
                queue.append(t)
    return out


def satisfies_constraints(fs: FeatureStructure) -> list[tuple]:
    """Paths where some sort constraint (one of its disjuncts) fails to hold."""
    types = fs.types
    bad = []
    paths = {0: ()}
    queue = [0]
    for x in queue:
        s, arcs = fs.nodes[x]
        sub = None
        for c in types.cons_up[types.sid[s]]:
            if sub is None:
                st = Store(types)
                base = st.add(fs)
                sub = st.extract(base + x)
            if not any(subsumes(alt, sub) for alt in types.cons_alternatives(c)):
                bad.append((paths[x], types.names[c]))
        for f, t in arcs:
            if t not in paths:
                paths[t] = paths[x] + (f,)
                queue.append(t)
    return bad


# ---------------------------------------------------------------------------
# rendering

def render_avm(fs: FeatureStructure) -> str:
    """Attribute-value matrix text; shared nodes carry ``#n`` tags."""
    return _Renderer(fs).render()


class _Renderer:
    def __init__(self, fs: FeatureStructure):
        self.fs = fs
        self.types = fs.types
        count = [0] * len(fs.nodes)
        count[0] = 1
        for _, arcs in fs.nodes:
            for _, t in arcs:
                count[t] += 1
        self.shared = [c > 1 for c in count]
        self.tags: dict[int, int] = {}
        self.trivial_memo: dict[tuple, bool] = {}

    def render(self) -> str:
        nodes = self.fs.nodes
        if len(nodes) == 1 and nodes[0][0] == TOP:
            return "[ ]"
        return self.value(0, TOP)

    def _trivial(self, x: int, ctx: str) -> bool:
        """Node equals the most general value for its context.

        An unshared node at exactly the context sort whose children are all
        trivial is the context's template: any constraint contributing
        information would show up as a more specific sort or as sharing.
        """
        key = (x, ctx)
        r = self.trivial_memo.get(key)
        if r is None:
            s, arcs = self.fs.nodes[x]
            r = (not self.shared[x] and s == ctx
                 and all(self._trivial(t, self._ctx(s, f)) for f, t in arcs))
            self.trivial_memo[key] = r
        return r

    def _ctx(self, s: str, f: str) -> str:
        types = self.types
        return types.names[types.approp_map[types.sid[s]][f]]

    def value(self, x: int, ctx: str, indent: int = 0) -> str:
        prefix = ""
        if self.shared[x]:
            if x in self.tags:
                return f"#{self.tags[x]}"
            self.tags[x] = len(self.tags) + 1
            prefix = f"#{self.tags[x]} "
        return prefix + self._body(x, ctx, indent + len(prefix))

    def _body(self, x: int, ctx: str, indent: int) -> str:
        fs = self.fs
        s, arcs = fs.nodes[x]
        compact = self._compact(x, ctx, indent)
        if compact is not None:
            return compact
        rows = [(f, t) for f, t in arcs if not self._trivial(t, self._ctx(s, f))]
        if not rows:
            if s == TOP:
                return "[ ]"
            return s
        label = None if self._inferable(s, ctx, [f for f, _ in rows]) else s
        lines = []
        pad = " " * (indent + 1)
        for i, (f, t) in enumerate(rows):
            name = f.upper().replace("_", "-")
            col = indent + 1 + len(name) + 1
            v = self.value(t, self._ctx(s, f), col)
            lines.append(f"{name} {v}")
        if label is None:
            head = "[" + lines[0]
            rest = lines[1:]
        else:
            head = "[" + label
            rest = lines
        body = head + "".join("\n" + pad + ln for ln in rest)
        return body + "]"

    def _inferable(self, s: str, ctx: str, feats: list[str]) -> bool:
        sig = self.types.sig
        g = ctx
        for f in feats:
            g = sig.glb(g, sig.feature_intro[f])
            if g is None:
                return False
        return g == s

    def _compact(self, x: int, ctx: str, indent: int) -> str | None:
        """<a, b> lists, "abc" strings and {a, b} sets where unambiguous."""
        types = self.types
        sig = types.sig
        fs = self.fs
        s = fs.nodes[x][0]
        is_list = "ne_list" in sig and sig.subsort(s, "ne_list")
        is_set = "ne_set" in sig and sig.subsort(s, "ne_set")
        if not (is_list or is_set):
            return None
        hd, tl = ("hd", "tl") if is_list else ("el", "els")
        spine = []
        cur, c = x, ctx
        while True:
            cs, arcs = fs.nodes[cur]
            if cs == "e_list" and not self.shared[cur] and sig.glb(c, "e_list") == "e_list":
                break
            kind = "ne_list" if is_list else "ne_set"
            if (cur != x and self.shared[cur]) or sig.glb(c, kind) != cs:
                return None
            d = dict(arcs)
            if set(d) != {hd, tl}:
                return None
            spine.append((d[hd], self._ctx(cs, hd)))
            c = self._ctx(cs, tl)
            cur = d[tl]
        if is_list and all(
            not self.shared[h] and not fs.nodes[h][1] and len(fs.nodes[h][0]) == 1
            and sig.subsort(fs.nodes[h][0], "char") for h, _ in spine
        ) and "char" in sig:
            return '"' + "".join(fs.nodes[h][0] for h, _ in spine) + '"'
        open_, close = ("<", ">") if is_list else ("{", "}")
        parts = []
        col = indent + 1
        for h, hc in spine:
            v = self.value(h, hc, col)
            parts.append(v)
        if any("\n" in p for p in parts):
            sep = ",\n" + " " * (indent + 1)
        else:
            sep = ", "
        return open_ + sep.join(parts) + close


def to_json(fs: FeatureStructure) -> dict:
    return {
        "root": 0,
        "nodes": [{"sort": s, "arcs": {f: t for f, t in arcs}} for s, arcs in fs.nodes],
    }


def from_json(data, types: TypeSystem) -> FeatureStructure:
    if isinstance(data, str):
        data = json.loads(data)
    nodes = [(n["sort"], n["arcs"]) for n in data["nodes"]]
    r = data.get("root", 0)
    if r != 0:
        nodes[0], nodes[r] = nodes[r], nodes[0]
        swap = {0: r, r: 0}
        nodes = [(s, {f: swap.get(t, t) for f, t in a.items()}) for s, a in nodes]
    return from_nodes(types, nodes)


def nodes_below(fs: FeatureStructure, x: int = 0) -> Iterable[int]:
    seen = {x}
    stack = [x]
    while stack:
        y = stack.pop()
        yield y
        for _, t in fs.nodes[y][1]:
            if t not in seen:
                seen.add(t)
                stack.append(t)
