"""Mixed ordered/unordered subcategorization with optional arguments.

A subcat value is a list whose items are arguments or sets, and a set whose
items are arguments or lists::

    < {Subj, opt Dat, opt Abl}, Obj >

Lists fix the relative order of their items, sets allow any order.  The
module offers the algebra on plain Python terms (:class:`OrderedList`,
:class:`UnorderedSet`, :class:`Arg`) and the same operations as goals over
feature-structure stores, which is how the phrase structure rules use them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Iterator

from .errors import GrammarError


@dataclass(frozen=True)
class Arg:
    fs: Any
    optional: bool = False
    # store node of the opt/obl wrapper, when read from a store
    wrapper: Any = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class OrderedList:
    items: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        for it in self.items:
            if isinstance(it, OrderedList):
                raise GrammarError("a list may not directly contain a list")
            if not isinstance(it, (Arg, UnorderedSet)):
                raise GrammarError(f"bad list item {it!r}")


@dataclass(frozen=True)
class UnorderedSet:
    items: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        for it in self.items:
            if isinstance(it, UnorderedSet):
                raise GrammarError("a set may not directly contain a set")
            if not isinstance(it, (Arg, OrderedList)):
                raise GrammarError(f"bad set item {it!r}")


Struct = Arg | OrderedList | UnorderedSet


def _unique(xs):
    seen = set()
    out = []
    for x in xs:
        if x not in seen:
            seen.add(x)
            out.append(x)
    return out


def _variants(s) -> list:
    """remove_optional on one item; an emptied item is returned as None."""
    if isinstance(s, Arg):
        kept = Arg(s.fs, False, s.wrapper)
        return [kept, None] if s.optional else [kept]
    parts = [_variants(it) for it in s.items]
    out = []
    for combo in itertools.product(*parts):
        items = tuple(c for c in combo if c is not None)
        out.append(type(s)(items) if items else None)
    return _unique(out)


def remove_optional(s: Struct) -> list:
    """Every way of dropping or keeping each optional argument.

    Kept arguments become obligatory.  Nested lists or sets emptied by
    dropping disappear.
    """
    out = []
    for v in _variants(s):
        if v is None:
            v = type(s)(()) if not isinstance(s, Arg) else OrderedList(())
        out.append(v)
    return _unique(out)


def linearizations(s: Struct) -> list[tuple]:
    """All flattenings: lists keep their order, sets contribute every permutation."""
    if isinstance(s, Arg):
        if s.optional:
            raise GrammarError("linearizations needs a structure without optional arguments")
        return [(s,)]
    parts = [linearizations(it) for it in s.items]
    if isinstance(s, OrderedList):
        orders = [range(len(parts))]
    else:
        orders = itertools.permutations(range(len(parts)))
    out = []
    for order in orders:
        for combo in itertools.product(*(parts[i] for i in order)):
            out.append(tuple(itertools.chain.from_iterable(combo)))
    return _unique(out)


def _default_match(arg, x) -> bool:
    from .tfs import FeatureStructure, unify

    if isinstance(arg, FeatureStructure) and isinstance(x, FeatureStructure):
        return unify(arg, x) is not None
    return arg == x


def _select(arg, s: Struct, last: bool, match) -> list[tuple]:
    match = match or _default_match
    out = []
    for variant in remove_optional(s):
        for lin in linearizations(variant):
            if not lin:
                continue
            pick, rest = (lin[-1], lin[:-1]) if last else (lin[0], lin[1:])
            if match(arg, pick.fs):
                out.append(rest)
    return _unique(out)


def select_last(arg, s: Struct, match: Callable | None = None) -> list[tuple]:
    """Remainders after taking ``arg`` as the last argument of some order."""
    return _select(arg, s, True, match)


def select_first(arg, s: Struct, match: Callable | None = None) -> list[tuple]:
    """Remainders after taking ``arg`` as the first argument of some order."""
    return _select(arg, s, False, match)


def _empty(s) -> bool:
    return isinstance(s, (OrderedList, UnorderedSet)) and not s.items


def concat(s1, s2):
    """Append a subcat value in front of another, the way the grammar does.

    ``([], X) -> X``; ``([a], {b}) -> <a, {b}>``; ``(X, []) -> X``;
    ``({..}, <..>) -> <{..}, ..>``; lists recurse on their tail; two sets
    merge.
    """
    if isinstance(s1, (list, tuple)):
        s1 = OrderedList(tuple(s1))
    if isinstance(s2, (list, tuple)):
        s2 = OrderedList(tuple(s2))
    if _empty(s1):
        return s2
    if isinstance(s1, OrderedList) and len(s1.items) == 1 and isinstance(s2, UnorderedSet) and s2.items:
        return OrderedList((s1.items[0], s2))
    if _empty(s2):
        return s1
    if isinstance(s1, UnorderedSet) and isinstance(s2, OrderedList):
        return OrderedList((s1,) + s2.items)
    if isinstance(s1, OrderedList):
        rest = concat(OrderedList(s1.items[1:]), s2)
        tail = rest.items if isinstance(rest, OrderedList) else (rest,)
        return OrderedList((s1.items[0],) + tail)
    if isinstance(s1, UnorderedSet) and isinstance(s2, UnorderedSet):
        return UnorderedSet(s1.items + s2.items)
    raise GrammarError("cannot concatenate these subcat values")


# ---------------------------------------------------------------------------
# the same operations over feature-structure stores
#
# Goals take a store and argument node ids and yield the stores in which
# the goal holds; the input store is never modified.

def _spine(st, x: int, hd: str, tl: str) -> list[int] | None:
    """Items of a closed list/set spine; an open tail is closed to e_list."""
    items = []
    while True:
        x = st.find(x)
        if st.is_a(x, "e_list"):
            return items
        h = st.val(x, hd)
        if h is None:
            if st.arcs[x] or not st.restrict(x, "e_list"):
                return None
            return items
        items.append(h)
        x = st.val(x, tl)


def read_struct(st, x: int):
    """SubcatStruct view of the value at ``x`` (payloads are store nodes)."""
    x = st.find(x)
    if st.val(x, "hd") is not None or st.is_a(x, "e_list") and not st.arcs[x]:
        items = _spine(st, x, "hd", "tl")
        if items is None:
            return None
        out = [_read_item(st, i) for i in items]
        return None if any(o is None for o in out) else OrderedList(tuple(out))
    if st.val(x, "el") is not None:
        items = _spine(st, x, "el", "els")
        if items is None:
            return None
        out = [_read_item(st, i) for i in items]
        return None if any(o is None for o in out) else UnorderedSet(tuple(out))
    if not st.arcs[x]:
        # unresolved empty value
        return OrderedList(()) if st.restrict(x, "e_list") else None
    return None


def _read_item(st, x: int):
    x = st.find(x)
    if st.is_a(x, "optionalcat"):
        return Arg(st.val(x, "s_arg"), not st.is_a(x, "obl"), x)
    if st.val(x, "hd") is not None or st.val(x, "el") is not None:
        return read_struct(st, x)
    return Arg(x, False, None)


def build_list(st, items, tail: int | None = None) -> int:
    """Fresh list cells holding ``items``; closed with e_list unless ``tail``."""
    cur = st.new("e_list") if tail is None else tail
    for it in reversed(list(items)):
        cell = st._bare(st.types.sid["ne_list"])
        st.arcs[cell] = {"hd": it, "tl": cur}
        cur = cell
    return cur


def _flat_synsems(s) -> bool:
    return isinstance(s, OrderedList) and all(
        isinstance(a, Arg) and a.wrapper is None for a in s.items)


def _store_select(st, arg: int, sub: int, out: int, last: bool) -> Iterator:
    probe = st.copy()
    s = read_struct(probe, sub)
    if s is None:
        return
    types = st.types
    # an already surfaced list of synsems: take the end deterministically
    if _flat_synsems(s) and s.items:
        ss = types.sid.get("ne_list_synsem")
        if ss is None or types.glb[probe.sort[probe.find(sub)]][ss] >= 0:
            items = [a.fs for a in s.items]
            pick, rest = (items[-1], items[:-1]) if last else (items[0], items[1:])
            if probe.unify(arg, pick):
                if probe.unify(out, build_list(probe, rest)):
                    yield probe
            return
    seen = set()
    for variant in remove_optional(s):
        dropped = _dropped(s, variant)
        for lin in linearizations(variant):
            if not lin:
                continue
            pick, rest = (lin[-1], lin[:-1]) if last else (lin[0], lin[1:])
            key = (probe.find(pick.fs), tuple(probe.find(a.fs) for a in rest))
            if key in seen:
                continue
            seen.add(key)
            st2 = probe.copy()
            if not all(st2.restrict(w, "opt") for w in dropped):
                continue
            if not st2.unify(arg, pick.fs):
                continue
            if st2.unify(out, build_list(st2, [a.fs for a in rest])):
                yield st2


def _args(s):
    if isinstance(s, Arg):
        yield s
    else:
        for it in s.items:
            yield from _args(it)


def _dropped(s, variant) -> list[int]:
    kept = {a.wrapper for a in _args(variant)}
    return [a.wrapper for a in _args(s) if a.optional and a.wrapper not in kept and a.wrapper is not None]


def goal_selectlast(st, arg, sub, out):
    yield from _store_select(st, arg, sub, out, True)


def goal_selectfirst(st, arg, sub, out):
    yield from _store_select(st, arg, sub, out, False)


def goal_append(st, a, b, out):
    """Plain list concatenation; ``a`` must be a closed list."""
    st = st.copy()
    items = _spine(st, a, "hd", "tl")
    if items is None or not st.restrict(b, "list"):
        return
    if st.unify(out, build_list(st, items, st.find(b))):
        yield st


def goal_appendset(st, a, b, out):
    """Set union by prepending the members of ``a`` to ``b``."""
    st = st.copy()
    if not st.restrict(b, "set"):
        return
    items = _spine(st, a, "el", "els")
    if items is None:
        return
    cur = st.find(b)
    for it in reversed(items):
        cell = st._bare(st.types.sid["ne_set"])
        st.arcs[cell] = {"el": it, "els": cur}
        cur = cell
    if st.unify(out, cur):
        yield st


def goal_appends(st, a, b, out):
    """Subcat concatenation with the clause order of the grammar's appends/3."""
    st = st.copy()
    r = _appends(st, a, b)
    if r is not None and st.unify(out, r):
        yield st


def _kind(st, x) -> str:
    x = st.find(x)
    if st.val(x, "hd") is not None:
        return "list"
    if st.val(x, "el") is not None:
        return "set"
    if st.is_a(x, "e_list"):
        return "empty"
    if not st.arcs[x]:
        return "open"
    return "other"


def _appends(st, a, b) -> int | None:
    ka, kb = _kind(st, a), _kind(st, b)
    if ka == "open":
        if not st.restrict(a, "e_list"):
            return None
        ka = "empty"
    if ka == "empty":
        return st.find(b)
    if ka == "list" and kb == "set" and _kind(st, st.val(a, "tl")) in ("empty", "open"):
        st.restrict(st.val(a, "tl"), "e_list")
        return build_list(st, [st.val(a, "hd"), st.find(b)])
    if kb in ("empty", "open"):
        if not st.restrict(b, "e_list"):
            return None
        return st.find(a)
    if ka == "set" and kb == "list":
        return build_list(st, [st.find(a)], st.find(b))
    if ka == "list":
        rest = _appends(st, st.val(a, "tl"), b)
        return None if rest is None else build_list(st, [st.val(a, "hd")], rest)
    if ka == "set" and kb == "set":
        rest = _appends(st, st.val(a, "els"), b)
        if rest is None:
            return None
        cell = st._bare(st.types.sid["ne_set"])
        st.arcs[cell] = {"el": st.val(a, "el"), "els": rest}
        return cell
    return None


# ---------------------------------------------------------------------------
# conversion between structures and feature structures

def from_fs(fs, path=()) -> Struct | None:
    """SubcatStruct of the subcat value at ``path``; payloads are structures."""
    from .tfs import Store

    st = Store(fs.types)
    root = st.add(fs)
    x = st.path(root, path) if path else root
    if x is None:
        return None
    s = read_struct(st, x)
    if s is None:
        return None
    return _payload_fs(st, s)


def _payload_fs(st, s):
    if isinstance(s, Arg):
        return Arg(st.extract(s.fs), s.optional)
    return type(s)(tuple(_payload_fs(st, it) for it in s.items))
