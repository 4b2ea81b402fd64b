import itertools
import math

import pytest
from hypothesis import given, strategies as st

from turkhpsg.errors import GrammarError
from turkhpsg.subcat import (
    Arg, OrderedList, UnorderedSet, concat, from_fs, linearizations, remove_optional,
    select_first, select_last,
)

a, b, c, d = (Arg(x) for x in "abcd")


def names(seq):
    return "".join(x.fs for x in seq)


def anything(arg, x):
    return True


def test_remove_optional():
    s = UnorderedSet((Arg("S"), Arg("D", True), Arg("A", True)))
    assert len(remove_optional(s)) == 4
    plain = OrderedList((a, b))
    assert remove_optional(plain) == [plain]
    assert remove_optional(OrderedList((Arg("x", True),))) == [OrderedList((Arg("x"),)), OrderedList(())]


def test_linearizations():
    s = OrderedList((UnorderedSet((a, b, c)), d))
    lins = linearizations(s)
    assert len(lins) == 6 and all(names(x).endswith("d") for x in lins)
    assert [names(x) for x in linearizations(OrderedList((a, b)))] == ["ab"]
    mixed = UnorderedSet((a, OrderedList((b, c))))
    assert sorted(names(x) for x in linearizations(mixed)) == ["abc", "bca"]


def test_linearizations_need_obligatory_args():
    with pytest.raises(GrammarError):
        linearizations(OrderedList((Arg("x", True),)))


def test_alternation_enforced():
    with pytest.raises(GrammarError):
        OrderedList((OrderedList((a,)),))
    with pytest.raises(GrammarError):
        UnorderedSet((UnorderedSet((a,)),))


def test_select_last():
    s = OrderedList((UnorderedSet((Arg("S"), Arg("D"), Arg("A"))), Arg("O")))
    rems = select_last("O", s)
    assert sorted(names(r) for r in rems) == sorted("".join(p) for p in itertools.permutations("SDA"))
    assert select_last("b", OrderedList((a, b))) == [(a,)]
    opt = OrderedList((a, Arg("b", True)))
    assert sorted(names(r) for r in select_last("?", opt, anything)) == ["", "a"]


def test_select_first():
    assert select_first("a", OrderedList((a, b))) == [(b,)]
    assert len(select_first("?", OrderedList((UnorderedSet((a, b)),)), anything)) == 2
    assert select_first("z", OrderedList((a, b))) == []


def test_concat():
    x = UnorderedSet((b,))
    assert concat([], x) == x
    assert concat([a], x) == OrderedList((a, x))
    assert concat([a], []) == OrderedList((a,))


def test_select_does_not_mutate():
    s = OrderedList((UnorderedSet((a, Arg("b", True))), c))
    before = repr(s)
    select_last("c", s)
    select_first("a", s)
    assert repr(s) == before


# -- random structures of up to five arguments --

def structs(labels):
    """Alternating list/set structures over distinct labels."""
    def build(draw, kind, pool):
        items = []
        while pool and (not items or draw(st.booleans())):
            if len(pool) > 1 and draw(st.integers(0, 3)) == 0:
                k = draw(st.integers(1, len(pool)))
                sub, pool = pool[:k], pool[k:]
                other = UnorderedSet if kind is OrderedList else OrderedList
                items.append(build(draw, other, sub))
            else:
                items.append(Arg(pool[0], draw(st.booleans())))
                pool = pool[1:]
        return kind(tuple(items))

    @st.composite
    def strat(draw):
        n = draw(st.integers(1, len(labels)))
        kind = draw(st.sampled_from([OrderedList, UnorderedSet]))
        return build(draw, kind, list(labels[:n]))

    return strat()


def brute_lins(s):
    """Orders of the argument labels allowed by the structure, by filtering all permutations."""
    args = [x.fs for x in _args(s)]

    def ok(order, node):
        if isinstance(node, Arg):
            return True
        blocks = [[x.fs for x in _args(it)] for it in node.items]
        pos = {x: i for i, x in enumerate(order)}
        # each item occupies a contiguous stretch
        for bl in blocks:
            idx = sorted(pos[x] for x in bl)
            if idx[-1] - idx[0] + 1 != len(idx):
                return False
        if isinstance(node, OrderedList):
            starts = [min(pos[x] for x in bl) for bl in blocks]
            if starts != sorted(starts):
                return False
        return all(ok(order, it) for it in node.items)

    return {p for p in itertools.permutations(args) if ok(p, s)}


def _args(s):
    if isinstance(s, Arg):
        yield s
    else:
        for it in s.items:
            yield from _args(it)


def set_factor(s):
    if isinstance(s, Arg):
        return 1
    f = math.factorial(len(s.items)) if isinstance(s, UnorderedSet) else 1
    return f * math.prod(set_factor(it) for it in s.items)


@given(structs("abcde"))
def test_linearization_count(s):
    for v in remove_optional(s):
        lins = linearizations(v)
        assert len(lins) == set_factor(v)
        assert {tuple(x.fs for x in lin) for lin in lins} == brute_lins(v)


def drain(s):
    """Label sequences obtained by selecting the last argument until nothing is left."""
    out = set()
    if any(not linearizations(v) or linearizations(v) == [()] for v in remove_optional(s)):
        out.add(())
    for lab in {x.fs for x in _args(s)}:
        for rest in select_last(lab, s):
            out |= {(lab,) + t for t in drain(OrderedList(rest))}
    return out


@given(structs("abcde"))
def test_repeated_select_last_reverses_orders(s):
    expected = {tuple(x.fs for x in reversed(lin))
                for v in remove_optional(s) for lin in linearizations(v)}
    assert drain(s) == expected


# -- the structures in the lexicon --

def test_gitti_subcat(lexicon):
    gitti = lexicon.entries("gitti")[0].fs
    s = from_fs(gitti, ("synsem", "local", "cat", "subcat"))
    variants = remove_optional(s)
    assert len(variants) == 4
    assert sorted(len(linearizations(v)) for v in variants) == [1, 2, 2, 6]
