import pytest
from hypothesis import given, strategies as st

from turkhpsg.errors import SignatureError
from turkhpsg.signature import load_signature

from oracles import brute_glb, down_sets


@pytest.fixture(scope="module")
def sig(grammar):
    return grammar.signature


def test_head_subsorts(sig):
    assert sig.direct_subsorts["head"] == ["subst", "prep", "adverb", "verb"]


def test_minimal_signature():
    s = load_signature("a sub [].")
    assert set(s.sorts) == {"bot", "a"}
    assert s.subsort("a", "bot")
    assert s.appropriate_features("a") == {}


def test_missing_glb_is_reported():
    text = "x sub [a,b]. y sub [a,b]. a sub []. b sub []."
    with pytest.raises(SignatureError, match=r"\(x, y\)"):
        load_signature(text)


def test_missing_glb_agrees_with_enumeration():
    down = {"x": {"x", "a", "b"}, "y": {"y", "a", "b"}, "a": {"a"}, "b": {"b"}}
    assert brute_glb(down, "x", "y") == ["a", "b"]
    assert brute_glb(down, "x", "a") == "a"


@pytest.mark.parametrize("text, msg", [
    ("a sub [b]. b sub [a].", "cycle"),
    ("a sub []. a sub [].", "duplicate sort"),
    ("a sub [b,c]. b sub [] intro [f:a]. c sub [] intro [f:a].", "introduced twice"),
    ("a sub [] intro [f:nosuch].", "unknown value sort"),
])
def test_load_errors(text, msg):
    with pytest.raises(SignatureError, match=msg):
        load_signature(text)


def test_glb_examples(sig):
    assert sig.glb("noun", "common") == "common"
    assert sig.glb("noun", "verb") is None
    assert sig.glb("list", "set") == "e_list"


def test_noun_features(sig):
    assert sig.appropriate_features("noun") == {
        "pred": "bool", "mod": "null_mod", "case": "case", "agr": "agr",
        "n_ind": "agr", "rel": "bool", "poss": "posses"}


def test_top_and_finite_features(sig):
    assert sig.appropriate_features("bot") == {}
    fin = sig.appropriate_features("finite")
    verb = sig.appropriate_features("verb")
    assert set(fin) == set(verb) | {"aux_tense"}


def test_subsort(sig):
    assert sig.subsort("common", "noun")
    assert sig.subsort("noun", "noun")
    assert not sig.subsort("verb", "noun")
    with pytest.raises(SignatureError):
        sig.subsort("nosuch", "noun")


def test_leaf_sorts(sig):
    assert sig.leaf_sorts("bool") == {"plus", "minus"}
    assert sig.leaf_sorts("plus") == {"plus"}
    leaves = sig.leaf_sorts("noun")
    assert {"common", "proper_noun"} <= leaves
    assert {"personal_pr", "reflexive_pr"} <= leaves
    assert "noun" not in leaves


def test_turkish_identifiers(sig):
    assert "ış" in sig
    assert load_signature("çğış sub [].").is_leaf("çğış")


def test_glb_matches_enumeration(sig):
    down = down_sets(sig)
    for a in sig.sorts:
        for b in sig.sorts:
            assert sig.glb(a, b) == brute_glb(down, a, b), (a, b)


def sorts3(sig):
    return st.tuples(*[st.sampled_from(sig.sorts)] * 3)


@given(data=st.data())
def test_glb_lattice_laws(grammar, data):
    sig = grammar.signature
    a, b, c = data.draw(sorts3(sig))
    assert sig.glb(a, b) == sig.glb(b, a)
    assert sig.glb(a, a) == a
    assert sig.glb(a, "bot") == a
    ab = sig.glb(a, b)
    if ab is not None:
        assert sig.subsort(ab, a) and sig.subsort(ab, b)
        bc = sig.glb(b, c)
        assert sig.glb(ab, c) == (None if bc is None else sig.glb(a, bc))


def test_features_inherited_and_narrowed(sig):
    for s in sig.sorts:
        mine = sig.appropriate_features(s)
        for p in sig.supersorts(s):
            for f, v in sig.appropriate_features(p).items():
                assert f in mine
                assert sig.subsort(mine[f], v)
