import json

import pytest
from hypothesis import given, strategies as st

from turkhpsg.errors import DescriptionError, UnificationFailure
from turkhpsg.tfs import (
    check_sort_resolved, from_json, from_nodes, generalize, iso_equal, parse_description,
    render_avm, subsumes, to_json, unify, unify_or_raise, well_type,
)

from oracles import RandomFS


def one(text, types):
    out = parse_description(text, types)
    assert len(out) == 1
    return out[0]


# -- descriptions --

def test_single_conjunct(grammar):
    fs = one("(common, case:nom)", grammar.types)
    assert fs.sort == "common"
    assert fs.sort_at("case") == "nom"


def test_disjunction_expands(grammar):
    out = parse_description("(pronoun, case:(nom;gen))", grammar.types)
    assert sorted(f.sort_at("case") for f in out) == ["gen", "nom"]


def test_macro_expansion(grammar):
    out = parse_description("@np((case:gen,agr:By),Ind2)", grammar.types)
    assert out
    for fs in out:
        assert fs.sort == "synsem"
        assert fs.sort_at("local|cat|head|case") == "gen"
        assert fs.sort_at("local|cat|subcat") == "e_list"


@pytest.mark.parametrize("text, msg", [
    ("nosuchsort", "unknown sort"),
    ("(agr, case:nom)", "not appropriate"),
    ("@nosuchmacro(a)", "macro"),
    ("@np(a)", "expects 2 argument"),
])
def test_description_errors(grammar, text, msg):
    with pytest.raises(DescriptionError, match=msg):
        parse_description(text, grammar.types)


def test_tags_are_token_identity(demo):
    fs = one("[HD-DTR [AGR #1 [PERSON third]] SUBJ-DTR [AGR #1]]", demo)
    assert fs.path_value("hd_dtr|agr") == fs.path_value("subj_dtr|agr")


# -- unification --

def test_unification_display(demo):
    a = one("[CAT noun AGR [PERSON third]]", demo)
    b = one("[CAT noun AGR [NUMBER sing]]", demo)
    assert render_avm(unify(a, b)) == "[CAT noun\n AGR [PERSON third\n      NUMBER sing]]"


def test_unification_failure(demo):
    a = one("[PERSON third]", demo)
    b = one("[PERSON first NUMBER singular]", demo)
    assert unify(a, b) is None
    assert unify(b, a) is None
    with pytest.raises(UnificationFailure):
        unify_or_raise(a, b)


def test_top_identity(demo):
    a = one("[CAT noun AGR [PERSON third]]", demo)
    assert iso_equal(unify(a, demo.top()), a)
    assert render_avm(demo.top()) == "[ ]"


def test_inputs_untouched(demo):
    a = one("[CAT noun]", demo)
    b = one("[AGR [NUMBER plur]]", demo)
    before = (a.nodes, b.nodes)
    unify(a, b)
    assert (a.nodes, b.nodes) == before


# -- subsumption --

@pytest.fixture(scope="module")
def sharing(demo):
    free = one("[HD-DTR [AGR [PERSON third]] SUBJ-DTR [AGR [PERSON third]]]", demo)
    tied = one("[HD-DTR [AGR #1 [PERSON third]] SUBJ-DTR [AGR #1]]", demo)
    return free, tied


def test_sharing_is_more_specific(sharing):
    free, tied = sharing
    assert subsumes(free, tied)
    assert not subsumes(tied, free)
    assert not iso_equal(free, tied)


def test_subsumption_reflexive_and_top(demo, sharing):
    for fs in sharing:
        assert subsumes(fs, fs)
        assert subsumes(demo.top(), fs)


# -- paths and typing --

def test_path_value(demo):
    kedi = one('[PHON "kedi" CAT noun AGR [PERSON third NUMBER sing]]', demo)
    assert kedi.sort_at("AGR|PERSON") == "third"
    assert kedi.path_value(()) == 0
    assert kedi.path_value("AGR|CASE") is None


def test_well_type_fills_features(grammar):
    t = grammar.types
    fs = well_type(from_nodes(t, [("noun", {})]))
    assert set(fs.arcs()) == {"case", "agr", "n_ind", "rel", "poss", "pred", "mod"}
    assert iso_equal(well_type(fs), fs)


def test_well_type_rejects_bad_value(grammar):
    raw = from_nodes(grammar.types, [("prep", {"mod": 1}), ("agr", {})])
    assert well_type(raw) is None


def test_sort_resolution(grammar, demo):
    assert check_sort_resolved(demo.top()) == [()]
    assert check_sort_resolved(one("(agr, per:third, num:sing)", grammar.types)) == []
    assert check_sort_resolved(one("(agr, per:third)", grammar.types)) == [("num",)]
    noun = one("(synsem, local:cat:head:noun)", grammar.types)
    assert ("local", "cat", "head") in check_sort_resolved(noun)


# -- rendering --

def test_shared_tag_printed_twice(sharing):
    text = render_avm(sharing[1])
    assert text.count("#1") == 2


def test_kedi_avm(demo):
    kedi = one('[PHON "kedi" CAT noun AGR [PERSON third NUMBER sing]]', demo)
    assert render_avm(kedi) == (
        '[PHON "kedi"\n CAT noun\n AGR [PERSON third\n      NUMBER sing]]')


def test_json_round_trip(grammar):
    fs = grammar.lexicon.lookup("kapısı")[0]
    back = from_json(json.dumps(to_json(fs)), grammar.types)
    assert iso_equal(back, fs)


# -- properties over random structures --

seeds = st.integers(min_value=0, max_value=2**32 - 1)


@given(seeds)
def test_unification_laws(types, seed):
    r = RandomFS(types, seed)
    a, b, c = r.triple()
    ab = unify(a, b)
    ba = unify(b, a)
    assert (ab is None) == (ba is None)
    if ab is not None:
        assert iso_equal(ab, ba)
        assert subsumes(a, ab) and subsumes(b, ab)
    assert iso_equal(unify(a, a), a)
    assert iso_equal(unify(a, types.top()), a)
    left = None if ab is None else unify(ab, c)
    bc = unify(b, c)
    right = None if bc is None else unify(a, bc)
    assert (left is None) == (right is None)
    if left is not None:
        assert iso_equal(left, right)


@given(seeds)
def test_galois_link(types, seed):
    r = RandomFS(types, seed)
    a, b = r.pair()
    u = unify(a, b)
    # structures below both operands, built by specializing each one
    for c in (r.make(a.sort), unify(a, r.make(a.sort)), unify(b, r.make(b.sort))):
        if c is None:
            continue
        if subsumes(a, c) and subsumes(b, c):
            assert u is not None and subsumes(u, c)


@given(seeds)
def test_subsumption_order(types, seed):
    r = RandomFS(types, seed)
    a, b, c = r.triple()
    assert subsumes(a, a)
    if subsumes(a, b) and subsumes(b, c):
        assert subsumes(a, c)
    if subsumes(a, b) and subsumes(b, a):
        assert iso_equal(a, b)
    assert subsumes(a, b) == (unify(a, b) is not None and iso_equal(unify(a, b), b))


@given(seeds)
def test_generalization_bounds(types, seed):
    a, b = RandomFS(types, seed).pair()
    g = generalize(a, b)
    assert subsumes(g, a) and subsumes(g, b)


@given(seeds)
def test_well_type_idempotent(types, seed):
    a = RandomFS(types, seed).make()
    w = well_type(a)
    assert w is not None and iso_equal(w, a)


@given(seeds)
def test_render_round_trip(types, seed):
    a = RandomFS(types, seed).make()
    back = parse_description(render_avm(a), types)
    assert len(back) == 1 and iso_equal(back[0], a)
