import pytest

from turkhpsg.descr import expand, parse_term, read_program, variables
from turkhpsg.errors import DescriptionError

SOURCE = """
% a bit of everything
:- lex_rule_depth(3).
word cons (qretr:e_list).
np(Head,Ind) macro (local:cat:head:(noun,Head), local:cont:index:Ind).
hfp rule (m) ===> cat> (a), cat> (b), goal> (append(X,Y,Z), hfp(X,Y)).
hfp(X,X) if true.
ev ---> (word, phon:[[e,v]]).
empty (word, phon:[[p,r,o]]).
kalin_hece([a,_]).
plural lex_rule (word) **> (word) morphs (X,L2) becomes (X,L2,lar) when kalin_hece(L2), X becomes (X,ler).
"""


def test_read_every_statement():
    p = read_program(SOURCE, "mini.ale")
    assert p.directives == {"lex_rule_depth": 3}
    assert [c[0] for c in p.cons] == ["word"]
    assert list(p.macros) == ["np"] and p.macros["np"].params == ["Head", "Ind"]
    assert p.rules[0].name == "hfp" and len(p.rules[0].daughters) == 2
    assert [g[1] for g in p.rules[0].goals] == ["append", "hfp"]
    assert p.clauses[0].name == "hfp"
    assert p.lexicon[0][0] == "ev" and p.lexicon[0][2] == 8
    assert len(p.empties) == 1
    assert p.facts[0][0][1] == "kalin_hece"
    lr = p.lex_rules[0]
    assert lr.name == "plural" and len(lr.morphs) == 2
    assert lr.morphs[0].guard[1] == "kalin_hece" and lr.morphs[1].guard is None


def test_error_names_source_and_line():
    with pytest.raises(DescriptionError, match=r"bad\.ale.*line 2"):
        read_program("a ---> b.\nev ---> (word, .", "bad.ale")


def test_duplicate_macro():
    with pytest.raises(DescriptionError, match="defined twice"):
        read_program("m macro a.\nm macro b.")


def test_disjunction_expansion():
    alts = expand(parse_term("(a, f:(b;c), g:(d;e))"), {})
    assert len(alts) == 4


def test_list_sugar_and_variables():
    t = parse_term("[a,B|T]")
    assert t[0] == "list" and len(t[1]) == 2
    assert variables(t) == {"B", "T"}


def test_avm_notation_is_accepted():
    t = parse_term("[CAT noun AGR [PERSON third]]")
    assert ("feat", "cat", ("sort", "noun")) in t[1]
