import random

from hypothesis import given
from hypothesis import strategies as st

from boundedpda.cfg import cfg_analyze, cfg_membership
from boundedpda.pda import Pda, pda_accepts, pda_to_cfg, pda_words
from helpers import all_words, random_pda


def anbn_pda():
    trs = [
        ("p", "Z", "a", "p", ("A", "Z")),
        ("p", "A", "a", "p", ("A", "A")),
        ("p", "A", "b", "q", ()),
        ("q", "A", "b", "q", ()),
        ("p", "Z", None, "f", ("Z",)),
        ("q", "Z", None, "f", ("Z",)),
    ]
    return Pda({"p", "q", "f"}, "ab", ("Z", "A"), "p", "Z", {"f"}, trs)


def test_anbn_grammar_agrees_up_to_length_8():
    P = anbn_pda()
    G = pda_to_cfg(P)
    for w in all_words("ab", 8):
        expected = len(w) % 2 == 0 and w == ("a",) * (len(w) // 2) + ("b",) * (len(w) // 2)
        assert pda_accepts(P, w) == expected
        assert cfg_membership(G, w) == expected


def test_empty_language_gives_no_productions():
    P = Pda({"p"}, "a", ("Z",), "p", "Z", set(), [("p", "Z", "a", "p", ("Z",))])
    G = pda_to_cfg(P)
    assert G.productions == ()
    assert cfg_analyze(G).empty


def test_epsilon_only():
    P = Pda({"p"}, "a", ("Z",), "p", "Z", {"p"}, [])
    G = pda_to_cfg(P)
    assert pda_words(P, 3) == {()}
    assert {w for w in all_words("a", 3) if cfg_membership(G, w)} == {()}


def test_size_formula():
    P = anbn_pda()
    assert P.size() == 3 + 2 + sum(4 + len(t.push) for t in P.transitions)


@given(st.integers(0, 10**6))
def test_grammar_agrees_with_pda(seed):
    P = random_pda(random.Random(seed))
    G = pda_to_cfg(P)
    for w in all_words("ab", 6):
        assert cfg_membership(G, w) == pda_accepts(P, w)
