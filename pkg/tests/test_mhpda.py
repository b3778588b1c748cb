import random
import warnings

import pytest
from hypothesis import given
from hypothesis import strategies as st

from boundedpda.errors import AlphabetMismatch, DimensionMismatch, MalformedId, ModelError
from boundedpda.genbench.random_gen import Limits, random_machine
from boundedpda.genbench.zoo import (
    anbn_cstar, astar_bncn, empty_machine, palindrome_machine, universal_machine,
)
from boundedpda.mhpda import (
    ACCEPTING, BUDGET_EXCEEDED, REJECTED, Id, Tpda, accepts_shared, accepts_tuple_exact,
    initial_id, intersection, language, replay, simulate_budgeted, step, union,
)
from boundedpda.words import ENDMARKER
from helpers import all_words

FIG1 = palindrome_machine()


def _is_fig1_word(w):
    s = "".join(w)
    if s.count("&") != 1:
        return False
    left, right = s.split("&")
    return left == right and left == left[::-1]


def test_fig1_step_from_up_with_epsilon_move():
    c = Id("q_up", (((), ("&", ENDMARKER)), ((), ("&", ENDMARKER))), ("⊥",))
    succ = step(FIG1, c)
    assert Id("q_down", c.tapes, ("⊥",)) in succ


def test_step_with_empty_stack_has_no_successor():
    c = Id("q_up", (((), (ENDMARKER,)), ((), (ENDMARKER,))), ())
    assert step(FIG1, c) == set()


def test_head_past_endmarker_only_fires_epsilon_moves():
    A = Tpda({"s", "t"}, ("a",), ("Z",), [("s", "a", "Z", "t", ("Z",)), ("s", None, "Z", "t", ("Z",))],
             {"s": 1, "t": 1}, "s", "Z", {"t"}, 1)
    c = Id("s", (((ENDMARKER,), ()),), ("Z",))
    assert step(A, c) == {Id("t", c.tapes, ("Z",))}


def test_malformed_id():
    with pytest.raises(MalformedId):
        Id("q", ((("a",), ("b",)),), ())
    with pytest.raises(MalformedId):
        step(FIG1, Id("q_up", (((), (ENDMARKER,)),), ("⊥",)))


def test_fig1_tuple_membership():
    assert accepts_tuple_exact(FIG1, ("0&0", "0&0"))
    assert not accepts_tuple_exact(FIG1, ("01&01", "01&01"))
    assert accepts_tuple_exact(FIG1, ("&", "&"))
    with pytest.raises(AlphabetMismatch):
        accepts_tuple_exact(FIG1, ("2", "2"))
    with pytest.raises(DimensionMismatch):
        accepts_tuple_exact(FIG1, ("&",))


def test_fig1_shared_membership():
    assert accepts_shared(FIG1, "010&010")
    assert not accepts_shared(FIG1, "")
    assert not accepts_shared(empty_machine(("0", "1", "&")), "0&0")


def test_fig1_language_up_to_length_7():
    lang = language(FIG1, 7)
    expected = {w for w in all_words("01&", 7) if _is_fig1_word(w)}
    assert lang == expected
    assert len(expected) == 9


def test_simulation_accepts_with_replayable_trace():
    res = simulate_budgeted(FIG1, ("0&0", "0&0"), 10_000)
    assert res.kind == ACCEPTING
    assert replay(FIG1, res.trace)
    assert res.trace[0] == initial_id(FIG1, ("0&0", "0&0"))
    assert res.trace[-1].all_off()


def test_simulation_budget_and_rejection():
    assert simulate_budgeted(FIG1, ("0&0", "0&0"), 1).kind == BUDGET_EXCEEDED
    bare = Tpda({"s"}, ("a",), ("Z",), [], {"s": 1}, "s", "Z", {"s"}, 1)
    assert simulate_budgeted(bare, ("a",), 100).kind == REJECTED
    assert simulate_budgeted(FIG1, ("", ""), 1000).kind == REJECTED


def test_too_many_heads_warns():
    with pytest.warns(UserWarning):
        Tpda({"s"}, ("a",), ("Z",), [], {"s": 1}, "s", "Z", set(), 2)


def test_validation_errors():
    with pytest.raises(ModelError):
        Tpda({"s"}, ("a",), ("Z",), [], {}, "s", "Z", set(), 1)
    with pytest.raises(ModelError):
        Tpda({"s"}, ("a", ENDMARKER), ("Z",), [], {"s": 1}, "s", "Z", set(), 1)


def test_union_and_intersection_of_counting_machines():
    A, B = anbn_cstar(), astar_bncn()
    U, I = union(A, B), intersection(A, B)
    assert U.heads == I.heads == 2
    assert accepts_shared(U, "abc")
    assert accepts_shared(I, "abc")
    assert not accepts_shared(I, "aabc")
    assert accepts_shared(I, "")
    assert accepts_shared(U, "aab") is False
    assert accepts_shared(U, "aabbc")


def test_union_with_empty_machine():
    A = anbn_cstar()
    U = union(empty_machine(A.alphabet), A)
    for w in all_words("abc", 5):
        assert accepts_shared(U, w) == accepts_shared(A, w)


def test_intersection_with_empty_machine_is_empty():
    A = anbn_cstar()
    assert language(intersection(A, empty_machine(A.alphabet)), 4) == set()


def test_closure_needs_equal_alphabets():
    with pytest.raises(AlphabetMismatch):
        union(anbn_cstar(), universal_machine(("a", "b")))


def _quiet_machine(rng, limits):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return random_machine(rng, limits)


@given(st.integers(0, 10**6))
def test_simulation_agrees_with_exact_membership(seed):
    rng = random.Random(seed)
    A = _quiet_machine(rng, Limits(4, 2))
    for w in all_words("ab", 3):
        res = simulate_budgeted(A, (w,) * A.heads, 4000)
        if res.kind == ACCEPTING:
            assert accepts_shared(A, w)
            assert replay(A, res.trace)
        elif res.kind == REJECTED:
            assert not accepts_shared(A, w)


@given(st.integers(0, 10**6))
def test_heads_move_right_and_stop_after_endmarker(seed):
    rng = random.Random(seed)
    A = _quiet_machine(rng, Limits(3, 2))
    c0 = initial_id(A, ("ab",) * A.heads)
    seen, todo = {c0}, [c0]
    while todo and len(seen) < 300:
        c = todo.pop()
        for c2 in step(A, c):
            for (l1, _), (l2, _) in zip(c.tapes, c2.tapes):
                assert l2[: len(l1)] == l1 and len(l2) - len(l1) in (0, 1)
            if c2 not in seen:
                seen.add(c2)
                todo.append(c2)


@given(st.integers(0, 10**6))
def test_closure_semantics_on_random_pairs(seed):
    rng = random.Random(seed)
    A, B = _quiet_machine(rng, Limits(3, 2)), _quiet_machine(rng, Limits(3, 2))
    U, I = union(A, B), intersection(A, B)
    assert U.heads == I.heads == A.heads + B.heads
    for w in all_words("ab", 3):
        a, b = accepts_shared(A, w), accepts_shared(B, w)
        assert accepts_shared(U, w) == (a or b)
        assert accepts_shared(I, w) == (a and b)
