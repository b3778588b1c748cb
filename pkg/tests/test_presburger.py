import random

import pytest
import z3
from hypothesis import given, settings
from hypothesis import strategies as st

from boundedpda.cfg import cfg_parikh_box, parse_grammar
from boundedpda.errors import UnassignedVariable, UntrimmedGrammar
from boundedpda.genbench.zoo import anbn_cstar, astar_bncn
from boundedpda.mhpda import intersection
from boundedpda.pipeline import emptiness_formula
from boundedpda.presburger import (
    Atom, Exists, ExhaustedBox, ForAll, Or, PresburgerFormula, Sub, Truth, add, brute_force_box,
    check_model, check_smtlib_syntax, conj, const, disj, eq, evaluate, ge, inner_bound, negate,
    parikh_formula, parse_smt_model, render, scaled, solve_box, to_smtlib, var,
)
from boundedpda.words import parse_bounded_expression, sum_lex_order
from helpers import random_grammar

x, y = var("x"), var("y")
X_MINUS_2 = PresburgerFormula(("x",), eq(Sub(x, const(2))))
HALF = PresburgerFormula(("x",), Exists(("y",), eq(Sub(Sub(x, y), y))))
ANBN = parse_grammar("S -> a S b | eps")


def test_evaluate_atoms_and_bounded_existentials():
    assert evaluate(X_MINUS_2, {"x": 2}) is Truth.TRUE
    assert evaluate(X_MINUS_2, {"x": 3}) is Truth.FALSE
    assert evaluate(HALF, {"x": 4}, 2) is Truth.TRUE
    # 2y = 5 has no natural solution: only "false within the bound" can be said
    assert evaluate(HALF, {"x": 5}, 10) is Truth.UNKNOWN
    assert not evaluate(HALF, {"x": 5}, 10)


def test_evaluate_requires_every_free_variable():
    with pytest.raises(UnassignedVariable):
        evaluate(X_MINUS_2, {})


def test_universal_is_instantiated_over_the_bound():
    phi = PresburgerFormula(("x",), ForAll(("y",), ge(Sub(x, y))))
    # holding on [0, Q] says nothing about larger y
    assert evaluate(phi, {"x": 3}, 3) is Truth.UNKNOWN
    assert evaluate(phi, {"x": 2}, 3) is Truth.FALSE


def test_to_smtlib_direct_mapping():
    text = to_smtlib(X_MINUS_2)
    assert "(assert (= (- x 2) 0))" in text
    assert "(assert (>= x 0))" in text
    assert "(set-logic QF_LIA)" in text
    assert text.rstrip().endswith("(get-model)")
    assert check_smtlib_syntax(text)


def test_to_smtlib_disjunction_and_logic():
    phi = PresburgerFormula(("x",), disj(eq(x), eq(Sub(x, const(3)))))
    assert "(or " in to_smtlib(phi)
    assert "(set-logic LIA)" in to_smtlib(HALF, "LIA")
    assert "exists" in to_smtlib(HALF, "LIA")
    assert check_smtlib_syntax(to_smtlib(HALF, "LIA"))


def test_smt_round_trip_through_z3():
    psi = emptiness_formula(intersection(anbn_cstar(), astar_bncn()),
                            parse_bounded_expression("a b c"))
    text = to_smtlib(psi)
    assert check_smtlib_syntax(text)
    s = z3.Solver()
    s.from_string(text.replace("(check-sat)", "").replace("(get-model)", ""))
    s.add(z3.Int(psi.free[0]) == 2)
    assert s.check() == z3.sat
    m = s.model()
    model_text = "\n".join(f"(define-fun {d.name()} () Int {m[d]})" for d in m.decls())
    model = parse_smt_model(model_text)
    assert check_model(psi, model) is Truth.TRUE
    assert tuple(model[v] for v in psi.free) == (2, 2, 2)


def test_parse_smt_model_negative_values():
    assert parse_smt_model("(define-fun x () Int (- 3))\n(define-fun |a b| () Int 4)") == \
        {"x": -3, "a b": 4}


def test_check_smtlib_syntax_rejects_garbage():
    assert not check_smtlib_syntax("(assert (= x")
    assert not check_smtlib_syntax("(assert (frobnicate x))")


def test_negate_examples():
    assert render(negate(X_MINUS_2).body) == "(x - 2) != 0"
    neg = negate(HALF)
    assert isinstance(neg.body, ForAll)
    assert render(negate(neg).body) == render(HALF.body)


def test_parikh_examples():
    phi = parikh_formula(ANBN)
    box = {k for k in sum_lex_order(2, 3) if evaluate(phi, dict(zip(phi.free, k)), inner_bound(phi, 3))}
    assert box == {(0, 0), (1, 1), (2, 2), (3, 3)}
    phi = parikh_formula(parse_grammar("S -> eps"), names=())
    assert evaluate(phi, {}, 4) is Truth.TRUE
    g = parse_grammar("S -> a S | b S | eps")
    phi = parikh_formula(g)
    assert all(evaluate(phi, dict(zip(phi.free, k)), inner_bound(phi, 2))
               for k in sum_lex_order(2, 2))


def test_parikh_rejects_untrimmed():
    with pytest.raises(UntrimmedGrammar):
        parikh_formula(parse_grammar("S -> a | A\nA -> A b"))


def test_solve_box_examples():
    phi = parikh_formula(ANBN)
    xa, xb = (var(v) for v in phi.free)
    same = PresburgerFormula(phi.free, conj(phi.body, eq(Sub(xa, xb))))
    assert solve_box(same, 3) == (0, 0)
    assert solve_box(same, 3, exclude=[(0, 0)]) == (1, 1)
    off = PresburgerFormula(phi.free, conj(phi.body, eq(Sub(xa, add(xb, const(1))))))
    res = solve_box(off, 5)
    assert isinstance(res, ExhaustedBox) and not res


def test_solve_box_on_the_intersection_machine():
    psi = emptiness_formula(intersection(anbn_cstar(), astar_bncn()),
                            parse_bounded_expression("a b c"))
    assert solve_box(psi, 2) == (0, 0, 0)
    assert solve_box(psi, 2, exclude=[(0, 0, 0)]) == (1, 1, 1)


def test_solve_box_matches_brute_force_on_small_formula():
    phi = PresburgerFormula(("x", "y"), Exists(("z",), conj(
        eq(Sub(add(x, y), scaled(3, var("z")))), ge(Sub(x, const(1))))))
    assert solve_box(phi, 3) == brute_force_box(phi, 3, inner_bound(phi, 3)) == (1, 2)


# --- properties ---------------------------------------------------------

def _atom(a, b, c, op):
    pos = [scaled(k, v) for k, v in ((a, x), (b, y)) if k > 0] + [const(max(c, 0))]
    neg = [scaled(-k, v) for k, v in ((a, x), (b, y)) if k < 0] + [const(max(-c, 0))]
    return Atom(Sub(add(*pos), add(*neg)), op)


_ATOM = st.builds(
    _atom,
    st.integers(-2, 2), st.integers(-2, 2), st.integers(-3, 3),
    st.sampled_from(["<=", "<", "=", "!=", ">", ">="]))
_QF = st.recursive(_ATOM, lambda kids: st.one_of(
    st.lists(kids, min_size=1, max_size=3).map(lambda fs: conj(*fs)),
    st.lists(kids, min_size=1, max_size=3).map(lambda fs: disj(*fs))), max_leaves=6)


@given(_QF, st.integers(0, 4), st.integers(0, 4))
def test_negation_duality_on_quantifier_free(body, a, b):
    phi = PresburgerFormula(("x", "y"), body)
    env = {"x": a, "y": b}
    assert bool(evaluate(negate(phi), env)) == (not evaluate(phi, env))
    assert bool(evaluate(negate(negate(phi)), env)) == bool(evaluate(phi, env))


@given(_QF, st.integers(0, 4), st.integers(0, 3))
def test_evaluate_is_monotone_in_the_bound(body, a, Q):
    phi = PresburgerFormula(("x",), Exists(("y",), body))
    if evaluate(phi, {"x": a}, Q):
        assert evaluate(phi, {"x": a}, Q + 2)


@given(_QF)
def test_exported_smt_always_parses(body):
    phi = PresburgerFormula(("x",), Exists(("y",), body))
    assert check_smtlib_syntax(to_smtlib(phi))
    assert check_smtlib_syntax(to_smtlib(phi, "LIA"))


@settings(max_examples=25)
@given(st.integers(0, 10**6))
def test_parikh_formula_matches_the_box_oracle(seed):
    g = random_grammar(random.Random(seed))
    phi = parikh_formula(g)
    want = cfg_parikh_box(g, 3)
    Q = inner_bound(phi, 3)
    got = set()
    for k in sum_lex_order(len(phi.free), 3):
        pinned = PresburgerFormula(phi.free, conj(phi.body, *[
            eq(Sub(var(v), const(c))) for v, c in zip(phi.free, k)]))
        if solve_box(pinned, 3, quantifier_bound=Q):
            got.add(k)
    assert got == set(want)


def test_or_of_nothing_is_false():
    assert not evaluate(PresburgerFormula((), Or(())), {})
