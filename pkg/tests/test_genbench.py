import ast
import itertools
import pathlib
import random

import pytest

import boundedpda.genbench.oracle as oracle_module
from boundedpda.errors import MalformedCnf
from boundedpda.frontends import bounded_reach, family_accepts, compile_family, reaches, run
from boundedpda.genbench.oracle import brute_force_emptiness
from boundedpda.genbench.random_gen import Limits, random_instance
from boundedpda.genbench.sat import (
    Cnf, brute_force_sat, cnf_suite, gadget_witness, parse_cnf, parse_dimacs, sat_to_cfsm,
    sat_to_cm,
)
from boundedpda.genbench.zoo import empty_machine, palindrome_machine
from boundedpda.mhpda import accepts_shared
from boundedpda.textio import dump_mhpda, parse_mhpda
from boundedpda.verdicts import EMPTY_WITHIN_BOUND, NON_EMPTY
from boundedpda.words import parse_bounded_expression

UNSAT = [[1], [-1]]


# --- CNF handling ----------------------------------------------------------


def test_parse_cnf_forms():
    a = parse_cnf("(x1 ∨ ¬x2 ∨ x3) ∧ (x2)")
    b = parse_cnf("(x1 | ~x2 | x3) & (x2)")
    c = parse_dimacs("c demo\np cnf 3 2\n1 -2 3 0\n2 0\n")
    assert a == b == c == Cnf(3, ((1, -2, 3), (2,)))
    assert parse_cnf(c.to_dimacs()) == c
    assert str(c) == "(x1 ∨ ¬x2 ∨ x3) ∧ (x2)"


@pytest.mark.parametrize("text", [
    "p cnf 2 1\n1 2 3 0\n", "p cnf 2 2\n1 0\n", "1 0\n", "p cnf 2 1\n1 -2\n",
    "(x1 ∨ x2 ∨ x3 ∨ x4)", "(y1)",
])
def test_malformed_cnf(text):
    with pytest.raises(MalformedCnf):
        parse_cnf(text)


def test_brute_force_sat():
    assert brute_force_sat([[1, 1, 1]]) == (True,)
    assert brute_force_sat(UNSAT) is None
    assert brute_force_sat(Cnf(0, ())) == ()


def test_cnf_suite_is_deterministic_and_bounded():
    suite = cnf_suite(0, 50)
    assert suite == cnf_suite(0, 50)
    assert all(c.num_vars <= 4 and 1 <= len(c.clauses) <= 4 for c in suite)
    assert any(brute_force_sat(c) is None for c in suite)


# --- reductions ------------------------------------------------------------


def test_cm_gadget_for_x1_reaches_via_the_true_loop():
    M, s_f, bexpr = sat_to_cm("x1")
    w = gadget_witness("x1", (True,), "cm")
    assert "x1_inc_t" in w and reaches(M, w, s_f)
    assert not reaches(M, gadget_witness("x1", (False,), "cm"), s_f)


def test_cm_gadget_unsat_is_unreachable_for_small_loop_counts():
    M, s_f, bexpr = sat_to_cm(UNSAT)
    names = [t.name for t in M.transitions]
    # every run within the gadget bounds follows the expression with exponents <= 3
    for k in itertools.product(range(4), repeat=bexpr.n):
        word = tuple(a for seg, c in zip(bexpr.segments, k) for _ in range(c) for a in seg)
        assert not reaches(M, word, s_f)
    assert set(names) == set(bexpr.letters)


def test_empty_cnf_gadgets():
    M, s_f, _ = sat_to_cm(Cnf(1, ()))
    assert s_f == "x1_end" and reaches(M, ("x1_false", "x1_next"), s_f)
    M, s_f, _ = sat_to_cfsm(Cnf(0, ()))
    assert s_f == "s0" and reaches(M, (), s_f)


def test_cfsm_gadget_paths():
    cnf = parse_cnf("x1 ∨ ¬x2 ∨ x3")
    M, s_f, _ = sat_to_cfsm(cnf)
    w = gadget_witness(cnf, (True, True, False), "cfsm")
    # x1 = true satisfies the first literal; the run moves on to the third one
    prefix = w[: w.index("c1_l2_next") + 1]
    assert "c1_l1_ok" in prefix
    c = run(M, prefix)
    assert c and c.state == "c1_r2"
    assert reaches(M, w, s_f)
    M, s_f, _ = sat_to_cfsm(UNSAT)
    for val in (False, True):
        assert not reaches(M, gadget_witness(UNSAT, (val,), "cfsm"), s_f)


@pytest.mark.parametrize("reduce", [sat_to_cm, sat_to_cfsm])
@pytest.mark.parametrize("cnf", ["x1 ∨ x1 ∨ x1", "(x1 ∨ x2) ∧ (¬x1)", "(x1) ∧ (¬x1)"])
def test_gadget_verdict_matches_sat(reduce, cnf):
    M, s_f, bexpr = reduce(cnf)
    v = bounded_reach(M, s_f, bexpr, K=3)
    sat = brute_force_sat(cnf) is not None
    assert (v.kind == NON_EMPTY) == sat
    if sat:
        assert v.verified and reaches(M, v.word, s_f)
        assert family_accepts(compile_family(M, s_f), v.word)
    else:
        assert v.kind == EMPTY_WITHIN_BOUND


def test_witnesses_of_every_assignment_follow_the_semantics():
    rng = random.Random(3)
    for cnf in cnf_suite(5, 10):
        for kind, reduce in (("cm", sat_to_cm), ("cfsm", sat_to_cfsm)):
            M, s_f, _ = reduce(cnf)
            family = compile_family(M, s_f)
            bits = tuple(rng.random() < 0.5 for _ in range(cnf.num_vars))
            w = gadget_witness(cnf, bits, kind)
            assert reaches(M, w, s_f) == cnf.satisfied_by(bits)
            assert family_accepts(family, w) == cnf.satisfied_by(bits)


def test_trivial_target_at_start():
    M, _, bexpr = sat_to_cm("x1")
    v = bounded_reach(M, "s0", bexpr, K=0)
    assert v.kind == NON_EMPTY and v.word == ()


# --- random instances -------------------------------------------------------


def test_random_instance_is_deterministic():
    a = random_instance(42, (3, 2, 2, 1))
    b = random_instance(42, (3, 2, 2, 1))
    assert dump_mhpda(a[0]) == dump_mhpda(b[0])
    assert a[1] == b[1]


def test_random_instance_limits_and_round_trip():
    limits = Limits(3, 2, 2, 1)
    for seed in range(100):
        M, w = random_instance(seed, limits)
        assert len(M.states) <= 3 and M.heads <= 2
        assert w.n <= 2 and all(len(s) == 1 for s in w.segments)
        assert set(M.select) == set(M.states)
        text = dump_mhpda(M)
        assert dump_mhpda(parse_mhpda(text)) == text


# --- oracle ---------------------------------------------------------------------


def test_oracle_examples():
    fig1 = palindrome_machine()
    v = brute_force_emptiness(fig1, parse_bounded_expression("0 1 0 & 0 1 0"), 1)
    assert v.kind == NON_EMPTY and v.exponents == (0, 0, 0, 1, 0, 0, 0)
    M, w = random_instance(1)
    assert (brute_force_emptiness(M, w, 0).kind == NON_EMPTY) == accepts_shared(M, ())
    for K in range(3):
        assert brute_force_emptiness(empty_machine(), parse_bounded_expression("a"), K).kind \
            == EMPTY_WITHIN_BOUND


def test_oracle_imports_only_machine_semantics():
    tree = ast.parse(pathlib.Path(oracle_module.__file__).read_text())
    imported = set()
    for node in ast.walk(tree):
        if isinstance(node, ast.ImportFrom):
            imported.add((node.level, node.module))
        elif isinstance(node, ast.Import):
            imported.update((0, a.name) for a in node.names)
    modules = {m.split(".")[-1] for level, m in imported if m and m != "__future__"}
    assert modules <= {"mhpda", "words", "verdicts"}
    assert not modules & {"pipeline", "presburger", "pda", "cfg"}
