"""Acceptance suite: the nine primary criteria at their stated scale.

Each test prints one ``PASS``/``FAIL`` line. Run on its own with

    pytest tests/test_acceptance.py -s -q
"""
import itertools
import json
import pathlib
import random
import time
import warnings

import pytest

from boundedpda.cfg import cfg_parikh_box
from boundedpda.errors import VerificationMismatch
from boundedpda.frontends import bounded_reach, compile_family, family_accepts, reaches
from boundedpda.genbench.oracle import box_truth_table, brute_force_emptiness
from boundedpda.genbench.random_gen import Limits, random_bexpr, random_instance, random_machine
from boundedpda.genbench.sat import brute_force_sat, cnf_suite, sat_to_cfsm, sat_to_cm
from boundedpda.genbench.zoo import anbn_cstar, astar_bncn, palindrome_machine
from boundedpda.mhpda import accepts_shared, accepts_tuple_exact, intersection, language, union
from boundedpda.nfa import Nfa, indexed_shuffle_nfa, interleavings
from boundedpda.pda import pda_accepts
from boundedpda.pipeline import (
    DecideConfig, brute_force_formula_box, chain_count, chain_formulas, contract,
    decide_emptiness, emptiness_formula, family_emptiness_formula, lattice_chains, run_pipeline,
    shuffle_pda,
)
from boundedpda.presburger import PresburgerFormula, Sub, conj, const, eq, inner_bound, parikh_formula, solve_box, var
from boundedpda.verdicts import NON_EMPTY
from boundedpda.words import expand, parse_bounded_expression, sum_lex_order
from helpers import all_words, random_grammar

pytestmark = pytest.mark.slow

FIXTURES = pathlib.Path(__file__).parent / "fixtures"
MASTER_LIMITS = Limits(5, 3, 3, 2)


def _report(capsys, number, ok, detail, started):
    line = f"CRITERION {number}: {'PASS' if ok else 'FAIL'} ({detail}; {time.perf_counter() - started:.1f}s)"
    with capsys.disabled():
        print("\n" + line)
    return line


@pytest.fixture(scope="module")
def instances():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return [random_instance(seed, MASTER_LIMITS) for seed in range(200)]


def _fa(letters, k):
    return tuple(a for a, c in zip(letters, k) for _ in range(c))


# --- 1 ---------------------------------------------------------------------


def test_criterion_1_master_equivalence(capsys, instances):
    t0 = time.perf_counter()
    points = mismatches = 0
    for M, w in instances:
        psi = emptiness_formula(M, w)
        got = brute_force_formula_box(psi, 4)
        want = box_truth_table(M, w, 4)
        points += len(want)
        mismatches += sum(got[k] != want[k] for k in want)
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and elapsed < 600
    _report(capsys, 1, ok, f"{len(instances)} instances, {points} box points, "
                           f"{mismatches} disagreements", t0)
    assert ok


# --- 2 ---------------------------------------------------------------------


def _tape_tuples(n, d, total=4):
    """Exponent vectors, one per tape, with all exponents summing to at most ``total``."""
    vecs = [k for s in range(total + 1) for k in sum_lex_order(n, s) if sum(k) == s]
    for combo in itertools.product(vecs, repeat=d):
        if sum(map(sum, combo)) <= total:
            yield combo


def test_criterion_2_stage_equivalences(capsys, instances):
    t0 = time.perf_counter()
    checked = bad_contract = bad_shuffle = 0
    for M, w in instances:
        B = contract(M, w)
        C = shuffle_pda(B)
        for ks in _tape_tuples(w.n, M.heads):
            tapes_b = tuple(_fa(B.alphabet, k) for k in ks)
            in_b = accepts_tuple_exact(B, tapes_b)
            in_a = accepts_tuple_exact(M, tuple(expand(w, k) for k in ks))
            bad_contract += in_a != in_b
            bad_shuffle += any(pda_accepts(C, u) for u in interleavings(tapes_b)) != in_b
            checked += 1
    ok = bad_contract == 0 and bad_shuffle == 0
    _report(capsys, 2, ok, f"{checked} tape tuples; contraction {bad_contract} and "
                           f"shuffle {bad_shuffle} disagreements", t0)
    assert ok


# --- 3 ---------------------------------------------------------------------


def test_criterion_3_parikh_correctness(capsys):
    t0 = time.perf_counter()
    grammars, seed = [], 0
    while len(grammars) < 50:
        g = random_grammar(random.Random(seed), max_prods=6, terminals=("a", "b", "c"))
        seed += 1
        if g.productions:
            grammars.append(g)
    bad = 0
    for g in grammars:
        phi = parikh_formula(g)
        Q = inner_bound(phi, 4)
        got = set()
        for k in sum_lex_order(len(phi.free), 4):
            pinned = PresburgerFormula(phi.free, conj(phi.body, *[
                eq(Sub(var(v), const(c))) for v, c in zip(phi.free, k)]))
            if solve_box(pinned, 4, quantifier_bound=Q):
                got.add(k)
        bad += got != set(cfg_parikh_box(g, 4))
    ok = bad == 0
    _report(capsys, 3, ok, f"{len(grammars)} grammars, {bad} with a differing box image", t0)
    assert ok


# --- 4 ---------------------------------------------------------------------


def _word_nfa(word, alphabet):
    return Nfa(range(len(word) + 1), alphabet, {(i, a, i + 1) for i, a in enumerate(word)},
               0, {len(word)})


def test_criterion_4_worked_examples(capsys):
    t0 = time.perf_counter()
    fig1 = palindrome_machine()

    def wanted(w):
        s = "".join(w)
        if s.count("&") != 1:
            return False
        left, right = s.split("&")
        return left == right == left[::-1]

    words = list(all_words("01&", 7))
    fig1_ok = all(accepts_shared(fig1, w) == wanted(w) for w in words)

    expected = {(("a", 1), ("b", 1), ("b", 2)), (("a", 1), ("b", 2), ("b", 1)),
                (("b", 2), ("a", 1), ("b", 1))}
    shuffle = indexed_shuffle_nfa([_word_nfa("ab", "ab"), _word_nfa("b", "ab")])
    shuffle_ok = shuffle.words(4) == expected == interleavings(["ab", "b"])

    M = intersection(anbn_cstar(), astar_bncn())
    w = parse_bounded_expression("a b c")
    table = brute_force_formula_box(emptiness_formula(M, w), 3)
    sweep = {k for k, v in table.items() if v}
    abc_ok = sweep == {(k, k, k) for k in range(4)} == \
        {k for k, v in box_truth_table(M, w, 3).items() if v}

    ok = fig1_ok and shuffle_ok and abc_ok
    _report(capsys, 4, ok, f"palindromes over {len(words)} words {fig1_ok}, "
                           f"shuffle {shuffle_ok}, a^k b^k c^k sweep {abc_ok}", t0)
    assert ok


# --- 5 ---------------------------------------------------------------------


def test_criterion_5_closure(capsys):
    t0 = time.perf_counter()
    rng = random.Random(5)
    limits = Limits(3, 2, 1, 1)
    words = list(all_words("ab", 4))
    bad = 0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for _ in range(30):
            A1, A2 = random_machine(rng, limits), random_machine(rng, limits)
            U, I = union(A1, A2), intersection(A1, A2)
            bad += U.heads != A1.heads + A2.heads or I.heads != A1.heads + A2.heads
            for w in words:
                x, y = accepts_shared(A1, w), accepts_shared(A2, w)
                bad += accepts_shared(U, w) != (x or y)
                bad += accepts_shared(I, w) != (x and y)
    ok = bad == 0
    _report(capsys, 5, ok, f"30 pairs x {len(words)} words, {bad} disagreements", t0)
    assert ok


# --- 6 and 8 -------------------------------------------------------------------


@pytest.fixture(scope="module")
def gadget_runs():
    """Bounded reachability on both reductions of the 50-formula suite."""
    t0 = time.perf_counter()
    rows = []
    for cnf in cnf_suite(0, 50, 4, 4):
        sat = brute_force_sat(cnf) is not None
        for kind, reduce in (("cm", sat_to_cm), ("cfsm", sat_to_cfsm)):
            M, s_f, bexpr = reduce(cnf)
            try:
                v = bounded_reach(M, s_f, bexpr, K=3)
                mismatch = False
            except VerificationMismatch:
                v, mismatch = None, True
            rows.append((cnf, kind, sat, M, s_f, v, mismatch))
    return rows, time.perf_counter() - t0


def test_criterion_6_gadget_agreement(capsys, gadget_runs):
    t0 = time.perf_counter()
    rows, elapsed = gadget_runs
    disagree = unreplayed = 0
    for cnf, kind, sat, M, s_f, v, mismatch in rows:
        if v is None or (v.kind == NON_EMPTY) != sat:
            disagree += 1
            continue
        if v.kind == NON_EMPTY:
            if not (v.verified and reaches(M, v.word, s_f)
                    and family_accepts(compile_family(M, s_f), v.word)):
                unreplayed += 1
    ok = disagree == 0 and unreplayed == 0 and elapsed < 300
    _report(capsys, 6, ok, f"{len(rows)} reductions of {len(rows) // 2} formulas, {disagree} "
                           f"disagreements, {unreplayed} witnesses not replayed, "
                           f"solver time {elapsed:.0f}s", t0 - elapsed)
    assert ok


def test_criterion_8_witness_integrity(capsys, instances, gadget_runs):
    t0 = time.perf_counter()
    mismatches = sum(row[-1] for row in gadget_runs[0])
    witnesses = sum(row[5] is not None and row[5].kind == NON_EMPTY for row in gadget_runs[0])
    disagree = 0
    for M, w in instances:
        try:
            v = decide_emptiness(M, w, DecideConfig(K=4))
        except VerificationMismatch:
            mismatches += 1
            continue
        o = brute_force_emptiness(M, w, 4)
        disagree += (v.kind, v.exponents) != (o.kind, o.exponents)
        witnesses += v.kind == NON_EMPTY
    for M, w in [(palindrome_machine(), parse_bounded_expression("0 1 0 & 0 1 0")),
                 (intersection(anbn_cstar(), astar_bncn()), parse_bounded_expression("a b c"))]:
        try:
            witnesses += decide_emptiness(M, w, DecideConfig(K=2)).kind == NON_EMPTY
            witnesses += decide_emptiness(M, w, DecideConfig(K=2, letter_bounded_auto=True,
                                                             chain_cap=2000)).kind == NON_EMPTY
        except VerificationMismatch:
            mismatches += 1
    ok = mismatches == 0 and disagree == 0
    _report(capsys, 8, ok, f"{witnesses} witnesses, {mismatches} verification mismatches, "
                           f"{disagree} oracle disagreements", t0)
    assert ok


# --- 7 ---------------------------------------------------------------------


def _count_paths(n, d):
    """Monotone lattice paths by brute force over all move sequences."""
    target = (n + 1,) * d
    count = 0
    for moves in itertools.product(range(d), repeat=n * d):
        p = [1] * d
        for j in moves:
            p[j] += 1
        count += tuple(p) == target and all(x <= n + 1 for x in p)
    return count


def test_criterion_7_letter_bounded_family(capsys):
    t0 = time.perf_counter()
    rng = random.Random(7)
    limits = Limits(4, 2, 3, 1)
    bad = 0
    chains = 0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for _ in range(20):
            M = random_machine(rng, limits, heads=2)
            w = random_bexpr(rng, limits)
            mono = brute_force_formula_box(emptiness_formula(M, w), 3)
            joined = dict.fromkeys(mono, False)
            for _, psi in chain_formulas(M, w):
                chains += 1
                for k, val in brute_force_formula_box(psi, 3).items():
                    joined[k] = joined[k] or val
            bad += joined != mono
    counts_ok = len(list(lattice_chains(1, 2))) == chain_count(1, 2) == _count_paths(1, 2) == 2
    ok = bad == 0 and counts_ok
    _report(capsys, 7, ok, f"20 machines, {chains} chain formulas, {bad} box disagreements, "
                           f"chain count (d=2, n=1) {chain_count(1, 2)}", t0)
    assert ok


# --- 9 ---------------------------------------------------------------------


def test_criterion_9_size_envelopes(capsys, instances):
    t0 = time.perf_counter()
    consts = json.loads((FIXTURES / "size_envelopes.json").read_text())
    c1, c2 = consts["c1"], consts["c2"]
    sizes = [run_pipeline(M, w).sizes() for M, w in instances]
    sizes.append(run_pipeline(palindrome_machine(), parse_bounded_expression("0 1 0 & 0 1 0")).sizes())
    for cnf in cnf_suite(0, 50, 4, 4)[:10]:
        for reduce in (sat_to_cm, sat_to_cfsm):
            M, s_f, bexpr = reduce(cnf)
            _, results = family_emptiness_formula(compile_family(M, s_f), bexpr, with_results=True)
            sizes += [r.sizes() for r in results if r is not None]
    r1 = max(z["B"] / (z["A"] * z["w"] ** z["d"]) for z in sizes)
    r2 = max(z["G"] / z["C"] ** 3 for z in sizes)
    ok = r1 <= c1 and r2 <= c2
    _report(capsys, 9, ok, f"{len(sizes)} pipelines, max |B|/(|A||w|^d) = {r1:.3f} <= {c1}, "
                           f"max |G|/|C|^3 = {r2:.5f} <= {c2}", t0)
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-s", "-q"]))
