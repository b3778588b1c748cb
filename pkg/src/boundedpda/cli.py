"""Command-line interface.

Every subcommand prints one JSON document on stdout and a short human
summary on stderr. Exit status: 0 when a result was produced, 2 for bad
input, 3 when a solver witness fails re-verification.
"""
from __future__ import annotations

import argparse
import json
import random
import sys

from .errors import ModelError, VerificationMismatch
from .frontends import bounded_reach, compile_family, flat_bounded_expression, reaches, run
from .frontends.models import Infeasible
from .genbench.random_gen import Limits, random_instance
from .genbench.sat import cnf_suite, parse_cnf, random_cnf, sat_to_cfsm, sat_to_cm
from .mhpda import Tpda, accepts_shared, replay, simulate_budgeted
from .pipeline import (
    DecideConfig, decide_emptiness, family_emptiness_formula, run_pipeline, verify_external_model,
)
from .presburger import parse_smt_model, render, to_smtlib
from .textio import dump_model, load_model
from .words import format_word, parse_bounded_expression

EXIT_OK, EXIT_INPUT, EXIT_MISMATCH = 0, 2, 3


class UsageError(Exception):
    pass


def _emit(doc):
    json.dump(doc, sys.stdout, indent=2, sort_keys=False, default=str, ensure_ascii=False)
    sys.stdout.write("\n")


def _say(msg):
    print(msg, file=sys.stderr)


def _mode(text: str) -> DecideConfig:
    if text == "smt":
        return DecideConfig(mode="smt")
    kind, _, k = text.partition(":")
    if kind != "bounded":
        raise UsageError(f"--mode must be bounded:K or smt, got {text!r}")
    try:
        K = int(k) if k else 4
    except ValueError:
        raise UsageError(f"bad bound in --mode {text!r}") from None
    if K < 0:
        raise UsageError("the box bound must be non-negative")
    return DecideConfig(mode="bounded", K=K)


def _word(text, alphabet):
    """Split a command-line word: on whitespace, on dots for multi-character
    alphabets, into characters otherwise."""
    text = (text or "").strip()
    if not text:
        return ()
    if any(c.isspace() for c in text):
        return tuple(text.split())
    if all(len(a) == 1 for a in alphabet):
        return tuple(text)
    if text in alphabet:
        return (text,)
    return tuple(text.split(".")) if "." in text else tuple(text)


def _config(args) -> DecideConfig:
    config = _mode(args.mode)
    config.smt_logic = getattr(args, "smt_logic", None)
    config.smt_path = getattr(args, "emit_smt", None)
    config.letter_bounded_auto = getattr(args, "letter_bounded", False)
    return config


def _write(path, text):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


# --- subcommands -----------------------------------------------------------


def cmd_check(args):
    model = load_model(args.model, args.format)
    if model.kind != "mhpda":
        raise UsageError("'check' takes an mhpda model; use 'reach' for counter machines and CFSMs")
    M = model.machine
    bexpr = parse_bounded_expression(args.bexpr, M.alphabet)
    config = _config(args)
    if args.dump_grammar or args.dump_formula or (config.mode == "smt" and args.verify_model):
        res = run_pipeline(M, bexpr)
        if args.dump_grammar:
            _write(args.dump_grammar, res.G.to_text())
        if args.dump_formula:
            _write(args.dump_formula, render(res.psi.body) + "\n")
        if config.mode == "smt" and args.verify_model:
            with open(args.verify_model, encoding="utf-8") as fh:
                m = parse_smt_model(fh.read())
            verdict = verify_external_model(res.psi, bexpr, m, lambda w: accepts_shared(M, w))
            return _report(verdict)
    verdict = decide_emptiness(M, bexpr, config)
    return _report(verdict)


def _report(verdict):
    doc = verdict.to_json()
    if verdict.is_non_empty:
        doc["witness"]["text"] = format_word(verdict.word)
    _emit(doc)
    _say(f"verdict: {verdict.kind}")
    return EXIT_OK


def cmd_simulate(args):
    model = load_model(args.model, args.format)
    M = model.machine
    if isinstance(M, Tpda):
        word = _word(args.word, M.alphabet)
        res = simulate_budgeted(M, (word,) * M.heads, args.budget)
        doc = {"result": res.kind, "explored": res.explored, "word": list(word)}
        if res.trace:
            doc["trace"] = [c.render() for c in res.trace]
            doc["replayed"] = replay(M, res.trace)
        _emit(doc)
        _say(f"{res.kind} after exploring {res.explored} IDs")
        return EXIT_OK
    word = _word(args.word, M.alphabet)
    trace = run(M, word, trace=True)
    if isinstance(trace, Infeasible):
        doc = {"result": "infeasible", "index": trace.index, "transition": trace.transition,
               "reason": trace.reason}
    else:
        doc = {"result": "feasible", "trace": [c.to_json(M) for c in trace]}
    _emit(doc)
    _say(doc["result"])
    return EXIT_OK


def _storage_target(args, model):
    target = args.target if args.target is not None else model.target
    if target is None:
        raise UsageError("no target state: pass --target or add a 'target' line")
    return target


def _storage_bexpr(args, M, target):
    if args.flat:
        return flat_bounded_expression(M, target)
    if args.bexpr is None:
        raise UsageError("pass --bexpr or --flat")
    return parse_bounded_expression(args.bexpr, M.alphabet)


def cmd_reach(args):
    model = load_model(args.model, args.format)
    if model.kind == "mhpda":
        raise UsageError("'reach' takes a cm or cfsm model")
    M = model.machine
    target = _storage_target(args, model)
    M.check_target(target)
    bexpr = _storage_bexpr(args, M, target)
    config = _config(args)
    if config.mode == "smt" and args.verify_model:
        psi = family_emptiness_formula(compile_family(M, target), bexpr, config.project_letters)
        with open(args.verify_model, encoding="utf-8") as fh:
            m = parse_smt_model(fh.read())
        verdict = verify_external_model(psi, bexpr, m, lambda w: reaches(M, w, target))
    else:
        verdict = bounded_reach(M, target, bexpr, config=config)
    doc = verdict.to_json()
    doc["bexpr"] = bexpr.to_text()
    doc["target"] = target
    _emit(doc)
    _say(f"verdict: {verdict.kind}")
    return EXIT_OK


def cmd_export(args):
    model = load_model(args.model, args.format)
    M = model.machine
    if model.kind == "mhpda":
        if args.bexpr is None:
            raise UsageError("pass --bexpr")
        bexpr = parse_bounded_expression(args.bexpr, M.alphabet)
        psi = run_pipeline(M, bexpr).psi
    else:
        target = _storage_target(args, model)
        M.check_target(target)
        bexpr = _storage_bexpr(args, M, target)
        psi = family_emptiness_formula(compile_family(M, target), bexpr)
    text = to_smtlib(psi, args.smt_logic)
    _write(args.emit_smt, text)
    logic = text.splitlines()[0].split()[1].rstrip(")")
    _emit({"smt": args.emit_smt, "logic": logic, "bytes": len(text), "free": list(psi.free),
           "bexpr": bexpr.to_text(), "formula_size": psi.size()})
    _say(f"wrote {args.emit_smt}")
    return EXIT_OK


def cmd_gen(args):
    if args.kind in ("sat-cm", "sat-cfsm"):
        if args.cnf:
            with open(args.cnf, encoding="utf-8") as fh:
                cnf = parse_cnf(fh.read())
        elif args.formula is not None:
            cnf = parse_cnf(args.formula)
        else:
            cnf = random_cnf(random.Random(args.seed), args.vars, args.clauses)
        make = sat_to_cm if args.kind == "sat-cm" else sat_to_cfsm
        M, target, bexpr = make(cnf)
        text = dump_model(M, target)
        doc = {"kind": args.kind, "cnf": str(cnf), "target": target, "bexpr": bexpr.to_text()}
    elif args.kind == "cnf":
        cnf = cnf_suite(args.seed, 1, args.vars, args.clauses)[0]
        text = cnf.to_dimacs()
        doc = {"kind": "cnf", "cnf": str(cnf)}
    else:
        limits = Limits(args.states, args.heads, args.segments, args.segment_length)
        M, bexpr = random_instance(args.seed, limits)
        text = dump_model(M)
        doc = {"kind": "random", "seed": args.seed, "bexpr": bexpr.to_text()}
    if args.out:
        _write(args.out, text)
        doc["out"] = args.out
    else:
        doc["model"] = text
    _emit(doc)
    return EXIT_OK


# --- argument parsing ---------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="boundedpda", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("model", help="model file (mhpda, cm or cfsm format)")
        sp.add_argument("--format", choices=("mhpda", "cm", "cfsm"), help="override format detection")
        sp.add_argument("--jobs", type=int, default=1, help="accepted for compatibility; work is sequential")

    def deciding(sp):
        sp.add_argument("--mode", default="bounded:4", help="bounded:K (default bounded:4) or smt")
        sp.add_argument("--emit-smt", metavar="FILE", help="SMT-LIB output file in smt mode")
        sp.add_argument("--smt-logic", choices=("QF_LIA", "LIA"))
        sp.add_argument("--verify-model", metavar="FILE",
                        help="(get-model) answer of an external solver to re-verify in smt mode")

    sp = sub.add_parser("check", help="emptiness of an MHPDA modulo a bounded expression")
    common(sp)
    deciding(sp)
    sp.add_argument("--bexpr", required=True, help='segments separated by spaces, e.g. "0 1 0 & 0 1 0"')
    sp.add_argument("--dump-grammar", metavar="FILE")
    sp.add_argument("--dump-formula", metavar="FILE")
    sp.add_argument("--letter-bounded", action="store_true",
                    help="use the chain family for letter-bounded expressions")
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("simulate", help="run a model on a word")
    common(sp)
    sp.add_argument("--word", default="", help="input word (MHPDA) or transition names")
    sp.add_argument("--budget", type=int, default=100000, help="maximal number of explored IDs")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("reach", help="bounded reachability for counter machines and CFSMs")
    common(sp)
    deciding(sp)
    sp.add_argument("--target", help="control state to reach")
    sp.add_argument("--bexpr", help="bounded expression over transition names")
    sp.add_argument("--flat", action="store_true", help="derive the expression from a flat control graph")
    sp.set_defaults(func=cmd_reach)

    sp = sub.add_parser("export", help="write the emptiness formula as SMT-LIB")
    common(sp)
    sp.add_argument("--bexpr")
    sp.add_argument("--flat", action="store_true")
    sp.add_argument("--target")
    sp.add_argument("--emit-smt", metavar="FILE", required=True)
    sp.add_argument("--smt-logic", choices=("QF_LIA", "LIA"))
    sp.set_defaults(func=cmd_export)

    sp = sub.add_parser("gen", help="generate benchmark models")
    sp.add_argument("kind", choices=("sat-cm", "sat-cfsm", "random", "cnf"))
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--cnf", metavar="FILE", help="DIMACS input for the SAT reductions")
    sp.add_argument("--formula", help='infix CNF such as "(x1 | ~x2) & (x2)"')
    sp.add_argument("--vars", type=int, default=4)
    sp.add_argument("--clauses", type=int, default=4)
    sp.add_argument("--states", type=int, default=3)
    sp.add_argument("--heads", type=int, default=2)
    sp.add_argument("--segments", type=int, default=2)
    sp.add_argument("--segment-length", type=int, default=1)
    sp.add_argument("--out", metavar="FILE")
    sp.set_defaults(func=cmd_gen)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except VerificationMismatch as exc:
        _say(f"verification mismatch: {exc}")
        return EXIT_MISMATCH
    except (ModelError, UsageError, OSError, ValueError) as exc:
        _say(f"error: {type(exc).__name__}: {exc}")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
