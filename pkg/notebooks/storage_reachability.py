# %% [markdown]
# # Bounded reachability for counter machines and channel systems
#
# A CNF formula becomes a counter machine (or a CFSM) whose target is
# reachable exactly when the formula is satisfiable. Reachability along a
# flat bounded expression is then answered through a family of MHPDAs.

# %%
from boundedpda.frontends import bounded_reach, compile_family, family_accepts, reaches
from boundedpda.genbench.sat import brute_force_sat, cnf_suite, sat_to_cfsm, sat_to_cm

cnf = "(x1 | ~x2) & (x2)"
M, s_f, bexpr = sat_to_cm(cnf)
print(len(M.states), "states,", len(M.transitions), "transitions, target", s_f)
print(bexpr.n, "segments")

# %%
v = bounded_reach(M, s_f, bexpr, K=3)
print(v.kind, v.verified)
print(" ".join(v.word))
print(reaches(M, v.word, s_f), family_accepts(compile_family(M, s_f), v.word))

# %% [markdown]
# The same check on a few formulas of the benchmark suite, with both
# reductions, against brute-force SAT.

# %%
for f in cnf_suite(0, 5):
    sat = brute_force_sat(f) is not None
    got = [bounded_reach(*red(f), K=3).kind for red in (sat_to_cm, sat_to_cfsm)]
    print(f, "sat" if sat else "unsat", got)
