# %% [markdown]
# # From a two-head machine to a Presburger formula
#
# We take the palindrome machine from the zoo, restrict it to a bounded
# expression and follow each stage of the pipeline.

# %%
from boundedpda.genbench.oracle import box_truth_table
from boundedpda.genbench.zoo import anbn_cstar, astar_bncn, palindrome_machine
from boundedpda.mhpda import accepts_shared, intersection
from boundedpda.pipeline import (
    DecideConfig, brute_force_formula_box, decide_emptiness, emptiness_formula, run_pipeline,
)
from boundedpda.words import parse_bounded_expression

M = palindrome_machine()
for w in ("0&0", "01&01", "010&010", "&"):
    print(w, accepts_shared(M, tuple(w)))

# %% [markdown]
# Restricting the input to `0* 1* 0* &* 0* 1* 0*` leaves a finite-state
# question about exponents. The stage sizes show how the constructions grow.

# %%
w = parse_bounded_expression("0 1 0 & 0 1 0")
res = run_pipeline(M, w)
print(res.sizes())

# %% [markdown]
# The bounded decision procedure returns the least witness in sum-then-lex
# order, replayed on the original machine.

# %%
v = decide_emptiness(M, w, DecideConfig(K=2))
print(v.kind, v.exponents, v.verified)

# %% [markdown]
# Intersection of two single-head machines: `a^n b^n c*` and `a* b^n c^n`.
# Over `a* b* c*` the formula holds exactly on the diagonal.

# %%
I = intersection(anbn_cstar(), astar_bncn())
abc = parse_bounded_expression("a b c")
table = brute_force_formula_box(emptiness_formula(I, abc), 3)
print(sorted(k for k, ok in table.items() if ok))
print(table == box_truth_table(I, abc, 3))
