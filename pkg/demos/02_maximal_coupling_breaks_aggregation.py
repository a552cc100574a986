"""
A model that is not a copula model
==================================

The maximal coupling puts as much mass as possible on the diagonal.  It
reproduces its marginals, but merging two bins of one marginal changes the
joint probability of cells that were never touched.  The conformance check
finds the cell and prints a witness that can be replayed.
"""

from iacopula import Profile, check_ia_at, check_ia_randomized, get_model, maximal_coupling, render_table
from iacopula.conformance import replay

p1 = [1 / 2, 1 / 4, 1 / 4]
p1_fine = [1 / 2, 1 / 4, 1 / 8, 1 / 8]
p2 = [1 / 4] * 4

print(render_table(maximal_coupling(p1, p2)))
print()
print(render_table(maximal_coupling(p1_fine, p2)))

# merging bins 3 and 4 of the fine first marginal gives back p1; cell (1, 4)
# is outside the merged bins, so it should not move, but it goes 1/8 -> 1/4
model = get_model("maximal-coupling")
report = check_ia_at(model, Profile([p1_fine, p2]), i=1, j=3)
print("\n", report.to_dict())

# the same failure shows up in a randomized run; trial 0 is always this example
print(check_ia_randomized(model, trials=1000, seed=42).to_dict())

# random profiles only (supports of at most 3 bins) still catch it
report = check_ia_randomized(model, trials=1000, seed=7, zmax=3)
print("found after", report.trials, "trials:", report.witness)
print("replayed worst violation:", replay(model, report.witness).worst_violation, "==", report.worst_violation)

# for contrast, the independence model passes
print(check_ia_randomized(get_model("independence"), trials=1000, seed=42).to_dict())
