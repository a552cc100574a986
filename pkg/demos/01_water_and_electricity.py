"""
Joint distributions from two marginals
======================================

Each household in a neighborhood picks a water consumption bin and an
electricity consumption bin.  Surveys report the two marginals separately;
a model has to supply the joint.  Here the independence and comonotone
(Frechet upper bound) copula models do that, and we watch what happens when
the water survey gets one extra bin.
"""

from iacopula import CopulaSpec, Profile, build_joint, joint_cdf, marginal_of, render_table, split

water = [1 / 2, 1 / 4, 1 / 4]          # low, medium, high
electricity = [1 / 4, 1 / 4, 1 / 4, 1 / 4]
p = Profile([water, electricity])

# independence: every cell is a product of its marginals
indep = CopulaSpec.independence(2)
print("independence")
print(render_table(build_joint(indep, p), labels=("water", "elec")))

# a finer survey splits the "high" water bin into two halves
water_fine = split(water, 3, 0.5)
print("\nrefined water marginal:", water_fine.tolist())
fine = build_joint(indep, Profile([water_fine, electricity]))
print(render_table(fine, labels=("water", "elec")))

# the two new rows share the mass of the old one, cell by cell
coarse = build_joint(indep, p)
print("\ncell (3, 2) before:", coarse[3, 2], " after: (3, 2) + (4, 2) =", fine[3, 2] + fine[4, 2])

# comonotone model: the support is a chain, big water goes with big electricity
upper = CopulaSpec.frechet_upper(2)
jp = build_joint(upper, p)
print("\nfrechet upper bound")
print(render_table(jp, labels=("water", "elec")))
print("P(water <= 2, elec <= 3) =", joint_cdf(jp, (2, 3)))
print("marginals reproduced:", marginal_of(jp, 1).tolist(), marginal_of(jp, 2).tolist())

print("\nfrechet upper bound, refined water survey")
print(render_table(build_joint(upper, Profile([water_fine, electricity])), labels=("water", "elec")))
