"""
Relabeling bins
===============

A model is neutral in variable i if shuffling the labels of i's bins just
shuffles the joint.  For copula models that happens exactly when the
variable enters the copula as an independent factor,
C(x) = x_i * C(x with x_i = 1).
"""

import numpy as np

from iacopula import (
    CopulaModel,
    CopulaSpec,
    Profile,
    check_m_neutrality,
    check_m_neutrality_randomized,
    verify_factorization,
)
from iacopula.conformance import factorization_sides

p = Profile([[1 / 2, 1 / 4, 1 / 4], [1 / 4] * 4])

# independence: every relabeling is harmless
print(check_m_neutrality_randomized(CopulaModel(CopulaSpec.independence(2)), trials=500, seed=0).to_dict())

# comonotone: swapping the first two water bins breaks the chain structure
frechet = CopulaModel(CopulaSpec.frechet_upper(2))
print(check_m_neutrality(frechet, p, i=1, sigma=(2, 1, 3)).to_dict())

# the factorization test says the same thing without any profile
upper = CopulaSpec.frechet_upper(2)
print(verify_factorization(upper, M=[1], k=5).to_dict())
lhs, rhs = factorization_sides(upper, [1], np.array([0.5, 0.25]))
print("at (0.5, 0.25): min =", lhs, " x1 * C(1, x2) =", rhs)

# Gaussian: variable 1 uncorrelated with the rest, variables 2 and 3 correlated
sigma = [[1, 0, 0], [0, 1, 0.6], [0, 0.6, 1]]
gauss = CopulaSpec.gaussian(sigma)
print("\nM = {1}:", verify_factorization(gauss, [1], k=4, tol=1e-5).verdict)
print("M = {2}:", verify_factorization(gauss, [2], k=4, tol=1e-5).verdict)
model = CopulaModel(gauss)
print("neutral in 1:", check_m_neutrality_randomized(model, 50, n=3, M=[1], tol=1e-5).verdict)
print("neutral in 3:", check_m_neutrality_randomized(model, 50, n=3, M=[3], tol=1e-5).verdict)
