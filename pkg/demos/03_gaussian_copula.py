"""
The Gaussian copula
===================

C(x) = Phi_Sigma(Phi^-1(x_1), ..., Phi^-1(x_n)).  Two and three dimensions are
evaluated by deterministic quadrature; four dimensions by randomized
quasi-Monte Carlo with an explicit seed.
"""

import numpy as np
from scipy import integrate

from iacopula import CopulaSpec, Profile, build_joint, check_copula_axioms, evaluate, render_table
from iacopula.mvnormal import mvn_cdf_qmc

rho = 0.5
spec = CopulaSpec.gaussian([[1, rho], [rho, 1]])

# the orthant probability has a closed form, 1/4 + asin(rho) / (2 pi) = 1/3
print("C(0.5, 0.5)          =", evaluate(spec, [0.5, 0.5]))
print("1/4 + asin(rho)/2pi  =", 0.25 + np.arcsin(rho) / (2 * np.pi))

# and brute-force quadrature of the density agrees
c = 1 / (2 * np.pi * np.sqrt(1 - rho**2))
quad, _ = integrate.dblquad(
    lambda y, x: c * np.exp(-(x * x - 2 * rho * x * y + y * y) / (2 * (1 - rho**2))),
    -np.inf, 0, -np.inf, 0,
)
print("dblquad              =", quad)

# joint over the running example's marginals
p = Profile([[1 / 2, 1 / 4, 1 / 4], [1 / 4] * 4])
print()
print(render_table(build_joint(spec, p)))

# axioms on a 65 x 65 grid
print()
print(check_copula_axioms(spec, 6).to_dict())

# three dimensions, AR(1) correlation
spec3 = CopulaSpec.gaussian_rho(0.5, 3)
print("\nC3(0.5, 0.5, 0.5) =", evaluate(spec3, [0.5, 0.5, 0.5]))

# four dimensions: equicorrelation 1/2 gives the orthant probability 1/5
corr4 = np.full((4, 4), 0.5) + 0.5 * np.eye(4)
res = mvn_cdf_qmc(np.zeros(4), corr4, seed=0)
print("4-d orthant (QMC)  =", res.value, "+-", res.error, "(exact 0.2)")

# independence is the identity-correlation special case
print("identity sigma:", evaluate(CopulaSpec.gaussian(np.eye(2)), [0.3, 0.6]), "vs 0.18")
