"""Maximal coupling of two marginals: a model that is deliberately not a copula model.

The diagonal ``{(s, s)}`` receives ``min(p1(s), p2(s))``.  The leftover mass
is placed by the northwest-corner rule (scan rows ascending, columns
ascending).  That placement is a convention, chosen because it reproduces
both worked tables of the aggregation counterexample.
"""

from __future__ import annotations

import numpy as np

from .joint import JointPmf
from .marginals import as_marginal, as_profile


def maximal_coupling(p1, p2) -> JointPmf:
    p1 = as_marginal(p1).probs
    p2 = as_marginal(p2).probs
    z1, z2 = p1.size, p2.size
    mass = np.zeros((z1, z2))
    d = min(z1, z2)
    diag = np.minimum(p1[:d], p2[:d])
    mass[np.arange(d), np.arange(d)] = diag

    r1 = p1.copy()
    r2 = p2.copy()
    r1[:d] -= diag
    r2[:d] -= diag
    # one of r1[s], r2[s] is exactly zero on the diagonal, so it stays untouched
    i = j = 0
    while i < z1 and j < z2:
        m = min(r1[i], r2[j])
        if m > 0:
            mass[i, j] += m
            r1[i] -= m
            r2[j] -= m
        if r1[i] <= 0:
            i += 1
        else:
            j += 1
    return JointPmf(mass)


class MaximalCouplingModel:
    """Model oracle wrapping :func:`maximal_coupling` (two marginals only)."""

    name = "maximal-coupling"

    def __call__(self, p) -> JointPmf:
        p = as_profile(p)
        if p.n != 2:
            raise ValueError(f"maximal coupling is defined for 2 marginals, got {p.n}")
        return maximal_coupling(p[0], p[1])

    def __repr__(self):
        return "MaximalCouplingModel()"
