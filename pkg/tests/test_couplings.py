from fractions import Fraction

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from iacopula.couplings import MaximalCouplingModel, maximal_coupling
from iacopula.joint import marginal_of
from iacopula.marginals import Profile


def best_diagonal_by_search(p1, p2, step=Fraction(1, 24)):
    """Largest diagonal mass over all couplings whose cells are multiples of ``step``.

    Plain enumeration; no optimization theory involved.
    """
    z1, z2 = len(p1), len(p2)
    p1 = [Fraction(v).limit_denominator(24) for v in p1]
    p2 = [Fraction(v).limit_denominator(24) for v in p2]
    best = Fraction(-1)

    def rows(i, cols_left, diag):
        nonlocal best
        if i == z1:
            if all(c == 0 for c in cols_left):
                best = max(best, diag)
            return
        units = int(p1[i] / step)
        for split in _compositions(units, z2):
            cells = [k * step for k in split]
            left = [c - v for c, v in zip(cols_left, cells)]
            if any(v < 0 for v in left):
                continue
            rows(i + 1, left, diag + (cells[i] if i < z2 else 0))

    rows(0, p2, Fraction(0))
    return best


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


class TestMaximalCoupling:
    def test_first_table(self):
        jp = maximal_coupling([0.5, 0.25, 0.25], [0.25] * 4)
        expected = np.zeros((3, 4))
        expected[0, 0] = expected[1, 1] = expected[2, 2] = expected[0, 3] = 0.25
        assert_array_equal(jp.mass, expected)

    def test_second_table(self):
        jp = maximal_coupling([0.5, 0.25, 0.125, 0.125], [0.25] * 4)
        expected = np.zeros((4, 4))
        expected[0, 0] = expected[1, 1] = 0.25
        expected[2, 2] = expected[3, 3] = 0.125
        expected[0, 2] = expected[0, 3] = 0.125
        assert_array_equal(jp.mass, expected)

    def test_identical_marginals(self):
        p = [0.1, 0.6, 0.3]
        assert_array_equal(maximal_coupling(p, p).mass, np.diag(p))

    def test_marginals_preserved(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            p1 = rng.dirichlet(np.ones(rng.integers(1, 7)))
            p2 = rng.dirichlet(np.ones(rng.integers(1, 7)))
            jp = maximal_coupling(p1, p2)
            assert_allclose(marginal_of(jp, 1).probs, p1, atol=1e-12)
            assert_allclose(marginal_of(jp, 2).probs, p2, atol=1e-12)
            d = min(p1.size, p2.size)
            assert_allclose(np.trace(jp.mass[:d, :d]), np.minimum(p1[:d], p2[:d]).sum(), atol=1e-15)

    @pytest.mark.parametrize("z1, z2", [(2, 2), (2, 3), (3, 2), (3, 3)])
    def test_diagonal_is_optimal(self, z1, z2):
        # marginals on the 1/24 lattice; compare against exhaustive search
        rng = np.random.default_rng(z1 * 10 + z2)
        for _ in range(4):
            c1 = rng.multinomial(24, np.ones(z1) / z1)
            c2 = rng.multinomial(24, np.ones(z2) / z2)
            p1, p2 = c1 / 24, c2 / 24
            jp = maximal_coupling(p1, p2)
            d = min(z1, z2)
            diag = float(np.trace(jp.mass[:d, :d]))
            assert abs(diag - float(best_diagonal_by_search(p1, p2))) < 1e-12

    def test_model_rejects_other_dimensions(self):
        f = MaximalCouplingModel()
        with pytest.raises(ValueError):
            f(Profile([[0.5, 0.5]] * 3))
        assert f(Profile([[0.5, 0.5], [1.0]])).shape == (2, 1)
