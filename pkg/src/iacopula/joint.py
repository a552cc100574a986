"""Joint distributions on product grids and the copula model that builds them."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .copulas import CopulaError, _evaluate_flat, clamp_mass, inclusion_exclusion_grid
from .marginals import Marginal, as_profile

#: dense storage cap
MAX_CELLS = 10**7
SUM_TOL = 1e-9


class JointError(ValueError):
    """Malformed joint distribution or out-of-range query."""


@dataclass(frozen=True, eq=False)
class JointPmf:
    """Dense probability mass over ``[z_1] x ... x [z_n]``.

    ``mass[s_1 - 1, ..., s_n - 1]`` is the probability of cell ``s``.  Entries
    down to ``-1e-10`` are clamped to zero; the total must be 1 within 1e-9.
    """

    mass: np.ndarray

    def __post_init__(self):
        m = np.array(self.mass, dtype=np.float64)
        if m.ndim == 0 or m.size == 0:
            raise JointError("joint mass must be a non-empty array")
        if not np.all(np.isfinite(m)):
            raise JointError("joint mass has non-finite entries")
        if m.min() < -1e-10:
            idx = tuple(int(v) + 1 for v in np.unravel_index(int(np.argmin(m)), m.shape))
            raise JointError(f"cell {list(idx)} has negative mass {m.min()!r}")
        m = np.maximum(m, 0.0)
        total = float(m.sum())
        if abs(total - 1.0) > SUM_TOL:
            raise JointError(f"joint mass sums to {total!r}, not 1")
        m.setflags(write=False)
        object.__setattr__(self, "mass", m)

    @property
    def shape(self) -> tuple:
        return tuple(int(v) for v in self.mass.shape)

    @property
    def n(self) -> int:
        return self.mass.ndim

    def __getitem__(self, s) -> float:
        """Mass of the 1-based cell ``s``."""
        s = tuple(s) if np.ndim(s) else (s,)
        _check_cell(s, self.shape, lo=1)
        return float(self.mass[tuple(v - 1 for v in s)])

    def cdf_table(self) -> np.ndarray:
        """Joint CDF at every cell (same shape as ``mass``)."""
        c = self.mass
        for ax in range(self.n):
            c = np.cumsum(c, axis=ax)
        return c

    def to_dict(self) -> dict:
        """JSON form: row-major (last dimension fastest) flattened mass."""
        return {"shape": list(self.shape), "mass": self.mass.ravel(order="C").tolist()}

    @classmethod
    def from_dict(cls, obj) -> "JointPmf":
        if not isinstance(obj, dict) or "shape" not in obj or "mass" not in obj:
            raise JointError("joint must be an object with 'shape' and 'mass' fields")
        shape = tuple(int(v) for v in obj["shape"])
        if any(v < 1 for v in shape):
            raise JointError(f"invalid shape {list(shape)}")
        mass = np.asarray(obj["mass"], dtype=float).reshape(-1)
        if mass.size != int(np.prod(shape)):
            raise JointError(f"mass has {mass.size} entries, shape {list(shape)} needs {int(np.prod(shape))}")
        return cls(mass.reshape(shape, order="C"))

    def __repr__(self):
        return f"JointPmf(shape={self.shape})"


def _check_cell(s, shape, lo):
    if len(s) != len(shape):
        raise JointError(f"index {list(s)} has {len(s)} coordinates, joint has {len(shape)}")
    for v, z in zip(s, shape):
        if isinstance(v, (bool, np.bool_)) or not isinstance(v, (int, np.integer)):
            raise JointError(f"index {list(s)} must contain integers")
        if not lo <= v <= z:
            raise JointError(f"index {list(s)} outside {lo}..{list(shape)}")


def build_joint(spec, p, *, seed: int = 0) -> JointPmf:
    """Joint distribution of the copula model for ``spec`` at profile ``p``.

    Cell ``s`` gets the copula mass of the box
    ``prod_k [F_k(s_k - 1), F_k(s_k)]`` where ``F_k`` is the CDF of the
    ``k``-th marginal.  The copula is tabulated once on the product grid of
    marginal CDF values; each cell then takes its own ``2**n`` signed corner
    sum, so no error accumulates across cells.
    """
    p = as_profile(p)
    if p.n != spec.dim:
        raise CopulaError(f"copula has dimension {spec.dim} but the profile has {p.n} marginals")
    z = p.shape
    if int(np.prod(z)) > MAX_CELLS:
        raise JointError(f"grid {list(z)} exceeds the {MAX_CELLS} cell limit")
    cdfs = [q.cdf() for q in p]
    mesh = np.stack(np.meshgrid(*cdfs, indexing="ij"), axis=-1)
    vals = _evaluate_flat(spec, mesh.reshape(-1, p.n), seed).reshape(mesh.shape[:-1])
    mass = clamp_mass(spec, inclusion_exclusion_grid(vals))
    return JointPmf(mass)


def joint_cdf(jp: JointPmf, s) -> float:
    """Mass of the lower orthant ``{t : t_i <= s_i}``; ``s_i = 0`` is allowed."""
    s = tuple(s) if np.ndim(s) else (s,)
    _check_cell(s, jp.shape, lo=0)
    return float(jp.mass[tuple(slice(0, v) for v in s)].sum())


def marginal_sums(jp: JointPmf, i: int) -> np.ndarray:
    """Raw (unnormalized) ``i``-th marginal of ``jp``, 1-based ``i``."""
    if isinstance(i, bool) or not 1 <= i <= jp.n:
        raise JointError(f"dimension {i} out of range 1..{jp.n}")
    axes = tuple(ax for ax in range(jp.n) if ax != i - 1)
    return jp.mass.sum(axis=axes) if axes else jp.mass.copy()


def marginal_of(jp: JointPmf, i: int) -> Marginal:
    """The ``i``-th marginal of ``jp``, summing out every other dimension."""
    return Marginal(marginal_sums(jp, i))
