"""Marginal distributions over ordered bins and the operators acting on them.

Bins are numbered ``1..w`` at every public interface; storage is a 0-based
numpy array.  All objects are immutable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

#: inputs whose total mass is farther than this from 1 are rejected
NORMALIZATION_TOL = 1e-9


class MarginalError(ValueError):
    """Raised for malformed marginals, profiles, or bin indices."""


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Marginal:
    """A probability mass function over the ordered bins ``1..w``.

    ``probs`` is validated on construction: finite, nonnegative, length at
    least one and summing to one within :data:`NORMALIZATION_TOL`.  Inputs
    within that tolerance are renormalized unless the discrepancy is plain
    float round-off (so serialized profiles read back bit-for-bit); anything
    farther off is rejected rather than silently rescaled.
    """

    probs: np.ndarray

    def __post_init__(self):
        p = np.array(self.probs, dtype=np.float64)
        if p.ndim != 1:
            raise MarginalError(f"a marginal is a flat list of probabilities, got shape {p.shape}")
        if p.size == 0:
            raise MarginalError("a marginal needs at least one bin")
        if not np.all(np.isfinite(p)):
            raise MarginalError(f"non-finite probability in {p.tolist()}")
        if np.any(p < 0):
            bad = int(np.argmax(p < 0)) + 1
            raise MarginalError(f"bin {bad} has negative mass {p[bad - 1]!r}")
        total = float(p.sum())
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise MarginalError(f"probabilities sum to {total!r}, not 1")
        if abs(total - 1.0) > 4 * np.finfo(float).eps * p.size:
            p = p / total
        object.__setattr__(self, "probs", _frozen(p))

    @property
    def size(self) -> int:
        """Number of bins ``w``."""
        return int(self.probs.size)

    def __len__(self) -> int:
        return self.size

    def __getitem__(self, s: int) -> float:
        """Mass of bin ``s`` (1-based)."""
        _check_bin(s, self.size, "bin")
        return float(self.probs[s - 1])

    def __eq__(self, other):
        if not isinstance(other, Marginal):
            return NotImplemented
        return np.array_equal(self.probs, other.probs)

    def __hash__(self):
        return hash(self.probs.tobytes())

    def __repr__(self):
        return f"Marginal({self.probs.tolist()})"

    def cdf(self) -> np.ndarray:
        """Cumulative masses ``F(0), F(1), ..., F(w)`` with ``F(0)=0`` and ``F(w)=1``."""
        c = np.empty(self.size + 1)
        c[0] = 0.0
        np.cumsum(self.probs, out=c[1:])
        c[-1] = 1.0
        # cumsum round-off must not push interior values past the end point
        np.minimum(c, 1.0, out=c)
        return c

    def tolist(self) -> list:
        return self.probs.tolist()


def _raw(arr: np.ndarray) -> Marginal:
    # operators preserve mass exactly; skip validation so bits are untouched
    m = Marginal.__new__(Marginal)
    object.__setattr__(m, "probs", _frozen(np.asarray(arr, dtype=np.float64)))
    return m


def _check_bin(s, w, what, lo=1):
    if isinstance(s, (bool, np.bool_)) or not isinstance(s, (int, np.integer)):
        raise MarginalError(f"{what} index must be an integer, got {s!r}")
    if not lo <= s <= w:
        raise MarginalError(f"{what} index {s} out of range {lo}..{w}")


def as_marginal(q) -> Marginal:
    return q if isinstance(q, Marginal) else Marginal(q)


@dataclass(frozen=True, eq=False)
class Permutation:
    """A bijection on ``{1..w}`` stored as the 1-based image vector."""

    mapping: tuple

    def __post_init__(self):
        m = tuple(int(v) for v in self.mapping)
        if not m or sorted(m) != list(range(1, len(m) + 1)):
            raise MarginalError(f"{list(self.mapping)} is not a permutation of 1..{len(m)}")
        object.__setattr__(self, "mapping", m)

    def __len__(self):
        return len(self.mapping)

    def __call__(self, s: int) -> int:
        _check_bin(s, len(self), "permutation argument")
        return self.mapping[s - 1]

    def __eq__(self, other):
        return isinstance(other, Permutation) and self.mapping == other.mapping

    def __hash__(self):
        return hash(self.mapping)

    def inverse(self) -> "Permutation":
        inv = [0] * len(self)
        for s, t in enumerate(self.mapping, start=1):
            inv[t - 1] = s
        return Permutation(tuple(inv))

    @classmethod
    def identity(cls, w: int) -> "Permutation":
        return cls(tuple(range(1, w + 1)))

    def index_array(self) -> np.ndarray:
        """0-based image vector, for fancy indexing."""
        return np.asarray(self.mapping, dtype=np.intp) - 1


def as_permutation(sigma) -> Permutation:
    return sigma if isinstance(sigma, Permutation) else Permutation(tuple(sigma))


def binary_marginal(t: float) -> Marginal:
    """Two-bin marginal ``(t, 1 - t)``; ``t`` is stored exactly."""
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise MarginalError(f"binary marginal needs t in [0, 1], got {t!r}")
    return _raw(np.array([t, 1.0 - t]))


class Profile(Sequence):
    """An ordered list of ``n >= 1`` marginals (one dataset)."""

    __slots__ = ("_marginals",)

    def __init__(self, marginals: Iterable):
        ms = tuple(as_marginal(q) for q in marginals)
        if not ms:
            raise MarginalError("a profile needs at least one marginal")
        self._marginals = ms

    def __getitem__(self, i):
        return self._marginals[i]

    def __len__(self):
        return len(self._marginals)

    @property
    def n(self) -> int:
        return len(self._marginals)

    @property
    def shape(self) -> tuple:
        """Support sizes ``z = (z_1, ..., z_n)``."""
        return tuple(q.size for q in self._marginals)

    def marginal(self, i: int) -> Marginal:
        """The ``i``-th marginal, 1-based."""
        _check_bin(i, self.n, "dimension")
        return self._marginals[i - 1]

    def replace(self, i: int, q) -> "Profile":
        _check_bin(i, self.n, "dimension")
        ms = list(self._marginals)
        ms[i - 1] = as_marginal(q)
        return Profile(ms)

    def key(self) -> tuple:
        """Hashable exact identity of the profile (used for memoization)."""
        return tuple(q.probs.tobytes() for q in self._marginals)

    def tolist(self) -> list:
        return [q.tolist() for q in self._marginals]

    def __eq__(self, other):
        return isinstance(other, Profile) and self._marginals == other._marginals

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"Profile({self.tolist()})"


def as_profile(p) -> Profile:
    return p if isinstance(p, Profile) else Profile(p)


def collapse(q, j: int) -> Marginal:
    """Merge bins ``j`` and ``j+1`` of ``q`` into a single bin ``j``."""
    q = as_marginal(q)
    w = q.size
    if w < 2:
        raise MarginalError("cannot collapse a marginal with a single bin")
    _check_bin(j, w - 1, "merge")
    p = q.probs
    return _raw(np.concatenate([p[: j - 1], [p[j - 1] + p[j]], p[j + 1:]]))


def split(q, j: int, lam: float) -> Marginal:
    """Refine bin ``j`` into two adjacent bins holding ``lam`` and ``1-lam`` of its mass.

    ``collapse(split(q, j, lam), j)`` gives back ``q`` bit-for-bit: the
    second child is computed as the exact remainder of the first.
    """
    q = as_marginal(q)
    _check_bin(j, q.size, "split")
    lam = float(lam)
    if not 0.0 <= lam <= 1.0:
        raise MarginalError(f"split fraction {lam!r} outside [0, 1]")
    p = q.probs
    mass = p[j - 1]
    # both subtractions are exact (Sterbenz), so first + second == mass in floats
    second = mass - lam * mass
    first = mass - second
    return _raw(np.concatenate([p[: j - 1], [first, second], p[j:]]))


def permute(q, sigma) -> Marginal:
    """Relabel bins: the result has mass ``q(sigma(s))`` at bin ``s``."""
    q = as_marginal(q)
    sigma = as_permutation(sigma)
    if len(sigma) != q.size:
        raise MarginalError(f"permutation of length {len(sigma)} applied to {q.size} bins")
    return _raw(q.probs[sigma.index_array()])


def marginal_cdf(q, s: int) -> float:
    """Total mass of bins ``1..s``; ``s = 0`` gives 0."""
    q = as_marginal(q)
    _check_bin(s, q.size, "cdf", lo=0)
    return float(q.cdf()[s])


def collapse_profile(p, i: int, j: int) -> Profile:
    """Merge bins ``j, j+1`` of the ``i``-th marginal, leaving the others alone."""
    p = as_profile(p)
    return p.replace(i, collapse(p.marginal(i), j))


def permute_profile(p, i: int, sigma) -> Profile:
    """Relabel the bins of the ``i``-th marginal by ``sigma``."""
    p = as_profile(p)
    return p.replace(i, permute(p.marginal(i), sigma))
