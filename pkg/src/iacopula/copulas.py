"""Copula catalogue, box probabilities, and a grid-based copula axiom checker."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.special import ndtri

from .mvnormal import mvn_cdf

FAMILIES = ("independence", "frechet-upper", "gaussian", "clayton", "gumbel")
_ALIASES = {
    "independence": "independence",
    "product": "independence",
    "frechet-upper": "frechet-upper",
    "frechet_upper": "frechet-upper",
    "frechetupper": "frechet-upper",
    "comonotone": "frechet-upper",
    "min": "frechet-upper",
    "gaussian": "gaussian",
    "normal": "gaussian",
    "clayton": "clayton",
    "gumbel": "gumbel",
}

#: box volumes between -NEG_TOL and 0 are round-off and clamped to 0
NEG_TOL = 1e-10
#: accuracy target of the four-dimensional Gaussian (QMC) route
QMC_TOL = 1e-4
MAX_GAUSSIAN_DIM = 4


class CopulaError(ValueError):
    """Invalid copula parameters or evaluation arguments."""


class UnsupportedDimensionError(CopulaError):
    """The requested family cannot be evaluated in this dimension."""


class NegativeMassError(ArithmeticError):
    """A catalogue copula produced a box of clearly negative mass (a bug)."""


@dataclass(frozen=True)
class CopulaSpec:
    """A member of the built-in copula catalogue.

    Use the classmethod constructors rather than building one by hand; they
    validate parameters (``theta > 0`` for Clayton, ``theta >= 1`` for Gumbel,
    a symmetric unit-diagonal PSD ``sigma`` for Gaussian).
    """

    family: str
    dim: int
    sigma: Optional[tuple] = None
    theta: Optional[float] = None

    def __post_init__(self):
        fam = _ALIASES.get(str(self.family).lower())
        if fam is None:
            raise CopulaError(f"unknown copula family {self.family!r}; expected one of {FAMILIES}")
        object.__setattr__(self, "family", fam)
        if isinstance(self.dim, bool) or int(self.dim) != self.dim or self.dim < 1:
            raise CopulaError(f"dimension must be a positive integer, got {self.dim!r}")
        object.__setattr__(self, "dim", int(self.dim))

        if fam == "gaussian":
            if self.sigma is None:
                raise CopulaError("gaussian copula needs a correlation matrix 'sigma'")
            s = np.asarray(self.sigma, dtype=float)
            if s.shape != (self.dim, self.dim):
                raise CopulaError(f"sigma has shape {s.shape}, expected ({self.dim}, {self.dim})")
            if not np.all(np.isfinite(s)):
                raise CopulaError("sigma has non-finite entries")
            if not np.allclose(s, s.T, atol=1e-12, rtol=0):
                raise CopulaError("sigma is not symmetric")
            if not np.allclose(np.diag(s), 1.0, atol=1e-12, rtol=0):
                raise CopulaError("sigma must have a unit diagonal")
            if np.any(np.abs(s) > 1.0 + 1e-12):
                raise CopulaError("sigma has correlations outside [-1, 1]")
            if np.linalg.eigvalsh(s).min() < -1e-10:
                raise CopulaError("sigma is not positive semidefinite")
            object.__setattr__(self, "sigma", tuple(tuple(float(v) for v in row) for row in s))
        elif self.sigma is not None:
            raise CopulaError(f"{fam} copula takes no 'sigma'")

        if fam in ("clayton", "gumbel"):
            if self.theta is None:
                raise CopulaError(f"{fam} copula needs 'theta'")
            t = float(self.theta)
            if not np.isfinite(t):
                raise CopulaError("theta must be finite")
            if fam == "clayton" and not t > 0:
                raise CopulaError(f"clayton theta must be > 0, got {t}")
            if fam == "gumbel" and not t >= 1:
                raise CopulaError(f"gumbel theta must be >= 1, got {t}")
            object.__setattr__(self, "theta", t)
        elif self.theta is not None:
            raise CopulaError(f"{fam} copula takes no 'theta'")

    @classmethod
    def independence(cls, n: int = 2) -> "CopulaSpec":
        return cls("independence", n)

    @classmethod
    def frechet_upper(cls, n: int = 2) -> "CopulaSpec":
        return cls("frechet-upper", n)

    @classmethod
    def gaussian(cls, sigma) -> "CopulaSpec":
        s = np.asarray(sigma, dtype=float)
        return cls("gaussian", s.shape[0] if s.ndim else 0, sigma=s)

    @classmethod
    def gaussian_rho(cls, rho: float, n: int = 2, structure: str = "ar1") -> "CopulaSpec":
        """Gaussian copula with one correlation parameter.

        ``structure="ar1"`` gives ``sigma[i, j] = rho**|i-j|`` (positive
        definite for ``|rho| < 1``); ``"equi"`` gives constant off-diagonals.
        """
        idx = np.arange(n)
        if structure == "ar1":
            s = float(rho) ** np.abs(idx[:, None] - idx[None, :])
        elif structure == "equi":
            s = np.full((n, n), float(rho))
            np.fill_diagonal(s, 1.0)
        else:
            raise CopulaError(f"unknown correlation structure {structure!r}")
        return cls.gaussian(s)

    @classmethod
    def clayton(cls, theta: float, n: int = 2) -> "CopulaSpec":
        return cls("clayton", n, theta=theta)

    @classmethod
    def gumbel(cls, theta: float, n: int = 2) -> "CopulaSpec":
        return cls("gumbel", n, theta=theta)

    @property
    def corr(self) -> np.ndarray:
        return np.asarray(self.sigma, dtype=float)

    @property
    def name(self) -> str:
        if self.family == "gaussian":
            return f"gaussian(n={self.dim})"
        if self.theta is not None:
            return f"{self.family}(theta={self.theta:g}, n={self.dim})"
        return f"{self.family}(n={self.dim})"

    def to_dict(self) -> dict:
        d = {"family": self.family, "n": self.dim}
        if self.sigma is not None:
            d["sigma"] = [list(row) for row in self.sigma]
        if self.theta is not None:
            d["theta"] = self.theta
        return d

    @classmethod
    def from_dict(cls, obj, dim: Optional[int] = None) -> "CopulaSpec":
        """Parse the JSON form, e.g. ``{"family": "clayton", "theta": 2.0}``.

        A bare family name string is accepted too.  ``dim`` fills in the
        dimension when the document does not state it.
        """
        if isinstance(obj, str):
            obj = {"family": obj}
        if not isinstance(obj, dict) or "family" not in obj:
            raise CopulaError(f"copula spec must be an object with a 'family' field, got {obj!r}")
        unknown = set(obj) - {"family", "n", "dim", "sigma", "theta"}
        if unknown:
            raise CopulaError(f"unknown copula spec field(s): {sorted(unknown)}")
        n = obj.get("n", obj.get("dim"))
        sigma = obj.get("sigma")
        if n is None and sigma is not None:
            n = len(sigma)
        if n is None:
            n = dim if dim is not None else 2
        if dim is not None and n != dim:
            raise CopulaError(f"copula has dimension {n} but {dim} marginals were given")
        return cls(obj["family"], n, sigma=sigma, theta=obj.get("theta"))


@dataclass(frozen=True)
class PluginCopula:
    """An externally supplied function treated as a (candidate) copula.

    ``func`` maps a length-``dim`` vector to a float, or, with
    ``vectorized=True``, an ``(m, dim)`` array to ``m`` floats.  Nothing about
    it is trusted: :func:`check_copula_axioms` is how you find out whether it
    is actually a copula.
    """

    func: Callable = field(compare=False)
    dim: int
    name: str = "plugin"
    vectorized: bool = False


def is_catalogue(spec) -> bool:
    return isinstance(spec, CopulaSpec)


def _as_points(spec, x):
    u = np.asarray(x, dtype=float)
    if u.ndim == 0 or u.shape[-1] != spec.dim:
        raise CopulaError(f"expected points of length {spec.dim}, got shape {u.shape}")
    if np.any(np.isnan(u)) or np.any((u < 0) | (u > 1)):
        raise CopulaError("copula arguments must lie in [0, 1]")
    return u


def _clayton(u, theta):
    with np.errstate(divide="ignore"):
        logs = np.log(u)
    s = np.sum(np.expm1(-theta * logs), axis=-1)
    with np.errstate(over="ignore"):
        out = np.exp(-np.log1p(s) / theta)
    out[np.any(u == 0, axis=-1)] = 0.0
    return out


def _gumbel(u, theta):
    with np.errstate(divide="ignore"):
        t = np.sum((-np.log(u)) ** theta, axis=-1)
    return np.exp(-(t ** (1.0 / theta)))


def _gaussian(u, corr, seed):
    m, n = u.shape
    if n > MAX_GAUSSIAN_DIM:
        raise UnsupportedDimensionError(
            f"gaussian copula is supported up to dimension {MAX_GAUSSIAN_DIM}, got {n}"
        )
    out = np.zeros(m)
    live = ~np.any(u == 0, axis=1)
    interior = (u > 0) & (u < 1)
    # coordinates equal to 1 are integrated out exactly: drop them
    patterns = np.unique(interior[live], axis=0) if np.any(live) else []
    for mask in patterns:
        rows = live & np.all(interior == mask, axis=1)
        idx = np.flatnonzero(mask)
        if idx.size == 0:
            out[rows] = 1.0
        elif idx.size == 1:
            out[rows] = u[rows, idx[0]]
        else:
            b = ndtri(u[np.ix_(rows, idx)])
            out[rows] = mvn_cdf(b, corr[np.ix_(idx, idx)], seed=seed)
    return out


def _evaluate_flat(spec, u, seed=0):
    if isinstance(spec, PluginCopula):
        if spec.vectorized:
            return np.asarray(spec.func(u), dtype=float).reshape(u.shape[0])
        return np.array([float(spec.func(row)) for row in u])
    fam = spec.family
    if fam == "independence":
        return np.prod(u, axis=1)
    if fam == "frechet-upper":
        return np.min(u, axis=1)
    if fam == "clayton":
        return _clayton(u, spec.theta)
    if fam == "gumbel":
        return _gumbel(u, spec.theta)
    return _gaussian(u, spec.corr, seed)


def evaluate(spec, x, *, seed: int = 0):
    """Copula value ``C(x)`` at one point (returns float) or many (trailing axis = dim).

    ``seed`` only matters for four-dimensional Gaussian copulas, which are
    estimated by randomized QMC; a fixed seed gives reproducible values.
    """
    u = _as_points(spec, x)
    flat = u.reshape(-1, spec.dim)
    if isinstance(spec, CopulaSpec) and spec.family == "gaussian" and spec.dim > MAX_GAUSSIAN_DIM:
        raise UnsupportedDimensionError(
            f"gaussian copula is supported up to dimension {MAX_GAUSSIAN_DIM}, got {spec.dim}"
        )
    vals = _evaluate_flat(spec, flat, seed)
    if u.ndim == 1:
        return float(vals[0])
    return vals.reshape(u.shape[:-1])


def negative_tolerance(spec) -> float:
    """Largest negative box volume attributed to round-off for ``spec``."""
    if isinstance(spec, CopulaSpec) and spec.family == "gaussian" and spec.dim >= 4:
        return QMC_TOL
    return NEG_TOL


def _corner_signs(n):
    corners = list(itertools.product((0, 1), repeat=n))
    signs = [(-1) ** (n - sum(v)) for v in corners]
    return corners, signs


def rectangle_volume(spec, lower, upper, *, seed: int = 0):
    """Signed inclusion-exclusion mass of boxes, with no clamping."""
    lo = _as_points(spec, lower)
    hi = _as_points(spec, upper)
    lo, hi = np.broadcast_arrays(lo, hi)
    if np.any(lo > hi):
        raise CopulaError("box has lower > upper in some coordinate")
    n = spec.dim
    flat_lo = lo.reshape(-1, n)
    flat_hi = hi.reshape(-1, n)
    m = flat_lo.shape[0]
    corners, signs = _corner_signs(n)
    pts = np.empty((len(corners), m, n))
    for c, v in enumerate(corners):
        pts[c] = np.where(np.asarray(v, bool), flat_hi, flat_lo)
    vals = _evaluate_flat(spec, pts.reshape(-1, n), seed).reshape(len(corners), m)
    total = np.zeros(m)
    for c, sgn in enumerate(signs):
        total += sgn * vals[c]
    return total.reshape(lo.shape[:-1])


def clamp_mass(spec, vol):
    """Clamp inclusion-exclusion output to [0, 1].

    For catalogue copulas a volume below ``-negative_tolerance(spec)`` means
    a numerical bug and raises :class:`NegativeMassError`; plugin copulas are
    clamped silently (use :func:`check_copula_axioms` to audit them).
    """
    vol = np.asarray(vol, dtype=float)
    if is_catalogue(spec):
        worst = vol.min() if vol.size else 0.0
        if worst < -negative_tolerance(spec):
            raise NegativeMassError(f"{spec.name}: box volume {worst!r} below round-off tolerance")
    return np.clip(vol, 0.0, 1.0)


def rectangle_probability(spec, lower, upper, *, seed: int = 0):
    """Mass that the copula puts on the box ``prod [lower_i, upper_i]``.

    Computed by inclusion-exclusion over the ``2**n`` corners, then clamped
    to ``[0, 1]``.  Vectorized over leading axes.
    """
    vol = clamp_mass(spec, rectangle_volume(spec, lower, upper, seed=seed))
    return float(vol) if vol.ndim == 0 else vol


def inclusion_exclusion_grid(values: np.ndarray) -> np.ndarray:
    """Cell masses from copula values tabulated on a product grid of corners.

    ``values`` has shape ``(z_1 + 1, ..., z_n + 1)``; cell ``s`` receives the
    same signed corner sum (same order) as :func:`rectangle_volume` would
    compute for its box, but each corner is evaluated only once.
    """
    n = values.ndim
    shape = tuple(s - 1 for s in values.shape)
    corners, signs = _corner_signs(n)
    total = np.zeros(shape)
    for v, sgn in zip(corners, signs):
        sl = tuple(slice(o, o + z) for o, z in zip(v, shape))
        total += sgn * values[sl]
    return total


def max_grid_depth(n: int) -> int:
    """Largest axiom-check depth allowed in dimension ``n`` (about 2**24 boxes)."""
    return 12 if n <= 2 else max(1, 24 // n)


@dataclass
class AxiomReport:
    """Outcome of :func:`check_copula_axioms` on a dyadic grid."""

    name: str
    depth: int
    grounded: bool
    grounded_violation: float
    uniform_marginals: bool
    marginal_violation: float
    n_increasing: bool
    increasing_violation: float
    worst_box: Optional[tuple]
    total_mass: float
    tolerances: dict

    @property
    def passed(self) -> bool:
        return self.grounded and self.uniform_marginals and self.n_increasing

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "depth": self.depth,
            "verdict": "pass" if self.passed else "fail",
            "grounded": self.grounded,
            "grounded_violation": self.grounded_violation,
            "uniform_marginals": self.uniform_marginals,
            "marginal_violation": self.marginal_violation,
            "n_increasing": self.n_increasing,
            "increasing_violation": self.increasing_violation,
            "worst_box": list(self.worst_box) if self.worst_box is not None else None,
            "total_mass": self.total_mass,
            "tolerances": dict(self.tolerances),
        }


def check_copula_axioms(spec, k: int, *, seed: int = 0) -> AxiomReport:
    """Check the three copula axioms on the grid ``{0, 1/2**k, ..., 1}**n``.

    * grounded: ``C(x) = 0`` whenever some ``x_i = 0``;
    * uniform marginals: ``C(1, .., t, .., 1) = t``;
    * n-increasing: every elementary grid box has mass ``>= -1e-10``.

    The worst violations are reported rather than raised, so a plugin that is
    not a copula yields a failing report.  ``worst_box`` is the 1-based index
    of the most negative elementary box (its upper grid corner).
    """
    n = spec.dim
    if not 1 <= k <= max_grid_depth(n):
        raise CopulaError(f"grid depth must be in 1..{max_grid_depth(n)} for n={n}, got {k}")
    g = np.arange(2**k + 1) / 2**k
    mesh = np.stack(np.meshgrid(*([g] * n), indexing="ij"), axis=-1)
    vals = _evaluate_flat(spec, mesh.reshape(-1, n), seed).reshape(mesh.shape[:-1])

    marg_tol = 1e-6 if (is_catalogue(spec) and spec.family == "gaussian") else 1e-10
    inc_tol = negative_tolerance(spec)
    ground_tol = NEG_TOL

    ground = 0.0
    marg = 0.0
    for i in range(n):
        face = [slice(None)] * n
        face[i] = 0
        ground = max(ground, float(np.max(np.abs(vals[tuple(face)]))))
        edge = [-1] * n
        edge[i] = slice(None)
        marg = max(marg, float(np.max(np.abs(vals[tuple(edge)] - g))))

    boxes = inclusion_exclusion_grid(vals)
    worst = float(boxes.min())
    worst_box = tuple(int(v) + 1 for v in np.unravel_index(int(np.argmin(boxes)), boxes.shape))
    return AxiomReport(
        name=spec.name,
        depth=k,
        grounded=ground <= ground_tol,
        grounded_violation=ground,
        uniform_marginals=marg <= marg_tol,
        marginal_violation=marg,
        n_increasing=worst >= -inc_tol,
        increasing_violation=max(0.0, -worst),
        worst_box=worst_box if worst < 0 else None,
        total_mass=float(boxes.sum()),
        tolerances={"grounded": ground_tol, "uniform_marginals": marg_tol, "n_increasing": inc_tol},
    )
