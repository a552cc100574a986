"""Standard multivariate normal CDFs for the Gaussian copula (dimension 2 to 4).

* bivariate: Drezner-Wesolowsky single-integral form in Genz's arrangement,
  fixed 6/12/20-point Gauss-Legendre rules chosen by ``|r|``, accurate to
  about 1e-15;
* trivariate: condition on the least-correlated coordinate and integrate the
  conditional bivariate CDF with composite Gauss-Legendre, about 1e-12;
* four dimensions: Genz's separation-of-variables integrand on scrambled
  Sobol points, several independent scramblings for an error estimate.

Every routine is deterministic; the QMC path takes an explicit seed.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
from scipy.special import ndtr, ndtri
from scipy.stats import qmc

__all__ = ["bvn_cdf", "tvn_cdf", "mvn_cdf", "mvn_cdf_qmc", "psd_cholesky", "QMCResult"]

_TWO_PI = 2.0 * np.pi
_GL_X, _GL_W = np.polynomial.legendre.leggauss(20)
# nodes on (0, 2) so that asin(r)/2 * node spans (0, asin r); fewer nodes
# suffice for weak correlation
_DW_RULES = [
    (0.3, *np.polynomial.legendre.leggauss(6)),
    (0.75, *np.polynomial.legendre.leggauss(12)),
    (0.925, _GL_X, _GL_W),
]
_DW_X = 1.0 + _GL_X
_DW_W = _GL_W

# correlations this close to +-1 are treated as exact linear dependence
PERFECT_CORR = 1.0 - 1e-12
_TAIL = 8.5  # Phi(-8.5) ~ 1e-17
_PANELS = 8


def _bvnu(h, k, r):
    """P(X > h, Y > k) for a standard bivariate normal with correlation ``r``.

    Finite ``h``/``k`` only; vectorized over broadcastable arrays.
    """
    h, k, r = np.broadcast_arrays(
        np.asarray(h, float), np.asarray(k, float), np.asarray(r, float)
    )
    out = np.empty(h.shape)
    hk = h * k

    absr = np.abs(r)
    lower = 0.0
    for upper, gx, gw in _DW_RULES:
        mid = (absr >= lower) & (absr < upper)
        lower = upper
        if not np.any(mid):
            continue
        hm, km, rm = h[mid], k[mid], r[mid]
        hs = (hm * hm + km * km) / 2.0
        asr = np.arcsin(rm) / 2.0
        sn = np.sin(asr[:, None] * (1.0 + gx))
        bvn = np.exp((sn * (hm * km)[:, None] - hs[:, None]) / (1.0 - sn * sn)) @ gw
        out[mid] = bvn * asr / _TWO_PI + ndtr(-hm) * ndtr(-km)

    hi = absr >= 0.925
    if np.any(hi):
        hh, kk, rr = h[hi], k[hi].copy(), r[hi]
        hkk = hk[hi].copy()
        neg = rr < 0
        kk[neg] = -kk[neg]
        hkk[neg] = -hkk[neg]
        bvn = np.zeros(hh.shape)
        inner = np.abs(rr) < 1.0
        if np.any(inner):
            h_, k_, hk_ = hh[inner], kk[inner], hkk[inner]
            as_ = 1.0 - rr[inner] ** 2
            a = np.sqrt(as_)
            bs = (h_ - k_) ** 2
            c = (4.0 - hk_) / 8.0
            d = (12.0 - hk_) / 80.0
            asr = -(bs / as_ + hk_) / 2.0
            val = np.where(
                asr > -100,
                a * np.exp(np.maximum(asr, -100)) * (1 - c * (bs - as_) * (1 - d * bs) / 3 + c * d * as_ * as_),
                0.0,
            )
            b = np.sqrt(bs)
            sp = np.sqrt(_TWO_PI) * ndtr(-b / a)
            val = np.where(
                hk_ > -100,
                val - np.exp(-np.minimum(hk_, 100) / 2) * sp * b * (1 - c * bs * (1 - d * bs) / 3),
                val,
            )
            a2 = a / 2.0
            xs = (a2[:, None] * _DW_X) ** 2
            asr2 = -(bs[:, None] / xs + hk_[:, None]) / 2.0
            ok = asr2 > -100
            sp2 = 1.0 + c[:, None] * xs * (1.0 + 5.0 * d[:, None] * xs)
            rs = np.sqrt(1.0 - xs)
            ep = np.exp(-(hk_[:, None] / 2.0) * xs / (1.0 + rs) ** 2) / rs
            terms = np.where(ok, np.exp(np.where(ok, asr2, 0.0)) * (sp2 - ep), 0.0)
            bvn[inner] = (a2 * (terms @ _DW_W) - val) / _TWO_PI
        pos = rr > 0
        bvn[pos] = bvn[pos] + ndtr(-np.maximum(hh[pos], kk[pos]))
        negh = ~pos & (hh >= kk)
        bvn[negh] = -bvn[negh]
        negl = ~pos & (hh < kk)
        if np.any(negl):
            hl, kl = hh[negl], kk[negl]
            span = np.where(hl < 0, ndtr(kl) - ndtr(hl), ndtr(-hl) - ndtr(-kl))
            bvn[negl] = span - bvn[negl]
        out[hi] = bvn
    return np.clip(out, 0.0, 1.0)


def bvn_cdf(a, b, r):
    """P(X <= a, Y <= b) for a standard bivariate normal with correlation ``r``.

    Accepts infinite limits.  Broadcasts over ``a``, ``b`` and ``r``.
    """
    a, b, r = np.broadcast_arrays(
        np.asarray(a, float), np.asarray(b, float), np.asarray(r, float)
    )
    out = np.empty(a.shape)
    lo = (a == -np.inf) | (b == -np.inf)
    out[lo] = 0.0
    ainf = (a == np.inf) & ~lo
    out[ainf] = ndtr(b[ainf])
    binf = (b == np.inf) & ~lo & ~ainf
    out[binf] = ndtr(a[binf])
    fin = ~(lo | ainf | binf)
    if np.any(fin):
        out[fin] = _bvnu(-a[fin], -b[fin], r[fin])
    return out if out.ndim else float(out)


def _reduce_perfect(b, corr, func):
    """Eliminate one perfectly (anti)correlated pair, or return None."""
    d = corr.shape[0]
    for i in range(d):
        for j in range(i + 1, d):
            rij = corr[i, j]
            if abs(rij) < PERFECT_CORR:
                continue
            keep = [t for t in range(d) if t != j]
            sub = corr[np.ix_(keep, keep)]
            if rij > 0:
                bb = b[:, keep].copy()
                bb[:, keep.index(i)] = np.minimum(b[:, i], b[:, j])
                return func(bb, sub)
            # X_j = -X_i: need -b_j <= X_i <= b_i
            upper = b[:, keep].copy()
            lower = upper.copy()
            lower[:, keep.index(i)] = np.minimum(-b[:, j], b[:, i])
            return np.maximum(func(upper, sub) - func(lower, sub), 0.0)
    return None


def _mvn_low(b, corr):
    d = corr.shape[0]
    if d == 1:
        return ndtr(b[:, 0])
    if d == 2:
        return np.atleast_1d(bvn_cdf(b[:, 0], b[:, 1], corr[0, 1]))
    return tvn_cdf(b, corr)


def tvn_cdf(b, corr):
    """Trivariate standard normal CDF at each row of ``b`` (shape ``(m, 3)``).

    Conditions on the coordinate whose largest absolute correlation with the
    other two is smallest, then integrates ``phi(t) * P(rest | t)`` over
    ``t <= b_pivot`` with an 8-panel, 20-point composite Gauss-Legendre rule.
    """
    b = np.atleast_2d(np.asarray(b, float))
    corr = np.asarray(corr, float)
    reduced = _reduce_perfect(b, corr, _mvn_low)
    if reduced is not None:
        return reduced
    worst = [max(abs(corr[k, t]) for t in range(3) if t != k) for k in range(3)]
    k = int(np.argmin(worst))
    i, j = [t for t in range(3) if t != k]
    rki, rkj = corr[k, i], corr[k, j]
    si, sj = np.sqrt(1.0 - rki * rki), np.sqrt(1.0 - rkj * rkj)
    rc = (corr[i, j] - rki * rkj) / (si * sj)
    rc = float(np.clip(rc, -1.0, 1.0))

    out = np.zeros(b.shape[0])
    bk = b[:, k]
    live = bk > -np.inf
    if not np.any(live):
        return out
    hi = np.minimum(bk[live], _TAIL + 1.0)
    lo = np.minimum(-_TAIL, hi - 2.0)
    width = (hi - lo) / _PANELS
    # panel-major node layout: (m, panels * 20)
    starts = lo[:, None] + width[:, None] * np.arange(_PANELS)
    t = (starts[:, :, None] + width[:, None, None] * (_GL_X + 1.0) / 2.0).reshape(len(hi), -1)
    wts = np.tile(_GL_W, _PANELS)[None, :] * (width[:, None] / 2.0)
    bi = b[live, i][:, None]
    bj = b[live, j][:, None]
    with np.errstate(invalid="ignore"):
        ai = (bi - rki * t) / si
        aj = (bj - rkj * t) / sj
    ai = np.where(np.isnan(ai), np.inf, ai)
    aj = np.where(np.isnan(aj), np.inf, aj)
    cond = np.asarray(bvn_cdf(ai, aj, rc)).reshape(t.shape)
    dens = np.exp(-0.5 * t * t) / np.sqrt(_TWO_PI)
    out[live] = np.sum(wts * dens * cond, axis=1)
    return np.clip(out, 0.0, 1.0)


def psd_cholesky(corr, tol=1e-10):
    """Lower Cholesky factor of a positive semidefinite matrix.

    Columns whose pivot falls below ``tol`` are zeroed instead of failing, so
    singular correlation matrices are accepted.  A pivot below ``-tol`` means
    the matrix is indefinite and raises ``ValueError``.
    """
    a = np.asarray(corr, float)
    d = a.shape[0]
    L = np.zeros((d, d))
    for j in range(d):
        piv = a[j, j] - L[j, :j] @ L[j, :j]
        if piv < -tol:
            raise ValueError("matrix is not positive semidefinite")
        if piv <= tol:
            continue
        L[j, j] = np.sqrt(piv)
        for i in range(j + 1, d):
            L[i, j] = (a[i, j] - L[i, :j] @ L[j, :j]) / L[j, j]
    return L


class QMCResult(NamedTuple):
    value: np.ndarray
    error: np.ndarray


def mvn_cdf_qmc(b, corr, *, seed=0, n_points=2**11, n_randomizations=8):
    """Genz separation-of-variables estimate of P(X <= b) on scrambled Sobol points.

    Returns the mean over ``n_randomizations`` independent scramblings and
    its standard error.  The same ``seed`` always yields the same point sets.
    A single point ``b`` gives float fields, a batch gives arrays.
    """
    single = np.ndim(b) == 1
    b = np.atleast_2d(np.asarray(b, float))
    m, d = b.shape
    L = psd_cholesky(corr)
    tiny = np.finfo(float).tiny
    estimates = np.empty((n_randomizations, m))
    for rep, child in enumerate(np.random.SeedSequence(seed).spawn(n_randomizations)):
        w = qmc.Sobol(d=max(d - 1, 1), scramble=True, seed=np.random.default_rng(child)).random(n_points)
        f = np.ones((m, n_points))
        y = np.zeros((m, n_points, d))
        for i in range(d):
            shift = y[:, :, :i] @ L[i, :i]
            if L[i, i] > 0:
                e = ndtr((b[:, i][:, None] - shift) / L[i, i])
            else:
                e = (shift <= b[:, i][:, None]).astype(float)
            f *= e
            if i < d - 1 and L[i, i] > 0:
                u = np.clip(w[None, :, i] * e, tiny, 1.0 - 1e-16)
                y[:, :, i] = ndtri(u)
        estimates[rep] = f.mean(axis=1)
    value = estimates.mean(axis=0)
    error = estimates.std(axis=0, ddof=1) / np.sqrt(n_randomizations)
    value = np.clip(value, 0.0, 1.0)
    if single:
        return QMCResult(float(value[0]), float(error[0]))
    return QMCResult(value, error)


def mvn_cdf(b, corr, *, seed=0, method="auto"):
    """P(X <= b) for rows of ``b``, X standard normal with correlation ``corr``.

    ``method="auto"`` picks the closed-form rule for d <= 3 and QMC for d = 4;
    ``method="qmc"`` forces the QMC estimator (used as a cross-check).
    A single point gives a float.
    """
    if np.ndim(b) == 1:
        return float(mvn_cdf(np.asarray(b, float)[None, :], corr, seed=seed, method=method)[0])
    b = np.asarray(b, float)
    corr = np.asarray(corr, float)
    d = corr.shape[0]
    if method == "qmc" and d >= 2:
        return mvn_cdf_qmc(b, corr, seed=seed).value
    if d <= 3:
        return _mvn_low(b, corr)
    if d == 4:
        reduced = _reduce_perfect(b, corr, lambda bb, cc: mvn_cdf(bb, cc, seed=seed))
        if reduced is not None:
            return reduced
        return mvn_cdf_qmc(b, corr, seed=seed).value
    raise ValueError(f"multivariate normal CDF not supported in dimension {d}")
