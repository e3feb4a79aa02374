"""OLS regression, Pearson correlation, k-means and PCA."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import stats as sps

from ..errors import RankDeficientError, UndefinedInputError, ValidationError


@dataclass(frozen=True)
class OlsResult:
    names: tuple[str, ...]
    coef: np.ndarray
    std_err: np.ndarray
    t_values: np.ndarray
    p_values: np.ndarray
    r2: float
    adj_r2: float
    f_stat: float
    f_pvalue: float
    resid_std_err: float
    n_obs: int
    residuals: np.ndarray

    @property
    def df_resid(self) -> int:
        return self.n_obs - len(self.coef)

    def rows(self) -> list[list[str]]:
        out = [["term", "coef", "std_err", "t", "p"]]
        for i, name in enumerate(self.names):
            out.append([name, f"{self.coef[i]:.9g}", f"{self.std_err[i]:.9g}", f"{self.t_values[i]:.9g}",
                        f"{self.p_values[i]:.9g}"])
        for key, val in (("r2", self.r2), ("adj_r2", self.adj_r2), ("f_stat", self.f_stat),
                         ("resid_std_err", self.resid_std_err), ("n_obs", self.n_obs)):
            out.append([key, f"{val:.9g}", "", "", ""])
        return out


def _collinear_columns(x: np.ndarray, names: Sequence[str]) -> list[str]:
    """Columns that add nothing to the rank of the columns before them."""
    bad, kept = [], []
    for j in range(x.shape[1]):
        trial = x[:, kept + [j]]
        if np.linalg.matrix_rank(trial) < len(kept) + 1:
            bad.append(names[j])
        else:
            kept.append(j)
    return bad


def ols(y, x, names: Sequence[str] | None = None, add_intercept: bool = True) -> OlsResult:
    """Least squares via the normal equations with classical standard errors."""
    y = np.asarray(y, dtype=np.float64).ravel()
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    names = list(names) if names is not None else [f"x{j + 1}" for j in range(x.shape[1])]
    if len(names) != x.shape[1]:
        raise ValidationError("one name per column required")
    if add_intercept:
        x = np.column_stack([np.ones(len(y)), x])
        names = ["const", *names]
    n, p = x.shape
    if len(y) != n:
        raise ValidationError("y and X differ in length")
    if n <= p:
        raise ValidationError(f"need more observations ({n}) than parameters ({p})")
    if np.linalg.matrix_rank(x) < p:
        bad = _collinear_columns(x, names)
        raise RankDeficientError(bad)
    xtx = x.T @ x
    coef = np.linalg.solve(xtx, x.T @ y)
    resid = y - x @ coef
    rss = float(resid @ resid)
    df = n - p
    sigma2 = rss / df
    cov = sigma2 * np.linalg.inv(xtx)
    se = np.sqrt(np.diag(cov))
    with np.errstate(divide="ignore", invalid="ignore"):
        t = coef / se
    pv = 2 * sps.t.sf(np.abs(t), df)
    has_const = add_intercept or bool(np.any(np.all(x == x[:1], axis=0)))
    centre = y.mean() if has_const else 0.0
    tss = float(((y - centre) ** 2).sum())
    r2 = 1.0 - rss / tss if tss > 0 else 0.0
    k = p - 1 if has_const else p
    adj = 1.0 - (1.0 - r2) * (n - (1 if has_const else 0)) / df
    if k > 0 and rss > 0 and r2 < 1.0:
        f = (r2 / k) / ((1.0 - r2) / df)
        fp = float(sps.f.sf(f, k, df))
    else:
        f, fp = (float("inf"), 0.0) if k > 0 else (float("nan"), float("nan"))
    return OlsResult(tuple(names), coef, se, t, pv, float(r2), float(adj), float(f), fp,
                     float(np.sqrt(sigma2)), n, resid)


def pearson(x, y) -> float:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if len(x) != len(y) or len(x) < 2:
        raise ValidationError("pearson needs two equal-length series of at least 2 points")
    dx, dy = x - x.mean(), y - y.mean()
    sxx, syy = dx @ dx, dy @ dy
    if sxx == 0 or syy == 0:
        raise UndefinedInputError("zero variance")
    # one square root of the product keeps r(x, x) exactly 1
    return float(np.clip((dx @ dy) / np.sqrt(sxx * syy), -1.0, 1.0))


@dataclass(frozen=True)
class KMeansResult:
    labels: np.ndarray
    centroids: np.ndarray
    inertia: tuple[float, ...]  # after each assignment step
    n_iter: int


def _kmeanspp(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = len(points)
    chosen = [int(rng.integers(n))]
    d2 = ((points - points[chosen[0]]) ** 2).sum(axis=1)
    for _ in range(1, k):
        total = d2.sum()
        if total > 0:
            nxt = int(rng.choice(n, p=d2 / total))
        else:
            rest = np.setdiff1d(np.arange(n), chosen)
            nxt = int(rng.choice(rest))
        chosen.append(nxt)
        d2 = np.minimum(d2, ((points - points[nxt]) ** 2).sum(axis=1))
    return points[chosen].copy()


def _assign(points: np.ndarray, centroids: np.ndarray) -> tuple[np.ndarray, float]:
    d2 = ((points[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    labels = d2.argmin(axis=1)
    return labels, float(d2[np.arange(len(points)), labels].sum())


def kmeans(points, k: int, seed: int = 0, tol: float = 1e-6, max_iter: int = 300) -> KMeansResult:
    """Lloyd's algorithm from a k-means++ start; empty clusters keep their centroid."""
    points = np.asarray(points, dtype=np.float64)
    if points.ndim == 1:
        points = points[:, None]
    n = len(points)
    if k < 1 or k > n:
        raise ValidationError(f"k={k} must lie in 1..{n}")
    rng = np.random.default_rng(seed)
    centroids = _kmeanspp(points, k, rng)
    history = []
    for it in range(1, max_iter + 1):
        labels, inertia = _assign(points, centroids)
        history.append(inertia)
        new = centroids.copy()
        for c in range(k):
            members = points[labels == c]
            if len(members):
                new[c] = members.mean(axis=0)
        shift = float(((new - centroids) ** 2).sum())
        centroids = new
        if shift <= tol:
            break
    labels, inertia = _assign(points, centroids)
    history.append(inertia)
    return KMeansResult(labels, centroids, tuple(history), it)


@dataclass(frozen=True)
class PcaResult:
    projected: np.ndarray
    components: np.ndarray  # d x dim
    explained_variance: np.ndarray
    explained_ratio: np.ndarray
    mean: np.ndarray


def pca(points, d: int) -> PcaResult:
    """Covariance eigen-decomposition; each component's largest-magnitude coordinate is positive."""
    points = np.asarray(points, dtype=np.float64)
    n, dim = points.shape
    if not 1 <= d <= dim:
        raise ValidationError(f"d={d} must lie in 1..{dim}")
    mean = points.mean(axis=0)
    centred = points - mean
    cov = centred.T @ centred / max(n - 1, 1)
    vals, vecs = np.linalg.eigh(cov)
    order = np.argsort(vals)[::-1]
    vals, vecs = np.clip(vals[order], 0.0, None), vecs[:, order].T
    for i in range(len(vecs)):
        j = int(np.argmax(np.abs(vecs[i])))
        if vecs[i, j] < 0:
            vecs[i] = -vecs[i]
    total = vals.sum()
    ratio = vals / total if total > 0 else np.zeros_like(vals)
    comps = vecs[:d]
    return PcaResult(centred @ comps.T, comps, vals[:d], ratio[:d], mean)
