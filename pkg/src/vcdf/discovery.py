"""Base causal discovery methods mapping a series to a lag-indexed graph.

Two deterministic methods share the lagged least-squares machinery:

* ``varlingam``: fits a lagged autoregression, then orders the residuals by a
  non-Gaussianity contrast to recover an acyclic instantaneous layer, and
  re-expresses the lagged coefficients in structural form.
* ``lagreg``: per-target lagged regression that keeps coefficients passing a
  two-sided normal significance test, no instantaneous layer.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from statistics import NormalDist
from typing import NamedTuple

import numpy as np

from .series import Edge, MultivariateSeries, WindowGraph

# Constants of the maximum-entropy approximation used by the pairwise
# non-Gaussianity contrast (log-cosh and Gaussian-moment terms).
_K1 = 79.047
_K2 = 7.4129
_GAMMA = 0.37457

_ZERO_TOLERANCE = 1e-12


@dataclass(frozen=True)
class DiscovererConfig:
    """Shared knobs for the base methods.

    ``alpha`` is only read by the lagged-regression method; ``prune_threshold``
    drops estimated edges with |weight| below it for both methods.
    """

    max_lag: int = 3
    prune_threshold: float = 0.05
    alpha: float = 0.01

    def __post_init__(self) -> None:
        if self.max_lag < 1:
            raise ValueError(f"max_lag must be >= 1, got {self.max_lag}")
        if not np.isfinite(self.prune_threshold) or self.prune_threshold < 0:
            raise ValueError(f"prune_threshold must be finite and >= 0, got {self.prune_threshold}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")


class VarFit(NamedTuple):
    """Least-squares fit of x_t on an intercept and lags 1..p.

    ``coefs[l-1][j, i]`` weights x_{t-l}(i) in the regression for x_t(j); the
    residual rows follow the temporal order of the regressed steps.
    """

    coefs: np.ndarray
    residuals: np.ndarray
    intercept: np.ndarray


def _lagged_design(values: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    T, n = values.shape
    blocks = [np.ones((T - p, 1))]
    for lag in range(1, p + 1):
        blocks.append(values[p - lag : T - lag])
    return np.hstack(blocks), values[p:]


def _qr_solve(Z: np.ndarray, Y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Solve min ||Z b - Y|| by QR; raises on rank-deficient regressors."""
    Q, R = np.linalg.qr(Z)
    diag = np.abs(np.diag(R))
    tol = (diag.max() if diag.size else 0.0) * max(Z.shape) * np.finfo(float).eps
    if diag.size == 0 or diag.min() <= tol:
        raise ValueError(
            "rank-deficient regressor matrix (constant or duplicate columns, or too few rows)"
        )
    beta = np.linalg.solve(R, Q.T @ Y)
    return beta, R


def fit_var(series: MultivariateSeries, p: int) -> VarFit:
    """Ordinary least squares fit of a lag-p autoregression with intercept."""
    if p < 1:
        raise ValueError(f"lag order must be >= 1, got {p}")
    values = series.values
    T, n = values.shape
    if T <= n * p + p + 1:
        raise ValueError(f"need more than {n * p + p + 1} steps to fit {n} variables at lag {p}, got {T}")
    Z, Y = _lagged_design(values, p)
    beta, _ = _qr_solve(Z, Y)
    residuals = Y - Z @ beta
    coefs = np.stack([beta[1 + (lag - 1) * n : 1 + lag * n].T for lag in range(1, p + 1)])
    return VarFit(coefs, residuals, beta[0].copy())


def _negentropy_proxy(u: np.ndarray) -> float:
    """Differential-entropy proxy of a standardized sample."""
    return (
        (1.0 + math.log(2.0 * math.pi)) / 2.0
        - _K1 * (float(np.mean(np.log(np.cosh(u)))) - _GAMMA) ** 2
        - _K2 * float(np.mean(u * np.exp(-(u**2) / 2.0))) ** 2
    )


def _standardized(column: np.ndarray) -> np.ndarray:
    std = float(column.std())
    if std <= _ZERO_TOLERANCE:
        raise ValueError("degenerate (near-constant) residual column")
    return (column - float(column.mean())) / std


def _select_exogenous(work: np.ndarray, active: list[int]) -> int:
    """Pick the most plausibly exogenous variable among the active columns.

    For each ordered pair the score contrasts the entropy proxy of one
    variable plus the other's regression residual against the reverse
    direction; the candidate minimising the squared negative part wins,
    with ties broken toward the lowest variable index.
    """
    standardized = {i: _standardized(work[:, i]) for i in active}
    entropy = {i: _negentropy_proxy(standardized[i]) for i in active}
    direction = {}
    for pos, i in enumerate(active):
        for j in active[pos + 1 :]:
            xi, xj = standardized[i], standardized[j]
            corr = float(np.mean(xi * xj))
            res_i = _standardized(xi - corr * xj)
            res_j = _standardized(xj - corr * xi)
            direction[(i, j)] = (entropy[j] + _negentropy_proxy(res_i)) - (
                entropy[i] + _negentropy_proxy(res_j)
            )
    best, best_score = active[0], None
    for i in active:
        score = 0.0
        for j in active:
            if j == i:
                continue
            diff = direction[(i, j)] if (i, j) in direction else -direction[(j, i)]
            score += min(0.0, diff) ** 2
        if best_score is None or score < best_score:
            best, best_score = i, score
    return best


def direct_lingam_order(residuals: np.ndarray) -> tuple[list[int], np.ndarray]:
    """Recover a causal order and instantaneous coefficients from iid residual rows.

    Returns ``(order, b0)`` where ``order`` lists variables from most to least
    exogenous and ``b0[effect, cause]`` holds the OLS coefficients of each
    variable on its predecessors (strictly triangular under ``order``).
    """
    E = np.asarray(residuals, dtype=float)
    if E.ndim != 2:
        raise ValueError(f"residuals must be 2-dimensional, got shape {E.shape}")
    if not np.isfinite(E).all():
        raise ValueError("residuals must be finite")
    rows, n = E.shape
    if rows < 10 * n:
        raise ValueError(f"need at least {10 * n} residual rows for {n} variables, got {rows}")

    work = E.copy()
    active = list(range(n))
    order: list[int] = []
    while active:
        chosen = active[0] if len(active) == 1 else _select_exogenous(work, active)
        order.append(chosen)
        active.remove(chosen)
        if active:
            pivot = work[:, chosen]
            var = float(pivot.var())
            if var <= _ZERO_TOLERANCE:
                raise ValueError("degenerate (near-constant) residual column")
            pivot_mean = float(pivot.mean())
            rest = work[:, active]
            covs = rest.mean(axis=0) * pivot_mean
            covs = (rest * pivot[:, None]).mean(axis=0) - covs
            work[:, active] = rest - np.outer(pivot, covs / var)

    b0 = np.zeros((n, n))
    ones = np.ones((rows, 1))
    for idx in range(1, n):
        target = order[idx]
        predecessors = order[:idx]
        Z = np.hstack([ones, E[:, predecessors]])
        beta, _, _, _ = np.linalg.lstsq(Z, E[:, target], rcond=None)
        b0[target, predecessors] = beta[1:]
    b0[np.abs(b0) < _ZERO_TOLERANCE] = 0.0
    return order, b0


def varlingam_discover(series: MultivariateSeries, config: DiscovererConfig) -> WindowGraph:
    """Ordered-residual discovery: lag fit, residual ordering, structural rewrite."""
    fit = fit_var(series, config.max_lag)
    _, b0 = direct_lingam_order(fit.residuals)
    n = series.n_vars
    structural = (np.eye(n) - b0) @ fit.coefs
    edges = []
    for j in range(n):
        for i in range(n):
            weight = b0[j, i]
            if weight != 0.0 and abs(weight) >= config.prune_threshold:
                edges.append(Edge(i, j, 0, float(weight)))
    for lag in range(1, config.max_lag + 1):
        B = structural[lag - 1]
        for j in range(n):
            for i in range(n):
                weight = B[j, i]
                if weight != 0.0 and abs(weight) >= config.prune_threshold:
                    edges.append(Edge(i, j, lag, float(weight)))
    return WindowGraph(n, config.max_lag, frozenset(edges))


def lagreg_discover(series: MultivariateSeries, config: DiscovererConfig) -> WindowGraph:
    """Per-target lagged regression keeping significant, non-trivial coefficients."""
    p = config.max_lag
    values = series.values
    T, n = values.shape
    if T <= n * p + p + 1:
        raise ValueError(f"need more than {n * p + p + 1} steps to fit {n} variables at lag {p}, got {T}")
    Z, Y = _lagged_design(values, p)
    beta, R = _qr_solve(Z, Y)
    residuals = Y - Z @ beta
    rows, q = Z.shape
    dof = rows - q
    sigma2 = (residuals**2).sum(axis=0) / dof
    r_inv = np.linalg.solve(R, np.eye(q))
    unit_variance = (r_inv**2).sum(axis=1)

    if config.alpha == 0.0:
        return WindowGraph(n, p, frozenset())
    critical = NormalDist().inv_cdf(1.0 - config.alpha / 2.0)

    edges = []
    for lag in range(1, p + 1):
        for i in range(n):
            row = 1 + (lag - 1) * n + i
            for j in range(n):
                coef = float(beta[row, j])
                if coef == 0.0 or abs(coef) < config.prune_threshold:
                    continue
                se = math.sqrt(sigma2[j] * unit_variance[row])
                if se > 0.0 and abs(coef) / se > critical:
                    edges.append(Edge(i, j, lag, coef))
    return WindowGraph(n, p, frozenset(edges))


class BaseDiscoverer(ABC):
    """A deterministic map from a multivariate series to a window graph."""

    method_id: str

    def __init__(self, config: DiscovererConfig | None = None) -> None:
        self.config = config if config is not None else DiscovererConfig()

    @abstractmethod
    def discover(self, series: MultivariateSeries) -> WindowGraph:
        raise NotImplementedError


class VarLingamDiscoverer(BaseDiscoverer):
    method_id = "varlingam"

    def discover(self, series: MultivariateSeries) -> WindowGraph:
        return varlingam_discover(series, self.config)


class LaggedRegressionDiscoverer(BaseDiscoverer):
    method_id = "lagreg"

    def discover(self, series: MultivariateSeries) -> WindowGraph:
        return lagreg_discover(series, self.config)


DISCOVERERS: dict[str, type[BaseDiscoverer]] = {
    "varlingam": VarLingamDiscoverer,
    "lagreg": LaggedRegressionDiscoverer,
}


def make_discoverer(method_id: str, config: DiscovererConfig | None = None) -> BaseDiscoverer:
    try:
        cls = DISCOVERERS[method_id]
    except KeyError:
        known = ", ".join(sorted(DISCOVERERS))
        raise ValueError(f"unknown discoverer {method_id!r}, expected one of: {known}") from None
    return cls(config)
