"""Blocked-fold stability validation of a base discoverer's edges.

A base method is run once on the full series and once per fold on the series
with one contiguous block held out.  Each full-run edge is then scored by how
consistently its sign reappears across folds and by how much its fold
estimates spread relative to the full-run weight; edges failing either
threshold are removed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .discovery import BaseDiscoverer
from .series import Edge, MultivariateSeries, WindowGraph

SIGN_TOLERANCE = 1e-12


@dataclass(frozen=True)
class VcdfConfig:
    """Thresholds of the stability filter.

    ``tau_c`` is the minimum fraction of folds whose estimate matches the
    full-run sign; ``tau_v`` caps the fold spread relative to the full-run
    weight; ``w`` blends surviving weights toward the fold mean (0 keeps the
    full-run weight).  The defaults suit the varlingam base method; a noisier
    base is better served by a stricter ``tau_c`` around 0.7.
    """

    k: int = 5
    tau_c: float = 0.4
    tau_v: float = 0.4
    w: float = 0.0
    epsilon: float = 1e-8

    def __post_init__(self) -> None:
        if self.k < 2:
            raise ValueError(f"need k >= 2 folds, got {self.k}")
        if math.isnan(self.tau_c) or not 0.0 <= self.tau_c <= 1.0:
            raise ValueError(f"tau_c must lie in [0, 1], got {self.tau_c}")
        if math.isnan(self.tau_v) or self.tau_v < 0.0:
            raise ValueError(f"tau_v must be >= 0, got {self.tau_v}")
        if math.isnan(self.w) or not 0.0 <= self.w <= 1.0:
            raise ValueError(f"w must lie in [0, 1], got {self.w}")
        if not math.isfinite(self.epsilon) or self.epsilon <= 0.0:
            raise ValueError(f"epsilon must be a positive finite value, got {self.epsilon}")


@dataclass(frozen=True)
class FoldPlan:
    """Contiguous validation blocks partitioning 0..length-1 into k folds."""

    length: int
    blocks: tuple[tuple[int, int], ...]

    @property
    def k(self) -> int:
        return len(self.blocks)

    def validation_block(self, fold: int) -> tuple[int, int]:
        return self.blocks[fold]

    def training_segments(self, fold: int) -> tuple[tuple[int, int], ...]:
        start, end = self.blocks[fold]
        segments = []
        if start > 0:
            segments.append((0, start))
        if end < self.length:
            segments.append((end, self.length))
        return tuple(segments)


def make_fold_plan(length: int, k: int) -> FoldPlan:
    """Split 0..length-1 into k contiguous blocks whose sizes differ by at most one."""
    if k < 2:
        raise ValueError(f"need k >= 2 folds, got {k}")
    if k > length:
        raise ValueError(f"cannot cut {length} steps into {k} folds")
    blocks = tuple(
        (b * length // k, (b + 1) * length // k)
        for b in range(k)
    )
    return FoldPlan(length, blocks)


def extract_training(series: MultivariateSeries, plan: FoldPlan, fold: int) -> MultivariateSeries:
    """The series with the fold's validation block removed, remaining rows in order."""
    if plan.length != series.n_steps:
        raise ValueError(f"fold plan covers {plan.length} steps but series has {series.n_steps}")
    if not 0 <= fold < plan.k:
        raise ValueError(f"fold index {fold} outside 0..{plan.k - 1}")
    parts = [series.values[s:e] for s, e in plan.training_segments(fold)]
    return MultivariateSeries(np.vstack(parts), series.names)


def _sign(x: float) -> int:
    if abs(x) < SIGN_TOLERANCE:
        return 0
    return 1 if x > 0 else -1


def directional_consistency(r0: float, fold_estimates: tuple[float, ...] | list[float]) -> float:
    """Fraction of fold estimates whose sign matches the full-run estimate."""
    if len(fold_estimates) < 1:
        raise ValueError("need at least one fold estimate")
    target = _sign(r0)
    matches = sum(1 for value in fold_estimates if _sign(value) == target)
    return matches / len(fold_estimates)


def relative_variability(
    r0: float, fold_estimates: tuple[float, ...] | list[float], epsilon: float = 1e-8
) -> float:
    """Population spread of the fold estimates relative to the full-run magnitude."""
    k = len(fold_estimates)
    if k < 2:
        raise ValueError(f"need at least two fold estimates, got {k}")
    mean = sum(fold_estimates) / k
    variance = sum((value - mean) ** 2 for value in fold_estimates) / k
    return math.sqrt(variance) / (abs(r0) + epsilon)


@dataclass(frozen=True)
class EdgeStability:
    """Per-edge record: full-run weight, fold estimates, scores, verdict."""

    cause: int
    effect: int
    lag: int
    r0: float
    folds: tuple[float, ...]
    c: float
    v: float
    kept: bool


@dataclass(frozen=True)
class StabilityReport:
    config: VcdfConfig
    edges: tuple[EdgeStability, ...]


def run_vcdf(
    series: MultivariateSeries, base: BaseDiscoverer, config: VcdfConfig | None = None
) -> tuple[WindowGraph, StabilityReport]:
    """Filter the base method's full-run graph by cross-fold stability.

    Edges absent from a fold's graph contribute an estimate of exactly 0 for
    that fold, which both breaks sign agreement and inflates the spread; this
    makes disappearance across folds the strongest removal signal.
    """
    config = config if config is not None else VcdfConfig()
    full_graph = base.discover(series)
    plan = make_fold_plan(series.n_steps, config.k)
    fold_weights = []
    for fold in range(config.k):
        training = extract_training(series, plan, fold)
        try:
            graph = base.discover(training)
        except ValueError as exc:
            raise ValueError(f"base discovery failed on fold {fold}: {exc}") from exc
        fold_weights.append(graph.weight_map())

    records = []
    kept_edges = []
    for edge in full_graph.sorted_edges():
        estimates = tuple(weights.get(edge.key, 0.0) for weights in fold_weights)
        c = directional_consistency(edge.weight, estimates)
        v = relative_variability(edge.weight, estimates, config.epsilon)
        kept = c >= config.tau_c and v <= config.tau_v
        records.append(EdgeStability(edge.cause, edge.effect, edge.lag, edge.weight, estimates, c, v, kept))
        if kept:
            if config.w == 0.0:
                weight = edge.weight
            else:
                weight = (1.0 - config.w) * edge.weight + config.w * (sum(estimates) / len(estimates))
            if weight != 0.0:
                kept_edges.append(Edge(edge.cause, edge.effect, edge.lag, weight))
    filtered = WindowGraph(full_graph.n, full_graph.max_lag, frozenset(kept_edges))
    return filtered, StabilityReport(config, tuple(records))


def stability_report_to_json(report: StabilityReport) -> str:
    """Deterministic JSON: config echo plus per-edge records sorted by edge key."""
    cfg = report.config
    doc = {
        "config": {"k": cfg.k, "tau_c": cfg.tau_c, "tau_v": cfg.tau_v, "w": cfg.w, "epsilon": cfg.epsilon},
        "edges": [
            {
                "cause": e.cause,
                "effect": e.effect,
                "lag": e.lag,
                "r0": e.r0,
                "folds": list(e.folds),
                "c": e.c,
                "v": e.v,
                "kept": e.kept,
            }
            for e in sorted(report.edges, key=lambda e: (e.cause, e.effect, e.lag))
        ],
    }
    return json.dumps(doc)


def stability_report_from_json(text: str) -> StabilityReport:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed stability report JSON: {exc}") from None
    if not isinstance(doc, dict) or "config" not in doc or "edges" not in doc:
        raise ValueError("stability report JSON must carry 'config' and 'edges'")
    cfg = doc["config"]
    if not isinstance(cfg, dict):
        raise ValueError("stability report field 'config' must be an object")
    try:
        config = VcdfConfig(
            k=cfg["k"], tau_c=cfg["tau_c"], tau_v=cfg["tau_v"], w=cfg["w"], epsilon=cfg["epsilon"]
        )
    except KeyError as exc:
        raise ValueError(f"stability report config is missing {exc}") from None
    edges = []
    for idx, item in enumerate(doc["edges"]):
        try:
            edges.append(
                EdgeStability(
                    cause=int(item["cause"]),
                    effect=int(item["effect"]),
                    lag=int(item["lag"]),
                    r0=float(item["r0"]),
                    folds=tuple(float(v) for v in item["folds"]),
                    c=float(item["c"]),
                    v=float(item["v"]),
                    kept=bool(item["kept"]),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"stability report edge {idx} is malformed: {exc}") from None
    return StabilityReport(config, tuple(edges))
