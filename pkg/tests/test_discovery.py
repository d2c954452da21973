"""Recovery oracles for the VAR fit, the instantaneous ordering, and both discoverers."""

import numpy as np
import pytest

from vcdf import (
    DiscovererConfig,
    Edge,
    MultivariateSeries,
    ScmSpec,
    direct_lingam_order,
    fit_var,
    graph_to_json,
    lagreg_discover,
    make_discoverer,
    simulate,
    varlingam_discover,
)

SQRT3 = float(np.sqrt(3.0))


def _ar_spec(seed):
    """Univariate x_t = 0.8 x_{t-1} + e_t with uniform noise."""
    return ScmSpec(n=1, max_lag=1, lag_edges=(Edge(0, 0, 1, 0.8),), inst_edges=(), seed=seed)


def _single_edge_spec(seed):
    """x0 -> x1 at lag 1 with weight 0.8."""
    return ScmSpec(n=2, max_lag=1, lag_edges=(Edge(0, 1, 1, 0.8),), inst_edges=(), seed=seed)


def _noise_spec(seed, n=3):
    return ScmSpec(n=n, max_lag=1, lag_edges=(), inst_edges=(), seed=seed)


def _uniform(rng, size):
    return rng.uniform(-SQRT3, SQRT3, size=size)


# ---------------------------------------------------------------------------
# config
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("kwargs, fragment", [
    ({"max_lag": 0}, "max_lag"),
    ({"prune_threshold": -0.1}, "prune_threshold"),
    ({"prune_threshold": float("inf")}, "prune_threshold"),
    ({"alpha": 1.5}, "alpha"),
])
def test_config_validation(kwargs, fragment):
    with pytest.raises(ValueError, match=fragment):
        DiscovererConfig(**kwargs)


# ---------------------------------------------------------------------------
# fit_var
# ---------------------------------------------------------------------------

def test_fit_var_recovers_ar_coefficient():
    hits = 0
    for seed in range(10):
        fit = fit_var(simulate(_ar_spec(seed), 5000).series, 1)
        hits += abs(fit.coefs[0][0, 0] - 0.8) <= 0.03
    assert hits >= 9


def test_fit_var_null_coefficients_stay_small():
    hits = 0
    for seed in range(10):
        fit = fit_var(simulate(_noise_spec(seed), 5000).series, 2)
        hits += bool(np.all(np.abs(fit.coefs) <= 0.1))
    assert hits >= 9


def test_fit_var_shapes():
    fit = fit_var(simulate(_noise_spec(0), 400).series, 2)
    assert fit.coefs.shape == (2, 3, 3)
    assert fit.residuals.shape == (398, 3)
    assert fit.intercept.shape == (3,)


def test_fit_var_rejects_constant_column():
    values = np.column_stack([np.ones(200), np.linspace(0, 1, 200) ** 2])
    series = MultivariateSeries(values, ("const", "b"))
    with pytest.raises(ValueError, match="rank-deficient"):
        fit_var(series, 1)


def test_fit_var_rejects_short_series_and_bad_order():
    series = simulate(_noise_spec(1), 20).series
    with pytest.raises(ValueError, match="steps to fit"):
        fit_var(series, 6)
    with pytest.raises(ValueError, match="lag order"):
        fit_var(series, 0)


def test_fit_var_residuals_are_orthogonal_to_regressors():
    series = simulate(_single_edge_spec(4), 1500).series
    p = 2
    fit = fit_var(series, p)
    values = series.values
    T = values.shape[0]
    columns = [np.ones(T - p)]
    for lag in range(1, p + 1):
        for j in range(values.shape[1]):
            columns.append(values[p - lag:T - lag, j])
    for col in columns:
        for r in range(fit.residuals.shape[1]):
            res = fit.residuals[:, r]
            denom = float(np.linalg.norm(col) * np.linalg.norm(res))
            assert abs(float(col @ res)) / denom < 1e-6


# ---------------------------------------------------------------------------
# direct_lingam_order
# ---------------------------------------------------------------------------

def test_two_variable_ordering_and_effect():
    hits = 0
    for seed in range(10):
        rng = np.random.default_rng(seed)
        e = _uniform(rng, (5000, 2))
        x0 = e[:, 0]
        x1 = 0.8 * x0 + e[:, 1]
        order, b0 = direct_lingam_order(np.column_stack([x0, x1]))
        hits += order.index(0) < order.index(1) and abs(b0[1, 0] - 0.8) <= 0.05
    assert hits >= 9


def test_three_chain_ordering():
    hits = 0
    for seed in range(10):
        rng = np.random.default_rng(seed)
        e = _uniform(rng, (5000, 3))
        x0 = e[:, 0]
        x1 = 0.7 * x0 + e[:, 1]
        x2 = 0.6 * x1 + e[:, 2]
        order, _ = direct_lingam_order(np.column_stack([x0, x1, x2]))
        hits += order.index(0) < order.index(1) < order.index(2)
    assert hits >= 9


def test_independent_columns_give_near_zero_b0():
    hits = 0
    for seed in range(10):
        rng = np.random.default_rng(seed)
        _, b0 = direct_lingam_order(_uniform(rng, (5000, 3)))
        hits += bool(np.all(np.abs(b0) <= 0.05))
    assert hits >= 9


def test_ordering_rejects_bad_residual_matrices():
    with pytest.raises(ValueError, match="2-dimensional"):
        direct_lingam_order(np.zeros(100))
    with pytest.raises(ValueError, match="finite"):
        direct_lingam_order(np.full((100, 2), np.nan))
    with pytest.raises(ValueError, match="residual rows"):
        direct_lingam_order(np.zeros((15, 2)))
    constant = np.column_stack([np.ones(100), np.arange(100.0)])
    with pytest.raises(ValueError, match="degenerate"):
        direct_lingam_order(constant)


# ---------------------------------------------------------------------------
# varlingam_discover
# ---------------------------------------------------------------------------

def test_varlingam_recovers_the_single_edge_exactly():
    config = DiscovererConfig(max_lag=3, prune_threshold=0.1)
    hits = 0
    for seed in range(10):
        graph = varlingam_discover(simulate(_single_edge_spec(seed), 2000).series, config)
        keys = {e.key for e in graph.edges}
        weights_ok = all(abs(e.weight - 0.8) <= 0.1 for e in graph.edges if e.key == (0, 1, 1))
        hits += keys == {(0, 1, 1)} and weights_ok
    assert hits >= 9


def test_varlingam_null_gives_empty_graph():
    config = DiscovererConfig(max_lag=3, prune_threshold=0.15)
    hits = 0
    for seed in range(10):
        graph = varlingam_discover(simulate(_noise_spec(seed + 100), 2000).series, config)
        hits += not graph.edges
    assert hits >= 9


def test_varlingam_recovers_both_layers():
    """Instantaneous 0 -> 1 (0.5) and lagged 1 -> 0 (0.6) at the same time."""
    spec = ScmSpec(n=2, max_lag=1, lag_edges=(Edge(1, 0, 1, 0.6),),
                   inst_edges=(Edge(0, 1, 0, 0.5),), seed=3)
    config = DiscovererConfig(max_lag=2, prune_threshold=0.1)
    graph = varlingam_discover(simulate(spec, 2000).series, config)
    weights = {e.key: e.weight for e in graph.edges}
    assert set(weights) == {(0, 1, 0), (1, 0, 1)}
    assert abs(weights[(0, 1, 0)] - 0.5) < 0.08
    assert abs(weights[(1, 0, 1)] - 0.6) < 0.08


def test_varlingam_never_emits_subthreshold_weights():
    config = DiscovererConfig(max_lag=3, prune_threshold=0.07)
    for seed in (0, 1):
        graph = varlingam_discover(simulate(_single_edge_spec(seed), 1000).series, config)
        assert all(abs(e.weight) >= 0.07 for e in graph.edges)


def test_varlingam_is_deterministic():
    series = simulate(_single_edge_spec(8), 1200).series
    config = DiscovererConfig()
    a = varlingam_discover(series, config)
    b = varlingam_discover(series, config)
    assert graph_to_json(a) == graph_to_json(b)


def test_varlingam_is_label_equivariant():
    series = simulate(_single_edge_spec(5), 2000).series
    swapped = MultivariateSeries(series.values[:, [1, 0]], ("x1", "x0"))
    config = DiscovererConfig(max_lag=2, prune_threshold=0.1)
    direct = varlingam_discover(series, config)
    via_swap = varlingam_discover(swapped, config)
    # swapping both variable columns relabels 0 <-> 1 in the output
    remapped = {(1 - e.cause, 1 - e.effect, e.lag) for e in via_swap.edges}
    assert remapped == {e.key for e in direct.edges}


# ---------------------------------------------------------------------------
# lagreg_discover
# ---------------------------------------------------------------------------

def test_lagreg_recovers_the_single_edge():
    config = DiscovererConfig(max_lag=3, prune_threshold=0.05, alpha=0.01)
    hits = 0
    for seed in range(10):
        graph = lagreg_discover(simulate(_single_edge_spec(seed), 2000).series, config)
        hits += {e.key for e in graph.edges} == {(0, 1, 1)}
    assert hits >= 9


def test_lagreg_alpha_zero_returns_an_empty_graph():
    series = simulate(_single_edge_spec(0), 1000).series
    graph = lagreg_discover(series, DiscovererConfig(alpha=0.0))
    assert not graph.edges


def test_lagreg_emits_no_instantaneous_edges():
    spec = ScmSpec(n=3, max_lag=2,
                   lag_edges=(Edge(0, 1, 1, 0.7),),
                   inst_edges=(Edge(1, 2, 0, 0.8),), seed=6)
    graph = lagreg_discover(simulate(spec, 1500).series, DiscovererConfig())
    assert all(e.lag >= 1 for e in graph.edges)


def test_lagreg_is_deterministic():
    series = simulate(_single_edge_spec(2), 800).series
    config = DiscovererConfig()
    assert graph_to_json(lagreg_discover(series, config)) == \
        graph_to_json(lagreg_discover(series, config))


# ---------------------------------------------------------------------------
# discoverer registry
# ---------------------------------------------------------------------------

def test_make_discoverer_round_trip():
    series = simulate(_single_edge_spec(1), 1000).series
    config = DiscovererConfig(max_lag=2)
    for method_id, direct in (("varlingam", varlingam_discover), ("lagreg", lagreg_discover)):
        disc = make_discoverer(method_id, config)
        assert disc.method_id == method_id
        assert disc.discover(series) == direct(series, config)


def test_make_discoverer_rejects_unknown_ids():
    with pytest.raises(ValueError, match="unknown discoverer"):
        make_discoverer("pcmci")
