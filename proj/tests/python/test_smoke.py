import math

import pytest

import _tollkit as tk


def two_arc(g=2.0):
    return tk.Network(
        nodes=["o", "d"],
        arcs=[("a1", "o", "d"), ("a2", "o", "d")],
        origin="o",
        destination="d",
        g_o=g,
    )


def test_validate_and_structure():
    net = two_arc()
    assert tk.validate(net).ok()
    assert net.arc_count == 2
    assert tk.topological_order(net) == [0, 1]
    heights = tk.arc_height(net)
    assert heights.height == [1, 1]
    info = tk.find_beta_node(net)
    assert info.node == net.origin
    assert info.b_count == 2


def test_validate_rejects_cycle():
    net = tk.Network(
        nodes=["o", "d"],
        arcs=[("a1", "o", "d"), ("a2", "d", "o")],
        origin="o",
        destination="d",
        g_o=1.0,
    )
    report = tk.validate(net)
    assert not report.ok()
    assert any("cycle" in v for v in report.violations)


def test_equilibrium_and_toll():
    net = two_arc()
    w = tk.mte_solve(net, [1.0, 1.0], 1.0, [0.0, 0.0])
    assert w[0] == pytest.approx(1.0, abs=1e-9)
    assert tk.conservation_residual(net, w) < 1e-8

    p = tk.optimal_toll(net, [1.0, 2.0], 0.5)
    w_toll = tk.mte_solve(net, [1.0, 2.0], 0.5, p)
    w_opt = tk.social_optimum(net, [1.0, 2.0], 0.5)
    assert w_toll[0] == pytest.approx(w_opt[0], abs=1e-6)
    assert tk.entropy_term(net, [1.0, 1.0]) == pytest.approx(
        -2.0 * math.log(2.0), abs=1e-12
    )
    L = tk.perturbed_latency(net, [1.0, 1.0], [1.0, 1.0], 1.0)
    assert L == pytest.approx(2.0 - 2.0 * math.log(2.0), abs=1e-12)


def test_short_learning_run():
    net = two_arc(g=20.0)
    cfg = tk.RunConfig()
    cfg.theta_star = [1.0, 2.0]
    cfg.beta_star = 0.5
    cfg.T = 20
    cfg.seed = 4
    trace = tk.run(net, cfg)
    assert not trace.aborted
    assert len(trace.iters) == 20
    assert trace.iters[-1].cum_regret >= -1e-6
    assert trace.iters[-1].beta_t >= cfg.c_beta - 1e-12

    again = tk.run(net, cfg)
    assert again.iters[-1].cum_regret == trace.iters[-1].cum_regret


def test_parse_experiment():
    text = """
    {
      "network": {
        "nodes": ["o", "d"],
        "arcs": [["a1", "o", "d"], ["a2", "o", "d"]],
        "origin": "o", "destination": "d", "g_o": 2.0
      },
      "truth": {"theta_star": [1.0, 2.0], "beta_star": 1.0},
      "algorithm": {"T": 3, "seed": 1}
    }
    """
    exp = tk.parse_experiment(text)
    assert exp.network.arc_count == 2
    assert exp.run_config.T == 3
    with pytest.raises(tk.ConfigError):
        tk.parse_experiment("{}")
