#include <cmath>

#include "doctest.h"
#include "test_util.hpp"
#include "tollkit/learner.hpp"

using namespace tollkit;
using namespace tollkit::testing;

namespace {
RunConfig small_config(const Vec& theta_star, double beta_star, int T,
                       std::uint64_t seed = 7) {
    RunConfig cfg;
    cfg.theta_star = theta_star;
    cfg.beta_star = beta_star;
    cfg.T = T;
    cfg.seed = seed;
    cfg.theta_hi0 = cfg.C_theta_bound;
    return cfg;
}
}  // namespace

TEST_CASE("observations are noiseless on request") {
    Vec w = {3.7, 1.2, 0.4};
    Vec theta = {2.0, 1.0, 5.0};
    std::mt19937_64 rng(1);
    auto batch = sample_observations(w, theta, rng, true);
    CHECK(batch.samples.size() == 3);
    CHECK(batch.samples[0].size() == 3);  // floor(3.7)
    CHECK(batch.samples[1].size() == 1);
    CHECK(batch.samples[2].size() == 0);  // floor(0.4)
    CHECK(batch.flow_below_one);
    for (double l : batch.samples[0])
        CHECK(l == doctest::Approx(2.0 * 3.7).epsilon(1e-15));
}

TEST_CASE("observation noise is standard normal") {
    Vec w = {1000.0};
    Vec theta = {1.0};
    std::mt19937_64 rng(1234);
    double sum = 0.0, sq = 0.0;
    int n = 0;
    for (int rep = 0; rep < 50; ++rep) {
        auto batch = sample_observations(w, theta, rng, false);
        for (double l : batch.samples[0]) {
            double eps = l - 1000.0;
            sum += eps;
            sq += eps * eps;
            ++n;
        }
    }
    double mean = sum / n;
    double var = sq / n - mean * mean;
    CHECK(std::fabs(mean) < 0.02);
    CHECK(std::fabs(var - 1.0) < 0.02);
}

TEST_CASE("oracle mode has negligible stage regret") {
    Network net = parallel_network(6, 100.0);
    auto cfg = small_config({1.5, 2.5, 3.5, 4.5, 5.5, 6.5}, 0.25, 5);
    cfg.oracle_mode = true;
    cfg.no_noise = true;
    auto trace = run(net, cfg);
    REQUIRE_FALSE(trace.aborted);
    REQUIRE(trace.iters.size() == 5);
    for (const auto& it : trace.iters) {
        CHECK(std::fabs(it.stage_regret) <= 1e-6);
        CHECK(it.beta_t == doctest::Approx(0.25).epsilon(1e-15));
    }
}

TEST_CASE("single-iteration run produces a complete record") {
    Network net = general_network(100.0);
    auto cfg = small_config({0.6, 0.4, 0.4, 0.4, 0.6, 0.6}, 0.25, 1);
    auto trace = run(net, cfg);
    REQUIRE_FALSE(trace.aborted);
    REQUIRE(trace.iters.size() == 1);
    const auto& it = trace.iters[0];
    CHECK(it.toll.size() == 6);
    CHECK(it.flow.size() == 6);
    CHECK(conservation_residual(net, it.flow) < 1e-8);
    CHECK(it.cum_regret == doctest::Approx(it.stage_regret).epsilon(1e-15));
    CHECK(it.beta_t >= cfg.c_beta - 1e-12);
    CHECK(trace.L_star > 0.0);
    CHECK(trace.p_star.size() == 6);
}

TEST_CASE("runs are deterministic given the seed") {
    Network net = parallel_network(6, 100.0);
    auto cfg = small_config({1.5, 2.5, 3.5, 4.5, 5.5, 6.5}, 0.25, 15, 42);
    auto t1 = run(net, cfg);
    auto t2 = run(net, cfg);
    REQUIRE(t1.iters.size() == t2.iters.size());
    for (size_t k = 0; k < t1.iters.size(); ++k) {
        CHECK(t1.iters[k].cum_regret == t2.iters[k].cum_regret);
        CHECK(t1.iters[k].flow == t2.iters[k].flow);
        CHECK(t1.iters[k].toll == t2.iters[k].toll);
        CHECK(t1.iters[k].beta_t == t2.iters[k].beta_t);
    }
    auto cfg2 = cfg;
    cfg2.seed = 43;
    auto t3 = run(net, cfg2);
    CHECK(t3.iters.back().cum_regret != t1.iters.back().cum_regret);
}

TEST_CASE("estimates tighten over a short run") {
    Network net = parallel_network(6, 100.0);
    auto cfg = small_config({1.5, 2.5, 3.5, 4.5, 5.5, 6.5}, 0.25, 60, 3);
    auto trace = run(net, cfg);
    REQUIRE_FALSE(trace.aborted);
    CHECK(trace.iters.back().theta_err_l2 < trace.iters.front().theta_err_l2);
    CHECK(trace.iters.back().beta_err_abs <= 0.25 - cfg.c_beta + 1e-12);
    CHECK(trace.good_event_frequency() > 0.9);
    // beta stays within its proven corridor
    for (const auto& it : trace.iters) {
        CHECK(it.beta_t >= cfg.c_beta - 1e-12);
        if (it.good_event) CHECK(it.beta_t <= 0.25 + 1e-8);
    }
}

TEST_CASE("regret diagnostics in oracle mode are all zero") {
    Network net = parallel_network(6, 100.0);
    auto cfg = small_config({1.5, 2.5, 3.5, 4.5, 5.5, 6.5}, 0.25, 5);
    cfg.oracle_mode = true;
    cfg.no_noise = true;
    auto trace = run(net, cfg);
    auto diag = regret_diagnostics(trace, net, cfg);
    CHECK(std::fabs(diag.r1_total) < 1e-6);
    CHECK(std::fabs(diag.r2_total) < 1e-6);
    CHECK(std::fabs(diag.r3_residual_total) < 1e-5);
    CHECK(diag.surrogate_bound_holds);
}

TEST_CASE("regret decomposition is internally consistent") {
    Network net = general_network(100.0);
    auto cfg = small_config({0.6, 0.4, 0.4, 0.4, 0.6, 0.6}, 0.25, 40, 11);
    auto trace = run(net, cfg);
    REQUIRE_FALSE(trace.aborted);
    auto diag = regret_diagnostics(trace, net, cfg);
    double total = trace.iters.back().cum_regret;
    CHECK(diag.r1_total + diag.r2_total + diag.r3_residual_total ==
          doctest::Approx(total).epsilon(1e-9));
    CHECK(diag.r1_cumulative.size() == trace.iters.size());
    CHECK(diag.surrogate_bound_holds);
}

TEST_CASE("bound envelope is near zero in oracle mode") {
    Network net = parallel_network(6, 100.0);
    auto cfg = small_config({1.5, 2.5, 3.5, 4.5, 5.5, 6.5}, 0.25, 30);
    cfg.oracle_mode = true;
    cfg.no_noise = true;
    auto trace = run(net, cfg);
    auto env = bound_envelope(trace, net, find_beta_node(net));
    CHECK(env.C < 1e-8);
}

TEST_CASE("paper-scale run: surrogate slopes and trace invariants") {
    Network net = parallel_network(6, 100.0);
    auto cfg = small_config({1.5, 2.5, 3.5, 4.5, 5.5, 6.5}, 0.25, 2500, 1);
    auto trace = run(net, cfg);
    REQUIRE_FALSE(trace.aborted);

    // R1 and R2 cumulative grow like sqrt(t) ln(t)
    auto diag = regret_diagnostics(trace, net, cfg);
    double s1 = loglog_slope(diag.r1_cumulative, 250, 2500);
    double s2 = loglog_slope(diag.r2_cumulative, 250, 2500);
    CHECK(s1 >= 0.4);
    CHECK(s1 <= 0.75);
    CHECK(s2 >= 0.4);
    CHECK(s2 <= 0.75);

    // theta estimation error decays like a power law
    Vec theta_err;
    for (const auto& it : trace.iters) theta_err.push_back(it.theta_err_l2);
    double st = loglog_slope(theta_err, 100, 2500);
    CHECK(st >= -0.7);
    CHECK(st <= -0.3);

    // smoothed stage regret is nonincreasing over the final half
    const int W = 50;
    Vec smooth;
    double acc = 0.0;
    for (size_t t = 0; t < trace.iters.size(); ++t) {
        acc += trace.iters[t].stage_regret;
        if (t >= W) acc -= trace.iters[t - W].stage_regret;
        if (t + 1 >= W) smooth.push_back(acc / W);
    }
    for (size_t k = smooth.size() / 2 + 1; k < smooth.size(); ++k)
        CHECK(smooth[k] <= smooth[k - 1] * 1.05 + 1e-12);

    // regret rate collapses across the run
    double rate_T = trace.iters.back().cum_regret / cfg.T;
    double rate_early = trace.iters[cfg.T / 10 - 1].cum_regret / (cfg.T / 10);
    CHECK(rate_T < 0.5 * rate_early);
}

TEST_CASE("loglog_slope recovers a power law") {
    Vec y;
    for (int t = 1; t <= 400; ++t) y.push_back(3.0 * std::pow(t, 0.5));
    CHECK(loglog_slope(y, 40, 400) == doctest::Approx(0.5).epsilon(1e-10));
    Vec lin;
    for (int t = 1; t <= 400; ++t) lin.push_back(2.0 * t);
    CHECK(loglog_slope(lin, 40, 400) == doctest::Approx(1.0).epsilon(1e-10));
}
