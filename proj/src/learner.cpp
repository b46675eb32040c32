#include "tollkit/learner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tollkit {

double RunTrace::good_event_frequency() const {
    if (iters.empty()) return 1.0;
    int good = 0;
    for (const auto& it : iters) good += it.good_event ? 1 : 0;
    return static_cast<double>(good) / static_cast<double>(iters.size());
}

ObservationBatch sample_observations(const Vec& w, const Vec& theta_star,
                                     std::mt19937_64& rng, bool no_noise) {
    ObservationBatch batch;
    batch.samples.resize(w.size());
    std::normal_distribution<double> noise(0.0, 1.0);
    for (size_t a = 0; a < w.size(); ++a) {
        if (w[a] < 1.0) batch.flow_below_one = true;
        const int count = static_cast<int>(std::floor(std::max(w[a], 0.0)));
        const double mean = theta_star[a] * w[a];
        batch.samples[a].reserve(count);
        for (int j = 0; j < count; ++j)
            batch.samples[a].push_back(mean + (no_noise ? 0.0 : noise(rng)));
    }
    return batch;
}

RunTrace run(const Network& net, const RunConfig& config) {
    if (config.T < 1) throw std::invalid_argument("run: T must be >= 1");
    const int n = net.arc_count();
    if (static_cast<int>(config.theta_star.size()) != n)
        throw std::invalid_argument("run: theta_star dimension mismatch");
    if (config.beta_star <= config.c_beta)
        throw std::invalid_argument("run: beta_star must exceed c_beta");

    RunTrace trace;
    const auto beta_node = find_beta_node(net);
    std::mt19937_64 rng(config.seed);

    // optimal-toll benchmark under the truth
    Vec w_star = social_optimum(net, config.theta_star, config.beta_star,
                                config.solver);
    trace.L_star =
        perturbed_latency(net, w_star, config.theta_star, config.beta_star);
    trace.p_star = optimal_toll(net, config.theta_star, config.beta_star,
                                config.solver);

    EstimatorState state = EstimatorState::init(
        n, config.lambda, config.T, config.C_theta_bound, config.c_beta,
        config.theta_lo0, config.theta_hi0);
    if (config.oracle_mode) {
        state.theta_lo = config.theta_star;
        state.theta_hi = config.theta_star;
        state.theta_hat = config.theta_star;
        state.beta_est = config.beta_star;
    }

    Vec p_warm, w_warm;
    double cum_regret = 0.0;
    for (int t = 1; t <= config.T; ++t) {
        IterationRecord rec;
        try {
            // most-recent-available estimates drive the toll
            rec.toll = optimal_toll(net, state.theta_lo, state.beta_est,
                                    config.solver, p_warm);
            p_warm = rec.toll;
            rec.flow = mte_solve(net, config.theta_star, config.beta_star,
                                 rec.toll, config.solver, w_warm);
            w_warm = rec.flow;
        } catch (const SolverError& e) {
            trace.aborted = true;
            trace.abort_reason = e.what();
            return trace;
        }

        auto obs = sample_observations(rec.flow, config.theta_star, rng,
                                       config.no_noise);
        rec.flow_below_one = obs.flow_below_one;
        ls_update(state, rec.flow, obs.samples);
        rec.good_event = good_event_holds(state, config.theta_star);
        if (config.oracle_mode) {
            state.theta_lo = config.theta_star;
            state.theta_hi = config.theta_star;
            state.theta_hat = config.theta_star;
            state.beta_est = config.beta_star;
        } else {
            try {
                beta_solve(state, rec.flow, rec.toll, beta_node, net);
            } catch (const std::exception& e) {
                trace.aborted = true;
                trace.abort_reason = e.what();
                return trace;
            }
        }

        rec.theta_hat = state.theta_hat;
        rec.theta_lo = state.theta_lo;
        rec.theta_hi = state.theta_hi;
        rec.beta_t = state.beta_est;
        rec.stage_cost = perturbed_latency(net, rec.flow, config.theta_star,
                                           config.beta_star);
        double stage = rec.stage_cost - trace.L_star;
        if (stage < -1e-6) rec.negative_regret_flag = true;
        rec.stage_regret = std::max(stage, -1e-6);
        cum_regret += rec.stage_regret;
        rec.cum_regret = cum_regret;
        double err2 = 0.0;
        for (int a = 0; a < n; ++a) {
            double d = state.theta_hat[a] - config.theta_star[a];
            err2 += d * d;
        }
        rec.theta_err_l2 = std::sqrt(err2);
        rec.beta_err_abs = std::abs(state.beta_est - config.beta_star);
        trace.iters.push_back(std::move(rec));
    }
    return trace;
}

RegretDecomposition regret_diagnostics(const RunTrace& trace,
                                       const Network& net,
                                       const RunConfig& config) {
    RegretDecomposition d;
    double r1 = 0.0, r2 = 0.0;
    for (const auto& it : trace.iters) {
        for (size_t a = 0; a < it.flow.size(); ++a)
            r1 += (config.theta_star[a] - it.theta_lo[a]) * it.flow[a] *
                  it.flow[a];
        r2 += (1.0 / config.beta_star - 1.0 / it.beta_t) *
              entropy_term(net, it.flow);
        d.r1_cumulative.push_back(r1);
        d.r2_cumulative.push_back(r2);
        d.r3_residual_cumulative.push_back(it.cum_regret - r1 - r2);
    }
    d.r1_total = r1;
    d.r2_total = r2;
    const double R = trace.iters.empty() ? 0.0 : trace.iters.back().cum_regret;
    d.r3_residual_total = R - r1 - r2;

    // direct recomputation of the third summand of the bound surrogate
    double r3 = 0.0;
    Vec warm;
    for (const auto& it : trace.iters) {
        Vec w_est = mte_solve(net, it.theta_lo, it.beta_t, it.toll,
                              config.solver, warm);
        warm = w_est;
        r3 += perturbed_latency(net, it.flow, it.theta_lo, it.beta_t) -
              perturbed_latency(net, w_est, it.theta_lo, it.beta_t);
    }
    d.r3_direct_total = r3;
    d.surrogate_bound_holds = R <= r1 + r2 + r3 + 1e-6 * (1.0 + std::abs(R));
    return d;
}

BoundEnvelope bound_envelope(const RunTrace& trace, const Network& net,
                             const BetaNodeInfo& beta_node) {
    BoundEnvelope env;
    const double g = net.inflow();
    const double A = static_cast<double>(net.arc_count());
    const double I = static_cast<double>(net.node_count());
    const double structure =
        std::max(I * std::log(A / I), static_cast<double>(beta_node.b_count));
    Vec fitted;
    for (size_t t = 10; t <= trace.iters.size(); ++t) {
        const double td = static_cast<double>(t);
        const double denom = g * g * std::pow(std::log(g), 2) * A *
                             std::sqrt(td) * std::log(td * g) * structure;
        fitted.push_back(trace.iters[t - 1].cum_regret / denom);
    }
    if (fitted.empty()) return env;
    env.C = *std::max_element(fitted.begin(), fitted.end());
    const size_t tail_start = fitted.size() / 2;
    double lo = fitted[tail_start], hi = fitted[tail_start];
    for (size_t i = tail_start; i < fitted.size(); ++i) {
        lo = std::min(lo, fitted[i]);
        hi = std::max(hi, fitted[i]);
    }
    env.tail_variation = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    return env;
}

double loglog_slope(const Vec& y, int t_min, int t_max) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (int t = t_min; t <= t_max && t <= static_cast<int>(y.size()); ++t) {
        if (y[t - 1] <= 0.0) continue;
        const double x = std::log(static_cast<double>(t));
        const double v = std::log(y[t - 1]);
        sx += x;
        sy += v;
        sxx += x * x;
        sxy += x * v;
        ++n;
    }
    if (n < 2) return 0.0;
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace tollkit
