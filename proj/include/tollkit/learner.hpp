#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "tollkit/estimation.hpp"

namespace tollkit {

struct RunConfig {
    Vec theta_star;
    double beta_star = 0.0;
    int T = 0;
    double lambda = 0.01;
    double c_beta = 0.05;
    double C_theta_bound = 10.0;
    std::uint64_t seed = 0;
    SolverOptions solver;
    double theta_lo0 = 0.01;
    double theta_hi0 = 10.0;  // defaults to C_theta_bound in the config loader
    bool oracle_mode = false;  // pin estimates to the truth
    bool no_noise = false;     // observations without noise
};

struct ObservationBatch {
    std::vector<Vec> samples;  // floor(w_a) latency draws per arc
    bool flow_below_one = false;
};

struct IterationRecord {
    Vec toll;
    Vec flow;
    Vec theta_hat;
    Vec theta_lo;
    Vec theta_hi;
    double beta_t = 0.0;
    double stage_cost = 0.0;
    double stage_regret = 0.0;
    double cum_regret = 0.0;
    double theta_err_l2 = 0.0;
    double beta_err_abs = 0.0;
    bool flow_below_one = false;
    bool negative_regret_flag = false;
    bool good_event = false;  // confidence bands after this update contain theta_star
};

struct RunTrace {
    std::vector<IterationRecord> iters;
    double L_star = 0.0;
    Vec p_star;
    bool aborted = false;
    std::string abort_reason;
    double good_event_frequency() const;
};

// l_{a,j} = theta*_a w_a + eps, eps iid standard normal; floor(w_a) samples
// per arc. Flows below one are flagged, not rejected.
ObservationBatch sample_observations(const Vec& w, const Vec& theta_star,
                                     std::mt19937_64& rng,
                                     bool no_noise = false);

// Runs the simultaneous tolling and parameter estimation loop for config.T
// iterations. Any inner solver failure aborts with the partial trace
// attached. Deterministic given the seed.
RunTrace run(const Network& net, const RunConfig& config);

struct RegretDecomposition {
    Vec r1_cumulative;           // sum_t sum_a (theta* - theta_lo) w^2
    Vec r2_cumulative;           // sum_t (1/beta* - 1/beta_t) chi(w)
    Vec r3_residual_cumulative;  // R - R1 - R2
    double r1_total = 0.0;
    double r2_total = 0.0;
    double r3_residual_total = 0.0;
    double r3_direct_total = 0.0;  // recomputed surrogate; R <= R1+R2+R3_direct
    bool surrogate_bound_holds = false;
};

RegretDecomposition regret_diagnostics(const RunTrace& trace,
                                       const Network& net,
                                       const RunConfig& config);

// Smallest C with R^t <= C * g^2 ln^2(g) |A| sqrt(t) ln(t g) max{|I| ln(|A|/|I|), B}
// for all t >= 10, plus the tail max/min ratio of the per-t fitted constants.
struct BoundEnvelope {
    double C = 0.0;
    double tail_variation = 0.0;
};

BoundEnvelope bound_envelope(const RunTrace& trace, const Network& net,
                             const BetaNodeInfo& beta_node);

// Least-squares slope of ln(y) vs ln(t) over t in [t_min, t_max] (1-based),
// skipping non-positive y.
double loglog_slope(const Vec& y, int t_min, int t_max);

}  // namespace tollkit
