#pragma once

#include "tollkit/equilibrium.hpp"
#include "tollkit/network.hpp"

namespace tollkit {

// Per-arc regularized least-squares accumulators plus the current entropy
// parameter estimate. Confidence bands are centered on the current estimate
// with radius gamma/sqrt(V) computed from the matching accumulator state.
struct EstimatorState {
    Vec lambda;     // regularizers, lambda_a > 0
    Vec V;          // lambda_a + sum_k floor(w^k) (w^k)^2
    Vec Q;          // sum_k w^k * sum_j l_{a,j}^k
    Vec theta_hat;  // Q / V
    Vec gamma;      // confidence radius coefficient
    Vec theta_lo;   // max{theta_hat - gamma/sqrt(V), 0}
    Vec theta_hi;   // theta_hat + gamma/sqrt(V)
    int horizon = 0;
    double C_theta_bound = 10.0;
    double beta_est = 0.0;
    double c_beta = 0.0;
    bool beta_bracket_warning = false;  // set when beta_solve hit its cap

    static EstimatorState init(int arc_count, double lambda, int horizon,
                               double C_theta_bound, double c_beta,
                               double theta_lo0, double theta_hi0);
};

// One least-squares step: per arc, V += floor(w) w^2, Q += w * sum(l),
// theta_hat = Q/V, gamma = sqrt(lambda) C_theta + sqrt(2 ln T + 2 ln(V/lambda)),
// bounds re-centered with the clamp at zero. Observation counts must match
// floor(w_a).
void ls_update(EstimatorState& state, const Vec& w,
               const std::vector<Vec>& latencies);

// Test utility: true iff theta_star lies inside every arc's confidence band.
bool good_event_holds(const EstimatorState& state, const Vec& theta_star);

// g(beta) = -beta z_{a*}(theta_lo) - ln sum exp(-beta z(theta_hi)) - ln kappa,
// where z is the plain route-cost sum along each unique downstream route of
// the beta node and kappa is a*'s realized flow share. Strictly increasing in
// beta with slope at least (observed z gap)/g_o.
double beta_g(double beta, const Vec& theta_lo, const Vec& theta_hi,
              const Vec& w, const Vec& p, const BetaNodeInfo& beta_node,
              const Network& net, int a_star_pos);

// Index into beta_node.outgoing_arcs of the arc minimizing the route-cost sum
// under theta (smallest arc id on ties).
int beta_argmin_arc(const Vec& theta, const Vec& w, const Vec& p,
                    const BetaNodeInfo& beta_node, const Network& net);

// max{c_beta, root of beta_g} via bracketed bisection; sets
// state.beta_bracket_warning when no sign change exists below the cap.
double beta_solve(EstimatorState& state, const Vec& w, const Vec& p,
                  const BetaNodeInfo& beta_node, const Network& net);

}  // namespace tollkit
