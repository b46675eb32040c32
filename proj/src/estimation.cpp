#include "tollkit/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tollkit {

EstimatorState EstimatorState::init(int arc_count, double lambda, int horizon,
                                    double C_theta_bound, double c_beta,
                                    double theta_lo0, double theta_hi0) {
    if (lambda <= 0.0) throw std::invalid_argument("lambda must be positive");
    EstimatorState s;
    s.lambda.assign(arc_count, lambda);
    s.V = s.lambda;
    s.Q.assign(arc_count, 0.0);
    s.theta_hat.assign(arc_count, 0.0);
    s.gamma.assign(arc_count, 0.0);
    s.theta_lo.assign(arc_count, theta_lo0);
    s.theta_hi.assign(arc_count, theta_hi0);
    s.horizon = horizon;
    s.C_theta_bound = C_theta_bound;
    s.c_beta = c_beta;
    s.beta_est = c_beta;
    return s;
}

void ls_update(EstimatorState& state, const Vec& w,
               const std::vector<Vec>& latencies) {
    const size_t n = state.V.size();
    if (w.size() != n || latencies.size() != n)
        throw std::invalid_argument("ls_update: dimension mismatch");
    for (size_t a = 0; a < n; ++a) {
        const double count = std::floor(w[a]);
        if (static_cast<size_t>(count) != latencies[a].size())
            throw std::invalid_argument(
                "ls_update: observation count does not match floor(w_a)");
        double sum = 0.0;
        for (double l : latencies[a]) sum += l;
        state.V[a] += count * w[a] * w[a];
        state.Q[a] += w[a] * sum;
        state.theta_hat[a] = state.Q[a] / state.V[a];
        state.gamma[a] =
            std::sqrt(state.lambda[a]) * state.C_theta_bound +
            std::sqrt(2.0 * std::log(static_cast<double>(state.horizon)) +
                      2.0 * std::log(state.V[a] / state.lambda[a]));
        const double radius = state.gamma[a] / std::sqrt(state.V[a]);
        state.theta_lo[a] = std::max(state.theta_hat[a] - radius, 0.0);
        state.theta_hi[a] = state.theta_hat[a] + radius;
    }
}

bool good_event_holds(const EstimatorState& state, const Vec& theta_star) {
    for (size_t a = 0; a < state.V.size(); ++a) {
        const double radius = state.gamma[a] / std::sqrt(state.V[a]);
        if (std::abs(state.theta_hat[a] - theta_star[a]) > radius) return false;
    }
    return true;
}

namespace {

// Cost-to-go along the unique downstream routes is a plain cost sum; no
// entropy enters because there is nothing to choose past the beta node.
Vec route_cost_sums(const Vec& theta, const Vec& w, const Vec& p,
                    const BetaNodeInfo& beta_node) {
    Vec z(beta_node.unique_routes.size(), 0.0);
    for (size_t k = 0; k < beta_node.unique_routes.size(); ++k)
        for (int a : beta_node.unique_routes[k])
            z[k] += theta[a] * w[a] + p[a];
    return z;
}

}  // namespace

int beta_argmin_arc(const Vec& theta, const Vec& w, const Vec& p,
                    const BetaNodeInfo& beta_node, const Network& net) {
    (void)net;
    Vec z = route_cost_sums(theta, w, p, beta_node);
    int best = 0;
    for (size_t k = 1; k < z.size(); ++k)
        if (z[k] < z[best]) best = static_cast<int>(k);
    return best;
}

double beta_g(double beta, const Vec& theta_lo, const Vec& theta_hi,
              const Vec& w, const Vec& p, const BetaNodeInfo& beta_node,
              const Network& net, int a_star_pos) {
    (void)net;
    if (beta <= 0.0) throw std::invalid_argument("beta_g: beta must be positive");
    double total_flow = 0.0;
    for (int a : beta_node.outgoing_arcs) total_flow += w[a];
    if (total_flow <= 0.0)
        throw std::invalid_argument("beta_g: zero total flow at beta node");
    const double kappa = w[beta_node.outgoing_arcs[a_star_pos]] / total_flow;

    Vec z_lo = route_cost_sums(theta_lo, w, p, beta_node);
    Vec z_hi = route_cost_sums(theta_hi, w, p, beta_node);
    double m = -std::numeric_limits<double>::infinity();
    for (double z : z_hi) m = std::max(m, -beta * z);
    double s = 0.0;
    for (double z : z_hi) s += std::exp(-beta * z - m);
    return -beta * z_lo[a_star_pos] - (m + std::log(s)) - std::log(kappa);
}

double beta_solve(EstimatorState& state, const Vec& w, const Vec& p,
                  const BetaNodeInfo& beta_node, const Network& net) {
    // a* is the cheapest arc under the band midpoint; this keeps beta_g
    // nondecreasing in beta whenever theta_star lies in the band
    Vec theta_mid(state.theta_lo.size());
    for (size_t a = 0; a < theta_mid.size(); ++a)
        theta_mid[a] = 0.5 * (state.theta_lo[a] + state.theta_hi[a]);
    const int a_star = beta_argmin_arc(theta_mid, w, p, beta_node, net);
    auto g = [&](double beta) {
        return beta_g(beta, state.theta_lo, state.theta_hi, w, p, beta_node,
                      net, a_star);
    };
    const double beta_lo = state.c_beta / 10.0;
    if (g(beta_lo) > 0.0) {
        state.beta_est = state.c_beta;
        return state.beta_est;
    }
    constexpr double kCap = 1e6;
    double lo = beta_lo, hi = 1.0;
    while (g(hi) <= 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > kCap) {
            state.beta_bracket_warning = true;
            state.beta_est = std::max(state.c_beta, kCap);
            return state.beta_est;
        }
    }
    while (hi - lo > 1e-10) {
        double mid = 0.5 * (lo + hi);
        (g(mid) <= 0.0 ? lo : hi) = mid;
    }
    state.beta_est = std::max(state.c_beta, 0.5 * (lo + hi));
    return state.beta_est;
}

}  // namespace tollkit
