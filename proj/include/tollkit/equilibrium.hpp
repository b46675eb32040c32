#pragma once

#include <stdexcept>
#include <vector>

#include "tollkit/network.hpp"

namespace tollkit {

using Vec = std::vector<double>;

struct SolverOptions {
    double tol = 1e-10;
    double damping = 0.5;
    int max_iters = 10000;
};

struct SolverError : std::runtime_error {
    double residual;
    SolverError(const std::string& what, double res)
        : std::runtime_error(what), residual(res) {}
};

// c_a = theta_a * w_a + p_a
Vec arc_costs(const Vec& theta, const Vec& w, const Vec& p);

// Expected cost-to-go per arc: z_a = c_a for arcs into d, otherwise
// z_a = c_a - (1/beta) ln sum_{a' out of j_a} exp(-beta z_{a'}),
// computed in one backward pass with a max-shifted log-sum-exp.
Vec cost_to_go(const Network& net, const Vec& theta, double beta, const Vec& w,
               const Vec& p);

// Markovian traffic equilibrium by damped Picard iteration on the
// softmax-splitting fixed point. `warm_start` seeds the iteration when its
// size matches the arc count.
Vec mte_solve(const Network& net, const Vec& theta, double beta, const Vec& p,
              const SolverOptions& opts = {}, const Vec& warm_start = {});

// Same equilibrium, obtained as the stationary point of the Appendix-style
// potential over the flow-conservation polytope. Independent oracle for
// mte_solve; projected descent with Armijo backtracking.
Vec mte_solve_potential(const Network& net, const Vec& theta, double beta,
                        const Vec& p, const SolverOptions& opts = {});

// chi(w) <= 0, with the 0 ln 0 = 0 convention.
double entropy_term(const Network& net, const Vec& w);

// L(w, theta, beta) = sum_a theta_a w_a^2 + (1/beta) chi(w)
double perturbed_latency(const Network& net, const Vec& w, const Vec& theta,
                         double beta);

// Unconstrained partial: dL/dw_a = 2 theta_a w_a + (1/beta) ln(w_a / out-sum)
Vec perturbed_latency_gradient(const Network& net, const Vec& w,
                               const Vec& theta, double beta);

// Unique minimizer of L over the feasible set.
Vec social_optimum(const Network& net, const Vec& theta, double beta,
                   const SolverOptions& opts = {});

// Fixed point p = theta .* w(p) of the marginal-cost toll; the induced MTE is
// the perturbed social optimum.
Vec optimal_toll(const Network& net, const Vec& theta, double beta,
                 const SolverOptions& opts = {}, const Vec& warm_start = {});

// Max-norm of the flow-conservation violation plus origin-outflow mismatch.
double conservation_residual(const Network& net, const Vec& w);

}  // namespace tollkit
