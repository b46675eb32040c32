#include "tollkit/equilibrium.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace tollkit {

namespace {

void check_dims(const Network& net, const Vec& v, const char* name) {
    if (static_cast<int>(v.size()) != net.arc_count())
        throw std::invalid_argument(std::string(name) + ": dimension mismatch");
}

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

// Uniform forward split; feasible starting point for both solvers.
Vec uniform_split(const Network& net) {
    auto order = topological_order(net);
    Vec w(net.arc_count(), 0.0);
    for (int i : order) {
        if (i == net.destination()) continue;
        double inflow = (i == net.origin()) ? net.inflow() : 0.0;
        for (int a : net.in_arcs(i)) inflow += w[a];
        double share = inflow / static_cast<double>(net.out_arcs(i).size());
        for (int a : net.out_arcs(i)) w[a] = share;
    }
    return w;
}

}  // namespace

Vec arc_costs(const Vec& theta, const Vec& w, const Vec& p) {
    if (theta.size() != w.size() || w.size() != p.size())
        throw std::invalid_argument("arc_costs: dimension mismatch");
    Vec c(w.size());
    for (size_t a = 0; a < w.size(); ++a) c[a] = theta[a] * w[a] + p[a];
    return c;
}

Vec cost_to_go(const Network& net, const Vec& theta, double beta, const Vec& w,
               const Vec& p) {
    if (beta <= 0.0) throw std::invalid_argument("cost_to_go: beta must be positive");
    check_dims(net, theta, "theta");
    check_dims(net, w, "w");
    check_dims(net, p, "p");
    Vec c = arc_costs(theta, w, p);
    Vec z(net.arc_count(), 0.0);
    auto order = topological_order(net);
    // node_value[i] = -(1/beta) ln sum_{a in A_i^+} exp(-beta z_a)
    std::vector<double> node_value(net.node_count(), 0.0);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        int i = *it;
        if (i == net.destination() || net.out_arcs(i).empty()) continue;
        for (int a : net.out_arcs(i))
            z[a] = c[a] + (net.arc(a).head == net.destination() ? 0.0 : node_value[net.arc(a).head]);
        double m = -std::numeric_limits<double>::infinity();
        for (int a : net.out_arcs(i)) m = std::max(m, -beta * z[a]);
        double s = 0.0;
        for (int a : net.out_arcs(i)) s += std::exp(-beta * z[a] - m);
        node_value[i] = -(m + std::log(s)) / beta;
    }
    return z;
}

namespace {

// One full reassignment given cost-to-go values: softmax split at each node,
// flows propagated from the origin in topological order. Output is in W.
Vec assign_flows(const Network& net, const Vec& z, double beta,
                 const std::vector<int>& order) {
    Vec w(net.arc_count(), 0.0);
    for (int i : order) {
        if (i == net.destination() || net.out_arcs(i).empty()) continue;
        double throughput = (i == net.origin()) ? net.inflow() : 0.0;
        for (int a : net.in_arcs(i)) throughput += w[a];
        double m = -std::numeric_limits<double>::infinity();
        for (int a : net.out_arcs(i)) m = std::max(m, -beta * z[a]);
        double s = 0.0;
        for (int a : net.out_arcs(i)) s += std::exp(-beta * z[a] - m);
        for (int a : net.out_arcs(i))
            w[a] = throughput * std::exp(-beta * z[a] - m) / s;
    }
    return w;
}

}  // namespace

Vec mte_solve(const Network& net, const Vec& theta, double beta, const Vec& p,
              const SolverOptions& opts, const Vec& warm_start) {
    if (beta <= 0.0) throw std::invalid_argument("mte_solve: beta must be positive");
    check_dims(net, theta, "theta");
    check_dims(net, p, "p");
    auto order = topological_order(net);
    Vec w = (static_cast<int>(warm_start.size()) == net.arc_count())
                ? warm_start
                : uniform_split(net);
    // windowed step control: judge progress over blocks of iterations rather
    // than per step, since marginally stable damping oscillates while the
    // residual creeps down a few percent per step
    constexpr int kWindow = 15;
    double alpha = opts.damping;
    double checkpoint = std::numeric_limits<double>::infinity();
    int since_checkpoint = 0;
    for (int iter = 0; iter < opts.max_iters; ++iter) {
        Vec z = cost_to_go(net, theta, beta, w, p);
        Vec w_new = assign_flows(net, z, beta, order);
        double residual = 0.0;
        for (int a = 0; a < net.arc_count(); ++a)
            residual = std::max(residual, std::abs(w[a] - w_new[a]));
        if (residual < opts.tol) return w_new;
        if (iter == 0) {
            checkpoint = residual;
        } else if (residual > 10.0 * checkpoint) {
            // outright divergence; brake immediately
            alpha = std::max(alpha * 0.5, 1e-4);
            checkpoint = residual;
            since_checkpoint = 0;
        } else if (++since_checkpoint >= kWindow) {
            if (residual > 0.7 * checkpoint)
                alpha = std::max(alpha * 0.5, 1e-4);
            else if (residual < 0.01 * checkpoint)
                alpha = std::min(alpha * 2.0, opts.damping);
            checkpoint = residual;
            since_checkpoint = 0;
        }
        for (int a = 0; a < net.arc_count(); ++a)
            w[a] = (1.0 - alpha) * w[a] + alpha * w_new[a];
    }
    Vec z = cost_to_go(net, theta, beta, w, p);
    Vec w_new = assign_flows(net, z, beta, order);
    double residual = 0.0;
    for (int a = 0; a < net.arc_count(); ++a)
        residual = std::max(residual, std::abs(w[a] - w_new[a]));
    throw SolverError("mte_solve: no convergence within max iterations", residual);
}

double entropy_term(const Network& net, const Vec& w) {
    check_dims(net, w, "w");
    double chi = 0.0;
    for (int i = 0; i < net.node_count(); ++i) {
        if (i == net.destination() || net.out_arcs(i).empty()) continue;
        double sum = 0.0, terms = 0.0;
        for (int a : net.out_arcs(i)) {
            sum += w[a];
            terms += xlogx(w[a]);
        }
        chi += terms - xlogx(sum);
    }
    return chi;
}

double perturbed_latency(const Network& net, const Vec& w, const Vec& theta,
                         double beta) {
    if (beta <= 0.0) throw std::invalid_argument("perturbed_latency: beta must be positive");
    check_dims(net, w, "w");
    check_dims(net, theta, "theta");
    double total = 0.0;
    for (int a = 0; a < net.arc_count(); ++a) total += theta[a] * w[a] * w[a];
    return total + entropy_term(net, w) / beta;
}

Vec perturbed_latency_gradient(const Network& net, const Vec& w,
                               const Vec& theta, double beta) {
    Vec g(net.arc_count());
    for (int a = 0; a < net.arc_count(); ++a) {
        int tail = net.arc(a).tail;
        double sum = 0.0;
        for (int b : net.out_arcs(tail)) sum += w[b];
        g[a] = 2.0 * theta[a] * w[a] + std::log(w[a] / sum) / beta;
    }
    return g;
}

double conservation_residual(const Network& net, const Vec& w) {
    check_dims(net, w, "w");
    double r = 0.0;
    for (int a = 0; a < net.arc_count(); ++a) r = std::max(r, -w[a]);
    for (int i = 0; i < net.node_count(); ++i) {
        double out = 0.0, in = 0.0;
        for (int a : net.out_arcs(i)) out += w[a];
        for (int a : net.in_arcs(i)) in += w[a];
        if (i == net.origin()) {
            r = std::max(r, std::abs(out - net.inflow()));
        } else if (i != net.destination()) {
            r = std::max(r, std::abs(out - in));
        }
    }
    return r;
}

namespace {

// Projected descent over the affine hull of W with Barzilai-Borwein steps and
// Armijo backtracking. Marginal costs come in through `grad`; `value` is the
// objective (returns +inf outside the positive orthant, which keeps the
// Armijo search interior).
template <typename GradFn, typename ValueFn>
Vec minimize_over_W(const Network& net, GradFn grad, ValueFn value,
                    const SolverOptions& opts) {
    const int n = net.arc_count();
    int rows = 0;
    for (int i = 0; i < net.node_count(); ++i)
        if (i != net.destination()) ++rows;
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(rows, n);
    int r = 0;
    for (int i = 0; i < net.node_count(); ++i) {
        if (i == net.destination()) continue;
        for (int a : net.out_arcs(i)) M(r, a) += 1.0;
        if (i != net.origin())
            for (int a : net.in_arcs(i)) M(r, a) -= 1.0;
        ++r;
    }
    // null-space projector of the conservation constraints
    Eigen::MatrixXd gram = M * M.transpose();
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(gram);
    auto project = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
        return v - M.transpose() * cod.solve(M * v);
    };

    Vec w = uniform_split(net);
    Eigen::VectorXd x = Eigen::Map<Eigen::VectorXd>(w.data(), n);
    auto to_vec = [n](const Eigen::VectorXd& v) {
        return Vec(v.data(), v.data() + n);
    };

    // stationarity below ~1e-8 is not reachable in double precision once the
    // objective differences fall under machine epsilon
    const double gtol = std::max(opts.tol, 1e-8) * (1.0 + net.inflow());
    double fx = value(to_vec(x));
    Eigen::VectorXd pg = project(Eigen::Map<const Eigen::VectorXd>(grad(to_vec(x)).data(), n));
    double step = 1.0 / (1.0 + pg.norm());
    Eigen::VectorXd x_prev = x, pg_prev = pg;
    const int max_iters = opts.max_iters * 20;
    for (int iter = 0; iter < max_iters; ++iter) {
        if (pg.lpNorm<Eigen::Infinity>() < gtol) return to_vec(x);
        if (iter > 0) {
            Eigen::VectorXd dx = x - x_prev, dg = pg - pg_prev;
            double num = dx.dot(dg), den = dg.squaredNorm();
            if (num > 0 && den > 0) step = std::clamp(num / den, 1e-14, 1e8);
        }
        x_prev = x;
        pg_prev = pg;
        double eta = step;
        double gnorm2 = pg.squaredNorm();
        for (int ls = 0; ls < 60; ++ls) {
            Eigen::VectorXd cand = x - eta * pg;
            double fc = value(to_vec(cand));
            if (fc <= fx - 1e-4 * eta * gnorm2) {
                x = cand;
                fx = fc;
                break;
            }
            eta *= 0.5;
            if (ls == 59) {
                // step collapsed; gradient is as stationary as it gets
                return to_vec(x);
            }
        }
        pg = project(Eigen::Map<const Eigen::VectorXd>(grad(to_vec(x)).data(), n));
    }
    throw SolverError("minimize_over_W: no convergence",
                      pg.lpNorm<Eigen::Infinity>());
}

}  // namespace

Vec mte_solve_potential(const Network& net, const Vec& theta, double beta,
                        const Vec& p, const SolverOptions& opts) {
    if (beta <= 0.0)
        throw std::invalid_argument("mte_solve_potential: beta must be positive");
    check_dims(net, theta, "theta");
    check_dims(net, p, "p");
    auto value = [&](const Vec& w) {
        for (double x : w)
            if (x <= 0.0) return std::numeric_limits<double>::infinity();
        double f = 0.0;
        for (int a = 0; a < net.arc_count(); ++a)
            f += 0.5 * theta[a] * w[a] * w[a] + p[a] * w[a];
        return f + entropy_term(net, w) / beta;
    };
    auto grad = [&](const Vec& w) {
        Vec g(net.arc_count());
        for (int a = 0; a < net.arc_count(); ++a) {
            int tail = net.arc(a).tail;
            double sum = 0.0;
            for (int b : net.out_arcs(tail)) sum += w[b];
            g[a] = theta[a] * w[a] + p[a] +
                   std::log(std::max(w[a], 1e-300) / sum) / beta;
        }
        return g;
    };
    return minimize_over_W(net, grad, value, opts);
}

Vec social_optimum(const Network& net, const Vec& theta, double beta,
                   const SolverOptions& opts) {
    if (beta <= 0.0)
        throw std::invalid_argument("social_optimum: beta must be positive");
    check_dims(net, theta, "theta");
    auto value = [&](const Vec& w) {
        for (double x : w)
            if (x <= 0.0) return std::numeric_limits<double>::infinity();
        return perturbed_latency(net, w, theta, beta);
    };
    auto grad = [&](const Vec& w) {
        Vec g(net.arc_count());
        for (int a = 0; a < net.arc_count(); ++a) {
            int tail = net.arc(a).tail;
            double sum = 0.0;
            for (int b : net.out_arcs(tail)) sum += w[b];
            g[a] = 2.0 * theta[a] * w[a] +
                   std::log(std::max(w[a], 1e-300) / sum) / beta;
        }
        return g;
    };
    return minimize_over_W(net, grad, value, opts);
}

Vec optimal_toll(const Network& net, const Vec& theta, double beta,
                 const SolverOptions& opts, const Vec& warm_start) {
    if (beta <= 0.0) throw std::invalid_argument("optimal_toll: beta must be positive");
    check_dims(net, theta, "theta");
    Vec p = (static_cast<int>(warm_start.size()) == net.arc_count())
                ? warm_start
                : Vec(net.arc_count(), 0.0);
    Vec w;  // warm start for the inner equilibrium
    double alpha = opts.damping;
    double prev_residual = std::numeric_limits<double>::infinity();
    // the inner equilibrium is only exact to opts.tol in flow, so the toll
    // residual bottoms out near opts.tol * max theta * inflow
    double theta_max = 0.0;
    for (double t : theta) theta_max = std::max(theta_max, std::abs(t));
    const double tol_p = opts.tol * (1.0 + theta_max * net.inflow());
    for (int iter = 0; iter < opts.max_iters; ++iter) {
        w = mte_solve(net, theta, beta, p, opts, w);
        double residual = 0.0;
        Vec target(net.arc_count());
        for (int a = 0; a < net.arc_count(); ++a) {
            target[a] = theta[a] * w[a];
            residual = std::max(residual, std::abs(p[a] - target[a]));
        }
        if (residual < tol_p) return target;
        if (residual > prev_residual) alpha = std::max(alpha * 0.5, 1e-3);
        prev_residual = residual;
        for (int a = 0; a < net.arc_count(); ++a)
            p[a] = (1.0 - alpha) * p[a] + alpha * target[a];
    }
    throw SolverError("optimal_toll: no convergence within max iterations",
                      prev_residual);
}

}  // namespace tollkit
