#pragma once

#include <cmath>
#include <random>

#include "tollkit/equilibrium.hpp"
#include "tollkit/network.hpp"

namespace tollkit::testing {

inline Network parallel_network(int arcs, double g_o = 100.0) {
    std::vector<std::tuple<std::string, std::string, std::string>> a;
    for (int k = 1; k <= arcs; ++k)
        a.emplace_back("a" + std::to_string(k), "i1", "i2");
    return Network({"i1", "i2"}, a, "i1", "i2", g_o);
}

// The 6-arc general network: i1 -> {i2, i3, i3}, i2 -> {i3, i4}, i3 -> i4.
// Arc ids are ordered so the paper's theta vector keeps every arc loaded at
// the perturbed optimum.
inline Network general_network(double g_o = 100.0) {
    return Network({"i1", "i2", "i3", "i4"},
                   {{"a1", "i1", "i3"},
                    {"a2", "i1", "i2"},
                    {"a3", "i2", "i3"},
                    {"a4", "i3", "i4"},
                    {"a5", "i1", "i3"},
                    {"a6", "i2", "i4"}},
                   "i1", "i4", g_o);
}

inline Network chain_network(double g_o = 1.0) {
    return Network({"o", "i", "d"}, {{"a1", "o", "i"}, {"a2", "i", "d"}}, "o",
                   "d", g_o);
}

// o -> i unique, then i with two parallel arcs to d.
inline Network chain_plus_parallel_tail(double g_o = 10.0) {
    return Network({"o", "i", "d"},
                   {{"a1", "o", "i"}, {"a2", "i", "d"}, {"a3", "i", "d"}}, "o",
                   "d", g_o);
}

// Random layered DAG with <= 12 arcs, valid by construction (retries until
// the validator agrees).
inline Network random_dag(std::mt19937_64& rng, double g_o = 50.0) {
    for (;;) {
        std::uniform_int_distribution<int> mid_dist(0, 3);
        const int mid = mid_dist(rng);
        const int n = mid + 2;
        std::vector<std::string> nodes;
        for (int i = 0; i < n; ++i) nodes.push_back("n" + std::to_string(i));
        // forward arcs only (node order is the topological order)
        std::vector<std::pair<int, int>> arcs;
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int i = 0; i < n - 1; ++i)
            for (int j = i + 1; j < n; ++j)
                if (u(rng) < 0.55) arcs.emplace_back(i, j);
        // stitch in connectivity
        for (int i = 1; i < n - 1; ++i) {
            bool has_in = false, has_out = false;
            for (auto [s, t] : arcs) {
                if (t == i) has_in = true;
                if (s == i) has_out = true;
            }
            if (!has_in) arcs.emplace_back(0, i);
            if (!has_out) arcs.emplace_back(i, n - 1);
        }
        bool origin_out = false;
        for (auto [s, t] : arcs) origin_out |= (s == 0);
        if (!origin_out) arcs.emplace_back(0, n - 1);
        // at least two routes: duplicate an origin arc if needed
        arcs.emplace_back(0, n - 1);
        if (arcs.size() > 12) continue;

        std::vector<std::tuple<std::string, std::string, std::string>> named;
        for (size_t k = 0; k < arcs.size(); ++k)
            named.emplace_back("a" + std::to_string(k), nodes[arcs[k].first],
                               nodes[arcs[k].second]);
        Network net(nodes, named, nodes.front(), nodes.back(), g_o);
        if (validate(net).ok()) return net;
    }
}

// Random point of W via random forward splits.
inline Vec random_feasible_flow(const Network& net, std::mt19937_64& rng) {
    auto order = topological_order(net);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    Vec w(net.arc_count(), 0.0);
    for (int i : order) {
        if (i == net.destination() || net.out_arcs(i).empty()) continue;
        double inflow = (i == net.origin()) ? net.inflow() : 0.0;
        for (int a : net.in_arcs(i)) inflow += w[a];
        double total = 0.0;
        Vec shares;
        for (size_t k = 0; k < net.out_arcs(i).size(); ++k) {
            shares.push_back(u(rng));
            total += shares.back();
        }
        for (size_t k = 0; k < net.out_arcs(i).size(); ++k)
            w[net.out_arcs(i)[k]] = inflow * shares[k] / total;
    }
    return w;
}

inline Vec random_theta(const Network& net, std::mt19937_64& rng, double lo = 0.5,
                        double hi = 5.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    Vec theta(net.arc_count());
    for (auto& t : theta) t = u(rng);
    return theta;
}

// 1-D bisection oracle for the two-arc-parallel equilibrium:
// ln(w1/(g-w1)) + beta * (c1 - c2) = 0.
inline double two_arc_mte_oracle(double theta1, double theta2, double p1,
                                 double p2, double g, double beta) {
    auto f = [&](double w1) {
        const double w2 = g - w1;
        return std::log(w1 / w2) +
               beta * ((theta1 * w1 + p1) - (theta2 * w2 + p2));
    };
    double lo = 1e-12, hi = g - 1e-12;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        (f(mid) <= 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// 1-D oracle for the two-arc-parallel social optimum: root of dL/dw1.
inline double two_arc_social_oracle(double theta1, double theta2, double g,
                                    double beta) {
    auto df = [&](double w1) {
        const double w2 = g - w1;
        return 2.0 * theta1 * w1 - 2.0 * theta2 * w2 +
               (std::log(w1) - std::log(w2)) / beta;
    };
    double lo = 1e-12, hi = g - 1e-12;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        (df(mid) <= 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace tollkit::testing
