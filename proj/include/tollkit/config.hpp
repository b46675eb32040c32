#pragma once

#include <memory>
#include <string>

#include "tollkit/learner.hpp"

namespace tollkit {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parsed experiment file: the network plus everything run() needs.
struct Experiment {
    std::shared_ptr<Network> network;
    RunConfig run_config;
    std::string output_directory = ".";
};

// JSON schema:
//   network:   nodes [..], arcs [[id, tail, head], ..], origin, destination, g_o
//   truth:     theta_star [..], beta_star
//   algorithm: T, lambda, c_beta, C_theta_bound, seed, tol, damping,
//              max_iters, theta_lo0, theta_hi0 (all but T optional)
//   output:    directory
Experiment load_experiment(const std::string& path);
Experiment parse_experiment(const std::string& json_text);
std::string serialize_experiment(const Experiment& exp);

}  // namespace tollkit
