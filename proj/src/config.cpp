#include "tollkit/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace tollkit {

using nlohmann::json;

namespace {

json require(const json& obj, const char* key, const char* block) {
    if (!obj.contains(key))
        throw ConfigError(std::string(block) + " block: missing key '" + key + "'");
    return obj.at(key);
}

}  // namespace

Experiment parse_experiment(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("parse error: ") + e.what());
    }

    Experiment exp;
    const json net = require(root, "network", "top-level");
    std::vector<std::string> nodes =
        require(net, "nodes", "network").get<std::vector<std::string>>();
    std::vector<std::tuple<std::string, std::string, std::string>> arcs;
    for (const auto& entry : require(net, "arcs", "network")) {
        if (!entry.is_array() || entry.size() != 3)
            throw ConfigError("network block: each arc must be [id, tail, head]");
        arcs.emplace_back(entry[0].get<std::string>(), entry[1].get<std::string>(),
                          entry[2].get<std::string>());
    }
    try {
        exp.network = std::make_shared<Network>(
            std::move(nodes), std::move(arcs),
            require(net, "origin", "network").get<std::string>(),
            require(net, "destination", "network").get<std::string>(),
            require(net, "g_o", "network").get<double>());
    } catch (const StructuralError& e) {
        throw ConfigError(std::string("network block: ") + e.what());
    }

    const json truth = require(root, "truth", "top-level");
    exp.run_config.theta_star = require(truth, "theta_star", "truth").get<Vec>();
    if (static_cast<int>(exp.run_config.theta_star.size()) !=
        exp.network->arc_count())
        throw ConfigError("truth block: theta_star length mismatch with arc count");
    exp.run_config.beta_star = require(truth, "beta_star", "truth").get<double>();

    const json alg = require(root, "algorithm", "top-level");
    auto& rc = exp.run_config;
    rc.T = require(alg, "T", "algorithm").get<int>();
    rc.lambda = alg.value("lambda", 0.01);
    rc.c_beta = alg.value("c_beta", 0.05);
    rc.C_theta_bound = alg.value("C_theta_bound", 10.0);
    rc.seed = alg.value("seed", std::uint64_t{0});
    rc.solver.tol = alg.value("tol", 1e-10);
    rc.solver.damping = alg.value("damping", 0.5);
    rc.solver.max_iters = alg.value("max_iters", 10000);
    rc.theta_lo0 = alg.value("theta_lo0", 0.01);
    rc.theta_hi0 = alg.value("theta_hi0", rc.C_theta_bound);

    if (root.contains("output"))
        exp.output_directory = root["output"].value("directory", ".");
    return exp;
}

Experiment load_experiment(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_experiment(buf.str());
}

std::string serialize_experiment(const Experiment& exp) {
    const Network& net = *exp.network;
    json arcs = json::array();
    for (const auto& arc : net.arcs())
        arcs.push_back({arc.id, net.node_ids()[arc.tail], net.node_ids()[arc.head]});
    const auto& rc = exp.run_config;
    json root = {
        {"network",
         {{"nodes", net.node_ids()},
          {"arcs", arcs},
          {"origin", net.node_ids()[net.origin()]},
          {"destination", net.node_ids()[net.destination()]},
          {"g_o", net.inflow()}}},
        {"truth", {{"theta_star", rc.theta_star}, {"beta_star", rc.beta_star}}},
        {"algorithm",
         {{"T", rc.T},
          {"lambda", rc.lambda},
          {"c_beta", rc.c_beta},
          {"C_theta_bound", rc.C_theta_bound},
          {"seed", rc.seed},
          {"tol", rc.solver.tol},
          {"damping", rc.solver.damping},
          {"max_iters", rc.solver.max_iters},
          {"theta_lo0", rc.theta_lo0},
          {"theta_hi0", rc.theta_hi0}}},
        {"output", {{"directory", exp.output_directory}}}};
    return root.dump(2);
}

}  // namespace tollkit
