#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tollkit/config.hpp"
#include "tollkit/equilibrium.hpp"
#include "tollkit/learner.hpp"
#include "tollkit/network.hpp"

namespace py = pybind11;
using namespace tollkit;

PYBIND11_MODULE(_tollkit, m) {
    m.doc() = "Arc-based traffic equilibrium, tolling and online estimation";

    py::register_exception<StructuralError>(m, "StructuralError");
    py::register_exception<SolverError>(m, "SolverError");
    py::register_exception<ConfigError>(m, "ConfigError");

    py::class_<Arc>(m, "Arc")
        .def_readonly("id", &Arc::id)
        .def_readonly("tail", &Arc::tail)
        .def_readonly("head", &Arc::head);

    py::class_<Network, std::shared_ptr<Network>>(m, "Network")
        .def(py::init<std::vector<std::string>,
                      std::vector<std::tuple<std::string, std::string,
                                             std::string>>,
                      const std::string&, const std::string&, double>(),
             py::arg("nodes"), py::arg("arcs"), py::arg("origin"),
             py::arg("destination"), py::arg("g_o"))
        .def_property_readonly("node_count", &Network::node_count)
        .def_property_readonly("arc_count", &Network::arc_count)
        .def_property_readonly("node_ids", &Network::node_ids)
        .def_property_readonly("origin", &Network::origin)
        .def_property_readonly("destination", &Network::destination)
        .def_property_readonly("g_o", &Network::inflow)
        .def("arc", &Network::arc, py::return_value_policy::reference_internal)
        .def("arc_index", &Network::arc_index)
        .def("node_index", &Network::node_index);

    py::class_<ValidationReport>(m, "ValidationReport")
        .def_readonly("violations", &ValidationReport::violations)
        .def("ok", &ValidationReport::ok);

    py::class_<ArcHeights>(m, "ArcHeights")
        .def_readonly("height", &ArcHeights::height)
        .def_readonly("depth", &ArcHeights::depth)
        .def_readonly("max_height", &ArcHeights::max_height)
        .def_readonly("max_depth", &ArcHeights::max_depth);

    py::class_<BetaNodeInfo>(m, "BetaNodeInfo")
        .def_readonly("node", &BetaNodeInfo::node)
        .def_readonly("outgoing_arcs", &BetaNodeInfo::outgoing_arcs)
        .def_readonly("unique_routes", &BetaNodeInfo::unique_routes)
        .def_readonly("arc_set", &BetaNodeInfo::arc_set)
        .def_readonly("b_count", &BetaNodeInfo::b_count);

    py::class_<SolverOptions>(m, "SolverOptions")
        .def(py::init<>())
        .def_readwrite("tol", &SolverOptions::tol)
        .def_readwrite("damping", &SolverOptions::damping)
        .def_readwrite("max_iters", &SolverOptions::max_iters);

    m.def("validate", &validate);
    m.def("topological_order", &topological_order);
    m.def("arc_height", &arc_height);
    m.def("find_beta_node", &find_beta_node);
    m.def("cost_to_go", &cost_to_go, py::arg("net"), py::arg("theta"),
          py::arg("beta"), py::arg("w"), py::arg("p"));
    m.def("mte_solve", &mte_solve, py::arg("net"), py::arg("theta"),
          py::arg("beta"), py::arg("p"), py::arg("opts") = SolverOptions{},
          py::arg("warm_start") = Vec{});
    m.def("social_optimum", &social_optimum, py::arg("net"), py::arg("theta"),
          py::arg("beta"), py::arg("opts") = SolverOptions{});
    m.def("optimal_toll", &optimal_toll, py::arg("net"), py::arg("theta"),
          py::arg("beta"), py::arg("opts") = SolverOptions{},
          py::arg("warm_start") = Vec{});
    m.def("entropy_term", &entropy_term);
    m.def("perturbed_latency", &perturbed_latency);
    m.def("conservation_residual", &conservation_residual);

    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init<>())
        .def_readwrite("theta_star", &RunConfig::theta_star)
        .def_readwrite("beta_star", &RunConfig::beta_star)
        .def_readwrite("T", &RunConfig::T)
        .def_readwrite("lambda_", &RunConfig::lambda)
        .def_readwrite("c_beta", &RunConfig::c_beta)
        .def_readwrite("C_theta_bound", &RunConfig::C_theta_bound)
        .def_readwrite("seed", &RunConfig::seed)
        .def_readwrite("solver", &RunConfig::solver)
        .def_readwrite("theta_lo0", &RunConfig::theta_lo0)
        .def_readwrite("theta_hi0", &RunConfig::theta_hi0)
        .def_readwrite("oracle_mode", &RunConfig::oracle_mode)
        .def_readwrite("no_noise", &RunConfig::no_noise);

    py::class_<IterationRecord>(m, "IterationRecord")
        .def_readonly("toll", &IterationRecord::toll)
        .def_readonly("flow", &IterationRecord::flow)
        .def_readonly("theta_hat", &IterationRecord::theta_hat)
        .def_readonly("theta_lo", &IterationRecord::theta_lo)
        .def_readonly("theta_hi", &IterationRecord::theta_hi)
        .def_readonly("beta_t", &IterationRecord::beta_t)
        .def_readonly("stage_cost", &IterationRecord::stage_cost)
        .def_readonly("stage_regret", &IterationRecord::stage_regret)
        .def_readonly("cum_regret", &IterationRecord::cum_regret)
        .def_readonly("theta_err_l2", &IterationRecord::theta_err_l2)
        .def_readonly("beta_err_abs", &IterationRecord::beta_err_abs)
        .def_readonly("good_event", &IterationRecord::good_event);

    py::class_<RunTrace>(m, "RunTrace")
        .def_readonly("iters", &RunTrace::iters)
        .def_readonly("L_star", &RunTrace::L_star)
        .def_readonly("p_star", &RunTrace::p_star)
        .def_readonly("aborted", &RunTrace::aborted)
        .def_readonly("abort_reason", &RunTrace::abort_reason)
        .def("good_event_frequency", &RunTrace::good_event_frequency);

    m.def("run", &run, py::arg("net"), py::arg("config"),
          py::call_guard<py::gil_scoped_release>());

    py::class_<Experiment>(m, "Experiment")
        .def_readonly("network", &Experiment::network)
        .def_readonly("run_config", &Experiment::run_config)
        .def_readonly("output_directory", &Experiment::output_directory);

    m.def("load_experiment", &load_experiment);
    m.def("parse_experiment", &parse_experiment);
}
