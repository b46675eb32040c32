#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "tollkit/config.hpp"
#include "tollkit/trace.hpp"

namespace fs = std::filesystem;
using namespace tollkit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitSolver = 2;

int thread_cap() {
    if (const char* env = std::getenv("MTE_TOLLKIT_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

struct CommonFlags {
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
    std::optional<double> damping;
    std::string out_dir;
    bool oracle_mode = false;
    bool no_noise = false;
};

void apply_flags(Experiment& exp, const CommonFlags& flags) {
    if (flags.seed) exp.run_config.seed = *flags.seed;
    if (flags.tol) exp.run_config.solver.tol = *flags.tol;
    if (flags.damping) exp.run_config.solver.damping = *flags.damping;
    if (!flags.out_dir.empty()) exp.output_directory = flags.out_dir;
    exp.run_config.oracle_mode = flags.oracle_mode;
    exp.run_config.no_noise = flags.no_noise;
}

int cmd_validate(const std::string& path) {
    Experiment exp = load_experiment(path);
    auto report = validate(*exp.network);
    if (report.ok()) {
        std::cout << "valid\n";
        return kExitOk;
    }
    for (const auto& v : report.violations) std::cout << v << "\n";
    return kExitInvalid;
}

int cmd_equilibrium(const std::string& path, const CommonFlags& flags,
                    std::vector<double> theta_override,
                    std::optional<double> beta_override,
                    std::vector<double> toll_override) {
    Experiment exp = load_experiment(path);
    apply_flags(exp, flags);
    auto report = validate(*exp.network);
    if (!report.ok()) {
        std::cerr << "invalid network: " << report.joined() << "\n";
        return kExitInvalid;
    }
    const Network& net = *exp.network;
    Vec theta = theta_override.empty() ? exp.run_config.theta_star
                                       : Vec(theta_override);
    double beta = beta_override.value_or(exp.run_config.beta_star);
    Vec p = toll_override.empty() ? Vec(net.arc_count(), 0.0)
                                  : Vec(toll_override);
    if (static_cast<int>(theta.size()) != net.arc_count() ||
        static_cast<int>(p.size()) != net.arc_count()) {
        std::cerr << "length mismatch: --theta/--toll must have one value per arc\n";
        return kExitInvalid;
    }
    Vec w = mte_solve(net, theta, beta, p, exp.run_config.solver);
    Vec z = cost_to_go(net, theta, beta, w, p);
    Vec c = arc_costs(theta, w, p);
    std::cout << "arc,w,z,c\n";
    std::ostringstream csv;
    csv << "arc,w,z,c\n";
    for (int a = 0; a < net.arc_count(); ++a) {
        std::ostringstream row;
        row << csv_escape(net.arc(a).id) << ',' << format_number(w[a]) << ','
            << format_number(z[a]) << ',' << format_number(c[a]) << "\n";
        std::cout << row.str();
        csv << row.str();
    }
    std::cout << "# conservation_residual=" << format_number(conservation_residual(net, w))
              << "\n";
    fs::create_directories(exp.output_directory);
    std::ofstream out(fs::path(exp.output_directory) / "equilibrium.csv");
    out << csv.str();
    return kExitOk;
}

int cmd_social_opt(const std::string& path, const CommonFlags& flags) {
    Experiment exp = load_experiment(path);
    apply_flags(exp, flags);
    auto report = validate(*exp.network);
    if (!report.ok()) {
        std::cerr << "invalid network: " << report.joined() << "\n";
        return kExitInvalid;
    }
    const Network& net = *exp.network;
    const auto& rc = exp.run_config;
    Vec w = social_optimum(net, rc.theta_star, rc.beta_star, rc.solver);
    Vec p = optimal_toll(net, rc.theta_star, rc.beta_star, rc.solver);
    std::cout << "arc,w_opt,p_opt\n";
    for (int a = 0; a < net.arc_count(); ++a)
        std::cout << csv_escape(net.arc(a).id) << ',' << format_number(w[a])
                  << ',' << format_number(p[a]) << "\n";
    std::cout << "# L_star="
              << format_number(perturbed_latency(net, w, rc.theta_star, rc.beta_star))
              << "\n";
    return kExitOk;
}

int run_one(const Experiment& exp, std::uint64_t seed,
            const std::string& trace_name, const std::string& summary_name) {
    RunConfig rc = exp.run_config;
    rc.seed = seed;
    RunTrace trace = run(*exp.network, rc);
    fs::create_directories(exp.output_directory);
    {
        std::ofstream out(fs::path(exp.output_directory) / trace_name);
        write_trace_csv(out, trace, *exp.network);
    }
    if (trace.aborted) {
        std::cerr << "run aborted: " << trace.abort_reason
                  << " (partial trace flushed)\n";
        return kExitSolver;
    }
    auto beta_node = find_beta_node(*exp.network);
    std::ofstream out(fs::path(exp.output_directory) / summary_name);
    write_summary_csv(out, summarize(trace, *exp.network, beta_node));
    return kExitOk;
}

int cmd_run(const std::string& path, const CommonFlags& flags, int seeds) {
    Experiment exp = load_experiment(path);
    apply_flags(exp, flags);
    auto report = validate(*exp.network);
    if (!report.ok()) {
        std::cerr << "invalid network: " << report.joined() << "\n";
        return kExitInvalid;
    }
    if (seeds <= 1) return run_one(exp, exp.run_config.seed, "trace.csv", "summary.csv");

    const int cap = thread_cap();
    std::vector<std::future<int>> pending;
    int status = kExitOk;
    for (int k = 0; k < seeds; ++k) {
        if (static_cast<int>(pending.size()) >= cap) {
            status = std::max(status, pending.front().get());
            pending.erase(pending.begin());
        }
        const std::uint64_t seed = exp.run_config.seed + static_cast<std::uint64_t>(k);
        pending.push_back(std::async(std::launch::async, [&exp, seed, k] {
            return run_one(exp, seed, "trace_s" + std::to_string(k) + ".csv",
                           "summary_s" + std::to_string(k) + ".csv");
        }));
    }
    for (auto& f : pending) status = std::max(status, f.get());
    return status;
}

int cmd_report(const std::vector<std::string>& paths, const std::string& out_dir) {
    std::vector<TraceTable> traces;
    for (const auto& p : paths) traces.push_back(read_trace_csv(p));
    fs::create_directories(out_dir);
    std::ofstream out(fs::path(out_dir) / "report.csv");
    write_report_csv(out, traces);
    std::cout << "wrote " << (fs::path(out_dir) / "report.csv").string() << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Arc-based tolling and parameter-estimation simulator"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string config_path;
    std::vector<std::string> trace_paths;
    std::vector<double> theta_override, toll_override;
    std::optional<double> beta_override;
    int seeds = 1;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--seed", flags.seed, "Override RNG seed");
        sub->add_option("--out-dir", flags.out_dir, "Override output directory");
        sub->add_option("--tol", flags.tol, "Override solver tolerance");
        sub->add_option("--damping", flags.damping, "Override solver damping");
        sub->add_flag("--oracle-mode", flags.oracle_mode,
                      "Pin estimates to the true parameters");
        sub->add_flag("--no-noise", flags.no_noise, "Noiseless observations");
    };

    auto* validate_cmd = app.add_subcommand("validate", "Check a config file");
    validate_cmd->add_option("config", config_path)->required();

    auto* eq_cmd = app.add_subcommand("equilibrium", "Solve the MTE for a config");
    eq_cmd->add_option("config", config_path)->required();
    eq_cmd->add_option("--theta", theta_override, "Per-arc latency coefficients");
    eq_cmd->add_option("--beta", beta_override, "Entropy parameter");
    eq_cmd->add_option("--toll", toll_override, "Per-arc tolls");
    add_common(eq_cmd);

    auto* so_cmd = app.add_subcommand("social-opt",
                                      "Socially optimal flow and toll");
    so_cmd->add_option("config", config_path)->required();
    add_common(so_cmd);

    auto* run_cmd = app.add_subcommand("run", "Run the online learning loop");
    run_cmd->add_option("config", config_path)->required();
    run_cmd->add_option("--seeds", seeds, "Fan out over consecutive seeds");
    add_common(run_cmd);

    auto* report_cmd = app.add_subcommand("report", "Aggregate traces");
    report_cmd->add_option("traces", trace_paths)->required();
    report_cmd->add_option("--out-dir", flags.out_dir, "Output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate_cmd->parsed()) return cmd_validate(config_path);
        if (eq_cmd->parsed())
            return cmd_equilibrium(config_path, flags, theta_override,
                                   beta_override, toll_override);
        if (so_cmd->parsed()) return cmd_social_opt(config_path, flags);
        if (run_cmd->parsed()) return cmd_run(config_path, flags, seeds);
        if (report_cmd->parsed())
            return cmd_report(trace_paths,
                              flags.out_dir.empty() ? "." : flags.out_dir);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitInvalid;
    } catch (const SchemaError& e) {
        std::cerr << e.what() << "\n";
        return kExitInvalid;
    } catch (const SolverError& e) {
        std::cerr << e.what() << " (residual " << e.residual << ")\n";
        return kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitInvalid;
    }
    return kExitOk;
}
