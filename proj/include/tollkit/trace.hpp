#pragma once

#include <iosfwd>
#include <string>

#include "tollkit/learner.hpp"

namespace tollkit {

// 17 significant digits, locale-independent; round-trips doubles exactly.
std::string format_number(double x);

// RFC-4180-style quoting when a field contains a comma, quote or newline.
std::string csv_escape(const std::string& field);

// Columns: t, stage_regret, cum_regret, theta_err_l2, beta_err_abs, beta_t,
// then p_<arc> and w_<arc> per arc in network order.
void write_trace_csv(std::ostream& out, const RunTrace& trace,
                     const Network& net);

struct RunSummary {
    double L_star = 0.0;
    double final_regret = 0.0;
    double regret_slope = 0.0;     // log-log, t in [T/10, T]
    double theta_err_slope = 0.0;  // log-log, t in [100, T]
    double bound_envelope_C = 0.0;
    double good_event_frequency = 0.0;
};

RunSummary summarize(const RunTrace& trace, const Network& net,
                     const BetaNodeInfo& beta_node);
void write_summary_csv(std::ostream& out, const RunSummary& summary);

// Multi-trace aggregation for plot-ready curves.
struct TraceTable {
    std::vector<std::string> columns;
    std::vector<Vec> rows;
};

struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

TraceTable read_trace_csv(const std::string& path);

// Per-t mean and stddev of cum_regret, theta_err_l2 and beta_err_abs across
// traces with identical schema and length.
void write_report_csv(std::ostream& out, const std::vector<TraceTable>& traces);

}  // namespace tollkit
