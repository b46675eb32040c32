#include "tollkit/trace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace tollkit {

std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.16e", x);
    return buf;
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void write_trace_csv(std::ostream& out, const RunTrace& trace,
                     const Network& net) {
    out << "t,stage_regret,cum_regret,theta_err_l2,beta_err_abs,beta_t";
    for (const auto& arc : net.arcs()) out << ",p_" << csv_escape(arc.id);
    for (const auto& arc : net.arcs()) out << ",w_" << csv_escape(arc.id);
    out << "\n";
    for (size_t t = 0; t < trace.iters.size(); ++t) {
        const auto& it = trace.iters[t];
        out << (t + 1) << ',' << format_number(it.stage_regret) << ','
            << format_number(it.cum_regret) << ','
            << format_number(it.theta_err_l2) << ','
            << format_number(it.beta_err_abs) << ','
            << format_number(it.beta_t);
        for (double v : it.toll) out << ',' << format_number(v);
        for (double v : it.flow) out << ',' << format_number(v);
        out << "\n";
    }
}

RunSummary summarize(const RunTrace& trace, const Network& net,
                     const BetaNodeInfo& beta_node) {
    RunSummary s;
    s.L_star = trace.L_star;
    const int T = static_cast<int>(trace.iters.size());
    if (T == 0) return s;
    s.final_regret = trace.iters.back().cum_regret;
    Vec cum(T), terr(T);
    for (int t = 0; t < T; ++t) {
        cum[t] = trace.iters[t].cum_regret;
        terr[t] = trace.iters[t].theta_err_l2;
    }
    s.regret_slope = loglog_slope(cum, std::max(1, T / 10), T);
    s.theta_err_slope = loglog_slope(terr, std::min(100, T), T);
    s.bound_envelope_C = bound_envelope(trace, net, beta_node).C;
    s.good_event_frequency = trace.good_event_frequency();
    return s;
}

void write_summary_csv(std::ostream& out, const RunSummary& s) {
    out << "L_star,final_regret,regret_loglog_slope,theta_err_loglog_slope,"
           "bound_envelope_C,good_event_frequency\n";
    out << format_number(s.L_star) << ',' << format_number(s.final_regret)
        << ',' << format_number(s.regret_slope) << ','
        << format_number(s.theta_err_slope) << ','
        << format_number(s.bound_envelope_C) << ','
        << format_number(s.good_event_frequency) << "\n";
}

TraceTable read_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open trace file: " + path);
    TraceTable table;
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("empty trace file: " + path);
    std::stringstream header(line);
    std::string field;
    while (std::getline(header, field, ',')) table.columns.push_back(field);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        Vec values;
        while (std::getline(row, field, ',')) values.push_back(std::stod(field));
        if (values.size() != table.columns.size())
            throw SchemaError("ragged row in trace file: " + path);
        table.rows.push_back(std::move(values));
    }
    return table;
}

void write_report_csv(std::ostream& out, const std::vector<TraceTable>& traces) {
    if (traces.empty()) throw SchemaError("report: no traces given");
    const auto& ref = traces.front();
    for (const auto& t : traces) {
        if (t.columns != ref.columns || t.rows.size() != ref.rows.size())
            throw SchemaError("report: trace schema or length mismatch");
    }
    const std::vector<std::string> tracked = {"cum_regret", "theta_err_l2",
                                             "beta_err_abs"};
    std::vector<size_t> idx;
    for (const auto& name : tracked) {
        auto it = std::find(ref.columns.begin(), ref.columns.end(), name);
        if (it == ref.columns.end())
            throw SchemaError("report: missing column " + name);
        idx.push_back(static_cast<size_t>(it - ref.columns.begin()));
    }
    out << "t";
    for (const auto& name : tracked) out << ',' << name << "_mean," << name << "_std";
    out << "\n";
    const double n = static_cast<double>(traces.size());
    for (size_t r = 0; r < ref.rows.size(); ++r) {
        out << static_cast<long long>(ref.rows[r][0]);
        for (size_t c : idx) {
            double mean = 0.0;
            for (const auto& t : traces) mean += t.rows[r][c];
            mean /= n;
            double var = 0.0;
            for (const auto& t : traces) {
                const double d = t.rows[r][c] - mean;
                var += d * d;
            }
            var /= n;
            out << ',' << format_number(mean) << ','
                << format_number(std::sqrt(var));
        }
        out << "\n";
    }
}

}  // namespace tollkit
