#pragma once

#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace tollkit {

struct Arc {
    std::string id;
    int tail;
    int head;
};

// Immutable single-origin single-destination traffic DAG. Node and arc
// identifiers are opaque strings mapped to dense indices in input order, so
// every tie-break downstream is reproducible.
class Network {
  public:
    Network(std::vector<std::string> node_ids,
            std::vector<std::tuple<std::string, std::string, std::string>> arcs,
            const std::string& origin, const std::string& destination,
            double inflow);

    int node_count() const { return static_cast<int>(node_ids_.size()); }
    int arc_count() const { return static_cast<int>(arcs_.size()); }
    const std::vector<std::string>& node_ids() const { return node_ids_; }
    const std::vector<Arc>& arcs() const { return arcs_; }
    const Arc& arc(int a) const { return arcs_[a]; }
    int origin() const { return origin_; }
    int destination() const { return destination_; }
    double inflow() const { return inflow_; }

    const std::vector<int>& out_arcs(int node) const { return out_arcs_[node]; }
    const std::vector<int>& in_arcs(int node) const { return in_arcs_[node]; }

    int node_index(const std::string& id) const;
    int arc_index(const std::string& id) const;

  private:
    std::vector<std::string> node_ids_;
    std::vector<Arc> arcs_;
    int origin_ = -1;
    int destination_ = -1;
    double inflow_ = 0.0;
    std::vector<std::vector<int>> out_arcs_;
    std::vector<std::vector<int>> in_arcs_;
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
    std::string joined() const;
};

// Checks the structural model assumptions: acyclicity, unique origin and
// destination, every arc on some o->d route, positive inflow, and at least
// two distinct o->d routes.
ValidationReport validate(const Network& net);

// Origin first, destination last; throws StructuralError on a cycle.
std::vector<int> topological_order(const Network& net);

struct ArcHeights {
    std::vector<int> height;  // arcs on the longest path from the arc to d, inclusive
    std::vector<int> depth;   // arcs on the longest path from o ending with the arc
    int max_height = 0;
    int max_depth = 0;
};

ArcHeights arc_height(const Network& net);

struct BetaNodeInfo {
    int node = -1;
    std::vector<int> outgoing_arcs;
    // unique_routes[k] is the full arc sequence (starting with outgoing_arcs[k])
    // of the single route from that arc to the destination.
    std::vector<std::vector<int>> unique_routes;
    std::vector<int> arc_set;  // union of the routes, ascending
    int b_count = 0;
};

// Locates the beta-estimation node: >= 2 outgoing arcs, each leading to the
// destination by exactly one route. Candidates are tails of minimum-height
// arcs among arcs whose tail has out-degree >= 2, ties broken by smallest
// dense node index.
BetaNodeInfo find_beta_node(const Network& net);

// All o->d routes as arc sequences. Exponential in general; intended for
// tests on small networks only.
std::vector<std::vector<int>> enumerate_routes(const Network& net);

// Routes from a given node to the destination.
std::vector<std::vector<int>> enumerate_routes_from(const Network& net, int node);

struct StructuralError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace tollkit
