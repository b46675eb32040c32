#include "tollkit/network.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace tollkit {

Network::Network(std::vector<std::string> node_ids,
                 std::vector<std::tuple<std::string, std::string, std::string>> arcs,
                 const std::string& origin, const std::string& destination,
                 double inflow)
    : node_ids_(std::move(node_ids)), inflow_(inflow) {
    std::unordered_map<std::string, int> index;
    for (int i = 0; i < static_cast<int>(node_ids_.size()); ++i) {
        if (!index.emplace(node_ids_[i], i).second)
            throw StructuralError("duplicate node id: " + node_ids_[i]);
    }
    auto lookup = [&](const std::string& id) {
        auto it = index.find(id);
        if (it == index.end()) throw StructuralError("unknown node id: " + id);
        return it->second;
    };
    origin_ = lookup(origin);
    destination_ = lookup(destination);
    out_arcs_.resize(node_ids_.size());
    in_arcs_.resize(node_ids_.size());
    std::set<std::string> arc_ids;
    for (const auto& [id, tail, head] : arcs) {
        if (!arc_ids.insert(id).second)
            throw StructuralError("duplicate arc id: " + id);
        int a = static_cast<int>(arcs_.size());
        arcs_.push_back({id, lookup(tail), lookup(head)});
        out_arcs_[arcs_[a].tail].push_back(a);
        in_arcs_[arcs_[a].head].push_back(a);
    }
}

int Network::node_index(const std::string& id) const {
    for (int i = 0; i < node_count(); ++i)
        if (node_ids_[i] == id) return i;
    throw StructuralError("unknown node id: " + id);
}

int Network::arc_index(const std::string& id) const {
    for (int a = 0; a < arc_count(); ++a)
        if (arcs_[a].id == id) return a;
    throw StructuralError("unknown arc id: " + id);
}

std::string ValidationReport::joined() const {
    std::ostringstream os;
    for (size_t i = 0; i < violations.size(); ++i) {
        if (i) os << "; ";
        os << violations[i];
    }
    return os.str();
}

namespace {

// Kahn's algorithm; returns empty vector when a cycle is present.
std::vector<int> kahn_order(const Network& net) {
    std::vector<int> indeg(net.node_count());
    for (int i = 0; i < net.node_count(); ++i)
        indeg[i] = static_cast<int>(net.in_arcs(i).size());
    // Smallest-index-first among ready nodes keeps the order deterministic
    // and puts the origin first when it is the unique source.
    std::set<int> ready;
    for (int i = 0; i < net.node_count(); ++i)
        if (indeg[i] == 0) ready.insert(i);
    std::vector<int> order;
    while (!ready.empty()) {
        int i = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(i);
        for (int a : net.out_arcs(i))
            if (--indeg[net.arc(a).head] == 0) ready.insert(net.arc(a).head);
    }
    if (static_cast<int>(order.size()) != net.node_count()) return {};
    return order;
}

// Number of routes from each node to the destination, saturating to avoid
// overflow on pathological inputs. Only reachable-from-o arcs matter to the
// callers, which check reachability separately.
std::vector<long long> routes_to_destination(const Network& net, const std::vector<int>& order) {
    constexpr long long kCap = 1'000'000'000;
    std::vector<long long> count(net.node_count(), 0);
    count[net.destination()] = 1;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        for (int a : net.out_arcs(*it)) {
            count[*it] = std::min(kCap, count[*it] + count[net.arc(a).head]);
        }
    }
    return count;
}

std::vector<long long> routes_from_origin(const Network& net, const std::vector<int>& order) {
    constexpr long long kCap = 1'000'000'000;
    std::vector<long long> count(net.node_count(), 0);
    count[net.origin()] = 1;
    for (int i : order) {
        for (int a : net.out_arcs(i)) {
            auto& c = count[net.arc(a).head];
            c = std::min(kCap, c + count[i]);
        }
    }
    return count;
}

}  // namespace

ValidationReport validate(const Network& net) {
    ValidationReport report;
    auto order = kahn_order(net);
    if (order.empty()) {
        report.violations.push_back("cycle detected");
        return report;  // downstream checks assume acyclicity
    }
    int sources = 0, sinks = 0;
    for (int i = 0; i < net.node_count(); ++i) {
        if (net.in_arcs(i).empty()) ++sources;
        if (net.out_arcs(i).empty()) ++sinks;
    }
    if (sources != 1 || !net.in_arcs(net.origin()).empty())
        report.violations.push_back("origin is not the unique source (multiple origins or origin has incoming arcs)");
    if (sinks != 1 || !net.out_arcs(net.destination()).empty())
        report.violations.push_back("destination is not the unique sink (multiple destinations or destination has outgoing arcs)");
    if (net.inflow() <= 0.0) report.violations.push_back("g_o must be positive");

    auto to_d = routes_to_destination(net, order);
    auto from_o = routes_from_origin(net, order);
    for (const auto& arc : net.arcs()) {
        if (from_o[arc.tail] == 0 || to_d[arc.head] == 0) {
            report.violations.push_back("arc " + arc.id + " is unreachable (not on any o->d route)");
        }
    }
    if (to_d[net.origin()] < 2)
        report.violations.push_back("fewer than two routes from origin to destination");
    return report;
}

std::vector<int> topological_order(const Network& net) {
    auto order = kahn_order(net);
    if (order.empty()) throw StructuralError("cycle detected");
    return order;
}

ArcHeights arc_height(const Network& net) {
    auto order = topological_order(net);
    ArcHeights h;
    h.height.assign(net.arc_count(), 0);
    h.depth.assign(net.arc_count(), 0);
    // longest-path recursions over the reverse (height) and forward (depth)
    // topological sweeps
    std::vector<int> node_height(net.node_count(), 0);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        for (int a : net.out_arcs(*it)) {
            h.height[a] = 1 + node_height[net.arc(a).head];
            node_height[*it] = std::max(node_height[*it], h.height[a]);
        }
    }
    std::vector<int> node_depth(net.node_count(), 0);
    for (int i : order) {
        for (int a : net.out_arcs(i)) {
            h.depth[a] = 1 + node_depth[i];
            auto& nd = node_depth[net.arc(a).head];
            nd = std::max(nd, h.depth[a]);
        }
    }
    for (int a = 0; a < net.arc_count(); ++a) {
        h.max_height = std::max(h.max_height, h.height[a]);
        h.max_depth = std::max(h.max_depth, h.depth[a]);
    }
    return h;
}

BetaNodeInfo find_beta_node(const Network& net) {
    auto order = topological_order(net);
    auto heights = arc_height(net);
    auto to_d = routes_to_destination(net, order);

    auto qualifies = [&](int node) {
        if (net.out_arcs(node).size() < 2) return false;
        for (int a : net.out_arcs(node))
            if (to_d[net.arc(a).head] != 1 && net.arc(a).head != net.destination())
                return false;
        return true;
    };

    int min_height = net.node_count() + 1;
    for (int a = 0; a < net.arc_count(); ++a)
        if (net.out_arcs(net.arc(a).tail).size() >= 2)
            min_height = std::min(min_height, heights.height[a]);

    int chosen = -1;
    // Tails of minimum-height arcs first, smallest dense index wins.
    for (int node = 0; node < net.node_count() && chosen < 0; ++node) {
        if (net.out_arcs(node).size() < 2) continue;
        bool has_min_arc = false;
        for (int a : net.out_arcs(node))
            if (heights.height[a] == min_height) has_min_arc = true;
        if (has_min_arc && qualifies(node)) chosen = node;
    }
    // The minimum-height construction can land on a node with a non-unique
    // branch when the min is attained at several tails; a qualifying node
    // always exists, so fall back to a plain scan.
    for (int node = 0; node < net.node_count() && chosen < 0; ++node)
        if (qualifies(node)) chosen = node;
    if (chosen < 0) throw StructuralError("no beta-estimation node (network has < 2 routes?)");

    BetaNodeInfo info;
    info.node = chosen;
    std::set<int> arc_set;
    for (int a : net.out_arcs(chosen)) {
        info.outgoing_arcs.push_back(a);
        std::vector<int> route{a};
        int cur = net.arc(a).head;
        while (cur != net.destination()) {
            // to_d[cur] == 1 so exactly one outgoing arc continues to d
            int next = -1;
            for (int b : net.out_arcs(cur))
                if (to_d[net.arc(b).head] > 0 || net.arc(b).head == net.destination()) next = b;
            route.push_back(next);
            cur = net.arc(next).head;
        }
        for (int b : route) arc_set.insert(b);
        info.unique_routes.push_back(std::move(route));
    }
    info.arc_set.assign(arc_set.begin(), arc_set.end());
    info.b_count = static_cast<int>(info.arc_set.size());
    return info;
}

std::vector<std::vector<int>> enumerate_routes_from(const Network& net, int node) {
    std::vector<std::vector<int>> routes;
    std::vector<int> stack;
    auto dfs = [&](auto&& self, int cur) -> void {
        if (cur == net.destination()) {
            routes.push_back(stack);
            return;
        }
        for (int a : net.out_arcs(cur)) {
            stack.push_back(a);
            self(self, net.arc(a).head);
            stack.pop_back();
        }
    };
    dfs(dfs, node);
    return routes;
}

std::vector<std::vector<int>> enumerate_routes(const Network& net) {
    return enumerate_routes_from(net, net.origin());
}

}  // namespace tollkit
