#include "armgate/graph.hpp"

#include <algorithm>
#include <array>
#include <deque>

#include "armgate/errors.hpp"

namespace armgate {

namespace {
const std::array<std::string, 4> kNodeKindNames = {"Call", "Data", "DataField",
                                                   "DeniedAction"};
const std::array<std::string, 4> kEdgeKindNames = {"DirectOutput", "InputTo",
                                                   "Counterfactual", "FieldOf"};

bool is_data_kind(NodeKind kind) {
    return kind == NodeKind::Data || kind == NodeKind::DataField;
}
}  // namespace

const std::string& node_kind_name(NodeKind kind) {
    return kNodeKindNames[static_cast<uint8_t>(kind)];
}

const std::string& edge_kind_name(EdgeKind kind) {
    return kEdgeKindNames[static_cast<uint8_t>(kind)];
}

NodeId ProvenanceGraph::allocate(NodeKind kind) {
    Node n;
    n.id = nodes_.size();
    n.kind = kind;
    n.timestamp = clock_++;
    nodes_.push_back(std::move(n));
    out_edges_.emplace_back();
    in_edges_.emplace_back();
    return nodes_.back().id;
}

void ProvenanceGraph::add_edge(NodeId src, NodeId dst, EdgeKind kind) {
    auto key = std::make_tuple(src, dst, static_cast<uint8_t>(kind));
    if (!edge_set_.insert(key).second) return;
    out_edges_[src].emplace_back(dst, kind);
    in_edges_[dst].emplace_back(src, kind);
}

const Node& ProvenanceGraph::require(NodeId id, const char* code) const {
    if (!has_node(id)) {
        throw ArmGateError(code, "no node with id " + std::to_string(id));
    }
    return nodes_[id];
}

NodeId ProvenanceGraph::add_call_node(const std::string& tool_name,
                                      const nlohmann::json& arguments,
                                      const std::vector<NodeId>& input_data) {
    for (NodeId src : input_data) {
        const Node& n = require(src, "dangling-input");
        if (!is_data_kind(n.kind)) {
            throw ArmGateError("edge-kind-violation",
                               "InputTo source must be Data or DataField, got " +
                                   node_kind_name(n.kind));
        }
    }
    NodeId call = allocate(NodeKind::Call);
    nodes_[call].tool_name = tool_name;
    nodes_[call].arguments = arguments;
    for (NodeId src : input_data) add_edge(src, call, EdgeKind::InputTo);
    return call;
}

std::vector<NodeId> ProvenanceGraph::record_output(
    NodeId call, const nlohmann::json& value, TrustLevel base_trust,
    const std::map<std::string, TrustLevel>& overrides) {
    const Node& c = require(call, "not-a-call");
    if (c.kind != NodeKind::Call) {
        throw ArmGateError("not-a-call", "record_output target has kind " +
                                             node_kind_name(c.kind));
    }
    for (const auto& [key, _] : overrides) {
        if (!value.is_object() || !value.contains(key)) {
            throw ArmGateError("unknown-field-override",
                               "override key '" + key +
                                   "' is not a top-level field of the value");
        }
    }

    std::vector<NodeId> field_ids;
    if (value.is_object()) {
        for (auto it = value.begin(); it != value.end(); ++it) {
            NodeId f = allocate(NodeKind::DataField);
            nodes_[f].field_key = it.key();
            nodes_[f].value = it.value();
            auto ov = overrides.find(it.key());
            nodes_[f].trust =
                ov != overrides.end() ? ov->second : base_trust;
            field_ids.push_back(f);
        }
    }

    NodeId data = allocate(NodeKind::Data);
    nodes_[data].value = value;
    nodes_[data].trust = base_trust;
    add_edge(call, data, EdgeKind::DirectOutput);
    for (NodeId f : field_ids) add_edge(f, data, EdgeKind::FieldOf);

    std::vector<NodeId> result;
    result.push_back(data);
    result.insert(result.end(), field_ids.begin(), field_ids.end());
    return result;
}

NodeId ProvenanceGraph::add_denied_action(const std::string& tool_name,
                                          const nlohmann::json& arguments,
                                          const std::string& reason) {
    NodeId denied = allocate(NodeKind::DeniedAction);
    nodes_[denied].tool_name = tool_name;
    nodes_[denied].arguments = arguments;
    nodes_[denied].denial_reason = reason;
    latest_denial_ = denied;
    return denied;
}

void ProvenanceGraph::link_counterfactual(NodeId denied, NodeId call) {
    const Node& d = require(denied, "node-not-found");
    const Node& c = require(call, "node-not-found");
    if (d.kind != NodeKind::DeniedAction || c.kind != NodeKind::Call) {
        throw ArmGateError("edge-kind-violation",
                           "Counterfactual edge requires DeniedAction source "
                           "and Call target, got " +
                               node_kind_name(d.kind) + " -> " +
                               node_kind_name(c.kind));
    }
    add_edge(denied, call, EdgeKind::Counterfactual);
}

std::set<NodeId> ProvenanceGraph::ancestors(NodeId node) const {
    require(node, "node-not-found");
    std::set<NodeId> seen;
    std::deque<NodeId> frontier{node};
    while (!frontier.empty()) {
        NodeId cur = frontier.front();
        frontier.pop_front();
        for (const auto& [src, _] : in_edges_[cur]) {
            if (seen.insert(src).second) frontier.push_back(src);
        }
    }
    seen.erase(node);
    return seen;
}

TrustLevel ProvenanceGraph::min_trust(NodeId node) const {
    auto witness = min_trust_witness(node);
    if (!witness) return TrustLevel::SysInstr;
    return *nodes_[*witness].trust;
}

std::optional<NodeId> ProvenanceGraph::min_trust_witness(NodeId node) const {
    std::optional<NodeId> best;
    for (NodeId a : ancestors(node)) {
        const Node& n = nodes_[a];
        if (!is_data_kind(n.kind)) continue;
        if (!best) {
            best = a;
            continue;
        }
        const Node& b = nodes_[*best];
        int cmp = trust_compare(*n.trust, *b.trust);
        if (cmp < 0) {
            best = a;
        } else if (cmp == 0 && n.kind == NodeKind::Data &&
                   b.kind == NodeKind::DataField) {
            best = a;
        }
        // Equal trust and kind: ancestors() iterates ascending ids, so the
        // incumbent already has the lowest id.
    }
    return best;
}

std::vector<std::vector<NodeId>> ProvenanceGraph::counterfactual_chains(
    NodeId call) const {
    const Node& c = require(call, "node-not-found");
    if (c.kind != NodeKind::Call) {
        throw ArmGateError("not-a-call",
                           "counterfactual_chains target has kind " +
                               node_kind_name(c.kind));
    }
    std::vector<std::vector<NodeId>> chains;
    for (NodeId origin = 0; origin < nodes_.size(); ++origin) {
        if (nodes_[origin].kind != NodeKind::DeniedAction) continue;
        // BFS forward from the denial; first arrival at the call is a
        // shortest witness. A DeniedAction's only out-edges are
        // Counterfactual, so any such path contains one.
        std::map<NodeId, NodeId> parent;
        std::deque<NodeId> frontier{origin};
        parent[origin] = origin;
        bool found = false;
        while (!frontier.empty() && !found) {
            NodeId cur = frontier.front();
            frontier.pop_front();
            for (const auto& [dst, _] : out_edges_[cur]) {
                if (parent.count(dst)) continue;
                parent[dst] = cur;
                if (dst == call) {
                    found = true;
                    break;
                }
                frontier.push_back(dst);
            }
        }
        if (!found) continue;
        std::vector<NodeId> path;
        for (NodeId cur = call; cur != origin; cur = parent[cur]) {
            path.push_back(cur);
        }
        path.push_back(origin);
        std::reverse(path.begin(), path.end());
        chains.push_back(std::move(path));
    }
    return chains;
}

std::optional<NodeId> ProvenanceGraph::take_latest_denial() {
    auto d = latest_denial_;
    latest_denial_.reset();
    return d;
}

const Node& ProvenanceGraph::node(NodeId id) const {
    return require(id, "node-not-found");
}

std::vector<Edge> ProvenanceGraph::edges() const {
    std::vector<Edge> out;
    out.reserve(edge_set_.size());
    for (const auto& [src, dst, kind] : edge_set_) {
        out.push_back({src, dst, static_cast<EdgeKind>(kind)});
    }
    return out;
}

nlohmann::json ProvenanceGraph::snapshot() const {
    nlohmann::json nodes = nlohmann::json::array();
    for (const Node& n : nodes_) {
        nlohmann::json j;
        j["id"] = n.id;
        j["kind"] = node_kind_name(n.kind);
        j["timestamp"] = n.timestamp;
        switch (n.kind) {
            case NodeKind::Call:
                j["tool_name"] = n.tool_name;
                j["arguments"] = n.arguments;
                break;
            case NodeKind::Data:
                j["value"] = n.value;
                j["trust"] = trust_name(*n.trust);
                break;
            case NodeKind::DataField:
                j["value"] = n.value;
                j["field_key"] = n.field_key;
                j["trust"] = trust_name(*n.trust);
                break;
            case NodeKind::DeniedAction:
                j["tool_name"] = n.tool_name;
                j["arguments"] = n.arguments;
                j["denial_reason"] = n.denial_reason;
                break;
        }
        nodes.push_back(std::move(j));
    }
    nlohmann::json edges = nlohmann::json::array();
    for (const Edge& e : this->edges()) {
        edges.push_back({{"src", e.src},
                         {"dst", e.dst},
                         {"kind", edge_kind_name(e.kind)}});
    }
    return {{"nodes", nodes}, {"edges", edges}};
}

}  // namespace armgate
