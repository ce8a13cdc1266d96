#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "armgate/trust.hpp"

namespace armgate {

using NodeId = uint64_t;

enum class NodeKind : uint8_t { Call, Data, DataField, DeniedAction };
enum class EdgeKind : uint8_t { DirectOutput, InputTo, Counterfactual, FieldOf };

const std::string& node_kind_name(NodeKind kind);
const std::string& edge_kind_name(EdgeKind kind);

struct Node {
    NodeId id = 0;
    NodeKind kind = NodeKind::Call;
    uint64_t timestamp = 0;
    std::string tool_name;             // Call, DeniedAction
    nlohmann::json arguments;          // Call, DeniedAction
    std::string denial_reason;         // DeniedAction
    nlohmann::json value;              // Data, DataField
    std::string field_key;             // DataField
    std::optional<TrustLevel> trust;   // Data, DataField
};

struct Edge {
    NodeId src = 0;
    NodeId dst = 0;
    EdgeKind kind = EdgeKind::DirectOutput;
};

// Session provenance graph. Nodes get strictly increasing ids and every
// edge points from an earlier node to a later one, so the graph is a DAG
// by construction. Single writer; queries are const.
class ProvenanceGraph {
public:
    NodeId add_call_node(const std::string& tool_name,
                         const nlohmann::json& arguments,
                         const std::vector<NodeId>& input_data);

    // One Data node per output; if value is an object, one DataField node
    // per top-level key. Field ids are allocated before the Data node so
    // FieldOf edges keep the lower-to-higher id invariant. Returns the
    // Data id first, then field ids in key order.
    std::vector<NodeId> record_output(
        NodeId call, const nlohmann::json& value, TrustLevel base_trust,
        const std::map<std::string, TrustLevel>& overrides);

    NodeId add_denied_action(const std::string& tool_name,
                             const nlohmann::json& arguments,
                             const std::string& reason);

    void link_counterfactual(NodeId denied, NodeId call);

    // All nodes reachable by walking edges backwards, excluding the start.
    std::set<NodeId> ancestors(NodeId node) const;

    // Minimum trust over Data/DataField ancestors; SysInstr when none.
    TrustLevel min_trust(NodeId node) const;

    // The ancestor realizing min_trust. Among equally untrusted ancestors
    // a Data node is preferred over a DataField, then the lowest id.
    // Empty when the node has no data-kind ancestors.
    std::optional<NodeId> min_trust_witness(NodeId node) const;

    // One shortest DeniedAction->...->call path per denial node that can
    // reach the call, ordered by denial node id.
    std::vector<std::vector<NodeId>> counterfactual_chains(NodeId call) const;

    // Most recent denial, if it has not been consumed yet. take() clears.
    std::optional<NodeId> peek_latest_denial() const { return latest_denial_; }
    std::optional<NodeId> take_latest_denial();

    const Node& node(NodeId id) const;
    bool has_node(NodeId id) const { return id < nodes_.size(); }
    size_t node_count() const { return nodes_.size(); }
    size_t edge_count() const { return edge_set_.size(); }
    std::vector<Edge> edges() const;

    nlohmann::json snapshot() const;

private:
    NodeId allocate(NodeKind kind);
    void add_edge(NodeId src, NodeId dst, EdgeKind kind);
    const Node& require(NodeId id, const char* op) const;

    std::vector<Node> nodes_;
    // Adjacency sorted by insertion; ids ascend with time so traversal
    // order is deterministic.
    std::vector<std::vector<std::pair<NodeId, EdgeKind>>> out_edges_;
    std::vector<std::vector<std::pair<NodeId, EdgeKind>>> in_edges_;
    std::set<std::tuple<NodeId, NodeId, uint8_t>> edge_set_;
    std::optional<NodeId> latest_denial_;
    uint64_t clock_ = 0;
};

}  // namespace armgate
