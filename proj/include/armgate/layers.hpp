#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "armgate/capability.hpp"
#include "armgate/config.hpp"
#include "armgate/graph.hpp"
#include "armgate/patterns.hpp"
#include "armgate/policy_types.hpp"

namespace armgate {

enum class EngineMode : uint8_t { Flat, Graph };

struct HistoryEntry {
    std::string tool_name;
    nlohmann::json arguments;
    nlohmann::json output;
};

// Mutable per-session state the layers read (and, for schema pins, write).
// call_counts hold finalized Allow decisions per tool; the gateway bumps
// them after each Allow so HB-3 and the L4 budget share one ledger.
struct EvaluationContext {
    std::map<std::string, nlohmann::json> tool_schemas;
    std::vector<HistoryEntry> call_history;
    std::vector<std::string> user_messages;
    std::map<std::string, uint64_t> call_counts;
    std::map<std::string, std::string> pinned_schema_hashes;
    const CapabilityToken* token = nullptr;
    PolicyConfig config;

    // Lazily compiled from config.credential_patterns on first use; the
    // pattern list must not change after the first evaluation.
    mutable std::optional<std::vector<CredentialPattern>> compiled_credentials;
};

// Hard boundary checks HB-1..HB-5, first hit wins. Pins an unseen schema
// digest as a side effect (HB-5 records on first sight).
LayerResult l1_evaluate(const ToolCallRequest& req, EvaluationContext& ctx);

// Flat citation baseline: a long-enough string argument must occur in
// prior outputs, prior arguments, or a user message.
LayerResult l2_flat_evaluate(const ToolCallRequest& req,
                             const EvaluationContext& ctx);

// Graph-aware provenance check for an already materialized call node:
// counterfactual chains first, then minimum reachable trust against the
// threshold.
LayerResult l2g_evaluate(NodeId call_node, const ProvenanceGraph& graph,
                         TrustLevel threshold);

// Schema-derived rules SD-1..SD-4; no schema means nothing to derive.
// SD-4 findings go to *flags and never deny.
LayerResult l3_evaluate(const ToolCallRequest& req,
                        const EvaluationContext& ctx,
                        std::vector<std::string>* flags);

LayerResult l4_evaluate(const ToolCallRequest& req,
                        const EvaluationContext& ctx);

using LayerFn = std::function<LayerResult(std::vector<std::string>& flags)>;

// Strict short-circuit composition: run in order, stop at the first Deny.
Decision compose_layers(
    const std::vector<std::pair<std::string, LayerFn>>& layers);

// Full pipeline L1 -> (L2G or L2) -> L3 -> L4 honoring ctx.config layer
// switches. Graph mode requires the materialized call node.
Decision pipeline_evaluate(const ToolCallRequest& req, EvaluationContext& ctx,
                           const ProvenanceGraph* graph,
                           std::optional<NodeId> call_node, EngineMode mode);

}  // namespace armgate
