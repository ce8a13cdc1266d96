#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "armgate/audit.hpp"
#include "armgate/capability.hpp"
#include "armgate/config.hpp"
#include "armgate/graph.hpp"
#include "armgate/layers.hpp"
#include "armgate/policy_types.hpp"

namespace armgate {

// Handle for one evaluated request. node is set in graph mode only.
struct CallRef {
    uint64_t id = 0;
    std::optional<NodeId> node;
};

// One mediated client session: provenance graph, evaluation context,
// capability token, audit log, and the pending-denial slot that feeds
// counterfactual linking. Requests are processed strictly one at a time.
class Session {
public:
    Session(EngineMode mode, PolicyConfig config, CapabilityToken token,
            std::optional<std::string> audit_path = std::nullopt);

    struct EvalOutcome {
        Decision decision;
        CallRef call;
        // Arguments with the reserved $provenance key stripped; what an
        // upstream should receive on Allow.
        nlohmann::json forwarded_arguments;
    };

    // Evaluate and audit in one step.
    EvalOutcome evaluate(const ToolCallRequest& req);

    // Two-phase variant for the serve loop: the audit entry must carry an
    // execution-failure annotation discovered only after forwarding, so
    // the append happens in finalize_audit. Exactly one finalize per call.
    EvalOutcome evaluate_deferred(const ToolCallRequest& req);
    const AuditEntry& finalize_audit(const CallRef& call,
                                     const std::string& annotation = "");

    // Record an allowed call's result: graph output nodes (graph mode)
    // plus the shared call history that flat groundedness reads.
    std::vector<NodeId> record_tool_result(
        const CallRef& call, const nlohmann::json& value, TrustLevel trust,
        const std::map<std::string, TrustLevel>& overrides = {});

    // Trust and field overrides taken from the policy's source_trust map.
    std::vector<NodeId> record_tool_result(const CallRef& call,
                                           const nlohmann::json& value);

    void add_user_message(std::string text);

    // Store the current schema and pin its digest on first sight; later
    // updates overwrite the schema but never the pin (HB-5 compares them).
    void observe_tool_schema(const std::string& tool,
                             const nlohmann::json& schema);

    EngineMode mode() const { return mode_; }
    EvaluationContext& context() { return ctx_; }
    const EvaluationContext& context() const { return ctx_; }
    const ProvenanceGraph& graph() const { return graph_; }
    const AuditLog& audit() const { return audit_; }
    const CapabilityToken& token() const { return token_; }

private:
    struct CallState {
        std::string tool_name;
        nlohmann::json arguments;
        bool allowed = false;
        bool audited = false;
        bool recorded = false;
        std::optional<NodeId> node;
        Decision decision;
    };

    EvalOutcome evaluate_inner(const ToolCallRequest& req);
    std::vector<NodeId> collect_inputs(const ToolCallRequest& req,
                                       const nlohmann::json& arguments) const;

    EngineMode mode_;
    CapabilityToken token_;
    EvaluationContext ctx_;
    ProvenanceGraph graph_;
    AuditLog audit_;
    std::vector<CallState> calls_;
};

}  // namespace armgate
