#include "armgate/gateway.hpp"

#include <algorithm>

#include "armgate/errors.hpp"
#include "armgate/sha256.hpp"

namespace armgate {

namespace {
constexpr const char* kProvenanceKey = "$provenance";
}

Session::Session(EngineMode mode, PolicyConfig config, CapabilityToken token,
                 std::optional<std::string> audit_path)
    : mode_(mode),
      token_(std::move(token)),
      audit_(audit_path ? AuditLog(*audit_path) : AuditLog()) {
    ctx_.config = std::move(config);
    ctx_.token = &token_;
}

void Session::add_user_message(std::string text) {
    ctx_.user_messages.push_back(std::move(text));
}

void Session::observe_tool_schema(const std::string& tool,
                                  const nlohmann::json& schema) {
    ctx_.tool_schemas[tool] = schema;
    ctx_.pinned_schema_hashes.emplace(tool, sha256_of_json(schema));
}

std::vector<NodeId> Session::collect_inputs(
    const ToolCallRequest& req, const nlohmann::json& arguments) const {
    std::set<NodeId> inputs(req.input_data.begin(), req.input_data.end());
    if (ctx_.config.auto_link) {
        for (NodeId id = 0; id < graph_.node_count(); ++id) {
            const Node& n = graph_.node(id);
            if (n.kind != NodeKind::Data && n.kind != NodeKind::DataField) {
                continue;
            }
            if (!n.value.is_string()) continue;
            const std::string& value = n.value.get_ref<const std::string&>();
            if (value.size() < ctx_.config.groundedness_threshold) continue;
            for (auto it = arguments.begin(); it != arguments.end(); ++it) {
                std::string text = it.value().is_string()
                                       ? it.value().get<std::string>()
                                       : it.value().dump();
                if (text.find(value) != std::string::npos) {
                    inputs.insert(id);
                    break;
                }
            }
        }
    }
    return {inputs.begin(), inputs.end()};
}

Session::EvalOutcome Session::evaluate_inner(const ToolCallRequest& req) {
    CallState state;
    state.tool_name = req.tool_name;

    // The reserved $provenance argument names explicit input data nodes;
    // it is stripped before anything downstream (policy, graph, audit)
    // sees the arguments.
    nlohmann::json arguments = req.arguments;
    ToolCallRequest effective = req;
    if (arguments.is_object() && arguments.contains(kProvenanceKey)) {
        for (const auto& v : arguments[kProvenanceKey]) {
            effective.input_data.push_back(v.get<NodeId>());
        }
        arguments.erase(kProvenanceKey);
    }
    effective.arguments = arguments;
    state.arguments = arguments;

    CallRef ref;
    ref.id = calls_.size();

    if (mode_ == EngineMode::Graph) {
        for (NodeId id : effective.input_data) {
            if (!graph_.has_node(id)) {
                state.decision.outcome = Outcome::Deny;
                state.decision.denied_by = "gateway";
                state.decision.layer_results.push_back(LayerResult::deny(
                    "gateway", "graph-dangling-input",
                    "input data node " + std::to_string(id) +
                        " does not exist"));
                calls_.push_back(std::move(state));
                return {calls_.back().decision, ref, arguments};
            }
        }
        std::vector<NodeId> inputs = collect_inputs(effective, arguments);
        NodeId call = graph_.add_call_node(req.tool_name, arguments, inputs);
        if (auto denied = graph_.take_latest_denial()) {
            graph_.link_counterfactual(*denied, call);
        }
        state.node = call;
        ref.node = call;
        state.decision =
            pipeline_evaluate(effective, ctx_, &graph_, call, mode_);
        if (state.decision.outcome == Outcome::Deny) {
            graph_.add_denied_action(req.tool_name, arguments,
                                     state.decision.reason());
        }
    } else {
        state.decision =
            pipeline_evaluate(effective, ctx_, nullptr, std::nullopt, mode_);
    }

    if (state.decision.outcome == Outcome::Allow) {
        state.allowed = true;
        ctx_.call_counts[req.tool_name] += 1;
    }
    calls_.push_back(std::move(state));
    return {calls_.back().decision, ref, arguments};
}

Session::EvalOutcome Session::evaluate_deferred(const ToolCallRequest& req) {
    try {
        return evaluate_inner(req);
    } catch (const std::exception& e) {
        // Fail closed: an internal error must never surface as Allow.
        CallState state;
        state.tool_name = req.tool_name;
        state.arguments =
            req.arguments.is_object() ? req.arguments : nlohmann::json::object();
        state.decision.outcome = Outcome::Deny;
        state.decision.denied_by = "gateway";
        state.decision.layer_results.push_back(LayerResult::deny(
            "gateway", "internal-error",
            std::string("internal evaluation error: ") + e.what()));
        CallRef ref;
        ref.id = calls_.size();
        nlohmann::json args = state.arguments;
        calls_.push_back(std::move(state));
        return {calls_.back().decision, ref, args};
    }
}

Session::EvalOutcome Session::evaluate(const ToolCallRequest& req) {
    EvalOutcome outcome = evaluate_deferred(req);
    finalize_audit(outcome.call);
    return outcome;
}

const AuditEntry& Session::finalize_audit(const CallRef& call,
                                          const std::string& annotation) {
    if (call.id >= calls_.size()) {
        throw ArmGateError("node-not-found",
                           "no call with id " + std::to_string(call.id));
    }
    CallState& state = calls_[call.id];
    if (state.audited) {
        throw ArmGateError("duplicate-result",
                           "audit entry already finalized for this call");
    }
    state.audited = true;
    std::string reason = state.decision.reason();
    if (!annotation.empty()) {
        reason = reason.empty() ? annotation : reason + "; " + annotation;
    }
    nlohmann::json layer_results = nlohmann::json::array();
    for (const LayerResult& r : state.decision.layer_results) {
        layer_results.push_back(r.to_json());
    }
    return audit_.append(state.tool_name, state.arguments,
                         state.decision.outcome, reason, layer_results);
}

std::vector<NodeId> Session::record_tool_result(
    const CallRef& call, const nlohmann::json& value, TrustLevel trust,
    const std::map<std::string, TrustLevel>& overrides) {
    if (call.id >= calls_.size()) {
        throw ArmGateError("node-not-found",
                           "no call with id " + std::to_string(call.id));
    }
    CallState& state = calls_[call.id];
    if (!state.allowed) {
        throw ArmGateError("result-for-denied-call",
                           "cannot record a result for a call that was not "
                           "allowed");
    }
    if (state.recorded) {
        throw ArmGateError("duplicate-result",
                           "result already recorded for this call");
    }
    state.recorded = true;
    std::vector<NodeId> ids;
    if (mode_ == EngineMode::Graph && state.node) {
        ids = graph_.record_output(*state.node, value, trust, overrides);
    }
    ctx_.call_history.push_back({state.tool_name, state.arguments, value});
    return ids;
}

std::vector<NodeId> Session::record_tool_result(const CallRef& call,
                                                const nlohmann::json& value) {
    if (call.id >= calls_.size()) {
        throw ArmGateError("node-not-found",
                           "no call with id " + std::to_string(call.id));
    }
    SourceTrust st = ctx_.config.source_trust_for(calls_[call.id].tool_name);
    std::map<std::string, TrustLevel> overrides;
    for (const auto& [key, level] : st.field_overrides) {
        if (value.is_object() && value.contains(key)) overrides[key] = level;
    }
    return record_tool_result(call, value, st.base, overrides);
}

}  // namespace armgate
