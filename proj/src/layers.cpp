#include "armgate/layers.hpp"

#include <algorithm>

#include "armgate/patterns.hpp"
#include "armgate/sha256.hpp"

namespace armgate {

LayerResult LayerResult::pass(std::string layer) {
    LayerResult r;
    r.verdict = Verdict::Pass;
    r.layer = std::move(layer);
    return r;
}

LayerResult LayerResult::deny(std::string layer, std::string rule,
                              std::string reason) {
    LayerResult r;
    r.verdict = Verdict::Deny;
    r.layer = std::move(layer);
    r.rule = std::move(rule);
    r.reason = std::move(reason);
    return r;
}

nlohmann::json LayerResult::to_json() const {
    nlohmann::json j;
    j["layer"] = layer;
    j["verdict"] = verdict == Verdict::Pass ? "Pass" : "Deny";
    if (verdict == Verdict::Deny) {
        j["rule"] = rule;
        j["reason"] = reason;
    }
    return j;
}

const LayerResult* Decision::denying_result() const {
    if (outcome == Outcome::Allow || layer_results.empty()) return nullptr;
    return &layer_results.back();
}

std::string Decision::rule() const {
    const LayerResult* r = denying_result();
    return r ? r->rule : "";
}

std::string Decision::reason() const {
    const LayerResult* r = denying_result();
    return r ? r->reason : "";
}

nlohmann::json Decision::to_json() const {
    nlohmann::json results = nlohmann::json::array();
    for (const LayerResult& r : layer_results) results.push_back(r.to_json());
    nlohmann::json j;
    j["outcome"] = outcome == Outcome::Allow ? "Allow" : "Deny";
    j["layer_results"] = results;
    if (!denied_by.empty()) j["denied_by"] = denied_by;
    if (!flags.empty()) j["flags"] = flags;
    return j;
}

namespace {

// An argument's scannable text: the raw string for string values, the
// canonical serialization otherwise (credentials hide in nested values).
std::string argument_text(const nlohmann::json& value) {
    return value.is_string() ? value.get<std::string>() : value.dump();
}

const std::vector<CredentialPattern>& compiled_patterns(
    const EvaluationContext& ctx) {
    if (!ctx.compiled_credentials) {
        ctx.compiled_credentials =
            compile_credential_patterns(ctx.config.credential_patterns);
    }
    return *ctx.compiled_credentials;
}

}  // namespace

LayerResult l1_evaluate(const ToolCallRequest& req, EvaluationContext& ctx) {
    const PolicyConfig& cfg = ctx.config;

    for (auto it = req.arguments.begin(); it != req.arguments.end(); ++it) {
        if (it.value().is_string() &&
            it.value().get<std::string>().size() > cfg.max_string_length) {
            return LayerResult::deny(
                "L1", "HB-1",
                "argument '" + it.key() + "' exceeds " +
                    std::to_string(cfg.max_string_length) + " characters");
        }
    }

    for (auto it = req.arguments.begin(); it != req.arguments.end(); ++it) {
        if (!it.value().is_string()) continue;
        std::string value = it.value().get<std::string>();
        bool path_like =
            cfg.sd_path_names.count(it.key()) || looks_like_path(value);
        if (path_like && matches_sensitive_path(value, cfg.sensitive_paths,
                                                cfg.home_prefix)) {
            return LayerResult::deny("L1", "HB-2",
                                     "argument '" + it.key() +
                                         "' targets a protected path");
        }
    }

    auto count = ctx.call_counts.find(req.tool_name);
    if (count != ctx.call_counts.end() &&
        count->second >= cfg.max_calls_per_tool) {
        return LayerResult::deny(
            "L1", "HB-3",
            "tool '" + req.tool_name + "' exceeded " +
                std::to_string(cfg.max_calls_per_tool) + " calls this session");
    }

    const auto& patterns = compiled_patterns(ctx);
    for (auto it = req.arguments.begin(); it != req.arguments.end(); ++it) {
        auto hit = match_credential(argument_text(it.value()), patterns);
        if (hit) {
            return LayerResult::deny("L1", "HB-4",
                                     "argument '" + it.key() +
                                         "' matches credential pattern " +
                                         *hit);
        }
    }

    auto schema = ctx.tool_schemas.find(req.tool_name);
    if (schema != ctx.tool_schemas.end()) {
        std::string digest = sha256_of_json(schema->second);
        auto pinned = ctx.pinned_schema_hashes.find(req.tool_name);
        if (pinned == ctx.pinned_schema_hashes.end()) {
            ctx.pinned_schema_hashes[req.tool_name] = digest;
        } else if (pinned->second != digest) {
            return LayerResult::deny(
                "L1", "HB-5",
                "schema for '" + req.tool_name +
                    "' changed after being pinned on first sight");
        }
    }

    return LayerResult::pass("L1");
}

LayerResult l2_flat_evaluate(const ToolCallRequest& req,
                             const EvaluationContext& ctx) {
    const PolicyConfig& cfg = ctx.config;
    auto grounded = [&](const std::string& value) {
        for (const HistoryEntry& h : ctx.call_history) {
            if (argument_text(h.output).find(value) != std::string::npos) {
                return true;
            }
            for (auto it = h.arguments.begin(); it != h.arguments.end(); ++it) {
                if (argument_text(it.value()).find(value) !=
                    std::string::npos) {
                    return true;
                }
            }
        }
        for (const std::string& msg : ctx.user_messages) {
            if (msg.find(value) != std::string::npos) return true;
        }
        return false;
    };

    for (auto it = req.arguments.begin(); it != req.arguments.end(); ++it) {
        if (!it.value().is_string()) continue;
        std::string value = it.value().get<std::string>();
        if (value.size() < cfg.groundedness_threshold) continue;
        if (!grounded(value)) {
            return LayerResult::deny(
                "L2", "L2-ungrounded",
                "argument '" + it.key() +
                    "' does not occur in prior history or user messages");
        }
    }
    return LayerResult::pass("L2");
}

LayerResult l2g_evaluate(NodeId call_node, const ProvenanceGraph& graph,
                         TrustLevel threshold) {
    if (!graph.counterfactual_chains(call_node).empty()) {
        return LayerResult::deny("L2G", "L2G-counterfactual",
                                 "causality laundering detected");
    }
    TrustLevel mt = graph.min_trust(call_node);
    if (trust_compare(mt, threshold) < 0) {
        auto witness = graph.min_trust_witness(call_node);
        bool on_field =
            witness && graph.node(*witness).kind == NodeKind::DataField;
        std::string rule = on_field ? "L2G-trust-on-field" : "L2G-trust";
        std::string reason = "minimum reachable trust " + trust_name(mt) +
                             " is below threshold " + trust_name(threshold);
        if (on_field) {
            reason += " (via field '" + graph.node(*witness).field_key + "')";
        }
        return LayerResult::deny("L2G", rule, reason);
    }
    return LayerResult::pass("L2G");
}

LayerResult l3_evaluate(const ToolCallRequest& req,
                        const EvaluationContext& ctx,
                        std::vector<std::string>* flags) {
    const PolicyConfig& cfg = ctx.config;
    auto schema_it = ctx.tool_schemas.find(req.tool_name);
    if (schema_it == ctx.tool_schemas.end()) return LayerResult::pass("L3");
    const nlohmann::json& schema = schema_it->second;

    const auto& patterns = compiled_patterns(ctx);
    for (auto it = req.arguments.begin(); it != req.arguments.end(); ++it) {
        if (!cfg.sd_note_names.count(it.key())) continue;
        std::string text = argument_text(it.value());
        if (text.size() > 100) {
            return LayerResult::deny("L3", "SD-1",
                                     "free-text argument '" + it.key() +
                                         "' exceeds 100 characters");
        }
        if (match_credential(text, patterns)) {
            return LayerResult::deny("L3", "SD-1",
                                     "free-text argument '" + it.key() +
                                         "' contains a credential");
        }
    }

    for (auto it = req.arguments.begin(); it != req.arguments.end(); ++it) {
        if (!cfg.sd_path_names.count(it.key()) || !it.value().is_string()) {
            continue;
        }
        if (matches_sensitive_path(it.value().get<std::string>(),
                                   cfg.sensitive_paths, cfg.home_prefix)) {
            return LayerResult::deny("L3", "SD-2",
                                     "path argument '" + it.key() +
                                         "' targets a protected path");
        }
    }

    std::set<std::string> required;
    if (schema.contains("required")) {
        for (const auto& r : schema["required"]) {
            required.insert(r.get<std::string>());
        }
    }
    for (auto it = req.arguments.begin(); it != req.arguments.end(); ++it) {
        if (required.count(it.key()) || !it.value().is_string()) continue;
        if (it.value().get<std::string>().size() > 50) {
            return LayerResult::deny("L3", "SD-3",
                                     "optional argument '" + it.key() +
                                         "' exceeds 50 characters");
        }
    }

    if (flags) {
        for (auto it = req.arguments.begin(); it != req.arguments.end(); ++it) {
            if (cfg.sd_url_names.count(it.key())) {
                flags->push_back("SD-4: argument '" + it.key() +
                                 "' flagged for logging");
            }
        }
    }
    return LayerResult::pass("L3");
}

LayerResult l4_evaluate(const ToolCallRequest& req,
                        const EvaluationContext& ctx) {
    if (!ctx.token) {
        return LayerResult::deny("L4", "L4-not-granted",
                                 "no capability token bound to this session");
    }
    return authorize(*ctx.token, req, ctx.call_counts);
}

Decision compose_layers(
    const std::vector<std::pair<std::string, LayerFn>>& layers) {
    Decision decision;
    decision.outcome = Outcome::Allow;
    for (const auto& [layer_id, fn] : layers) {
        LayerResult r = fn(decision.flags);
        decision.layer_results.push_back(r);
        if (r.verdict == Verdict::Deny) {
            decision.outcome = Outcome::Deny;
            decision.denied_by = layer_id;
            break;
        }
    }
    return decision;
}

Decision pipeline_evaluate(const ToolCallRequest& req, EvaluationContext& ctx,
                           const ProvenanceGraph* graph,
                           std::optional<NodeId> call_node, EngineMode mode) {
    std::vector<std::pair<std::string, LayerFn>> layers;
    const PolicyConfig& cfg = ctx.config;

    if (cfg.layer_l1) {
        layers.emplace_back("L1", [&](std::vector<std::string>&) {
            return l1_evaluate(req, ctx);
        });
    }
    if (cfg.layer_l2) {
        if (mode == EngineMode::Graph) {
            layers.emplace_back("L2G", [&](std::vector<std::string>&) {
                return l2g_evaluate(*call_node, *graph, cfg.threshold);
            });
        } else {
            layers.emplace_back("L2", [&](std::vector<std::string>&) {
                return l2_flat_evaluate(req, ctx);
            });
        }
    }
    if (cfg.layer_l3) {
        layers.emplace_back("L3", [&](std::vector<std::string>& flags) {
            return l3_evaluate(req, ctx, &flags);
        });
    }
    if (cfg.layer_l4) {
        layers.emplace_back("L4", [&](std::vector<std::string>&) {
            return l4_evaluate(req, ctx);
        });
    }
    return compose_layers(layers);
}

}  // namespace armgate
