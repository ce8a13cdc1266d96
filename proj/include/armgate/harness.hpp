#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "armgate/gateway.hpp"
#include "armgate/layers.hpp"

namespace armgate {

struct ScenarioStep {
    std::string tool;
    nlohmann::json arguments;
};

// A scripted agent trajectory. The last step is the sink-bound action
// whose denial means "defended".
struct Scenario {
    std::string name;
    std::string title;
    std::string user_message;
    std::vector<ScenarioStep> steps;
    nlohmann::json token_spec;
};

struct StepReport {
    std::string tool;
    Outcome outcome = Outcome::Allow;
    std::string rule;
    std::string layer;
};

struct ScenarioReport {
    std::string scenario;
    EngineMode mode = EngineMode::Graph;
    bool blocked = false;
    std::string denying_rule;
    std::string root_cause;
    bool audit_ok = false;
    std::vector<StepReport> steps;
    double median_us = 0;
    double p95_us = 0;
    double max_us = 0;

    nlohmann::json to_json() const;
};

struct RunAllReport {
    std::vector<ScenarioReport> reports;
    bool differential_ok = false;

    nlohmann::json to_json() const;
    std::string to_table() const;
};

struct BenchStats {
    double median_us = 0;
    double p95_us = 0;
    double max_us = 0;
    size_t samples = 0;
    size_t graph_nodes = 0;
};

const std::vector<Scenario>& builtin_scenarios();
const Scenario& find_scenario(const std::string& name);

// Trust labels and layer defaults the scenarios are defined against.
PolicyConfig harness_policy();
CapabilityToken harness_token(const Scenario& s);

ScenarioReport run_scenario(const Scenario& s, EngineMode mode);
ScenarioReport run_scenario(const Scenario& s, EngineMode mode,
                            const PolicyConfig& config);

// "Attack blocked / attack missed" matrix over A1..A3 plus control rows.
// differential_ok iff the graph engine blocks all three attacks and the
// flat engine misses all three.
RunAllReport run_all(bool run_flat, bool run_graph);

// Latency of session.evaluate over `runs` fresh scenario executions after
// warm-up. pad_nodes > 0 links a synthetic data object of that many
// fields into the sink call to grow the traversed graph.
BenchStats bench(const Scenario& s, size_t runs, size_t pad_nodes = 0);

std::string root_cause_for_rule(const std::string& rule);

}  // namespace armgate
