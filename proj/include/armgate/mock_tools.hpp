#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace armgate {

struct ToolInfo {
    std::string name;
    std::string description;
    nlohmann::json input_schema;
};

// Upstream tool server as the gateway sees it. call_tool throws on
// execution failure.
class Upstream {
public:
    virtual ~Upstream() = default;
    virtual std::vector<ToolInfo> list_tools() = 0;
    virtual nlohmann::json call_tool(const std::string& name,
                                     const nlohmann::json& arguments) = 0;
};

// Deterministic in-process tools with canned outputs, instrumented so
// tests can count exactly what reached the upstream.
class MockUpstream : public Upstream {
public:
    std::vector<ToolInfo> list_tools() override;
    nlohmann::json call_tool(const std::string& name,
                             const nlohmann::json& arguments) override;

    uint64_t list_count = 0;
    uint64_t forward_count = 0;
    // When set, the named tool throws to simulate an upstream failure.
    std::string failing_tool;
    // When set, replaces the advertised schemas (schema-change drills).
    std::function<std::vector<ToolInfo>()> list_override;
};

const std::vector<ToolInfo>& mock_tool_catalog();

}  // namespace armgate
