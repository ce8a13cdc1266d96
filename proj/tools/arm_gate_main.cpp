#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "armgate/audit.hpp"
#include "armgate/capability.hpp"
#include "armgate/config.hpp"
#include "armgate/errors.hpp"
#include "armgate/gateway.hpp"
#include "armgate/harness.hpp"
#include "armgate/mock_tools.hpp"
#include "armgate/serve.hpp"

using namespace armgate;

namespace {

CapabilityToken default_token() {
    std::map<std::string, ToolPermission> perms;
    return CapabilityToken("default-empty", std::move(perms));
}

int cmd_serve(const std::string& upstream_cmd, const std::string& policy_path,
              const std::string& token_path, const std::string& audit_path,
              const std::string& mode_name, const std::string& threshold_name,
              const std::string& dump_graph) {
    PolicyConfig config = policy_path.empty() ? PolicyConfig()
                                              : PolicyConfig::load_file(policy_path);
    if (!threshold_name.empty()) {
        auto level = trust_from_name(threshold_name);
        if (!level) {
            std::cerr << "unknown trust level: " << threshold_name << "\n";
            return 2;
        }
        config.threshold = *level;
    }
    CapabilityToken token = token_path.empty()
                                ? default_token()
                                : CapabilityToken::load_file(token_path);
    EngineMode mode =
        mode_name == "flat" ? EngineMode::Flat : EngineMode::Graph;

    Session session(mode, config, token,
                    audit_path.empty()
                        ? std::nullopt
                        : std::optional<std::string>(audit_path));
    SubprocessUpstream upstream(upstream_cmd);
    ServeOptions opts;
    opts.dump_graph_path = dump_graph;
    serve_session(session, upstream, std::cin, std::cout, opts);
    return 0;
}

int cmd_scenarios(const std::string& mode, bool json) {
    bool run_flat = mode == "both" || mode == "flat";
    bool run_graph = mode == "both" || mode == "graph";
    RunAllReport report = run_all(run_flat, run_graph);
    if (json) {
        std::cout << report.to_json().dump(2) << "\n";
    } else {
        std::cout << report.to_table();
    }
    return report.differential_ok ? 0 : 1;
}

int cmd_bench(const std::string& scenario_name, size_t runs,
              size_t pad_nodes, bool json) {
    const Scenario& scenario = find_scenario(scenario_name);
    BenchStats stats = bench(scenario, runs, pad_nodes);
    if (json) {
        nlohmann::json j = {{"scenario", scenario.name},
                            {"runs", runs},
                            {"pad_nodes", pad_nodes},
                            {"graph_nodes", stats.graph_nodes},
                            {"samples", stats.samples},
                            {"median_us", stats.median_us},
                            {"p95_us", stats.p95_us},
                            {"max_us", stats.max_us}};
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "scenario " << scenario.name << ": median "
                  << stats.median_us << " us, p95 " << stats.p95_us
                  << " us, max " << stats.max_us << " us over "
                  << stats.samples << " evaluations (graph "
                  << stats.graph_nodes << " nodes)\n";
    }
    return 0;
}

int cmd_verify(const std::string& audit_path) {
    VerifyReport report = AuditLog::verify_file(audit_path);
    if (report.ok) {
        std::cout << "ok\n";
        return 0;
    }
    std::cout << "broken at index " << *report.first_broken_index << "\n";
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"arm-gate: provenance-aware policy gateway for tool calls"};
    app.require_subcommand(1);

    auto* serve = app.add_subcommand(
        "serve", "Mediate a client on stdio against an upstream tool server");
    std::string upstream_cmd, policy_path, token_path, audit_path;
    std::string mode = "graph", threshold, dump_graph;
    serve->add_option("--upstream", upstream_cmd,
                      "Command for the upstream tool server")
        ->required();
    serve->add_option("--policy", policy_path, "Policy config JSON file");
    serve->add_option("--token", token_path, "Capability token JSON file");
    serve->add_option("--audit", audit_path, "Audit log output path (JSONL)");
    serve->add_option("--mode", mode, "Engine mode: graph or flat")
        ->check(CLI::IsMember({"graph", "flat"}));
    serve->add_option("--threshold", threshold,
                      "Trust threshold (ToolDesc..SysInstr)");
    serve->add_option("--dump-graph", dump_graph,
                      "Write the session provenance graph here on exit");

    auto* scenarios = app.add_subcommand(
        "scenarios", "Run the built-in attack scenarios in both engines");
    std::string sc_mode = "both";
    bool sc_json = false;
    scenarios->add_option("--mode", sc_mode, "both, flat, or graph")
        ->check(CLI::IsMember({"both", "flat", "graph"}));
    scenarios->add_flag("--json", sc_json, "JSON report instead of a table");

    auto* bench_cmd =
        app.add_subcommand("bench", "Measure evaluation latency");
    std::string bench_scenario = "A2";
    size_t runs = 100;
    size_t pad_nodes = 0;
    bool bench_json = false;
    bench_cmd->add_option("--scenario", bench_scenario, "Scenario name");
    bench_cmd->add_option("--runs", runs, "Measured runs (after warm-up)")
        ->required();
    bench_cmd->add_option("--pad-nodes", pad_nodes,
                          "Extra data-field nodes linked into the sink");
    bench_cmd->add_flag("--json", bench_json, "JSON output");

    auto* verify = app.add_subcommand(
        "verify", "Verify an audit log's hash chain (exit 0/1)");
    std::string verify_path;
    verify->add_option("audit_file", verify_path, "Audit JSONL file")
        ->required();

    auto* mock = app.add_subcommand(
        "mock-tools", "Serve the built-in demo tools on stdio");

    CLI11_PARSE(app, argc, argv);

    try {
        if (serve->parsed()) {
            return cmd_serve(upstream_cmd, policy_path, token_path, audit_path,
                             mode, threshold, dump_graph);
        }
        if (scenarios->parsed()) return cmd_scenarios(sc_mode, sc_json);
        if (bench_cmd->parsed()) {
            if (runs == 0) {
                std::cerr << "bench requires --runs >= 1\n";
                return 2;
            }
            return cmd_bench(bench_scenario, runs, pad_nodes, bench_json);
        }
        if (verify->parsed()) return cmd_verify(verify_path);
        if (mock->parsed()) {
            MockUpstream upstream;
            run_tool_server(upstream, std::cin, std::cout);
            return 0;
        }
    } catch (const ArmGateError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
