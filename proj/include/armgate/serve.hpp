#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "armgate/gateway.hpp"
#include "armgate/mock_tools.hpp"

namespace armgate {

struct ServeOptions {
    std::string dump_graph_path;  // empty: no dump
};

// Mediation loop: newline-delimited JSON-RPC 2.0 requests on `in`,
// responses on `out`, one upstream per session. Returns at end of input.
void serve_session(Session& session, Upstream& upstream, std::istream& in,
                   std::ostream& out, const ServeOptions& opts = {});

// The upstream side of the same protocol, exposing an Upstream over a
// stream pair. Used by the bundled demo tool server and by tests.
void run_tool_server(Upstream& upstream, std::istream& in, std::ostream& out);

// Upstream backed by a child process that speaks the wire protocol on its
// standard streams. The command runs under /bin/sh -c.
class SubprocessUpstream : public Upstream {
public:
    explicit SubprocessUpstream(const std::string& command);
    ~SubprocessUpstream() override;
    SubprocessUpstream(const SubprocessUpstream&) = delete;
    SubprocessUpstream& operator=(const SubprocessUpstream&) = delete;

    std::vector<ToolInfo> list_tools() override;
    nlohmann::json call_tool(const std::string& name,
                             const nlohmann::json& arguments) override;

private:
    nlohmann::json rpc(const std::string& method,
                       const nlohmann::json& params);
    std::string read_line();

    int pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string buffer_;
    uint64_t next_id_ = 1;
};

}  // namespace armgate
