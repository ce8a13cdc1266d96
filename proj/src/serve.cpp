#include "armgate/serve.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <csignal>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "armgate/errors.hpp"

namespace armgate {

namespace {

nlohmann::json rpc_error(const nlohmann::json& id, int code,
                         const std::string& message,
                         const nlohmann::json& data = nullptr) {
    nlohmann::json err = {{"code", code}, {"message", message}};
    if (!data.is_null()) err["data"] = data;
    return {{"jsonrpc", "2.0"}, {"id", id}, {"error", err}};
}

nlohmann::json rpc_result(const nlohmann::json& id,
                          const nlohmann::json& result) {
    return {{"jsonrpc", "2.0"}, {"id", id}, {"result", result}};
}

void emit(std::ostream& out, const nlohmann::json& msg) {
    out << msg.dump() << "\n";
    out.flush();
}

nlohmann::json tools_to_json(const std::vector<ToolInfo>& tools) {
    nlohmann::json arr = nlohmann::json::array();
    for (const ToolInfo& t : tools) {
        arr.push_back({{"name", t.name},
                       {"description", t.description},
                       {"inputSchema", t.input_schema}});
    }
    return {{"tools", arr}};
}

void observe_tools(Session& session, const std::vector<ToolInfo>& tools) {
    for (const ToolInfo& t : tools) {
        session.observe_tool_schema(t.name, t.input_schema);
    }
}

}  // namespace

void serve_session(Session& session, Upstream& upstream, std::istream& in,
                   std::ostream& out, const ServeOptions& opts) {
    // Prefetch so schema pins and L3 schemas exist before the first call
    // even if the client never lists tools itself.
    try {
        observe_tools(session, upstream.list_tools());
    } catch (const std::exception&) {
        // The client's own tools/list will retry; nothing to pin yet.
    }

    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json msg;
        try {
            msg = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception&) {
            emit(out, rpc_error(nullptr, -32700, "parse error"));
            continue;
        }
        bool is_notification = !msg.contains("id");
        nlohmann::json id = is_notification ? nlohmann::json() : msg["id"];
        std::string method = msg.value("method", "");
        nlohmann::json params = msg.contains("params")
                                    ? msg["params"]
                                    : nlohmann::json::object();

        if (method == "tools/list") {
            try {
                std::vector<ToolInfo> tools = upstream.list_tools();
                observe_tools(session, tools);
                if (!is_notification) {
                    emit(out, rpc_result(id, tools_to_json(tools)));
                }
            } catch (const std::exception& e) {
                if (!is_notification) {
                    emit(out, rpc_error(id, -32002,
                                        std::string("upstream failure: ") +
                                            e.what()));
                }
            }
            continue;
        }

        if (method == "tools/call") {
            ToolCallRequest req;
            req.tool_name = params.value("name", "");
            req.arguments = params.contains("arguments")
                                ? params["arguments"]
                                : nlohmann::json::object();
            if (!req.arguments.is_object()) {
                req.arguments = nlohmann::json::object();
            }
            Session::EvalOutcome outcome = session.evaluate_deferred(req);

            if (outcome.decision.outcome == Outcome::Deny) {
                session.finalize_audit(outcome.call);
                if (!is_notification) {
                    if (session.context().config.denial_detail ==
                        DenialDetail::Full) {
                        nlohmann::json data = {
                            {"rule", outcome.decision.rule()},
                            {"reason", outcome.decision.reason()},
                            {"layer", outcome.decision.denied_by}};
                        emit(out, rpc_error(id, -32001,
                                            "denied: " +
                                                outcome.decision.reason(),
                                            data));
                    } else {
                        emit(out,
                             rpc_error(id, -32001, "denied by policy"));
                    }
                }
                continue;
            }

            try {
                nlohmann::json result = upstream.call_tool(
                    req.tool_name, outcome.forwarded_arguments);
                session.record_tool_result(outcome.call, result);
                session.finalize_audit(outcome.call);
                if (!is_notification) emit(out, rpc_result(id, result));
            } catch (const std::exception& e) {
                session.finalize_audit(
                    outcome.call,
                    std::string("execution-failure: ") + e.what());
                if (!is_notification) {
                    emit(out, rpc_error(id, -32002,
                                        "upstream execution failed",
                                        {{"detail", e.what()}}));
                }
            }
            continue;
        }

        if (method == "session/user_message") {
            session.add_user_message(params.value("text", ""));
            if (!is_notification) {
                emit(out, rpc_result(id, nlohmann::json::object()));
            }
            continue;
        }

        if (!is_notification) {
            emit(out, rpc_error(id, -32601, "method not found: " + method));
        }
    }

    if (!opts.dump_graph_path.empty()) {
        std::ofstream dump(opts.dump_graph_path);
        dump << session.graph().snapshot().dump(2) << "\n";
    }
}

void run_tool_server(Upstream& upstream, std::istream& in, std::ostream& out) {
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json msg;
        try {
            msg = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception&) {
            emit(out, rpc_error(nullptr, -32700, "parse error"));
            continue;
        }
        if (!msg.contains("id")) continue;
        nlohmann::json id = msg["id"];
        std::string method = msg.value("method", "");
        nlohmann::json params = msg.contains("params")
                                    ? msg["params"]
                                    : nlohmann::json::object();
        try {
            if (method == "tools/list") {
                emit(out, rpc_result(id, tools_to_json(upstream.list_tools())));
            } else if (method == "tools/call") {
                nlohmann::json args = params.contains("arguments")
                                          ? params["arguments"]
                                          : nlohmann::json::object();
                emit(out, rpc_result(id, upstream.call_tool(
                                             params.value("name", ""), args)));
            } else {
                emit(out, rpc_error(id, -32601, "method not found: " + method));
            }
        } catch (const std::exception& e) {
            emit(out, rpc_error(id, -32000, e.what()));
        }
    }
}

SubprocessUpstream::SubprocessUpstream(const std::string& command) {
    int to_child[2];
    int from_child[2];
    if (pipe(to_child) != 0 || pipe(from_child) != 0) {
        throw ArmGateError("upstream-io", "pipe creation failed");
    }
    pid_ = fork();
    if (pid_ < 0) {
        throw ArmGateError("upstream-io", "fork failed");
    }
    if (pid_ == 0) {
        dup2(to_child[0], STDIN_FILENO);
        dup2(from_child[1], STDOUT_FILENO);
        close(to_child[0]);
        close(to_child[1]);
        close(from_child[0]);
        close(from_child[1]);
        execl("/bin/sh", "sh", "-c", command.c_str(), (char*)nullptr);
        _exit(127);
    }
    close(to_child[0]);
    close(from_child[1]);
    to_child_ = to_child[1];
    from_child_ = from_child[0];
}

SubprocessUpstream::~SubprocessUpstream() {
    if (to_child_ >= 0) close(to_child_);
    if (from_child_ >= 0) close(from_child_);
    if (pid_ > 0) {
        int status = 0;
        if (waitpid(pid_, &status, WNOHANG) == 0) {
            kill(pid_, SIGTERM);
            waitpid(pid_, &status, 0);
        }
    }
}

std::string SubprocessUpstream::read_line() {
    for (;;) {
        size_t nl = buffer_.find('\n');
        if (nl != std::string::npos) {
            std::string line = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            return line;
        }
        char chunk[4096];
        ssize_t n = read(from_child_, chunk, sizeof(chunk));
        if (n <= 0) {
            throw ArmGateError("upstream-io", "upstream closed its stream");
        }
        buffer_.append(chunk, static_cast<size_t>(n));
    }
}

nlohmann::json SubprocessUpstream::rpc(const std::string& method,
                                       const nlohmann::json& params) {
    nlohmann::json request = {{"jsonrpc", "2.0"},
                              {"id", next_id_++},
                              {"method", method},
                              {"params", params}};
    std::string line = request.dump() + "\n";
    size_t written = 0;
    while (written < line.size()) {
        ssize_t n = write(to_child_, line.data() + written,
                          line.size() - written);
        if (n <= 0) {
            throw ArmGateError("upstream-io", "write to upstream failed");
        }
        written += static_cast<size_t>(n);
    }
    nlohmann::json response = nlohmann::json::parse(read_line());
    if (response.contains("error")) {
        throw std::runtime_error(
            response["error"].value("message", "upstream error"));
    }
    return response["result"];
}

std::vector<ToolInfo> SubprocessUpstream::list_tools() {
    nlohmann::json result = rpc("tools/list", nlohmann::json::object());
    std::vector<ToolInfo> tools;
    for (const auto& t : result["tools"]) {
        ToolInfo info;
        info.name = t.value("name", "");
        info.description = t.value("description", "");
        if (t.contains("inputSchema")) info.input_schema = t["inputSchema"];
        tools.push_back(std::move(info));
    }
    return tools;
}

nlohmann::json SubprocessUpstream::call_tool(const std::string& name,
                                             const nlohmann::json& arguments) {
    return rpc("tools/call", {{"name", name}, {"arguments", arguments}});
}

}  // namespace armgate
