#include <doctest.h>

#include <functional>
#include <set>
#include <vector>

#include <nlohmann/json.hpp>

#include "armgate/errors.hpp"
#include "armgate/graph.hpp"

using namespace armgate;
using nlohmann::json;

namespace {

std::string error_code(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const ArmGateError& e) {
        return e.code();
    }
    return "";
}

bool has_edge(const ProvenanceGraph& g, NodeId src, NodeId dst,
              EdgeKind kind) {
    for (const Edge& e : g.edges()) {
        if (e.src == src && e.dst == dst && e.kind == kind) return true;
    }
    return false;
}

}  // namespace

TEST_CASE("call node with data inputs creates typed input edges") {
    ProvenanceGraph g;
    NodeId c1 = g.add_call_node("read_file", {{"path", "/tmp/x"}}, {});
    auto out = g.record_output(c1, "hello world", TrustLevel::ToolTrusted, {});
    REQUIRE(out.size() == 1);
    NodeId d1 = out[0];
    NodeId c2 = g.add_call_node("send_email", {{"body", "hello world"}}, {d1});

    CHECK(g.node(c1).kind == NodeKind::Call);
    CHECK(g.node(c1).tool_name == "read_file");
    CHECK(g.node(d1).kind == NodeKind::Data);
    CHECK(g.node(d1).value == json("hello world"));
    CHECK(g.node(d1).trust == TrustLevel::ToolTrusted);
    CHECK(has_edge(g, c1, d1, EdgeKind::DirectOutput));
    CHECK(has_edge(g, d1, c2, EdgeKind::InputTo));
    CHECK(g.node_count() == 3);
    CHECK(g.edge_count() == 2);
}

TEST_CASE("ids are strictly increasing and edges point forward") {
    ProvenanceGraph g;
    NodeId c1 = g.add_call_node("a", {}, {});
    auto out = g.record_output(c1, json{{"k", "v"}}, TrustLevel::UserInput, {});
    NodeId den = g.add_denied_action("b", {}, "nope");
    NodeId c2 = g.add_call_node("c", {}, {out[0], out[1]});
    g.link_counterfactual(den, c2);

    uint64_t prev_ts = 0;
    for (NodeId id = 0; id < g.node_count(); ++id) {
        CHECK(g.node(id).id == id);
        CHECK(g.node(id).timestamp >= prev_ts);
        prev_ts = g.node(id).timestamp;
    }
    for (const Edge& e : g.edges()) CHECK(e.src < e.dst);
}

TEST_CASE("record_output decomposes objects into field nodes") {
    ProvenanceGraph g;
    NodeId call = g.add_call_node("get_contact", {{"name", "Alice"}}, {});
    json value = {{"name", "Alice"}, {"email", "attacker@evil.com"}};
    auto ids = g.record_output(call, value, TrustLevel::ToolTrusted,
                               {{"email", TrustLevel::ToolUntrusted}});
    REQUIRE(ids.size() == 3);
    NodeId data = ids[0];

    CHECK(g.node(data).kind == NodeKind::Data);
    CHECK(g.node(data).value == value);
    CHECK(g.node(data).trust == TrustLevel::ToolTrusted);

    // Field ids follow key order (email before name) and sit below the
    // data id so FieldOf edges keep the forward-id invariant.
    NodeId f_email = ids[1];
    NodeId f_name = ids[2];
    CHECK(g.node(f_email).kind == NodeKind::DataField);
    CHECK(g.node(f_email).field_key == "email");
    CHECK(g.node(f_email).value == json("attacker@evil.com"));
    CHECK(g.node(f_email).trust == TrustLevel::ToolUntrusted);
    CHECK(g.node(f_name).field_key == "name");
    CHECK(g.node(f_name).trust == TrustLevel::ToolTrusted);
    CHECK(f_email < data);
    CHECK(f_name < data);
    CHECK(has_edge(g, call, data, EdgeKind::DirectOutput));
    CHECK(has_edge(g, f_email, data, EdgeKind::FieldOf));
    CHECK(has_edge(g, f_name, data, EdgeKind::FieldOf));
}

TEST_CASE("scalar output yields a single data node") {
    ProvenanceGraph g;
    NodeId call = g.add_call_node("read_emails", {}, {});
    auto ids = g.record_output(call, "Wire $50k", TrustLevel::ToolUntrusted, {});
    CHECK(ids.size() == 1);
    CHECK(g.node(ids[0]).kind == NodeKind::Data);
    CHECK(g.node_count() == 2);
}

TEST_CASE("record_output rejects bad targets and overrides") {
    ProvenanceGraph g;
    NodeId call = g.add_call_node("t", {}, {});
    auto ids = g.record_output(call, json{{"a", 1}}, TrustLevel::SysInstr, {});

    CHECK(error_code([&] {
              g.record_output(ids[0], "x", TrustLevel::SysInstr, {});
          }) == "not-a-call");
    CHECK(error_code([&] {
              g.record_output(call, json{{"a", 1}}, TrustLevel::SysInstr,
                              {{"missing", TrustLevel::ToolDesc}});
          }) == "unknown-field-override");
    // Override on a scalar output has no field to attach to.
    CHECK(error_code([&] {
              g.record_output(call, "scalar", TrustLevel::SysInstr,
                              {{"a", TrustLevel::ToolDesc}});
          }) == "unknown-field-override");
}

TEST_CASE("call inputs must be existing data nodes") {
    ProvenanceGraph g;
    NodeId call = g.add_call_node("t", {}, {});
    CHECK(error_code([&] { g.add_call_node("u", {}, {99}); }) ==
          "dangling-input");
    CHECK(error_code([&] { g.add_call_node("u", {}, {call}); }) ==
          "edge-kind-violation");
    NodeId den = g.add_denied_action("v", {}, "r");
    CHECK(error_code([&] { g.add_call_node("u", {}, {den}); }) ==
          "edge-kind-violation");
}

TEST_CASE("denied action node carries the reason and arms the slot") {
    ProvenanceGraph g;
    CHECK_FALSE(g.peek_latest_denial().has_value());
    NodeId d1 = g.add_denied_action("read_file", {{"path", "/etc/shadow"}},
                                    "sensitive path");
    CHECK(g.node(d1).kind == NodeKind::DeniedAction);
    CHECK(g.node(d1).denial_reason == "sensitive path");
    CHECK(g.peek_latest_denial() == d1);

    // A newer denial replaces the slot; take() empties it exactly once.
    NodeId d2 = g.add_denied_action("send_email", {}, "other");
    CHECK(g.peek_latest_denial() == d2);
    CHECK(g.take_latest_denial() == d2);
    CHECK_FALSE(g.take_latest_denial().has_value());
}

TEST_CASE("link_counterfactual is typed and idempotent") {
    ProvenanceGraph g;
    NodeId den = g.add_denied_action("a", {}, "r");
    NodeId call = g.add_call_node("b", {}, {});
    g.link_counterfactual(den, call);
    g.link_counterfactual(den, call);
    CHECK(g.edge_count() == 1);
    CHECK(has_edge(g, den, call, EdgeKind::Counterfactual));

    NodeId call2 = g.add_call_node("c", {}, {});
    CHECK(error_code([&] { g.link_counterfactual(call, call2); }) ==
          "edge-kind-violation");
    CHECK(error_code([&] { g.link_counterfactual(den, den); }) ==
          "edge-kind-violation");
    CHECK(error_code([&] { g.link_counterfactual(den, 99); }) ==
          "node-not-found");
}

TEST_CASE("ancestors walks edges backwards excluding the start") {
    ProvenanceGraph g;
    NodeId c1 = g.add_call_node("read_file", {}, {});
    auto out1 = g.record_output(c1, "contents", TrustLevel::ToolTrusted, {});
    NodeId c2 = g.add_call_node("send_email", {}, {out1[0]});

    CHECK(g.ancestors(c1).empty());
    CHECK(g.ancestors(out1[0]) == std::set<NodeId>{c1});
    CHECK(g.ancestors(c2) == std::set<NodeId>{c1, out1[0]});
    CHECK(error_code([&] { g.ancestors(42); }) == "node-not-found");
}

TEST_CASE("min_trust follows transitive chains") {
    // c1 -> d1(ToolUntrusted) -> c2 -> d2(ToolTrusted) -> c3: the sink
    // inherits the weakest upstream label even through a trusted hop.
    ProvenanceGraph g;
    NodeId c1 = g.add_call_node("read_emails", {}, {});
    auto d1 = g.record_output(c1, "wire money", TrustLevel::ToolUntrusted, {});
    NodeId c2 = g.add_call_node("format_response", {}, {d1[0]});
    auto d2 = g.record_output(c2, "Summary: wire money",
                              TrustLevel::ToolTrusted, {});
    NodeId c3 = g.add_call_node("send_email", {}, {d2[0]});

    CHECK(g.min_trust(c3) == TrustLevel::ToolUntrusted);
    CHECK(g.min_trust(c2) == TrustLevel::ToolUntrusted);
    CHECK(g.min_trust(d2[0]) == TrustLevel::ToolUntrusted);
    CHECK(g.min_trust_witness(c3) == d1[0]);
}

TEST_CASE("min_trust with no data ancestors is the top element") {
    ProvenanceGraph g;
    NodeId c1 = g.add_call_node("t", {}, {});
    CHECK(g.min_trust(c1) == TrustLevel::SysInstr);
    CHECK_FALSE(g.min_trust_witness(c1).has_value());
}

TEST_CASE("witness prefers whole data nodes over fields, then lowest id") {
    ProvenanceGraph g;
    NodeId c1 = g.add_call_node("get_contact", {}, {});
    auto ids = g.record_output(c1, json{{"email", "e"}, {"name", "n"}},
                               TrustLevel::ToolUntrusted, {});
    NodeId data = ids[0];
    NodeId c2 = g.add_call_node("send_email", {}, {data});
    // data and both fields are ToolUntrusted ancestors; the Data node wins.
    CHECK(g.min_trust(c2) == TrustLevel::ToolUntrusted);
    CHECK(g.min_trust_witness(c2) == data);

    // Linking only the low-trust field makes the field the witness.
    ProvenanceGraph g2;
    NodeId b1 = g2.add_call_node("get_contact", {}, {});
    auto ids2 = g2.record_output(b1, json{{"email", "e"}, {"name", "n"}},
                                 TrustLevel::ToolTrusted,
                                 {{"email", TrustLevel::ToolUntrusted}});
    NodeId f_email = ids2[1];
    NodeId b2 = g2.add_call_node("send_email", {}, {f_email});
    CHECK(g2.min_trust(b2) == TrustLevel::ToolUntrusted);
    CHECK(g2.min_trust_witness(b2) == f_email);
    CHECK(g2.node(f_email).kind == NodeKind::DataField);
}

TEST_CASE("counterfactual chain of length one") {
    ProvenanceGraph g;
    NodeId den = g.add_denied_action("read_file", {}, "sensitive path");
    NodeId call = g.add_call_node("send_email", {}, {});
    g.link_counterfactual(den, call);
    auto chains = g.counterfactual_chains(call);
    REQUIRE(chains.size() == 1);
    CHECK(chains[0] == std::vector<NodeId>{den, call});
}

TEST_CASE("counterfactual influence survives laundering through calls") {
    // denial -> c2 -> d2 -> c3: the sink never touched the denial directly
    // but a path still exists.
    ProvenanceGraph g;
    NodeId den = g.add_denied_action("read_file", {}, "r");
    NodeId c2 = g.add_call_node("probe", {}, {});
    g.link_counterfactual(den, c2);
    auto d2 = g.record_output(c2, "denied result", TrustLevel::ToolTrusted, {});
    NodeId c3 = g.add_call_node("send_email", {}, {d2[0]});

    auto chains = g.counterfactual_chains(c3);
    REQUIRE(chains.size() == 1);
    CHECK(chains[0] == std::vector<NodeId>{den, c2, d2[0], c3});
    CHECK(g.counterfactual_chains(c2).size() == 1);
}

TEST_CASE("one shortest chain per denial origin, ordered by origin id") {
    ProvenanceGraph g;
    NodeId den1 = g.add_denied_action("a", {}, "r1");
    NodeId c1 = g.add_call_node("x", {}, {});
    g.link_counterfactual(den1, c1);
    auto d1 = g.record_output(c1, "v", TrustLevel::SysInstr, {});
    NodeId den2 = g.add_denied_action("b", {}, "r2");
    NodeId sink = g.add_call_node("y", {}, {d1[0]});
    g.link_counterfactual(den2, sink);

    auto chains = g.counterfactual_chains(sink);
    REQUIRE(chains.size() == 2);
    CHECK(chains[0].front() == den1);
    CHECK(chains[0] == std::vector<NodeId>{den1, c1, d1[0], sink});
    CHECK(chains[1] == std::vector<NodeId>{den2, sink});

    // Adding a direct link from den1 shortens its chain to length one.
    g.link_counterfactual(den1, sink);
    chains = g.counterfactual_chains(sink);
    REQUIRE(chains.size() == 2);
    CHECK(chains[0] == std::vector<NodeId>{den1, sink});

    NodeId lone = g.add_call_node("z", {}, {});
    CHECK(g.counterfactual_chains(lone).empty());
    auto data = g.record_output(lone, "s", TrustLevel::SysInstr, {});
    CHECK(error_code([&] { g.counterfactual_chains(data[0]); }) ==
          "not-a-call");
}

TEST_CASE("snapshot lists nodes and edges deterministically") {
    ProvenanceGraph g;
    NodeId c1 = g.add_call_node("read_file", {{"path", "/tmp/x"}}, {});
    auto out = g.record_output(c1, json{{"k", "v"}}, TrustLevel::UserInput, {});
    NodeId den = g.add_denied_action("send_email", {}, "because");
    NodeId c2 = g.add_call_node("send_email", {}, {out[1]});
    g.link_counterfactual(den, c2);

    json snap = g.snapshot();
    REQUIRE(snap.contains("nodes"));
    REQUIRE(snap.contains("edges"));
    CHECK(snap["nodes"].size() == g.node_count());
    CHECK(snap["edges"].size() == g.edge_count());
    for (size_t i = 0; i + 1 < snap["nodes"].size(); ++i) {
        CHECK(snap["nodes"][i]["id"].get<NodeId>() <
              snap["nodes"][i + 1]["id"].get<NodeId>());
    }
    CHECK(snap["nodes"][0]["kind"] == "Call");
    CHECK(snap["nodes"][0]["tool_name"] == "read_file");
    bool saw_field = false;
    bool saw_denial = false;
    for (const json& n : snap["nodes"]) {
        if (n["kind"] == "DataField") {
            saw_field = true;
            CHECK(n.contains("field_key"));
            CHECK(n.contains("trust"));
        }
        if (n["kind"] == "DeniedAction") {
            saw_denial = true;
            CHECK(n["denial_reason"] == "because");
        }
    }
    CHECK(saw_field);
    CHECK(saw_denial);
    CHECK(g.snapshot() == snap);
}
