#include <doctest.h>

#include <random>

#include "armgate/capability.hpp"
#include "armgate/errors.hpp"
#include "oracles.hpp"

using namespace armgate;
using nlohmann::json;

namespace {

CapabilityToken sample_root() {
    ToolPermission send;
    send.tool_name = "send_email";
    send.call_budget = 10;
    send.blocked_argument_keys = {"bcc"};
    send.value_constraints = {{"to", {"a@x.com", "b@x.com"}}};
    ToolPermission read;
    read.tool_name = "read_file";
    return CapabilityToken("root", {{"send_email", send},
                                    {"read_file", read}});
}

std::string attenuate_code(const CapabilityToken& parent,
                           const AttenuationSpec& spec) {
    try {
        attenuate(parent, spec, "child");
    } catch (const ArmGateError& e) {
        return e.code();
    }
    return "";
}

}  // namespace

TEST_CASE("attenuation narrows and records lineage") {
    CapabilityToken root = sample_root();
    AttenuationSpec spec;
    spec.drop_tools = {"read_file"};
    ToolRestriction r;
    r.call_budget = std::optional<uint64_t>(3);
    r.blocked_argument_keys = std::set<std::string>{"bcc", "cc"};
    r.value_constraints =
        std::map<std::string, std::set<std::string>>{{"to", {"a@x.com"}}};
    spec.adjust = {{"send_email", r}};

    CapabilityToken child = attenuate(root, spec, "child");
    CHECK(child.token_id() == "child");
    CHECK(child.parent_id() == "root");
    CHECK(child.find("read_file") == nullptr);
    const ToolPermission* p = child.find("send_email");
    REQUIRE(p != nullptr);
    CHECK(p->call_budget == 3);
    CHECK(p->blocked_argument_keys == std::set<std::string>{"bcc", "cc"});
    CHECK(p->value_constraints.at("to") == std::set<std::string>{"a@x.com"});

    // The parent is untouched.
    CHECK(root.find("read_file") != nullptr);
    CHECK(root.find("send_email")->call_budget == 10);
}

TEST_CASE("unspecified fields are inherited") {
    CapabilityToken root = sample_root();
    AttenuationSpec spec;
    spec.adjust = {{"send_email", ToolRestriction{}}};
    CapabilityToken child = attenuate(root, spec, "child");
    CHECK(*child.find("send_email") == *root.find("send_email"));
    CHECK(child.find("read_file") != nullptr);
}

TEST_CASE("every widening direction is rejected") {
    CapabilityToken root = sample_root();

    AttenuationSpec unknown_tool;
    unknown_tool.adjust = {{"delete_everything", ToolRestriction{}}};
    CHECK(attenuate_code(root, unknown_tool) == "amplification-rejected");

    AttenuationSpec drop_unknown;
    drop_unknown.drop_tools = {"delete_everything"};
    CHECK(attenuate_code(root, drop_unknown) == "amplification-rejected");

    AttenuationSpec raise_budget;
    ToolRestriction r1;
    r1.call_budget = std::optional<uint64_t>(11);
    raise_budget.adjust = {{"send_email", r1}};
    CHECK(attenuate_code(root, raise_budget) == "amplification-rejected");

    AttenuationSpec lift_budget;
    ToolRestriction r2;
    r2.call_budget = std::optional<uint64_t>(std::nullopt);  // unlimited
    lift_budget.adjust = {{"send_email", r2}};
    CHECK(attenuate_code(root, lift_budget) == "amplification-rejected");

    AttenuationSpec shrink_blocklist;
    ToolRestriction r3;
    r3.blocked_argument_keys = std::set<std::string>{};
    shrink_blocklist.adjust = {{"send_email", r3}};
    CHECK(attenuate_code(root, shrink_blocklist) == "amplification-rejected");

    AttenuationSpec widen_values;
    ToolRestriction r4;
    r4.value_constraints = std::map<std::string, std::set<std::string>>{
        {"to", {"a@x.com", "evil@x.com"}}};
    widen_values.adjust = {{"send_email", r4}};
    CHECK(attenuate_code(root, widen_values) == "amplification-rejected");

    AttenuationSpec drop_constraint_key;
    ToolRestriction r5;
    r5.value_constraints = std::map<std::string, std::set<std::string>>{};
    drop_constraint_key.adjust = {{"send_email", r5}};
    CHECK(attenuate_code(root, drop_constraint_key) ==
          "amplification-rejected");
}

TEST_CASE("legal narrowings on the same axes are accepted") {
    CapabilityToken root = sample_root();

    // Equal budget, equal blocklist, equal value sets: narrowing is
    // reflexive.
    AttenuationSpec same;
    ToolRestriction r;
    r.call_budget = std::optional<uint64_t>(10);
    r.blocked_argument_keys = std::set<std::string>{"bcc"};
    r.value_constraints = std::map<std::string, std::set<std::string>>{
        {"to", {"a@x.com", "b@x.com"}}};
    same.adjust = {{"send_email", r}};
    CHECK(attenuate_code(root, same) == "");

    // A finite budget where the parent is unlimited.
    AttenuationSpec cap_read;
    ToolRestriction r2;
    r2.call_budget = std::optional<uint64_t>(1);
    cap_read.adjust = {{"read_file", r2}};
    CHECK(attenuate_code(root, cap_read) == "");

    // A new constraint key the parent never mentioned only restricts.
    AttenuationSpec add_key;
    ToolRestriction r3;
    r3.value_constraints = std::map<std::string, std::set<std::string>>{
        {"to", {"a@x.com"}}, {"subject", {"hello"}}};
    add_key.adjust = {{"send_email", r3}};
    CHECK(attenuate_code(root, add_key) == "");

    // Dropped and adjusted at once: the drop wins.
    AttenuationSpec both;
    both.drop_tools = {"send_email"};
    ToolRestriction r4;
    r4.call_budget = std::optional<uint64_t>(99);  // would widen if applied
    both.adjust = {{"send_email", r4}};
    CapabilityToken child = attenuate(root, both, "child");
    CHECK(child.find("send_email") == nullptr);
}

TEST_CASE("attenuation chains only ever shrink authority") {
    std::mt19937_64 rng(314);
    for (int i = 0; i < 400; ++i) {
        CapabilityToken root = oracle::random_token(rng, "r");
        CapabilityToken t1 = attenuate(
            root, oracle::random_narrowing(rng, root), "c1");
        CapabilityToken t2 =
            attenuate(t1, oracle::random_narrowing(rng, t1), "c2");
        CHECK(t2.parent_id() == "c1");
        CHECK(t1.parent_id() == "r");

        for (const auto& [child, parent] :
             {std::pair<const CapabilityToken&, const CapabilityToken&>{t1,
                                                                        root},
              {t2, t1}}) {
            for (const auto& [tool, cp] : child.permissions()) {
                const ToolPermission* pp = parent.find(tool);
                REQUIRE(pp != nullptr);
                if (pp->call_budget) {
                    REQUIRE(cp.call_budget.has_value());
                    CHECK(*cp.call_budget <= *pp->call_budget);
                }
                for (const std::string& k : pp->blocked_argument_keys) {
                    CHECK(cp.blocked_argument_keys.count(k) == 1);
                }
                for (const auto& [key, allowed] : pp->value_constraints) {
                    auto it = cp.value_constraints.find(key);
                    REQUIRE(it != cp.value_constraints.end());
                    for (const std::string& v : it->second) {
                        CHECK(allowed.count(v) == 1);
                    }
                }
            }
        }
    }
}

TEST_CASE("tokens serialize and load back identically") {
    CapabilityToken root = sample_root();
    json j = root.to_json();
    CHECK(j["token_id"] == "root");
    CHECK(j["permissions"]["read_file"]["budget"] == "unlimited");
    CHECK(j["permissions"]["send_email"]["budget"] == 10);
    CapabilityToken back = CapabilityToken::from_json(j);
    CHECK(back == root);

    AttenuationSpec spec;
    spec.drop_tools = {"read_file"};
    CapabilityToken child = attenuate(root, spec, "child");
    CapabilityToken child_back = CapabilityToken::from_json(child.to_json());
    CHECK(child_back == child);
    CHECK(child_back.parent_id() == "root");

    std::mt19937_64 rng(2718);
    for (int i = 0; i < 200; ++i) {
        CapabilityToken t = oracle::random_token(rng, "t" + std::to_string(i));
        CHECK(CapabilityToken::from_json(t.to_json()) == t);
    }
}

TEST_CASE("authorize applies grants, budgets, blocklists, and value sets") {
    CapabilityToken root = sample_root();
    std::map<std::string, uint64_t> used;

    ToolCallRequest ok;
    ok.tool_name = "send_email";
    ok.arguments = {{"to", "a@x.com"}, {"body", "hi"}};
    CHECK(authorize(root, ok, used).verdict == Verdict::Pass);

    ToolCallRequest ungranted;
    ungranted.tool_name = "delete_everything";
    LayerResult r = authorize(root, ungranted, used);
    CHECK(r.verdict == Verdict::Deny);
    CHECK(r.rule == "L4-not-granted");

    used["send_email"] = 9;
    CHECK(authorize(root, ok, used).verdict == Verdict::Pass);
    used["send_email"] = 10;
    r = authorize(root, ok, used);
    CHECK(r.verdict == Verdict::Deny);
    CHECK(r.rule == "L4-budget");
    used["send_email"] = 0;

    ToolCallRequest blocked;
    blocked.tool_name = "send_email";
    blocked.arguments = {{"to", "a@x.com"}, {"bcc", "spy@x.com"}};
    r = authorize(root, blocked, used);
    CHECK(r.verdict == Verdict::Deny);
    CHECK(r.rule == "L4-blocklist");

    ToolCallRequest bad_value;
    bad_value.tool_name = "send_email";
    bad_value.arguments = {{"to", "evil@x.com"}};
    r = authorize(root, bad_value, used);
    CHECK(r.verdict == Verdict::Deny);
    CHECK(r.rule == "L4-value");

    // Unlimited budget never exhausts; unconstrained args pass anything.
    ToolCallRequest read;
    read.tool_name = "read_file";
    read.arguments = {{"path", "/anything"}};
    used["read_file"] = 1000000;
    CHECK(authorize(root, read, used).verdict == Verdict::Pass);

    // Constrained keys absent from the request do not trip L4-value.
    ToolCallRequest no_to;
    no_to.tool_name = "send_email";
    no_to.arguments = {{"body", "hi"}};
    CHECK(authorize(root, no_to, used).verdict == Verdict::Pass);
}

TEST_CASE("non-string constrained values match on canonical form") {
    ToolPermission p;
    p.tool_name = "set_limit";
    p.value_constraints = {{"count", {"3", "5"}}};
    CapabilityToken t("t", {{"set_limit", p}});
    std::map<std::string, uint64_t> used;

    ToolCallRequest ok;
    ok.tool_name = "set_limit";
    ok.arguments = {{"count", 3}};
    CHECK(authorize(t, ok, used).verdict == Verdict::Pass);

    ToolCallRequest bad;
    bad.tool_name = "set_limit";
    bad.arguments = {{"count", 4}};
    CHECK(authorize(t, bad, used).verdict == Verdict::Deny);
}

TEST_CASE("child allowance implies parent allowance") {
    std::mt19937_64 rng(161803);
    size_t child_allows = 0;
    for (int i = 0; i < 1500; ++i) {
        CapabilityToken parent = oracle::random_token(rng, "p");
        CapabilityToken child =
            attenuate(parent, oracle::random_narrowing(rng, parent), "c");
        ToolCallRequest req = oracle::random_request(rng);
        std::map<std::string, uint64_t> used;
        if (rng() % 2 == 0) used[req.tool_name] = rng() % 4;

        LayerResult child_r = authorize(child, req, used);
        if (child_r.verdict == Verdict::Pass) {
            ++child_allows;
            LayerResult parent_r = authorize(parent, req, used);
            CHECK(parent_r.verdict == Verdict::Pass);
        }
    }
    // The generator must actually exercise the implication.
    CHECK(child_allows > 100);
}
