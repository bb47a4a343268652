#include <doctest.h>

#include <deque>
#include <set>

#include "cloudpg/codefacts.h"
#include "cloudpg/error.h"
#include "support/fixtures.h"

using namespace cloudpg;
using cloudpg::testing::bundled_ontology;
using cloudpg::testing::data_dir;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::Io;
}

AppIndex ingest_all(PropertyGraph& g, std::string_view yaml) {
    auto app = ingest_code_facts(g, parse_code_facts(yaml));
    build_http_server_nodes(g, app);
    build_http_client_nodes(g, app);
    build_storage_request_nodes(g, app);
    return app;
}

std::size_t count(const PropertyGraph& g, std::string_view cls) { return g.nodes_with_class(cls).size(); }

// Application owning a code node: walk CONTAINS/OFFERS upwards, or SOURCE
// out of a request to its call.
std::optional<NodeId> owner(const PropertyGraph& g, NodeId start) {
    std::deque<NodeId> queue{start};
    std::set<NodeId> seen{start};
    while (!queue.empty()) {
        const NodeId at = queue.front();
        queue.pop_front();
        if (g.node(at).class_name == "Application") return at;
        std::vector<NodeId> next = g.predecessors(at, EdgeType::CONTAINS);
        for (auto n : g.predecessors(at, EdgeType::OFFERS)) next.push_back(n);
        for (auto n : g.successors(at, EdgeType::SOURCE)) next.push_back(n);
        for (auto n : next) {
            if (seen.insert(n).second) queue.push_back(n);
        }
    }
    return std::nullopt;
}

const char* kTwoApps = R"(application: app1
language: java
functions:
  - name: PageController.index
    handler_class: PageController
    http_handler: {path: /, method: GET}
  - name: PageController.login
    handler_class: PageController
    parameters: [form]
    http_handler: {path: /login, method: POST}
    log_calls: ["PageController.login#form"]
  - name: Other.a
  - name: Other.b
calls:
  - {id: c1, inside: Other.a, kind: http_client, http: {url: "https://example.io/login", method: POST}}
  - {id: c2, inside: Other.b, kind: http_client, http: {url: "https://example.io/login", method: POST}}
  - id: s1
    inside: Other.a
    kind: storage_sdk
    storage: {account_url: "https://acct.blob.example", container: box, operation: append}
    arguments: ["Other.a#return"]
  - id: s2
    inside: Other.b
    kind: storage_sdk
    storage: {account_url: "https://acct.blob.example", container: box, operation: append}
  - id: s3
    inside: Other.b
    kind: storage_sdk
    storage: {account_url: "https://acct.blob.example", container: box, operation: read}
    arguments: ["Other.b#return"]
  - {id: p1, inside: Other.b}
dfg:
  - {from: c1, to: "Other.a#return"}
)";

}  // namespace

TEST_CASE("productpage login logs the request values into the log output") {
    PropertyGraph g(bundled_ontology());
    ingest_all(g, read_text_file(data_dir() / "testbeds/bookinfo/codefacts/productpage.yaml"));
    const auto values = g.find_node("Expression", "request.values");
    const auto log = g.find_node("LogOutput", "productpage log");
    REQUIRE(values);
    REQUIRE(log);
    CHECK(g.find_edge(*values, *log, EdgeType::DFG).has_value());
    const auto app = g.find_node("Application", "productpage");
    REQUIRE(app);
    CHECK(g.find_edge(*app, *log, EdgeType::OFFERS).has_value());
}

TEST_CASE("bundle with zero functions creates the application only") {
    PropertyGraph g(bundled_ontology());
    ingest_all(g, "application: lonely\n");
    CHECK(g.node_count() == 1);
    CHECK(g.node(NodeId{0}).class_name == "Application");
}

TEST_CASE("bundle errors") {
    PropertyGraph g(bundled_ontology());
    CHECK(code_of([&] {
              ingest_code_facts(g, parse_code_facts("application: a\nfunctions: [{name: f}]\ndfg: [{from: x9, to: \"f#return\"}]\n"));
          }) == ErrorCode::UnresolvedReference);
    CHECK(g.node_count() == 0);  // validation happens before any node is created
    CHECK(code_of([&] {
              ingest_code_facts(g, parse_code_facts("application: a\nfunctions: [{name: f}, {name: f}]\n"));
          }) == ErrorCode::DuplicateFunction);
    CHECK(code_of([] {
              parse_code_facts("application: a\nfunctions: [{name: f, http_handler: {path: login, method: GET}}]\n");
          }) == ErrorCode::Schema);
    CHECK(code_of([] {
              parse_code_facts("application: a\nfunctions: [{name: f, http_handler: {path: /x, method: PATCH}}]\n");
          }) == ErrorCode::Schema);
    CHECK(code_of([] {
              parse_code_facts("application: a\nfunctions: [{name: f}]\ncalls: [{id: c, inside: f, kind: http_client}]\n");
          }) == ErrorCode::Schema);
    CHECK(code_of([] {
              parse_code_facts(
                  "application: a\nfunctions: [{name: f}]\ncalls: [{id: c, inside: f, http: {url: u, method: GET}}]\n");
          }) == ErrorCode::Schema);
    CHECK(code_of([] { parse_code_facts("application: a\nfuncions: []\n"); }) == ErrorCode::Schema);
}

TEST_CASE("http server nodes") {
    PropertyGraph g(bundled_ontology());
    auto app = ingest_code_facts(g, parse_code_facts(kTwoApps));
    CHECK(build_http_server_nodes(g, app) == 2);
    REQUIRE(count(g, "HttpRequestHandler") == 1);
    const NodeId handler = g.nodes_with_class("HttpRequestHandler")[0];
    CHECK(g.node(handler).name == "PageController");
    CHECK(g.successors(handler, EdgeType::HAS_ENDPOINT).size() == 2);
    std::set<std::string> names;
    for (auto id : g.nodes_with_class("HttpEndpoint")) {
        names.insert(g.node(id).name);
        REQUIRE(g.successors(id, EdgeType::CALLS).size() == 1);
        CHECK(g.node(g.successors(id, EdgeType::CALLS)[0]).class_name == "FunctionDeclaration");
    }
    CHECK(names == std::set<std::string>{"/", "/login"});

    PropertyGraph h(bundled_ontology());
    auto plain = ingest_code_facts(h, parse_code_facts("application: a\nfunctions: [{name: f}]\n"));
    CHECK(build_http_server_nodes(h, plain) == 0);
    CHECK(count(h, "HttpRequestHandler") == 0);
}

TEST_CASE("http client nodes") {
    PropertyGraph g(bundled_ontology());
    auto app = ingest_code_facts(g, parse_code_facts(kTwoApps));
    CHECK(build_http_client_nodes(g, app) == 2);  // two identical calls stay distinct
    for (auto id : g.nodes_with_class("HttpRequest")) {
        const auto& n = g.node(id);
        CHECK(*n.property("url") == Scalar{std::string("https://example.io/login")});
        CHECK(*n.property("method") == Scalar{std::string("POST")});
        REQUIRE(g.successors(id, EdgeType::SOURCE).size() == 1);
        CHECK(g.node(g.successors(id, EdgeType::SOURCE)[0]).class_name == "CallExpression");
        CHECK(g.predecessors(id, EdgeType::OFFERS) == std::vector<NodeId>{app.application});
        CHECK(g.out_edges(id).size() == 1);  // no TO yet
    }
    PropertyGraph h(bundled_ontology());
    auto plain = ingest_code_facts(h, parse_code_facts("application: a\nfunctions: [{name: f}]\ncalls: [{id: c, inside: f}]\n"));
    CHECK(build_http_client_nodes(h, plain) == 0);
}

TEST_CASE("storage request nodes") {
    PropertyGraph g(bundled_ontology());
    auto app = ingest_code_facts(g, parse_code_facts(kTwoApps));
    CHECK(build_storage_request_nodes(g, app) == 3);
    std::size_t appends = 0;
    for (auto id : g.nodes_with_class("ObjectStorageRequest")) {
        const auto& n = g.node(id);
        CHECK(*n.property("account_url") == Scalar{std::string("https://acct.blob.example")});
        const auto type = std::get<std::string>(*n.property("type"));
        const auto inbound = g.predecessors(id, EdgeType::DFG);
        if (type == "read") {
            CHECK(inbound.empty());
        } else {
            ++appends;
        }
        if (n.name == "append box" && !inbound.empty()) {
            CHECK(g.node(inbound[0]).class_name == "Expression");
        }
    }
    CHECK(appends == 2);
    const auto a_return = app.expressions.find("Other.a#return");
    REQUIRE(a_return != app.expressions.end());
    CHECK(g.successors(a_return->second, EdgeType::DFG).size() == 1);
}

TEST_CASE("property: node counts follow the bundle and DFG stays inside the app") {
    for (const char* name : {"productpage", "details", "reviews", "ratings"}) {
        const auto text = read_text_file(data_dir() / "testbeds/bookinfo/codefacts" / (std::string(name) + ".yaml"));
        const auto bundle = parse_code_facts(text);
        PropertyGraph g(bundled_ontology());
        ingest_all(g, text);
        std::size_t handlers = 0, clients = 0, storage = 0;
        for (const auto& f : bundle.functions) handlers += f.http_handler.has_value();
        for (const auto& c : bundle.calls) {
            clients += c.kind == CallKind::HttpClient;
            storage += c.kind == CallKind::StorageSdk;
        }
        CHECK(count(g, "FunctionDeclaration") == bundle.functions.size());
        CHECK(count(g, "CallExpression") == bundle.calls.size());
        CHECK(count(g, "HttpEndpoint") == handlers);
        CHECK(count(g, "HttpRequest") == clients);
        CHECK(count(g, "ObjectStorageRequest") == storage);

        const auto app = g.find_node("Application", name);
        REQUIRE(app);
        for (auto id : g.edges_of_type(EdgeType::DFG)) {
            const auto& e = g.edge(id);
            CHECK(owner(g, e.from) == app);
            CHECK(owner(g, e.to) == app);
        }

        // determinism
        PropertyGraph again(bundled_ontology());
        ingest_all(again, text);
        CHECK(export_graph(again) == export_graph(g));
    }
    PropertyGraph g(bundled_ontology());
    ingest_all(g, kTwoApps);
    for (auto id : g.edges_of_type(EdgeType::DFG)) {
        CHECK(owner(g, g.edge(id).from).has_value());
        CHECK(owner(g, g.edge(id).to) == owner(g, g.edge(id).from));
    }
}
