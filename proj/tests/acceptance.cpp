// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "cloudpg/dataflow.h"
#include "cloudpg/pipeline.h"
#include "cloudpg/query.h"
#include "support/fixtures.h"
#include "support/oracle.h"

using namespace cloudpg;
using namespace cloudpg::query;
namespace t = cloudpg::testing;

namespace {

using Clock = std::chrono::steady_clock;

double millis_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

struct Verdict {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

const Node& node(const PropertyGraph& g, NodeId id) { return g.node(id); }

bool path_has(const PropertyGraph& g, const Path& p, std::string_view cls, std::string_view name) {
    return std::any_of(p.nodes.begin(), p.nodes.end(), [&](NodeId id) {
        return node(g, id).class_name == cls && node(g, id).name == name;
    });
}

std::string region_of(const PropertyGraph& g, NodeId geo) {
    return std::get<std::string>(*node(g, geo).property("region"));
}

std::vector<MatchResult> run(const PropertyGraph& g, int k) {
    return evaluate(g, g.ontology(), parse_query(t::listing(k)));
}

void detection(Verdict& v) {
    const auto& g = t::bookinfo_build().graph;
    const auto clean = build_graph(load_manifest(t::clean_manifest()));

    std::size_t providers = 0;
    for (const auto& p : load_manifest(t::bookinfo_manifest()).inventories) {
        providers += !parse_inventory(read_text_file(p)).provider.empty();
    }
    v.require(g.nodes_with_class("Application").size() == 4, "4 applications");
    v.require(providers >= 2, ">= 2 providers");
    v.require(g.nodes_with_class("LoadBalancer").size() == 1, "1 load balancer");

    const auto l1 = run(g, 1);
    v.require(std::any_of(l1.begin(), l1.end(), [&](const MatchResult& m) {
                  return node(g, m.path.nodes.front()).name == "kubernetes-logs" &&
                         path_has(g, m.path, "ObjectStorage", "am-containerlog");
              }),
              "listing 1 kubernetes-logs -> am-containerlog");

    const auto l2 = run(g, 2);
    v.require(std::any_of(l2.begin(), l2.end(), [&](const MatchResult& m) {
                  const auto& e = node(g, m.bindings.at("e"));
                  return e.class_name == "Expression" && e.name == "request.values" &&
                         node(g, m.bindings.at("s")).name == "am-containerlog";
              }),
              "listing 2 login request values");

    const auto l3 = run(g, 3);
    std::set<NodeId> endpoints;
    for (const auto& m : l3) endpoints.insert(m.bindings.at("h"));
    bool only_tls11 = endpoints.size() == 1;
    for (auto h : endpoints) {
        for (auto te : g.successors(h, EdgeType::TRANSPORT_ENCRYPTION)) {
            only_tls11 = only_tls11 && *node(g, te).property("tlsVersion") == Scalar{std::string("TLS1_1")};
        }
    }
    v.require(only_tls11, "listing 3 exactly the TLS1_1 endpoint");

    const auto l4 = run(g, 4);
    v.require(std::any_of(l4.begin(), l4.end(), [&](const MatchResult& m) {
                  const auto& p = m.path;
                  return node(g, p.nodes[1]).class_name == "ContainerRegistry" &&
                         node(g, p.nodes[2]).class_name == "Container" && region_of(g, m.bindings.at("l1")) == "us" &&
                         region_of(g, m.bindings.at("l2")) == "europe";
              }),
              "listing 4 registry(us) - container(europe)");

    const auto l5 = run(g, 5);
    v.require(std::any_of(l5.begin(), l5.end(), [&](const MatchResult& m) {
                  return path_has(g, m.path, "VirtualMachine", "ratings-vm") &&
                         region_of(g, m.bindings.at("l1")).rfind("us", 0) == 0 &&
                         region_of(g, m.bindings.at("l2")) == "europe";
              }),
              "listing 5 ratings VM (us) -> europe");

    std::size_t clean_hits = 0;
    for (int k = 1; k <= 5; ++k) clean_hits += run(clean.graph, k).size();
    v.require(clean_hits == 0, "clean fixture has no results");
    v.detail << " results L1..L5=" << l1.size() << "," << l2.size() << "," << l3.size() << "," << l4.size() << ","
             << l5.size() << " clean=" << clean_hits;
}

void oracle(Verdict& v) {
    std::mt19937 rng(1729);
    std::size_t graphs = 0, queries = 0, mismatches = 0;
    std::string first_mismatch;
    for (; graphs < 220; ++graphs) {
        const auto g = t::random_graph(t::bundled_ontology(), rng);
        for (int j = 0; j < 5; ++j, ++queries) {
            const auto text = t::random_query(rng);
            const auto ast = parse_query(text);
            auto got = evaluate(g, g.ontology(), ast, EvaluateOptions{3});
            t::sort_results(got);
            if (got != t::brute_force_evaluate(g, ast, 3)) {
                if (!mismatches) first_mismatch = "graph " + std::to_string(graphs) + ": " + text;
                ++mismatches;
            }
        }
    }
    const auto& fixture = t::bookinfo_build().graph;
    for (int k = 1; k <= 5; ++k, ++queries) {
        const auto ast = parse_query(t::listing(k));
        auto got = evaluate(fixture, fixture.ontology(), ast);
        t::sort_results(got);
        if (got != t::brute_force_evaluate(fixture, ast, kDefaultStarMax)) {
            if (!mismatches) first_mismatch = "listing " + std::to_string(k);
            ++mismatches;
        }
    }
    if (mismatches) v.detail << " first mismatch {" << first_mismatch << "}";
    v.require(mismatches == 0, std::to_string(mismatches) + " mismatching queries");
    v.detail << " graphs=" << graphs << " queries=" << queries;
}

void ontology_properties(Verdict& v) {
    const auto& o = *t::bundled_ontology();
    std::size_t triples = 0;
    for (const auto& a : o.classes()) {
        for (const auto& b : o.classes()) {
            if (!o.is_subclass(a.name, b.name)) continue;
            for (const auto& c : o.classes()) {
                if (!o.is_subclass(b.name, c.name)) continue;
                ++triples;
                v.require(o.is_subclass(a.name, c.name), "transitivity " + a.name + "<" + c.name);
            }
        }
        if (a.parent) {
            const auto child = o.offered_features(a.name);
            for (const auto& f : o.offered_features(*a.parent)) {
                v.require(std::find(child.begin(), child.end(), f) != child.end(), "inherits " + a.name + "." + f);
            }
        }
    }
    v.detail << " classes=" << o.classes().size() << " chains=" << triples;
}

void round_trips(Verdict& v) {
    const auto& g = t::bookinfo_build().graph;
    auto back = import_graph(export_graph(g));
    back.freeze();
    for (int k = 1; k <= 5; ++k) {
        v.require(run(g, k) == run(back, k), "listing " + std::to_string(k) + " after round trip");
    }
    const auto a = export_graph(build_graph(load_manifest(t::bookinfo_manifest())).graph);
    const auto b = export_graph(build_graph(load_manifest(t::bookinfo_manifest())).graph);
    v.require(a == b, "byte-identical rebuild");
    v.detail << " export bytes=" << a.size();
}

void performance(Verdict& v) {
    const auto manifest = load_manifest(t::bookinfo_manifest());
    double build_ms = 0;
    for (int i = 0; i < 3; ++i) {
        const auto start = Clock::now();
        const auto result = build_graph(manifest);
        build_ms = std::max(build_ms, millis_since(start));
    }
    v.require(build_ms < 2000, "build under 2 s");
    v.detail << " build=" << build_ms << "ms";
    const auto& g = t::bookinfo_build().graph;
    for (int k = 1; k <= 5; ++k) {
        const auto text = t::listing(k);
        double worst = 0;
        for (int i = 0; i < 5; ++i) {
            const auto start = Clock::now();
            const auto results = evaluate(g, g.ontology(), parse_query(text));
            worst = std::max(worst, millis_since(start));
        }
        v.require(worst < 50, "listing " + std::to_string(k) + " under 50 ms");
        v.detail << " L" << k << "=" << worst << "ms";
    }
    v.detail << " nodes=" << g.node_count();
}

void idempotency(Verdict& v) {
    auto g = import_graph(export_graph(t::bookinfo_build().graph));
    auto edges = [&] {
        std::multiset<std::tuple<std::uint64_t, std::uint64_t, EdgeType>> out;
        for (const auto& e : g.edges()) out.insert({e.from.value, e.to.value, e.type});
        return out;
    };
    const auto before = edges();
    Diagnostics d;
    const std::vector<std::pair<std::string, std::function<void()>>> passes = {
        {"create_proxied_endpoints", [&] { create_proxied_endpoints(g, d); }},
        {"resolve_http_requests", [&] { resolve_http_requests(g); }},
        {"resolve_storage_requests", [&] { resolve_storage_requests(g); }},
        {"propagate_log_flows", [&] { propagate_log_flows(g); }},
    };
    for (const auto& [name, pass] : passes) {
        pass();
        v.require(edges() == before && g.node_count() == t::bookinfo_build().graph.node_count(), name);
    }
    v.detail << " edges=" << before.size();
}

}  // namespace

int main() {
    struct Criterion {
        const char* id;
        const char* title;
        void (*check)(Verdict&);
        double budget_ms;  // 0: none
    };
    const Criterion criteria[] = {
        {"AC1", "weakness detection parity on the bookinfo fixture, none on the clean fixture", detection, 0},
        {"AC2", "evaluator agrees with the brute-force enumerator", oracle, 60000},
        {"AC3", "ontology transitivity and feature inheritance", ontology_properties, 1000},
        {"AC4", "export/import round trip and reproducible builds", round_trips, 0},
        {"AC5", "build under 2 s, each listing under 50 ms", performance, 0},
        {"AC6", "dataflow passes are idempotent", idempotency, 0},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        Verdict v;
        const auto start = Clock::now();
        try {
            c.check(v);
        } catch (const std::exception& e) {
            v.require(false, std::string("exception: ") + e.what());
        }
        const double spent = millis_since(start);
        if (c.budget_ms > 0) v.require(spent < c.budget_ms, "time budget " + std::to_string(c.budget_ms) + " ms");
        std::cout << (v.pass ? "PASS " : "FAIL ") << c.id << " " << c.title << " (" << spent << " ms)"
                  << v.detail.str() << "\n";
        failures += !v.pass;
    }
    return failures == 0 ? 0 : 1;
}
