#include <doctest.h>

#include <chrono>
#include <set>

#include "cloudpg/query.h"
#include "support/fixtures.h"
#include "support/oracle.h"

using namespace cloudpg;
using namespace cloudpg::query;
using cloudpg::testing::bookinfo_build;
using cloudpg::testing::bundled_ontology;
using cloudpg::testing::listing;

namespace {

std::vector<MatchResult> run(const PropertyGraph& g, std::string_view text, int star_max = kDefaultStarMax) {
    return evaluate(g, g.ontology(), parse_query(text), EvaluateOptions{star_max});
}

std::size_t count_of(const PropertyGraph& g, std::string_view text) { return run(g, text).size(); }

// a -> b, b -> b
PropertyGraph tiny() {
    PropertyGraph g(bundled_ontology());
    const auto a = g.add_node("Container", "a");
    const auto b = g.add_node("Container", "b");
    g.add_edge(a, b, EdgeType::DFG, {{"weight", std::int64_t{1}}});
    g.add_edge(b, b, EdgeType::DFG);
    g.freeze();
    return g;
}

}  // namespace

TEST_CASE("empty graph yields nothing") {
    PropertyGraph g(bundled_ontology());
    g.freeze();
    for (int k = 1; k <= 5; ++k) CHECK(run(g, listing(k)).empty());
    CHECK(run(g, "MATCH (n) RETURN n").empty());
}

TEST_CASE("direction and type") {
    const auto g = tiny();
    CHECK(count_of(g, "MATCH (x)-[:DFG]->(y) RETURN x") == 2);
    CHECK(count_of(g, "MATCH (x)<-[:DFG]-(y) RETURN x") == 2);
    // a->b forwards, the same edge backwards from b, and the self-loop once
    CHECK(count_of(g, "MATCH (x)--(y) RETURN x") == 3);
    CHECK(count_of(g, "MATCH (x)-[:TO]-(y) RETURN x") == 0);
    CHECK(count_of(g, "MATCH (x)-[:NOT_A_TYPE]-(y) RETURN x") == 0);
}

TEST_CASE("relationship isomorphism and lengths") {
    const auto g = tiny();
    // would need the self-loop twice
    CHECK(count_of(g, "MATCH (x)-[:DFG]->(x)-[:DFG]->(x) RETURN x") == 0);
    CHECK(count_of(g, "MATCH (x)-[:DFG*2]->(y) RETURN x") == 1);  // a->b->b
    CHECK(count_of(g, "MATCH (x)-[:DFG*]->(y) RETURN x") == 3);   // a->b, b->b, a->b->b
    CHECK(count_of(g, "MATCH (x)-[:DFG*3]->(y) RETURN x") == 0);
    CHECK(count_of(g, "MATCH (x)-[*2..2]-(y) RETURN x") == 2);    // a-b-b and b-b-a
    for (const auto& m : run(g, "MATCH p=(x)-[*1..5]-(y) RETURN p")) {
        std::set<EdgeId> seen(m.path.edges.begin(), m.path.edges.end());
        CHECK(seen.size() == m.path.edges.size());
    }
}

TEST_CASE("predicates") {
    const auto g = tiny();
    CHECK(count_of(g, "MATCH (x)-[r]->(y) WHERE r.weight = 1 RETURN x") == 1);
    // missing property: the comparison is false either way
    CHECK(count_of(g, "MATCH (x)-[r]->(y) WHERE r.weight <> 1 RETURN x") == 0);
    CHECK(count_of(g, "MATCH (x)-[r]->(y) WHERE r.weight = \"1\" RETURN x") == 0);
    CHECK(count_of(g, "MATCH (x)-[r]->(y) WHERE r.weight <> \"1\" RETURN x") == 1);
    CHECK(count_of(g, "MATCH (x)-[]->(y) WHERE x <> y RETURN x") == 1);
    CHECK(count_of(g, "MATCH (x)-[]->(y) WHERE x = y RETURN x") == 1);
    CHECK(count_of(g, "MATCH (x)-[]->(y) WHERE x = y OR x.name = \"a\" RETURN x") == 2);
    CHECK(count_of(g, "MATCH (x)-[]->(y) WHERE x = y AND x.name = \"a\" RETURN x") == 0);
}

TEST_CASE("bindings and paths") {
    const auto g = tiny();
    const auto results = run(g, "MATCH p=(x)<-[r:DFG]-(y) RETURN p");
    REQUIRE(results.size() == 2);
    for (const auto& m : results) {
        REQUIRE(m.path.edges.size() == 1);
        CHECK_FALSE(m.path.forward[0]);
        CHECK(m.path.nodes.front() == m.bindings.at("x"));
        CHECK(m.path.nodes.back() == m.bindings.at("y"));
        CHECK(m.relationships.at("r") == m.path.edges);
    }
    CHECK(render_path(g, results[0].path) == "b(Container) <-[DFG]- a(Container)");
    CHECK(render_path(g, run(g, "MATCH p=(x)-[:DFG]->(y) WHERE x <> y RETURN p")[0].path) ==
          "a(Container) -[DFG]-> b(Container)");
}

TEST_CASE("star max override") {
    PropertyGraph g(bundled_ontology());
    NodeId prev = g.add_node("Expression", "e0");
    for (int i = 1; i <= 14; ++i) {
        const auto next = g.add_node("Expression", "e" + std::to_string(i));
        g.add_edge(prev, next, EdgeType::DFG);
        prev = next;
    }
    g.freeze();
    const std::string chain = "MATCH (a)-[:DFG*]->(b) WHERE a.name = \"e0\" RETURN b";
    CHECK(count_of(g, chain) == 10);
    CHECK(run(g, chain, 14).size() == 14);
    CHECK(run(g, chain, 3).size() == 3);
}

TEST_CASE("explain") {
    const auto& g = bookinfo_build().graph;
    const auto one = explain(g, g.ontology(), parse_query(listing(1)));
    // anchor = pattern node with the smallest label candidate set
    const auto ast = parse_query(listing(1));
    std::size_t best = 0, best_count = SIZE_MAX;
    for (std::size_t p = 0; p < ast.nodes.size(); ++p) {
        std::size_t count = 0;
        for (const auto& n : g.nodes()) {
            count += cloudpg::testing::brute_label_match(g.ontology(), n.class_name, *ast.nodes[p].label);
        }
        if (count < best_count) {
            best = p;
            best_count = count;
        }
    }
    CHECK(*ast.nodes[best].label == "ObjectStorageRequest");
    CHECK(one.find("anchor: node " + std::to_string(best) + " (rq:ObjectStorageRequest) candidates=" +
                   std::to_string(best_count)) != std::string::npos);

    const auto single = explain(g, g.ontology(), parse_query("MATCH (n) RETURN n"));
    CHECK(single.find("expansions: 0") != std::string::npos);

    const auto two = explain(g, g.ontology(), parse_query(listing(2)));
    CHECK(two.find("*1..10") != std::string::npos);
    CHECK(explain(g, g.ontology(), parse_query(listing(2)), EvaluateOptions{4}).find("*1..4") != std::string::npos);
}

TEST_CASE("property: oracle equivalence on random graphs") {
    std::mt19937 rng(20240611);
    std::size_t nonempty = 0;
    for (int i = 0; i < 250; ++i) {
        const auto g = cloudpg::testing::random_graph(bundled_ontology(), rng);
        for (int j = 0; j < 4; ++j) {
            const auto text = cloudpg::testing::random_query(rng);
            const auto ast = parse_query(text);
            auto got = evaluate(g, g.ontology(), ast, EvaluateOptions{3});
            auto want = cloudpg::testing::brute_force_evaluate(g, ast, 3);
            cloudpg::testing::sort_results(got);
            CHECK_MESSAGE(got == want, "graph " << i << " query: " << text);
            nonempty += !want.empty();
        }
    }
    CHECK(nonempty > 100);
}

TEST_CASE("property: determinism, label soundness, star monotonicity on the fixture") {
    const auto& g = bookinfo_build().graph;
    for (int k = 1; k <= 5; ++k) {
        const auto ast = parse_query(listing(k));
        const auto first = evaluate(g, g.ontology(), ast);
        CHECK(first == evaluate(g, g.ontology(), ast));
        for (const auto& m : first) {
            for (std::size_t p = 0; p < ast.nodes.size(); ++p) {
                if (!ast.nodes[p].label || !ast.nodes[p].var) continue;
                CHECK(node_matches_label(g, g.ontology(), m.bindings.at(*ast.nodes[p].var), *ast.nodes[p].label));
            }
        }
        std::vector<MatchResult> previous;
        for (int star = 1; star <= 8; ++star) {
            const auto now = evaluate(g, g.ontology(), ast, EvaluateOptions{star});
            for (const auto& m : previous) CHECK(std::find(now.begin(), now.end(), m) != now.end());
            previous = now;
        }
    }
}
