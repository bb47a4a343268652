// cloudpg: build a cloud property graph from a testbed manifest, inspect it,
// and run pattern queries against the exported graph.

#include <fstream>
#include <iomanip>
#include <iostream>

#include <CLI11.hpp>

#include "cloudpg/error.h"
#include "cloudpg/pipeline.h"
#include "cloudpg/query.h"
#include "cloudpg/structured.h"

namespace {

using namespace cloudpg;

int cmd_build(const std::string& manifest_path, const std::string& out_path, bool skip_unclassified) {
    DiscoveryOptions options;
    options.skip_unclassified = skip_unclassified;
    auto result = build_graph(load_manifest(manifest_path), options);
    const std::string document = export_graph(result.graph);
    std::ofstream out(out_path, std::ios::binary);
    if (!out || !(out << document) || !out.flush()) {
        throw Error(ErrorCode::Io, out_path, "cannot write " + out_path);
    }

    std::cout << "wrote " << out_path << ": " << result.graph.node_count() << " nodes, "
              << result.graph.edge_count() << " edges\n";
    std::cout << "passes:\n";
    double total = 0;
    for (const auto& t : result.timings) {
        std::cout << "  " << std::left << std::setw(26) << t.pass << std::right << std::fixed
                  << std::setprecision(2) << t.millis << " ms\n";
        total += t.millis;
    }
    std::cout << "  " << std::left << std::setw(26) << "total" << std::right << total << " ms\n";
    std::cout << render_stats(compute_stats(result.graph));
    for (const auto& w : result.diagnostics.warnings) std::cerr << "warning: " << w << "\n";
    return 0;
}

std::string query_text(const std::string& arg) {
    if (!arg.empty() && arg.front() == '@') return read_text_file(arg.substr(1));
    return arg;
}

int cmd_query(const std::string& graph_path, const std::string& query_arg, const std::string& format,
              int star_max, bool fail_if_found, bool show_plan) {
    const auto ast = query::parse_query(query_text(query_arg));
    auto graph = import_graph(read_text_file(graph_path));
    graph.freeze();
    query::EvaluateOptions options;
    options.star_max = star_max;
    if (show_plan) std::cout << query::explain(graph, graph.ontology(), ast, options);
    const auto results = query::evaluate(graph, graph.ontology(), ast, options);
    if (format == "paths") {
        for (const auto& r : results) std::cout << query::render_result(graph, ast, r) << "\n";
    }
    std::cout << results.size() << (results.size() == 1 ? " result\n" : " results\n");
    return fail_if_found && !results.empty() ? 3 : 0;
}

int cmd_stats(const std::string& graph_path) {
    const auto graph = import_graph(read_text_file(graph_path));
    std::cout << render_stats(compute_stats(graph));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cloud property graph builder and query tool"};
    app.require_subcommand(1);

    std::string manifest, out = "graph.json";
    bool skip_unclassified = false;
    auto* build = app.add_subcommand("build", "build a graph export from a testbed manifest");
    build->add_option("manifest", manifest, "manifest file")->required();
    build->add_option("--out", out, "export file")->capture_default_str();
    build->add_flag("--skip-unclassified", skip_unclassified, "warn about unmapped resource types instead of failing");

    std::string graph_file, query_arg, format = "paths";
    int star_max = cloudpg::query::kDefaultStarMax;
    bool fail_if_found = false, plan = false;
    auto* query = app.add_subcommand("query", "evaluate a query against a graph export");
    query->add_option("graph", graph_file, "graph export")->required();
    query->add_option("query", query_arg, "query text, or @file")->required();
    query->add_option("--format", format)->check(CLI::IsMember({"paths", "count"}))->capture_default_str();
    query->add_option("--star-max", star_max, "upper bound for unbounded * segments")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    query->add_flag("--fail-if-found", fail_if_found, "exit 3 when the query has results");
    query->add_flag("--explain", plan, "print the evaluation plan first");

    std::string stats_file;
    auto* stats = app.add_subcommand("stats", "per-class node and per-type edge counts");
    stats->add_option("graph", stats_file, "graph export")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (build->parsed()) return cmd_build(manifest, out, skip_unclassified);
        if (query->parsed()) return cmd_query(graph_file, query_arg, format, star_max, fail_if_found, plan);
        if (stats->parsed()) return cmd_stats(stats_file);
    } catch (const cloudpg::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
