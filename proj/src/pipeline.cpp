#include "cloudpg/pipeline.h"

#include <chrono>
#include <set>
#include <sstream>

#include "cloudpg/codefacts.h"
#include "cloudpg/dataflow.h"
#include "cloudpg/error.h"
#include "cloudpg/structured.h"

namespace cloudpg {

namespace {

std::filesystem::path existing(const std::filesystem::path& base, const std::string& entry) {
    std::filesystem::path path(entry);
    if (path.is_relative()) path = base / path;
    if (!std::filesystem::is_regular_file(path)) {
        throw Error(ErrorCode::Io, path.string(), "no such file: " + path.string());
    }
    return path;
}

std::vector<std::filesystem::path> path_list(const json& doc, std::string_view key,
                                             const std::filesystem::path& base) {
    std::vector<std::filesystem::path> out;
    for (const auto& entry : doc::string_list(doc, key, "manifest")) out.push_back(existing(base, entry));
    return out;
}

class Stopwatch {
public:
    explicit Stopwatch(std::vector<PassTiming>& sink) : sink_(sink) {}

    template <typename F>
    auto time(std::string pass, F&& body) {
        const auto start = std::chrono::steady_clock::now();
        auto finish = [&] {
            const std::chrono::duration<double, std::milli> spent = std::chrono::steady_clock::now() - start;
            sink_.push_back({std::move(pass), spent.count()});
        };
        if constexpr (std::is_void_v<decltype(body())>) {
            body();
            finish();
        } else {
            auto value = body();
            finish();
            return value;
        }
    }

private:
    std::vector<PassTiming>& sink_;
};

}  // namespace

BuildManifest parse_manifest(std::string_view yaml_text, const std::filesystem::path& base_dir) {
    const json doc = parse_yaml(yaml_text, "manifest");
    doc::require_object(doc, "manifest");
    doc::only_keys(doc,
                   {"ontology", "mappings", "inventories", "workflows", "codefacts", "registry_locations",
                    "star_max"},
                   "manifest");
    BuildManifest manifest;
    manifest.ontology = existing(base_dir, doc::string_field(doc, "ontology", "manifest"));
    manifest.mappings = path_list(doc, "mappings", base_dir);
    manifest.inventories = path_list(doc, "inventories", base_dir);
    manifest.workflows = path_list(doc, "workflows", base_dir);
    manifest.codefacts = path_list(doc, "codefacts", base_dir);
    if (auto it = doc.find("registry_locations"); it != doc.end() && !it->is_null()) {
        doc::require_object(*it, "manifest.registry_locations");
        for (const auto& [host, region] : it->items()) {
            if (!region.is_string()) {
                throw Error(ErrorCode::Schema, host, "registry_locations." + host + " must be a string");
            }
            manifest.registry_locations[host] = region.get<std::string>();
        }
    }
    if (auto it = doc.find("star_max"); it != doc.end() && !it->is_null()) {
        if (!it->is_number_integer() || it->get<int>() < 1) {
            throw Error(ErrorCode::Schema, "star_max", "star_max must be a positive integer");
        }
        manifest.star_max = it->get<int>();
    }
    return manifest;
}

BuildManifest load_manifest(const std::filesystem::path& manifest_path) {
    return parse_manifest(read_text_file(manifest_path), manifest_path.parent_path());
}

BuildResult build_graph(const BuildManifest& manifest, const DiscoveryOptions& options) {
    std::vector<PassTiming> timings;
    Stopwatch watch(timings);
    Diagnostics diagnostics;

    auto ontology = watch.time("ontology", [&] {
        std::vector<std::string> mapping_docs;
        for (const auto& path : manifest.mappings) mapping_docs.push_back(read_text_file(path));
        return std::make_shared<const Ontology>(load_ontology(read_text_file(manifest.ontology), mapping_docs));
    });
    PropertyGraph graph(ontology);

    watch.time("codefacts", [&] {
        for (const auto& path : manifest.codefacts) {
            try {
                const auto app = ingest_code_facts(graph, parse_code_facts(read_text_file(path)));
                build_http_server_nodes(graph, app);
                build_http_client_nodes(graph, app);
                build_storage_request_nodes(graph, app);
            } catch (const Error& e) {
                throw Error(e.code(), e.subject(), path.string() + ": " + e.what());
            }
        }
    });

    watch.time("inventories", [&] {
        std::vector<InventoryDocument> docs;
        for (const auto& path : manifest.inventories) {
            try {
                docs.push_back(parse_inventory(read_text_file(path)));
            } catch (const Error& e) {
                throw Error(e.code(), e.subject(), path.string() + ": " + e.what());
            }
        }
        ingest_inventories(graph, *ontology, docs, diagnostics, options);
    });

    watch.time("workflows", [&] {
        std::vector<WorkflowDocument> docs;
        for (const auto& path : manifest.workflows) {
            try {
                docs.push_back(parse_workflow(read_text_file(path)));
            } catch (const Error& e) {
                throw Error(e.code(), e.subject(), path.string() + ": " + e.what());
            }
        }
        const auto locations =
            manifest.registry_locations.empty() ? default_registry_locations() : manifest.registry_locations;
        ingest_workflows(graph, docs, locations, diagnostics);
    });

    watch.time("link_applications", [&] { link_applications(graph, diagnostics); });
    watch.time("create_proxied_endpoints", [&] { create_proxied_endpoints(graph, diagnostics); });
    watch.time("resolve_http_requests", [&] { resolve_http_requests(graph); });
    watch.time("resolve_storage_requests", [&] { resolve_storage_requests(graph); });
    watch.time("propagate_log_flows", [&] { propagate_log_flows(graph); });
    graph.freeze();

    return BuildResult{std::move(graph), std::move(diagnostics), std::move(timings)};
}

StatsTable compute_stats(const PropertyGraph& graph) {
    std::set<std::string, std::less<>> names;
    for (const auto& cls : graph.ontology().classes()) names.insert(cls.name);
    for (auto code : kCodeClasses) names.insert(std::string(code));
    for (const auto& [name, ids] : graph.label_index()) names.insert(name);

    StatsTable stats;
    for (const auto& name : names) stats.classes.emplace_back(name, graph.nodes_with_class(name).size());
    for (auto type : all_edge_types()) {
        stats.edge_types.emplace_back(std::string(to_string(type)), graph.edges_of_type(type).size());
    }
    return stats;
}

std::string render_stats(const StatsTable& stats) {
    std::ostringstream out;
    out << "nodes:\n";
    for (const auto& [name, count] : stats.classes) out << "  " << name << ": " << count << "\n";
    out << "edges:\n";
    for (const auto& [name, count] : stats.edge_types) out << "  " << name << ": " << count << "\n";
    return out.str();
}

}  // namespace cloudpg
