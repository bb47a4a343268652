#pragma once

// End-to-end build: manifest -> frozen graph, plus the stats table shared by
// the build report and the stats subcommand.

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "cloudpg/discovery.h"
#include "cloudpg/graph.h"

namespace cloudpg {

struct BuildManifest {
    std::filesystem::path ontology;
    std::vector<std::filesystem::path> mappings;
    std::vector<std::filesystem::path> inventories;
    std::vector<std::filesystem::path> workflows;
    std::vector<std::filesystem::path> codefacts;
    RegistryLocations registry_locations;  // empty means the built-in table
    int star_max = 10;
};

// Relative paths resolve against base_dir. Missing files are an Io error.
BuildManifest parse_manifest(std::string_view yaml_text, const std::filesystem::path& base_dir);
BuildManifest load_manifest(const std::filesystem::path& manifest_path);

struct PassTiming {
    std::string pass;
    double millis = 0;
};

struct BuildResult {
    PropertyGraph graph;
    Diagnostics diagnostics;
    std::vector<PassTiming> timings;
};

BuildResult build_graph(const BuildManifest& manifest, const DiscoveryOptions& options = {});

struct StatsTable {
    std::vector<std::pair<std::string, std::size_t>> classes;
    std::vector<std::pair<std::string, std::size_t>> edge_types;
};

// Every ontology class, every code class and every edge type, zeros included.
StatsTable compute_stats(const PropertyGraph& graph);
std::string render_stats(const StatsTable& stats);

}  // namespace cloudpg
