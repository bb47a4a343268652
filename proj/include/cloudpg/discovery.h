#pragma once

// Deployment discovery from recorded inventories and CI workflow files.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cloudpg/graph.h"

namespace cloudpg {

struct Diagnostics {
    std::vector<std::string> warnings;

    void warn(std::string message) { warnings.push_back(std::move(message)); }
};

struct InventoryResource {
    std::string id;
    std::string name;
    std::string provider_type;
    std::optional<std::string> region;
    Properties properties;
    // member_of, targets, image, forwards_logs_to; single values become
    // one-element lists.
    std::map<std::string, std::vector<std::string>> links;

    const Scalar* property(std::string_view key) const;
};

struct InventoryDocument {
    std::string provider;
    std::vector<InventoryResource> resources;
};

struct WorkflowStep {
    std::string run;
};

struct WorkflowJob {
    std::string name;
    std::vector<WorkflowStep> steps;
};

struct WorkflowDocument {
    std::string name;
    std::vector<WorkflowJob> jobs;
};

InventoryDocument parse_inventory(std::string_view yaml_text);
WorkflowDocument parse_workflow(std::string_view yaml_text);

struct DiscoveryOptions {
    // Unclassifiable resources abort the build unless this is set, in which
    // case they are skipped with a warning.
    bool skip_unclassified = false;
};

// Resource ids may be linked across documents of one batch; links are
// resolved after every document's nodes exist.
std::size_t ingest_inventories(PropertyGraph& graph, const Ontology& ontology,
                               std::span<const InventoryDocument> documents, Diagnostics& diagnostics,
                               const DiscoveryOptions& options = {});
std::size_t ingest_inventory(PropertyGraph& graph, const Ontology& ontology,
                             const InventoryDocument& document, Diagnostics& diagnostics,
                             const DiscoveryOptions& options = {});

std::size_t attach_security_features(PropertyGraph& graph, const Ontology& ontology,
                                     NodeId resource, const InventoryResource& inventory);

using RegistryLocations = std::map<std::string, std::string>;
RegistryLocations default_registry_locations();  // ghcr.io -> us

// "ghcr.io/acme/app:1.2" -> "ghcr.io/acme/app"
std::string image_repository(std::string_view image);
// Registry host prefix of an image name; "ghcr.io" when there is none.
std::string registry_host(std::string_view image);

std::size_t ingest_workflows(PropertyGraph& graph, std::span<const WorkflowDocument> documents,
                             const RegistryLocations& locations, Diagnostics& diagnostics);
std::size_t ingest_workflow(PropertyGraph& graph, const WorkflowDocument& document,
                            const RegistryLocations& locations, Diagnostics& diagnostics);

std::size_t link_applications(PropertyGraph& graph, Diagnostics& diagnostics);

}  // namespace cloudpg
