#include "cloudpg/discovery.h"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_map>

#include "cloudpg/error.h"

namespace cloudpg {

namespace {

constexpr std::string_view kLinkKeys[] = {"member_of", "targets", "image", "forwards_logs_to"};

struct PropertySpec {
    std::string_view key;
    ScalarKind kind;
};

constexpr PropertySpec kRecognizedProperties[] = {
    {"public_access", ScalarKind::Boolean},
    {"at_rest_encryption_enabled", ScalarKind::Boolean},
    {"at_rest_algorithm", ScalarKind::String},
    {"tls_enabled", ScalarKind::Boolean},
    {"tls_version", ScalarKind::String},
    {"http_url", ScalarKind::String},
    {"auth", ScalarKind::String},
};

Scalar scalar_from(const json& value, const std::string& context) {
    if (value.is_boolean()) return value.get<bool>();
    if (value.is_number_integer()) return value.get<std::int64_t>();
    if (value.is_string()) return value.get<std::string>();
    throw Error(ErrorCode::Schema, context, context + ": expected a scalar");
}

std::optional<std::string> string_property(const InventoryResource& r, std::string_view key) {
    const auto* value = r.property(key);
    if (!value) return std::nullopt;
    return std::get<std::string>(*value);
}

std::optional<bool> bool_property(const InventoryResource& r, std::string_view key) {
    const auto* value = r.property(key);
    if (!value) return std::nullopt;
    return std::get<bool>(*value);
}

std::optional<NodeId> resource_endpoint(const PropertyGraph& graph, NodeId resource) {
    for (auto id : graph.successors(resource, EdgeType::HAS_ENDPOINT)) {
        if (graph.node(id).class_name == "HttpEndpoint") return id;
    }
    return std::nullopt;
}

NodeId geo_location(PropertyGraph& graph, const std::string& region) {
    // One node per region: `l1 <> l2` in location queries compares identity.
    if (auto existing = graph.find_node("GeoLocation", region)) return *existing;
    return graph.add_node("GeoLocation", region, {{"region", region}});
}

NodeId find_or_add(PropertyGraph& graph, const std::string& class_name, const std::string& name) {
    if (auto existing = graph.find_node(class_name, name)) return *existing;
    return graph.add_node(class_name, name);
}

std::vector<std::string> split_commands(const std::string& run) {
    std::vector<std::string> out;
    std::string current;
    auto flush = [&] {
        if (current.find_first_not_of(" \t\r") != std::string::npos) out.push_back(current);
        current.clear();
    };
    for (std::size_t i = 0; i < run.size(); ++i) {
        const char c = run[i];
        if (c == '\\' && i + 1 < run.size() && run[i + 1] == '\n') {
            current += ' ';
            ++i;
        } else if (c == '\n' || c == ';') {
            flush();
        } else if (c == '&' && i + 1 < run.size() && run[i + 1] == '&') {
            flush();
            ++i;
        } else {
            current += c;
        }
    }
    flush();
    return out;
}

std::vector<std::string> tokenize(const std::string& command) {
    std::istringstream in(command);
    std::vector<std::string> out;
    std::string token;
    while (in >> token) {
        token.erase(std::remove(token.begin(), token.end(), '"'), token.end());
        token.erase(std::remove(token.begin(), token.end(), '\''), token.end());
        if (!token.empty()) out.push_back(token);
    }
    if (!out.empty() && out.front() == "sudo") out.erase(out.begin());
    return out;
}

struct DockerRefs {
    std::vector<std::string> built;
    std::vector<std::string> pushed;
};

void scan_command(const std::vector<std::string>& t, DockerRefs& refs) {
    if (t.size() < 2 || t[0] != "docker") return;
    std::size_t verb = 1;
    if ((t[1] == "buildx" || t[1] == "image") && t.size() > 2) verb = 2;
    if (t[verb] == "build") {
        for (std::size_t i = verb + 1; i < t.size(); ++i) {
            if ((t[i] == "-t" || t[i] == "--tag") && i + 1 < t.size()) {
                refs.built.push_back(image_repository(t[++i]));
            } else if (t[i].rfind("-t=", 0) == 0) {
                refs.built.push_back(image_repository(t[i].substr(3)));
            } else if (t[i].rfind("--tag=", 0) == 0) {
                refs.built.push_back(image_repository(t[i].substr(6)));
            }
        }
    } else if (t[verb] == "push") {
        for (std::size_t i = verb + 1; i < t.size(); ++i) {
            if (t[i].front() == '-') continue;
            refs.pushed.push_back(image_repository(t[i]));
            break;
        }
    }
}

DockerRefs scan_workflow(const WorkflowDocument& document) {
    DockerRefs refs;
    for (const auto& job : document.jobs) {
        for (const auto& step : job.steps) {
            for (const auto& command : split_commands(step.run)) scan_command(tokenize(command), refs);
        }
    }
    return refs;
}

std::optional<NodeId> owning_compute_by_id(const PropertyGraph& graph, const std::string& id) {
    for (const auto& node : graph.nodes()) {
        const auto* pid = node.property("provider_id");
        if (pid && std::get_if<std::string>(pid) && std::get<std::string>(*pid) == id &&
            graph.ontology().has_class(node.class_name) &&
            graph.ontology().is_subclass(node.class_name, "Compute")) {
            return node.id;
        }
    }
    return std::nullopt;
}

}  // namespace

const Scalar* InventoryResource::property(std::string_view key) const {
    auto it = properties.find(key);
    return it == properties.end() ? nullptr : &it->second;
}

InventoryDocument parse_inventory(std::string_view yaml_text) {
    const json document = parse_yaml(yaml_text, "inventory");
    doc::only_keys(document, {"provider", "resources"}, "inventory");
    InventoryDocument out;
    out.provider = doc::string_field(document, "provider", "inventory");
    const std::string ctx = "inventory " + out.provider;
    std::set<std::string> ids;
    for (const auto& entry : doc::array_field(document, "resources", ctx)) {
        doc::only_keys(entry, {"id", "name", "provider_type", "region", "properties", "links"},
                       ctx + ".resources");
        InventoryResource r;
        r.id = doc::string_field(entry, "id", ctx + ".resources");
        const std::string rctx = ctx + " resource " + r.id;
        if (!ids.insert(r.id).second) {
            throw Error(ErrorCode::DuplicateResource, r.id, ctx + ": duplicate resource id " + r.id);
        }
        r.name = doc::optional_string(entry, "name", rctx).value_or(r.id);
        r.provider_type = doc::string_field(entry, "provider_type", rctx);
        r.region = doc::optional_string(entry, "region", rctx);
        if (auto it = entry.find("properties"); it != entry.end() && !it->is_null()) {
            doc::require_object(*it, rctx + ".properties");
            for (const auto& [key, value] : it->items()) {
                Scalar scalar = scalar_from(value, rctx + "." + key);
                for (const auto& spec : kRecognizedProperties) {
                    if (spec.key == key && kind_of(scalar) != spec.kind) {
                        throw Error(ErrorCode::Schema, key,
                                    rctx + ": property " + key + " must be " + to_string(spec.kind));
                    }
                }
                if (key == "auth") {
                    const auto& mode = std::get<std::string>(scalar);
                    if (mode != "none" && mode != "token") {
                        throw Error(ErrorCode::Schema, mode, rctx + ": auth must be none or token");
                    }
                }
                r.properties.emplace(key, std::move(scalar));
            }
        }
        if (auto it = entry.find("links"); it != entry.end() && !it->is_null()) {
            doc::require_object(*it, rctx + ".links");
            for (const auto& [key, value] : it->items()) {
                if (std::find(std::begin(kLinkKeys), std::end(kLinkKeys), key) == std::end(kLinkKeys)) {
                    throw Error(ErrorCode::Schema, key, rctx + ": unknown link key '" + key + "'");
                }
                auto& targets = r.links[key];
                if (value.is_string()) {
                    targets.push_back(value.get<std::string>());
                } else {
                    doc::require_array(value, rctx + ".links." + key);
                    for (const auto& item : value) {
                        if (!item.is_string()) {
                            throw Error(ErrorCode::Schema, key, rctx + ": link targets must be strings");
                        }
                        targets.push_back(item.get<std::string>());
                    }
                }
            }
        }
        out.resources.push_back(std::move(r));
    }
    return out;
}

WorkflowDocument parse_workflow(std::string_view yaml_text) {
    // Workflow files carry many keys this pass does not use (on, runs-on,
    // uses, with, ...); only the shape needed here is checked.
    const json document = parse_yaml(yaml_text, "workflow");
    doc::require_object(document, "workflow");
    WorkflowDocument out;
    out.name = doc::optional_string(document, "name", "workflow").value_or("");
    auto read_job = [&](const std::string& fallback_name, const json& job) {
        doc::require_object(job, "workflow job " + fallback_name);
        WorkflowJob parsed;
        parsed.name = doc::optional_string(job, "name", "workflow job").value_or(fallback_name);
        for (const auto& step : doc::array_field(job, "steps", "workflow job " + parsed.name)) {
            doc::require_object(step, "workflow step");
            if (auto run = doc::optional_string(step, "run", "workflow step")) {
                parsed.steps.push_back({*run});
            }
        }
        out.jobs.push_back(std::move(parsed));
    };
    if (auto it = document.find("jobs"); it != document.end() && !it->is_null()) {
        if (it->is_object()) {
            for (const auto& [key, job] : it->items()) read_job(key, job);
        } else {
            doc::require_array(*it, "workflow.jobs");
            for (const auto& job : *it) read_job("", job);
        }
    }
    return out;
}

std::size_t attach_security_features(PropertyGraph& graph, const Ontology& ontology,
                                     NodeId resource, const InventoryResource& inv) {
    const auto endpoint = resource_endpoint(graph, resource);
    const NodeId front = endpoint.value_or(resource);
    std::size_t attached = 0;

    for (const auto& feature : ontology.offered_features(graph.node(resource).class_name)) {
        if (ontology.get(feature).kind != ClassKind::SecurityFeature) continue;

        if (feature == "GeoLocation") {
            if (!inv.region) continue;
            graph.add_edge(resource, geo_location(graph, *inv.region), EdgeType::GEO_LOCATION);
            ++attached;
        } else if (feature == "AtRestEncryption") {
            const auto enabled = bool_property(inv, "at_rest_encryption_enabled");
            const auto algorithm = string_property(inv, "at_rest_algorithm");
            if (!enabled && !algorithm) continue;
            Properties props;
            if (enabled) props.emplace("enabled", *enabled);
            if (algorithm) props.emplace("algorithm", *algorithm);
            const NodeId node = graph.add_node("AtRestEncryption", inv.name + " at-rest encryption",
                                               std::move(props));
            graph.add_edge(resource, node, EdgeType::AT_REST_ENCRYPTION);
            ++attached;
        } else if (feature == "TransportEncryption") {
            const auto enabled = bool_property(inv, "tls_enabled");
            const auto version = string_property(inv, "tls_version");
            if (!enabled && !version) continue;
            Properties props;
            props.emplace("enabled", enabled.value_or(true));
            if (version) props.emplace("tlsVersion", *version);
            const NodeId node = graph.add_node("TransportEncryption",
                                               inv.name + " transport encryption", std::move(props));
            graph.add_edge(front, node, EdgeType::TRANSPORT_ENCRYPTION);
            ++attached;
        } else if (feature == "NoAuthentication" || feature == "TokenBasedAuthentication") {
            auto mode = string_property(inv, "auth");
            if (!mode && bool_property(inv, "public_access").value_or(false)) mode = "none";
            if (!mode) continue;
            const bool wanted = (feature == "NoAuthentication") == (*mode == "none");
            if (!wanted) continue;
            const NodeId node = graph.add_node(feature, inv.name + " authentication");
            graph.add_edge(front, node, EdgeType::AUTHENTICITY);
            ++attached;
        }
    }
    return attached;
}

std::size_t ingest_inventories(PropertyGraph& graph, const Ontology& ontology,
                               std::span<const InventoryDocument> documents, Diagnostics& diagnostics,
                               const DiscoveryOptions& options) {
    struct Placed {
        const InventoryResource* inventory;
        NodeId node;
    };
    std::vector<Placed> placed;
    std::unordered_map<std::string, NodeId> by_id;
    std::size_t created = 0;

    for (const auto& document : documents) {
        for (const auto& r : document.resources) {
            std::string class_name;
            try {
                class_name = ontology.resolve_instance_class(document.provider, r.provider_type);
            } catch (const Error& ex) {
                if (!options.skip_unclassified) {
                    throw Error(ex.code(), ex.subject(),
                                "resource " + r.id + " (" + r.name + "): " + ex.what());
                }
                diagnostics.warn("skipping unclassified resource " + r.id + ": " + ex.what());
                continue;
            }
            if (by_id.count(r.id)) {
                throw Error(ErrorCode::DuplicateResource, r.id, "duplicate resource id " + r.id);
            }

            Properties props{{"provider_id", r.id}};
            const auto http_url = string_property(r, "http_url");
            if (const auto* pa = r.property("public_access");
                pa && ontology.find_data_property(class_name, "public_access")) {
                props.emplace("public_access", *pa);
            }
            if (http_url && ontology.find_data_property(class_name, "url")) {
                props.emplace("url", *http_url);
            }
            const NodeId node = graph.add_node(class_name, r.name, std::move(props));
            if (http_url) {
                const NodeId endpoint = graph.add_node("HttpEndpoint", *http_url,
                                                       {{"url", *http_url}, {"method", "ANY"}});
                graph.add_edge(node, endpoint, EdgeType::HAS_ENDPOINT);
            }
            attach_security_features(graph, ontology, node, r);
            by_id.emplace(r.id, node);
            placed.push_back({&r, node});
            ++created;
        }
    }

    auto resolve = [&](const Placed& source, const std::string& key, const std::string& target) {
        auto it = by_id.find(target);
        if (it == by_id.end()) {
            throw Error(ErrorCode::UnresolvedReference, target,
                        "resource " + source.inventory->id + ": dangling " + key + " link to " + target);
        }
        return it->second;
    };

    for (const auto& p : placed) {
        for (const auto& [key, targets] : p.inventory->links) {
            for (const auto& target : targets) {
                if (key == "member_of") {
                    graph.ensure_edge(resolve(p, key, target), p.node, EdgeType::CONTAINS);
                } else if (key == "targets") {
                    graph.ensure_edge(p.node, resolve(p, key, target), EdgeType::TARGETS);
                } else if (key == "image") {
                    const NodeId image = find_or_add(graph, "ContainerImage", image_repository(target));
                    graph.ensure_edge(p.node, image, EdgeType::USES_IMAGE);
                } else if (key == "forwards_logs_to") {
                    const NodeId storage = resolve(p, key, target);
                    graph.ensure_edge(p.node, storage, EdgeType::LOGS_TO);
                    // Log shipping is an append-only write into the sink.
                    const auto& sink = graph.node(storage);
                    Properties props{{"type", "append"}, {"container", sink.name}};
                    if (auto ep = resource_endpoint(graph, storage)) {
                        if (const auto* url = graph.node(*ep).property("url")) props.emplace("account_url", *url);
                    }
                    const NodeId request =
                        graph.add_node("ObjectStorageRequest", "append " + sink.name, std::move(props));
                    graph.add_edge(request, p.node, EdgeType::SOURCE);
                    graph.add_edge(request, storage, EdgeType::TO);
                }
            }
        }
    }
    return created;
}

std::size_t ingest_inventory(PropertyGraph& graph, const Ontology& ontology,
                             const InventoryDocument& document, Diagnostics& diagnostics,
                             const DiscoveryOptions& options) {
    return ingest_inventories(graph, ontology, std::span(&document, 1), diagnostics, options);
}

RegistryLocations default_registry_locations() { return {{"ghcr.io", "us"}}; }

std::string image_repository(std::string_view image) {
    std::string out(image);
    if (auto at = out.find('@'); at != std::string::npos) out.erase(at);
    const auto slash = out.rfind('/');
    const auto colon = out.rfind(':');
    if (colon != std::string::npos && (slash == std::string::npos || colon > slash)) out.erase(colon);
    return out;
}

std::string registry_host(std::string_view image) {
    const auto slash = image.find('/');
    if (slash == std::string_view::npos) return "ghcr.io";
    const auto first = image.substr(0, slash);
    if (first.find('.') != std::string_view::npos || first.find(':') != std::string_view::npos ||
        first == "localhost") {
        return std::string(first);
    }
    return "ghcr.io";
}

std::size_t ingest_workflows(PropertyGraph& graph, std::span<const WorkflowDocument> documents,
                             const RegistryLocations& locations, Diagnostics& diagnostics) {
    std::vector<DockerRefs> scanned;
    std::set<std::string> built_anywhere;
    for (const auto& document : documents) {
        scanned.push_back(scan_workflow(document));
        built_anywhere.insert(scanned.back().built.begin(), scanned.back().built.end());
    }

    std::set<std::string> images;
    for (std::size_t i = 0; i < documents.size(); ++i) {
        for (const auto& name : scanned[i].built) {
            find_or_add(graph, "ContainerImage", name);
            images.insert(name);
        }
        for (const auto& name : scanned[i].pushed) {
            if (!built_anywhere.count(name)) {
                diagnostics.warn("workflow '" + documents[i].name + "' pushes image " + name +
                                 " that no scanned workflow builds");
            }
            const NodeId image = find_or_add(graph, "ContainerImage", name);
            images.insert(name);
            const std::string host = registry_host(name);
            const NodeId registry = find_or_add(graph, "ContainerRegistry", host);
            graph.ensure_edge(image, registry, EdgeType::PUSHES_TO);
            if (auto loc = locations.find(host); loc != locations.end()) {
                graph.ensure_edge(registry, geo_location(graph, loc->second), EdgeType::GEO_LOCATION);
            }
        }
    }
    return images.size();
}

std::size_t ingest_workflow(PropertyGraph& graph, const WorkflowDocument& document,
                            const RegistryLocations& locations, Diagnostics& diagnostics) {
    return ingest_workflows(graph, std::span(&document, 1), locations, diagnostics);
}

std::size_t link_applications(PropertyGraph& graph, Diagnostics& diagnostics) {
    std::size_t created = 0;
    const std::vector<NodeId> apps(graph.nodes_with_class("Application").begin(),
                                   graph.nodes_with_class("Application").end());
    for (auto app : apps) {
        const auto& node = graph.node(app);
        bool anchored = false;
        if (const auto* image = node.property("image")) {
            const auto repo = image_repository(std::get<std::string>(*image));
            if (auto image_node = graph.find_node("ContainerImage", repo)) {
                for (auto container : graph.predecessors(*image_node, EdgeType::USES_IMAGE)) {
                    created += graph.ensure_edge(app, container, EdgeType::RUNS_ON) ? 1 : 0;
                    anchored = true;
                }
            }
        } else if (const auto* host = node.property("host")) {
            if (auto compute = owning_compute_by_id(graph, std::get<std::string>(*host))) {
                created += graph.ensure_edge(app, *compute, EdgeType::RUNS_ON) ? 1 : 0;
                anchored = true;
            }
        }
        if (!anchored) {
            diagnostics.warn("application " + graph.node(app).name +
                             " is not linked to any compute resource");
        }
    }

    const std::vector<NodeId> images(graph.nodes_with_class("ContainerImage").begin(),
                                     graph.nodes_with_class("ContainerImage").end());
    for (auto image : images) {
        for (auto registry : graph.successors(image, EdgeType::PUSHES_TO)) {
            for (auto container : graph.predecessors(image, EdgeType::USES_IMAGE)) {
                graph.ensure_edge(registry, container, EdgeType::DFG);
            }
        }
    }
    return created;
}

}  // namespace cloudpg
