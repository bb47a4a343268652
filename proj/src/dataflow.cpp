#include "cloudpg/dataflow.h"

#include <algorithm>
#include <optional>

#include "cloudpg/error.h"

namespace cloudpg {

namespace {

std::optional<std::string> string_prop(const Node& node, std::string_view key) {
    const auto* value = node.property(key);
    if (!value) return std::nullopt;
    if (const auto* s = std::get_if<std::string>(value)) return *s;
    return std::nullopt;
}

bool has_label(const PropertyGraph& graph, NodeId id, std::string_view label) {
    return node_matches_label(graph, graph.ontology(), id, label);
}

std::vector<NodeId> nodes_matching(const PropertyGraph& graph, std::string_view label) {
    std::vector<NodeId> out;
    for (const auto& node : graph.nodes()) {
        if (class_matches_label(graph.ontology(), node.class_name, label)) out.push_back(node.id);
    }
    return out;
}

// Local endpoints of an application: Application -OFFERS-> handler -HAS_ENDPOINT-> endpoint.
std::vector<NodeId> application_endpoints(const PropertyGraph& graph, NodeId app) {
    std::vector<NodeId> out;
    for (auto handler : graph.successors(app, EdgeType::OFFERS)) {
        if (graph.node(handler).class_name != "HttpRequestHandler") continue;
        for (auto endpoint : graph.successors(handler, EdgeType::HAS_ENDPOINT)) {
            if (graph.node(endpoint).class_name == "HttpEndpoint") out.push_back(endpoint);
        }
    }
    return out;
}

std::optional<NodeId> owning_application(const PropertyGraph& graph, NodeId code_node) {
    NodeId current = code_node;
    for (int depth = 0; depth < 4; ++depth) {
        if (graph.node(current).class_name == "Application") return current;
        const auto parents = graph.predecessors(current, EdgeType::CONTAINS);
        if (parents.empty()) return std::nullopt;
        current = parents.front();
    }
    return std::nullopt;
}

}  // namespace

UrlParts parse_url(std::string_view url) {
    UrlParts out;
    std::string_view rest = url;
    if (auto scheme_end = rest.find("://"); scheme_end != std::string_view::npos) {
        out.scheme = std::string(rest.substr(0, scheme_end));
        rest.remove_prefix(scheme_end + 3);
    }
    const auto authority_end = rest.find_first_of("/?#");
    std::string_view authority = rest.substr(0, authority_end);
    rest = authority_end == std::string_view::npos ? std::string_view{} : rest.substr(authority_end);
    if (auto colon = authority.rfind(':'); colon != std::string_view::npos) {
        out.port = std::string(authority.substr(colon + 1));
        authority = authority.substr(0, colon);
    }
    out.host = std::string(authority);

    const auto path_end = rest.find_first_of("?#");
    const std::string_view raw_path = rest.substr(0, path_end);
    out.path = "/";
    for (char c : raw_path) {
        if (c == '/' && out.path.back() == '/') continue;
        out.path += c;
    }
    return out;
}

std::string format_url(const UrlParts& url) {
    std::string out;
    if (!url.scheme.empty()) out += url.scheme + "://";
    out += url.host;
    if (!url.port.empty()) out += ":" + url.port;
    out += url.path;
    return out;
}

bool same_resource(const UrlParts& a, const UrlParts& b) {
    return a.host == b.host && a.path == b.path;
}

std::size_t create_proxied_endpoints(PropertyGraph& graph, Diagnostics& diagnostics) {
    std::size_t created = 0;
    for (auto balancer : nodes_matching(graph, "LoadBalancer")) {
        const auto targets = graph.successors(balancer, EdgeType::TARGETS);
        if (targets.empty()) continue;
        const auto base = string_prop(graph.node(balancer), "url");
        if (!base) {
            diagnostics.warn("load balancer " + graph.node(balancer).name +
                             " has no url; skipping endpoint proxying");
            continue;
        }
        for (auto target : targets) {
            if (!has_label(graph, target, "Compute")) continue;
            for (auto app : graph.predecessors(target, EdgeType::RUNS_ON)) {
                for (auto endpoint : application_endpoints(graph, app)) {
                    bool exists = false;
                    for (auto existing : graph.successors(balancer, EdgeType::HAS_ENDPOINT)) {
                        if (graph.find_edge(existing, endpoint, EdgeType::PROXIES)) exists = true;
                    }
                    if (exists) continue;
                    const auto& local = graph.node(endpoint);
                    const std::string url = *base + string_prop(local, "path").value_or(local.name);
                    Properties props{{"url", url}};
                    if (auto method = string_prop(local, "method")) props.emplace("method", *method);
                    const NodeId proxied = graph.add_node("ProxiedEndpoint", url, std::move(props));
                    graph.add_edge(balancer, proxied, EdgeType::HAS_ENDPOINT);
                    graph.add_edge(proxied, endpoint, EdgeType::PROXIES);
                    ++created;
                }
            }
        }
    }
    return created;
}

std::size_t resolve_http_requests(PropertyGraph& graph) {
    struct Target {
        NodeId node;
        UrlParts url;
        std::string method;
    };
    std::vector<Target> targets;
    for (auto id : nodes_matching(graph, "HttpEndpoint")) {
        const auto& node = graph.node(id);
        if (auto url = string_prop(node, "url")) {
            targets.push_back({id, parse_url(*url), string_prop(node, "method").value_or("ANY")});
        }
    }

    std::size_t created = 0;
    const std::vector<NodeId> requests(graph.nodes_with_class("HttpRequest").begin(),
                                       graph.nodes_with_class("HttpRequest").end());
    for (auto request : requests) {
        const auto& node = graph.node(request);
        const auto url = string_prop(node, "url");
        if (!url) continue;
        const UrlParts wanted = parse_url(*url);
        const auto method = string_prop(node, "method").value_or("");
        for (const auto& target : targets) {
            if (!same_resource(wanted, target.url)) continue;
            if (target.method != "ANY" && target.method != method) continue;
            created += graph.ensure_edge(request, target.node, EdgeType::TO) ? 1 : 0;

            std::vector<NodeId> handlers = graph.successors(target.node, EdgeType::CALLS);
            for (auto local : graph.successors(target.node, EdgeType::PROXIES)) {
                auto more = graph.successors(local, EdgeType::CALLS);
                handlers.insert(handlers.end(), more.begin(), more.end());
            }
            for (auto call : graph.successors(request, EdgeType::SOURCE)) {
                for (auto function : handlers) {
                    graph.ensure_edge(call, function, EdgeType::DFG);
                    graph.ensure_edge(function, call, EdgeType::DFG);
                }
            }
        }
    }
    return created;
}

std::size_t resolve_storage_requests(PropertyGraph& graph) {
    struct Storage {
        NodeId node;
        std::string name;
        std::vector<std::string> hosts;
    };
    std::vector<Storage> storages;
    for (auto id : nodes_matching(graph, "ObjectStorage")) {
        Storage s{id, graph.node(id).name, {}};
        for (auto ep : graph.successors(id, EdgeType::HAS_ENDPOINT)) {
            if (auto url = string_prop(graph.node(ep), "url")) s.hosts.push_back(parse_url(*url).host);
        }
        storages.push_back(std::move(s));
    }

    std::size_t created = 0;
    const std::vector<NodeId> requests(graph.nodes_with_class("ObjectStorageRequest").begin(),
                                       graph.nodes_with_class("ObjectStorageRequest").end());
    for (auto request : requests) {
        const auto& node = graph.node(request);
        const auto account = string_prop(node, "account_url");
        const auto container = string_prop(node, "container");
        if (!account || !container) continue;
        const std::string host = parse_url(*account).host;

        std::optional<NodeId> match;
        for (const auto& s : storages) {
            if (s.name != *container) continue;
            if (std::find(s.hosts.begin(), s.hosts.end(), host) == s.hosts.end()) continue;
            if (match) {
                throw Error(ErrorCode::AmbiguousMatch, *container,
                            "storage request " + node.name + " matches both " +
                                to_string(*match) + " and " + to_string(s.node) + " (" + s.name + ")");
            }
            match = s.node;
        }
        if (!match) continue;
        created += graph.ensure_edge(request, *match, EdgeType::TO) ? 1 : 0;

        for (auto origin : graph.successors(request, EdgeType::SOURCE)) {
            if (graph.node(origin).class_name != "CallExpression") continue;
            if (auto app = owning_application(graph, origin)) {
                for (auto compute : graph.successors(*app, EdgeType::RUNS_ON)) {
                    graph.ensure_edge(request, compute, EdgeType::SOURCE);
                }
            }
        }
    }
    return created;
}

std::size_t propagate_log_flows(PropertyGraph& graph) {
    std::size_t created = 0;
    const std::vector<NodeId> apps(graph.nodes_with_class("Application").begin(),
                                   graph.nodes_with_class("Application").end());
    for (auto app : apps) {
        std::vector<NodeId> outputs;
        for (auto id : graph.successors(app, EdgeType::OFFERS)) {
            if (graph.node(id).class_name == "LogOutput") outputs.push_back(id);
        }
        if (outputs.empty()) continue;
        for (auto compute : graph.successors(app, EdgeType::RUNS_ON)) {
            std::vector<NodeId> holders{compute};
            for (auto cluster : graph.predecessors(compute, EdgeType::CONTAINS)) holders.push_back(cluster);
            for (auto holder : holders) {
                const auto sinks = graph.successors(holder, EdgeType::LOGS_TO);
                if (sinks.empty()) continue;
                for (auto output : outputs) {
                    created += graph.ensure_edge(output, holder, EdgeType::DFG) ? 1 : 0;
                }
                for (auto sink : sinks) {
                    created += graph.ensure_edge(holder, sink, EdgeType::DFG) ? 1 : 0;
                }
            }
        }
    }
    return created;
}

}  // namespace cloudpg
