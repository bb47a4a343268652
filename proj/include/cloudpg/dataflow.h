#pragma once

// Cross-service data-flow resolution. Run in this order:
// create_proxied_endpoints, resolve_http_requests, resolve_storage_requests,
// propagate_log_flows. Every pass is idempotent.

#include <cstddef>
#include <string>
#include <string_view>

#include "cloudpg/discovery.h"
#include "cloudpg/graph.h"

namespace cloudpg {

struct UrlParts {
    std::string scheme;  // may be empty
    std::string host;
    std::string port;    // may be empty; ignored when matching
    std::string path;    // always starts with "/", no duplicate slashes

    bool operator==(const UrlParts&) const = default;
};

UrlParts parse_url(std::string_view url);
std::string format_url(const UrlParts& url);
// Host and path must agree; scheme and port are ignored.
bool same_resource(const UrlParts& a, const UrlParts& b);

std::size_t create_proxied_endpoints(PropertyGraph& graph, Diagnostics& diagnostics);
std::size_t resolve_http_requests(PropertyGraph& graph);
std::size_t resolve_storage_requests(PropertyGraph& graph);
std::size_t propagate_log_flows(PropertyGraph& graph);

}  // namespace cloudpg
