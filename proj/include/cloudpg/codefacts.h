#pragma once

// Code facts: a language-independent digest of one application's
// declarations, calls and framework markers, produced by an upstream
// extractor. Ingesting a bundle creates the code part of the graph; the
// builders then add the framework functionality nodes.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cloudpg/graph.h"

namespace cloudpg {

struct HttpHandlerFact {
    std::string path;    // starts with "/"
    std::string method;  // GET | POST | PUT | DELETE
};

struct ExpressionFact {
    std::string id;
    std::string code;
    bool literal = false;
};

struct FunctionFact {
    std::string qualified_name;
    std::vector<std::string> parameters;
    std::optional<HttpHandlerFact> http_handler;
    std::optional<std::string> handler_class;
    std::vector<std::string> log_calls;
    std::vector<ExpressionFact> expressions;
};

enum class CallKind { Plain, HttpClient, StorageSdk };
enum class StorageOperation { Create, Append, Read };

const char* to_string(CallKind kind);
const char* to_string(StorageOperation operation);

struct HttpCallFact {
    std::string url;
    std::string method;
};

struct StorageCallFact {
    std::string account_url;
    std::string container;
    StorageOperation operation = StorageOperation::Read;
};

struct CallFact {
    std::string id;
    std::string inside;
    CallKind kind = CallKind::Plain;
    std::optional<HttpCallFact> http;
    std::optional<StorageCallFact> storage;
    std::vector<std::string> arguments;
};

struct DfgFact {
    std::string from;
    std::string to;
};

// Expression refs: call ids, declared expression ids, "<function>#<param>"
// for parameters and "<function>#return" for return values.
struct CodeFactsBundle {
    std::string application;
    std::string language;
    std::optional<std::string> image;
    std::optional<std::string> host;  // compute resource id, used when there is no image
    std::vector<FunctionFact> functions;
    std::vector<CallFact> calls;
    std::vector<DfgFact> dfg;
};

CodeFactsBundle parse_code_facts(std::string_view yaml_text);

// What ingest_code_facts leaves behind for the framework builders.
struct AppIndex {
    NodeId application;
    CodeFactsBundle bundle;
    std::unordered_map<std::string, NodeId> functions;
    std::unordered_map<std::string, NodeId> expressions;
};

AppIndex ingest_code_facts(PropertyGraph& graph, CodeFactsBundle bundle);

std::size_t build_http_server_nodes(PropertyGraph& graph, const AppIndex& app);
std::size_t build_http_client_nodes(PropertyGraph& graph, const AppIndex& app);
std::size_t build_storage_request_nodes(PropertyGraph& graph, const AppIndex& app);

}  // namespace cloudpg
