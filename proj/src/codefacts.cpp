#include "cloudpg/codefacts.h"

#include <algorithm>
#include <map>
#include <unordered_set>

#include "cloudpg/error.h"

namespace cloudpg {

namespace {

constexpr std::string_view kHandlerMethods[] = {"GET", "POST", "PUT", "DELETE"};

std::string checked_method(const std::string& method, const std::string& context) {
    if (std::find(std::begin(kHandlerMethods), std::end(kHandlerMethods), method) ==
        std::end(kHandlerMethods)) {
        throw Error(ErrorCode::Schema, method, context + ": unsupported HTTP method " + method);
    }
    return method;
}

CallKind parse_call_kind(const std::string& text, const std::string& context) {
    if (text == "plain") return CallKind::Plain;
    if (text == "http_client") return CallKind::HttpClient;
    if (text == "storage_sdk") return CallKind::StorageSdk;
    throw Error(ErrorCode::Schema, text, context + ": unknown call kind " + text);
}

StorageOperation parse_operation(const std::string& text, const std::string& context) {
    if (text == "create") return StorageOperation::Create;
    if (text == "append") return StorageOperation::Append;
    if (text == "read") return StorageOperation::Read;
    throw Error(ErrorCode::Schema, text, context + ": unknown storage operation " + text);
}

void add_if_declared(PropertyGraph& graph, Properties& props, const std::string& class_name,
                     const std::string& key, Scalar value) {
    const auto& ontology = graph.ontology();
    if (!ontology.has_class(class_name) || ontology.find_data_property(class_name, key)) {
        props.emplace(key, std::move(value));
    }
}

// Resolves refs to graph nodes, materializing parameter/return expressions on
// first use.
class RefResolver {
public:
    RefResolver(PropertyGraph& graph, AppIndex& app) : graph_(graph), app_(app) {
        for (const auto& fn : app.bundle.functions) {
            for (const auto& param : fn.parameters) {
                lazy_.emplace(fn.qualified_name + "#" + param, std::pair{fn.qualified_name, param});
            }
            lazy_.emplace(fn.qualified_name + "#return", std::pair{fn.qualified_name, "return"});
        }
    }

    NodeId resolve(const std::string& ref) {
        if (auto it = app_.expressions.find(ref); it != app_.expressions.end()) return it->second;
        auto lazy = lazy_.find(ref);
        if (lazy == lazy_.end()) {
            throw Error(ErrorCode::UnresolvedReference, ref,
                        app_.bundle.application + ": unresolved expression ref " + ref);
        }
        const auto& [function, label] = lazy->second;
        const NodeId node = graph_.add_node("Expression", label, {{"ref", ref}});
        graph_.add_edge(app_.functions.at(function), node, EdgeType::CONTAINS);
        app_.expressions.emplace(ref, node);
        return node;
    }

private:
    PropertyGraph& graph_;
    AppIndex& app_;
    std::map<std::string, std::pair<std::string, std::string>> lazy_;
};

}  // namespace

const char* to_string(CallKind kind) {
    switch (kind) {
        case CallKind::Plain: return "plain";
        case CallKind::HttpClient: return "http_client";
        case CallKind::StorageSdk: return "storage_sdk";
    }
    return "plain";
}

const char* to_string(StorageOperation operation) {
    switch (operation) {
        case StorageOperation::Create: return "create";
        case StorageOperation::Append: return "append";
        case StorageOperation::Read: return "read";
    }
    return "read";
}

CodeFactsBundle parse_code_facts(std::string_view yaml_text) {
    const json document = parse_yaml(yaml_text, "code facts");
    doc::only_keys(document, {"application", "language", "image", "host", "functions", "calls", "dfg"},
                   "code facts");
    CodeFactsBundle bundle;
    bundle.application = doc::string_field(document, "application", "code facts");
    const std::string ctx = "code facts " + bundle.application;
    bundle.language = doc::optional_string(document, "language", ctx).value_or("");
    bundle.image = doc::optional_string(document, "image", ctx);
    bundle.host = doc::optional_string(document, "host", ctx);

    for (const auto& entry : doc::array_field(document, "functions", ctx)) {
        doc::only_keys(entry,
                       {"name", "parameters", "http_handler", "handler_class", "log_calls",
                        "expressions"},
                       ctx + ".functions");
        FunctionFact fn;
        fn.qualified_name = doc::string_field(entry, "name", ctx + ".functions");
        const std::string fctx = ctx + " function " + fn.qualified_name;
        fn.parameters = doc::string_list(entry, "parameters", fctx);
        if (auto it = entry.find("http_handler"); it != entry.end() && !it->is_null()) {
            doc::only_keys(*it, {"path", "method"}, fctx + ".http_handler");
            HttpHandlerFact handler{doc::string_field(*it, "path", fctx),
                                    checked_method(doc::string_field(*it, "method", fctx), fctx)};
            if (handler.path.empty() || handler.path.front() != '/') {
                throw Error(ErrorCode::Schema, handler.path,
                            fctx + ": handler path must begin with '/'");
            }
            fn.http_handler = std::move(handler);
        }
        fn.handler_class = doc::optional_string(entry, "handler_class", fctx);
        fn.log_calls = doc::string_list(entry, "log_calls", fctx);
        for (const auto& expr : doc::array_field(entry, "expressions", fctx)) {
            doc::only_keys(expr, {"id", "code", "literal"}, fctx + ".expressions");
            ExpressionFact fact;
            fact.id = doc::string_field(expr, "id", fctx);
            fact.code = doc::optional_string(expr, "code", fctx).value_or(fact.id);
            fact.literal = doc::optional_bool(expr, "literal", fctx).value_or(false);
            fn.expressions.push_back(std::move(fact));
        }
        bundle.functions.push_back(std::move(fn));
    }

    for (const auto& entry : doc::array_field(document, "calls", ctx)) {
        doc::only_keys(entry, {"id", "inside", "kind", "http", "storage", "arguments"},
                       ctx + ".calls");
        CallFact call;
        call.id = doc::string_field(entry, "id", ctx + ".calls");
        const std::string cctx = ctx + " call " + call.id;
        call.inside = doc::string_field(entry, "inside", cctx);
        call.kind = parse_call_kind(doc::optional_string(entry, "kind", cctx).value_or("plain"), cctx);
        if (auto it = entry.find("http"); it != entry.end() && !it->is_null()) {
            doc::only_keys(*it, {"url", "method"}, cctx + ".http");
            call.http = HttpCallFact{doc::string_field(*it, "url", cctx),
                                     checked_method(doc::string_field(*it, "method", cctx), cctx)};
        }
        if (auto it = entry.find("storage"); it != entry.end() && !it->is_null()) {
            doc::only_keys(*it, {"account_url", "container", "operation"}, cctx + ".storage");
            call.storage = StorageCallFact{
                doc::string_field(*it, "account_url", cctx), doc::string_field(*it, "container", cctx),
                parse_operation(doc::string_field(*it, "operation", cctx), cctx)};
        }
        if (call.http.has_value() != (call.kind == CallKind::HttpClient)) {
            throw Error(ErrorCode::Schema, call.id, cctx + ": `http` is required exactly for http_client calls");
        }
        if (call.storage.has_value() != (call.kind == CallKind::StorageSdk)) {
            throw Error(ErrorCode::Schema, call.id, cctx + ": `storage` is required exactly for storage_sdk calls");
        }
        call.arguments = doc::string_list(entry, "arguments", cctx);
        bundle.calls.push_back(std::move(call));
    }

    for (const auto& entry : doc::array_field(document, "dfg", ctx)) {
        doc::only_keys(entry, {"from", "to"}, ctx + ".dfg");
        bundle.dfg.push_back(
            {doc::string_field(entry, "from", ctx + ".dfg"), doc::string_field(entry, "to", ctx + ".dfg")});
    }
    return bundle;
}

AppIndex ingest_code_facts(PropertyGraph& graph, CodeFactsBundle bundle) {
    AppIndex app;
    app.bundle = std::move(bundle);
    const auto& facts = app.bundle;

    std::unordered_set<std::string> function_names;
    for (const auto& fn : facts.functions) {
        if (!function_names.insert(fn.qualified_name).second) {
            throw Error(ErrorCode::DuplicateFunction, fn.qualified_name,
                        facts.application + ": duplicate function " + fn.qualified_name);
        }
    }
    std::unordered_set<std::string> declared;
    auto declare = [&](const std::string& ref) {
        if (!declared.insert(ref).second) {
            throw Error(ErrorCode::Schema, ref, facts.application + ": duplicate expression ref " + ref);
        }
    };
    for (const auto& fn : facts.functions) {
        for (const auto& expr : fn.expressions) declare(expr.id);
    }
    for (const auto& call : facts.calls) {
        declare(call.id);
        if (!function_names.count(call.inside)) {
            throw Error(ErrorCode::UnresolvedReference, call.inside,
                        facts.application + ": call " + call.id + " inside unknown function " +
                            call.inside);
        }
    }

    for (const auto& fn : facts.functions) {
        for (const auto& param : fn.parameters) declared.insert(fn.qualified_name + "#" + param);
        declared.insert(fn.qualified_name + "#return");
    }
    auto check_ref = [&](const std::string& ref) {
        if (!declared.count(ref)) {
            throw Error(ErrorCode::UnresolvedReference, ref,
                        facts.application + ": unresolved expression ref " + ref);
        }
    };
    for (const auto& call : facts.calls) {
        for (const auto& arg : call.arguments) check_ref(arg);
    }
    for (const auto& pair : facts.dfg) {
        check_ref(pair.from);
        check_ref(pair.to);
    }
    for (const auto& fn : facts.functions) {
        for (const auto& ref : fn.log_calls) check_ref(ref);
    }

    Properties app_props;
    add_if_declared(graph, app_props, "Application", "language", facts.language);
    if (facts.image) add_if_declared(graph, app_props, "Application", "image", *facts.image);
    if (facts.host) add_if_declared(graph, app_props, "Application", "host", *facts.host);
    app.application = graph.add_node("Application", facts.application, std::move(app_props));

    for (const auto& fn : facts.functions) {
        const NodeId node = graph.add_node("FunctionDeclaration", fn.qualified_name);
        graph.add_edge(app.application, node, EdgeType::CONTAINS);
        app.functions.emplace(fn.qualified_name, node);
        for (const auto& expr : fn.expressions) {
            const NodeId e = graph.add_node(expr.literal ? "Literal" : "Expression", expr.code,
                                            {{"ref", expr.id}});
            graph.add_edge(node, e, EdgeType::CONTAINS);
            app.expressions.emplace(expr.id, e);
        }
    }
    for (const auto& call : facts.calls) {
        const NodeId node = graph.add_node("CallExpression", call.id,
                                           {{"ref", call.id}, {"kind", to_string(call.kind)}});
        graph.add_edge(app.functions.at(call.inside), node, EdgeType::CONTAINS);
        app.expressions.emplace(call.id, node);
    }

    RefResolver refs(graph, app);
    for (const auto& call : facts.calls) {
        for (const auto& arg : call.arguments) refs.resolve(arg);
    }
    for (const auto& pair : facts.dfg) {
        graph.add_edge(refs.resolve(pair.from), refs.resolve(pair.to), EdgeType::DFG);
    }

    std::optional<NodeId> log_output;
    for (const auto& fn : facts.functions) {
        for (const auto& ref : fn.log_calls) {
            if (!log_output) {
                log_output = graph.add_node("LogOutput", facts.application + " log");
                graph.add_edge(app.application, *log_output, EdgeType::OFFERS);
            }
            graph.ensure_edge(refs.resolve(ref), *log_output, EdgeType::DFG);
        }
    }
    return app;
}

std::size_t build_http_server_nodes(PropertyGraph& graph, const AppIndex& app) {
    std::map<std::string, NodeId> handlers;
    std::size_t created = 0;
    for (const auto& fn : app.bundle.functions) {
        if (!fn.http_handler) continue;
        const std::string handler_name = fn.handler_class.value_or(app.bundle.application);
        auto it = handlers.find(handler_name);
        if (it == handlers.end()) {
            const NodeId handler = graph.add_node("HttpRequestHandler", handler_name);
            graph.add_edge(app.application, handler, EdgeType::OFFERS);
            it = handlers.emplace(handler_name, handler).first;
        }
        const NodeId endpoint = graph.add_node(
            "HttpEndpoint", fn.http_handler->path,
            {{"path", fn.http_handler->path}, {"method", fn.http_handler->method}});
        graph.add_edge(it->second, endpoint, EdgeType::HAS_ENDPOINT);
        graph.add_edge(endpoint, app.functions.at(fn.qualified_name), EdgeType::CALLS);
        ++created;
    }
    return created;
}

std::size_t build_http_client_nodes(PropertyGraph& graph, const AppIndex& app) {
    std::size_t created = 0;
    for (const auto& call : app.bundle.calls) {
        if (call.kind != CallKind::HttpClient) continue;
        const NodeId request = graph.add_node(
            "HttpRequest", call.http->method + " " + call.http->url,
            {{"url", call.http->url}, {"method", call.http->method}});
        graph.add_edge(request, app.expressions.at(call.id), EdgeType::SOURCE);
        graph.add_edge(app.application, request, EdgeType::OFFERS);
        ++created;
    }
    return created;
}

std::size_t build_storage_request_nodes(PropertyGraph& graph, const AppIndex& app) {
    std::size_t created = 0;
    for (const auto& call : app.bundle.calls) {
        if (call.kind != CallKind::StorageSdk) continue;
        const auto& storage = *call.storage;
        const NodeId request = graph.add_node(
            "ObjectStorageRequest", std::string(to_string(storage.operation)) + " " + storage.container,
            {{"type", to_string(storage.operation)},
             {"account_url", storage.account_url},
             {"container", storage.container}});
        graph.add_edge(request, app.expressions.at(call.id), EdgeType::SOURCE);
        if (storage.operation != StorageOperation::Read) {
            for (const auto& arg : call.arguments) {
                graph.ensure_edge(app.expressions.at(arg), request, EdgeType::DFG);
            }
        }
        ++created;
    }
    return created;
}

}  // namespace cloudpg
