#include "cloudpg/graph.h"

#include <algorithm>
#include <charconv>

#include "cloudpg/error.h"

namespace cloudpg {

namespace {

constexpr std::array<std::string_view, kEdgeTypeCount> kEdgeTypeNames = {
    "DFG",          "EOG",     "TO",           "SOURCE",    "RUNS_ON",
    "AUTHENTICITY", "TRANSPORT_ENCRYPTION",    "AT_REST_ENCRYPTION",
    "GEO_LOCATION", "OFFERS",  "HAS_ENDPOINT", "PROXIES",   "TARGETS",
    "USES_IMAGE",   "PUSHES_TO", "CONTAINS",   "CALLS",     "LOGS_TO",
};

std::size_t type_slot(EdgeType type) { return static_cast<std::size_t>(type); }

json scalar_to_json(const Scalar& value) {
    return std::visit([](const auto& v) { return json(v); }, value);
}

Scalar scalar_from_json(const json& value, const std::string& context) {
    if (value.is_boolean()) return value.get<bool>();
    if (value.is_number_integer()) return value.get<std::int64_t>();
    if (value.is_string()) return value.get<std::string>();
    throw Error(ErrorCode::Schema, context, context + ": property values must be scalars");
}

json properties_to_json(const Properties& properties) {
    json out = json::object();
    for (const auto& [key, value] : properties) out[key] = scalar_to_json(value);
    return out;
}

Properties properties_from_json(const json& object, const std::string& context) {
    Properties out;
    if (object.is_null()) return out;
    doc::require_object(object, context);
    for (const auto& [key, value] : object.items()) {
        out.emplace(key, scalar_from_json(value, context + "." + key));
    }
    return out;
}

std::uint64_t parse_id(const json& value, char prefix, const std::string& context) {
    if (!value.is_string()) {
        throw Error(ErrorCode::Schema, context, context + ": id must be a string");
    }
    const auto text = value.get<std::string>();
    std::uint64_t out = 0;
    if (text.size() < 2 || text[0] != prefix) {
        throw Error(ErrorCode::Schema, text, context + ": malformed id '" + text + "'");
    }
    auto [ptr, ec] = std::from_chars(text.data() + 1, text.data() + text.size(), out);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw Error(ErrorCode::Schema, text, context + ": malformed id '" + text + "'");
    }
    return out;
}

}  // namespace

std::string to_string(NodeId id) { return "n" + std::to_string(id.value); }
std::string to_string(EdgeId id) { return "e" + std::to_string(id.value); }

std::string_view to_string(EdgeType type) { return kEdgeTypeNames[type_slot(type)]; }

std::optional<EdgeType> parse_edge_type(std::string_view token) {
    for (std::size_t i = 0; i < kEdgeTypeNames.size(); ++i) {
        if (kEdgeTypeNames[i] == token) return static_cast<EdgeType>(i);
    }
    return std::nullopt;
}

const std::array<EdgeType, kEdgeTypeCount>& all_edge_types() {
    static const auto types = [] {
        std::array<EdgeType, kEdgeTypeCount> out{};
        for (std::size_t i = 0; i < kEdgeTypeCount; ++i) out[i] = static_cast<EdgeType>(i);
        return out;
    }();
    return types;
}

std::string render_scalar(const Scalar& value) {
    if (const auto* b = std::get_if<bool>(&value)) return *b ? "true" : "false";
    if (const auto* i = std::get_if<std::int64_t>(&value)) return std::to_string(*i);
    return json(std::get<std::string>(value)).dump();
}

ScalarKind kind_of(const Scalar& value) {
    if (std::holds_alternative<bool>(value)) return ScalarKind::Boolean;
    if (std::holds_alternative<std::int64_t>(value)) return ScalarKind::Integer;
    return ScalarKind::String;
}

bool is_code_class(std::string_view class_name) {
    return std::find(kCodeClasses.begin(), kCodeClasses.end(), class_name) != kCodeClasses.end();
}

const Scalar* Node::property(std::string_view key) const {
    auto it = properties.find(key);
    return it == properties.end() ? nullptr : &it->second;
}

PropertyGraph::PropertyGraph(std::shared_ptr<const Ontology> ontology)
    : ontology_(ontology ? std::move(ontology) : std::make_shared<const Ontology>()) {}

void PropertyGraph::check_mutable() const {
    if (frozen_) throw Error(ErrorCode::GraphFrozen, "", "graph is frozen");
}

void PropertyGraph::validate_properties(const std::string& class_name,
                                        const Properties& properties) const {
    if (ontology_->has_class(class_name)) {
        for (const auto& [key, value] : properties) {
            if (key == "name" || key == "provider_id") continue;
            const auto* declared = ontology_->find_data_property(class_name, key);
            if (!declared) {
                throw Error(ErrorCode::DisallowedProperty, key,
                            "property '" + key + "' is not declared for class " + class_name);
            }
            if (declared->kind != kind_of(value)) {
                throw Error(ErrorCode::DisallowedProperty, key,
                            "property '" + key + "' of class " + class_name + " must be " +
                                to_string(declared->kind));
            }
        }
        return;
    }
    if (!is_code_class(class_name)) {
        throw Error(ErrorCode::UnknownClass, class_name, "unknown node class: " + class_name);
    }
}

NodeId PropertyGraph::add_node(std::string class_name, std::string name, Properties properties) {
    check_mutable();
    validate_properties(class_name, properties);
    const NodeId id{nodes_.size()};
    label_index_[class_name].push_back(id);
    nodes_.push_back({id, std::move(class_name), std::move(name), std::move(properties)});
    out_.emplace_back();
    in_.emplace_back();
    return id;
}

EdgeId PropertyGraph::add_edge(NodeId from, NodeId to, EdgeType type, Properties properties) {
    check_mutable();
    if (type_slot(type) >= kEdgeTypeCount) {
        throw Error(ErrorCode::UnregisteredEdgeType, std::to_string(type_slot(type)),
                    "unregistered edge type");
    }
    for (auto endpoint : {from, to}) {
        if (!has_node(endpoint)) {
            throw Error(ErrorCode::DanglingEndpoint, to_string(endpoint),
                        "edge endpoint does not exist: " + to_string(endpoint));
        }
    }
    const EdgeId id{edges_.size()};
    edges_.push_back({id, from, to, type, std::move(properties)});
    out_[from.value].push_back(id);
    in_[to.value].push_back(id);
    by_type_[type_slot(type)].push_back(id);
    return id;
}

std::optional<EdgeId> PropertyGraph::find_edge(NodeId from, NodeId to, EdgeType type) const {
    if (!has_node(from)) return std::nullopt;
    for (auto id : out_[from.value]) {
        const auto& e = edges_[id.value];
        if (e.to == to && e.type == type) return id;
    }
    return std::nullopt;
}

bool PropertyGraph::ensure_edge(NodeId from, NodeId to, EdgeType type) {
    if (find_edge(from, to, type)) return false;
    add_edge(from, to, type);
    return true;
}

const Node& PropertyGraph::node(NodeId id) const {
    if (!has_node(id)) {
        throw Error(ErrorCode::DanglingEndpoint, to_string(id), "no such node: " + to_string(id));
    }
    return nodes_[id.value];
}

const Edge& PropertyGraph::edge(EdgeId id) const { return edges_.at(id.value); }

std::span<const EdgeId> PropertyGraph::out_edges(NodeId id) const { return out_.at(id.value); }
std::span<const EdgeId> PropertyGraph::in_edges(NodeId id) const { return in_.at(id.value); }
std::span<const EdgeId> PropertyGraph::edges_of_type(EdgeType type) const {
    return by_type_[type_slot(type)];
}

std::span<const NodeId> PropertyGraph::nodes_with_class(std::string_view class_name) const {
    auto it = label_index_.find(class_name);
    if (it == label_index_.end()) return {};
    return it->second;
}

std::vector<NodeId> PropertyGraph::successors(NodeId id, EdgeType type) const {
    std::vector<NodeId> out;
    for (auto e : out_edges(id)) {
        if (edges_[e.value].type == type) out.push_back(edges_[e.value].to);
    }
    return out;
}

std::vector<NodeId> PropertyGraph::predecessors(NodeId id, EdgeType type) const {
    std::vector<NodeId> out;
    for (auto e : in_edges(id)) {
        if (edges_[e.value].type == type) out.push_back(edges_[e.value].from);
    }
    return out;
}

std::optional<NodeId> PropertyGraph::find_node(std::string_view class_name,
                                               std::string_view name) const {
    for (auto id : nodes_with_class(class_name)) {
        if (nodes_[id.value].name == name) return id;
    }
    return std::nullopt;
}

bool class_matches_label(const Ontology& ontology, std::string_view class_name,
                         std::string_view label) {
    if (label == kUniversalLabel || label == class_name) return true;
    if (label == "Expression" && (class_name == "CallExpression" || class_name == "Literal")) {
        return true;
    }
    return ontology.has_class(class_name) && ontology.has_class(label) &&
           ontology.is_subclass(class_name, label);
}

bool node_matches_label(const PropertyGraph& graph, const Ontology& ontology, NodeId node,
                        std::string_view label) {
    return class_matches_label(ontology, graph.node(node).class_name, label);
}

json graph_to_json(const PropertyGraph& graph) {
    json nodes = json::array();
    for (const auto& n : graph.nodes()) {
        nodes.push_back({{"id", to_string(n.id)},
                         {"class", n.class_name},
                         {"name", n.name},
                         {"properties", properties_to_json(n.properties)}});
    }
    json edges = json::array();
    for (const auto& e : graph.edges()) {
        edges.push_back({{"id", to_string(e.id)},
                         {"type", std::string(to_string(e.type))},
                         {"from", to_string(e.from)},
                         {"to", to_string(e.to)},
                         {"properties", properties_to_json(e.properties)}});
    }
    return {{"ontology", ontology_to_json(graph.ontology())},
            {"nodes", std::move(nodes)},
            {"edges", std::move(edges)}};
}

std::string export_graph(const PropertyGraph& graph) {
    return graph_to_json(graph).dump(2) + "\n";
}

PropertyGraph graph_from_json(const json& document) {
    doc::only_keys(document, {"ontology", "nodes", "edges"}, "graph");
    std::shared_ptr<const Ontology> ontology;
    if (auto it = document.find("ontology"); it != document.end() && !it->is_null()) {
        ontology = std::make_shared<const Ontology>(ontology_from_json(*it));
    }
    PropertyGraph graph(ontology);

    const json& nodes = doc::array_field(document, "nodes", "graph");
    std::vector<const json*> node_slots(nodes.size(), nullptr);
    for (const auto& entry : nodes) {
        doc::only_keys(entry, {"id", "class", "name", "properties"}, "graph.nodes");
        const auto id = parse_id(doc::required(entry, "id", "graph"), 'n', "graph.nodes");
        if (id >= node_slots.size() || node_slots[id]) {
            throw Error(ErrorCode::Schema, "n" + std::to_string(id),
                        "node ids must be unique and dense (n0..n" +
                            std::to_string(nodes.size()) + ")");
        }
        node_slots[id] = &entry;
    }
    for (const json* entry : node_slots) {
        graph.add_node(doc::string_field(*entry, "class", "graph.nodes"),
                       doc::optional_string(*entry, "name", "graph.nodes").value_or(""),
                       properties_from_json(entry->value("properties", json()), "node properties"));
    }

    const json& edges = doc::array_field(document, "edges", "graph");
    std::vector<const json*> edge_slots(edges.size(), nullptr);
    for (const auto& entry : edges) {
        doc::only_keys(entry, {"id", "type", "from", "to", "properties"}, "graph.edges");
        const auto id = parse_id(doc::required(entry, "id", "graph"), 'e', "graph.edges");
        if (id >= edge_slots.size() || edge_slots[id]) {
            throw Error(ErrorCode::Schema, "e" + std::to_string(id),
                        "edge ids must be unique and dense");
        }
        edge_slots[id] = &entry;
    }
    for (const json* entry : edge_slots) {
        const auto token = doc::string_field(*entry, "type", "graph.edges");
        const auto type = parse_edge_type(token);
        if (!type) {
            throw Error(ErrorCode::UnregisteredEdgeType, token, "unregistered edge type: " + token);
        }
        const NodeId from{parse_id(doc::required(*entry, "from", "graph"), 'n', "graph.edges")};
        const NodeId to{parse_id(doc::required(*entry, "to", "graph"), 'n', "graph.edges")};
        graph.add_edge(from, to, *type,
                       properties_from_json(entry->value("properties", json()), "edge properties"));
    }
    return graph;
}

PropertyGraph import_graph(std::string_view document) {
    json parsed;
    try {
        parsed = json::parse(document);
    } catch (const json::exception& ex) {
        throw Error(ErrorCode::Schema, "graph", std::string("malformed graph document: ") + ex.what());
    }
    return graph_from_json(parsed);
}

}  // namespace cloudpg
