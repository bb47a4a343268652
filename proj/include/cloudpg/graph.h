#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cloudpg/ontology.h"
#include "cloudpg/structured.h"

namespace cloudpg {

struct NodeId {
    std::uint64_t value = 0;
    auto operator<=>(const NodeId&) const = default;
};

struct EdgeId {
    std::uint64_t value = 0;
    auto operator<=>(const EdgeId&) const = default;
};

std::string to_string(NodeId id);  // "n<k>"
std::string to_string(EdgeId id);  // "e<k>"

enum class EdgeType {
    DFG,
    EOG,  // registered, never produced
    TO,
    SOURCE,
    RUNS_ON,
    AUTHENTICITY,
    TRANSPORT_ENCRYPTION,
    AT_REST_ENCRYPTION,
    GEO_LOCATION,
    OFFERS,
    HAS_ENDPOINT,
    PROXIES,
    TARGETS,
    USES_IMAGE,
    PUSHES_TO,
    CONTAINS,
    CALLS,
    LOGS_TO,
};

inline constexpr std::size_t kEdgeTypeCount = 18;

std::string_view to_string(EdgeType type);
std::optional<EdgeType> parse_edge_type(std::string_view token);
const std::array<EdgeType, kEdgeTypeCount>& all_edge_types();

using Scalar = std::variant<bool, std::int64_t, std::string>;
using Properties = std::map<std::string, Scalar, std::less<>>;

std::string render_scalar(const Scalar& value);  // strings quoted
ScalarKind kind_of(const Scalar& value);

// Classes that live outside the ontology: the code-graph vocabulary.
inline constexpr std::array<std::string_view, 5> kCodeClasses = {
    "Application", "FunctionDeclaration", "CallExpression", "Expression", "Literal"};
bool is_code_class(std::string_view class_name);

inline constexpr std::string_view kUniversalLabel = "Node";

struct Node {
    NodeId id;
    std::string class_name;
    std::string name;
    Properties properties;

    const Scalar* property(std::string_view key) const;
};

struct Edge {
    EdgeId id;
    NodeId from;
    NodeId to;
    EdgeType type = EdgeType::DFG;
    Properties properties;
};

// node0 edge0 node1 ... nodeK; forward[i] is true when edges[i] points from
// nodes[i] to nodes[i+1].
struct Path {
    std::vector<NodeId> nodes;
    std::vector<EdgeId> edges;
    std::vector<bool> forward;

    bool operator==(const Path&) const = default;
};

// Node and edge ids are dense: the k-th node added has id k. There is no
// deletion, so ids are never reused. After freeze() the graph is read-only
// and may be shared between threads.
class PropertyGraph {
public:
    explicit PropertyGraph(std::shared_ptr<const Ontology> ontology);

    const Ontology& ontology() const { return *ontology_; }
    const std::shared_ptr<const Ontology>& ontology_ptr() const { return ontology_; }

    NodeId add_node(std::string class_name, std::string name, Properties properties = {});
    EdgeId add_edge(NodeId from, NodeId to, EdgeType type, Properties properties = {});

    // Adds the edge unless an identical (from, to, type) edge exists.
    // Returns true when a new edge was created.
    bool ensure_edge(NodeId from, NodeId to, EdgeType type);
    std::optional<EdgeId> find_edge(NodeId from, NodeId to, EdgeType type) const;

    void freeze() { frozen_ = true; }
    bool frozen() const { return frozen_; }

    bool has_node(NodeId id) const { return id.value < nodes_.size(); }
    const Node& node(NodeId id) const;
    const Edge& edge(EdgeId id) const;
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<Edge>& edges() const { return edges_; }

    std::span<const EdgeId> out_edges(NodeId id) const;
    std::span<const EdgeId> in_edges(NodeId id) const;
    std::span<const EdgeId> edges_of_type(EdgeType type) const;

    // Exact class_name only; inheritance is resolved by node_matches_label.
    std::span<const NodeId> nodes_with_class(std::string_view class_name) const;
    const std::map<std::string, std::vector<NodeId>, std::less<>>& label_index() const {
        return label_index_;
    }

    // Outgoing (or incoming) neighbours over edges of one type.
    std::vector<NodeId> successors(NodeId id, EdgeType type) const;
    std::vector<NodeId> predecessors(NodeId id, EdgeType type) const;

    // First node of the exact class with the given name.
    std::optional<NodeId> find_node(std::string_view class_name, std::string_view name) const;

private:
    void check_mutable() const;
    void validate_properties(const std::string& class_name, const Properties& properties) const;

    std::shared_ptr<const Ontology> ontology_;
    std::vector<Node> nodes_;
    std::vector<Edge> edges_;
    std::vector<std::vector<EdgeId>> out_;
    std::vector<std::vector<EdgeId>> in_;
    std::array<std::vector<EdgeId>, kEdgeTypeCount> by_type_;
    std::map<std::string, std::vector<NodeId>, std::less<>> label_index_;
    bool frozen_ = false;
};

// Universal label "Node"; exact class; ontology ancestors; and Expression
// covering CallExpression and Literal.
bool node_matches_label(const PropertyGraph& graph, const Ontology& ontology, NodeId node,
                        std::string_view label);
bool class_matches_label(const Ontology& ontology, std::string_view class_name,
                         std::string_view label);

json graph_to_json(const PropertyGraph& graph);
std::string export_graph(const PropertyGraph& graph);
PropertyGraph graph_from_json(const json& document);
PropertyGraph import_graph(std::string_view document);

}  // namespace cloudpg
