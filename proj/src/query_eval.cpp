#include <algorithm>
#include <sstream>

#include "cloudpg/query.h"

namespace cloudpg::query {

namespace {

struct PlanStep {
    std::size_t rel;
    std::size_t from;  // bound pattern node
    std::size_t to;    // pattern node bound by this step
    bool rightward;    // walking in pattern order
};

struct Bounds {
    int min = 1;
    int max = 1;
};

Bounds bounds_of(const RelPattern& rel, const EvaluateOptions& options) {
    switch (rel.length.kind) {
        case RelLength::Kind::One: return {1, 1};
        case RelLength::Kind::Exact: return {rel.length.min, rel.length.min};
        case RelLength::Kind::Star: return {rel.length.min, rel.length.max.value_or(options.star_max)};
    }
    return {1, 1};
}

std::string describe_node(const NodePattern& node) {
    return "(" + node.var.value_or("") + (node.label ? ":" + *node.label : "") + ")";
}

std::string describe_rel(const RelPattern& rel, const Bounds& bounds) {
    std::string body = rel.var.value_or("");
    if (rel.type) body += ":" + *rel.type;
    if (rel.length.kind == RelLength::Kind::Star) {
        body += "*" + std::to_string(bounds.min) + ".." + std::to_string(bounds.max);
    } else if (rel.length.kind == RelLength::Kind::Exact) {
        body += "*" + std::to_string(bounds.min);
    }
    const std::string inner = "[" + body + "]";
    switch (rel.direction) {
        case Direction::Left: return "<-" + inner + "-";
        case Direction::Right: return "-" + inner + "->";
        case Direction::Undirected: return "-" + inner + "-";
    }
    return inner;
}

class Matcher {
public:
    Matcher(const PropertyGraph& graph, const Ontology& ontology, const QueryAst& ast,
            const EvaluateOptions& options)
        : graph_(graph), ast_(ast) {
        const std::size_t node_count = graph.node_count();
        allowed_.resize(ast.nodes.size());
        candidates_.assign(ast.nodes.size(), 0);
        for (std::size_t p = 0; p < ast.nodes.size(); ++p) {
            auto& allowed = allowed_[p];
            allowed.assign(node_count, 0);
            const auto& label = ast.nodes[p].label;
            if (!label) {
                std::fill(allowed.begin(), allowed.end(), 1);
                candidates_[p] = node_count;
                continue;
            }
            for (const auto& [class_name, ids] : graph.label_index()) {
                if (!class_matches_label(ontology, class_name, *label)) continue;
                for (auto id : ids) allowed[id.value] = 1;
                candidates_[p] += ids.size();
            }
        }

        for (const auto& rel : ast.rels) {
            bounds_.push_back(bounds_of(rel, options));
            if (rel.type) {
                const auto type = parse_edge_type(*rel.type);
                types_.push_back(type);
                impossible_ = impossible_ || !type;
            } else {
                types_.push_back(std::nullopt);
            }
            impossible_ = impossible_ || bounds_.back().min > bounds_.back().max;
        }

        anchor_ = 0;
        for (std::size_t p = 1; p < candidates_.size(); ++p) {
            if (candidates_[p] < candidates_[anchor_]) anchor_ = p;
        }
        for (std::size_t i = anchor_; i + 1 < ast.nodes.size(); ++i) plan_.push_back({i, i, i + 1, true});
        for (std::size_t i = anchor_; i > 0; --i) plan_.push_back({i - 1, i, i - 1, false});

        same_var_.resize(ast.nodes.size());
        for (std::size_t p = 0; p < ast.nodes.size(); ++p) {
            for (std::size_t q = 0; q < ast.nodes.size(); ++q) {
                if (p != q && ast.nodes[p].var && ast.nodes[p].var == ast.nodes[q].var) {
                    same_var_[p].push_back(q);
                }
            }
        }
    }

    std::vector<MatchResult> run() {
        std::vector<MatchResult> results;
        if (impossible_) return results;
        bound_.assign(ast_.nodes.size(), std::nullopt);
        seg_edges_.assign(ast_.rels.size(), {});
        seg_forward_.assign(ast_.rels.size(), {});
        used_.assign(graph_.edge_count(), 0);
        results_ = &results;
        for (const auto& node : graph_.nodes()) {
            if (!bindable(anchor_, node.id)) continue;
            bound_[anchor_] = node.id;
            expand(0);
            bound_[anchor_].reset();
        }
        std::sort(results.begin(), results.end(), [](const MatchResult& a, const MatchResult& b) {
            if (a.path.nodes != b.path.nodes) return a.path.nodes < b.path.nodes;
            if (a.path.edges != b.path.edges) return a.path.edges < b.path.edges;
            return a.path.forward < b.path.forward;
        });
        return results;
    }

    std::string explain() const {
        std::ostringstream out;
        out << "anchor: node " << anchor_ << " " << describe_node(ast_.nodes[anchor_])
            << " candidates=" << candidates_[anchor_] << "\n";
        out << "seeds:\n";
        for (std::size_t p = 0; p < ast_.nodes.size(); ++p) {
            out << "  [" << p << "] " << describe_node(ast_.nodes[p]) << " " << candidates_[p]
                << (p == anchor_ ? "  <- anchor" : "") << "\n";
        }
        out << "expansions: " << plan_.size() << "\n";
        for (const auto& step : plan_) {
            const auto& rel = ast_.rels[step.rel];
            out << "  " << step.from << " -> " << step.to << " via " << describe_rel(rel, bounds_[step.rel]);
            if (rel.length.kind != RelLength::Kind::One) {
                out << " (expand " << bounds_[step.rel].min << ".." << bounds_[step.rel].max << " hops)";
            }
            out << "\n";
        }
        if (ast_.where) {
            std::size_t count = 0;
            for (const auto& conj : ast_.where->any_of) count += conj.size();
            out << "filter: " << count << " comparison(s) over " << ast_.where->any_of.size()
                << " disjunct(s)\n";
        }
        return out.str();
    }

private:
    bool bindable(std::size_t p, NodeId id) const {
        if (!allowed_[p][id.value]) return false;
        for (auto q : same_var_[p]) {
            if (bound_[q] && *bound_[q] != id) return false;
        }
        return true;
    }

    void expand(std::size_t k) {
        if (k == plan_.size()) {
            emit();
            return;
        }
        std::vector<EdgeId> edges;
        std::vector<bool> forward;
        walk(k, *bound_[plan_[k].from], 0, edges, forward);
    }

    void walk(std::size_t k, NodeId current, int depth, std::vector<EdgeId>& edges,
              std::vector<bool>& forward) {
        const auto& step = plan_[k];
        const auto& bounds = bounds_[step.rel];
        if (depth >= bounds.min && bindable(step.to, current)) {
            const bool was_bound = bound_[step.to].has_value();
            bound_[step.to] = current;
            auto& seg = seg_edges_[step.rel];
            auto& seg_fwd = seg_forward_[step.rel];
            seg = edges;
            seg_fwd = forward;
            if (!step.rightward) {
                std::reverse(seg.begin(), seg.end());
                std::reverse(seg_fwd.begin(), seg_fwd.end());
            }
            expand(k + 1);
            if (!was_bound) bound_[step.to].reset();
        }
        if (depth == bounds.max) return;

        const auto& rel = ast_.rels[step.rel];
        const auto& type = types_[step.rel];
        // Pattern arrow points left-to-right (Right) or right-to-left (Left).
        // Walking rightward an arrow Right leaves via out-edges; walking
        // leftward the same arrow arrives via in-edges.
        const bool follow_out = rel.direction == Direction::Undirected ||
                                (rel.direction == Direction::Right) == step.rightward;
        const bool follow_in = rel.direction == Direction::Undirected ||
                               (rel.direction == Direction::Left) == step.rightward;

        auto try_edge = [&](EdgeId id, bool outgoing) {
            if (used_[id.value]) return;
            const auto& e = graph_.edge(id);
            if (type && e.type != *type) return;
            const NodeId next = outgoing ? e.to : e.from;
            // forward in path order: edge.from is the pattern-left node.
            // Directed patterns fix it; an undirected self-loop reads forward.
            bool path_forward = outgoing == step.rightward;
            if (rel.direction != Direction::Undirected) {
                path_forward = rel.direction == Direction::Right;
            } else if (e.from == e.to) {
                path_forward = true;
            }
            used_[id.value] = 1;
            edges.push_back(id);
            forward.push_back(path_forward);
            walk(k, next, depth + 1, edges, forward);
            edges.pop_back();
            forward.pop_back();
            used_[id.value] = 0;
        };
        if (follow_out) {
            for (auto id : graph_.out_edges(current)) try_edge(id, true);
        }
        if (follow_in) {
            for (auto id : graph_.in_edges(current)) {
                const auto& e = graph_.edge(id);
                // an undirected self-loop is already covered by the out-edge scan
                if (follow_out && e.from == e.to) continue;
                try_edge(id, false);
            }
        }
    }

    bool holds(const Comparison& cmp, const MatchResult& m) const {
        if (const auto* prop = std::get_if<PropertyComparison>(&cmp)) {
            std::optional<Scalar> value;
            if (auto it = m.bindings.find(prop->var); it != m.bindings.end()) {
                const auto& node = graph_.node(it->second);
                if (auto p = node.properties.find(prop->key); p != node.properties.end()) {
                    value = p->second;
                } else if (prop->key == "name") {
                    value = node.name;  // display name lives outside the property map
                }
            } else if (auto rt = m.relationships.find(prop->var);
                       rt != m.relationships.end() && rt->second.size() == 1) {
                const auto& props = graph_.edge(rt->second.front()).properties;
                if (auto p = props.find(prop->key); p != props.end()) value = p->second;
            }
            if (!value) return false;
            const bool equal = *value == prop->literal;
            return prop->op == CompareOp::Equal ? equal : !equal;
        }
        const auto& id = std::get<IdentityComparison>(cmp);
        bool equal = false;
        if (auto a = m.bindings.find(id.lhs); a != m.bindings.end()) {
            equal = a->second == m.bindings.at(id.rhs);
        } else {
            equal = m.relationships.at(id.lhs) == m.relationships.at(id.rhs);
        }
        return id.op == CompareOp::Equal ? equal : !equal;
    }

    void emit() {
        MatchResult m;
        m.path.nodes.push_back(*bound_[0]);
        for (std::size_t r = 0; r < ast_.rels.size(); ++r) {
            const auto& seg = seg_edges_[r];
            for (std::size_t i = 0; i < seg.size(); ++i) {
                const auto& e = graph_.edge(seg[i]);
                m.path.edges.push_back(seg[i]);
                m.path.forward.push_back(seg_forward_[r][i]);
                m.path.nodes.push_back(seg_forward_[r][i] ? e.to : e.from);
            }
            if (ast_.rels[r].var) m.relationships[*ast_.rels[r].var] = seg;
        }
        for (std::size_t p = 0; p < ast_.nodes.size(); ++p) {
            if (ast_.nodes[p].var) m.bindings[*ast_.nodes[p].var] = *bound_[p];
        }
        if (ast_.where) {
            bool any = false;
            for (const auto& conj : ast_.where->any_of) {
                bool all = true;
                for (const auto& cmp : conj) all = all && holds(cmp, m);
                any = any || all;
            }
            if (!any) return;
        }
        results_->push_back(std::move(m));
    }

    const PropertyGraph& graph_;
    const QueryAst& ast_;
    std::vector<std::vector<char>> allowed_;
    std::vector<std::size_t> candidates_;
    std::vector<Bounds> bounds_;
    std::vector<std::optional<EdgeType>> types_;
    bool impossible_ = false;
    std::size_t anchor_ = 0;
    std::vector<PlanStep> plan_;
    std::vector<std::vector<std::size_t>> same_var_;

    std::vector<std::optional<NodeId>> bound_;
    std::vector<std::vector<EdgeId>> seg_edges_;
    std::vector<std::vector<bool>> seg_forward_;
    std::vector<char> used_;
    std::vector<MatchResult>* results_ = nullptr;
};

std::string render_node(const PropertyGraph& graph, NodeId id) {
    const auto& node = graph.node(id);
    return node.name + "(" + node.class_name + ")";
}

}  // namespace

std::vector<MatchResult> evaluate(const PropertyGraph& graph, const Ontology& ontology,
                                  const QueryAst& ast, const EvaluateOptions& options) {
    return Matcher(graph, ontology, ast, options).run();
}

std::string explain(const PropertyGraph& graph, const Ontology& ontology, const QueryAst& ast,
                    const EvaluateOptions& options) {
    return Matcher(graph, ontology, ast, options).explain();
}

std::string render_path(const PropertyGraph& graph, const Path& path) {
    if (path.nodes.empty()) return "";
    std::string out = render_node(graph, path.nodes.front());
    for (std::size_t i = 0; i < path.edges.size(); ++i) {
        const std::string type(to_string(graph.edge(path.edges[i]).type));
        out += path.forward[i] ? " -[" + type + "]-> " : " <-[" + type + "]- ";
        out += render_node(graph, path.nodes[i + 1]);
    }
    return out;
}

std::string render_result(const PropertyGraph& graph, const QueryAst& ast, const MatchResult& result) {
    std::string out;
    for (const auto& item : ast.return_items) {
        if (!out.empty()) out += " | ";
        if (ast.path_var && *ast.path_var == item) {
            out += render_path(graph, result.path);
        } else if (auto it = result.bindings.find(item); it != result.bindings.end()) {
            out += render_node(graph, it->second);
        } else if (auto rt = result.relationships.find(item); rt != result.relationships.end()) {
            std::string types;
            for (auto id : rt->second) {
                if (!types.empty()) types += ",";
                types += to_string(graph.edge(id).type);
            }
            out += "[" + types + "]";
        }
    }
    return out;
}

}  // namespace cloudpg::query
