#pragma once

// A read-only Cypher subset:
//
//   query   := "MATCH" pattern ("WHERE" pred)? "RETURN" ident ("," ident)*
//   pattern := (ident "=")? node (rel node)*
//   node    := "(" ident? (":" ident)? ")"
//   rel     := "<-" body "-" | "-" body "->" | "-" body "-"
//   body    := ("[" ident? (":" TYPE)? ("*" (INT | INT? ".." INT?)?)? "]")?
//   pred    := cmp (("AND" | "OR") cmp)*       AND binds tighter than OR
//   cmp     := ident "." ident ("=" | "<>") literal | ident ("=" | "<>") ident
//
// Keywords are case-insensitive; labels, types and variables are not.
// Matching is relationship-isomorphic: no edge appears twice in one match.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cloudpg/graph.h"

namespace cloudpg::query {

inline constexpr int kDefaultStarMax = 10;

enum class Direction { Left, Right, Undirected };

struct NodePattern {
    std::optional<std::string> var;
    std::optional<std::string> label;
};

struct RelLength {
    enum class Kind { One, Star, Exact };
    Kind kind = Kind::One;
    int min = 1;
    std::optional<int> max;  // Star without an upper bound uses the evaluation default
};

struct RelPattern {
    std::optional<std::string> var;
    std::optional<std::string> type;
    Direction direction = Direction::Undirected;
    RelLength length;
};

enum class CompareOp { Equal, NotEqual };

struct PropertyComparison {
    std::string var;
    std::string key;
    CompareOp op = CompareOp::Equal;
    Scalar literal;
};

struct IdentityComparison {
    std::string lhs;
    std::string rhs;
    CompareOp op = CompareOp::NotEqual;
};

using Comparison = std::variant<PropertyComparison, IdentityComparison>;

// Disjunction of conjunctions.
struct Predicate {
    std::vector<std::vector<Comparison>> any_of;
};

struct QueryAst {
    std::optional<std::string> path_var;
    std::vector<NodePattern> nodes;  // nodes.size() == rels.size() + 1
    std::vector<RelPattern> rels;
    std::optional<Predicate> where;
    std::vector<std::string> return_items;
};

// Throws SyntaxError (with byte offset) or Error{UnboundVariable}.
QueryAst parse_query(std::string_view text);

struct EvaluateOptions {
    int star_max = kDefaultStarMax;
};

struct MatchResult {
    std::map<std::string, NodeId> bindings;
    std::map<std::string, std::vector<EdgeId>> relationships;
    Path path;

    bool operator==(const MatchResult&) const = default;
};

// Results ordered by the matched node sequence, then the edge sequence.
std::vector<MatchResult> evaluate(const PropertyGraph& graph, const Ontology& ontology,
                                  const QueryAst& ast, const EvaluateOptions& options = {});

// Seeds at the pattern node with the fewest label candidates.
std::string explain(const PropertyGraph& graph, const Ontology& ontology, const QueryAst& ast,
                    const EvaluateOptions& options = {});

// `name(Class) -[TYPE]-> name(Class) <-[TYPE]- ...`
std::string render_path(const PropertyGraph& graph, const Path& path);
std::string render_result(const PropertyGraph& graph, const QueryAst& ast, const MatchResult& result);

}  // namespace cloudpg::query
