#include <cctype>
#include <set>
#include <utility>

#include "cloudpg/error.h"
#include "cloudpg/query.h"

namespace cloudpg::query {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

struct VarUse {
    std::string name;
    std::size_t offset;
};

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    QueryAst parse() {
        QueryAst ast;
        expect_keyword("MATCH");

        const std::size_t save = pos_;
        if (auto name = identifier()) {
            skip_ws();
            if (peek() == '=') {
                ++pos_;
                ast.path_var = *name;
            } else {
                pos_ = save;
            }
        }

        ast.nodes.push_back(node(ast));
        while (true) {
            skip_ws();
            if (peek() != '-' && peek() != '<') break;
            ast.rels.push_back(rel(ast));
            ast.nodes.push_back(node(ast));
        }

        if (keyword("WHERE")) ast.where = predicate();

        expect_keyword("RETURN");
        do {
            skip_ws();
            const std::size_t at = pos_;
            auto name = identifier();
            if (!name) fail("expected identifier after RETURN", at);
            ast.return_items.push_back(*name);
            uses_.push_back({*name, at});
            skip_ws();
        } while (consume(','));

        skip_ws();
        if (peek() == ';') ++pos_;
        skip_ws();
        if (pos_ < text_.size()) fail("unexpected input after RETURN clause", pos_);

        check_variables(ast);
        return ast;
    }

private:
    [[noreturn]] void fail(const std::string& message, std::size_t offset) const {
        throw SyntaxError(offset, message);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    bool consume(char c) {
        skip_ws();
        if (peek() != c) return false;
        ++pos_;
        return true;
    }

    bool consume_exact(std::string_view token) {
        if (text_.substr(pos_, token.size()) != token) return false;
        pos_ += token.size();
        return true;
    }

    std::optional<std::string> identifier() {
        skip_ws();
        if (!ident_start(peek())) return std::nullopt;
        const std::size_t start = pos_;
        while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
        return std::string(text_.substr(start, pos_ - start));
    }

    bool keyword(std::string_view word) {
        skip_ws();
        const std::size_t save = pos_;
        auto name = identifier();
        if (name && name->size() == word.size()) {
            bool same = true;
            for (std::size_t i = 0; i < word.size(); ++i) {
                same = same && std::toupper(static_cast<unsigned char>((*name)[i])) == word[i];
            }
            if (same) return true;
        }
        pos_ = save;
        return false;
    }

    void expect_keyword(std::string_view word) {
        if (!keyword(word)) fail("expected " + std::string(word), pos_);
    }

    int integer() {
        skip_ws();
        const std::size_t start = pos_;
        long value = 0;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            value = value * 10 + (text_[pos_] - '0');
            if (value > 1'000'000) fail("integer too large", start);
            ++pos_;
        }
        if (pos_ == start) fail("expected integer", start);
        return static_cast<int>(value);
    }

    bool at_digit() {
        skip_ws();
        return std::isdigit(static_cast<unsigned char>(peek())) != 0;
    }

    NodePattern node(const QueryAst&) {
        skip_ws();
        const std::size_t open = pos_;
        if (!consume('(')) fail("expected '('", pos_);
        NodePattern out;
        skip_ws();
        const std::size_t var_at = pos_;
        out.var = identifier();
        if (out.var) node_vars_.push_back({*out.var, var_at});
        if (consume(':')) {
            out.label = identifier();
            if (!out.label) fail("expected label after ':'", pos_);
        }
        if (!consume(')')) fail("unclosed '('", open);
        return out;
    }

    RelPattern rel(const QueryAst&) {
        skip_ws();
        const std::size_t start = pos_;
        RelPattern out;
        bool left = false;
        if (consume_exact("<-")) {
            left = true;
        } else if (!consume_exact("-")) {
            fail("expected relationship", start);
        }
        if (consume('[')) {
            skip_ws();
            const std::size_t var_at = pos_;
            out.var = identifier();
            if (out.var) rel_vars_.push_back({*out.var, var_at});
            if (consume(':')) {
                out.type = identifier();
                if (!out.type) fail("expected relationship type after ':'", pos_);
            }
            if (consume('*')) out.length = length();
            if (!consume(']')) fail("expected ']'", pos_);
        }
        skip_ws();
        if (!consume_exact("-")) fail("expected '-' closing the relationship", pos_);
        const bool right = consume_exact(">");
        if (left && right) fail("relationship cannot point both ways", start);
        out.direction = left ? Direction::Left : right ? Direction::Right : Direction::Undirected;
        return out;
    }

    RelLength length() {
        const std::size_t at = pos_;
        RelLength out;
        out.kind = RelLength::Kind::Star;
        std::optional<int> lower;
        if (at_digit()) lower = integer();
        skip_ws();
        if (consume_exact("..")) {
            out.min = lower.value_or(1);
            if (at_digit()) out.max = integer();
        } else if (lower) {
            out.kind = RelLength::Kind::Exact;
            out.min = *lower;
            out.max = *lower;
        }
        if (out.min < 1) fail("relationship length must be at least 1", at);
        if (out.max && *out.max < out.min) fail("relationship length upper bound below lower bound", at);
        return out;
    }

    Predicate predicate() {
        Predicate out;
        out.any_of.emplace_back();
        out.any_of.back().push_back(comparison());
        while (true) {
            if (keyword("AND")) {
                out.any_of.back().push_back(comparison());
            } else if (keyword("OR")) {
                out.any_of.emplace_back();
                out.any_of.back().push_back(comparison());
            } else {
                break;
            }
        }
        return out;
    }

    CompareOp compare_op() {
        skip_ws();
        if (consume_exact("<>")) return CompareOp::NotEqual;
        if (consume_exact("=")) return CompareOp::Equal;
        fail("expected '=' or '<>'", pos_);
    }

    Scalar literal() {
        skip_ws();
        const std::size_t at = pos_;
        const char quote = peek();
        if (quote == '"' || quote == '\'') {
            ++pos_;
            std::string value;
            while (pos_ < text_.size() && text_[pos_] != quote) {
                char c = text_[pos_++];
                if (c == '\\' && pos_ < text_.size()) {
                    const char escaped = text_[pos_++];
                    c = escaped == 'n' ? '\n' : escaped == 't' ? '\t' : escaped;
                }
                value += c;
            }
            if (pos_ >= text_.size()) fail("unterminated string literal", at);
            ++pos_;
            return value;
        }
        if (keyword("TRUE")) return true;
        if (keyword("FALSE")) return false;
        bool negative = false;
        if (peek() == '-') {
            negative = true;
            ++pos_;
        }
        if (std::isdigit(static_cast<unsigned char>(peek()))) {
            const std::int64_t value = integer();
            return negative ? -value : value;
        }
        fail("expected literal", at);
    }

    Comparison comparison() {
        skip_ws();
        const std::size_t at = pos_;
        auto lhs = identifier();
        if (!lhs) fail("expected identifier in WHERE clause", at);
        uses_.push_back({*lhs, at});
        skip_ws();
        if (peek() == '.') {
            ++pos_;
            auto key = identifier();
            if (!key) fail("expected property name after '.'", pos_);
            PropertyComparison cmp;
            cmp.var = *lhs;
            cmp.key = *key;
            cmp.op = compare_op();
            cmp.literal = literal();
            return cmp;
        }
        IdentityComparison cmp;
        cmp.lhs = *lhs;
        cmp.op = compare_op();
        skip_ws();
        const std::size_t rhs_at = pos_;
        auto rhs = identifier();
        if (!rhs) fail("expected identifier on the right of the comparison", rhs_at);
        uses_.push_back({*rhs, rhs_at});
        cmp.rhs = *rhs;
        identity_pairs_.push_back({cmp.lhs, cmp.rhs, at});
        return cmp;
    }

    void check_variables(const QueryAst& ast) const {
        std::set<std::string> nodes, rels;
        for (const auto& v : node_vars_) nodes.insert(v.name);
        for (const auto& v : rel_vars_) {
            if (nodes.count(v.name)) fail("variable '" + v.name + "' names both a node and a relationship", v.offset);
            if (!rels.insert(v.name).second) fail("relationship variable '" + v.name + "' reused", v.offset);
        }
        if (ast.path_var && (nodes.count(*ast.path_var) || rels.count(*ast.path_var))) {
            fail("path variable '" + *ast.path_var + "' also names a pattern element", 0);
        }
        for (const auto& use : uses_) {
            const bool bound = nodes.count(use.name) || rels.count(use.name) ||
                               (ast.path_var && *ast.path_var == use.name);
            if (!bound) {
                throw Error(ErrorCode::UnboundVariable, use.name,
                            "unbound variable '" + use.name + "' at offset " + std::to_string(use.offset));
            }
        }
        for (const auto& [lhs, rhs, offset] : identity_pairs_) {
            const bool lhs_node = nodes.count(lhs) > 0;
            const bool rhs_node = nodes.count(rhs) > 0;
            const bool lhs_rel = rels.count(lhs) > 0;
            const bool rhs_rel = rels.count(rhs) > 0;
            if (!((lhs_node && rhs_node) || (lhs_rel && rhs_rel))) {
                fail("identity comparison needs two node or two relationship variables", offset);
            }
        }
    }

    struct IdentityPair {
        std::string lhs;
        std::string rhs;
        std::size_t offset;
    };

    std::string_view text_;
    std::size_t pos_ = 0;
    std::vector<VarUse> node_vars_;
    std::vector<VarUse> rel_vars_;
    std::vector<VarUse> uses_;
    std::vector<IdentityPair> identity_pairs_;
};

}  // namespace

QueryAst parse_query(std::string_view text) { return Parser(text).parse(); }

}  // namespace cloudpg::query
