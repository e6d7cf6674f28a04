#pragma once

// LTL abstract syntax, concrete-grammar parser, printer, and negation normal
// form.
//
// Grammar (whitespace-insensitive):
//
//   formula := disj ( 'U' formula )?          right-associative
//   disj    := conj ( '||' conj )*
//   conj    := unary ( '&&' unary )*
//   unary   := '!' unary | 'X' unary | '<>' unary | '[]' unary | atom
//   atom    := 'true' | identifier | '(' formula ')'
//
// False and Release never come out of the parser; they only appear after
// to_nnf().

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mrltl {

/// Set of atomic propositions, one bit per proposition id.
using LabelSet = std::uint64_t;

inline constexpr std::size_t kMaxPropositions = 64;

inline constexpr LabelSet prop_bit(int id) { return LabelSet{1} << id; }

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, std::size_t position)
        : std::runtime_error(msg + " at position " + std::to_string(position)),
          position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

class UnknownProposition : public ParseError {
public:
    UnknownProposition(const std::string& name, std::size_t position)
        : ParseError("unknown proposition '" + name + "'", position), name_(name) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

/// Proposition names with their dense ids.
class PropositionTable {
public:
    PropositionTable() = default;
    PropositionTable(std::initializer_list<std::string> names) {
        for (const auto& n : names) add(n);
    }

    /// Returns the id of `name`, inserting it when new.
    int add(const std::string& name) {
        if (auto it = index_.find(name); it != index_.end()) return it->second;
        if (!is_valid_name(name))
            throw std::invalid_argument("invalid proposition name '" + name + "'");
        if (names_.size() >= kMaxPropositions)
            throw std::length_error("more than 64 propositions");
        const int id = static_cast<int>(names_.size());
        names_.push_back(name);
        index_.emplace(name, id);
        return id;
    }

    /// Id of `name`, or -1.
    int find(std::string_view name) const {
        auto it = index_.find(std::string(name));
        return it == index_.end() ? -1 : it->second;
    }

    const std::string& name(int id) const { return names_.at(static_cast<std::size_t>(id)); }
    std::size_t size() const noexcept { return names_.size(); }
    bool empty() const noexcept { return names_.empty(); }
    const std::vector<std::string>& names() const noexcept { return names_; }

    /// Label set naming the given propositions; throws on unknown names.
    LabelSet labels(std::initializer_list<std::string_view> names) const {
        LabelSet out = 0;
        for (auto n : names) {
            const int id = find(n);
            if (id < 0) throw std::out_of_range("unknown proposition '" + std::string(n) + "'");
            out |= prop_bit(id);
        }
        return out;
    }

    static bool is_reserved(std::string_view name) {
        return name == "X" || name == "U" || name == "true" || name == "false";
    }

    static bool is_valid_name(std::string_view name) {
        if (name.empty() || is_reserved(name)) return false;
        auto alpha = [](char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z'); };
        auto digit = [](char c) { return c >= '0' && c <= '9'; };
        if (!alpha(name[0])) return false;
        for (char c : name)
            if (!alpha(c) && !digit(c) && c != '_') return false;
        return true;
    }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, int> index_;
};

enum class Op { True, False, Prop, Not, And, Or, Next, Until, Release, Eventually, Always };

/// Immutable LTL formula; cheap to copy (shared tree).
class Formula {
public:
    static Formula truth() { return Formula(make(Op::True)); }
    static Formula falsity() { return Formula(make(Op::False)); }
    static Formula prop(int id) {
        auto n = make(Op::Prop);
        n->prop = id;
        return Formula(std::move(n));
    }
    static Formula negation(Formula f) { return unary(Op::Not, std::move(f)); }
    static Formula next(Formula f) { return unary(Op::Next, std::move(f)); }
    static Formula eventually(Formula f) { return unary(Op::Eventually, std::move(f)); }
    static Formula always(Formula f) { return unary(Op::Always, std::move(f)); }
    static Formula conj(Formula a, Formula b) { return binary(Op::And, std::move(a), std::move(b)); }
    static Formula disj(Formula a, Formula b) { return binary(Op::Or, std::move(a), std::move(b)); }
    static Formula until(Formula a, Formula b) { return binary(Op::Until, std::move(a), std::move(b)); }
    static Formula release(Formula a, Formula b) {
        return binary(Op::Release, std::move(a), std::move(b));
    }

    Op op() const noexcept { return node_->op; }
    int prop_id() const noexcept { return node_->prop; }
    /// Operand of a unary node, left operand of a binary node.
    const Formula& lhs() const { return node_->children[0]; }
    const Formula& rhs() const { return node_->children[1]; }

    bool is_unary() const noexcept {
        const Op o = op();
        return o == Op::Not || o == Op::Next || o == Op::Eventually || o == Op::Always;
    }
    bool is_binary() const noexcept {
        const Op o = op();
        return o == Op::And || o == Op::Or || o == Op::Until || o == Op::Release;
    }
    /// Proposition or negated proposition.
    bool is_literal() const noexcept {
        return op() == Op::Prop || (op() == Op::Not && lhs().op() == Op::Prop);
    }

    /// Number of nodes in the tree.
    std::size_t size() const {
        std::size_t n = 1;
        if (is_unary()) n += lhs().size();
        if (is_binary()) n += lhs().size() + rhs().size();
        return n;
    }

    friend bool operator==(const Formula& a, const Formula& b) {
        if (a.node_ == b.node_) return true;
        if (a.op() != b.op()) return false;
        if (a.op() == Op::Prop) return a.prop_id() == b.prop_id();
        if (a.is_unary()) return a.lhs() == b.lhs();
        if (a.is_binary()) return a.lhs() == b.lhs() && a.rhs() == b.rhs();
        return true;
    }

private:
    struct Node {
        Op op = Op::True;
        int prop = -1;
        std::vector<Formula> children;
    };

    explicit Formula(std::shared_ptr<Node> n) : node_(std::move(n)) {}

    static std::shared_ptr<Node> make(Op op) {
        auto n = std::make_shared<Node>();
        n->op = op;
        return n;
    }
    static Formula unary(Op op, Formula a) {
        auto n = make(op);
        n->children.push_back(std::move(a));
        return Formula(std::move(n));
    }
    static Formula binary(Op op, Formula a, Formula b) {
        auto n = make(op);
        n->children.push_back(std::move(a));
        n->children.push_back(std::move(b));
        return Formula(std::move(n));
    }

    std::shared_ptr<const Node> node_;
};

namespace detail {

class FormulaParser {
public:
    FormulaParser(std::string_view text, const PropositionTable& props)
        : text_(text), props_(props) {}

    Formula parse() {
        Formula f = parse_until();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return f;
    }

private:
    Formula parse_until() {
        Formula lhs = parse_or();
        skip_ws();
        if (peek_keyword("U")) {
            pos_ += 1;
            Formula rhs = parse_until();
            return Formula::until(std::move(lhs), std::move(rhs));
        }
        return lhs;
    }

    Formula parse_or() {
        Formula f = parse_and();
        for (;;) {
            skip_ws();
            if (!consume("||")) return f;
            f = Formula::disj(std::move(f), parse_and());
        }
    }

    Formula parse_and() {
        Formula f = parse_unary();
        for (;;) {
            skip_ws();
            if (!consume("&&")) return f;
            f = Formula::conj(std::move(f), parse_unary());
        }
    }

    Formula parse_unary() {
        skip_ws();
        if (consume("!")) return Formula::negation(parse_unary());
        if (consume("<>")) return Formula::eventually(parse_unary());
        if (consume("[]")) return Formula::always(parse_unary());
        if (peek_keyword("X")) {
            pos_ += 1;
            return Formula::next(parse_unary());
        }
        return parse_atom();
    }

    Formula parse_atom() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        if (consume("(")) {
            Formula f = parse_until();
            skip_ws();
            if (!consume(")")) fail("expected ')'");
            return f;
        }
        const std::size_t start = pos_;
        const std::string word = identifier();
        if (word.empty()) fail("expected a proposition, 'true', or '('");
        if (word == "true") return Formula::truth();
        if (word == "U" || word == "X") fail("misplaced operator '" + word + "'", start);
        const int id = props_.find(word);
        if (id < 0) throw UnknownProposition(word, start);
        return Formula::prop(id);
    }

    std::string identifier() {
        auto alpha = [](char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z'); };
        auto alnum = [&](char c) { return alpha(c) || (c >= '0' && c <= '9') || c == '_'; };
        if (pos_ >= text_.size() || !alpha(text_[pos_])) return {};
        const std::size_t start = pos_;
        while (pos_ < text_.size() && alnum(text_[pos_])) ++pos_;
        return std::string(text_.substr(start, pos_ - start));
    }

    // A one-letter keyword is only a keyword when it is a whole identifier.
    bool peek_keyword(std::string_view kw) const {
        if (text_.substr(pos_, kw.size()) != kw) return false;
        const std::size_t end = pos_ + kw.size();
        if (end >= text_.size()) return true;
        const char c = text_[end];
        const bool alnum = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
                           (c >= '0' && c <= '9') || c == '_';
        return !alnum;
    }

    bool consume(std::string_view tok) {
        if (text_.substr(pos_, tok.size()) != tok) return false;
        pos_ += tok.size();
        return true;
    }

    void skip_ws() {
        while (pos_ < text_.size() &&
               (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
                text_[pos_] == '\r'))
            ++pos_;
    }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }
    [[noreturn]] void fail(const std::string& msg, std::size_t at) const {
        throw ParseError(msg, at);
    }

    std::string_view text_;
    const PropositionTable& props_;
    std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses `text` against the declared propositions.
inline Formula parse(std::string_view text, const PropositionTable& props) {
    if (props.empty()) throw std::invalid_argument("empty proposition table");
    return detail::FormulaParser(text, props).parse();
}

/// Prints `f` in the concrete grammar; binary operators are fully
/// parenthesized so that parse(to_string(f)) == f.
inline std::string to_string(const Formula& f, const PropositionTable& props) {
    switch (f.op()) {
        case Op::True: return "true";
        case Op::False: return "false";
        case Op::Prop: return props.name(f.prop_id());
        case Op::Not: return "!" + to_string(f.lhs(), props);
        case Op::Next: return "X " + to_string(f.lhs(), props);
        case Op::Eventually: return "<> " + to_string(f.lhs(), props);
        case Op::Always: return "[] " + to_string(f.lhs(), props);
        case Op::And:
            return "(" + to_string(f.lhs(), props) + " && " + to_string(f.rhs(), props) + ")";
        case Op::Or:
            return "(" + to_string(f.lhs(), props) + " || " + to_string(f.rhs(), props) + ")";
        case Op::Until:
            return "(" + to_string(f.lhs(), props) + " U " + to_string(f.rhs(), props) + ")";
        case Op::Release:
            return "(" + to_string(f.lhs(), props) + " R " + to_string(f.rhs(), props) + ")";
    }
    return {};
}

/// Structural key independent of proposition names.
inline std::string structural_key(const Formula& f) {
    switch (f.op()) {
        case Op::True: return "t";
        case Op::False: return "f";
        case Op::Prop: return "p" + std::to_string(f.prop_id());
        case Op::Not: return "!" + structural_key(f.lhs());
        case Op::Next: return "X" + structural_key(f.lhs());
        case Op::Eventually: return "F" + structural_key(f.lhs());
        case Op::Always: return "G" + structural_key(f.lhs());
        case Op::And: return "(" + structural_key(f.lhs()) + "&" + structural_key(f.rhs()) + ")";
        case Op::Or: return "(" + structural_key(f.lhs()) + "|" + structural_key(f.rhs()) + ")";
        case Op::Until: return "(" + structural_key(f.lhs()) + "U" + structural_key(f.rhs()) + ")";
        case Op::Release:
            return "(" + structural_key(f.lhs()) + "R" + structural_key(f.rhs()) + ")";
    }
    return {};
}

/// Mask of every proposition mentioned in `f`.
inline LabelSet propositions_of(const Formula& f) {
    if (f.op() == Op::Prop) return prop_bit(f.prop_id());
    LabelSet m = 0;
    if (f.is_unary()) m |= propositions_of(f.lhs());
    if (f.is_binary()) m |= propositions_of(f.lhs()) | propositions_of(f.rhs());
    return m;
}

namespace detail {

inline Formula nnf(const Formula& f, bool negated) {
    switch (f.op()) {
        case Op::True: return negated ? Formula::falsity() : f;
        case Op::False: return negated ? Formula::truth() : f;
        case Op::Prop: return negated ? Formula::negation(f) : f;
        case Op::Not: return nnf(f.lhs(), !negated);
        case Op::Next: return Formula::next(nnf(f.lhs(), negated));
        case Op::And:
        case Op::Or: {
            Formula a = nnf(f.lhs(), negated);
            Formula b = nnf(f.rhs(), negated);
            const bool conj = (f.op() == Op::And) != negated;
            return conj ? Formula::conj(std::move(a), std::move(b))
                        : Formula::disj(std::move(a), std::move(b));
        }
        case Op::Until:
        case Op::Release: {
            Formula a = nnf(f.lhs(), negated);
            Formula b = nnf(f.rhs(), negated);
            const bool until = (f.op() == Op::Until) != negated;
            return until ? Formula::until(std::move(a), std::move(b))
                         : Formula::release(std::move(a), std::move(b));
        }
        // <> g == true U g,  [] g == false R g
        case Op::Eventually:
            return negated ? Formula::release(Formula::falsity(), nnf(f.lhs(), true))
                           : Formula::until(Formula::truth(), nnf(f.lhs(), false));
        case Op::Always:
            return negated ? Formula::until(Formula::truth(), nnf(f.lhs(), true))
                           : Formula::release(Formula::falsity(), nnf(f.lhs(), false));
    }
    return f;
}

}  // namespace detail

/// Negation normal form over {true, false, literals, &&, ||, X, U, R}.
inline Formula to_nnf(const Formula& f) { return detail::nnf(f, false); }

inline bool is_nnf(const Formula& f) {
    switch (f.op()) {
        case Op::True:
        case Op::False:
        case Op::Prop: return true;
        case Op::Not: return f.lhs().op() == Op::Prop;
        case Op::Eventually:
        case Op::Always: return false;
        case Op::Next: return is_nnf(f.lhs());
        default: return is_nnf(f.lhs()) && is_nnf(f.rhs());
    }
}

}  // namespace mrltl
