#pragma once

#include <cctype>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "chainsim/errors.hpp"

// Topology predicate language. An expression is evaluated over an ordered
// pair of nodes (n1, n2) and decides whether to connect them; the builder
// symmetrizes with OR, so only one direction has to hold.
//
//   abs(n1.id - n2.id) == 1 or abs(n1.id - n2.id) == 9        ten-node ring
//   (n1.id + n2.id) % 2 == 0                                  bipartite-ish mesh
//   n1.region == n2.region and n1.id != n2.id                 regional cliques
//
// Grammar, loosest first:  or > and > not > comparison > + - > * / % > unary.
// Values are integers, strings (region names, quoted with ' or ") and
// booleans; typing is checked while parsing, so evaluation can only fail on
// division or modulo by zero. / and % use floored (Python-style) semantics,
// since negative id differences are common and truncation would make
// `(n1.id - n2.id) % k` useless.

namespace chainsim::net {

struct NodeDescriptor {
    std::int64_t id = 0;
    std::string region;
};

enum class ValueType { integer, text, boolean };

enum class ExprOp {
    lit_int,
    lit_str,
    attr_id,     // n1.id / n2.id
    attr_region, // n1.region / n2.region
    neg,
    abs_fn,
    logical_not,
    add,
    sub,
    mul,
    div,
    mod,
    eq,
    ne,
    lt,
    le,
    gt,
    ge,
    logical_and,
    logical_or,
};

struct Expr {
    ExprOp op{};
    ValueType type{};
    std::int64_t int_val = 0;    // lit_int
    std::string str_val;         // lit_str
    int which = 0;               // attr_*: 1 or 2
    std::unique_ptr<Expr> lhs;   // unary operand lives here
    std::unique_ptr<Expr> rhs;
};

struct PredicateAst {
    std::unique_ptr<Expr> root;
};

namespace detail {

enum class Tok { integer, ident, string, sym, end };

struct Token {
    Tok kind{};
    std::string text;
    std::size_t pos = 0;
};

class Lexer {
  public:
    explicit Lexer(std::string_view src) : src_(src) { advance(); }

    const Token& peek() const { return tok_; }

    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

  private:
    void advance() {
        while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_])))
            ++i_;
        tok_.pos = i_;
        if (i_ >= src_.size()) {
            tok_ = {Tok::end, "", i_};
            return;
        }
        const char c = src_[i_];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i_;
            while (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j])))
                ++j;
            tok_ = {Tok::integer, std::string(src_.substr(i_, j - i_)), i_};
            i_ = j;
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i_;
            while (j < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[j])) || src_[j] == '_'))
                ++j;
            tok_ = {Tok::ident, std::string(src_.substr(i_, j - i_)), i_};
            i_ = j;
            return;
        }
        if (c == '\'' || c == '"') {
            std::size_t j = i_ + 1;
            while (j < src_.size() && src_[j] != c) ++j;
            if (j >= src_.size())
                throw ParseError("unterminated string literal", i_);
            tok_ = {Tok::string, std::string(src_.substr(i_ + 1, j - i_ - 1)), i_};
            i_ = j + 1;
            return;
        }
        // two-char operators first
        static constexpr std::string_view two[] = {"==", "!=", "<=", ">="};
        for (auto op : two) {
            if (src_.substr(i_).starts_with(op)) {
                tok_ = {Tok::sym, std::string(op), i_};
                i_ += 2;
                return;
            }
        }
        if (std::string_view("+-*/%()<>.").find(c) != std::string_view::npos) {
            tok_ = {Tok::sym, std::string(1, c), i_};
            ++i_;
            return;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", i_);
    }

    std::string_view src_;
    std::size_t i_ = 0;
    Token tok_;
};

class Parser {
  public:
    explicit Parser(std::string_view src) : lex_(src) {}

    std::unique_ptr<Expr> parse() {
        auto e = parse_or();
        if (lex_.peek().kind != Tok::end)
            throw ParseError("unexpected trailing input, expected end of expression",
                             lex_.peek().pos);
        if (e->type != ValueType::boolean)
            throw ParseError("topology expression must be boolean "
                             "(use a comparison or and/or/not)",
                             0);
        return e;
    }

  private:
    static std::unique_ptr<Expr> make(ExprOp op, ValueType t) {
        auto e = std::make_unique<Expr>();
        e->op = op;
        e->type = t;
        return e;
    }

    bool at_sym(std::string_view s) const {
        return lex_.peek().kind == Tok::sym && lex_.peek().text == s;
    }
    bool at_kw(std::string_view s) const {
        return lex_.peek().kind == Tok::ident && lex_.peek().text == s;
    }

    std::unique_ptr<Expr> parse_or() {
        auto lhs = parse_and();
        while (at_kw("or")) {
            auto t = lex_.take();
            require_bool(*lhs, "or", t.pos);
            auto rhs = parse_and();
            require_bool(*rhs, "or", t.pos);
            auto e = make(ExprOp::logical_or, ValueType::boolean);
            e->lhs = std::move(lhs);
            e->rhs = std::move(rhs);
            lhs = std::move(e);
        }
        return lhs;
    }

    std::unique_ptr<Expr> parse_and() {
        auto lhs = parse_not();
        while (at_kw("and")) {
            auto t = lex_.take();
            require_bool(*lhs, "and", t.pos);
            auto rhs = parse_not();
            require_bool(*rhs, "and", t.pos);
            auto e = make(ExprOp::logical_and, ValueType::boolean);
            e->lhs = std::move(lhs);
            e->rhs = std::move(rhs);
            lhs = std::move(e);
        }
        return lhs;
    }

    std::unique_ptr<Expr> parse_not() {
        if (at_kw("not")) {
            auto t = lex_.take();
            auto operand = parse_not();
            require_bool(*operand, "not", t.pos);
            auto e = make(ExprOp::logical_not, ValueType::boolean);
            e->lhs = std::move(operand);
            return e;
        }
        return parse_comparison();
    }

    std::unique_ptr<Expr> parse_comparison() {
        auto lhs = parse_additive();
        struct {
            const char* sym;
            ExprOp op;
            bool int_only;
        } static constexpr ops[] = {
            {"==", ExprOp::eq, false}, {"!=", ExprOp::ne, false},
            {"<=", ExprOp::le, true},  {">=", ExprOp::ge, true},
            {"<", ExprOp::lt, true},   {">", ExprOp::gt, true},
        };
        for (const auto& o : ops) {
            if (at_sym(o.sym)) {
                auto t = lex_.take();
                auto rhs = parse_additive();
                if (lhs->type == ValueType::boolean || rhs->type == ValueType::boolean)
                    throw ParseError(std::string("'") + o.sym +
                                         "' cannot compare boolean expressions",
                                     t.pos);
                if (lhs->type != rhs->type)
                    throw ParseError(std::string("'") + o.sym +
                                         "' requires operands of the same type",
                                     t.pos);
                if (o.int_only && lhs->type != ValueType::integer)
                    throw ParseError(std::string("'") + o.sym +
                                         "' requires integer operands",
                                     t.pos);
                auto e = make(o.op, ValueType::boolean);
                e->lhs = std::move(lhs);
                e->rhs = std::move(rhs);
                return e;
            }
        }
        return lhs;
    }

    std::unique_ptr<Expr> parse_additive() {
        auto lhs = parse_multiplicative();
        while (at_sym("+") || at_sym("-")) {
            auto t = lex_.take();
            auto rhs = parse_multiplicative();
            require_int(*lhs, t.text, t.pos);
            require_int(*rhs, t.text, t.pos);
            auto e = make(t.text == "+" ? ExprOp::add : ExprOp::sub,
                          ValueType::integer);
            e->lhs = std::move(lhs);
            e->rhs = std::move(rhs);
            lhs = std::move(e);
        }
        return lhs;
    }

    std::unique_ptr<Expr> parse_multiplicative() {
        auto lhs = parse_unary();
        while (at_sym("*") || at_sym("/") || at_sym("%")) {
            auto t = lex_.take();
            auto rhs = parse_unary();
            require_int(*lhs, t.text, t.pos);
            require_int(*rhs, t.text, t.pos);
            ExprOp op = t.text == "*" ? ExprOp::mul
                        : t.text == "/" ? ExprOp::div
                                        : ExprOp::mod;
            auto e = make(op, ValueType::integer);
            e->lhs = std::move(lhs);
            e->rhs = std::move(rhs);
            lhs = std::move(e);
        }
        return lhs;
    }

    std::unique_ptr<Expr> parse_unary() {
        if (at_sym("-")) {
            auto t = lex_.take();
            auto operand = parse_unary();
            require_int(*operand, "-", t.pos);
            auto e = make(ExprOp::neg, ValueType::integer);
            e->lhs = std::move(operand);
            return e;
        }
        return parse_primary();
    }

    std::unique_ptr<Expr> parse_primary() {
        const Token& p = lex_.peek();
        if (p.kind == Tok::integer) {
            auto t = lex_.take();
            auto e = make(ExprOp::lit_int, ValueType::integer);
            try {
                e->int_val = std::stoll(t.text);
            } catch (const std::exception&) {
                throw ParseError("integer literal out of range", t.pos);
            }
            return e;
        }
        if (p.kind == Tok::string) {
            auto t = lex_.take();
            auto e = make(ExprOp::lit_str, ValueType::text);
            e->str_val = t.text;
            return e;
        }
        if (at_sym("(")) {
            lex_.take();
            auto e = parse_or();
            expect_sym(")");
            return e;
        }
        if (at_kw("abs")) {
            auto t = lex_.take();
            expect_sym("(");
            auto arg = parse_or();
            expect_sym(")");
            require_int(*arg, "abs", t.pos);
            auto e = make(ExprOp::abs_fn, ValueType::integer);
            e->lhs = std::move(arg);
            return e;
        }
        if (at_kw("n1") || at_kw("n2")) {
            auto t = lex_.take();
            expect_sym(".");
            const Token& a = lex_.peek();
            if (a.kind != Tok::ident || (a.text != "id" && a.text != "region"))
                throw ParseError("expected attribute 'id' or 'region' after '" +
                                     t.text + ".'",
                                 a.pos);
            auto attr = lex_.take();
            const bool region = attr.text == "region";
            auto e = make(region ? ExprOp::attr_region : ExprOp::attr_id,
                          region ? ValueType::text : ValueType::integer);
            e->which = t.text == "n1" ? 1 : 2;
            return e;
        }
        throw ParseError("expected integer, string, 'abs', '(', 'n1' or 'n2'",
                         p.pos);
    }

    void expect_sym(std::string_view s) {
        if (!at_sym(s))
            throw ParseError("expected '" + std::string(s) + "'", lex_.peek().pos);
        lex_.take();
    }

    static void require_bool(const Expr& e, std::string_view op, std::size_t pos) {
        if (e.type != ValueType::boolean)
            throw ParseError("'" + std::string(op) + "' requires boolean operands",
                             pos);
    }
    static void require_int(const Expr& e, std::string_view op, std::size_t pos) {
        if (e.type != ValueType::integer)
            throw ParseError("'" + std::string(op) + "' requires integer operands",
                             pos);
    }

    Lexer lex_;
};

// floored division/modulo: -7 / 2 == -4, -7 % 2 == 1
inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    if (b == 0) throw EvalError("division by zero in topology expression");
    std::int64_t q = a / b;
    if (a % b != 0 && ((a < 0) != (b < 0))) --q;
    return q;
}

inline std::int64_t floor_mod(std::int64_t a, std::int64_t b) {
    if (b == 0) throw EvalError("modulo by zero in topology expression");
    std::int64_t r = a % b;
    if (r != 0 && ((r < 0) != (b < 0))) r += b;
    return r;
}

struct Value {
    std::int64_t i = 0;
    const std::string* s = nullptr; // non-owning; points into the ast or a node
    bool b = false;
};

inline Value eval_expr(const Expr& e, const NodeDescriptor& n1,
                       const NodeDescriptor& n2) {
    auto node = [&](int which) -> const NodeDescriptor& {
        return which == 1 ? n1 : n2;
    };
    switch (e.op) {
    case ExprOp::lit_int: return {.i = e.int_val};
    case ExprOp::lit_str: return {.s = &e.str_val};
    case ExprOp::attr_id: return {.i = node(e.which).id};
    case ExprOp::attr_region: return {.s = &node(e.which).region};
    case ExprOp::neg: return {.i = -eval_expr(*e.lhs, n1, n2).i};
    case ExprOp::abs_fn: {
        std::int64_t v = eval_expr(*e.lhs, n1, n2).i;
        return {.i = v < 0 ? -v : v};
    }
    case ExprOp::logical_not: return {.b = !eval_expr(*e.lhs, n1, n2).b};
    case ExprOp::logical_and:
        return {.b = eval_expr(*e.lhs, n1, n2).b && eval_expr(*e.rhs, n1, n2).b};
    case ExprOp::logical_or:
        return {.b = eval_expr(*e.lhs, n1, n2).b || eval_expr(*e.rhs, n1, n2).b};
    default: break;
    }
    const Value l = eval_expr(*e.lhs, n1, n2);
    const Value r = eval_expr(*e.rhs, n1, n2);
    switch (e.op) {
    case ExprOp::add: return {.i = l.i + r.i};
    case ExprOp::sub: return {.i = l.i - r.i};
    case ExprOp::mul: return {.i = l.i * r.i};
    case ExprOp::div: return {.i = floor_div(l.i, r.i)};
    case ExprOp::mod: return {.i = floor_mod(l.i, r.i)};
    case ExprOp::eq:
        return {.b = e.lhs->type == ValueType::text ? *l.s == *r.s : l.i == r.i};
    case ExprOp::ne:
        return {.b = e.lhs->type == ValueType::text ? *l.s != *r.s : l.i != r.i};
    case ExprOp::lt: return {.b = l.i < r.i};
    case ExprOp::le: return {.b = l.i <= r.i};
    case ExprOp::gt: return {.b = l.i > r.i};
    case ExprOp::ge: return {.b = l.i >= r.i};
    default: throw EvalError("corrupt expression tree");
    }
}

inline void print_expr(const Expr& e, std::string& out) {
    auto binary = [&](const char* op) {
        out += '(';
        print_expr(*e.lhs, out);
        out += ' ';
        out += op;
        out += ' ';
        print_expr(*e.rhs, out);
        out += ')';
    };
    switch (e.op) {
    case ExprOp::lit_int: out += std::to_string(e.int_val); return;
    case ExprOp::lit_str:
        out += '\'';
        out += e.str_val;
        out += '\'';
        return;
    case ExprOp::attr_id:
        out += e.which == 1 ? "n1.id" : "n2.id";
        return;
    case ExprOp::attr_region:
        out += e.which == 1 ? "n1.region" : "n2.region";
        return;
    case ExprOp::neg:
        out += "(-";
        print_expr(*e.lhs, out);
        out += ')';
        return;
    case ExprOp::abs_fn:
        out += "abs(";
        print_expr(*e.lhs, out);
        out += ')';
        return;
    case ExprOp::logical_not:
        out += "(not ";
        print_expr(*e.lhs, out);
        out += ')';
        return;
    case ExprOp::add: binary("+"); return;
    case ExprOp::sub: binary("-"); return;
    case ExprOp::mul: binary("*"); return;
    case ExprOp::div: binary("/"); return;
    case ExprOp::mod: binary("%"); return;
    case ExprOp::eq: binary("=="); return;
    case ExprOp::ne: binary("!="); return;
    case ExprOp::lt: binary("<"); return;
    case ExprOp::le: binary("<="); return;
    case ExprOp::gt: binary(">"); return;
    case ExprOp::ge: binary(">="); return;
    case ExprOp::logical_and: binary("and"); return;
    case ExprOp::logical_or: binary("or"); return;
    }
}

} // namespace detail

using detail::floor_div;
using detail::floor_mod;

inline PredicateAst parse_topology_expr(std::string_view src) {
    detail::Parser p(src);
    return PredicateAst{p.parse()};
}

inline bool eval_predicate(const PredicateAst& ast, const NodeDescriptor& n1,
                           const NodeDescriptor& n2) {
    return detail::eval_expr(*ast.root, n1, n2).b;
}

// fully parenthesized; reparsing yields an equivalent predicate
inline std::string to_string(const PredicateAst& ast) {
    std::string out;
    detail::print_expr(*ast.root, out);
    return out;
}

} // namespace chainsim::net
