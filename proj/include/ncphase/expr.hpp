#pragma once

#include "ncphase/catalog.hpp"
#include "ncphase/series.hpp"

#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace ncphase {

/// Expression language for momentum series and realizations.
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := '-' unary | power
///   power   := primary ('^' INT)?
///   primary := INT | 'i' | NAME | NAME '[' idx ']' ('[' idx ']')?
///            | NAME '(' expr (',' expr)* ')' | '(' expr ')'
///   idx     := INT | 'mu' | 'nu'
///
/// Vectors p, k, q (momenta), x (coordinates) and a (the parameters a_0, a_1,
/// ...) are indexed as p[mu] or contracted as dot(a, p). aMat[i][j] is the
/// parameter a_i_j, or -a_j_i / +a_j_i when only the transposed one exists.
/// Functions: eta(i,j), epsilon(i,j,k), dot(u,v), exp, ln1p, sqrt1p, inv1p,
/// sqrt (argument with constant term 1). Division needs a denominator with
/// nonzero rational constant term.

struct ParseError : std::invalid_argument {
    int line, col;
    std::string message;
    std::set<std::string> expected;
    ParseError(int line_, int col_, const std::string& what, std::set<std::string> exp = {})
        : std::invalid_argument(std::to_string(line_) + ":" + std::to_string(col_) + ": " + what + describe(exp)), line(line_), col(col_), message(what), expected(std::move(exp))
    {
    }
    /// The same error `lines` further down.
    ParseError moved(int lines) const { return ParseError(line + lines, col, message, expected); }
    static std::string describe(const std::set<std::string>& exp)
    {
        if (exp.empty()) return "";
        std::string s = " (expected ";
        bool first = true;
        for (const auto& e : exp) {
            s += (first ? "" : ", ") + e;
            first = false;
        }
        return s + ")";
    }
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Index slot: a literal component or one of the metavariables mu, nu.
struct Index {
    int value = 0;
    std::string meta;  // "mu", "nu" or empty
    bool operator==(const Index&) const = default;
};

struct Expr {
    enum class Kind { number, imag, symbol, indexed, call, add, sub, mul, div, neg, pow };
    Kind kind;
    Rational number;
    std::string name;
    std::vector<Index> idx;
    std::vector<ExprPtr> args;
    int exponent = 0;
    int line = 1, col = 1;
};

namespace detail {

inline const std::map<std::string, int>& function_arity()
{
    static const std::map<std::string, int> m{{"eta", 2}, {"epsilon", 3}, {"dot", 2}, {"exp", 1}, {"ln1p", 1}, {"sqrt1p", 1}, {"inv1p", 1}, {"sqrt", 1}};
    return m;
}

inline bool is_vector_name(const std::string& s) { return s == "p" || s == "k" || s == "q" || s == "x" || s == "a"; }

class Parser {
public:
    explicit Parser(const std::string& src) : src_(src) {}

    ExprPtr parse()
    {
        skip();
        auto e = expr();
        skip();
        if (pos_ < src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'", {"operator", "end of input"});
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& what, std::set<std::string> exp = {}) const { throw ParseError(line_, col_, what, std::move(exp)); }

    void advance()
    {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }
    void skip()
    {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance();
    }
    bool peek(char c)
    {
        skip();
        return pos_ < src_.size() && src_[pos_] == c;
    }
    void expect(char c)
    {
        if (!peek(c)) fail(pos_ < src_.size() ? "unexpected '" + std::string(1, src_[pos_]) + "'" : "unexpected end of input", {"'" + std::string(1, c) + "'"});
        advance();
    }

    ExprPtr node(Expr e) const { return std::make_shared<const Expr>(std::move(e)); }
    Expr at(Expr::Kind k) const
    {
        Expr e{};
        e.kind = k;
        e.line = line_;
        e.col = col_;
        return e;
    }

    ExprPtr expr()
    {
        auto lhs = term();
        while (peek('+') || peek('-')) {
            Expr e = at(src_[pos_] == '+' ? Expr::Kind::add : Expr::Kind::sub);
            advance();
            e.args = {lhs, term()};
            lhs = node(std::move(e));
        }
        return lhs;
    }
    ExprPtr term()
    {
        auto lhs = unary();
        while (peek('*') || peek('/')) {
            Expr e = at(src_[pos_] == '*' ? Expr::Kind::mul : Expr::Kind::div);
            advance();
            e.args = {lhs, unary()};
            lhs = node(std::move(e));
        }
        return lhs;
    }
    ExprPtr unary()
    {
        if (peek('-')) {
            Expr e = at(Expr::Kind::neg);
            advance();
            e.args = {unary()};
            return node(std::move(e));
        }
        return power();
    }
    ExprPtr power()
    {
        auto base = primary();
        if (peek('^')) {
            Expr e = at(Expr::Kind::pow);
            advance();
            skip();
            if (pos_ >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[pos_]))) fail("exponent must be a nonnegative integer", {"integer"});
            e.exponent = static_cast<int>(integer());
            e.args = {base};
            return node(std::move(e));
        }
        return base;
    }
    long integer()
    {
        std::string digits;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
            digits += src_[pos_];
            advance();
        }
        if (digits.size() > 9) fail("integer literal too large");
        return std::stol(digits);
    }
    std::string name()
    {
        std::string s;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
            s += src_[pos_];
            advance();
        }
        return s;
    }
    Index index()
    {
        skip();
        if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) return Index{static_cast<int>(integer()), ""};
        const int l = line_, c = col_;
        const std::string s = name();
        if (s == "mu" || s == "nu") return Index{0, s};
        throw ParseError(l, c, s.empty() ? "missing index" : "unknown index '" + s + "'", {"integer", "mu", "nu"});
    }

    ExprPtr primary()
    {
        skip();
        if (pos_ >= src_.size()) fail("unexpected end of input", {"number", "name", "'('", "'-'"});
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            Expr e = at(Expr::Kind::number);
            e.number = Rational(integer());
            return node(std::move(e));
        }
        if (c == '(') {
            advance();
            auto e = expr();
            expect(')');
            return e;
        }
        if (!std::isalpha(static_cast<unsigned char>(c))) fail("unexpected '" + std::string(1, c) + "'", {"number", "name", "'('", "'-'"});
        Expr e = at(Expr::Kind::symbol);
        e.name = name();
        if (peek('(')) {
            const auto it = function_arity().find(e.name);
            if (it == function_arity().end()) throw ParseError(e.line, e.col, "unknown function '" + e.name + "'");
            advance();
            e.kind = Expr::Kind::call;
            if (e.name == "eta" || e.name == "epsilon") {
                e.idx.push_back(index());
                while (peek(',')) {
                    advance();
                    e.idx.push_back(index());
                }
                expect(')');
                if (static_cast<int>(e.idx.size()) != it->second) throw ParseError(e.line, e.col, e.name + " takes " + std::to_string(it->second) + " indices");
                return node(std::move(e));
            }
            e.args.push_back(expr());
            while (peek(',')) {
                advance();
                e.args.push_back(expr());
            }
            expect(')');
            if (static_cast<int>(e.args.size()) != it->second)
                throw ParseError(e.line, e.col, e.name + " takes " + std::to_string(it->second) + " argument" + (it->second > 1 ? "s" : ""));
            if (e.name == "dot")
                for (const auto& a : e.args)
                    if (a->kind != Expr::Kind::symbol || !is_vector_name(a->name)) throw ParseError(a->line, a->col, "dot takes vector names", {"a", "k", "p", "q", "x"});
            return node(std::move(e));
        }
        if (e.name == "i") {
            e.kind = Expr::Kind::imag;
            return node(std::move(e));
        }
        if (peek('[')) {
            e.kind = Expr::Kind::indexed;
            while (peek('[')) {
                advance();
                e.idx.push_back(index());
                expect(']');
            }
            const std::size_t want = e.name == "aMat" ? 2 : 1;
            if (e.idx.size() != want || (e.name != "aMat" && !is_vector_name(e.name)))
                throw ParseError(e.line, e.col, "'" + e.name + "' cannot take " + std::to_string(e.idx.size()) + " index" + (e.idx.size() > 1 ? "es" : ""));
        }
        return node(std::move(e));
    }

    const std::string& src_;
    std::size_t pos_ = 0;
    int line_ = 1, col_ = 1;
};

inline int precedence(Expr::Kind k)
{
    switch (k) {
    case Expr::Kind::add:
    case Expr::Kind::sub: return 1;
    case Expr::Kind::mul:
    case Expr::Kind::div: return 2;
    case Expr::Kind::neg: return 3;
    case Expr::Kind::pow: return 4;
    default: return 5;
    }
}

inline std::string index_str(const Index& i) { return i.meta.empty() ? std::to_string(i.value) : i.meta; }

}  // namespace detail

inline ExprPtr parse_expr(const std::string& src) { return detail::Parser(src).parse(); }

/// Canonical text; parse(print(e)) reproduces e up to source positions.
inline std::string print_expr(const Expr& e)
{
    using K = Expr::Kind;
    auto wrap = [](const Expr& sub, int min_prec) {
        const std::string s = print_expr(sub);
        return detail::precedence(sub.kind) < min_prec ? "(" + s + ")" : s;
    };
    switch (e.kind) {
    case K::number: return e.number.get_str();
    case K::imag: return "i";
    case K::symbol: return e.name;
    case K::indexed: {
        std::string s = e.name;
        for (const auto& i : e.idx) s += "[" + detail::index_str(i) + "]";
        return s;
    }
    case K::call: {
        std::string s = e.name + "(";
        for (std::size_t j = 0; j < e.idx.size(); ++j) s += (j ? "," : "") + detail::index_str(e.idx[j]);
        for (std::size_t j = 0; j < e.args.size(); ++j) s += (j ? ", " : "") + print_expr(*e.args[j]);
        return s + ")";
    }
    case K::add: return wrap(*e.args[0], 1) + " + " + wrap(*e.args[1], 2);
    case K::sub: return wrap(*e.args[0], 1) + " - " + wrap(*e.args[1], 2);
    case K::mul: return wrap(*e.args[0], 2) + "*" + wrap(*e.args[1], 3);
    case K::div: return wrap(*e.args[0], 2) + "/" + wrap(*e.args[1], 3);
    case K::neg: return "-" + wrap(*e.args[0], 3);
    case K::pow: return wrap(*e.args[0], 5) + "^" + std::to_string(e.exponent);
    }
    return "?";
}

/// Structural equality, ignoring source positions.
inline bool same_expr(const Expr& a, const Expr& b)
{
    if (a.kind != b.kind || a.number != b.number || a.name != b.name || a.idx != b.idx || a.exponent != b.exponent || a.args.size() != b.args.size()) return false;
    for (std::size_t j = 0; j < a.args.size(); ++j)
        if (!same_expr(*a.args[j], *b.args[j])) return false;
    return true;
}

/// Where each vector symbol lives: momentum bank for p, k, q; coordinate
/// bank for x. Metavariables take the values mu, nu.
struct LowerEnv {
    Series like;
    std::map<std::string, int> bank{{"p", 0}, {"k", 0}, {"q", 1}};
    int xbank = 0;
    int mu = -1, nu = -1;
    bool antisymmetric = true;
};

namespace detail {

inline ParseError lower_error(const Expr& e, const std::string& what) { return ParseError(e.line, e.col, what); }

inline int resolve(const Expr& e, const Index& i, const LowerEnv& env)
{
    int v = i.value;
    if (i.meta == "mu") v = env.mu;
    if (i.meta == "nu") v = env.nu;
    if (v < 0) throw lower_error(e, "unbound index '" + i.meta + "'");
    if (v >= env.like.dim()) throw lower_error(e, "index " + std::to_string(v) + " out of range for dimension " + std::to_string(env.like.dim()));
    return v;
}

inline Series component(const Expr& e, const std::string& name, int c, const LowerEnv& env)
{
    const Series& s = env.like;
    if (name == "a") {
        const std::string pn = "a_" + std::to_string(c);
        if (!s.ctx().find_param(pn).has_value()) throw lower_error(e, "unknown parameter '" + pn + "'");
        return s.param(pn);
    }
    if (name == "x") {
        if (env.xbank >= s.layout().xbanks) throw lower_error(e, "coordinates are not available here");
        return s.coord(env.xbank, c);
    }
    const auto it = env.bank.find(name);
    if (it == env.bank.end() || it->second >= s.layout().banks) throw lower_error(e, "momentum '" + name + "' is not available here");
    return s.mom(it->second, c);
}

inline Series lower(const Expr& e, const LowerEnv& env)
{
    using K = Expr::Kind;
    const Series& s = env.like;
    switch (e.kind) {
    case K::number: return s.scalar(Gauss(e.number));
    case K::imag: return s.scalar(Gauss::i());
    case K::symbol:
        if (s.ctx().find_param(e.name).has_value()) return s.param(e.name);
        throw lower_error(e, is_vector_name(e.name) ? "vector '" + e.name + "' needs an index or dot()" : "unknown symbol '" + e.name + "'");
    case K::indexed: {
        if (e.name == "aMat") {
            const int r = resolve(e, e.idx[0], env), c = resolve(e, e.idx[1], env);
            const std::string direct = "a_" + std::to_string(r) + "_" + std::to_string(c), swapped = "a_" + std::to_string(c) + "_" + std::to_string(r);
            if (s.ctx().find_param(direct).has_value()) return s.param(direct);
            if (s.ctx().find_param(swapped).has_value()) return env.antisymmetric ? -s.param(swapped) : s.param(swapped);
            if (r == c && env.antisymmetric) return s.zero();
            throw lower_error(e, "unknown parameter '" + direct + "'");
        }
        return component(e, e.name, resolve(e, e.idx[0], env), env);
    }
    case K::call: {
        if (e.name == "eta") {
            const int r = resolve(e, e.idx[0], env), c = resolve(e, e.idx[1], env);
            return s.scalar(Gauss(r == c ? s.ctx().eta(r) : 0));
        }
        if (e.name == "epsilon") {
            if (s.dim() != 3) throw lower_error(e, "epsilon needs dimension 3");
            return s.scalar(Gauss(levi_civita(resolve(e, e.idx[0], env), resolve(e, e.idx[1], env), resolve(e, e.idx[2], env))));
        }
        if (e.name == "dot") {
            Series r = s.zero();
            for (int c = 0; c < s.dim(); ++c) r += component(*e.args[0], e.args[0]->name, c, env) * component(*e.args[1], e.args[1]->name, c, env) * Gauss(s.ctx().eta(c));
            return r;
        }
        const Series u = lower(*e.args[0], env);
        try {
            if (e.name == "exp") return expand_fn(Fn::exp, u);
            if (e.name == "ln1p") return expand_fn(Fn::log1p, u);
            if (e.name == "sqrt1p") return expand_fn(Fn::sqrt1p, u);
            if (e.name == "inv1p") return expand_fn(Fn::inv1p, u);
            if (e.name == "sqrt") {
                if (u.constant_term() != Gauss(1)) throw DomainError("sqrt needs constant term 1");
                return expand_fn(Fn::sqrt1p, u - u.one());
            }
        } catch (const DomainError& err) {
            throw lower_error(e, err.what());
        }
        throw lower_error(e, "unknown function '" + e.name + "'");
    }
    case K::add: return lower(*e.args[0], env) + lower(*e.args[1], env);
    case K::sub: return lower(*e.args[0], env) - lower(*e.args[1], env);
    case K::mul: return lower(*e.args[0], env) * lower(*e.args[1], env);
    case K::neg: return -lower(*e.args[0], env);
    case K::pow: return lower(*e.args[0], env).pow(static_cast<unsigned>(e.exponent));
    case K::div: {
        const Series num = lower(*e.args[0], env), den = lower(*e.args[1], env);
        const Gauss c = den.constant_term();
        if (c.is_zero()) throw lower_error(e, "division by a series with zero constant term");
        const Gauss ci = Gauss(1) / c;
        const Series rest = den * ci - den.one();
        return num * ci * (rest.is_zero() ? den.one() : expand_fn(Fn::inv1p, rest));
    }
    }
    return s.zero();
}

}  // namespace detail

inline Series lower(const Expr& e, const LowerEnv& env) { return detail::lower(e, env); }
inline Series lower(const std::string& src, const LowerEnv& env) { return detail::lower(*parse_expr(src), env); }

}  // namespace ncphase
