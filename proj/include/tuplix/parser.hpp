#pragma once

#include <cctype>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tuplix/eliminate.hpp"
#include "tuplix/normalize.hpp"
#include "tuplix/printer.hpp"
#include "tuplix/term.hpp"

namespace tuplix {

// ---------------------------------------------------------------------------
// Budget-specification DSL.
//
//   file   := { "def" NAME "=" term ";" }
//   term   := conj { "+" conj }
//   conj   := prefix { "&" prefix }
//   prefix := "sum" VAR "." prefix | "let" VAR "=" dexpr "in" prefix
//           | "clear" "{" attrs "}" prefix | "encap" "{" attrs "}" prefix
//           | "select" "{" attrs "}" prefix | dexpr "*" prefix | atom
//   atom   := "eps" | "delta" | ATTR "(" dexpr ")" | "test" "(" dexpr ")"
//           | "ntest" "(" dexpr ")" | "leq" "(" dexpr "," dexpr ")"
//           | "$" NAME | "@" NAME | "(" term ")"
//   dexpr  := rationals, variables, + - * /, unary -, integer ^k, inv(e), abs(e)
//
// Comments run from '#' to end of line. let/ntest/leq desugar at parse time;
// select desugars at resolution time (it needs the attribute support of its
// fully expanded body). Integer division of literals folds into a rational
// literal, so 3/2 is the quantity 3/2.
// ---------------------------------------------------------------------------

struct Definition {
    std::string name;
    TermPtr body;  // may contain references and selects
};

namespace detail {

inline TermPtr resolve_term(const TermPtr& t, const std::map<std::string, TermPtr>& defs);

}  // namespace detail

struct SourceFile {
    std::vector<Definition> definitions;

    const Definition* find(const std::string& name) const {
        for (const auto& d : definitions)
            if (d.name == name) return &d;
        return nullptr;
    }

    /// Expands references and selects; the result is an engine-ready term.
    TermPtr resolve(const std::string& name) const {
        const Definition* d = find(name);
        if (!d) throw UnknownReferenceError(name);
        std::map<std::string, TermPtr> defs;
        for (const auto& def : definitions) defs[def.name] = def.body;
        return detail::resolve_term(d->body, defs);
    }
};

namespace detail {

inline TermPtr resolve_term(const TermPtr& t, const std::map<std::string, TermPtr>& defs) {
    switch (t->kind) {
        case TKind::Ref: {
            auto it = defs.find(t->name);
            if (it == defs.end()) throw UnknownReferenceError(t->name);
            return resolve_term(it->second, defs);
        }
        case TKind::Select: {
            TermPtr body = resolve_term(t->left, defs);
            AttrSet support = attribute_support(body);
            AttrSet cleared;
            for (const auto& a : support)
                if (!t->attributes.count(a)) cleared.insert(a);
            return tt::clear(cleared, body);
        }
        case TKind::Conj: return tt::conj(resolve_term(t->left, defs), resolve_term(t->right, defs));
        case TKind::Choice:
            return tt::choice(resolve_term(t->left, defs), resolve_term(t->right, defs));
        case TKind::Sum: return tt::sum(t->name, resolve_term(t->left, defs));
        case TKind::Scalar: return tt::scalar(t->data, resolve_term(t->left, defs));
        case TKind::Clear: return tt::clear(t->attributes, resolve_term(t->left, defs));
        case TKind::Encap: return tt::encap(t->attributes, resolve_term(t->left, defs));
        default: return t;
    }
}

struct Token {
    enum class Type { Ident, Integer, Symbol, End };
    Type type;
    std::string text;
    int line;
    int column;
};

inline bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

inline std::vector<Token> lex(std::string_view text) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto push = [&](Token::Type ty, std::string s, int l, int c) {
        out.push_back({ty, std::move(s), l, c});
    };
    while (i < text.size()) {
        char c = text[i];
        if (c == '\n') {
            ++line;
            col = 1;
            ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++col;
            ++i;
            continue;
        }
        if (c == '#') {
            while (i < text.size() && text[i] != '\n') ++i;
            continue;
        }
        int l = line, cl = col;
        if (ident_start(c)) {
            std::size_t j = i;
            while (j < text.size() && ident_char(text[j])) ++j;
            push(Token::Type::Ident, std::string(text.substr(i, j - i)), l, cl);
            col += static_cast<int>(j - i);
            i = j;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            push(Token::Type::Integer, std::string(text.substr(i, j - i)), l, cl);
            col += static_cast<int>(j - i);
            i = j;
            continue;
        }
        static const std::string symbols = "&+-*/^(){},;.=$@";
        if (symbols.find(c) != std::string::npos) {
            push(Token::Type::Symbol, std::string(1, c), l, cl);
            ++col;
            ++i;
            continue;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }
    out.push_back({Token::Type::End, "", line, col});
    return out;
}

inline const std::set<std::string>& keywords() {
    static const std::set<std::string> kw = {"def",   "sum",  "let",  "in",    "clear", "encap",
                                             "select", "eps",  "delta", "test",  "ntest", "leq",
                                             "inv",   "abs"};
    return kw;
}

class Parser {
public:
    explicit Parser(std::string_view text) : tokens_(lex(text)) {}

    SourceFile parse_file() {
        SourceFile file;
        while (!at_end()) {
            expect_keyword("def");
            std::string name = expect_ident("definition name");
            if (file.find(name)) throw error("duplicate definition '" + name + "'");
            expect_symbol('=');
            TermPtr body = parse_term();
            expect_symbol(';');
            file.definitions.push_back({std::move(name), std::move(body)});
        }
        validate_references(file);
        return file;
    }

    TermPtr parse_term_only() {
        TermPtr t = parse_term();
        if (!at_end()) throw error("trailing input after term");
        return t;
    }

    DataTermPtr parse_data_only() {
        DataTermPtr t = parse_dexpr();
        if (!at_end()) throw error("trailing input after expression");
        return t;
    }

private:
    // --- token helpers ---
    const Token& peek(int ahead = 0) const {
        std::size_t i = pos_ + static_cast<std::size_t>(ahead);
        return i < tokens_.size() ? tokens_[i] : tokens_.back();
    }
    bool at_end() const { return peek().type == Token::Type::End; }
    bool at_symbol(char c) const {
        return peek().type == Token::Type::Symbol && peek().text[0] == c;
    }
    bool at_keyword(const char* kw) const {
        return peek().type == Token::Type::Ident && peek().text == kw;
    }
    void advance() { ++pos_; }
    ParseError error(const std::string& msg) const {
        return ParseError(msg, peek().line, peek().column);
    }
    void expect_symbol(char c) {
        if (!at_symbol(c)) throw error(std::string("expected '") + c + "'");
        advance();
    }
    void expect_keyword(const char* kw) {
        if (!at_keyword(kw)) throw error(std::string("expected '") + kw + "'");
        advance();
    }
    std::string expect_ident(const char* what) {
        if (peek().type != Token::Type::Ident || keywords().count(peek().text))
            throw error(std::string("expected ") + what);
        std::string s = peek().text;
        advance();
        return s;
    }
    std::string expect_lower_ident(const char* what) {
        std::string s = expect_ident(what);
        if (!std::islower(static_cast<unsigned char>(s[0])))
            throw error(std::string(what) + " must start with a lowercase letter: '" + s + "'");
        return s;
    }

    // --- grammar ---
    TermPtr parse_term() {
        TermPtr acc = parse_conj();
        while (at_symbol('+')) {
            advance();
            acc = tt::choice(acc, parse_conj());
        }
        return acc;
    }

    TermPtr parse_conj() {
        TermPtr acc = parse_prefix();
        while (at_symbol('&')) {
            advance();
            acc = tt::conj(acc, parse_prefix());
        }
        return acc;
    }

    AttrSet parse_attr_block() {
        expect_symbol('{');
        AttrSet attrs;
        attrs.insert(expect_lower_ident("attribute"));
        while (at_symbol(',')) {
            advance();
            attrs.insert(expect_lower_ident("attribute"));
        }
        expect_symbol('}');
        return attrs;
    }

    TermPtr parse_prefix() {
        if (at_keyword("sum")) {
            advance();
            std::string var = expect_lower_ident("bound variable");
            expect_symbol('.');
            return tt::sum(var, parse_prefix());
        }
        if (at_keyword("let")) {
            advance();
            std::string var = expect_lower_ident("let variable");
            expect_symbol('=');
            DataTermPtr value = parse_dexpr();
            expect_keyword("in");
            return expand_let(var, value, parse_prefix());
        }
        if (at_keyword("clear")) {
            advance();
            AttrSet attrs = parse_attr_block();
            return tt::clear(std::move(attrs), parse_prefix());
        }
        if (at_keyword("encap")) {
            advance();
            AttrSet attrs = parse_attr_block();
            return tt::encap(std::move(attrs), parse_prefix());
        }
        if (at_keyword("select")) {
            advance();
            AttrSet attrs = parse_attr_block();
            return tt::select(std::move(attrs), parse_prefix());
        }
        // atom, or a data expression acting as a scalar coefficient
        if (atom_ahead()) return parse_atom();
        if (at_symbol('(')) {
            std::size_t save = pos_;
            try {
                return parse_atom();  // "(" term ")"
            } catch (const ParseError&) {
                pos_ = save;  // fall through to the scalar route
            }
        }
        DataTermPtr coeff = parse_dexpr();
        if (!at_symbol('*')) throw error("expected '*' after scalar coefficient");
        advance();
        return tt::scalar(coeff, parse_prefix());
    }

    bool atom_ahead() const {
        const Token& t = peek();
        if (t.type == Token::Type::Symbol) return t.text[0] == '$' || t.text[0] == '@';
        if (t.type != Token::Type::Ident) return false;
        if (t.text == "eps" || t.text == "delta" || t.text == "test" || t.text == "ntest" ||
            t.text == "leq")
            return true;
        if (keywords().count(t.text)) return false;  // inv/abs and friends start data expressions
        return peek(1).type == Token::Type::Symbol && peek(1).text[0] == '(';
    }

    TermPtr parse_atom() {
        if (at_keyword("eps")) {
            advance();
            return tt::empty();
        }
        if (at_keyword("delta")) {
            advance();
            return tt::null();
        }
        if (at_keyword("test")) {
            advance();
            expect_symbol('(');
            DataTermPtr p = parse_dexpr();
            expect_symbol(')');
            return tt::test(p);
        }
        if (at_keyword("ntest")) {
            advance();
            expect_symbol('(');
            DataTermPtr p = parse_dexpr();
            expect_symbol(')');
            return negate_test(p);
        }
        if (at_keyword("leq")) {
            advance();
            expect_symbol('(');
            DataTermPtr p = parse_dexpr();
            expect_symbol(',');
            DataTermPtr q = parse_dexpr();
            expect_symbol(')');
            return tt::test(test_leq(p, q));
        }
        if (at_symbol('$')) {
            advance();
            return tt::tvar(expect_ident("tuplix variable name"));
        }
        if (at_symbol('@')) {
            advance();
            return tt::ref(expect_ident("definition name"));
        }
        if (at_symbol('(')) {
            advance();
            TermPtr t = parse_term();
            expect_symbol(')');
            return t;
        }
        if (peek().type == Token::Type::Ident) {
            std::string attr = expect_lower_ident("attribute");
            expect_symbol('(');
            DataTermPtr p = parse_dexpr();
            expect_symbol(')');
            return tt::entry(std::move(attr), p);
        }
        throw error("expected a tuplix term");
    }

    DataTermPtr parse_dexpr() {
        DataTermPtr acc = parse_dterm();
        while (at_symbol('+') || at_symbol('-')) {
            char op = peek().text[0];
            std::size_t save = pos_;
            advance();
            DataTermPtr rhs;
            try {
                rhs = parse_dterm();
            } catch (const ParseError&) {
                pos_ = save;  // the operator belongs to the enclosing term
                break;
            }
            acc = op == '+' ? dt::add(acc, rhs) : dt::sub(acc, rhs);
        }
        return acc;
    }

    DataTermPtr parse_dterm() {
        DataTermPtr acc = parse_dfactor();
        while (at_symbol('*') || at_symbol('/')) {
            char op = peek().text[0];
            std::size_t save = pos_;
            advance();
            DataTermPtr rhs;
            try {
                rhs = parse_dfactor();
            } catch (const ParseError&) {
                pos_ = save;  // e.g. the '*' of a scalar application
                break;
            }
            if (op == '/' && acc->kind == DtKind::Constant && rhs->kind == DtKind::Constant)
                acc = dt::constant(divide(acc->value, rhs->value));  // rational literal
            else
                acc = op == '*' ? dt::mul(acc, rhs) : dt::div(acc, rhs);
        }
        return acc;
    }

    DataTermPtr parse_dfactor() {
        if (at_symbol('-')) {
            advance();
            return dt::neg(parse_dfactor());
        }
        return parse_dpow();
    }

    DataTermPtr parse_dpow() {
        DataTermPtr base = parse_dprimary();
        if (at_symbol('^')) {
            advance();
            bool negexp = false;
            if (at_symbol('-')) {
                advance();
                negexp = true;
            }
            if (peek().type != Token::Type::Integer) throw error("expected integer exponent");
            int k = std::stoi(peek().text);
            advance();
            return dt::pow(base, negexp ? -k : k);
        }
        return base;
    }

    DataTermPtr parse_dprimary() {
        const Token& t = peek();
        if (t.type == Token::Type::Integer) {
            Quantity q = Quantity::from_string(t.text);
            advance();
            return dt::constant(q);
        }
        if (at_keyword("inv") || at_keyword("abs")) {
            bool isinv = t.text == "inv";
            advance();
            expect_symbol('(');
            DataTermPtr p = parse_dexpr();
            expect_symbol(')');
            return isinv ? dt::inv(p) : dt::abs(p);
        }
        if (t.type == Token::Type::Ident && !keywords().count(t.text)) {
            if (peek(1).type == Token::Type::Symbol && peek(1).text[0] == '(')
                throw error("unknown function '" + t.text + "' in data expression");
            return dt::variable(expect_lower_ident("data variable"));
        }
        if (at_symbol('(')) {
            advance();
            DataTermPtr p = parse_dexpr();
            expect_symbol(')');
            return p;
        }
        throw error("expected a data expression");
    }

    // --- reference validation ---
    static void collect_refs(const TermPtr& t, std::set<std::string>& out) {
        switch (t->kind) {
            case TKind::Ref: out.insert(t->name); return;
            case TKind::Conj:
            case TKind::Choice:
                collect_refs(t->left, out);
                collect_refs(t->right, out);
                return;
            case TKind::Sum:
            case TKind::Scalar:
            case TKind::Clear:
            case TKind::Encap:
            case TKind::Select:
                collect_refs(t->left, out);
                return;
            default: return;
        }
    }

    void validate_references(const SourceFile& file) const {
        std::map<std::string, std::set<std::string>> deps;
        for (const auto& d : file.definitions) {
            std::set<std::string> refs;
            collect_refs(d.body, refs);
            for (const auto& r : refs)
                if (!file.find(r)) throw UnknownReferenceError(r);
            deps[d.name] = std::move(refs);
        }
        // depth-first cycle detection
        std::set<std::string> done, active;
        std::function<void(const std::string&)> visit = [&](const std::string& n) {
            if (done.count(n)) return;
            if (!active.insert(n).second) throw CyclicReferenceError(n);
            for (const auto& r : deps[n]) visit(r);
            active.erase(n);
            done.insert(n);
        };
        for (const auto& d : file.definitions) visit(d.name);
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline SourceFile parse_file(std::string_view text) { return detail::Parser(text).parse_file(); }
inline TermPtr parse_term(std::string_view text) { return detail::Parser(text).parse_term_only(); }
inline DataTermPtr parse_data(std::string_view text) { return detail::Parser(text).parse_data_only(); }

inline std::string to_text(const SourceFile& file) {
    std::string out;
    for (const auto& d : file.definitions) {
        out += "def ";
        out += d.name;
        out += " = ";
        out += to_string(d.body);
        out += ";\n";
    }
    return out;
}

}  // namespace tuplix
