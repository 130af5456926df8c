// Copyright 2026 the Jacette developers
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#ifndef JACETTE_PARSER_HPP
#define JACETTE_PARSER_HPP

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <type_traits>
#include <vector>

#include "jacette/ast.hpp"
#include "jacette/lexer.hpp"

namespace jacette {

// Recursive-descent parser. Deterministic: one token of lookahead decides
// every production. Reports the first syntax error with 1-based position
// and the set of tokens that would have been accepted.
class Parser {
  public:
    static Program parse(const std::string& src) {
        Parser p(Lexer::tokenize(src));
        return p.parse_program();
    }

  private:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    const Token& cur() const { return toks_[pos_]; }
    const Token& ahead(std::size_t n) const {
        std::size_t i = pos_ + n;
        return i < toks_.size() ? toks_[i] : toks_.back();
    }
    Token advance() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
    bool at(Tok k) const { return cur().kind == k; }

    bool eat(Tok k) {
        if (!at(k))
            return false;
        advance();
        return true;
    }

    Token expect(Tok k) {
        if (!at(k))
            fail({tok_name(k)});
        return advance();
    }

    [[noreturn]] void fail(std::vector<std::string> expected) const {
        std::string msg = "expected ";
        for (std::size_t i = 0; i < expected.size(); ++i) {
            if (i)
                msg += expected.size() == 2 ? " or " : (i + 1 == expected.size() ? ", or " : ", ");
            msg += expected[i];
        }
        msg += " but found ";
        msg += tok_name(cur().kind);
        Error e(ErrKind::SyntaxError, msg);
        e.at(cur().line, cur().col);
        e.expected = std::move(expected);
        e.found = tok_name(cur().kind);
        throw e;
    }

    Program parse_program() {
        Program p;
        while (!at(Tok::Eof)) {
            if (at(Tok::KwNode))
                p.node_decls.push_back(parse_node_decl());
            else if (at(Tok::KwEdge))
                p.edge_decls.push_back(parse_edge_decl());
            else if (at(Tok::KwWalker))
                p.walker_decls.push_back(parse_walker_decl());
            else
                fail({"'node'", "'edge'", "'walker'", "end of input"});
        }
        return p;
    }

    NodeDecl parse_node_decl() {
        NodeDecl d;
        d.line = cur().line;
        expect(Tok::KwNode);
        d.name = expect(Tok::Ident).text;
        if (eat(Tok::KwAccess)) {
            expect(Tok::LParen);
            std::vector<std::string> names;
            names.push_back(expect(Tok::Ident).text);
            while (eat(Tok::Comma))
                names.push_back(expect(Tok::Ident).text);
            expect(Tok::RParen);
            d.access_walkers = std::move(names);
        }
        expect(Tok::LBrace);
        while (!at(Tok::RBrace)) {
            if (at(Tok::KwHas))
                parse_has_into(d.has_fields);
            else if (at(Tok::KwCan))
                parse_can_into(d.can_actions);
            else
                fail({"'has'", "'can'", "'}'"});
        }
        expect(Tok::RBrace);
        return d;
    }

    EdgeDecl parse_edge_decl() {
        EdgeDecl d;
        d.line = cur().line;
        expect(Tok::KwEdge);
        d.name = expect(Tok::Ident).text;
        expect(Tok::LBrace);
        while (!at(Tok::RBrace)) {
            if (at(Tok::KwHas))
                parse_has_into(d.has_fields);
            else
                fail({"'has'", "'}'"});
        }
        expect(Tok::RBrace);
        return d;
    }

    WalkerDecl parse_walker_decl() {
        WalkerDecl d;
        d.line = cur().line;
        expect(Tok::KwWalker);
        d.name = expect(Tok::Ident).text;
        expect(Tok::LBrace);
        while (at(Tok::KwHas) || at(Tok::KwCan)) {
            if (at(Tok::KwHas))
                parse_has_into(d.has_fields);
            else
                parse_can_into(d.can_actions);
        }
        while (!at(Tok::RBrace))
            d.body.push_back(parse_stmt());
        expect(Tok::RBrace);
        return d;
    }

    void parse_has_into(std::vector<std::string>& fields) {
        expect(Tok::KwHas);
        fields.push_back(expect(Tok::Ident).text);
        while (eat(Tok::Comma))
            fields.push_back(expect(Tok::Ident).text);
        expect(Tok::Semi);
    }

    void parse_can_into(std::vector<std::string>& actions) {
        expect(Tok::KwCan);
        actions.push_back(expect(Tok::Ident).text);
        expect(Tok::Semi);
    }

    Stmt parse_stmt() {
        Stmt s;
        s.line = cur().line;
        switch (cur().kind) {
        case Tok::KwTake: s.node = parse_take(); return s;
        case Tok::KwSpawn: s.node = parse_spawn(); return s;
        case Tok::KwIf: s.node = parse_if(); return s;
        case Tok::KwFor: s.node = parse_for(); return s;
        case Tok::KwReport:
            advance();
            s.node = Report{parse_expr()};
            expect(Tok::Semi);
            return s;
        case Tok::KwDisengage:
            advance();
            s.node = Disengage{};
            expect(Tok::Semi);
            return s;
        case Tok::Ident:
            if (ahead(1).kind == Tok::Assign) {
                Assign a;
                a.to_here = false;
                a.name = advance().text;
                advance(); // =
                a.value = parse_expr();
                expect(Tok::Semi);
                s.node = std::move(a);
                return s;
            }
            break;
        case Tok::KwHere:
            if (ahead(1).kind == Tok::Dot && ahead(2).kind == Tok::Ident &&
                ahead(3).kind == Tok::Assign) {
                Assign a;
                a.to_here = true;
                advance(); // here
                advance(); // .
                a.name = advance().text;
                advance(); // =
                a.value = parse_expr();
                expect(Tok::Semi);
                s.node = std::move(a);
                return s;
            }
            break;
        default: break;
        }
        if (!starts_expr(cur().kind))
            fail({"'take'", "'spawn'", "'if'", "'for'", "'report'", "'disengage'", "'here'",
                  "identifier", "expression"});
        s.node = ExprStmt{parse_expr()};
        expect(Tok::Semi);
        return s;
    }

    static bool starts_expr(Tok k) {
        switch (k) {
        case Tok::Int:
        case Tok::Float:
        case Tok::Str:
        case Tok::KwNull:
        case Tok::KwTrue:
        case Tok::KwFalse:
        case Tok::Ident:
        case Tok::KwHere:
        case Tok::LParen:
        case Tok::LBracket:
        case Tok::Minus:
        case Tok::KwNot: return true;
        default: return false;
        }
    }

    Take parse_take() {
        expect(Tok::KwTake);
        Take t;
        if (eat(Tok::ArrowOut))
            t.dir = Direction::Out;
        else if (eat(Tok::ArrowIn))
            t.dir = Direction::In;
        else if (eat(Tok::ArrowBoth))
            t.dir = Direction::Both;
        else
            fail({"'-->'", "'<--'", "'<-->'"});
        if (eat(Tok::Colon))
            t.edge_type = expect(Tok::Ident).text;
        if (eat(Tok::LParen)) {
            t.node_type = expect(Tok::Ident).text;
            expect(Tok::RParen);
        }
        expect(Tok::Semi);
        return t;
    }

    SpawnStmt parse_spawn() {
        expect(Tok::KwSpawn);
        expect(Tok::KwHere);
        SpawnStmt sp;
        if (eat(Tok::SpawnOut))
            sp.dir = Direction::Out;
        else if (eat(Tok::SpawnIn))
            sp.dir = Direction::In;
        else
            fail({"'++>'", "'<++'"});
        expect(Tok::Colon);
        sp.edge_type = expect(Tok::Ident).text;
        sp.node_type = expect(Tok::Ident).text;
        expect(Tok::LBrace);
        while (!at(Tok::RBrace)) {
            std::string field = expect(Tok::Ident).text;
            expect(Tok::Assign);
            ExprPtr value = parse_expr();
            expect(Tok::Semi);
            sp.inits.emplace_back(std::move(field), std::move(value));
        }
        expect(Tok::RBrace);
        expect(Tok::Semi);
        return sp;
    }

    If parse_if() {
        expect(Tok::KwIf);
        If f;
        f.cond = parse_expr();
        f.then_body = parse_block();
        if (eat(Tok::KwElse))
            f.else_body = parse_block();
        return f;
    }

    ForIn parse_for() {
        expect(Tok::KwFor);
        ForIn f;
        f.var = expect(Tok::Ident).text;
        expect(Tok::KwIn);
        f.iterable = parse_expr();
        f.body = parse_block();
        return f;
    }

    std::vector<Stmt> parse_block() {
        expect(Tok::LBrace);
        std::vector<Stmt> body;
        while (!at(Tok::RBrace))
            body.push_back(parse_stmt());
        expect(Tok::RBrace);
        return body;
    }

    // Precedence, loosest to tightest:
    //   or < and < not < comparison < additive < multiplicative < unary < postfix
    ExprPtr parse_expr() { return parse_or(); }

    ExprPtr parse_or() {
        ExprPtr lhs = parse_and();
        while (at(Tok::KwOr)) {
            int line = cur().line, col = cur().col;
            advance();
            lhs = make_expr(BinOp{BinKind::Or, lhs, parse_and()}, line, col);
        }
        return lhs;
    }

    ExprPtr parse_and() {
        ExprPtr lhs = parse_not();
        while (at(Tok::KwAnd)) {
            int line = cur().line, col = cur().col;
            advance();
            lhs = make_expr(BinOp{BinKind::And, lhs, parse_not()}, line, col);
        }
        return lhs;
    }

    ExprPtr parse_not() {
        if (at(Tok::KwNot)) {
            int line = cur().line, col = cur().col;
            advance();
            return make_expr(Unary{UnaryOp::Not, parse_not()}, line, col);
        }
        return parse_cmp();
    }

    ExprPtr parse_cmp() {
        ExprPtr lhs = parse_add();
        for (;;) {
            BinKind k;
            if (at(Tok::Eq))
                k = BinKind::Eq;
            else if (at(Tok::Ne))
                k = BinKind::Ne;
            else if (at(Tok::Lt))
                k = BinKind::Lt;
            else if (at(Tok::Gt))
                k = BinKind::Gt;
            else
                return lhs;
            int line = cur().line, col = cur().col;
            advance();
            lhs = make_expr(BinOp{k, lhs, parse_add()}, line, col);
        }
    }

    ExprPtr parse_add() {
        ExprPtr lhs = parse_mul();
        for (;;) {
            BinKind k;
            if (at(Tok::Plus))
                k = BinKind::Add;
            else if (at(Tok::Minus))
                k = BinKind::Sub;
            else
                return lhs;
            int line = cur().line, col = cur().col;
            advance();
            lhs = make_expr(BinOp{k, lhs, parse_mul()}, line, col);
        }
    }

    ExprPtr parse_mul() {
        ExprPtr lhs = parse_unary();
        for (;;) {
            BinKind k;
            if (at(Tok::Star))
                k = BinKind::Mul;
            else if (at(Tok::Slash))
                k = BinKind::Div;
            else
                return lhs;
            int line = cur().line, col = cur().col;
            advance();
            lhs = make_expr(BinOp{k, lhs, parse_unary()}, line, col);
        }
    }

    ExprPtr parse_unary() {
        if (at(Tok::Minus)) {
            int line = cur().line, col = cur().col;
            advance();
            return make_expr(Unary{UnaryOp::Neg, parse_unary()}, line, col);
        }
        return parse_postfix();
    }

    ExprPtr parse_postfix() {
        ExprPtr e = parse_primary();
        while (at(Tok::LBracket)) {
            int line = cur().line, col = cur().col;
            advance();
            ExprPtr idx = parse_expr();
            expect(Tok::RBracket);
            e = make_expr(Index{e, idx}, line, col);
        }
        return e;
    }

    ExprPtr parse_primary() {
        const Token& t = cur();
        switch (t.kind) {
        case Tok::Int: {
            advance();
            long long v = 0;
            try {
                v = std::stoll(t.text);
            } catch (const std::exception&) {
                Error e(ErrKind::SyntaxError, "integer literal out of range");
                e.at(t.line, t.col);
                throw e;
            }
            return make_expr(Literal{ContextValue(static_cast<std::int64_t>(v))}, t.line, t.col);
        }
        case Tok::Float: {
            advance();
            return make_expr(Literal{ContextValue(std::stod(t.text))}, t.line, t.col);
        }
        case Tok::Str:
            advance();
            return make_expr(Literal{ContextValue(t.text)}, t.line, t.col);
        case Tok::KwNull:
            advance();
            return make_expr(Literal{ContextValue(nullptr)}, t.line, t.col);
        case Tok::KwTrue:
            advance();
            return make_expr(Literal{ContextValue(true)}, t.line, t.col);
        case Tok::KwFalse:
            advance();
            return make_expr(Literal{ContextValue(false)}, t.line, t.col);
        case Tok::LBracket: {
            advance();
            ListLit l;
            if (!at(Tok::RBracket)) {
                l.items.push_back(parse_expr());
                while (eat(Tok::Comma))
                    l.items.push_back(parse_expr());
            }
            expect(Tok::RBracket);
            return make_expr(std::move(l), t.line, t.col);
        }
        case Tok::LParen: {
            advance();
            ExprPtr inner = parse_expr();
            expect(Tok::RParen);
            return inner;
        }
        case Tok::KwHere: {
            advance();
            expect(Tok::Dot);
            std::string field = expect(Tok::Ident).text;
            return make_expr(HereField{std::move(field)}, t.line, t.col);
        }
        case Tok::Ident: {
            advance();
            if (eat(Tok::LParen)) {
                ActionCall call;
                call.name = t.text;
                if (!at(Tok::RParen)) {
                    call.args.push_back(parse_expr());
                    while (eat(Tok::Comma))
                        call.args.push_back(parse_expr());
                }
                expect(Tok::RParen);
                return make_expr(std::move(call), t.line, t.col);
            }
            return make_expr(NameRef{t.text}, t.line, t.col);
        }
        default: fail({"expression"});
        }
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

// Name-resolution environment: the type declarations a walker body is
// checked against. Built from the program the walker will run inside, so
// injected walkers resolve against the live schema.
class ResolveEnv {
  public:
    static ResolveEnv from(const Program& p) {
        ResolveEnv env;
        for (const auto& n : p.node_decls) {
            env.nodes_[n.name] = &n;
            for (const auto& a : n.can_actions)
                env.node_can_.insert(a);
        }
        for (const auto& e : p.edge_decls)
            env.edges_[e.name] = &e;
        return env;
    }

    bool has_node(const std::string& n) const { return nodes_.count(n) > 0; }
    bool has_edge(const std::string& n) const { return edges_.count(n) > 0; }
    const NodeDecl* node(const std::string& n) const {
        auto it = nodes_.find(n);
        return it == nodes_.end() ? nullptr : it->second;
    }

    // Static action whitelist: the walker's own can-list plus every action
    // any node type whitelists (legality per node is rechecked at runtime).
    void check_walker(const WalkerDecl& w) const {
        check_unique(w.has_fields, w.line, "walker '" + w.name + "' declares duplicate field");
        std::set<std::string> callable(w.can_actions.begin(), w.can_actions.end());
        callable.insert(node_can_.begin(), node_can_.end());
        std::set<std::string> fields(w.has_fields.begin(), w.has_fields.end());
        std::vector<std::string> loop_vars;
        check_block(w.body, fields, callable, loop_vars);
    }

  private:
    [[noreturn]] static void err(const std::string& name, int line, const std::string& msg) {
        Error e(ErrKind::ResolutionError, msg);
        e.at(line, 0);
        e.with_name(name);
        throw e;
    }

    static void check_unique(const std::vector<std::string>& names, int line,
                             const std::string& what) {
        std::set<std::string> seen;
        for (const auto& n : names)
            if (!seen.insert(n).second)
                err(n, line, what + " '" + n + "'");
    }

    void check_block(const std::vector<Stmt>& body, const std::set<std::string>& fields,
                     const std::set<std::string>& callable,
                     std::vector<std::string>& loop_vars) const {
        for (const Stmt& s : body)
            check_stmt(s, fields, callable, loop_vars);
    }

    void check_stmt(const Stmt& s, const std::set<std::string>& fields,
                    const std::set<std::string>& callable,
                    std::vector<std::string>& loop_vars) const {
        std::visit(
            [&](const auto& node) {
                using T = std::decay_t<decltype(node)>;
                if constexpr (std::is_same_v<T, Assign>) {
                    if (!node.to_here) {
                        bool shadowed = std::count(loop_vars.begin(), loop_vars.end(), node.name);
                        if (shadowed)
                            err(node.name, s.line,
                                "cannot assign to loop variable '" + node.name + "'");
                        if (!fields.count(node.name))
                            err(node.name, s.line,
                                "assignment target '" + node.name +
                                    "' is not a declared walker field");
                    }
                    check_expr(node.value, fields, callable, loop_vars);
                } else if constexpr (std::is_same_v<T, Take>) {
                    if (node.edge_type && !has_edge(*node.edge_type))
                        err(*node.edge_type, s.line,
                            "take names unknown edge type '" + *node.edge_type + "'");
                    if (node.node_type && !has_node(*node.node_type))
                        err(*node.node_type, s.line,
                            "take names unknown node type '" + *node.node_type + "'");
                } else if constexpr (std::is_same_v<T, SpawnStmt>) {
                    if (!has_edge(node.edge_type))
                        err(node.edge_type, s.line,
                            "spawn names unknown edge type '" + node.edge_type + "'");
                    const NodeDecl* nd = this->node(node.node_type);
                    if (!nd)
                        err(node.node_type, s.line,
                            "spawn names unknown node type '" + node.node_type + "'");
                    std::set<std::string> declared(nd->has_fields.begin(), nd->has_fields.end());
                    std::set<std::string> seen;
                    for (const auto& [field, value] : node.inits) {
                        if (!declared.count(field))
                            err(field, s.line,
                                "spawn initializes field '" + field +
                                    "' not declared on node type '" + node.node_type + "'");
                        if (!seen.insert(field).second)
                            err(field, s.line, "spawn initializes field '" + field + "' twice");
                        check_expr(value, fields, callable, loop_vars);
                    }
                } else if constexpr (std::is_same_v<T, If>) {
                    check_expr(node.cond, fields, callable, loop_vars);
                    check_block(node.then_body, fields, callable, loop_vars);
                    check_block(node.else_body, fields, callable, loop_vars);
                } else if constexpr (std::is_same_v<T, ForIn>) {
                    check_expr(node.iterable, fields, callable, loop_vars);
                    loop_vars.push_back(node.var);
                    check_block(node.body, fields, callable, loop_vars);
                    loop_vars.pop_back();
                } else if constexpr (std::is_same_v<T, Report>) {
                    check_expr(node.value, fields, callable, loop_vars);
                } else if constexpr (std::is_same_v<T, ExprStmt>) {
                    check_expr(node.value, fields, callable, loop_vars);
                } else {
                    static_assert(std::is_same_v<T, Disengage>);
                }
            },
            s.node);
    }

    void check_expr(const ExprPtr& e, const std::set<std::string>& fields,
                    const std::set<std::string>& callable,
                    std::vector<std::string>& loop_vars) const {
        std::visit(
            [&](const auto& node) {
                using T = std::decay_t<decltype(node)>;
                if constexpr (std::is_same_v<T, NameRef>) {
                    bool is_loop = std::count(loop_vars.begin(), loop_vars.end(), node.name);
                    if (!is_loop && !fields.count(node.name))
                        err(node.name, e->line,
                            "name '" + node.name +
                                "' is neither a loop variable nor a declared walker field");
                } else if constexpr (std::is_same_v<T, ActionCall>) {
                    if (!callable.count(node.name))
                        err(node.name, e->line,
                            "action '" + node.name + "' is not declared in any can list");
                    for (const auto& a : node.args)
                        check_expr(a, fields, callable, loop_vars);
                } else if constexpr (std::is_same_v<T, Unary>) {
                    check_expr(node.operand, fields, callable, loop_vars);
                } else if constexpr (std::is_same_v<T, BinOp>) {
                    check_expr(node.lhs, fields, callable, loop_vars);
                    check_expr(node.rhs, fields, callable, loop_vars);
                } else if constexpr (std::is_same_v<T, ListLit>) {
                    for (const auto& item : node.items)
                        check_expr(item, fields, callable, loop_vars);
                } else if constexpr (std::is_same_v<T, Index>) {
                    check_expr(node.base, fields, callable, loop_vars);
                    check_expr(node.index, fields, callable, loop_vars);
                } else {
                    static_assert(std::is_same_v<T, Literal> || std::is_same_v<T, HereField>);
                }
            },
            e->node);
    }

    std::map<std::string, const NodeDecl*> nodes_;
    std::map<std::string, const EdgeDecl*> edges_;
    std::set<std::string> node_can_;
};

namespace detail {
inline void check_decl_header(const std::vector<std::string>& names, int line,
                              const std::string& what) {
    std::set<std::string> seen;
    for (const auto& n : names)
        if (!seen.insert(n).second) {
            Error e(ErrKind::ResolutionError, what + " '" + n + "'");
            e.at(line, 0);
            e.with_name(n);
            throw e;
        }
}
} // namespace detail

// Whole-program validation: unique declaration names per kind, unique
// fields, and every walker body checked against the program's own types.
// Access-clause walker names are deliberately unchecked; an access list
// may name walkers that are only injected later.
inline void resolve(const Program& p) {
    std::set<std::string> names;
    for (const auto& n : p.node_decls) {
        if (!names.insert(n.name).second) {
            Error e(ErrKind::ResolutionError, "duplicate node declaration '" + n.name + "'");
            e.at(n.line, 0);
            e.with_name(n.name);
            throw e;
        }
        detail::check_decl_header(n.has_fields, n.line,
                                  "node '" + n.name + "' declares duplicate field");
        if (n.access_walkers)
            detail::check_decl_header(*n.access_walkers, n.line,
                                      "node '" + n.name + "' access clause repeats walker");
    }
    names.clear();
    for (const auto& e : p.edge_decls) {
        if (!names.insert(e.name).second) {
            Error err(ErrKind::ResolutionError, "duplicate edge declaration '" + e.name + "'");
            err.at(e.line, 0);
            err.with_name(e.name);
            throw err;
        }
        detail::check_decl_header(e.has_fields, e.line,
                                  "edge '" + e.name + "' declares duplicate field");
    }
    names.clear();
    ResolveEnv env = ResolveEnv::from(p);
    for (const auto& w : p.walker_decls) {
        if (!names.insert(w.name).second) {
            Error e(ErrKind::ResolutionError, "duplicate walker declaration '" + w.name + "'");
            e.at(w.line, 0);
            e.with_name(w.name);
            throw e;
        }
        env.check_walker(w);
    }
}

// Parse plus resolution. This is the front door used everywhere outside
// targeted parser tests.
inline Program parse(const std::string& src) {
    Program p = Parser::parse(src);
    resolve(p);
    return p;
}

// Parses source that must declare exactly one walker and nothing else.
// Resolution against the live program is the caller's job.
inline WalkerDecl parse_single_walker(const std::string& src) {
    Program p = Parser::parse(src);
    if (p.walker_decls.size() != 1 || !p.node_decls.empty() || !p.edge_decls.empty())
        throw Error(ErrKind::NotAWalker,
                    "source must declare exactly one walker (found " +
                        std::to_string(p.walker_decls.size()) + " walkers, " +
                        std::to_string(p.node_decls.size()) + " nodes, " +
                        std::to_string(p.edge_decls.size()) + " edges)");
    return std::move(p.walker_decls[0]);
}

} // namespace jacette

#endif
