// Copyright 2026 the Jacette developers
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#ifndef JACETTE_AST_HPP
#define JACETTE_AST_HPP

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "jacette/records.hpp"
#include "jacette/value.hpp"

namespace jacette {

// Immutable expression tree. Nodes are shared and never mutated after
// construction, so ASTs are safe to hand across threads.
struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Scalar literal: null, bool, integer, float, or string. List syntax
// always parses to ListLit, never to a Literal holding an array.
struct Literal {
    ContextValue value;
};

// Bare identifier. Binds to the innermost enclosing loop variable if one
// is in scope, otherwise to a walker field; binding happens at lookup
// time, not in the AST.
struct NameRef {
    std::string name;
};

struct HereField {
    std::string name;
};

struct ActionCall {
    std::string name;
    std::vector<ExprPtr> args;
};

enum class UnaryOp { Neg, Not };

enum class BinKind { Or, And, Eq, Ne, Lt, Gt, Add, Sub, Mul, Div };

struct Unary {
    UnaryOp op;
    ExprPtr operand;
};

struct BinOp {
    BinKind op;
    ExprPtr lhs;
    ExprPtr rhs;
};

struct ListLit {
    std::vector<ExprPtr> items;
};

struct Index {
    ExprPtr base;
    ExprPtr index;
};

struct Expr {
    std::variant<Literal, NameRef, HereField, ActionCall, Unary, BinOp, ListLit, Index> node;
    int line = 0;
    int col = 0;
};

inline ExprPtr make_expr(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

template <typename T> ExprPtr make_expr(T node, int line = 0, int col = 0) {
    return std::make_shared<const Expr>(Expr{std::move(node), line, col});
}

// Statements. `line` positions diagnostics; it is ignored by equality.
struct Stmt;

struct Assign {
    bool to_here = false; // here.name = expr vs walker field
    std::string name;
    ExprPtr value;
};

struct Take {
    Direction dir = Direction::Out;
    std::optional<std::string> edge_type;
    std::optional<std::string> node_type;
};

// spawn here ++>:edge node { f = e; ... };
// dir Out connects here -> new node, In connects new node -> here.
struct SpawnStmt {
    Direction dir = Direction::Out;
    std::string edge_type;
    std::string node_type;
    std::vector<std::pair<std::string, ExprPtr>> inits;
};

struct If {
    ExprPtr cond;
    std::vector<Stmt> then_body;
    std::vector<Stmt> else_body;
};

struct ForIn {
    std::string var;
    ExprPtr iterable;
    std::vector<Stmt> body;
};

struct Report {
    ExprPtr value;
};

struct Disengage {};

struct ExprStmt {
    ExprPtr value;
};

struct Stmt {
    std::variant<Assign, Take, SpawnStmt, If, ForIn, Report, Disengage, ExprStmt> node;
    int line = 0;
};

struct NodeDecl {
    std::string name;
    std::vector<std::string> has_fields;
    std::optional<std::vector<std::string>> access_walkers; // non-empty when present
    std::vector<std::string> can_actions;
    int line = 0;
};

struct EdgeDecl {
    std::string name;
    std::vector<std::string> has_fields;
    int line = 0;
};

struct WalkerDecl {
    std::string name;
    std::vector<std::string> has_fields;
    std::vector<std::string> can_actions;
    std::vector<Stmt> body;
    int line = 0;
};

struct Program {
    std::vector<NodeDecl> node_decls;
    std::vector<EdgeDecl> edge_decls;
    std::vector<WalkerDecl> walker_decls;
};

// --- structural equality ---
// Positions are presentation detail and do not participate.

bool expr_eq(const ExprPtr& a, const ExprPtr& b);

inline bool operator==(const Literal& a, const Literal& b) {
    // Distinguish 1 from 1.0: the json == would conflate them.
    return a.value.type() == b.value.type() && a.value == b.value;
}
inline bool operator==(const NameRef& a, const NameRef& b) { return a.name == b.name; }
inline bool operator==(const HereField& a, const HereField& b) { return a.name == b.name; }
inline bool operator==(const Unary& a, const Unary& b) {
    return a.op == b.op && expr_eq(a.operand, b.operand);
}
inline bool operator==(const BinOp& a, const BinOp& b) {
    return a.op == b.op && expr_eq(a.lhs, b.lhs) && expr_eq(a.rhs, b.rhs);
}
inline bool operator==(const ActionCall& a, const ActionCall& b) {
    if (a.name != b.name || a.args.size() != b.args.size())
        return false;
    for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!expr_eq(a.args[i], b.args[i]))
            return false;
    return true;
}
inline bool operator==(const ListLit& a, const ListLit& b) {
    if (a.items.size() != b.items.size())
        return false;
    for (std::size_t i = 0; i < a.items.size(); ++i)
        if (!expr_eq(a.items[i], b.items[i]))
            return false;
    return true;
}
inline bool operator==(const Index& a, const Index& b) {
    return expr_eq(a.base, b.base) && expr_eq(a.index, b.index);
}
inline bool operator==(const Expr& a, const Expr& b) { return a.node == b.node; }

inline bool expr_eq(const ExprPtr& a, const ExprPtr& b) {
    if (a == b)
        return true;
    if (!a || !b)
        return false;
    return *a == *b;
}

bool stmt_list_eq(const std::vector<Stmt>& a, const std::vector<Stmt>& b);

inline bool operator==(const Assign& a, const Assign& b) {
    return a.to_here == b.to_here && a.name == b.name && expr_eq(a.value, b.value);
}
inline bool operator==(const Take& a, const Take& b) {
    return a.dir == b.dir && a.edge_type == b.edge_type && a.node_type == b.node_type;
}
inline bool operator==(const SpawnStmt& a, const SpawnStmt& b) {
    if (a.dir != b.dir || a.edge_type != b.edge_type || a.node_type != b.node_type ||
        a.inits.size() != b.inits.size())
        return false;
    for (std::size_t i = 0; i < a.inits.size(); ++i)
        if (a.inits[i].first != b.inits[i].first || !expr_eq(a.inits[i].second, b.inits[i].second))
            return false;
    return true;
}
inline bool operator==(const If& a, const If& b) {
    return expr_eq(a.cond, b.cond) && stmt_list_eq(a.then_body, b.then_body) &&
           stmt_list_eq(a.else_body, b.else_body);
}
inline bool operator==(const ForIn& a, const ForIn& b) {
    return a.var == b.var && expr_eq(a.iterable, b.iterable) && stmt_list_eq(a.body, b.body);
}
inline bool operator==(const Report& a, const Report& b) { return expr_eq(a.value, b.value); }
inline bool operator==(const Disengage&, const Disengage&) { return true; }
inline bool operator==(const ExprStmt& a, const ExprStmt& b) { return expr_eq(a.value, b.value); }
inline bool operator==(const Stmt& a, const Stmt& b) { return a.node == b.node; }

inline bool stmt_list_eq(const std::vector<Stmt>& a, const std::vector<Stmt>& b) {
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!(a[i] == b[i]))
            return false;
    return true;
}

inline bool operator==(const NodeDecl& a, const NodeDecl& b) {
    return a.name == b.name && a.has_fields == b.has_fields &&
           a.access_walkers == b.access_walkers && a.can_actions == b.can_actions;
}
inline bool operator==(const EdgeDecl& a, const EdgeDecl& b) {
    return a.name == b.name && a.has_fields == b.has_fields;
}
inline bool operator==(const WalkerDecl& a, const WalkerDecl& b) {
    return a.name == b.name && a.has_fields == b.has_fields && a.can_actions == b.can_actions &&
           stmt_list_eq(a.body, b.body);
}
inline bool operator==(const Program& a, const Program& b) {
    return a.node_decls == b.node_decls && a.edge_decls == b.edge_decls &&
           a.walker_decls == b.walker_decls;
}

} // namespace jacette

#endif
