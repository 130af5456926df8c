// Copyright 2026 the Jacette developers
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#ifndef JACETTE_PRINTER_HPP
#define JACETTE_PRINTER_HPP

#include <string>

#include "jacette/ast.hpp"

namespace jacette {

// Canonical source formatter: 4-space indents, one statement per line,
// blank line between declarations, minimal parentheses. Printing then
// re-parsing yields a structurally identical AST, and printing is
// idempotent byte-for-byte.
class Printer {
  public:
    static std::string print(const Program& p) {
        Printer pr;
        bool first = true;
        for (const auto& d : p.node_decls)
            pr.sep(first), pr.print_node(d);
        for (const auto& d : p.edge_decls)
            pr.sep(first), pr.print_edge(d);
        for (const auto& d : p.walker_decls)
            pr.sep(first), pr.print_walker(d);
        return std::move(pr.out_);
    }

    static std::string print_expr_text(const ExprPtr& e) {
        Printer pr;
        return pr.expr(e, 0);
    }

  private:
    // Precedence tiers, loosest binding lowest. Primary atoms sit above
    // every operator and never need parentheses.
    static int prec(const ExprPtr& e) {
        return std::visit(
            [](const auto& node) -> int {
                using T = std::decay_t<decltype(node)>;
                if constexpr (std::is_same_v<T, BinOp>) {
                    switch (node.op) {
                    case BinKind::Or: return 1;
                    case BinKind::And: return 2;
                    case BinKind::Eq:
                    case BinKind::Ne:
                    case BinKind::Lt:
                    case BinKind::Gt: return 4;
                    case BinKind::Add:
                    case BinKind::Sub: return 5;
                    case BinKind::Mul:
                    case BinKind::Div: return 6;
                    }
                    return 9;
                } else if constexpr (std::is_same_v<T, Unary>) {
                    return node.op == UnaryOp::Not ? 3 : 7;
                } else if constexpr (std::is_same_v<T, Index>) {
                    return 8;
                } else {
                    return 9;
                }
            },
            e->node);
    }

    static const char* op_text(BinKind k) {
        switch (k) {
        case BinKind::Or: return "or";
        case BinKind::And: return "and";
        case BinKind::Eq: return "==";
        case BinKind::Ne: return "!=";
        case BinKind::Lt: return "<";
        case BinKind::Gt: return ">";
        case BinKind::Add: return "+";
        case BinKind::Sub: return "-";
        case BinKind::Mul: return "*";
        case BinKind::Div: return "/";
        }
        return "?";
    }

    // min_prec: loosest tier printable here without parentheses.
    std::string expr(const ExprPtr& e, int min_prec) {
        std::string body = std::visit(
            [&](const auto& node) -> std::string {
                using T = std::decay_t<decltype(node)>;
                if constexpr (std::is_same_v<T, Literal>) {
                    return canonical_bytes(node.value);
                } else if constexpr (std::is_same_v<T, NameRef>) {
                    return node.name;
                } else if constexpr (std::is_same_v<T, HereField>) {
                    return "here." + node.name;
                } else if constexpr (std::is_same_v<T, ActionCall>) {
                    std::string s = node.name + "(";
                    for (std::size_t i = 0; i < node.args.size(); ++i) {
                        if (i)
                            s += ", ";
                        s += expr(node.args[i], 0);
                    }
                    return s + ")";
                } else if constexpr (std::is_same_v<T, Unary>) {
                    int p = prec(e);
                    const char* op = node.op == UnaryOp::Not ? "not " : "-";
                    return op + expr(node.operand, p);
                } else if constexpr (std::is_same_v<T, BinOp>) {
                    int p = prec(e);
                    // Left-associative: the right operand must bind tighter.
                    return expr(node.lhs, p) + " " + op_text(node.op) + " " +
                           expr(node.rhs, p + 1);
                } else if constexpr (std::is_same_v<T, ListLit>) {
                    std::string s = "[";
                    for (std::size_t i = 0; i < node.items.size(); ++i) {
                        if (i)
                            s += ", ";
                        s += expr(node.items[i], 0);
                    }
                    return s + "]";
                } else {
                    static_assert(std::is_same_v<T, Index>);
                    return expr(node.base, 8) + "[" + expr(node.index, 0) + "]";
                }
            },
            e->node);
        if (prec(e) < min_prec)
            return "(" + body + ")";
        return body;
    }

    void sep(bool& first) {
        if (!first)
            out_ += "\n";
        first = false;
    }

    void line(int depth, const std::string& text) {
        out_.append(static_cast<std::size_t>(depth) * 4, ' ');
        out_ += text;
        out_ += "\n";
    }

    static std::string joined(const std::vector<std::string>& names) {
        std::string s;
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (i)
                s += ", ";
            s += names[i];
        }
        return s;
    }

    void print_members(const std::vector<std::string>& has_fields,
                       const std::vector<std::string>& can_actions) {
        if (!has_fields.empty())
            line(1, "has " + joined(has_fields) + ";");
        for (const auto& a : can_actions)
            line(1, "can " + a + ";");
    }

    void print_node(const NodeDecl& d) {
        std::string head = "node " + d.name;
        if (d.access_walkers)
            head += " access(" + joined(*d.access_walkers) + ")";
        line(0, head + " {");
        print_members(d.has_fields, d.can_actions);
        line(0, "}");
    }

    void print_edge(const EdgeDecl& d) {
        line(0, "edge " + d.name + " {");
        print_members(d.has_fields, {});
        line(0, "}");
    }

    void print_walker(const WalkerDecl& d) {
        line(0, "walker " + d.name + " {");
        print_members(d.has_fields, d.can_actions);
        print_block(d.body, 1);
        line(0, "}");
    }

    void print_block(const std::vector<Stmt>& body, int depth) {
        for (const Stmt& s : body)
            print_stmt(s, depth);
    }

    static const char* take_arrow(Direction d) {
        switch (d) {
        case Direction::Out: return "-->";
        case Direction::In: return "<--";
        case Direction::Both: return "<-->";
        }
        return "?";
    }

    void print_stmt(const Stmt& s, int depth) {
        std::visit(
            [&](const auto& node) {
                using T = std::decay_t<decltype(node)>;
                if constexpr (std::is_same_v<T, Assign>) {
                    std::string lhs = node.to_here ? "here." + node.name : node.name;
                    line(depth, lhs + " = " + expr(node.value, 0) + ";");
                } else if constexpr (std::is_same_v<T, Take>) {
                    std::string t = std::string("take ") + take_arrow(node.dir);
                    if (node.edge_type)
                        t += ":" + *node.edge_type;
                    if (node.node_type)
                        t += "(" + *node.node_type + ")";
                    line(depth, t + ";");
                } else if constexpr (std::is_same_v<T, SpawnStmt>) {
                    std::string t = "spawn here ";
                    t += node.dir == Direction::Out ? "++>" : "<++";
                    t += ":" + node.edge_type + " " + node.node_type + " ";
                    if (node.inits.empty()) {
                        t += "{}";
                    } else {
                        t += "{ ";
                        for (const auto& [field, value] : node.inits)
                            t += field + " = " + expr(value, 0) + "; ";
                        t += "}";
                    }
                    line(depth, t + ";");
                } else if constexpr (std::is_same_v<T, If>) {
                    line(depth, "if " + expr(node.cond, 0) + " {");
                    print_block(node.then_body, depth + 1);
                    if (node.else_body.empty()) {
                        line(depth, "}");
                    } else {
                        line(depth, "} else {");
                        print_block(node.else_body, depth + 1);
                        line(depth, "}");
                    }
                } else if constexpr (std::is_same_v<T, ForIn>) {
                    line(depth, "for " + node.var + " in " + expr(node.iterable, 0) + " {");
                    print_block(node.body, depth + 1);
                    line(depth, "}");
                } else if constexpr (std::is_same_v<T, Report>) {
                    line(depth, "report " + expr(node.value, 0) + ";");
                } else if constexpr (std::is_same_v<T, Disengage>) {
                    line(depth, "disengage;");
                } else {
                    static_assert(std::is_same_v<T, ExprStmt>);
                    line(depth, expr(node.value, 0) + ";");
                }
            },
            s.node);
    }

    std::string out_;
};

inline std::string pretty_print(const Program& p) { return Printer::print(p); }

} // namespace jacette

#endif
