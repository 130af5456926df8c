// Copyright 2026 the Jacette developers
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#ifndef JACETTE_CORPUS_HPP
#define JACETTE_CORPUS_HPP

#include <filesystem>

#include "jacette/printer.hpp"
#include "jacette/runtime.hpp"

namespace jacette {

inline std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string fnv1a64_hex(const std::string& bytes) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

// --- grammar coverage ---
// Every production of the language maps to one feature name; the corpus
// as a whole must light up all of them.

inline const std::vector<std::string>& all_grammar_features() {
    static const std::vector<std::string> fs = {
        "node_decl",       "edge_decl",        "walker_decl",    "access_clause",
        "has_decl",        "can_decl_node",    "can_decl_walker",
        "stmt_assign",     "stmt_assign_here", "stmt_take",      "take_edge_filter",
        "take_node_filter", "take_out",        "take_in",        "take_both",
        "stmt_spawn",      "spawn_out",        "spawn_in",       "spawn_with_inits",
        "spawn_empty_inits", "stmt_if",        "if_else",        "stmt_forin",
        "stmt_report",     "stmt_disengage",   "stmt_expr",
        "expr_or",         "expr_and",         "expr_not",       "expr_eq",
        "expr_ne",         "expr_lt",          "expr_gt",        "expr_add",
        "expr_sub",        "expr_mul",         "expr_div",       "expr_neg",
        "expr_index",      "expr_call",        "expr_here",      "expr_name",
        "expr_group",      "lit_int",          "lit_float",      "lit_str",
        "lit_true",        "lit_false",        "lit_null",       "lit_list",
        "comment",         "str_escape"};
    return fs;
}

namespace detail {

inline int expr_prec_of(const Expr& e);

inline void scan_expr(const Expr& e, std::set<std::string>& out) {
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Literal>) {
                const ContextValue& v = node.value;
                if (v.is_number_integer())
                    out.insert("lit_int");
                else if (v.is_number_float())
                    out.insert("lit_float");
                else if (v.is_string())
                    out.insert("lit_str");
                else if (v.is_boolean())
                    out.insert(v.get<bool>() ? "lit_true" : "lit_false");
                else if (v.is_null())
                    out.insert("lit_null");
            } else if constexpr (std::is_same_v<T, NameRef>) {
                out.insert("expr_name");
            } else if constexpr (std::is_same_v<T, HereField>) {
                out.insert("expr_here");
            } else if constexpr (std::is_same_v<T, ActionCall>) {
                out.insert("expr_call");
                for (const auto& a : node.args)
                    scan_expr(*a, out);
            } else if constexpr (std::is_same_v<T, Unary>) {
                out.insert(node.op == UnaryOp::Neg ? "expr_neg" : "expr_not");
                scan_expr(*node.operand, out);
            } else if constexpr (std::is_same_v<T, BinOp>) {
                switch (node.op) {
                case BinKind::Or: out.insert("expr_or"); break;
                case BinKind::And: out.insert("expr_and"); break;
                case BinKind::Eq: out.insert("expr_eq"); break;
                case BinKind::Ne: out.insert("expr_ne"); break;
                case BinKind::Lt: out.insert("expr_lt"); break;
                case BinKind::Gt: out.insert("expr_gt"); break;
                case BinKind::Add: out.insert("expr_add"); break;
                case BinKind::Sub: out.insert("expr_sub"); break;
                case BinKind::Mul: out.insert("expr_mul"); break;
                case BinKind::Div: out.insert("expr_div"); break;
                }
                // a child of strictly lower precedence can only have been
                // written with parentheses
                int p = expr_prec_of(e);
                if (expr_prec_of(*node.lhs) < p || expr_prec_of(*node.rhs) < p + 1)
                    out.insert("expr_group");
                scan_expr(*node.lhs, out);
                scan_expr(*node.rhs, out);
            } else if constexpr (std::is_same_v<T, ListLit>) {
                out.insert("lit_list");
                for (const auto& it : node.items)
                    scan_expr(*it, out);
            } else if constexpr (std::is_same_v<T, Index>) {
                out.insert("expr_index");
                scan_expr(*node.base, out);
                scan_expr(*node.index, out);
            }
        },
        e.node);
}

inline int expr_prec_of(const Expr& e) {
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
                default: return 6;
                }
            } else if constexpr (std::is_same_v<T, Unary>) {
                return node.op == UnaryOp::Not ? 3 : 7;
            } else if constexpr (std::is_same_v<T, Index>) {
                return 8;
            } else {
                return 9;
            }
        },
        e.node);
}

inline void scan_stmts(const std::vector<Stmt>& body, std::set<std::string>& out);

inline void scan_stmt(const Stmt& s, std::set<std::string>& out) {
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Assign>) {
                out.insert(node.to_here ? "stmt_assign_here" : "stmt_assign");
                scan_expr(*node.value, out);
            } else if constexpr (std::is_same_v<T, Take>) {
                out.insert("stmt_take");
                if (node.edge_type)
                    out.insert("take_edge_filter");
                if (node.node_type)
                    out.insert("take_node_filter");
                switch (node.dir) {
                case Direction::Out: out.insert("take_out"); break;
                case Direction::In: out.insert("take_in"); break;
                case Direction::Both: out.insert("take_both"); break;
                }
            } else if constexpr (std::is_same_v<T, SpawnStmt>) {
                out.insert("stmt_spawn");
                out.insert(node.dir == Direction::Out ? "spawn_out" : "spawn_in");
                out.insert(node.inits.empty() ? "spawn_empty_inits" : "spawn_with_inits");
                for (const auto& [k, v] : node.inits)
                    scan_expr(*v, out);
            } else if constexpr (std::is_same_v<T, If>) {
                out.insert("stmt_if");
                if (!node.else_body.empty())
                    out.insert("if_else");
                scan_expr(*node.cond, out);
                scan_stmts(node.then_body, out);
                scan_stmts(node.else_body, out);
            } else if constexpr (std::is_same_v<T, ForIn>) {
                out.insert("stmt_forin");
                scan_expr(*node.iterable, out);
                scan_stmts(node.body, out);
            } else if constexpr (std::is_same_v<T, Report>) {
                out.insert("stmt_report");
                scan_expr(*node.value, out);
            } else if constexpr (std::is_same_v<T, Disengage>) {
                out.insert("stmt_disengage");
            } else if constexpr (std::is_same_v<T, ExprStmt>) {
                out.insert("stmt_expr");
                scan_expr(*node.value, out);
            }
        },
        s.node);
}

inline void scan_stmts(const std::vector<Stmt>& body, std::set<std::string>& out) {
    for (const auto& s : body)
        scan_stmt(s, out);
}

} // namespace detail

inline std::set<std::string> program_features(const std::string& source, const Program& prog) {
    std::set<std::string> out;
    if (source.find("//") != std::string::npos)
        out.insert("comment");
    if (source.find('\\') != std::string::npos)
        out.insert("str_escape");
    for (const auto& n : prog.node_decls) {
        out.insert("node_decl");
        if (n.access_walkers)
            out.insert("access_clause");
        if (!n.has_fields.empty())
            out.insert("has_decl");
        if (!n.can_actions.empty())
            out.insert("can_decl_node");
    }
    for (const auto& e : prog.edge_decls) {
        out.insert("edge_decl");
        if (!e.has_fields.empty())
            out.insert("has_decl");
    }
    for (const auto& w : prog.walker_decls) {
        out.insert("walker_decl");
        if (!w.has_fields.empty())
            out.insert("has_decl");
        if (!w.can_actions.empty())
            out.insert("can_decl_walker");
        detail::scan_stmts(w.body, out);
    }
    return out;
}

// --- corpus driver ---

struct CorpusEntry {
    std::string name;
    std::string mode; // run | error | roundtrip
    std::string fingerprint;
    std::string walker;
    ObjectId start_node = 0;
    ContextValue args = make_object();
};

inline std::vector<CorpusEntry> load_corpus_manifest(const std::string& dir) {
    ContextValue m = load_json_file(dir + "/manifest.json");
    std::vector<CorpusEntry> out;
    for (const auto& j : m.at("entries")) {
        CorpusEntry e;
        e.name = j.at("name").get<std::string>();
        e.mode = j.at("mode").get<std::string>();
        e.fingerprint = j.value("fingerprint", std::string());
        e.walker = j.value("walker", std::string());
        e.start_node = j.value("start_node", ObjectId{0});
        e.args = j.value("args", make_object());
        out.push_back(std::move(e));
    }
    return out;
}

struct CorpusResult {
    std::size_t checked = 0;
    std::vector<std::string> failures;
    bool ok() const { return failures.empty(); }
};

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrKind::IoFailure, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void register_corpus_actions(ActionRegistry& reg) {
    ActionSpec c;
    c.name = "concat";
    c.impl = builtin_concat;
    c.profile_args = {ContextValue("a"), ContextValue("b")};
    reg.register_action(std::move(c));
    ActionSpec s;
    s.name = "summarize";
    s.impl = builtin_summarize;
    s.profile_args = {ContextValue("First part. Second part.")};
    reg.register_action(std::move(s));
    ActionSpec y;
    y.name = "synth";
    y.impl = builtin_synth;
    y.profile_args = {ContextValue(0), ContextValue(8)};
    reg.register_action(std::move(y));
}

// Parses, round-trips, fingerprints, and (for run/error entries) executes
// every corpus entry against its seeded store and golden. The update
// flags rewrite fingerprints or goldens in place instead of comparing;
// they are separate so refreshing fingerprints can never silently
// replace a golden.
inline CorpusResult corpus_check(const std::string& dir, const std::string& workdir,
                                 bool update_fingerprints = false,
                                 bool update_goldens = false) {
    CorpusResult res;
    std::vector<CorpusEntry> entries = load_corpus_manifest(dir);
    std::set<std::string> seen_features;
    ContextValue new_manifest = make_object();
    new_manifest["entries"] = ContextValue::array();
    auto fail = [&](const std::string& name, const std::string& what) {
        res.failures.push_back(name + ": " + what);
    };
    for (auto& e : entries) {
        ++res.checked;
        std::string jac_path = dir + "/" + e.name + ".jac";
        std::string source;
        Program prog;
        std::string printed;
        try {
            source = read_text_file(jac_path);
            prog = parse(source);
            printed = Printer::print(prog);
            Program again = parse(printed);
            if (!(again == prog)) {
                fail(e.name, "print/parse round trip changed the tree");
                continue;
            }
            if (Printer::print(again) != printed) {
                fail(e.name, "printing is not idempotent");
                continue;
            }
        } catch (const Error& err) {
            fail(e.name, std::string("parse: ") + err.what());
            continue;
        }
        auto fs = program_features(source, prog);
        seen_features.insert(fs.begin(), fs.end());
        std::string fp = fnv1a64_hex(printed);
        if (update_fingerprints)
            e.fingerprint = fp;
        else if (e.fingerprint != fp)
            fail(e.name, "fingerprint drift: manifest " + e.fingerprint + " vs source " + fp);

        if (e.mode == "run" || e.mode == "error") {
            std::string store = workdir + "/corpus_" + e.name;
            std::filesystem::remove_all(store);
            TierConfig tc;
            tc.store_path = store;
            try {
                Runtime rt(std::move(prog), tc);
                register_corpus_actions(rt.actions());
                std::string seed_path = dir + "/" + e.name + ".store.json";
                if (std::filesystem::exists(seed_path))
                    rt.seed_file(seed_path);
                std::string golden_path = dir + "/" + e.name + ".golden.json";
                if (e.mode == "run") {
                    RunOutcome out = rt.run_walker(e.walker, e.start_node, e.args);
                    ContextValue got = make_object();
                    got["report"] = out.report;
                    if (update_goldens) {
                        std::ofstream g(golden_path, std::ios::trunc);
                        g << got.dump(4) << '\n';
                    } else {
                        ContextValue want = load_json_file(golden_path);
                        if (canonical_bytes(want) != canonical_bytes(got))
                            fail(e.name, "report mismatch: want " + canonical_bytes(want) +
                                             " got " + canonical_bytes(got));
                    }
                } else {
                    bool threw = false;
                    ContextValue got = make_object();
                    try {
                        rt.run_walker(e.walker, e.start_node, e.args);
                    } catch (const Error& err) {
                        threw = true;
                        ContextValue ej = make_object();
                        ej["kind"] = err_kind_name(err.kind);
                        if (!err.name.empty())
                            ej["walker"] = err.name;
                        if (!err.node_type.empty())
                            ej["node_type"] = err.node_type;
                        got["error"] = ej;
                    }
                    if (!threw) {
                        fail(e.name, "expected an error, run succeeded");
                    } else if (update_goldens) {
                        std::ofstream g(golden_path, std::ios::trunc);
                        g << got.dump(4) << '\n';
                    } else {
                        ContextValue want = load_json_file(golden_path);
                        if (canonical_bytes(want) != canonical_bytes(got))
                            fail(e.name, "error mismatch: want " + canonical_bytes(want) +
                                             " got " + canonical_bytes(got));
                    }
                }
            } catch (const Error& err) {
                fail(e.name, std::string("run: ") + err.what());
            }
        } else if (e.mode != "roundtrip") {
            fail(e.name, "unknown mode '" + e.mode + "'");
        }
        ContextValue mj = make_object();
        mj["name"] = e.name;
        mj["mode"] = e.mode;
        if (!e.walker.empty()) {
            mj["walker"] = e.walker;
            mj["start_node"] = e.start_node;
            mj["args"] = e.args;
        }
        mj["fingerprint"] = e.fingerprint;
        new_manifest["entries"].push_back(mj);
    }
    for (const auto& f : all_grammar_features())
        if (!seen_features.count(f))
            res.failures.push_back("coverage: no corpus file exercises " + f);
    if (update_fingerprints) {
        std::ofstream m(dir + "/manifest.json", std::ios::trunc);
        if (!m)
            throw Error(ErrKind::IoFailure, "cannot rewrite corpus manifest");
        m << new_manifest.dump(4) << '\n';
    }
    return res;
}

} // namespace jacette

#endif
