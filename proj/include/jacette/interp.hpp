// Copyright 2026 the Jacette developers
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#ifndef JACETTE_INTERP_HPP
#define JACETTE_INTERP_HPP

#include <atomic>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "jacette/graph.hpp"
#include "jacette/parser.hpp"

namespace jacette {

// Dispatch hook for action calls. The walker engine stays decoupled from
// how an action executes (in-process or remote); it only sees a name, the
// evaluated arguments, and the resulting value or a thrown Error.
using ActionFn =
    std::function<ContextValue(const std::string& name, const std::vector<ContextValue>& args)>;

enum class WalkerStatus { Running, Disengaged, Finished, Failed };

inline const char* walker_status_name(WalkerStatus s) {
    switch (s) {
    case WalkerStatus::Running: return "running";
    case WalkerStatus::Disengaged: return "disengaged";
    case WalkerStatus::Finished: return "finished";
    case WalkerStatus::Failed: return "failed";
    }
    return "?";
}

// One traversal in flight. Holds its declaration by value: registry
// updates after spawn never touch a running instance.
struct WalkerInstance {
    std::shared_ptr<const WalkerDecl> decl;
    ContextValue state = make_object(); // declared has_fields only
    std::deque<ObjectId> queue;
    std::set<ObjectId> seen;    // enqueued at least once
    std::set<ObjectId> visited; // body executed
    ObjectId current = kNullId;
    WalkerStatus status = WalkerStatus::Running;
    std::vector<ContextValue> report;
};

// Name -> declaration map with copy-on-write snapshots. Readers grab the
// current snapshot without blocking writers; an install or removal swaps
// in a fresh map and bumps the version.
class WalkerRegistry {
  public:
    using Snapshot = std::map<std::string, std::shared_ptr<const WalkerDecl>>;

    WalkerRegistry() : snap_(std::make_shared<const Snapshot>()) {}

    void install(WalkerDecl decl) {
        std::lock_guard lk(write_mx_);
        auto next = std::make_shared<Snapshot>(*load());
        std::string name = decl.name;
        (*next)[name] = std::make_shared<const WalkerDecl>(std::move(decl));
        std::atomic_store_explicit(&snap_, std::shared_ptr<const Snapshot>(std::move(next)),
                                   std::memory_order_release);
        version_.fetch_add(1, std::memory_order_relaxed);
    }

    void remove(const std::string& name) {
        std::lock_guard lk(write_mx_);
        auto cur = load();
        if (!cur->count(name))
            throw Error(ErrKind::UnknownWalker, "walker '" + name + "' is not registered")
                .with_name(name);
        auto next = std::make_shared<Snapshot>(*cur);
        next->erase(name);
        std::atomic_store_explicit(&snap_, std::shared_ptr<const Snapshot>(std::move(next)),
                                   std::memory_order_release);
        version_.fetch_add(1, std::memory_order_relaxed);
    }

    std::shared_ptr<const WalkerDecl> find(const std::string& name) const {
        auto cur = load();
        auto it = cur->find(name);
        return it == cur->end() ? nullptr : it->second;
    }

    std::vector<std::string> names() const {
        auto cur = load();
        std::vector<std::string> out;
        out.reserve(cur->size());
        for (const auto& [n, _] : *cur)
            out.push_back(n);
        return out;
    }

    std::uint64_t version() const { return version_.load(std::memory_order_relaxed); }

  private:
    std::shared_ptr<const Snapshot> load() const {
        return std::atomic_load_explicit(&snap_, std::memory_order_acquire);
    }

    mutable std::shared_ptr<const Snapshot> snap_;
    std::mutex write_mx_;
    std::atomic<std::uint64_t> version_{0};
};

// Validates that source declares exactly one walker, resolves it against
// the live program's types, and installs it. Atomic with respect to
// readers; running instances are unaffected.
inline std::string inject_walker(WalkerRegistry& registry, const ResolveEnv& env,
                                 const std::string& source) {
    WalkerDecl decl = parse_single_walker(source);
    env.check_walker(decl);
    std::string name = decl.name;
    registry.install(std::move(decl));
    return name;
}

inline void remove_walker(WalkerRegistry& registry, const std::string& name) {
    registry.remove(name);
}

// Executes walker bodies over a graph. The evaluation scope is exactly:
// the instance's own state, loop variables, and fields of the node the
// walker currently sits on. Nothing else is reachable from the grammar.
class WalkerEngine {
  public:
    WalkerEngine(Graph& graph, ActionFn actions)
        : graph_(graph), actions_(std::move(actions)) {}

    WalkerInstance spawn(const WalkerRegistry& registry, const std::string& name, ObjectId start,
                         const ContextValue& args) const {
        auto decl = registry.find(name);
        if (!decl)
            throw Error(ErrKind::UnknownWalker, "walker '" + name + "' is not registered")
                .with_name(name);
        graph_.node_type_of(start); // NotFound if the start id is dangling

        WalkerInstance inst;
        inst.decl = decl;
        for (const auto& f : decl->has_fields)
            inst.state[f] = nullptr;
        if (!args.is_null()) {
            if (!args.is_object())
                throw Error(ErrKind::InvalidArgument, "walker args must be an object");
            for (auto it = args.begin(); it != args.end(); ++it) {
                if (!inst.state.contains(it.key()))
                    throw Error(ErrKind::UndeclaredField,
                                "walker '" + name + "' has no field '" + it.key() + "'")
                        .with_name(it.key());
                inst.state[it.key()] = it.value();
            }
        }
        inst.queue.push_back(start);
        inst.seen.insert(start);
        return inst;
    }

    // Breadth-first run to completion. The commit point for everything the
    // walker touched is the successful (or disengaged) end of the run; a
    // failed run leaves the working set uncommitted.
    std::vector<ContextValue> run(WalkerInstance& inst) const {
        if (inst.status != WalkerStatus::Running)
            throw Error(ErrKind::InvalidArgument,
                        std::string("walker instance is not runnable (status ") +
                            walker_status_name(inst.status) + ")");
        try {
            while (!inst.queue.empty()) {
                ObjectId id = inst.queue.front();
                inst.queue.pop_front();
                NodeRecord node = graph_.node_snapshot(id);
                check_access(node, *inst.decl);
                inst.current = id;
                inst.visited.insert(id);
                if (exec_block(inst, inst.decl->body) == Signal::Disengaged) {
                    inst.queue.clear();
                    inst.status = WalkerStatus::Disengaged;
                    break;
                }
            }
        } catch (...) {
            inst.status = WalkerStatus::Failed;
            throw;
        }
        if (inst.status == WalkerStatus::Running)
            inst.status = WalkerStatus::Finished;
        graph_.commit();
        return inst.report;
    }

  private:
    enum class Signal { Normal, Disengaged };

    struct Scope {
        std::string name;
        ContextValue value;
    };

    static void check_access(const NodeRecord& node, const WalkerDecl& decl) {
        if (!node.access_list)
            return;
        if (node.access_list->count(decl.name))
            return;
        Error e(ErrKind::AccessDenied, "walker '" + decl.name +
                                           "' is not allowed to visit node type '" +
                                           node.type_name + "'");
        e.with_name(decl.name);
        e.node_type = node.type_name;
        throw e;
    }

    Signal exec_block(WalkerInstance& inst, const std::vector<Stmt>& body) const {
        for (const Stmt& s : body)
            if (exec_stmt(inst, s) == Signal::Disengaged)
                return Signal::Disengaged;
        return Signal::Normal;
    }

    Signal exec_stmt(WalkerInstance& inst, const Stmt& s) const {
        return std::visit(
            [&](const auto& node) -> Signal {
                using T = std::decay_t<decltype(node)>;
                if constexpr (std::is_same_v<T, Assign>) {
                    ContextValue v = eval(inst, node.value);
                    if (node.to_here)
                        graph_.set_field(inst.current, node.name, v);
                    else if (ContextValue* slot = find_scope(node.name))
                        *slot = std::move(v); // unreachable: resolution rejects it
                    else
                        inst.state[node.name] = std::move(v);
                    return Signal::Normal;
                } else if constexpr (std::is_same_v<T, Take>) {
                    exec_take(inst, node);
                    return Signal::Normal;
                } else if constexpr (std::is_same_v<T, SpawnStmt>) {
                    exec_spawn(inst, node);
                    return Signal::Normal;
                } else if constexpr (std::is_same_v<T, If>) {
                    if (truthy(eval(inst, node.cond)))
                        return exec_block(inst, node.then_body);
                    return exec_block(inst, node.else_body);
                } else if constexpr (std::is_same_v<T, ForIn>) {
                    ContextValue seq = eval(inst, node.iterable);
                    if (!seq.is_array())
                        throw Error(ErrKind::RuntimeTypeError,
                                    "for-in expects a list, got " + value_type_name(seq));
                    scopes_.push_back({node.var, nullptr});
                    for (const auto& item : seq) {
                        scopes_.back().value = item;
                        if (exec_block(inst, node.body) == Signal::Disengaged) {
                            scopes_.pop_back();
                            return Signal::Disengaged;
                        }
                    }
                    scopes_.pop_back();
                    return Signal::Normal;
                } else if constexpr (std::is_same_v<T, Report>) {
                    inst.report.push_back(eval(inst, node.value));
                    return Signal::Normal;
                } else if constexpr (std::is_same_v<T, Disengage>) {
                    return Signal::Disengaged;
                } else {
                    static_assert(std::is_same_v<T, ExprStmt>);
                    eval(inst, node.value);
                    return Signal::Normal;
                }
            },
            s.node);
    }

    void exec_take(WalkerInstance& inst, const Take& t) const {
        auto hits = graph_.neighbors(inst.current, t.dir, t.edge_type);
        for (const auto& h : hits) {
            if (inst.seen.count(h.node))
                continue;
            if (t.node_type && graph_.node_type_of(h.node) != *t.node_type)
                continue;
            inst.seen.insert(h.node);
            inst.queue.push_back(h.node);
        }
    }

    void exec_spawn(WalkerInstance& inst, const SpawnStmt& sp) const {
        ContextValue ctx = make_object();
        for (const auto& [field, value] : sp.inits)
            ctx[field] = eval(inst, value);
        ObjectId fresh = graph_.create_node(sp.node_type, ctx);
        if (sp.dir == Direction::Out)
            graph_.create_edge(sp.edge_type, inst.current, fresh, make_object());
        else
            graph_.create_edge(sp.edge_type, fresh, inst.current, make_object());
    }

    ContextValue* find_scope(const std::string& name) const {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it)
            if (it->name == name)
                return &it->value;
        return nullptr;
    }

    ContextValue eval(WalkerInstance& inst, const ExprPtr& e) const {
        return std::visit(
            [&](const auto& node) -> ContextValue {
                using T = std::decay_t<decltype(node)>;
                if constexpr (std::is_same_v<T, Literal>) {
                    return node.value;
                } else if constexpr (std::is_same_v<T, NameRef>) {
                    if (const ContextValue* slot = find_scope(node.name))
                        return *slot;
                    return inst.state.at(node.name);
                } else if constexpr (std::is_same_v<T, HereField>) {
                    return graph_.get_field(inst.current, node.name);
                } else if constexpr (std::is_same_v<T, ActionCall>) {
                    return eval_call(inst, node, e->line);
                } else if constexpr (std::is_same_v<T, Unary>) {
                    return eval_unary(inst, node, e->line);
                } else if constexpr (std::is_same_v<T, BinOp>) {
                    return eval_binop(inst, node, e->line);
                } else if constexpr (std::is_same_v<T, ListLit>) {
                    ContextValue out = ContextValue::array();
                    for (const auto& item : node.items)
                        out.push_back(eval(inst, item));
                    return out;
                } else {
                    static_assert(std::is_same_v<T, Index>);
                    return eval_index(inst, node, e->line);
                }
            },
            e->node);
    }

    ContextValue eval_call(WalkerInstance& inst, const ActionCall& call, int line) const {
        // Runtime whitelist: the walker's own can-list plus the can-list
        // of the node the walker currently sits on.
        bool allowed = std::count(inst.decl->can_actions.begin(), inst.decl->can_actions.end(),
                                  call.name) > 0;
        if (!allowed) {
            const NodeType& nt = graph_.schema().node_type(graph_.node_type_of(inst.current));
            allowed = std::count(nt.can_actions.begin(), nt.can_actions.end(), call.name) > 0;
        }
        if (!allowed)
            throw Error(ErrKind::UnknownAction,
                        "action '" + call.name + "' is not callable here: not in walker '" +
                            inst.decl->name + "' can list or the current node's can list")
                .at(line, 0)
                .with_name(call.name);
        std::vector<ContextValue> args;
        args.reserve(call.args.size());
        for (const auto& a : call.args)
            args.push_back(eval(inst, a));
        return actions_(call.name, args);
    }

    [[noreturn]] static void type_fault(const std::string& what, int line) {
        Error e(ErrKind::RuntimeTypeError, what);
        e.at(line, 0);
        throw e;
    }

    static bool truthy(const ContextValue& v) {
        if (v.is_null())
            return false;
        if (v.is_boolean())
            return v.get<bool>();
        if (v.is_number_integer())
            return v.get<std::int64_t>() != 0;
        if (v.is_number_float())
            return v.get<double>() != 0.0;
        if (v.is_string())
            return !v.get_ref<const std::string&>().empty();
        return !v.empty(); // arrays and objects
    }

    ContextValue eval_unary(WalkerInstance& inst, const Unary& u, int line) const {
        ContextValue v = eval(inst, u.operand);
        if (u.op == UnaryOp::Not)
            return !truthy(v);
        if (v.is_number_integer())
            return -v.get<std::int64_t>();
        if (v.is_number_float())
            return -v.get<double>();
        type_fault("cannot negate " + value_type_name(v), line);
    }

    static bool both_numbers(const ContextValue& a, const ContextValue& b) {
        return a.is_number() && b.is_number();
    }
    static bool either_float(const ContextValue& a, const ContextValue& b) {
        return a.is_number_float() || b.is_number_float();
    }

    ContextValue eval_binop(WalkerInstance& inst, const BinOp& op, int line) const {
        if (op.op == BinKind::And) {
            ContextValue l = eval(inst, op.lhs);
            if (!truthy(l))
                return false;
            return truthy(eval(inst, op.rhs));
        }
        if (op.op == BinKind::Or) {
            ContextValue l = eval(inst, op.lhs);
            if (truthy(l))
                return true;
            return truthy(eval(inst, op.rhs));
        }
        ContextValue a = eval(inst, op.lhs);
        ContextValue b = eval(inst, op.rhs);
        switch (op.op) {
        case BinKind::Eq: return a == b;
        case BinKind::Ne: return !(a == b);
        case BinKind::Lt:
        case BinKind::Gt: {
            bool lt = op.op == BinKind::Lt;
            if (both_numbers(a, b)) {
                if (!either_float(a, b)) {
                    auto x = a.get<std::int64_t>(), y = b.get<std::int64_t>();
                    return lt ? x < y : x > y;
                }
                double x = a.get<double>(), y = b.get<double>();
                return lt ? x < y : x > y;
            }
            if (a.is_string() && b.is_string()) {
                const auto &x = a.get_ref<const std::string&>(), &y = b.get_ref<const std::string&>();
                return lt ? x < y : x > y;
            }
            type_fault("cannot order " + value_type_name(a) + " and " + value_type_name(b), line);
        }
        case BinKind::Add:
            if (both_numbers(a, b)) {
                if (!either_float(a, b))
                    return a.get<std::int64_t>() + b.get<std::int64_t>();
                return a.get<double>() + b.get<double>();
            }
            if (a.is_string() && b.is_string())
                return a.get<std::string>() + b.get<std::string>();
            if (a.is_array() && b.is_array()) {
                ContextValue out = a;
                for (const auto& item : b)
                    out.push_back(item);
                return out;
            }
            type_fault("cannot add " + value_type_name(a) + " and " + value_type_name(b), line);
        case BinKind::Sub:
        case BinKind::Mul:
        case BinKind::Div: {
            if (!both_numbers(a, b))
                type_fault("arithmetic needs numbers, got " + value_type_name(a) + " and " +
                               value_type_name(b),
                           line);
            if (op.op == BinKind::Div) {
                if ((b.is_number_integer() && b.get<std::int64_t>() == 0) ||
                    (b.is_number_float() && b.get<double>() == 0.0))
                    type_fault("division by zero", line);
            }
            if (!either_float(a, b)) {
                auto x = a.get<std::int64_t>(), y = b.get<std::int64_t>();
                switch (op.op) {
                case BinKind::Sub: return x - y;
                case BinKind::Mul: return x * y;
                default: return x / y;
                }
            }
            double x = a.get<double>(), y = b.get<double>();
            switch (op.op) {
            case BinKind::Sub: return x - y;
            case BinKind::Mul: return x * y;
            default: return x / y;
            }
        }
        default: break;
        }
        type_fault("unsupported operator", line);
    }

    ContextValue eval_index(WalkerInstance& inst, const Index& ix, int line) const {
        ContextValue base = eval(inst, ix.base);
        ContextValue idx = eval(inst, ix.index);
        if (!idx.is_number_integer())
            type_fault("index must be an integer, got " + value_type_name(idx), line);
        auto i = idx.get<std::int64_t>();
        if (base.is_array()) {
            if (i < 0 || static_cast<std::size_t>(i) >= base.size())
                type_fault("list index " + std::to_string(i) + " out of range for length " +
                               std::to_string(base.size()),
                           line);
            return base[static_cast<std::size_t>(i)];
        }
        if (base.is_string()) {
            const auto& s = base.get_ref<const std::string&>();
            if (i < 0 || static_cast<std::size_t>(i) >= s.size())
                type_fault("string index " + std::to_string(i) + " out of range for length " +
                               std::to_string(s.size()),
                           line);
            return std::string(1, s[static_cast<std::size_t>(i)]);
        }
        type_fault("cannot index " + value_type_name(base), line);
    }

    Graph& graph_;
    ActionFn actions_;
    // Loop-variable scopes for the run currently executing on this thread.
    // An engine instance is confined to one run at a time; concurrent runs
    // each use their own engine.
    mutable std::vector<Scope> scopes_;
};

} // namespace jacette

#endif
