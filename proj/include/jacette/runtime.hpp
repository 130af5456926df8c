// Copyright 2026 the Jacette developers
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#ifndef JACETTE_RUNTIME_HPP
#define JACETTE_RUNTIME_HPP

#include "jacette/actions.hpp"
#include "jacette/graph.hpp"
#include "jacette/interp.hpp"
#include "jacette/metrics.hpp"
#include "jacette/parser.hpp"

namespace jacette {

inline Schema schema_from_program(const Program& p) {
    Schema s;
    for (const auto& n : p.node_decls) {
        NodeType t;
        t.name = n.name;
        t.has_fields = n.has_fields;
        if (n.access_walkers)
            t.access = std::set<std::string>(n.access_walkers->begin(), n.access_walkers->end());
        t.can_actions = n.can_actions;
        s.add_node_type(std::move(t));
    }
    for (const auto& e : p.edge_decls) {
        EdgeType t;
        t.name = e.name;
        t.has_fields = e.has_fields;
        s.add_edge_type(std::move(t));
    }
    return s;
}

// Seed format: a JSON list of objects. Node entries {kind:"node", id,
// type, context?} carry explicit ids so programs and goldens can name
// their start nodes; edge entries {kind:"edge", type, src, dst,
// context?} come after all nodes they touch.
inline void seed_graph_from_json(Graph& g, const ContextValue& seed) {
    if (!seed.is_array())
        throw Error(ErrKind::InvalidArgument, "seed graph must be a JSON list");
    for (const auto& entry : seed) {
        if (!entry.is_object() || !entry.contains("kind"))
            throw Error(ErrKind::InvalidArgument, "seed entries need a kind field");
        std::string kind = entry.at("kind").get<std::string>();
        if (kind == "node") {
            g.create_node_with_id(entry.at("id").get<ObjectId>(),
                                  entry.at("type").get<std::string>(),
                                  entry.value("context", make_object()));
        } else if (kind != "edge") {
            throw Error(ErrKind::InvalidArgument, "seed entry kind must be node or edge, got '" +
                                                      kind + "'");
        }
    }
    for (const auto& entry : seed) {
        if (entry.at("kind").get<std::string>() != "edge")
            continue;
        g.create_edge(entry.at("type").get<std::string>(), entry.at("src").get<ObjectId>(),
                      entry.at("dst").get<ObjectId>(), entry.value("context", make_object()));
    }
    g.commit();
}

inline ContextValue load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error(ErrKind::IoFailure, "cannot open " + path);
    return ContextValue::parse(in);
}

struct RunOutcome {
    ContextValue report;
    WalkerStatus status = WalkerStatus::Finished;
    double elapsed_us = 0;
};

// One program loaded over one store: schema, graph, walker registry,
// action dispatch, and metrics under a single lifetime. Walker runs are
// independent engine instances, so concurrent runs only meet at the
// graph and registry boundaries, which handle their own locking.
class Runtime {
  public:
    Runtime(Program program, TierConfig tiers)
        : program_(std::move(program)), env_(ResolveEnv::from(program_)),
          schema_(schema_from_program(program_)), graph_(schema_, std::move(tiers)) {
        for (const auto& w : program_.walker_decls) {
            WalkerDecl copy = w;
            registry_.install(std::move(copy));
        }
    }

    static Runtime from_source(const std::string& source, TierConfig tiers) {
        return Runtime(parse(source), std::move(tiers));
    }

    Graph& graph() { return graph_; }
    ActionRegistry& actions() { return actions_; }
    MetricsRecorder& metrics() { return metrics_; }
    WalkerRegistry& walkers() { return registry_; }
    const ResolveEnv& env() const { return env_; }
    const Program& program() const { return program_; }

    void seed(const ContextValue& seed_json) { seed_graph_from_json(graph_, seed_json); }
    void seed_file(const std::string& path) { seed(load_json_file(path)); }

    RunOutcome run_walker(const std::string& name, ObjectId start,
                          const ContextValue& args = make_object()) {
        auto t0 = std::chrono::steady_clock::now();
        WalkerEngine engine(graph_, [this](const std::string& n,
                                           const std::vector<ContextValue>& a) {
            return actions_.call(n, a);
        });
        WalkerInstance inst = engine.spawn(registry_, name, start, args);
        std::vector<ContextValue> rep = engine.run(inst);
        RunOutcome out;
        out.elapsed_us = std::chrono::duration<double, std::micro>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
        metrics_.record(kEndToEndKey, out.elapsed_us);
        out.report = ContextValue::array();
        for (auto& r : rep)
            out.report.push_back(std::move(r));
        out.status = inst.status;
        return out;
    }

    // Hot installation of one walker declaration; live runs keep their
    // snapshot, new spawns see the new walker.
    std::string inject(const std::string& source) {
        return inject_walker(registry_, env_, source);
    }

    void remove(const std::string& name) { remove_walker(registry_, name); }

  private:
    Program program_;
    ResolveEnv env_;
    Schema schema_;
    Graph graph_;
    MetricsRecorder metrics_;
    ActionRegistry actions_{&metrics_};
    WalkerRegistry registry_;
};

} // namespace jacette

#endif
