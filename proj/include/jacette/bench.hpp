// Copyright 2026 the Jacette developers
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#ifndef JACETTE_BENCH_HPP
#define JACETTE_BENCH_HPP

#include <filesystem>
#include <random>

#include "jacette/jsorc.hpp"
#include "jacette/runtime.hpp"

namespace jacette {

enum class RequestKind { Create, Walk, Action };

inline const char* request_kind_name(RequestKind k) {
    switch (k) {
    case RequestKind::Create: return "create";
    case RequestKind::Walk: return "walk";
    default: return "action";
    }
}

struct WorkloadSpec {
    double create_weight = 0.2;
    double walk_weight = 0.8;
    double action_weight = 0.0;
    std::size_t clients = 1;
    double duration_s = 2.0;
    // Optional request cap; 0 means run on duration alone. With a cap and
    // one client the request sequence is exactly reproducible.
    std::size_t max_requests = 0;
    std::uint64_t graph_seed = 1;
    std::size_t graph_size = 200;  // day nodes in the seeded chain
    std::size_t chain_fanout = 3;  // task leaves per day node

    void validate() const {
        double sum = create_weight + walk_weight + action_weight;
        if (create_weight < 0 || walk_weight < 0 || action_weight < 0 ||
            std::abs(sum - 1.0) > 1e-6)
            throw Error(ErrKind::InvalidArgument,
                        "workload mix weights must be non-negative and sum to 1");
        if (clients < 1)
            throw Error(ErrKind::InvalidArgument, "workload needs at least one client");
        if (duration_s <= 0 && max_requests == 0)
            throw Error(ErrKind::InvalidArgument,
                        "workload needs a positive duration or a request cap");
        if (graph_size < 1)
            throw Error(ErrKind::InvalidArgument, "workload graph needs at least one day node");
    }

    static WorkloadSpec from_json(const ContextValue& j) {
        WorkloadSpec s;
        s.create_weight = j.value("create_weight", s.create_weight);
        s.walk_weight = j.value("walk_weight", s.walk_weight);
        s.action_weight = j.value("action_weight", s.action_weight);
        s.clients = j.value("clients", s.clients);
        s.duration_s = j.value("duration_s", s.duration_s);
        s.max_requests = j.value("max_requests", s.max_requests);
        s.graph_seed = j.value("graph_seed", s.graph_seed);
        s.graph_size = j.value("graph_size", s.graph_size);
        s.chain_fanout = j.value("chain_fanout", s.chain_fanout);
        s.validate();
        return s;
    }
};

// One program covers all three request kinds. The graph is a per-user
// chain of day nodes with task leaves; walks sum task values downstream
// of a day, creates branch a fresh day plus tasks off an existing day,
// and the action walker calls every registered action once.
inline std::string bench_program_source(std::size_t n_actions) {
    std::string actions_can, actions_body;
    for (std::size_t i = 0; i < n_actions; ++i) {
        std::string name = "a" + std::to_string(i);
        actions_can += "    can " + name + ";\n";
        actions_body += "    x = " + name + "();\n";
    }
    std::string src;
    src += "node user {\n    has name, value;\n}\n\n";
    src += "node day {\n    has date, value;\n}\n\n";
    src += "node task {\n    has title, value, done;\n}\n\n";
    src += "edge first_day {}\n\nedge next {}\n\nedge has_task {}\n\n";
    src += "walker walk_sum {\n"
           "    has total;\n"
           "    if total == null {\n        total = 0;\n    }\n"
           "    total = total + here.value;\n"
           "    report total;\n"
           "    take -->;\n"
           "}\n\n";
    src += "walker create_day {\n"
           "    has date, tvals, created;\n"
           "    if created == null {\n"
           "        created = 1;\n"
           "        spawn here ++>:next day { date = date; value = 0; };\n"
           "        take -->:next;\n"
           "    } else {\n"
           "        for v in tvals {\n"
           "            spawn here ++>:has_task task { title = date; value = v; done = false; };\n"
           "        }\n"
           "    }\n"
           "}\n";
    if (n_actions > 0) {
        src += "\nwalker act_all {\n    has x;\n";
        src += actions_can;
        src += actions_body;
        src += "    report x;\n}\n";
    }
    return src;
}

// Seeds the chain; returns the day node ids in chain order.
inline std::vector<ObjectId> build_bench_graph(Graph& g, const WorkloadSpec& spec) {
    std::mt19937_64 rng(spec.graph_seed);
    std::vector<ObjectId> days;
    days.reserve(spec.graph_size);
    ContextValue uctx = make_object();
    uctx["name"] = "user0";
    uctx["value"] = 0;
    ObjectId user = g.create_node("user", uctx);
    for (std::size_t i = 0; i < spec.graph_size; ++i) {
        ContextValue dctx = make_object();
        dctx["date"] = "day" + std::to_string(i);
        dctx["value"] = 0;
        ObjectId day = g.create_node("day", dctx);
        days.push_back(day);
        if (i == 0)
            g.create_edge("first_day", user, day, make_object());
        else
            g.create_edge("next", days[i - 1], day, make_object());
        for (std::size_t t = 0; t < spec.chain_fanout; ++t) {
            ContextValue tctx = make_object();
            tctx["title"] = "t" + std::to_string(i) + "_" + std::to_string(t);
            tctx["value"] = static_cast<std::int64_t>(rng() % 10);
            tctx["done"] = (rng() % 2) == 0;
            ObjectId task = g.create_node("task", tctx);
            g.create_edge("has_task", day, task, make_object());
        }
    }
    g.commit();
    return days;
}

struct BenchSample {
    RequestKind kind = RequestKind::Walk;
    double latency_us = 0;
    bool ok = true;
    bool steady = true; // false while the orchestrator is mid-evaluation
    // Orchestrator epochs completed when the request was issued; steady
    // segments additionally require >= 1 so the warmup before the first
    // decision never counts as steady state.
    std::uint64_t epochs_done = 0;
    // Per-request counter deltas; only populated on single-client runs.
    std::uint64_t objects_fetched = 0;
    std::uint64_t store_reads = 0;
    std::uint64_t cache_hits = 0;
};

struct BenchRunResult {
    std::vector<BenchSample> samples;
    double elapsed_s = 0;
    StoreStats counters_delta;
    std::uint64_t errors = 0;
};

// Closed-loop clients: each thread issues its next request as soon as
// the previous one completes. Per-client RNG streams are derived from
// the workload seed, so the request sequence of client k is independent
// of every other client and of wall time.
inline BenchRunResult run_closed_loop(Runtime& rt, const WorkloadSpec& spec,
                                      const std::vector<ObjectId>& days,
                                      const Orchestrator* orc = nullptr) {
    spec.validate();
    StoreStats before = rt.graph().stats();
    auto t0 = std::chrono::steady_clock::now();
    auto deadline = t0 + std::chrono::duration<double>(spec.duration_s);
    bool per_request_counters = spec.clients == 1;
    std::vector<std::vector<BenchSample>> per_client(spec.clients);
    std::vector<std::thread> threads;
    std::atomic<std::uint64_t> errors{0};
    for (std::size_t c = 0; c < spec.clients; ++c) {
        threads.emplace_back([&, c] {
            std::mt19937_64 rng(spec.graph_seed * 1000003 + c);
            std::discrete_distribution<int> pick_kind(
                {spec.create_weight, spec.walk_weight, spec.action_weight});
            std::vector<BenchSample>& out = per_client[c];
            std::size_t budget = spec.max_requests == 0
                                     ? std::numeric_limits<std::size_t>::max()
                                     : spec.max_requests / spec.clients +
                                           (c < spec.max_requests % spec.clients ? 1 : 0);
            std::uint64_t creates = 0;
            while (budget > 0) {
                if (spec.max_requests == 0 && std::chrono::steady_clock::now() >= deadline)
                    break;
                --budget;
                int k = pick_kind(rng);
                RequestKind kind = k == 0   ? RequestKind::Create
                                   : k == 1 ? RequestKind::Walk
                                            : RequestKind::Action;
                ObjectId start = days[rng() % days.size()];
                std::string walker;
                ContextValue args = make_object();
                switch (kind) {
                case RequestKind::Create: {
                    walker = "create_day";
                    args["date"] = "c" + std::to_string(c) + "_" + std::to_string(creates++);
                    ContextValue tv = ContextValue::array();
                    for (std::size_t t = 0; t < spec.chain_fanout; ++t)
                        tv.push_back(static_cast<std::int64_t>(rng() % 10));
                    args["tvals"] = tv;
                    break;
                }
                case RequestKind::Walk:
                    walker = "walk_sum";
                    break;
                case RequestKind::Action:
                    walker = "act_all";
                    break;
                }
                BenchSample s;
                s.kind = kind;
                s.steady = !(orc && orc->in_evaluation());
                s.epochs_done = orc ? orc->epochs_completed() : 0;
                StoreStats pre;
                if (per_request_counters)
                    pre = rt.graph().stats();
                auto r0 = std::chrono::steady_clock::now();
                try {
                    rt.run_walker(walker, start, args);
                } catch (const Error&) {
                    s.ok = false;
                    errors.fetch_add(1);
                }
                s.latency_us = std::chrono::duration<double, std::micro>(
                                   std::chrono::steady_clock::now() - r0)
                                   .count();
                if (per_request_counters) {
                    StoreStats post = rt.graph().stats();
                    s.objects_fetched = post.objects_fetched - pre.objects_fetched;
                    s.store_reads = post.store_reads - pre.store_reads;
                    s.cache_hits = post.cache_hits - pre.cache_hits;
                }
                out.push_back(s);
            }
        });
    }
    for (auto& t : threads)
        t.join();
    BenchRunResult res;
    res.elapsed_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    StoreStats after = rt.graph().stats();
    res.counters_delta.objects_fetched = after.objects_fetched - before.objects_fetched;
    res.counters_delta.store_reads = after.store_reads - before.store_reads;
    res.counters_delta.cache_hits = after.cache_hits - before.cache_hits;
    res.counters_delta.store_writes = after.store_writes - before.store_writes;
    res.counters_delta.evictions = after.evictions - before.evictions;
    res.errors = errors.load();
    for (auto& v : per_client)
        for (auto& s : v)
            res.samples.push_back(s);
    return res;
}

// --- CSV output, RFC 4180 ---

inline std::string csv_escape(const std::string& cell) {
    if (cell.find_first_of(",\"\r\n") == std::string::npos)
        return cell;
    std::string out = "\"";
    for (char ch : cell) {
        if (ch == '"')
            out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path) {
        if (!out_)
            throw Error(ErrKind::IoFailure, "cannot open csv output: " + path);
        row(header);
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i)
                out_ << ',';
            out_ << csv_escape(cells[i]);
        }
        out_ << "\r\n";
        out_.flush();
    }

  private:
    std::ofstream out_;
};

inline std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

// One fixed column set across every bench so downstream tooling never
// has to sniff schemas; cells that do not apply stay empty.
inline const std::vector<std::string>& bench_csv_header() {
    static const std::vector<std::string> h = {
        "scenario",   "policy",  "label",   "config_mask",     "fusion_threshold",
        "kind",       "count",   "qps",     "mean_us",         "p99_us",
        "norm_qps",   "norm_mean_us",       "norm_p99_us",     "objects_fetched",
        "store_reads", "cache_hits",        "store_writes",    "errors"};
    return h;
}

struct BenchRow {
    std::string scenario, policy, label, config_mask, fusion_threshold, kind;
    std::size_t count = 0;
    double qps = 0, mean_us = 0, p99_us = 0;
    std::string norm_qps, norm_mean_us, norm_p99_us;
    std::uint64_t objects_fetched = 0, store_reads = 0, cache_hits = 0, store_writes = 0;
    std::uint64_t errors = 0;

    std::vector<std::string> cells() const {
        return {scenario,
                policy,
                label,
                config_mask,
                fusion_threshold,
                kind,
                std::to_string(count),
                fmt_double(qps),
                fmt_double(mean_us),
                fmt_double(p99_us),
                norm_qps,
                norm_mean_us,
                norm_p99_us,
                std::to_string(objects_fetched),
                std::to_string(store_reads),
                std::to_string(cache_hits),
                std::to_string(store_writes),
                std::to_string(errors)};
    }
};

template <typename Pred>
inline BenchRow summarize_samples(const BenchRunResult& run, Pred&& keep) {
    BenchRow row;
    std::vector<double> lat;
    for (const auto& s : run.samples) {
        if (!keep(s))
            continue;
        ++row.count;
        lat.push_back(s.latency_us);
        row.objects_fetched += s.objects_fetched;
        row.store_reads += s.store_reads;
        row.cache_hits += s.cache_hits;
        if (!s.ok)
            ++row.errors;
    }
    if (!lat.empty()) {
        double sum = 0;
        for (double v : lat)
            sum += v;
        row.mean_us = sum / static_cast<double>(lat.size());
        row.p99_us = percentile(lat, 99.0);
        row.qps = run.elapsed_s > 0 ? static_cast<double>(lat.size()) / run.elapsed_s : 0;
    }
    return row;
}

inline TierConfig bench_tiers(const std::string& store_path, std::uint64_t fast_edge_threshold) {
    TierConfig tc;
    tc.store_path = store_path;
    tc.fast_edge_threshold = fast_edge_threshold;
    std::filesystem::remove_all(store_path);
    return tc;
}

// Paired runs of the identical seeded workload, once with fusion off and
// once per requested threshold; per-kind rows carry the counter deltas.
inline std::vector<BenchRow> bench_fast_edge(const WorkloadSpec& spec,
                                             const std::vector<std::uint64_t>& thresholds,
                                             const std::string& workdir,
                                             const std::string& csv_path = "") {
    spec.validate();
    std::vector<std::uint64_t> all_thresholds{0};
    all_thresholds.insert(all_thresholds.end(), thresholds.begin(), thresholds.end());
    std::vector<BenchRow> rows;
    for (std::uint64_t threshold : all_thresholds) {
        std::string store = workdir + "/fastedge_t" + std::to_string(threshold);
        Runtime rt = Runtime::from_source(bench_program_source(0),
                                          bench_tiers(store, threshold));
        auto days = build_bench_graph(rt.graph(), spec);
        BenchRunResult run = run_closed_loop(rt, spec, days);
        auto add = [&](const std::string& kind, auto&& pred) {
            BenchRow row = summarize_samples(run, pred);
            row.scenario = "fast_edge";
            row.fusion_threshold = std::to_string(threshold);
            row.kind = kind;
            if (kind == "all") {
                row.objects_fetched = run.counters_delta.objects_fetched;
                row.store_reads = run.counters_delta.store_reads;
                row.cache_hits = run.counters_delta.cache_hits;
                row.store_writes = run.counters_delta.store_writes;
                row.errors = run.errors;
            }
            rows.push_back(row);
        };
        add("all", [](const BenchSample&) { return true; });
        for (RequestKind k : {RequestKind::Create, RequestKind::Walk, RequestKind::Action})
            add(request_kind_name(k), [k](const BenchSample& s) { return s.kind == k; });
    }
    if (!csv_path.empty()) {
        CsvWriter csv(csv_path, bench_csv_header());
        for (const auto& r : rows)
            csv.row(r.cells());
    }
    return rows;
}

struct SweepActionParams {
    std::size_t n_actions = 5;
    double compute_ms = 2.0;
    std::uint64_t remote_fixed_us = 4000;
    std::uint64_t mem_footprint_bytes = 1 << 20;
};

inline void register_synth_actions(ActionRegistry& reg, const SweepActionParams& ap) {
    for (std::size_t i = 0; i < ap.n_actions; ++i) {
        ActionSpec s;
        s.name = "a" + std::to_string(i);
        s.mem_footprint_bytes = ap.mem_footprint_bytes;
        double ms = ap.compute_ms;
        s.impl = [ms](const std::vector<ContextValue>&) {
            return builtin_synth({ContextValue(ms), ContextValue(std::int64_t{16})});
        };
        s.delay.remote_fixed_us = ap.remote_fixed_us;
        s.profile_args = {};
        reg.register_action(std::move(s));
    }
}

inline std::vector<ActionProfile> synth_action_profiles(const SweepActionParams& ap) {
    std::vector<ActionProfile> ps;
    for (std::size_t i = 0; i < ap.n_actions; ++i) {
        ActionProfile p;
        p.name = "a" + std::to_string(i);
        p.local_latency_us = ap.compute_ms * 1000.0;
        p.remote_latency_us = ap.compute_ms * 1000.0 + static_cast<double>(ap.remote_fixed_us);
        p.cc = p.remote_latency_us / p.local_latency_us;
        p.mem_footprint_bytes = ap.mem_footprint_bytes;
        ps.push_back(p);
    }
    return ps;
}

inline void bind_static_mask(ActionRegistry& reg, ConfigMask mask, std::uint16_t remote_port) {
    auto names = reg.names();
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (mask >> i & 1)
            reg.rebind(names[i], Binding{BindingKind::Local, "127.0.0.1", 0});
        else
            reg.rebind(names[i], Binding{BindingKind::Remote, "127.0.0.1", remote_port});
    }
}

// Static sweep over every action-placement mask on the identical seeded
// workload, plus per-local-count box statistics over the mean latencies.
inline std::vector<BenchRow> bench_config_sweep(const WorkloadSpec& spec,
                                                const SweepActionParams& ap,
                                                const std::string& workdir,
                                                const std::string& csv_path = "") {
    spec.validate();
    if (ap.n_actions > 12)
        throw Error(ErrKind::InvalidArgument, "config sweep caps at 12 actions (4096 masks)");
    Runtime rt = Runtime::from_source(bench_program_source(ap.n_actions),
                                      bench_tiers(workdir + "/sweep", 128));
    register_synth_actions(rt.actions(), ap);
    auto days = build_bench_graph(rt.graph(), spec);
    auto server = serve_actions(0, rt.actions());
    std::vector<BenchRow> rows;
    std::map<int, std::vector<double>> group_means;
    ConfigMask top = ConfigMask{1} << ap.n_actions;
    for (ConfigMask mask = 0; mask < top; ++mask) {
        bind_static_mask(rt.actions(), mask, server->port());
        BenchRunResult run = run_closed_loop(rt, spec, days);
        BenchRow row = summarize_samples(run, [](const BenchSample&) { return true; });
        row.scenario = "config_sweep";
        row.config_mask = std::to_string(mask);
        row.label = std::to_string(std::popcount(mask)) + "_local";
        row.objects_fetched = run.counters_delta.objects_fetched;
        row.store_reads = run.counters_delta.store_reads;
        row.cache_hits = run.counters_delta.cache_hits;
        row.store_writes = run.counters_delta.store_writes;
        row.errors = run.errors;
        group_means[std::popcount(mask)].push_back(row.mean_us);
        rows.push_back(row);
    }
    server->stop();
    std::vector<BenchRow> group_rows;
    for (auto& [local_count, means] : group_means) {
        std::sort(means.begin(), means.end());
        BenchRow row;
        row.scenario = "sweep_group";
        row.label = std::to_string(local_count) + "_local";
        row.count = means.size();
        row.mean_us = percentile(means, 50.0);
        // box stats ride in the norm columns: min/q1 and q3/max
        row.norm_qps = fmt_double(means.front());
        row.norm_mean_us = fmt_double(percentile(means, 25.0));
        row.norm_p99_us = fmt_double(percentile(means, 75.0));
        row.p99_us = means.back();
        group_rows.push_back(row);
    }
    rows.insert(rows.end(), group_rows.begin(), group_rows.end());
    if (!csv_path.empty()) {
        CsvWriter csv(csv_path, bench_csv_header());
        for (const auto& r : rows)
            csv.row(r.cells());
    }
    return rows;
}

struct OrchestratorBenchParams {
    SweepActionParams actions;
    PolicyParams policy;
    double static_duration_s = 3.0;
    double jsorc_duration_s = 10.0;
};

// Three policies over the identical seeded workload: static all-remote,
// static all-local (the upper bound), and the orchestrator starting from
// all-remote. The orchestrator run is additionally segmented into steady
// and evaluation phases; steady excludes everything before the first
// applied decision.
inline std::vector<BenchRow> bench_orchestrator(const WorkloadSpec& spec,
                                                const OrchestratorBenchParams& op,
                                                const std::string& workdir,
                                                const std::string& csv_path = "",
                                                const std::string& decision_log = "") {
    spec.validate();
    std::vector<BenchRow> rows;
    double base_qps = 0, base_mean = 0, base_p99 = 0;
    auto normalized = [&](BenchRow& row) {
        if (base_qps > 0)
            row.norm_qps = fmt_double(row.qps / base_qps);
        if (row.mean_us > 0 && base_mean > 0)
            row.norm_mean_us = fmt_double(row.mean_us / base_mean);
        if (row.p99_us > 0 && base_p99 > 0)
            row.norm_p99_us = fmt_double(row.p99_us / base_p99);
    };
    auto finish = [&](BenchRow row, const BenchRunResult& run, const std::string& policy,
                      const std::string& label, ConfigMask mask) {
        row.scenario = "orchestrator";
        row.policy = policy;
        row.label = label;
        row.config_mask = std::to_string(mask);
        row.store_writes = run.counters_delta.store_writes;
        row.errors = run.errors;
        normalized(row);
        rows.push_back(row);
    };

    ConfigMask full = (ConfigMask{1} << op.actions.n_actions) - 1;
    WorkloadSpec static_spec = spec;
    static_spec.duration_s = op.static_duration_s;

    for (int which = 0; which < 2; ++which) {
        std::string policy = which == 0 ? "all_remote" : "all_local";
        Runtime rt = Runtime::from_source(bench_program_source(op.actions.n_actions),
                                          bench_tiers(workdir + "/orch_" + policy, 128));
        register_synth_actions(rt.actions(), op.actions);
        auto days = build_bench_graph(rt.graph(), spec);
        auto server = serve_actions(0, rt.actions());
        ConfigMask mask = which == 0 ? 0 : full;
        bind_static_mask(rt.actions(), mask, server->port());
        BenchRunResult run = run_closed_loop(rt, static_spec, days);
        BenchRow row = summarize_samples(run, [](const BenchSample&) { return true; });
        if (which == 0) {
            base_qps = row.qps;
            base_mean = row.mean_us;
            base_p99 = row.p99_us;
        }
        finish(row, run, policy, which == 1 ? "upper bound" : "", mask);
        server->stop();
    }

    {
        Runtime rt = Runtime::from_source(bench_program_source(op.actions.n_actions),
                                          bench_tiers(workdir + "/orch_jsorc", 128));
        register_synth_actions(rt.actions(), op.actions);
        auto days = build_bench_graph(rt.graph(), spec);
        auto profiles = synth_action_profiles(op.actions);
        Orchestrator orc(rt.actions(), rt.metrics(), profiles, op.policy, decision_log);
        orc.start();
        WorkloadSpec jspec = spec;
        jspec.duration_s = op.jsorc_duration_s;
        BenchRunResult run = run_closed_loop(rt, jspec, days, &orc);
        orc.stop();
        BenchRow all = summarize_samples(run, [](const BenchSample&) { return true; });
        finish(all, run, "jsorc", "", orc.current_mask());
        BenchRow steady = summarize_samples(run, [](const BenchSample& s) {
            return s.steady && s.epochs_done >= 1;
        });
        finish(steady, run, "jsorc_steady", "", orc.current_mask());
        BenchRow eval = summarize_samples(run, [](const BenchSample& s) { return !s.steady; });
        finish(eval, run, "jsorc_eval", "", orc.current_mask());
    }

    if (!csv_path.empty()) {
        CsvWriter csv(csv_path, bench_csv_header());
        for (const auto& r : rows)
            csv.row(r.cells());
    }
    return rows;
}

} // namespace jacette

#endif
