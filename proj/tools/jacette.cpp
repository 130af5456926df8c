// Copyright 2026 the jacette authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or
// implied. See the License for the specific language governing
// permissions and limitations under the License.

// Single entry-point binary. Subcommands: run, serve, serve-actions,
// bench {fastedge, sweep, jsorc}, orchestrate, corpus. Every flag is
// mirrored by a JACETTE_* environment variable; a JSON config file can
// supply values for flags not given on the command line, so precedence
// is flags > file > defaults. Exit codes: 0 success, 1 program error,
// 2 usage error.

#include <CLI11.hpp>

#include <jacette/bench.hpp>
#include <jacette/corpus.hpp>
#include <jacette/http_service.hpp>
#include <jacette/jsorc.hpp>
#include <jacette/runtime.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace {

using namespace jacette;

// Values for flags absent from the command line may come from a JSON
// config file ({"store": "...", "cache_capacity": 64, ...}). Applied
// after parsing, so explicit flags always win.
struct FileOverlay {
    ContextValue data = make_object();

    void load(const std::string& path) {
        data = load_json_file(path);
        if (!data.is_object())
            throw Error(ErrKind::InvalidArgument, "config file must hold a JSON object");
    }

    template <typename T>
    void apply(const CLI::Option* opt, const char* key, T& var) const {
        if (opt != nullptr && opt->count() > 0)
            return;
        if (!data.contains(key))
            return;
        var = data.at(key).get<T>();
    }
};

// Tier flags shared by run and serve. The store path defaults to a
// scratch directory so one-off runs need no setup.
struct TierFlags {
    std::string store;
    std::size_t cache_capacity = 1024;
    std::uint64_t fast_edge_threshold = 128;
    CLI::Option* store_opt = nullptr;
    CLI::Option* cache_opt = nullptr;
    CLI::Option* threshold_opt = nullptr;

    void attach(CLI::App* cmd) {
        store_opt = cmd->add_option("--store", store, "Object store directory")
                        ->envname("JACETTE_STORE");
        cache_opt = cmd->add_option("--cache-capacity", cache_capacity,
                                    "Cache tier capacity in objects")
                        ->envname("JACETTE_CACHE_CAPACITY");
        threshold_opt = cmd->add_option("--fast-edge-threshold", fast_edge_threshold,
                                        "Edge fusion threshold in bytes; 0 disables")
                            ->envname("JACETTE_FAST_EDGE_THRESHOLD");
    }

    void overlay(const FileOverlay& file) {
        file.apply(store_opt, "store", store);
        file.apply(cache_opt, "cache_capacity", cache_capacity);
        file.apply(threshold_opt, "fast_edge_threshold", fast_edge_threshold);
    }

    TierConfig tiers(const std::string& fallback) const {
        TierConfig tc;
        tc.cache_capacity = cache_capacity;
        tc.fast_edge_threshold = static_cast<std::size_t>(fast_edge_threshold);
        tc.store_path = store.empty() ? fallback : store;
        return tc;
    }
};

// Workload flags shared by the bench subcommands.
struct WorkloadFlags {
    WorkloadSpec spec;
    CLI::Option* clients_opt = nullptr;
    CLI::Option* duration_opt = nullptr;
    CLI::Option* requests_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* size_opt = nullptr;
    CLI::Option* fanout_opt = nullptr;
    CLI::Option* create_opt = nullptr;
    CLI::Option* walk_opt = nullptr;
    CLI::Option* action_opt = nullptr;

    void attach(CLI::App* cmd) {
        clients_opt = cmd->add_option("--clients", spec.clients, "Closed-loop client count")
                          ->envname("JACETTE_CLIENTS");
        duration_opt = cmd->add_option("--duration", spec.duration_s, "Run duration in seconds")
                           ->envname("JACETTE_DURATION");
        requests_opt = cmd->add_option("--requests", spec.max_requests,
                                       "Request cap across clients; 0 means duration only")
                           ->envname("JACETTE_REQUESTS");
        seed_opt = cmd->add_option("--seed", spec.graph_seed, "Workload and graph seed")
                       ->envname("JACETTE_SEED");
        size_opt = cmd->add_option("--graph-size", spec.graph_size, "Day nodes in the seeded chain")
                       ->envname("JACETTE_GRAPH_SIZE");
        fanout_opt = cmd->add_option("--fanout", spec.chain_fanout, "Task leaves per day node")
                         ->envname("JACETTE_FANOUT");
        create_opt = cmd->add_option("--create-weight", spec.create_weight,
                                     "Fraction of create_day requests")
                         ->envname("JACETTE_CREATE_WEIGHT");
        walk_opt = cmd->add_option("--walk-weight", spec.walk_weight,
                                   "Fraction of walk_sum requests")
                       ->envname("JACETTE_WALK_WEIGHT");
        action_opt = cmd->add_option("--action-weight", spec.action_weight,
                                     "Fraction of act_all requests")
                         ->envname("JACETTE_ACTION_WEIGHT");
    }

    void overlay(const FileOverlay& file) {
        file.apply(clients_opt, "clients", spec.clients);
        file.apply(duration_opt, "duration_s", spec.duration_s);
        file.apply(requests_opt, "max_requests", spec.max_requests);
        file.apply(seed_opt, "graph_seed", spec.graph_seed);
        file.apply(size_opt, "graph_size", spec.graph_size);
        file.apply(fanout_opt, "chain_fanout", spec.chain_fanout);
        file.apply(create_opt, "create_weight", spec.create_weight);
        file.apply(walk_opt, "walk_weight", spec.walk_weight);
        file.apply(action_opt, "action_weight", spec.action_weight);
    }
};

std::string scratch_dir(const std::string& leaf) {
    auto base = std::filesystem::temp_directory_path() / "jacette" / leaf;
    std::filesystem::create_directories(base);
    return base.string();
}

// Manifest entries first (they may customize a builtin), then any
// builtin the manifest did not mention.
void register_actions(ActionRegistry& reg, const std::string& manifest_path) {
    if (!manifest_path.empty())
        for (auto& s : load_manifest_file(manifest_path))
            reg.register_action(std::move(s));
    if (!reg.has("concat")) {
        ActionSpec s;
        s.name = "concat";
        s.impl = builtin_concat;
        s.profile_args = {ContextValue("a"), ContextValue("b")};
        reg.register_action(std::move(s));
    }
    if (!reg.has("summarize")) {
        ActionSpec s;
        s.name = "summarize";
        s.impl = builtin_summarize;
        s.profile_args = {ContextValue("profile sample. tail")};
        reg.register_action(std::move(s));
    }
    if (!reg.has("synth")) {
        ActionSpec s;
        s.name = "synth";
        s.impl = builtin_synth;
        s.profile_args = {ContextValue(0.0), ContextValue(std::int64_t{1})};
        reg.register_action(std::move(s));
    }
}

// Signal-driven shutdown for the serving commands. The handler only
// flips a flag; the serving thread polls it.
std::atomic<bool> g_stop{false};

void handle_signal(int) { g_stop.store(true); }

void install_signal_handlers() {
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
}

int run_command(const std::string& program_path, const std::string& walker, ObjectId start,
                const std::string& args_json, const std::string& seed_store,
                const std::string& manifest_path, const TierFlags& tf) {
    Runtime rt(parse(read_text_file(program_path)), tf.tiers(scratch_dir("run")));
    register_actions(rt.actions(), manifest_path);
    if (!seed_store.empty())
        rt.seed_file(seed_store);
    ContextValue args = args_json.empty() ? make_object() : ContextValue::parse(args_json);
    RunOutcome out = rt.run_walker(walker, start, args);
    std::cout << canonical_bytes(out.report) << "\n";
    return 0;
}

struct JsorcFlags {
    bool enabled = false;
    std::uint64_t epoch_interval_ms = 2000;
    std::size_t eval_window = 20;
    std::int64_t mem_budget = std::numeric_limits<std::int64_t>::max();
    std::string objective = "avg_latency";
    std::string profile_file;
    std::string decision_log;
    std::size_t trials = 5;
    CLI::Option* budget_opt = nullptr;

    void attach(CLI::App* cmd, bool with_toggle) {
        if (with_toggle)
            cmd->add_flag("--jsorc", enabled, "Start the orchestrator")
                ->envname("JACETTE_JSORC");
        cmd->add_option("--epoch-interval", epoch_interval_ms, "Orchestrator epoch interval in ms")
            ->envname("JACETTE_EPOCH_INTERVAL");
        cmd->add_option("--eval-window", eval_window, "Requests sampled per candidate config")
            ->envname("JACETTE_EVAL_WINDOW");
        budget_opt = cmd->add_option("--mem-budget", mem_budget,
                                     "Device memory budget in bytes for local actions")
                         ->envname("JACETTE_MEM_BUDGET");
        cmd->add_option("--objective", objective, "avg_latency, p99 or throughput")
            ->envname("JACETTE_OBJECTIVE");
        cmd->add_option("--profile-file", profile_file,
                        "Action profile JSON; reused when present, else written after analysis")
            ->envname("JACETTE_PROFILE_FILE");
        cmd->add_option("--decision-log", decision_log, "Orchestrator decision log (JSON lines)")
            ->envname("JACETTE_DECISION_LOG");
        cmd->add_option("--trials", trials, "Profiling trials per action")
            ->envname("JACETTE_TRIALS");
    }

    PolicyParams params() const {
        PolicyParams p;
        p.epoch_interval = std::chrono::milliseconds(epoch_interval_ms);
        p.eval_window = eval_window;
        p.memory_budget_bytes = mem_budget;
        p.objective = parse_objective(objective);
        return p;
    }
};

// Profiles come from the profile file when it exists; otherwise each
// action is measured against a throwaway in-process server and the
// result is persisted for the next start.
std::vector<ActionProfile> obtain_profiles(ActionRegistry& reg, const JsorcFlags& jf) {
    if (!jf.profile_file.empty() && std::filesystem::exists(jf.profile_file))
        return load_profiles(jf.profile_file);
    auto server = serve_actions(0, reg);
    auto profiles = analyze_application(reg, jf.trials, "127.0.0.1", server->port());
    if (!jf.profile_file.empty())
        write_profiles_atomic(jf.profile_file, profiles);
    return profiles;
}

int serve_command(const std::string& program_path, std::uint16_t port,
                  const std::string& seed_store, const std::string& manifest_path,
                  const TierFlags& tf, const JsorcFlags& jf) {
    Runtime rt(parse(read_text_file(program_path)), tf.tiers(scratch_dir("serve")));
    register_actions(rt.actions(), manifest_path);
    if (!seed_store.empty())
        rt.seed_file(seed_store);

    std::unique_ptr<Orchestrator> orc;
    if (jf.enabled) {
        auto profiles = obtain_profiles(rt.actions(), jf);
        orc = std::make_unique<Orchestrator>(rt.actions(), rt.metrics(), std::move(profiles),
                                             jf.params(), jf.decision_log);
        orc->start();
    }

    HttpService svc(rt, orc.get());
    if (!svc.bind("0.0.0.0", port))
        throw Error(ErrKind::BindFailure, "cannot bind port " + std::to_string(port));
    install_signal_handlers();
    std::thread server([&] { svc.serve_after_bind(); });
    svc.wait_until_ready();
    std::cerr << "jacette serving on port " << port << "\n";
    while (!g_stop.load() && svc.is_running())
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
    svc.stop();
    server.join();
    if (orc)
        orc->stop();
    return 0;
}

int serve_actions_command(std::uint16_t port, const std::string& manifest_path) {
    MetricsRecorder metrics;
    ActionRegistry reg(&metrics);
    register_actions(reg, manifest_path);
    auto server = serve_actions(port, reg);
    install_signal_handlers();
    std::cerr << "jacette actions on port " << server->port() << "\n";
    while (!g_stop.load())
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
    return 0;
}

int orchestrate_command(const std::string& manifest_path, const JsorcFlags& jf) {
    MetricsRecorder metrics;
    ActionRegistry reg(&metrics);
    if (manifest_path.empty())
        throw Error(ErrKind::InvalidArgument, "orchestrate needs --actions-manifest");
    for (auto& s : load_manifest_file(manifest_path))
        reg.register_action(std::move(s));
    auto profiles = obtain_profiles(reg, jf);

    // One-shot solve from the measured profiles: score each feasible
    // mask with the separable latency model and report the choice.
    PolicyParams params = jf.params();
    auto candidates =
        candidate_masks(profiles, params.memory_budget_bytes, params.max_exhaustive_bits);
    std::vector<ScoredMask> scored;
    for (ConfigMask mask : candidates.masks) {
        double total = 0;
        for (std::size_t i = 0; i < profiles.size(); ++i)
            total += (mask >> i & 1) ? profiles[i].local_latency_us
                                     : profiles[i].remote_latency_us;
        scored.push_back({mask, total / std::max<std::size_t>(profiles.size(), 1)});
    }
    ConfigMask best = pick_best(scored, objective_maximizes(params.objective),
                                params.tie_threshold);
    ContextValue out = make_object();
    out["config_mask"] = best;
    out["candidates"] = scored.size();
    out["greedy_fallback"] = candidates.greedy;
    ContextValue locals = ContextValue::array();
    for (std::size_t i = 0; i < profiles.size(); ++i)
        if (best >> i & 1)
            locals.push_back(profiles[i].name);
    out["local_actions"] = locals;
    std::cout << canonical_bytes(out) << "\n";
    return 0;
}

std::vector<std::uint64_t> parse_threshold_list(const std::string& csv) {
    std::vector<std::uint64_t> out;
    std::stringstream ss(csv);
    std::string cell;
    while (std::getline(ss, cell, ','))
        if (!cell.empty())
            out.push_back(std::stoull(cell));
    if (out.empty())
        throw Error(ErrKind::InvalidArgument, "threshold list is empty");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"jacette: a data-spatial graph runtime"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "JSON config file; flags given explicitly win")
        ->envname("JACETTE_CONFIG");

    // run
    auto* run = app.add_subcommand("run", "Run one walker over a store and print its report");
    std::string run_program, run_walker, run_args, run_seed_store, run_manifest;
    ObjectId run_start = 0;
    run->add_option("program", run_program, "Program source file")
        ->required()
        ->check(CLI::ExistingFile);
    auto* run_walker_opt = run->add_option("--walker", run_walker, "Walker to spawn")
                               ->envname("JACETTE_WALKER");
    auto* run_start_opt = run->add_option("--start", run_start, "Start node id")
                              ->envname("JACETTE_START");
    run->add_option("--args", run_args, "Walker arguments as a JSON object")
        ->envname("JACETTE_ARGS");
    run->add_option("--seed-store", run_seed_store, "Seed graph JSON loaded before the run")
        ->envname("JACETTE_SEED_STORE");
    run->add_option("--actions-manifest", run_manifest, "Extra actions (JSON manifest)")
        ->envname("JACETTE_ACTIONS_MANIFEST");
    TierFlags run_tiers;
    run_tiers.attach(run);

    // serve
    auto* serve = app.add_subcommand("serve", "Serve the walker HTTP API");
    std::string serve_program, serve_seed_store, serve_manifest;
    std::uint16_t serve_port = 8000;
    serve->add_option("program", serve_program, "Program source file")
        ->required()
        ->check(CLI::ExistingFile);
    auto* serve_port_opt =
        serve->add_option("--port", serve_port, "Listen port")->envname("JACETTE_PORT");
    serve->add_option("--seed-store", serve_seed_store, "Seed graph JSON loaded at startup")
        ->envname("JACETTE_SEED_STORE");
    serve->add_option("--actions-manifest", serve_manifest, "Extra actions (JSON manifest)")
        ->envname("JACETTE_ACTIONS_MANIFEST");
    TierFlags serve_tiers;
    serve_tiers.attach(serve);
    JsorcFlags serve_jsorc;
    serve_jsorc.attach(serve, true);

    // serve-actions
    auto* sa = app.add_subcommand("serve-actions", "Serve actions over the wire protocol");
    std::string sa_manifest;
    std::uint16_t sa_port = 0;
    auto* sa_port_opt = sa->add_option("--port", sa_port, "Listen port; 0 picks one")
                            ->envname("JACETTE_PORT");
    sa->add_option("--actions-manifest", sa_manifest, "Actions to serve (JSON manifest)")
        ->envname("JACETTE_ACTIONS_MANIFEST");

    // bench
    auto* bench = app.add_subcommand("bench", "Benchmark scenarios; writes CSV files");
    bench->require_subcommand(1);
    std::string bench_out = ".";
    bench->add_option("--out", bench_out, "Output directory for CSV files")
        ->envname("JACETTE_OUT");

    auto* fe = bench->add_subcommand("fastedge", "Latency and fetch counters vs fusion threshold");
    std::string fe_thresholds = "128";
    fe->add_option("--thresholds", fe_thresholds, "Comma-separated fusion thresholds in bytes")
        ->envname("JACETTE_THRESHOLDS");
    WorkloadFlags fe_load;
    fe_load.attach(fe);

    auto* sw = bench->add_subcommand("sweep", "Latency across all local/remote action configs");
    std::size_t sw_actions = 5;
    double sw_compute_ms = 2.0;
    std::uint64_t sw_remote_us = 4000;
    sw->add_option("--actions", sw_actions, "Synthetic action count (max 12)")
        ->envname("JACETTE_ACTIONS");
    sw->add_option("--compute-ms", sw_compute_ms, "Per-call compute time in ms")
        ->envname("JACETTE_COMPUTE_MS");
    sw->add_option("--remote-delay-us", sw_remote_us, "Injected remote transport delay in us")
        ->envname("JACETTE_REMOTE_DELAY_US");
    WorkloadFlags sw_load;
    sw_load.spec.create_weight = 0.2;
    sw_load.spec.walk_weight = 0.3;
    sw_load.spec.action_weight = 0.5;
    sw_load.attach(sw);

    auto* bj = bench->add_subcommand("jsorc", "Orchestrator vs static all-remote and all-local");
    std::size_t bj_actions = 3;
    double bj_compute_ms = 2.0;
    std::uint64_t bj_remote_us = 4000;
    double bj_static_s = 3.0;
    bj->add_option("--actions", bj_actions, "Synthetic action count (max 12)")
        ->envname("JACETTE_ACTIONS");
    bj->add_option("--compute-ms", bj_compute_ms, "Per-call compute time in ms")
        ->envname("JACETTE_COMPUTE_MS");
    bj->add_option("--remote-delay-us", bj_remote_us, "Injected remote transport delay in us")
        ->envname("JACETTE_REMOTE_DELAY_US");
    bj->add_option("--static-duration", bj_static_s, "Duration of each static phase in seconds")
        ->envname("JACETTE_STATIC_DURATION");
    WorkloadFlags bj_load;
    bj_load.spec.create_weight = 0.1;
    bj_load.spec.walk_weight = 0.2;
    bj_load.spec.action_weight = 0.7;
    bj_load.spec.duration_s = 10.0;
    bj_load.attach(bj);
    JsorcFlags bj_jsorc;
    bj_jsorc.epoch_interval_ms = 500;
    bj_jsorc.attach(bj, false);

    // orchestrate
    auto* orch = app.add_subcommand(
        "orchestrate", "Profile an action manifest and solve for the best config");
    std::string orch_manifest;
    orch->add_option("--actions-manifest", orch_manifest, "Actions to profile (JSON manifest)")
        ->envname("JACETTE_ACTIONS_MANIFEST");
    JsorcFlags orch_jsorc;
    orch_jsorc.attach(orch, false);

    // corpus
    auto* corpus = app.add_subcommand("corpus", "Check the shipped program corpus against goldens");
    std::string corpus_dir = "corpus";
    std::string corpus_workdir;
    bool regen_fp = false, regen_gold = false;
    corpus->add_option("--dir", corpus_dir, "Corpus directory")->envname("JACETTE_DIR");
    corpus->add_option("--workdir", corpus_workdir, "Scratch directory for corpus stores")
        ->envname("JACETTE_WORKDIR");
    corpus->add_flag("--regen-fingerprints", regen_fp, "Rewrite manifest fingerprints")
        ->envname("JACETTE_REGEN_FINGERPRINTS");
    corpus->add_flag("--regen-goldens", regen_gold, "Rewrite golden outputs from current behavior")
        ->envname("JACETTE_REGEN_GOLDENS");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        FileOverlay file;
        if (!config_path.empty())
            file.load(config_path);

        if (*run) {
            run_tiers.overlay(file);
            file.apply(run_walker_opt, "walker", run_walker);
            file.apply(run_start_opt, "start", run_start);
            if (run_walker.empty()) {
                std::cerr << "--walker is required (flag, JACETTE_WALKER or config file)\n";
                return 2;
            }
            return run_command(run_program, run_walker, run_start, run_args, run_seed_store,
                               run_manifest, run_tiers);
        }
        if (*serve) {
            serve_tiers.overlay(file);
            file.apply(serve_port_opt, "port", serve_port);
            file.apply(serve_jsorc.budget_opt, "mem_budget", serve_jsorc.mem_budget);
            return serve_command(serve_program, serve_port, serve_seed_store, serve_manifest,
                                 serve_tiers, serve_jsorc);
        }
        if (*sa) {
            file.apply(sa_port_opt, "port", sa_port);
            return serve_actions_command(sa_port, sa_manifest);
        }
        if (*bench) {
            std::filesystem::create_directories(bench_out);
            if (*fe) {
                fe_load.overlay(file);
                auto rows = bench_fast_edge(fe_load.spec, parse_threshold_list(fe_thresholds),
                                            scratch_dir("bench_fastedge"));
                // Two files: run-level counters, then per-request-kind rows.
                CsvWriter overall(bench_out + "/fastedge_overall.csv", bench_csv_header());
                CsvWriter by_kind(bench_out + "/fastedge_by_kind.csv", bench_csv_header());
                for (const auto& row : rows)
                    (row.kind == "all" ? overall : by_kind).row(row.cells());
                std::cerr << "wrote " << bench_out << "/fastedge_overall.csv and "
                          << bench_out << "/fastedge_by_kind.csv\n";
                return 0;
            }
            if (*sw) {
                sw_load.overlay(file);
                SweepActionParams ap;
                ap.n_actions = sw_actions;
                ap.compute_ms = sw_compute_ms;
                ap.remote_fixed_us = sw_remote_us;
                bench_config_sweep(sw_load.spec, ap, scratch_dir("bench_sweep"),
                                   bench_out + "/sweep.csv");
                std::cerr << "wrote " << bench_out << "/sweep.csv\n";
                return 0;
            }
            if (*bj) {
                bj_load.overlay(file);
                file.apply(bj_jsorc.budget_opt, "mem_budget", bj_jsorc.mem_budget);
                OrchestratorBenchParams op;
                op.actions.n_actions = bj_actions;
                op.actions.compute_ms = bj_compute_ms;
                op.actions.remote_fixed_us = bj_remote_us;
                op.policy = bj_jsorc.params();
                op.static_duration_s = bj_static_s;
                op.jsorc_duration_s = bj_load.spec.duration_s;
                bench_orchestrator(bj_load.spec, op, scratch_dir("bench_jsorc"),
                                   bench_out + "/orchestrator.csv",
                                   bench_out + "/decisions.jsonl");
                std::cerr << "wrote " << bench_out << "/orchestrator.csv\n";
                return 0;
            }
        }
        if (*orch)
            return orchestrate_command(orch_manifest, orch_jsorc);
        if (*corpus) {
            std::string work = corpus_workdir.empty() ? scratch_dir("corpus") : corpus_workdir;
            CorpusResult res = corpus_check(corpus_dir, work, regen_fp, regen_gold);
            for (const auto& f : res.failures)
                std::cerr << "FAIL " << f << "\n";
            std::cout << "checked " << res.checked << " entries, " << res.failures.size()
                      << " failures\n";
            return res.ok() ? 0 : 1;
        }
        return 2;
    } catch (const Error& e) {
        ContextValue err = make_object();
        err["error"] = std::string(e.what());
        err["kind"] = err_kind_name(e.kind);
        if (!e.name.empty())
            err["walker"] = e.name;
        if (!e.node_type.empty())
            err["node_type"] = e.node_type;
        std::cerr << canonical_bytes(err) << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
