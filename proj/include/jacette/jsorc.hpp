// Copyright 2026 the Jacette developers
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#ifndef JACETTE_JSORC_HPP
#define JACETTE_JSORC_HPP

#include <atomic>
#include <bit>
#include <condition_variable>
#include <cstdio>
#include <optional>
#include <thread>

#include "jacette/actions.hpp"

namespace jacette {

// A componentization config is one bitmask over the registry's action
// order: bit i set means action i runs in-process (Local), clear means
// over the wire (Remote).
using ConfigMask = std::uint64_t;

enum class Objective { AvgLatency, P99, Throughput };

inline const char* objective_name(Objective o) {
    switch (o) {
    case Objective::AvgLatency: return "avg_latency";
    case Objective::P99: return "p99";
    default: return "throughput";
    }
}

inline Objective parse_objective(const std::string& s) {
    if (s == "avg_latency")
        return Objective::AvgLatency;
    if (s == "p99")
        return Objective::P99;
    if (s == "throughput")
        return Objective::Throughput;
    throw Error(ErrKind::InvalidArgument,
                "objective must be avg_latency, p99, or throughput, got '" + s + "'");
}

inline bool objective_maximizes(Objective o) { return o == Objective::Throughput; }

struct PolicyParams {
    std::chrono::milliseconds epoch_interval{2000};
    // Completed end-to-end requests observed per candidate config.
    std::size_t eval_window = 20;
    // Bytes available for locally hosted actions. All-remote costs zero,
    // so any budget >= 0 has at least one feasible config.
    std::int64_t memory_budget_bytes = std::numeric_limits<std::int64_t>::max();
    Objective objective = Objective::AvgLatency;
    // Above this many actions the solver stops enumerating 2^n configs.
    std::size_t max_exhaustive_bits = 12;
    // Configs scoring within this fraction of the best count as tied;
    // ties fall to fewer local bits, then the lower mask. Damps config
    // thrashing on measurement noise.
    double tie_threshold = 0.02;
    // Cap on waiting for eval_window samples under one candidate, so a
    // traffic lull cannot wedge the evaluation phase.
    std::chrono::milliseconds candidate_timeout{3000};
};

inline std::uint64_t mask_footprint(const std::vector<ActionProfile>& profiles, ConfigMask mask) {
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < profiles.size(); ++i)
        if (mask >> i & 1)
            total += profiles[i].mem_footprint_bytes;
    return total;
}

inline bool mask_feasible(const std::vector<ActionProfile>& profiles, ConfigMask mask,
                          std::int64_t budget) {
    if (budget < 0)
        return false;
    return mask_footprint(profiles, mask) <= static_cast<std::uint64_t>(budget);
}

// All masks whose local footprint fits the budget, ascending. Budget < 0
// admits nothing, not even all-remote, and is the caller's error.
inline std::vector<ConfigMask> feasible_masks(const std::vector<ActionProfile>& profiles,
                                              std::int64_t budget) {
    if (budget < 0)
        throw Error(ErrKind::NoFeasibleConfig,
                    "memory budget is negative; no config fits, not even all-remote");
    if (profiles.size() > 32)
        throw Error(ErrKind::InvalidArgument, "config enumeration supports at most 32 actions");
    std::vector<ConfigMask> out;
    ConfigMask top = ConfigMask{1} << profiles.size();
    for (ConfigMask m = 0; m < top; ++m)
        if (mask_feasible(profiles, m, budget))
            out.push_back(m);
    return out;
}

struct CandidateSet {
    std::vector<ConfigMask> masks;
    // True when the 2^n enumeration was skipped for size and the masks
    // are the greedy localize-highest-cc-first prefix chain instead.
    bool greedy = false;
};

inline CandidateSet candidate_masks(const std::vector<ActionProfile>& profiles,
                                    std::int64_t budget, std::size_t max_exhaustive_bits) {
    if (budget < 0)
        throw Error(ErrKind::NoFeasibleConfig,
                    "memory budget is negative; no config fits, not even all-remote");
    CandidateSet cs;
    if (profiles.size() <= max_exhaustive_bits && profiles.size() <= 32) {
        cs.masks = feasible_masks(profiles, budget);
        return cs;
    }
    if (profiles.size() > 64)
        throw Error(ErrKind::InvalidArgument, "config mask supports at most 64 actions");
    cs.greedy = true;
    std::vector<std::size_t> by_cc(profiles.size());
    for (std::size_t i = 0; i < by_cc.size(); ++i)
        by_cc[i] = i;
    std::stable_sort(by_cc.begin(), by_cc.end(), [&](std::size_t a, std::size_t b) {
        return profiles[a].cc > profiles[b].cc;
    });
    ConfigMask mask = 0;
    std::uint64_t spent = 0;
    cs.masks.push_back(mask);
    for (std::size_t i : by_cc) {
        std::uint64_t cost = profiles[i].mem_footprint_bytes;
        if (spent + cost > static_cast<std::uint64_t>(budget))
            continue;
        spent += cost;
        mask |= ConfigMask{1} << i;
        cs.masks.push_back(mask);
    }
    return cs;
}

struct ScoredMask {
    ConfigMask mask = 0;
    double score = 0;
};

// Winner selection with the tie rule: gather everything within
// tie_threshold of the best score, then prefer fewer local bits, then
// the lower mask value.
inline ConfigMask pick_best(const std::vector<ScoredMask>& scored, bool maximize,
                            double tie_threshold) {
    if (scored.empty())
        throw Error(ErrKind::InvalidArgument, "no scored configs to choose from");
    double best = scored[0].score;
    for (const auto& s : scored)
        best = maximize ? std::max(best, s.score) : std::min(best, s.score);
    std::vector<ScoredMask> tied;
    for (const auto& s : scored) {
        bool in = maximize ? s.score >= best - tie_threshold * std::abs(best)
                           : s.score <= best + tie_threshold * std::abs(best);
        if (in)
            tied.push_back(s);
    }
    auto better = [](const ScoredMask& a, const ScoredMask& b) {
        int pa = std::popcount(a.mask), pb = std::popcount(b.mask);
        if (pa != pb)
            return pa < pb;
        return a.mask < b.mask;
    };
    ScoredMask winner = tied[0];
    for (const auto& s : tied)
        if (better(s, winner))
            winner = s;
    return winner.mask;
}

// --- profile persistence ---

inline std::vector<ActionProfile> analyze_application(const ActionRegistry& registry,
                                                      std::size_t trials, const std::string& host,
                                                      std::uint16_t port) {
    std::vector<ActionProfile> out;
    for (const auto& name : registry.names())
        out.push_back(registry.profile(name, trials, host, port));
    return out;
}

// Temp-and-rename so readers never observe a partial file.
inline void write_profiles_atomic(const std::string& path,
                                  const std::vector<ActionProfile>& profiles) {
    ContextValue arr = ContextValue::array();
    for (const auto& p : profiles)
        arr.push_back(p.to_json());
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out)
            throw Error(ErrKind::IoFailure, "cannot write profile file: " + tmp);
        out << arr.dump(2) << '\n';
        out.flush();
        if (!out)
            throw Error(ErrKind::IoFailure, "short write to profile file: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw Error(ErrKind::IoFailure, "cannot move profile file into place: " + path);
    }
}

inline std::vector<ActionProfile> analyze_and_persist(const ActionRegistry& registry,
                                                      std::size_t trials, const std::string& host,
                                                      std::uint16_t port,
                                                      const std::string& path) {
    auto profiles = analyze_application(registry, trials, host, port);
    write_profiles_atomic(path, profiles);
    return profiles;
}

inline std::vector<ActionProfile> load_profiles(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error(ErrKind::IoFailure, "cannot open profile file: " + path);
    ContextValue arr = ContextValue::parse(in);
    if (!arr.is_array())
        throw Error(ErrKind::InvalidArgument, "profile file must hold a JSON list");
    std::vector<ActionProfile> out;
    for (const auto& j : arr)
        out.push_back(ActionProfile::from_json(j));
    return out;
}

// Remote-host lifecycle for actions, standing in for an external pod
// scheduler. Default mode spawns one in-process wire server per action
// on an ephemeral port; fixed mode points every action at one external
// endpoint and owns nothing.
class EndpointManager {
  public:
    explicit EndpointManager(const ActionRegistry& registry) : registry_(&registry) {}
    EndpointManager(const ActionRegistry& registry, std::string host, std::uint16_t port)
        : registry_(&registry), fixed_host_(std::move(host)), fixed_port_(port) {}

    ~EndpointManager() {
        purge_retired();
        std::lock_guard lk(mx_);
        for (auto& [name, srv] : servers_)
            srv->stop();
        servers_.clear();
    }

    bool fixed() const { return fixed_port_ != 0; }
    std::string host() const { return fixed() ? fixed_host_ : "127.0.0.1"; }

    std::uint16_t ensure(const std::string& name) {
        if (fixed())
            return fixed_port_;
        std::lock_guard lk(mx_);
        auto it = servers_.find(name);
        if (it != servers_.end())
            return it->second->port();
        auto srv = serve_actions(0, *registry_);
        std::uint16_t port = srv->port();
        servers_.emplace(name, std::move(srv));
        return port;
    }

    // Retires rather than stops: in-flight calls dispatched on the old
    // binding snapshot may still dial this endpoint for a moment. The
    // retired server drains until the next purge.
    void release(const std::string& name) {
        if (fixed())
            return;
        std::lock_guard lk(mx_);
        auto it = servers_.find(name);
        if (it == servers_.end())
            return;
        retired_.push_back(std::move(it->second));
        servers_.erase(it);
    }

    void purge_retired() {
        std::vector<std::unique_ptr<ActionServer>> drop;
        {
            std::lock_guard lk(mx_);
            drop.swap(retired_);
        }
        for (auto& srv : drop)
            srv->stop();
    }

    std::size_t active_count() const {
        std::lock_guard lk(mx_);
        return servers_.size();
    }

    std::size_t retired_count() const {
        std::lock_guard lk(mx_);
        return retired_.size();
    }

  private:
    const ActionRegistry* registry_;
    std::string fixed_host_;
    std::uint16_t fixed_port_ = 0;
    mutable std::mutex mx_;
    std::map<std::string, std::unique_ptr<ActionServer>> servers_;
    std::vector<std::unique_ptr<ActionServer>> retired_;
};

// Background controller: each epoch it walks the feasible configs under
// live traffic, scores each over eval_window completed requests, applies
// the winner, and logs every step. Failures are logged and the last good
// config stays in force; nothing in here may take the service down.
class Orchestrator {
  public:
    // Lower-is-better unless the objective maximizes; nullopt = no data.
    using Scorer = std::function<std::optional<double>(ConfigMask)>;
    using Applier = std::function<void(ConfigMask)>;

    Orchestrator(ActionRegistry& registry, MetricsRecorder& metrics,
                 std::vector<ActionProfile> profiles, PolicyParams params,
                 std::string decision_log_path = "",
                 std::unique_ptr<EndpointManager> endpoints = nullptr)
        : registry_(registry), metrics_(metrics), params_(params),
          log_path_(std::move(decision_log_path)) {
        order_ = registry_.names();
        profiles_.reserve(order_.size());
        for (const auto& name : order_) {
            auto it = std::find_if(profiles.begin(), profiles.end(),
                                   [&](const ActionProfile& p) { return p.name == name; });
            if (it == profiles.end())
                throw Error(ErrKind::InvalidArgument,
                            "no profile for registered action '" + name + "'");
            profiles_.push_back(*it);
        }
        endpoints_ = endpoints ? std::move(endpoints)
                               : std::make_unique<EndpointManager>(registry_);
        if (!log_path_.empty()) {
            log_.open(log_path_, std::ios::app);
            if (!log_)
                throw Error(ErrKind::IoFailure, "cannot open decision log: " + log_path_);
        }
    }

    ~Orchestrator() { stop(); }

    Orchestrator(const Orchestrator&) = delete;
    Orchestrator& operator=(const Orchestrator&) = delete;

    void set_scorer(Scorer s) { scorer_ = std::move(s); }
    void set_applier(Applier a) { applier_ = std::move(a); }

    void set_memory_budget(std::int64_t bytes) {
        std::lock_guard lk(pmx_);
        params_.memory_budget_bytes = bytes;
    }

    PolicyParams params() const {
        std::lock_guard lk(pmx_);
        return params_;
    }

    const std::vector<ActionProfile>& profiles() const { return profiles_; }

    void start() {
        if (thread_.joinable())
            return;
        stop_requested_ = false;
        running_ = true;
        thread_ = std::thread([this] { loop(); });
    }

    void stop() {
        {
            std::lock_guard lk(cv_mx_);
            stop_requested_ = true;
        }
        cv_.notify_all();
        if (thread_.joinable())
            thread_.join();
        running_ = false;
    }

    bool running() const { return running_; }
    ConfigMask current_mask() const { return committed_mask_.load(); }
    bool in_evaluation() const { return in_evaluation_.load(); }
    std::uint64_t epochs_completed() const { return epochs_.load(); }

    ContextValue status_json() const {
        ContextValue j = make_object();
        j["running"] = running();
        j["current_mask"] = current_mask();
        j["in_evaluation"] = in_evaluation();
        j["epochs_completed"] = epochs_completed();
        ContextValue names = ContextValue::array();
        for (const auto& n : order_)
            names.push_back(n);
        j["actions"] = names;
        {
            std::lock_guard lk(log_mx_);
            j["last_decision"] = last_decision_;
        }
        return j;
    }

    // One full evaluate-and-apply cycle. Public so tests and one-shot
    // tools can step the controller without the background thread.
    void run_epoch() {
        try {
            run_epoch_inner();
        } catch (const std::exception& e) {
            log_entry("error", committed_mask_.load(), std::nullopt, false, e.what());
            in_evaluation_ = false;
        }
        epochs_.fetch_add(1);
    }

  private:
    void loop() {
        for (;;) {
            {
                std::unique_lock lk(cv_mx_);
                if (cv_.wait_for(lk, params().epoch_interval, [&] { return stop_requested_; }))
                    break;
            }
            run_epoch();
        }
    }

    void run_epoch_inner() {
        endpoints_->purge_retired();
        PolicyParams p = params();
        std::int64_t budget = p.memory_budget_bytes;
        CandidateSet cs = candidate_masks(profiles_, budget, p.max_exhaustive_bits);
        if (cs.greedy)
            log_entry("greedy_fallback", committed_mask_.load(), std::nullopt, false);
        in_evaluation_ = true;
        std::vector<ScoredMask> scored;
        for (ConfigMask mask : cs.masks) {
            try {
                guarded_apply(mask, budget);
                std::optional<double> score =
                    scorer_ ? scorer_(mask) : measure_candidate(mask, p);
                log_entry("evaluate", mask, score, false);
                if (score)
                    scored.push_back({mask, *score});
            } catch (const std::exception& e) {
                log_entry("error", mask, std::nullopt, false, e.what());
            }
        }
        if (scored.empty()) {
            guarded_apply(committed_mask_.load(), budget);
            log_entry("error", committed_mask_.load(), std::nullopt, false,
                      "no candidate produced a score; keeping current config");
            in_evaluation_ = false;
            return;
        }
        ConfigMask winner = pick_best(scored, objective_maximizes(p.objective), p.tie_threshold);
        double winner_score = 0;
        for (const auto& s : scored)
            if (s.mask == winner)
                winner_score = s.score;
        guarded_apply(winner, budget);
        committed_mask_ = winner;
        log_entry("apply", winner, winner_score, true);
        in_evaluation_ = false;
    }

    // The budget check lives outside the applier hook so simulated
    // appliers exercise the same safety gate as real rebinds.
    void guarded_apply(ConfigMask mask, std::int64_t budget) {
        if (!mask_feasible(profiles_, mask, budget))
            throw Error(ErrKind::NoFeasibleConfig,
                        "config " + std::to_string(mask) + " exceeds the memory budget");
        if (applier_)
            applier_(mask);
        else
            rebind_to_mask(mask);
        applied_mask_ = mask;
    }

    void rebind_to_mask(ConfigMask mask) {
        for (std::size_t i = 0; i < order_.size(); ++i) {
            const std::string& name = order_[i];
            bool want_local = mask >> i & 1;
            BindingKind have = registry_.binding_of(name);
            if (want_local && have != BindingKind::Local) {
                registry_.rebind(name, Binding{BindingKind::Local, "127.0.0.1", 0});
                endpoints_->release(name);
            } else if (!want_local && have != BindingKind::Remote) {
                std::uint16_t port = endpoints_->ensure(name);
                registry_.rebind(name, Binding{BindingKind::Remote, endpoints_->host(), port});
            }
        }
    }

    // Waits for eval_window fresh end-to-end samples (bounded by the
    // candidate timeout) and reduces them per the objective.
    std::optional<double> measure_candidate(ConfigMask, const PolicyParams& p) {
        std::uint64_t mark = metrics_.current_seq();
        auto deadline = std::chrono::steady_clock::now() + p.candidate_timeout;
        for (;;) {
            StatSummary s = metrics_.since_seq(kEndToEndKey, mark);
            if (s.count >= p.eval_window || std::chrono::steady_clock::now() >= deadline) {
                if (s.count == 0)
                    return std::nullopt;
                switch (p.objective) {
                case Objective::AvgLatency: return s.mean_us;
                case Objective::P99: return s.p99_us;
                default: return s.qps;
                }
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(1));
        }
    }

    void log_entry(const std::string& phase, ConfigMask mask, std::optional<double> value,
                   bool applied, const std::string& detail = "") {
        ContextValue j = make_object();
        j["timestamp"] = static_cast<std::uint64_t>(
            std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::system_clock::now().time_since_epoch())
                .count());
        j["phase"] = phase;
        j["config_mask"] = mask;
        if (value)
            j["objective_value"] = *value;
        else
            j["objective_value"] = nullptr;
        j["applied"] = applied;
        if (!detail.empty())
            j["detail"] = detail;
        std::lock_guard lk(log_mx_);
        last_decision_ = j;
        if (log_.is_open()) {
            log_ << canonical_bytes(j) << '\n';
            log_.flush();
        }
    }

    ActionRegistry& registry_;
    MetricsRecorder& metrics_;
    std::vector<ActionProfile> profiles_;
    std::vector<std::string> order_;
    PolicyParams params_;
    mutable std::mutex pmx_;
    std::unique_ptr<EndpointManager> endpoints_;
    Scorer scorer_;
    Applier applier_;

    std::string log_path_;
    std::ofstream log_;
    mutable std::mutex log_mx_;
    ContextValue last_decision_;

    std::thread thread_;
    std::condition_variable cv_;
    std::mutex cv_mx_;
    bool stop_requested_ = false;
    std::atomic<bool> running_{false};
    std::atomic<bool> in_evaluation_{false};
    std::atomic<ConfigMask> committed_mask_{0};
    std::atomic<ConfigMask> applied_mask_{0};
    std::atomic<std::uint64_t> epochs_{0};
};

} // namespace jacette

#endif
