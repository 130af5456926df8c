// Copyright 2026 the Jacette developers
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#ifndef JACETTE_ACTIONS_HPP
#define JACETTE_ACTIONS_HPP

#include <chrono>
#include <fstream>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <thread>
#include <vector>

#include "jacette/metrics.hpp"
#include "jacette/wire.hpp"

namespace jacette {

enum class BindingKind { Local, Remote };

struct Binding {
    BindingKind kind = BindingKind::Local;
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;
};

inline const char* binding_kind_name(BindingKind k) {
    return k == BindingKind::Local ? "local" : "remote";
}

// Artificial latency model standing in for real network and library cost.
// Injected client-side so the math is exact regardless of loopback speed:
//   local call  += local_extra_us
//   remote call += remote_fixed_us + remote_per_byte_us * wire payload bytes
struct DelayParams {
    std::uint64_t local_extra_us = 0;
    std::uint64_t remote_fixed_us = 0;
    double remote_per_byte_us = 0.0;
};

using LocalImpl = std::function<ContextValue(const std::vector<ContextValue>&)>;

// One action: a name, a local implementation, a declared memory cost for
// hosting it locally, the delay model, and the current binding.
struct ActionSpec {
    std::string name;
    std::uint64_t mem_footprint_bytes = 0;
    LocalImpl impl;
    DelayParams delay;
    Binding binding;
    std::vector<ContextValue> profile_args;
};

struct ActionProfile {
    std::string name;
    double local_latency_us = 0;
    double remote_latency_us = 0;
    double cc = 0; // remote_latency_us / local_latency_us
    std::uint64_t mem_footprint_bytes = 0;

    ContextValue to_json() const {
        ContextValue j = make_object();
        j["name"] = name;
        j["local_latency_us"] = local_latency_us;
        j["remote_latency_us"] = remote_latency_us;
        j["cc"] = cc;
        j["mem_footprint_bytes"] = mem_footprint_bytes;
        return j;
    }

    static ActionProfile from_json(const ContextValue& j) {
        ActionProfile p;
        p.name = j.at("name").get<std::string>();
        p.local_latency_us = j.at("local_latency_us").get<double>();
        p.remote_latency_us = j.at("remote_latency_us").get<double>();
        p.cc = j.at("cc").get<double>();
        p.mem_footprint_bytes = j.at("mem_footprint_bytes").get<std::uint64_t>();
        return p;
    }
};

// --- built-in implementations ---

inline ContextValue builtin_concat(const std::vector<ContextValue>& args) {
    std::string out;
    for (const auto& a : args) {
        if (!a.is_string())
            throw Error(ErrKind::ActionFailure,
                        "concat expects string arguments, got " + value_type_name(a));
        out += a.get_ref<const std::string&>();
    }
    return out;
}

// First sentence of the input: everything through the first '.', or the
// whole (trimmed) text when it has no period.
inline ContextValue builtin_summarize(const std::vector<ContextValue>& args) {
    if (args.size() != 1 || !args[0].is_string())
        throw Error(ErrKind::ActionFailure, "summarize expects one string argument");
    std::string text = args[0].get<std::string>();
    std::size_t start = text.find_first_not_of(" \t\n");
    if (start == std::string::npos)
        return std::string();
    text.erase(0, start);
    std::size_t dot = text.find('.');
    if (dot != std::string::npos)
        text.resize(dot + 1);
    return text;
}

// Synthetic compute: waits compute_ms of wall time, then returns a
// payload_bytes-long string. A timed wait rather than a spin so that
// concurrent callers on a small machine do not contend for cycles.
inline ContextValue builtin_synth(const std::vector<ContextValue>& args) {
    if (args.size() != 2 || !args[0].is_number() || !args[1].is_number_integer())
        throw Error(ErrKind::ActionFailure,
                    "synth expects (compute_ms: number, payload_bytes: int)");
    double ms = args[0].get<double>();
    auto bytes = args[1].get<std::int64_t>();
    if (ms < 0 || bytes < 0 || bytes > (16 << 20))
        throw Error(ErrKind::ActionFailure, "synth arguments out of range");
    if (ms > 0)
        std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(ms));
    return std::string(static_cast<std::size_t>(bytes), 'x');
}

// Late-binding dispatcher. Callers name an action; whether it executes
// in-process or over the wire is the spec's current binding, swappable at
// runtime without the caller noticing anything but latency.
class ActionRegistry {
  public:
    explicit ActionRegistry(MetricsRecorder* metrics = nullptr) : metrics_(metrics) {}

    void register_action(ActionSpec spec) {
        if (spec.name.empty())
            throw Error(ErrKind::InvalidArgument, "action name must be non-empty");
        if (!spec.impl)
            throw Error(ErrKind::InvalidArgument,
                        "action '" + spec.name + "' needs a local implementation");
        std::unique_lock lk(mx_);
        std::string name = spec.name;
        if (!specs_.count(name))
            order_.push_back(name);
        specs_[name] = std::make_shared<const ActionSpec>(std::move(spec));
    }

    bool has(const std::string& name) const {
        std::shared_lock lk(mx_);
        return specs_.count(name) > 0;
    }

    // Registration order; jsorc's config bitmask uses this ordering.
    std::vector<std::string> names() const {
        std::shared_lock lk(mx_);
        return order_;
    }

    std::shared_ptr<const ActionSpec> spec(const std::string& name) const {
        std::shared_lock lk(mx_);
        auto it = specs_.find(name);
        if (it == specs_.end())
            throw Error(ErrKind::UnknownAction, "unknown action").with_name(name);
        return it->second;
    }

    // Atomic swap: calls dispatched after this use the new binding;
    // in-flight calls hold the old spec snapshot and finish on it.
    void rebind(const std::string& name, Binding binding) {
        std::unique_lock lk(mx_);
        auto it = specs_.find(name);
        if (it == specs_.end())
            throw Error(ErrKind::UnknownAction, "unknown action").with_name(name);
        auto next = std::make_shared<ActionSpec>(*it->second);
        next->binding = std::move(binding);
        it->second = std::move(next);
    }

    void set_delay(const std::string& name, DelayParams delay) {
        std::unique_lock lk(mx_);
        auto it = specs_.find(name);
        if (it == specs_.end())
            throw Error(ErrKind::UnknownAction, "unknown action").with_name(name);
        auto next = std::make_shared<ActionSpec>(*it->second);
        next->delay = delay;
        it->second = std::move(next);
    }

    BindingKind binding_of(const std::string& name) const { return spec(name)->binding.kind; }

    // Dispatch through the current binding, recording latency tagged by
    // (action, binding).
    ContextValue call(const std::string& name, const std::vector<ContextValue>& args) const {
        auto s = spec(name);
        auto t0 = std::chrono::steady_clock::now();
        ContextValue result = s->binding.kind == BindingKind::Local
                                  ? call_local(*s, args)
                                  : call_remote(*s, args, s->binding.host, s->binding.port);
        if (metrics_) {
            double us = std::chrono::duration<double, std::micro>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
            metrics_->record("act." + name + "." + binding_kind_name(s->binding.kind), us);
        }
        return result;
    }

    // Direct local dispatch, no delay injection or metrics: the execution
    // path on the remote server's side of the wire.
    ContextValue serve_local(const std::string& name, const std::vector<ContextValue>& args) const {
        auto s = spec(name);
        return invoke_impl(*s, args);
    }

    // Measures both bindings with the action's canonical arguments and
    // fixed trial count; medians keep stray scheduler hiccups out.
    ActionProfile profile(const std::string& name, std::size_t trials, const std::string& host,
                          std::uint16_t port) const {
        if (trials < 1)
            throw Error(ErrKind::InvalidArgument, "profile needs trials >= 1");
        auto s = spec(name);
        std::vector<double> local_us, remote_us;
        local_us.reserve(trials);
        remote_us.reserve(trials);
        for (std::size_t i = 0; i < trials; ++i) {
            auto t0 = std::chrono::steady_clock::now();
            call_local(*s, s->profile_args);
            local_us.push_back(std::chrono::duration<double, std::micro>(
                                   std::chrono::steady_clock::now() - t0)
                                   .count());
        }
        for (std::size_t i = 0; i < trials; ++i) {
            auto t0 = std::chrono::steady_clock::now();
            call_remote(*s, s->profile_args, host, port);
            remote_us.push_back(std::chrono::duration<double, std::micro>(
                                    std::chrono::steady_clock::now() - t0)
                                    .count());
        }
        ActionProfile p;
        p.name = name;
        p.local_latency_us = percentile(local_us, 50.0);
        p.remote_latency_us = percentile(remote_us, 50.0);
        p.cc = p.local_latency_us > 0 ? p.remote_latency_us / p.local_latency_us : 0;
        p.mem_footprint_bytes = s->mem_footprint_bytes;
        return p;
    }

  private:
    static void inject_delay_us(double us) {
        if (us > 0)
            std::this_thread::sleep_for(std::chrono::duration<double, std::micro>(us));
    }

    static ContextValue invoke_impl(const ActionSpec& s, const std::vector<ContextValue>& args) {
        try {
            return s.impl(args);
        } catch (const Error&) {
            throw;
        } catch (const std::exception& e) {
            throw Error(ErrKind::ActionFailure,
                        "action '" + s.name + "' failed: " + e.what())
                .with_name(s.name);
        }
    }

    static ContextValue call_local(const ActionSpec& s, const std::vector<ContextValue>& args) {
        inject_delay_us(static_cast<double>(s.delay.local_extra_us));
        return invoke_impl(s, args);
    }

    // One attempt plus two retries, transport failures only. A response
    // that arrives but says ok:false is a real answer, not a transport
    // problem, and surfaces immediately.
    static ContextValue call_remote(const ActionSpec& s, const std::vector<ContextValue>& args,
                                    const std::string& host, std::uint16_t port) {
        constexpr int kRetries = 2;
        std::string last_failure;
        for (int attempt = 0; attempt <= kRetries; ++attempt) {
            WireClient& client = pooled_client(host, port);
            try {
                ContextValue result = client.call(s.name, args);
                double injected =
                    static_cast<double>(s.delay.remote_fixed_us) +
                    s.delay.remote_per_byte_us * static_cast<double>(client.last_wire_bytes());
                inject_delay_us(injected);
                return result;
            } catch (const Error& e) {
                if (e.kind != ErrKind::IoFailure)
                    throw;
                last_failure = e.what();
            }
        }
        throw Error(ErrKind::ActionFailure,
                    "action '" + s.name + "' transport failed after " +
                        std::to_string(kRetries + 1) + " attempts: " + last_failure)
            .with_name(s.name);
    }

    // Per-thread connection reuse. Keyed by endpoint, so a rebind to a new
    // endpoint naturally picks up a fresh connection.
    static WireClient& pooled_client(const std::string& host, std::uint16_t port) {
        thread_local std::map<std::string, WireClient> pool;
        std::string key = host + ":" + std::to_string(port);
        auto it = pool.find(key);
        if (it == pool.end())
            it = pool.emplace(key, WireClient(host, port)).first;
        return it->second;
    }

    MetricsRecorder* metrics_;
    mutable std::shared_mutex mx_;
    std::map<std::string, std::shared_ptr<const ActionSpec>> specs_;
    std::vector<std::string> order_;
};

// Manifest: JSON list of {name, mem_footprint_bytes, kind, params}.
// kind "builtin": params.which picks concat|summarize|synth.
// kind "synth": params.compute_ms and params.payload_bytes bake a
// fixed-cost closure over builtin_synth, called with no arguments.
// Optional params fields local_extra_us, remote_fixed_us,
// remote_per_byte_us feed the delay model for either kind.
inline std::vector<ActionSpec> manifest_to_specs(const ContextValue& manifest) {
    if (!manifest.is_array())
        throw Error(ErrKind::InvalidArgument, "action manifest must be a JSON list");
    std::vector<ActionSpec> specs;
    for (const auto& entry : manifest) {
        if (!entry.is_object() || !entry.contains("name") || !entry.contains("kind"))
            throw Error(ErrKind::InvalidArgument,
                        "manifest entries need at least {name, kind}");
        ActionSpec s;
        s.name = entry.at("name").get<std::string>();
        s.mem_footprint_bytes = entry.value("mem_footprint_bytes", std::uint64_t{0});
        ContextValue params = entry.value("params", make_object());
        s.delay.local_extra_us = params.value("local_extra_us", std::uint64_t{0});
        s.delay.remote_fixed_us = params.value("remote_fixed_us", std::uint64_t{0});
        s.delay.remote_per_byte_us = params.value("remote_per_byte_us", 0.0);
        std::string kind = entry.at("kind").get<std::string>();
        if (kind == "builtin") {
            std::string which = params.value("which", s.name);
            if (which == "concat") {
                s.impl = builtin_concat;
                s.profile_args = {ContextValue("a"), ContextValue("b")};
            } else if (which == "summarize") {
                s.impl = builtin_summarize;
                s.profile_args = {ContextValue("First part. Second part.")};
            } else if (which == "synth") {
                s.impl = builtin_synth;
                s.profile_args = {ContextValue(1), ContextValue(64)};
            } else {
                throw Error(ErrKind::InvalidArgument,
                            "manifest names unknown builtin '" + which + "'");
            }
        } else if (kind == "synth") {
            double compute_ms = params.value("compute_ms", 1.0);
            std::int64_t payload = params.value("payload_bytes", std::int64_t{64});
            s.impl = [compute_ms, payload](const std::vector<ContextValue>&) {
                return builtin_synth({ContextValue(compute_ms), ContextValue(payload)});
            };
            s.profile_args = {};
        } else {
            throw Error(ErrKind::InvalidArgument, "manifest kind must be builtin or synth, got '" +
                                                      kind + "'");
        }
        specs.push_back(std::move(s));
    }
    return specs;
}

inline std::vector<ActionSpec> load_manifest_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error(ErrKind::IoFailure, "cannot open action manifest: " + path);
    ContextValue manifest = ContextValue::parse(in, nullptr, true);
    return manifest_to_specs(manifest);
}

// Serves this registry's local implementations over the wire protocol.
inline std::unique_ptr<ActionServer> serve_actions(std::uint16_t port,
                                                   const ActionRegistry& registry) {
    auto server = std::make_unique<ActionServer>(
        port, [&registry](const std::string& name, const std::vector<ContextValue>& args) {
            return registry.serve_local(name, args);
        });
    server->start();
    return server;
}

} // namespace jacette

#endif
