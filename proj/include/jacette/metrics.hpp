// Copyright 2026 the Jacette developers
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#ifndef JACETTE_METRICS_HPP
#define JACETTE_METRICS_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <vector>

namespace jacette {

// Series key for end-to-end request latency; shared by the runtime, the
// orchestrator's scoring, and the bench harness.
inline constexpr const char* kEndToEndKey = "e2e";

// Nearest-rank percentile over an unsorted sample set.
inline double percentile(std::vector<double> xs, double p) {
    if (xs.empty())
        return 0.0;
    std::sort(xs.begin(), xs.end());
    std::size_t rank = static_cast<std::size_t>(std::ceil(p / 100.0 * xs.size()));
    if (rank == 0)
        rank = 1;
    return xs[rank - 1];
}

struct StatSummary {
    std::size_t count = 0;
    double mean_us = 0;
    double p99_us = 0;
    double qps = 0;
    std::uint64_t first_seq = 0;
    std::uint64_t last_seq = 0;
};

// Latency series keyed by string ("e2e", "act.<name>.local", ...). Each
// series keeps a bounded ring of recent samples stamped with a global
// sequence number, so callers can carve out exact per-phase windows by
// remembering sequence boundaries.
class MetricsRecorder {
  public:
    using Clock = std::chrono::steady_clock;

    explicit MetricsRecorder(std::size_t capacity = 1 << 16) : capacity_(capacity) {}

    std::uint64_t record(const std::string& key, double latency_us) {
        std::uint64_t seq = seq_.fetch_add(1, std::memory_order_relaxed) + 1;
        Series& s = series(key);
        std::lock_guard lk(s.mx);
        s.ring.push_back(Sample{seq, Clock::now(), latency_us});
        if (s.ring.size() > capacity_)
            s.ring.pop_front();
        return seq;
    }

    // Sequence of the most recently recorded sample across all keys.
    std::uint64_t current_seq() const { return seq_.load(std::memory_order_relaxed); }

    // Stats over samples newer than `age`. Throughput is count over the
    // window length, so an idle series decays toward zero.
    StatSummary window(const std::string& key, std::chrono::microseconds age) const {
        Clock::time_point cutoff = Clock::now() - age;
        StatSummary out = summarize(key, [&](const Sample& s) { return s.at >= cutoff; });
        double secs = std::chrono::duration<double>(age).count();
        out.qps = secs > 0 ? static_cast<double>(out.count) / secs : 0;
        return out;
    }

    // Stats over samples with seq strictly greater than `after_seq`.
    // Throughput uses the first-to-last sample span.
    StatSummary since_seq(const std::string& key, std::uint64_t after_seq) const {
        Clock::time_point first_at{}, last_at{};
        StatSummary out = summarize(
            key, [&](const Sample& s) { return s.seq > after_seq; }, &first_at, &last_at);
        if (out.count >= 2) {
            double secs = std::chrono::duration<double>(last_at - first_at).count();
            out.qps = secs > 0 ? static_cast<double>(out.count - 1) / secs : 0;
        }
        return out;
    }

    std::vector<double> latencies_since(const std::string& key, std::uint64_t after_seq) const {
        std::vector<double> xs;
        const Series* s = find(key);
        if (!s)
            return xs;
        std::lock_guard lk(s->mx);
        for (const Sample& smp : s->ring)
            if (smp.seq > after_seq)
                xs.push_back(smp.latency_us);
        return xs;
    }

    std::vector<std::string> keys() const {
        std::shared_lock lk(map_mx_);
        std::vector<std::string> out;
        out.reserve(series_.size());
        for (const auto& [k, _] : series_)
            out.push_back(k);
        return out;
    }

  private:
    struct Sample {
        std::uint64_t seq;
        Clock::time_point at;
        double latency_us;
    };
    struct Series {
        mutable std::mutex mx;
        std::deque<Sample> ring;
    };

    Series& series(const std::string& key) {
        {
            std::shared_lock lk(map_mx_);
            auto it = series_.find(key);
            if (it != series_.end())
                return *it->second;
        }
        std::unique_lock lk(map_mx_);
        auto& slot = series_[key];
        if (!slot)
            slot = std::make_unique<Series>();
        return *slot;
    }

    const Series* find(const std::string& key) const {
        std::shared_lock lk(map_mx_);
        auto it = series_.find(key);
        return it == series_.end() ? nullptr : it->second.get();
    }

    template <typename Pred>
    StatSummary summarize(const std::string& key, Pred keep, Clock::time_point* first_at = nullptr,
                          Clock::time_point* last_at = nullptr) const {
        StatSummary out;
        const Series* s = find(key);
        if (!s)
            return out;
        std::vector<double> xs;
        double sum = 0;
        {
            std::lock_guard lk(s->mx);
            for (const Sample& smp : s->ring) {
                if (!keep(smp))
                    continue;
                if (out.count == 0) {
                    out.first_seq = smp.seq;
                    if (first_at)
                        *first_at = smp.at;
                }
                out.last_seq = smp.seq;
                if (last_at)
                    *last_at = smp.at;
                xs.push_back(smp.latency_us);
                sum += smp.latency_us;
                ++out.count;
            }
        }
        if (out.count) {
            out.mean_us = sum / static_cast<double>(out.count);
            out.p99_us = percentile(std::move(xs), 99.0);
        }
        return out;
    }

    std::size_t capacity_;
    std::atomic<std::uint64_t> seq_{0};
    mutable std::shared_mutex map_mx_;
    std::map<std::string, std::unique_ptr<Series>> series_;
};

} // namespace jacette

#endif
