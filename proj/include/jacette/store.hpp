// Copyright 2026 the Jacette developers
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#ifndef JACETTE_STORE_HPP
#define JACETTE_STORE_HPP

#include <atomic>
#include <cassert>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <list>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <unordered_map>
#include <vector>

#include "jacette/records.hpp"

namespace jacette {

struct TierConfig {
    std::size_t cache_capacity = 1024;      // max objects held in the cache tier
    std::size_t fast_edge_threshold = 128;  // bytes; 0 disables fusion entirely
    std::filesystem::path store_path;

    void validate() const {
        if (cache_capacity < 1)
            throw Error(ErrKind::InvalidArgument, "cache_capacity must be >= 1");
        if (store_path.empty())
            throw Error(ErrKind::InvalidArgument, "store_path must be set");
    }
};

struct StoreStats {
    std::uint64_t cache_hits = 0;
    std::uint64_t cache_misses = 0;
    std::uint64_t store_reads = 0;
    std::uint64_t store_writes = 0;
    std::uint64_t objects_fetched = 0; // == cache_hits + store_reads
    std::uint64_t evictions = 0;
};

// Whole-object LRU with capacity counted in objects. Entries are shared with
// the working-memory tier; eviction drops the cache's reference only.
class LruCache {
  public:
    explicit LruCache(std::size_t capacity) : capacity_(capacity) {}

    std::shared_ptr<StoredObject> get(ObjectId id) {
        auto it = index_.find(id);
        if (it == index_.end())
            return nullptr;
        order_.splice(order_.begin(), order_, it->second.order_it);
        return it->second.obj;
    }

    // Inserts or refreshes; returns the number of evictions performed.
    std::size_t put(ObjectId id, std::shared_ptr<StoredObject> obj) {
        auto it = index_.find(id);
        if (it != index_.end()) {
            it->second.obj = std::move(obj);
            order_.splice(order_.begin(), order_, it->second.order_it);
            return 0;
        }
        order_.push_front(id);
        index_[id] = Entry{std::move(obj), order_.begin()};
        std::size_t evicted = 0;
        while (index_.size() > capacity_) {
            ObjectId victim = order_.back();
            order_.pop_back();
            index_.erase(victim);
            ++evicted;
        }
        assert(index_.size() <= capacity_);
        return evicted;
    }

    void erase(ObjectId id) {
        auto it = index_.find(id);
        if (it == index_.end())
            return;
        order_.erase(it->second.order_it);
        index_.erase(it);
    }

    // Lookup without touching recency (audit path).
    std::shared_ptr<StoredObject> peek(ObjectId id) const {
        auto it = index_.find(id);
        return it == index_.end() ? nullptr : it->second.obj;
    }

    std::size_t size() const { return index_.size(); }
    std::size_t capacity() const { return capacity_; }

    // Most-recent-first key listing, for conformance checks against a
    // reference model.
    std::vector<ObjectId> keys_mru() const {
        return std::vector<ObjectId>(order_.begin(), order_.end());
    }

  private:
    struct Entry {
        std::shared_ptr<StoredObject> obj;
        std::list<ObjectId>::iterator order_it;
    };
    std::size_t capacity_;
    std::list<ObjectId> order_;
    std::unordered_map<ObjectId, Entry> index_;
};

// Three-level object store: working memory (objects pinned between commit
// points), LRU cache, and a directory of one-file-per-object persistent
// records. Loads search memory -> cache -> disk; a fetch is any load served
// by the cache or the disk. Writes go to disk at commit().
class ObjectStore {
  public:
    explicit ObjectStore(TierConfig cfg) : cfg_(std::move(cfg)), cache_(cfg_.cache_capacity) {
        cfg_.validate();
        std::error_code ec;
        std::filesystem::create_directories(cfg_.store_path, ec);
        if (ec)
            throw Error(ErrKind::IoFailure,
                        "cannot create store directory: " + cfg_.store_path.string());
        load_meta();
    }

    const TierConfig& config() const { return cfg_; }

    ObjectId allocate_id() {
        std::lock_guard lk(mx_);
        return next_id_++;
    }

    // Seeding support: reserves an explicit id, bumping the allocator past it.
    void reserve_id(ObjectId id) {
        std::lock_guard lk(mx_);
        if (id >= next_id_)
            next_id_ = id + 1;
    }

    std::shared_ptr<StoredObject> load(ObjectId id) {
        if (id == kNullId)
            throw Error(ErrKind::NotFound, "null object id");
        std::lock_guard lk(mx_);
        return load_locked(id);
    }

    bool exists(ObjectId id) {
        if (id == kNullId)
            return false;
        std::lock_guard lk(mx_);
        if (memory_.count(id) || cache_.get(id))
            return true;
        return std::filesystem::exists(object_path(id));
    }

    // Registers a freshly created object in working memory (dirty: written
    // out at the next commit).
    void insert_new(StoredObject obj) {
        std::lock_guard lk(mx_);
        ObjectId id = object_id(obj);
        memory_[id] = MemEntry{std::make_shared<StoredObject>(std::move(obj)), true};
    }

    void mark_dirty(ObjectId id) {
        std::lock_guard lk(mx_);
        auto it = memory_.find(id);
        if (it == memory_.end())
            throw Error(ErrKind::NotFound, "mark_dirty on object not in working memory");
        it->second.dirty = true;
    }

    // Removes the object from every tier, including its persistent file.
    void erase(ObjectId id) {
        std::lock_guard lk(mx_);
        memory_.erase(id);
        cache_.erase(id);
        std::error_code ec;
        std::filesystem::remove(object_path(id), ec);
    }

    // The commit point: flush dirty objects to disk (one store_write per
    // file), refresh the cache with everything written, release the working
    // set.
    void commit() {
        std::lock_guard lk(mx_);
        for (auto& [id, entry] : memory_) {
            if (!entry.dirty)
                continue;
            write_file(id, *entry.obj);
            stats_store_writes_.fetch_add(1, std::memory_order_relaxed);
            std::size_t ev = cache_.put(id, entry.obj);
            stats_evictions_.fetch_add(ev, std::memory_order_relaxed);
            entry.dirty = false;
        }
        memory_.clear();
        write_meta();
    }

    // Point-in-time consistent snapshot. Counter increments happen under
    // mx_, so holding it here keeps the fetched == hits + reads identity
    // exact even with concurrent loaders.
    StoreStats stats() const {
        std::lock_guard lk(mx_);
        StoreStats s;
        s.cache_hits = stats_cache_hits_.load(std::memory_order_relaxed);
        s.cache_misses = stats_cache_misses_.load(std::memory_order_relaxed);
        s.store_reads = stats_store_reads_.load(std::memory_order_relaxed);
        s.store_writes = stats_store_writes_.load(std::memory_order_relaxed);
        s.objects_fetched = stats_objects_fetched_.load(std::memory_order_relaxed);
        s.evictions = stats_evictions_.load(std::memory_order_relaxed);
        assert(s.objects_fetched == s.cache_hits + s.store_reads);
        return s;
    }

    // --- introspection (tests, audit) ---

    std::size_t memory_size() const {
        std::lock_guard lk(mx_);
        return memory_.size();
    }
    std::vector<ObjectId> memory_ids() const {
        std::lock_guard lk(mx_);
        std::vector<ObjectId> ids;
        ids.reserve(memory_.size());
        for (const auto& [id, _] : memory_)
            ids.push_back(id);
        return ids;
    }
    std::size_t cache_size() const {
        std::lock_guard lk(mx_);
        return cache_.size();
    }
    std::vector<ObjectId> cache_keys_mru() const {
        std::lock_guard lk(mx_);
        return cache_.keys_mru();
    }

    // All object ids visible across tiers. Reads the disk directory without
    // touching any counter.
    std::vector<ObjectId> all_ids() const {
        std::lock_guard lk(mx_);
        std::set<ObjectId> ids;
        for (const auto& [id, _] : memory_)
            ids.insert(id);
        for (ObjectId id : cache_.keys_mru())
            ids.insert(id);
        for (const auto& ent : std::filesystem::directory_iterator(cfg_.store_path)) {
            if (!ent.is_regular_file())
                continue;
            std::string name = ent.path().filename().string();
            if (name.empty() || name[0] < '0' || name[0] > '9')
                continue;
            ids.insert(static_cast<ObjectId>(std::stoull(name)));
        }
        return std::vector<ObjectId>(ids.begin(), ids.end());
    }

    // Counter-free read used by the audit path; memory -> cache -> disk.
    // Does not touch LRU recency.
    std::shared_ptr<const StoredObject> peek(ObjectId id) const {
        std::lock_guard lk(mx_);
        if (auto it = memory_.find(id); it != memory_.end())
            return it->second.obj;
        if (auto c = cache_.peek(id))
            return c;
        auto p = object_path(id);
        if (!std::filesystem::exists(p))
            return nullptr;
        return std::make_shared<StoredObject>(deserialize_object(read_file(p)));
    }

    std::string raw_file_bytes(ObjectId id) const { return read_file(object_path(id)); }

  private:
    struct MemEntry {
        std::shared_ptr<StoredObject> obj;
        bool dirty = false;
    };

    std::shared_ptr<StoredObject> load_locked(ObjectId id) {
        if (auto it = memory_.find(id); it != memory_.end())
            return it->second.obj;
        if (auto hit = cache_.get(id)) {
            stats_cache_hits_.fetch_add(1, std::memory_order_relaxed);
            stats_objects_fetched_.fetch_add(1, std::memory_order_relaxed);
            memory_[id] = MemEntry{hit, false};
            return hit;
        }
        stats_cache_misses_.fetch_add(1, std::memory_order_relaxed);
        auto p = object_path(id);
        if (!std::filesystem::exists(p))
            throw Error(ErrKind::NotFound, "object " + std::to_string(id) + " not found");
        auto obj = std::make_shared<StoredObject>(deserialize_object(read_file(p)));
        stats_store_reads_.fetch_add(1, std::memory_order_relaxed);
        stats_objects_fetched_.fetch_add(1, std::memory_order_relaxed);
        std::size_t ev = cache_.put(id, obj);
        stats_evictions_.fetch_add(ev, std::memory_order_relaxed);
        memory_[id] = MemEntry{obj, false};
        return obj;
    }

    std::filesystem::path object_path(ObjectId id) const {
        return cfg_.store_path / std::to_string(id);
    }

    void write_file(ObjectId id, const StoredObject& obj) {
        auto p = object_path(id);
        std::ofstream f(p, std::ios::binary | std::ios::trunc);
        if (!f)
            throw Error(ErrKind::IoFailure, "cannot open " + p.string() + " for writing");
        std::string bytes = serialize_object(obj);
        f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!f)
            throw Error(ErrKind::IoFailure, "short write to " + p.string());
    }

    static std::string read_file(const std::filesystem::path& p) {
        std::ifstream f(p, std::ios::binary);
        if (!f)
            throw Error(ErrKind::IoFailure, "cannot open " + p.string());
        std::ostringstream ss;
        ss << f.rdbuf();
        return ss.str();
    }

    void load_meta() {
        auto meta = cfg_.store_path / "meta.json";
        if (std::filesystem::exists(meta)) {
            ContextValue j = ContextValue::parse(read_file(meta));
            next_id_ = j.at("next_id").get<ObjectId>();
        }
    }

    void write_meta() {
        ContextValue j = make_object();
        j["next_id"] = next_id_;
        auto meta = cfg_.store_path / "meta.json";
        std::ofstream f(meta, std::ios::binary | std::ios::trunc);
        f << canonical_bytes(j) << "\n";
    }

    TierConfig cfg_;
    mutable std::mutex mx_;
    ObjectId next_id_ = 1;
    std::unordered_map<ObjectId, MemEntry> memory_;
    LruCache cache_;

    std::atomic<std::uint64_t> stats_cache_hits_{0};
    std::atomic<std::uint64_t> stats_cache_misses_{0};
    std::atomic<std::uint64_t> stats_store_reads_{0};
    std::atomic<std::uint64_t> stats_store_writes_{0};
    std::atomic<std::uint64_t> stats_objects_fetched_{0};
    std::atomic<std::uint64_t> stats_evictions_{0};
};

} // namespace jacette

#endif
