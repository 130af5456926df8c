// Copyright 2026 the Jacette developers
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#ifndef JACETTE_GRAPH_HPP
#define JACETTE_GRAPH_HPP

#include <algorithm>
#include <memory>
#include <mutex>
#include <set>
#include <vector>

#include "jacette/schema.hpp"
#include "jacette/store.hpp"

namespace jacette {

struct NeighborHit {
    EdgeRecord edge;
    ObjectId node = kNullId;
};

// First-class graph over the tiered object store. Edges are directed. An
// edge whose full context serializes below the fast-edge threshold is fused:
// it lives inline in both endpoint node records and never becomes a
// standalone stored object. Fusion is invisible to every read operation;
// only the store counters differ.
//
// All structural operations serialize on one coarse mutex; callers never
// observe a partially applied operation.
class Graph {
  public:
    Graph(Schema schema, TierConfig cfg) : schema_(std::move(schema)), store_(std::move(cfg)) {}

    const Schema& schema() const { return schema_; }
    ObjectStore& store() { return store_; }
    const ObjectStore& store() const { return store_; }
    StoreStats stats() const { return store_.stats(); }

    ObjectId create_node(const std::string& type_name, const ContextValue& context) {
        std::lock_guard lk(mx_);
        return create_node_locked(store_.allocate_id(), type_name, context);
    }

    // Seeding path: explicit id, must be unused.
    ObjectId create_node_with_id(ObjectId id, const std::string& type_name,
                                 const ContextValue& context) {
        std::lock_guard lk(mx_);
        if (id == kNullId)
            throw Error(ErrKind::InvalidArgument, "node id 0 is reserved");
        if (store_.exists(id))
            throw Error(ErrKind::InvalidArgument, "node id already in use: " + std::to_string(id));
        store_.reserve_id(id);
        return create_node_locked(id, type_name, context);
    }

    ObjectId create_edge(const std::string& type_name, ObjectId src, ObjectId dst,
                         const ContextValue& context) {
        std::lock_guard lk(mx_);
        const EdgeType& et = schema_.edge_type(type_name);
        ContextValue ctx = Schema::make_context(et.has_fields, context, type_name);

        NodeRecord* sn = load_node_or_dangling(src);
        NodeRecord* dn = load_node_or_dangling(dst);

        EdgeRecord e;
        e.id = store_.allocate_id();
        e.type_name = type_name;
        e.context = std::move(ctx);
        e.src = src;
        e.dst = dst;
        e.is_fast = is_below_threshold(e.context);
        ObjectId eid = e.id;

        if (e.is_fast) {
            sn->fused_edges.push_back(e);
            if (dst != src)
                dn->fused_edges.push_back(std::move(e));
            store_.mark_dirty(src);
            store_.mark_dirty(dst);
        } else {
            sn->out_edges.push_back(eid);
            dn->in_edges.push_back(eid);
            store_.mark_dirty(src);
            store_.mark_dirty(dst);
            store_.insert_new(StoredObject(std::move(e)));
        }
        return eid;
    }

    // Deletes the node and every incident edge, fused copies on the opposite
    // endpoint included. Returns 1 + number of incident edges removed.
    std::size_t delete_node(ObjectId id) {
        std::lock_guard lk(mx_);
        NodeRecord node = *load_node(id); // copy; the record dies below

        std::set<ObjectId> standalone;
        standalone.insert(node.out_edges.begin(), node.out_edges.end());
        standalone.insert(node.in_edges.begin(), node.in_edges.end());

        std::size_t removed_edges = 0;
        for (ObjectId eid : standalone) {
            const EdgeRecord e = std::get<EdgeRecord>(*store_.load(eid));
            ObjectId other = (e.src == id) ? e.dst : e.src;
            if (other != id) {
                NodeRecord* on = load_node(other);
                drop_adjacency(*on, eid);
                store_.mark_dirty(other);
            }
            store_.erase(eid);
            ++removed_edges;
        }
        std::set<ObjectId> fused_seen;
        for (const EdgeRecord& fe : node.fused_edges) {
            if (!fused_seen.insert(fe.id).second)
                continue;
            ObjectId other = (fe.src == id) ? fe.dst : fe.src;
            if (other != id) {
                NodeRecord* on = load_node(other);
                drop_fused(*on, fe.id);
                store_.mark_dirty(other);
            }
            ++removed_edges;
        }
        store_.erase(id);
        return 1 + removed_edges;
    }

    // Normal and fused edges, uniformly, in ascending edge-id order.
    std::vector<NeighborHit> neighbors(ObjectId id, Direction dir,
                                       const std::optional<std::string>& edge_type = {}) {
        std::lock_guard lk(mx_);
        return neighbors_locked(id, dir, edge_type);
    }

    std::string node_type_of(ObjectId id) {
        std::lock_guard lk(mx_);
        return load_node(id)->type_name;
    }

    NodeRecord node_snapshot(ObjectId id) {
        std::lock_guard lk(mx_);
        return *load_node(id);
    }

    ContextValue get_field(ObjectId id, const std::string& field) {
        std::lock_guard lk(mx_);
        const NodeRecord* n = load_node(id);
        if (!n->context.contains(field))
            return nullptr; // reads of undeclared fields are null
        return n->context.at(field);
    }

    void set_field(ObjectId id, const std::string& field, const ContextValue& value) {
        std::lock_guard lk(mx_);
        NodeRecord* n = load_node(id);
        if (!n->context.contains(field))
            throw Error(ErrKind::UndeclaredField,
                        "field '" + field + "' is not declared on type '" + n->type_name + "'")
                .with_name(field);
        n->context[field] = value;
        store_.mark_dirty(id);
    }

    // Replaces an edge's context. For a fused edge both inline copies are
    // updated; if the new context is at or above the threshold the edge is
    // promoted to a standalone object at the next commit (demotion never
    // happens automatically).
    void update_edge_context(const EdgeRecord& edge, const ContextValue& context) {
        std::lock_guard lk(mx_);
        const EdgeType& et = schema_.edge_type(edge.type_name);
        ContextValue ctx = Schema::make_context(et.has_fields, context, edge.type_name);
        if (!edge.is_fast) {
            auto obj = store_.load(edge.id);
            std::get<EdgeRecord>(*obj).context = std::move(ctx);
            store_.mark_dirty(edge.id);
            return;
        }
        for (ObjectId nid : endpoint_ids(edge)) {
            NodeRecord* n = load_node(nid);
            for (auto& fe : n->fused_edges)
                if (fe.id == edge.id)
                    fe.context = ctx;
            store_.mark_dirty(nid);
        }
    }

    // Commit point. Promotes any fused edge whose context has grown to or
    // past the threshold, then flushes dirty objects.
    void commit() {
        std::lock_guard lk(mx_);
        promote_oversized_locked();
        store_.commit();
    }

    // Full-store referential-integrity audit. Throws on the first violation.
    // Reads bypass the counters so audits do not perturb measurements.
    void audit() const {
        std::lock_guard lk(mx_);
        for (ObjectId id : store_.all_ids()) {
            auto obj = store_.peek(id);
            if (!obj)
                continue;
            if (is_node(*obj))
                audit_node(std::get<NodeRecord>(*obj));
            else
                audit_edge(std::get<EdgeRecord>(*obj));
        }
    }

    // Canonical dump of every live object, ascending id. Test oracle for
    // fusion transparency and isolation checks.
    std::vector<std::string> dump_canonical() const {
        std::lock_guard lk(mx_);
        std::vector<std::string> out;
        for (ObjectId id : store_.all_ids()) {
            auto obj = store_.peek(id);
            if (obj)
                out.push_back(serialize_object(*obj));
        }
        return out;
    }

  private:
    ObjectId create_node_locked(ObjectId id, const std::string& type_name,
                                const ContextValue& context) {
        const NodeType& nt = schema_.node_type(type_name);
        NodeRecord n;
        n.id = id;
        n.type_name = type_name;
        n.context = Schema::make_context(nt.has_fields, context, type_name);
        n.access_list = nt.access;
        store_.insert_new(StoredObject(std::move(n)));
        return id;
    }

    bool is_below_threshold(const ContextValue& ctx) const {
        std::size_t t = store_.config().fast_edge_threshold;
        return t > 0 && canonical_size(ctx) < t;
    }

    NodeRecord* load_node(ObjectId id) {
        auto obj = store_.load(id);
        if (!is_node(*obj))
            throw Error(ErrKind::NotFound, "object " + std::to_string(id) + " is not a node");
        return &std::get<NodeRecord>(*obj);
    }

    NodeRecord* load_node_or_dangling(ObjectId id) {
        try {
            return load_node(id);
        } catch (const Error& e) {
            if (e.kind == ErrKind::NotFound)
                throw Error(ErrKind::DanglingEndpoint,
                            "edge endpoint " + std::to_string(id) + " does not resolve");
            throw;
        }
    }

    static std::vector<ObjectId> endpoint_ids(const EdgeRecord& e) {
        if (e.src == e.dst)
            return {e.src};
        return {e.src, e.dst};
    }

    static void drop_adjacency(NodeRecord& n, ObjectId eid) {
        std::erase(n.out_edges, eid);
        std::erase(n.in_edges, eid);
    }

    static void drop_fused(NodeRecord& n, ObjectId eid) {
        std::erase_if(n.fused_edges, [&](const EdgeRecord& fe) { return fe.id == eid; });
    }

    std::vector<NeighborHit> neighbors_locked(ObjectId id, Direction dir,
                                              const std::optional<std::string>& edge_type) {
        const NodeRecord* n = load_node(id);
        std::vector<NeighborHit> hits;
        std::set<ObjectId> taken;

        auto consider = [&](const EdgeRecord& e) {
            bool outgoing = e.src == id;
            bool incoming = e.dst == id;
            bool match = (dir == Direction::Out && outgoing) ||
                         (dir == Direction::In && incoming) ||
                         (dir == Direction::Both && (outgoing || incoming));
            if (!match)
                return;
            if (edge_type && e.type_name != *edge_type)
                return;
            if (!taken.insert(e.id).second)
                return;
            NeighborHit h;
            h.edge = e;
            h.node = (dir == Direction::In) ? e.src : (outgoing ? e.dst : e.src);
            hits.push_back(std::move(h));
        };

        std::vector<ObjectId> standalone;
        if (dir != Direction::In)
            standalone.insert(standalone.end(), n->out_edges.begin(), n->out_edges.end());
        if (dir != Direction::Out)
            standalone.insert(standalone.end(), n->in_edges.begin(), n->in_edges.end());
        // The node record is shared working memory; copy the fused list
        // before any further loads can touch it.
        std::vector<EdgeRecord> fused = n->fused_edges;
        for (ObjectId eid : standalone)
            consider(std::get<EdgeRecord>(*store_.load(eid)));
        for (const EdgeRecord& fe : fused)
            consider(fe);

        std::sort(hits.begin(), hits.end(),
                  [](const NeighborHit& a, const NeighborHit& b) { return a.edge.id < b.edge.id; });
        return hits;
    }

    void promote_oversized_locked() {
        std::size_t threshold = store_.config().fast_edge_threshold;
        if (threshold == 0)
            return;
        // Context growth goes through update_edge_context, which pins the
        // owning nodes in working memory; the scan never touches disk.
        std::vector<EdgeRecord> to_promote;
        std::set<ObjectId> promoted;
        for (ObjectId id : store_.memory_ids()) {
            auto obj = store_.peek(id);
            if (!obj || !is_node(*obj))
                continue;
            for (const auto& fe : std::get<NodeRecord>(*obj).fused_edges) {
                if (canonical_size(fe.context) >= threshold && promoted.insert(fe.id).second)
                    to_promote.push_back(fe);
            }
        }
        for (EdgeRecord e : to_promote) {
            for (ObjectId nid : endpoint_ids(e)) {
                NodeRecord* n = load_node(nid);
                drop_fused(*n, e.id);
                store_.mark_dirty(nid);
            }
            e.is_fast = false;
            NodeRecord* sn = load_node(e.src);
            sn->out_edges.push_back(e.id);
            store_.mark_dirty(e.src);
            NodeRecord* dn = load_node(e.dst);
            dn->in_edges.push_back(e.id);
            store_.mark_dirty(e.dst);
            store_.insert_new(StoredObject(std::move(e)));
        }
    }

    void audit_node(const NodeRecord& n) const {
        if (n.access_list && n.access_list->empty())
            fail(n.id, "empty access list");
        const NodeType& nt = schema_.node_type(n.type_name);
        std::size_t i = 0;
        if (n.context.size() != nt.has_fields.size())
            fail(n.id, "context keys do not match declared fields");
        for (auto it = n.context.begin(); it != n.context.end(); ++it, ++i)
            if (it.key() != nt.has_fields[i])
                fail(n.id, "context key order does not match declaration");
        for (ObjectId eid : n.out_edges) {
            auto e = store_.peek(eid);
            if (!e || is_node(*e) || std::get<EdgeRecord>(*e).src != n.id)
                fail(n.id, "out_edge " + std::to_string(eid) + " does not resolve to an edge from this node");
            if (std::get<EdgeRecord>(*e).is_fast)
                fail(n.id, "out_edge " + std::to_string(eid) + " is marked fast but stored standalone");
        }
        for (ObjectId eid : n.in_edges) {
            auto e = store_.peek(eid);
            if (!e || is_node(*e) || std::get<EdgeRecord>(*e).dst != n.id)
                fail(n.id, "in_edge " + std::to_string(eid) + " does not resolve to an edge into this node");
        }
        for (const EdgeRecord& fe : n.fused_edges) {
            if (!fe.is_fast)
                fail(n.id, "fused edge " + std::to_string(fe.id) + " not marked fast");
            if (fe.src != n.id && fe.dst != n.id)
                fail(n.id, "fused edge " + std::to_string(fe.id) + " does not include this node");
            ObjectId other = (fe.src == n.id) ? fe.dst : fe.src;
            auto on = store_.peek(other);
            if (!on || !is_node(*on))
                fail(n.id, "fused edge endpoint " + std::to_string(other) + " does not resolve");
            if (other != n.id) {
                const auto& list = std::get<NodeRecord>(*on).fused_edges;
                auto match = std::find_if(list.begin(), list.end(), [&](const EdgeRecord& o) {
                    return o.id == fe.id;
                });
                if (match == list.end())
                    fail(n.id, "fused edge " + std::to_string(fe.id) + " missing on opposite endpoint");
                if (canonical_bytes(match->to_json()) != canonical_bytes(fe.to_json()))
                    fail(n.id, "fused edge copies diverge for edge " + std::to_string(fe.id));
            }
        }
    }

    void audit_edge(const EdgeRecord& e) const {
        if (e.src == kNullId || e.dst == kNullId)
            fail(e.id, "edge endpoint is null");
        auto s = store_.peek(e.src);
        auto d = store_.peek(e.dst);
        if (!s || !is_node(*s) || !d || !is_node(*d))
            fail(e.id, "edge endpoint does not resolve to a live node");
        const auto& sn = std::get<NodeRecord>(*s);
        const auto& dn = std::get<NodeRecord>(*d);
        if (std::find(sn.out_edges.begin(), sn.out_edges.end(), e.id) == sn.out_edges.end())
            fail(e.id, "edge missing from source adjacency");
        if (std::find(dn.in_edges.begin(), dn.in_edges.end(), e.id) == dn.in_edges.end())
            fail(e.id, "edge missing from destination adjacency");
    }

    [[noreturn]] static void fail(ObjectId id, const std::string& what) {
        throw Error(ErrKind::InvalidArgument,
                    "audit violation at object " + std::to_string(id) + ": " + what);
    }

    Schema schema_;
    mutable std::mutex mx_;
    ObjectStore store_;
};

} // namespace jacette

#endif
