// Copyright 2026 the Jacette developers
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#ifndef JACETTE_RECORDS_HPP
#define JACETTE_RECORDS_HPP

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "jacette/error.hpp"
#include "jacette/value.hpp"

namespace jacette {

// Object identity. Monotonically assigned per store, never reused within a
// store's lifetime. Zero is the reserved null reference.
using ObjectId = std::uint64_t;
inline constexpr ObjectId kNullId = 0;

// Edge orientation relative to a reference node.
enum class Direction { Out, In, Both };

inline const char* direction_name(Direction d) {
    switch (d) {
    case Direction::Out: return "out";
    case Direction::In: return "in";
    case Direction::Both: return "both";
    }
    return "?";
}

struct EdgeRecord {
    ObjectId id = kNullId;
    std::string type_name;
    ContextValue context = ContextValue::object();
    ObjectId src = kNullId;
    ObjectId dst = kNullId;
    bool is_fast = false;

    ContextValue to_json() const {
        ContextValue j = make_object();
        j["id"] = id;
        j["type_name"] = type_name;
        j["context"] = context;
        j["src"] = src;
        j["dst"] = dst;
        j["is_fast"] = is_fast;
        return j;
    }

    static EdgeRecord from_json(const ContextValue& j) {
        EdgeRecord e;
        e.id = j.at("id").get<ObjectId>();
        e.type_name = j.at("type_name").get<std::string>();
        e.context = j.at("context");
        e.src = j.at("src").get<ObjectId>();
        e.dst = j.at("dst").get<ObjectId>();
        e.is_fast = j.at("is_fast").get<bool>();
        return e;
    }
};

struct NodeRecord {
    ObjectId id = kNullId;
    std::string type_name;
    ContextValue context = ContextValue::object();
    std::vector<ObjectId> out_edges; // standalone (non-fused) edges only
    std::vector<ObjectId> in_edges;
    std::optional<std::set<std::string>> access_list;
    std::vector<EdgeRecord> fused_edges; // fast edges stored inline

    ContextValue to_json() const {
        ContextValue j = make_object();
        j["id"] = id;
        j["type_name"] = type_name;
        j["context"] = context;
        j["out_edges"] = out_edges;
        j["in_edges"] = in_edges;
        if (access_list) {
            ContextValue acc = ContextValue::array();
            for (const auto& w : *access_list)
                acc.push_back(w);
            j["access_list"] = acc;
        } else {
            j["access_list"] = nullptr;
        }
        ContextValue fe = ContextValue::array();
        for (const auto& e : fused_edges)
            fe.push_back(e.to_json());
        j["fused_edges"] = fe;
        return j;
    }

    static NodeRecord from_json(const ContextValue& j) {
        NodeRecord n;
        n.id = j.at("id").get<ObjectId>();
        n.type_name = j.at("type_name").get<std::string>();
        n.context = j.at("context");
        n.out_edges = j.at("out_edges").get<std::vector<ObjectId>>();
        n.in_edges = j.at("in_edges").get<std::vector<ObjectId>>();
        if (!j.at("access_list").is_null()) {
            std::set<std::string> acc;
            for (const auto& w : j.at("access_list"))
                acc.insert(w.get<std::string>());
            n.access_list = std::move(acc);
        }
        for (const auto& e : j.at("fused_edges"))
            n.fused_edges.push_back(EdgeRecord::from_json(e));
        return n;
    }
};

using StoredObject = std::variant<NodeRecord, EdgeRecord>;

inline bool is_node(const StoredObject& o) { return std::holds_alternative<NodeRecord>(o); }

inline ObjectId object_id(const StoredObject& o) {
    return is_node(o) ? std::get<NodeRecord>(o).id : std::get<EdgeRecord>(o).id;
}

inline const std::string& object_type_name(const StoredObject& o) {
    return is_node(o) ? std::get<NodeRecord>(o).type_name : std::get<EdgeRecord>(o).type_name;
}

// On-disk form: one-line header {kind, type_name}, then the record itself,
// both in canonical JSON. Byte-stable under persist/load round trips.
inline std::string serialize_object(const StoredObject& o) {
    ContextValue header = make_object();
    header["kind"] = is_node(o) ? "node" : "edge";
    header["type_name"] = object_type_name(o);
    ContextValue body =
        is_node(o) ? std::get<NodeRecord>(o).to_json() : std::get<EdgeRecord>(o).to_json();
    return canonical_bytes(header) + "\n" + canonical_bytes(body) + "\n";
}

inline StoredObject deserialize_object(const std::string& bytes) {
    auto nl = bytes.find('\n');
    if (nl == std::string::npos)
        throw Error(ErrKind::IoFailure, "corrupt object: missing header line");
    ContextValue header = ContextValue::parse(bytes.substr(0, nl));
    ContextValue body = ContextValue::parse(bytes.substr(nl + 1));
    std::string kind = header.at("kind").get<std::string>();
    if (kind == "node")
        return NodeRecord::from_json(body);
    if (kind == "edge")
        return EdgeRecord::from_json(body);
    throw Error(ErrKind::IoFailure, "corrupt object: unknown kind '" + kind + "'");
}

} // namespace jacette

#endif
