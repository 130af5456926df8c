// Copyright 2026 the Jacette developers
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#ifndef JACETTE_SCHEMA_HPP
#define JACETTE_SCHEMA_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "jacette/error.hpp"
#include "jacette/value.hpp"

namespace jacette {

// Declared shape of a node type: ordered `has` fields, optional walker
// access whitelist, and actions callable while a walker sits on it.
struct NodeType {
    std::string name;
    std::vector<std::string> has_fields;
    std::optional<std::set<std::string>> access;
    std::vector<std::string> can_actions;
};

struct EdgeType {
    std::string name;
    std::vector<std::string> has_fields;
};

// The closed schema all graph objects are validated against. Context keys
// are exactly the declared fields, in declaration order; undeclared keys are
// rejected, missing keys default to null.
class Schema {
  public:
    void add_node_type(NodeType t) { nodes_[t.name] = std::move(t); }
    void add_edge_type(EdgeType t) { edges_[t.name] = std::move(t); }

    bool has_node_type(const std::string& name) const { return nodes_.count(name) != 0; }
    bool has_edge_type(const std::string& name) const { return edges_.count(name) != 0; }

    const NodeType& node_type(const std::string& name) const {
        auto it = nodes_.find(name);
        if (it == nodes_.end())
            throw Error(ErrKind::UnknownType, "unknown node type: " + name).with_name(name);
        return it->second;
    }

    const EdgeType& edge_type(const std::string& name) const {
        auto it = edges_.find(name);
        if (it == edges_.end())
            throw Error(ErrKind::UnknownType, "unknown edge type: " + name).with_name(name);
        return it->second;
    }

    const std::map<std::string, NodeType>& node_types() const { return nodes_; }
    const std::map<std::string, EdgeType>& edge_types() const { return edges_; }

    // Builds a full context object for `type_name` from the provided partial
    // map: declared keys in declaration order, missing ones null.
    static ContextValue make_context(const std::vector<std::string>& declared,
                                     const ContextValue& provided,
                                     const std::string& type_name) {
        if (!provided.is_null() && !provided.is_object())
            throw Error(ErrKind::InvalidArgument, "context must be a map");
        ContextValue out = make_object();
        for (const auto& f : declared)
            out[f] = nullptr;
        if (provided.is_object()) {
            for (auto it = provided.begin(); it != provided.end(); ++it) {
                if (!out.contains(it.key()))
                    throw Error(ErrKind::UndeclaredField,
                                "field '" + it.key() + "' is not declared on type '" +
                                    type_name + "'")
                        .with_name(it.key());
                out[it.key()] = it.value();
            }
        }
        return out;
    }

  private:
    std::map<std::string, NodeType> nodes_;
    std::map<std::string, EdgeType> edges_;
};

} // namespace jacette

#endif
