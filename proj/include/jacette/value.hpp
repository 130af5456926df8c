// Copyright 2026 the Jacette developers
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#ifndef JACETTE_VALUE_HPP
#define JACETTE_VALUE_HPP

#include <cstdint>
#include <string>

#include "json.hpp"

namespace jacette {

// Dynamic value type for node/edge contexts, walker state and reports:
// null | bool | int64 | double | string | list | ordered map.
// nlohmann's ordered_json keeps object keys in insertion order, which is what
// the canonical byte form below relies on.
using ContextValue = nlohmann::ordered_json;

// Canonical serialization: UTF-8 JSON, keys in insertion order, no
// whitespace, floats in shortest round-trip decimal form. Equal values
// produce identical bytes; the byte length of a context under this encoding
// is the "context data size" the fast-edge threshold is compared against.
inline std::string canonical_bytes(const ContextValue& v) { return v.dump(); }

inline std::size_t canonical_size(const ContextValue& v) { return v.dump().size(); }

inline ContextValue make_object() { return ContextValue::object(); }

inline std::string value_type_name(const ContextValue& v) {
    if (v.is_null()) return "null";
    if (v.is_boolean()) return "bool";
    if (v.is_number_integer() || v.is_number_unsigned()) return "int";
    if (v.is_number_float()) return "float";
    if (v.is_string()) return "string";
    if (v.is_array()) return "list";
    if (v.is_object()) return "map";
    return "value";
}

} // namespace jacette

#endif
