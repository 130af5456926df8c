// Copyright 2026 the Jacette developers
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#ifndef JACETTE_ERROR_HPP
#define JACETTE_ERROR_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace jacette {

enum class ErrKind {
    UnknownType,
    UndeclaredField,
    DanglingEndpoint,
    NotFound,
    IoFailure,
    SyntaxError,
    ResolutionError,
    NotAWalker,
    UnknownWalker,
    UnknownAction,
    AccessDenied,
    ActionFailure,
    RuntimeTypeError,
    BindFailure,
    NoFeasibleConfig,
    InvalidArgument,
};

inline const char* err_kind_name(ErrKind k) {
    switch (k) {
        case ErrKind::UnknownType: return "UnknownType";
        case ErrKind::UndeclaredField: return "UndeclaredField";
        case ErrKind::DanglingEndpoint: return "DanglingEndpoint";
        case ErrKind::NotFound: return "NotFound";
        case ErrKind::IoFailure: return "IoFailure";
        case ErrKind::SyntaxError: return "SyntaxError";
        case ErrKind::ResolutionError: return "ResolutionError";
        case ErrKind::NotAWalker: return "NotAWalker";
        case ErrKind::UnknownWalker: return "UnknownWalker";
        case ErrKind::UnknownAction: return "UnknownAction";
        case ErrKind::AccessDenied: return "AccessDenied";
        case ErrKind::ActionFailure: return "ActionFailure";
        case ErrKind::RuntimeTypeError: return "RuntimeTypeError";
        case ErrKind::BindFailure: return "BindFailure";
        case ErrKind::NoFeasibleConfig: return "NoFeasibleConfig";
        case ErrKind::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

// Single exception type for all runtime and language errors. The kind tag
// plus the optional structured fields below carry everything the CLI and
// HTTP layers need to render an error payload.
class Error : public std::runtime_error {
  public:
    Error(ErrKind kind, std::string message)
        : std::runtime_error(std::move(message)), kind(kind) {}

    ErrKind kind;

    // Parser position info (SyntaxError / ResolutionError). 1-based.
    int line = 0;
    int col = 0;
    std::vector<std::string> expected;
    std::string found;

    // Subject names (AccessDenied carries both; most errors fill `name`).
    std::string name;
    std::string node_type;

    Error& at(int l, int c) {
        line = l;
        col = c;
        return *this;
    }
    Error& with_name(std::string n) {
        name = std::move(n);
        return *this;
    }
};

} // namespace jacette

#endif
