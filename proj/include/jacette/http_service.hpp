// Copyright 2026 the Jacette developers
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#ifndef JACETTE_HTTP_SERVICE_HPP
#define JACETTE_HTTP_SERVICE_HPP

#include "jacette/jsorc.hpp"
#include "jacette/runtime.hpp"

#include <httplib.h>

namespace jacette {

inline int http_status_for(ErrKind kind) {
    switch (kind) {
    case ErrKind::NotFound:
    case ErrKind::UnknownWalker:
        return 404;
    case ErrKind::SyntaxError:
    case ErrKind::ResolutionError:
    case ErrKind::InvalidArgument:
    case ErrKind::UndeclaredField:
    case ErrKind::NotAWalker:
        return 400;
    case ErrKind::AccessDenied:
        return 403;
    default:
        return 500;
    }
}

// HTTP face of one Runtime. Public surface is three endpoints: run a
// walker, inject a walker, remove a walker; plus orchestrator status
// when an orchestrator is attached.
class HttpService {
  public:
    explicit HttpService(Runtime& runtime, Orchestrator* orchestrator = nullptr)
        : runtime_(runtime), orchestrator_(orchestrator) {
        server_.Post("/walker/run", [this](const httplib::Request& req, httplib::Response& res) {
            handle(res, [&] {
                ContextValue body = parse_body(req);
                std::string walker = body.at("walker").get<std::string>();
                ObjectId start = body.at("start_node").get<ObjectId>();
                ContextValue args = body.value("args", make_object());
                RunOutcome out = runtime_.run_walker(walker, start, args);
                ContextValue j = make_object();
                j["report"] = out.report;
                j["status"] = walker_status_name(out.status);
                j["elapsed_us"] = out.elapsed_us;
                return j;
            });
        });
        server_.Post("/walker/inject", [this](const httplib::Request& req,
                                              httplib::Response& res) {
            handle(res, [&] {
                ContextValue body = parse_body(req);
                std::string name = runtime_.inject(body.at("source").get<std::string>());
                ContextValue j = make_object();
                j["walker"] = name;
                return j;
            });
        });
        server_.Delete(R"(/walker/([A-Za-z_][A-Za-z0-9_]*))",
                       [this](const httplib::Request& req, httplib::Response& res) {
                           handle(res, [&] {
                               runtime_.remove(req.matches[1].str());
                               ContextValue j = make_object();
                               j["removed"] = req.matches[1].str();
                               return j;
                           });
                       });
        server_.Get("/jsorc/status", [this](const httplib::Request&, httplib::Response& res) {
            if (!orchestrator_) {
                ContextValue j = make_object();
                j["error"] = "orchestrator not running";
                res.status = 404;
                res.set_content(canonical_bytes(j), "application/json");
                return;
            }
            res.status = 200;
            res.set_content(canonical_bytes(orchestrator_->status_json()), "application/json");
        });
        server_.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
            res.status = 200;
            res.set_content("{\"ok\":true}", "application/json");
        });
    }

    // Binds and serves until stop(); call from a dedicated thread.
    bool listen(const std::string& host, int port) { return server_.listen(host, port); }

    bool bind(const std::string& host, int port) { return server_.bind_to_port(host, port); }
    // Binds an ephemeral port and returns it, or -1 on failure.
    int bind_any(const std::string& host) { return server_.bind_to_any_port(host); }
    bool serve_after_bind() { return server_.listen_after_bind(); }
    // Blocks until the listen loop is live (or has already given up).
    void wait_until_ready() { server_.wait_until_ready(); }

    void stop() { server_.stop(); }
    bool is_running() const { return server_.is_running(); }

  private:
    static ContextValue parse_body(const httplib::Request& req) {
        ContextValue body = ContextValue::parse(req.body, nullptr, false);
        if (body.is_discarded() || !body.is_object())
            throw Error(ErrKind::InvalidArgument, "request body must be a JSON object");
        return body;
    }

    template <typename Fn> void handle(httplib::Response& res, Fn&& fn) {
        try {
            ContextValue j = fn();
            res.status = 200;
            res.set_content(canonical_bytes(j), "application/json");
        } catch (const Error& e) {
            ContextValue j = make_object();
            j["error"] = e.what();
            j["kind"] = err_kind_name(e.kind);
            if (!e.name.empty())
                j["walker"] = e.name;
            if (!e.node_type.empty())
                j["node_type"] = e.node_type;
            res.status = http_status_for(e.kind);
            res.set_content(canonical_bytes(j), "application/json");
        } catch (const std::exception& e) {
            ContextValue j = make_object();
            j["error"] = e.what();
            res.status = 500;
            res.set_content(canonical_bytes(j), "application/json");
        }
    }

    Runtime& runtime_;
    Orchestrator* orchestrator_;
    httplib::Server server_;
};

} // namespace jacette

#endif
