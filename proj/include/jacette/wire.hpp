// Copyright 2026 the Jacette developers
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#ifndef JACETTE_WIRE_HPP
#define JACETTE_WIRE_HPP

#include <arpa/inet.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstring>
#include <functional>
#include <list>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "jacette/error.hpp"
#include "jacette/value.hpp"

namespace jacette {

// Wire framing: one JSON object per LF-terminated UTF-8 line.
// Request  {"id":u64,"action":string,"args":array}
// Response {"id":N,"ok":true,"result":R} or {"id":N,"ok":false,"error":msg}
// A line that is not a valid request gets an error response with id 0 and
// the connection stays open.

inline std::string wire_request(std::uint64_t id, const std::string& action,
                                const std::vector<ContextValue>& args) {
    ContextValue req = make_object();
    req["id"] = id;
    req["action"] = action;
    req["args"] = args;
    return canonical_bytes(req) + "\n";
}

inline std::string wire_ok(std::uint64_t id, const ContextValue& result) {
    ContextValue resp = make_object();
    resp["id"] = id;
    resp["ok"] = true;
    resp["result"] = result;
    return canonical_bytes(resp) + "\n";
}

inline std::string wire_error(std::uint64_t id, const std::string& message) {
    ContextValue resp = make_object();
    resp["id"] = id;
    resp["ok"] = false;
    resp["error"] = message;
    return canonical_bytes(resp) + "\n";
}

// Computes the response line for one request line. Pure; shared by the
// live server and the protocol-transcript tests.
inline std::string
wire_serve_line(const std::string& line,
                const std::function<ContextValue(const std::string&, const std::vector<ContextValue>&)>&
                    handler) {
    ContextValue req = ContextValue::parse(line, nullptr, false);
    if (req.is_discarded() || !req.is_object() || !req.contains("id") ||
        !req.at("id").is_number_unsigned() || !req.contains("action") ||
        !req.at("action").is_string() || !req.contains("args") || !req.at("args").is_array())
        return wire_error(0, "malformed request");
    std::uint64_t id = req.at("id").get<std::uint64_t>();
    std::string action = req.at("action").get<std::string>();
    std::vector<ContextValue> args;
    for (const auto& a : req.at("args"))
        args.push_back(a);
    try {
        return wire_ok(id, handler(action, args));
    } catch (const std::exception& e) {
        return wire_error(id, e.what());
    }
}

namespace net {

inline void write_all(int fd, const std::string& data) {
    std::size_t off = 0;
    while (off < data.size()) {
        ssize_t n = ::send(fd, data.data() + off, data.size() - off, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR)
                continue;
            throw Error(ErrKind::IoFailure, std::string("send failed: ") + std::strerror(errno));
        }
        off += static_cast<std::size_t>(n);
    }
}

// Reads one LF-terminated line (LF stripped). False on clean EOF at a
// line boundary; IoFailure on mid-line EOF, timeout, or socket error.
class LineReader {
  public:
    explicit LineReader(int fd) : fd_(fd) {}

    bool read_line(std::string& line) {
        for (;;) {
            auto nl = buf_.find('\n');
            if (nl != std::string::npos) {
                line.assign(buf_, 0, nl);
                buf_.erase(0, nl + 1);
                return true;
            }
            char chunk[4096];
            ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
            if (n < 0) {
                if (errno == EINTR)
                    continue;
                throw Error(ErrKind::IoFailure,
                            std::string("recv failed: ") + std::strerror(errno));
            }
            if (n == 0) {
                if (!buf_.empty())
                    throw Error(ErrKind::IoFailure, "connection closed mid-line");
                return false;
            }
            buf_.append(chunk, static_cast<std::size_t>(n));
        }
    }

  private:
    int fd_;
    std::string buf_;
};

} // namespace net

// TCP server speaking the wire protocol. One thread per connection;
// requests on a connection are answered in order. stop() closes the
// listener, lets each connection finish the request it is processing,
// and joins every thread.
class ActionServer {
  public:
    using Handler =
        std::function<ContextValue(const std::string&, const std::vector<ContextValue>&)>;

    ActionServer(std::uint16_t port, Handler handler) : handler_(std::move(handler)) {
        listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
        if (listen_fd_ < 0)
            throw Error(ErrKind::BindFailure,
                        std::string("socket failed: ") + std::strerror(errno));
        int one = 1;
        ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
        addr.sin_port = htons(port);
        if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) {
            int saved = errno;
            ::close(listen_fd_);
            listen_fd_ = -1;
            throw Error(ErrKind::BindFailure, "cannot bind port " + std::to_string(port) + ": " +
                                                  std::strerror(saved));
        }
        if (::listen(listen_fd_, 64) < 0) {
            int saved = errno;
            ::close(listen_fd_);
            listen_fd_ = -1;
            throw Error(ErrKind::BindFailure,
                        std::string("listen failed: ") + std::strerror(saved));
        }
        socklen_t len = sizeof addr;
        ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
        port_ = ntohs(addr.sin_port);
    }

    ~ActionServer() { stop(); }

    ActionServer(const ActionServer&) = delete;
    ActionServer& operator=(const ActionServer&) = delete;

    std::uint16_t port() const { return port_; }

    void start() {
        accept_thread_ = std::thread([this] { accept_loop(); });
    }

    void stop() {
        bool was_running = !stopping_.exchange(true);
        if (!was_running)
            return;
        if (listen_fd_ >= 0)
            ::shutdown(listen_fd_, SHUT_RDWR);
        if (accept_thread_.joinable())
            accept_thread_.join();
        if (listen_fd_ >= 0) {
            ::close(listen_fd_);
            listen_fd_ = -1;
        }
        std::list<Conn> conns;
        {
            std::lock_guard lk(conns_mx_);
            conns.swap(conns_);
        }
        for (Conn& c : conns) {
            // Stop reading new requests; the in-flight one still answers.
            ::shutdown(c.fd, SHUT_RD);
            if (c.thread.joinable())
                c.thread.join();
            ::close(c.fd);
        }
    }

    std::uint64_t requests_served() const { return served_.load(std::memory_order_relaxed); }

  private:
    struct Conn {
        int fd;
        std::thread thread;
        std::shared_ptr<std::atomic<bool>> done;
    };

    void accept_loop() {
        for (;;) {
            int fd = ::accept(listen_fd_, nullptr, nullptr);
            if (fd < 0) {
                if (errno == EINTR)
                    continue;
                return; // listener closed
            }
            if (stopping_.load()) {
                ::close(fd);
                return;
            }
            int one = 1;
            ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
            auto done = std::make_shared<std::atomic<bool>>(false);
            std::lock_guard lk(conns_mx_);
            reap_finished_locked();
            conns_.push_back(Conn{fd, {}, done});
            Conn& c = conns_.back();
            c.thread = std::thread([this, fd, done] {
                conn_loop(fd);
                done->store(true);
            });
        }
    }

    // Joins and closes connections whose threads already exited, so a
    // long-lived server does not accumulate dead fds.
    void reap_finished_locked() {
        for (auto it = conns_.begin(); it != conns_.end();) {
            if (it->done->load()) {
                if (it->thread.joinable())
                    it->thread.join();
                ::close(it->fd);
                it = conns_.erase(it);
            } else {
                ++it;
            }
        }
    }

    void conn_loop(int fd) {
        net::LineReader reader(fd);
        std::string line;
        try {
            while (reader.read_line(line)) {
                net::write_all(fd, wire_serve_line(line, handler_));
                served_.fetch_add(1, std::memory_order_relaxed);
            }
        } catch (const Error&) {
            // Peer vanished mid-line or the socket failed; drop quietly.
        }
    }

    Handler handler_;
    int listen_fd_ = -1;
    std::uint16_t port_ = 0;
    std::thread accept_thread_;
    std::atomic<bool> stopping_{false};
    std::atomic<std::uint64_t> served_{0};
    std::mutex conns_mx_;
    std::list<Conn> conns_;
};

// Client half of the protocol: one connection, sequential calls, lazy
// connect. Not thread-safe; give each thread its own client.
class WireClient {
  public:
    WireClient(std::string host, std::uint16_t port, int connect_timeout_ms = 1000,
               int io_timeout_ms = 10000)
        : host_(std::move(host)), port_(port), connect_timeout_ms_(connect_timeout_ms),
          io_timeout_ms_(io_timeout_ms) {}

    ~WireClient() { disconnect(); }

    WireClient(const WireClient&) = delete;
    WireClient& operator=(const WireClient&) = delete;
    WireClient(WireClient&& other) noexcept { *this = std::move(other); }
    WireClient& operator=(WireClient&& other) noexcept {
        if (this != &other) {
            disconnect();
            host_ = std::move(other.host_);
            port_ = other.port_;
            connect_timeout_ms_ = other.connect_timeout_ms_;
            io_timeout_ms_ = other.io_timeout_ms_;
            fd_ = other.fd_;
            reader_ = std::move(other.reader_);
            next_id_ = other.next_id_;
            other.fd_ = -1;
            other.reader_.reset();
        }
        return *this;
    }

    // One request/response exchange. Throws IoFailure on transport
    // problems (caller retries), ActionFailure on an ok:false response.
    // last_wire_bytes() reports the payload size of the exchange for the
    // per-byte delay model.
    ContextValue call(const std::string& action, const std::vector<ContextValue>& args) {
        ensure_connected();
        std::string req = wire_request(next_id_, action, args);
        std::string resp_line;
        try {
            net::write_all(fd_, req);
            if (!reader_->read_line(resp_line))
                throw Error(ErrKind::IoFailure, "connection closed before response");
        } catch (const Error&) {
            disconnect();
            throw;
        }
        last_wire_bytes_ = req.size() + resp_line.size() + 1;
        ContextValue resp = ContextValue::parse(resp_line, nullptr, false);
        if (resp.is_discarded() || !resp.is_object() || !resp.contains("id") ||
            !resp.contains("ok")) {
            disconnect();
            throw Error(ErrKind::IoFailure, "malformed response line");
        }
        if (resp.at("id").get<std::uint64_t>() != next_id_) {
            disconnect();
            throw Error(ErrKind::IoFailure, "response id mismatch");
        }
        ++next_id_;
        if (!resp.at("ok").get<bool>())
            throw Error(ErrKind::ActionFailure,
                        "action '" + action + "' failed remotely: " +
                            resp.at("error").get<std::string>())
                .with_name(action);
        return resp.at("result");
    }

    std::size_t last_wire_bytes() const { return last_wire_bytes_; }
    bool connected() const { return fd_ >= 0; }

    void disconnect() {
        reader_.reset();
        if (fd_ >= 0) {
            ::close(fd_);
            fd_ = -1;
        }
    }

  private:
    void ensure_connected() {
        if (fd_ >= 0)
            return;
        int fd = ::socket(AF_INET, SOCK_STREAM, 0);
        if (fd < 0)
            throw Error(ErrKind::IoFailure,
                        std::string("socket failed: ") + std::strerror(errno));
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_port = htons(port_);
        if (::inet_pton(AF_INET, host_.c_str(), &addr.sin_addr) != 1) {
            ::close(fd);
            throw Error(ErrKind::IoFailure, "bad host address: " + host_);
        }
        int flags = ::fcntl(fd, F_GETFL, 0);
        ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);
        int rc = ::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr);
        if (rc < 0 && errno != EINPROGRESS) {
            int saved = errno;
            ::close(fd);
            throw Error(ErrKind::IoFailure, "connect to " + host_ + ":" +
                                                std::to_string(port_) + " failed: " +
                                                std::strerror(saved));
        }
        if (rc < 0) {
            pollfd pfd{fd, POLLOUT, 0};
            int pr = ::poll(&pfd, 1, connect_timeout_ms_);
            int soerr = 0;
            socklen_t slen = sizeof soerr;
            if (pr > 0)
                ::getsockopt(fd, SOL_SOCKET, SO_ERROR, &soerr, &slen);
            if (pr <= 0 || soerr != 0) {
                ::close(fd);
                throw Error(ErrKind::IoFailure,
                            "connect to " + host_ + ":" + std::to_string(port_) + " failed: " +
                                (pr <= 0 ? "timeout" : std::strerror(soerr)));
            }
        }
        ::fcntl(fd, F_SETFL, flags);
        timeval tv{};
        tv.tv_sec = io_timeout_ms_ / 1000;
        tv.tv_usec = (io_timeout_ms_ % 1000) * 1000;
        ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
        ::setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof tv);
        int one = 1;
        ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
        fd_ = fd;
        reader_ = std::make_unique<net::LineReader>(fd_);
    }

    std::string host_;
    std::uint16_t port_ = 0;
    int connect_timeout_ms_ = 1000;
    int io_timeout_ms_ = 10000;
    int fd_ = -1;
    std::unique_ptr<net::LineReader> reader_;
    std::uint64_t next_id_ = 1;
    std::size_t last_wire_bytes_ = 0;
};

} // namespace jacette

#endif
