// Copyright 2026 The Jacette Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Action registry, wire protocol, and latency model tests. The wire goldens
// are byte-exact on purpose: remote peers depend on the framing.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include "jacette/actions.hpp"
#include "jacette/metrics.hpp"

using namespace jacette;

namespace {

ActionSpec spec_of(std::string name, LocalImpl impl, std::uint64_t mem = 0) {
    ActionSpec s;
    s.name = std::move(name);
    s.impl = std::move(impl);
    s.mem_footprint_bytes = mem;
    return s;
}

ActionRegistry& builtin_registry() {
    static ActionRegistry reg;
    static bool seeded = [] {
        auto concat = spec_of("concat", builtin_concat, 1024);
        concat.profile_args = {ContextValue("a"), ContextValue("b")};
        reg.register_action(std::move(concat));
        auto summarize = spec_of("summarize", builtin_summarize, 2048);
        summarize.profile_args = {ContextValue("profile sample. tail")};
        reg.register_action(std::move(summarize));
        auto synth = spec_of("synth", builtin_synth, 4096);
        synth.profile_args = {ContextValue(0.0), ContextValue(1)};
        reg.register_action(std::move(synth));
        return true;
    }();
    (void)seeded;
    return reg;
}

} // namespace

TEST_CASE("builtin actions behave per contract") {
    CHECK(builtin_concat({ContextValue("foo"), ContextValue("bar")}).get<std::string>() == "foobar");
    CHECK(builtin_concat({}).get<std::string>() == "");
    CHECK_THROWS_AS(builtin_concat({ContextValue(1)}), Error);

    CHECK(builtin_summarize({ContextValue("  First one. Second one.")}).get<std::string>() ==
          "First one.");
    CHECK(builtin_summarize({ContextValue("no period here")}).get<std::string>() ==
          "no period here");
    CHECK(builtin_summarize({ContextValue("   \t\n ")}).get<std::string>() == "");
    CHECK_THROWS_AS(builtin_summarize({}), Error);
    CHECK_THROWS_AS(builtin_summarize({ContextValue(3)}), Error);

    CHECK(builtin_synth({ContextValue(0.0), ContextValue(16)}).get<std::string>() ==
          std::string(16, 'x'));
    CHECK(builtin_synth({ContextValue(0.0), ContextValue(0)}).get<std::string>() == "");
    CHECK_THROWS_AS(builtin_synth({ContextValue(-1.0), ContextValue(4)}), Error);
    CHECK_THROWS_AS(builtin_synth({ContextValue(0.0), ContextValue(-4)}), Error);
    CHECK_THROWS_AS(builtin_synth({ContextValue("x"), ContextValue(4)}), Error);
}

TEST_CASE("registry registration rules") {
    ActionRegistry reg;
    CHECK_THROWS_AS(reg.register_action(spec_of("", builtin_concat)), Error);
    CHECK_THROWS_AS(reg.register_action(spec_of("broken", nullptr)), Error);

    reg.register_action(spec_of("b", builtin_concat));
    reg.register_action(spec_of("a", builtin_concat));
    CHECK(reg.has("a"));
    CHECK(reg.has("b"));
    CHECK_FALSE(reg.has("c"));
    // names() preserves registration order, not lexical order.
    CHECK(reg.names() == std::vector<std::string>{"b", "a"});

    // Re-registering replaces the spec but keeps the slot.
    auto repl = spec_of("b", builtin_summarize, 777);
    reg.register_action(std::move(repl));
    CHECK(reg.names() == std::vector<std::string>{"b", "a"});
    CHECK(reg.spec("b")->mem_footprint_bytes == 777);

    CHECK_THROWS_AS(reg.spec("nope"), Error);
    CHECK_THROWS_AS(reg.rebind("nope", Binding{}), Error);
    CHECK_THROWS_AS(reg.set_delay("nope", DelayParams{}), Error);
    try {
        reg.spec("nope");
    } catch (const Error& e) {
        CHECK(e.kind == ErrKind::UnknownAction);
        CHECK(e.name == "nope");
    }
}

TEST_CASE("wire frame goldens are byte exact") {
    CHECK(wire_request(7, "concat", {ContextValue("a"), ContextValue("b")}) ==
          "{\"id\":7,\"action\":\"concat\",\"args\":[\"a\",\"b\"]}\n");
    CHECK(wire_ok(1, ContextValue("ab")) == "{\"id\":1,\"ok\":true,\"result\":\"ab\"}\n");
    CHECK(wire_error(2, "unknown action") ==
          "{\"id\":2,\"ok\":false,\"error\":\"unknown action\"}\n");
    CHECK(wire_error(0, "malformed request") ==
          "{\"id\":0,\"ok\":false,\"error\":\"malformed request\"}\n");
}

TEST_CASE("wire_serve_line handles good, bad, and ugly lines") {
    auto& reg = builtin_registry();
    auto handler = [&reg](const std::string& n, const std::vector<ContextValue>& a) {
        return reg.serve_local(n, a);
    };

    CHECK(wire_serve_line(R"({"id":7,"action":"concat","args":["a","b"]})", handler) ==
          "{\"id\":7,\"ok\":true,\"result\":\"ab\"}\n");
    CHECK(wire_serve_line(R"({"id":9,"action":"nope","args":[]})", handler) ==
          "{\"id\":9,\"ok\":false,\"error\":\"unknown action\"}\n");

    // Every malformed shape maps to id 0 so the client can fail the oldest
    // pending call without guessing.
    for (const char* bad : {
             "this is not json",
             "",
             "[1,2,3]",
             R"({"action":"concat","args":[]})",
             R"({"id":1,"args":[]})",
             R"({"id":1,"action":"concat"})",
             R"({"id":1,"action":"concat","args":"notalist"})",
             R"({"id":"x","action":"concat","args":[]})",
             R"({"id":-3,"action":"concat","args":[]})",
         }) {
        CAPTURE(bad);
        CHECK(wire_serve_line(bad, handler) ==
              "{\"id\":0,\"ok\":false,\"error\":\"malformed request\"}\n");
    }

    // Action failures surface as error frames with the action's message.
    std::string out = wire_serve_line(R"({"id":4,"action":"summarize","args":[1]})", handler);
    CHECK(out == "{\"id\":4,\"ok\":false,\"error\":\"summarize expects one string argument\"}\n");
}

TEST_CASE("server round trip and connection reuse after an error") {
    auto& reg = builtin_registry();
    auto server = serve_actions(0, reg);
    REQUIRE(server->port() != 0);

    WireClient c("127.0.0.1", server->port());
    CHECK(c.call("concat", {ContextValue("x"), ContextValue("y")}).get<std::string>() == "xy");

    try {
        c.call("nope", {});
        FAIL("expected remote error");
    } catch (const Error& e) {
        CHECK(e.kind == ErrKind::ActionFailure);
        CHECK(std::string(e.what()).find("unknown action") != std::string::npos);
    }
    // The error was a response, not a disconnect: the same connection keeps working.
    CHECK(c.call("concat", {ContextValue("1"), ContextValue("2")}).get<std::string>() == "12");
    CHECK(c.call("summarize", {ContextValue("first. rest")}).get<std::string>() == "first.");

    server->stop();
}

TEST_CASE("binding transparency: identical bytes local and remote") {
    auto& reg = builtin_registry();
    auto server = serve_actions(0, reg);

    struct Probe {
        const char* name;
        std::vector<ContextValue> args;
    };
    std::vector<Probe> probes = {
        {"concat", {ContextValue("alpha "), ContextValue("beta")}},
        {"summarize", {ContextValue(" lead sentence. trailing text")}},
        {"synth", {ContextValue(0.0), ContextValue(48)}},
    };
    for (const auto& p : probes) {
        CAPTURE(p.name);
        reg.rebind(p.name, Binding{BindingKind::Local, "127.0.0.1", 0});
        std::string local = canonical_bytes(reg.call(p.name, p.args));
        reg.rebind(p.name, Binding{BindingKind::Remote, "127.0.0.1", server->port()});
        std::string remote = canonical_bytes(reg.call(p.name, p.args));
        CHECK(local == remote);
        reg.rebind(p.name, Binding{BindingKind::Local, "127.0.0.1", 0});
    }
    server->stop();
}

TEST_CASE("rebind under concurrent callers never corrupts a result") {
    ActionRegistry reg;
    reg.register_action(spec_of("concat", builtin_concat));
    auto server = serve_actions(0, reg);
    std::uint16_t port = server->port();

    std::atomic<bool> stop{false};
    std::atomic<int> failures{0};
    std::vector<std::thread> callers;
    for (int t = 0; t < 4; ++t) {
        callers.emplace_back([&] {
            while (!stop.load()) {
                ContextValue v = reg.call("concat", {ContextValue("le"), ContextValue("ft")});
                if (v.get<std::string>() != "left")
                    failures.fetch_add(1);
            }
        });
    }
    for (int i = 0; i < 200; ++i) {
        reg.rebind("concat", Binding{i % 2 ? BindingKind::Remote : BindingKind::Local,
                                     "127.0.0.1", port});
        std::this_thread::sleep_for(std::chrono::microseconds(200));
    }
    stop.store(true);
    for (auto& th : callers)
        th.join();
    CHECK(failures.load() == 0);
    server->stop();
}

TEST_CASE("remote call against a dead port fails after bounded retries") {
    ActionRegistry reg;
    reg.register_action(spec_of("ping", [](const std::vector<ContextValue>&) {
        return ContextValue(1);
    }));
    // Port 1 is never listening in the sandbox.
    reg.rebind("ping", Binding{BindingKind::Remote, "127.0.0.1", 1});
    try {
        reg.call("ping", {});
        FAIL("expected transport failure");
    } catch (const Error& e) {
        CHECK(e.kind == ErrKind::ActionFailure);
        CHECK(std::string(e.what()).find("3 attempts") != std::string::npos);
        CHECK(e.name == "ping");
    }
}

TEST_CASE("delay model shapes measured latency") {
    ActionRegistry reg;
    auto fast = spec_of("fast", [](const std::vector<ContextValue>&) { return ContextValue(1); });
    fast.delay.local_extra_us = 20000;
    reg.register_action(std::move(fast));

    auto t0 = std::chrono::steady_clock::now();
    reg.call("fast", {});
    double us = std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - t0)
                    .count();
    CHECK(us >= 20000.0);
    CHECK(us < 200000.0);

    // Remote delay: fixed plus per-byte on the response payload.
    auto server = serve_actions(0, reg);
    DelayParams d;
    d.remote_fixed_us = 30000;
    reg.set_delay("fast", d);
    reg.rebind("fast", Binding{BindingKind::Remote, "127.0.0.1", server->port()});
    t0 = std::chrono::steady_clock::now();
    reg.call("fast", {});
    us = std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - t0).count();
    CHECK(us >= 30000.0);
    server->stop();
}

TEST_CASE("profiles estimate the local/remote latency ratio") {
    ActionRegistry reg;
    double compute_ms = 8.0;
    auto work = spec_of("work", [compute_ms](const std::vector<ContextValue>&) {
        return builtin_synth({ContextValue(compute_ms), ContextValue(8)});
    });
    work.delay.remote_fixed_us = 16000;
    reg.register_action(std::move(work));
    auto server = serve_actions(0, reg);

    ActionProfile p = reg.profile("work", 4, "127.0.0.1", server->port());
    CHECK(p.name == "work");
    CHECK(p.local_latency_us > 7000);
    CHECK(p.local_latency_us < 16000);
    // Remote adds ~16ms to ~8ms of compute: cc near 3.
    CHECK(p.cc > 2.0);
    CHECK(p.cc < 4.5);

    // Round trip through JSON preserves the numbers.
    ActionProfile back = ActionProfile::from_json(p.to_json());
    CHECK(back.name == p.name);
    CHECK(back.local_latency_us == doctest::Approx(p.local_latency_us));
    CHECK(back.cc == doctest::Approx(p.cc));

    CHECK_THROWS_AS(reg.profile("work", 0, "127.0.0.1", server->port()), Error);
    server->stop();
}

TEST_CASE("metrics recorder sees every dispatched call") {
    MetricsRecorder metrics;
    ActionRegistry reg(&metrics);
    reg.register_action(spec_of("noop", [](const std::vector<ContextValue>&) {
        return ContextValue(nullptr);
    }));
    for (int i = 0; i < 5; ++i)
        reg.call("noop", {});
    auto s = metrics.since_seq("act.noop.local", 0);
    CHECK(s.count == 5);
    CHECK(s.mean_us >= 0.0);
}

TEST_CASE("manifest parsing accepts the documented shapes only") {
    ContextValue good = ContextValue::parse(R"([
        {"name":"concat","mem_footprint_bytes":512,"kind":"builtin"},
        {"name":"brief","kind":"builtin","params":{"which":"summarize","local_extra_us":50}},
        {"name":"enrich","mem_footprint_bytes":4096,"kind":"synth",
         "params":{"compute_ms":0.0,"payload_bytes":32,"remote_fixed_us":100}}
    ])");
    auto specs = manifest_to_specs(good);
    REQUIRE(specs.size() == 3);
    CHECK(specs[0].name == "concat");
    CHECK(specs[0].mem_footprint_bytes == 512);
    CHECK(specs[1].delay.local_extra_us == 50);
    CHECK(specs[1].impl({ContextValue("top. rest")}).get<std::string>() == "top.");
    CHECK(specs[2].delay.remote_fixed_us == 100);
    CHECK(specs[2].impl({}).get<std::string>().size() == 32);

    for (const char* bad : {
             R"({"name":"x"})",
             R"([{"kind":"builtin"}])",
             R"([{"name":"x"}])",
             R"([{"name":"x","kind":"mystery"}])",
             R"([{"name":"x","kind":"builtin","params":{"which":"unheard_of"}}])",
         }) {
        CAPTURE(bad);
        CHECK_THROWS_AS(manifest_to_specs(ContextValue::parse(bad)), Error);
    }

    CHECK_THROWS_AS(load_manifest_file("/nonexistent/actions.json"), Error);

    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "jacette" / "test_actions";
    fs::create_directories(dir);
    fs::path mf = dir / "manifest.json";
    {
        std::FILE* f = std::fopen(mf.string().c_str(), "wb");
        REQUIRE(f);
        const char* body = R"([{"name":"concat","kind":"builtin","mem_footprint_bytes":9}])";
        std::fwrite(body, 1, std::strlen(body), f);
        std::fclose(f);
    }
    auto loaded = load_manifest_file(mf.string());
    REQUIRE(loaded.size() == 1);
    CHECK(loaded[0].mem_footprint_bytes == 9);
}
