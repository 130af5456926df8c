// Copyright 2026 the jacette authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or
// implied. See the License for the specific language governing
// permissions and limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <jacette/interp.hpp>
#include <jacette/printer.hpp>

#include "ast_gen.hpp"

#include <deque>
#include <filesystem>
#include <random>
#include <set>

using namespace jacette;

namespace {

std::string fresh_dir(const std::string& leaf) {
    auto p = std::filesystem::temp_directory_path() / "jacette_test_lang" / leaf;
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p.string();
}

Schema schema_of(const Program& p) {
    Schema s;
    for (const auto& n : p.node_decls) {
        std::optional<std::set<std::string>> acc;
        if (n.access_walkers)
            acc = std::set<std::string>(n.access_walkers->begin(), n.access_walkers->end());
        s.add_node_type(NodeType{n.name, n.has_fields, acc, n.can_actions});
    }
    for (const auto& e : p.edge_decls)
        s.add_edge_type(EdgeType{e.name, e.has_fields});
    return s;
}

ActionFn no_actions() {
    return [](const std::string& n, const std::vector<ContextValue>&) -> ContextValue {
        throw Error(ErrKind::UnknownAction, "no actions wired: " + n);
    };
}

struct Fixture {
    Program prog;
    Graph graph;
    WalkerRegistry registry;

    Fixture(const std::string& source, const std::string& dir,
            std::size_t fast_edge_threshold = 128)
        : prog(parse(source)), graph(schema_of(prog), [&] {
              TierConfig cfg;
              cfg.store_path = dir;
              cfg.fast_edge_threshold = fast_edge_threshold;
              return cfg;
          }()) {
        for (auto& w : prog.walker_decls)
            registry.install(w);
    }

    std::vector<ContextValue> run(const std::string& walker, ObjectId start,
                                  ContextValue args = nullptr,
                                  ActionFn fn = no_actions()) {
        WalkerEngine eng(graph, std::move(fn));
        auto inst = eng.spawn(registry, walker, start, std::move(args));
        return eng.run(inst);
    }
};

}  // namespace

TEST_CASE("declarations parse into the expected shapes") {
    Program p = parse("node day access(elf) { has date; can warm; }\n"
                      "edge next { has gap; }\n"
                      "walker elf { has sack; can warm; report sack; }\n");
    REQUIRE(p.node_decls.size() == 1);
    CHECK(p.node_decls[0].name == "day");
    CHECK(p.node_decls[0].has_fields == std::vector<std::string>{"date"});
    REQUIRE(p.node_decls[0].access_walkers.has_value());
    CHECK(*p.node_decls[0].access_walkers == std::vector<std::string>{"elf"});
    CHECK(p.node_decls[0].can_actions == std::vector<std::string>{"warm"});
    REQUIRE(p.edge_decls.size() == 1);
    CHECK(p.edge_decls[0].has_fields == std::vector<std::string>{"gap"});
    REQUIRE(p.walker_decls.size() == 1);
    CHECK(p.walker_decls[0].body.size() == 1);
}

TEST_CASE("syntax errors carry position, expectation and found token") {
    try {
        parse("node day { has date }");
        FAIL("expected a syntax error");
    } catch (const Error& e) {
        CHECK(e.kind == ErrKind::SyntaxError);
        CHECK(e.line == 1);
        CHECK(e.col == 21);
        CHECK(e.expected == std::vector<std::string>{"';'"});
        CHECK(e.found == "'}'");
    }
    try {
        parse("walker w {\n  has x;\n  x = ;\n}");
        FAIL("expected a syntax error");
    } catch (const Error& e) {
        CHECK(e.kind == ErrKind::SyntaxError);
        CHECK(e.line == 3);
    }
    CHECK_THROWS_AS(parse("walker w { report 1 + ; }"), Error);
    CHECK_THROWS_AS(parse("walker"), Error);
    CHECK_THROWS_AS(parse("walker w { take ---> ; }"), Error);
}

TEST_CASE("operator precedence matches the printed canonical form") {
    Program q = parse("walker w { has a, b, c;"
                      " a = a + b * c;"
                      " b = (a + b) * c;"
                      " c = not a == b;"
                      " a = a or b and c;"
                      " b = -a[0] + b;"
                      " c = a < b == c; }");
    std::string qs = pretty_print(q);
    CHECK(qs.find("a = a + b * c;") != std::string::npos);
    CHECK(qs.find("b = (a + b) * c;") != std::string::npos);
    CHECK(qs.find("c = not a == b;") != std::string::npos);
    CHECK(qs.find("a = a or b and c;") != std::string::npos);
    CHECK(qs.find("b = -a[0] + b;") != std::string::npos);
    CHECK(qs.find("c = a < b == c;") != std::string::npos);
    CHECK(parse(qs) == q);
}

TEST_CASE("comments are ignored by the lexer") {
    Program p = parse("// leading note\nwalker w { // trailing\n  report 1; // after\n}\n");
    REQUIRE(p.walker_decls.size() == 1);
    CHECK(p.walker_decls[0].body.size() == 1);
}

TEST_CASE("resolution errors name the offending reference") {
    auto kind_of = [](const std::string& src) {
        try {
            parse(src);
        } catch (const Error& e) {
            return e.kind;
        }
        return ErrKind::InvalidArgument;
    };
    CHECK(kind_of("walker w { x = 1; }") == ErrKind::ResolutionError);
    CHECK(kind_of("walker w { take -->:nope; }") == ErrKind::ResolutionError);
    CHECK(kind_of("walker w { take -->(ghost); }") == ErrKind::ResolutionError);
    CHECK(kind_of("walker w { has x; x = f(1); }") == ErrKind::ResolutionError);
    CHECK(kind_of("edge e {} walker w { spawn here ++>:e ghost {}; }") ==
          ErrKind::ResolutionError);
    CHECK(kind_of("node n {} walker w { spawn here ++>:ghost n {}; }") ==
          ErrKind::ResolutionError);
    CHECK(kind_of("walker w { has x; for t in x { t = 1; } }") == ErrKind::ResolutionError);
    CHECK(kind_of("node n { has a; } walker w { spawn here ++>:e0 n { b = 1; }; } edge e0 {}") ==
          ErrKind::ResolutionError);
    // A node-level can whitelists the action for every walker.
    CHECK_NOTHROW(parse("node n { can f; } walker w { has x; x = f(1); }"));
    // Duplicate declarations collide.
    CHECK_THROWS_AS(parse("node n {} node n {}"), Error);
    CHECK_THROWS_AS(parse("walker w {} walker w {}"), Error);
}

TEST_CASE("single-walker extraction accepts exactly one walker") {
    WalkerDecl wd = parse_single_walker("walker lone { has z; report z; }");
    CHECK(wd.name == "lone");
    CHECK_THROWS_AS(parse_single_walker("node n { has a; }"), Error);
    CHECK_THROWS_AS(parse_single_walker("walker a {} walker b {}"), Error);
    try {
        parse_single_walker("node n {}");
    } catch (const Error& e) {
        CHECK(e.kind == ErrKind::NotAWalker);
    }
}

TEST_CASE("generated programs round-trip through print and parse") {
    for (std::uint64_t seed = 1; seed <= 600; ++seed) {
        jacette_test::AstGen gen(seed);
        Program p = gen.program();
        std::string printed = pretty_print(p);
        CAPTURE(seed);
        CAPTURE(printed);
        Program back = parse(printed);
        REQUIRE(back == p);
        REQUIRE(pretty_print(back) == printed);
    }
}

TEST_CASE("mutated sources fail with in-bounds positions or parse cleanly") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 300; ++trial) {
        jacette_test::AstGen gen(1000 + trial);
        std::string src = pretty_print(gen.program());
        std::size_t pos = rng() % src.size();
        // Deleting a closing brace shifts every later declaration into the
        // open block; the error then lands far from the deletion point but
        // must still be in bounds, so only skip positions that leave the
        // source empty.
        if (src[pos] == '}')
            continue;
        std::string mutated = src.substr(0, pos) + src.substr(pos + 1);
        if (mutated.empty())
            continue;
        std::size_t lines = 1 + std::count(mutated.begin(), mutated.end(), '\n');
        try {
            parse(mutated);
        } catch (const Error& e) {
            CAPTURE(trial);
            CAPTURE(pos);
            CHECK((e.kind == ErrKind::SyntaxError || e.kind == ErrKind::ResolutionError));
            if (e.kind == ErrKind::SyntaxError) {
                CHECK(e.line >= 1);
                CHECK(static_cast<std::size_t>(e.line) <= lines + 1);
                CHECK(e.col >= 1);
            }
        }
    }
}

TEST_CASE("traversal matches a reference breadth-first oracle") {
    const char* src = "node item { has k; }\n"
                      "edge link {}\n"
                      "walker bfs { report here.k; take -->; }\n";
    std::mt19937_64 rng(4242);
    for (int trial = 0; trial < 40; ++trial) {
        Fixture fx(src, fresh_dir("oracle" + std::to_string(trial)));
        std::size_t n = 2 + rng() % 10;
        std::vector<ObjectId> nodes;
        for (std::size_t i = 0; i < n; ++i)
            nodes.push_back(
                fx.graph.create_node("item", {{"k", static_cast<std::int64_t>(i)}}));
        // adjacency[i] in edge-creation order == ascending edge id.
        std::vector<std::vector<std::size_t>> adj(n);
        std::size_t edges = n + rng() % (2 * n);
        for (std::size_t i = 0; i < edges; ++i) {
            std::size_t a = rng() % n, b = rng() % n;
            if (a == b)
                continue;
            fx.graph.create_edge("link", nodes[a], nodes[b], {});
            adj[a].push_back(b);
        }
        fx.graph.commit();

        std::size_t start = rng() % n;
        std::deque<std::size_t> queue{start};
        std::set<std::size_t> seen{start};
        std::vector<ContextValue> expect;
        while (!queue.empty()) {
            std::size_t cur = queue.front();
            queue.pop_front();
            expect.push_back(static_cast<std::int64_t>(cur));
            for (std::size_t nb : adj[cur])
                if (seen.insert(nb).second)
                    queue.push_back(nb);
        }
        CAPTURE(trial);
        REQUIRE(fx.run("bfs", nodes[start]) == expect);
    }
}

TEST_CASE("repeat runs and fusion settings do not change reports") {
    const char* src = "node item { has k; }\n"
                      "edge link { has tag; }\n"
                      "walker scan { report here.k; take -->; }\n";
    auto build = [](Fixture& fx) {
        auto a = fx.graph.create_node("item", {{"k", 1}});
        auto b = fx.graph.create_node("item", {{"k", 2}});
        auto c = fx.graph.create_node("item", {{"k", 3}});
        fx.graph.create_edge("link", a, b, {{"tag", "x"}});
        fx.graph.create_edge("link", a, c, {{"tag", "y"}});
        fx.graph.create_edge("link", c, b, {{"tag", "z"}});
        fx.graph.commit();
        return a;
    };
    Fixture fused(src, fresh_dir("det_fused"), 128);
    Fixture plain(src, fresh_dir("det_plain"), 0);
    auto fa = build(fused);
    auto pa = build(plain);
    auto r1 = fused.run("scan", fa);
    auto r2 = fused.run("scan", fa);
    auto r3 = plain.run("scan", pa);
    CHECK(r1 == r2);
    CHECK(ContextValue(r1).dump() == ContextValue(r3).dump());
}

TEST_CASE("cycles are visited once") {
    const char* src = "node item { has k; }\nedge link {}\n"
                      "walker loop { report here.k; take -->; }\n";
    Fixture fx(src, fresh_dir("cycle"));
    auto a = fx.graph.create_node("item", {{"k", 1}});
    auto b = fx.graph.create_node("item", {{"k", 2}});
    fx.graph.create_edge("link", a, b, {});
    fx.graph.create_edge("link", b, a, {});
    fx.graph.commit();
    CHECK(fx.run("loop", a) == std::vector<ContextValue>{1, 2});
}

TEST_CASE("disengage stops mid-statement-list and skips the queue") {
    const char* src = "node item { has k; }\nedge link {}\n"
                      "walker quit { report 1; disengage; report 2; }\n"
                      "walker spread { take -->; report here.k; disengage; }\n";
    Fixture fx(src, fresh_dir("disengage"));
    auto a = fx.graph.create_node("item", {{"k", 1}});
    auto b = fx.graph.create_node("item", {{"k", 2}});
    fx.graph.create_edge("link", a, b, {});
    fx.graph.commit();

    WalkerEngine eng(fx.graph, no_actions());
    auto inst = eng.spawn(fx.registry, "quit", a, nullptr);
    CHECK(eng.run(inst) == std::vector<ContextValue>{1});
    CHECK(inst.status == WalkerStatus::Disengaged);
    CHECK(inst.visited.size() == 1);

    // The queue had b waiting; disengage on the first visit drops it.
    auto inst2 = eng.spawn(fx.registry, "spread", a, nullptr);
    CHECK(eng.run(inst2) == std::vector<ContextValue>{1});
}

TEST_CASE("access lists deny foreign walkers at visit time and name both sides") {
    const char* src = "node item { has k; }\n"
                      "node vault access(keeper) { has k; }\n"
                      "edge link {}\n"
                      "walker sneak { take -->; report here.k; }\n"
                      "walker keeper { take -->; report here.k; }\n";
    Fixture fx(src, fresh_dir("access"));
    auto a = fx.graph.create_node("item", {{"k", 1}});
    auto v = fx.graph.create_node("vault", {{"k", 9}});
    fx.graph.create_edge("link", a, v, {});
    fx.graph.commit();

    WalkerEngine eng(fx.graph, no_actions());
    // Spawning on an allowed node succeeds; the denial fires at visit time.
    auto inst = eng.spawn(fx.registry, "sneak", a, nullptr);
    try {
        eng.run(inst);
        FAIL("expected AccessDenied");
    } catch (const Error& e) {
        CHECK(e.kind == ErrKind::AccessDenied);
        CHECK(e.name == "sneak");
        CHECK(e.node_type == "vault");
    }
    CHECK(inst.status == WalkerStatus::Failed);
    CHECK(fx.run("keeper", a) == std::vector<ContextValue>{1, 9});
    CHECK(std::string(walker_status_name(WalkerStatus::Failed)) == "failed");
    CHECK(std::string(walker_status_name(WalkerStatus::Finished)) == "finished");
}

TEST_CASE("removing a walker does not disturb running instances") {
    const char* src = "node item { has k; }\nedge link {}\n"
                      "walker stepper { report here.k; take -->; }\n";
    Fixture fx(src, fresh_dir("remove"));
    std::vector<ObjectId> chain;
    for (int i = 0; i < 4; ++i)
        chain.push_back(fx.graph.create_node("item", {{"k", i}}));
    for (int i = 0; i < 3; ++i)
        fx.graph.create_edge("link", chain[i], chain[i + 1], {});
    fx.graph.commit();

    WalkerEngine eng(fx.graph, no_actions());
    auto inst = eng.spawn(fx.registry, "stepper", chain[0], nullptr);
    remove_walker(fx.registry, "stepper");
    // The instance keeps its own declaration snapshot.
    CHECK(eng.run(inst) == std::vector<ContextValue>{0, 1, 2, 3});
    CHECK_THROWS_AS(eng.spawn(fx.registry, "stepper", chain[0], nullptr), Error);
    CHECK_THROWS_AS(remove_walker(fx.registry, "stepper"), Error);
}

TEST_CASE("injected walkers become spawnable and bad sources are rejected") {
    const char* src = "node item { has k; }\nedge link {}\nwalker base { report 0; }\n";
    Fixture fx(src, fresh_dir("inject"));
    auto a = fx.graph.create_node("item", {{"k", 5}});
    fx.graph.commit();

    ResolveEnv env = ResolveEnv::from(fx.prog);
    CHECK(inject_walker(fx.registry, env, "walker probe { report here.k; }") == "probe");
    CHECK(fx.run("probe", a) == std::vector<ContextValue>{5});
    CHECK_THROWS_AS(inject_walker(fx.registry, env, "node n2 {}"), Error);
    CHECK_THROWS_AS(inject_walker(fx.registry, env, "walker bad { report q; }"), Error);
    CHECK_THROWS_AS(inject_walker(fx.registry, env, "walker bad { take -->:ghost; }"), Error);
    // Replacing an existing walker swaps the body for new spawns.
    inject_walker(fx.registry, env, "walker base { report 1; }");
    CHECK(fx.run("base", a) == std::vector<ContextValue>{1});
}

TEST_CASE("spawn-time argument and target validation") {
    const char* src = "node item { has k; }\nedge link {}\n"
                      "walker w { has n; report n; }\n";
    Fixture fx(src, fresh_dir("spawnargs"));
    auto a = fx.graph.create_node("item", {{"k", 1}});
    fx.graph.commit();
    WalkerEngine eng(fx.graph, no_actions());

    CHECK(fx.run("w", a, ContextValue{{"n", 7}}) == std::vector<ContextValue>{7});
    // Unset fields start null.
    CHECK(fx.run("w", a) == std::vector<ContextValue>{nullptr});
    CHECK_THROWS_AS(eng.spawn(fx.registry, "ghost", a, nullptr), Error);
    CHECK_THROWS_AS(eng.spawn(fx.registry, "w", 9999, nullptr), Error);
    CHECK_THROWS_AS(eng.spawn(fx.registry, "w", a, ContextValue{{"zz", 1}}), Error);
    try {
        eng.spawn(fx.registry, "w", a, ContextValue{{"zz", 1}});
    } catch (const Error& e) {
        CHECK(e.kind == ErrKind::UndeclaredField);
    }
}

TEST_CASE("here assignments persist to the graph at commit") {
    const char* src = "node item { has k; }\nedge link {}\n"
                      "walker bump { here.k = here.k + 10; take -->; }\n";
    Fixture fx(src, fresh_dir("hereassign"));
    auto a = fx.graph.create_node("item", {{"k", 1}});
    auto b = fx.graph.create_node("item", {{"k", 2}});
    fx.graph.create_edge("link", a, b, {});
    fx.graph.commit();
    fx.run("bump", a);
    fx.graph.commit();
    CHECK(fx.graph.get_field(a, "k") == ContextValue(11));
    CHECK(fx.graph.get_field(b, "k") == ContextValue(12));
}

TEST_CASE("take honors edge and node filters in every direction") {
    const char* src = "node item { has k; }\nnode leaf { has k; }\n"
                      "edge fast {}\nedge slow {}\n"
                      "walker fast_only { report here.k; take -->:fast; }\n"
                      "walker leaves { report here.k; take -->(leaf); }\n"
                      "walker upstream { report here.k; take <--; }\n"
                      "walker anywhere { report here.k; take <-->; }\n";
    Fixture fx(src, fresh_dir("filters"));
    auto a = fx.graph.create_node("item", {{"k", 1}});
    auto b = fx.graph.create_node("item", {{"k", 2}});
    auto c = fx.graph.create_node("leaf", {{"k", 3}});
    fx.graph.create_edge("fast", a, b, {});
    fx.graph.create_edge("slow", a, c, {});
    fx.graph.create_edge("fast", c, a, {});
    fx.graph.commit();

    CHECK(fx.run("fast_only", a) == std::vector<ContextValue>{1, 2});
    CHECK(fx.run("leaves", a) == std::vector<ContextValue>{1, 3});
    CHECK(fx.run("upstream", b) == std::vector<ContextValue>{2, 1, 3});
    CHECK(fx.run("anywhere", b).size() == 3);
}

TEST_CASE("spawned nodes join the frontier through take") {
    const char* src = "node item { has k; }\nedge link {}\n"
                      "walker grow {\n"
                      "    has made;\n"
                      "    if made == null {\n"
                      "        made = 1;\n"
                      "        spawn here ++>:link item { k = 99; };\n"
                      "        take -->;\n"
                      "    }\n"
                      "    report here.k;\n"
                      "}\n";
    Fixture fx(src, fresh_dir("spawnstmt"));
    auto a = fx.graph.create_node("item", {{"k", 1}});
    fx.graph.commit();
    auto rep = fx.run("grow", a);
    CHECK(rep == std::vector<ContextValue>{1, 99});
    fx.graph.commit();
    auto hits = fx.graph.neighbors(a, Direction::Out);
    REQUIRE(hits.size() == 1);
    CHECK(fx.graph.get_field(hits[0].node, "k") == ContextValue(99));
    // In-direction spawn points at here.
    const char* src2 = "node item { has k; }\nedge link {}\n"
                       "walker feed { spawn here <++:link item { k = 5; }; }\n";
    Fixture fx2(src2, fresh_dir("spawnstmt2"));
    auto r = fx2.graph.create_node("item", {{"k", 0}});
    fx2.graph.commit();
    fx2.run("feed", r);
    fx2.graph.commit();
    auto in_hits = fx2.graph.neighbors(r, Direction::In);
    REQUIRE(in_hits.size() == 1);
    CHECK(fx2.graph.get_field(in_hits[0].node, "k") == ContextValue(5));
}

TEST_CASE("expressions evaluate with actions, loops and indexing") {
    const char* src = "node cell { has xs, k; can add_up; }\n"
                      "walker calc {\n"
                      "    has acc;\n"
                      "    acc = 0;\n"
                      "    for x in here.xs { acc = acc + x; }\n"
                      "    report acc;\n"
                      "    report here.xs[1];\n"
                      "    report add_up(1, 2, 3);\n"
                      "    report [here.k > 4, here.k == 5, not (here.k == 5)];\n"
                      "}\n";
    Fixture fx(src, fresh_dir("exprs"));
    auto a = fx.graph.create_node(
        "cell", {{"xs", ContextValue::array({10, 20, 30})}, {"k", 5}});
    fx.graph.commit();
    auto fn = [](const std::string& name, const std::vector<ContextValue>& args) -> ContextValue {
        REQUIRE(name == "add_up");
        std::int64_t total = 0;
        for (const auto& a : args)
            total += a.get<std::int64_t>();
        return total;
    };
    auto rep = fx.run("calc", a, nullptr, fn);
    REQUIRE(rep.size() == 4);
    CHECK(rep[0] == ContextValue(60));
    CHECK(rep[1] == ContextValue(20));
    CHECK(rep[2] == ContextValue(6));
    CHECK(rep[3] == ContextValue::array({true, true, false}));
}

TEST_CASE("type confusion surfaces as a runtime type error") {
    const char* src = "node item { has k; }\n"
                      "walker bad { report 1 + \"s\"; }\n"
                      "walker idx { report here.k[0]; }\n";
    Fixture fx(src, fresh_dir("typeerr"));
    auto a = fx.graph.create_node("item", {{"k", 3}});
    fx.graph.commit();
    auto kind_of = [&](const std::string& w) {
        try {
            fx.run(w, a);
        } catch (const Error& e) {
            return e.kind;
        }
        return ErrKind::InvalidArgument;
    };
    CHECK(kind_of("bad") == ErrKind::RuntimeTypeError);
    CHECK(kind_of("idx") == ErrKind::RuntimeTypeError);
}
