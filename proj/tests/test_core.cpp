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

#include <jacette/graph.hpp>

#include <algorithm>
#include <filesystem>
#include <list>
#include <random>
#include <thread>

using namespace jacette;

namespace {

std::string fresh_dir(const std::string& leaf) {
    auto p = std::filesystem::temp_directory_path() / "jacette_test_core" / leaf;
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p.string();
}

StoredObject blank_node(ObjectId id) {
    NodeRecord n;
    n.id = id;
    n.type_name = "t";
    return n;
}

Schema chain_schema() {
    Schema s;
    s.add_node_type(NodeType{"day", {"date", "score"}, std::nullopt, {}});
    s.add_node_type(NodeType{"vault", {"k"}, std::set<std::string>{"keeper"}, {}});
    s.add_edge_type(EdgeType{"next", {"gap"}});
    return s;
}

}  // namespace

TEST_CASE("canonical serialization is order-preserving and compact") {
    ContextValue v = make_object();
    v["zeta"] = 1;
    v["alpha"] = 2.5;
    v["mid"] = ContextValue::array({1, ContextValue(nullptr), std::string("s")});
    CHECK(canonical_bytes(v) == R"({"zeta":1,"alpha":2.5,"mid":[1,null,"s"]})");
    CHECK(canonical_size(v) == canonical_bytes(v).size());

    // Shortest round-trip float form, not a fixed precision.
    CHECK(canonical_bytes(ContextValue(0.5)) == "0.5");
    CHECK(canonical_bytes(ContextValue(std::int64_t{42})) == "42");

    // Parsing the canonical form gives back an equal value.
    CHECK(ContextValue::parse(canonical_bytes(v)) == v);
}

TEST_CASE("lru cache follows the reference model over a random trace") {
    constexpr std::size_t kCap = 8;
    LruCache cache(kCap);
    std::list<ObjectId> model;  // MRU first

    auto model_touch = [&](ObjectId id) {
        model.remove(id);
        model.push_front(id);
        while (model.size() > kCap)
            model.pop_back();
    };

    std::mt19937_64 rng(7);
    for (int op = 0; op < 20000; ++op) {
        ObjectId id = rng() % 24 + 1;
        switch (rng() % 3) {
        case 0:
            cache.put(id, std::make_shared<StoredObject>(blank_node(id)));
            model_touch(id);
            break;
        case 1: {
            bool in_model = std::find(model.begin(), model.end(), id) != model.end();
            auto got = cache.get(id);
            CHECK(static_cast<bool>(got) == in_model);
            if (in_model)
                model_touch(id);
            break;
        }
        default:
            cache.erase(id);
            model.remove(id);
            break;
        }
        REQUIRE(cache.keys_mru() == std::vector<ObjectId>(model.begin(), model.end()));
    }
}

TEST_CASE("lru peek does not disturb recency") {
    LruCache cache(2);
    cache.put(1, std::make_shared<StoredObject>(blank_node(1)));
    cache.put(2, std::make_shared<StoredObject>(blank_node(2)));
    CHECK(cache.peek(1) != nullptr);
    // 1 stays least-recent despite the peek, so inserting 3 evicts it.
    cache.put(3, std::make_shared<StoredObject>(blank_node(3)));
    CHECK(cache.peek(1) == nullptr);
    CHECK(cache.peek(2) != nullptr);
}

TEST_CASE("store pins loads until commit and counts fetches by tier") {
    TierConfig cfg;
    cfg.store_path = fresh_dir("pins");
    cfg.cache_capacity = 2;
    ObjectStore store(cfg);

    ObjectId a = store.allocate_id();
    store.insert_new(blank_node(a));
    // Working-memory reads are free: the object was never fetched.
    store.load(a);
    CHECK(store.stats().objects_fetched == 0);
    CHECK(store.memory_size() == 1);

    store.commit();
    CHECK(store.memory_size() == 0);
    CHECK(store.stats().store_writes == 1);

    // First post-commit load hits the cache (commit refreshed it).
    store.load(a);
    auto s1 = store.stats();
    CHECK(s1.cache_hits == 1);
    CHECK(s1.store_reads == 0);
    // The load pinned it again; further loads are free until commit.
    store.load(a);
    CHECK(store.stats().objects_fetched == s1.objects_fetched);
    store.commit();

    // A cold store on the same directory must read from disk.
    ObjectStore cold(cfg);
    cold.load(a);
    auto s2 = cold.stats();
    CHECK(s2.store_reads == 1);
    CHECK(s2.cache_hits == 0);
    CHECK(s2.objects_fetched == 1);
}

TEST_CASE("store eviction keeps capacity and the stats identity") {
    TierConfig cfg;
    cfg.store_path = fresh_dir("evict");
    cfg.cache_capacity = 3;
    ObjectStore store(cfg);

    std::vector<ObjectId> ids;
    for (int i = 0; i < 10; ++i) {
        ObjectId id = store.allocate_id();
        store.insert_new(blank_node(id));
        ids.push_back(id);
    }
    store.commit();
    CHECK(store.cache_size() == 3);
    CHECK(store.stats().evictions == 7);

    std::mt19937_64 rng(11);
    for (int i = 0; i < 500; ++i) {
        store.load(ids[rng() % ids.size()]);
        if (i % 7 == 0)
            store.commit();
    }
    store.commit();
    auto s = store.stats();
    CHECK(s.objects_fetched == s.cache_hits + s.store_reads);
    CHECK(store.cache_size() <= 3);
}

TEST_CASE("store stats identity holds under concurrent loads") {
    TierConfig cfg;
    cfg.store_path = fresh_dir("conc");
    cfg.cache_capacity = 4;
    ObjectStore store(cfg);
    std::vector<ObjectId> ids;
    for (int i = 0; i < 16; ++i) {
        ObjectId id = store.allocate_id();
        store.insert_new(blank_node(id));
        ids.push_back(id);
    }
    store.commit();

    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t)
        threads.emplace_back([&, t] {
            std::mt19937_64 rng(100 + t);
            for (int i = 0; i < 2000; ++i) {
                store.load(ids[rng() % ids.size()]);
                if (i % 50 == 0)
                    store.commit();
            }
        });
    for (auto& th : threads)
        th.join();
    store.commit();
    auto s = store.stats();
    CHECK(s.objects_fetched == s.cache_hits + s.store_reads);
    CHECK(s.objects_fetched > 0);
}

TEST_CASE("erase removes an object from every tier") {
    TierConfig cfg;
    cfg.store_path = fresh_dir("erase");
    ObjectStore store(cfg);
    ObjectId a = store.allocate_id();
    store.insert_new(blank_node(a));
    store.commit();
    CHECK(store.exists(a));
    store.erase(a);
    CHECK_FALSE(store.exists(a));
    CHECK_THROWS_AS(store.load(a), Error);
}

TEST_CASE("fast edges are invisible to reads but skip standalone storage") {
    TierConfig fused_cfg;
    fused_cfg.store_path = fresh_dir("fused");
    fused_cfg.fast_edge_threshold = 128;
    TierConfig plain_cfg;
    plain_cfg.store_path = fresh_dir("plain");
    plain_cfg.fast_edge_threshold = 0;

    Graph fused(chain_schema(), fused_cfg);
    Graph plain(chain_schema(), plain_cfg);

    auto build = [](Graph& g) {
        auto a = g.create_node("day", {{"date", "d1"}, {"score", 1}});
        auto b = g.create_node("day", {{"date", "d2"}, {"score", 2}});
        auto c = g.create_node("day", {{"date", "d3"}, {"score", 3}});
        g.create_edge("next", a, b, {{"gap", 1}});
        g.create_edge("next", b, c, {{"gap", 2}});
        g.commit();
        return std::vector<ObjectId>{a, b, c};
    };
    auto f_ids = build(fused);
    auto p_ids = build(plain);

    // Identical neighbor views, edge ids included.
    for (std::size_t i = 0; i < f_ids.size(); ++i) {
        auto fh = fused.neighbors(f_ids[i], Direction::Out);
        auto ph = plain.neighbors(p_ids[i], Direction::Out);
        REQUIRE(fh.size() == ph.size());
        for (std::size_t j = 0; j < fh.size(); ++j) {
            CHECK(fh[j].node == ph[j].node);
            CHECK(fh[j].edge.id == ph[j].edge.id);
            CHECK(fh[j].edge.context == ph[j].edge.context);
            CHECK(fh[j].edge.is_fast);
            CHECK_FALSE(ph[j].edge.is_fast);
        }
    }
    fused.audit();
    plain.audit();

    // The fused store holds three objects (nodes only); the plain one five.
    CHECK(fused.store().all_ids().size() == 3);
    CHECK(plain.store().all_ids().size() == 5);
}

TEST_CASE("an edge grown past the threshold is promoted at the next commit") {
    TierConfig cfg;
    cfg.store_path = fresh_dir("promote");
    cfg.fast_edge_threshold = 64;
    Graph g(chain_schema(), cfg);
    auto a = g.create_node("day", {{"date", "d1"}, {"score", 1}});
    auto b = g.create_node("day", {{"date", "d2"}, {"score", 2}});
    g.create_edge("next", a, b, {{"gap", 1}});
    g.commit();
    auto before = g.neighbors(a, Direction::Out);
    REQUIRE(before.size() == 1);
    CHECK(before[0].edge.is_fast);

    g.update_edge_context(before[0].edge, {{"gap", std::string(100, 'x')}});
    g.commit();
    auto after = g.neighbors(a, Direction::Out);
    REQUIRE(after.size() == 1);
    CHECK_FALSE(after[0].edge.is_fast);
    CHECK(after[0].edge.id == before[0].edge.id);
    CHECK(after[0].edge.context.at("gap").get<std::string>() == std::string(100, 'x'));
    g.audit();
    // Node pair plus the now-standalone edge.
    CHECK(g.store().all_ids().size() == 3);
}

TEST_CASE("threshold zero disables fusion entirely") {
    TierConfig cfg;
    cfg.store_path = fresh_dir("nofuse");
    cfg.fast_edge_threshold = 0;
    Graph g(chain_schema(), cfg);
    auto a = g.create_node("day", {{"date", "d1"}, {"score", 1}});
    auto b = g.create_node("day", {{"date", "d2"}, {"score", 2}});
    g.create_edge("next", a, b, {});
    auto hits = g.neighbors(a, Direction::Out);
    REQUIRE(hits.size() == 1);
    CHECK_FALSE(hits[0].edge.is_fast);
}

TEST_CASE("delete_node removes incident edges in both directions") {
    TierConfig cfg;
    cfg.store_path = fresh_dir("delete");
    cfg.fast_edge_threshold = 16;
    Graph g(chain_schema(), cfg);
    auto a = g.create_node("day", {{"date", "d1"}, {"score", 1}});
    auto b = g.create_node("day", {{"date", "d2"}, {"score", 2}});
    auto c = g.create_node("day", {{"date", "d3"}, {"score", 3}});
    g.create_edge("next", a, b, {{"gap", 1}});
    g.create_edge("next", b, c, {{"gap", std::string(40, 'y')}});  // standalone
    g.commit();

    std::size_t removed = g.delete_node(b);
    CHECK(removed == 3);  // node + fused in-edge + standalone out-edge
    g.commit();
    g.audit();
    CHECK(g.neighbors(a, Direction::Out).empty());
    CHECK(g.neighbors(c, Direction::In).empty());
    CHECK_THROWS_AS(g.node_snapshot(b), Error);
}

TEST_CASE("field access respects declarations and direction filters work") {
    TierConfig cfg;
    cfg.store_path = fresh_dir("fields");
    Graph g(chain_schema(), cfg);
    auto a = g.create_node("day", {{"date", "d1"}, {"score", 7}});
    auto b = g.create_node("day", {{"date", "d2"}, {"score", 8}});
    g.create_edge("next", a, b, {});
    g.commit();

    CHECK(g.get_field(a, "score") == ContextValue(7));
    CHECK(g.get_field(a, "absent").is_null());
    g.set_field(a, "score", ContextValue(9));
    CHECK(g.get_field(a, "score") == ContextValue(9));
    CHECK_THROWS_AS(g.set_field(a, "absent", ContextValue(1)), Error);

    CHECK(g.neighbors(a, Direction::Out).size() == 1);
    CHECK(g.neighbors(a, Direction::In).empty());
    CHECK(g.neighbors(a, Direction::Both).size() == 1);
    CHECK(g.neighbors(a, Direction::Out, std::string("next")).size() == 1);
    // Undeclared filter names are a resolver concern; the graph API just
    // matches nothing.
    CHECK(g.neighbors(a, Direction::Out, std::string("nope")).empty());
}

TEST_CASE("unknown node type and duplicate seed ids are rejected") {
    TierConfig cfg;
    cfg.store_path = fresh_dir("reject");
    Graph g(chain_schema(), cfg);
    CHECK_THROWS_AS(g.create_node("ghost", {}), Error);
    auto a = g.create_node_with_id(10, "day", {{"date", "d"}, {"score", 0}});
    CHECK(a == 10);
    CHECK_THROWS_AS(g.create_node_with_id(10, "day", {{"date", "d"}, {"score", 0}}), Error);
    // Allocator skips past reserved ids.
    auto b = g.create_node("day", {{"date", "e"}, {"score", 0}});
    CHECK(b > 10);
}

TEST_CASE("ops on disjoint subgraphs commute in the canonical dump") {
    auto build = [](const std::string& dir, bool flip) {
        TierConfig cfg;
        cfg.store_path = dir;
        Graph g(chain_schema(), cfg);
        auto a1 = g.create_node_with_id(1, "day", {{"date", "a1"}, {"score", 1}});
        auto a2 = g.create_node_with_id(2, "day", {{"date", "a2"}, {"score", 2}});
        auto b1 = g.create_node_with_id(3, "day", {{"date", "b1"}, {"score", 3}});
        auto b2 = g.create_node_with_id(4, "day", {{"date", "b2"}, {"score", 4}});
        if (flip) {
            g.create_edge("next", b1, b2, {{"gap", 2}});
            g.create_edge("next", a1, a2, {{"gap", 1}});
        } else {
            g.create_edge("next", a1, a2, {{"gap", 1}});
            g.create_edge("next", b1, b2, {{"gap", 2}});
        }
        g.set_field(flip ? b1 : a1, "score", ContextValue(9));
        g.set_field(flip ? a1 : b1, "score", ContextValue(9));
        g.commit();
        auto dump = g.dump_canonical();
        std::sort(dump.begin(), dump.end());
        return dump;
    };
    // Edge ids differ by creation order, so compare node records only.
    auto strip_edges = [](std::vector<std::string> dump) {
        std::vector<std::string> nodes;
        for (auto& line : dump)
            if (line.find("\"src\"") == std::string::npos)
                nodes.push_back(std::move(line));
        return nodes;
    };
    auto d1 = strip_edges(build(fresh_dir("comm1"), false));
    auto d2 = strip_edges(build(fresh_dir("comm2"), true));
    CHECK(d1 == d2);
}

TEST_CASE("reopened store serves the same graph") {
    TierConfig cfg;
    cfg.store_path = fresh_dir("reopen");
    cfg.fast_edge_threshold = 64;
    ObjectId a, b;
    {
        Graph g(chain_schema(), cfg);
        a = g.create_node("day", {{"date", "d1"}, {"score", 1}});
        b = g.create_node("day", {{"date", "d2"}, {"score", 2}});
        g.create_edge("next", a, b, {{"gap", 4}});
        g.commit();
    }
    Graph g2(chain_schema(), cfg);
    auto hits = g2.neighbors(a, Direction::Out);
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].node == b);
    CHECK(hits[0].edge.is_fast);
    CHECK(g2.get_field(b, "date") == ContextValue("d2"));
    g2.audit();
    // Ids allocated after reopen never collide with stored ones.
    auto c = g2.create_node("day", {{"date", "d3"}, {"score", 3}});
    CHECK(c > b);
}
