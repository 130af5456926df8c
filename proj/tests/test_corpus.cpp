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

// The shipped corpus must stay green in strict mode: every program
// parses, round-trips, matches its pinned fingerprint, and replays to
// its golden output. Coverage of the grammar is enforced inside
// corpus_check itself.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "jacette/corpus.hpp"

using namespace jacette;

namespace {

std::string corpus_dir() { return std::string(JACETTE_SOURCE_DIR) + "/corpus"; }

std::string fresh_dir(const std::string& leaf) {
    auto dir = std::filesystem::temp_directory_path() / "jacette" / leaf;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

} // namespace

TEST_CASE("fnv1a64 fingerprints are stable") {
    // Published reference values for the 64-bit FNV-1a offset basis and a
    // one-byte input.
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64_hex("a") == "af63dc4c8601ec8c");
    CHECK(fnv1a64_hex("").size() == 16);
}

TEST_CASE("shipped corpus passes the strict check") {
    CorpusResult res = corpus_check(corpus_dir(), fresh_dir("corpus_strict"));
    for (const auto& f : res.failures)
        MESSAGE(f);
    CHECK(res.checked == 7);
    CHECK(res.ok());
}

TEST_CASE("strict check does not rewrite the manifest") {
    std::string manifest_path = corpus_dir() + "/manifest.json";
    std::string before = read_text_file(manifest_path);
    corpus_check(corpus_dir(), fresh_dir("corpus_ro"));
    CHECK(read_text_file(manifest_path) == before);
}

TEST_CASE("a tampered golden is caught") {
    // Copy the corpus, flip one golden byte, and expect exactly that entry
    // to fail while the rest stay green.
    namespace fs = std::filesystem;
    fs::path copy = fs::temp_directory_path() / "jacette" / "corpus_tamper";
    fs::remove_all(copy);
    fs::create_directories(copy);
    for (const auto& ent : fs::directory_iterator(corpus_dir()))
        fs::copy_file(ent.path(), copy / ent.path().filename());

    fs::path golden = copy / "count_chain.golden.json";
    {
        std::ofstream out(golden, std::ios::binary | std::ios::trunc);
        out << "{\n    \"report\": [1, 2, 4]\n}\n";
    }

    CorpusResult res = corpus_check(copy.string(), fresh_dir("corpus_tamper_work"));
    CHECK_FALSE(res.ok());
    bool count_chain_flagged = false;
    for (const auto& f : res.failures)
        count_chain_flagged |= f.find("count_chain") != std::string::npos;
    CHECK(count_chain_flagged);
}

TEST_CASE("missing corpus directory reports IoFailure") {
    CHECK_THROWS_AS(corpus_check("/nonexistent/corpus", fresh_dir("corpus_missing")), Error);
}
