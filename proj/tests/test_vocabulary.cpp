#include <doctest.h>

#include <cstdio>
#include <map>
#include <random>

#include "callrank/vocabulary.hpp"

using namespace callrank;

namespace {
FunctionSequence seq(std::string name, std::vector<std::string> calls) {
    FunctionSequence s;
    s.source_id = "t";
    s.method_name = std::move(name);
    s.calls = std::move(calls);
    return s;
}
}  // namespace

TEST_CASE("min_count collapses rare tokens to <unk>") {
    std::vector<FunctionSequence> seqs = {seq("a", {"b"}), seq("a", {"b"}), seq("a", {"c"})};
    Vocabulary v = build_vocabulary(seqs, 2, TokenizerConfig{});
    CHECK(v.size() == 3);  // <unk>, a, b
    CHECK(v.contains("a"));
    CHECK(v.contains("b"));
    CHECK(!v.contains("c"));
    CHECK(v.lookup("c") == Vocabulary::kUnkId);
    CHECK(v.lookup("never_seen") == Vocabulary::kUnkId);
    CHECK(v.frequency(v.lookup("a")) == 3);
}

TEST_CASE("min_count zero disables the threshold") {
    std::vector<FunctionSequence> seqs = {seq("a", {"b", "c"})};
    Vocabulary v = build_vocabulary(seqs, 0, TokenizerConfig{});
    for (const auto& tok : {"a", "b", "c"}) CHECK(v.lookup(tok) != Vocabulary::kUnkId);
}

TEST_CASE("empty corpus yields an <unk>-only vocabulary") {
    Vocabulary v = build_vocabulary({}, 5, TokenizerConfig{});
    CHECK(v.size() == 1);
    CHECK(v.token(Vocabulary::kUnkId) == Vocabulary::kUnkToken);
}

TEST_CASE("zipfian corpus type count matches an independent histogram") {
    std::mt19937_64 rng(4242);
    std::vector<FunctionSequence> seqs;
    std::map<std::string, uint64_t> histogram;
    for (int i = 0; i < 1000; ++i) {
        FunctionSequence s;
        s.source_id = "z";
        // zipf-ish: token id ~ 1/rank over 300 types
        auto draw = [&] {
            double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
            int rank = int(std::pow(300.0, u));  // log-uniform ranks
            return "tok" + std::to_string(rank);
        };
        s.method_name = draw();
        for (int j = 0; j < 6; ++j) s.calls.push_back(draw());
        for (const auto& t : s.calls) ++histogram[t];
        ++histogram[s.method_name];
        seqs.push_back(std::move(s));
    }
    Vocabulary v = build_vocabulary(seqs, 20, TokenizerConfig{});
    size_t expected = 1;  // <unk>
    for (const auto& [tok, count] : histogram)
        if (count >= 20) ++expected;
    CHECK(v.size() == expected);
}

TEST_CASE("ids are dense and lookups stay in range") {
    std::vector<FunctionSequence> seqs = {seq("m", {"x", "y", "z", "x"})};
    Vocabulary v = build_vocabulary(seqs, 1, TokenizerConfig{});
    for (const auto& tok : {"m", "x", "y", "z", "missing"}) {
        TokenId id = v.lookup(tok);
        CHECK(id < v.size());
        CHECK(v.token(id).size() > 0);
    }
}

TEST_CASE("subtoken mode counts subtokens jointly over names and calls") {
    std::vector<FunctionSequence> seqs = {seq("openFile", {"readFile", "closeFile"})};
    TokenizerConfig cfg;
    cfg.mode = TokenMode::subtokens;
    Vocabulary v = build_vocabulary(seqs, 1, cfg);
    CHECK(v.contains("file"));
    CHECK(v.frequency(v.lookup("file")) == 3);
    CHECK(v.mode() == TokenMode::subtokens);
}

TEST_CASE("vocabulary save/load round trip") {
    std::vector<FunctionSequence> seqs = {seq("a", {"b", "b", "c"}), seq("a", {"d"})};
    Vocabulary v = build_vocabulary(seqs, 2, TokenizerConfig{});
    std::string path = "vocab_roundtrip.bin";
    {
        BinaryWriter w(path);
        v.save(w);
        w.close();
    }
    BinaryReader r(path);
    Vocabulary u = Vocabulary::load(r);
    CHECK(u.size() == v.size());
    for (TokenId id = 0; id < TokenId(v.size()); ++id) {
        CHECK(u.token(id) == v.token(id));
        CHECK(u.frequency(id) == v.frequency(id));
    }
    std::remove(path.c_str());
}
