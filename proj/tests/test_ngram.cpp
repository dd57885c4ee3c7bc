#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>

#include "callrank/ngram.hpp"

using namespace callrank;

namespace {

FunctionSequence seq(std::string name, std::vector<std::string> calls) {
    FunctionSequence s;
    s.source_id = "t";
    s.method_name = std::move(name);
    s.calls = std::move(calls);
    return s;
}

Vocabulary vocab_of(const std::vector<FunctionSequence>& seqs, uint32_t min_count = 1) {
    return build_vocabulary(seqs, min_count, TokenizerConfig{});
}

SmoothingConfig mle() { return {SmoothingConfig::Kind::mle, 0.5, 0.75}; }
SmoothingConfig jm(double lambda = 0.5) { return {SmoothingConfig::Kind::jelinek_mercer, lambda, 0.75}; }
SmoothingConfig kn(double d = 0.75) { return {SmoothingConfig::Kind::kneser_ney, 0.5, d}; }

size_t rank_of(const NGramModel& m, const CacheState* cache, std::span<const TokenId> ctx,
               TokenId gold) {
    auto top = predict_top_k(m, cache, ctx, m.vocabulary().size());
    auto it = std::find(top.begin(), top.end(), gold);
    REQUIRE(it != top.end());
    return size_t(it - top.begin()) + 1;
}

}  // namespace

TEST_CASE("order below 2 is a configuration error") {
    auto seqs = std::vector<FunctionSequence>{seq("a", {"b"})};
    CHECK_THROWS_AS(NGramModel::train(seqs, 1, vocab_of(seqs), mle()), std::invalid_argument);
}

TEST_CASE("MLE bigram ratios") {
    auto v = vocab_of({seq("a", {"b", "a", "b"})});
    auto m1 = NGramModel::train({{v.lookup("a"), v.lookup("b"), v.lookup("a"), v.lookup("b")}},
                                2, v, mle());
    TokenId a = v.lookup("a"), b = v.lookup("b");
    CHECK(m1.prob(std::vector<TokenId>{a}, b) == doctest::Approx(1.0));

    auto v2 = vocab_of({seq("a", {"b", "a", "c"})});
    auto m2 = NGramModel::train(
        {{v2.lookup("a"), v2.lookup("b"), v2.lookup("a"), v2.lookup("c")}}, 2, v2, mle());
    CHECK(m2.prob(std::vector<TokenId>{v2.lookup("a")}, v2.lookup("b")) == doctest::Approx(0.5));
}

TEST_CASE("trigram MLE matches a brute-force hash-map recount") {
    std::mt19937_64 rng(17);
    std::vector<TokenId> stream(500);
    auto seqs = std::vector<FunctionSequence>{seq("a", {"b", "c", "d", "e", "f", "g"})};
    Vocabulary v = vocab_of(seqs);  // 8 types incl <unk>
    for (auto& t : stream) t = TokenId(1 + rng() % (v.size() - 1));
    auto m = NGramModel::train({stream}, 3, v, mle());

    // independent recount with plain maps over the padded stream
    TokenId bos = m.bos_id();
    std::map<std::pair<TokenId, TokenId>, std::map<TokenId, uint64_t>> counts;
    for (size_t i = 0; i < stream.size(); ++i) {
        TokenId c1 = i >= 2 ? stream[i - 2] : bos;
        TokenId c2 = i >= 1 ? stream[i - 1] : bos;
        ++counts[{c1, c2}][stream[i]];
    }
    for (const auto& [ctx, children] : counts) {
        uint64_t total = 0;
        for (const auto& [w, c] : children) total += c;
        for (const auto& [w, c] : children) {
            double expect = double(c) / double(total);
            std::vector<TokenId> context{ctx.first, ctx.second};
            CHECK(m.prob(context, w) == doctest::Approx(expect).epsilon(1e-12));
        }
    }
}

TEST_CASE("JM recursion unrolls on a one-type corpus") {
    auto seqs = std::vector<FunctionSequence>{seq("a", {"a"})};
    Vocabulary v = vocab_of(seqs);  // <unk>, a
    double lambda = 0.5;
    auto m = NGramModel::train({{v.lookup("a"), v.lookup("a")}}, 2, v, jm(lambda));
    TokenId a = v.lookup("a");
    double vsz = double(v.size());
    double expected = lambda * 1.0 + (1 - lambda) * (lambda * 1.0 + (1 - lambda) / vsz);
    CHECK(m.prob(std::vector<TokenId>{a}, a) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("KN hand worksheet on the two-sequence corpus") {
    // corpus "a b", "c b": continuation count of b is 2 contexts
    auto seqs = std::vector<FunctionSequence>{seq("a", {"b"}), seq("c", {"b"})};
    Vocabulary v = vocab_of(seqs);  // <unk>, a, b, c
    auto m = NGramModel::train(seqs, 2, v, kn(0.75));
    TokenId a = v.lookup("a"), b = v.lookup("b");

    // worksheet: lowest level from continuation counts {a:1, b:2, c:1},
    // total 4, 3 distinct, uniform floor 1/4
    double p0 = (2.0 - 0.75) / 4.0 + (0.75 * 3.0 / 4.0) * (1.0 / 4.0);
    // top level, context (a): count(a b)=1, total 1, 1 distinct
    double expected = (1.0 - 0.75) / 1.0 + (0.75 * 1.0 / 1.0) * p0;
    CHECK(m.prob(std::vector<TokenId>{a}, b) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("every smoothing normalizes over random histories") {
    std::mt19937_64 rng(23);
    std::vector<std::vector<TokenId>> corpus;
    auto seqs = std::vector<FunctionSequence>{};
    for (int i = 0; i < 40; ++i) {
        std::vector<std::string> calls;
        for (int j = 0; j < 8; ++j) calls.push_back("t" + std::to_string(rng() % 50));
        seqs.push_back(seq("m" + std::to_string(rng() % 10), calls));
    }
    Vocabulary v = vocab_of(seqs);
    auto m = NGramModel::train(seqs, 3, v, mle());

    for (auto kind : {mle(), jm(0.3), kn(0.6)}) {
        m.set_smoothing(kind);
        for (int h = 0; h < 25; ++h) {
            std::vector<TokenId> ctx;
            size_t len = rng() % 4;
            for (size_t i = 0; i < len; ++i) ctx.push_back(TokenId(rng() % (v.size() + 1)));
            double sum = 0;
            for (TokenId w = 0; w < TokenId(v.size()); ++w) sum += m.prob(ctx, w);
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("cross entropy of a uniform two-type model is one bit") {
    auto seqs = std::vector<FunctionSequence>{seq("a", {})};
    Vocabulary v = vocab_of(seqs);  // <unk>, a -> |V| = 2
    auto m = NGramModel::train(std::vector<std::vector<TokenId>>{{}}, 2, v, mle());
    CHECK(m.cross_entropy({{v.lookup("a"), v.lookup("a")}}) == doctest::Approx(1.0));
}

TEST_CASE("deterministic continuations cost zero bits") {
    auto seqs = std::vector<FunctionSequence>{seq("a", {"a", "a"})};
    Vocabulary v = vocab_of(seqs);
    std::vector<std::vector<TokenId>> lists{{v.lookup("a"), v.lookup("a"), v.lookup("a")}};
    auto m = NGramModel::train(lists, 4, v, mle());
    CHECK(m.cross_entropy(lists) == doctest::Approx(0.0));
}

TEST_CASE("longer context is strictly informative on repeated sequences") {
    // identical 6-token sequences where position is only recoverable with
    // more than one token of context
    auto seqs = std::vector<FunctionSequence>{};
    for (int i = 0; i < 30; ++i) seqs.push_back(seq("a", {"b", "a", "c", "a", "d"}));
    Vocabulary v = vocab_of(seqs);
    auto lists_of = [&](uint32_t order) {
        auto m = NGramModel::train(seqs, order, v, jm());
        return m.cross_entropy(m.map_sequences(seqs));
    };
    CHECK(lists_of(5) < lists_of(2));
}

TEST_CASE("exclude-OOV mode skips unk targets") {
    auto train_seqs = std::vector<FunctionSequence>{seq("a", {"b", "a", "b"})};
    Vocabulary v = build_vocabulary(train_seqs, 2, TokenizerConfig{});  // rare tokens -> unk
    auto m = NGramModel::train(train_seqs, 2, v, jm());
    std::vector<std::vector<TokenId>> test{{v.lookup("a"), Vocabulary::kUnkId, v.lookup("b")}};
    double incl = m.cross_entropy(test, false);
    double excl = m.cross_entropy(test, true);
    CHECK(incl != excl);
    CHECK_THROWS(m.cross_entropy({{Vocabulary::kUnkId}}, true));
}

TEST_CASE("empty cache leaves probabilities bit-identical") {
    auto seqs = std::vector<FunctionSequence>{seq("m", {"x", "y", "x", "z"})};
    Vocabulary v = vocab_of(seqs);
    auto m = NGramModel::train(seqs, 3, v, jm());
    CacheState cache(m.order(), 0.5);
    std::mt19937_64 rng(3);
    for (int i = 0; i < 50; ++i) {
        std::vector<TokenId> ctx{TokenId(rng() % v.size()), TokenId(rng() % v.size())};
        TokenId w = TokenId(rng() % v.size());
        CHECK(cache_prob(m, cache, ctx, w) == m.prob(ctx, w));
    }
}

TEST_CASE("cache mixes an observed bigram at full weight") {
    auto seqs = std::vector<FunctionSequence>{seq("m", {"x", "y", "x", "z"})};
    Vocabulary v = vocab_of(seqs);
    auto m = NGramModel::train(seqs, 3, v, jm());
    double gamma = 0.5;
    CacheState cache(m.order(), gamma);
    TokenId x = v.lookup("x"), y = v.lookup("y");
    cache.observe(std::vector<TokenId>{x}, y);
    std::vector<TokenId> ctx{x};
    double base = m.prob(ctx, y);
    CHECK(cache_prob(m, cache, ctx, y) == doctest::Approx(gamma * 1.0 + (1 - gamma) * base));
}

TEST_CASE("cache isolation: clear restores the base model exactly") {
    auto seqs = std::vector<FunctionSequence>{seq("m", {"x", "y", "z"})};
    Vocabulary v = vocab_of(seqs);
    auto m = NGramModel::train(seqs, 3, v, kn());
    CacheState cache(m.order(), 0.7);
    std::mt19937_64 rng(5);
    for (int i = 0; i < 20; ++i)
        cache.observe(std::vector<TokenId>{TokenId(rng() % v.size())}, TokenId(rng() % v.size()));
    cache.clear();
    for (int i = 0; i < 50; ++i) {
        std::vector<TokenId> ctx{TokenId(rng() % v.size())};
        TokenId w = TokenId(rng() % v.size());
        CHECK(cache_prob(m, cache, ctx, w) == m.prob(ctx, w));
    }
}

TEST_CASE("file-local idiom: cache rank dominates base rank after first sight") {
    // base corpus: random noise over 30 types, idiom tokens present but rare
    std::mt19937_64 rng(11);
    std::vector<FunctionSequence> seqs;
    for (int i = 0; i < 200; ++i) {
        std::vector<std::string> calls;
        for (int j = 0; j < 6; ++j) calls.push_back("n" + std::to_string(rng() % 30));
        seqs.push_back(seq("m" + std::to_string(rng() % 5), calls));
    }
    seqs.push_back(seq("m0", {"idiomA", "idiomB", "idiomC"}));  // just enough to be in vocab
    Vocabulary v = vocab_of(seqs);
    auto m = NGramModel::train(seqs, 3, v, jm());

    CacheState cache(m.order(), 0.5);
    TokenId ia = v.lookup("idiomA"), ib = v.lookup("idiomB"), ic = v.lookup("idiomC");
    REQUIRE(ia != Vocabulary::kUnkId);
    int dominated = 0;
    for (int rep = 0; rep < 10; ++rep) {
        std::vector<TokenId> ctx{ia, ib};
        if (rep > 0) {
            size_t with_cache = rank_of(m, &cache, ctx, ic);
            size_t without = rank_of(m, nullptr, ctx, ic);
            if (with_cache <= without) ++dominated;
        }
        cache.observe(ctx, ic);
    }
    CHECK(dominated >= 8);  // 9 occurrences after the first, at most one miss
}

TEST_CASE("predict_top_k equals a brute-force sort") {
    std::mt19937_64 rng(29);
    std::vector<FunctionSequence> seqs;
    for (int i = 0; i < 30; ++i) {
        std::vector<std::string> calls;
        for (int j = 0; j < 5; ++j) calls.push_back("t" + std::to_string(rng() % 12));
        seqs.push_back(seq("m", calls));
    }
    Vocabulary v = vocab_of(seqs);
    auto m = NGramModel::train(seqs, 3, v, kn());
    std::vector<TokenId> ctx{v.lookup("t3")};

    std::vector<std::pair<double, TokenId>> all;
    for (TokenId w = 1; w < TokenId(v.size()); ++w) all.emplace_back(m.prob(ctx, w), w);
    std::sort(all.begin(), all.end(), [](auto& a, auto& b) {
        return a.first > b.first || (a.first == b.first && a.second < b.second);
    });
    auto top = predict_top_k(m, nullptr, ctx, 5);
    REQUIRE(top.size() == 5);
    for (size_t i = 0; i < top.size(); ++i) CHECK(top[i] == all[i].second);

    // k >= |V| returns all non-unk tokens
    auto everything = predict_top_k(m, nullptr, ctx, v.size() + 10);
    CHECK(everything.size() == v.size() - 1);
    auto again = predict_top_k(m, nullptr, ctx, v.size() + 10);
    CHECK(everything == again);  // deterministic
}

TEST_CASE("corpus 'a b a b' predicts b after a") {
    auto seqs = std::vector<FunctionSequence>{seq("a", {"b", "a", "b"})};
    Vocabulary v = vocab_of(seqs);
    auto m = NGramModel::train(seqs, 2, v, mle());
    auto top = predict_top_k(m, nullptr, std::vector<TokenId>{v.lookup("a")}, 1);
    REQUIRE(top.size() == 1);
    CHECK(top[0] == v.lookup("b"));
}

TEST_CASE("removing a sequence never increases any raw count") {
    std::mt19937_64 rng(31);
    std::vector<FunctionSequence> seqs;
    for (int i = 0; i < 20; ++i) {
        std::vector<std::string> calls;
        for (int j = 0; j < 4; ++j) calls.push_back("t" + std::to_string(rng() % 8));
        seqs.push_back(seq("m", calls));
    }
    Vocabulary v = vocab_of(seqs);
    auto with_all = NGramModel::train(seqs, 3, v, mle());
    auto minus_one = std::vector<FunctionSequence>(seqs.begin(), seqs.end() - 1);
    auto without = NGramModel::train(minus_one, 3, v, mle());
    for (const auto& [ctx, node] : without.counts()) {
        for (const auto& [w, c] : node.child)
            CHECK(c <= with_all.raw_count(ctx, w));
    }
}

TEST_CASE("model save/load preserves probabilities") {
    auto seqs = std::vector<FunctionSequence>{seq("m", {"x", "y", "x", "z", "y"})};
    Vocabulary v = vocab_of(seqs);
    auto m = NGramModel::train(seqs, 3, v, kn());
    std::string path = "ngram_roundtrip.bin";
    m.save(path);
    auto loaded = NGramModel::load(path);
    CHECK(loaded.order() == m.order());
    std::mt19937_64 rng(37);
    for (int i = 0; i < 100; ++i) {
        std::vector<TokenId> ctx{TokenId(rng() % v.size()), TokenId(rng() % v.size())};
        TokenId w = TokenId(rng() % v.size());
        CHECK(loaded.prob(ctx, w) == m.prob(ctx, w));
    }
    CHECK(m.stats().find("order=3") != std::string::npos);
    std::remove(path.c_str());
}
