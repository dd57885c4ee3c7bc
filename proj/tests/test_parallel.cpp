#include <doctest.h>

#include <random>

#include "callrank/ngram.hpp"
#include "callrank/pv.hpp"
#include "callrank/synthetic.hpp"

using namespace callrank;

// the parallel kernels must agree with their serial references

TEST_CASE("sharded n-gram counting merges to the serial counts") {
    std::mt19937_64 rng(91);
    std::vector<FunctionSequence> seqs;
    for (int i = 0; i < 123; ++i) {
        FunctionSequence s;
        s.source_id = "t";
        s.method_name = "m" + std::to_string(rng() % 9);
        for (int j = 0; j < int(1 + rng() % 7); ++j)
            s.calls.push_back("c" + std::to_string(rng() % 25));
        seqs.push_back(std::move(s));
    }
    Vocabulary v = build_vocabulary(seqs, 1, TokenizerConfig{});
    SmoothingConfig jm{SmoothingConfig::Kind::jelinek_mercer, 0.5, 0.75};
    auto serial = NGramModel::train(seqs, 4, v, jm, 1);
    auto parallel = NGramModel::train(seqs, 4, v, jm, 4);

    REQUIRE(serial.counts().size() == parallel.counts().size());
    for (const auto& [ctx, node] : serial.counts()) {
        for (const auto& [w, c] : node.child) CHECK(parallel.raw_count(ctx, w) == c);
    }
    for (int i = 0; i < 50; ++i) {
        std::vector<TokenId> ctx{TokenId(rng() % v.size()), TokenId(rng() % v.size())};
        TokenId w = TokenId(rng() % v.size());
        CHECK(serial.prob(ctx, w) == parallel.prob(ctx, w));
    }
}

TEST_CASE("parallel cosine search equals the serial reference") {
    SyntheticOptions opt;
    opt.n_concepts = 10;
    opt.concept_len = 5;
    opt.n_train = 400;
    opt.seed = 12;
    auto corpus = make_synthetic_corpus(opt);
    Vocabulary v = build_vocabulary(corpus.train, 1, TokenizerConfig{});
    HyperParams h;
    h.dim = 16;
    h.window = 4;
    h.epochs = 5;
    auto model = PVModel::train(corpus.train, v, h);

    std::mt19937_64 rng(93);
    std::normal_distribution<float> nd(0.0f, 1.0f);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<float> q(h.dim);
        for (auto& x : q) x = nd(rng);
        auto par = model.most_similar(q, 25);
        auto ser = model.most_similar_serial(q, 25);
        REQUIRE(par.size() == ser.size());
        for (size_t i = 0; i < par.size(); ++i) {
            CHECK(par[i].doc_id == ser[i].doc_id);
            CHECK(par[i].score == ser[i].score);
        }
    }
}

TEST_CASE("multi-worker pv training still produces a usable model") {
    SyntheticOptions opt;
    opt.n_concepts = 8;
    opt.concept_len = 4;
    opt.n_train = 300;
    opt.seed = 14;
    auto corpus = make_synthetic_corpus(opt);
    Vocabulary v = build_vocabulary(corpus.train, 1, TokenizerConfig{});
    HyperParams h;
    h.dim = 16;
    h.window = 4;
    h.epochs = 10;
    auto model = PVModel::train(corpus.train, v, h, 4);  // hogwild, nondeterministic
    auto hits = model.most_similar(model.doc_vector(0), 5);
    CHECK(hits[0].doc_id == 0);
}
