// Timing harness for the parallel kernels against their serial references:
// sharded n-gram counting and exact cosine nearest-neighbor search.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "callrank/ngram.hpp"
#include "callrank/pv.hpp"
#include "callrank/synthetic.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace callrank;

namespace {

double ms_since(std::chrono::steady_clock::time_point start) {
    auto end = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(end - start).count();
}

}  // namespace

int main(int argc, char** argv) {
    size_t n_train = argc > 1 ? size_t(std::stoul(argv[1])) : 20000;
    int workers = 4;
#ifdef _OPENMP
    workers = omp_get_max_threads();
#endif

    SyntheticOptions opt;
    opt.n_train = n_train;
    opt.seed = 2024;
    auto corpus = make_synthetic_corpus(opt);
    Vocabulary vocab = build_vocabulary(corpus.train, 5, TokenizerConfig{});
    SmoothingConfig jm{SmoothingConfig::Kind::jelinek_mercer, 0.5, 0.75};

    std::printf("corpus: %zu sequences, %zu vocabulary types, %d workers\n",
                corpus.train.size(), vocab.size(), workers);

    {
        auto t0 = std::chrono::steady_clock::now();
        auto serial = NGramModel::train(corpus.train, 5, vocab, jm, 1);
        double serial_ms = ms_since(t0);
        t0 = std::chrono::steady_clock::now();
        auto parallel = NGramModel::train(corpus.train, 5, vocab, jm, workers);
        double parallel_ms = ms_since(t0);
        std::printf("ngram count   serial %8.1f ms   parallel %8.1f ms   speedup %.2fx   "
                    "contexts %zu/%zu\n",
                    serial_ms, parallel_ms, serial_ms / parallel_ms, serial.counts().size(),
                    parallel.counts().size());
    }

    {
        HyperParams h;
        h.dim = 64;
        h.window = 8;
        h.min_count = 5;
        h.epochs = 3;
        auto model = PVModel::train(corpus.train, vocab, h, workers);

        std::mt19937_64 rng(1);
        std::normal_distribution<float> nd(0.0f, 1.0f);
        std::vector<std::vector<float>> queries(200, std::vector<float>(h.dim));
        for (auto& q : queries)
            for (auto& x : q) x = nd(rng);

        auto t0 = std::chrono::steady_clock::now();
        size_t checksum_serial = 0;
        for (const auto& q : queries) checksum_serial += model.most_similar_serial(q, 10)[0].doc_id;
        double serial_ms = ms_since(t0);

        t0 = std::chrono::steady_clock::now();
        size_t checksum_parallel = 0;
        for (const auto& q : queries) checksum_parallel += model.most_similar(q, 10)[0].doc_id;
        double parallel_ms = ms_since(t0);

        std::printf("cosine search serial %8.1f ms   parallel %8.1f ms   speedup %.2fx   "
                    "checksums %zu/%zu\n",
                    serial_ms, parallel_ms, serial_ms / parallel_ms, checksum_serial,
                    checksum_parallel);
        if (checksum_serial != checksum_parallel) {
            std::fprintf(stderr, "kernel mismatch between serial and parallel search\n");
            return 1;
        }
    }
    return 0;
}
