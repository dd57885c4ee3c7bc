#include "callrank/synthetic.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace callrank {

namespace {

const std::vector<std::string>& verbs() {
    static const std::vector<std::string> v = {
        "open",  "close", "read",  "write", "parse", "load",  "store", "init",
        "flush", "send",  "fetch", "copy",  "move",  "scan",  "check", "build",
        "merge", "split", "reset", "apply"};
    return v;
}

const std::vector<std::string>& nouns() {
    static const std::vector<std::string> n = {
        "File",  "Stream", "Buffer", "Socket", "Table",  "Index", "Node",  "Cache",
        "Record", "Token", "Header", "Block",  "Queue",  "Batch", "Config", "Handle",
        "Frame", "Page",   "Entry",  "Chunk"};
    return n;
}

std::string noisy(const std::string& token, const std::vector<std::string>& pool,
                  double noise, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng) >= noise) return token;
    std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
    return pool[pick(rng)];
}

FunctionSequence instance_of(const std::vector<std::string>& concept_tokens,
                             const std::vector<std::string>& pool, double noise,
                             bool shuffled, std::mt19937_64& rng,
                             const std::string& source_id) {
    FunctionSequence seq;
    seq.source_id = source_id;
    seq.method_name = concept_tokens[0];
    for (size_t i = 1; i < concept_tokens.size(); ++i)
        seq.calls.push_back(noisy(concept_tokens[i], pool, noise, rng));
    if (shuffled) std::shuffle(seq.calls.begin(), seq.calls.end(), rng);
    return seq;
}

}  // namespace

SyntheticCorpus make_synthetic_corpus(const SyntheticOptions& options) {
    SyntheticCorpus corpus;
    corpus.options = options;
    std::mt19937_64 rng(options.seed);

    std::vector<std::string> all_names;
    for (const auto& v : verbs())
        for (const auto& n : nouns()) all_names.push_back(v + n);
    if (options.reserved_local >= all_names.size())
        throw std::invalid_argument("reserved_local exhausts the token pool");

    // reserve the tail of a shuffled pool for file-local fixtures
    std::shuffle(all_names.begin(), all_names.end(), rng);
    corpus.local_pool.assign(all_names.end() - std::ptrdiff_t(options.reserved_local),
                             all_names.end());
    corpus.token_pool.assign(all_names.begin(),
                             all_names.end() - std::ptrdiff_t(options.reserved_local));

    std::uniform_int_distribution<size_t> pick(0, corpus.token_pool.size() - 1);
    for (size_t c = 0; c < options.n_concepts; ++c) {
        std::vector<std::string> concept_tokens;
        concept_tokens.push_back(corpus.token_pool[c % corpus.token_pool.size()]);  // method name
        for (size_t i = 0; i < options.concept_len; ++i)
            concept_tokens.push_back(corpus.token_pool[pick(rng)]);
        corpus.concepts.push_back(std::move(concept_tokens));
    }

    // noise in training draws from the full pool including local tokens, so
    // local tokens clear the vocabulary cut-off without forming any pattern
    std::uniform_int_distribution<size_t> pick_concept(0, corpus.concepts.size() - 1);
    for (size_t i = 0; i < options.n_train; ++i) {
        std::string file = "train/f" + std::to_string(i % 100);
        corpus.train.push_back(instance_of(corpus.concepts[pick_concept(rng)], all_names,
                                           options.noise, options.shuffled_instances, rng,
                                           file));
    }
    return corpus;
}

ProjectData make_heldout_project(const SyntheticCorpus& corpus, size_t n_instances,
                                 double noise, uint64_t seed, const std::string& project_id,
                                 size_t files) {
    ProjectData project;
    project.project_id = project_id;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<size_t> pick_concept(0, corpus.concepts.size() - 1);
    for (size_t i = 0; i < n_instances; ++i) {
        std::string file = project_id + "/f" + std::to_string(i % files);
        project.sequences.push_back(instance_of(corpus.concepts[pick_concept(rng)],
                                                corpus.token_pool, noise,
                                                corpus.options.shuffled_instances, rng, file));
    }
    return project;
}

ProjectData make_repetition_project(const SyntheticCorpus& corpus, size_t n_methods,
                                    uint64_t seed, const std::string& project_id) {
    if (corpus.local_pool.size() < 2)
        throw std::invalid_argument("corpus has no reserved local tokens");
    ProjectData project;
    project.project_id = project_id;
    std::mt19937_64 rng(seed);

    // one idiom per file, repeated verbatim in every method of that file
    const size_t idiom_len = std::min<size_t>(corpus.local_pool.size() - 1, 6);
    std::vector<std::string> idiom(corpus.local_pool.begin(),
                                   corpus.local_pool.begin() + std::ptrdiff_t(idiom_len + 1));
    for (size_t m = 0; m < n_methods; ++m) {
        FunctionSequence seq;
        seq.source_id = project_id + "/local";
        seq.method_name = idiom[0];
        seq.calls.assign(idiom.begin() + 1, idiom.end());
        project.sequences.push_back(std::move(seq));
    }
    (void)rng;
    return project;
}

}  // namespace callrank
