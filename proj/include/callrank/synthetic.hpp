#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "callrank/pipeline.hpp"
#include "callrank/sequence.hpp"

namespace callrank {

/// Planted-concept corpus generator used by the benchmark fixtures: a fixed
/// set of recurring call sequences ("concepts") sampled with token noise.
/// Token names are camelCase verb+noun compounds from small pools, so the
/// subtoken stream has far fewer types than the full-name stream.
struct SyntheticOptions {
    size_t n_concepts = 50;
    size_t concept_len = 8;  // calls per concept
    size_t n_train = 5000;
    double noise = 0.2;  // per-token replacement probability
    uint64_t seed = 1234;
    size_t reserved_local = 16;  // pool tokens kept out of concepts, for cache fixtures
    // emit each instance's calls in a fresh random order: concepts recur as
    // co-occurring call sets rather than fixed sequences
    bool shuffled_instances = false;
};

struct SyntheticCorpus {
    SyntheticOptions options;
    std::vector<FunctionSequence> train;
    std::vector<std::string> token_pool;  // all call-name tokens
    std::vector<std::string> local_pool;  // reserved, appear in training only as noise
    // concept[i][0] is the method name, the rest are the calls
    std::vector<std::vector<std::string>> concepts;
};

SyntheticCorpus make_synthetic_corpus(const SyntheticOptions& options);

/// Noisy instances of the planted concepts, spread over `files` file ids.
ProjectData make_heldout_project(const SyntheticCorpus& corpus, size_t n_instances,
                                 double noise, uint64_t seed, const std::string& project_id,
                                 size_t files = 10);

/// A project dominated by a file-local idiom built from the reserved local
/// tokens; the idiom is rare and unpatterned in training, so only a cache
/// can learn it at test time.
ProjectData make_repetition_project(const SyntheticCorpus& corpus, size_t n_methods,
                                    uint64_t seed, const std::string& project_id);

}  // namespace callrank
