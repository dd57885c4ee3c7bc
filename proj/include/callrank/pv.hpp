#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "callrank/huffman.hpp"
#include "callrank/sequence.hpp"
#include "callrank/tokenizer.hpp"
#include "callrank/vocabulary.hpp"

namespace callrank {

struct HyperParams {
    uint32_t dim = 300;
    uint32_t window = 15;
    uint32_t min_count = 20;
    uint32_t epochs = 20;
    float alpha0 = 0.025f;
    float alpha_min = 1e-4f;
    uint64_t seed = 1;

    void validate() const;
};

struct SimilarityHit {
    uint32_t doc_id;
    float score;  // cosine, in [-1, 1]
};

template <typename T>
T sigmoid(T x) {
    return T(1) / (T(1) + std::exp(-x));
}

/// log P(word | ctx) under the hierarchical softmax: sum over the word's
/// Huffman path of log sigmoid(+/- <node, ctx>), sign chosen by the branch
/// bit. Probabilities over all leaves sum to 1.
template <typename T>
T hs_log_prob(const HuffmanTree& tree, const T* node_vectors, size_t dim,
              const T* ctx, TokenId word) {
    const auto& path = tree.paths[word];
    T lp = 0;
    for (size_t s = 0; s < path.nodes.size(); ++s) {
        const T* nv = node_vectors + size_t(path.nodes[s]) * dim;
        T dot = 0;
        for (size_t i = 0; i < dim; ++i) dot += nv[i] * ctx[i];
        T f = sigmoid(path.code[s] ? -dot : dot);
        lp += std::log(f);
    }
    return lp;
}

/// PV-DBOW paragraph-vector model trained with hierarchical softmax.
/// The document vector is the sole input; per position it is trained to
/// predict the tokens inside a sampled window around that position.
class PVModel {
public:
    struct DocEntry {
        std::string source_id;
        std::vector<TokenId> tokens;  // OOV-dropped flattened sequence
        uint32_t n_name_tokens = 1;   // leading method-name tokens, not suggestible
    };

    /// Bit-reproducible for a fixed seed and workers == 1. epoch_loss, when
    /// given, receives the mean doc_loss after each epoch.
    static PVModel train(const std::vector<FunctionSequence>& sequences,
                         Vocabulary vocabulary, HyperParams hyper, int workers = 1,
                         std::vector<double>* epoch_loss = nullptr);

    /// Optimize a fresh seeded vector against frozen node vectors.
    /// All-OOV input yields a zero vector with warned=true.
    std::vector<float> infer_vector(const std::vector<std::string>& tokens,
                                    uint32_t steps, uint64_t seed,
                                    bool* warned = nullptr) const;

    std::vector<SimilarityHit> most_similar(std::span<const float> query, size_t k) const;
    std::vector<SimilarityHit> most_similar_serial(std::span<const float> query, size_t k) const;

    /// Mean negative hs_log_prob of a document's tokens under its own vector.
    double doc_loss(uint32_t doc_id) const;

    size_t num_docs() const { return docs_.size(); }
    uint32_t dim() const { return hyper_.dim; }
    const HyperParams& hyper() const { return hyper_; }
    const Vocabulary& vocabulary() const { return vocab_; }
    const HuffmanTree& tree() const { return tree_; }
    const DocEntry& doc(uint32_t id) const { return docs_.at(id); }
    std::span<const float> doc_vector(uint32_t id) const {
        return {doc_vectors_.data() + size_t(id) * hyper_.dim, hyper_.dim};
    }
    std::span<const float> node_vectors() const { return node_vectors_; }

    void save(const std::string& path) const;
    static PVModel load(const std::string& path);

private:
    Vocabulary vocab_;
    HyperParams hyper_;
    HuffmanTree tree_;
    std::vector<DocEntry> docs_;
    std::vector<float> doc_vectors_;   // num_docs x dim
    std::vector<float> node_vectors_;  // n_internal x dim
};

float cosine(std::span<const float> a, std::span<const float> b);

/// Analytic hierarchical-softmax gradients vs central finite differences
/// (h = 1e-5, double precision) on a small random model fragment.
/// Returns the max relative error over context- and node-vector components.
double gradient_check(uint64_t seed = 7, size_t vocab_size = 12, size_t dim = 8);

}  // namespace callrank
