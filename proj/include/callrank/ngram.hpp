#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "callrank/io_util.hpp"
#include "callrank/vocabulary.hpp"

namespace callrank {

struct SmoothingConfig {
    enum class Kind { mle, jelinek_mercer, kneser_ney };
    Kind kind = Kind::jelinek_mercer;
    double lambda = 0.5;    // JM interpolation weight, in (0,1)
    double discount = 0.75; // KN absolute discount, in (0,1)

    void validate() const;
    static const char* kind_name(Kind k);
};

namespace detail {
struct IdVecHash {
    size_t operator()(const std::vector<TokenId>& v) const {
        uint64_t h = 1469598103934665603ull;
        for (TokenId id : v) {
            h ^= id;
            h *= 1099511628211ull;
        }
        return size_t(h);
    }
};
}  // namespace detail

/// Order-n Markov model over function tokens. Counts are kept in a
/// context-keyed trie; begin-of-sequence padding makes the method name
/// predictable from context. Padding ids appear in contexts only, never as
/// prediction targets.
class NGramModel {
public:
    struct ContextNode {
        std::unordered_map<TokenId, uint64_t> child;
        uint64_t total = 0;
    };
    using CountMap = std::unordered_map<std::vector<TokenId>, ContextNode, detail::IdVecHash>;

    static NGramModel train(const std::vector<std::vector<TokenId>>& token_lists,
                            uint32_t order, Vocabulary vocabulary,
                            SmoothingConfig smoothing, int workers = 1);
    static NGramModel train(const std::vector<FunctionSequence>& sequences,
                            uint32_t order, Vocabulary vocabulary,
                            SmoothingConfig smoothing, int workers = 1);

    uint32_t order() const { return order_; }
    const Vocabulary& vocabulary() const { return vocab_; }
    const SmoothingConfig& smoothing() const { return smoothing_; }
    void set_smoothing(SmoothingConfig s);
    TokenId bos_id() const { return bos_id_; }

    /// Smoothed P(word | context). The length-(order-1) suffix of context is
    /// used, front-padded with the begin-of-sequence id when shorter.
    double prob(std::span<const TokenId> context, TokenId word) const;

    /// Average bits per token, -(1/N) sum log2 P(w_i | history).
    /// exclude_oov skips positions whose target is <unk>.
    double cross_entropy(const std::vector<std::vector<TokenId>>& token_lists,
                         bool exclude_oov = false) const;

    std::vector<TokenId> map_tokens(const std::vector<std::string>& tokens) const;
    std::vector<std::vector<TokenId>> map_sequences(const std::vector<FunctionSequence>& sequences) const;

    uint64_t raw_count(std::span<const TokenId> context, TokenId word) const;
    const CountMap& counts() const { return counts_; }

    std::string stats() const;  // key=value dump
    void save(const std::string& path) const;
    static NGramModel load(const std::string& path);

private:
    friend class CacheState;
    double prob_padded(std::span<const TokenId> ctx, TokenId word) const;
    double jm_prob(std::span<const TokenId> ctx, TokenId word) const;
    double kn_prob(std::span<const TokenId> ctx, TokenId word, bool top) const;
    const ContextNode* find(const CountMap& m, std::span<const TokenId> ctx) const;
    void build_continuation();

    uint32_t order_ = 5;
    Vocabulary vocab_;
    SmoothingConfig smoothing_;
    TokenId bos_id_ = 0;  // = vocab size, outside the vocabulary domain
    CountMap counts_;     // raw counts, context length 0..order-1
    CountMap cont_;       // continuation counts, context length 0..order-2
};

/// Recency store of n-grams observed in the current test scope. Mixing with
/// the base model: gamma * P_cache + (1 - gamma) * P_base, where P_cache is
/// the MLE over cache counts at the longest cached context suffix, falling
/// back to P_base when nothing is cached for any suffix.
class CacheState {
public:
    CacheState(uint32_t order, double gamma = 0.5, size_t capacity = 100000);

    void observe(std::span<const TokenId> context, TokenId word);
    void clear();
    bool empty() const { return history_.empty(); }
    double gamma() const { return gamma_; }
    uint32_t order() const { return order_; }

    friend double cache_prob(const NGramModel& model, const CacheState& cache,
                             std::span<const TokenId> context, TokenId word);

private:
    struct Entry {
        std::vector<TokenId> context;  // already truncated to order-1
        TokenId word;
    };
    void add_counts(const Entry& e, int64_t delta);

    uint32_t order_;
    double gamma_;
    size_t capacity_;
    std::vector<Entry> history_;  // FIFO eviction beyond capacity
    size_t evict_at_ = 0;
    NGramModel::CountMap counts_;
};

double cache_prob(const NGramModel& model, const CacheState& cache,
                  std::span<const TokenId> context, TokenId word);

/// k most probable vocabulary tokens after context, descending probability,
/// ties by ascending token id. <unk> is never suggested.
std::vector<TokenId> predict_top_k(const NGramModel& model, const CacheState* cache,
                                   std::span<const TokenId> context, size_t k,
                                   std::vector<double>* probs_out = nullptr);

}  // namespace callrank
