#include "callrank/ngram.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace callrank {

void SmoothingConfig::validate() const {
    if (kind == Kind::jelinek_mercer && !(lambda > 0.0 && lambda < 1.0))
        throw std::invalid_argument("jelinek-mercer lambda must be in (0,1)");
    if (kind == Kind::kneser_ney && !(discount > 0.0 && discount < 1.0))
        throw std::invalid_argument("kneser-ney discount must be in (0,1)");
}

const char* SmoothingConfig::kind_name(Kind k) {
    switch (k) {
        case Kind::mle: return "mle";
        case Kind::jelinek_mercer: return "jelinek_mercer";
        case Kind::kneser_ney: return "kneser_ney";
    }
    return "?";
}

namespace {

// Counts every n-gram of length 1..order in the given lists, with
// begin-of-sequence padding so the first token is predictable from context.
void count_into(NGramModel::CountMap& counts, const std::vector<std::vector<TokenId>>& lists,
                size_t begin, size_t end, uint32_t order, TokenId bos) {
    std::vector<TokenId> ctx;
    for (size_t s = begin; s < end; ++s) {
        const auto& toks = lists[s];
        for (size_t i = 0; i < toks.size(); ++i) {
            for (uint32_t len = 0; len < order; ++len) {
                ctx.clear();
                for (uint32_t back = len; back >= 1; --back) {
                    ctx.push_back(i >= back ? toks[i - back] : bos);
                }
                auto& node = counts[ctx];
                ++node.child[toks[i]];
                ++node.total;
            }
        }
    }
}

void merge_counts(NGramModel::CountMap& into, const NGramModel::CountMap& from) {
    for (const auto& [ctx, node] : from) {
        auto& dst = into[ctx];
        dst.total += node.total;
        for (const auto& [w, c] : node.child) dst.child[w] += c;
    }
}

}  // namespace

NGramModel NGramModel::train(const std::vector<std::vector<TokenId>>& token_lists,
                             uint32_t order, Vocabulary vocabulary,
                             SmoothingConfig smoothing, int workers) {
    if (order < 2) throw std::invalid_argument("n-gram order must be >= 2");
    smoothing.validate();

    NGramModel m;
    m.order_ = order;
    m.vocab_ = std::move(vocabulary);
    m.smoothing_ = smoothing;
    m.bos_id_ = TokenId(m.vocab_.size());

    if (workers <= 1) {
        count_into(m.counts_, token_lists, 0, token_lists.size(), order, m.bos_id_);
    } else {
        // per-shard counting; the merge is a plain sum, so the result is
        // independent of the shard count
        std::vector<CountMap> shards(static_cast<size_t>(workers));
#ifdef _OPENMP
#pragma omp parallel for num_threads(workers)
#endif
        for (int w = 0; w < workers; ++w) {
            size_t lo = token_lists.size() * size_t(w) / size_t(workers);
            size_t hi = token_lists.size() * size_t(w + 1) / size_t(workers);
            count_into(shards[size_t(w)], token_lists, lo, hi, order, m.bos_id_);
        }
        for (const auto& shard : shards) merge_counts(m.counts_, shard);
    }
    m.build_continuation();
    return m;
}

NGramModel NGramModel::train(const std::vector<FunctionSequence>& sequences,
                             uint32_t order, Vocabulary vocabulary,
                             SmoothingConfig smoothing, int workers) {
    TokenizerConfig cfg;
    cfg.mode = vocabulary.mode();
    std::vector<std::vector<TokenId>> lists;
    lists.reserve(sequences.size());
    for (const auto& seq : sequences) {
        auto toks = flatten_sequence(seq, cfg);
        std::vector<TokenId> ids;
        ids.reserve(toks.size());
        for (const auto& t : toks) ids.push_back(vocabulary.lookup(t));
        lists.push_back(std::move(ids));
    }
    return train(lists, order, std::move(vocabulary), smoothing, workers);
}

void NGramModel::build_continuation() {
    cont_.clear();
    // cont[h][w] = number of distinct left extensions v with c(v.h.w) > 0,
    // for every context h of length 0..order-2
    std::vector<TokenId> suffix;
    for (const auto& [ctx, node] : counts_) {
        if (ctx.empty()) continue;
        suffix.assign(ctx.begin() + 1, ctx.end());
        auto& dst = cont_[suffix];
        for (const auto& [w, c] : node.child) {
            (void)c;
            ++dst.child[w];
            ++dst.total;
        }
    }
}

void NGramModel::set_smoothing(SmoothingConfig s) {
    s.validate();
    smoothing_ = s;
}

const NGramModel::ContextNode* NGramModel::find(const CountMap& m,
                                                std::span<const TokenId> ctx) const {
    thread_local std::vector<TokenId> key;
    key.assign(ctx.begin(), ctx.end());
    auto it = m.find(key);
    return it == m.end() ? nullptr : &it->second;
}

double NGramModel::prob(std::span<const TokenId> context, TokenId word) const {
    // use the length-(order-1) suffix, front-padded with bos
    size_t need = order_ - 1;
    thread_local std::vector<TokenId> padded;
    padded.clear();
    if (context.size() >= need) {
        padded.assign(context.end() - std::ptrdiff_t(need), context.end());
    } else {
        padded.assign(need - context.size(), bos_id_);
        padded.insert(padded.end(), context.begin(), context.end());
    }
    return prob_padded(padded, word);
}

double NGramModel::prob_padded(std::span<const TokenId> ctx, TokenId word) const {
    double uniform = 1.0 / double(vocab_.size());
    switch (smoothing_.kind) {
        case SmoothingConfig::Kind::mle: {
            const ContextNode* node = find(counts_, ctx);
            if (!node || node->total == 0) return uniform;
            auto it = node->child.find(word);
            return it == node->child.end() ? 0.0 : double(it->second) / double(node->total);
        }
        case SmoothingConfig::Kind::jelinek_mercer:
            return jm_prob(ctx, word);
        case SmoothingConfig::Kind::kneser_ney:
            return kn_prob(ctx, word, true);
    }
    return uniform;
}

double NGramModel::jm_prob(std::span<const TokenId> ctx, TokenId word) const {
    double uniform = 1.0 / double(vocab_.size());
    if (ctx.empty()) {
        // grounding level: interpolate the unigram MLE with the uniform floor
        const ContextNode* uni = find(counts_, ctx);
        if (!uni || uni->total == 0) return uniform;
        auto it = uni->child.find(word);
        double mle = it == uni->child.end() ? 0.0 : double(it->second) / double(uni->total);
        return smoothing_.lambda * mle + (1.0 - smoothing_.lambda) * uniform;
    }
    const ContextNode* node = find(counts_, ctx);
    if (!node || node->total == 0) return jm_prob(ctx.subspan(1), word);
    auto it = node->child.find(word);
    double mle = it == node->child.end() ? 0.0 : double(it->second) / double(node->total);
    return smoothing_.lambda * mle + (1.0 - smoothing_.lambda) * jm_prob(ctx.subspan(1), word);
}

double NGramModel::kn_prob(std::span<const TokenId> ctx, TokenId word, bool top) const {
    double uniform = 1.0 / double(vocab_.size());
    double d = smoothing_.discount;
    const CountMap& source = top ? counts_ : cont_;
    const ContextNode* node = find(source, ctx);
    if (!node || node->total == 0) {
        if (ctx.empty()) return uniform;
        return kn_prob(ctx.subspan(1), word, false);
    }
    double lower = ctx.empty() ? uniform : kn_prob(ctx.subspan(1), word, false);
    auto it = node->child.find(word);
    double c = it == node->child.end() ? 0.0 : double(it->second);
    double total = double(node->total);
    double distinct = double(node->child.size());
    return std::max(c - d, 0.0) / total + (d * distinct / total) * lower;
}

double NGramModel::cross_entropy(const std::vector<std::vector<TokenId>>& token_lists,
                                 bool exclude_oov) const {
    double sum_log2 = 0.0;
    size_t n = 0;
    std::vector<TokenId> ctx;
    for (const auto& toks : token_lists) {
        for (size_t i = 0; i < toks.size(); ++i) {
            if (exclude_oov && toks[i] == Vocabulary::kUnkId) continue;
            ctx.clear();
            size_t lo = i >= size_t(order_ - 1) ? i - (order_ - 1) : 0;
            ctx.assign(toks.begin() + std::ptrdiff_t(lo), toks.begin() + std::ptrdiff_t(i));
            double p = prob(ctx, toks[i]);
            sum_log2 += std::log2(p);
            ++n;
        }
    }
    if (n == 0) throw std::invalid_argument("cross_entropy over an empty token stream");
    return -sum_log2 / double(n);
}

std::vector<TokenId> NGramModel::map_tokens(const std::vector<std::string>& tokens) const {
    std::vector<TokenId> ids;
    ids.reserve(tokens.size());
    for (const auto& t : tokens) ids.push_back(vocab_.lookup(t));
    return ids;
}

std::vector<std::vector<TokenId>> NGramModel::map_sequences(
    const std::vector<FunctionSequence>& sequences) const {
    TokenizerConfig cfg;
    cfg.mode = vocab_.mode();
    std::vector<std::vector<TokenId>> out;
    out.reserve(sequences.size());
    for (const auto& seq : sequences) out.push_back(map_tokens(flatten_sequence(seq, cfg)));
    return out;
}

uint64_t NGramModel::raw_count(std::span<const TokenId> context, TokenId word) const {
    const ContextNode* node = find(counts_, context);
    if (!node) return 0;
    auto it = node->child.find(word);
    return it == node->child.end() ? 0 : it->second;
}

std::string NGramModel::stats() const {
    uint64_t grams = 0;
    for (const auto& [ctx, node] : counts_) grams += node.child.size();
    std::ostringstream os;
    os << "order=" << order_ << '\n'
       << "smoothing=" << SmoothingConfig::kind_name(smoothing_.kind) << '\n'
       << "vocabulary_types=" << vocab_.size() << '\n'
       << "contexts=" << counts_.size() << '\n'
       << "distinct_ngrams=" << grams << '\n';
    return os.str();
}

void NGramModel::save(const std::string& path) const {
    BinaryWriter w(path);
    w.magic("CRNG");
    w.u32(1);  // version
    w.u32(order_);
    w.u8(uint8_t(smoothing_.kind));
    w.f64(smoothing_.lambda);
    w.f64(smoothing_.discount);
    vocab_.save(w);
    // contexts sorted for byte-stable output
    std::map<std::vector<TokenId>, const ContextNode*> sorted;
    for (const auto& [ctx, node] : counts_) sorted.emplace(ctx, &node);
    w.u64(sorted.size());
    for (const auto& [ctx, node] : sorted) {
        w.u32(uint32_t(ctx.size()));
        for (TokenId id : ctx) w.u32(id);
        std::map<TokenId, uint64_t> children(node->child.begin(), node->child.end());
        w.u32(uint32_t(children.size()));
        for (const auto& [id, c] : children) {
            w.u32(id);
            w.u64(c);
        }
    }
    w.close();
}

NGramModel NGramModel::load(const std::string& path) {
    BinaryReader r(path);
    r.expect_magic("CRNG", "n-gram model");
    if (r.u32() != 1) throw std::runtime_error("unsupported n-gram model version");
    NGramModel m;
    m.order_ = r.u32();
    m.smoothing_.kind = SmoothingConfig::Kind(r.u8());
    m.smoothing_.lambda = r.f64();
    m.smoothing_.discount = r.f64();
    m.vocab_ = Vocabulary::load(r);
    m.bos_id_ = TokenId(m.vocab_.size());
    uint64_t n_ctx = r.u64();
    for (uint64_t i = 0; i < n_ctx; ++i) {
        uint32_t len = r.u32();
        std::vector<TokenId> ctx(len);
        for (auto& id : ctx) id = r.u32();
        ContextNode node;
        uint32_t n_children = r.u32();
        for (uint32_t j = 0; j < n_children; ++j) {
            TokenId id = r.u32();
            uint64_t c = r.u64();
            node.child.emplace(id, c);
            node.total += c;
        }
        m.counts_.emplace(std::move(ctx), std::move(node));
    }
    m.build_continuation();
    return m;
}

CacheState::CacheState(uint32_t order, double gamma, size_t capacity)
    : order_(order), gamma_(gamma), capacity_(capacity) {
    if (order < 2) throw std::invalid_argument("cache order must be >= 2");
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("cache gamma must be in (0,1)");
}

void CacheState::add_counts(const Entry& e, int64_t delta) {
    std::vector<TokenId> ctx;
    for (size_t len = 0; len <= e.context.size(); ++len) {
        ctx.assign(e.context.end() - std::ptrdiff_t(len), e.context.end());
        auto& node = counts_[ctx];
        auto& c = node.child[e.word];
        c = uint64_t(int64_t(c) + delta);
        node.total = uint64_t(int64_t(node.total) + delta);
    }
}

void CacheState::observe(std::span<const TokenId> context, TokenId word) {
    Entry e;
    size_t keep = std::min(context.size(), size_t(order_ - 1));
    e.context.assign(context.end() - std::ptrdiff_t(keep), context.end());
    e.word = word;
    add_counts(e, +1);
    history_.push_back(std::move(e));
    if (history_.size() - evict_at_ > capacity_) {
        add_counts(history_[evict_at_], -1);
        ++evict_at_;
    }
}

void CacheState::clear() {
    history_.clear();
    counts_.clear();
    evict_at_ = 0;
}

double cache_prob(const NGramModel& model, const CacheState& cache,
                  std::span<const TokenId> context, TokenId word) {
    double base = model.prob(context, word);
    if (cache.history_.size() == cache.evict_at_) return base;

    // longest cached context suffix; the level choice depends only on the
    // context, so the mixed distribution still sums to one
    size_t max_len = std::min(context.size(), size_t(cache.order_ - 1));
    thread_local std::vector<TokenId> key;
    for (size_t len = max_len + 1; len-- > 0;) {
        key.assign(context.end() - std::ptrdiff_t(len), context.end());
        auto it = cache.counts_.find(key);
        if (it == cache.counts_.end() || it->second.total == 0) continue;
        auto ch = it->second.child.find(word);
        double p_cache = ch == it->second.child.end()
                             ? 0.0
                             : double(ch->second) / double(it->second.total);
        return cache.gamma_ * p_cache + (1.0 - cache.gamma_) * base;
    }
    return base;
}

std::vector<TokenId> predict_top_k(const NGramModel& model, const CacheState* cache,
                                   std::span<const TokenId> context, size_t k,
                                   std::vector<double>* probs_out) {
    if (k == 0) throw std::invalid_argument("k must be >= 1");
    const size_t n = model.vocabulary().size();
    std::vector<std::pair<double, TokenId>> scored;
    scored.reserve(n);
    for (TokenId id = 0; id < TokenId(n); ++id) {
        if (id == Vocabulary::kUnkId) continue;
        double p = cache ? cache_prob(model, *cache, context, id) : model.prob(context, id);
        scored.emplace_back(p, id);
    }
    auto better = [](const auto& a, const auto& b) {
        return a.first > b.first || (a.first == b.first && a.second < b.second);
    };
    size_t take = std::min(k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + std::ptrdiff_t(take), scored.end(), better);
    std::vector<TokenId> out;
    out.reserve(take);
    if (probs_out) probs_out->clear();
    for (size_t i = 0; i < take; ++i) {
        out.push_back(scored[i].second);
        if (probs_out) probs_out->push_back(scored[i].first);
    }
    return out;
}

}  // namespace callrank
