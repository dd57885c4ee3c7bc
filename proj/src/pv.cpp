#include "callrank/pv.hpp"

#include <algorithm>
#include <atomic>
#include <random>
#include <stdexcept>

#include "callrank/io_util.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace callrank {

void HyperParams::validate() const {
    if (dim < 1) throw std::invalid_argument("dim must be >= 1");
    if (window < 1) throw std::invalid_argument("window must be >= 1");
    if (!(alpha0 > 0) || !(alpha_min > 0) || alpha_min > alpha0)
        throw std::invalid_argument("need 0 < alpha_min <= alpha0");
}

namespace {

uint64_t mix_seed(uint64_t seed, uint64_t a, uint64_t b) {
    uint64_t h = seed ^ (a * 0x9E3779B97F4A7C15ull) ^ (b * 0xBF58476D1CE4E5B9ull);
    h ^= h >> 30;
    h *= 0xBF58476D1CE4E5B9ull;
    h ^= h >> 27;
    return h;
}

void init_vector(float* v, size_t dim, std::mt19937_64& rng) {
    std::uniform_real_distribution<float> dist(-0.5f, 0.5f);
    for (size_t i = 0; i < dim; ++i) v[i] = dist(rng) / float(dim);
}

// One SGD step: push the paragraph vector toward the target word along its
// Huffman path. Standard word2vec update, float32 accumulation.
void hs_update(const HuffmanTree& tree, float* node_vectors, size_t dim,
               float* dv, TokenId word, float alpha, bool freeze_nodes,
               std::vector<float>& neu1e) {
    neu1e.assign(dim, 0.0f);
    const auto& path = tree.paths[word];
    for (size_t s = 0; s < path.nodes.size(); ++s) {
        float* nv = node_vectors + size_t(path.nodes[s]) * dim;
        float dot = 0;
        for (size_t i = 0; i < dim; ++i) dot += nv[i] * dv[i];
        float f = sigmoid(dot);
        float g = (1.0f - float(path.code[s]) - f) * alpha;
        for (size_t i = 0; i < dim; ++i) neu1e[i] += g * nv[i];
        if (!freeze_nodes)
            for (size_t i = 0; i < dim; ++i) nv[i] += g * dv[i];
    }
    for (size_t i = 0; i < dim; ++i) dv[i] += neu1e[i];
}

}  // namespace

PVModel PVModel::train(const std::vector<FunctionSequence>& sequences,
                       Vocabulary vocabulary, HyperParams hyper, int workers,
                       std::vector<double>* epoch_loss) {
    hyper.validate();
    if (sequences.empty()) throw std::invalid_argument("empty sequence set");
    if (vocabulary.size() < 2) throw std::invalid_argument("vocabulary too small");

    PVModel m;
    m.vocab_ = std::move(vocabulary);
    m.hyper_ = hyper;
    m.tree_ = HuffmanTree::build(m.vocab_);

    TokenizerConfig cfg;
    cfg.mode = m.vocab_.mode();
    uint64_t total_tokens = 0;
    m.docs_.reserve(sequences.size());
    for (const auto& seq : sequences) {
        DocEntry d;
        d.source_id = seq.source_id;
        size_t n_name = 1;
        auto toks = flatten_sequence(seq, cfg, &n_name);
        size_t kept_name = 0;
        for (size_t i = 0; i < toks.size(); ++i) {
            if (!m.vocab_.contains(toks[i])) continue;  // OOV dropped, not <unk>
            d.tokens.push_back(m.vocab_.lookup(toks[i]));
            if (i < n_name) ++kept_name;
        }
        d.n_name_tokens = uint32_t(kept_name);
        total_tokens += d.tokens.size();
        m.docs_.push_back(std::move(d));
    }

    const size_t dim = hyper.dim;
    const size_t ndocs = m.docs_.size();
    m.doc_vectors_.resize(ndocs * dim);
    m.node_vectors_.assign(m.tree_.n_internal * dim, 0.0f);
    {
        std::mt19937_64 rng(hyper.seed);
        for (size_t d = 0; d < ndocs; ++d) init_vector(&m.doc_vectors_[d * dim], dim, rng);
    }

    const uint64_t total_updates = uint64_t(hyper.epochs) * std::max<uint64_t>(total_tokens, 1);
    std::atomic<uint64_t> processed{0};

    for (uint32_t epoch = 0; epoch < hyper.epochs; ++epoch) {
        // workers > 1: hogwild over shared matrices, documented nondeterminism
#ifdef _OPENMP
#pragma omp parallel for num_threads(std::max(workers, 1)) schedule(dynamic, 64) if (workers > 1)
#endif
        for (int64_t d = 0; d < int64_t(ndocs); ++d) {
            const auto& toks = m.docs_[size_t(d)].tokens;
            if (toks.empty()) continue;
            float* dv = &m.doc_vectors_[size_t(d) * dim];
            std::mt19937_64 rng(mix_seed(hyper.seed, epoch + 1, uint64_t(d) + 1));
            std::vector<float> neu1e(dim);
            for (size_t t = 0; t < toks.size(); ++t) {
                uint64_t done = processed.fetch_add(1, std::memory_order_relaxed);
                float alpha = std::max(
                    hyper.alpha_min,
                    hyper.alpha0 * (1.0f - float(double(done) / double(total_updates + 1))));
                size_t b = 1 + size_t(rng() % hyper.window);
                size_t lo = t >= b ? t - b : 0;
                size_t hi = std::min(toks.size() - 1, t + b);
                for (size_t j = lo; j <= hi; ++j)
                    hs_update(m.tree_, m.node_vectors_.data(), dim, dv, toks[j], alpha,
                              false, neu1e);
            }
        }
        if (epoch_loss) {
            double sum = 0;
            size_t counted = 0;
            for (uint32_t d = 0; d < ndocs; ++d) {
                if (m.docs_[d].tokens.empty()) continue;
                sum += m.doc_loss(d);
                ++counted;
            }
            epoch_loss->push_back(counted ? sum / double(counted) : 0.0);
        }
    }
    return m;
}

std::vector<float> PVModel::infer_vector(const std::vector<std::string>& tokens,
                                         uint32_t steps, uint64_t seed,
                                         bool* warned) const {
    const size_t dim = hyper_.dim;
    std::vector<TokenId> ids;
    for (const auto& t : tokens)
        if (vocab_.contains(t)) ids.push_back(vocab_.lookup(t));
    if (warned) *warned = false;
    if (ids.empty()) {
        if (warned) *warned = true;
        return std::vector<float>(dim, 0.0f);
    }

    std::vector<float> vec(dim);
    std::mt19937_64 rng(seed);
    init_vector(vec.data(), dim, rng);

    std::vector<float> neu1e(dim);
    // node vectors are frozen during inference; const_cast is confined here
    auto* nv = const_cast<float*>(node_vectors_.data());
    const uint64_t total = uint64_t(steps) * ids.size();
    uint64_t done = 0;
    for (uint32_t step = 0; step < steps; ++step) {
        for (size_t t = 0; t < ids.size(); ++t) {
            float alpha = std::max(
                hyper_.alpha_min,
                hyper_.alpha0 * (1.0f - float(double(done++) / double(total + 1))));
            size_t b = 1 + size_t(rng() % hyper_.window);
            size_t lo = t >= b ? t - b : 0;
            size_t hi = std::min(ids.size() - 1, t + b);
            for (size_t j = lo; j <= hi; ++j)
                hs_update(tree_, nv, dim, vec.data(), ids[j], alpha, true, neu1e);
        }
    }
    return vec;
}

float cosine(std::span<const float> a, std::span<const float> b) {
    double dot = 0, na = 0, nb = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        dot += double(a[i]) * b[i];
        na += double(a[i]) * a[i];
        nb += double(b[i]) * b[i];
    }
    if (na == 0 || nb == 0) return 0.0f;
    return float(dot / (std::sqrt(na) * std::sqrt(nb)));
}

namespace {
std::vector<SimilarityHit> top_k_hits(std::vector<SimilarityHit>& scores, size_t k) {
    auto better = [](const SimilarityHit& a, const SimilarityHit& b) {
        return a.score > b.score || (a.score == b.score && a.doc_id < b.doc_id);
    };
    size_t take = std::min(k, scores.size());
    std::partial_sort(scores.begin(), scores.begin() + std::ptrdiff_t(take), scores.end(), better);
    scores.resize(take);
    return std::move(scores);
}
}  // namespace

std::vector<SimilarityHit> PVModel::most_similar(std::span<const float> query, size_t k) const {
    if (k == 0) throw std::invalid_argument("k must be >= 1");
    if (query.size() != hyper_.dim) throw std::invalid_argument("query dimension mismatch");
    double qn = 0;
    for (float x : query) qn += double(x) * x;
    if (qn == 0) throw std::invalid_argument("zero-norm query vector");

    std::vector<SimilarityHit> scores(docs_.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int64_t d = 0; d < int64_t(docs_.size()); ++d) {
        scores[size_t(d)] = {uint32_t(d), cosine(query, doc_vector(uint32_t(d)))};
    }
    return top_k_hits(scores, k);
}

std::vector<SimilarityHit> PVModel::most_similar_serial(std::span<const float> query,
                                                        size_t k) const {
    if (k == 0) throw std::invalid_argument("k must be >= 1");
    if (query.size() != hyper_.dim) throw std::invalid_argument("query dimension mismatch");
    double qn = 0;
    for (float x : query) qn += double(x) * x;
    if (qn == 0) throw std::invalid_argument("zero-norm query vector");

    std::vector<SimilarityHit> scores(docs_.size());
    for (size_t d = 0; d < docs_.size(); ++d)
        scores[d] = {uint32_t(d), cosine(query, doc_vector(uint32_t(d)))};
    return top_k_hits(scores, k);
}

double PVModel::doc_loss(uint32_t doc_id) const {
    const auto& toks = docs_.at(doc_id).tokens;
    if (toks.empty()) return 0.0;
    std::vector<double> dv(hyper_.dim);
    auto v = doc_vector(doc_id);
    for (size_t i = 0; i < v.size(); ++i) dv[i] = v[i];
    std::vector<double> nv(node_vectors_.begin(), node_vectors_.end());
    double loss = 0;
    for (TokenId w : toks)
        loss -= hs_log_prob(tree_, nv.data(), hyper_.dim, dv.data(), w);
    return loss / double(toks.size());
}

void PVModel::save(const std::string& path) const {
    BinaryWriter w(path);
    w.magic("CRPV");
    w.u32(1);  // version
    w.u32(hyper_.dim);
    w.u32(hyper_.window);
    w.u32(hyper_.min_count);
    w.u32(hyper_.epochs);
    w.f32(hyper_.alpha0);
    w.f32(hyper_.alpha_min);
    w.u64(hyper_.seed);
    vocab_.save(w);
    w.u64(docs_.size());
    for (const auto& d : docs_) {
        w.str(d.source_id);
        w.u32(d.n_name_tokens);
        w.u32(uint32_t(d.tokens.size()));
        for (TokenId id : d.tokens) w.u32(id);
    }
    for (float v : doc_vectors_) w.f32(v);
    for (float v : node_vectors_) w.f32(v);
    w.close();
}

PVModel PVModel::load(const std::string& path) {
    BinaryReader r(path);
    r.expect_magic("CRPV", "paragraph-vector model");
    if (r.u32() != 1) throw std::runtime_error("unsupported pv model version");
    PVModel m;
    m.hyper_.dim = r.u32();
    m.hyper_.window = r.u32();
    m.hyper_.min_count = r.u32();
    m.hyper_.epochs = r.u32();
    m.hyper_.alpha0 = r.f32();
    m.hyper_.alpha_min = r.f32();
    m.hyper_.seed = r.u64();
    m.vocab_ = Vocabulary::load(r);
    m.tree_ = HuffmanTree::build(m.vocab_);
    uint64_t ndocs = r.u64();
    m.docs_.resize(ndocs);
    for (auto& d : m.docs_) {
        d.source_id = r.str();
        d.n_name_tokens = r.u32();
        uint32_t n = r.u32();
        d.tokens.resize(n);
        for (auto& id : d.tokens) id = r.u32();
    }
    m.doc_vectors_.resize(ndocs * m.hyper_.dim);
    for (auto& v : m.doc_vectors_) v = r.f32();
    m.node_vectors_.resize(m.tree_.n_internal * m.hyper_.dim);
    for (auto& v : m.node_vectors_) v = r.f32();
    return m;
}

double gradient_check(uint64_t seed, size_t vocab_size, size_t dim) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<uint64_t> freq_dist(1, 100);
    std::vector<uint64_t> freqs(vocab_size);
    for (auto& f : freqs) f = freq_dist(rng);
    HuffmanTree tree = HuffmanTree::build(freqs);

    std::normal_distribution<double> nd(0.0, 0.5);
    std::vector<double> nodes(tree.n_internal * dim);
    std::vector<double> ctx(dim);
    for (auto& v : nodes) v = nd(rng);
    for (auto& v : ctx) v = nd(rng);

    const double h = 1e-5;
    double max_rel = 0.0;
    auto rel = [&](double analytic, double numeric) {
        double denom = std::max({std::fabs(analytic), std::fabs(numeric), 1e-8});
        return std::fabs(analytic - numeric) / denom;
    };

    for (TokenId w = 0; w < TokenId(vocab_size); ++w) {
        const auto& path = tree.paths[w];
        // analytic: dL/dctx = sum_s g_s * node_s ; dL/dnode_s = g_s * ctx
        std::vector<double> grad_ctx(dim, 0.0);
        std::vector<std::vector<double>> grad_node(path.nodes.size(), std::vector<double>(dim));
        for (size_t s = 0; s < path.nodes.size(); ++s) {
            const double* nv = &nodes[size_t(path.nodes[s]) * dim];
            double dot = 0;
            for (size_t i = 0; i < dim; ++i) dot += nv[i] * ctx[i];
            double f = sigmoid(dot);
            double g = 1.0 - double(path.code[s]) - f;
            for (size_t i = 0; i < dim; ++i) {
                grad_ctx[i] += g * nv[i];
                grad_node[s][i] = g * ctx[i];
            }
        }
        for (size_t i = 0; i < dim; ++i) {
            double keep = ctx[i];
            ctx[i] = keep + h;
            double up = hs_log_prob(tree, nodes.data(), dim, ctx.data(), w);
            ctx[i] = keep - h;
            double dn = hs_log_prob(tree, nodes.data(), dim, ctx.data(), w);
            ctx[i] = keep;
            max_rel = std::max(max_rel, rel(grad_ctx[i], (up - dn) / (2 * h)));
        }
        for (size_t s = 0; s < path.nodes.size(); ++s) {
            for (size_t i = 0; i < dim; ++i) {
                double* slot = &nodes[size_t(path.nodes[s]) * dim + i];
                double keep = *slot;
                *slot = keep + h;
                double up = hs_log_prob(tree, nodes.data(), dim, ctx.data(), w);
                *slot = keep - h;
                double dn = hs_log_prob(tree, nodes.data(), dim, ctx.data(), w);
                *slot = keep;
                max_rel = std::max(max_rel, rel(grad_node[s][i], (up - dn) / (2 * h)));
            }
        }
    }
    return max_rel;
}

}  // namespace callrank
