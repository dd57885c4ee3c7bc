#include "callrank/ranker.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>
#include <unordered_set>

namespace callrank {

void RankerConfig::validate() const {
    if (max_size < 1) throw std::invalid_argument("max_size must be >= 1");
    if (neighbor_budget < 1) throw std::invalid_argument("neighbor_budget must be >= 1");
    if (sim_threshold < -1.0 || sim_threshold > 1.0)
        throw std::invalid_argument("sim_threshold must be in [-1,1]");
}

std::vector<std::string> extract_context(const FunctionSequence& seq, size_t position) {
    if (position >= seq.calls.size())
        throw std::out_of_range("call position " + std::to_string(position) +
                                " out of range for method '" + seq.method_name + "'");
    std::vector<std::string> ctx;
    ctx.reserve(position + 1);
    ctx.push_back(seq.method_name);
    ctx.insert(ctx.end(), seq.calls.begin(), seq.calls.begin() + std::ptrdiff_t(position));
    return ctx;
}

SuggestionList temporary_list_pv(const PVModel& model, const std::vector<std::string>& context,
                                 const RankerConfig& config) {
    config.validate();
    SuggestionList out;
    bool warned = false;
    auto query = model.infer_vector(context, config.infer_steps, config.infer_seed, &warned);
    if (warned) {
        out.warning = true;
        return out;
    }

    auto hits = model.most_similar(query, config.neighbor_budget);
    // calls already typed are not completion targets, so neighbors only
    // contribute tokens absent from the context
    std::unordered_set<std::string> seen(context.begin(), context.end());
    for (const auto& hit : hits) {
        if (double(hit.score) < config.sim_threshold) break;
        const auto& doc = model.doc(hit.doc_id);
        for (size_t i = doc.n_name_tokens; i < doc.tokens.size(); ++i) {
            const std::string& tok = model.vocabulary().token(doc.tokens[i]);
            if (!seen.insert(tok).second) continue;
            out.items.push_back({tok, double(hit.score)});
            if (out.items.size() >= config.neighbor_budget) return out;
        }
    }
    return out;
}

SuggestionList temporary_list_ngram(const NGramModel& model, const CacheState* cache,
                                    const std::vector<std::string>& context,
                                    const RankerConfig& config) {
    config.validate();
    SuggestionList out;
    auto ids = model.map_tokens(context);
    std::vector<double> probs;
    auto top = predict_top_k(model, cache, ids, config.neighbor_budget, &probs);
    out.items.reserve(top.size());
    for (size_t i = 0; i < top.size(); ++i)
        out.items.push_back({model.vocabulary().token(top[i]), probs[i]});
    return out;
}

SuggestionList rank(const SuggestionList& temporary, const std::vector<std::string>& candidates,
                    const RankerConfig& config) {
    config.validate();
    SuggestionList out;
    out.warning = temporary.warning;
    std::unordered_set<std::string> kept;
    for (const auto& item : temporary.items) {
        if (out.items.size() >= config.max_size) break;
        if (!std::binary_search(candidates.begin(), candidates.end(), item.token)) continue;
        if (!kept.insert(item.token).second) continue;
        out.items.push_back(item);
    }
    if (config.fill_tail) {
        for (const auto& cand : candidates) {
            if (out.items.size() >= config.max_size) break;
            if (kept.count(cand)) continue;
            out.items.push_back({cand, 0.0});
        }
    }
    return out;
}

SuggestionList complete(const CallSiteRecord& site, const Suggester& suggester,
                        const RankerConfig& config, double* latency_ms) {
    auto start = std::chrono::steady_clock::now();
    SuggestionList temp;
    switch (suggester.kind) {
        case Suggester::Kind::baseline:
            break;  // empty temporary list; fill_tail provides the alphabetical head
        case Suggester::Kind::pv:
            temp = temporary_list_pv(*suggester.pv, site.context, config);
            break;
        case Suggester::Kind::ngram:
            temp = temporary_list_ngram(*suggester.ngram, suggester.cache, site.context, config);
            break;
    }
    RankerConfig cfg = config;
    if (suggester.kind == Suggester::Kind::baseline) cfg.fill_tail = true;
    SuggestionList result = rank(temp, site.candidates, cfg);
    if (latency_ms) {
        auto end = std::chrono::steady_clock::now();
        *latency_ms = std::chrono::duration<double, std::milli>(end - start).count();
    }
    return result;
}

}  // namespace callrank
