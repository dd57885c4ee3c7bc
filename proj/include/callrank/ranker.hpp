#pragma once

#include <string>
#include <vector>

#include "callrank/callsites.hpp"
#include "callrank/ngram.hpp"
#include "callrank/pv.hpp"

namespace callrank {

struct RankerConfig {
    size_t max_size = 10;          // final suggestion list cap
    double sim_threshold = 0.25;   // stop fetching neighbors below this cosine
    size_t neighbor_budget = 100;  // neighbors fetched / temporary-list token cap
    bool fill_tail = false;        // pad with alphabetical candidates
    uint32_t infer_steps = 50;
    uint64_t infer_seed = 42;

    void validate() const;
};

struct ScoredToken {
    std::string token;
    double score;  // cosine of the contributing neighbor, or n-gram probability
};

struct SuggestionList {
    std::vector<ScoredToken> items;
    bool warning = false;  // all-OOV context
};

/// (method_name, calls[0..position)); position 0 yields the method name only.
std::vector<std::string> extract_context(const FunctionSequence& seq, size_t position);

/// Walk neighbors in descending cosine, appending their unseen call tokens;
/// stop at the token cap or when the next neighbor falls below the
/// similarity threshold. Method-name tokens of neighbors and tokens already
/// present in the context are skipped.
SuggestionList temporary_list_pv(const PVModel& model, const std::vector<std::string>& context,
                                 const RankerConfig& config);

SuggestionList temporary_list_ngram(const NGramModel& model, const CacheState* cache,
                                    const std::vector<std::string>& context,
                                    const RankerConfig& config);

/// Ordered intersection of the temporary list with the static-analysis
/// candidates; optionally pad with the remaining candidates in stored
/// (alphabetical) order.
SuggestionList rank(const SuggestionList& temporary, const std::vector<std::string>& candidates,
                    const RankerConfig& config);

struct Suggester {
    enum class Kind { baseline, pv, ngram };
    Kind kind = Kind::baseline;
    const PVModel* pv = nullptr;
    NGramModel* ngram = nullptr;
    CacheState* cache = nullptr;  // optional, ngram only

    static Suggester make_baseline() { return {}; }
    static Suggester make_pv(const PVModel& m) { return {Kind::pv, &m, nullptr, nullptr}; }
    static Suggester make_ngram(NGramModel& m, CacheState* c = nullptr) {
        return {Kind::ngram, nullptr, &m, c};
    }
};

/// End-to-end completion of one call site; wall-clock latency in ms.
SuggestionList complete(const CallSiteRecord& site, const Suggester& suggester,
                        const RankerConfig& config, double* latency_ms = nullptr);

}  // namespace callrank
