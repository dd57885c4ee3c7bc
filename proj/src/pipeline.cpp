#include "callrank/pipeline.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace callrank {

namespace {

bool sound(const CallSiteRecord& site, const SuggestionList& list, size_t max_size) {
    if (list.items.size() > max_size) return false;
    for (const auto& item : list.items)
        if (!std::binary_search(site.candidates.begin(), site.candidates.end(), item.token))
            return false;
    return true;
}

CompletionResult to_result(const CallSiteRecord& site, const SuggestionList& list,
                           double latency_ms) {
    CompletionResult r;
    r.gold = site.gold;
    r.latency_ms = latency_ms;
    r.suggestions.reserve(list.items.size());
    for (const auto& item : list.items) r.suggestions.push_back(item.token);
    return r;
}

// cache-free systems parallelize across call sites
std::vector<CompletionResult> eval_system(const BenchmarkSet& set, const Suggester& suggester,
                                          const RankerConfig& cfg, int workers,
                                          size_t* violations) {
    std::vector<CompletionResult> results(set.records.size());
    size_t bad = 0;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16) reduction(+ : bad) \
    num_threads(workers > 0 ? workers : omp_get_max_threads())
#endif
    for (int64_t i = 0; i < int64_t(set.records.size()); ++i) {
        const auto& site = set.records[size_t(i)];
        double latency = 0;
        SuggestionList list = complete(site, suggester, cfg, &latency);
        if (!sound(site, list, cfg.max_size)) ++bad;
        results[size_t(i)] = to_result(site, list, latency);
    }
    *violations += bad;
    return results;
}

// the cache variant is a single-threaded stream per scope: the gold token is
// appended to the cache after each evaluated site
std::vector<CompletionResult> eval_ngram_cache(const BenchmarkSet& set, NGramModel& model,
                                               const BenchOptions& opts, size_t* violations) {
    std::vector<CompletionResult> results;
    results.reserve(set.records.size());
    std::string scope;
    CacheState cache(model.order(), opts.cache_gamma);
    Suggester suggester = Suggester::make_ngram(model, &cache);
    for (const auto& site : set.records) {
        const std::string& site_scope = opts.cache_per_project ? site.project_id : site.file_id;
        if (site_scope != scope) {
            cache.clear();
            scope = site_scope;
        }
        double latency = 0;
        SuggestionList list = complete(site, suggester, opts.ranker, &latency);
        if (!sound(site, list, opts.ranker.max_size)) ++*violations;
        results.push_back(to_result(site, list, latency));
        cache.observe(model.map_tokens(site.context), model.vocabulary().lookup(site.gold));
    }
    return results;
}

}  // namespace

BenchOutput run_benchmark(const PVModel* pv, NGramModel* ngram,
                          const std::vector<ProjectData>& test_projects,
                          const BenchOptions& opts) {
    opts.ranker.validate();
    if (opts.run_pv && !pv) throw std::invalid_argument("pv system requested without a pv model");
    if ((opts.run_ngram || opts.run_ngram_cache) && !ngram)
        throw std::invalid_argument("ngram system requested without an ngram model");

    BenchOutput out;
    for (const auto& project : test_projects) {
        auto candidates = naive_candidates(project.sequences);
        BenchmarkSet set = synthesize_call_sites(project.sequences, candidates, project.project_id);
        if (set.records.empty()) continue;
        out.total_sites += set.records.size();

        const Vocabulary* cov_vocab = pv ? &pv->vocabulary() : (ngram ? &ngram->vocabulary() : nullptr);
        double coverage = cov_vocab ? set.coverage(*cov_vocab) : 0.0;

        ProjectReport rep;
        rep.project_id = project.project_id;
        auto add = [&](const std::string& label, std::vector<CompletionResult> results) {
            rep.systems.push_back(summarize(label, results, opts.ks, set.excluded, coverage));
        };

        if (opts.run_baseline) {
            auto baseline = Suggester::make_baseline();
            add("baseline", eval_system(set, baseline, opts.ranker, opts.workers,
                                        &out.soundness_violations));
        }
        if (opts.run_pv) {
            auto sg = Suggester::make_pv(*pv);
            add("pv", eval_system(set, sg, opts.ranker, opts.workers, &out.soundness_violations));
        }
        if (opts.run_ngram) {
            auto sg = Suggester::make_ngram(*ngram);
            add("ngram", eval_system(set, sg, opts.ranker, opts.workers, &out.soundness_violations));
        }
        if (opts.run_ngram_cache) {
            add("ngram_cache", eval_ngram_cache(set, *ngram, opts, &out.soundness_violations));
        }
        out.projects.push_back(std::move(rep));
    }
    out.markdown = compare_report_markdown(out.projects);
    out.csv = compare_report_csv(out.projects);
    return out;
}

std::vector<EntropyRow> entropy_experiment(const std::vector<FunctionSequence>& train,
                                           const std::vector<ProjectData>& tests,
                                           uint32_t order_lo, uint32_t order_hi,
                                           uint32_t min_count_full, uint32_t min_count_sub,
                                           SmoothingConfig smoothing, int workers) {
    if (order_lo < 2 || order_hi < order_lo) throw std::invalid_argument("bad order range");
    std::vector<EntropyRow> rows;
    for (TokenMode mode : {TokenMode::full_names, TokenMode::subtokens}) {
        TokenizerConfig cfg;
        cfg.mode = mode;
        uint32_t min_count = mode == TokenMode::full_names ? min_count_full : min_count_sub;
        Vocabulary vocab = build_vocabulary(train, min_count, cfg);
        const char* mode_name = mode == TokenMode::full_names ? "full" : "subtoken";
        for (uint32_t order = order_lo; order <= order_hi; ++order) {
            NGramModel model = NGramModel::train(train, order, vocab, smoothing, workers);
            for (const auto& project : tests) {
                auto lists = model.map_sequences(project.sequences);
                rows.push_back({project.project_id, order, mode_name, "incl_oov",
                                model.cross_entropy(lists, false)});
                rows.push_back({project.project_id, order, mode_name, "excl_oov",
                                model.cross_entropy(lists, true)});
            }
        }
    }
    return rows;
}

}  // namespace callrank
