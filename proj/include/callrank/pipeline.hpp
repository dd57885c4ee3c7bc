#pragma once

#include <string>
#include <vector>

#include "callrank/callsites.hpp"
#include "callrank/metrics.hpp"
#include "callrank/ngram.hpp"
#include "callrank/pv.hpp"
#include "callrank/ranker.hpp"

namespace callrank {

struct ProjectData {
    std::string project_id;
    std::vector<FunctionSequence> sequences;  // source_id carries the file id
};

struct BenchOptions {
    RankerConfig ranker;
    std::vector<size_t> ks = {1, 3, 5, 10};
    double cache_gamma = 0.5;
    bool cache_per_project = false;  // default scope: per file
    bool run_baseline = true;
    bool run_pv = true;
    bool run_ngram = true;
    bool run_ngram_cache = true;
    int workers = 0;  // 0 = all cores
};

struct BenchOutput {
    std::vector<ProjectReport> projects;
    std::string markdown;
    std::string csv;
    size_t soundness_violations = 0;  // suggestions outside the candidate list
    size_t total_sites = 0;
};

/// RQ2/RQ3 protocol: for each held-out project, evaluate baseline, pv,
/// ngram and ngram+cache over every call site and build the compare report.
BenchOutput run_benchmark(const PVModel* pv, NGramModel* ngram,
                          const std::vector<ProjectData>& test_projects,
                          const BenchOptions& opts);

/// RQ1 protocol: cross-entropy over a model-order range in both token modes,
/// including and excluding OOV targets.
std::vector<EntropyRow> entropy_experiment(const std::vector<FunctionSequence>& train,
                                           const std::vector<ProjectData>& tests,
                                           uint32_t order_lo, uint32_t order_hi,
                                           uint32_t min_count_full, uint32_t min_count_sub,
                                           SmoothingConfig smoothing, int workers = 1);

}  // namespace callrank
