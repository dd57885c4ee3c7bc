#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace callrank {

struct CompletionResult {
    std::string gold;
    std::vector<std::string> suggestions;  // ranked, best first
    double latency_ms = 0.0;
};

/// Fraction of results whose gold appears within the first k suggestions.
double recall_at_k(std::span<const CompletionResult> results, size_t k);

/// Mean reciprocal rank; gold absent counts as rank infinity (reciprocal 0).
double mrr(std::span<const CompletionResult> results);

struct SystemReport {
    std::string label;  // baseline, pv, ngram, ngram_cache
    size_t sites = 0;
    std::map<size_t, double> recall;  // k -> R@k
    double mrr_value = 0.0;
    double mean_latency_ms = 0.0;
    double median_latency_ms = 0.0;
    size_t excluded = 0;
    double coverage = 0.0;
};

struct ProjectReport {
    std::string project_id;
    std::vector<SystemReport> systems;
};

SystemReport summarize(const std::string& label, std::span<const CompletionResult> results,
                       const std::vector<size_t>& ks, size_t excluded, double coverage);

/// Side-by-side per-project table (system x {R@10, MRR}); best bold,
/// second best underlined in the markdown form.
std::string compare_report_markdown(const std::vector<ProjectReport>& projects);
std::string compare_report_csv(const std::vector<ProjectReport>& projects);

struct EntropyRow {
    std::string project;
    uint32_t order;
    std::string token_mode;  // full | subtoken
    std::string oov_mode;    // incl_oov | excl_oov
    double bits;
};

std::string entropy_report_csv(const std::vector<EntropyRow>& rows);

}  // namespace callrank
