#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "callrank/sequence.hpp"
#include "callrank/vocabulary.hpp"

namespace callrank {

/// One completion task: the context seen so far, the gold call to complete,
/// and the candidate list a type-based static analysis would offer
/// (alphabetically sorted in stored form, gold always a member).
struct CallSiteRecord {
    std::string site_id;
    std::string project_id;
    std::string file_id;
    std::vector<std::string> context;  // method name + preceding calls
    std::string gold;
    std::vector<std::string> candidates;  // sorted, no duplicates
    uint32_t position = 0;                // index of the call within its method
};

struct BenchmarkSet {
    std::vector<CallSiteRecord> records;
    size_t excluded = 0;  // gold missing from candidates, dropped but counted

    /// Fraction of gold tokens present in the given training vocabulary.
    double coverage(const Vocabulary& vocab) const;
};

/// Union of all distinct call tokens and method names observed in the
/// project, alphabetically sorted. A deliberately weak over-approximation of
/// a type analysis; true type-based lists arrive via read_callsites.
std::vector<std::string> naive_candidates(const std::vector<FunctionSequence>& project_sequences);

/// One record per call position in every method: a method with c calls
/// yields c records.
BenchmarkSet synthesize_call_sites(const std::vector<FunctionSequence>& sequences,
                                   const std::vector<std::string>& candidates,
                                   const std::string& project_id);

// JSON-lines format, one record per line; round-trip identity.
void write_callsites(const BenchmarkSet& set, const std::string& path);
BenchmarkSet read_callsites(const std::string& path);

}  // namespace callrank
