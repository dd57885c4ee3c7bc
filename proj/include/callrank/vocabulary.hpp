#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "callrank/io_util.hpp"
#include "callrank/sequence.hpp"
#include "callrank/tokenizer.hpp"

namespace callrank {

using TokenId = uint32_t;

/// Token <-> dense id map with frequency counts. Tokens whose corpus
/// frequency is below min_count resolve to the <unk> sentinel (always
/// present, id 0).
class Vocabulary {
public:
    static constexpr TokenId kUnkId = 0;
    static constexpr const char* kUnkToken = "<unk>";

    Vocabulary();

    TokenId lookup(const std::string& token) const;  // OOV -> kUnkId
    const std::string& token(TokenId id) const;
    bool contains(const std::string& token) const;   // true iff not collapsed to unk

    size_t size() const { return id_to_token_.size(); }  // includes <unk>
    uint64_t frequency(TokenId id) const { return frequencies_[id]; }
    uint32_t min_count() const { return min_count_; }
    TokenMode mode() const { return mode_; }

    // Corpus statistics for the stats report.
    uint64_t total_tokens() const { return total_tokens_; }
    uint64_t types_before_cutoff() const { return types_before_cutoff_; }

    void save(BinaryWriter& w) const;
    static Vocabulary load(BinaryReader& r);

    friend Vocabulary build_vocabulary(const std::vector<FunctionSequence>& sequences,
                                       uint32_t min_count, const TokenizerConfig& config);

private:
    std::unordered_map<std::string, TokenId> token_to_id_;
    std::vector<std::string> id_to_token_;
    std::vector<uint64_t> frequencies_;
    uint32_t min_count_ = 0;
    TokenMode mode_ = TokenMode::full_names;
    uint64_t total_tokens_ = 0;
    uint64_t types_before_cutoff_ = 0;
};

/// Frequencies are computed over method names and calls jointly, after
/// applying the tokenizer mode. Deterministic: surviving tokens are assigned
/// ids in lexicographic order after <unk>.
Vocabulary build_vocabulary(const std::vector<FunctionSequence>& sequences,
                            uint32_t min_count, const TokenizerConfig& config);

/// key=value stats lines (sequence/token/type counts before and after cutoff).
std::string vocabulary_stats(const Vocabulary& vocab, size_t sequence_count);

}  // namespace callrank
