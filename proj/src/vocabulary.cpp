#include "callrank/vocabulary.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace callrank {

Vocabulary::Vocabulary() {
    id_to_token_.push_back(kUnkToken);
    frequencies_.push_back(0);
    token_to_id_.emplace(kUnkToken, kUnkId);
}

TokenId Vocabulary::lookup(const std::string& token) const {
    auto it = token_to_id_.find(token);
    return it == token_to_id_.end() ? kUnkId : it->second;
}

const std::string& Vocabulary::token(TokenId id) const {
    return id_to_token_.at(id);
}

bool Vocabulary::contains(const std::string& token) const {
    return token_to_id_.count(token) > 0;
}

Vocabulary build_vocabulary(const std::vector<FunctionSequence>& sequences,
                            uint32_t min_count, const TokenizerConfig& config) {
    // ordered map: ids are assigned lexicographically, so the result is
    // independent of input sharding
    std::map<std::string, uint64_t> freq;
    uint64_t total = 0;
    for (const auto& seq : sequences) {
        for (const auto& tok : flatten_sequence(seq, config)) {
            ++freq[tok];
            ++total;
        }
    }

    Vocabulary v;
    v.min_count_ = min_count;
    v.mode_ = config.mode;
    v.total_tokens_ = total;
    v.types_before_cutoff_ = freq.size();
    for (const auto& [tok, count] : freq) {
        if (count < min_count || tok == Vocabulary::kUnkToken) {
            v.frequencies_[Vocabulary::kUnkId] += count;
        } else {
            v.token_to_id_.emplace(tok, TokenId(v.id_to_token_.size()));
            v.id_to_token_.push_back(tok);
            v.frequencies_.push_back(count);
        }
    }
    return v;
}

std::string vocabulary_stats(const Vocabulary& vocab, size_t sequence_count) {
    std::ostringstream os;
    os << "sequences=" << sequence_count << '\n'
       << "tokens=" << vocab.total_tokens() << '\n'
       << "types_before_min_count=" << vocab.types_before_cutoff() << '\n'
       << "types_after_min_count=" << vocab.size() << '\n'
       << "min_count=" << vocab.min_count() << '\n'
       << "mode=" << (vocab.mode() == TokenMode::full_names ? "full_names" : "subtokens") << '\n'
       << "unk_frequency=" << vocab.frequency(Vocabulary::kUnkId) << '\n';
    return os.str();
}

void Vocabulary::save(BinaryWriter& w) const {
    w.u32(min_count_);
    w.u8(mode_ == TokenMode::full_names ? 0 : 1);
    w.u64(total_tokens_);
    w.u64(types_before_cutoff_);
    w.u32(uint32_t(id_to_token_.size()));
    for (size_t i = 0; i < id_to_token_.size(); ++i) {
        w.str(id_to_token_[i]);
        w.u64(frequencies_[i]);
    }
}

Vocabulary Vocabulary::load(BinaryReader& r) {
    Vocabulary v;
    v.min_count_ = r.u32();
    v.mode_ = r.u8() == 0 ? TokenMode::full_names : TokenMode::subtokens;
    v.total_tokens_ = r.u64();
    v.types_before_cutoff_ = r.u64();
    uint32_t n = r.u32();
    v.id_to_token_.clear();
    v.frequencies_.clear();
    v.token_to_id_.clear();
    for (uint32_t i = 0; i < n; ++i) {
        std::string tok = r.str();
        uint64_t f = r.u64();
        v.token_to_id_.emplace(tok, TokenId(i));
        v.id_to_token_.push_back(std::move(tok));
        v.frequencies_.push_back(f);
    }
    if (v.id_to_token_.empty() || v.id_to_token_[0] != kUnkToken)
        throw std::runtime_error("corrupt vocabulary: missing <unk>");
    return v;
}

}  // namespace callrank
