#pragma once

#include <cstdint>
#include <vector>

#include "callrank/vocabulary.hpp"

namespace callrank {

/// Binary Huffman tree over vocabulary frequencies for hierarchical softmax.
/// Each leaf (token) has a root-to-parent node path and a prefix-free bit
/// code; ties during construction break by ascending node index, so the tree
/// is deterministic given the frequency table.
struct HuffmanTree {
    struct LeafPath {
        std::vector<uint32_t> nodes;  // internal node ids, root first
        std::vector<uint8_t> code;    // branch bit at each node
    };

    std::vector<LeafPath> paths;  // indexed by token id
    size_t n_internal = 0;

    static HuffmanTree build(const std::vector<uint64_t>& frequencies);
    static HuffmanTree build(const Vocabulary& vocab);

    /// sum(freq[w] * codelen[w]) / sum(freq), for comparing against an
    /// independent builder.
    double weighted_code_length(const std::vector<uint64_t>& frequencies) const;
};

}  // namespace callrank
