#include "callrank/huffman.hpp"

#include <queue>
#include <stdexcept>

namespace callrank {

HuffmanTree HuffmanTree::build(const std::vector<uint64_t>& frequencies) {
    const size_t n = frequencies.size();
    if (n < 2) throw std::invalid_argument("huffman tree needs at least 2 tokens");

    // nodes 0..n-1 are leaves, n..2n-2 internal; min-heap keyed by
    // (frequency, node id) so ties are deterministic
    std::vector<uint64_t> weight(2 * n - 1, 0);
    std::vector<uint32_t> parent(2 * n - 1, 0);
    std::vector<uint8_t> branch(2 * n - 1, 0);
    for (size_t i = 0; i < n; ++i) weight[i] = frequencies[i];

    using Item = std::pair<uint64_t, uint32_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    for (uint32_t i = 0; i < n; ++i) heap.emplace(weight[i], i);

    uint32_t next = uint32_t(n);
    while (heap.size() > 1) {
        auto [w0, a] = heap.top();
        heap.pop();
        auto [w1, b] = heap.top();
        heap.pop();
        weight[next] = w0 + w1;
        parent[a] = next;
        branch[a] = 0;
        parent[b] = next;
        branch[b] = 1;
        heap.emplace(weight[next], next);
        ++next;
    }

    HuffmanTree tree;
    tree.n_internal = n - 1;
    tree.paths.resize(n);
    const uint32_t root = uint32_t(2 * n - 2);
    for (uint32_t leaf = 0; leaf < n; ++leaf) {
        // climb to the root, then reverse; internal node ids are re-based so
        // the root is node 0
        std::vector<uint32_t> nodes;
        std::vector<uint8_t> code;
        uint32_t cur = leaf;
        while (cur != root) {
            code.push_back(branch[cur]);
            nodes.push_back(root - parent[cur]);
            cur = parent[cur];
        }
        auto& p = tree.paths[leaf];
        p.nodes.assign(nodes.rbegin(), nodes.rend());
        p.code.assign(code.rbegin(), code.rend());
    }
    return tree;
}

HuffmanTree HuffmanTree::build(const Vocabulary& vocab) {
    std::vector<uint64_t> freqs(vocab.size());
    for (size_t i = 0; i < vocab.size(); ++i) freqs[i] = vocab.frequency(TokenId(i));
    return build(freqs);
}

double HuffmanTree::weighted_code_length(const std::vector<uint64_t>& frequencies) const {
    double num = 0, den = 0;
    for (size_t i = 0; i < frequencies.size(); ++i) {
        num += double(frequencies[i]) * double(paths[i].code.size());
        den += double(frequencies[i]);
    }
    return den == 0 ? 0.0 : num / den;
}

}  // namespace callrank
