#include "callrank/sequence.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace callrank {

namespace {
bool has_whitespace(const std::string& s) {
    for (char c : s)
        if (std::isspace(static_cast<unsigned char>(c))) return true;
    return false;
}
}  // namespace

void write_sequences(const std::vector<FunctionSequence>& sequences, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    for (const auto& seq : sequences) {
        if (seq.method_name.empty() || has_whitespace(seq.method_name))
            throw std::invalid_argument("invalid method name token: '" + seq.method_name + "'");
        out << seq.method_name;
        for (const auto& call : seq.calls) {
            if (call.empty() || has_whitespace(call))
                throw std::invalid_argument("invalid call token: '" + call + "'");
            out << ' ' << call;
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<FunctionSequence> read_sequences(const std::string& path, const std::string& source_id) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::vector<FunctionSequence> out;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        FunctionSequence seq;
        seq.source_id = source_id.empty() ? path : source_id;
        if (!(ls >> seq.method_name)) continue;  // blank line
        std::string tok;
        while (ls >> tok) seq.calls.push_back(tok);
        out.push_back(std::move(seq));
    }
    return out;
}

}  // namespace callrank
