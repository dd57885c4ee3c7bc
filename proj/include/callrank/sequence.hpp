#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace callrank {

/// One method as an ordered token list: the method name followed by the
/// identifiers of the calls made in its body, in textual order.
struct FunctionSequence {
    std::string source_id;           // file or project the method came from
    std::string method_name;
    std::vector<std::string> calls;  // textual order, zero calls is valid
    size_t body_begin = 0;           // byte span of the method body
    size_t body_end = 0;
    std::vector<size_t> call_offsets;  // byte offset of each call identifier
};

// Line-oriented text format: one sequence per line, whitespace-separated
// tokens, first token is the method name. Tokens containing whitespace are
// rejected at write time.
void write_sequences(const std::vector<FunctionSequence>& sequences, const std::string& path);
std::vector<FunctionSequence> read_sequences(const std::string& path, const std::string& source_id = "");

}  // namespace callrank
