#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "callrank/sequence.hpp"

namespace callrank {

enum class TokenMode { full_names, subtokens };

struct TokenizerConfig {
    TokenMode mode = TokenMode::full_names;
    bool include_constructors = false;
    bool lowercase_subtokens = true;
};

struct ExtractionResult {
    std::vector<FunctionSequence> sequences;
    std::vector<std::string> diagnostics;  // e.g. unbalanced braces; never fatal
};

/// Lexical extraction of method-scoped call sequences from a Java-family
/// source unit. Brace-depth tracking, no AST. Calls are identifiers
/// immediately followed by '(' inside the method body; keywords and (by
/// default) constructor invocations after `new` are excluded. Nested
/// anonymous-class/lambda bodies attribute their calls to the enclosing
/// method.
ExtractionResult extract_sequences(std::string_view source_text,
                                   const TokenizerConfig& config,
                                   const std::string& source_id = "");

/// Split an identifier on camel-case boundaries, underscores and
/// letter<->digit boundaries. convertDateToString -> convert date to string.
std::vector<std::string> split_subtokens(std::string_view name, bool lowercase = true);

/// Flatten a sequence into the token stream seen by the models.
/// full_names: [method_name, calls...]; subtokens: subtokens of all of them
/// in order. n_name_tokens receives the number of leading method-name tokens.
std::vector<std::string> flatten_sequence(const FunctionSequence& seq,
                                          const TokenizerConfig& config,
                                          size_t* n_name_tokens = nullptr);

}  // namespace callrank
