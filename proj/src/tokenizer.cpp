#include "callrank/tokenizer.hpp"

#include <cctype>
#include <unordered_set>

namespace callrank {

namespace {

enum class Tk { ident, punct };

struct Token {
    Tk kind;
    std::string text;  // identifier text, or single punct char
    size_t offset;
    char ch;  // punct char
};

bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}
bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

// Comments, string/char literals and numeric literals are dropped here so
// the extraction pass only ever sees identifiers and punctuation.
std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    size_t i = 0, n = src.size();
    while (i < n) {
        char c = src[i];
        if (c == '/' && i + 1 < n && src[i + 1] == '/') {
            while (i < n && src[i] != '\n') ++i;
        } else if (c == '/' && i + 1 < n && src[i + 1] == '*') {
            i += 2;
            while (i + 1 < n && !(src[i] == '*' && src[i + 1] == '/')) ++i;
            i = (i + 1 < n) ? i + 2 : n;
        } else if (c == '"' || c == '\'') {
            char q = c;
            ++i;
            while (i < n && src[i] != q) {
                if (src[i] == '\\' && i + 1 < n) ++i;
                ++i;
            }
            if (i < n) ++i;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            // numeric literal, including hex/float suffixes
            ++i;
            while (i < n && (ident_char(src[i]) || src[i] == '.' ||
                             ((src[i] == '+' || src[i] == '-') && i > 0 &&
                              (src[i - 1] == 'e' || src[i - 1] == 'E'))))
                ++i;
        } else if (ident_start(c)) {
            size_t start = i;
            while (i < n && ident_char(src[i])) ++i;
            out.push_back({Tk::ident, std::string(src.substr(start, i - start)), start, 0});
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else {
            out.push_back({Tk::punct, std::string(1, c), i, c});
            ++i;
        }
    }
    return out;
}

const std::unordered_set<std::string>& java_keywords() {
    static const std::unordered_set<std::string> kw = {
        "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char",
        "class", "const", "continue", "default", "do", "double", "else", "enum",
        "extends", "final", "finally", "float", "for", "goto", "if", "implements",
        "import", "instanceof", "int", "interface", "long", "native", "new",
        "package", "private", "protected", "public", "return", "short", "static",
        "strictfp", "super", "switch", "synchronized", "this", "throw", "throws",
        "transient", "try", "void", "volatile", "while", "true", "false", "null",
        "var", "record", "sealed", "permits", "yield"};
    return kw;
}

// Keywords that rule out a method declaration when they precede the name.
const std::unordered_set<std::string>& control_keywords() {
    static const std::unordered_set<std::string> kw = {
        "if", "for", "while", "switch", "catch", "synchronized", "new", "return"};
    return kw;
}

// tokens[i] == '('; returns index of the matching ')' or npos.
size_t match_paren(const std::vector<Token>& tokens, size_t i) {
    int depth = 0;
    for (size_t j = i; j < tokens.size(); ++j) {
        if (tokens[j].kind != Tk::punct) continue;
        if (tokens[j].ch == '(') ++depth;
        else if (tokens[j].ch == ')' && --depth == 0) return j;
    }
    return std::string::npos;
}

// Matches `ident ( ... ) [throws Qualified[, Qualified]*] {` starting at a
// name token. Returns the index of the opening body brace, or npos.
size_t match_declaration_header(const std::vector<Token>& tokens, size_t i) {
    if (tokens[i].kind != Tk::ident || java_keywords().count(tokens[i].text)) return std::string::npos;
    if (i > 0) {
        const Token& prev = tokens[i - 1];
        if (prev.kind == Tk::ident && control_keywords().count(prev.text)) return std::string::npos;
        if (prev.kind == Tk::punct && (prev.ch == '.' || prev.ch == '@' || prev.ch == '=')) return std::string::npos;
    }
    if (i + 1 >= tokens.size() || tokens[i + 1].kind != Tk::punct || tokens[i + 1].ch != '(')
        return std::string::npos;
    size_t close = match_paren(tokens, i + 1);
    if (close == std::string::npos) return std::string::npos;
    size_t j = close + 1;
    if (j < tokens.size() && tokens[j].kind == Tk::ident && tokens[j].text == "throws") {
        ++j;
        bool expect_name = true;
        while (j < tokens.size()) {
            const Token& t = tokens[j];
            if (expect_name) {
                if (t.kind != Tk::ident) return std::string::npos;
                expect_name = false;
            } else if (t.kind == Tk::punct && (t.ch == '.' || t.ch == ',')) {
                expect_name = true;
            } else {
                break;
            }
            ++j;
        }
    }
    if (j < tokens.size() && tokens[j].kind == Tk::punct && tokens[j].ch == '{') return j;
    return std::string::npos;
}

}  // namespace

ExtractionResult extract_sequences(std::string_view source_text,
                                   const TokenizerConfig& config,
                                   const std::string& source_id) {
    ExtractionResult result;
    std::vector<Token> tokens = lex(source_text);

    int depth = 0;
    bool in_method = false;
    int body_depth = 0;
    FunctionSequence current;

    for (size_t i = 0; i < tokens.size(); ++i) {
        const Token& t = tokens[i];
        if (t.kind == Tk::punct && t.ch == '{') {
            ++depth;
            continue;
        }
        if (t.kind == Tk::punct && t.ch == '}') {
            --depth;
            if (depth < 0) {
                depth = 0;
                result.diagnostics.push_back("unmatched '}' at offset " + std::to_string(t.offset));
            }
            if (in_method && depth < body_depth) {
                current.body_end = t.offset + 1;
                result.sequences.push_back(std::move(current));
                current = {};
                in_method = false;
            }
            continue;
        }
        if (t.kind != Tk::ident) continue;

        if (!in_method) {
            size_t body = match_declaration_header(tokens, i);
            if (body != std::string::npos) {
                in_method = true;
                current.source_id = source_id;
                current.method_name = t.text;
                current.body_begin = tokens[body].offset;
                body_depth = depth + 1;
                i = body;  // loop will not revisit; '{' handled below
                ++depth;
            }
            continue;
        }

        // inside a method body: identifier followed by '(' is a call site
        if (i + 1 >= tokens.size() || tokens[i + 1].kind != Tk::punct || tokens[i + 1].ch != '(')
            continue;
        if (java_keywords().count(t.text)) continue;
        if (i > 0) {
            const Token& prev = tokens[i - 1];
            if (prev.kind == Tk::punct && prev.ch == '@') continue;
            if (prev.kind == Tk::ident && prev.text == "new") {
                if (config.include_constructors) {
                    current.calls.push_back(t.text);
                    current.call_offsets.push_back(t.offset);
                }
                continue;
            }
        }
        // a declaration header inside the body (anonymous class method) is
        // not a call; its body still attributes calls to the enclosing method
        if (match_declaration_header(tokens, i) != std::string::npos) continue;
        current.calls.push_back(t.text);
        current.call_offsets.push_back(t.offset);
    }

    if (in_method)
        result.diagnostics.push_back("unbalanced braces: dropped incomplete method '" +
                                     current.method_name + "'");
    return result;
}

std::vector<std::string> split_subtokens(std::string_view name, bool lowercase) {
    std::vector<std::string> out;
    std::string group;
    auto flush = [&] {
        if (!group.empty()) {
            out.push_back(group);
            group.clear();
        }
    };
    size_t upper_run = 0;
    for (char c : name) {
        bool up = std::isupper(static_cast<unsigned char>(c));
        bool low = std::islower(static_cast<unsigned char>(c));
        bool dig = std::isdigit(static_cast<unsigned char>(c));
        if (!up && !low && !dig) {  // separator: '_', '$'
            flush();
            upper_run = 0;
            continue;
        }
        if (!group.empty()) {
            bool prev_dig = std::isdigit(static_cast<unsigned char>(group.back()));
            if (dig != prev_dig) {
                flush();
            } else if (up && upper_run == 0 && !prev_dig) {
                flush();  // lower -> Upper boundary
            } else if (low && upper_run >= 2) {
                // acronym followed by a word: HTTPFrame -> HTTP | Frame
                char last = group.back();
                group.pop_back();
                flush();
                group.push_back(last);
            }
        }
        group.push_back(lowercase ? char(std::tolower(static_cast<unsigned char>(c))) : c);
        upper_run = up ? upper_run + 1 : 0;
    }
    flush();
    if (out.empty()) out.push_back(std::string(name));  // all separators: keep as-is
    return out;
}

std::vector<std::string> flatten_sequence(const FunctionSequence& seq,
                                          const TokenizerConfig& config,
                                          size_t* n_name_tokens) {
    std::vector<std::string> out;
    if (config.mode == TokenMode::full_names) {
        out.push_back(seq.method_name);
        if (n_name_tokens) *n_name_tokens = 1;
        out.insert(out.end(), seq.calls.begin(), seq.calls.end());
    } else {
        auto name_parts = split_subtokens(seq.method_name, config.lowercase_subtokens);
        if (n_name_tokens) *n_name_tokens = name_parts.size();
        out = std::move(name_parts);
        for (const auto& call : seq.calls) {
            auto parts = split_subtokens(call, config.lowercase_subtokens);
            out.insert(out.end(), parts.begin(), parts.end());
        }
    }
    return out;
}

}  // namespace callrank
