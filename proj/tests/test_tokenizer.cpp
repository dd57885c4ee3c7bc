#include <doctest.h>

#include <random>

#include "callrank/tokenizer.hpp"

using namespace callrank;

namespace {
const char* kSizeMethod = R"(
class FileInfo {
  public long size() throws IOException {
    if (!file.isFile()) {
      throw new FileNotFoundException(
        file.toString());
    }
    return file.length();
  }
}
)";
}

TEST_CASE("extracts the motivating size method") {
    TokenizerConfig cfg;
    auto res = extract_sequences(kSizeMethod, cfg, "FileInfo.java");
    REQUIRE(res.sequences.size() == 1);
    const auto& seq = res.sequences[0];
    CHECK(seq.method_name == "size");
    CHECK(seq.calls == std::vector<std::string>{"isFile", "toString", "length"});
    CHECK(res.diagnostics.empty());
}

TEST_CASE("constructor calls included when configured") {
    TokenizerConfig cfg;
    cfg.include_constructors = true;
    auto res = extract_sequences(kSizeMethod, cfg);
    REQUIRE(res.sequences.size() == 1);
    CHECK(res.sequences[0].calls ==
          std::vector<std::string>{"isFile", "FileNotFoundException", "toString", "length"});
}

TEST_CASE("empty class body yields no sequences") {
    auto res = extract_sequences("class A {}", TokenizerConfig{});
    CHECK(res.sequences.empty());
}

TEST_CASE("calls in nested control blocks keep textual order") {
    auto res = extract_sequences("class C { void f(){ g(); if (h()) { g(); } } }",
                                 TokenizerConfig{});
    REQUIRE(res.sequences.size() == 1);
    CHECK(res.sequences[0].method_name == "f");
    CHECK(res.sequences[0].calls == std::vector<std::string>{"g", "h", "g"});
}

TEST_CASE("anonymous class bodies attribute calls to the enclosing method") {
    const char* src = R"(
class C {
  void start() {
    prepare();
    executor.submit(new Runnable() {
      public void run() { step(); finish(); }
    });
    cleanup();
  }
}
)";
    auto res = extract_sequences(src, TokenizerConfig{});
    REQUIRE(res.sequences.size() == 1);
    // `run` is a nested declaration header, not a call
    CHECK(res.sequences[0].calls ==
          std::vector<std::string>{"prepare", "submit", "step", "finish", "cleanup"});
}

TEST_CASE("chained and qualified calls keep the final identifier in order") {
    auto res = extract_sequences("class C { void f(){ a().b(); x.y.z(); } }", TokenizerConfig{});
    REQUIRE(res.sequences.size() == 1);
    CHECK(res.sequences[0].calls == std::vector<std::string>{"a", "b", "z"});
}

TEST_CASE("comments, strings and annotations are not call sites") {
    const char* src = R"__(
class C {
  @SuppressWarnings("unchecked")
  void f() {
    // ignored(); and /* also */ "quoted()"
    real("call() inside a string");
  }
}
)__";
    auto res = extract_sequences(src, TokenizerConfig{});
    REQUIRE(res.sequences.size() == 1);
    CHECK(res.sequences[0].calls == std::vector<std::string>{"real"});
}

TEST_CASE("unbalanced braces return well-formed methods plus a diagnostic") {
    auto res = extract_sequences("class C { void a(){ x(); } void b(){ y(); ", TokenizerConfig{});
    REQUIRE(res.sequences.size() == 1);
    CHECK(res.sequences[0].method_name == "a");
    CHECK(!res.diagnostics.empty());
}

TEST_CASE("replay: every call token reappears at its offset followed by '('") {
    std::string src = kSizeMethod;
    src += "class D { int g(int v) { return helper(v) + other.call(v); } }";
    auto res = extract_sequences(src, TokenizerConfig{});
    for (const auto& seq : res.sequences) {
        size_t prev = 0;
        REQUIRE(seq.call_offsets.size() == seq.calls.size());
        for (size_t i = 0; i < seq.calls.size(); ++i) {
            size_t off = seq.call_offsets[i];
            CHECK(off > prev);
            prev = off;
            CHECK(src.compare(off, seq.calls[i].size(), seq.calls[i]) == 0);
            size_t after = off + seq.calls[i].size();
            while (after < src.size() && std::isspace((unsigned char)src[after])) ++after;
            CHECK(src[after] == '(');
        }
    }
}

TEST_CASE("extraction is deterministic") {
    auto a = extract_sequences(kSizeMethod, TokenizerConfig{});
    auto b = extract_sequences(kSizeMethod, TokenizerConfig{});
    REQUIRE(a.sequences.size() == b.sequences.size());
    for (size_t i = 0; i < a.sequences.size(); ++i) {
        CHECK(a.sequences[i].method_name == b.sequences[i].method_name);
        CHECK(a.sequences[i].calls == b.sequences[i].calls);
    }
}

TEST_CASE("split_subtokens: camel case") {
    CHECK(split_subtokens("convertDateToString") ==
          std::vector<std::string>{"convert", "date", "to", "string"});
}

TEST_CASE("split_subtokens: single char and underscores") {
    CHECK(split_subtokens("x") == std::vector<std::string>{"x"});
    CHECK(split_subtokens("snake_case_name") == std::vector<std::string>{"snake", "case", "name"});
}

TEST_CASE("split_subtokens: acronyms and digits") {
    CHECK(split_subtokens("parseHTTP2Frame") ==
          std::vector<std::string>{"parse", "http", "2", "frame"});
    CHECK(split_subtokens("XMLParser") == std::vector<std::string>{"xml", "parser"});
}

TEST_CASE("split_subtokens: concatenation identity and idempotence") {
    std::mt19937 rng(99);
    const std::string pieces[] = {"open", "file", "HTTP", "2", "Buf", "x", "parse_"};
    for (int iter = 0; iter < 200; ++iter) {
        std::string name;
        int n = 1 + int(rng() % 4);
        for (int i = 0; i < n; ++i) name += pieces[rng() % 7];
        if (name.empty()) continue;
        auto parts = split_subtokens(name);
        std::string rejoined;
        for (const auto& p : parts) rejoined += p;
        std::string folded;
        for (char c : name)
            if (c != '_' && c != '$') folded += char(std::tolower((unsigned char)c));
        CHECK(rejoined == folded);
        for (const auto& p : parts) {
            auto again = split_subtokens(p);
            CHECK(again == std::vector<std::string>{p});
        }
    }
}
