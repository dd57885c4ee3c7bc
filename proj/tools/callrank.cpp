// callrank: single entry point wiring corpus extraction, model training and
// the completion benchmark. One subcommand per pipeline stage; a flat
// key=value config file (--config) supplies defaults that flags override.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "callrank/callsites.hpp"
#include "callrank/ngram.hpp"
#include "callrank/pipeline.hpp"
#include "callrank/pv.hpp"
#include "callrank/ranker.hpp"
#include "callrank/sequence.hpp"
#include "callrank/synthetic.hpp"
#include "callrank/tokenizer.hpp"
#include "callrank/vocabulary.hpp"

namespace fs = std::filesystem;
using namespace callrank;

namespace {

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Every run that writes an artifact also writes <artifact>.manifest with the
// effective configuration and input digests, enough to reproduce the run.
struct Manifest {
    std::vector<std::pair<std::string, std::string>> kv;

    void set(const std::string& k, const std::string& v) { kv.emplace_back(k, v); }
    void set(const std::string& k, uint64_t v) { set(k, std::to_string(v)); }
    void set(const std::string& k, double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%g", v);
        set(k, std::string(buf));
    }
    void input(const std::string& path) {
        char buf[24];
        std::snprintf(buf, sizeof(buf), "%016llx",
                      static_cast<unsigned long long>(file_digest(path)));
        set("input." + path, std::string(buf));
    }
    void write(const std::string& artifact_path) const {
        std::ofstream out(artifact_path + ".manifest");
        for (const auto& [k, v] : kv) out << k << "=" << v << "\n";
        if (!out) throw std::runtime_error("cannot write manifest for " + artifact_path);
    }
};

// Test projects must never leak into training input; one diagnostic line per
// offending file, nonzero exit.
void enforce_disjoint(const std::vector<std::string>& train_paths,
                      const std::vector<std::string>& excluded) {
    std::set<std::string> held(excluded.begin(), excluded.end());
    size_t violations = 0;
    for (const auto& p : train_paths) {
        if (held.count(stem_of(p))) {
            std::cerr << "error: held-out project '" << stem_of(p)
                      << "' appears in training input " << p << "\n";
            ++violations;
        }
    }
    if (violations) throw std::runtime_error(std::to_string(violations) + " disjointness violation(s)");
}

std::vector<FunctionSequence> load_training(const std::vector<std::string>& paths,
                                            const std::vector<std::string>& excluded,
                                            Manifest& manifest) {
    enforce_disjoint(paths, excluded);
    std::vector<FunctionSequence> all;
    for (const auto& p : paths) {
        auto seqs = read_sequences(p, stem_of(p));
        manifest.input(p);
        all.insert(all.end(), seqs.begin(), seqs.end());
    }
    return all;
}

std::vector<ProjectData> load_projects(const std::vector<std::string>& paths) {
    std::vector<ProjectData> projects;
    for (const auto& p : paths)
        projects.push_back({stem_of(p), read_sequences(p, stem_of(p))});
    return projects;
}

TokenMode parse_mode(const std::string& s) {
    if (s == "full") return TokenMode::full_names;
    if (s == "subtoken") return TokenMode::subtokens;
    throw std::runtime_error("unknown token mode: " + s);
}

SmoothingConfig::Kind parse_smoothing(const std::string& s) {
    if (s == "mle") return SmoothingConfig::Kind::mle;
    if (s == "jm") return SmoothingConfig::Kind::jelinek_mercer;
    if (s == "kn") return SmoothingConfig::Kind::kneser_ney;
    throw std::runtime_error("unknown smoothing kind: " + s);
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
    if (!out) throw std::runtime_error("cannot write " + path);
}

void print_suggestions(const std::string& head, const SuggestionList& list) {
    std::cout << head;
    for (const auto& item : list.items) std::cout << " " << item.token;
    if (list.warning) std::cout << "  # context fully out of vocabulary";
    std::cout << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"function-call completion: corpus tools, models and benchmark"};
    app.set_config("--config", "", "flat key=value config file, flags override");
    app.require_subcommand(1);

    int workers = 0;  // 0 = all cores for extraction/eval; pv training defaults to 1

    // ---- extract ----
    auto* cmd_extract = app.add_subcommand("extract", "source files -> call-sequence files");
    std::vector<std::string> ex_inputs;
    std::string ex_outdir = ".";
    bool ex_ctors = false;
    cmd_extract->add_option("inputs", ex_inputs, "source files")->required();
    cmd_extract->add_option("--out-dir", ex_outdir, "directory for <stem>.seq outputs");
    cmd_extract->add_flag("--include-constructors", ex_ctors, "treat `new Foo(...)` as a call");

    // ---- vocab ----
    auto* cmd_vocab = app.add_subcommand("vocab", "vocabulary statistics for sequence files");
    std::vector<std::string> vo_inputs;
    uint32_t vo_min_count = 20;
    std::string vo_mode = "full";
    std::string vo_out;
    cmd_vocab->add_option("inputs", vo_inputs, "sequence files")->required();
    cmd_vocab->add_option("--min-count", vo_min_count, "frequency cutoff");
    cmd_vocab->add_option("--token-mode", vo_mode, "full | subtoken");
    cmd_vocab->add_option("--out", vo_out, "stats file (default stdout)");

    // ---- train-ngram ----
    auto* cmd_ngram = app.add_subcommand("train-ngram", "train the n-gram model");
    std::vector<std::string> ng_inputs, ng_exclude;
    std::string ng_out = "ngram.bin", ng_smoothing = "jm", ng_mode = "full";
    uint32_t ng_order = 5, ng_min_count = 20;
    double ng_lambda = 0.5, ng_discount = 0.75;
    cmd_ngram->add_option("inputs", ng_inputs, "training sequence files")->required();
    cmd_ngram->add_option("--out", ng_out, "model file");
    cmd_ngram->add_option("--order", ng_order, "model order, >= 2");
    cmd_ngram->add_option("--smoothing", ng_smoothing, "mle | jm | kn");
    cmd_ngram->add_option("--lambda", ng_lambda, "jm interpolation weight");
    cmd_ngram->add_option("--discount", ng_discount, "kn absolute discount");
    cmd_ngram->add_option("--min-count", ng_min_count, "vocabulary cutoff");
    cmd_ngram->add_option("--token-mode", ng_mode, "full | subtoken");
    cmd_ngram->add_option("--exclude", ng_exclude, "held-out project ids");
    cmd_ngram->add_option("--workers", workers, "worker threads, 0 = all cores");

    // ---- train-pv ----
    auto* cmd_pv = app.add_subcommand("train-pv", "train the paragraph-vector model");
    std::vector<std::string> pv_inputs, pv_exclude;
    std::string pv_out = "pv.bin";
    HyperParams hp;
    int pv_workers = 1;  // reproducible by default
    cmd_pv->add_option("inputs", pv_inputs, "training sequence files")->required();
    cmd_pv->add_option("--out", pv_out, "model file");
    cmd_pv->add_option("--dim", hp.dim, "vector dimensionality");
    cmd_pv->add_option("--window", hp.window, "max window size");
    cmd_pv->add_option("--min-count", hp.min_count, "vocabulary cutoff");
    cmd_pv->add_option("--epochs", hp.epochs, "training epochs");
    cmd_pv->add_option("--alpha", hp.alpha0, "initial learning rate");
    cmd_pv->add_option("--alpha-min", hp.alpha_min, "final learning rate");
    cmd_pv->add_option("--seed", hp.seed, "rng seed");
    cmd_pv->add_option("--exclude", pv_exclude, "held-out project ids");
    cmd_pv->add_option("--workers", pv_workers, "worker threads; >1 is nondeterministic");

    // ---- gen-callsites ----
    auto* cmd_sites = app.add_subcommand("gen-callsites", "sequence file -> call-site JSONL");
    std::string st_input, st_out = "callsites.jsonl", st_project;
    cmd_sites->add_option("input", st_input, "test-project sequence file")->required();
    cmd_sites->add_option("--out", st_out, "JSONL output");
    cmd_sites->add_option("--project", st_project, "project id (default: input stem)");

    // ---- complete ----
    auto* cmd_complete = app.add_subcommand("complete", "rank completions for call sites");
    std::string co_pv, co_ngram, co_sites;
    std::vector<std::string> co_context, co_candidates;
    RankerConfig rcfg;
    double co_gamma = -1.0;  // >= 0 enables the cache on --sites streams
    cmd_complete->add_option("--pv", co_pv, "paragraph-vector model file");
    cmd_complete->add_option("--ngram", co_ngram, "n-gram model file");
    cmd_complete->add_option("--sites", co_sites, "call-site JSONL to complete");
    cmd_complete->add_option("--context", co_context, "method name + preceding calls");
    cmd_complete->add_option("--candidates", co_candidates, "static-analysis candidates");
    cmd_complete->add_option("--max-size", rcfg.max_size, "suggestion list cap");
    cmd_complete->add_option("--sim-threshold", rcfg.sim_threshold, "neighbor cosine cutoff");
    cmd_complete->add_option("--neighbor-budget", rcfg.neighbor_budget, "temporary-list cap");
    cmd_complete->add_flag("--fill-tail", rcfg.fill_tail, "pad with alphabetical candidates");
    cmd_complete->add_option("--infer-steps", rcfg.infer_steps, "inference sgd steps");
    cmd_complete->add_option("--infer-seed", rcfg.infer_seed, "inference rng seed");
    cmd_complete->add_option("--cache-gamma", co_gamma, "enable n-gram cache with this weight");

    // ---- bench ----
    auto* cmd_bench = app.add_subcommand("bench", "evaluate all systems on held-out projects");
    std::vector<std::string> be_inputs;
    std::string be_pv, be_ngram, be_md = "compare.md", be_csv = "compare.csv";
    BenchOptions bopt;
    bool be_per_project = false;
    cmd_bench->add_option("inputs", be_inputs, "test-project sequence files")->required();
    cmd_bench->add_option("--pv", be_pv, "paragraph-vector model file")->required();
    cmd_bench->add_option("--ngram", be_ngram, "n-gram model file")->required();
    cmd_bench->add_option("--md", be_md, "markdown report path");
    cmd_bench->add_option("--csv", be_csv, "csv report path");
    cmd_bench->add_option("--cache-gamma", bopt.cache_gamma, "cache interpolation weight");
    cmd_bench->add_flag("--cache-per-project", be_per_project, "cache scope: project, not file");
    cmd_bench->add_option("--max-size", bopt.ranker.max_size, "suggestion list cap");
    cmd_bench->add_option("--sim-threshold", bopt.ranker.sim_threshold, "neighbor cosine cutoff");
    cmd_bench->add_option("--neighbor-budget", bopt.ranker.neighbor_budget, "temporary-list cap");
    cmd_bench->add_flag("--fill-tail", bopt.ranker.fill_tail, "pad with alphabetical candidates");
    cmd_bench->add_option("--infer-steps", bopt.ranker.infer_steps, "inference sgd steps");
    cmd_bench->add_option("--infer-seed", bopt.ranker.infer_seed, "inference rng seed");
    cmd_bench->add_option("--workers", workers, "worker threads, 0 = all cores");

    // ---- entropy ----
    auto* cmd_entropy = app.add_subcommand("entropy", "cross-entropy over an order range");
    std::vector<std::string> en_train, en_test;
    std::string en_out = "entropy.csv", en_smoothing = "jm";
    uint32_t en_lo = 2, en_hi = 10, en_minc_full = 20, en_minc_sub = 20;
    double en_lambda = 0.5, en_discount = 0.75;
    cmd_entropy->add_option("--train", en_train, "training sequence files")->required();
    cmd_entropy->add_option("--test", en_test, "test-project sequence files")->required();
    cmd_entropy->add_option("--out", en_out, "csv output");
    cmd_entropy->add_option("--order-lo", en_lo, "lowest model order");
    cmd_entropy->add_option("--order-hi", en_hi, "highest model order");
    cmd_entropy->add_option("--min-count-full", en_minc_full, "cutoff, full-name mode");
    cmd_entropy->add_option("--min-count-sub", en_minc_sub, "cutoff, subtoken mode");
    cmd_entropy->add_option("--smoothing", en_smoothing, "mle | jm | kn");
    cmd_entropy->add_option("--lambda", en_lambda, "jm interpolation weight");
    cmd_entropy->add_option("--discount", en_discount, "kn absolute discount");
    cmd_entropy->add_option("--workers", workers, "worker threads, 0 = all cores");

    // ---- gen-synthetic ----
    auto* cmd_syn = app.add_subcommand("gen-synthetic",
                                       "write the planted-concept fixture corpus");
    std::string sy_outdir = "fixture";
    SyntheticOptions sopt;
    size_t sy_heldout = 500;
    cmd_syn->add_option("--out-dir", sy_outdir, "output directory");
    cmd_syn->add_option("--concepts", sopt.n_concepts, "number of planted concepts");
    cmd_syn->add_option("--concept-len", sopt.concept_len, "calls per concept");
    cmd_syn->add_option("--train", sopt.n_train, "training sequences");
    cmd_syn->add_option("--noise", sopt.noise, "per-token replacement probability");
    cmd_syn->add_flag("--shuffled", sopt.shuffled_instances,
                      "emit each instance's calls in a fresh random order");
    cmd_syn->add_option("--seed", sopt.seed, "rng seed");
    cmd_syn->add_option("--heldout", sy_heldout, "held-out instances");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cmd_extract) {
            TokenizerConfig cfg;
            cfg.include_constructors = ex_ctors;
            fs::create_directories(ex_outdir);
            for (const auto& input : ex_inputs) {
                auto result = extract_sequences(slurp(input), cfg, input);
                for (const auto& d : result.diagnostics)
                    std::cerr << input << ": " << d << "\n";
                std::string out = (fs::path(ex_outdir) / (stem_of(input) + ".seq")).string();
                write_sequences(result.sequences, out);
                std::cout << input << " -> " << out << " (" << result.sequences.size()
                          << " methods)\n";
            }
        } else if (*cmd_vocab) {
            TokenizerConfig cfg;
            cfg.mode = parse_mode(vo_mode);
            std::vector<FunctionSequence> all;
            for (const auto& p : vo_inputs) {
                auto seqs = read_sequences(p, stem_of(p));
                all.insert(all.end(), seqs.begin(), seqs.end());
            }
            Vocabulary vocab = build_vocabulary(all, vo_min_count, cfg);
            std::string stats = vocabulary_stats(vocab, all.size());
            if (vo_out.empty())
                std::cout << stats;
            else
                write_text(vo_out, stats);
        } else if (*cmd_ngram) {
            Manifest manifest;
            manifest.set("subcommand", "train-ngram");
            auto train = load_training(ng_inputs, ng_exclude, manifest);
            TokenizerConfig tcfg;
            tcfg.mode = parse_mode(ng_mode);
            Vocabulary vocab = build_vocabulary(train, ng_min_count, tcfg);
            SmoothingConfig sc{parse_smoothing(ng_smoothing), ng_lambda, ng_discount};
            sc.validate();
            NGramModel model = NGramModel::train(train, ng_order, vocab, sc, workers);
            model.save(ng_out);
            manifest.set("order", uint64_t(ng_order));
            manifest.set("smoothing", ng_smoothing);
            manifest.set("lambda", ng_lambda);
            manifest.set("discount", ng_discount);
            manifest.set("min_count", uint64_t(ng_min_count));
            manifest.set("token_mode", ng_mode);
            manifest.write(ng_out);
            std::cout << model.stats();
        } else if (*cmd_pv) {
            hp.validate();
            Manifest manifest;
            manifest.set("subcommand", "train-pv");
            auto train = load_training(pv_inputs, pv_exclude, manifest);
            Vocabulary vocab = build_vocabulary(train, hp.min_count, TokenizerConfig{});
            std::vector<double> losses;
            PVModel model = PVModel::train(train, vocab, hp, pv_workers, &losses);
            model.save(pv_out);
            manifest.set("dim", uint64_t(hp.dim));
            manifest.set("window", uint64_t(hp.window));
            manifest.set("min_count", uint64_t(hp.min_count));
            manifest.set("epochs", uint64_t(hp.epochs));
            manifest.set("alpha", double(hp.alpha0));
            manifest.set("alpha_min", double(hp.alpha_min));
            manifest.set("seed", hp.seed);
            manifest.set("workers", uint64_t(pv_workers));
            manifest.write(pv_out);
            for (size_t e = 0; e < losses.size(); ++e)
                std::cout << "epoch " << e + 1 << " mean_loss " << losses[e] << "\n";
            std::cout << "docs=" << model.num_docs() << " dim=" << model.dim()
                      << " vocab=" << model.vocabulary().size() << "\n";
        } else if (*cmd_sites) {
            std::string project = st_project.empty() ? stem_of(st_input) : st_project;
            auto seqs = read_sequences(st_input, project);
            auto set = synthesize_call_sites(seqs, naive_candidates(seqs), project);
            write_callsites(set, st_out);
            Manifest manifest;
            manifest.set("subcommand", "gen-callsites");
            manifest.input(st_input);
            manifest.set("project", project);
            manifest.set("records", uint64_t(set.records.size()));
            manifest.set("excluded", uint64_t(set.excluded));
            manifest.write(st_out);
            std::cout << set.records.size() << " call sites (" << set.excluded
                      << " excluded)\n";
        } else if (*cmd_complete) {
            rcfg.validate();
            if (co_pv.empty() == co_ngram.empty())
                throw std::runtime_error("complete needs exactly one of --pv / --ngram");
            PVModel pv_model;
            NGramModel ngram_model;
            std::unique_ptr<CacheState> cache;
            Suggester suggester;
            if (!co_pv.empty()) {
                pv_model = PVModel::load(co_pv);
                suggester = Suggester::make_pv(pv_model);
            } else {
                ngram_model = NGramModel::load(co_ngram);
                if (co_gamma >= 0.0)
                    cache = std::make_unique<CacheState>(ngram_model.order(), co_gamma);
                suggester = Suggester::make_ngram(ngram_model, cache.get());
            }
            if (!co_sites.empty()) {
                auto set = read_callsites(co_sites);
                for (const auto& site : set.records) {
                    auto list = complete(site, suggester, rcfg);
                    print_suggestions(site.site_id + " gold=" + site.gold + " :", list);
                    if (cache)
                        cache->observe(ngram_model.map_tokens(site.context),
                                       ngram_model.vocabulary().lookup(site.gold));
                }
            } else {
                if (co_context.empty())
                    throw std::runtime_error("complete needs --sites or --context");
                CallSiteRecord site;
                site.context = co_context;
                site.candidates = co_candidates;
                std::sort(site.candidates.begin(), site.candidates.end());
                if (site.candidates.empty()) {
                    // no static analysis available: admit the whole vocabulary
                    const auto& v = co_pv.empty() ? ngram_model.vocabulary()
                                                  : pv_model.vocabulary();
                    for (TokenId id = 1; id < TokenId(v.size()); ++id)
                        site.candidates.push_back(v.token(id));
                    std::sort(site.candidates.begin(), site.candidates.end());
                }
                auto list = complete(site, suggester, rcfg);
                print_suggestions("suggestions:", list);
            }
        } else if (*cmd_bench) {
            bopt.ranker.validate();
            bopt.cache_per_project = be_per_project;
            bopt.workers = workers;
            PVModel pv_model = PVModel::load(be_pv);
            NGramModel ngram_model = NGramModel::load(be_ngram);
            auto projects = load_projects(be_inputs);
            auto out = run_benchmark(&pv_model, &ngram_model, projects, bopt);
            write_text(be_md, out.markdown);
            write_text(be_csv, out.csv);
            Manifest manifest;
            manifest.set("subcommand", "bench");
            for (const auto& p : be_inputs) manifest.input(p);
            manifest.input(be_pv);
            manifest.input(be_ngram);
            manifest.set("cache_gamma", bopt.cache_gamma);
            manifest.set("cache_scope", be_per_project ? "project" : "file");
            manifest.set("sites", uint64_t(out.total_sites));
            manifest.write(be_md);
            std::cout << out.markdown;
            if (out.soundness_violations) {
                std::cerr << "error: " << out.soundness_violations
                          << " unsound suggestion list(s)\n";
                return 1;
            }
        } else if (*cmd_entropy) {
            SmoothingConfig sc{parse_smoothing(en_smoothing), en_lambda, en_discount};
            sc.validate();
            Manifest manifest;
            manifest.set("subcommand", "entropy");
            std::vector<FunctionSequence> train;
            for (const auto& p : en_train) {
                auto seqs = read_sequences(p, stem_of(p));
                manifest.input(p);
                train.insert(train.end(), seqs.begin(), seqs.end());
            }
            auto tests = load_projects(en_test);
            for (const auto& p : en_test) manifest.input(p);
            auto rows = entropy_experiment(train, tests, en_lo, en_hi, en_minc_full,
                                           en_minc_sub, sc, workers);
            write_text(en_out, entropy_report_csv(rows));
            manifest.set("order_lo", uint64_t(en_lo));
            manifest.set("order_hi", uint64_t(en_hi));
            manifest.set("smoothing", en_smoothing);
            manifest.write(en_out);
            std::cout << rows.size() << " rows -> " << en_out << "\n";
        } else if (*cmd_syn) {
            auto corpus = make_synthetic_corpus(sopt);
            auto heldout = make_heldout_project(corpus, sy_heldout, sopt.noise,
                                                sopt.seed + 1, "heldout");
            auto repetition = make_repetition_project(corpus, 40, sopt.seed + 2, "repetition");
            fs::create_directories(sy_outdir);
            auto path = [&](const char* name) {
                return (fs::path(sy_outdir) / name).string();
            };
            write_sequences(corpus.train, path("train.seq"));
            write_sequences(heldout.sequences, path("heldout.seq"));
            write_sequences(repetition.sequences, path("repetition.seq"));
            Manifest manifest;
            manifest.set("subcommand", "gen-synthetic");
            manifest.set("concepts", uint64_t(sopt.n_concepts));
            manifest.set("concept_len", uint64_t(sopt.concept_len));
            manifest.set("train", uint64_t(sopt.n_train));
            manifest.set("noise", sopt.noise);
            manifest.set("seed", sopt.seed);
            manifest.set("heldout", uint64_t(sy_heldout));
            manifest.write(path("train.seq"));
            std::cout << "wrote train/heldout/repetition sequence files to " << sy_outdir
                      << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
