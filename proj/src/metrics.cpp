#include "callrank/metrics.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace callrank {

namespace {
size_t rank_of_gold(const CompletionResult& r) {
    for (size_t i = 0; i < r.suggestions.size(); ++i)
        if (r.suggestions[i] == r.gold) return i + 1;
    return 0;  // absent
}
}  // namespace

double recall_at_k(std::span<const CompletionResult> results, size_t k) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (results.empty()) throw std::invalid_argument("recall over empty result set");
    size_t hits = 0;
    for (const auto& r : results) {
        size_t rank = rank_of_gold(r);
        if (rank >= 1 && rank <= k) ++hits;
    }
    return double(hits) / double(results.size());
}

double mrr(std::span<const CompletionResult> results) {
    if (results.empty()) throw std::invalid_argument("mrr over empty result set");
    double sum = 0.0;
    for (const auto& r : results) {
        size_t rank = rank_of_gold(r);
        if (rank >= 1) sum += 1.0 / double(rank);
    }
    return sum / double(results.size());
}

SystemReport summarize(const std::string& label, std::span<const CompletionResult> results,
                       const std::vector<size_t>& ks, size_t excluded, double coverage) {
    SystemReport rep;
    rep.label = label;
    rep.sites = results.size();
    rep.excluded = excluded;
    rep.coverage = coverage;
    for (size_t k : ks) rep.recall[k] = recall_at_k(results, k);
    rep.mrr_value = mrr(results);
    std::vector<double> lat;
    lat.reserve(results.size());
    double sum = 0;
    for (const auto& r : results) {
        lat.push_back(r.latency_ms);
        sum += r.latency_ms;
    }
    rep.mean_latency_ms = sum / double(lat.size());
    std::sort(lat.begin(), lat.end());
    rep.median_latency_ms = lat[lat.size() / 2];
    return rep;
}

namespace {

std::string fmt(double v, int prec = 4) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(prec) << v;
    return os.str();
}

// indices of the best and second-best value in a column; -1 when absent
std::pair<int, int> best_two(const std::vector<double>& values) {
    int best = -1, second = -1;
    for (size_t i = 0; i < values.size(); ++i) {
        if (best < 0 || values[i] > values[size_t(best)]) {
            second = best;
            best = int(i);
        } else if (second < 0 || values[i] > values[size_t(second)]) {
            second = int(i);
        }
    }
    return {best, second};
}

}  // namespace

std::string compare_report_markdown(const std::vector<ProjectReport>& projects) {
    std::ostringstream os;
    os << "| project | system | R@10 | MRR | sites | excluded |\n";
    os << "|---|---|---|---|---|---|\n";
    for (const auto& proj : projects) {
        std::vector<double> r10s, mrrs;
        for (const auto& s : proj.systems) {
            auto it = s.recall.find(10);
            r10s.push_back(it == s.recall.end() ? -1.0 : it->second);
            mrrs.push_back(s.mrr_value);
        }
        auto [r_best, r_second] = best_two(r10s);
        auto [m_best, m_second] = best_two(mrrs);
        for (size_t i = 0; i < proj.systems.size(); ++i) {
            const auto& s = proj.systems[i];
            auto deco = [&](double v, int best, int second) {
                if (v < 0) return std::string("-");
                std::string t = fmt(v);
                if (int(i) == best) return "**" + t + "**";
                if (int(i) == second) return "<u>" + t + "</u>";
                return t;
            };
            os << "| " << proj.project_id << " | " << s.label << " | "
               << deco(r10s[i], r_best, r_second) << " | " << deco(mrrs[i], m_best, m_second)
               << " | " << s.sites << " | " << s.excluded << " |\n";
        }
    }
    return os.str();
}

std::string compare_report_csv(const std::vector<ProjectReport>& projects) {
    std::ostringstream os;
    os << "project,system,sites,excluded,coverage";
    // union of k values, kept stable across systems
    std::vector<size_t> ks;
    if (!projects.empty() && !projects[0].systems.empty())
        for (const auto& [k, v] : projects[0].systems[0].recall) ks.push_back(k);
    for (size_t k : ks) os << ",r@" << k;
    // wall-clock latency is reported separately; keeping it out of the csv
    // makes repeated runs byte-identical
    os << ",mrr\n";
    for (const auto& proj : projects) {
        for (const auto& s : proj.systems) {
            os << proj.project_id << ',' << s.label << ',' << s.sites << ',' << s.excluded
               << ',' << fmt(s.coverage);
            for (size_t k : ks) {
                auto it = s.recall.find(k);
                os << ',' << (it == s.recall.end() ? "-" : fmt(it->second));
            }
            os << ',' << fmt(s.mrr_value) << '\n';
        }
    }
    return os.str();
}

std::string entropy_report_csv(const std::vector<EntropyRow>& rows) {
    std::ostringstream os;
    os << "project,order,token_mode,oov_mode,entropy_bits\n";
    for (const auto& r : rows)
        os << r.project << ',' << r.order << ',' << r.token_mode << ',' << r.oov_mode << ','
           << fmt(r.bits) << '\n';
    return os.str();
}

}  // namespace callrank
