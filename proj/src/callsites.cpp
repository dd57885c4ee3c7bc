#include "callrank/callsites.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace callrank {

double BenchmarkSet::coverage(const Vocabulary& vocab) const {
    if (records.empty()) return 0.0;
    size_t hit = 0;
    for (const auto& r : records)
        if (vocab.contains(r.gold)) ++hit;
    return double(hit) / double(records.size());
}

std::vector<std::string> naive_candidates(const std::vector<FunctionSequence>& project_sequences) {
    std::set<std::string> tokens;
    for (const auto& seq : project_sequences) {
        tokens.insert(seq.method_name);
        tokens.insert(seq.calls.begin(), seq.calls.end());
    }
    return {tokens.begin(), tokens.end()};
}

BenchmarkSet synthesize_call_sites(const std::vector<FunctionSequence>& sequences,
                                   const std::vector<std::string>& candidates,
                                   const std::string& project_id) {
    BenchmarkSet set;
    size_t method_idx = 0;
    for (const auto& seq : sequences) {
        for (uint32_t pos = 0; pos < seq.calls.size(); ++pos) {
            const std::string& gold = seq.calls[pos];
            if (!std::binary_search(candidates.begin(), candidates.end(), gold)) {
                ++set.excluded;
                continue;
            }
            CallSiteRecord rec;
            rec.site_id = project_id + "#" + std::to_string(method_idx) + ":" + std::to_string(pos);
            rec.project_id = project_id;
            rec.file_id = seq.source_id;
            rec.context.push_back(seq.method_name);
            rec.context.insert(rec.context.end(), seq.calls.begin(),
                               seq.calls.begin() + pos);
            rec.gold = gold;
            rec.candidates = candidates;
            rec.position = pos;
            set.records.push_back(std::move(rec));
        }
        ++method_idx;
    }
    return set;
}

void write_callsites(const BenchmarkSet& set, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    for (const auto& r : set.records) {
        nlohmann::json j{{"site_id", r.site_id},     {"project_id", r.project_id},
                         {"file_id", r.file_id},     {"context", r.context},
                         {"gold", r.gold},           {"candidates", r.candidates},
                         {"position", r.position}};
        out << j.dump() << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

BenchmarkSet read_callsites(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    BenchmarkSet set;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        CallSiteRecord r;
        r.site_id = j.at("site_id").get<std::string>();
        r.project_id = j.at("project_id").get<std::string>();
        r.file_id = j.at("file_id").get<std::string>();
        r.context = j.at("context").get<std::vector<std::string>>();
        r.gold = j.at("gold").get<std::string>();
        r.candidates = j.at("candidates").get<std::vector<std::string>>();
        r.position = j.at("position").get<uint32_t>();
        if (!std::is_sorted(r.candidates.begin(), r.candidates.end()))
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": candidates not alphabetically sorted");
        if (!std::binary_search(r.candidates.begin(), r.candidates.end(), r.gold)) {
            ++set.excluded;
            continue;
        }
        set.records.push_back(std::move(r));
    }
    return set;
}

}  // namespace callrank
