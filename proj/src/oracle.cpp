#include "aefuse/oracle.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "aefuse/digest.hpp"
#include "aefuse/pgm.hpp"

namespace aefuse {
namespace {

constexpr const char* kIndexMagic = "AEORACLE1";

std::string fmt_score(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string read_file(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoFailure("oracle: cannot open '" + file.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoFailure("oracle: read failure on '" + file.string() + "'");
    return ss.str();
}

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
        size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
}

double parse_score(const std::string& tok, const std::filesystem::path& file) {
    try {
        size_t used = 0;
        double v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw CorruptIndex("oracle: bad score '" + tok + "' in '" + file.string() + "'");
    }
}

}  // namespace

std::vector<std::string> OracleCache::pair_ids() const {
    std::vector<std::string> ids;
    ids.reserve(best_.size());
    for (const auto& [id, _] : best_) ids.push_back(id);
    return ids;
}

const OptimalSolution& OracleCache::best(const std::string& id) const {
    auto it = best_.find(id);
    if (it == best_.end()) throw UnknownPair("oracle: no cached pair '" + id + "'");
    return it->second;
}

const std::vector<CandidateScore>& OracleCache::candidates(const std::string& id) const {
    auto it = cands_.find(id);
    if (it == cands_.end()) throw UnknownPair("oracle: no cached pair '" + id + "'");
    return it->second;
}

bool OracleCache::has_candidate(const std::string& id, const std::string& method_name) const {
    auto it = cands_.find(id);
    if (it == cands_.end()) return false;
    return std::any_of(it->second.begin(), it->second.end(),
                       [&](const CandidateScore& c) { return c.method.name == method_name; });
}

void OracleCache::insert(OptimalSolution best, std::vector<CandidateScore> scored) {
    const std::string id = best.pair_id;
    best_.insert_or_assign(id, std::move(best));
    cands_.insert_or_assign(id, std::move(scored));
}

bool OracleCache::record(const std::string& id, const FusionMethodId& method, double score,
                         const GrayImage& fused) {
    auto bit = best_.find(id);
    if (bit == best_.end()) throw UnknownPair("oracle: no cached pair '" + id + "'");
    if (has_candidate(id, method.name))
        throw DuplicateMethodForPair("oracle: pair '" + id + "' already scored method '" +
                                     method.name + "'");
    cands_[id].push_back({method, score});
    if (score > bit->second.score) {
        bit->second.fused = fused;
        bit->second.method = method;
        bit->second.score = score;
        return true;
    }
    return false;
}

OptimalSolution select_optimal(const ImagePair& pair,
                               const std::vector<std::pair<FusionMethodId, GrayImage>>& candidates,
                               const Evaluator& ev, const GrayImage* ref,
                               std::vector<CandidateScore>* scored_out) {
    if (candidates.empty())
        throw EmptyCandidates("oracle: no candidates for pair '" + pair.id + "'");
    if (scored_out) scored_out->clear();
    size_t best = 0;
    double best_score = 0.0;
    for (size_t i = 0; i < candidates.size(); ++i) {
        double s = ev.score(pair, candidates[i].second, ref);
        if (scored_out) scored_out->push_back({candidates[i].first, s});
        if (i == 0 || s > best_score ||
            (s == best_score && candidates[i].first.name < candidates[best].first.name)) {
            best = i;
            best_score = s;
        }
    }
    return {pair.id, candidates[best].second, candidates[best].first, best_score, ev.tag};
}

bool evolve(OracleCache& cache, const ImagePair& pair, const FusionMethodId& method,
            const GrayImage& candidate, const Evaluator& ev, const GrayImage* ref) {
    if (ev.tag != cache.evaluator_tag())
        throw CorruptIndex("oracle: evaluator tag '" + ev.tag + "' does not match cache tag '" +
                           cache.evaluator_tag() + "'");
    if (!cache.has_pair(pair.id)) throw UnknownPair("oracle: no cached pair '" + pair.id + "'");
    if (cache.has_candidate(pair.id, method.name))
        throw DuplicateMethodForPair("oracle: pair '" + pair.id + "' already scored method '" +
                                     method.name + "'");
    double s = ev.score(pair, candidate, ref);
    return cache.record(pair.id, method, s, candidate);
}

void cache_store(const OracleCache& cache, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoFailure("oracle: cannot create '" + dir.string() + "': " + ec.message());

    std::string idx = std::string(kIndexMagic) + "\t" + cache.evaluator_tag() + "\n";
    std::string cand;
    for (const std::string& id : cache.pair_ids()) {
        const OptimalSolution& b = cache.best(id);
        const std::string bytes = pgm_bytes(b.fused);
        const std::filesystem::path img = dir / (id + ".optimal.pgm");
        std::ofstream out(img, std::ios::binary | std::ios::trunc);
        if (!out) throw IoFailure("oracle: cannot create '" + img.string() + "'");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) throw IoFailure("oracle: write failure on '" + img.string() + "'");

        idx += id + "\t" + b.method.name + "\t" + fmt_score(b.score) + "\t" + sha256_hex(bytes) +
               "\n";
        for (const CandidateScore& c : cache.candidates(id))
            cand += id + "\t" + c.method.name + "\t" + fmt_score(c.score) + "\n";
    }
    auto write_text = [&](const char* name, const std::string& text) {
        const std::filesystem::path file = dir / name;
        std::ofstream out(file, std::ios::binary | std::ios::trunc);
        if (!out) throw IoFailure("oracle: cannot create '" + file.string() + "'");
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        out.flush();
        if (!out) throw IoFailure("oracle: write failure on '" + file.string() + "'");
    };
    write_text("oracle.idx", idx);
    write_text("oracle.cand.tsv", cand);
}

OracleCache cache_load(const std::filesystem::path& dir) {
    const std::filesystem::path idx_path = dir / "oracle.idx";
    std::istringstream idx(read_file(idx_path));
    std::string line;
    if (!std::getline(idx, line))
        throw CorruptIndex("oracle: empty index '" + idx_path.string() + "'");
    auto head = split_tabs(line);
    if (head.size() != 2 || head[0] != kIndexMagic)
        throw CorruptIndex("oracle: bad index header in '" + idx_path.string() + "'");
    OracleCache cache(head[1]);

    struct Row {
        std::string method;
        double score;
    };
    std::map<std::string, Row> rows;
    while (std::getline(idx, line)) {
        if (line.empty()) continue;
        auto f = split_tabs(line);
        if (f.size() != 4)
            throw CorruptIndex("oracle: malformed row in '" + idx_path.string() + "'");
        const std::string& id = f[0];
        if (rows.contains(id))
            throw CorruptIndex("oracle: duplicate pair '" + id + "' in index");
        double score = parse_score(f[2], idx_path);

        const std::filesystem::path img_path = dir / (id + ".optimal.pgm");
        const std::string bytes = read_file(img_path);
        if (sha256_hex(bytes) != f[3])
            throw CorruptIndex("oracle: checksum mismatch for '" + img_path.string() + "'");
        GrayImage fused = parse_pgm(bytes, img_path.string());
        cache.insert({id, std::move(fused), FusionMethodId{f[1]}, score, cache.evaluator_tag()},
                     {});
        rows.emplace(id, Row{f[1], score});
    }

    const std::filesystem::path cand_path = dir / "oracle.cand.tsv";
    std::istringstream cand(read_file(cand_path));
    std::map<std::string, std::vector<CandidateScore>> lists;
    while (std::getline(cand, line)) {
        if (line.empty()) continue;
        auto f = split_tabs(line);
        if (f.size() != 3)
            throw CorruptIndex("oracle: malformed row in '" + cand_path.string() + "'");
        if (!rows.contains(f[0]))
            throw CorruptIndex("oracle: candidate row for unknown pair '" + f[0] + "'");
        lists[f[0]].push_back({FusionMethodId{f[1]}, parse_score(f[2], cand_path)});
    }

    // The recorded optimum must be the max-scoring candidate of its pair.
    for (auto& [id, row] : rows) {
        auto lit = lists.find(id);
        if (lit == lists.end())
            throw CorruptIndex("oracle: pair '" + id + "' has no candidate rows");
        bool seen = false;
        double max_score = 0.0;
        for (const CandidateScore& c : lit->second) {
            if (!seen || c.score > max_score) max_score = c.score;
            seen = true;
        }
        if (row.score != max_score)
            throw CorruptIndex("oracle: optimum score for pair '" + id +
                               "' disagrees with its candidate list");
        bool found = std::any_of(lit->second.begin(), lit->second.end(),
                                 [&](const CandidateScore& c) {
                                     return c.method.name == row.method && c.score == row.score;
                                 });
        if (!found)
            throw CorruptIndex("oracle: optimum method for pair '" + id +
                               "' missing from its candidate list");
        OptimalSolution best = cache.best(id);
        cache.insert(std::move(best), std::move(lit->second));
    }
    return cache;
}

}  // namespace aefuse
