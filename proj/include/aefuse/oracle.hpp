#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "aefuse/evaluate.hpp"
#include "aefuse/fusion.hpp"
#include "aefuse/image.hpp"

namespace aefuse {

// Best fused candidate seen so far for one pair, under a tagged evaluator.
struct OptimalSolution {
    std::string pair_id;
    GrayImage fused;
    FusionMethodId method;
    double score = 0.0;
    std::string evaluator_tag;
};

struct CandidateScore {
    FusionMethodId method;
    double score = 0.0;
};

// Per-pair optimum plus the full scored candidate history. Candidate lists
// only ever grow; the optimum only ever improves. Single-writer.
class OracleCache {
public:
    OracleCache() = default;
    explicit OracleCache(std::string evaluator_tag) : tag_(std::move(evaluator_tag)) {}

    const std::string& evaluator_tag() const { return tag_; }
    size_t pair_count() const { return best_.size(); }
    bool has_pair(const std::string& id) const { return best_.contains(id); }
    std::vector<std::string> pair_ids() const;

    const OptimalSolution& best(const std::string& id) const;
    const std::vector<CandidateScore>& candidates(const std::string& id) const;
    bool has_candidate(const std::string& id, const std::string& method_name) const;

    void insert(OptimalSolution best, std::vector<CandidateScore> scored);
    // append a scored candidate; replaces the optimum iff strictly better
    bool record(const std::string& id, const FusionMethodId& method, double score,
                const GrayImage& fused);

private:
    std::string tag_;
    std::map<std::string, OptimalSolution> best_;
    std::map<std::string, std::vector<CandidateScore>> cands_;
};

// Argmax of the evaluator over the candidates; ties go to the
// lexicographically smallest method name. scored_out, when given, receives
// every (method, score) in input order.
OptimalSolution select_optimal(const ImagePair& pair,
                               const std::vector<std::pair<FusionMethodId, GrayImage>>& candidates,
                               const Evaluator& ev, const GrayImage* ref = nullptr,
                               std::vector<CandidateScore>* scored_out = nullptr);

// Score one new candidate for a cached pair and fold it in. Returns whether
// the optimum was replaced.
bool evolve(OracleCache& cache, const ImagePair& pair, const FusionMethodId& method,
            const GrayImage& candidate, const Evaluator& ev, const GrayImage* ref = nullptr);

// Directory layout: <pair_id>.optimal.pgm per pair, an oracle.idx header/row
// index with per-file sha256 checksums, and oracle.cand.tsv with the full
// candidate history.
void cache_store(const OracleCache& cache, const std::filesystem::path& dir);
OracleCache cache_load(const std::filesystem::path& dir);

}  // namespace aefuse
