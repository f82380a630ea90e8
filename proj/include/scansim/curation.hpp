#pragma once

#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "scansim/catalog.hpp"
#include "scansim/scanner.hpp"

namespace scansim {

enum class ScoreAggregate { mean, min };

struct CurationConfig {
  double theta_sim = 0.8;
  double theta_ord = 0.58;
  bool snap_to_catalog = true;
  double title_weight = 0.5;  // call number gets 1 - title_weight
  ScoreAggregate aggregate = ScoreAggregate::mean;
};

void validate(const CurationConfig& cfg);

struct MatchResult {
  std::size_t index = 0;  // into the candidate span
  double score = 0.0;
};

double entry_score(const LabelEntry& pred, const BookRecord& cand, double title_weight = 0.5);

// Highest entry_score over candidates, ties to the lower index. Throws
// EmptyCandidates.
MatchResult best_match(const LabelEntry& pred, std::span<const BookRecord> candidates,
                       double title_weight = 0.5);

// best_match with decoded candidate text, an exact-hit table and
// multiset-bound pruning. Results are identical to best_match.
class CandidateMatcher {
 public:
  CandidateMatcher(std::span<const BookRecord> candidates, double title_weight);

  MatchResult best(const LabelEntry& pred) const;
  std::span<const BookRecord> candidates() const { return candidates_; }

 private:
  struct Text {
    std::u32string title;
    std::u32string call_number;
    std::u32string title_sorted;
    std::u32string call_number_sorted;
  };

  std::span<const BookRecord> candidates_;
  double title_weight_;
  std::vector<Text> text_;
  std::unordered_map<std::string, std::size_t> exact_;
};

// Fraction of adjacent pairs not in descending call-number order; 1.0 for
// sequences shorter than two.
double order_consistency(std::span<const BookRecord* const> matched);

struct CuratedExample {
  Observation observation;
  LabelSequence label;
  double match_score = 0.0;
  double ord_score = 0.0;
};

struct Rejection {
  Observation observation;
  LabelSequence predicted;
  double match_score = 0.0;
  double ord_score = 0.0;
  std::string reason;
};

using CurationOutcome = std::variant<CuratedExample, Rejection>;

CurationOutcome curate_example(const RawExample& raw, std::span<const BookRecord> candidates,
                               const CurationConfig& cfg,
                               const CandidateMatcher* matcher = nullptr);

struct CurationReport {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::optional<double> precision;
  double acceptance_ratio = 0.0;
};

struct CuratedDataset {
  std::vector<CuratedExample> accepted;
  std::vector<Rejection> rejected;
  CurationReport report;
};

// Curates every record against the candidate set of its window's section.
// Records are processed in parallel; output keeps input order. With
// `ground_truth`, precision counts accepted labels equal to the visible
// books. Throws UnknownSection.
CuratedDataset curate_dataset(const RawDataset& raw, const Catalog& catalog,
                              const CurationConfig& cfg, bool ground_truth = true);
CuratedDataset curate_dataset_serial(const RawDataset& raw, const Catalog& catalog,
                                     const CurationConfig& cfg, bool ground_truth = true);

LabelSequence truth_labels(const Observation& obs);

}  // namespace scansim
