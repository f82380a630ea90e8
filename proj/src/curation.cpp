#include "scansim/curation.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <memory>

#include "scansim/error.hpp"
#include "scansim/similarity.hpp"
#include "scansim/text.hpp"

namespace scansim {

void validate(const CurationConfig& cfg) {
  if (cfg.theta_sim < 0.0 || cfg.theta_sim > 1.0) throw InvalidConfig("curation.theta_sim", "must be in [0,1]");
  if (cfg.theta_ord < 0.0 || cfg.theta_ord > 1.0) throw InvalidConfig("curation.theta_ord", "must be in [0,1]");
  if (cfg.title_weight < 0.0 || cfg.title_weight > 1.0) {
    throw InvalidConfig("curation.title_weight", "must be in [0,1]");
  }
}

double entry_score(const LabelEntry& pred, const BookRecord& cand, double title_weight) {
  return title_weight * gestalt_similarity(pred.title, cand.title) +
         (1.0 - title_weight) *
             gestalt_similarity(pred.call_number, format_call_number(cand.call_number));
}

MatchResult best_match(const LabelEntry& pred, std::span<const BookRecord> candidates,
                       double title_weight) {
  if (candidates.empty()) throw EmptyCandidates();
  MatchResult best{0, -1.0};
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double s = entry_score(pred, candidates[i], title_weight);
    if (s > best.score) best = {i, s};
  }
  return best;
}

namespace {

// A field with zero weight cannot affect the score, so it must not affect
// which candidate counts as an exact hit either.
std::string exact_key(std::string_view title, std::string_view call_number, double w) {
  std::string k(w > 0.0 ? title : "");
  k += '\x1f';
  if (w < 1.0) k += call_number;
  return k;
}

std::u32string sorted_copy(std::u32string s) {
  std::sort(s.begin(), s.end());
  return s;
}

}  // namespace

CandidateMatcher::CandidateMatcher(std::span<const BookRecord> candidates, double title_weight)
    : candidates_(candidates), title_weight_(title_weight) {
  if (candidates.empty()) throw EmptyCandidates();
  text_.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const std::string cn = format_call_number(candidates[i].call_number);
    Text t;
    t.title = utf8_decode(candidates[i].title);
    t.call_number = utf8_decode(cn);
    t.title_sorted = sorted_copy(t.title);
    t.call_number_sorted = sorted_copy(t.call_number);
    text_.push_back(std::move(t));
    exact_.emplace(exact_key(candidates[i].title, cn, title_weight), i);
  }
}

MatchResult CandidateMatcher::best(const LabelEntry& pred) const {
  if (auto it = exact_.find(exact_key(pred.title, pred.call_number, title_weight_));
      it != exact_.end()) {
    return {it->second, title_weight_ * 1.0 + (1.0 - title_weight_) * 1.0};
  }
  const std::u32string title = utf8_decode(pred.title);
  const std::u32string cn = utf8_decode(pred.call_number);
  const std::u32string title_sorted = sorted_copy(title);
  const std::u32string cn_sorted = sorted_copy(cn);
  const double w = title_weight_;

  MatchResult best{0, -1.0};
  for (std::size_t i = 0; i < text_.size(); ++i) {
    const auto& t = text_[i];
    const double bound = w * multiset_bound(title_sorted, t.title_sorted) +
                         (1.0 - w) * multiset_bound(cn_sorted, t.call_number_sorted);
    if (bound <= best.score) continue;
    const double s = w * gestalt_similarity(title, t.title) +
                     (1.0 - w) * gestalt_similarity(cn, t.call_number);
    if (s > best.score) best = {i, s};
  }
  return best;
}

double order_consistency(std::span<const BookRecord* const> matched) {
  if (matched.size() <= 1) return 1.0;
  std::size_t good = 0;
  for (std::size_t i = 0; i + 1 < matched.size(); ++i) {
    if (compare_call_numbers(matched[i]->call_number, matched[i + 1]->call_number) <= 0) ++good;
  }
  return static_cast<double>(good) / static_cast<double>(matched.size() - 1);
}

LabelSequence truth_labels(const Observation& obs) {
  LabelSequence out;
  out.reserve(obs.visible.size());
  for (const auto& v : obs.visible) out.push_back({v.title, v.call_number});
  return out;
}

CurationOutcome curate_example(const RawExample& raw, std::span<const BookRecord> candidates,
                               const CurationConfig& cfg, const CandidateMatcher* matcher) {
  if (candidates.empty()) throw EmptyCandidates();
  std::vector<const BookRecord*> matched;
  matched.reserve(raw.predicted.size());
  double sum = 0.0;
  double lowest = 1.0;
  for (const auto& entry : raw.predicted) {
    const MatchResult m = matcher ? matcher->best(entry)
                                  : best_match(entry, candidates, cfg.title_weight);
    matched.push_back(&candidates[m.index]);
    sum += m.score;
    lowest = std::min(lowest, m.score);
  }
  double match_score = 0.0;
  if (!raw.predicted.empty()) {
    match_score = cfg.aggregate == ScoreAggregate::mean
                      ? sum / static_cast<double>(raw.predicted.size())
                      : lowest;
  }
  const double ord_score = order_consistency(matched);

  if (match_score >= cfg.theta_sim && ord_score >= cfg.theta_ord) {
    CuratedExample ex{raw.observation, {}, match_score, ord_score};
    if (cfg.snap_to_catalog) {
      for (const auto* r : matched) ex.label.push_back({r->title, format_call_number(r->call_number)});
    } else {
      ex.label = raw.predicted;
    }
    return ex;
  }
  Rejection rej{raw.observation, raw.predicted, match_score, ord_score, {}};
  char buf[96];
  if (match_score < cfg.theta_sim) {
    std::snprintf(buf, sizeof(buf), "match_score %.4f < theta_sim %.4f", match_score, cfg.theta_sim);
  } else {
    std::snprintf(buf, sizeof(buf), "ord_score %.4f < theta_ord %.4f", ord_score, cfg.theta_ord);
  }
  rej.reason = buf;
  return rej;
}

namespace {

CuratedDataset collect(std::vector<CurationOutcome>& outcomes, bool ground_truth) {
  CuratedDataset out;
  std::size_t precise = 0;
  for (auto& o : outcomes) {
    if (auto* ex = std::get_if<CuratedExample>(&o)) {
      if (ground_truth && ex->label == truth_labels(ex->observation)) ++precise;
      out.accepted.push_back(std::move(*ex));
    } else {
      out.rejected.push_back(std::move(std::get<Rejection>(o)));
    }
  }
  auto& rep = out.report;
  rep.accepted = out.accepted.size();
  rep.rejected = out.rejected.size();
  const std::size_t total = rep.accepted + rep.rejected;
  rep.acceptance_ratio = total > 0 ? static_cast<double>(rep.accepted) / total : 0.0;
  if (ground_truth && rep.accepted > 0) {
    rep.precision = static_cast<double>(precise) / static_cast<double>(rep.accepted);
  }
  return out;
}

}  // namespace

CuratedDataset curate_dataset_serial(const RawDataset& raw, const Catalog& catalog,
                                     const CurationConfig& cfg, bool ground_truth) {
  validate(cfg);
  std::vector<CurationOutcome> outcomes;
  outcomes.reserve(raw.size());
  for (const auto& r : raw) {
    outcomes.push_back(curate_example(r, catalog.candidate_set(r.observation.section_id), cfg));
  }
  return collect(outcomes, ground_truth);
}

CuratedDataset curate_dataset(const RawDataset& raw, const Catalog& catalog,
                              const CurationConfig& cfg, bool ground_truth) {
  validate(cfg);
  // Matchers are built up front so the parallel region only reads them.
  std::map<std::string, std::unique_ptr<CandidateMatcher>> matchers;
  std::vector<const CandidateMatcher*> per_record(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const auto& id = raw[i].observation.section_id;
    auto it = matchers.find(id);
    if (it == matchers.end()) {
      it = matchers
               .emplace(id, std::make_unique<CandidateMatcher>(catalog.candidate_set(id),
                                                               cfg.title_weight))
               .first;
    }
    per_record[i] = it->second.get();
  }

  std::vector<CurationOutcome> outcomes(raw.size());
  const auto n = static_cast<std::ptrdiff_t>(raw.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto* m = per_record[i];
    outcomes[i] = curate_example(raw[i], m->candidates(), cfg, m);
  }
  return collect(outcomes, ground_truth);
}

}  // namespace scansim
