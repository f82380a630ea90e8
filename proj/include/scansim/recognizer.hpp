#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "scansim/catalog.hpp"
#include "scansim/scanner.hpp"

namespace scansim {

enum class Task { shelf, ocr_en, ocr_zh };

std::string_view to_string(Task t);
Task task_from_string(std::string_view s);

// r(n) = A - (A - a0) * exp(-n / tau)
struct LearningCurve {
  double a0 = 0.0;
  double A = 0.0;
  double tau = 450.0;

  bool operator==(const LearningCurve&) const = default;
};

struct TaskCurves {
  LearningCurve shelf{0.324, 0.718, 450.0};
  LearningCurve ocr_en{0.248, 0.466, 450.0};
  LearningCurve ocr_zh{0.308, 0.380, 450.0};

  const LearningCurve& operator[](Task t) const;
  bool operator==(const TaskCurves&) const = default;
};

struct NoiseParams {
  double w = 0.5;  // degradation weight
  double q_sub = 0.6;
  double q_omit = 0.2;
  double q_hall = 0.2;
  double edit_rate = 0.3;
  // Reference degradation d-bar: a book this degraded succeeds with
  // probability exactly r(n).
  double mean_degradation = 0.3;

  bool operator==(const NoiseParams&) const = default;
};

struct RecognizerModel {
  std::size_t n_examples = 0;
  TaskCurves curves;
  NoiseParams noise;
  std::uint64_t seed = 0;

  bool operator==(const RecognizerModel&) const = default;
};

void validate(const RecognizerModel& m);

double accuracy_curve(const LearningCurve& c, double n);
double accuracy_curve(const RecognizerModel& m, Task t, double n);
inline double accuracy_curve(const RecognizerModel& m, Task t) {
  return accuracy_curve(m, t, static_cast<double>(m.n_examples));
}

// Left-to-right labels for the visible books, constrained by the RAG
// candidate set. `nearest` optionally supplies nearest_title_table over
// `candidates`. Throws EmptyCandidates.
LabelSequence predict_labels(const RecognizerModel& model, const Observation& obs,
                             std::span<const BookRecord> candidates, std::uint64_t seed,
                             const std::vector<std::size_t>* nearest = nullptr);

// Always tunes from the pretrained base, so the state is (curves, size).
RecognizerModel finetune(const RecognizerModel& base, std::size_t dataset_size);

struct OcrItem {
  std::string text;
  double degradation = 0.0;
};

struct EvalSet {
  Task task = Task::shelf;
  // d-bar used for every prediction during evaluation. For shelf sets it is
  // the mean over items of each item's mean book degradation, matching the
  // item-averaged metric, so the expected score equals the curve.
  double mean_degradation = 0.3;
  std::vector<Observation> shelf_items;  // truth in visible
  std::vector<OcrItem> ocr_items;
  std::map<std::string, std::vector<BookRecord>> candidates;  // by section

  std::size_t size() const { return task == Task::shelf ? shelf_items.size() : ocr_items.size(); }
};

EvalSet make_shelf_eval_set(const ShelfWorld& world, const HeldOut& held_out);
EvalSet make_ocr_eval_set(Task task, int count, double degradation_mean,
                          double degradation_concentration, std::uint64_t seed);

struct EvalResult {
  Task task = Task::shelf;
  std::size_t n_examples = 0;
  double mean = 0.0;
  double std_error = 0.0;  // over all item-trial samples
  std::size_t trials = 0;
};

// Per-book accuracy via LCS on call numbers (shelf) or per-item exact match
// (OCR), averaged over items and trials. Trials run in parallel with
// per-(trial, item) seeds.
EvalResult evaluate(const RecognizerModel& model, const EvalSet& set, std::uint64_t seed,
                    int trials);
EvalResult evaluate_serial(const RecognizerModel& model, const EvalSet& set,
                           std::uint64_t seed, int trials);

// Longest common subsequence length over exact call-number text.
std::size_t lcs_call_number_matches(const LabelSequence& predicted,
                                    const std::vector<VisibleBook>& truth);

}  // namespace scansim
