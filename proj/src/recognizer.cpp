#include "scansim/recognizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "scansim/error.hpp"
#include "scansim/rng.hpp"
#include "scansim/similarity.hpp"
#include "scansim/text.hpp"

namespace scansim {

std::string_view to_string(Task t) {
  switch (t) {
    case Task::shelf: return "shelf";
    case Task::ocr_en: return "ocr_en";
    case Task::ocr_zh: return "ocr_zh";
  }
  return "shelf";
}

Task task_from_string(std::string_view s) {
  if (s == "shelf") return Task::shelf;
  if (s == "ocr_en") return Task::ocr_en;
  if (s == "ocr_zh") return Task::ocr_zh;
  throw InvalidConfig("task", "unknown task '" + std::string(s) + "'");
}

const LearningCurve& TaskCurves::operator[](Task t) const {
  switch (t) {
    case Task::shelf: return shelf;
    case Task::ocr_en: return ocr_en;
    case Task::ocr_zh: return ocr_zh;
  }
  return shelf;
}

void validate(const RecognizerModel& m) {
  for (Task t : {Task::shelf, Task::ocr_en, Task::ocr_zh}) {
    const auto& c = m.curves[t];
    const std::string field = "recognizer.curves." + std::string(to_string(t));
    if (!(c.a0 >= 0.0 && c.a0 <= c.A && c.A <= 1.0)) {
      throw InvalidConfig(field, "need 0 <= a0 <= A <= 1");
    }
    if (!(c.tau > 0.0)) throw InvalidConfig(field + ".tau", "must be > 0");
  }
  const auto& q = m.noise;
  if (q.q_sub < 0.0 || q.q_omit < 0.0 || q.q_hall < 0.0 ||
      std::abs(q.q_sub + q.q_omit + q.q_hall - 1.0) > 1e-9) {
    throw InvalidConfig("recognizer.noise.q_sub", "q_sub + q_omit + q_hall must equal 1");
  }
  if (q.w < 0.0) throw InvalidConfig("recognizer.noise.w", "must be >= 0");
  if (!(q.edit_rate > 0.0 && q.edit_rate <= 1.0)) {
    throw InvalidConfig("recognizer.noise.edit_rate", "must be in (0,1]");
  }
  if (q.mean_degradation < 0.0 || q.mean_degradation > 1.0) {
    throw InvalidConfig("recognizer.noise.mean_degradation", "must be in [0,1]");
  }
}

double accuracy_curve(const LearningCurve& c, double n) {
  return c.A - (c.A - c.a0) * std::exp(-std::max(0.0, n) / c.tau);
}

double accuracy_curve(const RecognizerModel& m, Task t, double n) {
  return accuracy_curve(m.curves[t], n);
}

RecognizerModel finetune(const RecognizerModel& base, std::size_t dataset_size) {
  RecognizerModel m = base;
  m.n_examples = dataset_size;
  return m;
}

namespace {

std::u32string_view alphabet_for(char32_t c) {
  if (c < 0x80) return confusable_alphabet(Language::en);
  if (c >= 0xAC00 && c <= 0xD7AF) return confusable_alphabet(Language::ko);
  if (c >= 0x3040 && c <= 0x30FF) return confusable_alphabet(Language::ja);
  return confusable_alphabet(Language::zh);
}

char32_t replacement(char32_t c, Rng& rng) {
  if (c >= U'0' && c <= U'9') {
    const int d = std::uniform_int_distribution<int>(1, 9)(rng);
    return U'0' + (static_cast<int>(c - U'0') + d) % 10;
  }
  if (c >= U'A' && c <= U'Z') {
    const int d = std::uniform_int_distribution<int>(1, 25)(rng);
    return U'A' + (static_cast<int>(c - U'A') + d) % 26;
  }
  const auto alpha = alphabet_for(c);
  std::uniform_int_distribution<std::size_t> pick(0, alpha.size() - 1);
  char32_t r = alpha[pick(rng)];
  while (r == c) r = alpha[pick(rng)];
  return r;
}

// Replaces round(rate * |eligible|) (at least one) eligible characters.
std::string garble(const std::string& text, double rate, Rng& rng, bool (*eligible)(char32_t)) {
  std::u32string s = utf8_decode(text);
  std::vector<std::size_t> slots;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (eligible(s[i])) slots.push_back(i);
  }
  if (slots.empty()) return text;
  const auto k = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::lround(rate * static_cast<double>(slots.size()))), 1,
      slots.size());
  std::shuffle(slots.begin(), slots.end(), rng);
  for (std::size_t i = 0; i < k; ++i) s[slots[i]] = replacement(s[slots[i]], rng);
  return utf8_encode(s);
}

bool title_char(char32_t c) { return c != U' '; }
bool call_number_char(char32_t c) {
  return (c >= U'0' && c <= U'9') || (c >= U'A' && c <= U'Z');
}

bool in_candidates(const LabelEntry& e, std::span<const BookRecord> candidates) {
  for (const auto& c : candidates) {
    if (c.title == e.title && format_call_number(c.call_number) == e.call_number) return true;
  }
  return false;
}

std::size_t find_truth(std::span<const BookRecord> candidates, const std::string& book_id) {
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].book_id == book_id) return i;
  }
  return candidates.size();
}

std::size_t nearest_other(std::span<const BookRecord> candidates, std::size_t truth_index,
                          const std::string& truth_title) {
  const auto truth = utf8_decode(truth_title);
  double best = -1.0;
  std::size_t arg = candidates.size();
  for (std::size_t j = 0; j < candidates.size(); ++j) {
    if (j == truth_index) continue;
    const double s = gestalt_similarity(truth, utf8_decode(candidates[j].title));
    if (s > best) {
      best = s;
      arg = j;
    }
  }
  return arg;
}

}  // namespace

LabelSequence predict_labels(const RecognizerModel& model, const Observation& obs,
                             std::span<const BookRecord> candidates, std::uint64_t seed,
                             const std::vector<std::size_t>* nearest) {
  if (candidates.empty()) throw EmptyCandidates();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto& q = model.noise;
  const double r = accuracy_curve(model, Task::shelf);

  LabelSequence out;
  out.reserve(obs.visible.size());
  for (std::size_t k = 0; k < obs.visible.size(); ++k) {
    const auto& book = obs.visible[k];
    // Each book draws from its own stream, so for a fixed seed the set of
    // correctly read books only grows as r increases.
    const std::uint64_t book_seed = derive_seed(seed, Stream::kPredict, k);
    const double u = static_cast<double>(splitmix64(book_seed) >> 11) * 0x1.0p-53;
    const double p = std::clamp(r + q.w * (q.mean_degradation - book.effective_degradation), 0.0, 1.0);
    if (u < p) {
      out.push_back({book.title, book.call_number});
      continue;
    }
    Rng rng(book_seed);
    const double mode = unit(rng);
    if (mode < q.q_sub) {
      const std::size_t truth = find_truth(candidates, book.book_id);
      std::size_t other = candidates.size();
      if (nearest != nullptr && truth < candidates.size()) {
        other = (*nearest)[truth];
      } else {
        other = nearest_other(candidates, truth, book.title);
      }
      // A lone candidate has nothing to be confused with.
      if (other < candidates.size()) {
        const auto& rec = candidates[other];
        out.push_back({rec.title, format_call_number(rec.call_number)});
      }
    } else if (mode < q.q_sub + q.q_omit) {
      // omitted
    } else {
      LabelEntry e;
      int tries = 0;
      do {
        e.title = garble(book.title, q.edit_rate, rng, title_char);
        e.call_number = garble(book.call_number, q.edit_rate, rng, call_number_char);
      } while (in_candidates(e, candidates) && ++tries < 32);
      if (in_candidates(e, candidates)) e.call_number += "?";
      out.push_back(std::move(e));
    }
  }
  return out;
}

std::size_t lcs_call_number_matches(const LabelSequence& predicted,
                                    const std::vector<VisibleBook>& truth) {
  std::vector<std::size_t> prev(truth.size() + 1, 0), cur(truth.size() + 1, 0);
  for (const auto& p : predicted) {
    for (std::size_t j = 0; j < truth.size(); ++j) {
      cur[j + 1] = p.call_number == truth[j].call_number ? prev[j] + 1
                                                         : std::max(prev[j + 1], cur[j]);
    }
    std::swap(prev, cur);
  }
  return prev[truth.size()];
}

EvalSet make_shelf_eval_set(const ShelfWorld& world, const HeldOut& held_out) {
  EvalSet set;
  set.task = Task::shelf;
  DeploymentConfig ideal;
  double sum = 0.0;
  std::size_t items = 0;
  for (const auto& w : held_out.windows) {
    // Hand-labeled images: captured from a perfect pose.
    Observation obs = capture(world, w, Pose{w.x_lo, 0.0, 0.0}, ideal, 0.0);
    if (obs.visible.empty()) continue;
    double item = 0.0;
    for (const auto& v : obs.visible) item += v.effective_degradation;
    sum += item / static_cast<double>(obs.visible.size());
    ++items;
    if (!set.candidates.count(obs.section_id)) {
      const auto c = world.catalog().candidate_set(obs.section_id);
      set.candidates.emplace(obs.section_id, std::vector<BookRecord>(c.begin(), c.end()));
    }
    set.shelf_items.push_back(std::move(obs));
  }
  set.mean_degradation = items > 0 ? sum / static_cast<double>(items) : 0.0;
  return set;
}

EvalSet make_ocr_eval_set(Task task, int count, double degradation_mean,
                          double degradation_concentration, std::uint64_t seed) {
  EvalSet set;
  set.task = task;
  Rng rng(derive_seed(seed, Stream::kOcrSet, static_cast<std::uint64_t>(task)));
  const Language lang = task == Task::ocr_zh ? Language::zh : Language::en;
  const auto tokens = title_tokens(lang);
  std::uniform_int_distribution<std::size_t> pick(0, tokens.size() - 1);
  std::uniform_int_distribution<int> words(1, 3);
  const double alpha = degradation_mean * degradation_concentration;
  const double beta = (1.0 - degradation_mean) * degradation_concentration;
  double sum = 0.0;
  for (int i = 0; i < count; ++i) {
    OcrItem item;
    const int n = words(rng);
    for (int k = 0; k < n; ++k) {
      if (k > 0 && title_uses_spaces(lang)) item.text += ' ';
      item.text += tokens[pick(rng)];
    }
    item.degradation = sample_beta(rng, alpha, beta);
    sum += item.degradation;
    set.ocr_items.push_back(std::move(item));
  }
  set.mean_degradation = count > 0 ? sum / count : 0.0;
  return set;
}

namespace {

struct Sample {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t n = 0;
};

// Accuracy of every item in one trial, in item order.
using NearestTables = std::map<std::string, std::vector<std::size_t>>;

void run_trial(const RecognizerModel& model, const EvalSet& set, const NearestTables& nearest,
               std::uint64_t seed, int trial, std::vector<double>& out) {
  const std::size_t items = set.size();
  out.resize(items);
  if (set.task == Task::shelf) {
    for (std::size_t i = 0; i < items; ++i) {
      const auto& obs = set.shelf_items[i];
      const auto& cands = set.candidates.at(obs.section_id);
      const auto pred = predict_labels(
          model, obs, cands, derive_seed(seed, Stream::kEval, static_cast<std::uint64_t>(trial), i),
          &nearest.at(obs.section_id));
      out[i] = static_cast<double>(lcs_call_number_matches(pred, obs.visible)) /
               static_cast<double>(obs.visible.size());
    }
  } else {
    const double r = accuracy_curve(model, set.task);
    Rng rng(derive_seed(seed, Stream::kEval, static_cast<std::uint64_t>(trial), 0xffff));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t i = 0; i < items; ++i) {
      const double p = std::clamp(
          r + model.noise.w * (set.mean_degradation - set.ocr_items[i].degradation), 0.0, 1.0);
      out[i] = unit(rng) < p ? 1.0 : 0.0;
    }
  }
}

EvalResult summarize(const RecognizerModel& model, const EvalSet& set, int trials,
                     const std::vector<std::vector<double>>& scores) {
  Sample s;
  for (const auto& trial : scores) {
    for (double v : trial) {
      s.sum += v;
      s.sum_sq += v * v;
      ++s.n;
    }
  }
  EvalResult r;
  r.task = set.task;
  r.n_examples = model.n_examples;
  r.trials = static_cast<std::size_t>(trials);
  const double n = static_cast<double>(s.n);
  r.mean = s.sum / n;
  if (s.n > 1) {
    const double var = std::max(0.0, (s.sum_sq - n * r.mean * r.mean) / (n - 1.0));
    r.std_error = std::sqrt(var / n);
  }
  return r;
}

RecognizerModel eval_model(const RecognizerModel& model, const EvalSet& set) {
  RecognizerModel m = model;
  m.noise.mean_degradation = set.mean_degradation;
  return m;
}

void check_eval_args(const EvalSet& set, int trials) {
  if (set.size() == 0) throw EmptySet();
  if (trials < 1) throw InvalidConfig("trials", "must be >= 1");
}

}  // namespace

EvalResult evaluate_serial(const RecognizerModel& model, const EvalSet& set,
                           std::uint64_t seed, int trials) {
  check_eval_args(set, trials);
  const RecognizerModel m = eval_model(model, set);
  NearestTables nearest;
  for (const auto& [id, cands] : set.candidates) nearest[id] = nearest_title_table_serial(cands);
  std::vector<std::vector<double>> scores(static_cast<std::size_t>(trials));
  for (int t = 0; t < trials; ++t) run_trial(m, set, nearest, seed, t, scores[t]);
  return summarize(model, set, trials, scores);
}

EvalResult evaluate(const RecognizerModel& model, const EvalSet& set, std::uint64_t seed,
                    int trials) {
  check_eval_args(set, trials);
  const RecognizerModel m = eval_model(model, set);
  NearestTables nearest;
  for (const auto& [id, cands] : set.candidates) nearest[id] = nearest_title_table(cands);
  std::vector<std::vector<double>> scores(static_cast<std::size_t>(trials));
#pragma omp parallel for schedule(static)
  for (int t = 0; t < trials; ++t) run_trial(m, set, nearest, seed, t, scores[t]);
  return summarize(model, set, trials, scores);
}

}  // namespace scansim
