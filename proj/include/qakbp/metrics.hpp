#ifndef QAKBP_METRICS_HPP
#define QAKBP_METRICS_HPP

// Slot-filling scoring.
//
//   precision = correct / answered      recall = correct / positives
//
// A correct "no answer" on a negative touches neither ratio; an answer on a
// negative only costs precision. Challenge accuracy is the share of no-answer
// predictions over an all-negative set.

#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "qakbp/model.hpp"
#include "qakbp/unicode.hpp"

namespace qakbp {

class ScoreError : public Error {
 public:
  using Error::Error;
};

// Lowercase, strip punctuation, drop whole-word a/an/the, collapse whitespace.
inline std::string normalize_answer(std::string_view s) {
  const auto lowered = unicode::to_lower(unicode::decode(s));
  std::vector<std::u32string> words;
  std::u32string word;
  auto flush = [&] {
    if (!word.empty() && word != U"a" && word != U"an" && word != U"the") words.push_back(word);
    word.clear();
  };
  for (char32_t c : lowered) {
    if (unicode::is_punct(c)) continue;
    if (unicode::is_space(c)) {
      flush();
    } else {
      word.push_back(c);
    }
  }
  flush();
  std::u32string joined;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) joined.push_back(U' ');
    joined += words[i];
  }
  return unicode::encode(joined);
}

enum class MatchMode {
  exact,     // normalized exact match against any gold (canonical)
  token_f1,  // partial credit: best bag-of-tokens F1 against any gold
};

// Value used for a ratio whose denominator is zero.
enum class ZeroPolicy { zero, one };

struct ScoreOptions {
  MatchMode match = MatchMode::exact;
  ZeroPolicy zero_policy = ZeroPolicy::zero;
  // Overrides the dataset's adaptation flag when set.
  std::optional<std::string> no_answer_token;
};

struct Counts {
  std::size_t total = 0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::size_t answered = 0;
  std::size_t correct = 0;  // exact matches
  std::size_t no_answer_predictions = 0;
  std::size_t missing_predictions = 0;
  double credit = 0.0;  // equals correct under MatchMode::exact
};

struct RelationReport {
  double precision = 0, recall = 0, f1 = 0;
  Counts counts;
};

struct EvalReport {
  std::optional<double> precision, recall, f1, accuracy;
  Counts counts;
  std::map<std::string, RelationReport> per_relation;
};

inline double token_f1(std::string_view prediction, std::string_view gold) {
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::size_t b = 0;
    while (b < s.size()) {
      auto e = s.find(' ', b);
      if (e == std::string::npos) e = s.size();
      if (e > b) out.push_back(s.substr(b, e - b));
      b = e + 1;
    }
    return out;
  };
  const auto p = split(normalize_answer(prediction));
  const auto g = split(normalize_answer(gold));
  if (p.empty() || g.empty()) return p == g ? 1.0 : 0.0;
  std::unordered_map<std::string, int> bag;
  for (const auto& t : g) ++bag[t];
  std::size_t common = 0;
  for (const auto& t : p) {
    if (auto it = bag.find(t); it != bag.end() && it->second > 0) {
      --it->second;
      ++common;
    }
  }
  if (common == 0) return 0.0;
  const double prec = static_cast<double>(common) / static_cast<double>(p.size());
  const double rec = static_cast<double>(common) / static_cast<double>(g.size());
  return 2 * prec * rec / (prec + rec);
}

inline double ratio(double num, std::size_t den, ZeroPolicy zp) {
  if (den == 0) return zp == ZeroPolicy::one ? 1.0 : 0.0;
  return num / static_cast<double>(den);
}

inline double harmonic(double p, double r) { return p + r > 0 ? 2 * p * r / (p + r) : 0.0; }

namespace detail {

// id -> prediction; rejects duplicates and ids outside the dataset.
inline std::unordered_map<std::string, const Prediction*> index_predictions(
    const Dataset& d, const std::vector<Prediction>& preds) {
  std::unordered_map<std::string, const Prediction*> by_id;
  std::vector<std::string> dupes;
  for (const auto& p : preds) {
    if (!by_id.emplace(p.instance_id, &p).second) dupes.push_back(p.instance_id);
  }
  auto list = [](const std::vector<std::string>& ids) {
    std::string s;
    for (std::size_t i = 0; i < ids.size() && i < 20; ++i) s += " " + ids[i];
    if (ids.size() > 20) s += " ...";
    return s;
  };
  if (!dupes.empty()) throw ScoreError("duplicate predictions for ids:" + list(dupes));
  std::unordered_map<std::string, bool> known;
  for (const auto& inst : d.instances) known.emplace(inst.id, true);
  std::vector<std::string> unknown;
  for (const auto& p : preds) {
    if (!known.count(p.instance_id)) unknown.push_back(p.instance_id);
  }
  if (!unknown.empty()) throw ScoreError("predictions reference unknown ids:" + list(unknown));
  return by_id;
}

// Effective answer after the dummy-token mapping; nullopt = no answer.
inline std::optional<std::string> effective_answer(const Prediction* p,
                                                   const std::optional<std::string>& token) {
  if (!p || !p->answer) return std::nullopt;
  if (token && normalize_answer(*p->answer) == normalize_answer(*token)) return std::nullopt;
  return p->answer;
}

inline double answer_credit(const std::string& answer, const std::vector<Span>& golds,
                            MatchMode mode, bool* exact) {
  const auto norm = normalize_answer(answer);
  double best = 0.0;
  *exact = false;
  for (const auto& g : golds) {
    if (normalize_answer(g.text) == norm) {
      *exact = true;
      return 1.0;
    }
    if (mode == MatchMode::token_f1) best = std::max(best, token_f1(answer, g.text));
  }
  return best;
}

}  // namespace detail

inline EvalReport score_slot_filling(const Dataset& d, const std::vector<Prediction>& preds,
                                     const ScoreOptions& opts = {}) {
  const auto by_id = detail::index_predictions(d, preds);
  const auto& token = opts.no_answer_token ? opts.no_answer_token : d.no_answer_token;
  EvalReport rep;
  std::map<std::string, Counts> rel_counts;
  for (const auto& inst : d.instances) {
    auto it = by_id.find(inst.id);
    const Prediction* p = it == by_id.end() ? nullptr : it->second;
    const auto answer = detail::effective_answer(p, token);
    const bool positive = !is_negative(inst, token);

    Counts delta;
    delta.total = 1;
    if (!p) delta.missing_predictions = 1;
    (positive ? delta.positives : delta.negatives) = 1;
    if (!answer) {
      delta.no_answer_predictions = 1;
    } else {
      delta.answered = 1;
      if (positive) {
        bool exact = false;
        delta.credit = detail::answer_credit(*answer, gold_answers(inst, token), opts.match, &exact);
        delta.correct = exact ? 1 : 0;
        if (opts.match == MatchMode::exact) delta.credit = exact ? 1.0 : 0.0;
      }
    }
    auto add = [&](Counts& c) {
      c.total += delta.total;
      c.positives += delta.positives;
      c.negatives += delta.negatives;
      c.answered += delta.answered;
      c.correct += delta.correct;
      c.no_answer_predictions += delta.no_answer_predictions;
      c.missing_predictions += delta.missing_predictions;
      c.credit += delta.credit;
    };
    add(rep.counts);
    if (inst.relation) add(rel_counts[*inst.relation]);
  }
  const auto& c = rep.counts;
  rep.precision = ratio(c.credit, c.answered, opts.zero_policy);
  rep.recall = ratio(c.credit, c.positives, opts.zero_policy);
  rep.f1 = harmonic(*rep.precision, *rep.recall);
  for (const auto& [rel, rc] : rel_counts) {
    RelationReport rr;
    rr.counts = rc;
    rr.precision = ratio(rc.credit, rc.answered, opts.zero_policy);
    rr.recall = ratio(rc.credit, rc.positives, opts.zero_policy);
    rr.f1 = harmonic(rr.precision, rr.recall);
    rep.per_relation.emplace(rel, rr);
  }
  return rep;
}

inline EvalReport score_challenge_accuracy(const Dataset& d, const std::vector<Prediction>& preds,
                                           const ScoreOptions& opts = {}) {
  const auto& token = opts.no_answer_token ? opts.no_answer_token : d.no_answer_token;
  for (const auto& inst : d.instances) {
    if (!is_negative(inst, token)) {
      throw ScoreError("challenge accuracy needs an all-negative dataset; " + inst.id +
                       " has gold answers");
    }
  }
  const auto by_id = detail::index_predictions(d, preds);
  EvalReport rep;
  auto& c = rep.counts;
  for (const auto& inst : d.instances) {
    auto it = by_id.find(inst.id);
    const Prediction* p = it == by_id.end() ? nullptr : it->second;
    ++c.total;
    ++c.negatives;
    if (!p) ++c.missing_predictions;
    if (detail::effective_answer(p, token)) {
      ++c.answered;
    } else {
      ++c.no_answer_predictions;
    }
  }
  rep.accuracy = ratio(static_cast<double>(c.no_answer_predictions), c.total, opts.zero_policy);
  return rep;
}

inline Json to_json(const Counts& c) {
  return Json{{"total", c.total},
              {"positives", c.positives},
              {"negatives", c.negatives},
              {"answered", c.answered},
              {"correct", c.correct},
              {"credit", c.credit},
              {"no_answer_predictions", c.no_answer_predictions},
              {"missing_predictions", c.missing_predictions}};
}

inline Json to_json(const EvalReport& r) {
  auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
  Json j;
  j["precision"] = opt(r.precision);
  j["recall"] = opt(r.recall);
  j["f1"] = opt(r.f1);
  j["accuracy"] = opt(r.accuracy);
  j["counts"] = to_json(r.counts);
  if (!r.per_relation.empty()) {
    Json per = Json::object();
    for (const auto& [rel, rr] : r.per_relation) {
      per[rel] = Json{{"precision", rr.precision},
                      {"recall", rr.recall},
                      {"f1", rr.f1},
                      {"counts", to_json(rr.counts)}};
    }
    j["per_relation"] = std::move(per);
  }
  return j;
}

inline std::string tsv_header() {
  return "precision\trecall\tf1\taccuracy\tpositives\tnegatives\tanswered\tcorrect\t"
         "no_answer_predictions\tmissing_predictions";
}

inline std::string to_tsv(const EvalReport& r) {
  auto num = [](const std::optional<double>& v) {
    if (!v) return std::string("-");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", *v);
    return std::string(buf);
  };
  const auto& c = r.counts;
  return num(r.precision) + "\t" + num(r.recall) + "\t" + num(r.f1) + "\t" + num(r.accuracy) +
         "\t" + std::to_string(c.positives) + "\t" + std::to_string(c.negatives) + "\t" +
         std::to_string(c.answered) + "\t" + std::to_string(c.correct) + "\t" +
         std::to_string(c.no_answer_predictions) + "\t" + std::to_string(c.missing_predictions);
}

}  // namespace qakbp

#endif  // QAKBP_METRICS_HPP
