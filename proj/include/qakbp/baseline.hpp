#ifndef QAKBP_BASELINE_HPP
#define QAKBP_BASELINE_HPP

// Training-free lexical span extractor with a no-answer threshold.
//
// Tokens are maximal runs of non-space, non-punctuation characters, lowercased.
// Question content terms Q are question tokens that are neither stopwords nor
// wh-words. For a candidate span inside sentence S:
//
//   overlap(S) = sum of idf(w) over distinct w in Q that occur in S
//   score      = overlap(S) * (1 + bonus)
//   bonus      = adjacency_bonus      if the nearest non-stopword token left of
//                                     the span is in Q
//              = adjacency_bonus / 2  else if the nearest one right of it is
//              = 0                    otherwise
//
// Eligible spans lie within one sentence, have 1..max_span_tokens tokens, do
// not start or end on a stopword, and contain no Q token, wh-word or the
// no-answer token. The best span wins (ties: earlier start, then shorter) and
// is returned when score > 0 and score >= no_answer_threshold.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "qakbp/metrics.hpp"
#include "qakbp/model.hpp"
#include "qakbp/transforms.hpp"
#include "qakbp/unicode.hpp"

namespace qakbp {

enum class IdfSource { self_corpus, uniform };

struct BaselineConfig {
  std::size_t max_span_tokens = 8;
  double no_answer_threshold = 2.0;
  IdfSource idf_source = IdfSource::self_corpus;
  double adjacency_bonus = 0.5;
};

inline Json to_json(const BaselineConfig& c) {
  return Json{{"max_span_tokens", c.max_span_tokens},
              {"no_answer_threshold", c.no_answer_threshold},
              {"idf_source", c.idf_source == IdfSource::uniform ? "uniform" : "self_corpus"},
              {"adjacency_bonus", c.adjacency_bonus}};
}

inline BaselineConfig baseline_config_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("baseline config: expected an object");
  BaselineConfig c;
  if (auto it = j.find("max_span_tokens"); it != j.end()) c.max_span_tokens = it->get<std::size_t>();
  if (auto it = j.find("no_answer_threshold"); it != j.end()) {
    c.no_answer_threshold = it->get<double>();
  }
  if (auto it = j.find("adjacency_bonus"); it != j.end()) c.adjacency_bonus = it->get<double>();
  if (auto it = j.find("idf_source"); it != j.end()) {
    const auto s = it->get<std::string>();
    if (s == "uniform") {
      c.idf_source = IdfSource::uniform;
    } else if (s == "self_corpus") {
      c.idf_source = IdfSource::self_corpus;
    } else {
      throw ParseError("baseline config: unknown idf_source \"" + s + "\"");
    }
  }
  if (c.max_span_tokens < 1) throw ParseError("baseline config: max_span_tokens must be >= 1");
  if (c.no_answer_threshold < 0) throw ParseError("baseline config: threshold must be >= 0");
  return c;
}

struct Token {
  std::string text;  // lowercased
  std::size_t start = 0;
  std::size_t end = 0;  // code points, half-open
};

inline std::vector<Token> tokenize(std::u32string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (unicode::is_space(text[i]) || unicode::is_punct(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && !unicode::is_space(text[j]) && !unicode::is_punct(text[j])) ++j;
    out.push_back({unicode::encode(unicode::to_lower(text.substr(i, j - i))), i, j});
    i = j;
  }
  return out;
}

inline std::vector<Token> tokenize(std::string_view utf8) { return tokenize(unicode::decode(utf8)); }

inline bool is_stopword(std::string_view w) {
  static const std::unordered_set<std::string_view> kStop = {
      "a",    "an",   "the",  "of",    "in",   "on",   "at",   "to",   "for",  "by",
      "with", "from", "and",  "or",    "is",   "was",  "were", "are",  "be",   "been",
      "being", "his", "her",  "its",   "their", "he",  "she",  "it",   "they", "as",
      "that", "this", "did",  "does",  "do",   "has",  "had",  "have", "into", "about",
      "s",    "not",  "but",  "also",  "than", "then", "there", "these", "those", "i",
      "you",  "we",   "him",  "them",  "our",  "your", "my",   "me",   "us",   "if"};
  return kStop.count(w) > 0;
}

inline bool is_wh_word(std::string_view w) {
  static const std::unordered_set<std::string_view> kWh = {
      "who", "whom", "whose", "what", "where", "when", "which", "why", "how"};
  return kWh.count(w) > 0;
}

class IdfTable {
 public:
  IdfTable() = default;  // behaves as an empty corpus: every lookup is 1

  double operator()(const std::string& w) const {
    auto it = idf_.find(w);
    return it == idf_.end() ? unseen_ : it->second;
  }
  double unseen() const { return unseen_; }
  std::size_t documents() const { return documents_; }

  static IdfTable uniform() { return IdfTable(); }

  friend IdfTable build_idf(const Dataset& d);

 private:
  std::unordered_map<std::string, double> idf_;
  double unseen_ = 1.0;
  std::size_t documents_ = 0;
};

// idf(w) = ln((1 + N) / (1 + df(w))) + 1 over the contexts of d; an unseen
// word gets the max-rarity value ln(1 + N) + 1.
inline IdfTable build_idf(const Dataset& d) {
  std::unordered_map<std::string, std::size_t> df;
  for (const auto& inst : d.instances) {
    std::unordered_set<std::string> seen;
    for (auto& t : tokenize(inst.context)) seen.insert(std::move(t.text));
    for (const auto& w : seen) ++df[w];
  }
  IdfTable table;
  table.documents_ = d.instances.size();
  const double n = static_cast<double>(table.documents_);
  for (const auto& [w, count] : df) {
    table.idf_[w] = std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0;
  }
  table.unseen_ = std::log(1.0 + n) + 1.0;
  return table;
}

inline IdfTable make_idf(const Dataset& d, const BaselineConfig& cfg) {
  return cfg.idf_source == IdfSource::uniform ? IdfTable::uniform() : build_idf(d);
}

struct ScoredSpan {
  std::size_t first_token = 0;
  std::size_t last_token = 0;  // inclusive
  std::size_t start = 0;       // code points
  std::size_t end = 0;
  double score = 0.0;
  std::string text;
};

// Highest-scoring eligible span, or nullopt when none is eligible.
inline std::optional<ScoredSpan> best_span(const Instance& inst, const BaselineConfig& cfg,
                                           const IdfTable& idf,
                                           const std::optional<std::string>& no_answer_token) {
  std::unordered_set<std::string> q_terms;
  std::unordered_set<std::string> wh;
  for (const auto& t : tokenize(inst.question)) {
    if (is_wh_word(t.text)) {
      wh.insert(t.text);
    } else if (!is_stopword(t.text)) {
      q_terms.insert(t.text);
    }
  }
  const auto context = unicode::decode(inst.context);
  const auto tokens = tokenize(context);
  const auto sentences = segment_sentences(context);
  const std::u32string token32 =
      no_answer_token ? unicode::decode(*no_answer_token) : std::u32string();

  auto blocked = [&](const Token& t) {
    if (q_terms.count(t.text) || wh.count(t.text)) return true;
    if (!token32.empty() && context.compare(t.start, t.end - t.start, token32) == 0 &&
        t.end - t.start == token32.size()) {
      return true;
    }
    return false;
  };

  std::optional<ScoredSpan> best;
  std::size_t ti = 0;
  for (const auto& sent : sentences) {
    std::size_t begin = ti;
    while (begin < tokens.size() && tokens[begin].start < sent.start) ++begin;
    std::size_t end = begin;
    while (end < tokens.size() && tokens[end].end <= sent.end) ++end;
    ti = end;
    if (begin == end) continue;

    double overlap = 0.0;
    std::unordered_set<std::string> counted;
    for (std::size_t k = begin; k < end; ++k) {
      if (q_terms.count(tokens[k].text) && counted.insert(tokens[k].text).second) {
        overlap += idf(tokens[k].text);
      }
    }

    for (std::size_t i = begin; i < end; ++i) {
      if (is_stopword(tokens[i].text)) continue;
      for (std::size_t j = i; j < end && j - i < cfg.max_span_tokens; ++j) {
        if (blocked(tokens[j])) break;
        if (is_stopword(tokens[j].text)) continue;
        double bonus = 0.0;
        std::size_t l = i;
        while (l > begin && is_stopword(tokens[l - 1].text)) --l;
        std::size_t r = j + 1;
        while (r < end && is_stopword(tokens[r].text)) ++r;
        if (l > begin && q_terms.count(tokens[l - 1].text)) {
          bonus = cfg.adjacency_bonus;
        } else if (r < end && q_terms.count(tokens[r].text)) {
          bonus = cfg.adjacency_bonus / 2;
        }
        const double score = overlap * (1.0 + bonus);
        if (!best || score > best->score) {
          best = ScoredSpan{i, j, tokens[i].start, tokens[j].end, score, {}};
        }
      }
    }
  }
  if (best) best->text = unicode::encode(context.substr(best->start, best->end - best->start));
  return best;
}

inline bool clears_threshold(double score, const BaselineConfig& cfg) {
  return score > 0.0 && score >= cfg.no_answer_threshold;
}

inline Prediction predict(const Instance& inst, const BaselineConfig& cfg, const IdfTable& idf,
                          const std::optional<std::string>& no_answer_token = std::nullopt) {
  Prediction p{inst.id, std::nullopt};
  if (inst.context.empty()) return p;
  if (auto span = best_span(inst, cfg, idf, no_answer_token); span && clears_threshold(span->score, cfg)) {
    p.answer = span->text;
  }
  return p;
}

// On an adapted dataset a no-answer is reported as the dummy token, the way an
// unmodified span model trained on adapted data would.
inline std::vector<Prediction> predict_dataset(const Dataset& d, const BaselineConfig& cfg,
                                               const IdfTable& idf) {
  std::vector<Prediction> out;
  out.reserve(d.instances.size());
  for (const auto& inst : d.instances) {
    auto p = predict(inst, cfg, idf, d.no_answer_token);
    if (!p.answer && d.no_answer_token) p.answer = *d.no_answer_token;
    out.push_back(std::move(p));
  }
  return out;
}

// Threshold maximizing slot-filling F1 on a held-out dataset. Candidates sit
// midway between adjacent distinct best-span scores (and halfway to zero below
// the lowest), so the chosen value keeps a margin on both sides; the lowest
// wins ties.
inline double calibrate_threshold(const Dataset& held_out, BaselineConfig cfg,
                                  const IdfTable& idf) {
  struct Row {
    double score;
    bool correct;
  };
  std::vector<Row> rows;
  std::size_t positives = 0;
  for (const auto& inst : held_out.instances) {
    const bool positive = !is_negative(inst, held_out.no_answer_token);
    positives += positive;
    auto span = best_span(inst, cfg, idf, held_out.no_answer_token);
    if (!span || span->score <= 0) continue;
    bool correct = false;
    if (positive) {
      const auto norm = normalize_answer(span->text);
      for (const auto& g : gold_answers(inst, held_out.no_answer_token)) {
        correct = correct || normalize_answer(g.text) == norm;
      }
    }
    rows.push_back({span->score, correct});
  }
  std::vector<double> scores;
  for (const auto& r : rows) scores.push_back(r.score);
  std::sort(scores.begin(), scores.end());
  scores.erase(std::unique(scores.begin(), scores.end()), scores.end());
  std::vector<double> candidates;
  double prev = 0.0;
  for (double s : scores) {
    candidates.push_back((prev + s) / 2);
    prev = s;
  }
  candidates.push_back(prev + 1.0);

  double best_t = cfg.no_answer_threshold;
  double best_f1 = -1.0;
  for (double t : candidates) {
    std::size_t answered = 0, correct = 0;
    for (const auto& r : rows) {
      if (r.score >= t) {
        ++answered;
        correct += r.correct;
      }
    }
    const double p = answered ? static_cast<double>(correct) / static_cast<double>(answered) : 0.0;
    const double rc = positives ? static_cast<double>(correct) / static_cast<double>(positives) : 0.0;
    const double f1 = harmonic(p, rc);
    if (f1 > best_f1) {
      best_f1 = f1;
      best_t = t;
    }
  }
  return best_t;
}

}  // namespace qakbp

#endif  // QAKBP_BASELINE_HPP
