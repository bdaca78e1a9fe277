#ifndef QAKBP_TRANSFORMS_HPP
#define QAKBP_TRANSFORMS_HPP

// SQuAD adaptations for slot filling:
//  - negativize_squad: drop every sentence that overlaps a gold span, keeping
//    the question, to obtain a negative instance.
//  - insert_no_answer_token: prefix every context with a dummy token that
//    doubles as the gold answer of negatives, so an unmodified span model can
//    say "no answer".

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qakbp/model.hpp"
#include "qakbp/unicode.hpp"

namespace qakbp {

inline constexpr std::string_view kNoAnswerToken = "NoAnswerFound";

// Half-open [start, end) in code points.
struct SentenceBoundary {
  std::size_t start = 0;
  std::size_t end = 0;

  friend bool operator==(const SentenceBoundary&, const SentenceBoundary&) = default;
};

namespace detail {

inline constexpr std::array<std::u32string_view, 40> kAbbreviations = {
    U"Mr.",   U"Mrs.",  U"Ms.",   U"Dr.",   U"Prof.", U"Sr.",   U"Jr.",  U"St.",
    U"Mt.",   U"Gen.",  U"Col.",  U"Lt.",   U"Sgt.",  U"Capt.", U"Gov.", U"Sen.",
    U"Rep.",  U"Rev.",  U"Inc.",  U"Ltd.",  U"Co.",   U"Corp.", U"vs.",  U"e.g.",
    U"i.e.",  U"U.S.",  U"U.K.",  U"U.N.",  U"No.",   U"Jan.",  U"Feb.", U"Mar.",
    U"Apr.",  U"Aug.",  U"Sept.", U"Oct.",  U"Nov.",  U"Dec.",  U"Ave.", U"approx.",
};

inline bool is_terminal(char32_t c) { return c == U'.' || c == U'?' || c == U'!'; }

inline bool is_opening(char32_t c) {
  return c == U'(' || c == U'[' || c == U'"' || c == U'\'' || c == 0x201C || c == 0x2018;
}

// Word ending at `pos` (the period) suppresses a split: listed abbreviation
// or a single-capital initial such as "F.".
inline bool suppresses_split(std::u32string_view text, std::size_t begin, std::size_t pos) {
  std::size_t w = pos;
  while (w > begin && !unicode::is_space(text[w - 1])) --w;
  while (w < pos && is_opening(text[w])) ++w;
  const auto word = text.substr(w, pos + 1 - w);
  if (word.size() == 2 && unicode::is_upper(word[0])) return true;
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), word) != kAbbreviations.end();
}

}  // namespace detail

// Rule-based segmentation. A sentence closes after '.', '?' or '!' when the
// next characters are whitespace followed by an uppercase letter, or the end
// of the text. Sentences are trimmed, so only whitespace lies between them.
inline std::vector<SentenceBoundary> segment_sentences(std::u32string_view text) {
  std::vector<SentenceBoundary> out;
  const std::size_t n = text.size();
  auto skip_space = [&](std::size_t i) {
    while (i < n && unicode::is_space(text[i])) ++i;
    return i;
  };
  std::size_t start = skip_space(0);
  std::size_t pos = start;
  while (pos < n) {
    if (detail::is_terminal(text[pos])) {
      const std::size_t next = pos + 1;
      bool closes = false;
      if (next == n) {
        closes = true;
      } else if (unicode::is_space(text[next])) {
        const std::size_t k = skip_space(next);
        closes = k == n || unicode::is_upper(text[k]);
      }
      if (closes && text[pos] == U'.' && detail::suppresses_split(text, start, pos)) {
        closes = false;
      }
      if (closes) {
        out.push_back({start, next});
        start = skip_space(next);
        pos = start;
        continue;
      }
    }
    ++pos;
  }
  if (start < n) {
    std::size_t end = n;
    while (end > start && unicode::is_space(text[end - 1])) --end;
    out.push_back({start, end});
  }
  return out;
}

inline std::vector<SentenceBoundary> segment_sentences(std::string_view utf8) {
  return segment_sentences(unicode::decode(utf8));
}

struct TransformReport {
  std::size_t input_count = 0;
  std::size_t output_count = 0;
  std::size_t skipped = 0;
  Json parameters = Json::object();
  // negativize only: skips where golds sat in more than one sentence
  std::size_t skipped_multi_sentence = 0;
  std::size_t passed_through = 0;
};

inline Json to_json(const TransformReport& r) {
  Json j;
  j["input_count"] = r.input_count;
  j["output_count"] = r.output_count;
  j["skipped"] = r.skipped;
  j["parameters"] = r.parameters;
  j["skipped_multi_sentence"] = r.skipped_multi_sentence;
  j["passed_through"] = r.passed_through;
  return j;
}

struct TransformResult {
  Dataset dataset;
  TransformReport report;
};

inline constexpr std::string_view kNegativeSuffix = "-neg";

struct NegativizedInstance {
  std::optional<Instance> negative;  // empty when removal leaves nothing
  std::size_t removed_sentences = 0;
};

// Removes every sentence overlapping any gold span; survivors joined by one space.
inline NegativizedInstance negativize_instance(const Instance& positive) {
  const auto context = unicode::decode(positive.context);
  const auto sentences = segment_sentences(context);
  std::vector<std::pair<std::size_t, std::size_t>> gold;
  for (const auto& a : positive.answers) {
    const auto s = static_cast<std::size_t>(a.start);
    gold.emplace_back(s, s + unicode::length(a.text));
  }
  NegativizedInstance out;
  std::u32string kept;
  for (const auto& sent : sentences) {
    const bool hit = std::any_of(gold.begin(), gold.end(), [&](const auto& g) {
      return sent.start < g.second && g.first < sent.end;
    });
    if (hit) {
      ++out.removed_sentences;
      continue;
    }
    if (!kept.empty()) kept.push_back(U' ');
    kept.append(context, sent.start, sent.end - sent.start);
  }
  if (kept.empty()) return out;
  Instance neg = positive;
  neg.id += kNegativeSuffix;
  neg.context = unicode::encode(kept);
  neg.answers.clear();
  neg.origin = Origin::squad_negative;
  out.negative = std::move(neg);
  return out;
}

// Emits, per squad_positive input, the positive (when keep_positives) then its
// negative. Other instances pass through unchanged.
inline TransformResult negativize_squad(const Dataset& d, bool keep_positives) {
  TransformResult out;
  out.dataset.name = d.name + "-neg";
  out.dataset.provenance_log = d.provenance_log;
  out.dataset.no_answer_token = d.no_answer_token;
  auto& rep = out.report;
  rep.parameters = {{"keep_positives", keep_positives}};
  rep.input_count = d.instances.size();
  for (const auto& inst : d.instances) {
    if (inst.origin != Origin::squad_positive) {
      out.dataset.instances.push_back(inst);
      ++rep.passed_through;
      continue;
    }
    if (keep_positives) out.dataset.instances.push_back(inst);
    auto neg = negativize_instance(inst);
    if (neg.negative) {
      out.dataset.instances.push_back(std::move(*neg.negative));
    } else {
      ++rep.skipped;
      if (neg.removed_sentences > 1) ++rep.skipped_multi_sentence;
    }
  }
  rep.output_count = out.dataset.instances.size();
  out.dataset.provenance_log.push_back({"negativize", rep.parameters, std::nullopt, {}, {}});
  return out;
}

inline void check_token(std::string_view token) {
  if (token.empty()) throw Error("no-answer token must be non-empty");
  for (char32_t c : unicode::decode(token)) {
    if (unicode::is_space(c)) throw Error("no-answer token must not contain whitespace");
  }
}

// Prefixes token + " " and shifts spans; negatives gain the {0, token} span.
inline Instance adapt_instance(const Instance& inst, std::string_view token) {
  if (inst.context.rfind(token, 0) == 0) {
    throw Error(inst.id + ": context already starts with \"" + std::string(token) +
                "\" (dataset adapted twice?)");
  }
  const auto shift = static_cast<std::int64_t>(unicode::length(token) + 1);
  Instance out = inst;
  out.context = std::string(token) + " " + inst.context;
  for (auto& a : out.answers) a.start += shift;
  if (out.answers.empty()) out.answers.push_back({0, std::string(token)});
  return out;
}

inline TransformResult insert_no_answer_token(const Dataset& d,
                                              std::string_view token = kNoAnswerToken) {
  check_token(token);
  if (d.no_answer_token) {
    throw Error("dataset " + d.name + " is already adapted with \"" + *d.no_answer_token + "\"");
  }
  TransformResult out;
  out.dataset.name = d.name + "-noans";
  out.dataset.provenance_log = d.provenance_log;
  out.dataset.no_answer_token = std::string(token);
  out.report.parameters = {{"token", token}};
  out.report.input_count = d.instances.size();
  out.dataset.instances.reserve(d.instances.size());
  for (const auto& inst : d.instances) out.dataset.instances.push_back(adapt_instance(inst, token));
  out.report.output_count = out.dataset.instances.size();
  out.dataset.provenance_log.push_back({"adapt-noanswer", out.report.parameters, std::nullopt, {}, {}});
  return out;
}

inline Instance strip_instance(const Instance& inst, std::string_view token) {
  const std::string prefix = std::string(token) + " ";
  if (inst.context.rfind(prefix, 0) != 0) {
    throw Error(inst.id + ": context does not start with \"" + prefix + "\"");
  }
  const auto shift = static_cast<std::int64_t>(unicode::length(prefix));
  Instance out = inst;
  out.context = inst.context.substr(prefix.size());
  out.answers.clear();
  for (const auto& a : inst.answers) {
    if (a.start == 0 && a.text == token) continue;
    out.answers.push_back({a.start - shift, a.text});
  }
  return out;
}

// Inverse of insert_no_answer_token.
inline Dataset strip_no_answer_token(const Dataset& d) {
  if (!d.no_answer_token) throw Error("dataset " + d.name + " is not adapted");
  Dataset out;
  out.name = d.name;
  out.provenance_log = d.provenance_log;
  out.instances.reserve(d.instances.size());
  for (const auto& inst : d.instances) {
    out.instances.push_back(strip_instance(inst, *d.no_answer_token));
  }
  return out;
}

}  // namespace qakbp

#endif  // QAKBP_TRANSFORMS_HPP
