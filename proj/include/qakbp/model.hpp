#ifndef QAKBP_MODEL_HPP
#define QAKBP_MODEL_HPP

// Canonical data model: one Instance per (question, context) pair. A negative
// instance is one whose answer list is empty; the NoAnswerFound sentinel only
// appears in datasets that carry the adaptation flag (see transforms.hpp).

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "qakbp/unicode.hpp"

namespace qakbp {

using Json = nlohmann::ordered_json;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input; the message names the first failure site.
class ParseError : public Error {
 public:
  using Error::Error;
};

enum class Origin {
  squad_positive,
  squad_negative,
  uwre_positive,
  uwre_negative,
  challenge_negative,
  synthetic,
};

enum class Split { train, dev, test };

inline std::string_view to_string(Origin o) {
  switch (o) {
    case Origin::squad_positive: return "squad_positive";
    case Origin::squad_negative: return "squad_negative";
    case Origin::uwre_positive: return "uwre_positive";
    case Origin::uwre_negative: return "uwre_negative";
    case Origin::challenge_negative: return "challenge_negative";
    case Origin::synthetic: return "synthetic";
  }
  return "synthetic";
}

inline std::string_view to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::dev: return "dev";
    case Split::test: return "test";
  }
  return "train";
}

inline std::optional<Origin> parse_origin(std::string_view s) {
  for (auto o : {Origin::squad_positive, Origin::squad_negative, Origin::uwre_positive,
                 Origin::uwre_negative, Origin::challenge_negative, Origin::synthetic}) {
    if (to_string(o) == s) return o;
  }
  return std::nullopt;
}

inline std::optional<Split> parse_split(std::string_view s) {
  for (auto sp : {Split::train, Split::dev, Split::test}) {
    if (to_string(sp) == s) return sp;
  }
  return std::nullopt;
}

// JSON seeds: any non-negative integer, whether stored signed or unsigned.
inline bool is_seed(const Json& j) {
  return j.is_number_unsigned() || (j.is_number_integer() && j.get<std::int64_t>() >= 0);
}

inline bool is_negative_origin(Origin o) {
  return o == Origin::squad_negative || o == Origin::uwre_negative ||
         o == Origin::challenge_negative;
}

inline bool is_positive_origin(Origin o) {
  return o == Origin::squad_positive || o == Origin::uwre_positive;
}

// Answer location; start counts code points into the owning context.
struct Span {
  std::int64_t start = 0;
  std::string text;

  friend bool operator==(const Span&, const Span&) = default;
};

struct Instance {
  std::string id;
  std::string question;
  std::string context;
  std::vector<Span> answers;
  std::optional<std::string> relation;
  std::optional<std::string> subject_entity;
  Origin origin = Origin::synthetic;
  Split split = Split::train;

  friend bool operator==(const Instance&, const Instance&) = default;
};

struct FileDigest {
  std::string role;
  std::string path;
  std::uint64_t fnv1a64 = 0;

  friend bool operator==(const FileDigest&, const FileDigest&) = default;
};

struct ProvenanceEntry {
  std::string op;
  Json params = Json::object();
  std::optional<std::uint64_t> seed;
  std::vector<FileDigest> inputs;
  std::vector<FileDigest> outputs;

  friend bool operator==(const ProvenanceEntry&, const ProvenanceEntry&) = default;
};

struct Dataset {
  std::string name;
  std::vector<Instance> instances;
  std::vector<ProvenanceEntry> provenance_log;
  // Set once the NoAnswerFound adaptation has been applied.
  std::optional<std::string> no_answer_token;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct RelationQuery {
  std::string relation;
  std::string subject_entity;
};

struct QuestionTemplate {
  std::string relation;
  std::string pattern;

  friend bool operator==(const QuestionTemplate&, const QuestionTemplate&) = default;
};

struct Prediction {
  std::string instance_id;
  std::optional<std::string> answer;  // nullopt: no answer

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

inline bool is_token_span(const Span& s, const std::optional<std::string>& token) {
  return token && s.start == 0 && s.text == *token;
}

// Gold answers, ignoring the sentinel span of an adapted dataset.
inline std::vector<Span> gold_answers(const Instance& inst,
                                      const std::optional<std::string>& token) {
  std::vector<Span> out;
  for (const auto& s : inst.answers) {
    if (!is_token_span(s, token)) out.push_back(s);
  }
  return out;
}

inline bool is_negative(const Instance& inst, const std::optional<std::string>& token) {
  if (inst.answers.empty()) return true;
  return token && inst.answers.size() == 1 && is_token_span(inst.answers.front(), token);
}

struct Violation {
  std::string instance_id;
  std::string rule;
  std::string detail;

  friend bool operator==(const Violation&, const Violation&) = default;
};

inline std::optional<std::string> check_span(const Span& span,
                                             const std::u32string& context) {
  if (span.start < 0) return "start " + std::to_string(span.start) + " is negative";
  if (span.text.empty()) return std::string("empty span text");
  std::u32string text;
  try {
    text = unicode::decode(span.text);
  } catch (const Utf8Error& e) {
    return std::string("span text is not valid UTF-8: ") + e.what();
  }
  const auto start = static_cast<std::uint64_t>(span.start);
  if (start + text.size() > context.size()) {
    return "span [" + std::to_string(start) + ", " + std::to_string(start + text.size()) +
           ") exceeds context length " + std::to_string(context.size());
  }
  if (context.compare(start, text.size(), text) != 0) {
    return "context at " + std::to_string(start) + " does not match \"" + span.text + "\"";
  }
  return std::nullopt;
}

// Empty result iff every model invariant holds. Never throws on parseable data.
inline std::vector<Violation> validate_dataset(const Dataset& d) {
  std::vector<Violation> out;
  std::unordered_map<std::string, std::size_t> seen;
  const auto& token = d.no_answer_token;
  for (const auto& inst : d.instances) {
    if (inst.id.empty()) out.push_back({inst.id, "empty_id", "instance id is empty"});
    if (auto [it, fresh] = seen.emplace(inst.id, 1); !fresh) {
      if (++it->second == 2) {
        out.push_back({inst.id, "duplicate_id", "id occurs more than once"});
      }
    }
    std::u32string context;
    try {
      context = unicode::decode(inst.context);
    } catch (const Utf8Error& e) {
      out.push_back({inst.id, "invalid_utf8", e.what()});
      continue;
    }
    for (const auto& span : inst.answers) {
      if (auto err = check_span(span, context)) out.push_back({inst.id, "span_mismatch", *err});
    }
    if (token && inst.context.rfind(*token + " ", 0) != 0 && inst.context != *token) {
      out.push_back({inst.id, "missing_no_answer_prefix",
                     "adapted dataset context does not start with \"" + *token + "\""});
    }
    const bool negative = is_negative(inst, token);
    if (is_negative_origin(inst.origin) && !negative) {
      out.push_back({inst.id, "negative_with_answers",
                     std::string(to_string(inst.origin)) + " instance carries answers"});
    }
    if (is_positive_origin(inst.origin) && negative) {
      out.push_back({inst.id, "positive_without_answers",
                     std::string(to_string(inst.origin)) + " instance has no answers"});
    }
    if (token && negative && inst.answers.size() != 1) {
      out.push_back({inst.id, "adapted_negative_form",
                     "adapted negative must carry exactly the sentinel span"});
    }
  }
  return out;
}

}  // namespace qakbp

#endif  // QAKBP_MODEL_HPP
