#ifndef QAKBP_TEMPLATES_HPP
#define QAKBP_TEMPLATES_HPP

// KB query -> natural-language question, by substituting the subject entity
// for the single XXX placeholder of a relation template.

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "qakbp/model.hpp"

namespace qakbp {

inline constexpr std::string_view kPlaceholder = "XXX";

class TemplateError : public Error {
 public:
  using Error::Error;
};

inline std::size_t count_placeholders(std::string_view pattern) {
  std::size_t n = 0;
  for (auto pos = pattern.find(kPlaceholder); pos != std::string_view::npos;
       pos = pattern.find(kPlaceholder, pos + kPlaceholder.size())) {
    ++n;
  }
  return n;
}

inline void check_template(const QuestionTemplate& t) {
  if (const auto n = count_placeholders(t.pattern); n != 1) {
    throw TemplateError("template \"" + t.pattern + "\" for relation " + t.relation +
                        " has " + std::to_string(n) + " placeholders, expected exactly 1");
  }
}

// Positional substitution: the entity is inserted verbatim, even if it
// contains the placeholder text itself.
inline std::string instantiate(const QuestionTemplate& t, const RelationQuery& q) {
  if (t.relation != q.relation) {
    throw TemplateError("relation mismatch: template is for " + t.relation +
                        ", query is for " + q.relation);
  }
  check_template(t);
  const auto pos = t.pattern.find(kPlaceholder);
  std::string out;
  out.reserve(t.pattern.size() + q.subject_entity.size());
  out.append(t.pattern, 0, pos);
  out += q.subject_entity;
  out.append(t.pattern, pos + kPlaceholder.size());
  return out;
}

struct RejectedRow {
  std::size_t line = 0;
  std::string reason;
};

struct TemplateLoad {
  std::vector<QuestionTemplate> templates;
  std::vector<RejectedRow> rejected;
};

// Parses `relation<TAB>pattern` rows. Duplicate rows are dropped; a relation
// may own several templates, kept in file order.
inline TemplateLoad parse_templates(std::istream& in) {
  TemplateLoad out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      out.rejected.push_back({line_no, "expected exactly two tab-separated fields"});
      continue;
    }
    QuestionTemplate t{line.substr(0, tab), line.substr(tab + 1)};
    if (t.relation.empty()) {
      out.rejected.push_back({line_no, "empty relation"});
      continue;
    }
    if (const auto n = count_placeholders(t.pattern); n != 1) {
      out.rejected.push_back(
          {line_no, "pattern has " + std::to_string(n) + " placeholders, expected exactly 1"});
      continue;
    }
    if (std::find(out.templates.begin(), out.templates.end(), t) == out.templates.end()) {
      out.templates.push_back(std::move(t));
    }
  }
  return out;
}

inline TemplateLoad load_templates(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  return parse_templates(in);
}

inline void write_templates(const std::string& path, const std::vector<QuestionTemplate>& ts) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path + ": cannot open for writing");
  for (const auto& t : ts) out << t.relation << '\t' << t.pattern << '\n';
}

// Relation -> templates in file order. select() picks by index, default first.
class TemplateSet {
 public:
  TemplateSet() = default;
  explicit TemplateSet(const std::vector<QuestionTemplate>& ts) {
    for (const auto& t : ts) add(t);
  }

  void add(const QuestionTemplate& t) {
    check_template(t);
    auto& v = by_relation_[t.relation];
    if (std::find(v.begin(), v.end(), t) == v.end()) v.push_back(t);
  }

  bool has(const std::string& relation) const { return by_relation_.count(relation) > 0; }

  const QuestionTemplate& select(const std::string& relation, std::size_t index = 0) const {
    auto it = by_relation_.find(relation);
    if (it == by_relation_.end()) throw TemplateError("no template for relation " + relation);
    if (index >= it->second.size()) {
      throw TemplateError("relation " + relation + " has only " +
                          std::to_string(it->second.size()) + " templates");
    }
    return it->second[index];
  }

 private:
  std::map<std::string, std::vector<QuestionTemplate>> by_relation_;
};

}  // namespace qakbp

#endif  // QAKBP_TEMPLATES_HPP
