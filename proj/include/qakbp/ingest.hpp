#ifndef QAKBP_INGEST_HPP
#define QAKBP_INGEST_HPP

// Parsers for the two source formats:
//   SQuAD v1.1 JSON  -> squad_positive instances
//   UWRE TSV         -> uwre_positive / uwre_negative instances
//
// UWRE rows are `relation<TAB>template<TAB>entity<TAB>sentence<TAB>answers`
// where answers is `a1|a2|...`, empty for a negative record.

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "qakbp/io.hpp"
#include "qakbp/model.hpp"
#include "qakbp/templates.hpp"

namespace qakbp {

struct IngestReport {
  std::size_t records = 0;   // questions (SQuAD) or rows (UWRE) seen
  std::size_t instances = 0;  // instances emitted
  std::size_t duplicate_answers_removed = 0;
  std::size_t ambiguous_locations = 0;  // UWRE answers found more than once
  std::vector<Violation> violations;    // one per dropped instance
};

inline Json to_json(const IngestReport& r) {
  Json j;
  j["records"] = r.records;
  j["instances"] = r.instances;
  j["dropped"] = r.violations.size();
  j["duplicate_answers_removed"] = r.duplicate_answers_removed;
  j["ambiguous_locations"] = r.ambiguous_locations;
  j["violations"] = Json::array();
  for (const auto& v : r.violations) {
    j["violations"].push_back({{"id", v.instance_id}, {"rule", v.rule}, {"detail", v.detail}});
  }
  return j;
}

struct IngestResult {
  Dataset dataset;
  IngestReport report;
};

namespace detail {

inline const Json& field(const Json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(path + ": missing field \"" + key + "\"");
  return *it;
}

inline const Json& array_field(const Json& obj, const char* key, const std::string& path) {
  const auto& v = field(obj, key, path);
  if (!v.is_array()) throw ParseError(path + "/" + key + ": expected an array");
  return v;
}

inline std::string string_field(const Json& obj, const char* key, const std::string& path) {
  const auto& v = field(obj, key, path);
  if (!v.is_string()) throw ParseError(path + "/" + key + ": expected a string");
  return v.get<std::string>();
}

inline void expect_object(const Json& v, const std::string& path) {
  if (!v.is_object()) throw ParseError(path + ": expected an object");
}

}  // namespace detail

inline IngestResult ingest_squad(const Json& doc, Split split, std::string name = "squad") {
  IngestResult out;
  out.dataset.name = std::move(name);
  detail::expect_object(doc, "");
  const auto& data = detail::array_field(doc, "data", "");
  for (std::size_t di = 0; di < data.size(); ++di) {
    const std::string dpath = "/data/" + std::to_string(di);
    detail::expect_object(data[di], dpath);
    detail::string_field(data[di], "title", dpath);
    const auto& paragraphs = detail::array_field(data[di], "paragraphs", dpath);
    for (std::size_t pi = 0; pi < paragraphs.size(); ++pi) {
      const std::string ppath = dpath + "/paragraphs/" + std::to_string(pi);
      detail::expect_object(paragraphs[pi], ppath);
      const auto context = detail::string_field(paragraphs[pi], "context", ppath);
      const auto context32 = unicode::decode(context);
      const auto& qas = detail::array_field(paragraphs[pi], "qas", ppath);
      for (std::size_t qi = 0; qi < qas.size(); ++qi) {
        const std::string qpath = ppath + "/qas/" + std::to_string(qi);
        detail::expect_object(qas[qi], qpath);
        ++out.report.records;
        Instance inst;
        inst.id = detail::string_field(qas[qi], "id", qpath);
        inst.question = detail::string_field(qas[qi], "question", qpath);
        inst.context = context;
        inst.origin = Origin::squad_positive;
        inst.split = split;
        const auto& answers = detail::array_field(qas[qi], "answers", qpath);
        std::optional<Violation> bad;
        for (std::size_t ai = 0; ai < answers.size(); ++ai) {
          const std::string apath = qpath + "/answers/" + std::to_string(ai);
          detail::expect_object(answers[ai], apath);
          Span span;
          span.text = detail::string_field(answers[ai], "text", apath);
          const auto& start = detail::field(answers[ai], "answer_start", apath);
          if (!start.is_number_integer()) {
            throw ParseError(apath + "/answer_start: expected an integer");
          }
          span.start = start.get<std::int64_t>();
          if (auto err = check_span(span, context32)) {
            if (!bad) bad = Violation{inst.id, "span_mismatch", apath + ": " + *err};
            continue;
          }
          if (std::find(inst.answers.begin(), inst.answers.end(), span) != inst.answers.end()) {
            ++out.report.duplicate_answers_removed;
            continue;
          }
          inst.answers.push_back(std::move(span));
        }
        if (!bad && inst.answers.empty()) {
          bad = Violation{inst.id, "positive_without_answers", qpath + ": no gold answers"};
        }
        if (bad) {
          out.report.violations.push_back(std::move(*bad));
          continue;
        }
        out.dataset.instances.push_back(std::move(inst));
      }
    }
  }
  out.report.instances = out.dataset.instances.size();
  return out;
}

inline IngestResult ingest_squad_file(const std::string& path, Split split) {
  Json doc;
  try {
    doc = Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  try {
    return ingest_squad(doc, split, std::filesystem::path(path).stem().string());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

struct UwreRawRecord {
  std::string relation;
  std::string template_pattern;
  std::string subject_entity;
  std::string sentence;
  std::vector<std::string> answers;
};

inline std::vector<std::string> split_fields(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t begin = 0;
  for (;;) {
    const auto pos = s.find(sep, begin);
    out.emplace_back(s.substr(begin, pos == std::string_view::npos ? s.npos : pos - begin));
    if (pos == std::string_view::npos) break;
    begin = pos + 1;
  }
  return out;
}

inline UwreRawRecord parse_uwre_record(std::string_view line, const std::string& where) {
  auto fields = split_fields(line, '\t');
  if (fields.size() != 5) {
    throw ParseError(where + ": expected 5 tab-separated fields, found " +
                     std::to_string(fields.size()));
  }
  if (!unicode::is_valid(line)) throw ParseError(where + ": invalid UTF-8");
  UwreRawRecord r{fields[0], fields[1], fields[2], fields[3], {}};
  if (!fields[4].empty()) {
    for (auto& a : split_fields(fields[4], '|')) {
      if (!a.empty()) r.answers.push_back(std::move(a));
    }
  }
  return r;
}

struct UwreResult {
  Dataset dataset;
  std::vector<QuestionTemplate> templates;  // distinct (relation, pattern), first-seen order
  IngestReport report;
};

// Consumes rows from `in`. `source` names the input in error messages.
inline UwreResult ingest_uwre(std::istream& in, Split split, const std::string& source = "uwre",
                              std::string name = "uwre") {
  UwreResult out;
  out.dataset.name = std::move(name);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++out.report.records;
    const auto rec = parse_uwre_record(line, line_site(source, line_no));

    Instance inst;
    inst.id = "uwre-" + std::string(to_string(split)) + "-" + std::to_string(line_no);
    inst.context = rec.sentence;
    inst.relation = rec.relation;
    inst.subject_entity = rec.subject_entity;
    inst.split = split;
    inst.origin = rec.answers.empty() ? Origin::uwre_negative : Origin::uwre_positive;

    const QuestionTemplate tmpl{rec.relation, rec.template_pattern};
    if (rec.relation.empty() || rec.subject_entity.empty()) {
      out.report.violations.push_back(
          {inst.id, "empty_query_field", "relation and entity must be non-empty"});
      continue;
    }
    try {
      inst.question = instantiate(tmpl, {rec.relation, rec.subject_entity});
    } catch (const TemplateError& e) {
      out.report.violations.push_back({inst.id, "bad_template", e.what()});
      continue;
    }

    bool dropped = false;
    for (const auto& answer : rec.answers) {
      const auto pos = rec.sentence.find(answer);
      if (pos == std::string::npos) {
        out.report.violations.push_back(
            {inst.id, "answer_not_found", "\"" + answer + "\" does not occur in the sentence"});
        dropped = true;
        break;
      }
      if (rec.sentence.find(answer, pos + 1) != std::string::npos) {
        ++out.report.ambiguous_locations;
      }
      Span span{static_cast<std::int64_t>(unicode::length(std::string_view(rec.sentence).substr(0, pos))),
                answer};
      if (std::find(inst.answers.begin(), inst.answers.end(), span) != inst.answers.end()) {
        ++out.report.duplicate_answers_removed;
        continue;
      }
      inst.answers.push_back(std::move(span));
    }
    if (dropped) continue;
    if (std::find(out.templates.begin(), out.templates.end(), tmpl) == out.templates.end()) {
      out.templates.push_back(tmpl);
    }
    out.dataset.instances.push_back(std::move(inst));
  }
  out.report.instances = out.dataset.instances.size();
  return out;
}

inline UwreResult ingest_uwre_file(const std::string& path, Split split) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  return ingest_uwre(in, split, path, std::filesystem::path(path).stem().string());
}

}  // namespace qakbp

#endif  // QAKBP_INGEST_HPP
