#ifndef QAKBP_IO_HPP
#define QAKBP_IO_HPP

// Canonical JSONL serialization, streaming readers/writers, the provenance
// sidecar (<file>.prov.json) and prediction files.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qakbp/model.hpp"
#include "qakbp/random.hpp"

namespace qakbp {

inline Json to_json(const Instance& inst) {
  Json answers = Json::array();
  for (const auto& a : inst.answers) {
    Json span;
    span["start"] = a.start;
    span["text"] = a.text;
    answers.push_back(std::move(span));
  }
  Json j;
  j["id"] = inst.id;
  j["question"] = inst.question;
  j["context"] = inst.context;
  j["answers"] = std::move(answers);
  j["relation"] = inst.relation ? Json(*inst.relation) : Json(nullptr);
  j["subject_entity"] = inst.subject_entity ? Json(*inst.subject_entity) : Json(nullptr);
  j["origin"] = std::string(to_string(inst.origin));
  j["split"] = std::string(to_string(inst.split));
  return j;
}

inline std::string dump_line(const Json& j) {
  return j.dump(-1, ' ', false, Json::error_handler_t::strict);
}

inline std::string serialize(const Instance& inst) { return dump_line(to_json(inst)); }

namespace detail {

inline const Json& require(const Json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(where + ": missing field \"" + key + "\"");
  return *it;
}

inline std::string require_string(const Json& j, const char* key, const std::string& where) {
  const auto& v = require(j, key, where);
  if (!v.is_string()) throw ParseError(where + ": field \"" + key + "\" must be a string");
  return v.get<std::string>();
}

inline std::optional<std::string> nullable_string(const Json& j, const char* key,
                                                  const std::string& where) {
  const auto& v = require(j, key, where);
  if (v.is_null()) return std::nullopt;
  if (!v.is_string()) {
    throw ParseError(where + ": field \"" + key + "\" must be a string or null");
  }
  return v.get<std::string>();
}

}  // namespace detail

inline Instance instance_from_json(const Json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": expected a JSON object");
  Instance inst;
  inst.id = detail::require_string(j, "id", where);
  inst.question = detail::require_string(j, "question", where);
  inst.context = detail::require_string(j, "context", where);
  const auto& answers = detail::require(j, "answers", where);
  if (!answers.is_array()) throw ParseError(where + ": field \"answers\" must be an array");
  for (std::size_t i = 0; i < answers.size(); ++i) {
    const std::string at = where + ": answers[" + std::to_string(i) + "]";
    const auto& a = answers[i];
    if (!a.is_object()) throw ParseError(at + " must be an object");
    const auto& start = detail::require(a, "start", at);
    if (!start.is_number_integer()) throw ParseError(at + ".start must be an integer");
    inst.answers.push_back({start.get<std::int64_t>(), detail::require_string(a, "text", at)});
  }
  inst.relation = detail::nullable_string(j, "relation", where);
  inst.subject_entity = detail::nullable_string(j, "subject_entity", where);
  const auto origin = detail::require_string(j, "origin", where);
  auto o = parse_origin(origin);
  if (!o) throw ParseError(where + ": unknown origin \"" + origin + "\"");
  inst.origin = *o;
  const auto split = detail::require_string(j, "split", where);
  auto s = parse_split(split);
  if (!s) throw ParseError(where + ": unknown split \"" + split + "\"");
  inst.split = *s;
  return inst;
}

inline Instance parse_instance(std::string_view line, const std::string& where) {
  Json j;
  try {
    j = Json::parse(line);
  } catch (const Json::parse_error& e) {
    throw ParseError(where + ": " + e.what());
  }
  return instance_from_json(j, where);
}

inline std::string line_site(const std::string& path, std::size_t line_no) {
  return path + ":" + std::to_string(line_no);
}

// Calls fn(line, line_no) for every non-empty line of a file.
inline void for_each_line(const std::string& path,
                          const std::function<void(std::string_view, std::size_t)>& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    fn(line, line_no);
  }
}

inline void for_each_instance(const std::string& path,
                              const std::function<void(Instance&&)>& fn) {
  for_each_line(path, [&](std::string_view line, std::size_t n) {
    fn(parse_instance(line, line_site(path, n)));
  });
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::uint64_t file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  std::uint64_t h = 0xCBF29CE484222325ULL;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    h = fnv1a64(std::string_view(buf, static_cast<std::size_t>(in.gcount())), h);
  }
  return h;
}

class LineWriter {
 public:
  explicit LineWriter(const std::string& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw ParseError(path + ": cannot open for writing");
  }

  void write(std::string_view line) {
    out_ << line << '\n';
    ++count_;
  }
  void write(const Instance& inst) { write(serialize(inst)); }

  void close() {
    out_.close();
    if (!out_) throw Error(path_ + ": write failed");
  }

  std::size_t count() const { return count_; }

 private:
  std::string path_;
  std::ofstream out_;
  std::size_t count_ = 0;
};

// ---- provenance sidecar ----

inline std::string sidecar_path(const std::string& path) { return path + ".prov.json"; }

inline std::string hex64(std::uint64_t v) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = kDigits[v & 0xF];
  return s;
}

inline std::uint64_t parse_hex64(const std::string& s) {
  std::size_t used = 0;
  const auto v = std::stoull(s, &used, 16);
  if (used != s.size()) throw ParseError("bad digest \"" + s + "\"");
  return v;
}

inline Json to_json(const FileDigest& f) {
  Json j;
  j["role"] = f.role;
  j["path"] = f.path;
  j["fnv1a64"] = hex64(f.fnv1a64);
  return j;
}

inline Json to_json(const ProvenanceEntry& e) {
  Json j;
  j["op"] = e.op;
  j["params"] = e.params;
  j["seed"] = e.seed ? Json(*e.seed) : Json(nullptr);
  j["inputs"] = Json::array();
  for (const auto& f : e.inputs) j["inputs"].push_back(to_json(f));
  j["outputs"] = Json::array();
  for (const auto& f : e.outputs) j["outputs"].push_back(to_json(f));
  return j;
}

inline ProvenanceEntry provenance_from_json(const Json& j) {
  const std::string where = "provenance entry";
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  ProvenanceEntry e;
  e.op = detail::require_string(j, "op", where);
  if (auto it = j.find("params"); it != j.end()) e.params = *it;
  if (auto it = j.find("seed"); it != j.end() && !it->is_null()) {
    e.seed = it->get<std::uint64_t>();
  }
  auto files = [&](const char* key, std::vector<FileDigest>& dst) {
    auto it = j.find(key);
    if (it == j.end()) return;
    for (const auto& f : *it) {
      dst.push_back({detail::require_string(f, "role", where),
                     detail::require_string(f, "path", where),
                     parse_hex64(detail::require_string(f, "fnv1a64", where))});
    }
  };
  files("inputs", e.inputs);
  files("outputs", e.outputs);
  return e;
}

struct Sidecar {
  std::string name;
  std::optional<std::string> no_answer_token;
  std::vector<ProvenanceEntry> provenance_log;
};

inline Json to_json(const Sidecar& s) {
  Json j;
  j["name"] = s.name;
  j["no_answer_token"] = s.no_answer_token ? Json(*s.no_answer_token) : Json(nullptr);
  j["provenance_log"] = Json::array();
  for (const auto& e : s.provenance_log) j["provenance_log"].push_back(to_json(e));
  return j;
}

inline Sidecar sidecar_from_json(const Json& j) {
  Sidecar s;
  if (j.is_array()) {
    for (const auto& e : j) s.provenance_log.push_back(provenance_from_json(e));
    return s;
  }
  if (!j.is_object()) throw ParseError("provenance file: expected an object or array");
  if (auto it = j.find("name"); it != j.end() && it->is_string()) s.name = *it;
  if (auto it = j.find("no_answer_token"); it != j.end() && it->is_string()) {
    s.no_answer_token = it->get<std::string>();
  }
  if (auto it = j.find("provenance_log"); it != j.end()) {
    for (const auto& e : *it) s.provenance_log.push_back(provenance_from_json(e));
  }
  return s;
}

inline void write_sidecar(const std::string& data_path, const Sidecar& s) {
  std::ofstream out(sidecar_path(data_path), std::ios::binary);
  if (!out) throw ParseError(sidecar_path(data_path) + ": cannot open for writing");
  out << to_json(s).dump(2) << '\n';
}

inline Sidecar read_provenance(const std::string& path) {
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  return sidecar_from_json(j);
}

// Sidecar of a data file; defaults (name = file stem) when absent.
inline Sidecar read_sidecar(const std::string& data_path) {
  Sidecar s;
  if (std::filesystem::exists(sidecar_path(data_path))) {
    s = read_provenance(sidecar_path(data_path));
  }
  if (s.name.empty()) s.name = std::filesystem::path(data_path).stem().string();
  return s;
}

// ---- whole datasets ----

inline Dataset read_dataset(const std::string& path) {
  auto side = read_sidecar(path);
  Dataset d;
  d.name = side.name;
  d.no_answer_token = side.no_answer_token;
  d.provenance_log = std::move(side.provenance_log);
  for_each_instance(path, [&](Instance&& inst) { d.instances.push_back(std::move(inst)); });
  return d;
}

inline std::string serialize(const Dataset& d) {
  std::string out;
  for (const auto& inst : d.instances) {
    out += serialize(inst);
    out += '\n';
  }
  return out;
}

inline void write_dataset(const std::string& path, const Dataset& d) {
  LineWriter w(path);
  for (const auto& inst : d.instances) w.write(inst);
  w.close();
  write_sidecar(path, {d.name, d.no_answer_token, d.provenance_log});
}

// ---- predictions ----

inline Json to_json(const Prediction& p) {
  Json j;
  j["id"] = p.instance_id;
  j["answer"] = p.answer ? Json(*p.answer) : Json(nullptr);
  return j;
}

inline Prediction parse_prediction(std::string_view line, const std::string& where) {
  Json j;
  try {
    j = Json::parse(line);
  } catch (const Json::parse_error& e) {
    throw ParseError(where + ": " + e.what());
  }
  if (!j.is_object()) throw ParseError(where + ": expected a JSON object");
  return {detail::require_string(j, "id", where), detail::nullable_string(j, "answer", where)};
}

inline std::vector<Prediction> read_predictions(const std::string& path) {
  std::vector<Prediction> out;
  for_each_line(path, [&](std::string_view line, std::size_t n) {
    out.push_back(parse_prediction(line, line_site(path, n)));
  });
  return out;
}

inline void write_predictions(const std::string& path, const std::vector<Prediction>& preds) {
  LineWriter w(path);
  for (const auto& p : preds) w.write(dump_line(to_json(p)));
  w.close();
}

}  // namespace qakbp

#endif  // QAKBP_IO_HPP
