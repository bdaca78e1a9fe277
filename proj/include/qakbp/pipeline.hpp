#ifndef QAKBP_PIPELINE_HPP
#define QAKBP_PIPELINE_HPP

// File-level pipeline steps. Each step reads its inputs from paths in `args`,
// writes its outputs, and records a provenance entry (op, args, seed, input
// and output digests) in the sidecar of every dataset it writes. replay()
// re-executes a log into a scratch directory and checks byte identity.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "qakbp/baseline.hpp"
#include "qakbp/challenge.hpp"
#include "qakbp/ingest.hpp"
#include "qakbp/io.hpp"
#include "qakbp/metrics.hpp"
#include "qakbp/mixer.hpp"
#include "qakbp/model.hpp"
#include "qakbp/templates.hpp"
#include "qakbp/transforms.hpp"

namespace qakbp {

namespace fs = std::filesystem;

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitUsage = 2;

struct StepResult {
  int exit_code = kExitOk;
  Json report = Json::object();
  std::vector<FileDigest> outputs;
  std::string tsv;  // score steps: header + one data line
};

namespace detail {

inline const std::vector<std::string>& output_keys() {
  static const std::vector<std::string> keys = {"out", "out_dir", "templates_out", "report",
                                                "tsv_out"};
  return keys;
}

inline std::string arg_string(const Json& args, const char* key) {
  auto it = args.find(key);
  if (it == args.end() || !it->is_string() || it->get<std::string>().empty()) {
    throw ParseError(std::string("missing required argument --") + key);
  }
  return it->get<std::string>();
}

inline std::optional<std::string> arg_opt_string(const Json& args, const char* key) {
  auto it = args.find(key);
  if (it == args.end() || it->is_null()) return std::nullopt;
  return it->get<std::string>();
}

inline std::uint64_t arg_seed(const Json& args) {
  auto it = args.find("seed");
  if (it == args.end() || !is_seed(*it)) {
    throw ParseError("missing required argument --seed");
  }
  return it->get<std::uint64_t>();
}

inline Split arg_split(const Json& args) {
  const auto s = arg_string(args, "split");
  auto split = parse_split(s);
  if (!split) throw ParseError("--split must be train, dev or test, got \"" + s + "\"");
  return *split;
}

inline void append_unique(std::vector<ProvenanceEntry>& log,
                          const std::vector<ProvenanceEntry>& more) {
  for (const auto& e : more) {
    if (std::find(log.begin(), log.end(), e) == log.end()) log.push_back(e);
  }
}

class StepRecorder {
 public:
  StepRecorder(std::string op, const Json& args) {
    entry_.op = std::move(op);
    entry_.params = args;
    if (auto it = args.find("seed"); it != args.end() && is_seed(*it)) {
      entry_.seed = it->get<std::uint64_t>();
    }
  }

  // Registers an input file; data inputs also contribute their provenance log.
  void input(const std::string& role, const std::string& path, bool dataset) {
    entry_.inputs.push_back({role, path, file_digest(path)});
    if (dataset) {
      auto side = read_sidecar(path);
      append_unique(log_, side.provenance_log);
    }
  }

  void output(const std::string& role, const std::string& path) {
    entry_.outputs.push_back({role, path, file_digest(path)});
  }

  std::vector<ProvenanceEntry> log() const {
    auto log = log_;
    log.push_back(entry_);
    return log;
  }

  void write_sidecars(const std::vector<std::string>& paths,
                      const std::optional<std::string>& token) const {
    const auto full = log();
    for (const auto& p : paths) {
      write_sidecar(p, {fs::path(p).stem().string(), token, full});
    }
  }

  const std::vector<FileDigest>& outputs() const { return entry_.outputs; }

 private:
  ProvenanceEntry entry_;
  std::vector<ProvenanceEntry> log_;
};

inline void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path + ": cannot open for writing");
  out << j.dump(2) << '\n';
}

inline void maybe_report(const Json& args, StepRecorder& rec, const Json& report) {
  if (auto path = arg_opt_string(args, "report")) {
    write_json_file(*path, report);
    rec.output("report", *path);
  }
}

inline std::string split_of(const std::string& path) {
  std::string split = "train";
  bool first = true;
  for_each_instance(path, [&](Instance&& inst) {
    if (first) split = std::string(to_string(inst.split));
    first = false;
  });
  return split;
}

}  // namespace detail

inline StepResult run_ingest_squad(const Json& args) {
  const auto in = detail::arg_string(args, "in");
  const auto out = detail::arg_string(args, "out");
  detail::StepRecorder rec("ingest-squad", args);
  rec.input("in", in, false);
  auto res = ingest_squad_file(in, detail::arg_split(args));
  LineWriter w(out);
  for (const auto& inst : res.dataset.instances) w.write(inst);
  w.close();
  rec.output("out", out);
  StepResult r;
  r.report = to_json(res.report);
  detail::maybe_report(args, rec, r.report);
  rec.write_sidecars({out}, std::nullopt);
  r.outputs = rec.outputs();
  return r;
}

inline StepResult run_ingest_uwre(const Json& args) {
  const auto in = detail::arg_string(args, "in");
  const auto out = detail::arg_string(args, "out");
  detail::StepRecorder rec("ingest-uwre", args);
  rec.input("in", in, false);
  auto res = ingest_uwre_file(in, detail::arg_split(args));
  LineWriter w(out);
  for (const auto& inst : res.dataset.instances) w.write(inst);
  w.close();
  rec.output("out", out);
  if (auto tout = detail::arg_opt_string(args, "templates_out")) {
    write_templates(*tout, res.templates);
    rec.output("templates_out", *tout);
  }
  StepResult r;
  r.report = to_json(res.report);
  r.report["templates"] = res.templates.size();
  detail::maybe_report(args, rec, r.report);
  rec.write_sidecars({out}, std::nullopt);
  r.outputs = rec.outputs();
  return r;
}

inline StepResult run_negativize(const Json& args) {
  const auto in = detail::arg_string(args, "in");
  const auto out = detail::arg_string(args, "out");
  const bool keep = args.value("keep_positives", false);
  detail::StepRecorder rec("negativize", args);
  rec.input("in", in, true);
  const auto side = read_sidecar(in);

  TransformReport rep;
  rep.parameters = {{"keep_positives", keep}};
  LineWriter w(out);
  for_each_instance(in, [&](Instance&& inst) {
    ++rep.input_count;
    if (inst.origin != Origin::squad_positive) {
      w.write(inst);
      ++rep.passed_through;
      return;
    }
    if (keep) w.write(inst);
    auto neg = negativize_instance(inst);
    if (neg.negative) {
      w.write(*neg.negative);
    } else {
      ++rep.skipped;
      if (neg.removed_sentences > 1) ++rep.skipped_multi_sentence;
    }
  });
  w.close();
  rep.output_count = w.count();
  rec.output("out", out);
  StepResult r;
  r.report = to_json(rep);
  detail::maybe_report(args, rec, r.report);
  rec.write_sidecars({out}, side.no_answer_token);
  r.outputs = rec.outputs();
  return r;
}

inline StepResult run_adapt_noanswer(const Json& args) {
  const auto in = detail::arg_string(args, "in");
  const auto out = detail::arg_string(args, "out");
  const auto token = args.value("token", std::string(kNoAnswerToken));
  check_token(token);
  detail::StepRecorder rec("adapt-noanswer", args);
  rec.input("in", in, true);
  const auto side = read_sidecar(in);
  if (side.no_answer_token) {
    throw Error(in + ": dataset is already adapted with \"" + *side.no_answer_token + "\"");
  }
  TransformReport rep;
  rep.parameters = {{"token", token}};
  LineWriter w(out);
  for_each_instance(in, [&](Instance&& inst) {
    ++rep.input_count;
    w.write(adapt_instance(inst, token));
  });
  w.close();
  rep.output_count = w.count();
  rec.output("out", out);
  StepResult r;
  r.report = to_json(rep);
  detail::maybe_report(args, rec, r.report);
  rec.write_sidecars({out}, token);
  r.outputs = rec.outputs();
  return r;
}

inline StepResult run_build_challenge(const Json& args) {
  const auto in = detail::arg_string(args, "in");
  const auto tpath = detail::arg_string(args, "templates");
  const auto out = detail::arg_string(args, "out");
  const auto seed = detail::arg_seed(args);
  const auto index = args.value("template_index", std::size_t{0});
  detail::StepRecorder rec("build-challenge", args);
  rec.input("in", in, true);
  rec.input("templates", tpath, false);
  const auto load = load_templates(tpath);
  if (!load.rejected.empty()) {
    throw ParseError(tpath + ":" + std::to_string(load.rejected.front().line) + ": " +
                     load.rejected.front().reason);
  }
  auto res = build_challenge_set(read_dataset(in), TemplateSet(load.templates), seed, index);
  LineWriter w(out);
  for (const auto& inst : res.dataset.instances) w.write(inst);
  w.close();
  rec.output("out", out);
  StepResult r;
  r.report = to_json(res.report);
  detail::maybe_report(args, rec, r.report);
  rec.write_sidecars({out}, std::nullopt);
  r.outputs = rec.outputs();
  return r;
}

inline StepResult run_build_uwre_plus(const Json& args) {
  const auto in = detail::arg_string(args, "in");
  const auto pool = detail::arg_string(args, "pool");
  const auto out = detail::arg_string(args, "out");
  const auto master = detail::arg_seed(args);
  detail::StepRecorder rec("build-uwre-plus", args);
  rec.input("in", in, true);
  rec.input("pool", pool, true);
  const auto split_name = detail::split_of(in);
  auto res = build_uwre_plus(read_dataset(in), read_dataset(pool), derive_seed(master, split_name));
  LineWriter w(out);
  for (const auto& inst : res.dataset.instances) w.write(inst);
  w.close();
  rec.output("out", out);
  StepResult r;
  r.report = to_json(res.report);
  r.report["master_seed"] = master;
  r.report["split"] = split_name;
  detail::maybe_report(args, rec, r.report);
  rec.write_sidecars({out}, std::nullopt);
  r.outputs = rec.outputs();
  return r;
}

inline StepResult run_mix(const Json& args) {
  const auto base = detail::arg_string(args, "base");
  const auto augment = detail::arg_string(args, "augment");
  const auto out_dir = detail::arg_string(args, "out_dir");
  MixSpec spec;
  spec.seed = detail::arg_seed(args);
  if (auto it = args.find("sizes"); it != args.end()) {
    spec.sizes = it->get<std::vector<std::size_t>>();
  }
  spec.base = args.value("base_name", read_sidecar(base).name);
  spec.augment = args.value("augment_name", read_sidecar(augment).name);
  validate(spec);
  detail::StepRecorder rec("mix", args);
  rec.input("base", base, true);
  rec.input("augment", augment, true);
  const auto base_token = read_sidecar(base).no_answer_token;
  if (base_token != read_sidecar(augment).no_answer_token) {
    throw Error("base and augment disagree on the no-answer adaptation");
  }
  const auto outs = mix_files(spec, base, augment, out_dir);
  StepResult r;
  r.report["spec"] = to_json(spec);
  r.report["outputs"] = Json::array();
  std::vector<std::string> paths;
  for (const auto& o : outs) {
    rec.output("k=" + std::to_string(o.size), o.path);
    paths.push_back(o.path);
    r.report["outputs"].push_back(
        {{"name", o.name}, {"k", o.size}, {"count", o.count}, {"truncated", o.truncated}});
  }
  detail::maybe_report(args, rec, r.report);
  rec.write_sidecars(paths, base_token);
  r.outputs = rec.outputs();
  return r;
}

inline StepResult run_predict_baseline(const Json& args) {
  const auto in = detail::arg_string(args, "in");
  const auto out = detail::arg_string(args, "out");
  auto cfg = baseline_config_from_json(args.value("config", Json::object()));
  detail::StepRecorder rec("predict-baseline", args);
  rec.input("in", in, true);
  const auto d = read_dataset(in);
  const auto idf = make_idf(d, cfg);
  if (auto cal = detail::arg_opt_string(args, "calibrate_on")) {
    rec.input("calibrate_on", *cal, true);
    const auto held = read_dataset(*cal);
    cfg.no_answer_threshold = calibrate_threshold(held, cfg, make_idf(held, cfg));
  }
  write_predictions(out, predict_dataset(d, cfg, idf));
  rec.output("out", out);
  StepResult r;
  r.report["config"] = to_json(cfg);
  r.report["predictions"] = d.instances.size();
  detail::maybe_report(args, rec, r.report);
  rec.write_sidecars({out}, d.no_answer_token);
  r.outputs = rec.outputs();
  return r;
}

inline ScoreOptions score_options(const Json& args) {
  ScoreOptions o;
  const auto match = args.value("match", std::string("exact"));
  if (match == "token_f1") {
    o.match = MatchMode::token_f1;
  } else if (match != "exact") {
    throw ParseError("--match must be exact or token_f1");
  }
  const auto zp = args.value("zero_policy", std::string("zero"));
  if (zp == "one") {
    o.zero_policy = ZeroPolicy::one;
  } else if (zp != "zero") {
    throw ParseError("--zero-policy must be zero or one");
  }
  o.no_answer_token = detail::arg_opt_string(args, "no_answer_token");
  return o;
}

inline StepResult run_score(const Json& args, bool challenge) {
  const auto dpath = detail::arg_string(args, "dataset");
  const auto ppath = detail::arg_string(args, "preds");
  detail::StepRecorder rec(challenge ? "score-challenge" : "score", args);
  rec.input("dataset", dpath, true);
  rec.input("preds", ppath, true);
  const auto d = read_dataset(dpath);
  const auto preds = read_predictions(ppath);
  const auto opts = score_options(args);
  const auto rep = challenge ? score_challenge_accuracy(d, preds, opts)
                             : score_slot_filling(d, preds, opts);
  StepResult r;
  r.report = to_json(rep);
  r.tsv = tsv_header() + "\n" + to_tsv(rep) + "\n";
  std::vector<std::string> sidecars;
  if (auto out = detail::arg_opt_string(args, "out")) {
    detail::write_json_file(*out, r.report);
    rec.output("out", *out);
    sidecars.push_back(*out);
  }
  if (auto tsv = detail::arg_opt_string(args, "tsv_out")) {
    std::ofstream f(*tsv, std::ios::binary);
    f << r.tsv;
    f.close();
    rec.output("tsv_out", *tsv);
    sidecars.push_back(*tsv);
  }
  rec.write_sidecars(sidecars, d.no_answer_token);
  r.outputs = rec.outputs();
  return r;
}

inline StepResult run_validate(const Json& args) {
  const auto in = detail::arg_string(args, "in");
  const auto d = read_dataset(in);
  const auto violations = validate_dataset(d);
  StepResult r;
  r.report["instances"] = d.instances.size();
  r.report["violations"] = Json::array();
  for (const auto& v : violations) {
    r.report["violations"].push_back(
        {{"id", v.instance_id}, {"rule", v.rule}, {"detail", v.detail}});
  }
  r.exit_code = violations.empty() ? kExitOk : kExitInvalid;
  return r;
}

inline StepResult run_step(const std::string& op, const Json& args);

// Re-executes every logged step with outputs redirected under work_dir and
// compares digests. Inputs whose digest changed since logging fail the replay.
inline StepResult replay(const std::vector<ProvenanceEntry>& log, const fs::path& work_dir) {
  StepResult r;
  r.report["steps"] = Json::array();
  fs::remove_all(work_dir);
  fs::create_directories(work_dir);
  bool ok = true;
  for (std::size_t i = 0; i < log.size(); ++i) {
    const auto& e = log[i];
    Json step{{"index", i}, {"op", e.op}, {"mismatches", Json::array()}};
    for (const auto& f : e.inputs) {
      if (!fs::exists(f.path) || file_digest(f.path) != f.fnv1a64) {
        step["mismatches"].push_back("input " + f.role + " (" + f.path + ") changed");
      }
    }
    if (step["mismatches"].empty()) {
      Json args = e.params;
      const fs::path dir = work_dir / ("step" + std::to_string(i));
      fs::create_directories(dir);
      for (const auto& key : detail::output_keys()) {
        auto it = args.find(key);
        if (it == args.end() || !it->is_string()) continue;
        if (key == "out_dir") {
          *it = (dir / "out_dir").string();
        } else {
          *it = (dir / (key + "-" + fs::path(it->get<std::string>()).filename().string())).string();
        }
      }
      const auto again = run_step(e.op, args);
      for (const auto& f : e.outputs) {
        auto match = std::find_if(again.outputs.begin(), again.outputs.end(),
                                  [&](const FileDigest& g) { return g.role == f.role; });
        if (match == again.outputs.end()) {
          step["mismatches"].push_back("output " + f.role + " not reproduced");
        } else if (match->fnv1a64 != f.fnv1a64) {
          step["mismatches"].push_back("output " + f.role + " (" + f.path + ") differs");
        }
      }
    }
    ok = ok && step["mismatches"].empty();
    r.report["steps"].push_back(std::move(step));
  }
  r.report["ok"] = ok;
  r.exit_code = ok ? kExitOk : kExitInvalid;
  return r;
}

inline fs::path default_work_dir() {
  if (const char* env = std::getenv("QAKBP_WORK_DIR"); env && *env) return fs::path(env) / "replay";
  return fs::temp_directory_path() / "qakbp-replay";
}

inline StepResult run_replay(const Json& args) {
  const auto log = read_provenance(detail::arg_string(args, "log")).provenance_log;
  const auto dir = detail::arg_opt_string(args, "work_dir");
  return replay(log, dir ? fs::path(*dir) : default_work_dir());
}

inline StepResult run_step(const std::string& op, const Json& args) {
  if (op == "ingest-squad") return run_ingest_squad(args);
  if (op == "ingest-uwre") return run_ingest_uwre(args);
  if (op == "negativize") return run_negativize(args);
  if (op == "adapt-noanswer") return run_adapt_noanswer(args);
  if (op == "build-challenge") return run_build_challenge(args);
  if (op == "build-uwre-plus") return run_build_uwre_plus(args);
  if (op == "mix") return run_mix(args);
  if (op == "predict-baseline") return run_predict_baseline(args);
  if (op == "score") return run_score(args, false);
  if (op == "score-challenge") return run_score(args, true);
  if (op == "validate") return run_validate(args);
  if (op == "replay") return run_replay(args);
  throw ParseError("unknown operation \"" + op + "\"");
}

}  // namespace qakbp

#endif  // QAKBP_PIPELINE_HPP
