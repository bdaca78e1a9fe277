// qakbp: dataset transformation and scoring for QA-based slot filling.
//
// Sample usage:
//   qakbp ingest-squad --in train-v1.1.json --split train --out squad-train.jsonl
//   qakbp negativize --in squad-train.jsonl --out squad-ne.jsonl --keep-positives
//   qakbp adapt-noanswer --in squad-ne.jsonl --out squad-nf.jsonl
//   qakbp predict-baseline --in dev.jsonl --out preds.jsonl
//   qakbp score --dataset dev.jsonl --preds preds.jsonl
//   qakbp replay --log squad-nf.jsonl.prov.json
//
// Exit status: 0 success, 1 validation/replay failure, 2 usage or input error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qakbp/pipeline.hpp"

namespace {

using qakbp::Json;

struct Flags {
  std::string in, out, out_dir, templates, templates_out, pool, base, augment, spec;
  std::string dataset, preds, report, tsv_out, log, work_dir, calibrate_on, config;
  std::string split, token = std::string(qakbp::kNoAnswerToken), no_answer_token;
  std::string match = "exact", zero_policy = "zero", idf_source, base_name, augment_name;
  std::optional<std::uint64_t> seed;
  std::optional<double> threshold, adjacency_bonus;
  std::optional<std::size_t> max_span_tokens;
  std::vector<std::size_t> sizes;
  std::size_t template_index = 0;
  bool keep_positives = false;
  bool tsv = false;
};

void put(Json& args, const char* key, const std::string& v) {
  if (!v.empty()) args[key] = v;
}

Json build_args(const std::string& op, const Flags& f) {
  Json a = Json::object();
  put(a, "in", f.in);
  put(a, "out", f.out);
  put(a, "report", f.report);
  if (op == "ingest-squad" || op == "ingest-uwre") {
    put(a, "split", f.split);
    put(a, "templates_out", f.templates_out);
  } else if (op == "negativize") {
    a["keep_positives"] = f.keep_positives;
  } else if (op == "adapt-noanswer") {
    a["token"] = f.token;
  } else if (op == "build-challenge") {
    put(a, "templates", f.templates);
    a["template_index"] = f.template_index;
  } else if (op == "build-uwre-plus") {
    put(a, "pool", f.pool);
  } else if (op == "mix") {
    put(a, "base", f.base);
    put(a, "augment", f.augment);
    put(a, "out_dir", f.out_dir);
    if (!f.spec.empty()) {
      const auto spec = qakbp::mix_spec_from_json(Json::parse(qakbp::read_file(f.spec)));
      a["sizes"] = spec.sizes;
      a["seed"] = spec.seed;
      a["base_name"] = spec.base;
      a["augment_name"] = spec.augment;
    }
    if (!f.sizes.empty()) a["sizes"] = f.sizes;
    put(a, "base_name", f.base_name);
    put(a, "augment_name", f.augment_name);
  } else if (op == "predict-baseline") {
    Json cfg = f.config.empty() ? Json::object() : Json::parse(qakbp::read_file(f.config));
    if (f.threshold) cfg["no_answer_threshold"] = *f.threshold;
    if (f.max_span_tokens) cfg["max_span_tokens"] = *f.max_span_tokens;
    if (f.adjacency_bonus) cfg["adjacency_bonus"] = *f.adjacency_bonus;
    if (!f.idf_source.empty()) cfg["idf_source"] = f.idf_source;
    // Persist the effective config, defaults included.
    a["config"] = qakbp::to_json(qakbp::baseline_config_from_json(cfg));
    put(a, "calibrate_on", f.calibrate_on);
  } else if (op == "score" || op == "score-challenge") {
    put(a, "dataset", f.dataset);
    put(a, "preds", f.preds);
    put(a, "tsv_out", f.tsv_out);
    a["match"] = f.match;
    a["zero_policy"] = f.zero_policy;
    put(a, "no_answer_token", f.no_answer_token);
  } else if (op == "replay") {
    put(a, "log", f.log);
    put(a, "work_dir", f.work_dir);
  }
  if (f.seed) a["seed"] = *f.seed;
  return a;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Slot-filling dataset transformation and evaluation toolkit"};
  app.require_subcommand(1);
  Flags f;

  auto in = [&](CLI::App* c, const char* help = "Input canonical JSONL") {
    c->add_option("--in", f.in, help)->required();
  };
  auto out = [&](CLI::App* c, const char* help = "Output canonical JSONL") {
    c->add_option("--out", f.out, help)->required();
  };
  auto report = [&](CLI::App* c) { c->add_option("--report", f.report, "Write a JSON report"); };
  auto seed = [&](CLI::App* c) { c->add_option("--seed", f.seed, "RNG seed")->required(); };

  auto* ingest_squad = app.add_subcommand("ingest-squad", "SQuAD v1.1 JSON to canonical JSONL");
  in(ingest_squad, "SQuAD v1.1 JSON file");
  ingest_squad->add_option("--split", f.split, "train, dev or test")->required();
  out(ingest_squad);
  report(ingest_squad);

  auto* ingest_uwre = app.add_subcommand("ingest-uwre", "UWRE TSV to canonical JSONL");
  in(ingest_uwre, "UWRE TSV file");
  ingest_uwre->add_option("--split", f.split, "train, dev or test")->required();
  out(ingest_uwre);
  ingest_uwre->add_option("--templates-out", f.templates_out, "Write the template inventory TSV");
  report(ingest_uwre);

  auto* negativize = app.add_subcommand("negativize", "Add negatives by removing answer sentences");
  in(negativize);
  out(negativize);
  negativize->add_flag("--keep-positives", f.keep_positives, "Also emit the original positives");
  report(negativize);

  auto* adapt = app.add_subcommand("adapt-noanswer", "Prefix every context with a dummy token");
  in(adapt);
  out(adapt);
  adapt->add_option("--token", f.token, "Dummy token")->capture_default_str();
  report(adapt);

  auto* challenge = app.add_subcommand("build-challenge", "Entity-swapped challenge negatives");
  in(challenge, "UWRE positives JSONL");
  challenge->add_option("--templates", f.templates, "Template TSV")->required();
  challenge->add_option("--template-index", f.template_index, "Template to use per relation");
  seed(challenge);
  out(challenge);
  report(challenge);

  auto* plus = app.add_subcommand("build-uwre-plus", "Replace half the negatives with challenges");
  in(plus, "UWRE split JSONL");
  plus->add_option("--pool", f.pool, "Challenge negatives JSONL")->required();
  seed(plus);
  out(plus);
  report(plus);

  auto* mix = app.add_subcommand("mix", "Base plus nested samples of an augment dataset");
  mix->add_option("--base", f.base, "Base JSONL")->required();
  mix->add_option("--augment", f.augment, "Augment JSONL")->required();
  mix->add_option("--out-dir", f.out_dir, "Output directory")->required();
  mix->add_option("--spec", f.spec, "MixSpec JSON (sizes, seed, names)");
  mix->add_option("--sizes", f.sizes, "Sample sizes")->delimiter(',');
  mix->add_option("--seed", f.seed, "RNG seed (required unless given by --spec)");
  mix->add_option("--base-name", f.base_name, "Name of the base dataset");
  mix->add_option("--augment-name", f.augment_name, "Name of the augment dataset");
  report(mix);

  auto* predict = app.add_subcommand("predict-baseline", "Lexical baseline predictions");
  in(predict);
  predict->add_option("--out", f.out, "Prediction JSONL")->required();
  predict->add_option("--config", f.config, "BaselineConfig JSON");
  predict->add_option("--threshold", f.threshold, "No-answer threshold");
  predict->add_option("--max-span-tokens", f.max_span_tokens, "Longest span in tokens");
  predict->add_option("--adjacency-bonus", f.adjacency_bonus, "Adjacency bonus");
  predict->add_option("--idf", f.idf_source, "self_corpus or uniform");
  predict->add_option("--calibrate-on", f.calibrate_on, "Held-out JSONL to tune the threshold");
  report(predict);

  auto score_opts = [&](CLI::App* c) {
    c->add_option("--dataset", f.dataset, "Gold JSONL")->required();
    c->add_option("--preds", f.preds, "Prediction JSONL")->required();
    c->add_option("--out", f.out, "Write the report JSON here instead of stdout");
    c->add_option("--tsv-out", f.tsv_out, "Write a one-line TSV report");
    c->add_flag("--tsv", f.tsv, "Print the TSV line instead of JSON");
    c->add_option("--match", f.match, "exact or token_f1")->capture_default_str();
    c->add_option("--zero-policy", f.zero_policy, "Ratio for a zero denominator: zero or one")
        ->capture_default_str();
    c->add_option("--no-answer-token", f.no_answer_token,
                  "Map this predicted token to no-answer (default: dataset flag)");
  };
  auto* score = app.add_subcommand("score", "Slot-filling precision, recall and F1");
  score_opts(score);
  auto* score_challenge = app.add_subcommand("score-challenge", "Accuracy on all-negative data");
  score_opts(score_challenge);

  auto* validate = app.add_subcommand("validate", "Check dataset invariants");
  in(validate);

  auto* replay = app.add_subcommand("replay", "Re-run a provenance log and compare outputs");
  replay->add_option("--log", f.log, "Provenance JSON (a .prov.json sidecar)")->required();
  replay->add_option("--work-dir", f.work_dir, "Scratch directory (default $QAKBP_WORK_DIR)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return qakbp::kExitUsage;
  }

  const auto* sub = app.get_subcommands().front();
  const std::string op = sub->get_name();
  try {
    const auto args = build_args(op, f);
    const auto result = qakbp::run_step(op, args);
    if (op == "score" || op == "score-challenge") {
      if (f.tsv) {
        std::cout << result.tsv;
      } else if (f.out.empty()) {
        std::cout << result.report.dump(2) << '\n';
      }
    } else {
      std::cerr << result.report.dump(2) << '\n';
    }
    return result.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "qakbp " << op << ": " << e.what() << '\n';
    return qakbp::kExitUsage;
  }
}
