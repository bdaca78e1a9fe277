#ifndef QAKBP_MIXER_HPP
#define QAKBP_MIXER_HPP

// Seeded size sweeps: base ++ sample(augment, k) for each k. Samples are drawn
// by ranking items on a seeded hash key, so the k1-sample is always a subset
// of the k2-sample for k1 < k2 under one seed.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <unordered_set>
#include <vector>

#include "qakbp/io.hpp"
#include "qakbp/model.hpp"
#include "qakbp/random.hpp"

namespace qakbp {

struct MixSpec {
  std::string base = "base";
  std::string augment = "augment";
  std::vector<std::size_t> sizes = {1'000, 10'000, 100'000, 1'000'000};
  std::uint64_t seed = 0;
};

inline void validate(const MixSpec& spec) {
  for (std::size_t i = 0; i < spec.sizes.size(); ++i) {
    if (spec.sizes[i] == 0) throw Error("mix sizes must be positive");
    if (i > 0 && spec.sizes[i] <= spec.sizes[i - 1]) {
      throw Error("mix sizes must be strictly increasing");
    }
  }
}

inline Json to_json(const MixSpec& s) {
  return Json{{"base", s.base}, {"augment", s.augment}, {"sizes", s.sizes}, {"seed", s.seed}};
}

// Seed is required; sizes default to the 10^3..10^6 sweep.
inline MixSpec mix_spec_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("mix spec: expected an object");
  MixSpec s;
  if (auto it = j.find("base"); it != j.end()) s.base = it->get<std::string>();
  if (auto it = j.find("augment"); it != j.end()) s.augment = it->get<std::string>();
  if (auto it = j.find("sizes"); it != j.end()) s.sizes = it->get<std::vector<std::size_t>>();
  auto seed = j.find("seed");
  if (seed == j.end() || !is_seed(*seed)) {
    throw ParseError("mix spec: \"seed\" is required and must be a non-negative integer");
  }
  s.seed = seed->get<std::uint64_t>();
  validate(s);
  return s;
}

inline std::string mix_name(const MixSpec& spec, std::size_t k) {
  return spec.base + "+" + spec.augment + "@" + std::to_string(k);
}

struct SampleResult {
  Dataset dataset;
  bool truncated = false;  // n >= |d|, whole dataset returned
};

// Seeded uniform n-subset in original relative order.
inline SampleResult sample_without_replacement(const Dataset& d, std::size_t n,
                                               std::uint64_t seed) {
  SampleResult out;
  out.dataset.name = d.name;
  out.dataset.provenance_log = d.provenance_log;
  out.dataset.no_answer_token = d.no_answer_token;
  out.truncated = n >= d.instances.size();
  for (auto i : sample_indices(d.instances.size(), n, seed)) {
    out.dataset.instances.push_back(d.instances[i]);
  }
  out.dataset.provenance_log.push_back(
      {"sample", Json{{"n", n}, {"truncated", out.truncated}}, seed, {}, {}});
  return out;
}

inline std::vector<std::string> id_collisions(const Dataset& base, const Dataset& augment) {
  std::unordered_set<std::string> ids;
  for (const auto& inst : base.instances) ids.insert(inst.id);
  std::vector<std::string> out;
  for (const auto& inst : augment.instances) {
    if (ids.count(inst.id)) out.push_back(inst.id);
  }
  return out;
}

inline std::string collision_message(const std::vector<std::string>& ids) {
  std::string msg = "id collision between base and augment (" + std::to_string(ids.size()) + "):";
  for (std::size_t i = 0; i < ids.size() && i < 20; ++i) msg += " " + ids[i];
  if (ids.size() > 20) msg += " ...";
  return msg;
}

inline std::vector<Dataset> mix(const MixSpec& spec, const Dataset& base, const Dataset& augment) {
  validate(spec);
  if (auto bad = id_collisions(base, augment); !bad.empty()) throw Error(collision_message(bad));
  std::vector<Dataset> out;
  for (auto k : spec.sizes) {
    auto sample = sample_without_replacement(augment, k, spec.seed);
    Dataset d;
    d.name = mix_name(spec, k);
    d.provenance_log = base.provenance_log;
    d.instances = base.instances;
    d.instances.insert(d.instances.end(), sample.dataset.instances.begin(),
                       sample.dataset.instances.end());
    d.provenance_log.push_back({"mix",
                                Json{{"base", spec.base},
                                     {"augment", spec.augment},
                                     {"k", k},
                                     {"truncated", sample.truncated}},
                                spec.seed,
                                {},
                                {}});
    out.push_back(std::move(d));
  }
  return out;
}

struct MixFileOutput {
  std::string name;
  std::string path;
  std::size_t size = 0;  // requested k
  std::size_t count = 0;  // lines written
  bool truncated = false;
};

// Streaming variant over canonical JSONL files. Memory holds the id sets and
// one rank per augment line; instances themselves are never all resident.
inline std::vector<MixFileOutput> mix_files(const MixSpec& spec, const std::string& base_path,
                                            const std::string& augment_path,
                                            const std::string& out_dir) {
  validate(spec);
  std::unordered_set<std::string> base_ids;
  for_each_instance(base_path, [&](Instance&& inst) { base_ids.insert(std::move(inst.id)); });
  std::vector<std::string> collisions;
  std::size_t population = 0;
  for_each_instance(augment_path, [&](Instance&& inst) {
    if (base_ids.count(inst.id)) collisions.push_back(inst.id);
    ++population;
  });
  if (!collisions.empty()) throw Error(collision_message(collisions));

  // rank[i] < k  <=>  augment line i belongs to the k-sample
  std::vector<std::pair<std::uint64_t, std::size_t>> keyed(population);
  for (std::size_t i = 0; i < population; ++i) keyed[i] = {sample_key(spec.seed, i), i};
  std::sort(keyed.begin(), keyed.end());
  std::vector<std::size_t> rank(population);
  for (std::size_t r = 0; r < population; ++r) rank[keyed[r].second] = r;
  keyed.clear();
  keyed.shrink_to_fit();

  std::filesystem::create_directories(out_dir);
  std::vector<MixFileOutput> outs;
  std::vector<std::unique_ptr<LineWriter>> writers;
  for (auto k : spec.sizes) {
    MixFileOutput o;
    o.name = mix_name(spec, k);
    o.path = (std::filesystem::path(out_dir) / (o.name + ".jsonl")).string();
    o.size = k;
    o.truncated = k >= population;
    writers.push_back(std::make_unique<LineWriter>(o.path));
    outs.push_back(std::move(o));
  }
  for_each_instance(base_path, [&](Instance&& inst) {
    const auto line = serialize(inst);
    for (auto& w : writers) w->write(line);
  });
  std::size_t index = 0;
  for_each_instance(augment_path, [&](Instance&& inst) {
    const auto r = rank[index++];
    std::string line;
    for (std::size_t s = 0; s < spec.sizes.size(); ++s) {
      if (r >= spec.sizes[s]) continue;
      if (line.empty()) line = serialize(inst);
      writers[s]->write(line);
    }
  });
  for (std::size_t s = 0; s < writers.size(); ++s) {
    writers[s]->close();
    outs[s].count = writers[s]->count();
  }
  return outs;
}

}  // namespace qakbp

#endif  // QAKBP_MIXER_HPP
