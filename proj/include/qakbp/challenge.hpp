#ifndef QAKBP_CHALLENGE_HPP
#define QAKBP_CHALLENGE_HPP

// Challenge negatives: a positive sentence paired with the same relation's
// question about a different entity. The sentence still holds a type-valid
// answer, but not for the entity asked about.
//
// UWRE+: half of a split's original negatives replaced by challenge negatives.

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_set>
#include <vector>

#include "qakbp/model.hpp"
#include "qakbp/random.hpp"
#include "qakbp/templates.hpp"
#include "qakbp/unicode.hpp"

namespace qakbp {

inline constexpr std::string_view kChallengeSuffix = "-chal";

struct ChallengeReport {
  std::size_t positives = 0;
  std::size_t emitted = 0;
  std::size_t skipped_no_donor = 0;
  std::size_t skipped_no_template = 0;
  std::uint64_t seed = 0;
};

inline Json to_json(const ChallengeReport& r) {
  return Json{{"positives", r.positives},
              {"emitted", r.emitted},
              {"skipped_no_donor", r.skipped_no_donor},
              {"skipped_no_template", r.skipped_no_template},
              {"seed", r.seed}};
}

struct ChallengeResult {
  Dataset dataset;
  ChallengeReport report;
};

struct DonorEntity {
  std::string surface;
  std::u32string folded;
};

// Distinct (case-insensitive) entities per relation, in first-seen order.
inline std::map<std::string, std::vector<DonorEntity>> collect_entities(const Dataset& d) {
  std::map<std::string, std::vector<DonorEntity>> out;
  for (const auto& inst : d.instances) {
    if (inst.origin != Origin::uwre_positive || !inst.relation || !inst.subject_entity) continue;
    auto folded = unicode::to_lower(unicode::decode(*inst.subject_entity));
    auto& v = out[*inst.relation];
    const bool seen = std::any_of(v.begin(), v.end(),
                                  [&](const DonorEntity& e) { return e.folded == folded; });
    if (!seen) v.push_back({*inst.subject_entity, std::move(folded)});
  }
  return out;
}

// Donors eligible for one positive: same relation, a different entity, and
// absent from the sentence case-insensitively.
inline std::vector<const DonorEntity*> eligible_donors(
    const std::vector<DonorEntity>& entities, const Instance& positive) {
  const auto own = unicode::to_lower(unicode::decode(*positive.subject_entity));
  const auto sentence = unicode::to_lower(unicode::decode(positive.context));
  std::vector<const DonorEntity*> out;
  for (const auto& e : entities) {
    if (e.folded == own || sentence.find(e.folded) != std::u32string::npos) continue;
    out.push_back(&e);
  }
  return out;
}

// One seeded RNG stream consumed in input order, one draw per positive that
// has at least one eligible donor.
inline ChallengeResult build_challenge_set(const Dataset& positives, const TemplateSet& templates,
                                           std::uint64_t seed, std::size_t template_index = 0) {
  ChallengeResult out;
  out.dataset.name = positives.name + "-challenge";
  out.dataset.provenance_log = positives.provenance_log;
  out.report.seed = seed;
  const auto entities = collect_entities(positives);
  std::unordered_set<std::string> ids;
  for (const auto& inst : positives.instances) ids.insert(inst.id);

  Rng rng(seed);
  for (const auto& inst : positives.instances) {
    if (inst.origin != Origin::uwre_positive || !inst.relation || !inst.subject_entity) continue;
    ++out.report.positives;
    const auto& relation = *inst.relation;
    const auto donors = eligible_donors(entities.at(relation), inst);
    if (donors.empty()) {
      ++out.report.skipped_no_donor;
      continue;
    }
    const auto* donor = donors[rng.below(donors.size())];
    if (!templates.has(relation)) {
      ++out.report.skipped_no_template;
      continue;
    }
    Instance neg;
    neg.id = inst.id + std::string(kChallengeSuffix);
    if (ids.count(neg.id)) throw Error("challenge id " + neg.id + " collides with an input id");
    neg.question = instantiate(templates.select(relation, template_index), {relation, donor->surface});
    neg.context = inst.context;
    neg.relation = relation;
    neg.subject_entity = donor->surface;
    neg.origin = Origin::challenge_negative;
    neg.split = inst.split;
    out.dataset.instances.push_back(std::move(neg));
  }
  out.report.emitted = out.dataset.instances.size();
  out.dataset.provenance_log.push_back(
      {"build-challenge", Json{{"template_index", template_index}}, seed, {}, {}});
  return out;
}

struct UwrePlusReport {
  std::size_t negatives_in = 0;
  std::size_t removed = 0;
  std::size_t inserted = 0;
  std::size_t shortfall = 0;
  std::uint64_t seed = 0;
};

inline Json to_json(const UwrePlusReport& r) {
  return Json{{"negatives_in", r.negatives_in}, {"removed", r.removed},
              {"inserted", r.inserted},         {"shortfall", r.shortfall},
              {"seed", r.seed}};
}

struct UwrePlusResult {
  Dataset dataset;
  UwrePlusReport report;
};

// Removes a seeded sample of floor(N/2) uwre_negative instances and puts a
// seeded sample of min(floor(N/2), |pool|) challenge negatives in their slots.
inline UwrePlusResult build_uwre_plus(const Dataset& split, const Dataset& pool,
                                      std::uint64_t seed) {
  std::vector<std::size_t> negatives;
  for (std::size_t i = 0; i < split.instances.size(); ++i) {
    if (split.instances[i].origin == Origin::uwre_negative) negatives.push_back(i);
  }
  if (negatives.empty()) throw Error("split " + split.name + " has no uwre_negative instances");
  if (pool.instances.empty()) throw Error("challenge pool " + pool.name + " is empty");
  for (const auto& inst : pool.instances) {
    if (inst.origin != Origin::challenge_negative) {
      throw Error("challenge pool instance " + inst.id + " is not a challenge_negative");
    }
  }

  UwrePlusResult out;
  auto& rep = out.report;
  rep.seed = seed;
  rep.negatives_in = negatives.size();
  const std::size_t half = negatives.size() / 2;
  const auto removed = sample_indices(negatives.size(), half, derive_seed(seed, "remove"));
  const auto inserted = sample_indices(pool.instances.size(), std::min(half, pool.instances.size()),
                                       derive_seed(seed, "insert"));
  rep.removed = removed.size();
  rep.inserted = inserted.size();
  rep.shortfall = half - inserted.size();

  std::unordered_set<std::string> ids;
  for (const auto& inst : split.instances) ids.insert(inst.id);

  std::vector<char> drop(split.instances.size(), 0);
  for (auto k : removed) drop[negatives[k]] = 1;

  out.dataset.name = split.name + "-plus";
  out.dataset.provenance_log = split.provenance_log;
  std::size_t next = 0;
  for (std::size_t i = 0; i < split.instances.size(); ++i) {
    if (!drop[i]) {
      out.dataset.instances.push_back(split.instances[i]);
      continue;
    }
    if (next < inserted.size()) {
      const auto& chal = pool.instances[inserted[next++]];
      if (ids.count(chal.id)) throw Error("challenge id " + chal.id + " collides with the split");
      out.dataset.instances.push_back(chal);
    }
  }
  out.dataset.provenance_log.push_back({"build-uwre-plus", Json::object(), seed, {}, {}});
  return out;
}

}  // namespace qakbp

#endif  // QAKBP_CHALLENGE_HPP
