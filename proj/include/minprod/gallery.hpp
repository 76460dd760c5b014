#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <minprod/analysis.hpp>
#include <minprod/cocycles.hpp>
#include <minprod/report.hpp>
#include <minprod/symreal.hpp>
#include <minprod/systems.hpp>

namespace minprod {

// A named, reproducible experiment: a builder expression for the system
// under study, an ordered analysis plan, and the verdict each analysis is
// expected to produce. `anchor` states the claim the experiment exercises.
struct Experiment {
  std::string name;
  json builder;  // [op, args...] array, or null when each plan entry
                 // supplies its own system
  json plan;     // array of {op, params, expect}
  std::uint64_t seed = 2026;
  std::string anchor;
};

// Outcome of one experiment run. `status` is true iff every analysis
// verdict matched its expectation.
struct RunReport {
  std::string experiment;
  std::string anchor;
  std::string params_hash;  // content hash of {name, builder, plan, seed}
  std::vector<Report> analyses;
  std::vector<std::string> expected;
  std::vector<bool> matched;
  double wall_seconds = 0.0;
  bool status = false;

  json to_json() const;
  // Hash of the canonical report with timing excluded; byte-identical
  // across reruns with the same seed.
  std::string hashed_payload() const;
};

// Constant expressions: integer | [num, den] | "generator" |
// ["plus", a, b] | ["scale", [num, den], a]. Throws ConfigError on
// malformed input or unregistered generator names.
SymReal build_symreal(const json& expr, const BasisRegistry& reg);

// Cocycle expressions: ["zero", dim] | ["const", [c...]] | ["linear", m] |
// ["sine", kappa] | ["anzai"].
Cocycle build_cocycle(const json& expr, const BasisRegistry& reg);

// System expressions, [op, args...]:
//   ["circle-rotation", a]           ["torus-rotation", [a...]]
//   ["cyclic", k]                    ["identity-circle"]
//   ["odometer", base, depth]        ["suspension", system, t]
//   ["denjoy", a, [num, den], W]     ["s3-translation", w, x, y, z]
//   ["s3-axis", a]                   (angle pi*a on the first circle factor)
//   ["two-circles-skew", a, b]       ["two-circles-base", a]
//   ["torus-translation-numeric", [d...]]
//   ["direct-product", s, s]         ["skew-product", s, cocycle, dim]
//   ["klein-quotient", s]
SystemDescriptor build_system(const json& expr, const BasisRegistry& reg);

// Registry backing the built-in catalog.
const BasisRegistry& gallery_registry();

const std::vector<Experiment>& gallery_catalog();
const Experiment* find_experiment(const std::string& name);

// Parses {name, builder?, plan, seed?, anchor?}; throws ConfigError on
// missing or malformed fields.
Experiment experiment_from_json(const json& j);

// Runs the plan in order. Deterministic for a fixed seed: entry k derives
// its RNG seed from the experiment seed and k. Builder errors propagate;
// analysis errors are recorded as inconclusive entries with the message.
RunReport run_experiment(const Experiment& e, const BasisRegistry& reg,
                         std::optional<std::uint64_t> seed_override = {});
RunReport run_experiment(const Experiment& e,
                         std::optional<std::uint64_t> seed_override = {});

// Runs experiments concurrently (one task each); results keep input order.
std::vector<RunReport> run_experiments(const std::vector<Experiment>& es,
                                       const BasisRegistry& reg);

// Combines emitted run documents into {runs, total, passed, status}.
json merge_reports(const std::vector<json>& runs);

}  // namespace minprod
