#pragma once

#include <optional>
#include <string>

#include <json.hpp>

namespace minprod {

using json = nlohmann::json;

// Three-valued scan verdicts plus the two exact certificate verdicts.
enum class Verdict { pass, fail, inconclusive, minimal, nonminimal };

const char* to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

// One analysis outcome: what ran, with what parameters, what it concluded,
// the numeric evidence, and (when the verdict needs one) a witness.
struct Report {
  std::string op;
  json params = json::object();
  Verdict verdict = Verdict::inconclusive;
  json evidence = json::object();
  json witness;  // null unless set

  json to_json() const;
};

// Serializes with object keys sorted and no whitespace; the stable form used
// for hashing and byte-comparable artifacts.
std::string canonical_dump(const json& j);

}  // namespace minprod
