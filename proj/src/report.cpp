#include "minprod/report.hpp"

#include "minprod/errors.hpp"

namespace minprod {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
    case Verdict::minimal: return "minimal";
    case Verdict::nonminimal: return "nonminimal";
  }
  return "inconclusive";
}

Verdict verdict_from_string(const std::string& s) {
  if (s == "pass") return Verdict::pass;
  if (s == "fail") return Verdict::fail;
  if (s == "inconclusive") return Verdict::inconclusive;
  if (s == "minimal") return Verdict::minimal;
  if (s == "nonminimal") return Verdict::nonminimal;
  throw ConfigError("unknown verdict: " + s);
}

json Report::to_json() const {
  json j;
  j["op"] = op;
  j["params"] = params;
  j["verdict"] = to_string(verdict);
  j["evidence"] = evidence;
  if (!witness.is_null()) j["witness"] = witness;
  return j;
}

std::string canonical_dump(const json& j) {
  // nlohmann objects are key-sorted maps, so a plain dump is already stable
  return j.dump();
}

}  // namespace minprod
