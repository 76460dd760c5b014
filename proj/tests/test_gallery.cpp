#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <string>

#include "minprod/errors.hpp"
#include "minprod/gallery.hpp"
#include "minprod/numutil.hpp"

using namespace minprod;

TEST_CASE("catalog: names are unique, anchors stated, required entries present") {
  const auto& cat = gallery_catalog();
  CHECK(cat.size() >= 12);
  std::set<std::string> names;
  for (const auto& e : cat) {
    CHECK(names.insert(e.name).second);
    CHECK(!e.anchor.empty());
    CHECK(e.plan.is_array());
    CHECK(!e.plan.empty());
  }
  CHECK(names.count("td-ab-nonminimal") == 1);
  CHECK(names.count("two-circles-skew") == 1);
  CHECK(find_experiment("rational-rotation-period") != nullptr);
  CHECK(find_experiment("no-such-experiment") == nullptr);
}

TEST_CASE("constant expressions evaluate exactly against the registry") {
  const auto& reg = gallery_registry();
  SymReal half = build_symreal(json::parse("[1,2]"), reg);
  CHECK(half.is_rational());
  CHECK(half.approx() == doctest::Approx(0.5));
  SymReal three = build_symreal(json(3), reg);
  CHECK(three.approx() == doctest::Approx(3.0));

  SymReal s2 = build_symreal(json("sqrt2"), reg);
  SymReal direct = SymReal::generator(reg, *reg.find("sqrt2"));
  CHECK(identical(s2, direct));

  SymReal combo = build_symreal(json::parse(R"(["plus",["scale",[2,1],"sqrt2"],[1,3]])"), reg);
  CHECK(identical(combo, direct.scaled(Rational(2)) + SymReal(Rational(1, 3))));

  CHECK_THROWS_AS(build_symreal(json("sqrt7"), reg), ConfigError);
  CHECK_THROWS_AS(build_symreal(json::parse(R"(["times",1,2])"), reg), ConfigError);
  CHECK_THROWS_AS(build_symreal(json::parse("[1,0]"), reg), ConfigError);
  CHECK_THROWS_AS(build_symreal(json::parse("[1,2,3]"), reg), ConfigError);
}

TEST_CASE("system expressions build the advertised spaces") {
  const auto& reg = gallery_registry();
  auto rot = build_system(json::parse(R"(["circle-rotation","sqrt2"])"), reg);
  CHECK(rot.space.dim == 1);
  CHECK(bool(rot.step));

  auto prod = build_system(
      json::parse(R"(["direct-product",["odometer",2,4],["circle-rotation","sqrt2"]])"), reg);
  CHECK(prod.space.kind == SpaceKind::Product);

  auto skew = build_system(
      json::parse(R"(["skew-product",["circle-rotation","sqrt2"],["anzai"],1])"), reg);
  REQUIRE(bool(skew.skew_base));
  CHECK(skew.space.dim == 2);

  auto susp = build_system(json::parse(R"(["suspension",["odometer",2,3],[1,2]])"), reg);
  CHECK(bool(susp.step_num));

  CHECK_THROWS_AS(build_system(json::parse(R"(["moebius",1])"), reg), ConfigError);
  CHECK_THROWS_AS(build_system(json::parse(R"(["circle-rotation"])"), reg), ConfigError);
  CHECK_THROWS_AS(build_system(json("circle-rotation"), reg), ConfigError);
}

TEST_CASE("rational rotation entry: expected fail verdict counts as a match") {
  const Experiment* e = find_experiment("rational-rotation-period");
  REQUIRE(e != nullptr);
  RunReport rr = run_experiment(*e);
  CHECK(rr.status);
  REQUIRE(rr.analyses.size() == 1);
  CHECK(rr.analyses[0].verdict == Verdict::fail);
  CHECK(rr.expected[0] == "fail");
  CHECK(rr.matched[0]);

  json j = rr.to_json();
  CHECK(j.at("status") == "pass");
  CHECK(j.at("experiment") == "rational-rotation-period");
  CHECK(j.at("analyses").size() == 1);
  CHECK(j.at("analyses")[0].at("matched").get<bool>());
  CHECK(j.at("payload_hash") == rr.hashed_payload());
}

TEST_CASE("determinism: reruns with one seed agree, another seed rehashes the config") {
  const Experiment* e = find_experiment("weyl-equidistribution");
  REQUIRE(e != nullptr);
  RunReport a = run_experiment(*e);
  RunReport b = run_experiment(*e);
  CHECK(a.status);
  CHECK(a.hashed_payload() == b.hashed_payload());
  CHECK(a.params_hash == b.params_hash);

  // timing never reaches the payload hash
  RunReport c = a;
  c.wall_seconds = a.wall_seconds + 1.0;
  CHECK(c.hashed_payload() == a.hashed_payload());

  RunReport d = run_experiment(*e, std::uint64_t{7});
  CHECK(d.params_hash != a.params_hash);
  CHECK(d.status);
}

TEST_CASE("suspension entry: irrational time passes, rational time fails periodically") {
  const Experiment* e = find_experiment("suspension-time-t");
  REQUIRE(e != nullptr);
  RunReport rr = run_experiment(*e);
  REQUIRE(rr.analyses.size() == 2);
  CHECK(rr.analyses[0].verdict == Verdict::pass);
  CHECK(rr.analyses[1].verdict == Verdict::fail);
  CHECK(rr.status);
  // the rational time-t orbit closes up; the witness records the finite order
  CHECK(rr.analyses[1].witness.at("obstruction") == "finite-order");
}

TEST_CASE("certificate battery matches all twenty planted verdicts") {
  const Experiment* e = find_experiment("torus-cert-battery");
  REQUIRE(e != nullptr);
  RunReport rr = run_experiment(*e);
  CHECK(rr.status);
  REQUIRE(rr.analyses.size() == 20);
  long minimal = 0, nonminimal = 0;
  for (const auto& r : rr.analyses) {
    if (r.verdict == Verdict::minimal) ++minimal;
    if (r.verdict == Verdict::nonminimal) ++nonminimal;
  }
  CHECK(minimal == 10);
  CHECK(nonminimal == 10);
}

TEST_CASE("analysis errors are recorded per entry; config errors abort") {
  Experiment bad;
  bad.name = "bad-eps";
  bad.builder = json::parse(R"(["circle-rotation","sqrt2"])");
  bad.plan = json::array(
      {json{{"op", "minimality-scan"}, {"params", {{"eps", -1.0}}}, {"expect", "inconclusive"}}});
  RunReport rr = run_experiment(bad);
  REQUIRE(rr.analyses.size() == 1);
  CHECK(rr.analyses[0].verdict == Verdict::inconclusive);
  CHECK(rr.analyses[0].evidence.contains("error"));
  CHECK(rr.status);  // the recorded error matched the declared expectation

  Experiment unknown_op = bad;
  unknown_op.plan[0]["op"] = "frobnicate";
  CHECK_THROWS_AS(run_experiment(unknown_op), ConfigError);

  Experiment bad_expect = bad;
  bad_expect.plan[0]["expect"] = "maybe";
  CHECK_THROWS_AS(run_experiment(bad_expect), ConfigError);

  Experiment no_plan = bad;
  no_plan.plan = json::array();
  CHECK_THROWS_AS(run_experiment(no_plan), ConfigError);

  Experiment bad_builder = bad;
  bad_builder.builder = json::parse(R"(["circle-rotation","sqrt9"])");
  CHECK_THROWS_AS(run_experiment(bad_builder), ConfigError);

  Experiment no_system;
  no_system.name = "no-system";
  no_system.plan = json::array(
      {json{{"op", "minimality-scan"}, {"params", {{"eps", 0.1}}}, {"expect", "pass"}}});
  RunReport rr2 = run_experiment(no_system);
  REQUIRE(rr2.analyses.size() == 1);
  CHECK(rr2.analyses[0].evidence.contains("error"));
  CHECK_FALSE(rr2.status);
}

TEST_CASE("experiment parsing and report merging round out the config surface") {
  Experiment e = experiment_from_json(json::parse(R"({
    "name": "parsed",
    "builder": ["circle-rotation", [1, 3]],
    "plan": [{"op": "minimality-scan", "params": {"eps": 0.1}, "expect": "fail"}],
    "seed": 11
  })"));
  CHECK(e.name == "parsed");
  CHECK(e.seed == 11);
  RunReport rr = run_experiment(e, gallery_registry());
  CHECK(rr.status);

  CHECK_THROWS_AS(experiment_from_json(json::parse(R"({"plan": []})")), ConfigError);
  CHECK_THROWS_AS(experiment_from_json(json(3)), ConfigError);

  const Experiment* w = find_experiment("weyl-equidistribution");
  REQUIRE(w != nullptr);
  json doc1 = run_experiment(*w).to_json();
  json doc2 = rr.to_json();
  json merged = merge_reports({doc1, doc2});
  CHECK(merged.at("total") == 2);
  CHECK(merged.at("passed") == 2);
  CHECK(merged.at("status") == "pass");

  json nested = merge_reports({merged, doc1});
  CHECK(nested.at("total") == 3);
  CHECK_THROWS_AS(merge_reports({json{{"bogus", 1}}}), ConfigError);

  auto rs = run_experiments({e, *w}, gallery_registry());
  REQUIRE(rs.size() == 2);
  CHECK(rs[0].experiment == "parsed");
  CHECK(rs[0].status);
  CHECK(rs[1].status);
}

TEST_CASE("fast catalog entries run end to end with their declared outcomes") {
  for (const char* name : {"irrational-rotation-density", "scurve-geometry",
                           "td-ab-nonminimal", "s3-translation-nonminimal"}) {
    CAPTURE(name);
    const Experiment* e = find_experiment(name);
    REQUIRE(e != nullptr);
    RunReport rr = run_experiment(*e);
    for (std::size_t i = 0; i < rr.analyses.size(); ++i) {
      CAPTURE(i);
      CHECK(to_string(rr.analyses[i].verdict) == rr.expected[i]);
    }
    CHECK(rr.status);
  }
}
