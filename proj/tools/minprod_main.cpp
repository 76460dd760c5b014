#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <minprod/errors.hpp>
#include <minprod/gallery.hpp>

using namespace minprod;

namespace {

void emit(const json& doc, const std::string& out_file) {
  if (out_file.empty()) {
    std::cout << doc.dump(2) << "\n";
    return;
  }
  std::ofstream out(out_file);
  if (!out) throw ConfigError("cannot open output file: " + out_file);
  out << doc.dump(2) << "\n";
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& ex) {
    throw ConfigError(path + ": " + ex.what());
  }
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reproducible experiments on minimal dynamical systems"};
  app.require_subcommand(1);

  auto* gallery = app.add_subcommand("gallery", "built-in experiment catalog");
  gallery->require_subcommand(1);
  auto* list = gallery->add_subcommand("list", "print the catalog names and claims");
  auto* grun = gallery->add_subcommand("run", "run one catalog experiment");
  std::string name, grun_out;
  std::uint64_t seed = 0;
  grun->add_option("name", name, "experiment name")->required();
  grun->add_option("--out", grun_out, "write the run report to FILE");
  auto* seed_opt = grun->add_option("--seed", seed, "override the experiment seed");

  auto* crun = app.add_subcommand("run", "run experiments from a JSON config");
  std::string config_file, crun_out;
  crun->add_option("--config", config_file, "config {registry, experiments}")->required();
  crun->add_option("--out", crun_out, "write the merged report to FILE");

  auto* report = app.add_subcommand("report", "report utilities");
  report->require_subcommand(1);
  auto* merge = report->add_subcommand("merge", "merge emitted run reports");
  std::vector<std::string> files;
  std::string merge_out;
  merge->add_option("files", files, "run report files")->required();
  merge->add_option("--out", merge_out, "write the merged report to FILE");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      for (const auto& e : gallery_catalog())
        std::cout << e.name << "\n    " << e.anchor << "\n";
      return 0;
    }
    if (grun->parsed()) {
      const Experiment* e = find_experiment(name);
      if (!e) throw ConfigError("unknown experiment: " + name);
      std::optional<std::uint64_t> so;
      if (seed_opt->count() > 0) so = seed;
      RunReport rr = run_experiment(*e, so);
      emit(rr.to_json(), grun_out);
      return rr.status ? 0 : 1;
    }
    if (crun->parsed()) {
      json cfg = read_json(config_file);
      if (!cfg.is_object() || !cfg.contains("experiments"))
        throw ConfigError("config needs an experiments array");
      std::vector<std::string> reg_names =
          cfg.value("registry", std::vector<std::string>{"sqrt2", "sqrt3", "sqrt5"});
      BasisRegistry reg(reg_names);
      std::vector<Experiment> es;
      for (const auto& je : cfg.at("experiments")) {
        if (je.is_string()) {
          const Experiment* e = find_experiment(je.get<std::string>());
          if (!e) throw ConfigError("unknown experiment: " + je.get<std::string>());
          es.push_back(*e);
        } else {
          es.push_back(experiment_from_json(je));
        }
      }
      std::vector<RunReport> rs = run_experiments(es, reg);
      std::vector<json> docs;
      docs.reserve(rs.size());
      bool all = true;
      for (const auto& r : rs) {
        docs.push_back(r.to_json());
        all = all && r.status;
      }
      emit(merge_reports(docs), crun_out);
      return all ? 0 : 1;
    }
    if (merge->parsed()) {
      std::vector<json> docs;
      docs.reserve(files.size());
      for (const auto& f : files) docs.push_back(read_json(f));
      json merged = merge_reports(docs);
      emit(merged, merge_out);
      return merged.at("status") == "pass" ? 0 : 1;
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }
  return 2;
}
