// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// submodinfo: command-line front end over the C API.
//
//   submodinfo summarize --collection F --flavor query --budget 5 --query "aircraft,sky" --fn FL2MI
//   submodinfo learn --train-dir D --task query --epochs 20 --out model.json
//   submodinfo eval --collection F --summary S [--references R]
//   submodinfo synth --seed 7 --study privacy --sweep nu=0,1,10 [--out PREFIX]
//   submodinfo check --oracle
//   submodinfo generate --out-dir D
//
// Exit codes: 0 success, 1 failed check, 2 invalid input, 3 numeric failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "submodinfo/submodinfo.h"

namespace {

using nlohmann::json;

constexpr int kExitCheckFailed = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitNumeric = 3;

// Error raised inside the CLI with the exit code to use.
struct CliError {
  int code;
  std::string message;
};

int ExitCode(smi_status status) {
  switch (status) {
    case SMI_OK:
      return 0;
    case SMI_ERROR_NUMERIC:
      return kExitNumeric;
    case SMI_ERROR_UNKNOWN:
      return kExitCheckFailed;
    default:
      return kExitInvalid;
  }
}

void Check(smi_status status) {
  if (status != SMI_OK) {
    throw CliError{ExitCode(status),
                   std::string(smi_status_name(status)) + ": " + smi_last_error_message()};
  }
}

// Owns a string returned by the library.
struct LibString {
  char* s = nullptr;
  ~LibString() { smi_free_string(s); }
  std::string str() const { return s ? s : ""; }
};

struct CollectionHandle {
  smi_collection* c = nullptr;
  ~CollectionHandle() { smi_collection_free(c); }
};

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError{kExitInvalid, "cannot read " + path};
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void WriteFile(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CliError{kExitInvalid, "cannot write " + path};
  out << content;
  if (!content.empty() && content.back() != '\n') out << '\n';
}

json ParseJsonText(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw CliError{kExitInvalid, "malformed JSON in " + what + ": " + e.what()};
  }
}

// Config echo plus library version, written next to the results.
void WriteManifest(const std::string& command, const json& config,
                   const std::vector<std::string>& outputs, const std::string& path) {
  json manifest{{"command", command},
                {"config", config},
                {"library_version", smi_version()},
                {"outputs", outputs}};
  const char* threads = std::getenv("SUBMOD_THREADS");
  manifest["env"] = {{"SUBMOD_THREADS", threads ? json(threads) : json()}};
  if (path.empty()) {
    std::cerr << manifest.dump() << '\n';
  } else {
    WriteFile(path, manifest.dump(2));
  }
}

// Writes the result to `out` (stdout when empty) and the manifest alongside.
void Deliver(const std::string& command, const json& config, const std::string& result,
             const std::string& out) {
  if (out.empty()) {
    std::cout << result;
    if (!result.empty() && result.back() != '\n') std::cout << '\n';
    WriteManifest(command, config, {"<stdout>"}, "");
  } else {
    WriteFile(out, result);
    WriteManifest(command, config, {out}, out + ".manifest.json");
  }
}

struct KernelArgs {
  std::string metric;
  std::optional<double> rbf_sigma;
  std::optional<double> jitter;

  void Add(CLI::App* app) {
    app->add_option("--metric", metric, "Similarity metric: cosine, dot or rbf");
    app->add_option("--rbf-sigma", rbf_sigma, "RBF bandwidth");
    app->add_option("--jitter", jitter, "Diagonal jitter for log-det");
  }
  void Fill(json& request) const {
    json k = json::object();
    if (!metric.empty()) k["metric"] = metric;
    if (rbf_sigma) k["rbf_sigma"] = *rbf_sigma;
    if (jitter) k["jitter"] = *jitter;
    if (!k.empty()) request["kernel"] = k;
  }
};

CollectionHandle Load(const std::string& path) {
  CollectionHandle h;
  Check(smi_collection_load(path.c_str(), &h.c));
  return h;
}

// A list of ids: a JSON file (list, or object with "items"), or
// comma-separated ids.
json IdList(const std::string& arg) {
  if (std::filesystem::is_regular_file(arg)) {
    json j = ParseJsonText(ReadFile(arg), arg);
    if (j.is_object() && j.contains("items")) return j.at("items");
    if (j.is_array()) return j;
    throw CliError{kExitInvalid, arg + ": expected a list of ids or an object with \"items\""};
  }
  json out = json::array();
  std::stringstream in(arg);
  std::string token;
  while (std::getline(in, token, ',')) {
    if (!token.empty()) out.push_back(token);
  }
  return out;
}

// References: a JSON list of id lists, or a document with a "references"
// array of {items: [...]}.
json ReferenceLists(const std::string& path) {
  json j = ParseJsonText(ReadFile(path), path);
  if (j.is_object() && j.contains("references")) j = j.at("references");
  if (!j.is_array()) throw CliError{kExitInvalid, path + ": expected a list of references"};
  json out = json::array();
  for (const json& r : j) out.push_back(r.is_object() ? r.at("items") : r);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Submodular information measures: summarize, learn, evaluate, study"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(smi_version()));

  // summarize
  CLI::App* summarize = app.add_subcommand("summarize", "Select a summary under one measure");
  std::string collection_path, flavor = "generic", fn, out;
  int budget = -1;
  std::vector<std::string> queries, privates, previous;
  bool lazy_off = false, stop_nonpositive = false;
  int threads = 0;
  KernelArgs kernel;
  summarize->add_option("--collection", collection_path, "Collection JSON")->required();
  summarize->add_option("--flavor", flavor,
                        "generic, query, privacy, irrelevance, update, query-update, "
                        "query-privacy");
  summarize->add_option("--budget", budget, "Summary size k");
  summarize->add_option("--query", queries,
                        "Query id, or comma-separated concepts (repeatable)");
  summarize->add_option("--private", privates, "Private id (repeatable)");
  summarize->add_option("--prev", previous, "Previous summary item id (repeatable)");
  summarize->add_option("--fn", fn, "Function spec, e.g. FL2MI:eta=0.2")->required();
  summarize->add_flag("--no-lazy", lazy_off, "Evaluate every candidate each step");
  summarize->add_flag("--stop-nonpositive", stop_nonpositive, "Stop when gains drop to <= 0");
  summarize->add_option("--threads", threads, "Worker cap (0 = automatic)");
  summarize->add_option("--out", out, "Output file (default stdout)");
  kernel.Add(summarize);

  // learn
  CLI::App* learn = app.add_subcommand("learn", "Train a mixture on reference summaries");
  std::string train_dir, task = "generic", margin = "vrouge", components_path;
  int epochs = 20, learn_budget = 5;
  double lr = 0.05, momentum = 0.9, reg = 1e-3;
  std::uint64_t seed = 0;
  bool exact = false;
  learn->add_option("--train-dir", train_dir, "Directory of collection JSON files")->required();
  learn->add_option("--task", task, "generic, query, privacy, joint");
  learn->add_option("--epochs", epochs, "Full-batch epochs");
  learn->add_option("--lr", lr, "Learning rate");
  learn->add_option("--momentum", momentum, "Nesterov momentum in [0,1)");
  learn->add_option("--reg", reg, "L2 regularization strength");
  learn->add_option("--margin", margin, "vrouge (1 - V-ROUGE) or zero-one");
  learn->add_option("--budget", learn_budget, "Budget when a collection has none");
  learn->add_option("--components", components_path, "JSON list of {spec, mode?}");
  learn->add_option("--seed", seed, "Weight initialization seed");
  learn->add_flag("--exact", exact, "Exhaustive loss-augmented inference");
  learn->add_option("--threads", threads, "Worker cap (0 = automatic)");
  learn->add_option("--out", out, "Model file")->required();
  kernel.Add(learn);

  // eval
  CLI::App* eval = app.add_subcommand("eval", "V-ROUGE of a summary");
  std::string summary_arg, references_path;
  eval->add_option("--collection", collection_path, "Collection JSON")->required();
  eval->add_option("--summary", summary_arg, "Selection JSON or comma-separated ids")->required();
  eval->add_option("--references", references_path,
                   "JSON list of id lists (default: the collection's references)");
  eval->add_option("--out", out, "Output file (default stdout)");

  // synth
  CLI::App* synth = app.add_subcommand("synth", "Seeded 2-D behavior study");
  std::string study = "query", sweep;
  std::vector<std::string> families;
  std::uint64_t synth_seed = 7;
  int synth_budget = 10;
  double delta = 1.0;
  synth->add_option("--seed", synth_seed, "Instance seed");
  synth->add_option("--study", study, "query, privacy, joint or generic");
  synth->add_option("--sweep", sweep, "PARAM=v1,v2,... over eta, nu or lambda");
  synth->add_option("--budget", synth_budget, "Summary size");
  synth->add_option("--delta", delta, "Match radius");
  synth->add_option("--family", families, "Family to run (repeatable)");
  synth->add_option("--out", out, "Output prefix: PREFIX.csv and PREFIX.json");

  // check
  CLI::App* check = app.add_subcommand("check", "Self-checks");
  bool oracle = false;
  std::uint64_t check_seed = 20260101;
  check->add_flag("--oracle", oracle, "Closed forms vs definitions, gradients vs differences");
  check->add_option("--seed", check_seed, "Suite seed");
  check->add_option("--out", out, "Report file (default stdout)");

  // generate
  CLI::App* generate = app.add_subcommand("generate", "Synthetic concept collections");
  std::string out_dir;
  int gen_collections = 6, gen_items = 30, gen_refs = 2;
  std::uint64_t gen_seed = 11;
  generate->add_option("--out-dir", out_dir, "Destination directory")->required();
  generate->add_option("--collections", gen_collections, "Number of collections");
  generate->add_option("--items", gen_items, "Items per collection");
  generate->add_option("--references", gen_refs, "References per collection");
  generate->add_option("--seed", gen_seed, "Seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    if (summarize->parsed()) {
      json request{{"flavor", flavor}, {"fn", fn}, {"threads", threads}};
      if (budget >= 0) request["budget"] = budget;
      if (!queries.empty()) request["query"] = queries;
      if (!privates.empty()) request["privates"] = privates;
      if (!previous.empty()) request["previous"] = previous;
      if (lazy_off) request["lazy"] = false;
      if (stop_nonpositive) request["stop_on_nonpositive"] = true;
      kernel.Fill(request);
      CollectionHandle c = Load(collection_path);
      LibString result;
      Check(smi_summarize(c.c, request.dump().c_str(), &result.s));
      request["collection"] = collection_path;
      Deliver("summarize", request, result.str(), out);
    } else if (learn->parsed()) {
      json request{{"train_dir", train_dir}, {"task", task},   {"epochs", epochs},
                   {"learning_rate", lr},    {"momentum", momentum}, {"reg_strength", reg},
                   {"margin", margin},       {"budget", learn_budget}, {"seed", seed},
                   {"exact_inference", exact}, {"threads", threads}};
      if (!components_path.empty()) {
        request["components"] = ParseJsonText(ReadFile(components_path), components_path);
      }
      kernel.Fill(request);
      LibString result;
      Check(smi_learn(request.dump().c_str(), &result.s));
      json r = ParseJsonText(result.str(), "learn result");
      json model = r.at("model");
      model["trace"] = r.at("trace");
      model["initial_objective"] = r.at("initial_objective");
      model["best_objective"] = r.at("best_objective");
      std::ostringstream log;
      log << "epoch,objective,hinge,vrouge\n";
      log.precision(17);
      for (const json& rec : r.at("trace")) {
        log << rec.at("epoch").get<int>() << ',' << rec.at("objective").get<double>() << ','
            << rec.at("hinge").get<double>() << ',' << rec.at("vrouge").get<double>() << '\n';
      }
      WriteFile(out, model.dump(2));
      WriteFile(out + ".trace.csv", log.str());
      WriteManifest("learn", request, {out, out + ".trace.csv"}, out + ".manifest.json");
    } else if (eval->parsed()) {
      json request{{"summary", IdList(summary_arg)}};
      if (!references_path.empty()) request["references"] = ReferenceLists(references_path);
      CollectionHandle c = Load(collection_path);
      LibString result;
      Check(smi_evaluate(c.c, request.dump().c_str(), &result.s));
      request["collection"] = collection_path;
      Deliver("eval", request, result.str(), out);
    } else if (synth->parsed()) {
      json request{{"seed", synth_seed}, {"study", study}, {"budget", synth_budget},
                   {"delta", delta}};
      if (!sweep.empty()) request["sweep"] = sweep;
      if (!families.empty()) request["families"] = families;
      LibString result;
      Check(smi_synth(request.dump().c_str(), &result.s));
      json r = ParseJsonText(result.str(), "synth result");
      if (out.empty()) {
        std::cout << r.at("csv").get<std::string>();
        std::cout << r.at("report").dump(2) << '\n';
        WriteManifest("synth", request, {"<stdout>"}, "");
      } else {
        WriteFile(out + ".csv", r.at("csv").get<std::string>());
        WriteFile(out + ".json", r.at("report").dump(2));
        WriteManifest("synth", request, {out + ".csv", out + ".json"}, out + ".manifest.json");
      }
    } else if (check->parsed()) {
      if (!oracle) throw CliError{kExitInvalid, "check: nothing to do (use --oracle)"};
      json request{{"seed", check_seed}};
      LibString result;
      int passed = 0;
      Check(smi_check_oracle(request.dump().c_str(), &result.s, &passed));
      json report = ParseJsonText(result.str(), "check result");
      for (const json& c : report.at("checks")) {
        std::cerr << (c.at("passed").get<bool>() ? "PASS " : "FAIL ")
                  << c.at("name").get<std::string>() << ": "
                  << c.at("detail").get<std::string>() << '\n';
      }
      Deliver("check", request, result.str(), out);
      if (!passed) return kExitCheckFailed;
    } else if (generate->parsed()) {
      json request{{"collections", gen_collections}, {"items", gen_items},
                   {"references", gen_refs}, {"seed", gen_seed}};
      LibString result;
      Check(smi_generate_collections(request.dump().c_str(), &result.s));
      const json docs = ParseJsonText(result.str(), "generated collections");
      std::error_code ec;
      std::filesystem::create_directories(out_dir, ec);
      if (ec) throw CliError{kExitInvalid, "cannot create " + out_dir + ": " + ec.message()};
      std::vector<std::string> outputs;
      for (const json& doc : docs) {
        const std::string path =
            (std::filesystem::path(out_dir) / (doc.at("name").get<std::string>() + ".json"))
                .string();
        WriteFile(path, doc.dump(2));
        outputs.push_back(path);
      }
      WriteManifest("generate", request, outputs,
                    (std::filesystem::path(out_dir) / "generate.manifest.json").string());
    }
  } catch (const CliError& e) {
    std::cerr << "submodinfo: " << e.message << '\n';
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "submodinfo: " << e.what() << '\n';
    return kExitInvalid;
  }
  return 0;
}
