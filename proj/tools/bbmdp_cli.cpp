/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The bbmdp authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Command-line front end. Talks to the library only through bbmdp.h.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bbmdp/bbmdp.h"

namespace fs = std::filesystem;

namespace {

struct CliError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(bbmdp_status st, const std::string& what) {
  if (st != BBMDP_OK) {
    throw CliError(what + ": " + bbmdp_status_string(st) + ": " + bbmdp_last_error());
  }
}

// Takes ownership of a library string.
std::string take(char* s) {
  std::string out = s ? s : "";
  bbmdp_free_string(s);
  return out;
}

struct Instance {
  bbmdp_instance* ptr = nullptr;
  explicit Instance(bbmdp_instance* p) : ptr(p) {}
  Instance(const Instance&) = delete;
  Instance(Instance&& o) noexcept : ptr(o.ptr) { o.ptr = nullptr; }
  ~Instance() { bbmdp_instance_free(ptr); }
};

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw CliError("cannot write '" + path + "'");
  f << text;
  if (!text.empty() && text.back() != '\n') f << '\n';
}

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw CliError("cannot read '" + path + "'");
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
  std::string family = "setcover";
  std::string preset = "small";
  std::size_t count = 1;
  std::uint64_t seed = 0;
  std::string out = "instances";
  std::vector<std::string> overrides;  // key=value on the preset spec
};

int run_generate(const GenerateArgs& a) {
  std::vector<std::string> families;
  if (a.family == "all") {
    families = {"setcover", "cauction", "knapsack", "indset"};
  } else {
    families = {a.family};
  }
  fs::create_directories(a.out);
  nlohmann::ordered_json manifest;
  manifest["preset"] = a.preset;
  manifest["instances"] = nlohmann::ordered_json::array();
  for (const std::string& family : families) {
    for (std::size_t i = 0; i < a.count; ++i) {
      char* raw = nullptr;
      check(bbmdp_preset_spec(a.preset.c_str(), family.c_str(), a.seed + i, &raw), "preset");
      auto spec = nlohmann::ordered_json::parse(take(raw));
      for (const std::string& kv : a.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw CliError("override '" + kv + "' is not key=value");
        const std::string key = kv.substr(0, eq);
        if (!spec.contains(key)) throw CliError("family " + family + " has no parameter '" + key + "'");
        spec[key] = nlohmann::ordered_json::parse(kv.substr(eq + 1));
      }
      const std::string spec_text = spec.dump();
      bbmdp_instance* ptr = nullptr;
      check(bbmdp_instance_generate(spec_text.c_str(), &ptr), "generate");
      Instance inst(ptr);
      check(bbmdp_instance_to_json(inst.ptr, &raw), "serialize");
      const std::string body = take(raw);
      const std::string file = std::string(bbmdp_instance_name(inst.ptr)) + ".json";
      write_text((fs::path(a.out) / file).string(), body);
      nlohmann::ordered_json entry;
      entry["file"] = file;
      entry["spec"] = spec;
      entry["hash"] = hex64(bbmdp_content_hash(body.data(), body.size()));
      manifest["instances"].push_back(entry);
    }
  }
  write_text((fs::path(a.out) / "manifest.json").string(), manifest.dump(2));
  std::cerr << "wrote " << manifest["instances"].size() << " instances to " << a.out << "\n";
  return 0;
}

struct SolveArgs {
  std::string instance;
  std::string branching = "pseudocost";
  std::string selection = "dfs";
  std::string checkpoint;
  std::uint64_t seed = 0;
  std::size_t max_nodes = 100000;
  std::string trace;
  std::string out;
};

std::string policy_spec(const std::string& branching, const std::string& checkpoint, const std::string& selection) {
  std::string s = branching;
  if (!checkpoint.empty()) s += ":" + checkpoint;
  return s + "@" + selection;
}

int run_solve(const SolveArgs& a) {
  bbmdp_instance* ptr = nullptr;
  check(bbmdp_instance_read(a.instance.c_str(), &ptr), "read instance");
  Instance inst(ptr);
  bbmdp_policy* policy = nullptr;
  check(bbmdp_policy_create(policy_spec(a.branching, a.checkpoint, a.selection).c_str(), &policy), "policy");
  char* report = nullptr;
  char* trace = nullptr;
  const bbmdp_status st =
      bbmdp_solve(inst.ptr, policy, a.seed, a.max_nodes, &report, a.trace.empty() ? nullptr : &trace);
  bbmdp_policy_free(policy);
  check(st, "solve");
  write_text(a.out, take(report));
  if (!a.trace.empty()) write_text(a.trace, take(trace));
  return 0;
}

struct TrainArgs {
  std::string config;
  std::string checkpoint = "model.qfn";
  std::string out;
  bool print_default = false;
};

int run_train(const TrainArgs& a) {
  if (a.print_default) {
    char* raw = nullptr;
    check(bbmdp_default_train_config(&raw), "default config");
    write_text(a.out, take(raw));
    return 0;
  }
  if (a.config.empty()) throw CliError("train needs --config (see --print-default-config)");
  const std::string text = read_text(a.config);
  char* raw = nullptr;
  check(bbmdp_train(text.c_str(), a.checkpoint.empty() ? nullptr : a.checkpoint.c_str(), &raw), "train");
  write_text(a.out, take(raw));
  return 0;
}

struct EvaluateArgs {
  std::vector<std::string> policies;
  std::string instances;
  std::vector<std::uint64_t> seeds{0};
  std::size_t max_nodes = 100000;
  std::string reference;
  std::string csv;
  std::string json;
};

int run_evaluate(const EvaluateArgs& a) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(a.instances)) {
    if (e.path().extension() == ".json" && e.path().filename() != "manifest.json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw CliError("no instance files in '" + a.instances + "'");
  std::vector<Instance> owned;
  std::vector<const bbmdp_instance*> ptrs;
  for (const fs::path& f : files) {
    bbmdp_instance* ptr = nullptr;
    check(bbmdp_instance_read(f.string().c_str(), &ptr), "read " + f.string());
    owned.emplace_back(ptr);
    ptrs.push_back(ptr);
  }
  std::vector<const char*> pol;
  for (const std::string& p : a.policies) pol.push_back(p.c_str());
  char* csv = nullptr;
  char* json = nullptr;
  check(bbmdp_evaluate(ptrs.data(), ptrs.size(), pol.data(), pol.size(), a.seeds.data(), a.seeds.size(),
                       a.max_nodes, a.reference.empty() ? nullptr : a.reference.c_str(), &csv, &json),
        "evaluate");
  const std::string csv_text = take(csv);
  const std::string json_text = take(json);
  if (!a.csv.empty()) write_text(a.csv, csv_text);
  write_text(a.json, json_text);
  return 0;
}

struct VerifyArgs {
  std::string suite;
  std::size_t scope = 0;
  std::uint64_t seed = 0;
  std::size_t k = 3;
  std::string out;
};

int run_verify(const VerifyArgs& a) {
  std::vector<std::string> suites;
  if (a.suite == "all") {
    suites = {"identities", "codec", "gradients", "oracle", "divergence"};
  } else {
    suites = {a.suite};
  }
  nlohmann::ordered_json all = nlohmann::ordered_json::array();
  bool ok = true;
  for (const std::string& s : suites) {
    int passed = 0;
    char* raw = nullptr;
    check(bbmdp_verify(s.c_str(), a.scope, a.seed, a.k, &passed, &raw), "verify " + s);
    all.push_back(nlohmann::ordered_json::parse(take(raw)));
    std::cerr << s << ": " << (passed ? "PASS" : "FAIL") << "\n";
    ok = ok && passed;
  }
  write_text(a.out, suites.size() == 1 ? all[0].dump(2) : all.dump(2));
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Branch-and-bound MDP toolkit"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Write seeded instances and a manifest");
  g->add_option("--family", gen.family, "setcover, cauction, knapsack, indset or all");
  g->add_option("--preset", gen.preset, "tiny, small or paper-shape");
  g->add_option("--count", gen.count, "Instances per family");
  g->add_option("--seed", gen.seed, "First instance seed");
  g->add_option("--out", gen.out, "Output directory");
  g->add_option("--set", gen.overrides, "Override a spec parameter, key=value");

  SolveArgs sol;
  auto* s = app.add_subcommand("solve", "Solve one instance");
  s->add_option("instance", sol.instance, "Instance JSON file")->required();
  s->add_option("--branching", sol.branching, "random, mostfrac, sb, pseudocost or dqn");
  s->add_option("--selection", sol.selection, "dfs, bfs or bestbound");
  s->add_option("--checkpoint", sol.checkpoint, "Q-function checkpoint for dqn");
  s->add_option("--seed", sol.seed);
  s->add_option("--max-nodes", sol.max_nodes);
  s->add_option("--trace", sol.trace, "Episode trace (JSON Lines) output");
  s->add_option("--out", sol.out, "Report output (default stdout)");

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "Train a DQN branching agent");
  t->add_option("--config", tr.config, "Training config JSON");
  t->add_option("--checkpoint", tr.checkpoint, "Checkpoint output path");
  t->add_option("--out", tr.out, "Training result JSON (default stdout)");
  t->add_flag("--print-default-config", tr.print_default);

  EvaluateArgs ev;
  auto* e = app.add_subcommand("evaluate", "Evaluate policies on an instance directory");
  e->add_option("--policies", ev.policies, "Policy specs, e.g. sb pseudocost dqn:model.qfn@dfs")
      ->required()
      ->delimiter(',');
  e->add_option("--instances", ev.instances, "Directory of instance files")->required();
  e->add_option("--seeds", ev.seeds)->delimiter(',');
  e->add_option("--max-nodes", ev.max_nodes);
  e->add_option("--reference", ev.reference, "Policy label the normalized score divides by");
  e->add_option("--csv", ev.csv, "Per-cell CSV output");
  e->add_option("--json", ev.json, "Aggregate JSON output (default stdout)");

  VerifyArgs ve;
  auto* v = app.add_subcommand("verify", "Run a verification suite");
  v->add_option("suite", ve.suite, "identities, codec, gradients, oracle, divergence or all")->required();
  v->add_option("--scope", ve.scope, "Episodes / instances / points (0: suite default)");
  v->add_option("--seed", ve.seed);
  v->add_option("--k", ve.k, "Step count for the divergence suite");
  v->add_option("--out", ve.out, "Report output (default stdout)");

  CLI11_PARSE(app, argc, argv);
  try {
    if (g->parsed()) return run_generate(gen);
    if (s->parsed()) return run_solve(sol);
    if (t->parsed()) return run_train(tr);
    if (e->parsed()) return run_evaluate(ev);
    if (v->parsed()) return run_verify(ve);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }
  return 0;
}
