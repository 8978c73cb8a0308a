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

// Exercises the shared library through its C header only.

#include <doctest.h>

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "bbmdp/bbmdp.h"

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  bbmdp_free_string(s);
  return out;
}

bbmdp_instance* make(const char* preset, const char* family, uint64_t seed) {
  char* spec = nullptr;
  REQUIRE(bbmdp_preset_spec(preset, family, seed, &spec) == BBMDP_OK);
  bbmdp_instance* inst = nullptr;
  REQUIRE(bbmdp_instance_generate(spec, &inst) == BBMDP_OK);
  bbmdp_free_string(spec);
  return inst;
}

}  // namespace

TEST_CASE("C API: instance lifecycle") {
  bbmdp_instance* inst = make("tiny", "knapsack", 3);
  size_t n = 0, m = 0, ints = 0;
  CHECK(bbmdp_instance_info(inst, &n, &m, &ints) == BBMDP_OK);
  CHECK(n == 12);
  CHECK(m == 2);
  CHECK(ints == 12);
  CHECK(std::string(bbmdp_instance_name(inst)) == "knapsack-12x2-s3");

  char* json = nullptr;
  REQUIRE(bbmdp_instance_to_json(inst, &json) == BBMDP_OK);
  const std::string text = take(json);
  bbmdp_instance* back = nullptr;
  REQUIRE(bbmdp_instance_parse(text.data(), text.size(), &back) == BBMDP_OK);
  REQUIRE(bbmdp_instance_to_json(back, &json) == BBMDP_OK);
  CHECK(take(json) == text);

  const auto path = (std::filesystem::temp_directory_path() / "bbmdp_capi.json").string();
  CHECK(bbmdp_instance_write(inst, path.c_str()) == BBMDP_OK);
  bbmdp_instance* read = nullptr;
  CHECK(bbmdp_instance_read(path.c_str(), &read) == BBMDP_OK);
  std::filesystem::remove(path);
  CHECK(bbmdp_content_hash(text.data(), text.size()) != 0);

  bbmdp_instance_free(inst);
  bbmdp_instance_free(back);
  bbmdp_instance_free(read);
  bbmdp_instance_free(nullptr);
}

TEST_CASE("C API: errors map to status codes") {
  bbmdp_instance* inst = nullptr;
  CHECK(bbmdp_instance_parse("{oops", 5, &inst) == BBMDP_ERR_MALFORMED_DOCUMENT);
  CHECK(std::strlen(bbmdp_last_error()) > 0);
  CHECK(inst == nullptr);
  CHECK(bbmdp_instance_parse("{}", 2, &inst) == BBMDP_ERR_SCHEMA_VIOLATION);
  CHECK(bbmdp_instance_read("/nonexistent/x.json", &inst) == BBMDP_ERR_IO);
  CHECK(bbmdp_instance_parse(nullptr, 0, &inst) == BBMDP_ERR_INVALID_ARGUMENT);
  bbmdp_policy* pol = nullptr;
  CHECK(bbmdp_policy_create("magic", &pol) == BBMDP_ERR_INVALID_ARGUMENT);
  CHECK(bbmdp_policy_create("dqn:/nonexistent.qfn", &pol) == BBMDP_ERR_IO);
  char* out = nullptr;
  bbmdp_instance* big = make("small", "setcover", 0);
  CHECK(bbmdp_brute_force(big, 100, &out) == BBMDP_ERR_CAP_EXCEEDED);
  bbmdp_instance_free(big);
  CHECK(std::string(bbmdp_status_string(BBMDP_OK)) == "ok");
}

TEST_CASE("C API: solve agrees with brute force") {
  bbmdp_instance* inst = make("tiny", "indset", 5);
  char* bf = nullptr;
  REQUIRE(bbmdp_brute_force(inst, 1u << 20, &bf) == BBMDP_OK);
  const auto ref = nlohmann::json::parse(take(bf));
  for (const char* spec : {"random", "mostfrac@bfs", "sb@bestbound", "pseudocost"}) {
    bbmdp_policy* pol = nullptr;
    REQUIRE(bbmdp_policy_create(spec, &pol) == BBMDP_OK);
    char* report = nullptr;
    char* trace = nullptr;
    REQUIRE(bbmdp_solve(inst, pol, 7, 100000, &report, &trace) == BBMDP_OK);
    const auto r = nlohmann::json::parse(take(report));
    CHECK(r["objective"] == ref["objective"]);
    CHECK(r["status"] == "Optimal");
    CHECK(r["node_count"].get<std::size_t>() == 1 + 2 * r["step_count"].get<std::size_t>());
    const std::string t = take(trace);
    CHECK(std::count(t.begin(), t.end(), '\n') == r["step_count"].get<long>() + 1);
    bbmdp_policy_free(pol);
  }
  bbmdp_instance_free(inst);
}

TEST_CASE("C API: evaluate and verify") {
  bbmdp_instance* a = make("tiny", "setcover", 1);
  bbmdp_instance* b = make("tiny", "setcover", 2);
  const bbmdp_instance* insts[] = {a, b};
  const char* pols[] = {"random", "sb"};
  const uint64_t seeds[] = {0, 1};
  char* csv = nullptr;
  char* json = nullptr;
  REQUIRE(bbmdp_evaluate(insts, 2, pols, 2, seeds, 2, 100000, "random", &csv, &json) == BBMDP_OK);
  const std::string c = take(csv);
  CHECK(std::count(c.begin(), c.end(), '\n') == 1 + 8);
  const auto j = nlohmann::json::parse(take(json));
  CHECK(j.dump().find("normalized_score") != std::string::npos);
  bbmdp_instance_free(a);
  bbmdp_instance_free(b);

  int passed = 0;
  char* rep = nullptr;
  REQUIRE(bbmdp_verify("codec", 0, 0, 3, &passed, &rep) == BBMDP_OK);
  CHECK(passed == 1);
  bbmdp_free_string(rep);
  CHECK(bbmdp_verify("bogus", 0, 0, 3, &passed, &rep) == BBMDP_ERR_INVALID_ARGUMENT);
}

TEST_CASE("C API: default config trains") {
  char* cfg = nullptr;
  REQUIRE(bbmdp_default_train_config(&cfg) == BBMDP_OK);
  auto j = nlohmann::json::parse(take(cfg));
  j["family"] = {{"family", "setcover"}, {"rows", 10}, {"cols", 12}, {"density", 0.3}, {"seed", 0}};
  j["gradient_steps"] = 5;
  j["batch_size"] = 4;
  j["replay"]["min_fill"] = 20;
  j["validation_instances"] = 1;
  j["architecture"]["hidden"] = {4};
  const auto path = (std::filesystem::temp_directory_path() / "bbmdp_capi.qfn").string();
  char* result = nullptr;
  REQUIRE(bbmdp_train(j.dump().c_str(), path.c_str(), &result) == BBMDP_OK);
  const auto r = nlohmann::json::parse(take(result));
  CHECK(r["gradient_steps"] == 5);
  bbmdp_policy* pol = nullptr;
  CHECK(bbmdp_policy_create(("dqn:" + path).c_str(), &pol) == BBMDP_OK);
  bbmdp_policy_free(pol);
  std::filesystem::remove(path);
  CHECK(bbmdp_train("{\"k\": 0}", nullptr, &result) == BBMDP_ERR_INVALID_ARGUMENT);
}
