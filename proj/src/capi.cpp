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

#include "bbmdp/bbmdp.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>

#include <json.hpp>

#include "bbmdp/agent.hpp"
#include "bbmdp/bench.hpp"
#include "bbmdp/env.hpp"
#include "bbmdp/error.hpp"
#include "bbmdp/instances.hpp"
#include "bbmdp/milp.hpp"

struct bbmdp_instance {
  bbmdp::MilpInstance value;
};

struct bbmdp_policy {
  bbmdp::PolicyEntry entry;
  std::unique_ptr<bbmdp::BranchingPolicy> impl;
};

namespace {

thread_local std::string g_last_error;

bbmdp_status status_of(bbmdp::ErrorCode code) {
  using bbmdp::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return BBMDP_ERR_INVALID_ARGUMENT;
    case ErrorCode::MalformedDocument: return BBMDP_ERR_MALFORMED_DOCUMENT;
    case ErrorCode::SchemaViolation: return BBMDP_ERR_SCHEMA_VIOLATION;
    case ErrorCode::LpIterationLimit: return BBMDP_ERR_LP_ITERATION_LIMIT;
    case ErrorCode::PreconditionViolated: return BBMDP_ERR_PRECONDITION;
    case ErrorCode::CapExceeded: return BBMDP_ERR_CAP_EXCEEDED;
    case ErrorCode::ResampleLimit: return BBMDP_ERR_RESAMPLE_LIMIT;
    case ErrorCode::NumericFailure: return BBMDP_ERR_NUMERIC;
    case ErrorCode::Io: return BBMDP_ERR_IO;
  }
  return BBMDP_ERR_INTERNAL;
}

template <class F>
bbmdp_status guarded(F&& body) {
  g_last_error.clear();
  try {
    body();
    return BBMDP_OK;
  } catch (const bbmdp::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return BBMDP_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return BBMDP_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return BBMDP_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) throw bbmdp::Error(bbmdp::ErrorCode::InvalidArgument, std::string(what) + " is null");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size());
  out[s.size()] = '\0';
  return out;
}

}  // namespace

extern "C" {

const char* bbmdp_status_string(bbmdp_status status) {
  switch (status) {
    case BBMDP_OK: return "ok";
    case BBMDP_ERR_INVALID_ARGUMENT: return "invalid argument";
    case BBMDP_ERR_MALFORMED_DOCUMENT: return "malformed document";
    case BBMDP_ERR_SCHEMA_VIOLATION: return "schema violation";
    case BBMDP_ERR_LP_ITERATION_LIMIT: return "LP iteration limit";
    case BBMDP_ERR_PRECONDITION: return "precondition violated";
    case BBMDP_ERR_CAP_EXCEEDED: return "enumeration cap exceeded";
    case BBMDP_ERR_RESAMPLE_LIMIT: return "resample limit exceeded";
    case BBMDP_ERR_NUMERIC: return "numeric failure";
    case BBMDP_ERR_IO: return "I/O error";
    case BBMDP_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* bbmdp_last_error(void) { return g_last_error.c_str(); }

void bbmdp_free_string(char* s) { std::free(s); }

const char* bbmdp_version(void) { return "0.1.0"; }

uint64_t bbmdp_content_hash(const char* bytes, size_t len) {
  if (!bytes) return bbmdp::fnv1a64({});
  return bbmdp::fnv1a64(std::string_view(bytes, len));
}

bbmdp_status bbmdp_instance_read(const char* path, bbmdp_instance** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new bbmdp_instance{bbmdp::read_instance_file(path)};
  });
}

bbmdp_status bbmdp_instance_parse(const char* json, size_t len, bbmdp_instance** out) {
  return guarded([&] {
    require(json, "json");
    require(out, "out");
    *out = new bbmdp_instance{bbmdp::parse_instance(std::string_view(json, len))};
  });
}

bbmdp_status bbmdp_instance_generate(const char* spec_json, bbmdp_instance** out) {
  return guarded([&] {
    require(spec_json, "spec_json");
    require(out, "out");
    *out = new bbmdp_instance{bbmdp::generate(bbmdp::spec_from_json(spec_json))};
  });
}

bbmdp_status bbmdp_instance_to_json(const bbmdp_instance* inst, char** out) {
  return guarded([&] {
    require(inst, "instance");
    require(out, "out");
    *out = dup_string(bbmdp::serialize_instance(inst->value));
  });
}

bbmdp_status bbmdp_instance_write(const bbmdp_instance* inst, const char* path) {
  return guarded([&] {
    require(inst, "instance");
    require(path, "path");
    bbmdp::write_instance_file(inst->value, path);
  });
}

bbmdp_status bbmdp_instance_info(const bbmdp_instance* inst, size_t* num_vars, size_t* num_cons,
                                 size_t* num_integer) {
  return guarded([&] {
    require(inst, "instance");
    if (num_vars) *num_vars = inst->value.num_vars;
    if (num_cons) *num_cons = inst->value.num_cons();
    if (num_integer) *num_integer = inst->value.integer_indices.size();
  });
}

const char* bbmdp_instance_name(const bbmdp_instance* inst) { return inst ? inst->value.name.c_str() : ""; }

void bbmdp_instance_free(bbmdp_instance* inst) { delete inst; }

bbmdp_status bbmdp_preset_spec(const char* preset, const char* family, uint64_t seed, char** spec_json) {
  return guarded([&] {
    require(preset, "preset");
    require(family, "family");
    require(spec_json, "spec_json");
    *spec_json = dup_string(bbmdp::spec_to_json(bbmdp::preset_spec(preset, family, seed)));
  });
}

bbmdp_status bbmdp_presets(char** json) {
  return guarded([&] {
    require(json, "json");
    nlohmann::ordered_json j;
    for (const auto& [name, families] : bbmdp::desk_presets()) {
      for (const auto& [family, spec] : families) {
        j[name][family] = nlohmann::ordered_json::parse(bbmdp::spec_to_json(spec));
      }
    }
    *json = dup_string(j.dump(2));
  });
}

bbmdp_status bbmdp_policy_create(const char* spec, bbmdp_policy** out) {
  return guarded([&] {
    require(spec, "spec");
    require(out, "out");
    auto p = std::make_unique<bbmdp_policy>();
    p->entry = bbmdp::parse_policy(spec);
    p->impl = bbmdp::make_policy(p->entry);
    *out = p.release();
  });
}

void bbmdp_policy_free(bbmdp_policy* policy) { delete policy; }

bbmdp_status bbmdp_solve(const bbmdp_instance* inst, bbmdp_policy* policy, uint64_t seed, size_t max_nodes,
                         char** report_json, char** trace_jsonl) {
  return guarded([&] {
    require(inst, "instance");
    require(policy, "policy");
    require(report_json, "report_json");
    bbmdp::SolveLimits limits;
    if (max_nodes > 0) limits.max_nodes = max_nodes;
    const auto report = bbmdp::solve(inst->value, *policy->impl, policy->entry.selection, limits, seed);
    auto j = nlohmann::ordered_json::parse(bbmdp::solve_report_json(report));
    j["branching"] = policy->entry.label;
    std::string trace;
    if (trace_jsonl) {
      bbmdp::EnvConfig env;
      env.reward_per_transition = -2.0;
      env.selection = policy->entry.selection;
      env.max_steps = (limits.max_nodes - 1) / 2;
      trace = bbmdp::episode_trace_jsonl(bbmdp::rollout(inst->value, *policy->impl, env, seed));
    }
    *report_json = dup_string(j.dump());
    if (trace_jsonl) *trace_jsonl = dup_string(trace);
  });
}

bbmdp_status bbmdp_brute_force(const bbmdp_instance* inst, size_t cap, char** result_json) {
  return guarded([&] {
    require(inst, "instance");
    require(result_json, "result_json");
    const auto r = bbmdp::brute_force_optimum(inst->value, cap > 0 ? cap : (1u << 20));
    nlohmann::ordered_json j;
    if (r.objective) {
      j["objective"] = *r.objective;
    } else {
      j["objective"] = nullptr;
    }
    j["evaluations"] = r.evaluations;
    *result_json = dup_string(j.dump());
  });
}

bbmdp_status bbmdp_train(const char* config_json, const char* checkpoint_path, char** result_json) {
  return guarded([&] {
    require(config_json, "config_json");
    require(result_json, "result_json");
    auto config = bbmdp::TrainConfig::from_json(config_json);
    if (checkpoint_path) config.checkpoint_path = checkpoint_path;
    const auto result = bbmdp::train(config);
    nlohmann::ordered_json j;
    j["config_hash"] = result.config_hash;
    j["gradient_steps"] = result.gradient_steps;
    j["agent_steps"] = result.agent_steps;
    j["episodes"] = result.episodes;
    j["truncated_episodes"] = result.truncated_episodes;
    j["parameter_hash"] = bbmdp::fnv1a64(std::string_view(
        reinterpret_cast<const char*>(result.qfn.parameters().data()), result.qfn.parameter_count() * sizeof(double)));
    j["curve"] = nlohmann::ordered_json::parse(bbmdp::curve_json(result.curve));
    *result_json = dup_string(j.dump(2));
  });
}

bbmdp_status bbmdp_default_train_config(char** json) {
  return guarded([&] {
    require(json, "json");
    *json = dup_string(bbmdp::TrainConfig{}.to_json());
  });
}

bbmdp_status bbmdp_evaluate(const bbmdp_instance* const* instances, size_t num_instances,
                            const char* const* policies, size_t num_policies, const uint64_t* seeds,
                            size_t num_seeds, size_t max_nodes, const char* reference, char** csv, char** json) {
  return guarded([&] {
    if (num_instances > 0) require(instances, "instances");
    if (num_policies > 0) require(policies, "policies");
    if (num_seeds > 0) require(seeds, "seeds");
    std::vector<bbmdp::MilpInstance> insts;
    for (size_t i = 0; i < num_instances; ++i) {
      require(instances[i], "instance");
      insts.push_back(instances[i]->value);
    }
    std::vector<bbmdp::PolicyEntry> entries;
    for (size_t i = 0; i < num_policies; ++i) {
      require(policies[i], "policy");
      entries.push_back(bbmdp::parse_policy(policies[i]));
    }
    std::vector<std::uint64_t> seed_list(seeds, seeds + num_seeds);
    bbmdp::SolveLimits limits;
    if (max_nodes > 0) limits.max_nodes = max_nodes;
    std::optional<std::string> ref;
    if (reference && *reference) ref = reference;
    const auto report = bbmdp::evaluate(entries, insts, seed_list, limits, ref);
    if (csv) *csv = dup_string(bbmdp::report_csv(report));
    if (json) *json = dup_string(bbmdp::report_json(report));
  });
}

bbmdp_status bbmdp_verify(const char* suite, size_t scope, uint64_t seed, size_t k, int* passed,
                          char** report_json) {
  return guarded([&] {
    require(suite, "suite");
    const auto report = bbmdp::verify(suite, scope, seed, k > 0 ? k : 3);
    if (passed) *passed = report.passed() ? 1 : 0;
    if (report_json) *report_json = dup_string(bbmdp::verify_json(report));
  });
}

}  // extern "C"
