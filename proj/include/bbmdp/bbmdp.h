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

/* C interface to the bbmdp library. Every call returns a status code; on
 * failure the message is available from bbmdp_last_error() on the same
 * thread. Strings returned through char** are owned by the caller and must
 * be released with bbmdp_free_string. */

#ifndef BBMDP_BBMDP_H
#define BBMDP_BBMDP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define BBMDP_API __declspec(dllexport)
#else
#define BBMDP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bbmdp_status {
  BBMDP_OK = 0,
  BBMDP_ERR_INVALID_ARGUMENT = 1,
  BBMDP_ERR_MALFORMED_DOCUMENT = 2,
  BBMDP_ERR_SCHEMA_VIOLATION = 3,
  BBMDP_ERR_LP_ITERATION_LIMIT = 4,
  BBMDP_ERR_PRECONDITION = 5,
  BBMDP_ERR_CAP_EXCEEDED = 6,
  BBMDP_ERR_RESAMPLE_LIMIT = 7,
  BBMDP_ERR_NUMERIC = 8,
  BBMDP_ERR_IO = 9,
  BBMDP_ERR_INTERNAL = 10
} bbmdp_status;

typedef struct bbmdp_instance bbmdp_instance;
typedef struct bbmdp_policy bbmdp_policy;

BBMDP_API const char* bbmdp_status_string(bbmdp_status status);
BBMDP_API const char* bbmdp_last_error(void);
BBMDP_API void bbmdp_free_string(char* s);
BBMDP_API const char* bbmdp_version(void);

/* FNV-1a 64-bit hash of a byte string. */
BBMDP_API uint64_t bbmdp_content_hash(const char* bytes, size_t len);

/* Instances */
BBMDP_API bbmdp_status bbmdp_instance_read(const char* path, bbmdp_instance** out);
BBMDP_API bbmdp_status bbmdp_instance_parse(const char* json, size_t len, bbmdp_instance** out);
/* spec_json: {"family": "setcover"|"cauction"|"knapsack"|"indset", params..., "seed": n} */
BBMDP_API bbmdp_status bbmdp_instance_generate(const char* spec_json, bbmdp_instance** out);
BBMDP_API bbmdp_status bbmdp_instance_to_json(const bbmdp_instance* inst, char** out);
BBMDP_API bbmdp_status bbmdp_instance_write(const bbmdp_instance* inst, const char* path);
BBMDP_API bbmdp_status bbmdp_instance_info(const bbmdp_instance* inst, size_t* num_vars, size_t* num_cons,
                                           size_t* num_integer);
BBMDP_API const char* bbmdp_instance_name(const bbmdp_instance* inst);
BBMDP_API void bbmdp_instance_free(bbmdp_instance* inst);

/* Preset family spec ("tiny", "small", "paper-shape") with the seed replaced. */
BBMDP_API bbmdp_status bbmdp_preset_spec(const char* preset, const char* family, uint64_t seed, char** spec_json);
/* JSON object preset -> family -> spec. */
BBMDP_API bbmdp_status bbmdp_presets(char** json);

/* Branching policies: "<branching>[:<checkpoint>][@<selection>]" with branching in
 * random, mostfrac, sb, pseudocost, dqn and selection in dfs, bfs, bestbound. */
BBMDP_API bbmdp_status bbmdp_policy_create(const char* spec, bbmdp_policy** out);
BBMDP_API void bbmdp_policy_free(bbmdp_policy* policy);

/* Solves one instance. report_json receives the solve report; trace_jsonl,
 * when non-null, receives the episode trace (reward -2 per transition). */
BBMDP_API bbmdp_status bbmdp_solve(const bbmdp_instance* inst, bbmdp_policy* policy, uint64_t seed,
                                   size_t max_nodes, char** report_json, char** trace_jsonl);

/* Exhaustive optimum; JSON {"objective": x|null, "evaluations": n}. */
BBMDP_API bbmdp_status bbmdp_brute_force(const bbmdp_instance* inst, size_t cap, char** result_json);

/* Trains from a JSON config; writes the checkpoint to checkpoint_path when
 * non-null (overriding the config). result_json holds counters and the curve. */
BBMDP_API bbmdp_status bbmdp_train(const char* config_json, const char* checkpoint_path, char** result_json);
/* The default training config as JSON. */
BBMDP_API bbmdp_status bbmdp_default_train_config(char** json);

BBMDP_API bbmdp_status bbmdp_evaluate(const bbmdp_instance* const* instances, size_t num_instances,
                                      const char* const* policies, size_t num_policies, const uint64_t* seeds,
                                      size_t num_seeds, size_t max_nodes, const char* reference, char** csv,
                                      char** json);

/* suite: identities, codec, gradients, oracle, divergence. passed is 1 when
 * every check passed. */
BBMDP_API bbmdp_status bbmdp_verify(const char* suite, size_t scope, uint64_t seed, size_t k, int* passed,
                                    char** report_json);

#ifdef __cplusplus
}
#endif

#endif /* BBMDP_BBMDP_H */
