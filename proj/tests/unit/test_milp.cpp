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

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include "bbmdp/milp.hpp"
#include "support.hpp"

using namespace bbmdp;

TEST_CASE("instance round-trips through JSON") {
  MilpInstance inst = testing::binary_instance({1, -2, 3}, {{1, 1, 0}, {0, 2, -1}}, {1, 0.5});
  inst.lower[2] = -kInf;
  inst.upper[2] = kInf;
  inst.integer_indices = {0, 1};
  const std::string text = serialize_instance(inst);
  CHECK(text.find("\"-inf\"") != std::string::npos);
  CHECK(text.find("\"+inf\"") != std::string::npos);
  CHECK(parse_instance(text) == inst);
  CHECK(serialize_instance(parse_instance(text)) == text);
}

TEST_CASE("greater-equal and equality rows become less-equal rows") {
  const std::string doc = R"({"name":"s","num_vars":2,"objective":[1,1],"lower":[0,0],"upper":[4,4],
    "integer":[0,1],"rows":[{"coeffs":[[1,2.0],[0,1.0]],"rhs":3,"sense":">="},
                           {"coeffs":[[0,1.0]],"rhs":1,"sense":"="}]})";
  const MilpInstance inst = parse_instance(doc);
  REQUIRE(inst.rows.size() == 3);
  CHECK(inst.rows[0].rhs == -3.0);
  CHECK(inst.rows[0].coeffs[0].col == 0);
  CHECK(inst.rows[0].coeffs[0].val == -1.0);
  CHECK(inst.rows[0].coeffs[1].val == -2.0);
  CHECK(inst.rows[1].rhs == 1.0);
  CHECK(inst.rows[2].rhs == -1.0);
}

TEST_CASE("parse errors carry their category") {
  CHECK(testing::error_code_of([] { parse_instance("{not json"); }) == ErrorCode::MalformedDocument);
  CHECK(testing::error_code_of([] { parse_instance(R"({"name":"x"})"); }) == ErrorCode::SchemaViolation);
  const std::string bad_sentinel = R"({"name":"s","num_vars":1,"objective":[1],"lower":["+inf"],
    "upper":[1],"integer":[],"rows":[]})";
  CHECK(testing::error_code_of([&] { parse_instance(bad_sentinel); }) == ErrorCode::SchemaViolation);
  const std::string bad_sense = R"({"name":"s","num_vars":1,"objective":[1],"lower":[0],
    "upper":[1],"integer":[],"rows":[{"coeffs":[[0,1]],"rhs":1,"sense":"<"}]})";
  CHECK(testing::error_code_of([&] { parse_instance(bad_sense); }) == ErrorCode::SchemaViolation);
  const std::string short_vec = R"({"name":"s","num_vars":2,"objective":[1],"lower":[0,0],
    "upper":[1,1],"integer":[],"rows":[]})";
  CHECK(testing::error_code_of([&] { parse_instance(short_vec); }) == ErrorCode::SchemaViolation);
}

TEST_CASE("validation reports structural problems") {
  MilpInstance inst = testing::binary_instance({1, 1}, {{1, 1}}, {1});
  CHECK(validate(inst).empty());
  inst.lower[0] = 2.0;
  CHECK_FALSE(validate(inst).empty());
  inst.lower[0] = 0.0;
  inst.upper[1] = kInf;
  CHECK_FALSE(validate(inst).empty());  // unbounded integer variable
  inst.upper[1] = 1.0;
  inst.rows[0].coeffs.push_back({7, 1.0});
  CHECK_FALSE(validate(inst).empty());
  CHECK(testing::error_code_of([&] { require_valid(inst); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("bound changes tighten one side") {
  const MilpInstance inst = testing::binary_instance({1, 1}, {{1, 1}}, {1});
  const MilpInstance down = apply_bound_change(inst, {1, BoundDirection::TightenUpper, 0.0});
  CHECK(down.upper[1] == 0.0);
  CHECK(down.lower[1] == 0.0);
  CHECK(inst.upper[1] == 1.0);
  CHECK(testing::error_code_of([&] { apply_bound_change(inst, {1, BoundDirection::TightenLower, 0.5}); }) ==
        ErrorCode::InvalidArgument);
  CHECK(testing::error_code_of([&] { apply_bound_change(inst, {5, BoundDirection::TightenLower, 1.0}); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("objective evaluation") {
  const MilpInstance inst = testing::binary_instance({2, -3, 0.5}, {}, {});
  CHECK(dot_objective(inst, {1, 1, 1}) == doctest::Approx(-0.5));
}

TEST_CASE("instance files") {
  const auto path = std::filesystem::temp_directory_path() / "bbmdp_test_instance.json";
  const MilpInstance inst = testing::binary_instance({1, 2}, {{1, 1}}, {1});
  write_instance_file(inst, path.string());
  CHECK(read_instance_file(path.string()) == inst);
  std::filesystem::remove(path);
  CHECK(testing::error_code_of([&] { read_instance_file(path.string()); }) == ErrorCode::Io);
}
