// Copyright 2026 The endoid Authors
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

#ifndef ENDOID_TESTS_SUPPORT_MPS_READER_HPP_
#define ENDOID_TESTS_SUPPORT_MPS_READER_HPP_

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace endoid::testing {

/// Minimal MPS reader: enough structure to compare against a model.
struct MpsModel {
  std::vector<std::string> rows;             // constraint rows, file order
  std::map<std::string, char> row_sense;
  std::vector<std::string> columns;          // file order, unique
  std::size_t integer_columns = 0;
  std::map<std::string, double> objective;
  std::map<std::string, std::map<std::string, double>> entries;  // column -> row -> coef
  std::map<std::string, double> rhs;
  std::map<std::string, double> upper;
  std::map<std::string, double> lower;
};

/// Throws std::runtime_error on malformed input.
MpsModel parse_mps(std::string_view text);

}  // namespace endoid::testing

#endif  // ENDOID_TESTS_SUPPORT_MPS_READER_HPP_
