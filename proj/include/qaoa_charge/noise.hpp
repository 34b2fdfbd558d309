// Copyright 2026 The qaoa-charge Authors
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


#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "error.hpp"

namespace qcharge {

/// Independent per-qubit readout errors. p01[k] is the probability of
/// reading 1 on qubit k when 0 was prepared, p10[k] the reverse.
struct ReadoutNoiseModel {
  std::vector<double> p01;
  std::vector<double> p10;

  std::size_t size() const { return p01.size(); }

  static ReadoutNoiseModel uniform(std::size_t n, double p01, double p10) {
    ReadoutNoiseModel m{std::vector<double>(n, p01), std::vector<double>(n, p10)};
    m.validate();
    return m;
  }

  void validate() const {
    detail::require(p01.size() == p10.size(), "noise model p01 and p10 must have equal length");
    for (std::size_t k = 0; k < p01.size(); ++k) {
      detail::require(p01[k] >= 0.0 && p01[k] <= 0.5,
                      "noise model p01[" + std::to_string(k) + "] outside [0, 0.5]");
      detail::require(p10[k] >= 0.0 && p10[k] <= 0.5,
                      "noise model p10[" + std::to_string(k) + "] outside [0, 0.5]");
    }
  }

  void require_covers(std::size_t n) const {
    detail::require(size() == n, "noise model covers " + std::to_string(size()) +
                                     " qubits, expected " + std::to_string(n));
  }

  bool operator==(const ReadoutNoiseModel&) const = default;
};

inline nlohmann::json noise_to_json(const ReadoutNoiseModel& m) {
  return {{"p01", m.p01}, {"p10", m.p10}};
}

inline ReadoutNoiseModel noise_from_json(const nlohmann::json& doc) {
  ReadoutNoiseModel m;
  try {
    m.p01 = doc.at("p01").get<std::vector<double>>();
    m.p10 = doc.at("p10").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed noise model: ") + e.what());
  }
  m.validate();
  return m;
}

}  // namespace qcharge
