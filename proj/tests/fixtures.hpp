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

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "qaoa_charge.hpp"

namespace fixtures {

inline std::string data_path(const std::string& name) { return std::string(QAOA_CHARGE_DATA_DIR) + "/" + name; }

inline qcharge::ChargingUnit toy_unit() { return qcharge::unit_from_json(qcharge::read_json_file(data_path("toy.json"))); }

inline qcharge::ChargingUnit small_unit() {
  return qcharge::unit_from_json(qcharge::read_json_file(data_path("single_car.json")));
}

inline constexpr double kSmallRho = 3.6;
inline constexpr double kToyRho = 5.1;

/// Cost Hamiltonian of the single-car instance at rho = 3.6, one term per line.
inline const char* kSmallHamiltonian =
    "-3.3 * IIIIIIIZ\n"
    "- 6.599999999999998 * IIIIIIZI\n"
    "- 3.3000000000000007 * IIIIIZII\n"
    "- 6.6 * IIIIZIII\n"
    "- 3.2999999999999994 * IIIZIIII\n"
    "- 6.599999999999999 * IIZIIIII\n"
    "+ 4.6 * IIIIIIZZ\n"
    "+ 1.8 * IIIIIZIZ\n"
    "+ 3.6 * IIIIIZZI\n"
    "+ 3.6 * IIIIZIIZ\n"
    "+ 7.2 * IIIIZIZI\n"
    "+ 4.6 * IIIIZZII\n"
    "+ 1.8 * IIIZIIIZ\n"
    "+ 3.6 * IIIZIIZI\n"
    "+ 1.8 * IIIZIZII\n"
    "+ 3.6 * IIIZZIII\n"
    "+ 3.6 * IIZIIIIZ\n"
    "+ 7.2 * IIZIIIZI\n"
    "+ 3.6 * IIZIIZII\n"
    "+ 7.2 * IIZIZIII\n"
    "+ 4.6 * IIZZIIII\n"
    "- 1.5 * IZIIIIII\n"
    "+ 1.0 * ZZIIIIII\n"
    "- 3.0 * ZIIIIIII\n";

inline constexpr double kSmallOffset = 28.4;

/// Reference p = 2 angles and the resulting statevector entries.
inline const std::vector<double> kRefBetas{3.99890724, 2.72012026};
inline const std::vector<double> kRefGammas{6.11303759, 1.75840967};

struct AmplitudeRef {
  std::uint64_t index;
  std::complex<double> value;
};

inline const std::vector<AmplitudeRef> kRefAmplitudes{
    {0, {-2.19237435e-03, 4.73527294e-05}},  {1, {9.36596020e-03, 4.63441187e-03}},
    {2, {2.20883527e-06, 5.24193322e-04}},   {3, {8.90791252e-03, 6.83746374e-03}},
    {4, {9.36596020e-03, 4.63441187e-03}},   {5, {2.09261296e-02, 1.38949582e-01}},
    {6, {5.14211808e-06, -9.66312497e-04}},  {7, {-4.59808754e-03, 3.90829328e-02}},
    {8, {2.20883527e-06, 5.24193322e-04}},   {251, {8.24173563e-04, -8.22140766e-04}},
    {252, {-5.44605429e-04, -1.92611140e-03}}, {253, {3.05595401e-03, -2.21578751e-03}},
    {254, {8.24173563e-04, -8.22140766e-04}}, {255, {1.98750175e-03, -1.13018901e-04}},
};

/// Minimizer of the single-car QUBO, variable order.
inline const qcharge::BitVector kSmallBmin{0, 1, 1, 0, 1, 0, 0, 0};

/// Minimizer of the two-car QUBO at rho = 5.1, variable order.
inline const qcharge::BitVector kToyBmin{1, 0, 1, 1, 0, 0, 1, 0, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0,
                                          0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 1, 0, 1, 1, 0, 1, 1, 0};
/// Minimizer of the constrained two-car program.
inline const std::vector<std::int64_t> kToyQcioPmin{3, 2, 0, 3, 0, 0, 0, 0, 0, 3, 0, 3, 3, 3};
inline const std::vector<std::int64_t> kToyPmin{3, 1, 3, 1, 0, 0, 0, 0, 2, 0, 2, 2, 3, 3};

/// Leading row-major nonzeros of the two-car QUBO at rho = 5.1.
struct QuboEntry {
  std::size_t i;
  std::size_t j;
  double value;
};
inline const std::vector<QuboEntry> kToyLeadingTerms{
    {0, 0, 6.1},   {0, 1, 24.4},  {0, 2, 24.4},  {0, 3, 10.2},  {0, 4, 20.4},  {0, 5, 20.4},
    {0, 6, 10.2},  {0, 7, 20.4},  {0, 8, 20.4},  {0, 9, 10.2},  {0, 10, 20.4}, {0, 11, 20.4},
    {0, 21, 2.0},  {0, 22, 4.0},  {0, 23, 4.0},  {1, 1, 24.4},  {1, 2, 48.8},
};

struct SmallPipeline {
  qcharge::ChargingUnit unit;
  qcharge::QuadraticProgram qcio;
  qcharge::BinaryProgram binary;
  qcharge::IsingForm ising;
};

inline SmallPipeline small_pipeline(double rho = kSmallRho) {
  auto unit = small_unit();
  auto qcio = qcharge::build_qcio(unit);
  auto binary = qcharge::qcio_to_qubo(qcio, rho, qcharge::EncodingScheme::bounded_coefficient());
  auto ising = qcharge::qubo_to_ising(binary.qubo);
  return {std::move(unit), std::move(qcio), std::move(binary), std::move(ising)};
}

/// Peak-load objective computed directly from the schedule: sum over slots
/// of the squared total charging level.
inline double load_objective(const qcharge::ChargingUnit& unit, const std::vector<std::int64_t>& p) {
  const auto T = static_cast<std::size_t>(unit.time_slots());
  double total = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    double load = 0.0;
    for (std::size_t k = 0; k < unit.cars().size(); ++k) load += static_cast<double>(p[k * T + t]);
    total += load * load;
  }
  return total;
}

/// Squared energy mismatch sum_k (sum_{s in slots_k} p_ks - e_k)^2.
inline double energy_mismatch(const qcharge::ChargingUnit& unit, const std::vector<std::int64_t>& p) {
  const auto T = static_cast<std::size_t>(unit.time_slots());
  double total = 0.0;
  for (std::size_t k = 0; k < unit.cars().size(); ++k) {
    double e = -static_cast<double>(unit.cars()[k].required_energy);
    for (int s : unit.cars()[k].slots) e += static_cast<double>(p[k * T + static_cast<std::size_t>(s)]);
    total += e * e;
  }
  return total;
}

}  // namespace fixtures
