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

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "bits.hpp"
#include "convert.hpp"
#include "error.hpp"
#include "numfmt.hpp"

namespace qcharge {

/// Diagonal cost Hamiltonian
///   H = sum_{i<j} h_ij Z_i Z_j + sum_i h'_i Z_i + h'' I.
/// The scalar offset produced by the QUBO substitution is kept outside;
/// identity_coefficient stays 0 for Hamiltonians built by qubo_to_ising.
struct IsingHamiltonian {
  using Pair = std::pair<std::size_t, std::size_t>;

  std::size_t n = 0;
  std::map<Pair, double> zz;
  Eigen::VectorXd z = Eigen::VectorXd::Zero(0);
  double identity_coefficient = 0.0;

  /// Rendering order of the terms: (i, i) is Z_i, (i, j) with i < j is Z_i Z_j.
  std::vector<Pair> term_order;

  std::size_t num_z_terms() const {
    std::size_t count = 0;
    for (Eigen::Index i = 0; i < z.size(); ++i) count += z(i) != 0.0 ? 1 : 0;
    return count;
  }
  std::size_t num_zz_terms() const { return zz.size(); }

  double coefficient(std::size_t i, std::size_t j) const {
    if (i == j) return z(static_cast<Eigen::Index>(i));
    auto it = zz.find({std::min(i, j), std::max(i, j)});
    return it == zz.end() ? 0.0 : it->second;
  }
};

struct IsingForm {
  IsingHamiltonian hamiltonian;
  double offset = 0.0;
};

inline constexpr double kPruneTolerance = 1e-12;

/// Substitutes b_i = (1 - z_i) / 2 into the QUBO.
inline IsingForm qubo_to_ising(const Qubo& q) {
  const std::size_t n = q.size();
  const auto ni = static_cast<Eigen::Index>(n);
  IsingForm out;
  auto& h = out.hamiltonian;
  h.n = n;
  h.z = Eigen::VectorXd::Zero(ni);
  double offset = q.constant;

  for (Eigen::Index i = 0; i < ni; ++i) {
    const double li = q.linear(i);
    h.z(i) -= li / 2.0;
    offset += li / 2.0;
  }
  // Column-major pass: order in which terms are first produced.
  std::vector<IsingHamiltonian::Pair> order;
  std::vector<bool> z_seen(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (q.linear(static_cast<Eigen::Index>(i)) != 0.0) {
      order.emplace_back(i, i);
      z_seen[i] = true;
    }
  }
  for (Eigen::Index j = 0; j < ni; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      const double a = q.quadratic(i, j);
      if (a == 0.0) continue;
      const auto ui = static_cast<std::size_t>(i);
      const auto uj = static_cast<std::size_t>(j);
      if (i == j) {
        h.z(i) -= a / 4.0;
        h.z(i) -= a / 4.0;
        offset += a / 4.0;
        offset += a / 4.0;
        if (!z_seen[ui]) {
          order.emplace_back(ui, ui);
          z_seen[ui] = true;
        }
      } else {
        h.zz[{ui, uj}] += a / 4.0;
        h.z(i) -= a / 4.0;
        h.z(j) -= a / 4.0;
        offset += a / 4.0;
        order.emplace_back(ui, uj);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!z_seen[i]) order.emplace_back(i, i);
  }

  for (auto it = h.zz.begin(); it != h.zz.end();) {
    it = std::abs(it->second) < kPruneTolerance ? h.zz.erase(it) : std::next(it);
  }
  for (Eigen::Index i = 0; i < ni; ++i) {
    if (std::abs(h.z(i)) < kPruneTolerance) h.z(i) = 0.0;
  }
  for (const auto& t : order) {
    if (h.coefficient(t.first, t.second) != 0.0) h.term_order.push_back(t);
  }
  out.offset = offset;
  return out;
}

/// Sum of h_ij z_i z_j + h'_i z_i + h'' with z_i = 1 - 2 b_i. The QUBO offset
/// is not included.
inline double ising_energy(const IsingHamiltonian& h, const BitVector& b) {
  require_binary(b, h.n);
  double e = h.identity_coefficient;
  for (std::size_t i = 0; i < h.n; ++i) {
    const double zi = b[i] ? -1.0 : 1.0;
    e += h.z(static_cast<Eigen::Index>(i)) * zi;
  }
  for (const auto& [ij, v] : h.zz) {
    e += (b[ij.first] == b[ij.second]) ? v : -v;
  }
  return e;
}

inline constexpr std::size_t kMaxQubits = 26;

inline void require_qubit_cap(std::size_t n) {
  if (n > kMaxQubits) {
    throw ResourceError("register of " + std::to_string(n) + " qubits exceeds the cap of " +
                        std::to_string(kMaxQubits));
  }
}

/// Energies of all 2^n basis states; entry m belongs to bits_of_index(m, n).
inline std::vector<double> diagonal_energies(const IsingHamiltonian& h) {
  require_qubit_cap(h.n);
  const std::uint64_t dim = std::uint64_t{1} << h.n;
  std::vector<double> e(dim, h.identity_coefficient);
  for (std::size_t i = 0; i < h.n; ++i) {
    const double c = h.z(static_cast<Eigen::Index>(i));
    if (c == 0.0) continue;
    for (std::uint64_t m = 0; m < dim; ++m) e[m] += ((m >> i) & 1U) ? -c : c;
  }
  for (const auto& [ij, c] : h.zz) {
    for (std::uint64_t m = 0; m < dim; ++m) {
      const bool odd = (((m >> ij.first) ^ (m >> ij.second)) & 1U) != 0;
      e[m] += odd ? -c : c;
    }
  }
  return e;
}

inline constexpr double kNormTolerance = 1e-6;

/// Expectation over a probability map (offset not included).
inline double expectation(const IsingHamiltonian& h, const std::map<BitVector, double>& weights) {
  double total = 0.0;
  double value = 0.0;
  for (const auto& [b, w] : weights) {
    detail::require(w >= 0.0, "probability weights must be nonnegative");
    total += w;
    value += w * ising_energy(h, b);
  }
  detail::require(std::abs(total - 1.0) <= kNormTolerance, "probability weights do not sum to 1");
  return value;
}

/// Expectation over an amplitude map, weights |lambda_b|^2 (offset not included).
inline double expectation(const IsingHamiltonian& h,
                          const std::map<BitVector, std::complex<double>>& amplitudes) {
  std::map<BitVector, double> weights;
  for (const auto& [b, a] : amplitudes) weights[b] += std::norm(a);
  return expectation(h, weights);
}

/// Expectation over a dense probability vector indexed by basis index.
inline double expectation(const IsingHamiltonian& h, const std::vector<double>& probabilities) {
  const auto energies = diagonal_energies(h);
  detail::require(probabilities.size() == energies.size(),
                  "probability vector length does not match 2^n");
  double total = 0.0;
  double value = 0.0;
  for (std::size_t m = 0; m < energies.size(); ++m) {
    total += probabilities[m];
    value += probabilities[m] * energies[m];
  }
  detail::require(std::abs(total - 1.0) <= kNormTolerance, "probability vector does not sum to 1");
  return value;
}

/// Pauli string of a term, e.g. Z_0 Z_1 on 8 qubits is "IIIIIIZZ" in device order.
inline std::string pauli_string(std::size_t n, std::size_t i, std::size_t j, BitOrder order) {
  BitVector mask(n, 0);
  mask[i] = 1;
  mask[j] = 1;
  std::string s = render_bits(mask, order);
  for (auto& c : s) c = c == '1' ? 'Z' : 'I';
  return s;
}

/// One term per line, "-3.3 * IIIIIIIZ" for the first and "+ 4.6 * IIIIIIZZ"
/// or "- 1.5 * IZIIIIII" after it.
inline std::string render_hamiltonian(const IsingHamiltonian& h, BitOrder order = BitOrder::device) {
  std::string out;
  bool first = true;
  auto emit = [&](double c, const std::string& label) {
    if (first) {
      out += repr(c);
      first = false;
    } else {
      out += c < 0 ? "- " : "+ ";
      out += repr(std::abs(c));
    }
    out += " * " + label + "\n";
  };
  if (h.identity_coefficient != 0.0) emit(h.identity_coefficient, std::string(h.n, 'I'));
  auto terms = h.term_order;
  if (terms.empty()) {
    for (std::size_t i = 0; i < h.n; ++i) {
      if (h.z(static_cast<Eigen::Index>(i)) != 0.0) terms.emplace_back(i, i);
    }
    for (const auto& entry : h.zz) terms.push_back(entry.first);
  }
  for (const auto& [i, j] : terms) emit(h.coefficient(i, j), pauli_string(h.n, i, j, order));
  if (first) out = "0\n";
  return out;
}

}  // namespace qcharge
