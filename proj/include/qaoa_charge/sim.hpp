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

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <json.hpp>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bits.hpp"
#include "error.hpp"
#include "ising.hpp"
#include "noise.hpp"
#include "random.hpp"

namespace qcharge {

using Complex = std::complex<double>;

/// Amplitudes over 2^n basis states; bit i of the index m is qubit i.
struct Statevector {
  std::size_t n = 0;
  std::vector<Complex> amplitudes;

  static Statevector uniform(std::size_t n) {
    require_qubit_cap(n);
    const std::uint64_t dim = std::uint64_t{1} << n;
    return {n, std::vector<Complex>(dim, Complex(1.0 / std::sqrt(static_cast<double>(dim)), 0.0))};
  }

  static Statevector basis(std::size_t n, std::uint64_t m) {
    require_qubit_cap(n);
    Statevector s{n, std::vector<Complex>(std::uint64_t{1} << n)};
    detail::require(m < s.amplitudes.size(), "basis index out of range");
    s.amplitudes[m] = 1.0;
    return s;
  }

  std::uint64_t dimension() const { return amplitudes.size(); }

  double norm_squared() const {
    double s = 0.0;
    for (const auto& a : amplitudes) s += std::norm(a);
    return s;
  }

  std::vector<double> probabilities() const {
    std::vector<double> p(amplitudes.size());
    for (std::size_t m = 0; m < p.size(); ++m) p[m] = std::norm(amplitudes[m]);
    return p;
  }
};

/// betas[l] and gammas[l] are the mixer and phase angles of layer l.
struct QaoaParameters {
  std::vector<double> betas;
  std::vector<double> gammas;

  std::size_t layers() const { return betas.size(); }

  void validate() const {
    detail::require(betas.size() == gammas.size(), "betas and gammas must have equal length");
  }

  /// Flat layout [betas..., gammas...].
  std::vector<double> flat() const {
    std::vector<double> x(betas);
    x.insert(x.end(), gammas.begin(), gammas.end());
    return x;
  }

  static QaoaParameters from_flat(const std::vector<double>& x) {
    detail::require(x.size() % 2 == 0, "flat parameter vector must have even length");
    const auto p = static_cast<std::ptrdiff_t>(x.size() / 2);
    return {{x.begin(), x.begin() + p}, {x.begin() + p, x.end()}};
  }
};

/// Multiplies amplitude m by exp(-i gamma energies[m]).
inline void apply_phase(Statevector& state, const std::vector<double>& energies, double gamma) {
  detail::require(energies.size() == state.dimension(), "energy table does not match state dimension");
  for (std::size_t m = 0; m < energies.size(); ++m) {
    const double phi = -gamma * energies[m];
    state.amplitudes[m] *= Complex(std::cos(phi), std::sin(phi));
  }
}

inline Statevector apply_phase_layer(Statevector state, const IsingHamiltonian& h, double gamma) {
  detail::require(h.n == state.n, "Hamiltonian and state have different qubit counts");
  apply_phase(state, diagonal_energies(h), gamma);
  return state;
}

/// RX(2 beta) on every qubit.
inline void apply_mixer(Statevector& state, double beta) {
  const double c = std::cos(beta);
  const Complex ms(0.0, -std::sin(beta));
  const std::uint64_t dim = state.dimension();
  auto& a = state.amplitudes;
  for (std::size_t k = 0; k < state.n; ++k) {
    const std::uint64_t stride = std::uint64_t{1} << k;
    for (std::uint64_t base = 0; base < dim; base += 2 * stride) {
      for (std::uint64_t m = base; m < base + stride; ++m) {
        const Complex a0 = a[m];
        const Complex a1 = a[m + stride];
        a[m] = c * a0 + ms * a1;
        a[m + stride] = ms * a0 + c * a1;
      }
    }
  }
}

inline Statevector apply_mixer_layer(Statevector state, double beta) {
  apply_mixer(state, beta);
  return state;
}

/// Runs the ansatz from a precomputed energy table.
inline Statevector qaoa_state(std::size_t n, const std::vector<double>& energies,
                              const QaoaParameters& params) {
  params.validate();
  Statevector s = Statevector::uniform(n);
  for (std::size_t l = 0; l < params.layers(); ++l) {
    apply_phase(s, energies, params.gammas[l]);
    apply_mixer(s, params.betas[l]);
  }
  return s;
}

inline Statevector qaoa_state(const IsingHamiltonian& h, const QaoaParameters& params) {
  return qaoa_state(h.n, diagonal_energies(h), params);
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

struct Counts {
  std::int64_t shots = 0;
  BitOrder order = BitOrder::device;
  std::map<std::string, std::int64_t> counts;

  bool operator==(const Counts&) const = default;
};

/// Measured basis indices; readout flips applied per bit when noise is given.
inline std::vector<std::uint64_t> sample_indices(const Statevector& state, std::int64_t shots,
                                                 std::uint64_t seed,
                                                 const std::optional<ReadoutNoiseModel>& noise = {}) {
  detail::require(shots >= 1, "shots must be >= 1");
  if (noise) {
    noise->validate();
    noise->require_covers(state.n);
  }
  std::vector<double> cdf(state.dimension());
  double acc = 0.0;
  for (std::size_t m = 0; m < cdf.size(); ++m) {
    acc += std::norm(state.amplitudes[m]);
    cdf[m] = acc;
  }
  Rng rng(seed);
  std::vector<std::uint64_t> out;
  out.reserve(static_cast<std::size_t>(shots));
  for (std::int64_t s = 0; s < shots; ++s) {
    const double u = rng.uniform() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    std::uint64_t m = static_cast<std::uint64_t>(it - cdf.begin());
    if (noise) {
      for (std::size_t k = 0; k < state.n; ++k) {
        const bool one = ((m >> k) & 1U) != 0;
        const double flip = one ? noise->p10[k] : noise->p01[k];
        if (rng.uniform() < flip) m ^= std::uint64_t{1} << k;
      }
    }
    out.push_back(m);
  }
  return out;
}

inline Counts sample_counts(const Statevector& state, std::int64_t shots, std::uint64_t seed,
                            const std::optional<ReadoutNoiseModel>& noise = {},
                            BitOrder order = BitOrder::device) {
  std::map<std::uint64_t, std::int64_t> tally;
  for (auto m : sample_indices(state, shots, seed, noise)) ++tally[m];
  Counts c;
  c.shots = shots;
  c.order = order;
  for (const auto& [m, k] : tally) c.counts[render_index(m, state.n, order)] = k;
  return c;
}

inline nlohmann::json counts_to_json(const Counts& c) {
  nlohmann::json counts = nlohmann::json::object();
  for (const auto& [k, v] : c.counts) counts[k] = v;
  return {{"shots", c.shots}, {"bit_order", to_string(c.order)}, {"counts", counts}};
}

inline Counts counts_from_json(const nlohmann::json& doc) {
  Counts c;
  try {
    c.shots = doc.at("shots").get<std::int64_t>();
    c.order = parse_bit_order(doc.value("bit_order", std::string("device")));
    std::int64_t total = 0;
    std::size_t width = 0;
    for (const auto& [k, v] : doc.at("counts").items()) {
      parse_bits(k, c.order);
      if (width == 0) width = k.size();
      detail::require(k.size() == width, "counts keys have different lengths");
      const auto n = v.get<std::int64_t>();
      detail::require(n >= 0, "counts must be nonnegative");
      c.counts[k] = n;
      total += n;
    }
    detail::require(total == c.shots, "counts sum to " + std::to_string(total) +
                                          " but shots is " + std::to_string(c.shots));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed counts document: ") + e.what());
  }
  return c;
}

// ---------------------------------------------------------------------------
// Energy evaluation
// ---------------------------------------------------------------------------

struct EvaluationMode {
  bool exact = true;
  std::int64_t shots = 0;
  std::uint64_t seed = 0;

  static EvaluationMode exact_mode() { return {}; }
  static EvaluationMode shot_mode(std::int64_t shots, std::uint64_t seed) {
    return {false, shots, seed};
  }
};

/// Caches the energy table of a Hamiltonian so repeated evaluations only pay
/// for the layers.
class QaoaEvaluator {
 public:
  QaoaEvaluator(const IsingHamiltonian& h, double offset)
      : n_(h.n), offset_(offset), energies_(diagonal_energies(h)) {}

  std::size_t num_qubits() const { return n_; }
  double offset() const { return offset_; }
  const std::vector<double>& energies() const { return energies_; }

  Statevector state(const QaoaParameters& params) const { return qaoa_state(n_, energies_, params); }

  /// Expectation plus offset.
  double energy(const QaoaParameters& params, const EvaluationMode& mode = {}) const {
    const Statevector s = state(params);
    double value = 0.0;
    if (mode.exact) {
      for (std::size_t m = 0; m < energies_.size(); ++m) value += std::norm(s.amplitudes[m]) * energies_[m];
    } else {
      const auto draws = sample_indices(s, mode.shots, mode.seed);
      for (auto m : draws) value += energies_[m];
      value /= static_cast<double>(mode.shots);
    }
    return value + offset_;
  }

 private:
  std::size_t n_;
  double offset_;
  std::vector<double> energies_;
};

inline double energy_evaluation(const IsingHamiltonian& h, double offset, const QaoaParameters& params,
                                const EvaluationMode& mode = {}) {
  return QaoaEvaluator(h, offset).energy(params, mode);
}

}  // namespace qcharge
