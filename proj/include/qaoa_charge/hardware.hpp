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
#include <cstdint>
#include <deque>
#include <json.hpp>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "ising.hpp"
#include "noise.hpp"
#include "parallel.hpp"
#include "random.hpp"

namespace qcharge {

// ---------------------------------------------------------------------------
// Coupling maps
// ---------------------------------------------------------------------------

class CouplingMap {
 public:
  using Edge = std::pair<std::size_t, std::size_t>;

  CouplingMap() = default;
  explicit CouplingMap(std::size_t n_qubits) : n_(n_qubits), adj_(n_qubits) {}

  /// Undirected; reversed and repeated edges collapse to one.
  void add_edge(std::size_t a, std::size_t b) {
    detail::require(a < n_ && b < n_, "edge (" + std::to_string(a) + ", " + std::to_string(b) +
                                          ") outside [0, " + std::to_string(n_) + ")");
    detail::require(a != b, "self-loop on qubit " + std::to_string(a));
    if (edges_.insert({std::min(a, b), std::max(a, b)}).second) {
      adj_[a].push_back(b);
      adj_[b].push_back(a);
      std::sort(adj_[a].begin(), adj_[a].end());
      std::sort(adj_[b].begin(), adj_[b].end());
    }
  }

  static CouplingMap line(std::size_t n) {
    CouplingMap m(n);
    for (std::size_t i = 0; i + 1 < n; ++i) m.add_edge(i, i + 1);
    return m;
  }

  static CouplingMap ring(std::size_t n) {
    CouplingMap m = line(n);
    if (n > 2) m.add_edge(n - 1, 0);
    return m;
  }

  static CouplingMap full(std::size_t n) {
    CouplingMap m(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) m.add_edge(i, j);
    }
    return m;
  }

  std::size_t n_qubits() const { return n_; }
  const std::set<Edge>& edges() const { return edges_; }
  const std::vector<std::size_t>& neighbors(std::size_t q) const { return adj_.at(q); }

  bool adjacent(std::size_t a, std::size_t b) const {
    return edges_.count({std::min(a, b), std::max(a, b)}) != 0;
  }

  /// Hop distances from `source`; unreachable nodes get SIZE_MAX.
  std::vector<std::size_t> distances_from(std::size_t source) const {
    std::vector<std::size_t> dist(n_, std::numeric_limits<std::size_t>::max());
    std::deque<std::size_t> queue{source};
    dist[source] = 0;
    while (!queue.empty()) {
      const auto u = queue.front();
      queue.pop_front();
      for (auto v : adj_[u]) {
        if (dist[v] == std::numeric_limits<std::size_t>::max()) {
          dist[v] = dist[u] + 1;
          queue.push_back(v);
        }
      }
    }
    return dist;
  }

  bool connected() const {
    if (n_ == 0) return true;
    const auto d = distances_from(0);
    return std::none_of(d.begin(), d.end(), [](auto x) { return x == std::numeric_limits<std::size_t>::max(); });
  }

 private:
  std::size_t n_ = 0;
  std::set<Edge> edges_;
  std::vector<std::vector<std::size_t>> adj_;
};

inline nlohmann::json coupling_map_to_json(const CouplingMap& m) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [a, b] : m.edges()) edges.push_back({a, b});
  return {{"n_qubits", m.n_qubits()}, {"edges", edges}};
}

inline CouplingMap coupling_map_from_json(const nlohmann::json& doc) {
  try {
    CouplingMap m(doc.at("n_qubits").get<std::size_t>());
    for (const auto& e : doc.at("edges")) {
      detail::require(e.is_array() && e.size() == 2, "coupling map edges must be [a, b] pairs");
      m.add_edge(e[0].get<std::size_t>(), e[1].get<std::size_t>());
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed coupling map: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Gate accounting
// ---------------------------------------------------------------------------

struct LogicalGateProfile {
  std::size_t rzz = 0;
  std::size_t rz = 0;
  std::size_t rx = 0;
  std::size_t h = 0;

  bool operator==(const LogicalGateProfile&) const = default;
};

inline LogicalGateProfile logical_gate_profile(const IsingHamiltonian& h, std::size_t layers) {
  return {layers * h.num_zz_terms(), layers * h.num_z_terms(), layers * h.n, h.n};
}

struct GateBudget {
  std::size_t cnot = 0;
  std::size_t single_qubit_hw = 0;
  std::size_t rz_virtual = 0;
  std::size_t swaps = 0;
  std::size_t depth = 0;

  bool operator==(const GateBudget&) const = default;
};

/// Native-gate tally with a critical-path depth: CX and SX cost 1, RZ 0.
class HardwareTally {
 public:
  explicit HardwareTally(std::size_t n) : level_(n, 0) {}

  void rz(std::size_t) { ++budget_.rz_virtual; }

  void sx(std::size_t q) {
    ++budget_.single_qubit_hw;
    bump({q});
  }

  void cx(std::size_t a, std::size_t b) {
    ++budget_.cnot;
    bump({a, b});
  }

  /// RZ SX RZ.
  void hadamard(std::size_t q) {
    rz(q);
    sx(q);
    rz(q);
  }

  /// RZ SX RZ SX RZ.
  void rx(std::size_t q) {
    rz(q);
    sx(q);
    rz(q);
    sx(q);
    rz(q);
  }

  /// CX RZ CX.
  void rzz(std::size_t a, std::size_t b) {
    cx(a, b);
    rz(b);
    cx(a, b);
  }

  void swap(std::size_t a, std::size_t b) {
    ++budget_.swaps;
    cx(a, b);
    cx(b, a);
    cx(a, b);
  }

  GateBudget budget() const {
    GateBudget b = budget_;
    b.depth = level_.empty() ? 0 : *std::max_element(level_.begin(), level_.end());
    return b;
  }

 private:
  void bump(std::initializer_list<std::size_t> qubits) {
    std::size_t top = 0;
    for (auto q : qubits) top = std::max(top, level_.at(q));
    for (auto q : qubits) level_[q] = top + 1;
  }

  GateBudget budget_;
  std::vector<std::size_t> level_;
};

/// Budget on all-to-all connectivity. Per layer: RZZ terms in (i, j) order,
/// then RZ terms, then the RX mixer on every qubit.
inline GateBudget count_fully_connected(const IsingHamiltonian& h, std::size_t layers) {
  HardwareTally tally(h.n);
  for (std::size_t q = 0; q < h.n; ++q) tally.hadamard(q);
  for (std::size_t l = 0; l < layers; ++l) {
    for (const auto& [ij, c] : h.zz) tally.rzz(ij.first, ij.second);
    for (std::size_t q = 0; q < h.n; ++q) {
      if (h.z(static_cast<Eigen::Index>(q)) != 0.0) tally.rz(q);
    }
    for (std::size_t q = 0; q < h.n; ++q) tally.rx(q);
  }
  return tally.budget();
}

// ---------------------------------------------------------------------------
// Routing
// ---------------------------------------------------------------------------

struct RoutedOp {
  enum class Kind { swap, rzz };
  Kind kind;
  std::size_t layer;
  std::size_t physical_a;
  std::size_t physical_b;
  std::size_t logical_a;  // for swaps: logical qubits that sat on a and b before
  std::size_t logical_b;
};

struct RoutingResult {
  GateBudget budget;
  std::vector<RoutedOp> schedule;
  std::vector<std::size_t> final_layout;  // logical -> physical
  std::uint64_t seed = 0;
};

/// Greedy seeded router. Interactions of each layer are visited in a shuffled
/// order; a non-adjacent pair moves one endpoint (chosen at random) along a
/// random shortest path until it neighbours the other, swapping as it goes.
/// The layout persists across layers.
inline RoutingResult route(const IsingHamiltonian& h, const CouplingMap& map, std::size_t layers,
                           std::uint64_t seed) {
  detail::require(map.n_qubits() >= h.n, "coupling map has " + std::to_string(map.n_qubits()) +
                                             " qubits, Hamiltonian needs " + std::to_string(h.n));
  detail::require(map.connected(), "coupling map is not connected");
  const std::size_t np = map.n_qubits();
  constexpr auto none = std::numeric_limits<std::size_t>::max();

  std::vector<std::size_t> l2p(h.n);
  std::vector<std::size_t> p2l(np, none);
  for (std::size_t i = 0; i < h.n; ++i) {
    l2p[i] = i;
    p2l[i] = i;
  }

  Rng rng(seed);
  HardwareTally tally(np);
  RoutingResult out;
  out.seed = seed;
  for (std::size_t q = 0; q < h.n; ++q) tally.hadamard(q);

  std::vector<IsingHamiltonian::Pair> interactions;
  for (const auto& entry : h.zz) interactions.push_back(entry.first);

  auto do_swap = [&](std::size_t layer, std::size_t a, std::size_t b) {
    out.schedule.push_back({RoutedOp::Kind::swap, layer, a, b, p2l[a], p2l[b]});
    tally.swap(a, b);
    std::swap(p2l[a], p2l[b]);
    if (p2l[a] != none) l2p[p2l[a]] = a;
    if (p2l[b] != none) l2p[p2l[b]] = b;
  };

  for (std::size_t layer = 0; layer < layers; ++layer) {
    auto order = interactions;
    rng.shuffle(order);
    for (const auto& [i, j] : order) {
      const bool move_first = rng.below(2) == 0;
      const std::size_t mover = move_first ? i : j;
      const std::size_t anchor = move_first ? j : i;
      const auto dist = map.distances_from(l2p[anchor]);
      while (dist[l2p[mover]] > 1) {
        const std::size_t here = l2p[mover];
        std::vector<std::size_t> steps;
        for (auto v : map.neighbors(here)) {
          if (dist[v] + 1 == dist[here]) steps.push_back(v);
        }
        do_swap(layer, here, steps[rng.below(steps.size())]);
      }
      out.schedule.push_back({RoutedOp::Kind::rzz, layer, l2p[i], l2p[j], i, j});
      tally.rzz(l2p[i], l2p[j]);
    }
    for (std::size_t q = 0; q < h.n; ++q) {
      if (h.z(static_cast<Eigen::Index>(q)) != 0.0) tally.rz(l2p[q]);
    }
    for (std::size_t q = 0; q < h.n; ++q) tally.rx(l2p[q]);
  }
  out.budget = tally.budget();
  out.final_layout = l2p;
  return out;
}

/// One layer of routing.
inline RoutingResult route_layer(const IsingHamiltonian& h, const CouplingMap& map, std::uint64_t seed) {
  return route(h, map, 1, seed);
}

struct SeedSweep {
  RoutingResult best;
  std::vector<RoutingResult> all;
};

/// Routes once per seed; keeps the minimum CNOT count, lower seed on ties.
inline SeedSweep best_of_seeds(const IsingHamiltonian& h, const CouplingMap& map, std::size_t layers,
                               const std::vector<std::uint64_t>& seeds, std::size_t jobs = 1) {
  detail::require(!seeds.empty(), "seed list must be nonempty");
  SeedSweep sweep;
  sweep.all = parallel_map(seeds.size(), jobs, [&](std::size_t k) { return route(h, map, layers, seeds[k]); });
  std::size_t best = 0;
  for (std::size_t k = 1; k < sweep.all.size(); ++k) {
    const auto& a = sweep.all[k];
    const auto& b = sweep.all[best];
    if (a.budget.cnot < b.budget.cnot || (a.budget.cnot == b.budget.cnot && a.seed < b.seed)) best = k;
  }
  sweep.best = sweep.all[best];
  return sweep;
}

inline std::string budget_csv(const std::vector<RoutingResult>& runs) {
  std::ostringstream os;
  os << "seed,cnot,swaps,single_qubit_hw,depth\n";
  for (const auto& r : runs) {
    os << r.seed << ',' << r.budget.cnot << ',' << r.budget.swaps << ',' << r.budget.single_qubit_hw << ','
       << r.budget.depth << '\n';
  }
  return os.str();
}

inline nlohmann::json budget_to_json(const GateBudget& b) {
  return {{"cnot", b.cnot},   {"single_qubit_hw", b.single_qubit_hw}, {"rz_virtual", b.rz_virtual},
          {"swaps", b.swaps}, {"depth", b.depth}};
}

inline GateBudget budget_from_json(const nlohmann::json& doc) {
  GateBudget b;
  b.cnot = doc.at("cnot").get<std::size_t>();
  b.single_qubit_hw = doc.at("single_qubit_hw").get<std::size_t>();
  b.rz_virtual = doc.at("rz_virtual").get<std::size_t>();
  b.swaps = doc.at("swaps").get<std::size_t>();
  b.depth = doc.at("depth").get<std::size_t>();
  return b;
}

}  // namespace qcharge
