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


#include <catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>

#include "fixtures.hpp"

using namespace qcharge;

namespace {

IsingHamiltonian couplings(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                           bool with_z = false) {
  IsingHamiltonian h;
  h.n = n;
  h.z = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), with_z ? 0.5 : 0.0);
  for (const auto& p : pairs) h.zz[p] = 1.0;
  return h;
}

IsingHamiltonian complete(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  return couplings(n, pairs);
}

/// Fewest swaps of any greedy routing of one layer on a line: every visiting
/// order of the interactions and every choice of moving endpoint.
std::size_t min_line_swaps(std::vector<std::pair<std::size_t, std::size_t>> pending, std::vector<std::size_t> l2p) {
  if (pending.empty()) return 0;
  std::size_t best = std::numeric_limits<std::size_t>::max();
  for (std::size_t k = 0; k < pending.size(); ++k) {
    auto rest = pending;
    const auto [i, j] = rest[k];
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(k));
    for (int mover_is_i = 0; mover_is_i < 2; ++mover_is_i) {
      auto layout = l2p;
      const std::size_t mover = mover_is_i ? i : j;
      const std::size_t anchor = mover_is_i ? j : i;
      std::size_t swaps = 0;
      while (layout[mover] + 1 < layout[anchor] || layout[anchor] + 1 < layout[mover]) {
        const std::size_t here = layout[mover];
        const std::size_t next = here < layout[anchor] ? here + 1 : here - 1;
        for (auto& p : layout) {
          if (p == next) p = here;
        }
        layout[mover] = next;
        ++swaps;
      }
      best = std::min(best, swaps + min_line_swaps(rest, layout));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("logical gate profile") {
  const auto& h = fixtures::small_pipeline().ising.hamiltonian;
  CHECK(logical_gate_profile(h, 1) == LogicalGateProfile{16, 8, 8, 8});
  CHECK(logical_gate_profile(h, 2) == LogicalGateProfile{32, 16, 16, 8});
  CHECK(logical_gate_profile(h, 0) == LogicalGateProfile{0, 0, 0, 8});
  CHECK(logical_gate_profile(couplings(4, {}, true), 1).rzz == 0);
}

TEST_CASE("fully connected budgets") {
  const auto& h = fixtures::small_pipeline().ising.hamiltonian;
  CHECK(count_fully_connected(h, 1).cnot == 32);
  CHECK(count_fully_connected(h, 2).cnot == 64);
  const auto zero = count_fully_connected(h, 0);
  CHECK(zero.cnot == 0);
  CHECK(zero.single_qubit_hw == 8);
  CHECK(zero.swaps == 0);
  for (std::size_t p = 0; p <= 3; ++p) {
    const auto b = count_fully_connected(h, p);
    CHECK(b.single_qubit_hw == 8 + 2 * p * 8);
    CHECK(b.rz_virtual == 2 * 8 + p * (16 + 8 + 3 * 8));
  }
}

TEST_CASE("CNOT count is six per coupling at three layers") {
  Rng rng(14);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 2 + rng.below(7);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (rng.below(2)) pairs.emplace_back(i, j);
      }
    }
    CHECK(count_fully_connected(couplings(n, pairs), 3).cnot == 6 * pairs.size());
  }
}

TEST_CASE("hand-computed depth") {
  // H (1 SX) | CX, CX | RX (2 SX) on both qubits.
  const auto b = count_fully_connected(couplings(2, {{0, 1}}), 1);
  CHECK(b.depth == 5);
  CHECK(b.cnot == 2);
  CHECK(b.single_qubit_hw == 6);
  // Disjoint couplings run in parallel.
  CHECK(count_fully_connected(couplings(4, {{0, 1}, {2, 3}}), 1).depth == 5);
  CHECK(count_fully_connected(couplings(3, {{0, 1}, {1, 2}}), 1).depth == 7);
}

TEST_CASE("a distant pair on a three-qubit line needs one swap") {
  const auto h = couplings(3, {{0, 2}});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto r = route(h, CouplingMap::line(3), 1, seed);
    CHECK(r.budget.swaps == 1);
    CHECK(r.budget.cnot == 5);
    REQUIRE(r.schedule.size() == 2);
    CHECK(r.schedule[0].kind == RoutedOp::Kind::swap);
    CHECK(r.schedule[1].kind == RoutedOp::Kind::rzz);
  }
}

TEST_CASE("full connectivity never swaps") {
  const auto& h = fixtures::small_pipeline().ising.hamiltonian;
  const auto fc = count_fully_connected(h, 2);
  const auto sweep = best_of_seeds(h, CouplingMap::full(8), 2, {0, 1, 2, 3, 4});
  for (const auto& r : sweep.all) {
    CHECK(r.budget.swaps == 0);
    CHECK(r.budget.cnot == fc.cnot);
  }
  CHECK(sweep.best.seed == 0);
}

TEST_CASE("router reaches the exhaustive swap minimum on a four-qubit line") {
  const auto h = complete(4);
  const auto oracle = min_line_swaps({{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}, {0, 1, 2, 3});
  std::size_t best = std::numeric_limits<std::size_t>::max();
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto r = route(h, CouplingMap::line(4), 1, seed);
    REQUIRE(r.budget.swaps >= oracle);
    best = std::min(best, r.budget.swaps);
  }
  CHECK(best == oracle);
  CHECK(oracle == 3);
}

TEST_CASE("best of seeds picks the minimum, lower seed on ties") {
  const auto& h = fixtures::small_pipeline().ising.hamiltonian;
  std::vector<std::uint64_t> seeds(40);
  std::iota(seeds.begin(), seeds.end(), 0);
  const auto sweep = best_of_seeds(h, CouplingMap::line(8), 1, seeds);
  std::size_t min_cnot = std::numeric_limits<std::size_t>::max();
  for (const auto& r : sweep.all) min_cnot = std::min(min_cnot, r.budget.cnot);
  CHECK(sweep.best.budget.cnot == min_cnot);
  for (const auto& r : sweep.all) {
    if (r.budget.cnot == min_cnot) {
      CHECK(sweep.best.seed <= r.seed);
    }
  }
  std::vector<std::uint64_t> reversed(seeds.rbegin(), seeds.rend());
  CHECK(best_of_seeds(h, CouplingMap::line(8), 1, reversed).best.seed == sweep.best.seed);
  CHECK_THROWS_AS(best_of_seeds(h, CouplingMap::line(8), 1, {}), ValidationError);
}

TEST_CASE("routing on a long line varies with the seed") {
  const auto& h = fixtures::small_pipeline().ising.hamiltonian;
  std::vector<std::uint64_t> seeds(75);
  std::iota(seeds.begin(), seeds.end(), 0);
  const auto sweep = best_of_seeds(h, CouplingMap::line(27), 1, seeds);
  std::size_t lo = std::numeric_limits<std::size_t>::max();
  std::size_t hi = 0;
  for (const auto& r : sweep.all) {
    lo = std::min(lo, r.budget.cnot);
    hi = std::max(hi, r.budget.cnot);
  }
  CHECK(hi > lo);
}

TEST_CASE("routed schedules replay to valid adjacent interactions") {
  const auto& h = fixtures::small_pipeline().ising.hamiltonian;
  for (const auto& map : {CouplingMap::line(8), CouplingMap::ring(8), CouplingMap::line(12)}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const std::size_t layers = 2;
      const auto r = route(h, map, layers, seed);
      std::vector<std::size_t> l2p(h.n);
      std::iota(l2p.begin(), l2p.end(), 0);
      std::vector<std::size_t> p2l(map.n_qubits(), SIZE_MAX);
      for (std::size_t i = 0; i < h.n; ++i) p2l[i] = i;
      std::vector<std::map<IsingHamiltonian::Pair, int>> seen(layers);
      std::size_t swaps = 0;
      for (const auto& op : r.schedule) {
        REQUIRE(map.adjacent(op.physical_a, op.physical_b));
        if (op.kind == RoutedOp::Kind::swap) {
          REQUIRE(p2l[op.physical_a] == op.logical_a);
          REQUIRE(p2l[op.physical_b] == op.logical_b);
          std::swap(p2l[op.physical_a], p2l[op.physical_b]);
          if (p2l[op.physical_a] != SIZE_MAX) l2p[p2l[op.physical_a]] = op.physical_a;
          if (p2l[op.physical_b] != SIZE_MAX) l2p[p2l[op.physical_b]] = op.physical_b;
          ++swaps;
        } else {
          REQUIRE(l2p[op.logical_a] == op.physical_a);
          REQUIRE(l2p[op.logical_b] == op.physical_b);
          ++seen[op.layer][{op.logical_a, op.logical_b}];
        }
      }
      for (const auto& layer : seen) {
        REQUIRE(layer.size() == h.num_zz_terms());
        for (const auto& [pair, count] : layer) REQUIRE((count == 1 && h.zz.count(pair) == 1));
      }
      CHECK(swaps == r.budget.swaps);
      CHECK(l2p == r.final_layout);
    }
  }
}

TEST_CASE("routed budget identity and lower bound") {
  const auto& h = fixtures::small_pipeline().ising.hamiltonian;
  for (std::size_t layers = 1; layers <= 2; ++layers) {
    const auto base = count_fully_connected(h, layers);
    for (const auto& map : {CouplingMap::line(8), CouplingMap::ring(8), CouplingMap::full(8), CouplingMap::line(20)}) {
      for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const auto r = route(h, map, layers, seed);
        REQUIRE(r.budget.cnot == 2 * layers * h.num_zz_terms() + 3 * r.budget.swaps);
        REQUIRE(r.budget.cnot >= base.cnot);
        REQUIRE((r.budget.cnot == base.cnot) == (r.budget.swaps == 0));
        REQUIRE(r.budget.single_qubit_hw == base.single_qubit_hw);
      }
    }
  }
}

TEST_CASE("routing is deterministic per seed and across worker counts") {
  const auto& h = fixtures::small_pipeline().ising.hamiltonian;
  const auto a = route(h, CouplingMap::ring(8), 2, 5);
  const auto b = route(h, CouplingMap::ring(8), 2, 5);
  CHECK(a.budget == b.budget);
  CHECK(a.final_layout == b.final_layout);
  CHECK(a.schedule.size() == b.schedule.size());
  const std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7};
  CHECK(budget_csv(best_of_seeds(h, CouplingMap::line(8), 2, seeds, 1).all) ==
        budget_csv(best_of_seeds(h, CouplingMap::line(8), 2, seeds, 4).all));
}

TEST_CASE("coupling map validation") {
  const auto h = complete(4);
  CouplingMap split(4);
  split.add_edge(0, 1);
  split.add_edge(2, 3);
  CHECK_FALSE(split.connected());
  CHECK_THROWS_AS(route(h, split, 1, 0), ValidationError);
  CHECK_THROWS_AS(route(h, CouplingMap::line(3), 1, 0), ValidationError);
  CHECK_THROWS_AS(CouplingMap(3).add_edge(0, 3), ValidationError);
  CHECK_THROWS_AS(CouplingMap(3).add_edge(1, 1), ValidationError);
  CHECK(CouplingMap::ring(5).edges().size() == 5);
  CHECK(CouplingMap::full(5).edges().size() == 10);
}

TEST_CASE("coupling map and budget JSON") {
  const auto m = coupling_map_from_json(nlohmann::json::parse(R"({"n_qubits":3,"edges":[[0,1],[1,0],[2,1],[0,1]]})"));
  CHECK(m.edges().size() == 2);
  CHECK(coupling_map_to_json(m).dump() == R"({"edges":[[0,1],[1,2]],"n_qubits":3})");
  CHECK_THROWS_AS(coupling_map_from_json(nlohmann::json::parse(R"({"n_qubits":3,"edges":[[0,1,2]]})")),
                  ValidationError);
  CHECK_THROWS_AS(coupling_map_from_json(nlohmann::json::parse(R"({"edges":[]})")), ValidationError);

  const auto b = count_fully_connected(fixtures::small_pipeline().ising.hamiltonian, 2);
  CHECK(budget_from_json(budget_to_json(b)) == b);
  const auto csv = budget_csv({route(complete(3), CouplingMap::line(3), 1, 4)});
  CHECK(csv.rfind("seed,cnot,swaps,single_qubit_hw,depth\n4,", 0) == 0);
}
