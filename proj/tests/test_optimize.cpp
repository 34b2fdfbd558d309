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
#include <cmath>
#include <numbers>

#include "fixtures.hpp"

using namespace qcharge;

namespace {

IsingHamiltonian single_z(double c) {
  IsingHamiltonian h;
  h.n = 1;
  h.z = Eigen::VectorXd::Constant(1, c);
  return h;
}

/// <psi|c Z|psi> for psi = RX(2 beta) exp(-i gamma c Z) |+>, by explicit 2x2 products.
double one_qubit_oracle(double c, double beta, double gamma) {
  using C = std::complex<double>;
  const C i(0, 1);
  Eigen::Matrix2cd phase;
  phase << std::exp(-i * gamma * c), 0, 0, std::exp(i * gamma * c);
  Eigen::Matrix2cd rx;
  rx << std::cos(beta), -i * std::sin(beta), -i * std::sin(beta), std::cos(beta);
  Eigen::Vector2cd plus(1 / std::sqrt(2.0), 1 / std::sqrt(2.0));
  const Eigen::Vector2cd psi = rx * phase * plus;
  return c * (std::norm(psi(0)) - std::norm(psi(1)));
}

}  // namespace

TEST_CASE("local minimizer on quadratics") {
  const auto one = minimize_local([](const std::vector<double>& x) { return (x[0] - 2) * (x[0] - 2); }, {0.0});
  CHECK(std::abs(one.final[0] - 2.0) <= 1e-3);
  CHECK(one.final_value <= 1e-6);
  CHECK(one.converged);

  const auto two = minimize_local(
      [](const std::vector<double>& x) { return (x[0] - 1) * (x[0] - 1) + 10 * (x[1] + 3) * (x[1] + 3); }, {0.0, 0.0});
  CHECK(std::abs(two.final[0] - 1.0) <= 1e-3);
  CHECK(std::abs(two.final[1] + 3.0) <= 1e-3);
  CHECK(two.initial == std::vector<double>{0.0, 0.0});
  CHECK(two.initial_value == Catch::Approx(91.0));
}

TEST_CASE("local minimizer on the one-qubit energy") {
  const QaoaEvaluator eval(single_z(1.0), 0.0);
  const auto run = minimize_local(
      [&](const std::vector<double>& x) { return eval.energy(QaoaParameters::from_flat(x)); }, {0.3, 0.4});
  CHECK(std::abs(run.final_value + 1.0) <= 1e-3);

  double grid_min = 1e300;
  for (const double b : linspace(0, std::numbers::pi, 201)) {
    for (const double g : linspace(0, 2 * std::numbers::pi, 401)) grid_min = std::min(grid_min, one_qubit_oracle(1.0, b, g));
  }
  CHECK(run.final_value <= grid_min + 1e-6);
}

TEST_CASE("local minimizer limits and errors") {
  int calls = 0;
  LocalOptions opts;
  opts.max_fev = 17;
  const auto run = minimize_local(
      [&](const std::vector<double>& x) {
        ++calls;
        return std::cos(3 * x[0]) + x[1] * x[1];
      },
      {0.1, 0.7}, opts);
  CHECK(run.nfev <= 17);
  CHECK(calls == run.nfev);
  CHECK_FALSE(run.converged);

  CHECK_THROWS_AS(minimize_local([](const std::vector<double>& x) { return x[0] > 0.1 ? NAN : x[0]; }, {0.0}),
                  ValidationError);
  CHECK_THROWS_AS(minimize_local([](const std::vector<double>&) { return 0.0; }, {}), ValidationError);
}

TEST_CASE("local minimizer never ends above its start") {
  Rng rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    const double a = rng.uniform(-3, 3);
    const double b = rng.uniform(-3, 3);
    const std::vector<double> x0{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)};
    const auto run = minimize_local(
        [&](const std::vector<double>& x) {
          return std::sin(a * x[0]) * std::cos(b * x[1]) + 0.1 * x[2] * x[2] + std::sin(x[0] * x[2]);
        },
        x0);
    REQUIRE(run.final_value <= run.initial_value + 1e-12);
  }
}

TEST_CASE("canonicalized angles lie in [0, 2 pi)") {
  const auto x = canonicalize_angles({-0.5, 7.0, 2 * std::numbers::pi, 1.0});
  for (double v : x) {
    CHECK(v >= 0.0);
    CHECK(v < 2 * std::numbers::pi);
  }
  CHECK(std::abs(x[0] - (2 * std::numbers::pi - 0.5)) <= 1e-12);
  CHECK(std::abs(x[1] - (7.0 - 2 * std::numbers::pi)) <= 1e-12);
  CHECK(x[3] == 1.0);
}

TEST_CASE("random starts cover the sampling box and depend only on (seed, k)") {
  for (std::size_t k = 0; k < 200; ++k) {
    const auto p = random_start(3, 5, k);
    REQUIRE(p.layers() == 3);
    for (double b : p.betas) REQUIRE((b >= 0.0 && b <= std::numbers::pi));
    for (double g : p.gammas) REQUIRE((g >= 0.0 && g <= 2 * std::numbers::pi));
  }
  CHECK(random_start(2, 5, 3).flat() == random_start(2, 5, 3).flat());
  CHECK(random_start(2, 5, 3).flat() != random_start(2, 5, 4).flat());
}

TEST_CASE("single start equals a local run from the seeded start") {
  const auto p = fixtures::small_pipeline();
  const QaoaEvaluator eval(p.ising.hamiltonian, p.ising.offset);
  const auto ms = multi_start(eval, 1, 1, 9);
  const auto local = minimize_local(
      [&](const std::vector<double>& x) { return eval.energy(QaoaParameters::from_flat(x)); },
      random_start(1, 9, 0).flat());
  REQUIRE(ms.runs.size() == 1);
  CHECK(ms.runs[0].final == local.final);
  CHECK(ms.runs[0].final_value == local.final_value);
  CHECK(ms.runs[0].seed == derive_seed(9, 0));
}

TEST_CASE("multi-start is deterministic across worker counts") {
  const auto p = fixtures::small_pipeline();
  const QaoaEvaluator eval(p.ising.hamiltonian, p.ising.offset);
  const auto a = multi_start(eval, 1, 6, 3, {}, {}, 1);
  const auto b = multi_start(eval, 1, 6, 3, {}, {}, 4);
  REQUIRE(a.runs.size() == b.runs.size());
  for (std::size_t k = 0; k < a.runs.size(); ++k) {
    CHECK(run_to_json(a.runs[k]).dump() == run_to_json(b.runs[k]).dump());
  }
  CHECK(a.best == b.best);

  std::vector<double> finals;
  for (const auto& r : a.runs) {
    finals.push_back(r.final_value);
    CHECK(r.final_value <= r.initial_value + 1e-12);
    CHECK(r.final_value >= a.best_run().final_value);
  }
  std::sort(finals.begin(), finals.end());
  CHECK(a.best_run().final_value <= finals[finals.size() / 2]);
  CHECK_THROWS_AS(multi_start(eval, 1, 0, 3), ValidationError);
}

TEST_CASE("shot-mode multi-start is reproducible") {
  const auto p = fixtures::small_pipeline();
  const QaoaEvaluator eval(p.ising.hamiltonian, p.ising.offset);
  LocalOptions opts;
  opts.max_fev = 40;
  const auto mode = EvaluationMode::shot_mode(500, 11);
  const auto a = multi_start(eval, 1, 3, 4, mode, opts, 1);
  const auto b = multi_start(eval, 1, 3, 4, mode, opts, 3);
  for (std::size_t k = 0; k < 3; ++k) CHECK(a.runs[k].final == b.runs[k].final);
}

TEST_CASE("one-qubit landscape matches the 2x2 oracle") {
  for (const double c : {1.0, -0.7, 2.3}) {
    const QaoaEvaluator eval(single_z(c), 0.0);
    const auto l = landscape_grid(eval, 31, 61);
    REQUIRE(l.betas.front() == 0.0);
    REQUIRE(l.betas.back() == std::numbers::pi);
    REQUIRE(l.gammas.back() == 2 * std::numbers::pi);
    double worst = 0.0;
    for (std::size_t j = 0; j < l.betas.size(); ++j) {
      for (std::size_t k = 0; k < l.gammas.size(); ++k) {
        worst = std::max(worst, std::abs(l.values[j][k] - one_qubit_oracle(c, l.betas[j], l.gammas[k])));
      }
    }
    CHECK(worst <= 1e-9);
  }
}

TEST_CASE("landscape rows, periodicity and subgrid minimum") {
  const auto p = fixtures::small_pipeline();
  const QaoaEvaluator eval(p.ising.hamiltonian, p.ising.offset);
  const auto l = landscape_grid(eval, 10, 21);
  const double mean = eval.energy(QaoaParameters{});
  for (double v : l.values.front()) CHECK(std::abs(v - mean) <= 1e-9);
  for (std::size_t k = 0; k < l.gammas.size(); ++k) {
    CHECK(std::abs(l.values.front()[k] - l.values.back()[k]) <= 1e-9);
  }
  for (std::size_t j = 0; j < l.betas.size(); ++j) {
    for (std::size_t k = 0; k < l.gammas.size(); k += 5) {
      const double shifted = eval.energy({{l.betas[j] + std::numbers::pi}, {l.gammas[k]}});
      REQUIRE(std::abs(shifted - l.values[j][k]) <= 1e-9);
    }
  }

  const auto fine = landscape_grid(eval, 19, 41);
  auto grid_min = [](const Landscape& g) {
    double m = 1e300;
    for (const auto& row : g.values) m = std::min(m, *std::min_element(row.begin(), row.end()));
    return m;
  };
  CHECK(grid_min(fine) <= grid_min(l) + 1e-12);  // 10x21 nodes are a subset of 19x41
  CHECK(landscape_grid(eval, 19, 41, 3).values == fine.values);
  CHECK_THROWS_AS(landscape_grid(eval, 1, 5), ValidationError);
}

TEST_CASE("landscape exports") {
  const QaoaEvaluator eval(single_z(1.0), 0.0);
  const auto l = landscape_grid(eval, 2, 3);
  const auto csv = landscape_csv(l);
  CHECK(csv.rfind("beta,gamma,energy\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
  CHECK(csv.find("\n0.0,0.0,") != std::string::npos);
  const auto doc = landscape_to_json(l);
  CHECK(doc.at("energy").size() == 2);
  CHECK(doc.at("energy")[0].size() == 3);
  CHECK(doc.at("gammas").get<std::vector<double>>() == l.gammas);
}
