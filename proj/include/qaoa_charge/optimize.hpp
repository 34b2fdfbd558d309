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
#include <cstdint>
#include <functional>
#include <json.hpp>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "numfmt.hpp"
#include "parallel.hpp"
#include "random.hpp"
#include "sim.hpp"

namespace qcharge {

using Objective = std::function<double(const std::vector<double>&)>;

struct LocalOptions {
  int max_fev = 1000;
  double xtol = 1e-4;
  double ftol = 1e-6;
  double initial_step = 0.25;
};

struct OptimizationRun {
  std::vector<double> initial;
  std::vector<double> final;
  double initial_value = 0.0;
  double final_value = 0.0;
  int nfev = 0;
  bool converged = false;
  std::uint64_t seed = 0;
};

/// Nelder-Mead simplex descent. Stops when both the simplex diameter is
/// below xtol and the value spread is below ftol, or after max_fev calls.
inline OptimizationRun minimize_local(const Objective& f, const std::vector<double>& x0,
                                      const LocalOptions& options = {}) {
  detail::require(!x0.empty(), "starting point must be nonempty");
  detail::require(options.max_fev >= 1, "max_fev must be >= 1");
  const std::size_t d = x0.size();

  OptimizationRun run;
  run.initial = x0;
  auto eval = [&](const std::vector<double>& x) {
    const double v = f(x);
    ++run.nfev;
    if (!std::isfinite(v)) throw ValidationError("objective returned a non-finite value");
    return v;
  };

  std::vector<std::vector<double>> simplex(d + 1, x0);
  std::vector<double> values(d + 1);
  values[0] = eval(x0);
  run.initial_value = values[0];
  for (std::size_t i = 0; i < d && run.nfev < options.max_fev; ++i) {
    simplex[i + 1][i] += options.initial_step;
    values[i + 1] = eval(simplex[i + 1]);
  }
  if (run.nfev < static_cast<int>(d + 1)) {
    run.final = x0;
    run.final_value = values[0];
    return run;
  }

  std::vector<std::size_t> idx(d + 1);
  auto sort_simplex = [&] {
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return values[a] < values[b]; });
    std::vector<std::vector<double>> s2;
    std::vector<double> v2;
    for (auto i : idx) {
      s2.push_back(simplex[i]);
      v2.push_back(values[i]);
    }
    simplex = std::move(s2);
    values = std::move(v2);
  };
  auto blend = [&](const std::vector<double>& a, const std::vector<double>& b, double t) {
    std::vector<double> out(d);
    for (std::size_t k = 0; k < d; ++k) out[k] = a[k] + t * (b[k] - a[k]);
    return out;
  };

  for (;;) {
    sort_simplex();
    double diameter = 0.0;
    for (std::size_t i = 1; i <= d; ++i) {
      for (std::size_t k = 0; k < d; ++k) diameter = std::max(diameter, std::abs(simplex[i][k] - simplex[0][k]));
    }
    const double spread = values[d] - values[0];
    if (diameter < options.xtol && spread < options.ftol) {
      run.converged = true;
      break;
    }
    if (run.nfev >= options.max_fev) break;

    std::vector<double> centroid(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t k = 0; k < d; ++k) centroid[k] += simplex[i][k] / static_cast<double>(d);
    }
    const auto xr = blend(centroid, simplex[d], -1.0);
    const double fr = eval(xr);
    if (fr < values[0]) {
      if (run.nfev >= options.max_fev) {
        simplex[d] = xr;
        values[d] = fr;
        continue;
      }
      const auto xe = blend(centroid, simplex[d], -2.0);
      const double fe = eval(xe);
      if (fe < fr) {
        simplex[d] = xe;
        values[d] = fe;
      } else {
        simplex[d] = xr;
        values[d] = fr;
      }
      continue;
    }
    if (fr < values[d - 1]) {
      simplex[d] = xr;
      values[d] = fr;
      continue;
    }
    if (run.nfev >= options.max_fev) continue;
    const bool outside = fr < values[d];
    const auto xc = outside ? blend(centroid, xr, 0.5) : blend(centroid, simplex[d], 0.5);
    const double fc = eval(xc);
    if (fc < (outside ? fr : values[d])) {
      simplex[d] = xc;
      values[d] = fc;
      continue;
    }
    for (std::size_t i = 1; i <= d && run.nfev < options.max_fev; ++i) {
      simplex[i] = blend(simplex[0], simplex[i], 0.5);
      values[i] = eval(simplex[i]);
    }
  }
  sort_simplex();
  run.final = simplex[0];
  run.final_value = values[0];
  return run;
}

/// Maps every angle into [0, 2 pi) for display.
inline std::vector<double> canonicalize_angles(std::vector<double> x) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (auto& v : x) {
    v = std::fmod(v, two_pi);
    if (v < 0) v += two_pi;
  }
  return x;
}

struct MultiStartResult {
  std::vector<OptimizationRun> runs;
  std::size_t best = 0;

  const OptimizationRun& best_run() const { return runs.at(best); }
};

/// Random start k: betas uniform in [0, pi]^p, gammas uniform in [0, 2 pi]^p,
/// drawn from the stream derive_seed(seed, k).
inline QaoaParameters random_start(std::size_t layers, std::uint64_t seed, std::size_t k) {
  Rng rng(derive_seed(seed, k));
  QaoaParameters params;
  for (std::size_t l = 0; l < layers; ++l) params.betas.push_back(rng.uniform(0.0, std::numbers::pi));
  for (std::size_t l = 0; l < layers; ++l) params.gammas.push_back(rng.uniform(0.0, 2.0 * std::numbers::pi));
  return params;
}

inline MultiStartResult multi_start(const QaoaEvaluator& evaluator, std::size_t layers, std::size_t n_starts,
                                    std::uint64_t seed, const EvaluationMode& mode = {},
                                    const LocalOptions& options = {}, std::size_t jobs = 1) {
  detail::require(n_starts >= 1, "n_starts must be >= 1");
  detail::require(layers >= 1, "multi-start needs at least one layer");
  MultiStartResult result;
  result.runs = parallel_map(n_starts, jobs, [&](std::size_t k) {
    const auto x0 = random_start(layers, seed, k).flat();
    auto run = minimize_local(
        [&](const std::vector<double>& x) { return evaluator.energy(QaoaParameters::from_flat(x), mode); }, x0,
        options);
    run.seed = derive_seed(seed, k);
    return run;
  });
  for (std::size_t k = 1; k < result.runs.size(); ++k) {
    if (result.runs[k].final_value < result.runs[result.best].final_value) result.best = k;
  }
  return result;
}

inline nlohmann::json run_to_json(const OptimizationRun& run) {
  return {{"initial", run.initial},     {"final", run.final},     {"initial_value", run.initial_value},
          {"final_value", run.final_value}, {"nfev", run.nfev}, {"converged", run.converged},
          {"seed", run.seed}};
}

// ---------------------------------------------------------------------------
// Landscape
// ---------------------------------------------------------------------------

struct Landscape {
  std::vector<double> betas;
  std::vector<double> gammas;
  std::vector<std::vector<double>> values;  // values[j][k] = e(betas[j], gammas[k])
};

inline std::vector<double> linspace(double lo, double hi, std::size_t points) {
  detail::require(points >= 2, "grid needs at least two points per axis");
  std::vector<double> out(points);
  const double step = (hi - lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) out[i] = lo + static_cast<double>(i) * step;
  out.back() = hi;
  return out;
}

/// Exact p = 1 energies on the closed grid [0, pi] x [0, 2 pi].
inline Landscape landscape_grid(const QaoaEvaluator& evaluator, std::size_t beta_points, std::size_t gamma_points,
                                std::size_t jobs = 1) {
  Landscape out;
  out.betas = linspace(0.0, std::numbers::pi, beta_points);
  out.gammas = linspace(0.0, 2.0 * std::numbers::pi, gamma_points);
  out.values = parallel_map(beta_points, jobs, [&](std::size_t j) {
    std::vector<double> row(gamma_points);
    for (std::size_t k = 0; k < gamma_points; ++k) {
      row[k] = evaluator.energy({{out.betas[j]}, {out.gammas[k]}});
    }
    return row;
  });
  return out;
}

inline std::string landscape_csv(const Landscape& l) {
  std::ostringstream os;
  os << "beta,gamma,energy\n";
  for (std::size_t j = 0; j < l.betas.size(); ++j) {
    for (std::size_t k = 0; k < l.gammas.size(); ++k) {
      os << repr(l.betas[j]) << ',' << repr(l.gammas[k]) << ',' << repr(l.values[j][k]) << '\n';
    }
  }
  return os.str();
}

inline nlohmann::json landscape_to_json(const Landscape& l) {
  return {{"betas", l.betas}, {"gammas", l.gammas}, {"energy", l.values}};
}

}  // namespace qcharge
