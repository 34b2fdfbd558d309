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

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <json.hpp>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "bits.hpp"
#include "convert.hpp"
#include "error.hpp"
#include "model.hpp"
#include "numfmt.hpp"

namespace qcharge {

struct ExactSolution {
  double min_value = 0.0;
  std::vector<std::vector<std::int64_t>> argmin;
  std::uint64_t evaluated_count = 0;
  bool feasible = true;
};

inline constexpr std::size_t kMaxBruteForceQubits = 24;
inline constexpr std::uint64_t kMaxEnumeration = 10'000'000;
inline constexpr double kTieTolerance = 1e-9;

inline nlohmann::json solution_to_json(const ExactSolution& s) {
  return {{"min_value", s.min_value}, {"argmin", s.argmin}, {"feasible", s.feasible}};
}

/// Exhaustive QUBO minimum. Walks the 2^n assignments in Gray-code order with
/// O(n) updates; ties are reported in lexicographic order of (b_0, b_1, ...).
inline ExactSolution brute_force_qubo(const Qubo& q, std::size_t tie_cap = 16) {
  const std::size_t n = q.size();
  if (n > kMaxBruteForceQubits) {
    throw ResourceError("brute_force_qubo: " + std::to_string(n) + " binary variables exceed the cap of " +
                        std::to_string(kMaxBruteForceQubits));
  }
  detail::require(tie_cap >= 1, "tie_cap must be >= 1");
  const auto ni = static_cast<Eigen::Index>(n);
  const Eigen::MatrixXd upper = q.quadratic.triangularView<Eigen::Upper>();
  Eigen::MatrixXd sym = upper + upper.transpose();
  Eigen::VectorXd self = q.linear + q.quadratic.diagonal();
  for (Eigen::Index i = 0; i < ni; ++i) sym(i, i) = 0.0;

  auto lex_key = [n](const BitVector& b) {
    std::uint64_t key = 0;
    for (std::size_t i = 0; i < n; ++i) key = (key << 1) | b[i];
    return key;
  };

  BitVector b(n, 0);
  Eigen::VectorXd field = self;  // field(k) = self_k + sum_j sym(k, j) b_j
  double value = q.constant;
  double best = value;
  std::set<std::uint64_t> ties{lex_key(b)};
  const std::uint64_t total = std::uint64_t{1} << n;

  for (std::uint64_t step = 1; step < total; ++step) {
    const auto k = static_cast<std::size_t>(std::countr_zero(step));
    const auto kk = static_cast<Eigen::Index>(k);
    if (b[k]) {
      value -= field(kk);
      b[k] = 0;
      field -= sym.col(kk);
    } else {
      value += field(kk);
      b[k] = 1;
      field += sym.col(kk);
    }
    if (value < best - kTieTolerance) {
      best = value;
      ties.clear();
      ties.insert(lex_key(b));
    } else if (value <= best + kTieTolerance) {
      ties.insert(lex_key(b));
      if (ties.size() > tie_cap) ties.erase(std::prev(ties.end()));
    }
  }

  ExactSolution out;
  out.evaluated_count = total;
  for (auto key : ties) {
    std::vector<std::int64_t> row(n);
    for (std::size_t i = 0; i < n; ++i) row[i] = static_cast<std::int64_t>((key >> (n - 1 - i)) & 1U);
    out.argmin.push_back(std::move(row));
  }
  BitVector first(out.argmin.front().begin(), out.argmin.front().end());
  out.min_value = qubo_objective(q, first);
  return out;
}

namespace detail {

inline std::uint64_t box_size(const QuadraticProgram& qp) {
  std::uint64_t size = 1;
  for (const auto& v : qp.variables()) {
    const auto width = static_cast<std::uint64_t>(v.range() + 1);
    if (size > kMaxEnumeration / width + 1) return kMaxEnumeration + 1;
    size *= width;
  }
  return size;
}

}  // namespace detail

/// Exhaustive integer minimum. Only feasible points compete when the program
/// has constraints. Branches that can no longer satisfy an equality are
/// pruned; the number of visited leaves is capped.
inline ExactSolution brute_force_integer(const QuadraticProgram& qp, std::size_t tie_cap = 16,
                                         std::uint64_t leaf_cap = kMaxEnumeration) {
  detail::require(tie_cap >= 1, "tie_cap must be >= 1");
  const std::size_t n = qp.num_variables();
  const auto& vars = qp.variables();
  const auto& cons = qp.constraints();

  // rest_lo[c][i], rest_hi[c][i]: reachable range of sum_{k >= i} a_ck x_k.
  std::vector<std::vector<double>> rest_lo(cons.size(), std::vector<double>(n + 1, 0.0));
  std::vector<std::vector<double>> rest_hi(cons.size(), std::vector<double>(n + 1, 0.0));
  for (std::size_t c = 0; c < cons.size(); ++c) {
    for (std::size_t i = n; i-- > 0;) {
      const double a = cons[c].coefficients(static_cast<Eigen::Index>(i));
      const double lo = a * static_cast<double>(a >= 0 ? vars[i].lower : vars[i].upper);
      const double hi = a * static_cast<double>(a >= 0 ? vars[i].upper : vars[i].lower);
      rest_lo[c][i] = rest_lo[c][i + 1] + lo;
      rest_hi[c][i] = rest_hi[c][i + 1] + hi;
    }
  }

  ExactSolution out;
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> x(n, 0.0);
  std::vector<double> partial(cons.size(), 0.0);
  std::vector<std::vector<std::int64_t>> ties;

  auto visit = [&](auto&& self, std::size_t i) -> void {
    for (std::size_t c = 0; c < cons.size(); ++c) {
      const double lo = partial[c] + rest_lo[c][i];
      const double hi = partial[c] + rest_hi[c][i];
      if (cons[c].rhs < lo - 1e-9 || cons[c].rhs > hi + 1e-9) return;
    }
    if (i == n) {
      if (++out.evaluated_count > leaf_cap) {
        throw ResourceError("brute_force_integer: enumeration exceeds " + std::to_string(leaf_cap) + " points");
      }
      const double v = qp.evaluate(x);
      if (v < best - kTieTolerance) {
        best = v;
        ties.clear();
      }
      if (v <= best + kTieTolerance && ties.size() < tie_cap) {
        ties.emplace_back(x.begin(), x.end());
      }
      return;
    }
    for (std::int64_t value = vars[i].lower; value <= vars[i].upper; ++value) {
      x[i] = static_cast<double>(value);
      for (std::size_t c = 0; c < cons.size(); ++c) {
        partial[c] += cons[c].coefficients(static_cast<Eigen::Index>(i)) * x[i];
      }
      self(self, i + 1);
      for (std::size_t c = 0; c < cons.size(); ++c) {
        partial[c] -= cons[c].coefficients(static_cast<Eigen::Index>(i)) * x[i];
      }
    }
    x[i] = 0.0;
  };
  visit(visit, 0);

  if (ties.empty()) throw InfeasibleError("program has no feasible point");
  out.min_value = best;
  out.argmin = std::move(ties);
  out.feasible = true;
  return out;
}

/// Bounded compositions of `total` into `parts` values in [0, cap], in
/// lexicographic order.
inline std::vector<std::vector<int>> bounded_compositions(int total, int parts, int cap) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(static_cast<std::size_t>(parts), 0);
  auto rec = [&](auto&& self, int i, int remaining) -> void {
    if (i == parts) {
      if (remaining == 0) out.push_back(cur);
      return;
    }
    const int rest_cap = (parts - i - 1) * cap;
    for (int v = std::max(0, remaining - rest_cap); v <= std::min(cap, remaining); ++v) {
      cur[static_cast<std::size_t>(i)] = v;
      self(self, i + 1, remaining - v);
    }
  };
  if (parts == 0) {
    if (total == 0) out.emplace_back();
    return out;
  }
  rec(rec, 0, total);
  return out;
}

/// Exact minimum of the charging QCIO. Each car charges one bounded
/// composition of its energy over its own slots; every other variable stays
/// at 0, since a positive level there only increases the load.
inline ExactSolution solve_charging_exact(const ChargingUnit& unit, std::size_t tie_cap = 16) {
  detail::require(tie_cap >= 1, "tie_cap must be >= 1");
  const auto& cars = unit.cars();
  const int T = unit.time_slots();
  const int cap = unit.levels() - 1;
  std::vector<std::vector<std::vector<int>>> options;
  std::uint64_t leaves = 1;
  for (const auto& car : cars) {
    auto comps = bounded_compositions(car.required_energy, static_cast<int>(car.slots.size()), cap);
    if (comps.empty()) {
      throw InfeasibleError("car '" + car.id + "' cannot reach energy " + std::to_string(car.required_energy) +
                            " within its slots");
    }
    leaves = std::min<std::uint64_t>(leaves * comps.size(), kMaxEnumeration + 1);
    options.push_back(std::move(comps));
  }
  if (leaves > kMaxEnumeration) {
    throw ResourceError("solve_charging_exact: more than " + std::to_string(kMaxEnumeration) + " schedules");
  }

  ExactSolution out;
  std::vector<std::int64_t> load(static_cast<std::size_t>(T), 0);
  std::vector<std::size_t> choice(cars.size(), 0);
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  std::vector<std::vector<std::size_t>> ties;

  auto rec = [&](auto&& self, std::size_t k) -> void {
    if (k == cars.size()) {
      ++out.evaluated_count;
      std::int64_t v = 0;
      for (auto l : load) v += l * l;
      if (v < best) {
        best = v;
        ties.clear();
      }
      if (v == best && ties.size() < tie_cap) ties.push_back(choice);
      return;
    }
    for (std::size_t c = 0; c < options[k].size(); ++c) {
      const auto& comp = options[k][c];
      for (std::size_t s = 0; s < comp.size(); ++s) load[static_cast<std::size_t>(cars[k].slots[s])] += comp[s];
      choice[k] = c;
      self(self, k + 1);
      for (std::size_t s = 0; s < comp.size(); ++s) load[static_cast<std::size_t>(cars[k].slots[s])] -= comp[s];
    }
  };
  rec(rec, 0);

  out.min_value = static_cast<double>(best);
  for (const auto& ch : ties) {
    std::vector<std::int64_t> p(cars.size() * static_cast<std::size_t>(T), 0);
    for (std::size_t k = 0; k < cars.size(); ++k) {
      const auto& comp = options[k][ch[k]];
      for (std::size_t s = 0; s < comp.size(); ++s) {
        p[k * static_cast<std::size_t>(T) + static_cast<std::size_t>(cars[k].slots[s])] = comp[s];
      }
    }
    out.argmin.push_back(std::move(p));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Penalty thresholds
// ---------------------------------------------------------------------------

/// Minimum objective among feasible points, and for every violation level v
/// the minimum objective among infeasible points with ||Cp - e||^2 = v.
/// Points that satisfy the equalities but leave the variable box (possible
/// with wide fixed-width encodings) are recorded at v = 0.
struct PenaltyProfile {
  double feasible_min = std::numeric_limits<double>::infinity();
  std::map<double, double> infeasible_min;

  void add(double violation, double objective, bool feasible) {
    if (feasible) {
      feasible_min = std::min(feasible_min, objective);
      return;
    }
    auto [it, inserted] = infeasible_min.emplace(violation, objective);
    if (!inserted) it->second = std::min(it->second, objective);
  }

  /// True iff every minimizer of objective + rho * violation is feasible.
  bool all_minimizers_feasible(double rho) const {
    if (!std::isfinite(feasible_min)) return false;
    for (const auto& [v, f] : infeasible_min) {
      if (f + rho * v <= feasible_min + kTieTolerance) return false;
    }
    return true;
  }
};

namespace detail {

inline double squared_violation(const QuadraticProgram& qp, const std::vector<double>& x) {
  double s = 0.0;
  for (const auto& c : qp.constraints()) {
    double r = -c.rhs;
    for (std::size_t i = 0; i < x.size(); ++i) r += c.coefficients(static_cast<Eigen::Index>(i)) * x[i];
    s += r * r;
  }
  return s;
}

}  // namespace detail

/// Profile over the integer box of the program.
inline PenaltyProfile penalty_profile_box(const QuadraticProgram& qcio) {
  if (detail::box_size(qcio) > kMaxEnumeration) {
    throw ResourceError("penalty profile: integer box exceeds " + std::to_string(kMaxEnumeration) + " points");
  }
  PenaltyProfile prof;
  const auto& vars = qcio.variables();
  std::vector<double> x(vars.size());
  for (std::size_t i = 0; i < vars.size(); ++i) x[i] = static_cast<double>(vars[i].lower);
  for (;;) {
    const double v = detail::squared_violation(qcio, x);
    prof.add(v, qcio.evaluate(x), v <= 1e-12);
    std::size_t i = 0;
    for (; i < vars.size(); ++i) {
      if (x[i] < static_cast<double>(vars[i].upper)) {
        x[i] += 1.0;
        break;
      }
      x[i] = static_cast<double>(vars[i].lower);
    }
    if (i == vars.size()) break;
  }
  return prof;
}

/// Profile over every binary assignment of the encoded program.
inline PenaltyProfile penalty_profile_encoded(const QuadraticProgram& qcio, EncodingScheme scheme) {
  QuadraticProgram free_form = qcio;
  free_form.clear_constraints();
  const auto bp = integer_to_binary(free_form, scheme);
  const std::size_t n = bp.encoding.total_qubits;
  if (n > kMaxBruteForceQubits) {
    throw ResourceError("penalty profile: " + std::to_string(n) + " qubits exceed the cap of " +
                        std::to_string(kMaxBruteForceQubits));
  }
  PenaltyProfile prof;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
    const auto x = to_doubles(interpret(bp.encoding, bits_of_index(m, n)));
    prof.add(detail::squared_violation(qcio, x), qcio.evaluate(x), qcio.is_feasible(x));
  }
  return prof;
}

/// Profile of a charging unit by dynamic programming over time slots. The
/// state is the vector of per-car energy totals; for every reachable total
/// E the minimum load sum_t (sum_k p_kt)^2 is kept. Variables outside a
/// car's slots stay at 0, which never increases the minimum.
inline PenaltyProfile penalty_profile_unit(const ChargingUnit& unit) {
  const auto& cars = unit.cars();
  const int cap = unit.levels() - 1;
  const std::size_t K = cars.size();
  std::vector<std::int64_t> radix(K);
  std::uint64_t states = 1;
  for (std::size_t k = 0; k < K; ++k) {
    radix[k] = static_cast<std::int64_t>(cars[k].slots.size()) * cap + 1;
    states *= static_cast<std::uint64_t>(radix[k]);
    if (states > kMaxEnumeration) throw ResourceError("penalty profile: too many per-car energy totals");
  }
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> best(states, inf);
  best[0] = 0.0;

  auto decode = [&](std::uint64_t s) {
    std::vector<std::int64_t> e(K);
    for (std::size_t k = 0; k < K; ++k) {
      e[k] = static_cast<std::int64_t>(s % static_cast<std::uint64_t>(radix[k]));
      s /= static_cast<std::uint64_t>(radix[k]);
    }
    return e;
  };
  std::vector<std::uint64_t> stride(K, 1);
  for (std::size_t k = 1; k < K; ++k) stride[k] = stride[k - 1] * static_cast<std::uint64_t>(radix[k - 1]);

  for (int t = 0; t < unit.time_slots(); ++t) {
    std::vector<std::size_t> present;
    for (std::size_t k = 0; k < K; ++k) {
      if (std::find(cars[k].slots.begin(), cars[k].slots.end(), t) != cars[k].slots.end()) present.push_back(k);
    }
    if (present.empty()) continue;
    std::vector<double> next(states, inf);
    std::vector<int> level(present.size(), 0);
    for (std::uint64_t s = 0; s < states; ++s) {
      if (!std::isfinite(best[s])) continue;
      const auto e = decode(s);
      std::fill(level.begin(), level.end(), 0);
      for (;;) {
        std::uint64_t target = s;
        bool fits = true;
        int load = 0;
        for (std::size_t q = 0; q < present.size(); ++q) {
          const auto k = present[q];
          if (e[k] + level[q] >= radix[k]) fits = false;
          target += static_cast<std::uint64_t>(level[q]) * stride[k];
          load += level[q];
        }
        if (fits) next[target] = std::min(next[target], best[s] + static_cast<double>(load) * load);
        std::size_t q = 0;
        for (; q < present.size(); ++q) {
          if (level[q] < cap) {
            ++level[q];
            break;
          }
          level[q] = 0;
        }
        if (q == present.size()) break;
      }
    }
    best = std::move(next);
  }

  PenaltyProfile prof;
  for (std::uint64_t s = 0; s < states; ++s) {
    if (!std::isfinite(best[s])) continue;
    const auto e = decode(s);
    double v = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      const double r = static_cast<double>(e[k] - cars[k].required_energy);
      v += r * r;
    }
    prof.add(v, best[s], v == 0.0);
  }
  return prof;
}

/// Smallest rho = rho_start + i * rho_step <= rho_max at which every
/// minimizer of the penalized program is feasible.
inline double min_feasible_penalty(const PenaltyProfile& profile, double rho_start, double rho_step,
                                   double rho_max) {
  detail::require(rho_start >= 0.0 && rho_step > 0.0 && rho_max >= rho_start, "invalid penalty grid");
  for (std::int64_t i = 0;; ++i) {
    const double rho = rho_start + static_cast<double>(i) * rho_step;
    if (rho > rho_max + 1e-12) break;
    if (profile.all_minimizers_feasible(rho)) return rho;
  }
  throw InfeasibleError("no penalty up to " + repr(rho_max) + " makes every minimizer feasible");
}

/// Enumerates the integer box when the encoding cannot leave it (bounded
/// coefficients), otherwise every binary assignment.
inline double min_feasible_penalty(const QuadraticProgram& qcio, EncodingScheme scheme, double rho_start,
                                   double rho_step, double rho_max) {
  const auto profile = scheme.kind == EncodingScheme::Kind::bounded_coefficient &&
                               detail::box_size(qcio) <= kMaxEnumeration
                           ? penalty_profile_box(qcio)
                           : penalty_profile_encoded(qcio, scheme);
  return min_feasible_penalty(profile, rho_start, rho_step, rho_max);
}

/// Charging-unit form; uses the slot recursion for bounded coefficients.
inline double min_feasible_penalty(const ChargingUnit& unit, EncodingScheme scheme, double rho_start,
                                   double rho_step, double rho_max) {
  if (scheme.kind == EncodingScheme::Kind::bounded_coefficient) {
    return min_feasible_penalty(penalty_profile_unit(unit), rho_start, rho_step, rho_max);
  }
  return min_feasible_penalty(build_qcio(unit), scheme, rho_start, rho_step, rho_max);
}

}  // namespace qcharge
