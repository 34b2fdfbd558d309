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
#include <cmath>
#include <cstdint>
#include <json.hpp>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "numfmt.hpp"

namespace qcharge {

// ---------------------------------------------------------------------------
// Charging use case
// ---------------------------------------------------------------------------

/// A car waiting at the charging unit. `slots` lists the time slots during
/// which it is plugged in (gaps allowed).
struct Car {
  std::string id;
  std::vector<int> slots;
  int required_energy = 1;
};

class ChargingUnit {
 public:
  ChargingUnit(std::string id, int levels, int time_slots)
      : id_(std::move(id)), levels_(levels), time_slots_(time_slots) {
    detail::require(levels_ >= 2, "charging unit needs at least 2 charging levels");
    detail::require(time_slots_ >= 1, "charging unit needs at least 1 time slot");
  }

  /// Registers a car. Rejects cars whose slots fall outside [0, T-1].
  void add_car(Car car) {
    detail::require(!car.slots.empty(), "car '" + car.id + "' has no time slots");
    detail::require(car.required_energy >= 1,
                    "car '" + car.id + "' must require a positive amount of energy");
    std::set<int> seen;
    for (int s : car.slots) {
      if (s < 0 || s >= time_slots_) {
        throw ValidationError("required time slots not compatible with charging unit: car '" +
                              car.id + "' slot " + std::to_string(s) + " outside [0, " +
                              std::to_string(time_slots_ - 1) + "]");
      }
      detail::require(seen.insert(s).second,
                      "car '" + car.id + "' lists slot " + std::to_string(s) + " twice");
    }
    for (const auto& other : cars_) {
      detail::require(other.id != car.id, "duplicate car id '" + car.id + "'");
    }
    cars_.push_back(std::move(car));
  }

  const std::string& id() const { return id_; }
  int levels() const { return levels_; }
  int time_slots() const { return time_slots_; }
  const std::vector<Car>& cars() const { return cars_; }

 private:
  std::string id_;
  int levels_;
  int time_slots_;
  std::vector<Car> cars_;
};

/// Reads the problem-instance JSON document.
inline ChargingUnit unit_from_json(const nlohmann::json& doc) {
  auto fail = [](const std::string& where, const std::string& what) {
    throw ValidationError(where + ": " + what);
  };
  if (!doc.is_object()) fail("$", "instance must be a JSON object");
  if (!doc.contains("charging_unit")) fail("$", "missing field 'charging_unit'");
  const auto& cu = doc.at("charging_unit");
  auto get_int = [&](const nlohmann::json& obj, const std::string& where,
                     const char* key) -> int {
    if (!obj.is_object() || !obj.contains(key)) fail(where, std::string("missing field '") + key + "'");
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) fail(where + "." + key, "must be an integer");
    return v.get<int>();
  };
  auto get_str = [&](const nlohmann::json& obj, const std::string& where,
                     const char* key) -> std::string {
    if (!obj.is_object() || !obj.contains(key)) fail(where, std::string("missing field '") + key + "'");
    const auto& v = obj.at(key);
    if (!v.is_string()) fail(where + "." + key, "must be a string");
    return v.get<std::string>();
  };

  std::string id = get_str(cu, "$.charging_unit", "id");
  const int levels = get_int(cu, "$.charging_unit", "number_charging_levels");
  const int slots = get_int(cu, "$.charging_unit", "number_time_slots");
  if (levels < 2) fail("$.charging_unit.number_charging_levels", "must be >= 2");
  if (slots < 1) fail("$.charging_unit.number_time_slots", "must be >= 1");
  ChargingUnit unit(std::move(id), levels, slots);

  if (!doc.contains("cars")) fail("$", "missing field 'cars'");
  const auto& cars = doc.at("cars");
  if (!cars.is_array()) fail("$.cars", "must be an array");
  for (std::size_t k = 0; k < cars.size(); ++k) {
    const std::string where = "$.cars[" + std::to_string(k) + "]";
    const auto& jc = cars[k];
    Car car;
    car.id = get_str(jc, where, "car_id");
    if (!jc.contains("time_slots_at_charging_unit")) {
      fail(where, "missing field 'time_slots_at_charging_unit'");
    }
    const auto& js = jc.at("time_slots_at_charging_unit");
    if (!js.is_array()) fail(where + ".time_slots_at_charging_unit", "must be an array");
    for (const auto& s : js) {
      if (!s.is_number_integer()) fail(where + ".time_slots_at_charging_unit", "slots must be integers");
      car.slots.push_back(s.get<int>());
    }
    car.required_energy = get_int(jc, where, "required_energy");
    if (car.required_energy < 1) {
      fail(where + ".required_energy", "car '" + car.id + "' must require positive energy");
    }
    try {
      unit.add_car(std::move(car));
    } catch (const ValidationError& e) {
      fail(where, e.what());
    }
  }
  return unit;
}

inline nlohmann::json unit_to_json(const ChargingUnit& unit) {
  nlohmann::json cars = nlohmann::json::array();
  for (const auto& c : unit.cars()) {
    cars.push_back({{"car_id", c.id},
                    {"time_slots_at_charging_unit", c.slots},
                    {"required_energy", c.required_energy}});
  }
  return {{"charging_unit",
           {{"id", unit.id()},
            {"number_charging_levels", unit.levels()},
            {"number_time_slots", unit.time_slots()}}},
          {"cars", cars}};
}

// ---------------------------------------------------------------------------
// Quadratic programs
// ---------------------------------------------------------------------------

enum class VariableKind { integer, binary };

struct Variable {
  std::string name;
  VariableKind kind = VariableKind::integer;
  std::int64_t lower = 0;
  std::int64_t upper = 0;

  std::int64_t range() const { return upper - lower; }
};

/// Equality constraint coefficients . x == rhs.
struct EqualityConstraint {
  Eigen::VectorXd coefficients;
  double rhs = 0.0;
  std::string name;
};

/// Folds a square matrix into upper-triangular storage with the same
/// quadratic form: q_ij (i<j) becomes a_ij + a_ji, the diagonal is kept.
inline Eigen::MatrixXd fold_upper(const Eigen::MatrixXd& a) {
  detail::require(a.rows() == a.cols(), "quadratic matrix must be square");
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    q(i, i) = a(i, i);
    for (Eigen::Index j = i + 1; j < n; ++j) q(i, j) = a(i, j) + a(j, i);
  }
  return q;
}

/// minimize x^T Q x + L^T x + c  subject to  C x = e, x integral in bounds.
/// Q is stored upper-triangular and evaluated literally.
class QuadraticProgram {
 public:
  QuadraticProgram() = default;
  explicit QuadraticProgram(std::string name) : name_(std::move(name)) {}

  std::size_t add_variable(std::string name, VariableKind kind, std::int64_t lower,
                           std::int64_t upper) {
    if (kind == VariableKind::binary) {
      detail::require(lower == 0 && upper == 1, "binary variable '" + name + "' must have bounds [0, 1]");
    }
    detail::require(lower <= upper, "variable '" + name + "' has lower > upper");
    detail::require(constraints_.empty(), "variables must be added before constraints");
    variables_.push_back({std::move(name), kind, lower, upper});
    const auto n = static_cast<Eigen::Index>(variables_.size());
    quadratic_.conservativeResizeLike(Eigen::MatrixXd::Zero(n, n));
    linear_.conservativeResizeLike(Eigen::VectorXd::Zero(n));
    return variables_.size() - 1;
  }

  /// Sets the objective; `quadratic` may be any square matrix and is folded.
  void set_objective(const Eigen::MatrixXd& quadratic, const Eigen::VectorXd& linear,
                     double constant) {
    const auto n = static_cast<Eigen::Index>(variables_.size());
    detail::require(quadratic.rows() == n && quadratic.cols() == n,
                    "objective quadratic has wrong dimension");
    detail::require(linear.size() == n, "objective linear part has wrong dimension");
    quadratic_ = fold_upper(quadratic);
    linear_ = linear;
    constant_ = constant;
  }

  void add_equality(Eigen::VectorXd coefficients, double rhs, std::string name = {}) {
    detail::require(coefficients.size() == static_cast<Eigen::Index>(variables_.size()),
                    "constraint coefficient vector has wrong length");
    if (name.empty()) name = "c" + std::to_string(constraints_.size());
    constraints_.push_back({std::move(coefficients), rhs, std::move(name)});
  }

  void clear_constraints() { constraints_.clear(); }

  const std::string& name() const { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }
  std::size_t num_variables() const { return variables_.size(); }
  const std::vector<Variable>& variables() const { return variables_; }
  const Eigen::MatrixXd& quadratic() const { return quadratic_; }
  const Eigen::VectorXd& linear() const { return linear_; }
  double constant() const { return constant_; }
  const std::vector<EqualityConstraint>& constraints() const { return constraints_; }

  double evaluate(std::span<const double> x) const {
    check_length(x.size());
    const auto n = variables_.size();
    double value = constant_;
    for (std::size_t i = 0; i < n; ++i) {
      if (x[i] == 0.0) continue;
      const auto ii = static_cast<Eigen::Index>(i);
      double row = linear_(ii);
      for (std::size_t j = i; j < n; ++j) row += quadratic_(ii, static_cast<Eigen::Index>(j)) * x[j];
      value += row * x[i];
    }
    return value;
  }

  /// Squared residual ||C x - e||^2.
  double constraint_violation(std::span<const double> x) const {
    check_length(x.size());
    double total = 0.0;
    for (const auto& c : constraints_) {
      double r = -c.rhs;
      for (std::size_t i = 0; i < x.size(); ++i) r += c.coefficients(static_cast<Eigen::Index>(i)) * x[i];
      total += r * r;
    }
    return total;
  }

  bool is_feasible(std::span<const double> x, double tol = 1e-6) const {
    check_length(x.size());
    detail::require(tol >= 0.0, "feasibility tolerance must be nonnegative");
    for (std::size_t i = 0; i < x.size(); ++i) {
      const auto& v = variables_[i];
      if (std::abs(x[i] - std::round(x[i])) > tol) return false;
      if (x[i] < static_cast<double>(v.lower) - tol || x[i] > static_cast<double>(v.upper) + tol) {
        return false;
      }
    }
    for (const auto& c : constraints_) {
      double lhs = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) lhs += c.coefficients(static_cast<Eigen::Index>(i)) * x[i];
      if (std::abs(lhs - c.rhs) > tol) return false;
    }
    return true;
  }

  /// Human-readable listing in the style of common QP modelling tools.
  std::string prettyprint() const {
    std::ostringstream out;
    out << "Problem name: " << name_ << "\n\nMinimize\n";
    const auto n = static_cast<Eigen::Index>(variables_.size());
    std::vector<std::string> terms;
    auto coef = [](double c) {
      std::string s = repr(std::abs(c));
      if (s.size() > 2 && s.substr(s.size() - 2) == ".0") s.resize(s.size() - 2);
      return s;
    };
    auto push = [&](double c, const std::string& body) {
      if (c == 0.0) return;
      std::string lead = terms.empty() ? (c < 0 ? "-" : "") : (c < 0 ? "- " : "+ ");
      std::string mag = coef(c);
      terms.push_back(lead + (mag == "1" ? "" : mag + "*") + body);
    };
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i; j < n; ++j) {
        const auto& a = variables_[static_cast<std::size_t>(i)].name;
        const auto& b = variables_[static_cast<std::size_t>(j)].name;
        push(quadratic_(i, j), i == j ? a + "^2" : a + "*" + b);
      }
    }
    for (Eigen::Index i = 0; i < n; ++i) push(linear_(i), variables_[static_cast<std::size_t>(i)].name);
    if (constant_ != 0.0) push(constant_, "");
    if (terms.empty()) terms.push_back("0");
    out << "  ";
    std::size_t width = 2;
    for (std::size_t t = 0; t < terms.size(); ++t) {
      if (t > 0) {
        if (width + terms[t].size() + 1 > 78) {
          out << "\n  ";
          width = 2;
        } else {
          out << ' ';
          ++width;
        }
      }
      out << terms[t];
      width += terms[t].size();
    }
    out << "\n\nSubject to\n";
    if (constraints_.empty()) {
      out << "  No constraints\n";
    } else {
      out << "  Linear constraints (" << constraints_.size() << ")\n";
      for (std::size_t k = 0; k < constraints_.size(); ++k) {
        out << "    ";
        bool first = true;
        for (Eigen::Index i = 0; i < n; ++i) {
          const double c = constraints_[k].coefficients(i);
          if (c == 0.0) continue;
          out << (first ? (c < 0 ? "-" : "") : (c < 0 ? " - " : " + "));
          if (std::abs(c) != 1.0) out << coef(c) << "*";
          out << variables_[static_cast<std::size_t>(i)].name;
          first = false;
        }
        if (first) out << "0";
        out << " == " << coef(constraints_[k].rhs) << "  '" << constraints_[k].name << "'\n";
      }
    }
    std::size_t n_int = 0, n_bin = 0;
    for (const auto& v : variables_) (v.kind == VariableKind::integer ? n_int : n_bin)++;
    if (n_int > 0) {
      out << "\n  Integer variables (" << n_int << ")\n";
      for (const auto& v : variables_) {
        if (v.kind == VariableKind::integer) {
          out << "    " << v.lower << " <= " << v.name << " <= " << v.upper << "\n";
        }
      }
    }
    if (n_bin > 0) {
      out << "\n  Binary variables (" << n_bin << ")\n   ";
      for (const auto& v : variables_) {
        if (v.kind == VariableKind::binary) out << ' ' << v.name;
      }
      out << "\n";
    }
    return out.str();
  }

 private:
  void check_length(std::size_t len) const {
    detail::require(len == variables_.size(), "point has length " + std::to_string(len) +
                                                  ", program has " +
                                                  std::to_string(variables_.size()) + " variables");
  }

  std::string name_ = "QCIO";
  std::vector<Variable> variables_;
  Eigen::MatrixXd quadratic_ = Eigen::MatrixXd::Zero(0, 0);
  Eigen::VectorXd linear_ = Eigen::VectorXd::Zero(0);
  double constant_ = 0.0;
  std::vector<EqualityConstraint> constraints_;
};

inline double evaluate_objective(const QuadraticProgram& qp, std::span<const double> x) {
  return qp.evaluate(x);
}

inline bool is_feasible(const QuadraticProgram& qp, std::span<const double> x, double tol = 1e-6) {
  return qp.is_feasible(x, tol);
}

// ---------------------------------------------------------------------------
// Charging model -> QCIO
// ---------------------------------------------------------------------------

/// Cost matrix A (KT x KT), constraint matrix C (K x KT), energy vector e.
struct ChargingMatrices {
  Eigen::MatrixXd cost;
  Eigen::MatrixXd constraints;
  Eigen::VectorXd energy;
};

/// A = 1_K 1_K^T (x) I_T, so p^T A p is the squared two-norm of the total load
/// per time slot. Row k of C selects car k's plugged-in slots.
inline ChargingMatrices generate_matrices(const ChargingUnit& unit) {
  const auto K = static_cast<Eigen::Index>(unit.cars().size());
  const auto T = static_cast<Eigen::Index>(unit.time_slots());
  ChargingMatrices m;
  m.cost = Eigen::MatrixXd::Zero(K * T, K * T);
  for (Eigen::Index k = 0; k < K; ++k) {
    for (Eigen::Index l = 0; l < K; ++l) {
      for (Eigen::Index s = 0; s < T; ++s) m.cost(k * T + s, l * T + s) = 1.0;
    }
  }
  m.constraints = Eigen::MatrixXd::Zero(K, K * T);
  m.energy = Eigen::VectorXd::Zero(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    const auto& car = unit.cars()[static_cast<std::size_t>(k)];
    for (int s : car.slots) m.constraints(k, k * T + s) = 1.0;
    m.energy(k) = car.required_energy;
  }
  return m;
}

inline std::string charging_variable_name(const Car& car, int slot) {
  return car.id + "_t" + std::to_string(slot);
}

/// Quadratic constrained integer program: minimize p^T A p s.t. C p = e,
/// 0 <= p_i <= L-1.
inline QuadraticProgram build_qcio(const ChargingUnit& unit) {
  QuadraticProgram qp("QCIO");
  for (const auto& car : unit.cars()) {
    for (int t = 0; t < unit.time_slots(); ++t) {
      qp.add_variable(charging_variable_name(car, t), VariableKind::integer, 0, unit.levels() - 1);
    }
  }
  const auto m = generate_matrices(unit);
  qp.set_objective(m.cost, Eigen::VectorXd::Zero(m.cost.rows()), 0.0);
  for (Eigen::Index k = 0; k < m.constraints.rows(); ++k) {
    qp.add_equality(m.constraints.row(k).transpose(), m.energy(k),
                    "charge_correct_energy_for_" + unit.cars()[static_cast<std::size_t>(k)].id);
  }
  return qp;
}

}  // namespace qcharge
