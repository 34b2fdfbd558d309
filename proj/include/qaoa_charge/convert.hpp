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
#include <cstdint>
#include <json.hpp>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "bits.hpp"
#include "error.hpp"
#include "model.hpp"
#include "numfmt.hpp"

namespace qcharge {

// ---------------------------------------------------------------------------
// Step 1: hard constraints -> penalty
// ---------------------------------------------------------------------------

/// Replaces every equality constraint by rho * ||C x - e||^2 in the objective:
///   Q += rho C^T C,  L += -2 rho C^T e,  c += rho ||e||^2.
inline QuadraticProgram to_penalty_form(const QuadraticProgram& qcio, double rho) {
  detail::require(std::isfinite(rho) && rho >= 0.0, "penalty must be a nonnegative number");
  const auto n = static_cast<Eigen::Index>(qcio.num_variables());

  Eigen::MatrixXd dense = qcio.quadratic();
  Eigen::VectorXd linear = qcio.linear();
  double constant = qcio.constant();
  for (const auto& c : qcio.constraints()) {
    dense += rho * c.coefficients * c.coefficients.transpose();
    linear += -2.0 * rho * c.rhs * c.coefficients;
    constant += rho * c.rhs * c.rhs;
  }

  QuadraticProgram out(qcio.name() + "_penalized");
  for (const auto& v : qcio.variables()) out.add_variable(v.name, v.kind, v.lower, v.upper);
  if (n > 0) {
    out.set_objective(dense, linear, constant);
  } else {
    out.set_objective(Eigen::MatrixXd::Zero(0, 0), Eigen::VectorXd::Zero(0), constant);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Step 2: integer -> binary
// ---------------------------------------------------------------------------

/// Integer-to-binary encoding scheme.
struct EncodingScheme {
  enum class Kind { bounded_coefficient, fixed_width };
  Kind kind = Kind::bounded_coefficient;
  int width = 0;

  static EncodingScheme bounded_coefficient() { return {Kind::bounded_coefficient, 0}; }
  static EncodingScheme fixed_width(int w) { return {Kind::fixed_width, w}; }

  std::string describe() const {
    return kind == Kind::bounded_coefficient ? "bounded" : "fixed:" + std::to_string(width);
  }

  /// Accepts "bounded" or "fixed:<w>".
  static EncodingScheme parse(const std::string& text) {
    if (text == "bounded" || text == "bounded_coefficient") return bounded_coefficient();
    if (text.rfind("fixed:", 0) == 0) {
      int w = 0;
      try {
        w = std::stoi(text.substr(6));
      } catch (...) {
        throw ValidationError("bad encoding width in '" + text + "'");
      }
      detail::require(w >= 1 && w <= 62, "encoding width must lie in [1, 62]");
      return fixed_width(w);
    }
    throw ValidationError("unknown encoding '" + text + "' (expected bounded or fixed:<w>)");
  }
};

/// Coefficients of the bounded-coefficient encoding of the range [0, U]:
/// powers of two 1, 2, ..., 2^(m-1) with m = floor(log2 U), followed by the
/// remainder U - 2^m + 1. For U = 2^k - 1 this is plain binary.
inline std::vector<std::int64_t> bounded_coefficients(std::int64_t range) {
  detail::require(range >= 0, "variable range must be nonnegative");
  if (range == 0) return {};
  int m = 0;
  while ((std::int64_t{2} << m) <= range) ++m;  // 2^m <= U < 2^(m+1)
  std::vector<std::int64_t> coeffs;
  for (int j = 0; j < m; ++j) coeffs.push_back(std::int64_t{1} << j);
  coeffs.push_back(range - (std::int64_t{1} << m) + 1);
  return coeffs;
}

inline std::vector<std::int64_t> fixed_width_coefficients(std::int64_t range, int width) {
  detail::require(width >= 1 && width <= 62, "encoding width must lie in [1, 62]");
  detail::require((std::int64_t{1} << width) - 1 >= range,
                  "fixed width " + std::to_string(width) + " cannot represent range " +
                      std::to_string(range));
  std::vector<std::int64_t> coeffs;
  for (int j = 0; j < width; ++j) coeffs.push_back(std::int64_t{1} << j);
  return coeffs;
}

struct VariableEncoding {
  std::vector<std::size_t> qubits;
  std::vector<std::int64_t> coefficients;
  std::int64_t offset = 0;
};

/// Integer <-> binary map p = B b + lower.
struct Encoding {
  std::vector<VariableEncoding> variables;
  std::vector<std::string> qubit_names;
  std::size_t total_qubits = 0;

  /// The matrix B (variables x qubits).
  Eigen::MatrixXd matrix() const {
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(variables.size()),
                                              static_cast<Eigen::Index>(total_qubits));
    for (std::size_t i = 0; i < variables.size(); ++i) {
      for (std::size_t j = 0; j < variables[i].qubits.size(); ++j) {
        b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(variables[i].qubits[j])) =
            static_cast<double>(variables[i].coefficients[j]);
      }
    }
    return b;
  }
};

/// Unconstrained binary quadratic form b^T A b + L^T b + c with A upper
/// triangular. Diagonal entries are kept as b_i^2 terms.
struct Qubo {
  Eigen::MatrixXd quadratic = Eigen::MatrixXd::Zero(0, 0);
  Eigen::VectorXd linear = Eigen::VectorXd::Zero(0);
  double constant = 0.0;

  std::size_t size() const { return static_cast<std::size_t>(linear.size()); }
};

struct BinaryProgram {
  Qubo qubo;
  Encoding encoding;
};

/// Substitutes p_i = lower_i + sum_j c_ij b_ij into an unconstrained integer
/// program. Exact: the returned form equals the integer objective at
/// interpret(b) for every b.
inline BinaryProgram integer_to_binary(const QuadraticProgram& quio, EncodingScheme scheme) {
  detail::require(quio.constraints().empty(),
                  "integer_to_binary expects an unconstrained program (apply the penalty first)");
  BinaryProgram out;
  auto& enc = out.encoding;
  for (const auto& v : quio.variables()) {
    VariableEncoding ve;
    ve.offset = v.lower;
    const std::int64_t range = v.range();
    if (v.kind == VariableKind::binary) {
      ve.coefficients = {1};
    } else if (scheme.kind == EncodingScheme::Kind::fixed_width) {
      ve.coefficients = fixed_width_coefficients(range, scheme.width);
    } else {
      ve.coefficients = bounded_coefficients(range);
    }
    for (std::size_t j = 0; j < ve.coefficients.size(); ++j) {
      ve.qubits.push_back(enc.total_qubits++);
      enc.qubit_names.push_back(v.name + "@" + std::to_string(j));
    }
    enc.variables.push_back(std::move(ve));
  }

  const auto nq = static_cast<Eigen::Index>(enc.total_qubits);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(nq, nq);
  Eigen::VectorXd l = Eigen::VectorXd::Zero(nq);
  double c = quio.constant();

  const auto& q = quio.quadratic();
  const auto& lin = quio.linear();
  const std::size_t n = quio.num_variables();
  auto add_pair = [&](std::size_t qa, std::size_t qb, double v) {
    const auto lo = static_cast<Eigen::Index>(std::min(qa, qb));
    const auto hi = static_cast<Eigen::Index>(std::max(qa, qb));
    a(lo, hi) += v;
  };

  for (std::size_t i = 0; i < n; ++i) {
    const auto& ei = enc.variables[i];
    const double lo_i = static_cast<double>(ei.offset);
    const auto ii = static_cast<Eigen::Index>(i);

    // linear term L_i p_i
    for (std::size_t s = 0; s < ei.qubits.size(); ++s) {
      l(static_cast<Eigen::Index>(ei.qubits[s])) += lin(ii) * static_cast<double>(ei.coefficients[s]);
    }
    c += lin(ii) * lo_i;

    // diagonal term Q_ii p_i^2
    const double qii = q(ii, ii);
    if (qii != 0.0) {
      for (std::size_t s = 0; s < ei.qubits.size(); ++s) {
        const double cs = static_cast<double>(ei.coefficients[s]);
        add_pair(ei.qubits[s], ei.qubits[s], qii * cs * cs);
        for (std::size_t t = s + 1; t < ei.qubits.size(); ++t) {
          add_pair(ei.qubits[s], ei.qubits[t], 2.0 * qii * cs * static_cast<double>(ei.coefficients[t]));
        }
        l(static_cast<Eigen::Index>(ei.qubits[s])) += 2.0 * qii * lo_i * cs;
      }
      c += qii * lo_i * lo_i;
    }

    // cross terms Q_ij p_i p_j, i < j
    for (std::size_t j = i + 1; j < n; ++j) {
      const double qij = q(ii, static_cast<Eigen::Index>(j));
      if (qij == 0.0) continue;
      const auto& ej = enc.variables[j];
      const double lo_j = static_cast<double>(ej.offset);
      for (std::size_t s = 0; s < ei.qubits.size(); ++s) {
        const double cs = static_cast<double>(ei.coefficients[s]);
        for (std::size_t t = 0; t < ej.qubits.size(); ++t) {
          add_pair(ei.qubits[s], ej.qubits[t], qij * cs * static_cast<double>(ej.coefficients[t]));
        }
        l(static_cast<Eigen::Index>(ei.qubits[s])) += qij * lo_j * cs;
      }
      for (std::size_t t = 0; t < ej.qubits.size(); ++t) {
        l(static_cast<Eigen::Index>(ej.qubits[t])) += qij * lo_i * static_cast<double>(ej.coefficients[t]);
      }
      c += qij * lo_i * lo_j;
    }
  }
  out.qubo.quadratic = std::move(a);
  out.qubo.linear = std::move(l);
  out.qubo.constant = c;
  return out;
}

/// Maps a binary assignment back to the integer variables.
inline std::vector<std::int64_t> interpret(const Encoding& enc, const BitVector& b) {
  require_binary(b, enc.total_qubits);
  std::vector<std::int64_t> p;
  p.reserve(enc.variables.size());
  for (const auto& v : enc.variables) {
    std::int64_t value = v.offset;
    for (std::size_t j = 0; j < v.qubits.size(); ++j) value += v.coefficients[j] * b[v.qubits[j]];
    p.push_back(value);
  }
  return p;
}

inline std::vector<double> to_doubles(const std::vector<std::int64_t>& p) {
  return {p.begin(), p.end()};
}

/// Evaluates the stored form literally on a binary vector.
inline double qubo_objective(const Qubo& q, const BitVector& b) {
  require_binary(b, q.size());
  const auto n = static_cast<Eigen::Index>(q.size());
  double value = q.constant;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!b[static_cast<std::size_t>(i)]) continue;
    value += q.linear(i);
    for (Eigen::Index j = i; j < n; ++j) {
      if (b[static_cast<std::size_t>(j)]) value += q.quadratic(i, j);
    }
  }
  return value;
}

/// Both conversion steps: penalty then binary encoding.
inline BinaryProgram qcio_to_qubo(const QuadraticProgram& qcio, double rho, EncodingScheme scheme) {
  return integer_to_binary(to_penalty_form(qcio, rho), scheme);
}

// ---------------------------------------------------------------------------
// Rendering and export
// ---------------------------------------------------------------------------

/// Nonzero upper-triangular entries (i <= j) in row-major order.
struct QuboTerm {
  std::size_t i;
  std::size_t j;
  double value;
};

inline std::vector<QuboTerm> quadratic_terms(const Qubo& q) {
  std::vector<QuboTerm> terms;
  const auto n = static_cast<Eigen::Index>(q.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      if (q.quadratic(i, j) != 0.0) {
        terms.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), q.quadratic(i, j)});
      }
    }
  }
  return terms;
}

/// Prettyprint of the binary program, using "<variable>@<bit>" qubit names.
inline std::string render_qubo(const BinaryProgram& bp, const std::string& name = "QUBO") {
  QuadraticProgram view(name);
  for (const auto& qn : bp.encoding.qubit_names) view.add_variable(qn, VariableKind::binary, 0, 1);
  view.set_objective(bp.qubo.quadratic, bp.qubo.linear, bp.qubo.constant);
  return view.prettyprint();
}

inline nlohmann::json qubo_to_json(const Qubo& q) {
  nlohmann::json quad = nlohmann::json::array();
  for (const auto& t : quadratic_terms(q)) quad.push_back({t.i, t.j, t.value});
  std::vector<double> lin(q.linear.data(), q.linear.data() + q.linear.size());
  return {{"n", q.size()}, {"quadratic", quad}, {"linear", lin}, {"constant", q.constant}};
}

inline Qubo qubo_from_json(const nlohmann::json& doc) {
  try {
    const auto n = doc.at("n").get<std::size_t>();
    Qubo q;
    q.quadratic = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    q.linear = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    for (const auto& t : doc.at("quadratic")) {
      const auto i = t.at(0).get<std::size_t>();
      const auto j = t.at(1).get<std::size_t>();
      detail::require(i <= j && j < n, "qubo quadratic entry must satisfy i <= j < n");
      q.quadratic(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += t.at(2).get<double>();
    }
    const auto& lin = doc.at("linear");
    detail::require(lin.size() == n, "qubo linear part must have n entries");
    for (std::size_t i = 0; i < n; ++i) q.linear(static_cast<Eigen::Index>(i)) = lin[i].get<double>();
    q.constant = doc.at("constant").get<double>();
    return q;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed qubo document: ") + e.what());
  }
}

}  // namespace qcharge
