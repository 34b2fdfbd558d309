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
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bits.hpp"
#include "convert.hpp"
#include "error.hpp"
#include "hardware.hpp"
#include "model.hpp"
#include "noise.hpp"
#include "numfmt.hpp"
#include "sim.hpp"

namespace qcharge {

struct Distribution {
  BitOrder order = BitOrder::device;
  std::map<std::string, double> probabilities;

  std::size_t width() const { return probabilities.empty() ? 0 : probabilities.begin()->first.size(); }

  double probability(const std::string& key) const {
    auto it = probabilities.find(key);
    return it == probabilities.end() ? 0.0 : it->second;
  }

  void validate(double tol = 1e-9) const {
    double total = 0.0;
    for (const auto& [k, p] : probabilities) {
      detail::require(p >= 0.0, "negative probability for '" + k + "'");
      detail::require(k.size() == width(), "distribution keys have different lengths");
      total += p;
    }
    detail::require(std::abs(total - 1.0) <= tol, "probabilities sum to " + repr(total));
  }
};

inline Distribution counts_to_distribution(const Counts& counts) {
  std::int64_t total = 0;
  for (const auto& [k, v] : counts.counts) total += v;
  detail::require(total > 0, "counts are empty");
  Distribution d;
  d.order = counts.order;
  for (const auto& [k, v] : counts.counts) {
    d.probabilities[k] = static_cast<double>(v) / static_cast<double>(total);
  }
  return d;
}

inline Distribution reorder(const Distribution& d, BitOrder order) {
  if (d.order == order) return d;
  Distribution out;
  out.order = order;
  for (const auto& [k, p] : d.probabilities) out.probabilities[convert_bitstring(k, d.order, order)] = p;
  return out;
}

/// Exact outcome distribution of a statevector; zero entries are dropped.
inline Distribution state_distribution(const Statevector& s, BitOrder order = BitOrder::device) {
  Distribution d;
  d.order = order;
  for (std::uint64_t m = 0; m < s.dimension(); ++m) {
    const double p = std::norm(s.amplitudes[m]);
    if (p > 0.0) d.probabilities[render_index(m, s.n, order)] = p;
  }
  return d;
}

/// F = sum_i sqrt(p_i q_i). With `squared`, F^2.
inline double fidelity(const Distribution& p, const Distribution& q, bool squared = false) {
  detail::require(p.order == q.order, "distributions use different bit orders; reorder one first");
  double f = 0.0;
  for (const auto& [k, pk] : p.probabilities) {
    auto it = q.probabilities.find(k);
    if (it != q.probabilities.end()) f += std::sqrt(pk * it->second);
  }
  return squared ? f * f : f;
}

// ---------------------------------------------------------------------------
// Readout noise and mitigation
// ---------------------------------------------------------------------------

inline constexpr std::size_t kMaxDenseMitigationQubits = 16;
inline constexpr double kMitigationTruncation = 1e-12;

namespace detail {

inline std::vector<double> dense_vector(const Distribution& d, std::size_t n) {
  std::vector<double> v(std::size_t{1} << n, 0.0);
  for (const auto& [k, p] : d.probabilities) v[index_of_bits(parse_bits(k, d.order))] = p;
  return v;
}

inline Distribution from_dense(const std::vector<double>& v, std::size_t n, BitOrder order) {
  Distribution d;
  d.order = order;
  for (std::size_t m = 0; m < v.size(); ++m) {
    if (v[m] > 0.0) d.probabilities[render_index(m, n, order)] = v[m];
  }
  return d;
}

/// Applies the 2x2 matrix [[a00, a01], [a10, a11]] to qubit k of a dense vector.
inline void apply_single(std::vector<double>& v, std::size_t k, double a00, double a01, double a10, double a11) {
  const std::size_t stride = std::size_t{1} << k;
  for (std::size_t base = 0; base < v.size(); base += 2 * stride) {
    for (std::size_t m = base; m < base + stride; ++m) {
      const double x0 = v[m];
      const double x1 = v[m + stride];
      v[m] = a00 * x0 + a01 * x1;
      v[m + stride] = a10 * x0 + a11 * x1;
    }
  }
}

}  // namespace detail

/// Pushes an exact distribution through the per-qubit confusion matrices.
inline Distribution apply_readout_noise(const Distribution& d, const ReadoutNoiseModel& model) {
  const std::size_t n = d.width();
  model.validate();
  model.require_covers(n);
  if (n > kMaxDenseMitigationQubits) throw ResourceError("readout noise: too many qubits for a dense pass");
  auto v = detail::dense_vector(d, n);
  for (std::size_t k = 0; k < n; ++k) {
    detail::apply_single(v, k, 1.0 - model.p01[k], model.p10[k], model.p01[k], 1.0 - model.p10[k]);
  }
  return detail::from_dense(v, n, d.order);
}

/// Euclidean projection onto the probability simplex (sort and clip).
inline std::vector<double> project_to_simplex(const std::vector<double>& x) {
  if (x.empty()) return {};
  std::vector<double> u(x);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumulative += u[j];
    const double t = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::max(x[i] - theta, 0.0);
  return out;
}

/// Inverts the tensored confusion matrices, then projects onto the simplex.
/// Up to 16 qubits the inversion is dense; beyond that it is restricted to the
/// observed outcomes.
inline Distribution mitigate_distribution(const Distribution& d, const ReadoutNoiseModel& model) {
  const std::size_t n = d.width();
  model.validate();
  model.require_covers(n);
  for (std::size_t k = 0; k < n; ++k) {
    detail::require(std::abs(1.0 - model.p01[k] - model.p10[k]) > 1e-15,
                    "confusion matrix of qubit " + std::to_string(k) + " is singular");
  }

  if (n <= kMaxDenseMitigationQubits) {
    auto v = detail::dense_vector(d, n);
    for (std::size_t k = 0; k < n; ++k) {
      const double det = 1.0 - model.p01[k] - model.p10[k];
      detail::apply_single(v, k, (1.0 - model.p10[k]) / det, -model.p10[k] / det, -model.p01[k] / det,
                           (1.0 - model.p01[k]) / det);
    }
    return detail::from_dense(project_to_simplex(v), n, d.order);
  }

  std::vector<std::string> keys;
  std::vector<BitVector> bits;
  Eigen::VectorXd observed(static_cast<Eigen::Index>(d.probabilities.size()));
  for (const auto& [k, p] : d.probabilities) {
    observed(static_cast<Eigen::Index>(keys.size())) = p;
    keys.push_back(k);
    bits.push_back(parse_bits(k, d.order));
  }
  const auto m = static_cast<Eigen::Index>(keys.size());
  Eigen::MatrixXd a(m, m);
  for (Eigen::Index r = 0; r < m; ++r) {
    for (Eigen::Index c = 0; c < m; ++c) {
      double entry = 1.0;
      for (std::size_t k = 0; k < n; ++k) {
        const auto out = bits[static_cast<std::size_t>(r)][k];
        const auto in = bits[static_cast<std::size_t>(c)][k];
        entry *= in == 0 ? (out == 0 ? 1.0 - model.p01[k] : model.p01[k])
                         : (out == 1 ? 1.0 - model.p10[k] : model.p10[k]);
      }
      a(r, c) = entry < kMitigationTruncation ? 0.0 : entry;
    }
  }
  const Eigen::VectorXd x = a.partialPivLu().solve(observed);
  const auto projected = project_to_simplex(std::vector<double>(x.data(), x.data() + x.size()));
  Distribution out;
  out.order = d.order;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (projected[i] > 0.0) out.probabilities[keys[i]] = projected[i];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Solution table
// ---------------------------------------------------------------------------

struct AnnotatedRow {
  std::string bitstring;
  std::string bit_vector;  // variable order
  std::vector<std::int64_t> integer_vector;
  double probability = 0.0;
  double cost = 0.0;
  bool feasible = false;
};

/// The k most likely outcomes with their decoded schedules, QUBO cost and
/// feasibility for the constrained program.
inline std::vector<AnnotatedRow> annotate_top_k(const Distribution& d, std::size_t k, const BinaryProgram& bp,
                                                const QuadraticProgram& qcio) {
  detail::require(k >= 1, "k must be >= 1");
  std::vector<std::pair<std::string, double>> entries(d.probabilities.begin(), d.probabilities.end());
  std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (entries.size() > k) entries.resize(k);

  std::vector<AnnotatedRow> rows;
  for (const auto& [key, p] : entries) {
    const BitVector b = parse_bits(key, d.order);
    AnnotatedRow row;
    row.bitstring = key;
    row.bit_vector = render_bits(b, BitOrder::variable);
    row.integer_vector = interpret(bp.encoding, b);
    row.probability = p;
    row.cost = qubo_objective(bp.qubo, b);
    row.feasible = qcio.is_feasible(to_doubles(row.integer_vector));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::string annotation_csv(const std::vector<AnnotatedRow>& rows) {
  std::ostringstream os;
  os << "bitstring,bit_vector,integer_vector,probability,cost,is_feasible\n";
  for (const auto& r : rows) {
    os << r.bitstring << ',' << r.bit_vector << ',';
    for (std::size_t i = 0; i < r.integer_vector.size(); ++i) os << (i ? " " : "") << r.integer_vector[i];
    os << ',' << repr(r.probability) << ',' << repr(r.cost) << ',' << (r.feasible ? "true" : "false") << '\n';
  }
  return os.str();
}

inline nlohmann::json annotation_to_json(const std::vector<AnnotatedRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) {
    out.push_back({{"bitstring", r.bitstring},
                   {"bit_vector", r.bit_vector},
                   {"integer_vector", r.integer_vector},
                   {"probability", r.probability},
                   {"cost", r.cost},
                   {"is_feasible", r.feasible}});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Experiment records
// ---------------------------------------------------------------------------

inline constexpr int kRecordSchemaVersion = 1;

/// "YYYY_MM_DD-HHhMMm" in UTC.
inline std::string format_timestamp(std::chrono::system_clock::time_point t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y_%m_%d-%Hh%Mm", &tm);
  return buf;
}

/// FNV-1a, rendered as 16 hex digits.
inline std::string content_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct ExperimentRecord {
  std::string timestamp;
  std::string backend_label = "statevector";
  std::string problem_hash;
  double rho = 0.0;
  std::size_t layers = 0;
  std::vector<double> betas;
  std::vector<double> gammas;
  std::int64_t shots = 0;
  std::uint64_t seed = 0;
  std::optional<ReadoutNoiseModel> noise;
  Counts counts;
  std::optional<GateBudget> budget;
  std::string notes;

  bool operator==(const ExperimentRecord&) const = default;
};

inline nlohmann::json record_to_json(const ExperimentRecord& r) {
  nlohmann::json j = {{"schema_version", kRecordSchemaVersion},
                      {"timestamp", r.timestamp},
                      {"backend_label", r.backend_label},
                      {"problem_hash", r.problem_hash},
                      {"rho", r.rho},
                      {"p", r.layers},
                      {"betas", r.betas},
                      {"gammas", r.gammas},
                      {"shots", r.shots},
                      {"seed", r.seed},
                      {"counts", counts_to_json(r.counts)},
                      {"notes", r.notes}};
  if (r.noise) j["noise"] = noise_to_json(*r.noise);
  if (r.budget) j["budget"] = budget_to_json(*r.budget);
  return j;
}

inline ExperimentRecord record_from_json(const nlohmann::json& j) {
  ExperimentRecord r;
  try {
    const int version = j.at("schema_version").get<int>();
    detail::require(version == kRecordSchemaVersion,
                    "record schema_version " + std::to_string(version) + " is not supported");
    r.timestamp = j.at("timestamp").get<std::string>();
    r.backend_label = j.at("backend_label").get<std::string>();
    r.problem_hash = j.at("problem_hash").get<std::string>();
    r.rho = j.at("rho").get<double>();
    r.layers = j.at("p").get<std::size_t>();
    r.betas = j.at("betas").get<std::vector<double>>();
    r.gammas = j.at("gammas").get<std::vector<double>>();
    r.shots = j.at("shots").get<std::int64_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.counts = counts_from_json(j.at("counts"));
    r.notes = j.value("notes", std::string());
    if (j.contains("noise") && !j["noise"].is_null()) r.noise = noise_from_json(j["noise"]);
    if (j.contains("budget") && !j["budget"].is_null()) r.budget = budget_from_json(j["budget"]);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed experiment record: ") + e.what());
  }
  detail::require(r.counts.shots == r.shots, "record shots do not match its counts");
  detail::require(r.betas.size() == r.gammas.size(), "record betas and gammas differ in length");
  return r;
}

/// Writes to a temporary sibling and renames it over the target.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw ValidationError("cannot write '" + tmp.string() + "'");
    os << content;
    if (!os) throw ValidationError("write to '" + tmp.string() + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
  try {
    return nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

inline void save_record(const std::filesystem::path& path, const ExperimentRecord& r) {
  write_file_atomic(path, record_to_json(r).dump(2) + "\n");
}

inline ExperimentRecord load_record(const std::filesystem::path& path) {
  return record_from_json(read_json_file(path));
}

}  // namespace qcharge
