#include "infocorr/io.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

namespace infocorr {

namespace {

using nlohmann::json;

constexpr double kFileNormTol = 1e-9;

Vector parse_real_array(const json& arr, const char* field) {
  if (!arr.is_array()) throw ParseError(std::string(field) + " must be an array");
  Vector v(static_cast<Index>(arr.size()));
  Index i = 0;
  for (const auto& e : arr) {
    if (!e.is_number()) throw ParseError(std::string(field) + " must contain numbers");
    const double d = e.get<double>();
    if (std::isnan(d)) throw ParseError(std::string(field) + " contains NaN");
    v(i++) = d;
  }
  return v;
}

std::vector<std::string> parse_label_array(const json& arr, const char* field) {
  if (!arr.is_array()) throw ParseError(std::string(field) + " must be an array");
  std::vector<std::string> out;
  out.reserve(arr.size());
  for (const auto& e : arr) {
    if (!e.is_string()) throw ParseError(std::string(field) + " must contain strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

}  // namespace

nlohmann::json to_json(const JointPmf& p) {
  json j;
  j["x_labels"] = p.x_labels();
  j["y_labels"] = p.y_labels();
  if (p.has_explicit_x_values()) {
    j["x_values"] = std::vector<double>(p.x_values().begin(), p.x_values().end());
  }
  if (p.has_explicit_y_values()) {
    j["y_values"] = std::vector<double>(p.y_values().begin(), p.y_values().end());
  }
  json rows = json::array();
  for (Index x = 0; x < p.x_size(); ++x) {
    json row = json::array();
    for (Index y = 0; y < p.y_size(); ++y) row.push_back(p.probs()(x, y));
    rows.push_back(std::move(row));
  }
  j["probs"] = std::move(rows);
  return j;
}

JointPmf joint_pmf_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("distribution record must be a JSON object");
  if (!j.contains("probs") || !j.contains("x_labels") || !j.contains("y_labels"))
    throw ParseError("distribution record needs x_labels, y_labels and probs");

  auto x_labels = parse_label_array(j.at("x_labels"), "x_labels");
  auto y_labels = parse_label_array(j.at("y_labels"), "y_labels");
  const json& rows = j.at("probs");
  if (!rows.is_array() || rows.empty()) throw ParseError("probs must be a nonempty array");
  const Index xs = static_cast<Index>(rows.size());
  const Index ys = static_cast<Index>(rows.front().size());
  if (ys < 1) throw ParseError("probs rows must be nonempty");
  Matrix m(xs, ys);
  for (Index x = 0; x < xs; ++x) {
    const Vector row = parse_real_array(rows.at(static_cast<size_t>(x)), "probs");
    if (row.size() != ys) throw ParseError("probs rows have inconsistent lengths");
    if ((row.array() < 0.0).any()) throw ParseError("probs contains negative entries");
    m.row(x) = row.transpose();
  }
  const double sum = m.sum();
  if (std::abs(sum - 1.0) > kFileNormTol) throw ParseError("probs must sum to 1 within 1e-9");
  const double dust =
      16.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(m.size());
  if (std::abs(sum - 1.0) > dust) m /= sum;

  std::optional<Vector> xv, yv;
  if (j.contains("x_values")) xv = parse_real_array(j.at("x_values"), "x_values");
  if (j.contains("y_values")) yv = parse_real_array(j.at("y_values"), "y_values");
  try {
    return JointPmf(std::move(m), std::move(xv), std::move(yv), std::move(x_labels),
                    std::move(y_labels));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
}

nlohmann::json to_json(const ConditionedJoint& cj) {
  json j;
  j["u_weights"] = std::vector<double>(cj.u_weights().begin(), cj.u_weights().end());
  json slices = json::array();
  for (Index u = 0; u < cj.u_size(); ++u) slices.push_back(to_json(cj.slice(u)));
  j["slices"] = std::move(slices);
  return j;
}

ConditionedJoint conditioned_joint_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("u_weights") || !j.contains("slices"))
    throw ParseError("decomposition record needs u_weights and slices");
  Vector w = parse_real_array(j.at("u_weights"), "u_weights");
  const json& sl = j.at("slices");
  if (!sl.is_array() || sl.empty()) throw ParseError("slices must be a nonempty array");
  std::vector<JointPmf> slices;
  slices.reserve(sl.size());
  for (const auto& e : sl) slices.push_back(joint_pmf_from_json(e));
  try {
    return ConditionedJoint(std::move(w), std::move(slices));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
}

bool is_decomposition_record(const nlohmann::json& j) {
  return j.is_object() && j.contains("u_weights") && j.contains("slices");
}

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  return j;
}

void save_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
}

JointPmf load_joint_pmf(const std::string& path) {
  return joint_pmf_from_json(load_json_file(path));
}

void save_joint_pmf(const std::string& path, const JointPmf& p) {
  save_json_file(path, to_json(p));
}

ConditionedJoint load_conditioned_joint(const std::string& path) {
  return conditioned_joint_from_json(load_json_file(path));
}

void save_conditioned_joint(const std::string& path, const ConditionedJoint& cj) {
  save_json_file(path, to_json(cj));
}

}  // namespace infocorr
