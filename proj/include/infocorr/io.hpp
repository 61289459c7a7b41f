#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "infocorr/probability.hpp"

namespace infocorr {

// Distribution record schema (one JSON object per file):
//   x_labels : array of strings
//   y_labels : array of strings
//   x_values : optional array of reals (numeric embedding per x symbol)
//   y_values : optional array of reals
//   probs    : row-major array of arrays of reals (row x, column y)
// Parsers reject NaN, negative entries, and a total deviating from 1 by
// more than 1e-9. Serialization of a parsed record reproduces it byte for
// byte (canonical form).
nlohmann::json to_json(const JointPmf& p);
JointPmf joint_pmf_from_json(const nlohmann::json& j);

// Decomposition record: { u_weights : array of reals,
//                         slices    : array of distribution records }
nlohmann::json to_json(const ConditionedJoint& cj);
ConditionedJoint conditioned_joint_from_json(const nlohmann::json& j);

JointPmf load_joint_pmf(const std::string& path);
void save_joint_pmf(const std::string& path, const JointPmf& p);

ConditionedJoint load_conditioned_joint(const std::string& path);
void save_conditioned_joint(const std::string& path, const ConditionedJoint& cj);

/// True when the JSON object carries a decomposition record rather than a
/// plain distribution record.
bool is_decomposition_record(const nlohmann::json& j);

nlohmann::json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace infocorr
