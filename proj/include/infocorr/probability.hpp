#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "infocorr/errors.hpp"

namespace infocorr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Finite joint distribution over X x Y. Rows index X, columns index Y.
/// Entries are validated nonnegative and unit-sum at construction
/// (tolerance 1e-12, then renormalized), after which the object is
/// immutable and all operations on it are pure.
///
/// Each symbol optionally carries a real embedding used by Pearson
/// correlation and the correlation ratio; when absent the symbol index
/// (0,1,2,...) is used. Maximal correlation ignores embeddings.
class JointPmf {
 public:
  explicit JointPmf(Matrix probs);
  JointPmf(Matrix probs, std::optional<Vector> x_values, std::optional<Vector> y_values);
  JointPmf(Matrix probs, std::optional<Vector> x_values, std::optional<Vector> y_values,
           std::vector<std::string> x_labels, std::vector<std::string> y_labels);

  Index x_size() const { return probs_.rows(); }
  Index y_size() const { return probs_.cols(); }
  const Matrix& probs() const { return probs_; }

  /// Embedding of the X symbols (explicit values or the index default).
  const Vector& x_values() const { return x_values_; }
  const Vector& y_values() const { return y_values_; }
  bool has_explicit_x_values() const { return explicit_x_values_; }
  bool has_explicit_y_values() const { return explicit_y_values_; }

  const std::vector<std::string>& x_labels() const { return x_labels_; }
  const std::vector<std::string>& y_labels() const { return y_labels_; }

 private:
  void validate_and_finish();

  Matrix probs_;
  Vector x_values_;
  Vector y_values_;
  bool explicit_x_values_ = false;
  bool explicit_y_values_ = false;
  std::vector<std::string> x_labels_;
  std::vector<std::string> y_labels_;
};

/// Finite joint distribution over X x Y x U stored as a weight per
/// conditioning value plus one JointPmf slice per value. Slices are kept
/// only for u of positive probability; zero-weight slices are dropped at
/// construction, matching the sup-over-supported-u convention of the
/// conditional measures.
class ConditionedJoint {
 public:
  ConditionedJoint(Vector u_weights, std::vector<JointPmf> slices);

  Index u_size() const { return static_cast<Index>(slices_.size()); }
  Index x_size() const { return slices_.front().x_size(); }
  Index y_size() const { return slices_.front().y_size(); }
  double weight(Index u) const { return u_weights_(u); }
  const Vector& u_weights() const { return u_weights_; }
  const JointPmf& slice(Index u) const { return slices_[static_cast<size_t>(u)]; }
  const std::vector<JointPmf>& slices() const { return slices_; }

 private:
  Vector u_weights_;
  std::vector<JointPmf> slices_;
};

/// Conditional distribution P(u | x,y): one probability row over U per
/// (x,y) pair. Row index is x * y_size + y.
class Channel {
 public:
  Channel(Matrix rows, Index x_size, Index y_size);

  Index x_size() const { return x_size_; }
  Index y_size() const { return y_size_; }
  Index u_size() const { return rows_.cols(); }
  const Matrix& rows() const { return rows_; }

 private:
  Matrix rows_;
  Index x_size_;
  Index y_size_;
};

std::pair<Vector, Vector> marginals(const JointPmf& p);

/// Builds a ConditionedJoint from P_U and per-u slices, dropping
/// zero-weight slices. Throws ShapeMismatch / NotNormalized.
ConditionedJoint attach_condition(const Vector& pmf_u, const std::vector<JointPmf>& slices);

/// Joint over (X x Y) x U as a JointPmf whose rows are (x,y) pairs in
/// row-major order and whose columns are u.
JointPmf flatten(const ConditionedJoint& cj);

/// Mixture over u: sum_u w_u * slice_u, the implied joint over X x Y.
JointPmf mixture(const ConditionedJoint& cj);

/// Applies a channel to p, producing the induced decomposition with
/// P_U(u) = sum_xy p(x,y) rows(xy,u) and slices P_{XY|U=u}.
ConditionedJoint condition_on_channel(const JointPmf& p, const Channel& ch);

/// Shannon entropy in bits; 0 log 0 = 0.
double entropy(const Eigen::Ref<const Vector>& v);
double entropy(const JointPmf& p);  // H(XY)
double binary_entropy(double p);    // H2 in bits

/// I(X;Y) in bits, clamped to >= 0.
double mutual_information(const JointPmf& p);

/// I(XY;U) = H(mixture) - sum_u w_u H(slice_u), in bits, clamped to >= 0.
double mutual_information(const ConditionedJoint& cj);

/// Half the L1 distance. Throws ShapeMismatch on different shapes.
double tv_distance(const JointPmf& p, const JointPmf& q);
double tv_distance(const Eigen::Ref<const Vector>& p, const Eigen::Ref<const Vector>& q);

/// Independent product: P((x1,x2),(y1,y2)) = a(x1,y1) * b(x2,y2), with
/// composite index (x1 * b.x_size + x2, y1 * b.y_size + y2).
JointPmf product_pmf(const JointPmf& a, const JointPmf& b);

/// Euclidean projection onto the probability simplex, in place.
void project_to_simplex(Eigen::Ref<Vector> v);

}  // namespace infocorr
