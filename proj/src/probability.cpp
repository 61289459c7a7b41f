#include "infocorr/probability.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace infocorr {

namespace {

constexpr double kNormTol = 1e-12;

Vector index_embedding(Index n) {
  return Vector::LinSpaced(n, 0.0, static_cast<double>(n - 1));
}

std::vector<std::string> default_labels(const char* prefix, Index n) {
  std::vector<std::string> out;
  out.reserve(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

// Renormalizes in place unless the sum already sits within floating-point
// dust of 1, so that serialize/parse round trips are bit identical.
void check_and_renormalize(Matrix& m, double tol) {
  if (m.rows() < 1 || m.cols() < 1) throw ShapeMismatch("pmf must be at least 1x1");
  if (!m.allFinite()) throw NotNormalized("pmf contains NaN or infinity");
  if ((m.array() < 0.0).any()) throw NotNormalized("pmf contains negative entries");
  const double sum = m.sum();
  const double dust = 16.0 * std::numeric_limits<double>::epsilon() *
                      static_cast<double>(m.size());
  if (std::abs(sum - 1.0) > tol) {
    std::ostringstream os;
    os << "pmf sums to " << sum << ", outside tolerance " << tol;
    throw NotNormalized(os.str());
  }
  if (std::abs(sum - 1.0) > dust) m /= sum;
}

}  // namespace

JointPmf::JointPmf(Matrix probs) : JointPmf(std::move(probs), std::nullopt, std::nullopt) {}

JointPmf::JointPmf(Matrix probs, std::optional<Vector> x_values, std::optional<Vector> y_values)
    : probs_(std::move(probs)) {
  check_and_renormalize(probs_, kNormTol);
  if (x_values) {
    if (x_values->size() != x_size()) throw ShapeMismatch("x_values length != x_size");
    x_values_ = std::move(*x_values);
    explicit_x_values_ = true;
  } else {
    x_values_ = index_embedding(x_size());
  }
  if (y_values) {
    if (y_values->size() != y_size()) throw ShapeMismatch("y_values length != y_size");
    y_values_ = std::move(*y_values);
    explicit_y_values_ = true;
  } else {
    y_values_ = index_embedding(y_size());
  }
  x_labels_ = default_labels("x", x_size());
  y_labels_ = default_labels("y", y_size());
}

JointPmf::JointPmf(Matrix probs, std::optional<Vector> x_values, std::optional<Vector> y_values,
                   std::vector<std::string> x_labels, std::vector<std::string> y_labels)
    : JointPmf(std::move(probs), std::move(x_values), std::move(y_values)) {
  if (static_cast<Index>(x_labels.size()) != x_size())
    throw ShapeMismatch("x_labels length != x_size");
  if (static_cast<Index>(y_labels.size()) != y_size())
    throw ShapeMismatch("y_labels length != y_size");
  x_labels_ = std::move(x_labels);
  y_labels_ = std::move(y_labels);
}

ConditionedJoint::ConditionedJoint(Vector u_weights, std::vector<JointPmf> slices) {
  if (u_weights.size() != static_cast<Index>(slices.size()))
    throw ShapeMismatch("u_weights length != number of slices");
  if (slices.empty()) throw ShapeMismatch("at least one slice required");
  if (!u_weights.allFinite() || (u_weights.array() < 0.0).any())
    throw NotNormalized("u_weights must be finite and nonnegative");
  const double sum = u_weights.sum();
  if (std::abs(sum - 1.0) > kNormTol) throw NotNormalized("u_weights must sum to 1");

  const Index xs = slices.front().x_size();
  const Index ys = slices.front().y_size();
  for (const JointPmf& s : slices) {
    if (s.x_size() != xs || s.y_size() != ys) throw ShapeMismatch("slice shapes disagree");
    if (s.x_values() != slices.front().x_values() || s.y_values() != slices.front().y_values())
      throw ShapeMismatch("slice embeddings disagree");
  }

  // Keep only positive-weight slices; the conditional measures take their
  // sup over u with P(u) > 0.
  std::vector<double> kept_w;
  for (Index u = 0; u < u_weights.size(); ++u) {
    if (u_weights(u) > 0.0) {
      kept_w.push_back(u_weights(u));
      slices_.push_back(std::move(slices[static_cast<size_t>(u)]));
    }
  }
  if (slices_.empty()) throw NotNormalized("all u_weights are zero");
  u_weights_ = Eigen::Map<const Vector>(kept_w.data(), static_cast<Index>(kept_w.size()));
}

Channel::Channel(Matrix rows, Index x_size, Index y_size)
    : rows_(std::move(rows)), x_size_(x_size), y_size_(y_size) {
  if (rows_.rows() != x_size_ * y_size_) throw ShapeMismatch("channel rows != x_size*y_size");
  if (rows_.cols() < 1) throw ShapeMismatch("channel needs at least one u column");
  if (!rows_.allFinite() || (rows_.array() < 0.0).any())
    throw NotNormalized("channel rows must be finite and nonnegative");
  for (Index r = 0; r < rows_.rows(); ++r) {
    if (std::abs(rows_.row(r).sum() - 1.0) > kNormTol)
      throw NotNormalized("channel row " + std::to_string(r) + " does not sum to 1");
  }
}

std::pair<Vector, Vector> marginals(const JointPmf& p) {
  return {p.probs().rowwise().sum(), p.probs().colwise().sum().transpose()};
}

ConditionedJoint attach_condition(const Vector& pmf_u, const std::vector<JointPmf>& slices) {
  return ConditionedJoint(pmf_u, slices);
}

JointPmf flatten(const ConditionedJoint& cj) {
  const Index cells = cj.x_size() * cj.y_size();
  Matrix out(cells, cj.u_size());
  for (Index u = 0; u < cj.u_size(); ++u) {
    const Matrix& s = cj.slice(u).probs();
    for (Index x = 0; x < cj.x_size(); ++x)
      for (Index y = 0; y < cj.y_size(); ++y)
        out(x * cj.y_size() + y, u) = cj.weight(u) * s(x, y);
  }
  return JointPmf(std::move(out));
}

JointPmf mixture(const ConditionedJoint& cj) {
  Matrix acc = Matrix::Zero(cj.x_size(), cj.y_size());
  for (Index u = 0; u < cj.u_size(); ++u) acc += cj.weight(u) * cj.slice(u).probs();
  const JointPmf& front = cj.slice(0);
  return JointPmf(std::move(acc),
                  front.has_explicit_x_values() ? std::optional<Vector>(front.x_values())
                                                : std::nullopt,
                  front.has_explicit_y_values() ? std::optional<Vector>(front.y_values())
                                                : std::nullopt);
}

ConditionedJoint condition_on_channel(const JointPmf& p, const Channel& ch) {
  if (ch.x_size() != p.x_size() || ch.y_size() != p.y_size())
    throw ShapeMismatch("channel shape does not match pmf");
  const Index cells = p.x_size() * p.y_size();
  Vector pflat(cells);
  for (Index x = 0; x < p.x_size(); ++x)
    for (Index y = 0; y < p.y_size(); ++y) pflat(x * p.y_size() + y) = p.probs()(x, y);

  Vector pu = ch.rows().transpose() * pflat;
  std::vector<JointPmf> slices;
  std::vector<double> weights;
  for (Index u = 0; u < ch.u_size(); ++u) {
    if (pu(u) <= 0.0) continue;
    Matrix s(p.x_size(), p.y_size());
    for (Index x = 0; x < p.x_size(); ++x)
      for (Index y = 0; y < p.y_size(); ++y)
        s(x, y) = pflat(x * p.y_size() + y) * ch.rows()(x * p.y_size() + y, u) / pu(u);
    slices.emplace_back(std::move(s),
                        p.has_explicit_x_values() ? std::optional<Vector>(p.x_values())
                                                  : std::nullopt,
                        p.has_explicit_y_values() ? std::optional<Vector>(p.y_values())
                                                  : std::nullopt);
    weights.push_back(pu(u));
  }
  Vector w = Eigen::Map<const Vector>(weights.data(), static_cast<Index>(weights.size()));
  w /= w.sum();
  return ConditionedJoint(std::move(w), std::move(slices));
}

double entropy(const Eigen::Ref<const Vector>& v) {
  double h = 0.0;
  for (Index i = 0; i < v.size(); ++i) {
    const double p = v(i);
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

double entropy(const JointPmf& p) {
  return entropy(Eigen::Map<const Vector>(p.probs().data(), p.probs().size()));
}

double binary_entropy(double p) {
  double h = 0.0;
  if (p > 0.0) h -= p * std::log2(p);
  if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
  return h;
}

double mutual_information(const JointPmf& p) {
  const auto [px, py] = marginals(p);
  double mi = 0.0;
  for (Index x = 0; x < p.x_size(); ++x) {
    for (Index y = 0; y < p.y_size(); ++y) {
      const double pxy = p.probs()(x, y);
      if (pxy > 0.0) mi += pxy * std::log2(pxy / (px(x) * py(y)));
    }
  }
  return std::max(0.0, mi);
}

double mutual_information(const ConditionedJoint& cj) {
  double h_cond = 0.0;
  for (Index u = 0; u < cj.u_size(); ++u) h_cond += cj.weight(u) * entropy(cj.slice(u));
  return std::max(0.0, entropy(mixture(cj)) - h_cond);
}

double tv_distance(const JointPmf& p, const JointPmf& q) {
  if (p.x_size() != q.x_size() || p.y_size() != q.y_size())
    throw ShapeMismatch("tv_distance requires equal shapes");
  return 0.5 * (p.probs() - q.probs()).cwiseAbs().sum();
}

double tv_distance(const Eigen::Ref<const Vector>& p, const Eigen::Ref<const Vector>& q) {
  if (p.size() != q.size()) throw ShapeMismatch("tv_distance requires equal lengths");
  return 0.5 * (p - q).cwiseAbs().sum();
}

void project_to_simplex(Eigen::Ref<Vector> v) {
  const Index n = v.size();
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0, theta = 0.0;
  for (Index i = 0; i < n; ++i) {
    css += u[static_cast<size_t>(i)];
    const double t = (css - 1.0) / static_cast<double>(i + 1);
    if (u[static_cast<size_t>(i)] - t > 0.0) theta = t;
  }
  for (Index i = 0; i < n; ++i) v(i) = std::max(0.0, v(i) - theta);
}

JointPmf product_pmf(const JointPmf& a, const JointPmf& b) {
  Matrix out(a.x_size() * b.x_size(), a.y_size() * b.y_size());
  for (Index x1 = 0; x1 < a.x_size(); ++x1)
    for (Index x2 = 0; x2 < b.x_size(); ++x2)
      for (Index y1 = 0; y1 < a.y_size(); ++y1)
        for (Index y2 = 0; y2 < b.y_size(); ++y2)
          out(x1 * b.x_size() + x2, y1 * b.y_size() + y2) =
              a.probs()(x1, y1) * b.probs()(x2, y2);
  return JointPmf(std::move(out));
}

}  // namespace infocorr
