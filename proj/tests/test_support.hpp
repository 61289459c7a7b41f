#pragma once

#include <random>
#include <vector>

#include "infocorr/probability.hpp"

namespace testsupport {

using infocorr::ConditionedJoint;
using infocorr::Index;
using infocorr::JointPmf;
using infocorr::Matrix;
using infocorr::Vector;

inline double runif(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline Matrix random_pmf_matrix(Index xs, Index ys, std::mt19937_64& rng,
                                double zero_fraction = 0.0) {
  Matrix m(xs, ys);
  for (Index x = 0; x < xs; ++x)
    for (Index y = 0; y < ys; ++y) {
      const double u = std::max(runif(rng), 1e-12);
      m(x, y) = (zero_fraction > 0.0 && runif(rng) < zero_fraction) ? 0.0 : -std::log(u);
    }
  if (m.sum() <= 0.0) m(0, 0) = 1.0;
  m /= m.sum();
  return m;
}

inline JointPmf random_pmf(Index xs, Index ys, std::mt19937_64& rng, double zero_fraction = 0.0) {
  return JointPmf(random_pmf_matrix(xs, ys, rng, zero_fraction));
}

inline Vector random_prob_vector(Index n, std::mt19937_64& rng) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = -std::log(std::max(runif(rng), 1e-12));
  v /= v.sum();
  return v;
}

inline JointPmf random_pmf_with_values(Index xs, Index ys, std::mt19937_64& rng) {
  Vector xv(xs), yv(ys);
  for (Index i = 0; i < xs; ++i) xv(i) = 2.0 * runif(rng) - 1.0;
  for (Index j = 0; j < ys; ++j) yv(j) = 2.0 * runif(rng) - 1.0;
  return JointPmf(random_pmf_matrix(xs, ys, rng), xv, yv);
}

inline ConditionedJoint random_cj(Index xs, Index ys, Index us, std::mt19937_64& rng,
                                  bool with_values = false) {
  Vector w = random_prob_vector(us, rng);
  Vector xv(xs), yv(ys);
  for (Index i = 0; i < xs; ++i) xv(i) = 2.0 * runif(rng) - 1.0;
  for (Index j = 0; j < ys; ++j) yv(j) = 2.0 * runif(rng) - 1.0;
  std::vector<JointPmf> slices;
  for (Index u = 0; u < us; ++u) {
    Matrix m = random_pmf_matrix(xs, ys, rng);
    if (with_values) {
      slices.emplace_back(std::move(m), xv, yv);
    } else {
      slices.emplace_back(std::move(m));
    }
  }
  return ConditionedJoint(std::move(w), std::move(slices));
}

inline JointPmf uniform_pmf(Index xs, Index ys) {
  return JointPmf(Matrix::Constant(xs, ys, 1.0 / static_cast<double>(xs * ys)));
}

inline JointPmf identity_coupling(Index n) {
  Matrix m = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) m(i, i) = 1.0 / static_cast<double>(n);
  return JointPmf(std::move(m));
}

inline JointPmf point_mass(Index xs, Index ys, Index x, Index y) {
  Matrix m = Matrix::Zero(xs, ys);
  m(x, y) = 1.0;
  return JointPmf(std::move(m));
}

// Product of independent marginals drawn at random.
inline JointPmf random_product_pmf(Index xs, Index ys, std::mt19937_64& rng) {
  const Vector px = random_prob_vector(xs, rng);
  const Vector py = random_prob_vector(ys, rng);
  return JointPmf(Matrix(px * py.transpose()));
}

}  // namespace testsupport
