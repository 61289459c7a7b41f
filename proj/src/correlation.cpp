#include "infocorr/correlation.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <random>

namespace infocorr {

namespace {

// Weight below which a u cell is treated as unsupported in the smooth
// optimizer (floating-point dust from simplex projections).
constexpr double kSupportDust = 1e-15;

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

// Second singular value of the normalized 2x2 table [[a,b],[c,d]].
// Scale invariant: lambda1 = 1 for the normalized table, and
// lambda1 * lambda2 = |det Q| = |ad - bc| / sqrt(r0 r1 c0 c1).
double lambda2_2x2(double a, double b, double c, double d) {
  const double r0 = a + b, r1 = c + d, c0 = a + c, c1 = b + d;
  if (r0 <= 0.0 || r1 <= 0.0 || c0 <= 0.0 || c1 <= 0.0) return 0.0;
  return clamp01(std::abs(a * d - b * c) / std::sqrt(r0 * r1 * c0 * c1));
}

struct SpectralResult {
  double lambda1 = 1.0;
  double lambda2 = 0.0;
  bool degenerate = false;
};

SpectralResult spectral_core(const Eigen::Ref<const Matrix>& table, bool precise) {
  const Vector rx = table.rowwise().sum();
  const Vector cy = table.colwise().sum().transpose();
  std::vector<Index> xs, ys;
  for (Index i = 0; i < rx.size(); ++i)
    if (rx(i) > 0.0) xs.push_back(i);
  for (Index j = 0; j < cy.size(); ++j)
    if (cy(j) > 0.0) ys.push_back(j);

  SpectralResult res;
  if (xs.size() < 2 || ys.size() < 2) {
    res.degenerate = true;
    return res;
  }
  if (!precise && xs.size() == 2 && ys.size() == 2) {
    res.lambda2 = lambda2_2x2(table(xs[0], ys[0]), table(xs[0], ys[1]), table(xs[1], ys[0]),
                              table(xs[1], ys[1]));
    return res;
  }

  const double total = table.sum();
  Matrix q(static_cast<Index>(xs.size()), static_cast<Index>(ys.size()));
  for (size_t i = 0; i < xs.size(); ++i)
    for (size_t j = 0; j < ys.size(); ++j)
      q(static_cast<Index>(i), static_cast<Index>(j)) =
          (table(xs[i], ys[j]) / total) / std::sqrt((rx(xs[i]) / total) * (cy(ys[j]) / total));

  if (precise) {
    Eigen::JacobiSVD<Matrix> svd(q);
    res.lambda1 = svd.singularValues()(0);
    res.lambda2 = clamp01(svd.singularValues()(1));
  } else {
    // Gram route on the smaller side; adequate for optimizer iterates.
    Matrix g = q.rows() <= q.cols() ? Matrix(q * q.transpose()) : Matrix(q.transpose() * q);
    Eigen::SelfAdjointEigenSolver<Matrix> es(g, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();  // ascending
    res.lambda1 = std::sqrt(std::max(0.0, ev(ev.size() - 1)));
    res.lambda2 = clamp01(std::sqrt(std::max(0.0, ev(ev.size() - 2))));
  }
  return res;
}

Vector slice_x_marginal(const JointPmf& s) { return s.probs().rowwise().sum(); }
Vector slice_y_marginal(const JointPmf& s) { return s.probs().colwise().sum().transpose(); }

Moments moments_of(const Matrix& probs, const Vector& xv, const Vector& yv) {
  const Vector px = probs.rowwise().sum();
  const Vector py = probs.colwise().sum().transpose();
  const double mx = px.dot(xv);
  const double my = py.dot(yv);
  Moments m;
  m.var_x = px.dot(xv.cwiseProduct(xv)) - mx * mx;
  m.var_y = py.dot(yv.cwiseProduct(yv)) - my * my;
  double cov = 0.0;
  for (Index x = 0; x < probs.rows(); ++x)
    for (Index y = 0; y < probs.cols(); ++y)
      cov += probs(x, y) * (xv(x) - mx) * (yv(y) - my);
  m.cov = cov;
  return m;
}

// var(E[X|Y]) for the given table and x embedding, plus var(X).
std::pair<double, double> regression_variances(const Matrix& probs, const Vector& xv) {
  const Vector px = probs.rowwise().sum();
  const Vector py = probs.colwise().sum().transpose();
  const double mx = px.dot(xv);
  const double var_x = px.dot(xv.cwiseProduct(xv)) - mx * mx;
  double var_regress = 0.0;
  for (Index y = 0; y < probs.cols(); ++y) {
    if (py(y) <= 0.0) continue;
    double cond_mean = 0.0;
    for (Index x = 0; x < probs.rows(); ++x) cond_mean += probs(x, y) * xv(x);
    cond_mean /= py(y);
    var_regress += py(y) * (cond_mean - mx) * (cond_mean - mx);
  }
  return {var_regress, var_x};
}

double uniform_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

double pearson(const JointPmf& p) {
  const Moments m = moments_of(p.probs(), p.x_values(), p.y_values());
  const double denom = m.var_x * m.var_y;
  if (denom <= 0.0) return 0.0;
  return std::max(-1.0, std::min(1.0, m.cov / std::sqrt(denom)));
}

double pearson(const ConditionedJoint& cj) {
  const Moments m = pooled_conditional_moments(cj);
  const double denom = m.var_x * m.var_y;
  if (denom <= 0.0) return 0.0;
  return std::max(-1.0, std::min(1.0, m.cov / std::sqrt(denom)));
}

double correlation_ratio(const JointPmf& p, Direction dir) {
  const auto [num, den] = dir == Direction::XGivenY
                              ? regression_variances(p.probs(), p.x_values())
                              : regression_variances(p.probs().transpose(), p.y_values());
  if (den <= 0.0) return 0.0;
  return clamp01(std::sqrt(std::max(0.0, num) / den));
}

double correlation_ratio(const ConditionedJoint& cj, Direction dir) {
  double num = 0.0, den = 0.0;
  for (Index u = 0; u < cj.u_size(); ++u) {
    const JointPmf& s = cj.slice(u);
    const auto [n, d] = dir == Direction::XGivenY
                            ? regression_variances(s.probs(), s.x_values())
                            : regression_variances(s.probs().transpose(), s.y_values());
    num += cj.weight(u) * n;
    den += cj.weight(u) * d;
  }
  if (den <= 0.0) return 0.0;
  return clamp01(std::sqrt(std::max(0.0, num) / den));
}

MaxCorrDetail max_correlation_detail(const JointPmf& p) {
  const SpectralResult r = spectral_core(p.probs(), /*precise=*/true);
  MaxCorrDetail d;
  d.degenerate = r.degenerate;
  if (r.degenerate) return d;
  if (std::abs(r.lambda1 - 1.0) > 1e-8)
    throw std::runtime_error("leading singular value of Q deviates from 1: " +
                             std::to_string(r.lambda1));
  d.lambda1 = r.lambda1;
  d.value = r.lambda2;
  return d;
}

double max_correlation(const JointPmf& p) { return max_correlation_detail(p).value; }

double second_singular_value(const Eigen::Ref<const Matrix>& table) {
  return spectral_core(table, /*precise=*/false).lambda2;
}

CondMaxCorr cond_max_correlation(const ConditionedJoint& cj) {
  CondMaxCorr best;
  for (Index u = 0; u < cj.u_size(); ++u) {
    const double v = max_correlation(cj.slice(u));
    if (v > best.value) {
      best.value = v;
      best.achieving_u = u;
    }
  }
  return best;
}

CorrelationReport correlation_report(const JointPmf& p) {
  CorrelationReport r;
  r.pearson = pearson(p);
  r.theta_x_given_y = correlation_ratio(p, Direction::XGivenY);
  r.theta_y_given_x = correlation_ratio(p, Direction::YGivenX);
  r.max_corr = max_correlation(p);
  return r;
}

CorrelationReport correlation_report(const ConditionedJoint& cj) {
  CorrelationReport r;
  r.pearson = pearson(cj);
  r.theta_x_given_y = correlation_ratio(cj, Direction::XGivenY);
  r.theta_y_given_x = correlation_ratio(cj, Direction::YGivenX);
  const CondMaxCorr c = cond_max_correlation(cj);
  r.max_corr = c.value;
  r.achieving_u = c.achieving_u;
  return r;
}

TvBoundSides tv_perturbation_bound(const ConditionedJoint& p_cj, const ConditionedJoint& q_cj) {
  if (p_cj.x_size() != q_cj.x_size() || p_cj.y_size() != q_cj.y_size() ||
      p_cj.u_size() != q_cj.u_size())
    throw ShapeMismatch("tv_perturbation_bound requires matching shapes");

  TvBoundSides out;
  out.p_min = 1.0;
  for (Index u = 0; u < p_cj.u_size(); ++u) {
    const Matrix& ps = p_cj.slice(u).probs();
    const Matrix& qs = q_cj.slice(u).probs();
    for (Index x = 0; x < ps.rows(); ++x) {
      for (Index y = 0; y < ps.cols(); ++y) {
        if (ps(x, y) > 0.0) {
          out.p_min = std::min(out.p_min, ps(x, y));
        } else if (qs(x, y) > 0.0) {
          throw UnsupportedSupport("Q slice has mass outside P slice support");
        }
      }
    }
    out.delta = std::max(out.delta, tv_distance(p_cj.slice(u), q_cj.slice(u)));
  }
  if (out.p_min <= 0.0) throw UnsupportedSupport("P_m vanished");

  const double rho_p = cond_max_correlation(p_cj).value;
  const double shift = 4.0 * out.delta / out.p_min;
  out.lhs = (rho_p - shift) / (1.0 + shift);
  out.rhs = cond_max_correlation(q_cj).value;
  return out;
}

namespace {

// Joint over (x,y,u) as one flat vector, u-major: block u holds the x*y
// cells of slice u scaled by its weight.
Vector flatten_joint(const ConditionedJoint& cj) {
  const Index cells = cj.x_size() * cj.y_size();
  Vector z = Vector::Zero(cells * cj.u_size());
  for (Index u = 0; u < cj.u_size(); ++u) {
    const Matrix& s = cj.slice(u).probs();
    for (Index x = 0; x < cj.x_size(); ++x)
      for (Index y = 0; y < cj.y_size(); ++y)
        z(u * cells + x * cj.y_size() + y) = cj.weight(u) * s(x, y);
  }
  return z;
}

ConditionedJoint unflatten_joint(const Vector& z, Index xs, Index ys, Index us) {
  const Index cells = xs * ys;
  Vector w(us);
  std::vector<JointPmf> slices;
  std::vector<double> weights;
  for (Index u = 0; u < us; ++u) {
    const double wu = z.segment(u * cells, cells).sum();
    w(u) = wu;
  }
  const double total = w.sum();
  std::vector<Matrix> mats;
  for (Index u = 0; u < us; ++u) {
    if (w(u) / total <= kSupportDust) {
      w(u) = 0.0;
      continue;
    }
    Matrix s(xs, ys);
    for (Index x = 0; x < xs; ++x)
      for (Index y = 0; y < ys; ++y) s(x, y) = z(u * cells + x * ys + y) / w(u);
    mats.push_back(std::move(s));
  }
  Vector kept(static_cast<Index>(mats.size()));
  Index k = 0;
  for (Index u = 0; u < us; ++u)
    if (w(u) > 0.0) kept(k++) = w(u) / total;
  std::vector<JointPmf> sl;
  sl.reserve(mats.size());
  for (auto& m : mats) sl.emplace_back(std::move(m));
  return ConditionedJoint(std::move(kept), std::move(sl));
}

double smooth_objective(const Vector& z, Index cells, Index us, Index ys) {
  double worst = 0.0;
  for (Index u = 0; u < us; ++u) {
    const double wu = z.segment(u * cells, cells).sum();
    if (wu <= kSupportDust) continue;
    Eigen::Map<const Matrix> block(z.data() + u * cells, ys, cells / ys);
    // block is stored row-major per (x,y); remap explicitly.
    Matrix s(cells / ys, ys);
    for (Index x = 0; x < cells / ys; ++x)
      for (Index y = 0; y < ys; ++y) s(x, y) = z(u * cells + x * ys + y);
    worst = std::max(worst, second_singular_value(s));
  }
  return worst;
}

// Pulls z into the TV ball of radius eps around center along the segment
// between them; both points live on the simplex, so the result does too.
void shrink_into_ball(Vector& z, const Vector& center, double eps) {
  const double l1 = (z - center).lpNorm<1>();
  if (l1 > 2.0 * eps && l1 > 0.0) z = center + (2.0 * eps / l1) * (z - center);
}

}  // namespace

SmoothResult smooth_max_correlation(const ConditionedJoint& cj, const SmoothQuery& q) {
  if (!(q.epsilon > 0.0 && q.epsilon < 1.0))
    throw DomainError("smooth epsilon must lie strictly inside (0,1)");
  const Index cells = cj.x_size() * cj.y_size();
  const Index us = cj.u_size();
  const Index ys = cj.y_size();
  const Vector p0 = flatten_joint(cj);
  const Index n = p0.size();

  auto objective = [&](const Vector& z) { return smooth_objective(z, cells, us, ys); };

  // Numerical subgradient: central differences on every cell of each block
  // within a tie tolerance of the max (averaged when several blocks tie).
  auto subgradient = [&](const Vector& z, double fz) {
    Vector g = Vector::Zero(n);
    const double h = 1e-6;
    const double tie = 1e-9;
    int active = 0;
    for (Index u = 0; u < us; ++u) {
      Matrix s(cells / ys, ys);
      for (Index x = 0; x < cells / ys; ++x)
        for (Index y = 0; y < ys; ++y) s(x, y) = z(u * cells + x * ys + y);
      if (s.sum() <= kSupportDust) continue;
      if (second_singular_value(s) < fz - tie) continue;
      ++active;
      for (Index x = 0; x < cells / ys; ++x) {
        for (Index y = 0; y < ys; ++y) {
          Matrix sp = s, sm = s;
          sp(x, y) += h;
          sm(x, y) = std::max(0.0, sm(x, y) - h);
          const double fp = second_singular_value(sp);
          const double fm = second_singular_value(sm);
          g(u * cells + x * ys + y) += (fp - fm) / (2.0 * h);
        }
      }
    }
    if (active > 1) g /= static_cast<double>(active);
    return g;
  };

  SmoothResult best{objective(p0), cj, false};

  std::mt19937_64 rng(q.seed);
  for (int r = 0; r < q.restarts; ++r) {
    Vector z = p0;
    if (r > 0) {
      // Random simplex point pulled to the ball boundary around p0.
      Vector dir(n);
      for (Index i = 0; i < n; ++i) dir(i) = -std::log(std::max(uniform_double(rng), 1e-300));
      dir /= dir.sum();
      z = dir;
      shrink_into_ball(z, p0, q.epsilon);
    }
    double fz = objective(z);
    double step = 0.25;
    bool stalled = false;
    int it = 0;
    for (; it < q.max_iters; ++it) {
      const Vector g = subgradient(z, fz);
      const double gnorm = g.norm();
      if (gnorm < 1e-14) break;
      bool accepted = false;
      double alpha = step;
      for (int bt = 0; bt < 20; ++bt) {
        Vector zn = z - (alpha / gnorm) * g;
        project_to_simplex(zn);
        shrink_into_ball(zn, p0, q.epsilon);
        const double fn = objective(zn);
        if (fn < fz - 1e-14) {
          const double moved = (zn - z).lpNorm<1>();
          z = std::move(zn);
          fz = fn;
          accepted = true;
          step = std::min(0.5, alpha * 2.0);
          if (moved < q.step_tol) stalled = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!accepted || stalled || fz <= 1e-14) break;
    }
    if (fz < best.value) {
      best.value = fz;
      best.minimizer = unflatten_joint(z, cj.x_size(), cj.y_size(), us);
      best.budget_exhausted = (it >= q.max_iters);
    }
  }
  return best;
}

double smooth_max_correlation_grid(const ConditionedJoint& cj, double epsilon, int resolution) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw DomainError("smooth epsilon must lie strictly inside (0,1)");
  const Index cells = cj.x_size() * cj.y_size();
  const Index us = cj.u_size();
  const Index ys = cj.y_size();
  const Index n = cells * us;
  if (n > 12) throw EnumerationCapExceeded("smooth grid oracle limited to 12 joint cells");

  const Vector p0 = flatten_joint(cj);
  double best = smooth_objective(p0, cells, us, ys);

  // Enumerate compositions of `resolution` into n parts.
  std::vector<int> comp(static_cast<size_t>(n), 0);
  comp[0] = resolution;
  Vector z(n);
  auto evaluate = [&]() {
    for (Index i = 0; i < n; ++i)
      z(i) = static_cast<double>(comp[static_cast<size_t>(i)]) / resolution;
    shrink_into_ball(z, p0, epsilon);
    best = std::min(best, smooth_objective(z, cells, us, ys));
  };
  evaluate();
  while (true) {
    // Next composition in colex order.
    Index i = 0;
    while (i < n - 1 && comp[static_cast<size_t>(i)] == 0) ++i;
    if (i == n - 1) break;
    const int v = comp[static_cast<size_t>(i)];
    comp[static_cast<size_t>(i)] = 0;
    comp[0] = v - 1;
    comp[static_cast<size_t>(i + 1)] += 1;
    evaluate();
  }
  return best;
}

double max_correlation_ace(const JointPmf& p, const AceOptions& opts) {
  const auto [px_full, py_full] = marginals(p);
  std::vector<Index> xs, ys;
  for (Index i = 0; i < px_full.size(); ++i)
    if (px_full(i) > 0.0) xs.push_back(i);
  for (Index j = 0; j < py_full.size(); ++j)
    if (py_full(j) > 0.0) ys.push_back(j);
  if (xs.size() < 2 || ys.size() < 2) return 0.0;

  const Index nx = static_cast<Index>(xs.size());
  const Index ny = static_cast<Index>(ys.size());
  Matrix pr(nx, ny);
  for (Index i = 0; i < nx; ++i)
    for (Index j = 0; j < ny; ++j) pr(i, j) = p.probs()(xs[static_cast<size_t>(i)],
                                                         ys[static_cast<size_t>(j)]);
  const Vector px = pr.rowwise().sum();
  const Vector py = pr.colwise().sum().transpose();

  std::mt19937_64 rng(opts.seed);
  double best = 0.0;
  for (int r = 0; r < opts.restarts; ++r) {
    Vector g(ny);
    for (Index j = 0; j < ny; ++j) g(j) = uniform_double(rng) - 0.5;
    double corr = 0.0;
    for (int it = 0; it < opts.max_iters; ++it) {
      // f <- normalized E[g(Y)|X]
      Vector f = (pr * g).cwiseQuotient(px);
      f.array() -= px.dot(f);
      double nf = std::sqrt(px.dot(f.cwiseProduct(f)));
      if (nf < 1e-300) break;
      f /= nf;
      // g <- normalized E[f(X)|Y]
      g = (pr.transpose() * f).cwiseQuotient(py);
      g.array() -= py.dot(g);
      double ng = std::sqrt(py.dot(g.cwiseProduct(g)));
      if (ng < 1e-300) break;
      g /= ng;
      const double next = f.dot(pr * g);
      if (std::abs(next - corr) < opts.step_tol) {
        corr = next;
        break;
      }
      corr = next;
    }
    best = std::max(best, corr);
  }
  return clamp01(best);
}

Moments moments(const JointPmf& p) { return moments_of(p.probs(), p.x_values(), p.y_values()); }

Moments pooled_conditional_moments(const ConditionedJoint& cj) {
  Moments acc;
  for (Index u = 0; u < cj.u_size(); ++u) {
    const JointPmf& s = cj.slice(u);
    const Moments m = moments_of(s.probs(), s.x_values(), s.y_values());
    acc.var_x += cj.weight(u) * m.var_x;
    acc.var_y += cj.weight(u) * m.var_y;
    acc.cov += cj.weight(u) * m.cov;
  }
  return acc;
}

}  // namespace infocorr
