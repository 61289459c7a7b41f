#include "infocorr/common_info.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>

namespace infocorr {

namespace {

constexpr double kSupportTol = 1e-12;   // column mass below this is treated as absent
constexpr double kCleanupTol = 1e-9;    // columns this light are removed before reporting
constexpr double kConstantFeasTol = 1e-9;  // beta >= rho_m - this gives the exact 0
constexpr double kInf = std::numeric_limits<double>::infinity();

double xlog2(double t) { return t > 0.0 ? t * std::log2(t) : 0.0; }

double uniform_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Vector flatten_probs(const JointPmf& p) {
  Vector pflat(p.x_size() * p.y_size());
  for (Index x = 0; x < p.x_size(); ++x)
    for (Index y = 0; y < p.y_size(); ++y) pflat(x * p.y_size() + y) = p.probs()(x, y);
  return pflat;
}

// ---------------------------------------------------------------------------
// Penalized channel optimization shared by solve_c_beta and the K_beta
// single-letter bound. The channel is a (cells x U) row-stochastic matrix;
// the objective is I(XY;U) or H(U); the constraint max_u lambda2(slice_u)
// enters through an escalating quadratic penalty, except at beta = 0 where
// slices are projected to their independent products instead.
// ---------------------------------------------------------------------------

enum class ChannelObjective { MutualInformation, MarginalEntropy };

struct ColState {
  double pu = 0.0;
  double s1 = 0.0;  // sum_c pflat_c W_cu log2(W_cu)
  double l2 = 0.0;
};

struct ChannelProblem {
  Vector pflat;
  Index xs = 0, ys = 0, us = 0;
  ChannelObjective objective = ChannelObjective::MutualInformation;
  double beta = 0.0;

  Index cells() const { return xs * ys; }

  double col_objective(const ColState& c) const {
    const double pu_term = -xlog2(c.pu);
    if (objective == ChannelObjective::MarginalEntropy) return pu_term;
    return c.s1 + pu_term;  // sum pflat W log2(W/pu)
  }

  double penalty(double rho) const {
    const double ex = std::max(0.0, rho - beta);
    return ex * ex;
  }
};

struct EvalState {
  std::vector<ColState> cols;
  std::vector<Matrix> tables;  // unnormalized slice tables pflat .* W_col
  double obj = 0.0;
  double rho = 0.0;
  double rho2 = 0.0;
  Index rho_arg = -1;

  double phi(const ChannelProblem& pr, double lambda) const {
    return obj + lambda * pr.penalty(rho);
  }
};

ColState eval_column(const ChannelProblem& pr, const Matrix& w, Index u, Matrix& table) {
  ColState c;
  table.resize(pr.xs, pr.ys);
  for (Index x = 0; x < pr.xs; ++x) {
    for (Index y = 0; y < pr.ys; ++y) {
      const Index cell = x * pr.ys + y;
      const double pw = pr.pflat(cell) * w(cell, u);
      table(x, y) = pw;
      c.pu += pw;
      if (pr.objective == ChannelObjective::MutualInformation && pw > 0.0)
        c.s1 += pr.pflat(cell) * xlog2(w(cell, u));
    }
  }
  c.l2 = c.pu > kSupportTol ? second_singular_value(table) : 0.0;
  return c;
}

EvalState full_eval(const ChannelProblem& pr, const Matrix& w) {
  EvalState st;
  st.cols.resize(static_cast<size_t>(pr.us));
  st.tables.resize(static_cast<size_t>(pr.us));
  for (Index u = 0; u < pr.us; ++u) {
    st.cols[static_cast<size_t>(u)] = eval_column(pr, w, u, st.tables[static_cast<size_t>(u)]);
    st.obj += pr.col_objective(st.cols[static_cast<size_t>(u)]);
    const double l2 = st.cols[static_cast<size_t>(u)].l2;
    if (l2 > st.rho) {
      st.rho2 = st.rho;
      st.rho = l2;
      st.rho_arg = u;
    } else if (l2 > st.rho2) {
      st.rho2 = l2;
    }
  }
  return st;
}

// Central-difference gradient; perturbing entry (cell,u) touches only
// column u of the evaluation, which keeps the sweep O(cells * U) spectral
// evaluations per gradient.
Matrix gradient(const ChannelProblem& pr, const Matrix& w, const EvalState& st, double h,
                double lambda) {
  Matrix g = Matrix::Zero(pr.cells(), pr.us);
  Matrix scratch;
  for (Index u = 0; u < pr.us; ++u) {
    const ColState& base = st.cols[static_cast<size_t>(u)];
    const double obj_rest = st.obj - pr.col_objective(base);
    const double rho_rest = (st.rho_arg == u) ? st.rho2 : st.rho;
    for (Index cell = 0; cell < pr.cells(); ++cell) {
      if (pr.pflat(cell) <= 0.0) continue;
      const double w0 = w(cell, u);
      const double wp = w0 + h;
      const double wm = std::max(0.0, w0 - h);
      double phi_side[2];
      const double wside[2] = {wp, wm};
      for (int sdx = 0; sdx < 2; ++sdx) {
        const double ww = wside[sdx];
        ColState c = base;
        c.pu = base.pu + pr.pflat(cell) * (ww - w0);
        if (pr.objective == ChannelObjective::MutualInformation)
          c.s1 = base.s1 + pr.pflat(cell) * (xlog2(ww) - xlog2(w0));
        double rho_side = rho_rest;
        if (lambda > 0.0) {
          scratch = st.tables[static_cast<size_t>(u)];
          scratch(cell / pr.ys, cell % pr.ys) = pr.pflat(cell) * ww;
          c.l2 = c.pu > kSupportTol ? second_singular_value(scratch) : 0.0;
          rho_side = std::max(rho_rest, c.l2);
        }
        phi_side[sdx] = obj_rest + pr.col_objective(c) + lambda * pr.penalty(rho_side);
      }
      g(cell, u) = (phi_side[0] - phi_side[1]) / (wp - wm);
    }
  }
  return g;
}

void project_rows(Matrix& w) {
  for (Index r = 0; r < w.rows(); ++r) {
    Vector row = w.row(r).transpose();
    project_to_simplex(row);
    w.row(r) = row.transpose();
  }
}

// Conditional-independence projection used at beta = 0: each slice is
// replaced by the product of its marginals, and the channel is rebuilt as
// the posterior of the resulting mixture.
void product_projection_pass(const ChannelProblem& pr, Matrix& w) {
  Matrix joint(pr.cells(), pr.us);
  Matrix table;
  for (Index u = 0; u < pr.us; ++u) {
    ColState c;
    table.resize(pr.xs, pr.ys);
    for (Index x = 0; x < pr.xs; ++x)
      for (Index y = 0; y < pr.ys; ++y)
        table(x, y) = pr.pflat(x * pr.ys + y) * w(x * pr.ys + y, u);
    const double wu = table.sum();
    if (wu <= kSupportTol) {
      joint.col(u).setZero();
      continue;
    }
    const Vector rx = table.rowwise().sum();
    const Vector cy = table.colwise().sum().transpose();
    for (Index x = 0; x < pr.xs; ++x)
      for (Index y = 0; y < pr.ys; ++y) joint(x * pr.ys + y, u) = rx(x) * cy(y) / wu;
  }
  for (Index cell = 0; cell < pr.cells(); ++cell) {
    if (pr.pflat(cell) <= 0.0) continue;
    const double total = joint.row(cell).sum();
    if (total <= 0.0) continue;  // keep the previous row
    w.row(cell) = joint.row(cell) / total;
  }
}

struct OptimizeResult {
  Matrix w;
  double obj = kInf;
  double rho = 1.0;
};

OptimizeResult optimize_channel(const ChannelProblem& pr, Matrix w, const CBetaConfig& cfg) {
  const bool wyner_mode = pr.beta == 0.0;
  std::vector<double> lambdas;
  if (wyner_mode) {
    lambdas.assign(4, 0.0);  // rounds without penalty; projection handles feasibility
  } else {
    for (double l = cfg.lambda_init; l <= cfg.lambda_max * 1.0001; l *= cfg.lambda_mult)
      lambdas.push_back(l);
  }

  double step = 0.1;
  for (double lambda : lambdas) {
    EvalState st = full_eval(pr, w);
    double phi = st.phi(pr, lambda);
    for (int it = 0; it < cfg.iters_per_round; ++it) {
      const Matrix g = gradient(pr, w, st, cfg.grad_step, lambda);
      const double gnorm = g.norm();
      if (gnorm < 1e-14) break;
      bool accepted = false;
      double alpha = step;
      for (int bt = 0; bt < 16 && !accepted; ++bt) {
        Matrix wn = w - (alpha / gnorm) * g;
        project_rows(wn);
        if (wyner_mode) product_projection_pass(pr, wn);
        EvalState sn = full_eval(pr, wn);
        const double phin = sn.phi(pr, lambda);
        if (phin < phi - 1e-14) {
          const double moved = (wn - w).cwiseAbs().sum();
          w = std::move(wn);
          st = std::move(sn);
          phi = phin;
          accepted = true;
          step = std::min(1.0, alpha * 2.0);
          if (moved < cfg.step_tol) it = cfg.iters_per_round;  // converged
        } else {
          alpha *= 0.5;
        }
      }
      if (!accepted) break;
    }
  }

  if (wyner_mode) {
    // Alternating projection polish: drive slices to exact products.
    EvalState st = full_eval(pr, w);
    for (int it = 0; it < cfg.polish_iters && st.rho > 0.5 * cfg.feasibility_tol; ++it) {
      product_projection_pass(pr, w);
      st = full_eval(pr, w);
    }
  }

  // Drop columns that carry only numerical dust and renormalize rows.
  EvalState st = full_eval(pr, w);
  bool dropped = false;
  for (Index u = 0; u < pr.us; ++u) {
    if (st.cols[static_cast<size_t>(u)].pu > 0.0 &&
        st.cols[static_cast<size_t>(u)].pu < kCleanupTol) {
      w.col(u).setZero();
      dropped = true;
    }
  }
  if (dropped) {
    for (Index r = 0; r < w.rows(); ++r) {
      const double s = w.row(r).sum();
      if (s > 0.0) {
        w.row(r) /= s;
      } else {
        w.row(r).setZero();
        w(r, 0) = 1.0;
      }
    }
    st = full_eval(pr, w);
  }

  OptimizeResult res;
  res.w = std::move(w);
  res.obj = st.obj;
  res.rho = st.rho;
  return res;
}

Matrix constant_channel(Index cells, Index us) {
  Matrix w = Matrix::Zero(cells, us);
  w.col(0).setOnes();
  return w;
}

Matrix reveal_all_channel(Index cells, Index us) {
  Matrix w = Matrix::Zero(cells, us);
  for (Index c = 0; c < cells; ++c) w(c, c % us) = 1.0;
  return w;
}

Matrix u_equals_x_channel(Index xs, Index ys, Index us) {
  Matrix w = Matrix::Zero(xs * ys, us);
  for (Index x = 0; x < xs; ++x)
    for (Index y = 0; y < ys; ++y) w(x * ys + y, x % us) = 1.0;
  return w;
}

Matrix u_equals_y_channel(Index xs, Index ys, Index us) {
  Matrix w = Matrix::Zero(xs * ys, us);
  for (Index x = 0; x < xs; ++x)
    for (Index y = 0; y < ys; ++y) w(x * ys + y, y % us) = 1.0;
  return w;
}

Matrix random_channel(Index cells, Index us, std::mt19937_64& rng) {
  Matrix w(cells, us);
  for (Index c = 0; c < cells; ++c) {
    double sum = 0.0;
    for (Index u = 0; u < us; ++u) {
      const double e = -std::log(std::max(uniform_double(rng), 1e-300));
      w(c, u) = e;
      sum += e;
    }
    w.row(c) /= sum;
  }
  return w;
}

Matrix perturbed(const Matrix& w, double scale, std::mt19937_64& rng) {
  Matrix out = w;
  for (Index c = 0; c < out.rows(); ++c)
    for (Index u = 0; u < out.cols(); ++u) out(c, u) += scale * (uniform_double(rng) - 0.5);
  project_rows(out);
  return out;
}

struct PreciseEval {
  double objective = kInf;  // I(XY;U) or H(U) via the public probability path
  double rho = 1.0;
  bool feasible = false;
};

PreciseEval precise_eval(const JointPmf& p, const Matrix& w, const ChannelProblem& pr,
                         double beta, double feas_tol) {
  Channel ch(w, p.x_size(), p.y_size());
  ConditionedJoint cj = condition_on_channel(p, ch);
  PreciseEval out;
  out.objective = pr.objective == ChannelObjective::MutualInformation
                      ? mutual_information(cj)
                      : entropy(cj.u_weights());
  out.rho = cond_max_correlation(cj).value;
  out.feasible = out.rho <= beta + feas_tol;
  return out;
}

// Repair an infeasible iterate by mixing toward the constant channel;
// applies only when some point on the mixing path is feasible (the far
// end realizes rho_m(X;Y)).
std::optional<Matrix> repair_by_constant_mixing(const JointPmf& p, const ChannelProblem& pr,
                                                const Matrix& w, double beta, double feas_tol) {
  const Matrix wc = constant_channel(pr.cells(), pr.us);
  auto rho_at = [&](double t) {
    const Matrix mixed = (1.0 - t) * w + t * wc;
    return precise_eval(p, mixed, pr, beta, feas_tol).rho;
  };
  double feasible_t = -1.0;
  for (int k = 1; k <= 10; ++k) {
    const double t = k / 10.0;
    if (rho_at(t) <= beta + feas_tol) {
      feasible_t = t;
      break;
    }
  }
  if (feasible_t < 0.0) return std::nullopt;
  double lo = feasible_t - 0.1, hi = feasible_t;
  for (int it = 0; it < 20 && hi - lo > 1e-4; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (rho_at(mid) <= beta + feas_tol) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return Matrix((1.0 - hi) * w + hi * wc);
}

struct ChannelSearchResult {
  Matrix w;
  double objective = kInf;
  double rho = 1.0;
};

ChannelSearchResult search_channels(const JointPmf& p, double beta, const CBetaConfig& cfg,
                                    ChannelObjective objective) {
  ChannelProblem pr;
  pr.pflat = flatten_probs(p);
  pr.xs = p.x_size();
  pr.ys = p.y_size();
  pr.us = cfg.u_size.value_or(p.x_size() * p.y_size() + 1);
  pr.objective = objective;
  pr.beta = beta;

  std::mt19937_64 rng(cfg.seed);

  ChannelSearchResult best;
  auto consider = [&](const Matrix& w) {
    PreciseEval pe = precise_eval(p, w, pr, beta, cfg.feasibility_tol);
    if (!pe.feasible) {
      auto repaired = repair_by_constant_mixing(p, pr, w, beta, cfg.feasibility_tol);
      if (!repaired) return;
      pe = precise_eval(p, *repaired, pr, beta, cfg.feasibility_tol);
      if (!pe.feasible) return;
      if (pe.objective < best.objective) best = {*repaired, pe.objective, pe.rho};
      return;
    }
    if (pe.objective < best.objective) best = {w, pe.objective, pe.rho};
  };

  // Deterministic feasible baselines.
  consider(reveal_all_channel(pr.cells(), pr.us));
  consider(u_equals_x_channel(pr.xs, pr.ys, pr.us));
  consider(u_equals_y_channel(pr.xs, pr.ys, pr.us));

  std::vector<Matrix> starts;
  starts.push_back(reveal_all_channel(pr.cells(), pr.us));
  starts.push_back(u_equals_x_channel(pr.xs, pr.ys, pr.us));
  starts.push_back(u_equals_y_channel(pr.xs, pr.ys, pr.us));
  while (static_cast<int>(starts.size()) < std::max(cfg.restarts - 1, 3))
    starts.push_back(random_channel(pr.cells(), pr.us, rng));

  for (const Matrix& start : starts) consider(optimize_channel(pr, start, cfg).w);

  // Continuation restart: walk beta down from rho_m(X;Y), warm starting
  // each leg with the previous solution.
  {
    const double rho_p = max_correlation(p);
    Matrix w = perturbed(constant_channel(pr.cells(), pr.us), 0.05, rng);
    const int legs = 4;
    for (int k = 1; k <= legs; ++k) {
      ChannelProblem leg = pr;
      leg.beta = rho_p + (beta - rho_p) * (static_cast<double>(k) / legs);
      CBetaConfig leg_cfg = cfg;
      leg_cfg.iters_per_round = std::max(20, cfg.iters_per_round / 2);
      w = optimize_channel(leg, std::move(w), leg_cfg).w;
    }
    consider(w);
  }

  return best;
}

}  // namespace

GkDecomposition gacs_korner(const JointPmf& p) {
  const Index xs = p.x_size(), ys = p.y_size();
  std::vector<int> parent(static_cast<size_t>(xs + ys));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int a) {
    while (parent[static_cast<size_t>(a)] != a) {
      parent[static_cast<size_t>(a)] = parent[static_cast<size_t>(parent[static_cast<size_t>(a)])];
      a = parent[static_cast<size_t>(a)];
    }
    return a;
  };
  auto unite = [&](int a, int b) { parent[static_cast<size_t>(find(a))] = find(b); };

  for (Index x = 0; x < xs; ++x)
    for (Index y = 0; y < ys; ++y)
      if (p.probs()(x, y) > 0.0) unite(static_cast<int>(x), static_cast<int>(xs + y));

  const auto [px, py] = marginals(p);
  GkDecomposition out;
  out.component_of_x.assign(static_cast<size_t>(xs), -1);
  out.component_of_y.assign(static_cast<size_t>(ys), -1);
  std::map<int, int> id_of_root;
  std::vector<double> masses;
  for (Index x = 0; x < xs; ++x) {
    if (px(x) <= 0.0) continue;
    const int root = find(static_cast<int>(x));
    auto [it, inserted] = id_of_root.try_emplace(root, static_cast<int>(masses.size()));
    if (inserted) masses.push_back(0.0);
    out.component_of_x[static_cast<size_t>(x)] = it->second;
    masses[static_cast<size_t>(it->second)] += px(x);
  }
  for (Index y = 0; y < ys; ++y) {
    if (py(y) <= 0.0) continue;
    const int root = find(static_cast<int>(xs + y));
    auto [it, inserted] = id_of_root.try_emplace(root, static_cast<int>(masses.size()));
    if (inserted) masses.push_back(0.0);
    out.component_of_y[static_cast<size_t>(y)] = it->second;
  }
  out.component_masses =
      Eigen::Map<const Vector>(masses.data(), static_cast<Index>(masses.size()));
  out.entropy_bits = entropy(out.component_masses);
  return out;
}

double gaussian_c_beta(const GaussianPair& g, double beta) {
  if (!(g.beta0 >= 0.0) || g.beta0 >= 1.0)
    throw DomainError("gaussian_c_beta requires beta0 in [0,1)");
  if (!(beta >= 0.0 && beta <= 1.0)) throw DomainError("gaussian_c_beta requires beta in [0,1]");
  if (beta >= 1.0) return 0.0;
  const double ratio = ((1.0 + g.beta0) / (1.0 - g.beta0)) / ((1.0 + beta) / (1.0 - beta));
  return 0.5 * std::max(0.0, std::log2(ratio));
}

double gaussian_joint_entropy(double beta0) {
  const double two_pi_e = 2.0 * M_PI * std::exp(1.0);
  return 0.5 * std::log2(two_pi_e * two_pi_e * (1.0 - beta0 * beta0));
}

double continuous_lower_bound(double h_xy_bits, double beta0, double beta) {
  if (!(beta >= 0.0 && beta <= beta0))
    throw DomainError("continuous_lower_bound requires 0 <= beta <= beta0");
  if (beta0 >= 1.0) throw DomainError("continuous_lower_bound requires beta0 < 1");
  const double two_pi_e = 2.0 * M_PI * std::exp(1.0);
  const double arg = two_pi_e * (1.0 - beta0);
  return h_xy_bits - 0.5 * std::log2(arg * arg * (1.0 + beta) / (1.0 - beta));
}

double dsbs_upper_bound(double p0, double beta) {
  if (!(p0 > 0.0 && p0 < 0.5)) throw DomainError("dsbs_upper_bound requires p0 in (0, 0.5)");
  if (!(beta >= 0.0 && beta <= 1.0)) throw DomainError("dsbs_upper_bound requires beta in [0,1]");
  if (beta >= 1.0 - 2.0 * p0) return 0.0;
  const double s = std::sqrt((1.0 - 2.0 * p0 - beta) / (1.0 - beta));
  const double a = 0.5 * (1.0 - p0 + s);
  const double b = 0.5 * (1.0 - p0 - s);
  const double h4 = -xlog2(a) - xlog2(b) - 2.0 * xlog2(p0 / 2.0);
  return 1.0 + binary_entropy(p0) - h4;
}

JointPmf dsbs_pmf(double p0) {
  if (!(p0 >= 0.0 && p0 <= 1.0)) throw DomainError("dsbs_pmf requires p0 in [0,1]");
  Matrix m(2, 2);
  m << 0.5 * (1.0 - p0), 0.5 * p0, 0.5 * p0, 0.5 * (1.0 - p0);
  Vector pm1(2);
  pm1 << 1.0, -1.0;
  return JointPmf(std::move(m), pm1, pm1);
}

ConditionedJoint dsbs_decomposition(double p0, double beta) {
  if (!(p0 > 0.0 && p0 < 0.5)) throw DomainError("dsbs_decomposition requires p0 in (0, 0.5)");
  if (!(beta >= 0.0 && beta <= 1.0))
    throw DomainError("dsbs_decomposition requires beta in [0,1]");
  if (beta >= 1.0 - 2.0 * p0) {
    Vector w(1);
    w << 1.0;
    return ConditionedJoint(w, {dsbs_pmf(p0)});
  }
  const double s = std::sqrt((1.0 - 2.0 * p0 - beta) / (1.0 - beta));
  const double a = 0.5 * (1.0 - p0 + s);
  const double b = 0.5 * (1.0 - p0 - s);
  const double q = 0.5 * p0;
  Vector pm1(2);
  pm1 << 1.0, -1.0;
  Matrix s0(2, 2), s1(2, 2);
  s0 << a, q, q, b;
  s1 << b, q, q, a;
  Vector w(2);
  w << 0.5, 0.5;
  return ConditionedJoint(w, {JointPmf(s0, pm1, pm1), JointPmf(s1, pm1, pm1)});
}

std::optional<double> detect_dsbs(const JointPmf& p) {
  if (p.x_size() != 2 || p.y_size() != 2) return std::nullopt;
  const Matrix& m = p.probs();
  if (std::abs(m(0, 0) - m(1, 1)) > 1e-12 || std::abs(m(0, 1) - m(1, 0)) > 1e-12)
    return std::nullopt;
  const double p0 = m(0, 1) + m(1, 0);
  if (!(p0 > 0.0 && p0 < 0.5)) return std::nullopt;
  return p0;
}

CBetaSolution solve_c_beta(const JointPmf& p, double beta, const CBetaConfig& cfg) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw DomainError("solve_c_beta requires beta in [0,1]");
  const Index us = cfg.u_size.value_or(p.x_size() * p.y_size() + 1);
  const double rho_p = max_correlation(p);
  const double h_xy = entropy(p);

  double lower = 0.0, upper = h_xy;
  if (beta < 1.0) lower = gacs_korner(p).entropy_bits;
  if (const auto p0 = detect_dsbs(p)) upper = std::min(upper, dsbs_upper_bound(*p0, beta));

  CBetaSolution sol{0.0,
                    Channel(constant_channel(p.x_size() * p.y_size(), us), p.x_size(),
                            p.y_size()),
                    rho_p,
                    Certificate::MultiStartBest,
                    lower,
                    upper};

  if (beta >= rho_p - kConstantFeasTol) {
    sol.value = 0.0;
    sol.lower = 0.0;
    sol.upper = 0.0;
    return sol;
  }

  const ChannelSearchResult best =
      search_channels(p, beta, cfg, ChannelObjective::MutualInformation);
  sol.value = best.objective;
  sol.channel = Channel(best.w, p.x_size(), p.y_size());
  sol.achieved_constraint = best.rho;

  if (cfg.grid_certify && p.x_size() == 2 && p.y_size() == 2) {
    GridOracleConfig gcfg;
    gcfg.resolution = cfg.grid_resolution;
    const double grid_opt = grid_min_information(p, beta, gcfg);
    if (std::isfinite(grid_opt) && std::abs(grid_opt - sol.value) <= 2e-3)
      sol.certificate = Certificate::GridCertified;
  }
  return sol;
}

double k_beta_single_letter_upper(const JointPmf& p, double beta, const CBetaConfig& cfg) {
  if (!(beta >= 0.0 && beta <= 1.0))
    throw DomainError("k_beta_single_letter_upper requires beta in [0,1]");
  const double rho_p = max_correlation(p);
  if (beta >= rho_p - kConstantFeasTol) return 0.0;
  return search_channels(p, beta, cfg, ChannelObjective::MarginalEntropy).objective;
}

// ---------------------------------------------------------------------------
// Distributed upper bound: product channels P_{U|X} P_{V|Y}.
// ---------------------------------------------------------------------------

namespace {

struct DistributedProblem {
  Matrix probs;  // P_XY
  Vector px, py;
  Index xs = 0, ys = 0, us = 0, vs = 0;
  double beta = 0.0;
};

struct DistributedState {
  double objective = 0.0;
  double rho = 0.0;
};

DistributedState eval_distributed(const DistributedProblem& pr, const Matrix& a,
                                  const Matrix& b) {
  DistributedState st;
  double obj = 0.0;
  for (Index x = 0; x < pr.xs; ++x)
    for (Index u = 0; u < pr.us; ++u) obj += pr.px(x) * xlog2(a(x, u));
  for (Index y = 0; y < pr.ys; ++y)
    for (Index v = 0; v < pr.vs; ++v) obj += pr.py(y) * xlog2(b(y, v));
  Matrix table(pr.xs, pr.ys);
  for (Index u = 0; u < pr.us; ++u) {
    for (Index v = 0; v < pr.vs; ++v) {
      double puv = 0.0;
      for (Index x = 0; x < pr.xs; ++x)
        for (Index y = 0; y < pr.ys; ++y) {
          const double t = pr.probs(x, y) * a(x, u) * b(y, v);
          table(x, y) = t;
          puv += t;
        }
      obj -= xlog2(puv);
      if (puv > kSupportTol) st.rho = std::max(st.rho, second_singular_value(table));
    }
  }
  st.objective = obj;
  return st;
}

double dist_phi(const DistributedProblem& pr, const DistributedState& st, double lambda) {
  const double ex = std::max(0.0, st.rho - pr.beta);
  return st.objective + lambda * ex * ex;
}

DistributedState optimize_distributed(const DistributedProblem& pr, Matrix& a, Matrix& b,
                                      const CBetaConfig& cfg) {
  std::vector<double> lambdas;
  for (double l = cfg.lambda_init; l <= cfg.lambda_max * 1.0001; l *= cfg.lambda_mult)
    lambdas.push_back(l);
  const double h = cfg.grad_step;
  double step = 0.1;
  for (double lambda : lambdas) {
    DistributedState st = eval_distributed(pr, a, b);
    double phi = dist_phi(pr, st, lambda);
    for (int it = 0; it < cfg.iters_per_round; ++it) {
      Matrix ga = Matrix::Zero(pr.xs, pr.us), gb = Matrix::Zero(pr.ys, pr.vs);
      for (Index x = 0; x < pr.xs; ++x) {
        for (Index u = 0; u < pr.us; ++u) {
          const double w0 = a(x, u);
          const double wp = w0 + h, wm = std::max(0.0, w0 - h);
          a(x, u) = wp;
          const double fp = dist_phi(pr, eval_distributed(pr, a, b), lambda);
          a(x, u) = wm;
          const double fm = dist_phi(pr, eval_distributed(pr, a, b), lambda);
          a(x, u) = w0;
          ga(x, u) = (fp - fm) / (wp - wm);
        }
      }
      for (Index y = 0; y < pr.ys; ++y) {
        for (Index v = 0; v < pr.vs; ++v) {
          const double w0 = b(y, v);
          const double wp = w0 + h, wm = std::max(0.0, w0 - h);
          b(y, v) = wp;
          const double fp = dist_phi(pr, eval_distributed(pr, a, b), lambda);
          b(y, v) = wm;
          const double fm = dist_phi(pr, eval_distributed(pr, a, b), lambda);
          b(y, v) = w0;
          gb(y, v) = (fp - fm) / (wp - wm);
        }
      }
      const double gnorm = std::sqrt(ga.squaredNorm() + gb.squaredNorm());
      if (gnorm < 1e-14) break;
      bool accepted = false;
      double alpha = step;
      for (int bt = 0; bt < 16 && !accepted; ++bt) {
        Matrix an = a - (alpha / gnorm) * ga;
        Matrix bn = b - (alpha / gnorm) * gb;
        project_rows(an);
        project_rows(bn);
        DistributedState sn = eval_distributed(pr, an, bn);
        const double phin = dist_phi(pr, sn, lambda);
        if (phin < phi - 1e-14) {
          a = std::move(an);
          b = std::move(bn);
          st = sn;
          phi = phin;
          accepted = true;
          step = std::min(1.0, alpha * 2.0);
        } else {
          alpha *= 0.5;
        }
      }
      if (!accepted) break;
    }
  }
  return eval_distributed(pr, a, b);
}

Matrix identity_rows(Index n, Index cols) {
  Matrix m = Matrix::Zero(n, cols);
  for (Index i = 0; i < n; ++i) m(i, i % cols) = 1.0;
  return m;
}

Matrix constant_rows(Index n, Index cols) {
  Matrix m = Matrix::Zero(n, cols);
  m.col(0).setOnes();
  return m;
}

}  // namespace

double solve_c_beta_distributed_ub(const JointPmf& p, double beta, const CBetaConfig& cfg) {
  if (!(beta >= 0.0 && beta <= 1.0))
    throw DomainError("solve_c_beta_distributed_ub requires beta in [0,1]");
  const double rho_p = max_correlation(p);
  if (beta >= rho_p - kConstantFeasTol) return 0.0;

  DistributedProblem pr;
  pr.probs = p.probs();
  std::tie(pr.px, pr.py) = marginals(p);
  pr.xs = p.x_size();
  pr.ys = p.y_size();
  pr.us = p.x_size() + 1;
  pr.vs = p.y_size() + 1;
  pr.beta = beta;

  std::mt19937_64 rng(cfg.seed ^ 0xD157ull);

  double best = kInf;
  auto consider = [&](Matrix a, Matrix b) {
    const DistributedState st = eval_distributed(pr, a, b);
    if (st.rho <= beta + cfg.feasibility_tol) best = std::min(best, st.objective);
  };
  auto optimize_from = [&](Matrix a, Matrix b) {
    const DistributedState st = optimize_distributed(pr, a, b, cfg);
    if (st.rho <= beta + cfg.feasibility_tol) best = std::min(best, st.objective);
  };

  // Feasible baselines: revealing either source decorrelates the pair.
  consider(identity_rows(pr.xs, pr.us), constant_rows(pr.ys, pr.vs));
  consider(constant_rows(pr.xs, pr.us), identity_rows(pr.ys, pr.vs));
  consider(identity_rows(pr.xs, pr.us), identity_rows(pr.ys, pr.vs));

  optimize_from(identity_rows(pr.xs, pr.us), constant_rows(pr.ys, pr.vs));
  optimize_from(constant_rows(pr.xs, pr.us), identity_rows(pr.ys, pr.vs));
  const int random_starts = std::max(2, cfg.restarts / 4);
  for (int r = 0; r < random_starts; ++r) {
    Matrix a(pr.xs, pr.us), b(pr.ys, pr.vs);
    for (Index x = 0; x < pr.xs; ++x) {
      Vector row(pr.us);
      for (Index u = 0; u < pr.us; ++u) row(u) = -std::log(std::max(uniform_double(rng), 1e-300));
      a.row(x) = row.transpose() / row.sum();
    }
    for (Index y = 0; y < pr.ys; ++y) {
      Vector row(pr.vs);
      for (Index v = 0; v < pr.vs; ++v) row(v) = -std::log(std::max(uniform_double(rng), 1e-300));
      b.row(y) = row.transpose() / row.sum();
    }
    optimize_from(std::move(a), std::move(b));
  }
  return best;
}

double beta_c_inverse(const JointPmf& p, double c, const CBetaConfig& cfg) {
  if (!(c >= 0.0)) throw DomainError("beta_c_inverse requires c >= 0");
  const double rho_p = max_correlation(p);
  if (c <= 1e-12) return rho_p;
  if (c >= entropy(p) - 1e-12) return 0.0;

  CBetaConfig inner = cfg;
  inner.grid_certify = false;
  std::map<double, double> memo;
  auto value_at = [&](double beta) {
    auto it = memo.find(beta);
    if (it != memo.end()) return it->second;
    const double v = solve_c_beta(p, beta, inner).value;
    memo.emplace(beta, v);
    return v;
  };

  double lo = 0.0, hi = rho_p;
  if (value_at(lo) <= c) return lo;
  constexpr double kBisectTol = 1e-3;
  while (hi - lo > kBisectTol) {
    const double mid = 0.5 * (lo + hi);
    if (value_at(mid) <= c) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

std::pair<double, double> gamma_normalizations(const JointPmf& p, double beta,
                                               const CBetaConfig& cfg) {
  const double c = solve_c_beta(p, beta, cfg).value;
  const double h = entropy(p);
  const double first = h > 0.0 ? std::min(1.0, std::max(0.0, c / h)) : 0.0;
  const double second = c > 0.0 ? 1.0 - std::exp2(-2.0 * c) : 0.0;
  return {first, second};
}

// ---------------------------------------------------------------------------
// Exhaustive grid oracle over 2x2 channel rows.
// ---------------------------------------------------------------------------

namespace {

double lambda2_table_2x2(double a, double b, double c, double d) {
  const double r0 = a + b, r1 = c + d, c0 = a + c, c1 = b + d;
  if (r0 <= 0.0 || r1 <= 0.0 || c0 <= 0.0 || c1 <= 0.0) return 0.0;
  const double v = std::abs(a * d - b * c) / std::sqrt(r0 * r1 * c0 * c1);
  return std::min(1.0, v);
}

// Row grid points for one simplex of dimension `us`, resolution K.
std::vector<Vector> simplex_grid(Index us, int K) {
  std::vector<Vector> pts;
  std::vector<int> comp(static_cast<size_t>(us), 0);
  comp[0] = K;
  while (true) {
    Vector v(us);
    for (Index i = 0; i < us; ++i) v(i) = static_cast<double>(comp[static_cast<size_t>(i)]) / K;
    pts.push_back(std::move(v));
    Index i = 0;
    while (i < us - 1 && comp[static_cast<size_t>(i)] == 0) ++i;
    if (i == us - 1) break;
    const int val = comp[static_cast<size_t>(i)];
    comp[static_cast<size_t>(i)] = 0;
    comp[0] = val - 1;
    comp[static_cast<size_t>(i + 1)] += 1;
  }
  return pts;
}

}  // namespace

double grid_min_information(const JointPmf& p, double beta, const GridOracleConfig& cfg) {
  if (p.x_size() != 2 || p.y_size() != 2)
    throw ShapeMismatch("grid oracle supports 2x2 alphabets only");
  if (cfg.u_size < 2 || cfg.u_size > 3)
    throw DomainError("grid oracle supports u_size in {2,3}");

  const Vector pflat = flatten_probs(p);
  const double tol = beta + cfg.feasibility_slack;

  if (cfg.u_size == 2) {
    const int K = cfg.resolution;
    const std::uint64_t count = static_cast<std::uint64_t>(K + 1);
    if (count * count * count * count > cfg.max_evals)
      throw EnumerationCapExceeded("grid oracle budget exceeded");
    // Precompute per-level values of r, xlog2 terms.
    std::vector<double> r(static_cast<size_t>(K + 1));
    for (int k = 0; k <= K; ++k) r[static_cast<size_t>(k)] = static_cast<double>(k) / K;
    double best = kInf;
    const double p00 = pflat(0), p01 = pflat(1), p10 = pflat(2), p11 = pflat(3);
    for (int k0 = 0; k0 <= K; ++k0) {
      const double r0 = r[static_cast<size_t>(k0)];
      for (int k1 = 0; k1 <= K; ++k1) {
        const double r1 = r[static_cast<size_t>(k1)];
        for (int k2 = 0; k2 <= K; ++k2) {
          const double r2 = r[static_cast<size_t>(k2)];
          const double partial = p00 * r0 + p01 * r1 + p10 * r2;
          for (int k3 = 0; k3 <= K; ++k3) {
            const double r3 = r[static_cast<size_t>(k3)];
            const double pu0 = partial + p11 * r3;
            const double pu1 = 1.0 - pu0;
            double rho = 0.0;
            if (pu0 > kSupportTol)
              rho = lambda2_table_2x2(p00 * r0, p01 * r1, p10 * r2, p11 * r3);
            if (rho > tol) continue;
            if (pu1 > kSupportTol) {
              const double l2b = lambda2_table_2x2(p00 * (1.0 - r0), p01 * (1.0 - r1),
                                                   p10 * (1.0 - r2), p11 * (1.0 - r3));
              rho = std::max(rho, l2b);
            }
            if (rho > tol) continue;
            double info = -xlog2(pu0) - xlog2(pu1);
            info += p00 * (xlog2(r0) + xlog2(1.0 - r0));
            info += p01 * (xlog2(r1) + xlog2(1.0 - r1));
            info += p10 * (xlog2(r2) + xlog2(1.0 - r2));
            info += p11 * (xlog2(r3) + xlog2(1.0 - r3));
            best = std::min(best, info);
          }
        }
      }
    }
    return best;
  }

  // u_size == 3: generic nested enumeration with a budget guard.
  const auto rows = simplex_grid(cfg.u_size, cfg.resolution);
  const std::uint64_t n = rows.size();
  if (n * n * n * n > cfg.max_evals) throw EnumerationCapExceeded("grid oracle budget exceeded");
  double best = kInf;
  Matrix table(2, 2);
  for (const Vector& w0 : rows)
    for (const Vector& w1 : rows)
      for (const Vector& w2 : rows)
        for (const Vector& w3 : rows) {
          double info = 0.0;
          double rho = 0.0;
          bool feasible = true;
          for (Index u = 0; u < cfg.u_size && feasible; ++u) {
            const double t00 = pflat(0) * w0(u), t01 = pflat(1) * w1(u), t10 = pflat(2) * w2(u),
                         t11 = pflat(3) * w3(u);
            const double pu = t00 + t01 + t10 + t11;
            if (pu > kSupportTol) {
              const double l2 = lambda2_table_2x2(t00, t01, t10, t11);
              rho = std::max(rho, l2);
              if (rho > tol) feasible = false;
            }
            info -= xlog2(pu);
            info += pflat(0) * xlog2(w0(u)) + pflat(1) * xlog2(w1(u)) +
                    pflat(2) * xlog2(w2(u)) + pflat(3) * xlog2(w3(u));
          }
          if (feasible) best = std::min(best, info);
        }
  return best;
}

}  // namespace infocorr
