#pragma once

#include <cstdint>
#include <optional>

#include "infocorr/probability.hpp"

namespace infocorr {

enum class Direction { XGivenY, YGivenX };

/// Pearson correlation using the numeric embeddings; 0 when either
/// variance vanishes. The conditional overload pools moments over u:
/// E[cov(X,Y|U)] / sqrt(E[var(X|U)] E[var(Y|U)]).
double pearson(const JointPmf& p);
double pearson(const ConditionedJoint& cj);

/// Correlation ratio sqrt(var(E[X|Y]) / var(X)) for XGivenY (swap roles
/// for YGivenX); 0 when the predicted variable has zero variance. The
/// conditional overload evaluates sqrt(E[var(E[X|YU]|U)] / E[var(X|U)]).
double correlation_ratio(const JointPmf& p, Direction dir);
double correlation_ratio(const ConditionedJoint& cj, Direction dir);

struct MaxCorrDetail {
  double value = 0.0;
  double lambda1 = 1.0;   // leading singular value of Q (1 up to roundoff)
  bool degenerate = false;  // fewer than 2 surviving symbols on a side
};

/// Maximal correlation as the second-largest singular value of
/// Q(x,y) = P(x,y) / sqrt(P(x) P(y)), formed on the support sub-alphabet.
/// Degenerate alphabets give 0. The detail variant reports the leading
/// singular value (self-checked against 1 within 1e-8) and the
/// degeneracy flag.
MaxCorrDetail max_correlation_detail(const JointPmf& p);
double max_correlation(const JointPmf& p);

/// Raw spectral kernel: second singular value of the normalized matrix of
/// an (unnormalized) nonnegative table. No validation, no self-check;
/// used by optimizer inner loops and oracles.
double second_singular_value(const Eigen::Ref<const Matrix>& table);

struct CondMaxCorr {
  double value = 0.0;
  Index achieving_u = 0;
};

/// Conditional maximal correlation: sup over positive-weight slices of
/// the per-slice maximal correlation, with the achieving slice index.
CondMaxCorr cond_max_correlation(const ConditionedJoint& cj);

struct CorrelationReport {
  double pearson = 0.0;
  double theta_x_given_y = 0.0;
  double theta_y_given_x = 0.0;
  double max_corr = 0.0;
  std::optional<Index> achieving_u;
};

CorrelationReport correlation_report(const JointPmf& p);
CorrelationReport correlation_report(const ConditionedJoint& cj);

struct TvBoundSides {
  double lhs = 0.0;   // (rho_P - 4d/Pm) / (1 + 4d/Pm)
  double rhs = 0.0;   // rho_Q
  double delta = 0.0; // max_u TV(P_slice_u, Q_slice_u)
  double p_min = 0.0; // min over supported (x,y,u) of P(x,y|u)
};

/// Both sides of the TV perturbation bound on conditional maximal
/// correlation. Slices are paired by index. Throws UnsupportedSupport if
/// a Q slice has mass outside the matching P slice's support.
TvBoundSides tv_perturbation_bound(const ConditionedJoint& p_cj, const ConditionedJoint& q_cj);

struct SmoothQuery {
  double epsilon = 0.1;     // TV radius, strictly inside (0,1)
  int restarts = 8;
  int max_iters = 400;
  double step_tol = 1e-10;
  std::uint64_t seed = 0x1CEB00DAull;
};

struct SmoothResult {
  double value = 0.0;
  ConditionedJoint minimizer;   // the perturbed joint achieving `value`
  bool budget_exhausted = false;  // best restart stopped on iteration cap
};

/// Approximates the epsilon-smooth conditional maximal correlation: the
/// infimum of the conditional maximal correlation over joints within TV
/// epsilon of cj on the same alphabets. Multi-start projected descent on
/// the max-of-slices spectral objective; the result is an upper bound on
/// the infimum (the unperturbed joint is always feasible) and is not
/// claimed globally optimal.
SmoothResult smooth_max_correlation(const ConditionedJoint& cj, const SmoothQuery& q);

/// Coarse-grid oracle for the smooth measure: evaluates the objective at
/// every resolution-1/m simplex point pulled into the TV ball along the
/// ray from cj, plus cj itself. Intended for desk-scale certification
/// (alphabet cells <= 12). Throws EnumerationCapExceeded beyond that.
double smooth_max_correlation_grid(const ConditionedJoint& cj, double epsilon, int resolution);

struct AceOptions {
  int restarts = 16;
  int max_iters = 500;
  double step_tol = 1e-10;
  std::uint64_t seed = 0xACEull;
};

/// Alternating-conditional-expectation oracle for maximal correlation:
/// alternately sets f proportional to E[g(Y)|X] and g proportional to
/// E[f(X)|Y] (centered, unit variance) until the achieved correlation is
/// stationary. Independent of the SVD path; used by the test suite.
double max_correlation_ace(const JointPmf& p, const AceOptions& opts = {});

struct Moments {
  double var_x = 0.0;
  double var_y = 0.0;
  double cov = 0.0;
};

Moments moments(const JointPmf& p);

/// E[var(X|U)], E[var(Y|U)], E[cov(X,Y|U)] pooled over slices.
Moments pooled_conditional_moments(const ConditionedJoint& cj);

}  // namespace infocorr
