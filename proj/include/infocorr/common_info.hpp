#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "infocorr/correlation.hpp"
#include "infocorr/probability.hpp"

namespace infocorr {

struct GkDecomposition {
  std::vector<int> component_of_x;  // -1 for symbols of zero marginal
  std::vector<int> component_of_y;
  Vector component_masses;
  double entropy_bits = 0.0;
};

/// Gacs-Korner common information via the connected components of the
/// bipartite support graph; entropy_bits is 0 iff the graph is connected.
GkDecomposition gacs_korner(const JointPmf& p);

/// Bivariate Gaussian source summarized by its correlation coefficient.
struct GaussianPair {
  double beta0 = 0.0;
};

/// Closed form for Gaussian sources, in bits:
/// 0.5 * log2+ [ ((1+beta0)/(1-beta0)) / ((1+beta)/(1-beta)) ].
double gaussian_c_beta(const GaussianPair& g, double beta);

/// Differential entropy (bits) of a unit-variance Gaussian pair with
/// correlation beta0: 0.5 * log2((2 pi e)^2 (1 - beta0^2)).
double gaussian_joint_entropy(double beta0);

/// Continuous-source lower bound, in bits:
/// h(XY) - 0.5 * log2[(2 pi e (1-beta0))^2 (1+beta)/(1-beta)], for
/// beta <= beta0. Coincides with gaussian_c_beta at the Gaussian h(XY).
double continuous_lower_bound(double h_xy_bits, double beta0, double beta);

/// DSBS upper bound, in bits: 1 + H2(p0) - H4(a, b, p0/2, p0/2) with
/// a,b = (1 - p0 +- sqrt((1-2p0-beta)/(1-beta))) / 2 for beta < 1-2p0,
/// and 0 for beta >= 1-2p0. Requires p0 in (0, 0.5).
double dsbs_upper_bound(double p0, double beta);

/// The doubly symmetric binary source with crossover p0 and +-1 symbol
/// embeddings.
JointPmf dsbs_pmf(double p0);

/// The binary-U decomposition achieving the DSBS bound: both slices have
/// conditional maximal correlation exactly beta and mix back to
/// dsbs_pmf(p0). For beta >= 1-2p0 the single-slice decomposition (U
/// constant) already satisfies the constraint and is returned.
ConditionedJoint dsbs_decomposition(double p0, double beta);

enum class Certificate { GridCertified, MultiStartBest };

struct CBetaConfig {
  int restarts = 32;
  int iters_per_round = 150;
  int polish_iters = 4000;       // conditional-independence polish passes at beta = 0
  double lambda_init = 10.0;     // penalty weight schedule: *= lambda_mult per round
  double lambda_mult = 10.0;
  double lambda_max = 1e6;
  double grad_step = 1e-5;       // central-difference step on channel entries
  double step_tol = 1e-10;
  double feasibility_tol = 1e-6;
  std::uint64_t seed = 0xC0FFEEull;
  bool grid_certify = true;      // effective only on 2x2 alphabets
  int grid_resolution = 40;
  std::optional<Index> u_size;   // default |X||Y| + 1
};

struct CBetaSolution {
  double value = 0.0;                 // I(XY;U) of the returned channel, bits
  Channel channel;                    // the achieving P_{U|XY}
  double achieved_constraint = 0.0;   // realized rho_m(X;Y|U)
  Certificate certificate = Certificate::MultiStartBest;
  double lower = 0.0;                 // analytic bracket when available
  double upper = 0.0;
};

/// Approximate common information: minimizes I(XY;U) over channels with
/// rho_m(X;Y|U) <= beta. Penalized multi-start projected gradient
/// descent; for beta >= rho_m(X;Y) the constant channel gives exactly 0.
/// The returned channel is always feasible at feasibility_tol; no global
/// optimality is claimed (certificate records the evidence level).
CBetaSolution solve_c_beta(const JointPmf& p, double beta, const CBetaConfig& cfg = {});

/// Single-letter upper bound on the exact common information: minimizes
/// H(U) instead of I(XY;U) over the same feasible set.
double k_beta_single_letter_upper(const JointPmf& p, double beta, const CBetaConfig& cfg = {});

/// Distributed upper bound: restricts the channel to a product
/// P_{U|X} P_{V|Y} and minimizes I(XY;UV) under rho_m(X;Y|UV) <= beta.
double solve_c_beta_distributed_ub(const JointPmf& p, double beta, const CBetaConfig& cfg = {});

/// Correlation-information function: the inverse of beta -> C_beta,
/// found by bisection (tolerance 1e-3 on beta, memoized solves).
/// Exact endpoints: rho_m(X;Y) at c = 0 and 0 at c >= H(XY).
double beta_c_inverse(const JointPmf& p, double c, const CBetaConfig& cfg = {});

/// Normalized measures (C_beta / H(XY), 1 - 2^(-2 C_beta)).
std::pair<double, double> gamma_normalizations(const JointPmf& p, double beta,
                                               const CBetaConfig& cfg = {});

struct GridOracleConfig {
  int resolution = 40;
  Index u_size = 2;
  // Grid channels rarely satisfy the spectral constraint exactly; the
  // oracle admits lambda2 <= beta + feasibility_slack to account for the
  // 1/resolution row discretization.
  double feasibility_slack = 0.05;
  std::uint64_t max_evals = (1ull << 26);
};

/// Exhaustive search over resolution-1/K channel rows for 2x2 alphabets:
/// the minimum I(XY;U) over grid channels whose supported slices satisfy
/// lambda2 <= beta + feasibility_slack. Returns +inf when no grid channel
/// qualifies. Throws EnumerationCapExceeded past max_evals and
/// ShapeMismatch off 2x2.
double grid_min_information(const JointPmf& p, double beta, const GridOracleConfig& cfg = {});

/// DSBS structure detection: returns the crossover probability when p is
/// a 2x2 symmetric matrix with uniform marginals and p0 in (0, 0.5).
std::optional<double> detect_dsbs(const JointPmf& p);

}  // namespace infocorr
