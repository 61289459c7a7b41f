#pragma once

#include <cstdint>
#include <optional>

#include "infocorr/probability.hpp"

namespace infocorr {

/// One run of the random-codebook synthesis / extraction schemes: a
/// single-letter decomposition (P_U and P_{XY|U}), a blocklength, a rate
/// in bits per symbol (codebook size M = ceil(2^{n rate})), a seed, and
/// the beta the decomposition was designed for. All induced joints are
/// enumerated exactly; the cap bounds |X|^n * |Y|^n.
struct SynthesisExperiment {
  ConditionedJoint base;
  int n = 1;
  double rate = 1.0;
  std::uint64_t seed = 0;
  double beta_target = 1.0;
  std::uint64_t enumeration_cap = (1ull << 20);
};

/// M codeword sequences of u indices into the base slices.
using Codebook = std::vector<std::vector<Index>>;

/// Draws M sequences of length n i.i.d. per symbol from P_U.
/// Deterministic in the seed. Throws EnumerationCapExceeded when the
/// blocklength puts the exact enumeration past the cap.
Codebook sample_codebook(const SynthesisExperiment& exp);

/// Exact joint tables over (m, x-sequence, y-sequence). Cells are indexed
/// x_index * y_block + y_index with big-endian digit order.
struct SequenceJoint {
  Matrix per_message;     // M x cells, total mass 1
  Vector xy_marginal;     // sum over m
  Vector target_product;  // prod_i P_XY over the same cells
  double tv_to_target = 0.0;
  Index x_block = 0;      // |X|^n
  Index y_block = 0;      // |Y|^n
};

/// Synthesis scheme: P(x^n, y^n, m) = (1/M) prod_i P_{XY|U}(x_i,y_i|u_i(m)).
SequenceJoint induced_synthesis_joint(const SynthesisExperiment& exp, const Codebook& cb);

struct ExperimentReport {
  double tv_to_target = 0.0;
  double cond_maxcorr = 0.0;   // via the per-symbol slice shortcut
  std::uint64_t codebook_size = 0;
  double per_slice_max = 0.0;  // max over (m,i) of the codeword slice rho_m
};

/// Runs the synthesis scheme and reports the TV to the i.i.d. target and
/// the conditional maximal correlation, computed as the max over (m,i) of
/// the per-symbol slice values (never via the exponential-size SVD).
ExperimentReport audit_synthesis(const SynthesisExperiment& exp, const Codebook& cb);

struct ExtractionJoint {
  Matrix induced;          // P(m, cell) = source(cell) * P(m | cell)
  Matrix ideal;            // Q(m, cell) = (1/M) prod_i P_{XY|U}(.|u_i(m))
  double tv_induced_ideal = 0.0;
  Vector source_marginal;  // sum over m of induced; equals the iid source
  Index x_block = 0;
  Index y_block = 0;
};

/// Extraction scheme: sources i.i.d. P_XY, message drawn by the
/// likelihood encoder P(m|x^n,y^n) proportional to the codeword
/// likelihood. Also returns the ideal distribution Q and TV(P,Q); the
/// induced distribution Q witnesses the spectral privacy level while P
/// stays within TV(P,Q) of it. When `target` is given it must match the
/// base mixture within 1e-9 (InconsistentDecomposition otherwise).
ExtractionJoint likelihood_encoder_joint(const SynthesisExperiment& exp, const Codebook& cb,
                                         const std::optional<JointPmf>& target = std::nullopt);

}  // namespace infocorr
