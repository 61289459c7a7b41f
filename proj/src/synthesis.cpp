#include "infocorr/synthesis.hpp"

#include <cmath>
#include <random>

#include "infocorr/correlation.hpp"

namespace infocorr {

namespace {

double uniform_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t checked_pow(std::uint64_t base, int n, std::uint64_t cap) {
  std::uint64_t v = 1;
  for (int i = 0; i < n; ++i) {
    if (v > cap / base) return cap + 1;
    v *= base;
  }
  return v;
}

void check_cap(const SynthesisExperiment& exp) {
  if (exp.n < 1) throw DomainError("blocklength must be at least 1");
  const std::uint64_t xb =
      checked_pow(static_cast<std::uint64_t>(exp.base.x_size()), exp.n, exp.enumeration_cap);
  if (xb > exp.enumeration_cap) throw EnumerationCapExceeded("|X|^n exceeds the enumeration cap");
  const std::uint64_t yb =
      checked_pow(static_cast<std::uint64_t>(exp.base.y_size()), exp.n, exp.enumeration_cap);
  if (yb > exp.enumeration_cap || xb * yb > exp.enumeration_cap)
    throw EnumerationCapExceeded("|X|^n * |Y|^n exceeds the enumeration cap");
}

std::uint64_t codebook_size(const SynthesisExperiment& exp) {
  const double bits = exp.rate * exp.n;
  if (bits > 24.0) throw EnumerationCapExceeded("codebook size 2^{nR} exceeds 2^24");
  return static_cast<std::uint64_t>(std::ceil(std::exp2(bits)));
}

// Big-endian digits of idx in the given base.
void decode(Index idx, Index base, int n, std::vector<Index>& out) {
  for (int i = n - 1; i >= 0; --i) {
    out[static_cast<size_t>(i)] = idx % base;
    idx /= base;
  }
}

struct CellTables {
  Index x_block = 0, y_block = 0;
  std::vector<std::vector<Index>> x_digits, y_digits;
  Vector target;  // prod over positions of the base mixture
};

CellTables build_cell_tables(const SynthesisExperiment& exp) {
  CellTables t;
  t.x_block = 1;
  t.y_block = 1;
  for (int i = 0; i < exp.n; ++i) {
    t.x_block *= exp.base.x_size();
    t.y_block *= exp.base.y_size();
  }
  t.x_digits.assign(static_cast<size_t>(t.x_block), std::vector<Index>(exp.n));
  t.y_digits.assign(static_cast<size_t>(t.y_block), std::vector<Index>(exp.n));
  for (Index xi = 0; xi < t.x_block; ++xi)
    decode(xi, exp.base.x_size(), exp.n, t.x_digits[static_cast<size_t>(xi)]);
  for (Index yi = 0; yi < t.y_block; ++yi)
    decode(yi, exp.base.y_size(), exp.n, t.y_digits[static_cast<size_t>(yi)]);

  const JointPmf mix = mixture(exp.base);
  t.target.resize(t.x_block * t.y_block);
  for (Index xi = 0; xi < t.x_block; ++xi) {
    for (Index yi = 0; yi < t.y_block; ++yi) {
      double v = 1.0;
      for (int i = 0; i < exp.n; ++i)
        v *= mix.probs()(t.x_digits[static_cast<size_t>(xi)][static_cast<size_t>(i)],
                         t.y_digits[static_cast<size_t>(yi)][static_cast<size_t>(i)]);
      t.target(xi * t.y_block + yi) = v;
    }
  }
  return t;
}

// Likelihood of cell under codeword m: prod_i slice_{u_i}(x_i, y_i).
double codeword_likelihood(const SynthesisExperiment& exp, const CellTables& t,
                           const std::vector<Index>& word, Index xi, Index yi) {
  double v = 1.0;
  for (int i = 0; i < exp.n; ++i) {
    const Index u = word[static_cast<size_t>(i)];
    v *= exp.base.slice(u).probs()(t.x_digits[static_cast<size_t>(xi)][static_cast<size_t>(i)],
                                   t.y_digits[static_cast<size_t>(yi)][static_cast<size_t>(i)]);
  }
  return v;
}

}  // namespace

Codebook sample_codebook(const SynthesisExperiment& exp) {
  check_cap(exp);
  const std::uint64_t m = codebook_size(exp);
  std::mt19937_64 rng(exp.seed);
  Codebook cb(m, std::vector<Index>(static_cast<size_t>(exp.n)));
  const Vector& w = exp.base.u_weights();
  for (auto& word : cb) {
    for (int i = 0; i < exp.n; ++i) {
      const double r = uniform_double(rng);
      double acc = 0.0;
      Index pick = exp.base.u_size() - 1;
      for (Index u = 0; u < exp.base.u_size(); ++u) {
        acc += w(u);
        if (r < acc) {
          pick = u;
          break;
        }
      }
      word[static_cast<size_t>(i)] = pick;
    }
  }
  return cb;
}

SequenceJoint induced_synthesis_joint(const SynthesisExperiment& exp, const Codebook& cb) {
  check_cap(exp);
  const CellTables t = build_cell_tables(exp);
  const Index cells = t.x_block * t.y_block;
  const auto m = static_cast<Index>(cb.size());
  if (static_cast<std::uint64_t>(m) * static_cast<std::uint64_t>(cells) > (1ull << 24))
    throw EnumerationCapExceeded("codebook x cell table exceeds 2^24 entries");

  SequenceJoint out;
  out.x_block = t.x_block;
  out.y_block = t.y_block;
  out.per_message.resize(m, cells);
  out.xy_marginal = Vector::Zero(cells);
  out.target_product = t.target;
  const double inv_m = 1.0 / static_cast<double>(m);
  for (Index mi = 0; mi < m; ++mi) {
    for (Index xi = 0; xi < t.x_block; ++xi) {
      for (Index yi = 0; yi < t.y_block; ++yi) {
        const double v =
            inv_m * codeword_likelihood(exp, t, cb[static_cast<size_t>(mi)], xi, yi);
        out.per_message(mi, xi * t.y_block + yi) = v;
        out.xy_marginal(xi * t.y_block + yi) += v;
      }
    }
  }
  out.tv_to_target = tv_distance(out.xy_marginal, out.target_product);
  return out;
}

ExperimentReport audit_synthesis(const SynthesisExperiment& exp, const Codebook& cb) {
  ExperimentReport rep;
  rep.codebook_size = cb.size();

  // Per-slice spectral values once; the sequence-level measure is the max
  // over codeword symbols (conditionally independent given m).
  Vector slice_l2(exp.base.u_size());
  for (Index u = 0; u < exp.base.u_size(); ++u)
    slice_l2(u) = max_correlation(exp.base.slice(u));
  double worst = 0.0;
  for (const auto& word : cb)
    for (const Index u : word) worst = std::max(worst, slice_l2(u));
  rep.cond_maxcorr = worst;
  rep.per_slice_max = worst;

  rep.tv_to_target = induced_synthesis_joint(exp, cb).tv_to_target;
  return rep;
}

ExtractionJoint likelihood_encoder_joint(const SynthesisExperiment& exp, const Codebook& cb,
                                         const std::optional<JointPmf>& target) {
  check_cap(exp);
  const JointPmf mix = mixture(exp.base);
  if (target && tv_distance(*target, mix) > 1e-9)
    throw InconsistentDecomposition("decomposition mixture does not match the target");

  const CellTables t = build_cell_tables(exp);
  const Index cells = t.x_block * t.y_block;
  const auto m = static_cast<Index>(cb.size());
  if (static_cast<std::uint64_t>(m) * static_cast<std::uint64_t>(cells) > (1ull << 24))
    throw EnumerationCapExceeded("codebook x cell table exceeds 2^24 entries");

  ExtractionJoint out;
  out.x_block = t.x_block;
  out.y_block = t.y_block;
  out.induced.resize(m, cells);
  out.ideal.resize(m, cells);
  const double inv_m = 1.0 / static_cast<double>(m);

  Vector likelihood(m);
  for (Index cell = 0; cell < cells; ++cell) {
    const Index xi = cell / t.y_block;
    const Index yi = cell % t.y_block;
    double total = 0.0;
    for (Index mi = 0; mi < m; ++mi) {
      likelihood(mi) = codeword_likelihood(exp, t, cb[static_cast<size_t>(mi)], xi, yi);
      total += likelihood(mi);
    }
    const double source = t.target(cell);
    for (Index mi = 0; mi < m; ++mi) {
      const double posterior = total > 0.0 ? likelihood(mi) / total : inv_m;
      out.induced(mi, cell) = source * posterior;
      out.ideal(mi, cell) = inv_m * likelihood(mi);
    }
  }
  out.source_marginal = out.induced.colwise().sum().transpose();
  out.tv_induced_ideal = 0.5 * (out.induced - out.ideal).cwiseAbs().sum();
  return out;
}

}  // namespace infocorr
