#pragma once

#include "tabasco/random.hpp"
#include "tabasco/shrinkage.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace tabasco {

// ---------------------------------------------------------------------------
// covariance models

struct CovModel {
  enum class Kind { AR1, PolyDecay, PermutedAR1 };
  Kind kind = Kind::AR1;
  int p = 0;
  double rho = 0.0;
  double alpha = 0.0;  // PolyDecay decay exponent
};

/// Sigma for the model; PermutedAR1 returns the unpermuted base (the harness
/// applies a fresh permutation per trial).
RealMatrix build_cov(const CovModel& model);

RealMatrix apply_random_permutation(const RealMatrix& sigma, std::mt19937_64& rng);

// ---------------------------------------------------------------------------
// samplers

struct SamplingSpec {
  enum class Dist { MVN, MVT };
  enum class MeanMode { Zero, RandomGaussian };  // RandomGaussian: N(10*1, I), fresh per trial
  Dist dist = Dist::MVN;
  double nu = 5.0;  // MVT degrees of freedom, > 2
  MeanMode mean = MeanMode::Zero;
  bool mean_known = false;
};

class CholeskyFactor {
 public:
  explicit CholeskyFactor(const RealMatrix& sigma);
  const RealMatrix& matrix_l() const { return l_; }

 private:
  RealMatrix l_;
};

/// Draws n rows with covariance Sigma (given through its Cholesky factor)
/// and the requested mean mode. MVT draws are rescaled so cov(x) = Sigma.
RealSamples sample(const SamplingSpec& spec, const CholeskyFactor& chol, int n,
                   std::mt19937_64& rng);

/// Circular complex Gaussian draws with Hermitian covariance Sigma.
ComplexSamples sample_complex_gaussian(const ComplexMatrix& sigma, int n, std::mt19937_64& rng);

// ---------------------------------------------------------------------------
// baseline estimators

/// Shrinkage of the SCM toward its scaled-identity target with the classic
/// plug-in intensity.
template <typename Scalar>
Matrix<Scalar> lw_estimator(const SampleSet<Scalar>& data, double* beta_out = nullptr) {
  data.validate();
  const auto res = scm(data);
  const Eigen::Index n = data.n(), p = data.p();
  const double m = trace_real(res.S) / static_cast<double>(p);
  Matrix<Scalar> dev = res.S;
  dev.diagonal().array() -= Scalar(m);
  const double d2 = frob_norm_sq(dev) / static_cast<double>(p);
  double beta = 0.0;
  if (d2 > 0.0) {
    double bbar2 = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Vector<Scalar> c = data.data.row(i).transpose() - res.mean;
      Matrix<Scalar> outer = c * c.adjoint();
      outer -= res.S;
      bbar2 += frob_norm_sq(outer);
    }
    bbar2 /= static_cast<double>(n) * static_cast<double>(n) * static_cast<double>(p);
    const double b2 = std::min(bbar2, d2);
    beta = 1.0 - b2 / d2;
  }
  if (beta_out) *beta_out = beta;
  Matrix<Scalar> out = beta * res.S;
  out.diagonal().array() += Scalar((1.0 - beta) * m);
  return out;
}

/// W(k*) o S with the linear-decay taper at the rate-optimal bandwidth
/// k* = floor(n^(1/(2(alpha+1)))); needs the true decay parameter.
RealMatrix mnmx_taper_estimator(const RealSamples& data, double alpha);

int mnmx_taper_bandwidth(int n, double alpha);

// ---------------------------------------------------------------------------
// Monte-Carlo NMSE campaign

struct EstimatorSpec {
  enum class Kind { Tabasco, Rscm, Lwe, MnmxTaper, TaperedScm, Scm, TrueSigma };
  Kind kind = Kind::Tabasco;
  std::string label;
  TabascoOptions tabasco_options;   // Tabasco / Rscm
  double alpha = 0.1;               // MnmxTaper
  int fixed_bandwidth = 1;          // TaperedScm
};

struct CampaignConfig {
  CovModel model;
  SamplingSpec sampling;
  std::vector<int> sample_sizes;
  int trials = 1000;
  std::uint64_t seed = 0;
  std::vector<EstimatorSpec> estimators;
  // family for Tabasco estimators; defaults to banding over default_bandwidths
  TemplateKind family_kind = TemplateKind::Banding;
  std::vector<double> family_indices;  // empty = default bandwidth set
  int threads = 0;                     // 0 = hardware concurrency
};

struct NmseCell {
  int n = 0;
  double nmse_mean = 0.0;
  double nmse_se = 0.0;
  double beta_mean = 0.0;          // NaN when not applicable
  double k_mode = 0.0;             // modal chosen index value; NaN when n/a
  int failures = 0;                // trials excluded due to estimator errors
};

struct NmseReport {
  std::string label;
  std::vector<NmseCell> cells;
};

/// Runs trials x sample_sizes x estimators, accumulating normalized squared
/// Frobenius errors. Deterministic given the seed, independent of threading.
std::vector<NmseReport> run_campaign(const CampaignConfig& config);

}  // namespace tabasco
