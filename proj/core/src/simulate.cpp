#include "tabasco/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace tabasco {

RealMatrix build_cov(const CovModel& model) {
  if (model.p < 2) throw std::invalid_argument("build_cov: p must be >= 2");
  RealMatrix sigma(model.p, model.p);
  switch (model.kind) {
    case CovModel::Kind::AR1:
    case CovModel::Kind::PermutedAR1: {
      if (std::abs(model.rho) >= 1.0)
        throw std::invalid_argument("build_cov: AR1 needs |rho| < 1");
      for (int i = 0; i < model.p; ++i)
        for (int j = 0; j < model.p; ++j)
          sigma(i, j) = std::pow(model.rho, std::abs(i - j));
      break;
    }
    case CovModel::Kind::PolyDecay: {
      for (int i = 0; i < model.p; ++i)
        for (int j = 0; j < model.p; ++j)
          sigma(i, j) = i == j ? 1.0
                               : model.rho * std::pow(std::abs(i - j), -(model.alpha + 1.0));
      break;
    }
  }
  return sigma;
}

RealMatrix apply_random_permutation(const RealMatrix& sigma, std::mt19937_64& rng) {
  const Eigen::Index p = sigma.rows();
  std::vector<int> perm(p);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  RealMatrix out(p, p);
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < p; ++j) out(perm[i], perm[j]) = sigma(i, j);
  return out;
}

CholeskyFactor::CholeskyFactor(const RealMatrix& sigma) {
  Eigen::LLT<RealMatrix> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("CholeskyFactor: matrix is not positive definite");
  l_ = llt.matrixL();
}

RealSamples sample(const SamplingSpec& spec, const CholeskyFactor& chol, int n,
                   std::mt19937_64& rng) {
  const Eigen::Index p = chol.matrix_l().rows();
  std::normal_distribution<double> normal(0.0, 1.0);
  RealVector mu = RealVector::Zero(p);
  if (spec.mean == SamplingSpec::MeanMode::RandomGaussian) {
    for (Eigen::Index j = 0; j < p; ++j) mu(j) = 10.0 + normal(rng);
  }
  RealSamples out;
  out.mean_known = spec.mean_known;
  out.data.resize(n, p);
  RealVector z(p);
  if (spec.dist == SamplingSpec::Dist::MVT && !(spec.nu > 2.0))
    throw std::invalid_argument("sample: MVT needs nu > 2");
  std::chi_squared_distribution<double> chi2(spec.nu);
  const double t_scale =
      spec.dist == SamplingSpec::Dist::MVT ? std::sqrt((spec.nu - 2.0) / spec.nu) : 1.0;
  for (int i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) z(j) = normal(rng);
    RealVector x = chol.matrix_l() * z;
    if (spec.dist == SamplingSpec::Dist::MVT) {
      const double u = chi2(rng);
      x *= t_scale / std::sqrt(u / spec.nu);
    }
    out.data.row(i) = (mu + x).transpose();
  }
  return out;
}

ComplexSamples sample_complex_gaussian(const ComplexMatrix& sigma, int n, std::mt19937_64& rng) {
  Eigen::LLT<ComplexMatrix> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("sample_complex_gaussian: covariance not positive definite");
  const ComplexMatrix l = llt.matrixL();
  const Eigen::Index p = sigma.rows();
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexSamples out;
  out.mean_known = true;
  out.data.resize(n, p);
  ComplexVector z(p);
  const double s = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) z(j) = Complex(normal(rng) * s, normal(rng) * s);
    out.data.row(i) = (l * z).transpose();
  }
  return out;
}

int mnmx_taper_bandwidth(int n, double alpha) {
  return static_cast<int>(std::floor(std::pow(n, 1.0 / (2.0 * (alpha + 1.0)))));
}

RealMatrix mnmx_taper_estimator(const RealSamples& data, double alpha) {
  const int p = static_cast<int>(data.p());
  const int k = std::max(1, mnmx_taper_bandwidth(static_cast<int>(data.n()), alpha));
  const auto s = scm(data);
  if (k >= p) return s.S;  // taper saturates to all-ones
  return hadamard(minimax_taper_template(p, k).W, s.S);
}

namespace {

struct TrialOutcome {
  double nmse = 0.0;
  double beta = std::numeric_limits<double>::quiet_NaN();
  double k = std::numeric_limits<double>::quiet_NaN();
  bool failed = false;
};

TrialOutcome run_estimator(const EstimatorSpec& est, const RealSamples& data,
                           const RealMatrix& sigma, const TemplateFamily& family) {
  TrialOutcome out;
  const double denom = frob_norm_sq(sigma);
  try {
    switch (est.kind) {
      case EstimatorSpec::Kind::Tabasco: {
        auto fit = tabasco_estimate(data, family, est.tabasco_options);
        out.nmse = frob_norm_sq(RealMatrix(fit.Sigma_hat - sigma)) / denom;
        out.beta = fit.selection.beta_hat;
        out.k = fit.chosen.index_value;
        break;
      }
      case EstimatorSpec::Kind::Rscm: {
        auto fit = rscm_special_case(data, est.tabasco_options);
        out.nmse = frob_norm_sq(RealMatrix(fit.Sigma_hat - sigma)) / denom;
        out.beta = fit.selection.beta_hat;
        out.k = fit.chosen.index_value;
        break;
      }
      case EstimatorSpec::Kind::Lwe: {
        double beta = 0.0;
        RealMatrix fit = lw_estimator(data, &beta);
        out.nmse = frob_norm_sq(RealMatrix(fit - sigma)) / denom;
        out.beta = beta;
        break;
      }
      case EstimatorSpec::Kind::MnmxTaper: {
        RealMatrix fit = mnmx_taper_estimator(data, est.alpha);
        out.nmse = frob_norm_sq(RealMatrix(fit - sigma)) / denom;
        out.k = mnmx_taper_bandwidth(static_cast<int>(data.n()), est.alpha);
        break;
      }
      case EstimatorSpec::Kind::TaperedScm: {
        const auto s = scm(data);
        RealMatrix fit =
            hadamard(banding_template(static_cast<int>(data.p()), est.fixed_bandwidth).W, s.S);
        out.nmse = frob_norm_sq(RealMatrix(fit - sigma)) / denom;
        out.k = est.fixed_bandwidth;
        break;
      }
      case EstimatorSpec::Kind::Scm: {
        const auto s = scm(data);
        out.nmse = frob_norm_sq(RealMatrix(s.S - sigma)) / denom;
        break;
      }
      case EstimatorSpec::Kind::TrueSigma:  // harness self-check
        out.nmse = 0.0;
        break;
    }
  } catch (const std::exception&) {
    out.failed = true;
  }
  return out;
}

}  // namespace

std::vector<NmseReport> run_campaign(const CampaignConfig& config) {
  if (config.estimators.empty()) throw std::invalid_argument("run_campaign: no estimators");
  if (config.sample_sizes.empty()) throw std::invalid_argument("run_campaign: no sample sizes");

  const RealMatrix base_sigma = build_cov(config.model);
  std::vector<double> family_indices = config.family_indices;
  if (family_indices.empty()) family_indices = default_bandwidths(config.model.p);
  const TemplateFamily family =
      make_family(config.family_kind, config.model.p, family_indices);

  const bool permuted = config.model.kind == CovModel::Kind::PermutedAR1;
  std::optional<CholeskyFactor> base_chol;
  if (!permuted) base_chol.emplace(base_sigma);

  const std::size_t n_est = config.estimators.size();
  const std::size_t n_sizes = config.sample_sizes.size();
  const std::size_t cells = n_est * n_sizes;

  // per-trial outcomes, indexed [trial][cell]; filled in parallel, reduced
  // serially so results do not depend on the thread count
  std::vector<std::vector<TrialOutcome>> outcomes(
      config.trials, std::vector<TrialOutcome>(cells));

  auto run_trial = [&](int trial) {
    std::mt19937_64 rng = substream(config.seed, static_cast<std::uint64_t>(trial));
    RealMatrix sigma = base_sigma;
    std::optional<CholeskyFactor> chol;
    if (permuted) {
      sigma = apply_random_permutation(base_sigma, rng);
      chol.emplace(sigma);
    }
    const CholeskyFactor& use_chol = permuted ? *chol : *base_chol;
    for (std::size_t si = 0; si < n_sizes; ++si) {
      const RealSamples data = sample(config.sampling, use_chol, config.sample_sizes[si], rng);
      for (std::size_t ei = 0; ei < n_est; ++ei)
        outcomes[trial][ei * n_sizes + si] =
            run_estimator(config.estimators[ei], data, sigma, family);
    }
  };

  unsigned hw = config.threads > 0 ? static_cast<unsigned>(config.threads)
                                   : std::max(1u, std::thread::hardware_concurrency());
  hw = std::min<unsigned>(hw, static_cast<unsigned>(config.trials));
  if (hw <= 1) {
    for (int t = 0; t < config.trials; ++t) run_trial(t);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (unsigned w = 0; w < hw; ++w)
      pool.emplace_back([&] {
        for (int t = next.fetch_add(1); t < config.trials; t = next.fetch_add(1)) run_trial(t);
      });
    for (auto& th : pool) th.join();
  }

  std::vector<NmseReport> reports(n_est);
  for (std::size_t ei = 0; ei < n_est; ++ei) {
    reports[ei].label = config.estimators[ei].label;
    for (std::size_t si = 0; si < n_sizes; ++si) {
      NmseCell cell;
      cell.n = config.sample_sizes[si];
      double sum = 0.0, sum_sq = 0.0, beta_sum = 0.0;
      int ok = 0, betas = 0;
      std::map<double, int> k_counts;
      for (int t = 0; t < config.trials; ++t) {
        const TrialOutcome& o = outcomes[t][ei * n_sizes + si];
        if (o.failed) {
          ++cell.failures;
          continue;
        }
        ++ok;
        sum += o.nmse;
        sum_sq += o.nmse * o.nmse;
        if (!std::isnan(o.beta)) {
          beta_sum += o.beta;
          ++betas;
        }
        if (!std::isnan(o.k)) ++k_counts[o.k];
      }
      if (ok > 0) {
        cell.nmse_mean = sum / ok;
        const double var = std::max(0.0, sum_sq / ok - cell.nmse_mean * cell.nmse_mean);
        cell.nmse_se = ok > 1 ? std::sqrt(var / (ok - 1)) : 0.0;
      }
      cell.beta_mean = betas > 0 ? beta_sum / betas : std::numeric_limits<double>::quiet_NaN();
      if (!k_counts.empty()) {
        auto best = k_counts.begin();
        for (auto it = k_counts.begin(); it != k_counts.end(); ++it)
          if (it->second > best->second) best = it;
        cell.k_mode = best->first;
      } else {
        cell.k_mode = std::numeric_limits<double>::quiet_NaN();
      }
      reports[ei].cells.push_back(cell);
    }
  }
  return reports;
}

}  // namespace tabasco
