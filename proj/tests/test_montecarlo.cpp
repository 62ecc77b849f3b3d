#include "tabasco/oracle.hpp"
#include "tabasco/shrinkage.hpp"
#include "tabasco/simulate.hpp"
#include "tabasco/sphericity.hpp"

#include <doctest.h>

#include <cmath>
#include <map>

using namespace tabasco;

namespace {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / xs.size();
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= (xs.size() - 1);
  return {mean, std::sqrt(var / xs.size())};
}

void check_within_se(const MeanSe& got, double expected, double n_se, const char* what) {
  INFO(what, ": mean=", got.mean, " expected=", expected, " se=", got.se);
  CHECK(std::abs(got.mean - expected) <= n_se * std::max(got.se, 1e-300));
}

RealMatrix fixed_spd(int p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  RealMatrix a(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) a(i, j) = normal(rng);
  RealMatrix s = a * a.transpose() / p;
  s.diagonal().array() += 0.5;
  return s;
}

ComplexMatrix fixed_hpd(int p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  ComplexMatrix a(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) a(i, j) = Complex(normal(rng), normal(rng));
  ComplexMatrix s = a * a.adjoint() / (2.0 * p);
  s.diagonal().array() += Complex(0.5, 0.0);
  return s;
}

}  // namespace

TEST_CASE("SSCM is unbiased for the shape of spherical data") {
  const int p = 4, n = 100000;
  auto rng = substream(101, 0);
  const CholeskyFactor chol(RealMatrix::Identity(p, p));
  auto data = sample(SamplingSpec{}, chol, n, rng);
  data.mean_known = true;
  const auto lam = sscm(data);
  CHECK((lam.Lambda - RealMatrix::Identity(p, p)).cwiseAbs().maxCoeff() <= 0.02);
}

TEST_CASE("kurtosis estimates recover the population value") {
  SUBCASE("gaussian data has kappa near zero") {
    auto rng = substream(102, 0);
    const CholeskyFactor chol(RealMatrix::Identity(10, 10));
    const auto data = sample(SamplingSpec{}, chol, 10000, rng);
    CHECK(std::abs(kurtosis_estimate(data).kappa_hat) <= 0.05);
  }
  SUBCASE("t distribution with nu = 5 has kappa near two") {
    // heavy tails make the sample kurtosis converge slowly (its own
    // variance needs 8th moments), so this runs at a generous n
    SamplingSpec spec;
    spec.dist = SamplingSpec::Dist::MVT;
    spec.nu = 5.0;
    const CholeskyFactor chol(RealMatrix::Identity(5, 5));
    std::vector<double> kappas;
    for (int s = 0; s < 10; ++s) {
      auto rng = substream(103, s);
      kappas.push_back(kurtosis_estimate(sample(spec, chol, 100000, rng)).kappa_hat);
    }
    CHECK(std::abs(mean_se(kappas).mean - 2.0) <= 0.3);
  }
}

TEST_CASE("tapered SCM moment identities, Monte Carlo") {
  const int p = 5, n = 10, trials = 30000;
  const RealMatrix sigma = fixed_spd(p, 7);
  const CholeskyFactor chol(sigma);
  const auto w = banding_template(p, 2);
  const auto ones = all_ones_template(p);

  auto run_real = [&](SamplingSpec spec, double kappa, const char* tag) {
    OracleInputs<double> in{sigma, kappa, n, DataRegime::RealUnknownMean};
    const auto mw = tapered_scm_moments(in, w);
    const auto mo = tapered_scm_moments(in, ones);
    std::vector<double> frob_w, diag_w, frob_s, tr_sq;
    frob_w.reserve(trials);
    for (int t = 0; t < trials; ++t) {
      auto rng = substream(104, t);
      const auto data = sample(spec, chol, n, rng);
      const auto s = scm(data);
      frob_w.push_back(frob_norm_sq(hadamard(w.W, s.S)));
      diag_w.push_back(diag_quadratic(w.W, RealVector(s.S.diagonal())));
      frob_s.push_back(frob_norm_sq(s.S));
      const double tr = s.S.trace();
      tr_sq.push_back(tr * tr);
    }
    INFO(tag);
    check_within_se(mean_se(frob_w), mw.e_frob_w_s, 4.0, "E||W o S||^2");
    check_within_se(mean_se(diag_w), mw.e_diag_w_s, 4.0, "E tr((D_S W)^2)");
    check_within_se(mean_se(frob_s), mo.e_frob_w_s, 4.0, "E||S||^2");
    check_within_se(mean_se(tr_sq), mo.e_tr_s_sq, 4.0, "E tr(S)^2");
  };

  SUBCASE("real gaussian, kappa = 0") {
    SamplingSpec spec;
    spec.mean = SamplingSpec::MeanMode::RandomGaussian;
    run_real(spec, 0.0, "gaussian");
  }
  SUBCASE("real t with nu = 5, kappa = 2") {
    SamplingSpec spec;
    spec.dist = SamplingSpec::Dist::MVT;
    spec.nu = 5.0;
    spec.mean = SamplingSpec::MeanMode::RandomGaussian;
    run_real(spec, 2.0, "mvt");
  }
  SUBCASE("circular complex gaussian") {
    const ComplexMatrix csigma = fixed_hpd(p, 8);
    OracleInputs<Complex> in{csigma, 0.0, n, DataRegime::ComplexUnknownMean};
    const auto mw = tapered_scm_moments(in, w);
    std::vector<double> frob_w, diag_w;
    for (int t = 0; t < trials; ++t) {
      auto rng = substream(105, t);
      auto data = sample_complex_gaussian(csigma, n, rng);
      data.mean_known = false;  // exercise the sample-mean path
      const auto s = scm(data);
      frob_w.push_back(frob_norm_sq(hadamard(w.W, s.S)));
      diag_w.push_back(diag_quadratic(w.W, RealVector(s.S.diagonal().real())));
    }
    check_within_se(mean_se(frob_w), mw.e_frob_w_s, 4.0, "complex E||W o S||^2");
    check_within_se(mean_se(diag_w), mw.e_diag_w_s, 4.0, "complex E tr((D_S W)^2)");
  }
}

TEST_CASE("unbiased tapered-norm estimator, Monte Carlo") {
  const int p = 5, n = 10, trials = 30000;
  const auto w = banding_template(p, 2);

  auto vartheta = [&](const auto& s, DataRegime regime, double kappa) {
    const double an = unbiased_a_n(regime, kappa, n);
    const double bn = unbiased_b_n(regime, kappa, n);
    return bn * (frob_norm_sq(hadamard(w.W, s.S)) / p -
                 an * diag_quadratic(w.W, real_diagonal(s.S)) / p);
  };

  SUBCASE("real gaussian and t data") {
    const RealMatrix sigma = fixed_spd(p, 7);
    const CholeskyFactor chol(sigma);
    const double truth = frob_norm_sq(hadamard(w.W, sigma)) / p;
    for (double kappa : {0.0, 2.0}) {
      SamplingSpec spec;
      if (kappa > 0.0) {
        spec.dist = SamplingSpec::Dist::MVT;
        spec.nu = 5.0;
      }
      spec.mean = SamplingSpec::MeanMode::RandomGaussian;
      std::vector<double> est;
      est.reserve(trials);
      for (int t = 0; t < trials; ++t) {
        auto rng = substream(106, t);
        est.push_back(vartheta(scm(sample(spec, chol, n, rng)),
                               DataRegime::RealUnknownMean, kappa));
      }
      check_within_se(mean_se(est), truth, 4.0, "real vartheta");
    }
  }
  SUBCASE("circular complex gaussian") {
    const ComplexMatrix sigma = fixed_hpd(p, 8);
    const double truth = frob_norm_sq(hadamard(w.W, sigma)) / p;
    std::vector<double> est;
    est.reserve(trials);
    for (int t = 0; t < trials; ++t) {
      auto rng = substream(107, t);
      auto data = sample_complex_gaussian(sigma, n, rng);
      data.mean_known = false;
      est.push_back(vartheta(scm(data), DataRegime::ComplexUnknownMean, 0.0));
    }
    check_within_se(mean_se(est), truth, 4.0, "complex vartheta");
  }
}

TEST_CASE("Ell1 sphericity is nearly unbiased at spherical truth") {
  const int p = 50, n = 20, trials = 10000;
  const auto w = banding_template(p, 3);
  const CholeskyFactor chol(RealMatrix::Identity(p, p));
  std::vector<double> gammas;
  gammas.reserve(trials);
  for (int t = 0; t < trials; ++t) {
    auto rng = substream(108, t);
    auto data = sample(SamplingSpec{}, chol, n, rng);
    data.mean_known = true;
    gammas.push_back(ell1_sphericity(sscm(data), w).gamma_hat);
  }
  const double mean = mean_se(gammas).mean;
  CHECK(mean >= 0.95);
  CHECK(mean <= 1.10);
}

TEST_CASE("Ell1 centering choice shifts the estimate only within noise") {
  const int p = 20, n = 40, trials = 1000;
  const RealMatrix sigma = fixed_spd(p, 15);
  const CholeskyFactor chol(sigma);
  std::vector<double> known, unknown;
  for (int t = 0; t < trials; ++t) {
    auto rng = substream(109, t);
    auto data = sample(SamplingSpec{}, chol, n, rng);  // zero-mean draws
    data.mean_known = true;
    known.push_back(ell1_sphericity(sscm(data), all_ones_template(p)).gamma_hat);
    data.mean_known = false;
    unknown.push_back(ell1_sphericity(sscm(data), all_ones_template(p)).gamma_hat);
  }
  CHECK(std::abs(mean_se(known).mean - mean_se(unknown).mean) <= 0.05);
}

TEST_CASE("campaign self-calibration: SCM NMSE matches its theoretical value") {
  CampaignConfig config;
  config.model = {CovModel::Kind::AR1, 12, 0.5, 0.0};
  config.sampling.mean = SamplingSpec::MeanMode::RandomGaussian;
  config.sample_sizes = {15};
  config.trials = 4000;
  config.seed = 110;
  config.estimators.push_back({EstimatorSpec::Kind::Scm, "scm", {}, 0.0, 1});
  const auto reports = run_campaign(config);
  const RealMatrix sigma = build_cov(config.model);
  OracleInputs<double> in{sigma, 0.0, 15, DataRegime::RealUnknownMean};
  const auto m = tapered_scm_moments(in, all_ones_template(12));
  const double theory = (m.e_frob_w_s - frob_norm_sq(sigma)) / frob_norm_sq(sigma);
  const auto& cell = reports[0].cells[0];
  INFO("mean=", cell.nmse_mean, " theory=", theory, " se=", cell.nmse_se);
  CHECK(std::abs(cell.nmse_mean - theory) <= 4.0 * cell.nmse_se);
}

TEST_CASE("selection beats the all-ones special case on banded truth") {
  const int p = 60, n = 40, trials = 200;
  const CholeskyFactor chol(build_cov({CovModel::Kind::AR1, p, 0.4, 0.0}));
  const RealMatrix sigma = build_cov({CovModel::Kind::AR1, p, 0.4, 0.0});
  const auto family = make_family(TemplateKind::Banding, p, default_bandwidths(p));
  SamplingSpec spec;
  spec.mean = SamplingSpec::MeanMode::RandomGaussian;
  double tab = 0.0, rscm = 0.0;
  for (int t = 0; t < trials; ++t) {
    auto rng = substream(113, t);
    const auto data = sample(spec, chol, n, rng);
    tab += frob_norm_sq(RealMatrix(tabasco_estimate(data, family).Sigma_hat - sigma));
    rscm += frob_norm_sq(RealMatrix(rscm_special_case(data).Sigma_hat - sigma));
  }
  CHECK(tab < rscm);
}

TEST_CASE("bandwidth selection concentrates near 3 for AR(1) rho = 0.4") {
  const int p = 100, n = 50, trials = 300;
  const RealMatrix sigma = build_cov({CovModel::Kind::AR1, p, 0.4, 0.0});
  const CholeskyFactor chol(sigma);
  const auto family = make_family(TemplateKind::Banding, p, default_bandwidths(p));
  SamplingSpec spec;
  spec.mean = SamplingSpec::MeanMode::RandomGaussian;
  std::map<double, int> counts;
  for (int t = 0; t < trials; ++t) {
    auto rng = substream(112, t);
    counts[tabasco_estimate(sample(spec, chol, n, rng), family).chosen.index_value]++;
  }
  auto modal = counts.begin();
  for (auto it = counts.begin(); it != counts.end(); ++it)
    if (it->second > modal->second) modal = it;
  CHECK(modal->first >= 2.0);
  CHECK(modal->first <= 4.0);
}

TEST_CASE("MVT rescaling yields the requested covariance") {
  const RealMatrix sigma = fixed_spd(4, 21);
  const CholeskyFactor chol(sigma);
  SamplingSpec spec;
  spec.dist = SamplingSpec::Dist::MVT;
  spec.nu = 5.0;
  auto rng = substream(111, 0);
  const auto data = sample(spec, chol, 200000, rng);
  const auto s = scm(data);
  CHECK((s.S - sigma).cwiseAbs().maxCoeff() / sigma.cwiseAbs().maxCoeff() <= 0.05);
}
