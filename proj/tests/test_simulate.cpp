#include "tabasco/simulate.hpp"

#include <doctest.h>

#include <cmath>

using namespace tabasco;

TEST_CASE("covariance models") {
  SUBCASE("AR(1) entries") {
    const RealMatrix s = build_cov({CovModel::Kind::AR1, 5, 0.9, 0.0});
    CHECK(s(0, 2) == doctest::Approx(0.81).epsilon(1e-15));
    CHECK(s(3, 3) == 1.0);
    CHECK(build_cov({CovModel::Kind::AR1, 4, 0.0, 0.0}) == RealMatrix::Identity(4, 4));
    CHECK_THROWS(build_cov({CovModel::Kind::AR1, 4, 1.0, 0.0}));
  }
  SUBCASE("polynomial decay entries") {
    const RealMatrix s = build_cov({CovModel::Kind::PolyDecay, 5, 0.6, 0.1});
    CHECK(s(0, 2) == doctest::Approx(0.279909897461042).epsilon(1e-12));
    CHECK(s(0, 1) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK((s.diagonal().array() == 1.0).all());
  }
  SUBCASE("random permutation keeps the spectrum") {
    std::mt19937_64 rng(4);
    const RealMatrix s = build_cov({CovModel::Kind::AR1, 6, 0.5, 0.0});
    const RealMatrix sp = apply_random_permutation(s, rng);
    CHECK(sp.trace() == doctest::Approx(s.trace()));
    CHECK(frob_norm_sq(sp) == doctest::Approx(frob_norm_sq(s)));
  }
}

TEST_CASE("samplers") {
  const RealMatrix sigma = build_cov({CovModel::Kind::AR1, 4, 0.5, 0.0});
  const CholeskyFactor chol(sigma);

  SUBCASE("same substream, same draw") {
    SamplingSpec spec;
    auto r1 = substream(42, 7);
    auto r2 = substream(42, 7);
    CHECK(sample(spec, chol, 10, r1).data == sample(spec, chol, 10, r2).data);
  }
  SUBCASE("different streams differ") {
    SamplingSpec spec;
    auto r1 = substream(42, 7);
    auto r2 = substream(42, 8);
    CHECK(sample(spec, chol, 10, r1).data != sample(spec, chol, 10, r2).data);
  }
  SUBCASE("MVT needs nu > 2") {
    SamplingSpec spec;
    spec.dist = SamplingSpec::Dist::MVT;
    spec.nu = 2.0;
    auto rng = substream(1, 1);
    CHECK_THROWS(sample(spec, chol, 5, rng));
  }
  SUBCASE("random mean mode recenters around 10") {
    SamplingSpec spec;
    spec.mean = SamplingSpec::MeanMode::RandomGaussian;
    double acc = 0.0;
    const int reps = 50;
    for (int t = 0; t < reps; ++t) {
      auto rng = substream(5, t);
      acc += sample(spec, chol, 200, rng).data.mean();
    }
    CHECK(acc / reps == doctest::Approx(10.0).epsilon(0.03));
  }
  SUBCASE("non-SPD covariance is rejected") {
    RealMatrix bad = RealMatrix::Ones(3, 3);
    CHECK_THROWS(CholeskyFactor(bad));
  }
}

TEST_CASE("ledoit-wolf estimator") {
  SUBCASE("a spherical SCM shrinks fully to the target") {
    RealMatrix x(4, 2);
    x << 1, 0, -1, 0, 0, 1, 0, -1;  // S = (2/3) I exactly
    double beta = -1.0;
    const RealMatrix fit = lw_estimator(RealSamples{x, false}, &beta);
    CHECK(beta == 0.0);
    CHECK((fit - (2.0 / 3.0) * RealMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-15);
  }
  SUBCASE("large n pushes beta toward one") {
    const RealMatrix sigma = build_cov({CovModel::Kind::AR1, 3, 0.6, 0.0});
    auto rng = substream(9, 0);
    const auto data = sample(SamplingSpec{}, CholeskyFactor(sigma), 4000, rng);
    double beta = 0.0;
    lw_estimator(data, &beta);
    CHECK(beta >= 0.9);
  }
}

TEST_CASE("minimax-taper baseline") {
  CHECK(mnmx_taper_bandwidth(100, 0.1) == 8);
  CHECK(mnmx_taper_bandwidth(100, 0.3) == 5);
  SUBCASE("saturated bandwidth returns the SCM itself") {
    auto rng = substream(3, 0);
    const RealMatrix sigma = RealMatrix::Identity(4, 4);
    const auto data = sample(SamplingSpec{}, CholeskyFactor(sigma), 50, rng);
    const RealMatrix fit = mnmx_taper_estimator(data, 0.1);  // k* = 5 >= p = 4
    CHECK(fit == scm(data).S);
  }
}

TEST_CASE("campaign harness") {
  CampaignConfig config;
  config.model = {CovModel::Kind::AR1, 12, 0.5, 0.0};
  config.sampling.mean = SamplingSpec::MeanMode::RandomGaussian;
  config.sample_sizes = {20, 40};
  config.trials = 8;
  config.seed = 77;
  config.estimators.push_back({EstimatorSpec::Kind::Tabasco, "tabasco", {}, 0.0, 1});
  config.estimators.push_back({EstimatorSpec::Kind::Lwe, "lwe", {}, 0.0, 1});
  config.estimators.push_back({EstimatorSpec::Kind::TrueSigma, "truth", {}, 0.0, 1});

  SUBCASE("deterministic given the seed and independent of threading") {
    auto serial = config;
    serial.threads = 1;
    auto parallel = config;
    parallel.threads = 2;
    const auto a = run_campaign(serial);
    const auto b = run_campaign(parallel);
    REQUIRE(a.size() == b.size());
    for (std::size_t e = 0; e < a.size(); ++e) {
      REQUIRE(a[e].cells.size() == b[e].cells.size());
      for (std::size_t c = 0; c < a[e].cells.size(); ++c) {
        CHECK(a[e].cells[c].nmse_mean == b[e].cells[c].nmse_mean);
        CHECK(a[e].cells[c].nmse_se == b[e].cells[c].nmse_se);
      }
    }
  }
  SUBCASE("knowing the truth gives zero NMSE") {
    const auto reports = run_campaign(config);
    for (const auto& cell : reports[2].cells) {
      CHECK(cell.nmse_mean == 0.0);
      CHECK(cell.failures == 0);
    }
  }
  SUBCASE("reports carry beta means and modal bandwidths for tabasco") {
    const auto reports = run_campaign(config);
    for (const auto& cell : reports[0].cells) {
      CHECK(cell.beta_mean >= 0.0);
      CHECK(cell.beta_mean <= 1.0);
      CHECK(cell.k_mode >= 1.0);
    }
    CHECK(std::isnan(reports[2].cells[0].k_mode));
  }
  SUBCASE("permuted model reshuffles per trial deterministically") {
    config.model.kind = CovModel::Kind::PermutedAR1;
    config.trials = 4;
    const auto a = run_campaign(config);
    const auto b = run_campaign(config);
    CHECK(a[0].cells[0].nmse_mean == b[0].cells[0].nmse_mean);
  }
}
