#include "tabasco/sphericity.hpp"

#include <doctest.h>

#include <random>

using namespace tabasco;

namespace {

RealMatrix gaussian_matrix(int n, int p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  RealMatrix x(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) x(i, j) = normal(rng);
  return x;
}

}  // namespace

TEST_CASE("ell1 with all-ones template reduces to the closed scalar form") {
  const int n = 25, p = 8;
  const auto lam = sscm(RealSamples{gaussian_matrix(n, p, 17), true});
  const auto est = ell1_sphericity(lam, all_ones_template(p));
  const double nd = static_cast<double>(lam.effective_n);
  const double closed =
      nd / (nd - 1.0) * (frob_norm_sq(lam.Lambda) / p - static_cast<double>(p) / nd);
  CHECK(est.raw_value == doctest::Approx(closed).epsilon(1e-12));
}

TEST_CASE("ell1 output is clamped to [1, p] and keeps the raw value") {
  // spherical signs with p > n push the raw statistic below one
  RealMatrix x(2, 4);
  x << 1, 0, 0, 0, 0, 1, 0, 0;
  const auto lam = sscm(RealSamples{x, true});
  const auto est = ell1_sphericity(lam, all_ones_template(4));
  CHECK(est.gamma_hat >= 1.0);
  CHECK(est.gamma_hat <= 4.0);
  CHECK(est.raw_value < est.gamma_hat);  // clamp actually engaged here
}

TEST_CASE("ell1 at a rank-one extreme clamps to p") {
  // all samples on one axis: Lambda = p e1 e1^T, gamma -> p
  RealMatrix x(30, 3);
  x.setZero();
  for (int i = 0; i < 30; ++i) x(i, 0) = (i % 2 == 0) ? 1.0 + i : -2.0 - i;
  const auto lam = sscm(RealSamples{x, true});
  const auto est = ell1_sphericity(lam, all_ones_template(3));
  CHECK(est.gamma_hat == doctest::Approx(3.0));
}

TEST_CASE("unbiased constants match their closed forms") {
  SUBCASE("real unknown mean, kappa = 0, n = 10") {
    CHECK(unbiased_a_n(DataRegime::RealUnknownMean, 0.0, 10) ==
          doctest::Approx(1.0 / 9.0).epsilon(1e-15));
    CHECK(unbiased_b_n(DataRegime::RealUnknownMean, 0.0, 10) ==
          doctest::Approx(810.0 / 880.0).epsilon(1e-15));
  }
  SUBCASE("real unknown mean, general kappa") {
    for (double kappa : {-0.2, 0.0, 0.7, 2.0}) {
      for (int n : {5, 12, 40}) {
        const double nd = n;
        const double a_closed = 1.0 / (nd + kappa) * (nd / (nd - 1.0) + kappa);
        const double b_closed = (kappa + nd) * (nd - 1.0) * (nd - 1.0) /
                                ((nd - 2.0) * (3.0 * kappa * (nd - 1.0) + nd * (nd + 1.0)));
        CHECK(unbiased_a_n(DataRegime::RealUnknownMean, kappa, n) ==
              doctest::Approx(a_closed).epsilon(1e-13));
        CHECK(unbiased_b_n(DataRegime::RealUnknownMean, kappa, n) ==
              doctest::Approx(b_closed).epsilon(1e-13));
      }
    }
  }
  SUBCASE("real known mean") {
    for (double kappa : {0.0, 1.0}) {
      for (int n : {6, 20}) {
        const double nd = n;
        CHECK(unbiased_a_n(DataRegime::RealKnownMean, kappa, n) ==
              doctest::Approx((1.0 + kappa) / (nd + kappa)).epsilon(1e-13));
        CHECK(unbiased_b_n(DataRegime::RealKnownMean, kappa, n) ==
              doctest::Approx(nd * (nd + kappa) / ((nd - 1.0) * (nd + 2.0 + 3.0 * kappa)))
                  .epsilon(1e-13));
      }
    }
  }
  SUBCASE("complex unknown mean") {
    for (double kappa : {0.0, 0.5, 1.5}) {
      for (int n : {6, 15, 50}) {
        const double nd = n;
        const double b_closed = (nd - 1.0) * (nd - 1.0) * (nd + kappa) /
                                ((nd - 2.0) * (nd * nd + 2.0 * kappa * (nd - 1.0)));
        CHECK(unbiased_b_n(DataRegime::ComplexUnknownMean, kappa, n) ==
              doctest::Approx(b_closed).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("ell2 rejects the complex known-mean regime") {
  ComplexMatrix z = gaussian_matrix(20, 4, 3).cast<Complex>();
  z += Complex(0, 1) * gaussian_matrix(20, 4, 4).cast<Complex>();
  const auto s = scm(ComplexSamples{z, true});
  CHECK_THROWS_AS(
      ell2_sphericity(s, all_ones_template(4), 0.0, DataRegime::ComplexKnownMean),
      RegimeError);
}

TEST_CASE("ell2 matches the large-n simplified form at Gaussian data") {
  const int n = 400, p = 10;
  const auto data = RealSamples{gaussian_matrix(n, p, 23), false};
  const auto s = scm(data);
  const auto w = banding_template(p, 3);
  const double kappa = 0.0;
  const auto est = ell2_sphericity(s, w, kappa, DataRegime::RealUnknownMean);
  const double tr2 = s.S.trace() * s.S.trace();
  const double simplified = p * frob_norm_sq(hadamard(w.W, s.S)) / tr2 -
                            (1.0 + kappa) * (static_cast<double>(p) / n) *
                                diag_quadratic(w.W, RealVector(s.S.diagonal())) / tr2;
  CHECK(est.raw_value == doctest::Approx(simplified).epsilon(0.02));
}

TEST_CASE("sphericity bundle") {
  const int n = 40, p = 12;
  const auto data = RealSamples{gaussian_matrix(n, p, 31), false};

  SUBCASE("banding family copies gamma_W into gamma_V") {
    const auto fam = make_family(TemplateKind::Banding, p, {1, 3, 5, 12});
    const auto bundle = sphericity_bundle(data, fam, SphericityMethod::Ell1, 0.0);
    REQUIRE(bundle.per_template.size() == 4);
    for (const auto& row : bundle.per_template) CHECK(row.gamma_w == row.gamma_v);
  }
  SUBCASE("the all-ones member reproduces the global gamma exactly") {
    const auto fam = make_family(TemplateKind::Banding, p, {2, 12});
    const auto bundle = sphericity_bundle(data, fam, SphericityMethod::Ell1, 0.0);
    CHECK(bundle.per_template.back().gamma_w == bundle.gamma_hat);
  }
  SUBCASE("minimax taper separates gamma_V from gamma_W") {
    const auto fam = make_family(TemplateKind::Minimax, p, {4});
    const auto bundle = sphericity_bundle(data, fam, SphericityMethod::Ell2, 0.0);
    CHECK(bundle.per_template[0].gamma_w != bundle.per_template[0].gamma_v);
  }
  SUBCASE("ell2 and ell1 agree on the clamp interval") {
    const auto fam = make_family(TemplateKind::Banding, p, {3});
    for (auto method : {SphericityMethod::Ell1, SphericityMethod::Ell2}) {
      const auto bundle = sphericity_bundle(data, fam, method, 0.0);
      CHECK(bundle.gamma_hat >= 1.0);
      CHECK(bundle.gamma_hat <= p);
      CHECK(bundle.per_template[0].gamma_w >= 1.0);
      CHECK(bundle.per_template[0].gamma_w <= p);
    }
  }
}
