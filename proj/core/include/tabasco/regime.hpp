#pragma once

#include "tabasco/matrix.hpp"

#include <stdexcept>

namespace tabasco {

enum class DataRegime { RealUnknownMean, RealKnownMean, ComplexUnknownMean, ComplexKnownMean };

struct RegimeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <typename Scalar>
DataRegime regime_of(const SampleSet<Scalar>& data) {
  if constexpr (is_complex_v<Scalar>)
    return data.mean_known ? DataRegime::ComplexKnownMean : DataRegime::ComplexUnknownMean;
  else
    return data.mean_known ? DataRegime::RealKnownMean : DataRegime::RealUnknownMean;
}

inline bool is_complex_regime(DataRegime r) {
  return r == DataRegime::ComplexUnknownMean || r == DataRegime::ComplexKnownMean;
}
inline bool is_known_mean(DataRegime r) {
  return r == DataRegime::RealKnownMean || r == DataRegime::ComplexKnownMean;
}

/// Finite-sample constants of the SCM second-order moments. They depend on
/// the sampling distribution only through the elliptical kurtosis kappa.
struct TauPair {
  double tau1;
  double tau2;
};

inline TauPair tau_pair(DataRegime regime, double kappa, int n) {
  if (n < 2) throw std::invalid_argument("tau_pair: n must be >= 2");
  const double nd = n;
  if (is_known_mean(regime)) return {(1.0 + kappa) / nd, kappa / nd};
  return {1.0 / (nd - 1.0) + kappa / nd, kappa / nd};
}

/// Multiplier of the diagonal cross term in the covariance of vec(S):
/// 2 in the real case, 1 in the circular complex case.
inline double diag_moment_factor(DataRegime regime) {
  return is_complex_regime(regime) ? 1.0 : 2.0;
}

inline double kappa_lower_bound(DataRegime regime, int p) {
  return is_complex_regime(regime) ? -1.0 / (p + 1.0) : -2.0 / (p + 2.0);
}

/// Bias-correction constants of the unbiased tapered-norm estimator.
/// a_n = tau1/(1+tau2) in every regime; b_n follows from requiring exact
/// unbiasedness given the regime's moment identities.
inline double unbiased_a_n(DataRegime regime, double kappa, int n) {
  const auto [t1, t2] = tau_pair(regime, kappa, n);
  return t1 / (1.0 + t2);
}

inline double unbiased_b_n(DataRegime regime, double kappa, int n) {
  const auto [t1, t2] = tau_pair(regime, kappa, n);
  const double an = t1 / (1.0 + t2);
  const double inv = is_complex_regime(regime) ? (1.0 + t2) - t1 * an
                                               : (1.0 + t1 + t2) - 2.0 * t1 * an;
  if (!(inv > 0.0))
    throw RegimeError("unbiased_b_n: nonpositive denominator; kappa too extreme for this n");
  return 1.0 / inv;
}

}  // namespace tabasco
