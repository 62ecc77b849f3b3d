#pragma once

#include "tabasco/regime.hpp"
#include "tabasco/templates.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace tabasco {

struct InternalConsistencyError : std::logic_error {
  using std::logic_error::logic_error;
};

/// Ground-truth inputs: the population covariance, kurtosis and sample size.
/// kappa is given, never estimated, in this module.
template <typename Scalar>
struct OracleInputs {
  Matrix<Scalar> Sigma;
  double kappa = 0.0;
  int n = 0;
  DataRegime regime = DataRegime::RealUnknownMean;

  void validate() const {
    if (Sigma.rows() != Sigma.cols()) throw DimensionError("OracleInputs: Sigma must be square");
    if (n < 2) throw std::invalid_argument("OracleInputs: n must be >= 2");
    if (is_complex_regime(regime) != is_complex_v<Scalar>)
      throw RegimeError("OracleInputs: regime does not match the scalar type");
    const int p = static_cast<int>(Sigma.rows());
    if (kappa < kappa_lower_bound(regime, p))
      throw std::invalid_argument("OracleInputs: kappa below its theoretical lower bound");
  }
};

struct TaperedMoments {
  double e_frob_w_s = 0.0;  // E || W o S ||_F^2
  double e_diag_w_s = 0.0;  // E tr((D_S W)^2)
  double e_tr_s_sq = 0.0;   // E tr(S)^2
};

/// Exact second-order moments of the tapered SCM under an elliptical
/// population with the given kurtosis.
template <typename Scalar>
TaperedMoments tapered_scm_moments(const OracleInputs<Scalar>& in, const TaperTemplate& w) {
  in.validate();
  if (w.dim() != in.Sigma.rows())
    throw DimensionError("tapered_scm_moments: template dimension mismatch");
  const auto [t1, t2] = tau_pair(in.regime, in.kappa, in.n);
  const double c = diag_moment_factor(in.regime);
  const double fw = frob_norm_sq(hadamard(w.W, in.Sigma));
  const double dq = diag_quadratic(w.W, real_diagonal(in.Sigma));
  const double fs = frob_norm_sq(in.Sigma);
  const double tr = trace_real(in.Sigma);
  TaperedMoments m;
  m.e_frob_w_s = is_complex_regime(in.regime) ? (1.0 + t2) * fw + t1 * dq
                                              : (1.0 + t1 + t2) * fw + t1 * dq;
  m.e_diag_w_s = c * t1 * fw + (1.0 + t2) * dq;
  m.e_tr_s_sq = c * t1 * fs + (1.0 + t2) * tr * tr;
  return m;
}

struct OracleBeta {
  double beta_o = 0.0;
  double mse_opt = 0.0;
};

namespace detail {

inline void check_close(double a, double b, double tol, const char* what) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  if (std::abs(a - b) > tol * scale) throw InternalConsistencyError(what);
}

template <typename Scalar>
struct OracleScalars {
  double p, eta, gamma, gamma_w, gamma_v, frob_sigma, frob_v_sigma, num_dist;
  TaperedMoments m;
};

template <typename Scalar>
OracleScalars<Scalar> oracle_scalars(const OracleInputs<Scalar>& in, const TaperTemplate& w) {
  OracleScalars<Scalar> s;
  const Eigen::Index p = in.Sigma.rows();
  s.p = static_cast<double>(p);
  s.eta = trace_real(in.Sigma) / s.p;
  s.frob_sigma = frob_norm_sq(in.Sigma);
  s.frob_v_sigma = frob_norm_sq(hadamard(w.V, in.Sigma));
  s.gamma = s.frob_sigma / (s.p * s.eta * s.eta);
  s.gamma_w = frob_norm_sq(hadamard(w.W, in.Sigma)) / (s.p * s.eta * s.eta);
  s.gamma_v = s.frob_v_sigma / (s.p * s.eta * s.eta);
  Matrix<Scalar> dist = hadamard(w.V, in.Sigma);
  dist.diagonal().array() -= Scalar(s.eta);
  s.num_dist = frob_norm_sq(dist);
  s.m = tapered_scm_moments(in, w);
  return s;
}

}  // namespace detail

/// Stationary point of the quadratic risk and the MSE it attains, computed
/// through three algebraically equivalent routes that are cross-checked to
/// 1e-10 relative; violations signal a formula bug and throw.
///
/// For 0/1 templates the stationary point provably lies in [0,1] and this is
/// asserted. Fractional tapers can push it above 1 (with W strictly between
/// 0 and 1 off-diagonal, ||V o Sigma||^2 exceeds ||W o Sigma||^2 by an O(1)
/// margin that dominates the variance terms at large n), so only
/// nonnegativity is asserted for them.
template <typename Scalar>
OracleBeta oracle_beta(const OracleInputs<Scalar>& in, const TaperTemplate& w) {
  const auto s = detail::oracle_scalars(in, w);
  const double p = s.p, eta = s.eta;

  // distance form: E||W o S - eta_hat I||^2 expanded term by term
  const double denom14 = s.m.e_frob_w_s - 2.0 * s.m.e_tr_s_sq / p + s.m.e_tr_s_sq / p;
  const double expr14 = s.num_dist / denom14;

  // sphericity form
  const double expr15 = p * (s.gamma_v - 1.0) * eta * eta / (s.m.e_frob_w_s - s.m.e_tr_s_sq / p);

  // normalized form through the tapered-SCM MSE
  const double mse_taper = s.m.e_frob_w_s + s.frob_sigma - 2.0 * s.frob_v_sigma;
  const double nmse_taper = mse_taper / s.frob_sigma;
  const double e_eta_hat_sq = s.m.e_tr_s_sq / (p * p);
  const double expr16 = (s.gamma_v - 1.0) / (s.gamma * nmse_taper + 2.0 * s.gamma_v - s.gamma -
                                             e_eta_hat_sq / (eta * eta));

  detail::check_close(expr14, expr15, 1e-10, "oracle_beta: distance and sphericity forms differ");
  detail::check_close(expr15, expr16, 1e-10, "oracle_beta: sphericity and NMSE forms differ");
  if (expr15 < -1e-12 || (w.zero_one && expr15 > 1.0 + 1e-12))
    throw InternalConsistencyError("oracle_beta: beta_o outside its guaranteed range");

  OracleBeta out;
  out.beta_o = expr15;
  out.mse_opt = (s.m.e_tr_s_sq - p * p * eta * eta) / p + s.frob_sigma - s.frob_v_sigma +
                (1.0 - out.beta_o) * s.num_dist;
  return out;
}

struct OracleCurve {
  double index_value = 0.0;
  std::vector<double> betas;
  std::vector<double> values;  // L(beta), exact quadratic
  double beta_opt = 0.0;
  double mse_opt = 0.0;
};

/// Quadratic risk curve L(beta) = beta^2 a1 + (1-beta)^2 a2 + 2beta(1-beta) a3.
template <typename Scalar>
OracleCurve oracle_L_curve(const OracleInputs<Scalar>& in, const TaperTemplate& w,
                           const std::vector<double>& beta_grid) {
  if (beta_grid.empty()) throw std::invalid_argument("oracle_L_curve: empty grid");
  const auto s = detail::oracle_scalars(in, w);
  const double p = s.p, eta = s.eta;
  const double a3_tilde = s.m.e_tr_s_sq / p - eta * eta * p;
  const double a1 = s.m.e_frob_w_s + s.frob_sigma - 2.0 * s.frob_v_sigma;
  const double a2 = a3_tilde + s.frob_sigma - p * eta * eta;
  const double a3 = s.frob_sigma - s.frob_v_sigma + a3_tilde;
  OracleCurve curve;
  curve.index_value = w.index_value;
  curve.betas = beta_grid;
  curve.values.reserve(beta_grid.size());
  for (double b : beta_grid)
    curve.values.push_back(b * b * a1 + (1.0 - b) * (1.0 - b) * a2 + 2.0 * b * (1.0 - b) * a3);
  curve.beta_opt = (a2 - a3) / ((a1 - a3) + (a2 - a3));
  curve.mse_opt = curve.beta_opt * curve.beta_opt * a1 +
                  (1.0 - curve.beta_opt) * (1.0 - curve.beta_opt) * a2 +
                  2.0 * curve.beta_opt * (1.0 - curve.beta_opt) * a3;
  return curve;
}

/// Index minimizing the oracle MSE, computed both through the
/// beta_o(k)(1 - gamma_V(k)) criterion and by direct MSE comparison; the two
/// argmins must coincide exactly.
template <typename Scalar>
std::size_t oracle_k(const OracleInputs<Scalar>& in, const TemplateFamily& family) {
  if (family.size() == 0) throw std::invalid_argument("oracle_k: empty family");
  std::size_t best_obj = 0, best_mse = 0;
  double obj_min = std::numeric_limits<double>::infinity();
  double mse_min = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < family.size(); ++k) {
    const auto s = detail::oracle_scalars(in, family[k]);
    const OracleBeta ob = oracle_beta(in, family[k]);
    const double obj = ob.beta_o * (1.0 - s.gamma_v);
    if (obj < obj_min) {
      obj_min = obj;
      best_obj = k;
    }
    if (ob.mse_opt < mse_min) {
      mse_min = ob.mse_opt;
      best_mse = k;
    }
  }
  if (best_obj != best_mse)
    throw InternalConsistencyError("oracle_k: criterion and direct-MSE argmins differ");
  return best_obj;
}

}  // namespace tabasco
