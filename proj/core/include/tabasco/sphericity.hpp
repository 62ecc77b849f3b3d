#pragma once

#include "tabasco/moments.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace tabasco {

enum class SphericityMethod { Ell1, Ell2 };

struct SphericityEstimate {
  double gamma_hat = 1.0;  // clamped to [1, p]
  double raw_value = 1.0;  // pre-clamp, kept for diagnostics
  SphericityMethod method = SphericityMethod::Ell1;
  std::string template_label;
};

namespace detail {

inline double clamp_gamma(double raw, Eigen::Index p) {
  return std::min(static_cast<double>(p), std::max(1.0, raw));
}

}  // namespace detail

/// Sign-based sphericity of W o Sigma: robust, asymptotically unbiased in p.
template <typename Scalar>
SphericityEstimate ell1_sphericity(const SscmResult<Scalar>& lambda, const RealMatrix& w,
                                   Eigen::Index n, std::string label = {}) {
  if (n < 2) throw std::invalid_argument("ell1_sphericity: need n >= 2");
  const Eigen::Index p = lambda.Lambda.rows();
  if (w.rows() != p || w.cols() != p)
    throw DimensionError("ell1_sphericity: template dimension mismatch");
  const double nd = static_cast<double>(n);
  const double pd = static_cast<double>(p);
  const double frob = frob_norm_sq(hadamard(w, lambda.Lambda));
  const double diag = diag_quadratic(w, real_diagonal(lambda.Lambda));
  const double raw = nd / (nd - 1.0) * (frob / pd - diag / (nd * pd));
  SphericityEstimate est;
  est.raw_value = raw;
  est.gamma_hat = detail::clamp_gamma(raw, p);
  est.method = SphericityMethod::Ell1;
  est.template_label = std::move(label);
  return est;
}

template <typename Scalar>
SphericityEstimate ell1_sphericity(const SscmResult<Scalar>& lambda, const TaperTemplate& w) {
  return ell1_sphericity(lambda, w.W, lambda.effective_n, w.label);
}

/// Moment-based sphericity of W o Sigma built on the unbiased tapered-norm
/// estimator; preferred over Ell1 for near-Gaussian data.
template <typename Scalar>
SphericityEstimate ell2_sphericity(const ScmResult<Scalar>& s, const RealMatrix& w,
                                   double kappa_hat, DataRegime regime, std::string label = {}) {
  const Eigen::Index p = s.S.rows();
  if (w.rows() != p || w.cols() != p)
    throw DimensionError("ell2_sphericity: template dimension mismatch");
  if (regime == DataRegime::ComplexKnownMean)
    throw RegimeError(
        "ell2_sphericity: bias-correction constants are not available for "
        "complex known-mean data; use Ell1");
  const int n = static_cast<int>(is_known_mean(regime) ? s.denominator : s.denominator + 1);
  if (n < 3) throw RegimeError("ell2_sphericity: need n >= 3");
  const double tr = trace_real(s.S);
  if (!(tr > 0.0)) throw DegenerateDataError("ell2_sphericity: tr(S) must be positive");
  const double an = unbiased_a_n(regime, kappa_hat, n);
  const double bn = unbiased_b_n(regime, kappa_hat, n);
  const double pd = static_cast<double>(p);
  const double frob = frob_norm_sq(hadamard(w, s.S));
  const double diag = diag_quadratic(w, real_diagonal(s.S));
  const double raw = pd * bn * (frob / (tr * tr) - an * diag / (tr * tr));
  SphericityEstimate est;
  est.raw_value = raw;
  est.gamma_hat = detail::clamp_gamma(raw, p);
  est.method = SphericityMethod::Ell2;
  est.template_label = std::move(label);
  return est;
}

template <typename Scalar>
SphericityEstimate ell2_sphericity(const ScmResult<Scalar>& s, const TaperTemplate& w,
                                   double kappa_hat, DataRegime regime) {
  return ell2_sphericity(s, w.W, kappa_hat, regime, w.label);
}

struct SphericityBundle {
  double gamma_hat = 1.0;  // W = all-ones
  struct PerTemplate {
    double index_value;
    double gamma_w;
    double gamma_v;
  };
  std::vector<PerTemplate> per_template;
};

/// Evaluates gamma, gamma_W(k) and gamma_V(k) over a family with one pass.
/// For 0/1 templates V = W, so gamma_V is copied rather than recomputed.
template <typename Scalar>
SphericityBundle sphericity_bundle(const SampleSet<Scalar>& data, const TemplateFamily& family,
                                   SphericityMethod method, double kappa_hat,
                                   double median_tol = 1e-8, int median_max_iter = 1000) {
  data.validate();
  if (family.dim() != data.p())
    throw DimensionError("sphericity_bundle: family dimension mismatch");
  const DataRegime regime = regime_of(data);
  const RealMatrix ones = RealMatrix::Ones(data.p(), data.p());

  SscmResult<Scalar> lambda;
  ScmResult<Scalar> s;
  if (method == SphericityMethod::Ell1)
    lambda = sscm(data, median_tol, median_max_iter);
  else
    s = scm(data);

  auto eval = [&](const RealMatrix& w, const std::string& label) {
    return method == SphericityMethod::Ell1
               ? ell1_sphericity(lambda, w, lambda.effective_n, label)
               : ell2_sphericity(s, w, kappa_hat, regime, label);
  };

  SphericityBundle bundle;
  bundle.gamma_hat = eval(ones, "ones").gamma_hat;
  bundle.per_template.reserve(family.size());
  for (const auto& t : family.templates) {
    SphericityBundle::PerTemplate row{};
    row.index_value = t.index_value;
    row.gamma_w = eval(t.W, t.label).gamma_hat;
    row.gamma_v = t.zero_one ? row.gamma_w : eval(t.V, t.label + ":V").gamma_hat;
    bundle.per_template.push_back(row);
  }
  return bundle;
}

}  // namespace tabasco
