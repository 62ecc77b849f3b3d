#pragma once

#include "tabasco/sphericity.hpp"

#include <limits>
#include <optional>
#include <vector>

namespace tabasco {

/// Scalar statistics feeding the shrinkage-coefficient formula: one global
/// set (eta, kappa, gamma) plus one record per family member.
struct EllipticalSummary {
  double eta_hat = 0.0;
  double kappa_hat = 0.0;
  double gamma_hat = 1.0;
  struct PerTemplate {
    double index_value = 0.0;
    double theta_hat = 0.0;
    double gamma_w = 1.0;
    double gamma_v = 1.0;
  };
  std::vector<PerTemplate> per_template;
  int n = 0;
  int p = 0;
  DataRegime regime = DataRegime::RealUnknownMean;
};

struct BetaPlugin {
  double beta = 0.0;
  bool denominator_warning = false;  // nonpositive denominator forced beta to 0
};

/// Closed-form MMSE shrinkage coefficient for family member k, clamped to
/// [0,1]. The (n/(n-1)) factor is dropped when the mean is known.
inline BetaPlugin beta_plugin(const EllipticalSummary& s, std::size_t k) {
  const auto& rec = s.per_template.at(k);
  const double n = s.n;
  const double p = s.p;
  const double r = rec.theta_hat / (s.eta_hat * s.eta_hat);
  const double t = n * (rec.gamma_v - 1.0);
  const double mean_factor = is_known_mean(s.regime) ? 1.0 : n / (n - 1.0);
  double denom;
  if (is_complex_regime(s.regime)) {
    denom = t + mean_factor * (r - 2.0 * s.gamma_hat / p) +
            s.kappa_hat * (r - 1.0 + rec.gamma_w - 2.0 * s.gamma_hat / p);
  } else {
    denom = t + mean_factor * (r + rec.gamma_w - 2.0 * s.gamma_hat / p) +
            s.kappa_hat * (r - 1.0 + 2.0 * rec.gamma_w - 2.0 * s.gamma_hat / p);
  }
  BetaPlugin out;
  if (!(denom > 0.0)) {
    out.denominator_warning = true;
    return out;
  }
  out.beta = std::min(1.0, std::max(0.0, t / denom));
  return out;
}

struct ShrinkageSelection {
  std::size_t chosen_index = 0;
  double beta_hat = 0.0;
  std::vector<double> objective;   // beta_hat(k) * (1 - gamma_v(k)), <= 0
  std::vector<double> per_k_beta;
  bool denominator_warning = false;
};

/// Evaluates every member's coefficient and picks the objective argmin;
/// ties break toward the smallest index.
inline ShrinkageSelection select_k(const EllipticalSummary& s) {
  if (s.per_template.empty())
    throw std::invalid_argument("select_k: summary has no template records");
  ShrinkageSelection sel;
  sel.per_k_beta.reserve(s.per_template.size());
  sel.objective.reserve(s.per_template.size());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < s.per_template.size(); ++k) {
    const BetaPlugin b = beta_plugin(s, k);
    sel.denominator_warning |= b.denominator_warning;
    const double obj = b.beta * (1.0 - s.per_template[k].gamma_v);
    sel.per_k_beta.push_back(b.beta);
    sel.objective.push_back(obj);
    if (obj < best) {
      best = obj;
      sel.chosen_index = k;
    }
  }
  sel.beta_hat = sel.per_k_beta[sel.chosen_index];
  return sel;
}

struct TabascoOptions {
  SphericityMethod sphericity = SphericityMethod::Ell1;
  bool gaussian_kappa_zero = false;  // assume MVN: kappa = 0
  std::optional<double> force_beta;
  std::optional<std::size_t> force_index;  // position in the family
  double median_tol = 1e-8;
  int median_max_iter = 1000;
};

template <typename Scalar>
struct TabascoEstimate {
  Matrix<Scalar> Sigma_hat;
  ShrinkageSelection selection;
  TaperTemplate chosen;
  double eta_hat = 0.0;
  EllipticalSummary summary;
  bool heuristic_regime = false;  // complex known-mean coefficients
};

/// Full pipeline: shared statistics once, per-template statistics, index
/// selection, then Sigma_hat = beta (W o S) + (1 - beta) eta I.
template <typename Scalar>
TabascoEstimate<Scalar> tabasco_estimate(const SampleSet<Scalar>& data, const TemplateFamily& family,
                                const TabascoOptions& options = {}) {
  data.validate();
  if (family.size() == 0) throw std::invalid_argument("tabasco: empty template family");
  if (family.dim() != data.p()) throw DimensionError("tabasco: family dimension mismatch");

  const ScmResult<Scalar> s = scm(data);
  const double tr_s = trace_real(s.S);
  if (!(tr_s > 0.0)) throw DegenerateDataError("tabasco: tr(S) must be positive");

  EllipticalSummary summary;
  summary.n = static_cast<int>(data.n());
  summary.p = static_cast<int>(data.p());
  summary.regime = regime_of(data);
  summary.eta_hat = tr_s / static_cast<double>(data.p());
  summary.kappa_hat =
      options.gaussian_kappa_zero ? 0.0 : kurtosis_estimate(data).kappa_hat;

  const SphericityBundle bundle =
      sphericity_bundle(data, family, options.sphericity, summary.kappa_hat,
                        options.median_tol, options.median_max_iter);
  summary.gamma_hat = bundle.gamma_hat;
  const RealVector d_s = real_diagonal(s.S);
  summary.per_template.reserve(family.size());
  for (std::size_t k = 0; k < family.size(); ++k) {
    EllipticalSummary::PerTemplate rec;
    rec.index_value = family[k].index_value;
    rec.theta_hat = diag_quadratic(family[k].W, d_s) / static_cast<double>(data.p());
    rec.gamma_w = bundle.per_template[k].gamma_w;
    rec.gamma_v = bundle.per_template[k].gamma_v;
    summary.per_template.push_back(rec);
  }

  ShrinkageSelection sel = select_k(summary);
  if (options.force_index) {
    sel.chosen_index = *options.force_index;
    if (sel.chosen_index >= family.size())
      throw std::invalid_argument("tabasco: forced index out of range");
    sel.beta_hat = sel.per_k_beta[sel.chosen_index];
  }
  if (options.force_beta) {
    if (*options.force_beta < 0.0 || *options.force_beta > 1.0)
      throw std::invalid_argument("tabasco: forced beta must lie in [0,1]");
    sel.beta_hat = *options.force_beta;
  }

  TabascoEstimate<Scalar> est;
  est.heuristic_regime = summary.regime == DataRegime::ComplexKnownMean;
  est.chosen = family[sel.chosen_index];
  est.eta_hat = summary.eta_hat;
  const double beta = sel.beta_hat;
  est.Sigma_hat = beta * hadamard(est.chosen.W, s.S);
  est.Sigma_hat.diagonal().array() += Scalar((1.0 - beta) * summary.eta_hat);
  est.selection = std::move(sel);
  est.summary = std::move(summary);
  return est;
}

/// The all-ones-template special case (shrinkage of the plain SCM); runs the
/// identical code path with a singleton family.
template <typename Scalar>
TabascoEstimate<Scalar> rscm_special_case(const SampleSet<Scalar>& data,
                                          const TabascoOptions& options = {}) {
  TemplateFamily fam = make_family({all_ones_template(static_cast<int>(data.p()))});
  return tabasco_estimate(data, fam, options);
}

}  // namespace tabasco
