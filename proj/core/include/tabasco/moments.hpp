#pragma once

#include "tabasco/matrix.hpp"
#include "tabasco/regime.hpp"
#include "tabasco/templates.hpp"

#include <cmath>
#include <stdexcept>

namespace tabasco {

struct DegenerateDataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <typename Scalar>
struct ScmResult {
  Matrix<Scalar> S;
  Vector<Scalar> mean;  // sample mean, or zero when the mean is known
  double denominator = 0.0;
};

namespace detail {

// sum_k conj(x_k) y_k in an order that depends only on the length, never on
// the operand addresses, so column permutations move results bit-exactly.
// Auto-vectorization must stay off: its alignment peeling reorders the sum.
template <typename Scalar>
#if defined(__GNUC__) && !defined(__clang__)
__attribute__((optimize("no-tree-vectorize")))
#endif
Scalar fixed_order_dot(const Scalar* x, const Scalar* y, Eigen::Index n) {
  Scalar acc0{}, acc1{}, acc2{}, acc3{};
  Eigen::Index k = 0;
  auto term = [](Scalar a, Scalar b) {
    if constexpr (is_complex_v<Scalar>)
      return std::conj(a) * b;
    else
      return a * b;
  };
  for (; k + 4 <= n; k += 4) {
    acc0 += term(x[k], y[k]);
    acc1 += term(x[k + 1], y[k + 1]);
    acc2 += term(x[k + 2], y[k + 2]);
    acc3 += term(x[k + 3], y[k + 3]);
  }
  for (; k < n; ++k) acc0 += term(x[k], y[k]);
  return (acc0 + acc1) + (acc2 + acc3);
}

template <typename Scalar>
#if defined(__GNUC__) && !defined(__clang__)
__attribute__((optimize("no-tree-vectorize")))
#endif
Scalar fixed_order_sum(const Scalar* x, Eigen::Index n) {
  Scalar acc0{}, acc1{}, acc2{}, acc3{};
  Eigen::Index k = 0;
  for (; k + 4 <= n; k += 4) {
    acc0 += x[k];
    acc1 += x[k + 1];
    acc2 += x[k + 2];
    acc3 += x[k + 3];
  }
  for (; k < n; ++k) acc0 += x[k];
  return (acc0 + acc1) + (acc2 + acc3);
}

template <typename Scalar>
Vector<Scalar> column_means(const Matrix<Scalar>& data) {
  Vector<Scalar> mu(data.cols());
  for (Eigen::Index j = 0; j < data.cols(); ++j)
    mu(j) = fixed_order_sum(data.col(j).data(), data.rows()) /
            Scalar(static_cast<double>(data.rows()));
  return mu;
}

// C^T conj(C) / denom through per-entry column dots; the upper triangle is
// the exact conjugate of the computed lower one.
template <typename Scalar>
Matrix<Scalar> scaled_gram(const Matrix<Scalar>& c, double denom) {
  const Eigen::Index p = c.cols();
  const Eigen::Index n = c.rows();
  Matrix<Scalar> s(p, p);
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) {
      const Scalar v =
          fixed_order_dot(c.col(j).data(), c.col(i).data(), n) / Scalar(denom);
      s(i, j) = v;
      if constexpr (is_complex_v<Scalar>)
        s(j, i) = std::conj(v);
      else
        s(j, i) = v;
    }
  return s;
}

}  // namespace detail

/// Sample covariance matrix: (n-1)-denominator about the sample mean, or
/// n-denominator about zero when the mean is known. Exactly Hermitian by
/// construction.
template <typename Scalar>
ScmResult<Scalar> scm(const SampleSet<Scalar>& data) {
  data.validate();
  const Eigen::Index n = data.n(), p = data.p();
  ScmResult<Scalar> out;
  Matrix<Scalar> centered;
  if (data.mean_known) {
    out.mean = Vector<Scalar>::Zero(p);
    out.denominator = static_cast<double>(n);
    centered = data.data;
  } else {
    out.mean = detail::column_means(data.data);
    out.denominator = static_cast<double>(n - 1);
    centered = data.data.rowwise() - out.mean.transpose();
  }
  out.S = detail::scaled_gram(centered, out.denominator);
  return out;
}

template <typename Scalar>
struct SpatialMedianResult {
  Vector<Scalar> center;
  int iterations = 0;
  bool converged = true;
};

/// Weiszfeld fixed point for argmin_mu sum_i ||x_i - mu||, with the usual
/// zero-distance guard (samples coinciding with the iterate are skipped).
template <typename Scalar>
SpatialMedianResult<Scalar> spatial_median(const SampleSet<Scalar>& data, double tol = 1e-8,
                                           int max_iter = 1000) {
  const Eigen::Index n = data.n();
  if (n < 1) throw DegenerateDataError("spatial_median: empty sample");
  SpatialMedianResult<Scalar> res;
  Vector<Scalar> mu = (data.data.colwise().sum() / Scalar(static_cast<double>(n))).transpose();
  for (int it = 1; it <= max_iter; ++it) {
    Vector<Scalar> num = Vector<Scalar>::Zero(data.p());
    double den = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = (data.data.row(i).transpose() - mu).norm();
      if (d == 0.0) continue;
      num += data.data.row(i).transpose() / Scalar(d);
      den += 1.0 / d;
    }
    if (den == 0.0) {  // every sample coincides with the iterate
      res.center = mu;
      res.iterations = it;
      return res;
    }
    Vector<Scalar> next = num / Scalar(den);
    const double step = (next - mu).norm();
    mu = std::move(next);
    if (step <= tol * (1.0 + mu.norm())) {
      res.center = mu;
      res.iterations = it;
      return res;
    }
  }
  res.center = mu;
  res.iterations = max_iter;
  res.converged = false;
  return res;
}

template <typename Scalar>
struct SscmResult {
  Matrix<Scalar> Lambda;
  Vector<Scalar> center;
  int iterations = 0;        // spatial median iterations (0 when mean known)
  Eigen::Index dropped = 0;  // zero-norm rows skipped after centering
  Eigen::Index effective_n = 0;
};

/// Scaled spatial sign covariance matrix, tr(Lambda) = p. Centers at the
/// spatial median unless the mean is known to be zero.
template <typename Scalar>
SscmResult<Scalar> sscm(const SampleSet<Scalar>& data, double median_tol = 1e-8,
                        int median_max_iter = 1000) {
  data.validate();
  const Eigen::Index n = data.n(), p = data.p();
  SscmResult<Scalar> out;
  if (data.mean_known) {
    out.center = Vector<Scalar>::Zero(p);
  } else {
    auto med = spatial_median(data, median_tol, median_max_iter);
    out.center = std::move(med.center);
    out.iterations = med.iterations;
  }
  Matrix<Scalar> signs(n, p);
  Eigen::Index kept = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector<Scalar> r = data.data.row(i).transpose() - out.center;
    const double d = r.norm();
    if (d == 0.0) {
      ++out.dropped;
      continue;
    }
    signs.row(kept++) = (r / Scalar(d)).transpose();
  }
  if (kept == 0) throw DegenerateDataError("sscm: all samples coincide with the center");
  out.effective_n = kept;
  out.Lambda = detail::scaled_gram(Matrix<Scalar>(signs.topRows(kept)),
                                   static_cast<double>(kept) / static_cast<double>(p));
  return out;
}

struct KurtosisEstimate {
  double kappa_hat = 0.0;
  double lower_bound = 0.0;
  bool clamped = false;
};

/// Elliptical kurtosis: averaged marginal excess kurtosis scaled by 1/3
/// (real, bias-corrected) or 1/2 (complex), clamped just above the
/// theoretical lower bound so downstream denominators stay finite.
template <typename Scalar>
KurtosisEstimate kurtosis_estimate(const SampleSet<Scalar>& data) {
  data.validate();
  const Eigen::Index n = data.n(), p = data.p();
  if (n < 4) throw std::invalid_argument("kurtosis_estimate: need n >= 4");
  const double nd = static_cast<double>(n);

  double acc = 0.0;
  for (Eigen::Index j = 0; j < p; ++j) {
    Vector<Scalar> col = data.data.col(j);
    if (!data.mean_known) col.array() -= col.sum() / Scalar(nd);
    const RealVector sq = col.cwiseAbs2().template cast<double>();
    const double m2 = sq.sum() / nd;
    const double m4 = sq.cwiseAbs2().sum() / nd;
    if (m2 == 0.0)
      throw DegenerateDataError("kurtosis_estimate: variable " + std::to_string(j) +
                                " has zero variance");
    if constexpr (is_complex_v<Scalar>) {
      acc += m4 / (m2 * m2) - 2.0;
    } else {
      const double g2 = m4 / (m2 * m2) - 3.0;
      acc += (nd - 1.0) / ((nd - 2.0) * (nd - 3.0)) * ((nd + 1.0) * g2 + 6.0);
    }
  }
  KurtosisEstimate est;
  est.lower_bound = kappa_lower_bound(regime_of(data), static_cast<int>(p));
  const double scale = is_complex_v<Scalar> ? 0.5 : 1.0 / 3.0;
  const double raw = scale * acc / static_cast<double>(p);
  constexpr double eps = 1e-6;
  est.kappa_hat = std::max(raw, est.lower_bound + eps);
  est.clamped = est.kappa_hat != raw;
  return est;
}

struct EtaTheta {
  double eta_hat = 0.0;
  double theta_hat = 0.0;
};

/// Empirical scale eta = tr(S)/p and theta_W = tr((D_S W)^2)/p.
template <typename Scalar>
EtaTheta eta_theta_plugins(const ScmResult<Scalar>& s, const TaperTemplate& w) {
  const Eigen::Index p = s.S.rows();
  if (w.dim() != p) throw DimensionError("eta_theta_plugins: template dimension mismatch");
  EtaTheta out;
  out.eta_hat = trace_real(s.S) / static_cast<double>(p);
  out.theta_hat = diag_quadratic(w.W, real_diagonal(s.S)) / static_cast<double>(p);
  return out;
}

}  // namespace tabasco
