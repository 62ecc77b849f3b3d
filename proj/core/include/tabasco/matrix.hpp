#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace tabasco {

using Real = double;
using Complex = std::complex<double>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using RealMatrix = Matrix<Real>;
using RealVector = Vector<Real>;
using ComplexMatrix = Matrix<Complex>;
using ComplexVector = Vector<Complex>;

template <typename Scalar>
inline constexpr bool is_complex_v = false;
template <typename T>
inline constexpr bool is_complex_v<std::complex<T>> = true;

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// n observations of dimension p, one observation per row.
/// mean_known = true means the population mean is 0 by assumption.
template <typename Scalar>
struct SampleSet {
  Matrix<Scalar> data;
  bool mean_known = false;

  Eigen::Index n() const { return data.rows(); }
  Eigen::Index p() const { return data.cols(); }

  void validate() const {
    if (p() < 2) throw DimensionError("SampleSet: dimension p must be >= 2");
    const Eigen::Index min_n = mean_known ? 1 : 2;
    if (n() < min_n)
      throw DimensionError("SampleSet: need at least " + std::to_string(min_n) +
                           " samples in this regime");
  }
};

using RealSamples = SampleSet<Real>;
using ComplexSamples = SampleSet<Complex>;

/// Elementwise (Schur) product. Mixed real/complex operands are allowed.
template <typename DerivedA, typename DerivedB>
auto hadamard(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError("hadamard: operand shapes differ");
  using ScalarOut = decltype(typename DerivedA::Scalar{} * typename DerivedB::Scalar{});
  return Matrix<ScalarOut>(a.template cast<ScalarOut>().cwiseProduct(b.template cast<ScalarOut>()));
}

/// Squared Frobenius norm, i.e. the sum of squared entry moduli.
template <typename Derived>
double frob_norm_sq(const Eigen::MatrixBase<Derived>& a) {
  return a.derived().squaredNorm();
}

/// d^T (A o A) d, which equals tr((diag(d) A)^2) for symmetric A.
/// For complex A the elementwise square is |a_ij|^2.
template <typename Derived>
double diag_quadratic(const Eigen::MatrixBase<Derived>& a, const RealVector& d) {
  if (a.rows() != a.cols()) throw DimensionError("diag_quadratic: matrix must be square");
  if (d.size() != a.rows()) throw DimensionError("diag_quadratic: weight length mismatch");
  const RealMatrix sq = a.derived().cwiseAbs2().template cast<double>();
  return d.dot(sq * d);
}

inline double trace_real(const RealMatrix& a) { return a.trace(); }
inline double trace_real(const ComplexMatrix& a) { return a.trace().real(); }

template <typename Scalar>
RealVector real_diagonal(const Matrix<Scalar>& a) {
  if constexpr (is_complex_v<Scalar>)
    return a.diagonal().real();
  else
    return a.diagonal();
}

}  // namespace tabasco
