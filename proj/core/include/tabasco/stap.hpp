#pragma once

#include "tabasco/matrix.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace tabasco {

struct RadarConfig {
  int sensors = 4;             // Q
  int pulses = 64;             // P
  double f0 = 10e9;            // carrier, Hz
  double bandwidth = 5e6;      // Hz
  double platform_speed = 100.0;  // m/s
  double spacing = 0.3;        // element spacing, m
  double prf = 1e3;            // pulse repetition frequency, Hz
  double cnr_db = 20.0;

  int dim() const { return sensors * pulses; }
  double wavelength() const { return 299792458.0 / f0; }

  void validate() const;
};

/// Space-time steering vector b(v) (x) a(theta), unit norm.
ComplexVector steering_vector(const RadarConfig& config, double theta, double v);

/// Clutter-plus-noise covariance: ridge patches at v = V sin(theta) scaled to
/// the configured CNR over identity thermal noise.
ComplexMatrix clutter_covariance(const RadarConfig& config, int ridge_patches);

/// n circular complex Gaussian secondary samples with the above covariance.
ComplexSamples synth_clutter(const RadarConfig& config, int n, int ridge_patches,
                             std::uint64_t seed);

/// Shares one factorization of Sigma_hat across many detector evaluations.
class AceDetector {
 public:
  explicit AceDetector(const ComplexMatrix& sigma_hat);

  /// Normalized matched-filter statistic in the Sigma^-1 metric, in [0,1].
  double operator()(const ComplexVector& steering, const ComplexVector& snapshot) const;

 private:
  Eigen::LLT<ComplexMatrix> llt_;
};

double ace_statistic(const ComplexMatrix& sigma_hat, const ComplexVector& steering,
                     const ComplexVector& snapshot);

struct DetectionGrid {
  std::vector<double> thetas;      // rad
  std::vector<double> velocities;  // m/s
};

/// Uniform grid over theta in [-theta_max, theta_max] and the unambiguous
/// velocity interval.
DetectionGrid make_detection_grid(const RadarConfig& config, int n_theta, int n_velocity,
                                  double theta_max);

struct DetectionMap {
  DetectionGrid grid;
  RealMatrix statistic;  // n_theta x n_velocity
  std::string estimator_label;
};

DetectionMap detection_map(const RadarConfig& config, const ComplexMatrix& sigma_hat,
                           const DetectionGrid& grid, const ComplexVector& snapshot,
                           std::string estimator_label = {});

}  // namespace tabasco
