#include "tabasco/stap.hpp"

#include "tabasco/random.hpp"
#include "tabasco/simulate.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tabasco {

void RadarConfig::validate() const {
  if (sensors < 1 || pulses < 1)
    throw std::invalid_argument("RadarConfig: sensors and pulses must be >= 1");
  if (!(f0 > 0.0) || !(bandwidth > 0.0) || !(platform_speed > 0.0) || !(spacing > 0.0) ||
      !(prf > 0.0))
    throw std::invalid_argument("RadarConfig: physical quantities must be positive");
}

ComplexVector steering_vector(const RadarConfig& config, double theta, double v) {
  config.validate();
  if (!(std::abs(theta) < std::numbers::pi / 2.0))
    throw std::invalid_argument("steering_vector: |theta| must be < pi/2");
  const double lambda = config.wavelength();
  const Complex j(0.0, 1.0);
  ComplexVector a(config.sensors);
  for (int q = 0; q < config.sensors; ++q)
    a(q) = std::exp(j * (2.0 * std::numbers::pi * config.spacing / lambda * q * std::sin(theta)));
  ComplexVector b(config.pulses);
  for (int m = 0; m < config.pulses; ++m)
    b(m) = std::exp(j * (2.0 * std::numbers::pi * 2.0 * v / (lambda * config.prf) * m));
  ComplexVector p(config.dim());
  for (int m = 0; m < config.pulses; ++m)
    p.segment(m * config.sensors, config.sensors) = b(m) * a;
  p /= p.norm();
  return p;
}

ComplexMatrix clutter_covariance(const RadarConfig& config, int ridge_patches) {
  config.validate();
  const int p = config.dim();
  ComplexMatrix noise = ComplexMatrix::Identity(p, p);
  if (ridge_patches <= 0) return noise;
  ComplexMatrix clutter = ComplexMatrix::Zero(p, p);
  // patches spread over the front hemisphere, Doppler-coupled to the ridge
  for (int c = 0; c < ridge_patches; ++c) {
    const double theta =
        -std::numbers::pi / 3.0 + (c + 0.5) * (2.0 * std::numbers::pi / 3.0) / ridge_patches;
    const double v = config.platform_speed * std::sin(theta);
    const ComplexVector s = steering_vector(config, theta, v);
    clutter.noalias() += s * s.adjoint();
  }
  const double cnr = std::pow(10.0, config.cnr_db / 10.0);
  const double scale = cnr * static_cast<double>(p) / clutter.trace().real();
  return noise + scale * clutter;
}

ComplexSamples synth_clutter(const RadarConfig& config, int n, int ridge_patches,
                             std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("synth_clutter: need n >= 1");
  const ComplexMatrix sigma = clutter_covariance(config, ridge_patches);
  std::mt19937_64 rng = substream(seed, 0);
  return sample_complex_gaussian(sigma, n, rng);
}

AceDetector::AceDetector(const ComplexMatrix& sigma_hat) : llt_(sigma_hat) {
  if (llt_.info() != Eigen::Success)
    throw std::runtime_error("AceDetector: estimate is not positive definite");
}

double AceDetector::operator()(const ComplexVector& steering,
                               const ComplexVector& snapshot) const {
  const ComplexVector wp = llt_.matrixL().solve(steering);
  const ComplexVector wx = llt_.matrixL().solve(snapshot);
  const double cross = std::norm(wp.dot(wx));  // dot conjugates the left operand
  const double denom = wp.squaredNorm() * wx.squaredNorm();
  return denom > 0.0 ? cross / denom : 0.0;
}

double ace_statistic(const ComplexMatrix& sigma_hat, const ComplexVector& steering,
                     const ComplexVector& snapshot) {
  return AceDetector(sigma_hat)(steering, snapshot);
}

DetectionGrid make_detection_grid(const RadarConfig& config, int n_theta, int n_velocity,
                                  double theta_max) {
  if (n_theta < 2 || n_velocity < 2)
    throw std::invalid_argument("make_detection_grid: need at least a 2x2 grid");
  DetectionGrid grid;
  const double v_max = config.wavelength() * config.prf / 4.0;  // unambiguous Doppler
  grid.thetas.resize(n_theta);
  grid.velocities.resize(n_velocity);
  for (int i = 0; i < n_theta; ++i)
    grid.thetas[i] = -theta_max + 2.0 * theta_max * i / (n_theta - 1);
  for (int i = 0; i < n_velocity; ++i)
    grid.velocities[i] = -v_max + 2.0 * v_max * i / (n_velocity - 1);
  return grid;
}

DetectionMap detection_map(const RadarConfig& config, const ComplexMatrix& sigma_hat,
                           const DetectionGrid& grid, const ComplexVector& snapshot,
                           std::string estimator_label) {
  const AceDetector ace(sigma_hat);
  DetectionMap map;
  map.grid = grid;
  map.estimator_label = std::move(estimator_label);
  map.statistic.resize(grid.thetas.size(), grid.velocities.size());
  for (std::size_t i = 0; i < grid.thetas.size(); ++i)
    for (std::size_t j = 0; j < grid.velocities.size(); ++j)
      map.statistic(i, j) =
          ace(steering_vector(config, grid.thetas[i], grid.velocities[j]), snapshot);
  return map;
}

}  // namespace tabasco
