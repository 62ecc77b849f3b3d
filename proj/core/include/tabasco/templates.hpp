#pragma once

#include "tabasco/matrix.hpp"

#include <string>
#include <vector>

namespace tabasco {

/// A single admissible taper W (unit diagonal, nonnegative, symmetric)
/// together with its elementwise square root V used by the MSE formulas.
struct TaperTemplate {
  RealMatrix W;
  RealMatrix V;
  double index_value = 0.0;  // bandwidth k, or null width for sinc-type tapers
  std::string label;
  bool zero_one = false;  // all entries in {0,1}; then V == W

  Eigen::Index dim() const { return W.rows(); }
};

/// Hard-thresholding 0/1 band: w_ij = 1 iff |i-j| < k. k = p gives all-ones.
TaperTemplate banding_template(int p, int k);

/// Linear-decay taper: flat to k/2, linear to zero at k.
TaperTemplate minimax_taper_template(int p, int k);

/// Null-broadening taper w_ij = sin((i-j)*delta) / ((i-j)*delta).
/// Negative sinc lobes are clipped to zero to stay admissible.
TaperTemplate sinc_template(int p, double delta);

/// Kronecker taper for pulse/sensor data: T_f (x) T_theta with half-raised
/// sinc factors (1 + sinc((i-j)k/pi))/2, which are positive for every k >= 0.
TaperTemplate stap_kron_template(int pulses, int sensors, double k);

TaperTemplate all_ones_template(int p);

struct TemplateFamily {
  std::vector<TaperTemplate> templates;
  bool contains_all_ones = false;

  Eigen::Index dim() const { return templates.empty() ? 0 : templates.front().dim(); }
  std::size_t size() const { return templates.size(); }
  const TaperTemplate& operator[](std::size_t i) const { return templates[i]; }
};

TemplateFamily make_family(std::vector<TaperTemplate> templates);

enum class TemplateKind { Banding, Minimax, Sinc, StapKron };

/// Family over explicit index values (integer bandwidths for banding/minimax,
/// real widths for sinc; StapKron additionally needs the pulse count).
TemplateFamily make_family(TemplateKind kind, int p, const std::vector<double>& indices,
                           int pulses = 0);

/// Bandwidths k in [1,30] u [p-30,p], the default search set.
std::vector<double> default_bandwidths(int p);

struct ValidationIssue {
  std::size_t member;
  Eigen::Index i, j;
  std::string what;
};

struct ValidationReport {
  bool valid = true;
  bool contains_all_ones = false;
  std::vector<ValidationIssue> issues;
};

/// Checks unit diagonal (exactly), symmetry, nonnegativity (slack -1e-15)
/// and equal dimensions across members.
ValidationReport validate_family(const TemplateFamily& family);

}  // namespace tabasco
