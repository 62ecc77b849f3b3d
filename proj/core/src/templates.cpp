#include "tabasco/templates.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tabasco {

namespace {

bool is_zero_one(const RealMatrix& w) {
  return ((w.array() == 0.0) || (w.array() == 1.0)).all();
}

TaperTemplate finalize(RealMatrix w, double index_value, std::string label) {
  TaperTemplate t;
  t.zero_one = is_zero_one(w);
  t.V = t.zero_one ? w : RealMatrix(w.array().sqrt().matrix());
  t.W = std::move(w);
  t.index_value = index_value;
  t.label = std::move(label);
  return t;
}

double unnormalized_sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

}  // namespace

TaperTemplate banding_template(int p, int k) {
  if (k < 1 || k > p) throw std::invalid_argument("banding_template: k must be in [1,p]");
  RealMatrix w(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) w(i, j) = std::abs(i - j) < k ? 1.0 : 0.0;
  return finalize(std::move(w), k, "banding:" + std::to_string(k));
}

TaperTemplate minimax_taper_template(int p, int k) {
  if (k < 1) throw std::invalid_argument("minimax_taper_template: k must be >= 1");
  RealMatrix w(p, p);
  const double kd = k;
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) {
      const double m = std::abs(i - j);
      if (2.0 * m <= kd)
        w(i, j) = 1.0;
      else if (m < kd)
        w(i, j) = 2.0 - 2.0 * m / kd;
      else
        w(i, j) = 0.0;
    }
  return finalize(std::move(w), k, "minimax:" + std::to_string(k));
}

TaperTemplate sinc_template(int p, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("sinc_template: delta must be > 0");
  RealMatrix w(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      w(i, j) = std::max(0.0, unnormalized_sinc((i - j) * delta));
  w.diagonal().setOnes();
  return finalize(std::move(w), delta, "sinc:" + std::to_string(delta));
}

TaperTemplate stap_kron_template(int pulses, int sensors, double k) {
  if (pulses < 1 || sensors < 1)
    throw std::invalid_argument("stap_kron_template: need pulses >= 1 and sensors >= 1");
  if (k < 0.0) throw std::invalid_argument("stap_kron_template: k must be >= 0");
  auto factor = [&](int m) {
    RealMatrix f(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) f(i, j) = 0.5 * (1.0 + unnormalized_sinc((i - j) * k));
    f.diagonal().setOnes();
    return f;
  };
  const RealMatrix tf = factor(pulses);
  const RealMatrix ttheta = factor(sensors);
  const int p = pulses * sensors;
  RealMatrix w(p, p);
  for (int a = 0; a < pulses; ++a)
    for (int b = 0; b < pulses; ++b)
      w.block(a * sensors, b * sensors, sensors, sensors) = tf(a, b) * ttheta;
  return finalize(std::move(w), k, "stap-kron:" + std::to_string(k));
}

TaperTemplate all_ones_template(int p) {
  RealMatrix w = RealMatrix::Ones(p, p);
  return finalize(std::move(w), p, "ones");
}

TemplateFamily make_family(std::vector<TaperTemplate> templates) {
  TemplateFamily fam;
  fam.templates = std::move(templates);
  for (const auto& t : fam.templates)
    if ((t.W.array() == 1.0).all()) fam.contains_all_ones = true;
  return fam;
}

TemplateFamily make_family(TemplateKind kind, int p, const std::vector<double>& indices,
                           int pulses) {
  std::vector<TaperTemplate> out;
  out.reserve(indices.size());
  for (double idx : indices) {
    switch (kind) {
      case TemplateKind::Banding:
        out.push_back(banding_template(p, static_cast<int>(idx)));
        break;
      case TemplateKind::Minimax:
        out.push_back(minimax_taper_template(p, static_cast<int>(idx)));
        break;
      case TemplateKind::Sinc:
        out.push_back(sinc_template(p, idx));
        break;
      case TemplateKind::StapKron: {
        if (pulses < 1 || p % pulses != 0)
          throw std::invalid_argument("make_family: stap kind needs pulses dividing p");
        out.push_back(stap_kron_template(pulses, p / pulses, idx));
        break;
      }
    }
  }
  return make_family(std::move(out));
}

std::vector<double> default_bandwidths(int p) {
  std::vector<double> ks;
  for (int k = 1; k <= std::min(30, p); ++k) ks.push_back(k);
  for (int k = std::max(std::min(30, p) + 1, p - 30); k <= p; ++k) ks.push_back(k);
  return ks;
}

ValidationReport validate_family(const TemplateFamily& family) {
  ValidationReport rep;
  rep.contains_all_ones = family.contains_all_ones;
  const Eigen::Index p = family.dim();
  double prev_index = -std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < family.size(); ++m) {
    const auto& t = family[m];
    if (t.dim() != p) {
      rep.valid = false;
      rep.issues.push_back({m, -1, -1, "dimension differs from first member"});
      continue;
    }
    if (t.index_value <= prev_index) {
      rep.valid = false;
      rep.issues.push_back({m, -1, -1, "family indices must be strictly increasing"});
    }
    prev_index = t.index_value;
    for (Eigen::Index i = 0; i < p; ++i) {
      if (t.W(i, i) != 1.0) {
        rep.valid = false;
        rep.issues.push_back({m, i, i, "diagonal entry is not exactly 1"});
      }
      for (Eigen::Index j = 0; j < p; ++j) {
        if (t.W(i, j) < -1e-15) {
          rep.valid = false;
          rep.issues.push_back({m, i, j, "negative entry"});
        }
        if (t.W(i, j) != t.W(j, i)) {
          rep.valid = false;
          rep.issues.push_back({m, i, j, "not symmetric"});
        }
      }
    }
  }
  return rep;
}

}  // namespace tabasco
