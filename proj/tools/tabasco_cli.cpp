// Command-line front end: covariance estimation from CSV files, Monte-Carlo
// NMSE campaigns, oracle tables and a synthetic STAP detection demo.

#include "tabasco/io.hpp"
#include "tabasco/oracle.hpp"
#include "tabasco/shrinkage.hpp"
#include "tabasco/simulate.hpp"
#include "tabasco/stap.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>

using json = nlohmann::json;
using namespace tabasco;

namespace {

constexpr std::uint64_t kDefaultSeed = 20240101;

std::uint64_t env_seed_fallback() {
  if (const char* env = std::getenv("TABASCO_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ParseError("TABASCO_SEED is not an unsigned integer");
    }
  }
  return kDefaultSeed;
}

double json_safe(double v) { return std::isfinite(v) ? v : 0.0; }

std::string csv_field(double v) { return std::isnan(v) ? std::string{} : format_double(v); }

SphericityMethod sphericity_from_string(const std::string& s) {
  if (s == "ell1") return SphericityMethod::Ell1;
  if (s == "ell2") return SphericityMethod::Ell2;
  throw ParseError("unknown sphericity method: " + s + " (want ell1 or ell2)");
}

bool config_flag(const std::map<std::string, std::string>& kv, const std::string& key,
                 bool fallback) {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  if (it->second == "true" || it->second == "1") return true;
  if (it->second == "false" || it->second == "0") return false;
  throw ParseError("config key '" + key + "' must be true or false");
}

double config_num(const std::map<std::string, std::string>& kv, const std::string& key,
                  std::optional<double> fallback = std::nullopt) {
  auto it = kv.find(key);
  if (it == kv.end()) {
    if (fallback) return *fallback;
    throw ParseError("missing config key: " + key);
  }
  return std::stod(it->second);
}

std::string config_str(const std::map<std::string, std::string>& kv, const std::string& key,
                       std::optional<std::string> fallback = std::nullopt) {
  auto it = kv.find(key);
  if (it == kv.end()) {
    if (fallback) return *fallback;
    throw ParseError("missing config key: " + key);
  }
  return it->second;
}

CovModel model_from_config(const std::map<std::string, std::string>& kv) {
  CovModel model;
  const std::string kind = config_str(kv, "model");
  if (kind == "ar1")
    model.kind = CovModel::Kind::AR1;
  else if (kind == "poly")
    model.kind = CovModel::Kind::PolyDecay;
  else if (kind == "permuted-ar1")
    model.kind = CovModel::Kind::PermutedAR1;
  else
    throw ParseError("unknown model: " + kind + " (want ar1, poly or permuted-ar1)");
  model.p = static_cast<int>(config_num(kv, "p"));
  model.rho = config_num(kv, "rho");
  model.alpha = config_num(kv, "alpha", 0.1);
  return model;
}

// ---------------------------------------------------------------------------
// estimate

struct EstimateArgs {
  std::string input, output, json_path, family_spec = "banding:default";
  std::string sphericity = "ell1";
  bool complex_data = false, known_mean = false, gaussian = false;
  std::optional<double> force_beta;
  std::optional<double> force_k;
};

TemplateFamily family_from_spec(const std::string& text, int p, int pulses = 0) {
  if (text == "banding:default")
    return make_family(TemplateKind::Banding, p, default_bandwidths(p));
  const FamilySpec spec = parse_family_spec(text, p);
  return make_family(spec.kind, p, spec.indices, pulses);
}

template <typename Scalar>
int run_estimate_typed(const EstimateArgs& args, SampleSet<Scalar> data) {
  const int p = static_cast<int>(data.p());
  TemplateFamily family = family_from_spec(args.family_spec, p);
  const auto report = validate_family(family);
  if (!report.valid) {
    std::cerr << "error: family fails admissibility (" << report.issues.size() << " issues)\n";
    return 1;
  }

  TabascoOptions options;
  options.sphericity = sphericity_from_string(args.sphericity);
  options.gaussian_kappa_zero = args.gaussian;
  options.force_beta = args.force_beta;
  if (args.force_k) {
    bool found = false;
    for (std::size_t i = 0; i < family.size(); ++i)
      if (family[i].index_value == *args.force_k) {
        options.force_index = i;
        found = true;
        break;
      }
    if (!found) {
      std::cerr << "error: --k " << *args.force_k << " is not in the family\n";
      return 1;
    }
  }

  const auto est = tabasco_estimate(data, family, options);
  write_text_file(args.output, matrix_to_csv(est.Sigma_hat));

  json side;
  side["beta"] = est.selection.beta_hat;
  side["k"] = est.chosen.index_value;
  side["eta"] = est.eta_hat;
  side["kappa"] = est.summary.kappa_hat;
  side["gamma"] = est.summary.gamma_hat;
  json per_k = json::array();
  for (std::size_t i = 0; i < est.selection.objective.size(); ++i)
    per_k.push_back(json{{"k", family[i].index_value},
                     {"beta", est.selection.per_k_beta[i]},
                     {"objective", est.selection.objective[i]}});
  side["per_k_objective"] = per_k;
  side["heuristic_regime"] = est.heuristic_regime;
  if (!args.json_path.empty()) write_text_file(args.json_path, side.dump(2) + "\n");
  return 0;
}

int run_estimate(const EstimateArgs& args) {
  const std::string text = read_text_file(args.input);
  if (args.complex_data) {
    ComplexSamples data{csv_to_complex_matrix(text), args.known_mean};
    return run_estimate_typed(args, std::move(data));
  }
  RealSamples data{csv_to_matrix(text), args.known_mean};
  return run_estimate_typed(args, std::move(data));
}

// ---------------------------------------------------------------------------
// simulate

EstimatorSpec estimator_from_token(const std::string& token, const TabascoOptions& opts,
                                   double alpha) {
  EstimatorSpec est;
  est.label = token;
  est.tabasco_options = opts;
  est.alpha = alpha;
  if (token == "tabasco") {
    est.kind = EstimatorSpec::Kind::Tabasco;
  } else if (token == "rscm") {
    est.kind = EstimatorSpec::Kind::Rscm;
  } else if (token == "lwe") {
    est.kind = EstimatorSpec::Kind::Lwe;
  } else if (token == "mnmx-taper") {
    est.kind = EstimatorSpec::Kind::MnmxTaper;
  } else if (token == "scm") {
    est.kind = EstimatorSpec::Kind::Scm;
  } else if (token == "truth") {
    est.kind = EstimatorSpec::Kind::TrueSigma;
  } else if (token.rfind("taper-scm:", 0) == 0) {
    est.kind = EstimatorSpec::Kind::TaperedScm;
    est.fixed_bandwidth = std::stoi(token.substr(10));
  } else {
    throw ParseError("unknown estimator: " + token);
  }
  return est;
}

int run_simulate(const std::string& config_path, const std::string& output,
                 const std::string& json_path, std::optional<std::uint64_t> seed_override,
                 std::optional<int> trials_override) {
  const auto kv = parse_config(read_text_file(config_path));
  CampaignConfig config;
  config.model = model_from_config(kv);
  config.trials = trials_override ? *trials_override
                                  : static_cast<int>(config_num(kv, "trials", 1000));
  config.seed = seed_override ? *seed_override
                              : static_cast<std::uint64_t>(config_num(kv, "seed",
                                                                      double(env_seed_fallback())));
  const std::string dist = config_str(kv, "dist", "mvn");
  if (dist == "mvn")
    config.sampling.dist = SamplingSpec::Dist::MVN;
  else if (dist == "mvt")
    config.sampling.dist = SamplingSpec::Dist::MVT;
  else
    throw ParseError("unknown dist: " + dist);
  config.sampling.nu = config_num(kv, "nu", 5.0);
  const std::string mean = config_str(kv, "mean", "random");
  if (mean == "zero")
    config.sampling.mean = SamplingSpec::MeanMode::Zero;
  else if (mean == "random")
    config.sampling.mean = SamplingSpec::MeanMode::RandomGaussian;
  else
    throw ParseError("unknown mean mode: " + mean);
  config.sampling.mean_known = config_flag(kv, "known-mean", false);
  for (double n : parse_index_list(config_str(kv, "ns"), config.model.p))
    config.sample_sizes.push_back(static_cast<int>(n));
  config.threads = static_cast<int>(config_num(kv, "threads", 0));

  TabascoOptions topts;
  topts.sphericity = sphericity_from_string(config_str(kv, "sphericity", "ell1"));
  topts.gaussian_kappa_zero = config_flag(kv, "gaussian", false);
  const double alpha = config.model.alpha;

  const std::string family = config_str(kv, "family", "banding:default");
  if (family != "banding:default") {
    const FamilySpec spec = parse_family_spec(family, config.model.p);
    config.family_kind = spec.kind;
    config.family_indices = spec.indices;
  }

  for (const auto& token : [] (const std::string& s) {
         std::vector<std::string> out;
         std::string cur;
         for (char c : s) {
           if (c == ',') {
             out.push_back(cur);
             cur.clear();
           } else if (!isspace(static_cast<unsigned char>(c))) {
             cur += c;
           }
         }
         if (!cur.empty()) out.push_back(cur);
         return out;
       }(config_str(kv, "estimators", "tabasco,lwe")))
    config.estimators.push_back(estimator_from_token(token, topts, alpha));

  const auto reports = run_campaign(config);

  std::string csv = "estimator,n,nmse_mean,nmse_se,beta_mean,k_mode\n";
  json jrows = json::array();
  int total_failures = 0;
  for (const auto& rep : reports) {
    for (const auto& cell : rep.cells) {
      csv += rep.label + ',' + std::to_string(cell.n) + ',' + format_double(cell.nmse_mean) +
             ',' + format_double(cell.nmse_se) + ',' + csv_field(cell.beta_mean) + ',' +
             csv_field(cell.k_mode) + '\n';
      jrows.push_back({{"estimator", rep.label},
                       {"n", cell.n},
                       {"nmse_mean", cell.nmse_mean},
                       {"nmse_se", cell.nmse_se},
                       {"beta_mean", json_safe(cell.beta_mean)},
                       {"k_mode", json_safe(cell.k_mode)},
                       {"failures", cell.failures}});
      if (cell.failures > 0) {
        total_failures += cell.failures;
        std::cerr << "warning: " << rep.label << " at n=" << cell.n << " failed on "
                  << cell.failures << " trials (excluded)\n";
      }
    }
  }
  write_text_file(output, csv);
  if (!json_path.empty()) {
    json j;
    j["seed"] = config.seed;
    j["trials"] = config.trials;
    j["rows"] = jrows;
    write_text_file(json_path, j.dump(2) + "\n");
  }
  return 0;
}

// ---------------------------------------------------------------------------
// oracle

int run_oracle(const std::string& config_path, const std::string& output,
               const std::string& curves_path) {
  const auto kv = parse_config(read_text_file(config_path));
  const CovModel model = model_from_config(kv);
  const RealMatrix sigma = build_cov(model);
  OracleInputs<double> in;
  in.Sigma = sigma;
  in.kappa = config_num(kv, "kappa", 0.0);
  in.n = static_cast<int>(config_num(kv, "n"));
  in.regime = config_flag(kv, "known-mean", false) ? DataRegime::RealKnownMean
                                                   : DataRegime::RealUnknownMean;
  const std::string family_text = config_str(kv, "family", "banding:default");
  const TemplateFamily family = family_from_spec(family_text, model.p);

  const double frob_sigma = frob_norm_sq(sigma);
  std::string csv = "k,beta0,nmse_opt\n";
  std::string curves = "k,beta,nmse\n";
  const int grid_points = static_cast<int>(config_num(kv, "curve-points", 101));
  std::vector<double> grid;
  for (int i = 0; i < grid_points; ++i) grid.push_back(i / double(grid_points - 1));
  for (const auto& t : family.templates) {
    const auto ob = oracle_beta(in, t);
    csv += format_double(t.index_value) + ',' + format_double(ob.beta_o) + ',' +
           format_double(ob.mse_opt / frob_sigma) + '\n';
    if (!curves_path.empty()) {
      const auto curve = oracle_L_curve(in, t, grid);
      for (std::size_t g = 0; g < grid.size(); ++g)
        curves += format_double(t.index_value) + ',' + format_double(grid[g]) + ',' +
                  format_double(curve.values[g] / frob_sigma) + '\n';
    }
  }
  write_text_file(output, csv);
  if (!curves_path.empty()) write_text_file(curves_path, curves);
  return 0;
}

// ---------------------------------------------------------------------------
// stap demo

int run_stap_demo(const std::string& config_path, const std::string& output,
                  const std::string& json_path, std::optional<std::uint64_t> seed_override,
                  const std::string& estimator) {
  std::map<std::string, std::string> kv;
  if (!config_path.empty()) kv = parse_config(read_text_file(config_path));

  RadarConfig cfg;
  cfg.sensors = static_cast<int>(config_num(kv, "sensors", 2));
  cfg.pulses = static_cast<int>(config_num(kv, "pulses", 8));
  cfg.f0 = config_num(kv, "f0", 10e9);
  cfg.bandwidth = config_num(kv, "bandwidth", 5e6);
  cfg.prf = config_num(kv, "prf", 1e3);
  cfg.spacing = config_num(kv, "spacing", cfg.wavelength() / 2.0);
  cfg.platform_speed = config_num(kv, "speed", cfg.spacing * cfg.prf / 2.0);
  cfg.cnr_db = config_num(kv, "cnr-db", 20.0);

  const int n = static_cast<int>(config_num(kv, "n", 40));
  const int patches = static_cast<int>(config_num(kv, "patches", 10));
  const std::uint64_t seed = seed_override ? *seed_override
                                           : static_cast<std::uint64_t>(
                                                 config_num(kv, "seed",
                                                            double(env_seed_fallback())));
  const int grid_theta = static_cast<int>(config_num(kv, "grid-theta", 33));
  const int grid_v = static_cast<int>(config_num(kv, "grid-v", 33));
  const double theta_max = config_num(kv, "theta-max", 1.2);

  const auto data = synth_clutter(cfg, n, patches, seed);
  ComplexVector x0 = synth_clutter(cfg, 1, patches, seed + 1).data.row(0).transpose();

  // optional synthetic target injection
  double beta_out = std::numeric_limits<double>::quiet_NaN();
  double k_out = std::numeric_limits<double>::quiet_NaN();
  if (kv.count("target-theta")) {
    const double ttheta = config_num(kv, "target-theta");
    const double tv = config_num(kv, "target-v");
    const double scr_db = config_num(kv, "scr-db", -5.0);
    const double clutter_power = std::pow(10.0, cfg.cnr_db / 10.0) + 1.0;
    const double amp = std::sqrt(std::pow(10.0, scr_db / 10.0) * clutter_power *
                                 static_cast<double>(cfg.dim()));
    x0 += amp * steering_vector(cfg, ttheta, tv);
  }

  ComplexMatrix sigma_hat;
  if (estimator == "tabasco") {
    std::vector<double> widths;
    for (int i = 0; i < 20; ++i) widths.push_back(std::pow(10.0, -3.0 + 2.0 * i / 19.0));
    const auto family = make_family(TemplateKind::StapKron, cfg.dim(), widths, cfg.pulses);
    const auto est = tabasco_estimate(data, family);
    sigma_hat = est.Sigma_hat;
    beta_out = est.selection.beta_hat;
    k_out = est.chosen.index_value;
  } else if (estimator == "rscm") {
    const auto est = rscm_special_case(data);
    sigma_hat = est.Sigma_hat;
    beta_out = est.selection.beta_hat;
  } else if (estimator.rfind("taper:", 0) == 0) {
    const double k = std::stod(estimator.substr(6));
    sigma_hat = hadamard(stap_kron_template(cfg.pulses, cfg.sensors, k).W, scm(data).S);
    k_out = k;
  } else if (estimator == "scm") {
    sigma_hat = scm(data).S;
  } else {
    throw ParseError("unknown estimator: " + estimator);
  }

  const auto grid = make_detection_grid(cfg, grid_theta, grid_v, theta_max);
  const auto map = detection_map(cfg, sigma_hat, grid, x0, estimator);

  std::string csv = "theta,velocity,statistic\n";
  for (std::size_t i = 0; i < grid.thetas.size(); ++i)
    for (std::size_t j = 0; j < grid.velocities.size(); ++j)
      csv += format_double(grid.thetas[i]) + ',' + format_double(grid.velocities[j]) + ',' +
             format_double(map.statistic(i, j)) + '\n';
  write_text_file(output, csv);

  if (!json_path.empty()) {
    json j;
    j["estimator"] = estimator;
    j["beta"] = json_safe(beta_out);
    j["k"] = json_safe(k_out);
    j["cnr_db"] = cfg.cnr_db;
    j["seed"] = seed;
    j["n"] = n;
    j["dim"] = cfg.dim();
    write_text_file(json_path, j.dump(2) + "\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TABASCO: tapered or banded shrinkage covariance estimation"};
  app.require_subcommand(1);

  EstimateArgs est_args;
  std::string config_path, output, json_path, curves_path, estimator = "tabasco";
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;

  auto* est = app.add_subcommand("estimate", "estimate a covariance matrix from CSV data");
  est->add_option("--input", est_args.input, "input CSV, rows = observations")->required();
  est->add_option("--output", est_args.output, "output CSV for the estimate")->required();
  est->add_option("--json", est_args.json_path, "JSON sidecar with the selected parameters");
  est->add_flag("--complex", est_args.complex_data, "input columns are (re,im) pairs");
  est->add_flag("--known-mean", est_args.known_mean, "assume the mean is zero");
  est->add_flag("--gaussian", est_args.gaussian, "assume Gaussian data (kappa = 0)");
  est->add_option("--family", est_args.family_spec, "template family, e.g. banding:1..30,p-30..p");
  est->add_option("--sphericity", est_args.sphericity, "ell1 (default) or ell2");
  est->add_option("--beta", est_args.force_beta, "override the shrinkage coefficient");
  est->add_option("--k", est_args.force_k, "force a template index value");

  auto* sim = app.add_subcommand("simulate", "run a Monte-Carlo NMSE campaign");
  sim->add_option("--config", config_path, "campaign config file")->required();
  sim->add_option("--output", output, "output CSV")->required();
  sim->add_option("--json", json_path, "JSON mirror of the report");
  sim->add_option("--seed", seed, "override the config seed");
  sim->add_option("--trials", trials, "override the config trial count");

  auto* ora = app.add_subcommand("oracle", "tabulate oracle parameters for a known model");
  ora->add_option("--config", config_path, "oracle config file")->required();
  ora->add_option("--output", output, "output CSV (k, beta0, nmse_opt)")->required();
  ora->add_option("--curves", curves_path, "optional CSV of L(beta) curves");

  auto* stap = app.add_subcommand("stap-demo", "synthetic clutter detection map");
  stap->add_option("--config", config_path, "radar/scenario config file");
  stap->add_option("--output", output, "map CSV (theta, velocity, statistic)")->required();
  stap->add_option("--json", json_path, "JSON summary");
  stap->add_option("--seed", seed, "scenario seed");
  stap->add_option("--estimator", estimator, "tabasco (default), rscm, taper:<k> or scm");

  CLI11_PARSE(app, argc, argv);

  try {
    if (est->parsed()) return run_estimate(est_args);
    if (sim->parsed()) return run_simulate(config_path, output, json_path, seed, trials);
    if (ora->parsed()) return run_oracle(config_path, output, curves_path);
    if (stap->parsed()) return run_stap_demo(config_path, output, json_path, seed, estimator);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
