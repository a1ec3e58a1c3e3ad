#include "tsl/harness/experiments.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tsl/dynamics.hpp"
#include "tsl/harness/analyze.hpp"
#include "tsl/harness/archive.hpp"
#include "tsl/linreg.hpp"
#include "tsl/ntk.hpp"
#include "tsl/thermo.hpp"

namespace tsl::harness {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";

std::vector<double> log_grid(double lo, double hi, long long points) {
  if (!(lo > 0.0) || !(hi > lo) || points < 2) {
    throw ConfigError("sweep grid needs 0 < min < max and points >= 2");
  }
  std::vector<double> grid(static_cast<std::size_t>(points));
  const double step = (std::log(hi) - std::log(lo)) / static_cast<double>(points - 1);
  for (long long i = 0; i < points; ++i) {
    grid[static_cast<std::size_t>(i)] = std::exp(std::log(lo) + step * static_cast<double>(i));
  }
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

void report_into(KeyValueDoc& doc, const std::string& prefix,
                 const SpeedLimitReport& report) {
  doc.set_double(prefix + ".horizon_T", report.horizon_T);
  doc.set_double(prefix + ".w2_sq", report.w2_sq);
  doc.set_double(prefix + ".entropy", report.entropy);
  if (report.t_sl) doc.set_double(prefix + ".t_sl", *report.t_sl);
  if (report.inefficiency) {
    doc.set_double(prefix + ".inefficiency", *report.inefficiency);
  }
  if (report.path_length) doc.set_double(prefix + ".path_length", *report.path_length);
  if (report.geo_length) doc.set_double(prefix + ".geo_length", *report.geo_length);
  if (report.length_ratio) {
    doc.set_double(prefix + ".length_ratio", *report.length_ratio);
  }
  doc.set(prefix + ".entropy_error", report.entropy_error ? "true" : "false");
  doc.set(prefix + ".sub_unity_inefficiency",
          report.sub_unity_inefficiency ? "true" : "false");
}

class SummaryWriter {
 public:
  SummaryWriter(const ExperimentConfig& cfg) {
    doc_.set("tool", "tsl");
    doc_.set("version", kVersion);
    doc_.set("kind", kind_name(cfg.kind));
    doc_.set_int("seed", static_cast<long long>(cfg.seed));
    for (const auto& key : cfg.parameters.keys()) {
      doc_.set("config." + key, cfg.parameters.get_string(key));
    }
  }

  KeyValueDoc& doc() { return doc_; }

  void write(const std::string& out_dir) const {
    const std::string path = (fs::path(out_dir) / "summary.txt").string();
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << doc_.serialize();
    if (!out) throw IoError("write failure on " + path);
  }

 private:
  KeyValueDoc doc_;
};

SpectralModel spectrum_from(const KeyValueDoc& params) {
  PowerLawSpec spec;
  spec.alpha = params.get_double("alpha");
  spec.delta = params.get_double("delta");
  spec.scale = params.get_double_or("scale", 1.0);
  spec.residue_scale = params.get_double_or("residue_scale", 1.0);
  spec.k_star = static_cast<std::size_t>(params.get_int_or("k_star", 1));
  spec.n = static_cast<std::size_t>(params.get_int("modes"));
  return build_power_law_spectrum(spec);
}

void run_ntk_scaling(const ExperimentConfig& cfg) {
  const auto& params = cfg.parameters;
  const SpectralModel model = spectrum_from(params);
  const auto ts = log_grid(params.get_double("t_min"), params.get_double("t_max"),
                           params.get_int("t_points"));
  const auto n_quad = static_cast<std::size_t>(params.get_int_or("n_quad", 4096));

  const auto rows = ntk::evaluate_sweep(model, ts, n_quad);
  PlotTable table;
  table.columns = {"t[time]",      "w2_sq[weight^2]", "entropy[loss]",
                   "t_sl[time]",   "inefficiency[1]", "l_gamma[weight]",
                   "l_geo[weight]"};
  std::vector<double> w2s, ents, tsls, lgams, lgeos;
  for (const auto& row : rows) {
    table.rows.push_back({row.t, row.w2_sq, row.entropy, row.t_sl,
                          row.inefficiency, row.l_gamma, row.l_geo});
    w2s.push_back(row.w2_sq);
    ents.push_back(row.entropy);
    tsls.push_back(row.t_sl);
    lgams.push_back(row.l_gamma);
    lgeos.push_back(row.l_geo);
  }
  emit_plot_data(table, (fs::path(cfg.output_dir) / "scaling.tsv").string());

  PlotTable slopes;
  slopes.columns = {"w2_slope[1]", "entropy_slope[1]", "tsl_slope[1]",
                    "l_gamma_slope[1]", "l_geo_slope[1]"};
  slopes.rows.push_back({ntk::fit_loglog_slope(ts, w2s),
                         ntk::fit_loglog_slope(ts, ents),
                         ntk::fit_loglog_slope(ts, tsls),
                         ntk::fit_loglog_slope(ts, lgams),
                         ntk::fit_loglog_slope(ts, lgeos)});
  emit_plot_data(slopes, (fs::path(cfg.output_dir) / "slopes.tsv").string());

  SummaryWriter summary(cfg);
  auto& doc = summary.doc();
  doc.set_double("slope.w2", slopes.rows[0][0]);
  doc.set_double("slope.entropy", slopes.rows[0][1]);
  doc.set_double("slope.t_sl", slopes.rows[0][2]);
  doc.set_double("slope.l_gamma", slopes.rows[0][3]);
  doc.set_double("slope.l_geo", slopes.rows[0][4]);
  const auto pred = ntk::predicted_exponents(params.get_double("alpha"),
                                             params.get_double("delta"));
  const char* regime =
      pred.regime == ntk::ScalingRegime::optimal       ? "optimal"
      : pred.regime == ntk::ScalingRegime::suboptimal  ? "suboptimal"
      : pred.regime == ntk::ScalingRegime::boundary    ? "boundary"
                                                       : "out_of_domain";
  doc.set("predicted.regime", regime);
  doc.set_double("predicted.w2_exponent", pred.w2_exponent);
  doc.set_double("predicted.entropy_exponent", pred.entropy_exponent);
  doc.set_double("predicted.tsl_exponent", pred.tsl_exponent);
  doc.set_double("predicted.length_exponent", pred.length_exponent);
  summary.write(cfg.output_dir);
}

void run_ntk_inefficiency(const ExperimentConfig& cfg) {
  const auto& params = cfg.parameters;
  const SpectralModel model = spectrum_from(params);
  const auto ts = log_grid(params.get_double("t_min"), params.get_double("t_max"),
                           params.get_int("t_points"));

  PlotTable table;
  table.columns = {"t[time]", "tsl_over_t[1]", "t_over_tsl[1]",
                   "loss_drop[loss]", "displacement_sq[weight^2]"};
  for (double t : ts) {
    const double ratio = ntk::inefficiency_ratio(model, t);
    table.rows.push_back({t, ratio, 1.0 / ratio, ntk::loss_drop(model, t),
                          ntk::displacement_sq(model, t)});
  }
  emit_plot_data(table, (fs::path(cfg.output_dir) / "inefficiency.tsv").string());

  SummaryWriter summary(cfg);
  summary.doc().set_double("final.t_over_tsl", 1.0 / table.rows.back()[1]);
  summary.write(cfg.output_dir);
}

void run_linreg_finite(const ExperimentConfig& cfg) {
  const auto& params = cfg.parameters;
  const auto d = static_cast<Eigen::Index>(params.get_int("d"));
  const auto n = static_cast<Eigen::Index>(params.get_int("n"));
  const double lambda = params.get_double("lambda");
  const double beta = params.get_double("beta");
  const double alpha = params.get_double("alpha");
  const long long seeds = params.get_int_or("seeds", 1);

  PlotTable table;
  table.columns = {"seed[1]", "w2_sq[weight^2]", "entropy[loss]", "t_sl[time]"};
  double mean_tsl = 0.0, mean_w2 = 0.0, mean_entropy = 0.0;
  for (long long s = 0; s < seeds; ++s) {
    const auto problem = linreg::generate_teacher_problem(
        d, n, lambda, beta, alpha, cfg.seed + static_cast<std::uint64_t>(s));
    const auto report = linreg::tsl_finite(problem);
    table.rows.push_back({static_cast<double>(s), report.w2_sq, report.entropy,
                          *report.t_sl});
    mean_w2 += report.w2_sq;
    mean_entropy += report.entropy;
    mean_tsl += *report.t_sl;
  }
  mean_w2 /= static_cast<double>(seeds);
  mean_entropy /= static_cast<double>(seeds);
  mean_tsl /= static_cast<double>(seeds);
  emit_plot_data(table, (fs::path(cfg.output_dir) / "finite.tsv").string());

  linreg::MPParams mp;
  mp.gamma = static_cast<double>(d) / static_cast<double>(n);
  mp.lambda = lambda;
  mp.beta = beta;
  mp.alpha = alpha;
  const double asymptotic = linreg::tsl_asymptotic(mp);

  SummaryWriter summary(cfg);
  auto& doc = summary.doc();
  doc.set_double("gamma", mp.gamma);
  doc.set_double("mean.w2_sq", mean_w2);
  doc.set_double("mean.entropy", mean_entropy);
  doc.set_double("mean.t_sl", mean_tsl);
  doc.set_double("asymptotic.t_sl", asymptotic);
  doc.set_double("asymptotic.rel_gap",
                 std::abs(mean_tsl - asymptotic) / asymptotic);
  summary.write(cfg.output_dir);
}

void run_linreg_asymptotic(const ExperimentConfig& cfg) {
  const auto& params = cfg.parameters;
  linreg::MPParams mp;
  mp.gamma = params.get_double("gamma");
  mp.lambda = params.get_double("lambda");
  mp.alpha = params.get_double("alpha");
  mp.beta = 1.0;
  const auto n_nodes = static_cast<std::size_t>(params.get_int_or("n_nodes", 2048));
  const auto betas = log_grid(params.get_double("beta_min"),
                              params.get_double("beta_max"),
                              params.get_int("beta_points"));

  PlotTable table;
  table.columns = {"beta[1]", "t_sl[time]"};
  for (double beta : betas) {
    mp.beta = beta;
    table.rows.push_back({beta, linreg::tsl_asymptotic(mp, n_nodes)});
  }
  emit_plot_data(table, (fs::path(cfg.output_dir) / "asymptotic.tsv").string());

  SummaryWriter summary(cfg);
  auto& doc = summary.doc();
  doc.set_double("final.beta", table.rows.back()[0]);
  doc.set_double("final.t_sl", table.rows.back()[1]);
  mp.beta = 1.0;
  doc.set_double("limit.beta_inf",
                 linreg::tsl_limits(mp, linreg::TslLimit::beta_inf));
  doc.set_double("limit.beta_zero",
                 linreg::tsl_limits(mp, linreg::TslLimit::beta_zero));
  doc.set_double("limit.n_inf", linreg::tsl_limits(mp, linreg::TslLimit::n_inf));
  doc.set_double("limit.d_inf", linreg::tsl_limits(mp, linreg::TslLimit::d_inf));
  summary.write(cfg.output_dir);
}

void run_langevin_sim(const ExperimentConfig& cfg) {
  const auto& params = cfg.parameters;
  const auto d = static_cast<Eigen::Index>(params.get_int("dimension"));
  const double beta_inv = params.get_double("beta_inv");
  if (!(beta_inv > 0.0)) {
    throw ConfigError("langevin-sim: beta_inv must be > 0");
  }
  const double lam_lo = params.get_double_or("lambda_min", 1.0);
  const double lam_hi = params.get_double_or("lambda_max", lam_lo);
  const double init_mean = params.get_double_or("init_mean", 1.0);
  const double init_var = params.get_double_or("init_var", 1.0);
  const long long t_points = params.get_int_or("t_points", 50);

  std::vector<double> spectrum(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < d; ++i) {
    const double frac = d == 1 ? 0.0
                               : static_cast<double>(i) / static_cast<double>(d - 1);
    spectrum[static_cast<std::size_t>(i)] =
        std::exp(std::log(lam_hi) + frac * (std::log(lam_lo) - std::log(lam_hi)));
  }
  const auto pot = QuadraticPotential::diagonal(spectrum, Vector::Zero(d));
  const auto init =
      GaussianMeasure::isotropic(Vector::Constant(d, init_mean), init_var);

  dynamics::IntegratorConfig icfg;
  icfg.dt = params.get_double("dt");
  icfg.horizon = params.get_double("horizon");
  icfg.seed = cfg.seed;
  icfg.n_realizations = static_cast<int>(params.get_int("realizations"));
  icfg.beta_inv = beta_inv;
  icfg.validate();

  // analytic series from the exact Gaussian law
  PlotTable series;
  series.columns = {"t[time]", "w2_sq[weight^2]", "entropy[loss]", "t_sl[time]",
                    "inefficiency[1]"};
  for (long long i = 1; i <= t_points; ++i) {
    const double t = icfg.horizon * static_cast<double>(i) /
                     static_cast<double>(t_points);
    const auto law = dynamics::propagate_gaussian_ou(pot, init, beta_inv, t);
    const double w2 = thermo::w2_gaussian(init, law);
    const double entropy =
        thermo::entropy_dynamic_gaussian(pot, init, beta_inv, t).value;
    const double t_sl = thermo::speed_limit(w2, entropy);
    series.rows.push_back(
        {t, w2, entropy, t_sl, t_sl > 0.0 ? t / t_sl : 0.0});
  }
  emit_plot_data(series, (fs::path(cfg.output_dir) / "series.tsv").string());

  // Monte-Carlo cross-check of the final-time moments
  const auto ensemble = dynamics::simulate_langevin(pot, init, icfg);
  Vector mean = Vector::Zero(d);
  for (const auto& traj : ensemble) mean += traj.weights.back();
  mean /= static_cast<double>(ensemble.size());
  Matrix cov = Matrix::Zero(d, d);
  for (const auto& traj : ensemble) {
    const Vector delta = traj.weights.back() - mean;
    cov += delta * delta.transpose();
  }
  cov /= static_cast<double>(ensemble.size() - 1);
  const auto law_final =
      dynamics::propagate_gaussian_ou(pot, init, beta_inv, icfg.horizon);

  SummaryWriter summary(cfg);
  auto& doc = summary.doc();
  const auto& final_row = series.rows.back();
  SpeedLimitReport report;
  report.horizon_T = final_row[0];
  report.w2_sq = final_row[1];
  report.entropy = final_row[2];
  report.t_sl = final_row[3];
  report.inefficiency = final_row[4];
  report.geo_length = std::sqrt(report.w2_sq);
  report.sub_unity_inefficiency = *report.inefficiency < 1.0;
  report_into(doc, "report", report);
  doc.set_double("mc.mean_abs_err",
                 (mean - law_final.mean()).cwiseAbs().maxCoeff());
  doc.set_double("mc.cov_abs_err",
                 (cov - law_final.covariance()).cwiseAbs().maxCoeff());
  summary.write(cfg.output_dir);
}

void run_analyze(const ExperimentConfig& cfg) {
  const auto& params = cfg.parameters;
  ArchiveInfo info;
  const Trajectory traj = ingest_trajectory(params.get_string("archive"), &info);

  std::optional<std::size_t> warm = cfg.warm_start_index;
  if (!warm && info.warm_start_index) warm = info.warm_start_index;

  const auto analysis = analyze_trajectory(traj, warm);

  SummaryWriter summary(cfg);
  auto& doc = summary.doc();
  doc.set("time_unit", info.time_unit);
  report_into(doc, "cold", analysis.cold);
  if (analysis.warm) {
    doc.set_int("warm_start_index", static_cast<long long>(*warm));
    report_into(doc, "warm", *analysis.warm);
  }
  summary.write(cfg.output_dir);

  for (const auto& indices : cfg.triplets) {
    const auto trace = weight_triplet_trace(traj, indices);
    PlotTable table;
    table.columns = {"t[time]", "w_" + std::to_string(indices[0]) + "[weight]",
                     "w_" + std::to_string(indices[1]) + "[weight]",
                     "w_" + std::to_string(indices[2]) + "[weight]"};
    for (const auto& row : trace.rows) {
      table.rows.push_back({row[0], row[1], row[2], row[3]});
    }
    std::ostringstream name;
    name << "triplet_" << indices[0] << "_" << indices[1] << "_" << indices[2]
         << ".tsv";
    emit_plot_data(table, (fs::path(cfg.output_dir) / name.str()).string());
  }
}

}  // namespace

const char* kind_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::ntk_scaling: return "ntk_scaling";
    case ExperimentKind::ntk_inefficiency: return "ntk_inefficiency";
    case ExperimentKind::linreg_finite: return "linreg_finite";
    case ExperimentKind::linreg_asymptotic: return "linreg_asymptotic";
    case ExperimentKind::langevin_sim: return "langevin_sim";
    case ExperimentKind::analyze_trajectory: return "analyze_trajectory";
  }
  return "unknown";
}

void ExperimentConfig::validate() const {
  switch (kind) {
    case ExperimentKind::ntk_scaling:
    case ExperimentKind::ntk_inefficiency:
      parameters.require_keys({"alpha", "delta", "modes", "t_min", "t_max",
                               "t_points"});
      if (parameters.get_int("modes") < 1) {
        throw ConfigError("modes must be >= 1");
      }
      break;
    case ExperimentKind::linreg_finite:
      parameters.require_keys({"d", "n", "lambda", "beta", "alpha"});
      if (parameters.get_int("d") < 1 || parameters.get_int("n") < 1) {
        throw ConfigError("d and n must be >= 1");
      }
      if (parameters.get_int_or("seeds", 1) < 1) {
        throw ConfigError("seeds must be >= 1");
      }
      break;
    case ExperimentKind::linreg_asymptotic:
      parameters.require_keys({"gamma", "lambda", "alpha", "beta_min",
                               "beta_max", "beta_points"});
      break;
    case ExperimentKind::langevin_sim:
      parameters.require_keys({"dimension", "beta_inv", "dt", "horizon",
                               "realizations"});
      if (parameters.get_int("dimension") < 1) {
        throw ConfigError("dimension must be >= 1");
      }
      if (parameters.get_int("realizations") < 1) {
        throw ConfigError("realizations must be >= 1");
      }
      break;
    case ExperimentKind::analyze_trajectory:
      parameters.require_keys({"archive"});
      break;
  }
  if (output_dir.empty()) {
    throw ConfigError("output directory must not be empty");
  }
}

void run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) {
    throw IoError("cannot create output directory " + cfg.output_dir + ": " +
                  ec.message());
  }
  switch (cfg.kind) {
    case ExperimentKind::ntk_scaling: run_ntk_scaling(cfg); break;
    case ExperimentKind::ntk_inefficiency: run_ntk_inefficiency(cfg); break;
    case ExperimentKind::linreg_finite: run_linreg_finite(cfg); break;
    case ExperimentKind::linreg_asymptotic: run_linreg_asymptotic(cfg); break;
    case ExperimentKind::langevin_sim: run_langevin_sim(cfg); break;
    case ExperimentKind::analyze_trajectory: run_analyze(cfg); break;
  }
}

}  // namespace tsl::harness
