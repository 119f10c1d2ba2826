//! Command-line driver: closed-form interval evaluation, seeded Monte Carlo
//! experiments, and plot-ready coverage tables.
//!
//! Exit codes: 0 success, 2 configuration/precondition error, 3 numeric
//! failure, 4 I/O failure.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "specband/concentration.hpp"
#include "specband/ensembles.hpp"
#include "specband/errors.hpp"
#include "specband/harness.hpp"
#include "specband/mimo.hpp"
#include "specband/mmse.hpp"

namespace {

using nlohmann::ordered_json;
namespace ens = specband::ens;
namespace conc = specband::conc;
namespace mimo = specband::mimo;
namespace mmse = specband::mmse;
namespace harness = specband::harness;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

//! Options shared by every subcommand.
struct GlobalOpts {
  std::uint64_t seed = 0;
  std::string format = "csv";
  int jobs = 1;

  harness::ReportFormat report_format() const {
    return format == "json" ? harness::ReportFormat::json : harness::ReportFormat::csv;
  }
};

//! Measure selection flags shared by the `bound` subcommands.
struct MeasureOpts {
  std::string family;
  std::string sampler;
  std::optional<double> D, c_ls, lambda, c0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--measure", family,
                    "measure family: bounded | log_sobolev | sub_exponential | power_law")
        ->required();
    cmd->add_option("--sampler", sampler,
                    "entry sampler (defaults to the family's canonical sampler)");
    cmd->add_option("--D", D, "bounded: almost-sure bound on the standardized entries");
    cmd->add_option("--c-ls", c_ls, "log-Sobolev constant");
    cmd->add_option("--lambda", lambda, "tail decay parameter");
    cmd->add_option("--c0", c0, "sub-exponential tail prefactor");
  }

  ens::MeasureSpec build() const {
    std::map<std::string, std::string> kv;
    kv["measure"] = family;
    if (!sampler.empty()) kv["sampler"] = sampler;
    if (D) kv["D"] = fmt(*D);
    if (c_ls) kv["c_ls"] = fmt(*c_ls);
    if (lambda) kv["lambda"] = fmt(*lambda);
    if (c0) kv["c0"] = fmt(*c0);
    return ens::measure_from_kv(kv);
  }
};

void emit_kv_table(const GlobalOpts& g, const std::vector<std::pair<std::string, double>>& fields) {
  if (g.format == "json") {
    ordered_json obj;
    for (const auto& [key, value] : fields) obj[key] = value;
    std::cout << obj.dump(2) << '\n';
    return;
  }
  std::string header, row;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) {
      header += ',';
      row += ',';
    }
    header += fields[i].first;
    row += fmt(fields[i].second);
  }
  std::cout << header << '\n' << row << '\n';
}

double default_beta_or_c_mi(const ens::MeasureSpec& measure, double alpha0, int n_min) {
  switch (measure.family) {
    case ens::MeasureSpec::Family::bounded:
      return std::sqrt(8.0 * std::log(8.0 / alpha0));
    case ens::MeasureSpec::Family::log_sobolev:
      return std::sqrt(std::log(4.0 / alpha0));
    default:
      if (n_min <= 1)
        throw specband::config_error("heavy-tail defaults need min(n_t, n_r) > 1");
      return std::log(10.0 / alpha0) / std::log(static_cast<double>(n_min));
  }
}

double default_beta_or_c_mmse(const ens::MeasureSpec& measure, double alpha0, int p) {
  switch (measure.family) {
    case ens::MeasureSpec::Family::bounded:
      return std::sqrt(16.0 * std::log(8.0 / alpha0));
    case ens::MeasureSpec::Family::log_sobolev:
      return std::sqrt(2.0 * std::log(4.0 / alpha0));
    default:
      if (p <= 1) throw specband::config_error("heavy-tail defaults need p > 1");
      return std::log(10.0 / alpha0) / std::log(static_cast<double>(p));
  }
}

bool is_heavy(const ens::MeasureSpec& m) {
  return m.family == ens::MeasureSpec::Family::sub_exponential ||
         m.family == ens::MeasureSpec::Family::power_law;
}

void run_bound_mi(const GlobalOpts& g, const MeasureOpts& mopts, double alpha,
                  double snr, int n_r, double alpha0, std::optional<double> beta,
                  bool high_snr) {
  const ens::MeasureSpec measure = mopts.build();
  const long long n_t = std::llround(alpha * n_r);
  if (n_t < 1 || std::abs(alpha * n_r - n_t) > 1e-9)
    throw specband::config_error("alpha*nr must be a positive integer");
  const auto cfg = mimo::ChannelConfig::make(n_r, static_cast<int>(n_t), snr, measure);
  const double beta_or_c =
      beta ? *beta : default_beta_or_c_mi(measure, alpha0, cfg.n);
  std::optional<ens::TruncationParams> trunc;
  if (is_heavy(measure))
    trunc = ens::truncation_params(measure, cfg.n_t, cfg.n_r, beta_or_c);
  const mimo::MutualInfoInterval iv = high_snr
                                          ? mimo::corollary1_interval(cfg, beta_or_c, trunc)
                                          : mimo::theorem2_interval(cfg, beta_or_c, trunc);
  emit_kv_table(g, {{"lo", iv.lo},
                    {"hi", iv.hi},
                    {"first_order", iv.first_order},
                    {"prob", iv.prob}});
}

void run_bound_mmse(const GlobalOpts& g, const MeasureOpts& mopts, int n, int p,
                    double snr, double alpha0, int mc_trials) {
  const ens::MeasureSpec measure = mopts.build();
  auto cfg = mmse::EstimationConfig::make(n, p, snr, measure);
  cfg.seed = g.seed;
  const double beta_or_c = default_beta_or_c_mmse(measure, alpha0, p);
  std::optional<ens::TruncationParams> trunc;
  if (is_heavy(measure)) trunc = ens::truncation_params(measure, p, n, beta_or_c);
  const mmse::NMMSEInterval iv =
      mmse::theorem3_interval(cfg, beta_or_c, trunc, mc_trials);
  emit_kv_table(g, {{"lo", iv.lo}, {"hi", iv.hi}, {"prob", iv.prob}});
}

void run_ci(const GlobalOpts& g, double f0, const std::string& family_s,
            const std::string& params, double alpha0) {
  conc::ScaleParams sp;
  int n = 0, m = 0;
  std::string token;
  std::istringstream in(params);
  while (std::getline(in, token, ',')) {
    const auto eq = token.find('=');
    if (eq == std::string::npos)
      throw specband::config_error("--params expects comma-separated key=value pairs");
    const std::string key = token.substr(0, eq);
    const std::string value = token.substr(eq + 1);
    double v;
    try {
      std::size_t pos = 0;
      v = std::stod(value, &pos);
      if (pos != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      throw specband::config_error("invalid value for '" + key + "': " + value);
    }
    if (key == "kappa")
      sp.kappa = static_cast<int>(v);
    else if (key == "rho")
      sp.rho = v;
    else if (key == "nu")
      sp.nu = v;
    else if (key == "lip")
      sp.lip = v;
    else if (key == "n")
      n = static_cast<int>(v);
    else if (key == "m")
      m = static_cast<int>(v);
    else if (key == "D")
      sp.D = v;
    else if (key == "c_ls")
      sp.c_ls = v;
    else if (key == "lambda")
      sp.lambda = v;
    else
      throw specband::config_error("unknown --params key: " + key);
  }
  sp.n = n;

  conc::MeasureCase mc;
  switch (ens::family_from_string(family_s)) {
    case ens::MeasureSpec::Family::bounded:
      mc = conc::MeasureCase::bounded;
      break;
    case ens::MeasureSpec::Family::log_sobolev:
      mc = conc::MeasureCase::lsi;
      break;
    case ens::MeasureSpec::Family::sub_exponential:
      mc = conc::MeasureCase::sub_exponential;
      break;
    case ens::MeasureSpec::Family::power_law:
      mc = conc::MeasureCase::power_law;
      break;
    default:
      throw specband::config_error("unknown measure family: " + family_s);
  }

  const conc::BoundResult b = conc::confidence_interval(f0, mc, sp, alpha0, n, m);
  emit_kv_table(g, {{"f0", f0}, {"lo", b.lo}, {"hi", b.hi}, {"prob", b.holds_with_prob}});
}

void run_simulate(const GlobalOpts& g, const std::string& config_path,
                  bool seed_given) {
  const auto sections = harness::parse_config_file(config_path);
  harness::ExperimentConfig cfg = harness::experiment_from_config(sections);
  if (seed_given) cfg.seed = g.seed;
  const harness::CoverageReport report = harness::run_experiment(cfg, g.jobs);
  const std::vector<harness::Fig1Row> rows = {harness::report_row(report)};
  if (!cfg.output_path.empty())
    harness::emit_report(rows, g.report_format(), cfg.output_path);
  else
    harness::emit_rows(rows, g.report_format(), std::cout);
}

void run_fig1(const GlobalOpts& g, const std::string& case_s, int trials,
              const std::string& out_path) {
  if (case_s.size() != 1)
    throw specband::config_error("--case must be one of a, b, c, d");
  const std::vector<int> n_r_list = {8, 16, 32, 64};
  const std::vector<harness::Fig1Row> rows =
      harness::reproduce_fig1(case_s[0], n_r_list, trials, g.seed, g.jobs);
  if (!out_path.empty())
    harness::emit_report(rows, g.report_format(), out_path);
  else
    harness::emit_rows(rows, g.report_format(), std::cout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"confidence intervals for spectral statistics of random matrices"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOpts g;
  CLI::Option* seed_opt = app.add_option("--seed", g.seed, "base RNG seed");
  app.add_option("--format", g.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--jobs", g.jobs, "worker threads for Monte Carlo trials")
      ->check(CLI::PositiveNumber);

  // rfunc
  double rf_eps = 0.0;
  int rf_n = 0, rf_m = 0;
  CLI::App* rfunc = app.add_subcommand(
      "rfunc", "log of the distribution-free determinant expectation R(eps, n, m)");
  rfunc->add_option("--eps", rf_eps)->required();
  rfunc->add_option("--n", rf_n)->required();
  rfunc->add_option("--m", rf_m)->required();
  rfunc->callback([&]() {
    emit_kv_table(g, {{"eps", rf_eps},
                      {"n", static_cast<double>(rf_n)},
                      {"m", static_cast<double>(rf_m)},
                      {"log_r", mimo::r_function(rf_eps, rf_n, rf_m)}});
  });

  // bound mi / bound mmse
  CLI::App* bound = app.add_subcommand("bound", "closed-form interval evaluation");
  bound->require_subcommand(1);
  bound->fallthrough();

  double mi_alpha = 0.0, mi_snr = 0.0, mi_alpha0 = 0.05;
  int mi_nr = 0;
  std::optional<double> mi_beta;
  bool mi_high_snr = false;
  MeasureOpts mi_measure;
  CLI::App* bmi = bound->add_subcommand("mi", "per-antenna mutual information interval");
  bmi->add_option("--alpha", mi_alpha, "n_t / n_r")->required();
  bmi->add_option("--snr", mi_snr)->required();
  bmi->add_option("--nr", mi_nr, "receive antennas")->required();
  bmi->add_option("--alpha0", mi_alpha0, "target failure probability");
  bmi->add_option("--beta", mi_beta, "deviation scale (c(n) for heavy tails)");
  bmi->add_flag("--high-snr", mi_high_snr, "use the high-SNR expansion");
  mi_measure.attach(bmi);
  bmi->callback([&]() {
    run_bound_mi(g, mi_measure, mi_alpha, mi_snr, mi_nr, mi_alpha0, mi_beta,
                 mi_high_snr);
  });

  int mm_n = 0, mm_p = 0, mm_trials = 400;
  double mm_snr = 0.0, mm_alpha0 = 0.05;
  MeasureOpts mm_measure;
  CLI::App* bmm = bound->add_subcommand("mmse", "normalized estimation-error interval");
  bmm->add_option("--n", mm_n, "samples (rows)")->required();
  bmm->add_option("--p", mm_p, "input dimension (columns)")->required();
  bmm->add_option("--snr", mm_snr)->required();
  bmm->add_option("--alpha0", mm_alpha0, "target failure probability");
  bmm->add_option("--trials", mm_trials, "Monte Carlo draws for the interval centers");
  mm_measure.attach(bmm);
  bmm->callback([&]() {
    run_bound_mmse(g, mm_measure, mm_n, mm_p, mm_snr, mm_alpha0, mm_trials);
  });

  // ci
  double ci_f0 = 0.0, ci_alpha0 = 0.05;
  std::string ci_measure, ci_params;
  CLI::App* ci = app.add_subcommand(
      "ci", "confidence interval centered at one observed statistic value");
  ci->add_option("--f0", ci_f0, "observed statistic")->required();
  ci->add_option("--measure", ci_measure, "measure family")->required();
  ci->add_option("--params", ci_params,
                 "comma-separated key=value scale parameters (n, m, kappa, rho, nu, "
                 "lip, D, c_ls, lambda)")
      ->required();
  ci->add_option("--alpha0", ci_alpha0, "target failure probability");
  ci->callback([&]() { run_ci(g, ci_f0, ci_measure, ci_params, ci_alpha0); });

  // simulate
  std::string sim_config;
  CLI::App* sim = app.add_subcommand("simulate", "run a config-file experiment");
  sim->add_option("--config", sim_config, "INI-style experiment file")->required();
  sim->callback([&]() { run_simulate(g, sim_config, seed_opt->count() > 0); });

  // fig1
  std::string f1_case, f1_out;
  int f1_trials = 2000;
  CLI::App* fig1 = app.add_subcommand(
      "fig1", "four-case coverage study over n_r in {8, 16, 32, 64}");
  fig1->add_option("--case", f1_case, "a | b | c | d")->required();
  fig1->add_option("--trials", f1_trials, "Monte Carlo trials per n_r");
  fig1->add_option("--out", f1_out, "output path (default: stdout)");
  fig1->callback([&]() { run_fig1(g, f1_case, f1_trials, f1_out); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const specband::config_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const specband::io_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
