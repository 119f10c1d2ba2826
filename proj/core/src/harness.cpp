#include "specband/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "specband/mimo.hpp"
#include "specband/mmse.hpp"
#include "specband/rng.hpp"

namespace specband::harness {

namespace {

double parse_double_kv(const std::string& key, const std::string& text) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw config_error("invalid numeric value for '" + key + "': " + text);
  }
}

long long parse_int_kv(const std::string& key, const std::string& text) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw config_error("invalid integer value for '" + key + "': " + text);
  }
}

std::uint64_t parse_u64_kv(const std::string& key, const std::string& text) {
  try {
    std::size_t pos = 0;
    const std::uint64_t v = std::stoull(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw config_error("invalid seed value for '" + key + "': " + text);
  }
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

Metric metric_from_string(const std::string& name) {
  if (name == "mutual_info") return Metric::mutual_info;
  if (name == "power_offset") return Metric::power_offset;
  if (name == "paper_nmmse") return Metric::paper_nmmse;
  if (name == "custom_f0") return Metric::custom_f0;
  throw config_error("unknown metric: " + name);
}

spectral::SpectralStatistic make_statistic(const ExperimentConfig& cfg) {
  switch (cfg.f_kind) {
    case spectral::SpectralStatistic::Kind::log_shifted:
      return spectral::SpectralStatistic::log_shifted(cfg.f_eps);
    case spectral::SpectralStatistic::Kind::inverse_shifted:
      return spectral::SpectralStatistic::inverse_shifted(cfg.f_eps);
    case spectral::SpectralStatistic::Kind::user:
      break;
  }
  throw config_error("custom_f0 supports the named statistics only");
}

//! Evaluate cfg's metric on one freshly seeded draw.
double evaluate_metric(const ExperimentConfig& cfg, const ens::EnsembleConfig& ecfg) {
  switch (cfg.metric) {
    case Metric::mutual_info:
    case Metric::power_offset: {
      const int n_r = ecfg.n;
      const int n_t = ecfg.m;
      double capacity;
      if (ecfg.kappa == 2) {
        capacity = mimo::mutual_information(ens::sample_complex(ecfg), cfg.snr);
      } else {
        capacity = mimo::mutual_information(ens::sample_real(ecfg), cfg.snr);
      }
      const double mi_per_rx = capacity / n_r;
      if (cfg.metric == Metric::mutual_info) return mi_per_rx;
      return mimo::power_offset(mi_per_rx, cfg.snr, n_t, n_r);
    }
    case Metric::paper_nmmse: {
      const int p = ecfg.m;
      Eigen::MatrixXd M = ens::sample_real(ecfg);
      M *= 1.0 / std::sqrt(static_cast<double>(p));
      return mmse::paper_nmmse(M, cfg.snr);
    }
    case Metric::custom_f0: {
      const spectral::SpectralStatistic stat = make_statistic(cfg);
      if (ecfg.kappa == 2) return spectral::eval_f0(ens::sample_complex(ecfg), stat);
      return spectral::eval_f0(ens::sample_real(ecfg), stat);
    }
  }
  throw config_error("unknown metric");
}

//! β (or c(n)) making the active bound's failure probability equal alpha0.
double default_beta_or_c(const ExperimentConfig& cfg) {
  const auto family = cfg.ensemble.measure.family;
  const bool nmmse = cfg.metric == Metric::paper_nmmse;
  switch (family) {
    case ens::MeasureSpec::Family::bounded:
      // 8·exp(−β²/8) = α₀ (mutual information) or 8·exp(−β²/16) = α₀ (nmmse)
      return std::sqrt((nmmse ? 16.0 : 8.0) * std::log(8.0 / cfg.alpha0));
    case ens::MeasureSpec::Family::log_sobolev:
      // 4·exp(−β²) = α₀ or 4·exp(−β²/2) = α₀
      return std::sqrt((nmmse ? 2.0 : 1.0) * std::log(4.0 / cfg.alpha0));
    case ens::MeasureSpec::Family::sub_exponential:
    case ens::MeasureSpec::Family::power_law: {
      // 10·base^{−c(n)} = α₀; base is min(n_t,n_r), or p for the nmmse metric
      const int base = nmmse ? cfg.ensemble.m : std::min(cfg.ensemble.n, cfg.ensemble.m);
      if (base <= 1) throw config_error("heavy-tail defaults need a dimension > 1");
      return std::log(10.0 / cfg.alpha0) / std::log(static_cast<double>(base));
    }
  }
  throw config_error("unknown measure family");
}

bool is_heavy(const ens::MeasureSpec& measure) {
  return measure.family == ens::MeasureSpec::Family::sub_exponential ||
         measure.family == ens::MeasureSpec::Family::power_law;
}

conc::BoundResult to_bound(const mimo::MutualInfoInterval& iv, bool heavy,
                           double beta_or_c) {
  conc::BoundResult b;
  b.lo = iv.lo;
  b.hi = iv.hi;
  b.holds_with_prob = iv.prob;
  b.vacuous = iv.vacuous;
  if (heavy) {
    b.c_of_n = beta_or_c;
    b.center_kind = conc::CenterKind::truncated_expectation;
  } else {
    b.beta = beta_or_c;
    b.center_kind = conc::CenterKind::expectation;
  }
  return b;
}

conc::BoundResult to_bound(const mmse::NMMSEInterval& iv, bool heavy, double beta_or_c) {
  conc::BoundResult b;
  b.lo = iv.lo;
  b.hi = iv.hi;
  b.holds_with_prob = iv.prob;
  b.vacuous = iv.vacuous;
  if (heavy) {
    b.c_of_n = beta_or_c;
    b.center_kind = conc::CenterKind::truncated_expectation;
  } else {
    b.beta = beta_or_c;
    b.center_kind = conc::CenterKind::expectation;
  }
  return b;
}

void format_row(std::ostream& out, const Fig1Row& r) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                r.n_r, r.empirical_mean, r.q025, r.q975, r.band_lo, r.band_hi,
                r.coverage, r.prob);
  out << buf;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (trials < 1) throw config_error("trials must be >= 1");
  if (!(alpha0 > 0.0 && alpha0 < 1.0)) throw config_error("alpha0 must lie in (0, 1)");
  if (beta && !(*beta > 0.0)) throw config_error("beta override must be positive");
  ensemble.validate();
  if (metric != Metric::custom_f0 && !(snr > 0.0))
    throw config_error("snr must be positive");
  if (metric == Metric::paper_nmmse) {
    if (ensemble.kappa != 1)
      throw config_error("paper_nmmse draws real matrices (kappa = 1)");
    if (ensemble.m > ensemble.n)
      throw config_error("paper_nmmse needs p = m <= n");
  }
  if (metric == Metric::custom_f0) {
    if (f_kind == spectral::SpectralStatistic::Kind::user)
      throw config_error("custom_f0 supports the named statistics only");
    if (!(f_eps > 0.0))
      throw config_error("custom_f0 needs eps > 0 for a finite Lipschitz norm");
  }
}

std::vector<TrialRecord> run_trials(const ExperimentConfig& cfg, int jobs) {
  cfg.validate();
  if (jobs < 1) jobs = 1;
  jobs = std::min(jobs, cfg.trials);

  std::vector<TrialRecord> records(cfg.trials);
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int i = next.fetch_add(1); i < cfg.trials; i = next.fetch_add(1)) {
      ens::EnsembleConfig ecfg = cfg.ensemble;
      ecfg.seed = trial_seed(cfg.seed, static_cast<std::uint64_t>(i));
      TrialRecord rec;
      rec.trial_index = i;
      rec.seed_used = ecfg.seed;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        rec.statistic_value = evaluate_metric(cfg, ecfg);
        rec.ok = true;
      } catch (const std::exception& e) {
        rec.ok = false;
        rec.error = e.what();
        rec.statistic_value = std::numeric_limits<double>::quiet_NaN();
      }
      rec.wall_time_us = std::chrono::duration_cast<std::chrono::microseconds>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
      records[i] = std::move(rec);
    }
  };

  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  int failed = 0;
  const TrialRecord* first_failure = nullptr;
  for (const auto& rec : records) {
    if (!rec.ok) {
      ++failed;
      if (!first_failure) first_failure = &rec;
    }
  }
  if (failed > 0.01 * cfg.trials) {
    std::ostringstream msg;
    msg << failed << " of " << cfg.trials << " trials failed (> 1%); first error: "
        << first_failure->error;
    throw numeric_error(msg.str());
  }
  return records;
}

CoverageReport evaluate_coverage(const std::vector<TrialRecord>& records,
                                 const conc::BoundResult& band) {
  std::vector<double> values;
  values.reserve(records.size());
  for (const auto& rec : records)
    if (rec.ok) values.push_back(rec.statistic_value);
  if (values.empty()) throw config_error("evaluate_coverage needs at least one record");

  CoverageReport report;
  report.n_trials = static_cast<int>(values.size());
  double sum = 0.0;
  int inside = 0;
  for (double v : values) {
    sum += v;
    if (v >= band.lo && v <= band.hi) ++inside;
  }
  report.empirical_mean = sum / values.size();
  report.q025 = nearest_rank_quantile(values, 0.025);
  report.q500 = nearest_rank_quantile(values, 0.5);
  report.q975 = nearest_rank_quantile(values, 0.975);
  report.theoretical_band = band;
  report.coverage_fraction = static_cast<double>(inside) / values.size();
  const double prob = band.holds_with_prob;
  const double buffer = 3.0 * std::sqrt(prob * (1.0 - prob) / values.size());
  report.pass = report.coverage_fraction >= prob - buffer;
  return report;
}

conc::BoundResult theoretical_band(const ExperimentConfig& cfg,
                                   std::optional<double> anchor) {
  cfg.validate();
  const ens::MeasureSpec& measure = cfg.ensemble.measure;
  const bool heavy = is_heavy(measure);
  const double beta_or_c = cfg.beta ? *cfg.beta : default_beta_or_c(cfg);

  switch (cfg.metric) {
    case Metric::mutual_info:
    case Metric::power_offset: {
      const int n_r = cfg.ensemble.n;
      const int n_t = cfg.ensemble.m;
      const auto channel = mimo::ChannelConfig::make(n_r, n_t, cfg.snr, measure);
      std::optional<ens::TruncationParams> trunc;
      if (heavy)
        trunc = ens::truncation_params(measure, cfg.ensemble.m, cfg.ensemble.n,
                                       beta_or_c);
      mimo::MutualInfoInterval iv = mimo::theorem2_interval(channel, beta_or_c, trunc);
      if (cfg.metric == Metric::power_offset)
        iv = mimo::power_offset(iv, cfg.snr, n_t, n_r);
      return to_bound(iv, heavy, beta_or_c);
    }
    case Metric::paper_nmmse: {
      auto est = mmse::EstimationConfig::make(cfg.ensemble.n, cfg.ensemble.m, cfg.snr,
                                              measure);
      // The Monte Carlo centers get their own deterministic stream, disjoint
      // from the per-trial sub-seeds.
      est.seed = splitmix64(~cfg.seed);
      std::optional<ens::TruncationParams> trunc;
      if (heavy)
        trunc = ens::truncation_params(measure, cfg.ensemble.m, cfg.ensemble.n,
                                       beta_or_c);
      const mmse::NMMSEInterval iv = mmse::theorem3_interval(est, beta_or_c, trunc);
      return to_bound(iv, heavy, beta_or_c);
    }
    case Metric::custom_f0: {
      const spectral::SpectralStatistic stat = make_statistic(cfg);
      conc::ScaleParams sp;
      sp.kappa = cfg.ensemble.kappa;
      sp.rho = 1.0;
      sp.nu = cfg.ensemble.nu;
      sp.lip = spectral::lipschitz_bound(stat);
      sp.n = cfg.ensemble.n;
      conc::MeasureCase mc;
      switch (measure.family) {
        case ens::MeasureSpec::Family::bounded:
          mc = conc::MeasureCase::bounded;
          sp.D = measure.D;
          break;
        case ens::MeasureSpec::Family::log_sobolev:
          mc = conc::MeasureCase::lsi;
          sp.c_ls = measure.c_ls;
          break;
        case ens::MeasureSpec::Family::sub_exponential:
          if (measure.c0 != 1.0)
            throw config_error(
                "the closed-form confidence interval assumes tail prefactor c0 = 1");
          mc = conc::MeasureCase::sub_exponential;
          sp.lambda = measure.lambda;
          break;
        case ens::MeasureSpec::Family::power_law:
          mc = conc::MeasureCase::power_law;
          sp.lambda = measure.lambda;
          break;
        default:
          throw config_error("unknown measure family");
      }
      return conc::confidence_interval(anchor.value_or(0.0), mc, sp, cfg.alpha0,
                                       cfg.ensemble.n, cfg.ensemble.m);
    }
  }
  throw config_error("unknown metric");
}

CoverageReport run_experiment(const ExperimentConfig& cfg, int jobs) {
  const std::vector<TrialRecord> records = run_trials(cfg, jobs);
  std::optional<double> anchor;
  if (cfg.metric == Metric::custom_f0) {
    double sum = 0.0;
    int ok = 0;
    for (const auto& rec : records)
      if (rec.ok) {
        sum += rec.statistic_value;
        ++ok;
      }
    if (ok == 0) throw numeric_error("all trials failed");
    anchor = sum / ok;
  }
  const conc::BoundResult band = theoretical_band(cfg, anchor);
  CoverageReport report = evaluate_coverage(records, band);
  report.label_n = cfg.ensemble.n;
  return report;
}

std::vector<Fig1Row> reproduce_fig1(char which, const std::vector<int>& n_r_list,
                                    int trials, std::uint64_t seed, int jobs) {
  double alpha, snr;
  switch (which) {
    case 'a': alpha = 2.0; snr = 5.0; break;
    case 'b': alpha = 2.0; snr = 2.0; break;
    case 'c': alpha = 0.5; snr = 5.0; break;
    case 'd': alpha = 0.5; snr = 2.0; break;
    default:
      throw config_error("case must be one of a, b, c, d");
  }
  if (trials < 1) throw config_error("trials must be >= 1");
  if (n_r_list.empty()) throw config_error("n_r list must be non-empty");

  const double alpha0 = 0.05;
  const double beta = std::sqrt(std::log(4.0 / alpha0));
  const double prob = 1.0 - 4.0 * std::exp(-beta * beta);

  std::vector<Fig1Row> rows;
  rows.reserve(n_r_list.size());
  for (int n_r : n_r_list) {
    if (n_r < 1) throw config_error("n_r must be >= 1");
    const long long n_t = std::llround(alpha * n_r);
    if (n_t < 1 || std::abs(alpha * n_r - n_t) > 1e-9)
      throw config_error("alpha*n_r must be a positive integer; got n_r = " +
                         std::to_string(n_r));

    ExperimentConfig cfg;
    cfg.metric = Metric::mutual_info;
    cfg.ensemble.n = n_r;
    cfg.ensemble.m = static_cast<int>(n_t);
    cfg.ensemble.kappa = 1;
    cfg.ensemble.measure = ens::MeasureSpec::gaussian();
    cfg.snr = snr;
    cfg.trials = trials;
    cfg.alpha0 = alpha0;
    cfg.seed = trial_seed(seed, static_cast<std::uint64_t>(n_r));

    const std::vector<TrialRecord> records = run_trials(cfg, jobs);
    std::vector<double> values;
    values.reserve(records.size());
    double sum = 0.0;
    for (const auto& rec : records)
      if (rec.ok) {
        values.push_back(rec.statistic_value);
        sum += rec.statistic_value;
      }
    if (values.empty()) throw numeric_error("all trials failed");
    const double mean = sum / values.size();

    mimo::Table3Inputs t3in;
    t3in.alpha = static_cast<double>(n_t) / n_r;
    t3in.snr = snr;
    t3in.beta = beta;
    t3in.n_r = n_r;
    t3in.n_t = static_cast<int>(n_t);
    t3in.c_ls = 1.0;
    t3in.n = std::min<int>(n_r, static_cast<int>(n_t));
    const mimo::TableIIIResiduals res = mimo::table3_residuals(t3in);
    const bool wide = t3in.alpha >= 1.0;
    const double r_lb = wide ? res.r_ls_lb_pos : res.r_ls_lb_neg;
    const double r_ub = wide ? res.r_ls_ub_pos : res.r_ls_ub_neg;

    Fig1Row row;
    row.n_r = n_r;
    row.empirical_mean = mean;
    row.q025 = nearest_rank_quantile(values, 0.025);
    row.q975 = nearest_rank_quantile(values, 0.975);
    row.band_lo = mean + beta * r_lb / n_r;
    row.band_hi = mean + beta * r_ub / n_r;
    int inside = 0;
    for (double v : values)
      if (v >= row.band_lo && v <= row.band_hi) ++inside;
    row.coverage = static_cast<double>(inside) / values.size();
    row.prob = prob;
    rows.push_back(row);
  }
  return rows;
}

void emit_rows(const std::vector<Fig1Row>& rows, ReportFormat format,
               std::ostream& out) {
  if (format == ReportFormat::csv) {
    out << "n_r,empirical_mean,q025,q975,band_lo,band_hi,coverage,prob\n";
    for (const auto& row : rows) format_row(out, row);
    return;
  }
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    arr.push_back({{"n_r", row.n_r},
                   {"empirical_mean", row.empirical_mean},
                   {"q025", row.q025},
                   {"q975", row.q975},
                   {"band_lo", row.band_lo},
                   {"band_hi", row.band_hi},
                   {"coverage", row.coverage},
                   {"prob", row.prob}});
  }
  out << arr.dump(2) << '\n';
}

Fig1Row report_row(const CoverageReport& report) {
  Fig1Row row;
  row.n_r = report.label_n;
  row.empirical_mean = report.empirical_mean;
  row.q025 = report.q025;
  row.q975 = report.q975;
  row.band_lo = report.theoretical_band.lo;
  row.band_hi = report.theoretical_band.hi;
  row.coverage = report.coverage_fraction;
  row.prob = report.theoretical_band.holds_with_prob;
  return row;
}

void emit_report(const std::vector<Fig1Row>& rows, ReportFormat format,
                 const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open for writing: " + path);
  emit_rows(rows, format, out);
  out.flush();
  if (!out) throw io_error("write failed: " + path);
}

std::map<std::string, std::map<std::string, std::string>> parse_config_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config file: " + path);
  std::map<std::string, std::map<std::string, std::string>> sections;
  std::string line;
  std::string current;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw config_error("malformed section header at line " +
                           std::to_string(line_no));
      current = trim(line.substr(1, line.size() - 2));
      sections[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error("expected key = value at line " + std::to_string(line_no));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw config_error("empty key at line " + std::to_string(line_no));
    sections[current][key] = value;
  }
  return sections;
}

ExperimentConfig experiment_from_config(
    const std::map<std::string, std::map<std::string, std::string>>& sections) {
  const auto exp_it = sections.find("experiment");
  if (exp_it == sections.end())
    throw config_error("config needs an [experiment] section");
  const auto ens_it = sections.find("ensemble");
  if (ens_it == sections.end())
    throw config_error("config needs an [ensemble] section");

  ExperimentConfig cfg;
  cfg.ensemble = ens::ensemble_from_kv(ens_it->second);

  bool saw_metric = false;
  for (const auto& [key, value] : exp_it->second) {
    if (key == "metric") {
      cfg.metric = metric_from_string(value);
      saw_metric = true;
    } else if (key == "snr") {
      cfg.snr = parse_double_kv(key, value);
    } else if (key == "trials") {
      cfg.trials = static_cast<int>(parse_int_kv(key, value));
    } else if (key == "alpha0") {
      cfg.alpha0 = parse_double_kv(key, value);
    } else if (key == "beta") {
      cfg.beta = parse_double_kv(key, value);
    } else if (key == "seed") {
      cfg.seed = parse_u64_kv(key, value);
    } else if (key == "output_path") {
      cfg.output_path = value;
    } else if (key == "statistic") {
      if (value == "log_shifted")
        cfg.f_kind = spectral::SpectralStatistic::Kind::log_shifted;
      else if (value == "inverse_shifted")
        cfg.f_kind = spectral::SpectralStatistic::Kind::inverse_shifted;
      else
        throw config_error("unknown statistic: " + value);
    } else if (key == "eps") {
      cfg.f_eps = parse_double_kv(key, value);
    } else {
      throw config_error("unknown key in [experiment]: " + key);
    }
  }
  if (!saw_metric) throw config_error("[experiment] needs a metric");
  cfg.validate();
  return cfg;
}

double nearest_rank_quantile(std::vector<double> values, double q) {
  if (values.empty()) throw config_error("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw config_error("quantile level must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const auto n = static_cast<long long>(values.size());
  long long rank = static_cast<long long>(std::ceil(q * n));
  rank = std::max(1LL, std::min(rank, n));
  return values[static_cast<std::size_t>(rank - 1)];
}

}  // namespace specband::harness
