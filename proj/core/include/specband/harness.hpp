#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "specband/concentration.hpp"
#include "specband/ensembles.hpp"
#include "specband/errors.hpp"
#include "specband/spectral.hpp"

namespace specband::harness {

//! Which statistic each Monte Carlo trial evaluates.
enum class Metric { mutual_info, power_offset, paper_nmmse, custom_f0 };

//! One full experiment: ensemble, metric, trial count, coverage target.
//!
//! Dimension conventions: for mutual_info / power_offset the ensemble is the
//! channel (n = n_r rows, m = n_t columns); for paper_nmmse it is the data
//! matrix (n = sample size, m = p input dimensions; entries are rescaled by
//! 1/√p so their variance is 1/p); custom_f0 uses the ensemble as-is with
//! R = I.
struct ExperimentConfig {
  Metric metric = Metric::mutual_info;
  ens::EnsembleConfig ensemble;
  double snr = 1.0;
  int trials = 1000;
  double alpha0 = 0.05;
  std::optional<double> beta;  // empty = derived from alpha0 per the active bound
  std::uint64_t seed = 0;
  std::string output_path;  // empty = caller decides

  // custom_f0 only: the statistic to evaluate.
  spectral::SpectralStatistic::Kind f_kind = spectral::SpectralStatistic::Kind::log_shifted;
  double f_eps = 1.0;

  void validate() const;
};

//! One Monte Carlo draw.
struct TrialRecord {
  int trial_index = 0;
  std::uint64_t seed_used = 0;
  double statistic_value = 0.0;
  std::int64_t wall_time_us = 0;
  bool ok = true;
  std::string error;
};

//! Aggregate of an experiment: empirical summary vs. theoretical band.
struct CoverageReport {
  int n_trials = 0;
  double empirical_mean = 0.0;
  double q025 = 0.0;
  double q500 = 0.0;
  double q975 = 0.0;
  conc::BoundResult theoretical_band;
  double coverage_fraction = 0.0;
  bool pass = false;
  int label_n = 0;  // the n_r (or n) this row describes
};

//! Run cfg.trials independent draws.  Per-trial sub-seeds come from
//! trial_seed(cfg.seed, index), so the records are identical for any `jobs`.
//! Individual numeric failures are recorded, not fatal; more than 1% failed
//! trials aborts with numeric_error.
std::vector<TrialRecord> run_trials(const ExperimentConfig& cfg, int jobs = 1);

//! Fraction of successful records inside [band.lo, band.hi]; pass when
//! coverage ≥ band.holds_with_prob − 3·√(prob·(1−prob)/n).
CoverageReport evaluate_coverage(const std::vector<TrialRecord>& records,
                                 const conc::BoundResult& band);

//! Theoretical band matching cfg's metric and measure (β defaults derived
//! from alpha0 when cfg.beta is empty).  For custom_f0 the band is the
//! observed-center confidence interval, anchored at `anchor`.
conc::BoundResult theoretical_band(const ExperimentConfig& cfg,
                                   std::optional<double> anchor = {});

//! Full pipeline: run trials, build the band, evaluate coverage.
CoverageReport run_experiment(const ExperimentConfig& cfg, int jobs = 1);

//! One output row of the four-case study: empirical quantiles of C/n_r
//! against the log-Sobolev deviation band centered at the empirical mean.
struct Fig1Row {
  int n_r = 0;
  double empirical_mean = 0.0;
  double q025 = 0.0;
  double q975 = 0.0;
  double band_lo = 0.0;
  double band_hi = 0.0;
  double coverage = 0.0;
  double prob = 0.0;
};

//! Gaussian-channel coverage study.  `which` ∈ {'a','b','c','d'} selects
//! (α, SNR) ∈ {(2,5), (2,2), (1/2,5), (1/2,2)}.  One row per n_r; the band is
//! the empirical mean ± the log-Sobolev spans with β = √(log(4/0.05)).
std::vector<Fig1Row> reproduce_fig1(char which, const std::vector<int>& n_r_list,
                                    int trials, std::uint64_t seed, int jobs = 1);

enum class ReportFormat { csv, json };

//! Emit rows with columns exactly
//! n_r,empirical_mean,q025,q975,band_lo,band_hi,coverage,prob
//! (CSV: header row, '.' decimal, LF line ends; JSON: array of objects with
//! the same keys).
void emit_rows(const std::vector<Fig1Row>& rows, ReportFormat format, std::ostream& out);

//! A CoverageReport as a single row in the same column layout.
Fig1Row report_row(const CoverageReport& report);

//! Write rows to a file path; throws io_error on failure.
void emit_report(const std::vector<Fig1Row>& rows, ReportFormat format,
                 const std::string& path);

//! Parse a flat INI-style config file ([section] headers, key = value lines,
//! '#' or ';' comments) into sections of key-value maps.
std::map<std::string, std::map<std::string, std::string>> parse_config_file(
    const std::string& path);

//! Build an ExperimentConfig from the [experiment] and [ensemble] sections.
ExperimentConfig experiment_from_config(
    const std::map<std::string, std::map<std::string, std::string>>& sections);

//! Nearest-rank quantile: the ⌈q·N⌉-th smallest value (1-indexed).
double nearest_rank_quantile(std::vector<double> values, double q);

}  // namespace specband::harness
