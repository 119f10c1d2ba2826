#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>

#include "specband/ensembles.hpp"
#include "specband/errors.hpp"

namespace specband::mmse {

//! Linear model y = √P·H·x + noise with H = A·M, where A is a deterministic
//! m×n mixing matrix (empty = identity, m = n) and M is n×p random with
//! E[M_ij] = 0, E[|M_ij|²] = 1/p.  `measure` describes the law of √p·M_ij.
struct EstimationConfig {
  int n = 0;  // sample size (rows of M)
  int p = 0;  // input dimension (columns of M)
  double alpha = 0.0;  // p/n, must be ≤ 1
  double snr = 0.0;
  Eigen::MatrixXd A;   // empty = identity
  double A_norm = 1.0; // recorded ‖A‖ (operator norm)
  ens::MeasureSpec measure;
  std::uint64_t seed = 0;

  static EstimationConfig make(int n, int p, double snr, ens::MeasureSpec measure,
                               Eigen::MatrixXd A = {});
  void validate() const;
};

//! Interval for the resolvent-trace statistic (1/p)·Σ 1/(SNR^{-1} + λ_i(H*H)).
struct NMMSEInterval {
  double lo = 0.0;
  double hi = 0.0;
  double prob = 0.0;  // clamped to [0,1]
  bool vacuous = false;
  enum class CenterKind { M_exact_gaussian, M_monte_carlo, M_truncated } center_kind =
      CenterKind::M_monte_carlo;
};

//! Closed-form residual terms for the NMMSE intervals.  Fields for families
//! whose scale parameter was not supplied are NaN.
struct TableIVResiduals {
  double tau_bd_lb, tau_bd_ub;
  double tau_ls_lb, tau_ls_ub;
  double tau_ht_lb, tau_ht_ub;
  double tau_g_lb, tau_g_ub;  // Gaussian closed-form drift terms
};

struct Table4Inputs {
  double snr = 0.0;
  double A_norm = 1.0;
  std::optional<double> D;
  std::optional<double> c_ls;
  std::optional<double> tau_sigma;  // product τ_c·σ_c
  std::optional<double> c_of_n;
  int n = 0;  // used in √(c(n)·log n)
  // Gaussian drift terms (τ_g) need all three of:
  int p = 0;
  double alpha = 0.0;
  bool with_gaussian = false;
};

TableIVResiduals table4_residuals(const Table4Inputs& in);

//! MMSE estimate x̂ = P·H*(σ²I + P·HH*)^{-1}·y, canonicalized to P = snr,
//! σ² = 1 (the estimate depends only on the ratio).  SPD solve, no inverse.
Eigen::VectorXd mmse_estimate(const Eigen::MatrixXd& H, const Eigen::VectorXd& y, double snr);
Eigen::VectorXcd mmse_estimate(const Eigen::MatrixXcd& H, const Eigen::VectorXcd& y, double snr);

//! (1/p)·Σ_{i=1}^{p} 1/(SNR^{-1} + λ_i(H*H)) — the spectral statistic the
//! intervals below bound.
double paper_nmmse(const Eigen::MatrixXd& H, double snr);
double paper_nmmse(const Eigen::MatrixXcd& H, double snr);

//! Normalized estimation error in [0, 1]: equals paper_nmmse/SNR.
double physical_nmmse(const Eigen::MatrixXd& H, double snr);
double physical_nmmse(const Eigen::MatrixXcd& H, double snr);

//! Monte Carlo estimate with standard error.
struct MCEstimate {
  double value = 0.0;
  double std_error = 0.0;
  int trials = 0;
};

//! M(δ, H) = (1/p)·E[tr((δI + H*H)^{-1})], estimated over `trials` draws of
//! H = A·M under cfg.  Deterministic for fixed (cfg, trials).
MCEstimate m_function(double delta, const EstimationConfig& cfg, int trials);

//! Two-sided interval for the resolvent-trace statistic.  `beta_or_c` is β
//! for bounded/lsi and c(n) for heavy measures (which also need `truncation`
//! over the √p-scaled entries).  Centers are Monte Carlo estimates of M(·)
//! over `mc_trials` draws.  `heavy_prob_base` sets the base of the heavy-case
//! failure probability 10·base^{−c(n)}; 0 means p.
NMMSEInterval theorem3_interval(const EstimationConfig& cfg, double beta_or_c,
                                std::optional<ens::TruncationParams> truncation = {},
                                int mc_trials = 400, int heavy_prob_base = 0);

//! Gaussian closed form: center α/(1−α) with drift τ_g and span β·τ_ls/p.
//! Requires α = p/n < 1 and n − p > 3.
NMMSEInterval corollary2_interval(int n, int p, double snr, double beta);

//! Exact inverse-Wishart moments for H with i.i.d. N(0, 1/p) entries:
//! E[tr((H*H)^{-1})] = p²/(n−p−1) and
//! E[tr((H*H)^{-2})] = p²(p(n−p−2)+p+p²)/((n−p)(n−p−1)(n−p−3)).
struct WishartTraces {
  double e_tr_inv = 0.0;
  double e_tr_inv_sq = 0.0;
};
WishartTraces inverse_wishart_traces(int n, int p);

}  // namespace specband::mmse
