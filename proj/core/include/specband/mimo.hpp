#pragma once

#include <Eigen/Dense>
#include <optional>

#include "specband/ensembles.hpp"
#include "specband/errors.hpp"

namespace specband::mimo {

//! A random MIMO channel: H is n_r×n_t with i.i.d. zero-mean unit-variance
//! entries drawn from `measure`, observed at signal-to-noise ratio `snr`.
struct ChannelConfig {
  int n_t = 0;
  int n_r = 0;
  double alpha = 0.0;  // n_t / n_r
  double snr = 0.0;
  int n = 0;  // min(n_t, n_r)
  ens::MeasureSpec measure;

  static ChannelConfig make(int n_r, int n_t, double snr, ens::MeasureSpec measure);
  void validate() const;
};

//! Interval for the per-receive-antenna mutual information C/n_r.
struct MutualInfoInterval {
  double first_order = 0.0;  // plug-in center (no residuals)
  double lo = 0.0;
  double hi = 0.0;
  double prob = 0.0;  // clamped to [0,1]
  bool vacuous = false;
  enum class Regime { exact_R, high_snr } regime = Regime::exact_R;
};

//! The closed-form residual terms entering the mutual-information intervals:
//! twelve r-terms (deviation spans) and eight γ-terms (high-SNR drift).
//! Fields for families whose scale parameter was not supplied are NaN.
//! Suffixes: _pos = α ≥ 1 branch, _neg = α < 1 branch.
struct TableIIIResiduals {
  double r_bd_lb_pos, r_bd_ub_pos, r_bd_lb_neg, r_bd_ub_neg;
  double r_ls_lb_pos, r_ls_ub_pos, r_ls_lb_neg, r_ls_ub_neg;
  double r_ht_lb_pos, r_ht_ub_pos, r_ht_lb_neg, r_ht_ub_neg;
  double gamma_lb_pos, gamma_lb_neg;  // measure-independent lower drifts
  double gamma_bd_ub_pos, gamma_bd_ub_neg;
  double gamma_ls_ub_pos, gamma_ls_ub_neg;
  double gamma_ht_ub_pos, gamma_ht_ub_neg;
};

//! Inputs for the residual table.  beta is required whenever D or c_ls is
//! present (the bounded/lsi lower residuals carry a log(...)/β term).
struct Table3Inputs {
  double alpha = 0.0;
  double snr = 0.0;
  double beta = 0.0;
  int n_r = 0;
  int n_t = 0;
  std::optional<double> D;
  std::optional<double> c_ls;
  std::optional<double> tau_sigma;  // product τ_c·σ_c
  std::optional<double> sigma_c;    // heavy γ terms replace SNR by σ_c²·SNR
  std::optional<double> c_of_n;
  int n = 0;  // min(n_t, n_r), used in √(c(n)·log n)
};

TableIIIResiduals table3_residuals(const Table3Inputs& in);

//! C(H, SNR) = Σ log(1 + SNR·λ_i((1/n_t)·H·H*)) — natural log, equal power
//! allocation.  Not normalized by n_r.
double mutual_information(const Eigen::MatrixXd& H, double snr);
double mutual_information(const Eigen::MatrixXcd& H, double snr);

//! log of R(ε, n, m) = Σ_{i=0}^{min(n,m)} C(n,i)·ε^{n−i}·m^{−i}·m!/(m−i)!,
//! the distribution-free value of E[det(εI + (1/m)MM*)] for zero-mean
//! unit-variance entries.  Evaluated via log-gamma and log-sum-exp; stable
//! for n in the thousands.  Returns −inf only when ε = 0 and n > m.
double r_function(double eps, int n, int m);

//! Two-sided interval for C/n_r at finite SNR.  `beta_or_c` is β for
//! bounded/lsi and c(n) for heavy measures; heavy measures also require
//! `truncation` (over the unit-variance entry law).
MutualInfoInterval theorem2_interval(const ChannelConfig& cfg, double beta_or_c,
                                     std::optional<ens::TruncationParams> truncation = {});

//! High-SNR interval for C/n_r around the first-order expansion
//! log(SNR/e) + (α−1)log(α/(α−1)) (α ≥ 1) or α·log(SNR/(αe)) + (1−α)log(1/(1−α))
//! (α < 1).  Requires SNR > (2/e)·max{α,1}·max{e²α³, 4α}.
MutualInfoInterval corollary1_interval(const ChannelConfig& cfg, double beta_or_c,
                                       std::optional<ens::TruncationParams> truncation = {});

//! Deterministic bracket for (1/n)·log R(ε,n,m) − [(α−1)log(α/(α−1)) − 1],
//! valid for α = m/n ≥ 1 and 4/n < ε < min{1/(e²α³), 1/(4α)}.
struct Lemma3Bracket {
  double first_order = 0.0;
  double r_E_lo = 0.0;
  double r_E_hi = 0.0;
};
Lemma3Bracket lemma3_bracket(double eps, int n, int m);

//! Power offset L = log SNR − C/min{n_t, n_r} from the per-receive-antenna
//! mutual information mi_per_rx = C/n_r.
double power_offset(double mi_per_rx, double snr, int n_t, int n_r);

//! Interval version: reflects a C/n_r interval through log SNR (rescaling by
//! n_r/min{n_t,n_r} when α < 1); width is preserved up to that rescale.
MutualInfoInterval power_offset(const MutualInfoInterval& mi, double snr,
                                int n_t, int n_r);

//! First-order power offset: (α−1)log((α−1)/α) + 1 for α ≥ 1 (limit 1 at
//! α = 1), ((1−α)/α)·log(1−α) + log(eα) for α < 1.
double power_offset_first_order(double alpha);

}  // namespace specband::mimo
