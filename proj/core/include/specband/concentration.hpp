#pragma once

#include <optional>
#include <utility>

#include "specband/errors.hpp"

namespace specband::conc {

//! What a deviation interval is anchored to.
enum class CenterKind {
  expectation,            // E[f₀(M)]
  truncated_expectation,  // E[f₀(M̃)] over the truncated ensemble
  log_exp_mean,           // (1/n)·log E[exp(n·f₀)]
  observed_f0,            // a single observed statistic value
};

//! Which deviation-bound family applies.
enum class MeasureCase { bounded, lsi, heavy, sub_exponential, power_law };

//! Two-sided interval [lo, hi], the probability with which it holds, and the
//! β or c(n) that produced it.  When the interval's anchor is unknown to the
//! bound (the deviation statements around an expectation), lo/hi are offsets
//! around that anchor with center = 0.
struct BoundResult {
  double lo = 0.0;
  double hi = 0.0;
  double holds_with_prob = 0.0;  // clamped to [0,1]
  bool vacuous = false;          // set when the raw probability was ≤ 0
  std::optional<double> beta;
  std::optional<double> c_of_n;
  CenterKind center_kind = CenterKind::expectation;

  double half_width() const { return 0.5 * (hi - lo); }
};

//! Tail hypothesis P(|f₀ − E f₀| > y/n) ≤ c1·exp(−c2·y) (sub_exponential) or
//! ≤ c1·exp(−c2·y²) (sub_gaussian).
struct TailBound {
  enum class Kind { sub_exponential, sub_gaussian };
  Kind kind = Kind::sub_gaussian;
  double c1 = 0.0;
  double c2 = 0.0;
};

//! The three additive log constants appearing in the expectation-vs-log-mean
//! intervals: one per measure family.  Entries are NaN when the corresponding
//! scale parameter was not supplied.
struct TableIIConstants {
  double c_rho_f_D = 0.0;
  double c_rho_f_cls = 0.0;
  double c_rho_f_tau_sigma = 0.0;
};

//! Scale parameters shared by the deviation bounds.  Only the fields relevant
//! to the chosen measure case need to be set.
struct ScaleParams {
  int kappa = 1;     // 1 real, 2 complex
  double rho = 1.0;  // spectral norm bound on R
  double nu = 1.0;   // max entry standard deviation
  double lip = 1.0;  // Lipschitz norm of g(x) = f(x²)
  int n = 0;         // matrix row count (divides every width)
  std::optional<double> D;                             // bounded
  std::optional<double> c_ls;                          // log-Sobolev
  std::optional<std::pair<double, double>> tau_sigma;  // heavy: (tau_c, sigma_c)
  std::optional<double> lambda;                        // tail parameter (confidence_interval only)
};

//! Deviation of f₀ around E[f₀] for bounded entries with convex g.
//! Half-width β·D·ρ·ν·‖g‖_L/n, probability 1 − 4·exp(−β²/(8κ)).
//! Requires β > 8√π (strict).
BoundResult prop1_bounded(double D, double rho, double nu, double lip, int kappa,
                          double beta, int n);

//! Deviation under a log-Sobolev entry law.  Half-width β·√c_ls·ρ·ν·‖g‖_L/n,
//! probability 1 − 2·exp(−β²/κ).  Requires β > 0.
BoundResult prop1_lsi(double c_ls, double rho, double nu, double lip, int kappa,
                      double beta, int n);

//! Deviation of f₀(M̃) around E[f₀(M̃)] for truncated symmetric heavy tails.
//! Half-width 2κ·√(c(n)·log n)·τ_c·σ_c·ρ·‖g‖_L/n, probability 1 − 5·n^{−c(n)}.
BoundResult prop1_heavy(double tau_c, double sigma_c, double rho, double lip,
                        int kappa, double c_of_n, int n);

//! Gap between (1/n)·log E[exp(n·f₀)] and E[f₀]:
//!   sub_exponential (c2 > 1) → log(1 + c1/(c2−1))/n
//!   sub_gaussian    (c2 > 0) → log(1 + √(π·c1²/c2)·e^{1/(4c2)})/n
//! Contract: (1/n)·log E − gap ≤ E[f₀] ≤ (1/n)·log E.
double lemma1_gap(const TailBound& tail, int n);

//! Additive log constants, evaluated in log-safe form so the inner
//! exponential never overflows.  Supply D and/or c_ls and/or (tau_c, sigma_c);
//! missing families yield NaN in the result.
TableIIConstants table2_constants(int kappa, double rho, double nu, double lip,
                                  std::optional<double> D,
                                  std::optional<double> c_ls,
                                  std::optional<std::pair<double, double>> tau_sigma);

//! Interval for f₀ anchored at log_exp_mean = (1/n)·log E[exp(n·f₀)] (the
//! truncated-ensemble analogue for the heavy case):
//!   lo = center − width_term − constant_term/n,  hi = center + width_term,
//! with the width/constant/probability of the chosen measure case.
//! `beta_or_c` is β for bounded/lsi and c(n) for heavy.
BoundResult theorem1_interval(MeasureCase measure_case, double log_exp_mean,
                              const ScaleParams& params, double beta_or_c);

//! (1 − alpha0) confidence interval centered at one observed f₀ value.
//! bounded / lsi intervals contain E[f₀]; sub_exponential / power_law contain
//! the truncated-ensemble mean E[f₀(M̃)] (c(n) = log(5/α₀)/log n recorded in
//! the result).  The sub_exponential form assumes tail prefactor c0 = 1.
BoundResult confidence_interval(double f0_observed, MeasureCase measure_case,
                                const ScaleParams& params, double alpha0,
                                int n, int m);

}  // namespace specband::conc
