#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "specband/errors.hpp"

namespace specband::spectral {

//! A linear spectral statistic f₀(M) = (1/n)·Σ_{i=1}^{min(m,n)} f(λ_i) over the
//! eigenvalues of the Gram matrix (1/n)·M·R·R*·M*, together with the data the
//! deviation bounds need: the spectral norm ρ ≥ ‖R‖ and the Lipschitz norm of
//! g(x) = f(x²).
struct SpectralStatistic {
  enum class Kind { log_shifted, inverse_shifted, user };

  Kind kind = Kind::log_shifted;
  double eps = 1.0;                    // shift for the named variants
  std::function<double(double)> fn;    // user-supplied f
  double user_lip = 0.0;               // declared Lipschitz norm of g for user f
  Eigen::MatrixXd R;                   // deterministic m×m factor; empty = r_scale·I
  double r_scale = 1.0;                // scale when R is the identity
  double rho = 1.0;                    // ≥ ‖R‖, set by with_R / with_scaled_identity

  //! f(x) = log(eps + x); eps ≥ 0 (eps = 0 only fails at a zero eigenvalue).
  static SpectralStatistic log_shifted(double eps);
  //! f(x) = 1/(eps + x).
  static SpectralStatistic inverse_shifted(double eps);
  //! User-supplied f with a declared Lipschitz norm for g(x) = f(x²).
  static SpectralStatistic user(std::function<double(double)> f, double lip);

  //! Attach an explicit R; computes ‖R‖ and stores it as rho.
  SpectralStatistic& with_R(Eigen::MatrixXd R_in);
  //! Use R = s·I (never materialized); rho = |s|.
  SpectralStatistic& with_scaled_identity(double s);

  //! Evaluate f at one eigenvalue; throws numeric_error when undefined there.
  double f(double x) const;
};

//! f₀ value plus the spectrum it was computed from.
struct StatValue {
  double value = 0.0;
  std::vector<double> eigenvalues;  // descending, length n, clamped ≥ 0
};

//! Eigenvalues of the Hermitian Gram matrix (1/n)·M·R·R*·M*, descending.
//! An empty R means R = I.  Values below 1e-10·λ_max are clamped to zero;
//! the returned list always has length n (zero-padded when n > m).
std::vector<double> gram_eigenvalues(const Eigen::MatrixXd& M, const Eigen::MatrixXd& R);
std::vector<double> gram_eigenvalues(const Eigen::MatrixXcd& M, const Eigen::MatrixXcd& R);

//! f₀(M) = (1/n)·Σ_{i=1}^{min(m,n)} f(λ_i): only the top min(m,n) eigenvalues
//! enter the sum.  Throws numeric_error if f is undefined at some eigenvalue.
double eval_f0(const Eigen::MatrixXd& M, const SpectralStatistic& stat);
double eval_f0(const Eigen::MatrixXcd& M, const SpectralStatistic& stat);

//! f₀ together with the spectrum.
StatValue eval_stat(const Eigen::MatrixXd& M, const SpectralStatistic& stat);
StatValue eval_stat(const Eigen::MatrixXcd& M, const SpectralStatistic& stat);

//! Lipschitz norm of g(x) = f(x²):
//!   log_shifted(eps)     → eps^{-1/2}
//!   inverse_shifted(eps) → (3√3/8)·eps^{-3/2}
//!   user                 → the declared value
double lipschitz_bound(const SpectralStatistic& stat);

//! A convex surrogate pair: g on the singular-value axis and f(x) = g(√x) on
//! the eigenvalue axis, with the surrogate's Lipschitz norm.
struct SurrogatePair {
  std::function<double(double)> g;
  std::function<double(double)> f;
  double lip = 0.0;
};

//! Concave minorant of x ↦ log(eps + x²): the log branch for x ≥ √eps,
//! extended linearly below the knee with slope 1/√eps (tangent at the
//! inflection, so curvature keeps one sign).  Sandwich: f_eps(x) ≤ log(eps+x)
//! ≤ f_{(e/2)eps}(x) for x ≥ 0.
SurrogatePair convexify_log(double eps);

//! Convex surrogate of x ↦ 1/(eps² + x²): the rational branch for x > eps/√3,
//! extended linearly below the knee with slope −3√3/(8·eps³).  Sandwich for
//! f(x) = 1/(s + x) with s = 1/SNR: f̃ at eps = (3/(2√2))·s^{1/2} lower-bounds
//! and eps = s^{1/2} upper-bounds.
SurrogatePair convexify_inv(double eps);

}  // namespace specband::spectral
