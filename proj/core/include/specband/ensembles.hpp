#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <variant>

#include "specband/errors.hpp"

namespace specband::ens {

//! Named entry distributions.  Every sampler is standardized: mean 0,
//! variance 1 before the per-entry scale ν_ij is applied.
enum class Sampler {
  gaussian,               // N(0,1)
  rademacher,             // ±1 with equal probability
  uniform,                // U[-√3, √3]
  symmetric_exponential,  // Laplace scaled to unit variance: P(|X|>x) = e^{-√2 x}
  symmetric_pareto,       // sign·U^{-1/λ} rescaled to unit variance (λ > 2)
};

//! Tail class of the entry distribution, with its declared parameters.
//!
//! The class determines which deviation bound applies downstream:
//!   bounded          |X| ≤ D almost surely
//!   log_sobolev      logarithmic Sobolev inequality with constant c_ls
//!   sub_exponential  P(|X| > x) ≤ c0·exp(-lambda·x)
//!   power_law        P(|X| > x) ≤ x^{-lambda}
struct MeasureSpec {
  enum class Family { bounded, log_sobolev, sub_exponential, power_law };

  Family family = Family::log_sobolev;
  Sampler sampler = Sampler::gaussian;
  double D = 0.0;       // bounded: a.s. bound on the standardized draw
  double c_ls = 0.0;    // log_sobolev constant
  double lambda = 0.0;  // tail decay parameter
  double c0 = 1.0;      // sub_exponential prefactor

  //! Standard Gaussian entries; satisfies the log-Sobolev inequality with constant 1.
  static MeasureSpec gaussian();
  //! ±1 entries; bounded with D = 1.
  static MeasureSpec rademacher();
  //! U[-√3, √3] entries; bounded with D = √3.
  static MeasureSpec uniform();
  //! Unit-variance Laplace entries with exact tail P(|X|>x) = e^{-√2 x}.
  //! The declared (lambda, c0) must dominate that tail: lambda ≤ √2, c0 ≥ 1.
  static MeasureSpec symmetric_exponential(double lambda, double c0 = 1.0);
  //! Unit-variance symmetric Pareto entries with P(|X|>x) ≤ x^{-lambda}; needs lambda > 2
  //! so the variance exists.
  static MeasureSpec symmetric_pareto(double lambda);

  //! Throws config_error on an unsupported (family, sampler) pairing or
  //! parameters under which the declared tail bound is false.
  void validate() const;
};

//! Shape, field, variance profile and seed of a random matrix ensemble.
struct EnsembleConfig {
  int n = 0;  // rows
  int m = 0;  // columns
  int kappa = 1;  // 1 = real entries, 2 = complex (independent Re/Im parts)
  Eigen::MatrixXd nu_profile;  // n×m per-entry standard deviations; empty = all-ones
  double nu = 1.0;             // max_{i,j} ν_ij
  MeasureSpec measure;
  std::uint64_t seed = 0;

  //! ν_ij for entry (i, j); falls back to `nu` when no profile is set.
  double nu_at(int i, int j) const;
  //! Throws config_error when dimensions, κ, or the profile/nu cap are inconsistent.
  void validate() const;
};

//! Truncation threshold and truncated standard deviation for heavy tails.
//! tau_c is the smallest threshold with P(|X| > tau_c) ≤ 1/(m·n^{c(n)+1});
//! sigma_c² = E[X²·1{|X| < tau_c}] for the standardized (unit-variance) entry law.
struct TruncationParams {
  double c_of_n = 0.0;
  double tau_c = 0.0;
  double sigma_c = 0.0;
};

using SampledMatrix = std::variant<Eigen::MatrixXd, Eigen::MatrixXcd>;

//! Draw one matrix from the ensemble.  Deterministic for a fixed config:
//! identical (config, seed) gives a bit-identical matrix.
SampledMatrix sample_matrix(const EnsembleConfig& cfg);

//! Real-field convenience path; requires kappa == 1.
Eigen::MatrixXd sample_real(const EnsembleConfig& cfg);

//! Complex path; kappa == 2 draws independent real and imaginary parts, each
//! with variance ν_ij²; kappa == 1 yields a real matrix stored as complex.
Eigen::MatrixXcd sample_complex(const EnsembleConfig& cfg);

//! Closed-form truncation parameters for the heavy-tailed samplers.
//! Throws config_error for bounded/log-Sobolev measures (no truncation applies).
TruncationParams truncation_params(const MeasureSpec& measure, int m, int n, double c_of_n);

//! Zero out entries with |M_ij| ≥ tau_c (strictly smaller entries survive).
Eigen::MatrixXd truncate_matrix(const Eigen::MatrixXd& M, double tau_c);
Eigen::MatrixXcd truncate_matrix(const Eigen::MatrixXcd& M, double tau_c);

//! Canonical string names used in config files and the CLI.
std::string to_string(Sampler s);
std::string to_string(MeasureSpec::Family f);
Sampler sampler_from_string(const std::string& name);
MeasureSpec::Family family_from_string(const std::string& name);

//! Build a MeasureSpec from its config-file keys (measure, sampler, D, c_ls,
//! lambda); missing parameters fall back to the factory defaults per sampler.
MeasureSpec measure_from_kv(const std::map<std::string, std::string>& kv);

//! Serialize/deserialize the flat key-value form (keys: n, m, kappa, nu,
//! measure, sampler, D, c_ls, lambda, c0, seed).
std::map<std::string, std::string> ensemble_to_kv(const EnsembleConfig& cfg);
EnsembleConfig ensemble_from_kv(const std::map<std::string, std::string>& kv);

}  // namespace specband::ens
