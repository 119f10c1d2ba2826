#include "specband/mmse.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <sstream>

#include "specband/rng.hpp"

namespace specband::mmse {

namespace {

constexpr double kBetaFloorBounded = 14.179630807244128;  // 8√π
constexpr double kThreeSqrt3 = 5.196152422706632;         // 3√3
constexpr double kTwoSqrt2 = 2.8284271247461903;          // 2√2
constexpr double kEightSqrt2 = 11.313708498984761;        // 8√2
const double kNaN = std::numeric_limits<double>::quiet_NaN();

void set_prob(NMMSEInterval& r, double raw) {
  if (raw <= 0.0) {
    r.prob = 0.0;
    r.vacuous = true;
  } else {
    r.prob = std::min(raw, 1.0);
  }
}

//! Eigenvalues of H*H (all cols(H) of them, ascending), clamped at zero.
template <typename Mat>
Eigen::VectorXd gram_full_eigenvalues(const Mat& H) {
  if (!H.allFinite()) throw numeric_error("non-finite entries in H");
  Mat G = H.adjoint() * H;
  G = ((G + Mat(G.adjoint())) * typename Mat::Scalar(0.5)).eval();
  Eigen::SelfAdjointEigenSolver<Mat> solver(G, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "eigensolver failed on a " << G.rows() << "x" << G.cols() << " Gram matrix";
    throw numeric_error(msg.str());
  }
  return solver.eigenvalues().cwiseMax(0.0);
}

template <typename Mat>
double resolvent_trace(const Mat& H, double delta) {
  const Eigen::VectorXd eigs = gram_full_eigenvalues(H);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < eigs.size(); ++i) acc += 1.0 / (delta + eigs[i]);
  return acc / static_cast<double>(H.cols());
}

template <typename Mat, typename Vec>
Vec mmse_estimate_impl(const Mat& H, const Vec& y, double snr) {
  if (!(snr > 0.0)) throw config_error("snr must be positive");
  if (y.size() != H.rows()) throw config_error("y must have one entry per row of H");
  if (!H.allFinite() || !y.allFinite())
    throw numeric_error("non-finite entries in H or y");
  Mat G = Mat::Identity(H.rows(), H.rows()) + snr * H * H.adjoint();
  Eigen::LDLT<Mat> ldlt(G);
  if (ldlt.info() != Eigen::Success)
    throw numeric_error("LDLT factorization failed in mmse_estimate");
  return snr * (H.adjoint() * ldlt.solve(y));
}

//! Monte Carlo mean of (1/p)·tr((δI + H*H)^{-1}) over draws of H = A·M.
//! A truncation threshold > 0 zeroes standardized entries at or above it
//! before the 1/√p rescale.
MCEstimate mc_m_value(double delta, const EstimationConfig& cfg, int trials,
                      double trunc_threshold) {
  if (!(delta > 0.0)) throw config_error("m_function needs delta > 0");
  if (trials < 1) throw config_error("m_function needs trials >= 1");
  ens::EnsembleConfig ecfg;
  ecfg.n = cfg.n;
  ecfg.m = cfg.p;
  ecfg.kappa = 1;
  ecfg.nu = 1.0;
  ecfg.measure = cfg.measure;
  const double inv_sqrt_p = 1.0 / std::sqrt(static_cast<double>(cfg.p));
  double sum = 0.0, sum_sq = 0.0;
  for (int t = 0; t < trials; ++t) {
    ecfg.seed = trial_seed(cfg.seed, static_cast<std::uint64_t>(t));
    Eigen::MatrixXd M = ens::sample_real(ecfg);
    if (trunc_threshold > 0.0) M = ens::truncate_matrix(M, trunc_threshold);
    M *= inv_sqrt_p;
    const double v = cfg.A.size() == 0 ? resolvent_trace(M, delta)
                                       : resolvent_trace(Eigen::MatrixXd(cfg.A * M), delta);
    sum += v;
    sum_sq += v * v;
  }
  MCEstimate est;
  est.trials = trials;
  est.value = sum / trials;
  if (trials > 1) {
    const double var = std::max(0.0, (sum_sq - sum * sum / trials) / (trials - 1));
    est.std_error = std::sqrt(var / trials);
  }
  return est;
}

}  // namespace

EstimationConfig EstimationConfig::make(int n, int p, double snr,
                                        ens::MeasureSpec measure, Eigen::MatrixXd A) {
  EstimationConfig cfg;
  cfg.n = n;
  cfg.p = p;
  cfg.alpha = static_cast<double>(p) / static_cast<double>(n);
  cfg.snr = snr;
  cfg.A = std::move(A);
  cfg.measure = measure;
  if (cfg.A.size() != 0) {
    if (!cfg.A.allFinite()) throw numeric_error("non-finite entries in A");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(cfg.A);
    cfg.A_norm = svd.singularValues().size() > 0 ? svd.singularValues()[0] : 0.0;
  }
  cfg.validate();
  return cfg;
}

void EstimationConfig::validate() const {
  if (n < 1 || p < 1) throw config_error("estimation model needs n >= 1 and p >= 1");
  if (p > n) throw config_error("estimation model needs p <= n");
  if (!(snr > 0.0)) throw config_error("snr must be positive");
  if (!(alpha > 0.0) || std::abs(alpha - static_cast<double>(p) / n) > 1e-12)
    throw config_error("alpha must equal p/n");
  if (!(A_norm > 0.0)) throw config_error("A_norm must be positive");
  if (A.size() != 0) {
    if (A.cols() != n) throw config_error("A must have n columns");
    if (A.rows() < p) throw config_error("A must have at least p rows");
  }
  measure.validate();
}

TableIVResiduals table4_residuals(const Table4Inputs& in) {
  if (!(in.snr > 0.0)) throw config_error("snr must be positive");
  if (!(in.A_norm > 0.0)) throw config_error("A_norm must be positive");
  const double snr15 = std::pow(in.snr, 1.5);
  const double an = in.A_norm;

  TableIVResiduals t;
  t.tau_bd_lb = t.tau_bd_ub = kNaN;
  t.tau_ls_lb = t.tau_ls_ub = kNaN;
  t.tau_ht_lb = t.tau_ht_ub = kNaN;
  t.tau_g_lb = t.tau_g_ub = kNaN;

  if (in.D) {
    if (!(*in.D > 0.0)) throw config_error("D must be positive");
    t.tau_bd_lb = -kTwoSqrt2 * *in.D * an * snr15 / kThreeSqrt3;
    t.tau_bd_ub = kThreeSqrt3 * *in.D * an * snr15 / 8.0;
  }
  if (in.c_ls) {
    if (!(*in.c_ls > 0.0)) throw config_error("c_ls must be positive");
    const double mag = kThreeSqrt3 * std::sqrt(*in.c_ls) * an * snr15 / 8.0;
    t.tau_ls_lb = -mag;
    t.tau_ls_ub = mag;
  }
  if (in.tau_sigma) {
    if (!(*in.tau_sigma > 0.0)) throw config_error("tau_c*sigma_c must be positive");
    if (!in.c_of_n) throw config_error("heavy residuals need c_of_n");
    if (in.n <= 1) throw config_error("heavy residuals need n > 1 (log n)");
    const double w = *in.tau_sigma * an * std::sqrt(*in.c_of_n * std::log(in.n)) * snr15;
    t.tau_ht_lb = -kEightSqrt2 * w / kThreeSqrt3;
    t.tau_ht_ub = kThreeSqrt3 * w / 2.0;
  }
  if (in.with_gaussian) {
    if (in.n < 1 || in.p < 1) throw config_error("gaussian drift terms need n, p >= 1");
    const double a = in.alpha;
    if (!(a > 0.0 && a < 1.0))
      throw config_error("gaussian drift terms need 0 < alpha < 1");
    const double d1 = 1.0 - a - 1.0 / in.n;
    const double d3 = 1.0 - a - 3.0 / in.n;
    if (!(d3 > 0.0))
      throw config_error("gaussian drift terms need 1 - alpha - 3/n > 0 (n - p > 3)");
    t.tau_g_ub = a / (in.n * d1 * d1);
    t.tau_g_lb = -a * a / (in.snr * d3 * d3 * d3);
  }
  return t;
}

Eigen::VectorXd mmse_estimate(const Eigen::MatrixXd& H, const Eigen::VectorXd& y,
                              double snr) {
  return mmse_estimate_impl<Eigen::MatrixXd, Eigen::VectorXd>(H, y, snr);
}

Eigen::VectorXcd mmse_estimate(const Eigen::MatrixXcd& H, const Eigen::VectorXcd& y,
                               double snr) {
  return mmse_estimate_impl<Eigen::MatrixXcd, Eigen::VectorXcd>(H, y, snr);
}

double paper_nmmse(const Eigen::MatrixXd& H, double snr) {
  if (!(snr > 0.0)) throw config_error("snr must be positive");
  return resolvent_trace(H, 1.0 / snr);
}

double paper_nmmse(const Eigen::MatrixXcd& H, double snr) {
  if (!(snr > 0.0)) throw config_error("snr must be positive");
  return resolvent_trace(H, 1.0 / snr);
}

double physical_nmmse(const Eigen::MatrixXd& H, double snr) {
  return paper_nmmse(H, snr) / snr;
}

double physical_nmmse(const Eigen::MatrixXcd& H, double snr) {
  return paper_nmmse(H, snr) / snr;
}

MCEstimate m_function(double delta, const EstimationConfig& cfg, int trials) {
  cfg.validate();
  return mc_m_value(delta, cfg, trials, 0.0);
}

NMMSEInterval theorem3_interval(const EstimationConfig& cfg, double beta_or_c,
                                std::optional<ens::TruncationParams> truncation,
                                int mc_trials, int heavy_prob_base) {
  cfg.validate();
  if (mc_trials < 1) throw config_error("theorem3_interval needs mc_trials >= 1");
  const double p = cfg.p;
  const double eps_lo = 8.0 / (9.0 * cfg.snr);
  const double eps_hi = 9.0 / (8.0 * cfg.snr);

  Table4Inputs t4in;
  t4in.snr = cfg.snr;
  t4in.A_norm = cfg.A_norm;
  t4in.n = cfg.n;

  NMMSEInterval out;
  switch (cfg.measure.family) {
    case ens::MeasureSpec::Family::bounded: {
      if (!(beta_or_c > kBetaFloorBounded))
        throw config_error("bounded case needs beta > 8*sqrt(pi) = " +
                           std::to_string(kBetaFloorBounded));
      t4in.D = cfg.measure.D;
      const TableIVResiduals res = table4_residuals(t4in);
      out.lo = mc_m_value(eps_lo, cfg, mc_trials, 0.0).value + beta_or_c * res.tau_bd_lb / p;
      out.hi = mc_m_value(eps_hi, cfg, mc_trials, 0.0).value + beta_or_c * res.tau_bd_ub / p;
      out.center_kind = NMMSEInterval::CenterKind::M_monte_carlo;
      set_prob(out, 1.0 - 8.0 * std::exp(-beta_or_c * beta_or_c / 16.0));
      return out;
    }
    case ens::MeasureSpec::Family::log_sobolev: {
      if (!(beta_or_c > 0.0)) throw config_error("log-sobolev case needs beta > 0");
      t4in.c_ls = cfg.measure.c_ls;
      const TableIVResiduals res = table4_residuals(t4in);
      const double center = mc_m_value(1.0 / cfg.snr, cfg, mc_trials, 0.0).value;
      out.lo = center + beta_or_c * res.tau_ls_lb / p;
      out.hi = center + beta_or_c * res.tau_ls_ub / p;
      out.center_kind = NMMSEInterval::CenterKind::M_monte_carlo;
      set_prob(out, 1.0 - 4.0 * std::exp(-beta_or_c * beta_or_c / 2.0));
      return out;
    }
    case ens::MeasureSpec::Family::sub_exponential:
    case ens::MeasureSpec::Family::power_law: {
      if (!truncation) throw config_error("heavy-tailed interval needs truncation parameters");
      if (!(beta_or_c >= 0.0)) throw config_error("c(n) must be non-negative");
      const double tol = 1e-9 * std::max(1.0, std::abs(beta_or_c));
      if (std::abs(beta_or_c - truncation->c_of_n) > tol)
        throw config_error("c(n) disagrees with the supplied truncation parameters");
      t4in.tau_sigma = truncation->tau_c * truncation->sigma_c;
      t4in.c_of_n = beta_or_c;
      const TableIVResiduals res = table4_residuals(t4in);
      out.lo = mc_m_value(eps_lo, cfg, mc_trials, truncation->tau_c).value +
               res.tau_ht_lb / p;
      out.hi = mc_m_value(eps_hi, cfg, mc_trials, truncation->tau_c).value +
               res.tau_ht_ub / p;
      out.center_kind = NMMSEInterval::CenterKind::M_truncated;
      const double base = heavy_prob_base > 0 ? heavy_prob_base : p;
      set_prob(out, 1.0 - 10.0 * std::pow(base, -beta_or_c));
      return out;
    }
  }
  throw config_error("unknown measure family");
}

NMMSEInterval corollary2_interval(int n, int p, double snr, double beta) {
  if (n < 1 || p < 1) throw config_error("corollary2_interval needs n >= 1 and p >= 1");
  if (!(snr > 0.0)) throw config_error("snr must be positive");
  if (!(beta > 0.0)) throw config_error("corollary2_interval needs beta > 0");
  const double alpha = static_cast<double>(p) / n;
  if (!(alpha < 1.0)) throw config_error("corollary2_interval needs alpha = p/n < 1");
  if (n - p <= 3) throw config_error("corollary2_interval needs n - p > 3");

  Table4Inputs t4in;
  t4in.snr = snr;
  t4in.A_norm = 1.0;
  t4in.c_ls = 1.0;
  t4in.with_gaussian = true;
  t4in.n = n;
  t4in.p = p;
  t4in.alpha = alpha;
  const TableIVResiduals res = table4_residuals(t4in);

  NMMSEInterval out;
  const double center = alpha / (1.0 - alpha);
  out.lo = center + res.tau_g_lb + beta * res.tau_ls_lb / p;
  out.hi = center + res.tau_g_ub + beta * res.tau_ls_ub / p;
  out.center_kind = NMMSEInterval::CenterKind::M_exact_gaussian;
  set_prob(out, 1.0 - 4.0 * std::exp(-beta * beta / 2.0));
  return out;
}

WishartTraces inverse_wishart_traces(int n, int p) {
  if (n < 1 || p < 1) throw config_error("inverse_wishart_traces needs n >= 1 and p >= 1");
  if (n - p <= 3) throw config_error("inverse_wishart_traces needs n - p > 3");
  const double pd = p;
  const double q = n - p;
  WishartTraces w;
  w.e_tr_inv = pd * pd / (q - 1.0);
  w.e_tr_inv_sq = pd * pd * (pd * (q - 2.0) + pd + pd * pd) /
                  (q * (q - 1.0) * (q - 3.0));
  return w;
}

}  // namespace specband::mmse
