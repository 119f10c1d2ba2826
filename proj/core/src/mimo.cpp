#include "specband/mimo.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "specband/logspace.hpp"
#include "specband/spectral.hpp"

namespace specband::mimo {

namespace {

constexpr double kBetaFloorBounded = 14.179630807244128;  // 8√π
const double kNaN = std::numeric_limits<double>::quiet_NaN();

//! (α−1)·log(α/(α−1)) for α ≥ 1, with its limit 0 at α = 1.
double alpha_entropy(double alpha) {
  if (alpha == 1.0) return 0.0;
  return -(alpha - 1.0) * std::log1p(-1.0 / alpha);
}

//! (1−α)·log(1/(1−α)) for α < 1.
double alpha_entropy_narrow(double alpha) {
  return -(1.0 - alpha) * std::log1p(-alpha);
}

void set_prob(MutualInfoInterval& r, double raw) {
  if (raw <= 0.0) {
    r.prob = 0.0;
    r.vacuous = true;
  } else {
    r.prob = std::min(raw, 1.0);
  }
}

template <typename Mat>
double mutual_information_impl(const Mat& H, double snr) {
  if (!(snr > 0.0)) throw config_error("snr must be positive");
  if (!H.allFinite()) throw numeric_error("mutual_information: non-finite entries in H");
  // (1/n_t)·H·H* and (1/n_t)·H*·H share their nonzero spectrum; the adjoint
  // has n_t rows, so the row-normalized Gram routine applies directly.
  Mat Hadj = H.adjoint();
  const auto eigs = spectral::gram_eigenvalues(Hadj, Mat());
  double c = 0.0;
  for (double lam : eigs) c += std::log1p(snr * lam);
  return c;
}

//! Case-independent skeleton of the finite-SNR interval: prefactor plus
//! (1/n_r)·log R at three shifted arguments plus residual spans.
struct IntervalPieces {
  double prefactor = 0.0;  // log SNR or α·log(SNR/α)
  double shift = 0.0;      // heavy tails add 2·log σ_c
  double eps_lo = 0.0, eps_mid = 0.0, eps_hi = 0.0;
  int d1 = 0, d2 = 0;      // R(·, d1, d2) argument order for this α branch
  double span_lo = 0.0, span_hi = 0.0;  // (β·)r^{lb}, (β·)r^{ub}
};

MutualInfoInterval assemble_interval(const ChannelConfig& cfg, const IntervalPieces& p) {
  MutualInfoInterval out;
  const double nr = cfg.n_r;
  out.first_order = p.prefactor + p.shift + r_function(p.eps_mid, p.d1, p.d2) / nr;
  out.lo = p.prefactor + p.shift + r_function(p.eps_lo, p.d1, p.d2) / nr + p.span_lo / nr;
  out.hi = p.prefactor + p.shift + r_function(p.eps_hi, p.d1, p.d2) / nr + p.span_hi / nr;
  out.regime = MutualInfoInterval::Regime::exact_R;
  return out;
}

//! Residual-table inputs for a channel config; heavy families contribute the
//! τ_c·σ_c product, σ_c, and c(n) at n = min(n_t, n_r).
Table3Inputs table3_inputs_for(const ChannelConfig& cfg, double beta_or_c,
                               const std::optional<ens::TruncationParams>& trunc) {
  Table3Inputs in;
  in.alpha = cfg.alpha;
  in.snr = cfg.snr;
  in.n_r = cfg.n_r;
  in.n_t = cfg.n_t;
  in.n = cfg.n;
  switch (cfg.measure.family) {
    case ens::MeasureSpec::Family::bounded:
      in.D = cfg.measure.D;
      in.beta = beta_or_c;
      break;
    case ens::MeasureSpec::Family::log_sobolev:
      in.c_ls = cfg.measure.c_ls;
      in.beta = beta_or_c;
      break;
    case ens::MeasureSpec::Family::sub_exponential:
    case ens::MeasureSpec::Family::power_law: {
      if (!trunc)
        throw config_error("heavy-tailed interval needs truncation parameters");
      in.tau_sigma = trunc->tau_c * trunc->sigma_c;
      in.sigma_c = trunc->sigma_c;
      in.c_of_n = beta_or_c;
      break;
    }
  }
  return in;
}

void check_heavy_c(double beta_or_c, const ens::TruncationParams& trunc) {
  if (!(beta_or_c >= 0.0)) throw config_error("c(n) must be non-negative");
  const double tol = 1e-9 * std::max(1.0, std::abs(beta_or_c));
  if (std::abs(beta_or_c - trunc.c_of_n) > tol)
    throw config_error("c(n) disagrees with the supplied truncation parameters");
}

}  // namespace

ChannelConfig ChannelConfig::make(int n_r, int n_t, double snr, ens::MeasureSpec measure) {
  ChannelConfig cfg;
  cfg.n_r = n_r;
  cfg.n_t = n_t;
  cfg.alpha = static_cast<double>(n_t) / static_cast<double>(n_r);
  cfg.snr = snr;
  cfg.n = std::min(n_t, n_r);
  cfg.measure = measure;
  cfg.validate();
  return cfg;
}

void ChannelConfig::validate() const {
  if (n_t < 1 || n_r < 1) throw config_error("channel needs n_t >= 1 and n_r >= 1");
  if (!(snr > 0.0)) throw config_error("snr must be positive");
  if (n != std::min(n_t, n_r)) throw config_error("n must equal min(n_t, n_r)");
  if (!(alpha > 0.0)) throw config_error("alpha must be positive");
  measure.validate();
}

TableIIIResiduals table3_residuals(const Table3Inputs& in) {
  if (!(in.alpha > 0.0)) throw config_error("alpha must be positive");
  if (!(in.snr > 0.0)) throw config_error("snr must be positive");
  if (in.n_r < 1 || in.n_t < 1) throw config_error("n_r and n_t must be >= 1");

  const double a = in.alpha;
  const double snr = in.snr;
  const double nr = in.n_r;
  const double nt = in.n_t;

  TableIIIResiduals t;
  t.r_bd_lb_pos = t.r_bd_ub_pos = t.r_bd_lb_neg = t.r_bd_ub_neg = kNaN;
  t.r_ls_lb_pos = t.r_ls_ub_pos = t.r_ls_lb_neg = t.r_ls_ub_neg = kNaN;
  t.r_ht_lb_pos = t.r_ht_ub_pos = t.r_ht_lb_neg = t.r_ht_ub_neg = kNaN;
  t.gamma_bd_ub_pos = t.gamma_bd_ub_neg = kNaN;
  t.gamma_ls_ub_pos = t.gamma_ls_ub_neg = kNaN;
  t.gamma_ht_ub_pos = t.gamma_ht_ub_neg = kNaN;

  // Lower drift terms depend on dimensions only.
  t.gamma_lb_pos = (0.5 * std::log(nr) - std::log((nt + 1.0) / (2.0 * M_PI))) / nr;
  t.gamma_lb_neg = a * (0.5 * std::log(nt) - std::log((nr + 1.0) / (2.0 * M_PI))) / nr;

  // Upper drift terms share one shape; S is SNR, or σ_c²·SNR for heavy tails.
  auto gamma_ub_pos_scaled = [&](double S) {
    return 1.5 * std::log(M_E * nr) / nr +
           4.0 * std::sqrt(2.0 * a / (M_E * S)) * 0.5 * std::log(M_E * S / (2.0 * a));
  };
  auto gamma_ub_neg_scaled = [&](double S) {
    return 1.5 * a * std::log(M_E * nt) / nr +
           4.0 * a * a * std::sqrt(2.0 / (M_E * S)) * 0.5 * std::log(M_E * S / 2.0);
  };

  if (in.D) {
    const double D = *in.D;
    if (!(D > 0.0)) throw config_error("D must be positive");
    if (!(in.beta > 0.0)) throw config_error("bounded residuals need beta > 0");
    t.r_bd_lb_pos = -D * std::sqrt(snr / a) -
                    log1p_prod_exp(0.5 * std::log(8.0 * M_PI * D * D * snr / a),
                                   8.0 * M_PI + 2.0 * D * D * snr / a) /
                        in.beta;
    t.r_bd_ub_pos = D * std::sqrt(2.0 * snr / (M_E * a));
    t.r_bd_lb_neg = -D * std::sqrt(snr) -
                    log1p_prod_exp(0.5 * std::log(8.0 * M_PI * D * D * snr),
                                   8.0 * M_PI + 2.0 * D * D * snr) /
                        in.beta;
    t.r_bd_ub_neg = D * std::sqrt(2.0 * snr / M_E);
    t.gamma_bd_ub_pos = gamma_ub_pos_scaled(snr);
    t.gamma_bd_ub_neg = gamma_ub_neg_scaled(snr);
  }

  if (in.c_ls) {
    const double c = *in.c_ls;
    if (!(c > 0.0)) throw config_error("c_ls must be positive");
    if (!(in.beta > 0.0)) throw config_error("log-sobolev residuals need beta > 0");
    t.r_ls_lb_pos = -std::sqrt(c * snr / a) -
                    log1p_prod_exp(0.5 * std::log(4.0 * M_PI * c * snr / a),
                                   c * snr / (4.0 * a)) /
                        in.beta;
    t.r_ls_ub_pos = std::sqrt(c * snr / a);
    t.r_ls_lb_neg = -std::sqrt(c * snr) -
                    log1p_prod_exp(0.5 * std::log(4.0 * M_PI * c * snr), c * snr / 4.0) /
                        in.beta;
    t.r_ls_ub_neg = std::sqrt(c * snr);
    t.gamma_ls_ub_pos = 1.5 * std::log(M_E * nr) / nr +
                        4.0 * std::sqrt(a / snr) * 0.5 * std::log(snr / a);
    t.gamma_ls_ub_neg = 1.5 * a * std::log(M_E * nt) / nr +
                        4.0 * a * a / std::sqrt(snr) * 0.5 * std::log(snr);
  }

  if (in.tau_sigma) {
    const double ts = *in.tau_sigma;
    if (!(ts > 0.0)) throw config_error("tau_c*sigma_c must be positive");
    if (!in.c_of_n || !in.sigma_c)
      throw config_error("heavy residuals need c_of_n and sigma_c");
    if (in.n <= 1) throw config_error("heavy residuals need n > 1 (log n)");
    const double width = ts * std::sqrt(8.0 * *in.c_of_n * std::log(in.n));
    t.r_ht_lb_pos = -width * std::sqrt(snr / a) -
                    log1p_prod_exp(0.5 * std::log(8.0 * M_PI * ts * ts * snr / a),
                                   8.0 * M_PI + 2.0 * ts * ts * snr / a);
    t.r_ht_ub_pos = width * std::sqrt(2.0 * snr / (M_E * a));
    // The α < 1 lower residual's inner exponent carries 4π (not 8π).
    t.r_ht_lb_neg = -width * std::sqrt(snr) -
                    log1p_prod_exp(0.5 * std::log(8.0 * M_PI * ts * ts * snr),
                                   4.0 * M_PI + 2.0 * ts * ts * snr);
    t.r_ht_ub_neg = width * std::sqrt(2.0 * snr / M_E);
    const double S = *in.sigma_c * *in.sigma_c * snr;
    t.gamma_ht_ub_pos = gamma_ub_pos_scaled(S);
    t.gamma_ht_ub_neg = gamma_ub_neg_scaled(S);
  }

  return t;
}

double mutual_information(const Eigen::MatrixXd& H, double snr) {
  return mutual_information_impl(H, snr);
}

double mutual_information(const Eigen::MatrixXcd& H, double snr) {
  return mutual_information_impl(H, snr);
}

double r_function(double eps, int n, int m) {
  if (!(eps >= 0.0)) throw config_error("r_function needs eps >= 0");
  if (n < 1 || m < 1) throw config_error("r_function needs n >= 1 and m >= 1");
  const int top = std::min(n, m);
  const double log_eps = std::log(eps);  // -inf at eps = 0
  const double log_m = std::log(static_cast<double>(m));
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(top) + 1);
  for (int i = 0; i <= top; ++i) {
    if (eps == 0.0 && i < n) continue;  // ε^{n-i} = 0 kills the term
    const double log_pow = (i < n) ? (n - i) * log_eps : 0.0;
    terms.push_back(log_choose(n, i) + log_pow + log_falling_factorial(m, i) -
                    i * log_m);
  }
  return log_sum_exp(terms);
}

MutualInfoInterval theorem2_interval(const ChannelConfig& cfg, double beta_or_c,
                                     std::optional<ens::TruncationParams> truncation) {
  cfg.validate();
  const bool wide = cfg.alpha >= 1.0;
  IntervalPieces p;
  p.prefactor = wide ? std::log(cfg.snr) : cfg.alpha * std::log(cfg.snr / cfg.alpha);
  p.d1 = wide ? cfg.n_r : cfg.n_t;
  p.d2 = wide ? cfg.n_t : cfg.n_r;
  const double eps_base = wide ? 1.0 / cfg.snr : cfg.alpha / cfg.snr;

  const Table3Inputs t3in = table3_inputs_for(cfg, beta_or_c, truncation);
  const TableIIIResiduals res = table3_residuals(t3in);

  MutualInfoInterval out;
  switch (cfg.measure.family) {
    case ens::MeasureSpec::Family::bounded: {
      if (!(beta_or_c > kBetaFloorBounded))
        throw config_error("bounded case needs beta > 8*sqrt(pi) = " +
                           std::to_string(kBetaFloorBounded));
      p.eps_lo = eps_base * 2.0 / M_E;
      p.eps_hi = eps_base * M_E / 2.0;
      p.eps_mid = eps_base;
      p.span_lo = beta_or_c * (wide ? res.r_bd_lb_pos : res.r_bd_lb_neg);
      p.span_hi = beta_or_c * (wide ? res.r_bd_ub_pos : res.r_bd_ub_neg);
      out = assemble_interval(cfg, p);
      set_prob(out, 1.0 - 8.0 * std::exp(-beta_or_c * beta_or_c / 8.0));
      return out;
    }
    case ens::MeasureSpec::Family::log_sobolev: {
      if (!(beta_or_c > 0.0)) throw config_error("log-sobolev case needs beta > 0");
      p.eps_lo = p.eps_hi = p.eps_mid = eps_base;
      p.span_lo = beta_or_c * (wide ? res.r_ls_lb_pos : res.r_ls_lb_neg);
      p.span_hi = beta_or_c * (wide ? res.r_ls_ub_pos : res.r_ls_ub_neg);
      out = assemble_interval(cfg, p);
      set_prob(out, 1.0 - 4.0 * std::exp(-beta_or_c * beta_or_c));
      return out;
    }
    case ens::MeasureSpec::Family::sub_exponential:
    case ens::MeasureSpec::Family::power_law: {
      check_heavy_c(beta_or_c, *truncation);
      const double s2 = truncation->sigma_c * truncation->sigma_c;
      if (!(s2 > 0.0)) throw config_error("sigma_c must be positive");
      p.shift = 2.0 * std::log(truncation->sigma_c);
      p.eps_lo = eps_base * 2.0 / (M_E * s2);
      p.eps_hi = eps_base * M_E / (2.0 * s2);
      p.eps_mid = eps_base / s2;
      p.span_lo = wide ? res.r_ht_lb_pos : res.r_ht_lb_neg;
      p.span_hi = wide ? res.r_ht_ub_pos : res.r_ht_ub_neg;
      out = assemble_interval(cfg, p);
      set_prob(out, 1.0 - 10.0 * std::pow(cfg.n, -beta_or_c));
      return out;
    }
  }
  throw config_error("unknown measure family");
}

MutualInfoInterval corollary1_interval(const ChannelConfig& cfg, double beta_or_c,
                                       std::optional<ens::TruncationParams> truncation) {
  cfg.validate();
  const double a = cfg.alpha;
  const double threshold = (2.0 / M_E) * std::max(a, 1.0) *
                           std::max(M_E * M_E * a * a * a, 4.0 * a);
  if (!(cfg.snr > threshold)) {
    std::ostringstream msg;
    msg << "high-SNR interval needs snr > (2/e)*max(alpha,1)*max(e^2*alpha^3, 4*alpha) = "
        << threshold;
    throw config_error(msg.str());
  }

  const bool wide = a >= 1.0;
  double first_order = wide
                           ? std::log(cfg.snr / M_E) + alpha_entropy(a)
                           : a * std::log(cfg.snr / (a * M_E)) + alpha_entropy_narrow(a);

  const Table3Inputs t3in = table3_inputs_for(cfg, beta_or_c, truncation);
  const TableIIIResiduals res = table3_residuals(t3in);
  const double gamma_lb = wide ? res.gamma_lb_pos : res.gamma_lb_neg;

  MutualInfoInterval out;
  out.regime = MutualInfoInterval::Regime::high_snr;

  switch (cfg.measure.family) {
    case ens::MeasureSpec::Family::bounded: {
      if (!(beta_or_c > kBetaFloorBounded))
        throw config_error("bounded case needs beta > 8*sqrt(pi) = " +
                           std::to_string(kBetaFloorBounded));
      out.first_order = first_order;
      out.lo = first_order + gamma_lb +
               beta_or_c * (wide ? res.r_bd_lb_pos : res.r_bd_lb_neg) / cfg.n_r;
      out.hi = first_order + (wide ? res.gamma_bd_ub_pos : res.gamma_bd_ub_neg) +
               beta_or_c * (wide ? res.r_bd_ub_pos : res.r_bd_ub_neg) / cfg.n_r;
      set_prob(out, 1.0 - 8.0 * std::exp(-beta_or_c * beta_or_c / 8.0));
      return out;
    }
    case ens::MeasureSpec::Family::log_sobolev: {
      if (!(beta_or_c > 0.0)) throw config_error("log-sobolev case needs beta > 0");
      out.first_order = first_order;
      out.lo = first_order + gamma_lb +
               beta_or_c * (wide ? res.r_ls_lb_pos : res.r_ls_lb_neg) / cfg.n_r;
      out.hi = first_order + (wide ? res.gamma_ls_ub_pos : res.gamma_ls_ub_neg) +
               beta_or_c * (wide ? res.r_ls_ub_pos : res.r_ls_ub_neg) / cfg.n_r;
      set_prob(out, 1.0 - 4.0 * std::exp(-beta_or_c * beta_or_c));
      return out;
    }
    case ens::MeasureSpec::Family::sub_exponential:
    case ens::MeasureSpec::Family::power_law: {
      check_heavy_c(beta_or_c, *truncation);
      first_order += std::log(truncation->sigma_c);
      out.first_order = first_order;
      out.lo = first_order + gamma_lb + (wide ? res.r_ht_lb_pos : res.r_ht_lb_neg) / cfg.n_r;
      out.hi = first_order + (wide ? res.gamma_ht_ub_pos : res.gamma_ht_ub_neg) +
               (wide ? res.r_ht_ub_pos : res.r_ht_ub_neg) / cfg.n_r;
      set_prob(out, 1.0 - 10.0 * std::pow(cfg.n, -beta_or_c));
      return out;
    }
  }
  throw config_error("unknown measure family");
}

Lemma3Bracket lemma3_bracket(double eps, int n, int m) {
  if (n < 1 || m < 1) throw config_error("lemma3_bracket needs n >= 1 and m >= 1");
  const double alpha = static_cast<double>(m) / n;
  if (!(alpha >= 1.0)) throw config_error("lemma3_bracket needs alpha = m/n >= 1");
  const double lo_w = 4.0 / n;
  const double hi_w = std::min(1.0 / (M_E * M_E * alpha * alpha * alpha),
                               1.0 / (4.0 * alpha));
  if (!(eps > lo_w && eps < hi_w)) {
    std::ostringstream msg;
    msg << "eps must lie in (" << lo_w << ", " << hi_w << ")";
    if (lo_w >= hi_w) msg << " — the window is empty at n = " << n << ", m = " << m;
    throw config_error(msg.str());
  }
  Lemma3Bracket out;
  out.first_order = alpha_entropy(alpha) - 1.0;
  out.r_E_lo = (0.5 * std::log(n) - std::log((m + 1.0) / (2.0 * M_PI))) / n;
  out.r_E_hi = 1.5 * std::log(M_E * n) / n +
               2.0 * std::sqrt(alpha * eps) * std::log(1.0 / (alpha * eps));
  return out;
}

double power_offset(double mi_per_rx, double snr, int n_t, int n_r) {
  if (!(snr > 0.0)) throw config_error("snr must be positive");
  if (n_t < 1 || n_r < 1) throw config_error("power_offset needs n_t >= 1 and n_r >= 1");
  const double factor = static_cast<double>(n_r) / std::min(n_t, n_r);
  return std::log(snr) - mi_per_rx * factor;
}

MutualInfoInterval power_offset(const MutualInfoInterval& mi, double snr,
                                int n_t, int n_r) {
  if (!(snr > 0.0)) throw config_error("snr must be positive");
  if (n_t < 1 || n_r < 1) throw config_error("power_offset needs n_t >= 1 and n_r >= 1");
  const double factor = static_cast<double>(n_r) / std::min(n_t, n_r);
  MutualInfoInterval out = mi;
  out.first_order = std::log(snr) - mi.first_order * factor;
  out.lo = std::log(snr) - mi.hi * factor;
  out.hi = std::log(snr) - mi.lo * factor;
  return out;
}

double power_offset_first_order(double alpha) {
  if (!(alpha > 0.0)) throw config_error("alpha must be positive");
  if (alpha >= 1.0) return 1.0 - alpha_entropy(alpha);
  return (1.0 - alpha) / alpha * std::log1p(-alpha) + 1.0 + std::log(alpha);
}

}  // namespace specband::mimo
