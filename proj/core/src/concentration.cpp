#include "specband/concentration.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "specband/logspace.hpp"

namespace specband::conc {

namespace {

constexpr double kBetaFloorBounded = 14.179630807244128;  // 8√π
const double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_kappa(int kappa) {
  if (kappa != 1 && kappa != 2) throw config_error("kappa must be 1 or 2");
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0)) throw config_error(std::string(name) + " must be positive");
}

//! Fill probability from its raw (possibly negative) value, clamping to [0,1].
void set_prob(BoundResult& r, double raw) {
  if (raw <= 0.0) {
    r.holds_with_prob = 0.0;
    r.vacuous = true;
  } else {
    r.holds_with_prob = std::min(raw, 1.0);
  }
}

}  // namespace

BoundResult prop1_bounded(double D, double rho, double nu, double lip, int kappa,
                          double beta, int n) {
  require_positive(D, "D");
  require_positive(rho, "rho");
  require_positive(nu, "nu");
  require_positive(lip, "lip");
  require_kappa(kappa);
  if (n < 1) throw config_error("n must be >= 1");
  if (!(beta > kBetaFloorBounded))
    throw config_error("bounded deviation bound needs beta > 8*sqrt(pi) = " +
                       std::to_string(kBetaFloorBounded));
  BoundResult r;
  const double hw = beta * D * rho * nu * lip / n;
  r.lo = -hw;
  r.hi = hw;
  r.beta = beta;
  r.center_kind = CenterKind::expectation;
  set_prob(r, 1.0 - 4.0 * std::exp(-beta * beta / (8.0 * kappa)));
  return r;
}

BoundResult prop1_lsi(double c_ls, double rho, double nu, double lip, int kappa,
                      double beta, int n) {
  require_positive(c_ls, "c_ls");
  require_positive(rho, "rho");
  require_positive(nu, "nu");
  require_positive(lip, "lip");
  require_kappa(kappa);
  if (n < 1) throw config_error("n must be >= 1");
  if (!(beta > 0.0)) throw config_error("log-sobolev deviation bound needs beta > 0");
  BoundResult r;
  const double hw = beta * std::sqrt(c_ls) * rho * nu * lip / n;
  r.lo = -hw;
  r.hi = hw;
  r.beta = beta;
  r.center_kind = CenterKind::expectation;
  set_prob(r, 1.0 - 2.0 * std::exp(-beta * beta / kappa));
  return r;
}

BoundResult prop1_heavy(double tau_c, double sigma_c, double rho, double lip,
                        int kappa, double c_of_n, int n) {
  require_positive(tau_c, "tau_c");
  require_positive(sigma_c, "sigma_c");
  require_positive(rho, "rho");
  require_positive(lip, "lip");
  require_kappa(kappa);
  if (n <= 1) throw config_error("heavy-tail deviation bound needs n > 1 (log n)");
  if (!(c_of_n >= 0.0)) throw config_error("c(n) must be non-negative");
  BoundResult r;
  const double hw = 2.0 * kappa * std::sqrt(c_of_n * std::log(n)) * tau_c * sigma_c *
                    rho * lip / n;
  r.lo = -hw;
  r.hi = hw;
  r.c_of_n = c_of_n;
  r.center_kind = CenterKind::truncated_expectation;
  set_prob(r, 1.0 - 5.0 * std::pow(n, -c_of_n));
  return r;
}

double lemma1_gap(const TailBound& tail, int n) {
  if (n < 1) throw config_error("n must be >= 1");
  require_positive(tail.c1, "c1");
  switch (tail.kind) {
    case TailBound::Kind::sub_exponential:
      if (!(tail.c2 > 1.0))
        throw config_error(
            "sub-exponential tail needs c2 > 1: for c2 <= 1 the concentration decays "
            "too slowly to ensure the exponential mean exists");
      return std::log1p(tail.c1 / (tail.c2 - 1.0)) / n;
    case TailBound::Kind::sub_gaussian:
      if (!(tail.c2 > 0.0)) throw config_error("sub-gaussian tail needs c2 > 0");
      // log(1 + √(π·c1²/c2)·e^{1/(4c2)}), assembled in log space.
      return log1p_prod_exp(0.5 * std::log(M_PI * tail.c1 * tail.c1 / tail.c2),
                            1.0 / (4.0 * tail.c2)) /
             n;
  }
  throw config_error("unknown tail kind");
}

TableIIConstants table2_constants(int kappa, double rho, double nu, double lip,
                                  std::optional<double> D,
                                  std::optional<double> c_ls,
                                  std::optional<std::pair<double, double>> tau_sigma) {
  require_kappa(kappa);
  if (!(rho >= 0.0) || !(nu >= 0.0) || !(lip >= 0.0))
    throw config_error("rho, nu, lip must be non-negative");
  TableIIConstants out{kNaN, kNaN, kNaN};
  const double k = kappa;
  if (D) {
    if (!(*D >= 0.0)) throw config_error("D must be non-negative");
    const double s = *D * rho * nu * lip;
    out.c_rho_f_D =
        (s == 0.0) ? 0.0
                   : log1p_prod_exp(0.5 * std::log(8.0 * k * M_PI) + std::log(s),
                                    8.0 * M_PI / k + 2.0 * k * s * s);
  }
  if (c_ls) {
    if (!(*c_ls >= 0.0)) throw config_error("c_ls must be non-negative");
    const double s = rho * nu * lip;
    out.c_rho_f_cls =
        (s == 0.0 || *c_ls == 0.0)
            ? 0.0
            : log1p_prod_exp(0.5 * std::log(4.0 * k * M_PI * *c_ls) + std::log(s),
                             0.25 * k * *c_ls * s * s);
  }
  if (tau_sigma) {
    const auto [tau, sigma] = *tau_sigma;
    if (!(tau >= 0.0) || !(sigma >= 0.0))
      throw config_error("tau_c and sigma_c must be non-negative");
    const double s = tau * sigma * rho * lip;
    out.c_rho_f_tau_sigma =
        (s == 0.0) ? 0.0
                   : log1p_prod_exp(0.5 * std::log(8.0 * k * M_PI) + std::log(s),
                                    8.0 * M_PI / k + 2.0 * k * s * s);
  }
  return out;
}

BoundResult theorem1_interval(MeasureCase measure_case, double log_exp_mean,
                              const ScaleParams& params, double beta_or_c) {
  require_kappa(params.kappa);
  require_positive(params.rho, "rho");
  require_positive(params.nu, "nu");
  require_positive(params.lip, "lip");
  if (params.n < 1) throw config_error("params.n must be >= 1");

  BoundResult r;
  r.center_kind = CenterKind::log_exp_mean;
  const double n = params.n;

  switch (measure_case) {
    case MeasureCase::bounded: {
      if (!params.D) throw config_error("bounded case needs params.D");
      const double beta = beta_or_c;
      if (!(beta > kBetaFloorBounded))
        throw config_error("bounded case needs beta > 8*sqrt(pi) = " +
                           std::to_string(kBetaFloorBounded));
      const double c = table2_constants(params.kappa, params.rho, params.nu,
                                        params.lip, params.D, {}, {})
                           .c_rho_f_D;
      const double mu = params.nu * params.rho * params.lip * *params.D;
      r.lo = log_exp_mean - beta * mu / n - c / n;
      r.hi = log_exp_mean + beta * mu / n;
      r.beta = beta;
      set_prob(r, 1.0 - 4.0 * std::exp(-beta * beta / (8.0 * params.kappa)));
      return r;
    }
    case MeasureCase::lsi: {
      if (!params.c_ls) throw config_error("lsi case needs params.c_ls");
      require_positive(*params.c_ls, "c_ls");
      const double beta = beta_or_c;
      if (!(beta >= 0.0)) throw config_error("beta must be non-negative");
      const double c = table2_constants(params.kappa, params.rho, params.nu,
                                        params.lip, {}, params.c_ls, {})
                           .c_rho_f_cls;
      const double mu = params.nu * params.rho * params.lip * std::sqrt(*params.c_ls);
      r.lo = log_exp_mean - beta * mu / n - c / n;
      r.hi = log_exp_mean + beta * mu / n;
      r.beta = beta;
      set_prob(r, 1.0 - 2.0 * std::exp(-beta * beta / params.kappa));
      return r;
    }
    case MeasureCase::heavy: {
      if (!params.tau_sigma) throw config_error("heavy case needs params.tau_sigma");
      const auto [tau, sigma] = *params.tau_sigma;
      require_positive(tau, "tau_c");
      require_positive(sigma, "sigma_c");
      if (params.n <= 1) throw config_error("heavy case needs n > 1 (log n)");
      const double c_of_n = beta_or_c;
      if (!(c_of_n >= 0.0)) throw config_error("c(n) must be non-negative");
      const double c = table2_constants(params.kappa, params.rho, params.nu,
                                        params.lip, {}, {}, params.tau_sigma)
                           .c_rho_f_tau_sigma;
      const double zeta =
          tau * sigma * std::sqrt(8.0 * params.kappa * c_of_n * std::log(n));
      const double mu = params.nu * params.rho * params.lip * zeta;
      r.lo = log_exp_mean - mu / n - c / n;
      r.hi = log_exp_mean + mu / n;
      r.c_of_n = c_of_n;
      set_prob(r, 1.0 - 5.0 * std::pow(n, -c_of_n));
      return r;
    }
    default:
      throw config_error(
          "theorem1_interval accepts measure cases bounded, lsi, or heavy");
  }
}

BoundResult confidence_interval(double f0_observed, MeasureCase measure_case,
                                const ScaleParams& params, double alpha0,
                                int n, int m) {
  if (!(alpha0 > 0.0 && alpha0 < 1.0)) throw config_error("alpha0 must be in (0, 1)");
  require_kappa(params.kappa);
  require_positive(params.rho, "rho");
  require_positive(params.nu, "nu");
  require_positive(params.lip, "lip");
  if (n < 1 || m < 1) throw config_error("n and m must be >= 1");

  const double k = params.kappa;
  const double scale = params.rho * params.nu * params.lip;
  double hw = 0.0;
  BoundResult r;
  r.center_kind = CenterKind::observed_f0;

  switch (measure_case) {
    case MeasureCase::bounded:
      if (!params.D) throw config_error("bounded case needs params.D");
      require_positive(*params.D, "D");
      hw = std::sqrt(8.0 * k) * *params.D * scale * std::sqrt(std::log(4.0 / alpha0)) / n;
      break;
    case MeasureCase::lsi:
      if (!params.c_ls) throw config_error("lsi case needs params.c_ls");
      require_positive(*params.c_ls, "c_ls");
      hw = std::sqrt(k * *params.c_ls) * scale * std::sqrt(std::log(2.0 / alpha0)) / n;
      break;
    case MeasureCase::sub_exponential: {
      if (!params.lambda) throw config_error("sub-exponential case needs params.lambda");
      require_positive(*params.lambda, "lambda");
      if (n <= 1) throw config_error("sub-exponential interval needs n > 1 (log n)");
      // Targets the truncated-ensemble mean at c(n) = log(5/alpha0)/log(n),
      // i.e. truncation threshold τ_c = (1/λ)·log(5mn/alpha0).
      r.c_of_n = std::log(5.0 / alpha0) / std::log(static_cast<double>(n));
      hw = std::sqrt(4.0 * k * std::log(5.0 / alpha0)) * scale / *params.lambda *
           std::log(5.0 * m * static_cast<double>(n) / alpha0) / n;
      break;
    }
    case MeasureCase::power_law: {
      if (!params.lambda) throw config_error("power-law case needs params.lambda");
      require_positive(*params.lambda, "lambda");
      if (n <= 1) throw config_error("power-law interval needs n > 1 (log n)");
      r.c_of_n = std::log(5.0 / alpha0) / std::log(static_cast<double>(n));
      hw = std::sqrt(4.0 * k * std::log(5.0 / alpha0)) *
           std::pow(5.0 / alpha0, 1.0 / *params.lambda) * scale *
           std::pow(static_cast<double>(m) * n, 1.0 / *params.lambda) / n;
      break;
    }
    default:
      throw config_error(
          "confidence_interval accepts bounded, lsi, sub_exponential, or power_law");
  }

  r.lo = f0_observed - hw;
  r.hi = f0_observed + hw;
  r.holds_with_prob = 1.0 - alpha0;
  return r;
}

}  // namespace specband::conc
