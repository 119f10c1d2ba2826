#include "specband/ensembles.hpp"

#include <cmath>
#include <complex>
#include <random>
#include <set>

namespace specband::ens {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;
constexpr double kSqrt2 = 1.4142135623730951;

//! One standardized (mean 0, variance 1) draw from the sampler.
double draw_standardized(std::mt19937_64& eng, const MeasureSpec& ms) {
  switch (ms.sampler) {
    case Sampler::gaussian: {
      std::normal_distribution<double> normal(0.0, 1.0);
      return normal(eng);
    }
    case Sampler::rademacher:
      return (eng() & 1ULL) ? 1.0 : -1.0;
    case Sampler::uniform: {
      std::uniform_real_distribution<double> unif(-kSqrt3, kSqrt3);
      return unif(eng);
    }
    case Sampler::symmetric_exponential: {
      // |X| ~ Exp(rate √2), random sign: unit variance, P(|X| > x) = e^{-√2 x}.
      std::exponential_distribution<double> expo(kSqrt2);
      const double mag = expo(eng);
      return (eng() & 1ULL) ? mag : -mag;
    }
    case Sampler::symmetric_pareto: {
      // |X| = scale·U^{-1/λ} with scale = √((λ-2)/λ): unit variance and
      // P(|X| > x) = (scale·x^{-1})^λ ≤ x^{-λ} since scale < 1.
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      double u = 0.0;
      do {
        u = unif(eng);
      } while (u <= 0.0);
      const double scale = std::sqrt((ms.lambda - 2.0) / ms.lambda);
      const double mag = scale * std::pow(u, -1.0 / ms.lambda);
      return (eng() & 1ULL) ? mag : -mag;
    }
  }
  throw config_error("unknown sampler");
}

double parse_double(const std::map<std::string, std::string>& kv,
                    const std::string& key, double fallback) {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  try {
    std::size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument(it->second);
    return v;
  } catch (const std::exception&) {
    throw config_error("key '" + key + "': cannot parse '" + it->second + "' as a number");
  }
}

long long parse_int(const std::map<std::string, std::string>& kv,
                    const std::string& key, long long fallback) {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument(it->second);
    return v;
  } catch (const std::exception&) {
    throw config_error("key '" + key + "': cannot parse '" + it->second + "' as an integer");
  }
}

std::uint64_t parse_u64(const std::map<std::string, std::string>& kv,
                        const std::string& key, std::uint64_t fallback) {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  try {
    std::size_t pos = 0;
    const std::uint64_t v = std::stoull(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument(it->second);
    return v;
  } catch (const std::exception&) {
    throw config_error("key '" + key + "': cannot parse '" + it->second +
                       "' as an unsigned integer");
  }
}

}  // namespace

MeasureSpec MeasureSpec::gaussian() {
  MeasureSpec ms;
  ms.family = Family::log_sobolev;
  ms.sampler = Sampler::gaussian;
  ms.c_ls = 1.0;
  return ms;
}

MeasureSpec MeasureSpec::rademacher() {
  MeasureSpec ms;
  ms.family = Family::bounded;
  ms.sampler = Sampler::rademacher;
  ms.D = 1.0;
  return ms;
}

MeasureSpec MeasureSpec::uniform() {
  MeasureSpec ms;
  ms.family = Family::bounded;
  ms.sampler = Sampler::uniform;
  ms.D = kSqrt3;
  return ms;
}

MeasureSpec MeasureSpec::symmetric_exponential(double lambda, double c0) {
  MeasureSpec ms;
  ms.family = Family::sub_exponential;
  ms.sampler = Sampler::symmetric_exponential;
  ms.lambda = lambda;
  ms.c0 = c0;
  return ms;
}

MeasureSpec MeasureSpec::symmetric_pareto(double lambda) {
  MeasureSpec ms;
  ms.family = Family::power_law;
  ms.sampler = Sampler::symmetric_pareto;
  ms.lambda = lambda;
  return ms;
}

void MeasureSpec::validate() const {
  switch (family) {
    case Family::bounded: {
      if (sampler != Sampler::rademacher && sampler != Sampler::uniform)
        throw config_error("bounded measure requires the rademacher or uniform sampler");
      const double support = (sampler == Sampler::rademacher) ? 1.0 : kSqrt3;
      if (!(D > 0.0)) throw config_error("bounded measure needs D > 0");
      if (D + 1e-12 < support)
        throw config_error("declared D = " + std::to_string(D) +
                           " is smaller than the sampler's support bound " +
                           std::to_string(support));
      return;
    }
    case Family::log_sobolev:
      if (sampler != Sampler::gaussian)
        throw config_error("log-sobolev measure requires the gaussian sampler");
      // Gaussian satisfies the inequality with constant 1; any declared
      // constant ≥ 1 is also valid (weaker), anything smaller is false.
      if (!(c_ls >= 1.0))
        throw config_error("gaussian sampler needs c_ls >= 1 (it holds with constant 1)");
      return;
    case Family::sub_exponential:
      if (sampler != Sampler::symmetric_exponential)
        throw config_error(
            "sub-exponential measure requires the symmetric-exponential sampler");
      if (!(lambda > 0.0)) throw config_error("sub-exponential measure needs lambda > 0");
      // The sampler's exact tail is e^{-√2 x}; the declared bound
      // c0·e^{-lambda·x} dominates it iff lambda ≤ √2 and c0 ≥ 1.
      if (lambda > kSqrt2 + 1e-12)
        throw config_error("declared lambda exceeds the sampler's exact tail rate sqrt(2)");
      if (!(c0 >= 1.0)) throw config_error("sub-exponential measure needs c0 >= 1");
      return;
    case Family::power_law:
      if (sampler != Sampler::symmetric_pareto)
        throw config_error("power-law measure requires the symmetric-pareto sampler");
      if (!(lambda > 2.0))
        throw config_error("power-law measure needs lambda > 2 for a finite variance");
      return;
  }
  throw config_error("unknown measure family");
}

double EnsembleConfig::nu_at(int i, int j) const {
  if (nu_profile.size() == 0) return nu;
  return nu_profile(i, j);
}

void EnsembleConfig::validate() const {
  if (n < 1 || m < 1) throw config_error("ensemble needs n >= 1 and m >= 1");
  if (kappa != 1 && kappa != 2) throw config_error("kappa must be 1 (real) or 2 (complex)");
  if (!(nu >= 0.0)) throw config_error("nu must be non-negative");
  if (nu_profile.size() != 0) {
    if (nu_profile.rows() != n || nu_profile.cols() != m)
      throw config_error("nu_profile must be n x m");
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) {
        const double v = nu_profile(i, j);
        if (!(v >= 0.0)) throw config_error("nu_profile entries must be non-negative");
        if (v > nu + 1e-12)
          throw config_error("nu_profile entry exceeds the declared cap nu");
      }
  }
  measure.validate();
}

Eigen::MatrixXd sample_real(const EnsembleConfig& cfg) {
  cfg.validate();
  if (cfg.kappa != 1) throw config_error("sample_real requires kappa = 1");
  std::mt19937_64 eng(cfg.seed);
  Eigen::MatrixXd M(cfg.n, cfg.m);
  for (int i = 0; i < cfg.n; ++i)
    for (int j = 0; j < cfg.m; ++j)
      M(i, j) = cfg.nu_at(i, j) * draw_standardized(eng, cfg.measure);
  return M;
}

Eigen::MatrixXcd sample_complex(const EnsembleConfig& cfg) {
  cfg.validate();
  std::mt19937_64 eng(cfg.seed);
  Eigen::MatrixXcd M(cfg.n, cfg.m);
  for (int i = 0; i < cfg.n; ++i)
    for (int j = 0; j < cfg.m; ++j) {
      const double s = cfg.nu_at(i, j);
      const double re = s * draw_standardized(eng, cfg.measure);
      const double im =
          (cfg.kappa == 2) ? s * draw_standardized(eng, cfg.measure) : 0.0;
      M(i, j) = std::complex<double>(re, im);
    }
  return M;
}

SampledMatrix sample_matrix(const EnsembleConfig& cfg) {
  cfg.validate();
  if (cfg.kappa == 1) return sample_real(cfg);
  return sample_complex(cfg);
}

TruncationParams truncation_params(const MeasureSpec& measure, int m, int n,
                                   double c_of_n) {
  if (measure.family == MeasureSpec::Family::bounded ||
      measure.family == MeasureSpec::Family::log_sobolev)
    throw config_error("truncation applies only to sub-exponential or power-law measures");
  measure.validate();
  if (m < 1 || n < 1) throw config_error("truncation_params needs m >= 1 and n >= 1");
  if (!(c_of_n > 0.0)) throw config_error("c(n) must be positive");

  TruncationParams tp;
  tp.c_of_n = c_of_n;
  // Smallest τ with (declared tail at τ) = 1/(m·n^{c(n)+1}).
  const double log_target = std::log(static_cast<double>(m)) +
                            (c_of_n + 1.0) * std::log(static_cast<double>(n));
  if (measure.family == MeasureSpec::Family::sub_exponential) {
    tp.tau_c = (std::log(measure.c0) + log_target) / measure.lambda;
    // Unit-variance Laplace: E[X²·1{|X|<τ}] = 1 − e^{-√2τ}(τ² + √2τ + 1).
    const double t = tp.tau_c;
    const double sq = 1.0 - std::exp(-kSqrt2 * t) * (t * t + kSqrt2 * t + 1.0);
    tp.sigma_c = std::sqrt(std::max(sq, 0.0));
  } else {
    tp.tau_c = std::exp(log_target / measure.lambda);
    // Unit-variance symmetric Pareto: E[X²·1{|X|<τ}] = 1 − (sτ)^{2−λ} for
    // sτ ≥ 1 (s = √(λ/(λ−2)) = 1/min|X|), and 0 below the support minimum.
    const double s = std::sqrt(measure.lambda / (measure.lambda - 2.0));
    const double st = s * tp.tau_c;
    const double sq = (st >= 1.0) ? 1.0 - std::pow(st, 2.0 - measure.lambda) : 0.0;
    tp.sigma_c = std::sqrt(std::max(sq, 0.0));
  }
  return tp;
}

Eigen::MatrixXd truncate_matrix(const Eigen::MatrixXd& M, double tau_c) {
  if (!(tau_c >= 0.0)) throw config_error("tau_c must be non-negative");
  Eigen::MatrixXd out = M;
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    for (Eigen::Index j = 0; j < out.cols(); ++j)
      if (!(std::abs(out(i, j)) < tau_c)) out(i, j) = 0.0;
  return out;
}

Eigen::MatrixXcd truncate_matrix(const Eigen::MatrixXcd& M, double tau_c) {
  if (!(tau_c >= 0.0)) throw config_error("tau_c must be non-negative");
  Eigen::MatrixXcd out = M;
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    for (Eigen::Index j = 0; j < out.cols(); ++j)
      if (!(std::abs(out(i, j)) < tau_c)) out(i, j) = 0.0;
  return out;
}

std::string to_string(Sampler s) {
  switch (s) {
    case Sampler::gaussian: return "gaussian";
    case Sampler::rademacher: return "rademacher";
    case Sampler::uniform: return "uniform";
    case Sampler::symmetric_exponential: return "symmetric-exponential";
    case Sampler::symmetric_pareto: return "symmetric-pareto";
  }
  return "unknown";
}

std::string to_string(MeasureSpec::Family f) {
  switch (f) {
    case MeasureSpec::Family::bounded: return "bounded";
    case MeasureSpec::Family::log_sobolev: return "log-sobolev";
    case MeasureSpec::Family::sub_exponential: return "sub-exponential";
    case MeasureSpec::Family::power_law: return "power-law";
  }
  return "unknown";
}

Sampler sampler_from_string(const std::string& name) {
  if (name == "gaussian") return Sampler::gaussian;
  if (name == "rademacher") return Sampler::rademacher;
  if (name == "uniform") return Sampler::uniform;
  if (name == "symmetric-exponential" || name == "symmetric_exponential")
    return Sampler::symmetric_exponential;
  if (name == "symmetric-pareto" || name == "symmetric_pareto")
    return Sampler::symmetric_pareto;
  throw config_error("unknown sampler '" + name + "'");
}

MeasureSpec::Family family_from_string(const std::string& name) {
  if (name == "bounded") return MeasureSpec::Family::bounded;
  if (name == "log-sobolev" || name == "log_sobolev" || name == "lsi")
    return MeasureSpec::Family::log_sobolev;
  if (name == "sub-exponential" || name == "sub_exponential" || name == "subexp")
    return MeasureSpec::Family::sub_exponential;
  if (name == "power-law" || name == "power_law" || name == "powerlaw")
    return MeasureSpec::Family::power_law;
  throw config_error("unknown measure family '" + name + "'");
}

MeasureSpec measure_from_kv(const std::map<std::string, std::string>& kv) {
  // Resolve the sampler first; each sampler has a canonical default spec.
  Sampler sampler = Sampler::gaussian;
  if (auto it = kv.find("sampler"); it != kv.end()) {
    sampler = sampler_from_string(it->second);
  } else if (auto jt = kv.find("measure"); jt != kv.end()) {
    switch (family_from_string(jt->second)) {
      case MeasureSpec::Family::bounded: sampler = Sampler::rademacher; break;
      case MeasureSpec::Family::log_sobolev: sampler = Sampler::gaussian; break;
      case MeasureSpec::Family::sub_exponential:
        sampler = Sampler::symmetric_exponential;
        break;
      case MeasureSpec::Family::power_law: sampler = Sampler::symmetric_pareto; break;
    }
  }

  MeasureSpec ms;
  switch (sampler) {
    case Sampler::gaussian: ms = MeasureSpec::gaussian(); break;
    case Sampler::rademacher: ms = MeasureSpec::rademacher(); break;
    case Sampler::uniform: ms = MeasureSpec::uniform(); break;
    case Sampler::symmetric_exponential:
      ms = MeasureSpec::symmetric_exponential(kSqrt2);
      break;
    case Sampler::symmetric_pareto: ms = MeasureSpec::symmetric_pareto(4.0); break;
  }
  if (auto it = kv.find("measure"); it != kv.end())
    ms.family = family_from_string(it->second);
  ms.D = parse_double(kv, "D", ms.D);
  ms.c_ls = parse_double(kv, "c_ls", ms.c_ls);
  ms.lambda = parse_double(kv, "lambda", ms.lambda);
  ms.c0 = parse_double(kv, "c0", ms.c0);
  ms.validate();
  return ms;
}

std::map<std::string, std::string> ensemble_to_kv(const EnsembleConfig& cfg) {
  std::map<std::string, std::string> kv;
  kv["n"] = std::to_string(cfg.n);
  kv["m"] = std::to_string(cfg.m);
  kv["kappa"] = std::to_string(cfg.kappa);
  kv["measure"] = to_string(cfg.measure.family);
  kv["sampler"] = to_string(cfg.measure.sampler);
  kv["seed"] = std::to_string(cfg.seed);
  char buf[32];
  auto put = [&](const char* key, double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    kv[key] = buf;
  };
  put("nu", cfg.nu);
  switch (cfg.measure.family) {
    case MeasureSpec::Family::bounded: put("D", cfg.measure.D); break;
    case MeasureSpec::Family::log_sobolev: put("c_ls", cfg.measure.c_ls); break;
    case MeasureSpec::Family::sub_exponential:
      put("lambda", cfg.measure.lambda);
      put("c0", cfg.measure.c0);
      break;
    case MeasureSpec::Family::power_law: put("lambda", cfg.measure.lambda); break;
  }
  return kv;
}

EnsembleConfig ensemble_from_kv(const std::map<std::string, std::string>& kv) {
  static const std::set<std::string> known = {"n",    "m",      "kappa", "measure",
                                              "sampler", "D",   "c_ls",  "lambda",
                                              "c0",   "seed",   "nu"};
  for (const auto& [key, value] : kv)
    if (!known.count(key))
      throw config_error("unknown ensemble key '" + key + "'");

  EnsembleConfig cfg;
  cfg.n = static_cast<int>(parse_int(kv, "n", 0));
  cfg.m = static_cast<int>(parse_int(kv, "m", 0));
  cfg.kappa = static_cast<int>(parse_int(kv, "kappa", 1));
  cfg.nu = parse_double(kv, "nu", 1.0);
  cfg.seed = parse_u64(kv, "seed", 0);
  cfg.measure = measure_from_kv(kv);
  cfg.validate();
  return cfg;
}

}  // namespace specband::ens
