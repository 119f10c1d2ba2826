#include "specband/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace specband::spectral {

namespace {

constexpr double kInvSurrogateSlopeNum = 0.6495190528383290;  // 3√3/8

//! Eigenvalues of (1/n)·M·R·R*·M* via the smaller-side Gram matrix.
//! B := (1/√n)·M·R; for n ≤ m the spectrum of B·B* is computed directly,
//! otherwise B*·B shares the nonzero spectrum and the result is zero-padded.
template <typename Mat>
std::vector<double> gram_eigs_impl(const Mat& M, const Mat& R) {
  const Eigen::Index n = M.rows();
  const Eigen::Index m = M.cols();
  if (n < 1 || m < 1) throw config_error("gram_eigenvalues needs a non-empty matrix");
  if (R.size() != 0 && (R.rows() != m || R.cols() != m))
    throw config_error("R must be m x m to match the m columns of M");
  if (!M.allFinite() || (R.size() != 0 && !R.allFinite()))
    throw numeric_error("gram_eigenvalues: non-finite input entries");

  Mat B = (R.size() != 0) ? Mat(M * R) : M;
  B /= std::sqrt(static_cast<double>(n));

  Mat G;
  if (n <= m)
    G = B * B.adjoint();
  else
    G = B.adjoint() * B;
  G = ((G + G.adjoint()) * 0.5).eval();  // kill floating-point asymmetry

  Eigen::SelfAdjointEigenSolver<Mat> solver(G, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "eigensolver failed on a " << G.rows() << "x" << G.cols()
        << " Gram matrix with norm " << G.norm();
    throw numeric_error(msg.str());
  }

  const auto& raw = solver.eigenvalues();  // ascending
  std::vector<double> eigs(static_cast<std::size_t>(n), 0.0);
  const Eigen::Index k = raw.size();
  double lam_max = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) lam_max = std::max(lam_max, raw(i));
  const double floor = 1e-10 * lam_max;
  for (Eigen::Index i = 0; i < k; ++i) {
    const double lam = raw(k - 1 - i);
    eigs[static_cast<std::size_t>(i)] = (lam < floor) ? 0.0 : lam;
  }
  return eigs;  // descending, padded with zeros when n > m
}

template <typename Mat>
std::vector<double> stat_eigs(const Mat& M, const SpectralStatistic& stat) {
  if (stat.R.size() != 0) {
    Mat R = stat.R.template cast<typename Mat::Scalar>();
    return gram_eigs_impl(M, R);
  }
  if (stat.r_scale != 1.0) {
    Mat scaled = M * stat.r_scale;
    return gram_eigs_impl(scaled, Mat());
  }
  return gram_eigs_impl(M, Mat());
}

template <typename Mat>
StatValue eval_stat_impl(const Mat& M, const SpectralStatistic& stat) {
  StatValue out;
  out.eigenvalues = stat_eigs(M, stat);
  const auto n = static_cast<std::size_t>(M.rows());
  const auto take = std::min(n, static_cast<std::size_t>(M.cols()));
  double sum = 0.0;
  for (std::size_t i = 0; i < take; ++i) sum += stat.f(out.eigenvalues[i]);
  out.value = sum / static_cast<double>(n);
  return out;
}

}  // namespace

SpectralStatistic SpectralStatistic::log_shifted(double eps) {
  if (!(eps >= 0.0)) throw config_error("log-shifted statistic needs eps >= 0");
  SpectralStatistic s;
  s.kind = Kind::log_shifted;
  s.eps = eps;
  return s;
}

SpectralStatistic SpectralStatistic::inverse_shifted(double eps) {
  if (!(eps >= 0.0)) throw config_error("inverse-shifted statistic needs eps >= 0");
  SpectralStatistic s;
  s.kind = Kind::inverse_shifted;
  s.eps = eps;
  return s;
}

SpectralStatistic SpectralStatistic::user(std::function<double(double)> f, double lip) {
  if (!f) throw config_error("user statistic needs a function");
  if (!(lip > 0.0) || !std::isfinite(lip))
    throw config_error("user statistic needs a finite positive Lipschitz bound");
  SpectralStatistic s;
  s.kind = Kind::user;
  s.fn = std::move(f);
  s.user_lip = lip;
  return s;
}

SpectralStatistic& SpectralStatistic::with_R(Eigen::MatrixXd R_in) {
  if (R_in.rows() != R_in.cols()) throw config_error("R must be square");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(R_in);
  rho = (svd.singularValues().size() > 0) ? svd.singularValues()(0) : 0.0;
  R = std::move(R_in);
  r_scale = 1.0;
  return *this;
}

SpectralStatistic& SpectralStatistic::with_scaled_identity(double s) {
  if (!(s >= 0.0)) throw config_error("identity scale must be non-negative");
  R.resize(0, 0);
  r_scale = s;
  rho = s;
  return *this;
}

double SpectralStatistic::f(double x) const {
  switch (kind) {
    case Kind::log_shifted: {
      const double v = eps + x;
      if (!(v > 0.0))
        throw numeric_error("log-shifted statistic undefined at eigenvalue " +
                            std::to_string(x) + " with eps " + std::to_string(eps));
      return std::log(v);
    }
    case Kind::inverse_shifted: {
      const double v = eps + x;
      if (!(v > 0.0))
        throw numeric_error("inverse-shifted statistic undefined at eigenvalue " +
                            std::to_string(x) + " with eps " + std::to_string(eps));
      return 1.0 / v;
    }
    case Kind::user: {
      const double v = fn(x);
      if (!std::isfinite(v))
        throw numeric_error("user statistic non-finite at eigenvalue " + std::to_string(x));
      return v;
    }
  }
  throw config_error("unknown statistic kind");
}

std::vector<double> gram_eigenvalues(const Eigen::MatrixXd& M, const Eigen::MatrixXd& R) {
  return gram_eigs_impl(M, R);
}

std::vector<double> gram_eigenvalues(const Eigen::MatrixXcd& M, const Eigen::MatrixXcd& R) {
  return gram_eigs_impl(M, R);
}

double eval_f0(const Eigen::MatrixXd& M, const SpectralStatistic& stat) {
  return eval_stat_impl(M, stat).value;
}

double eval_f0(const Eigen::MatrixXcd& M, const SpectralStatistic& stat) {
  return eval_stat_impl(M, stat).value;
}

StatValue eval_stat(const Eigen::MatrixXd& M, const SpectralStatistic& stat) {
  return eval_stat_impl(M, stat);
}

StatValue eval_stat(const Eigen::MatrixXcd& M, const SpectralStatistic& stat) {
  return eval_stat_impl(M, stat);
}

double lipschitz_bound(const SpectralStatistic& stat) {
  switch (stat.kind) {
    case SpectralStatistic::Kind::log_shifted:
      if (!(stat.eps > 0.0))
        throw config_error("Lipschitz bound of the log-shifted statistic needs eps > 0");
      return 1.0 / std::sqrt(stat.eps);
    case SpectralStatistic::Kind::inverse_shifted:
      if (!(stat.eps > 0.0))
        throw config_error("Lipschitz bound of the inverse-shifted statistic needs eps > 0");
      return kInvSurrogateSlopeNum * std::pow(stat.eps, -1.5);
    case SpectralStatistic::Kind::user:
      return stat.user_lip;
  }
  throw config_error("unknown statistic kind");
}

SurrogatePair convexify_log(double eps) {
  if (!(eps > 0.0)) throw config_error("convexify_log needs eps > 0");
  const double knee = std::sqrt(eps);
  const double knee_value = std::log(2.0 * eps);
  SurrogatePair pair;
  pair.g = [eps, knee, knee_value](double x) {
    // Log branch above the knee; tangent line (slope 1/√eps) below it.
    if (x >= knee) return std::log(eps + x * x);
    return (x - knee) / knee + knee_value;
  };
  pair.f = [g = pair.g](double x) { return g(std::sqrt(x)); };
  pair.lip = 1.0 / knee;
  return pair;
}

SurrogatePair convexify_inv(double eps) {
  if (!(eps > 0.0)) throw config_error("convexify_inv needs eps > 0");
  const double knee = eps / std::sqrt(3.0);
  const double knee_value = 0.75 / (eps * eps);
  const double slope = -kInvSurrogateSlopeNum / (eps * eps * eps);
  SurrogatePair pair;
  pair.g = [eps, knee, knee_value, slope](double x) {
    // Rational branch above the knee; tangent line below it keeps g convex.
    if (x > knee) return 1.0 / (eps * eps + x * x);
    return slope * (x - knee) + knee_value;
  };
  pair.f = [g = pair.g](double x) { return g(std::sqrt(x)); };
  pair.lip = -slope;
  return pair;
}

}  // namespace specband::spectral
