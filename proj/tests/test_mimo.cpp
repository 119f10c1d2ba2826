#include <cmath>
#include <limits>

#include "doctest.h"
#include "specband/ensembles.hpp"
#include "specband/mimo.hpp"

using namespace specband;
using mimo::ChannelConfig;
using mimo::MutualInfoInterval;

namespace {

Eigen::MatrixXd random_channel(int n_r, int n_t, std::uint64_t seed) {
  ens::EnsembleConfig cfg;
  cfg.n = n_r;
  cfg.m = n_t;
  cfg.measure = ens::MeasureSpec::gaussian();
  cfg.seed = seed;
  return ens::sample_real(cfg);
}

}  // namespace

TEST_CASE("r_function on exactly summable cases") {
  CHECK(mimo::r_function(1.0, 1, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(mimo::r_function(1.0, 2, 4) == doctest::Approx(std::log(3.75)).epsilon(1e-14));
  CHECK(mimo::r_function(0.25, 3, 5) ==
        doctest::Approx(0.24929850879106097).epsilon(1e-13));

  // eps = 0: only the full-rank term survives; empty when n > m.
  CHECK(mimo::r_function(0.0, 2, 2) == doctest::Approx(std::log(0.5)).epsilon(1e-14));
  CHECK(mimo::r_function(0.0, 3, 2) == -std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(mimo::r_function(-0.25, 2, 2), config_error);
  CHECK_THROWS_AS(mimo::r_function(1.0, 0, 2), config_error);
}

TEST_CASE("r_function stays stable at large dimensions") {
  CHECK(mimo::r_function(0.2, 32, 64) ==
        doctest::Approx(0.09297612206218512).epsilon(1e-13));
  CHECK(mimo::r_function(0.01, 512, 1024) ==
        doctest::Approx(-146.73785478183473).epsilon(1e-10));

  const double a = mimo::r_function(0.1, 1000, 1000);
  const double b = mimo::r_function(0.2, 1000, 1000);
  CHECK(std::isfinite(a));
  CHECK(std::isfinite(b));
  CHECK(a < b);  // monotone in eps
  CHECK(std::isfinite(mimo::r_function(0.5, 4096, 4096)));
}

TEST_CASE("mutual information of simple channels") {
  const Eigen::MatrixXd I4 = Eigen::MatrixXd::Identity(4, 4);
  CHECK(mimo::mutual_information(I4, 3.0) ==
        doctest::Approx(4.0 * std::log(1.0 + 3.0 / 4.0)).epsilon(1e-13));
  const Eigen::MatrixXd zero35 = Eigen::MatrixXd::Zero(3, 5);
  CHECK(mimo::mutual_information(zero35, 2.0) == 0.0);

  // Against a direct eigensolve of (1/n_t)·H·H*.
  const Eigen::MatrixXd H = random_channel(3, 5, 41);
  const Eigen::MatrixXd G = (H * H.transpose()) / 5.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  double expected = 0.0;
  for (int i = 0; i < 3; ++i) expected += std::log1p(2.5 * std::max(0.0, es.eigenvalues()(i)));
  CHECK(mimo::mutual_information(H, 2.5) == doctest::Approx(expected).epsilon(1e-12));

  Eigen::MatrixXd bad = H;
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(mimo::mutual_information(bad, 2.5), numeric_error);
}

TEST_CASE("channel config bookkeeping") {
  const auto cfg = ChannelConfig::make(32, 64, 5.0, ens::MeasureSpec::gaussian());
  CHECK(cfg.alpha == 2.0);
  CHECK(cfg.n == 32);
  CHECK_NOTHROW(cfg.validate());
  CHECK_THROWS_AS(ChannelConfig::make(0, 4, 5.0, ens::MeasureSpec::gaussian()),
                  config_error);
  CHECK_THROWS_AS(ChannelConfig::make(4, 4, 0.0, ens::MeasureSpec::gaussian()),
                  config_error);
}

TEST_CASE("finite-SNR interval, log-sobolev entries") {
  // Wide channel: alpha = 2, SNR = 5, n_r = 32, beta = sqrt(log 80).
  const auto cfg = ChannelConfig::make(32, 64, 5.0, ens::MeasureSpec::gaussian());
  const double beta = std::sqrt(std::log(80.0));
  const MutualInfoInterval r = mimo::theorem2_interval(cfg, beta);
  CHECK(r.first_order == doctest::Approx(1.6123434162485437).epsilon(1e-12));
  CHECK(r.lo == doctest::Approx(1.4326649856147476).epsilon(1e-12));
  CHECK(r.hi == doctest::Approx(1.7157760378606796).epsilon(1e-12));
  CHECK(r.prob == doctest::Approx(0.95).epsilon(1e-14));
  CHECK(r.regime == MutualInfoInterval::Regime::exact_R);
  CHECK_FALSE(r.vacuous);

  // Narrow channel: alpha = 1/2, SNR = 5, n_r = 32, beta = 2.
  const auto narrow = ChannelConfig::make(32, 16, 5.0, ens::MeasureSpec::gaussian());
  const MutualInfoInterval s = mimo::theorem2_interval(narrow, 2.0);
  CHECK(s.first_order == doctest::Approx(1.0902311020492895).epsilon(1e-12));
  CHECK(s.lo == doctest::Approx(0.84561005120993805).epsilon(1e-12));
  CHECK(s.hi == doctest::Approx(1.2299853506430264).epsilon(1e-12));
  CHECK(s.prob == doctest::Approx(0.92673744444506328).epsilon(1e-13));

  CHECK_THROWS_AS(mimo::theorem2_interval(cfg, 0.0), config_error);
}

TEST_CASE("finite-SNR interval, bounded entries") {
  const auto cfg = ChannelConfig::make(16, 32, 4.0, ens::MeasureSpec::rademacher());
  const MutualInfoInterval r = mimo::theorem2_interval(cfg, 15.0);
  CHECK(r.first_order == doctest::Approx(1.4517696444767505).epsilon(1e-12));
  CHECK(r.lo == doctest::Approx(-1.8938790799085151).epsilon(1e-12));
  CHECK(r.hi == doctest::Approx(2.6820579122567801).epsilon(1e-12));
  CHECK(r.prob == doctest::Approx(0.99999999999511845).epsilon(1e-14));

  // The convexity argument needs beta above 8√π ≈ 14.18.
  CHECK_THROWS_AS(mimo::theorem2_interval(cfg, 10.0), config_error);
}

TEST_CASE("finite-SNR interval, heavy-tailed entries need truncation data") {
  // Wide: laplace entries with declared tail e^{-x}, c(n) = 1.5.
  const auto cfg =
      ChannelConfig::make(16, 32, 5.0, ens::MeasureSpec::symmetric_exponential(1.0));
  const auto trunc = ens::truncation_params(cfg.measure, cfg.n_t, cfg.n_r, 1.5);
  const MutualInfoInterval r = mimo::theorem2_interval(cfg, 1.5, trunc);
  CHECK(r.first_order == doctest::Approx(1.6176379459566159).epsilon(1e-12));
  CHECK(r.lo == doctest::Approx(-40.001241628260003).epsilon(1e-12));
  CHECK(r.hi == doctest::Approx(6.781983624252011).epsilon(1e-12));
  CHECK(r.prob == doctest::Approx(0.84375).epsilon(1e-14));

  // Narrow: pareto entries, alpha = 1/2, c(n) = 2.
  const auto narrow =
      ChannelConfig::make(32, 16, 5.0, ens::MeasureSpec::symmetric_pareto(4.0));
  const auto tn = ens::truncation_params(narrow.measure, narrow.n_t, narrow.n_r, 2.0);
  const MutualInfoInterval s = mimo::theorem2_interval(narrow, 2.0, tn);
  CHECK(s.first_order == doctest::Approx(1.0895899493608714).epsilon(1e-12));
  CHECK(s.lo == doctest::Approx(-238.13829970576626).epsilon(1e-12));
  CHECK(s.hi == doctest::Approx(11.85305531062182).epsilon(1e-12));
  CHECK(s.prob == doctest::Approx(0.9609375).epsilon(1e-14));

  // The truncation parameters are mandatory and must carry the same c(n).
  CHECK_THROWS_AS(mimo::theorem2_interval(cfg, 1.5), config_error);
  const auto wrong_c = ens::truncation_params(cfg.measure, cfg.n_t, cfg.n_r, 1.0);
  CHECK_THROWS_AS(mimo::theorem2_interval(cfg, 1.5, wrong_c), config_error);

  // Tiny c(n) drives the failure probability past one: vacuous result.
  const auto weak = ens::truncation_params(cfg.measure, cfg.n_t, cfg.n_r, 0.1);
  const MutualInfoInterval v = mimo::theorem2_interval(cfg, 0.1, weak);
  CHECK(v.vacuous);
  CHECK(v.prob == 0.0);
}

TEST_CASE("high-SNR interval around the first-order expansion") {
  // Wide bounded channel: alpha = 2, SNR = 100, beta = 15.
  const auto cfg = ChannelConfig::make(32, 64, 100.0, ens::MeasureSpec::rademacher());
  const MutualInfoInterval r = mimo::corollary1_interval(cfg, 15.0);
  CHECK(r.first_order == doctest::Approx(4.2983173665480367).epsilon(1e-12));
  CHECK(r.lo == doctest::Approx(-3.0570106920540131).epsilon(1e-12));
  CHECK(r.hi == doctest::Approx(8.3743122193159392).epsilon(1e-12));
  CHECK(r.regime == MutualInfoInterval::Regime::high_snr);

  // Narrow log-sobolev channel: alpha = 1/2, SNR = 40, beta = 2.
  const auto narrow = ChannelConfig::make(32, 16, 40.0, ens::MeasureSpec::gaussian());
  const MutualInfoInterval s = mimo::corollary1_interval(narrow, 2.0);
  CHECK(s.first_order == doctest::Approx(2.0375869076169135).epsilon(1e-12));
  CHECK(s.lo == doctest::Approx(1.2283608893931809).epsilon(1e-12));
  CHECK(s.hi == doctest::Approx(2.8129231905354214).epsilon(1e-12));

  // The expansion only holds above (2/e)·max{alpha,1}·max{e²alpha³, 4alpha} ≈ 87.
  const auto low = ChannelConfig::make(32, 64, 5.0, ens::MeasureSpec::rademacher());
  CHECK_THROWS_AS(mimo::corollary1_interval(low, 15.0), config_error);
}

TEST_CASE("residual table spot values") {
  mimo::Table3Inputs in;
  in.alpha = 1.0;
  in.snr = 100.0;
  in.beta = 1.0;
  in.n_r = 64;
  in.n_t = 64;
  in.n = 64;
  in.c_ls = 1.0;
  const auto t = mimo::table3_residuals(in);
  CHECK(t.gamma_ls_ub_pos == doctest::Approx(1.0419453594638606).epsilon(1e-13));
  CHECK(std::isnan(t.r_bd_lb_pos));   // no D supplied
  CHECK(std::isnan(t.r_ht_ub_pos));   // no truncation supplied
  CHECK_FALSE(std::isnan(t.r_ls_lb_pos));
  CHECK(t.r_ls_ub_pos == doctest::Approx(std::sqrt(100.0)).epsilon(1e-14));
  // The measure-independent lower drift is shared by every family.
  CHECK_FALSE(std::isnan(t.gamma_lb_pos));
}

TEST_CASE("deterministic bracket for the normalized log R expansion") {
  const auto b = mimo::lemma3_bracket(0.01, 512, 1024);
  CHECK(b.first_order == doctest::Approx(std::log(2.0) - 1.0).epsilon(1e-14));

  const double n = 512.0, m = 1024.0, eps = 0.01, alpha = 2.0;
  const double lo_expected = (0.5 * std::log(n) - std::log((m + 1.0) / (2.0 * M_PI))) / n;
  const double hi_expected = 1.5 * std::log(M_E * n) / n +
                             2.0 * std::sqrt(alpha * eps) * std::log(1.0 / (alpha * eps));
  CHECK(b.r_E_lo == doctest::Approx(lo_expected).epsilon(1e-12));
  CHECK(b.r_E_hi == doctest::Approx(hi_expected).epsilon(1e-12));

  // The bracket indeed contains the expansion error at these dimensions.
  const double gap = mimo::r_function(0.01, 512, 1024) / 512.0 - b.first_order;
  CHECK(gap >= b.r_E_lo);
  CHECK(gap <= b.r_E_hi);

  // Admissible window: 4/n < eps < min{1/(e²alpha³), 1/(4alpha)}.
  CHECK_THROWS_AS(mimo::lemma3_bracket(4.0 / 512.0, 512, 1024), config_error);
  CHECK_THROWS_AS(mimo::lemma3_bracket(0.2, 512, 1024), config_error);
  CHECK_THROWS_AS(mimo::lemma3_bracket(0.01, 1024, 512), config_error);  // alpha < 1
}

TEST_CASE("power offset reflects mutual-information intervals") {
  CHECK(mimo::power_offset(1.2, 5.0, 64, 32) ==
        doctest::Approx(std::log(5.0) - 1.2).epsilon(1e-14));
  // alpha < 1: C/n_r is rescaled by n_r/min{n_t,n_r}.
  CHECK(mimo::power_offset(1.2, 5.0, 16, 32) ==
        doctest::Approx(std::log(5.0) - 2.4).epsilon(1e-14));

  MutualInfoInterval mi;
  mi.first_order = 1.5;
  mi.lo = 1.4;
  mi.hi = 1.7;
  mi.prob = 0.95;
  const MutualInfoInterval L = mimo::power_offset(mi, 5.0, 64, 32);
  CHECK(L.lo == doctest::Approx(std::log(5.0) - 1.7).epsilon(1e-14));
  CHECK(L.hi == doctest::Approx(std::log(5.0) - 1.4).epsilon(1e-14));
  CHECK(L.first_order == doctest::Approx(std::log(5.0) - 1.5).epsilon(1e-14));
  CHECK(L.prob == 0.95);
}

TEST_CASE("first-order power offset matches the high-SNR expansion") {
  CHECK(mimo::power_offset_first_order(1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(mimo::power_offset_first_order(2.0) ==
        doctest::Approx(1.0 - std::log(2.0)).epsilon(1e-14));
  CHECK(mimo::power_offset_first_order(0.5) ==
        doctest::Approx(1.0 - 2.0 * std::log(2.0)).epsilon(1e-14));

  // Consistency with the high-SNR mutual-information expansion, both branches.
  const auto wide = ChannelConfig::make(32, 64, 100.0, ens::MeasureSpec::gaussian());
  const double fo_wide = mimo::corollary1_interval(wide, 2.0).first_order;
  CHECK(mimo::power_offset(fo_wide, 100.0, 64, 32) ==
        doctest::Approx(mimo::power_offset_first_order(2.0)).epsilon(1e-12));

  const auto narrow = ChannelConfig::make(32, 16, 40.0, ens::MeasureSpec::gaussian());
  const double fo_narrow = mimo::corollary1_interval(narrow, 2.0).first_order;
  CHECK(mimo::power_offset(fo_narrow, 40.0, 16, 32) ==
        doctest::Approx(mimo::power_offset_first_order(0.5)).epsilon(1e-12));
}
