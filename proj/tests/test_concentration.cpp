#include <cmath>

#include "doctest.h"
#include "specband/concentration.hpp"

using namespace specband;
using conc::BoundResult;
using conc::CenterKind;
using conc::MeasureCase;
using conc::ScaleParams;
using conc::TailBound;

namespace {

ScaleParams all_ones(int n) {
  ScaleParams p;
  p.kappa = 1;
  p.rho = 1.0;
  p.nu = 1.0;
  p.lip = 1.0;
  p.n = n;
  return p;
}

}  // namespace

TEST_CASE("bounded deviation bound: width, probability, beta floor") {
  const BoundResult r = conc::prop1_bounded(1.0, 1.0, 1.0, 1.0, 1, 16.0, 100);
  CHECK(r.half_width() == doctest::Approx(0.16).epsilon(1e-14));
  CHECK(r.lo == -r.hi);
  CHECK(r.holds_with_prob == doctest::Approx(1.0 - 4.0 * std::exp(-32.0)).epsilon(1e-15));
  CHECK(r.center_kind == CenterKind::expectation);
  CHECK(r.beta.value() == 16.0);
  CHECK_FALSE(r.vacuous);

  // Complex entries halve the exponent: 1 − 4·e^{−β²/16}.
  const BoundResult c = conc::prop1_bounded(1.0, 1.0, 1.0, 1.0, 2, 16.0, 100);
  CHECK(c.holds_with_prob == doctest::Approx(1.0 - 4.0 * std::exp(-16.0)).epsilon(1e-15));

  // The convexity argument needs beta strictly above 8√π ≈ 14.18.
  CHECK_THROWS_AS(conc::prop1_bounded(1.0, 1.0, 1.0, 1.0, 1, 10.0, 100), config_error);
  CHECK_NOTHROW(conc::prop1_bounded(1.0, 1.0, 1.0, 1.0, 1, 14.2, 100));
  CHECK_THROWS_AS(conc::prop1_bounded(0.0, 1.0, 1.0, 1.0, 1, 16.0, 100), config_error);
}

TEST_CASE("log-sobolev deviation bound: width and probability") {
  const BoundResult r = conc::prop1_lsi(1.0, 1.0, 1.0, 1.0, 1, 2.0, 50);
  CHECK(r.half_width() == doctest::Approx(0.04).epsilon(1e-14));
  CHECK(r.holds_with_prob == doctest::Approx(1.0 - 2.0 * std::exp(-4.0)).epsilon(1e-15));

  // Half-width is linear in beta; any beta > 0 is admissible.
  const BoundResult d = conc::prop1_lsi(1.0, 1.0, 1.0, 1.0, 1, 4.0, 50);
  CHECK(d.half_width() == doctest::Approx(2.0 * r.half_width()).epsilon(1e-14));
  CHECK_THROWS_AS(conc::prop1_lsi(1.0, 1.0, 1.0, 1.0, 1, 0.0, 50), config_error);

  // c_ls enters through its square root.
  const BoundResult q = conc::prop1_lsi(4.0, 1.0, 1.0, 1.0, 1, 2.0, 50);
  CHECK(q.half_width() == doctest::Approx(0.08).epsilon(1e-14));
}

TEST_CASE("heavy-tail deviation bound around the truncated mean") {
  const BoundResult r = conc::prop1_heavy(1.0, 1.0, 1.0, 1.0, 1, 2.0, 100);
  CHECK(r.half_width() == doctest::Approx(0.06069708517540585).epsilon(1e-13));
  CHECK(r.holds_with_prob == doctest::Approx(1.0 - 5.0e-4).epsilon(1e-12));
  CHECK(r.center_kind == CenterKind::truncated_expectation);
  CHECK(r.c_of_n.value() == 2.0);

  // c(n) = 0 is admissible but the bound carries no content.
  const BoundResult z = conc::prop1_heavy(1.0, 1.0, 1.0, 1.0, 1, 0.0, 100);
  CHECK(z.half_width() == 0.0);
  CHECK(z.vacuous);
  CHECK(z.holds_with_prob == 0.0);

  CHECK_THROWS_AS(conc::prop1_heavy(1.0, 1.0, 1.0, 1.0, 1, 2.0, 1), config_error);
}

TEST_CASE("gap between the exponential mean and the expectation") {
  TailBound sub_exp{TailBound::Kind::sub_exponential, 1.0, 2.0};
  CHECK(conc::lemma1_gap(sub_exp, 10) ==
        doctest::Approx(0.06931471805599453).epsilon(1e-14));

  TailBound sub_gauss{TailBound::Kind::sub_gaussian, 2.0, 1.0};
  CHECK(conc::lemma1_gap(sub_gauss, 100) ==
        doctest::Approx(0.01714113479576990).epsilon(1e-13));

  // The exponential mean only exists for fast enough decay.
  TailBound slow{TailBound::Kind::sub_exponential, 1.0, 1.0};
  CHECK_THROWS_AS(conc::lemma1_gap(slow, 10), config_error);
  TailBound flat{TailBound::Kind::sub_gaussian, 1.0, 0.0};
  CHECK_THROWS_AS(conc::lemma1_gap(flat, 10), config_error);
}

TEST_CASE("additive log constants at unit scales") {
  const auto c = conc::table2_constants(1, 1.0, 1.0, 1.0, 1.0, 1.0,
                                        std::make_pair(1.0, 1.0));
  CHECK(c.c_rho_f_cls == doctest::Approx(1.714113479576990).epsilon(1e-13));
  CHECK(c.c_rho_f_D == doctest::Approx(28.74482694248329).epsilon(1e-13));
  // The truncated heavy-tail constant takes the bounded form with D → τ_c·σ_c.
  CHECK(c.c_rho_f_tau_sigma == doctest::Approx(28.74482694248329).epsilon(1e-13));

  // Families without their scale parameter come back NaN.
  const auto partial = conc::table2_constants(1, 1.0, 1.0, 1.0, {}, 1.0, {});
  CHECK(std::isnan(partial.c_rho_f_D));
  CHECK_FALSE(std::isnan(partial.c_rho_f_cls));
  CHECK(std::isnan(partial.c_rho_f_tau_sigma));

  // Large scales stay finite: the inner exponential is never materialized.
  const auto big = conc::table2_constants(1, 1.0, 1.0, 1.0, 10.0, {}, {});
  const double expected = 0.5 * std::log(8.0 * M_PI) + std::log(10.0) +
                          (8.0 * M_PI + 2.0 * 100.0);
  CHECK(std::isfinite(big.c_rho_f_D));
  CHECK(big.c_rho_f_D == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("interval around the normalized exponential mean, log-sobolev case") {
  auto p = all_ones(100);
  p.c_ls = 1.0;
  const BoundResult r = conc::theorem1_interval(MeasureCase::lsi, 0.5, p, 3.0);
  CHECK(r.hi == doctest::Approx(0.53).epsilon(1e-14));
  CHECK(r.lo == doctest::Approx(0.4528588652042301).epsilon(1e-13));
  CHECK(r.holds_with_prob == doctest::Approx(1.0 - 2.0 * std::exp(-9.0)).epsilon(1e-14));
  CHECK(r.center_kind == CenterKind::log_exp_mean);
  CHECK(r.beta.value() == 3.0);
}

TEST_CASE("interval around the normalized exponential mean, bounded and heavy cases") {
  auto p = all_ones(100);
  p.D = 1.0;
  const BoundResult r = conc::theorem1_interval(MeasureCase::bounded, 0.5, p, 16.0);
  const double c_bd = 28.74482694248329;
  CHECK(r.hi == doctest::Approx(0.5 + 0.16).epsilon(1e-13));
  CHECK(r.lo == doctest::Approx(0.5 - 0.16 - c_bd / 100.0).epsilon(1e-12));
  CHECK_THROWS_AS(conc::theorem1_interval(MeasureCase::bounded, 0.5, p, 10.0),
                  config_error);

  auto h = all_ones(100);
  h.tau_sigma = std::make_pair(1.0, 1.0);
  const BoundResult heavy = conc::theorem1_interval(MeasureCase::heavy, 0.5, h, 2.0);
  const double zeta = std::sqrt(8.0 * 2.0 * std::log(100.0));
  CHECK(heavy.hi == doctest::Approx(0.5 + zeta / 100.0).epsilon(1e-13));
  CHECK(heavy.lo == doctest::Approx(0.5 - zeta / 100.0 - c_bd / 100.0).epsilon(1e-12));
  CHECK(heavy.holds_with_prob == doctest::Approx(1.0 - 5.0e-4).epsilon(1e-12));

  // Missing scale parameters and unsupported cases are rejected.
  CHECK_THROWS_AS(conc::theorem1_interval(MeasureCase::bounded, 0.5, all_ones(100), 16.0),
                  config_error);
  CHECK_THROWS_AS(
      conc::theorem1_interval(MeasureCase::sub_exponential, 0.5, all_ones(100), 2.0),
      config_error);
}

TEST_CASE("confidence intervals around one observed statistic") {
  const double f0 = 1.25, alpha0 = 0.05;
  const int n = 100, m = 100;

  auto pb = all_ones(n);
  pb.D = 1.0;
  const BoundResult bd = conc::confidence_interval(f0, MeasureCase::bounded, pb, alpha0, n, m);
  CHECK(bd.half_width() == doctest::Approx(0.05920828749203194).epsilon(1e-13));
  CHECK(bd.lo == doctest::Approx(f0 - bd.half_width()).epsilon(1e-14));
  CHECK(bd.holds_with_prob == 0.95);
  CHECK(bd.center_kind == CenterKind::observed_f0);
  CHECK_FALSE(bd.c_of_n.has_value());

  auto pl = all_ones(n);
  pl.c_ls = 1.0;
  const BoundResult ls = conc::confidence_interval(f0, MeasureCase::lsi, pl, alpha0, n, m);
  CHECK(ls.half_width() == doctest::Approx(0.01920645582639842).epsilon(1e-13));

  auto pe = all_ones(n);
  pe.lambda = 1.0;
  const BoundResult se =
      conc::confidence_interval(f0, MeasureCase::sub_exponential, pe, alpha0, n, m);
  CHECK(se.half_width() == doctest::Approx(0.5929523258646623).epsilon(1e-13));
  CHECK(se.c_of_n.value() == doctest::Approx(1.0).epsilon(1e-14));

  auto pp = all_ones(n);
  pp.lambda = 4.0;
  const BoundResult po =
      conc::confidence_interval(f0, MeasureCase::power_law, pp, alpha0, n, m);
  CHECK(po.half_width() == doctest::Approx(1.3572280848830224).epsilon(1e-13));
  CHECK(po.c_of_n.value() == doctest::Approx(1.0).epsilon(1e-14));

  // Narrower alpha0 widens the interval.
  const BoundResult tight =
      conc::confidence_interval(f0, MeasureCase::lsi, pl, 0.01, n, m);
  CHECK(tight.half_width() > ls.half_width());

  CHECK_THROWS_AS(conc::confidence_interval(f0, MeasureCase::lsi, pl, 0.0, n, m),
                  config_error);
  CHECK_THROWS_AS(conc::confidence_interval(f0, MeasureCase::lsi, pl, 1.0, n, m),
                  config_error);
  CHECK_THROWS_AS(
      conc::confidence_interval(f0, MeasureCase::sub_exponential, all_ones(n), alpha0, n, m),
      config_error);
  CHECK_THROWS_AS(conc::confidence_interval(f0, MeasureCase::heavy, pb, alpha0, n, m),
                  config_error);
}
