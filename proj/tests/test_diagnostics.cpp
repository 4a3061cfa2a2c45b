#include <cmath>
#include <vector>

#include <doctest.h>

#include "spincant/constants.hpp"
#include "spincant/diagnostics.hpp"
#include "spincant/errors.hpp"

using namespace spincant;

namespace {

PhysicalSetup gedanken(double q = 6700.0, double force_scale = 1.0, double temperature = 1e-3) {
  const double force = std::sqrt(1.7e-3 * constants::k_boltzmann * 6.5e-6);
  return PhysicalSetup::from_force(6.5e-6, 1700.0, q, temperature, force * force_scale);
}

}  // namespace

TEST_CASE("threshold values") {
  const auto t = temperature_thresholds(gedanken());
  CHECK(t.t_static == doctest::Approx(1.7e-3).epsilon(1e-12));
  CHECK(t.t_transient == doctest::Approx(14.5021984145335).epsilon(1e-12));
  CHECK(t.t_mscs == doctest::Approx(3.1519261287170067e-07).epsilon(1e-12));
  CHECK(t.t_transient / t.t_static == doctest::Approx(4 * 6700 / constants::pi).epsilon(1e-12));
  CHECK(t.tau0_approx == doctest::Approx(0.09898073753343313).epsilon(1e-12));
  CHECK(t.tau0_exact == doctest::Approx(t.tau0_approx).epsilon(0.1));
  CHECK(t.t0_seconds == doctest::Approx(t.tau0_exact / (2 * constants::pi * 1700)).epsilon(1e-14));
  CHECK(t.max_transient_separation_m == doctest::Approx(2.4036399576795706e-10).epsilon(1e-3));
}

TEST_CASE("thresholds do not depend on temperature") {
  const auto a = temperature_thresholds(gedanken(6700, 1, 0.0));
  const auto b = temperature_thresholds(gedanken(6700, 1, 3.0));
  CHECK(a.t_static == b.t_static);
  CHECK(a.t_transient == b.t_transient);
  CHECK(a.t_mscs == b.t_mscs);
}

TEST_CASE("threshold scaling") {
  const auto base = temperature_thresholds(gedanken());
  CHECK(temperature_thresholds(gedanken(67000)).t_mscs == doctest::Approx(10 * base.t_mscs).epsilon(1e-12));
  CHECK(temperature_thresholds(gedanken(6700, 2)).t_static == doctest::Approx(4 * base.t_static).epsilon(1e-12));
}

TEST_CASE("mscs window margins") {
  const auto t = temperature_thresholds(gedanken());
  CHECK(t.mscs_window.lower_ok);
  CHECK_FALSE(t.mscs_window.upper_ok);  // eta^2 ~ 2.1e4 exceeds Q
  const auto loose = temperature_thresholds(gedanken(1e7));
  CHECK(loose.mscs_window.satisfied());
}

TEST_CASE("peak geometry is consistent with the coefficients") {
  const auto p = DimensionlessParams::make(5.0, 0.02, 40.0);
  InitialState init;
  init.z0 = 0.4;
  for (double tau : {0.0, 0.7, 2.0, 3.0}) {
    const auto g = peak_geometry(p, init, tau);
    const auto d = eval_diagonal(p, init, tau);
    CHECK(g.delta_d == doctest::Approx(d.b2_up - d.b2_down).epsilon(1e-12));
    CHECK(g.sigma_d == doctest::Approx(std::sqrt(2 * d.sigma_star_sq)).epsilon(1e-14));
    CHECK(g.m_pm_z - g.m_pm_zp == doctest::Approx(g.m_mp_zp - g.m_mp_z).epsilon(1e-14));
  }
  CHECK(peak_geometry(p, init, 0.0).delta_d == 0.0);
}

TEST_CASE("separation grows with coupling") {
  for (double tau : {0.3, 1.5, constants::pi}) {
    double last = -1;
    for (double eta : {0.5, 1.0, 4.0, 20.0}) {
      const double d = peak_geometry(DimensionlessParams::make(eta, 0.01, 10), InitialState{}, tau).delta_d;
      CHECK(d > last);
      last = d;
    }
  }
}

TEST_CASE("half period separation") {
  const auto p = DimensionlessParams::make(7.0, 1e-6, 1.0);
  CHECK(peak_geometry(p, InitialState{}, constants::pi).delta_d == doctest::Approx(4 * 7.0).epsilon(1e-5));
}

TEST_CASE("resolution time") {
  const auto p = DimensionlessParams::make(144.0, 1.5e-4, 1.25e4);
  const auto rt = resolution_time(p);
  REQUIRE(rt.exact.has_value());
  CHECK(resolution_margin(p, *rt.exact) == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(*rt.exact == doctest::Approx(rt.approx).epsilon(0.1));
  const auto none = resolution_time(DimensionlessParams::make(0.0, 0.1, 1.0));
  CHECK_FALSE(none.exact.has_value());
  CHECK(std::isinf(none.approx));
  CHECK_FALSE(resolution_time(DimensionlessParams::make(0.1, 0.1, 100.0)).exact.has_value());
}

TEST_CASE("decoherence profile") {
  const auto p = DimensionlessParams::make(2.0, 0.05, 10.0);
  const std::vector<double> taus = {0.0, 1.0, 2.0, 5.0};
  const auto prof = decoherence_profile(p, InitialState{}, taus);
  CHECK(prof[0].coherence_factor == 1.0);
  for (size_t i = 1; i < prof.size(); ++i) CHECK(prof[i].coherence_factor < prof[i - 1].coherence_factor);
  CHECK(prof[1].tau_d == doctest::Approx(1 / (4 * 4 * 10 * 0.05)).epsilon(1e-14));
  const std::vector<double> bad = {1.0, 0.5};
  CHECK_THROWS_AS(decoherence_profile(p, InitialState{}, bad), DomainError);
}

TEST_CASE("coherence exponent at short and long times") {
  const auto p = DimensionlessParams::make(2.0, 0.05, 10.0);
  const double tau = 1e-2;
  const double xi = eval_offdiagonal(p, InitialState{}, tau).xi;
  CHECK(xi / (-p.big_d * p.beta * std::pow(tau, 5) / 5) == doctest::Approx(1.0).epsilon(1e-2));
  const double late = eval_offdiagonal(p, InitialState{}, 20.0).xi;
  CHECK(late / (-4 * p.big_d * p.beta * 20.0) == doctest::Approx(1.014).epsilon(2e-3));
}

TEST_CASE("distance rescaling") {
  const auto s = gedanken(6700.0);
  DistanceScaling d;
  d.ratio = 10;
  d.gradient_exponent = -2;
  const auto t = distance_scaling_note(s, d);
  CHECK(t.t_transient == doctest::Approx(temperature_thresholds(s).t_transient * 1e-4).epsilon(1e-12));
  d.ratio = 0;
  CHECK_THROWS_AS(rescale_distance(s, d), DomainError);
}
