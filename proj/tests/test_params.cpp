#include <cmath>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "spincant/constants.hpp"
#include "spincant/errors.hpp"
#include "spincant/params.hpp"

using namespace spincant;

namespace {

// Cantilever from the single-spin proposal, gradient chosen so that the
// static threshold is 1.7 mK.
PhysicalSetup gedanken(double temperature = 1e-3) {
  const double force = std::sqrt(1.7e-3 * constants::k_boltzmann * 6.5e-6);
  return PhysicalSetup::from_force(6.5e-6, 1700.0, 6700.0, temperature, force);
}

}  // namespace

TEST_CASE("quanta and dimensionless groups from SI inputs") {
  const auto s = gedanken();
  const auto q = derive_quanta(s);
  const double w = 2 * constants::pi * 1700.0;
  // hand computation
  CHECK(q.z_q == doctest::Approx(std::sqrt(constants::hbar * w / 6.5e-6)).epsilon(1e-14));
  CHECK(q.mass == doctest::Approx(6.5e-6 / (w * w)).epsilon(1e-14));
  CHECK(q.p_q * q.z_q == doctest::Approx(constants::hbar).epsilon(1e-14));

  const auto p = derive_dimensionless(s);
  CHECK(p.eta == doctest::Approx(144.348949203292).epsilon(1e-12));
  CHECK(p.beta == doctest::Approx(1.0 / 6700).epsilon(1e-15));
  CHECK(p.big_d == doctest::Approx(12256.834785937985).epsilon(1e-12));
  CHECK(q.z_q == doctest::Approx(4.1628982596444724e-13).epsilon(1e-12));
  CHECK(s.field_gradient == doctest::Approx(42116785.4924877).epsilon(1e-12));
}

TEST_CASE("gradient and force inputs are equivalent") {
  const auto a = gedanken();
  const auto b = PhysicalSetup::from_gradient(6.5e-6, 1700.0, 6700.0, 1e-3, a.field_gradient);
  CHECK(b.spin_force() == doctest::Approx(a.spin_force()).epsilon(1e-14));
  CHECK(derive_dimensionless(b).eta == doctest::Approx(derive_dimensionless(a).eta).epsilon(1e-14));
}

TEST_CASE("zero temperature gives D = 0") {
  CHECK(derive_dimensionless(gedanken(0.0)).big_d == 0.0);
}

TEST_CASE("invalid inputs name the field") {
  CHECK_THROWS_AS(PhysicalSetup::from_force(-1, 1700, 6700, 1e-3, 1e-16), DomainError);
  try {
    PhysicalSetup::from_force(6.5e-6, 1700, 6700, -1, 1e-16);
    FAIL("expected throw");
  } catch (const DomainError& e) {
    CHECK(e.field() == "temperature");
  }
  CHECK_THROWS_AS(DimensionlessParams::make(1, 2.0, 1), UnsupportedRegimeError);
  CHECK_THROWS_AS(DimensionlessParams::make(-1, 0.1, 1), DomainError);
  CHECK_THROWS_AS(derive_dimensionless(PhysicalSetup::from_force(6.5e-6, 1700, 0.4, 1, 1e-16)),
                  UnsupportedRegimeError);
}

TEST_CASE("theta") {
  CHECK(DimensionlessParams::make(1, 0, 1).theta == 1.0);
  CHECK(DimensionlessParams::make(1, 1.2, 1).theta == doctest::Approx(0.8).epsilon(1e-15));
}

TEST_CASE("json schema") {
  const nlohmann::json j = {{"spring_constant_N_per_m", 6.5e-6}, {"frequency_Hz", 1700},
                            {"quality_factor", 6700},             {"temperature_K", 1e-3},
                            {"field_gradient_T_per_m", 4.2e7}};
  const auto s = physical_setup_from_json(j);
  CHECK(s.g_factor == 2.0);
  CHECK(s.field_gradient == 4.2e7);

  auto both = j;
  both["spin_force_N"] = 1e-16;
  CHECK_THROWS_AS(physical_setup_from_json(both), DomainError);

  auto bad = j;
  bad["quality_factor"] = "high";
  try {
    physical_setup_from_json(bad);
    FAIL("expected throw");
  } catch (const DomainError& e) {
    CHECK(e.field() == "/quality_factor");
  }
  auto neg = j;
  neg["frequency_Hz"] = -5;
  try {
    physical_setup_from_json(neg);
    FAIL("expected throw");
  } catch (const DomainError& e) {
    CHECK(e.field() == "/frequency_Hz");
  }
}

TEST_CASE("regime warnings") {
  const auto p = derive_dimensionless(gedanken());
  CHECK(validate_regime(p, constants::pi).empty());

  const auto cold = DimensionlessParams::make(2, 0.05, 1);
  const auto w = validate_regime(cold, 1.0);
  bool high_t = false, coupling = false;
  for (const auto& x : w) {
    high_t |= x.code == warning_code::kHighTemperature;
    coupling |= x.code == warning_code::kTau0Coupling;
  }
  CHECK(high_t);
  CHECK(coupling);
}

TEST_CASE("quantum limit") {
  const auto s = gedanken();
  const auto q = derive_quanta(s);
  const auto ql = quantum_limit(s);
  CHECK(ql.position == doctest::Approx(q.z_q / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(ql.velocity == doctest::Approx(3.144195840680808e-09).epsilon(1e-10));
}
