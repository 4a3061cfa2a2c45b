#include <cmath>
#include <complex>
#include <vector>

#include <doctest.h>

#include "spincant/coefficients.hpp"
#include "spincant/errors.hpp"
#include "spincant/oracle.hpp"

using namespace spincant;
using namespace spincant::oracle;

namespace {

constexpr double kPi = 3.14159265358979323846;

InitialState reference_init() {
  return InitialState::make(1.0, 0.5, {0.6, 0.0}, {0.0, 0.8});
}

// Moments from two resolutions combined as (4 fine - coarse) / 3.
std::vector<double> extrapolated_mean_z(const DimensionlessParams& p, const InitialState& init,
                                        double half_width, Eigen::Index coarse,
                                        const std::vector<double>& taus) {
  std::vector<double> out;
  GridRunSpec s;
  s.half_width = half_width;
  s.output_taus = taus;
  s.points = coarse;
  const auto a = grid_solver(p, init, s);
  s.points = 2 * coarse;
  const auto b = grid_solver(p, init, s);
  for (std::size_t i = 0; i < taus.size(); ++i) {
    out.push_back((4 * b.frames[i].mean_z_up - a.frames[i].mean_z_up) / 3);
  }
  return out;
}

}  // namespace

TEST_CASE("characteristics: no source keeps rho_hat equal to its initial value") {
  const auto p = DimensionlessParams::make(0.0, 0.0, 0.0);
  const auto init = reference_init();
  const auto poly0 = closed_form_poly(p, init, Block::up_up, 0.0);
  for (double k : {-1.0, 0.3, 2.0})
    for (double r : {-0.7, 0.0, 1.1}) {
      const auto c = trace_characteristic(p, init, Block::up_up, k, r, 2.3, 1e-3);
      CHECK(std::abs(c.log_amp.real() - poly0(c.k, c.r).real()) < 1e-12);
    }
}

TEST_CASE("characteristics: beta = 0 is a rotation with period 2 pi") {
  const auto p = DimensionlessParams::make(1.5, 0.0, 4.0);
  const auto c = trace_characteristic(p, reference_init(), Block::up_up, 1.0, 0.0, 2 * kPi, 1e-3);
  CHECK(c.k == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::fabs(c.r) < 1e-12);
}

TEST_CASE("characteristics: reconstruction matches the closed form") {
  const auto p = DimensionlessParams::make(2.0, 0.05, 10.0);
  const auto init = reference_init();
  for (Block b : kAllBlocks) {
    const auto traced = characteristic_poly(p, init, b, 3.7);
    const auto closed = closed_form_poly(p, init, b, 3.7);
    for (double k : {-0.4, 0.0, 0.6})
      for (double r : {-0.5, 0.2}) {
        const auto a = traced(k, r), e = closed(k, r);
        CHECK(std::abs(a - e) / std::max(std::abs(e), 1.0) < 1e-8);
      }
  }
}

TEST_CASE("characteristics: coarse step fails certification") {
  const auto p = DimensionlessParams::make(2.0, 0.05, 10.0);
  CharacteristicOptions opt;
  opt.step = 0.5;
  CHECK_THROWS_AS(characteristic_poly(p, reference_init(), Block::up_up, 3.7, opt), AccuracyError);
}

TEST_CASE("rk4 order") {
  const auto p = DimensionlessParams::make(2.0, 0.05, 10.0);
  const std::vector<double> steps{0.2, 0.1, 0.05};
  const auto m = measure_rk4_order(p, reference_init(), 3.7, steps);
  CHECK(m.order >= 3.7);
  CHECK(m.order <= 4.3);
  CHECK(m.errors[0] > m.errors[2]);
}

TEST_CASE("basis functions agree with the closed form") {
  for (double beta : {0.0, 0.05, 0.9}) {
    const auto p = DimensionlessParams::make(1.0, beta, 3.0);
    const auto a = characteristic_basis(p, 6.0);
    const auto e = eval_basis(p, 6.0);
    CHECK(a.q1 == doctest::Approx(e.q1).epsilon(1e-10));
    CHECK(a.p2 == doctest::Approx(e.p2).epsilon(1e-10));
    CHECK(a.q3 == doctest::Approx(e.q3).epsilon(1e-10));
    CHECK(a.damped_cap_f3 == doctest::Approx(e.damped_cap_f3).epsilon(1e-10));
  }
}

TEST_CASE("modulus peak agrees with quadrature") {
  const auto p = DimensionlessParams::make(2.0, 0.05, 10.0);
  const auto poly = closed_form_poly(p, reference_init(), Block::up_down, 1.3);
  const auto pk = modulus_peak(poly);
  const double at = log_modulus_by_quadrature(poly, pk.big_r, pk.r);
  // moving off the maximum costs what the curvature predicts
  const double h = 0.05;
  CHECK(log_modulus_by_quadrature(poly, pk.big_r, pk.r + h) - at ==
        doctest::Approx(0.5 * pk.curvature_rr * h * h).epsilon(1e-6));
  CHECK(log_modulus_by_quadrature(poly, pk.big_r + h, pk.r) - at ==
        doctest::Approx(0.5 * pk.curvature_RR * h * h).epsilon(1e-6));
}

TEST_CASE("ehrenfest reference") {
  const std::vector<double> taus{0.5, 1.0, 2.0, 3.0};
  SUBCASE("driven oscillator") {
    const auto p = DimensionlessParams::make(1.7, 0.0, 0.0);
    const auto m = ehrenfest_reference(p, 0.5, InitialState{}, taus);
    for (const auto& s : m) CHECK(s.z == doctest::Approx(1.7 * (1 - std::cos(s.tau))).epsilon(1e-10));
  }
  SUBCASE("fixed point") {
    const auto p = DimensionlessParams::make(1.7, 0.5, 0.0);
    const std::vector<double> late{80.0};
    const auto m = ehrenfest_reference(p, -0.5, InitialState::make(2, 1, {1, 0}, {0, 0}), late);
    CHECK(m[0].z == doctest::Approx(-1.7).epsilon(1e-8));
    CHECK(std::fabs(m[0].p) < 1e-8);
  }
}

TEST_CASE("grid: conservation and hermiticity") {
  const auto p = DimensionlessParams::make(2.0, 0.05, 10.0);
  GridRunSpec s;
  s.half_width = grid_required_half_width(p, reference_init());
  s.points = 96;
  s.output_taus = {0.5, 1.0, 2.0};
  const auto run = grid_solver(p, reference_init(), s);
  CHECK(run.max_trace_drift_rate() < 1e-6);
  for (const auto& f : run.frames) CHECK(f.hermiticity_residual < 1e-10);
  CHECK(run.frames.back().trace_up == doctest::Approx(0.36).epsilon(1e-6));
}

TEST_CASE("grid: second order in space") {
  const auto p = DimensionlessParams::make(0.8, 0.1, 2.0);
  const auto init = InitialState::make(0.3, -0.4, {0.6, 0}, {0, 0.8});
  std::vector<double> m;
  for (Eigen::Index n : {64, 128, 256}) {
    GridRunSpec s;
    s.half_width = 9.0;
    s.points = n;
    s.output_taus = {1.0};
    const auto f = grid_solver(p, init, s).frames.back();
    m.push_back(f.mean_z_up);
  }
  const double ratio = (m[1] - m[0]) / (m[2] - m[1]);
  CHECK(ratio > 3.5);
  CHECK(ratio < 4.5);
}

TEST_CASE("grid: free harmonic moments") {
  const auto p = DimensionlessParams::make(0.0, 0.0, 0.0);
  const auto init = InitialState::make(1.0, 0.5, {1, 0}, {0, 0});
  const std::vector<double> taus{0.5, 1.0};
  const auto m = extrapolated_mean_z(p, init, 8.0, 256, taus);
  for (std::size_t i = 0; i < taus.size(); ++i)
    CHECK(std::fabs(m[i] - (std::cos(taus[i]) + 0.5 * std::sin(taus[i]))) < 1e-6);
}

TEST_CASE("grid: moments follow the ehrenfest reference") {
  const auto p = DimensionlessParams::make(0.8, 0.1, 2.0);
  const auto init = InitialState::make(0.3, -0.4, {1, 0}, {0, 0});
  const std::vector<double> taus{1.0, 2.0, 3.0};
  const auto m = extrapolated_mean_z(p, init, 9.0, 128, taus);
  const auto e = ehrenfest_reference(p, 0.5, init, taus);
  for (std::size_t i = 0; i < taus.size(); ++i) CHECK(std::fabs(m[i] - e[i].z) < 1e-4);
}

TEST_CASE("grid: rejects what it cannot resolve") {
  GridRunSpec s;
  s.output_taus = {1.0};
  CHECK_THROWS_AS(grid_solver(DimensionlessParams::make(5.0, 0.05, 1.0), InitialState{}, s),
                  DomainError);
  s.half_width = 4.0;
  CHECK_THROWS_AS(grid_solver(DimensionlessParams::make(2.0, 0.05, 1.0), InitialState{}, s),
                  DomainError);
  s.half_width = 11.0;
  s.points = 64;
  s.dtau = 0.5;
  CHECK_THROWS_AS(grid_solver(DimensionlessParams::make(2.0, 0.05, 10.0), InitialState{}, s),
                  InstabilityError);
}
