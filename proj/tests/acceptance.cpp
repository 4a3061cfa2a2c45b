// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "spincant/app.hpp"
#include "spincant/coefficients.hpp"
#include "spincant/constants.hpp"
#include "spincant/density.hpp"
#include "spincant/diagnostics.hpp"
#include "spincant/io.hpp"
#include "spincant/oracle.hpp"
#include "spincant/verify.hpp"

using namespace spincant;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Checks inside one criterion; every failed check is listed after the verdict.
struct Checks {
  std::vector<std::string> failed;
  std::vector<std::string> info;

  void near(const std::string& what, double value, double target, double rel) {
    const double err = std::fabs(value - target) / std::fabs(target);
    std::ostringstream s;
    s << what << " = " << value << " (target " << target << ", rel " << err << ", tol " << rel << ")";
    (err <= rel ? info : failed).push_back(s.str());
  }
  void within_factor(const std::string& what, double value, double target, double factor) {
    const double r = value / target;
    std::ostringstream s;
    s << what << " = " << value << " (target " << target << " within x" << factor << ")";
    (r <= factor && r >= 1 / factor ? info : failed).push_back(s.str());
  }
  void below(const std::string& what, double value, double limit) {
    std::ostringstream s;
    s << what << " = " << value << " (limit " << limit << ")";
    (value <= limit ? info : failed).push_back(s.str());
  }
  void truth(const std::string& what, bool ok) { (ok ? info : failed).push_back(what); }
};

struct Criterion {
  int number;
  std::string title;
  double time_limit_s;
  std::function<void(Checks&)> body;
};

PhysicalSetup gedanken(double q) {
  // F from T_static k_B = F^2 / k_c at T_static = 1.7 mK
  const double force = std::sqrt(1.7e-3 * constants::k_boltzmann * 6.5e-6);
  return PhysicalSetup::from_force(6.5e-6, 1700.0, q, 1e-3, force);
}

void thresholds(Checks& c) {
  const auto setup = gedanken(6700);
  c.near("spin force [N]", setup.spin_force(), 3.9059149312293016e-16, 1e-12);
  c.near("field gradient [T/m]", setup.field_gradient, 42116785.4924877, 1e-10);
  const auto t = temperature_thresholds(setup);
  const auto p = derive_dimensionless(setup);
  c.near("t_static [K]", t.t_static, 1.7e-3, 0.05);
  c.near("t_transient [K]", t.t_transient, 14.0, 0.10);
  c.near("t_transient / t_static", t.t_transient / t.t_static, 4 * 6700 / kPi, 1e-12);
  c.near("eta", p.eta, 144.0, 0.05);
  c.near("beta", p.beta, 1.5e-4, 0.02);
  c.near("D / T [1/K]", p.big_d / setup.temperature, 1.25e7, 0.03);
  c.within_factor("t_mscs [K]", t.t_mscs, 3e-7, 1.5);
  c.within_factor("t_mscs at Q = 67000 [K]", temperature_thresholds(gedanken(67000)).t_mscs, 3e-6, 1.5);
}

void transient_geometry(Checks& c) {
  const auto setup = gedanken(6700);
  const auto t = temperature_thresholds(setup);
  c.near("tau0", t.tau0_exact, 0.1, 0.05);
  c.near("t0 [s]", t.t0_seconds, 9.3e-6, 0.05);
  c.near("max Delta_d [m]", t.max_transient_separation_m, 0.24e-9, 0.05);

  // the same separation read off a sampled 256^2 field at tau = pi
  const auto p = derive_dimensionless(setup);
  const auto geom = peak_geometry(p, InitialState{}, kPi);
  GridSpec g;
  g.a_min = -3 * p.eta;
  g.a_max = 3 * p.eta;
  g.b_min = -6 * geom.sigma_d_prime;
  g.b_max = 6 * geom.sigma_d_prime;
  g.a_count = g.b_count = 256;
  const auto field = sample_field(p, InitialState{}, kPi, g);
  c.near("sampled peak separation [m]", app::sampled_peak_separation(field) * derive_quanta(setup).z_q,
         0.24e-9, 0.05);
}

app::RunConfig default_config() { return app::parse_config(nlohmann::json::object()); }

void coefficient_oracle(Checks& c) {
  const auto report = app::run_verification(default_config());
  for (const auto& q : report.quantities) {
    if (q.name == "coefficients_vs_characteristics") {
      c.truth("random tuples: " + std::to_string(q.samples) + " samples", q.samples >= 200);
      c.below("max relative error", q.max_error, 1e-8);
    }
  }
  const auto p = DimensionlessParams::make(2.0, 0.05, 10.0);
  const std::vector<double> steps{0.2, 0.1, 0.05};
  const auto order = oracle::measure_rk4_order(p, InitialState::make(1, 0.5, {0.6, 0}, {0, 0.8}), 3.7,
                                               steps);
  c.truth("rk4 order " + std::to_string(order.order) + " in [3.7, 4.3]",
          order.order >= 3.7 && order.order <= 4.3);
}

void field_oracle(Checks& c) {
  const auto p = DimensionlessParams::make(2.0, 0.05, 10.0);
  const InitialState init;
  oracle::GridRunSpec spec;
  spec.points = 512;
  spec.half_width = oracle::grid_required_half_width(p, init);
  for (int i = 1; i <= 10; ++i) spec.output_taus.push_back(0.5 * i);
  const auto run = oracle::grid_solver(p, init, spec);

  double worst_centre = 0.0, worst_herm = 0.0, worst_decay = 0.0, worst_decay_tau = 0.0;
  std::ostringstream by_tau;
  by_tau << "decay error by tau:";
  const double amp = std::abs(init.amp_up * std::conj(init.amp_down));
  for (const auto& f : run.frames) {
    const auto d = eval_diagonal(p, init, f.tau);
    worst_centre = std::max({worst_centre, std::fabs(f.mean_z_up - d.b2_up) / run.dz,
                             std::fabs(f.mean_z_down - d.b2_down) / run.dz});
    worst_herm = std::max(worst_herm, f.hermiticity_residual);
    const auto o = eval_offdiagonal(p, init, f.tau);
    const auto pk = oracle::modulus_peak(oracle::closed_form_poly(p, init, Block::up_down, f.tau));
    const double closed = amp * std::exp(pk.log_peak) / (2 * std::sqrt(kPi * o.sigma_star_sq));
    const double err = std::fabs(f.tracked_peak / closed - 1);
    by_tau << " " << f.tau << ":" << f.tracked_peak / closed - 1;
    if (err > worst_decay) {
      worst_decay = err;
      worst_decay_tau = f.tau;
    }
  }
  c.below("diagonal centre offset from B2 [cells]", worst_centre, 1.0);
  c.below("off-diagonal peak decay rel error (worst at tau " + std::to_string(worst_decay_tau) + ")",
          worst_decay, 0.05);
  c.info.push_back(by_tau.str());
  c.below("trace drift per unit tau", run.max_trace_drift_rate(), 1e-6);
  c.below("hermiticity residual", worst_herm, 1e-10);
}

void analytic_limits(Checks& c) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0, 1), pos(-3, 3);
  double t0 = 0.0, traj = 0.0;
  for (int n = 0; n < 50; ++n) {
    const auto p = DimensionlessParams::make(0.5 + 5 * u(rng), u(rng), 20 * u(rng));
    const auto init = InitialState::make(pos(rng), pos(rng), {1, 0}, {0, 0});
    const auto d = eval_diagonal(p, init, 0.0);
    t0 = std::max({t0, std::fabs(d.sigma_star_sq - 0.25), std::fabs(d.b1), std::fabs(d.b2_up - init.z0),
                   std::fabs(d.b2_down - init.z0), std::fabs(d.c1 - 0.25), std::fabs(d.c2_up - init.p0),
                   std::fabs(d.c2_down - init.p0)});

    const auto q = DimensionlessParams::make(p.eta, 0.0, p.big_d);
    for (double tau = 0.0; tau <= 30.0; tau += 0.37) {
      const auto e = eval_diagonal(q, init, tau);
      for (double s : {0.5, -0.5}) {
        const double want = init.z0 * std::cos(tau) + init.p0 * std::sin(tau) + 2 * q.eta * s * (1 - std::cos(tau));
        traj = std::max(traj, std::fabs(e.b2(s) - want) / std::max(1.0, std::fabs(want)));
      }
    }
  }
  c.below("tau = 0 coefficients vs initial state", t0, 1e-12);
  c.below("beta = 0 centres vs driven trajectory", traj, 1e-10);

  const auto p = DimensionlessParams::make(2.0, 0.05, 10.0);
  const auto g = peak_geometry(p, InitialState::make(1, 0.5, {0.6, 0}, {0, 0.8}), 20 / p.beta);
  c.near("Delta_d at beta tau = 20", g.delta_d, 2 * p.eta, 0.01);
  c.near("sigma_d at beta tau = 20", g.sigma_d, std::sqrt(p.big_d), 0.01);
}

void property_suites(Checks& c) {
  const fs::path out = fs::temp_directory_path() / ("spincant_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(out);
  const std::string cmd = "'" SPINCANT_CLI "' --quiet --out '" + out.string() + "' verify";
  const int status = std::system(cmd.c_str());
  const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  c.truth("verify exit code " + std::to_string(code), code == 0);
  if (fs::exists(out / "verify.json")) {
    const auto j = nlohmann::json::parse(io::read_file(out / "verify.json"));
    for (const char* name : {"hermiticity", "trace_conservation", "cauchy_schwarz",
                             "ehrenfest_first_moment", "beta_zero_continuity", "cli_determinism"}) {
      bool seen = false, pass = false;
      for (const auto& q : j["quantities"])
        if (q["name"] == name) {
          seen = true;
          pass = q["pass"].get<bool>();
        }
      c.truth(std::string(name) + (seen ? (pass ? " green" : " red") : " missing"), seen && pass);
    }
  } else {
    c.truth("verify.json written", false);
  }
  fs::remove_all(out);
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "threshold reproduction", 1.0, thresholds},
      {2, "transient geometry", 1.0, transient_geometry},
      {3, "coefficient oracle equivalence", 30.0, coefficient_oracle},
      {4, "field oracle equivalence (512^2 grid)", 300.0, field_oracle},
      {5, "analytic limits", 1.0, analytic_limits},
      {6, "property suites in one verify run", 300.0, property_suites},
  };
  int failures = 0;
  for (const auto& cr : criteria) {
    Checks c;
    const auto start = std::chrono::steady_clock::now();
    try {
      cr.body(c);
    } catch (const std::exception& e) {
      c.failed.push_back(std::string("threw: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    c.below("runtime [s]", secs, cr.time_limit_s);
    const bool pass = c.failed.empty();
    failures += pass ? 0 : 1;
    std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", cr.number, cr.title.c_str());
    for (const auto& s : c.failed) std::printf("    x %s\n", s.c_str());
    for (const auto& s : c.info) std::printf("    - %s\n", s.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
