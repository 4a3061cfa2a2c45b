#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>

#include <omp.h>

#include "spincant/constants.hpp"
#include "spincant/errors.hpp"
#include "spincant/verify.hpp"

namespace spincant::app {

using nlohmann::json;
using oracle::ErrorAccumulator;
using oracle::LogDensityPoly;
using oracle::relative_error;

namespace {

struct Case {
  std::string label;
  DimensionlessParams p;
  InitialState init;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string describe(const Case& c, double tau) {
  return c.label + " (eta=" + num(c.p.eta) + " beta=" + num(c.p.beta) + " D=" + num(c.p.big_d) +
         " z0=" + num(c.init.z0) + " p0=" + num(c.init.p0) + " tau=" + num(tau) + ")";
}

Case reference_case() {
  return {"reference", DimensionlessParams::make(2.0, 0.05, 10.0), InitialState::make(1.0, 0.5, {0.6, 0}, {0, 0.8})};
}

std::vector<Case> property_cases(const RunConfig& c) {
  std::vector<Case> v{reference_case(),
                      {"weak-coupling", DimensionlessParams::make(0.7, 0.3, 2.0),
                       InitialState::make(-0.5, 1.2, {1 / std::sqrt(2.0), 0}, {0.5, 0.5})}};
  if (c.mode != ParamMode::none) v.push_back({"configured", c.params, c.init});
  return v;
}

// ------------------------------------------------------------ coefficient lists

struct Named {
  const char* name;
  double closed;
  double oracle;
  double scale;  // error denominator floor
};

const std::vector<std::string>& coefficient_names() {
  static const std::vector<std::string> n = {
      "sigma_star_sq", "b1",  "b2_up", "b2_down", "c1",  "c2_up", "c2_down", "c12",
      "c11",           "c10", "c21",   "c20",     "b11", "b10",   "b20",     "sigma_tilde_sq",
      "r0",            "xi"};
  return n;
}

std::vector<Named> compare(const DiagonalCoefficients<double>& a, const DiagonalCoefficients<double>& b,
                           const OffDiagonalCoefficients<double>& o,
                           const OffDiagonalCoefficients<double>& q) {
  // Cross terms are measured against their Cauchy-Schwarz bound: they can
  // vanish while the diagonal terms are large.
  const double b1_scale = 2 * std::sqrt(std::fabs(b.sigma_star_sq * b.c1));
  const double b11_scale = 2 * std::sqrt(std::fabs(q.sigma_star_sq * q.c12));
  return {{"sigma_star_sq", a.sigma_star_sq, b.sigma_star_sq, 1},
          {"b1", a.b1, b.b1, std::max(1.0, b1_scale)},
          {"b2_up", a.b2_up, b.b2_up, 1},
          {"b2_down", a.b2_down, b.b2_down, 1},
          {"c1", a.c1, b.c1, 1},
          {"c2_up", a.c2_up, b.c2_up, 1},
          {"c2_down", a.c2_down, b.c2_down, 1},
          {"sigma_star_sq", o.sigma_star_sq, q.sigma_star_sq, 1},
          {"c12", o.c12, q.c12, 1},
          {"c11", o.c11, q.c11, 1},
          {"c10", o.c10, q.c10, 1},
          {"c21", o.c21, q.c21, 1},
          {"c20", o.c20, q.c20, 1},
          {"b11", o.b11, q.b11, std::max(1.0, b11_scale)},
          {"b10", o.b10, q.b10, 1},
          {"b20", o.b20, q.b20, 1},
          {"sigma_tilde_sq", o.sigma_tilde_sq, q.sigma_tilde_sq, 1},
          {"r0", o.r0, q.r0, 1},
          {"xi", o.xi, q.xi, 1}};
}

void corrupt(std::vector<Named>& v, const VerifyOptions& opt) {
  if (opt.corrupt.empty()) return;
  for (auto& n : v)
    if (opt.corrupt == n.name) n.closed = n.closed * opt.corrupt_factor + (n.closed == 0 ? opt.corrupt_factor - 1 : 0);
}

double poly_error(const LogDensityPoly& a, const LogDensityPoly& b) {
  const std::complex<double> ca[] = {a.c0, a.ck, a.cr, a.ckk, a.ckr, a.crr};
  const std::complex<double> cb[] = {b.c0, b.ck, b.cr, b.ckk, b.ckr, b.crr};
  double diff = 0, size = 1;
  for (int i = 0; i < 6; ++i) {
    diff = std::max(diff, std::abs(ca[i] - cb[i]));
    size = std::max(size, std::abs(cb[i]));
  }
  return diff / size;
}

// ------------------------------------------------------------------ suites

struct Tuple {
  DimensionlessParams p;
  InitialState init;
  double tau;
};

std::vector<Tuple> random_tuples(std::uint64_t seed, int n) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto log_uniform = [&](double a, double b) {
    return std::exp(std::log(a) + (std::log(b) - std::log(a)) * unit(rng));
  };
  std::vector<Tuple> out;
  for (int t = 0; t < n; ++t) {
    const double eta = log_uniform(0.5, 200);
    const double beta = log_uniform(1e-5, 1.5);
    double big_d = log_uniform(1e-2, 1e5);
    if (t % 10 == 0) big_d = 0;
    const double tau = 50 * unit(rng);
    InitialState init;
    init.z0 = -3 + 6 * unit(rng);
    init.p0 = -3 + 6 * unit(rng);
    out.push_back({DimensionlessParams::make(eta, beta, big_d), init, tau});
  }
  return out;
}

std::string tuple_label(int i, const Tuple& t) {
  return "tuple " + std::to_string(i) + " (eta=" + num(t.p.eta) + " beta=" + num(t.p.beta) +
         " D=" + num(t.p.big_d) + " z0=" + num(t.init.z0) + " p0=" + num(t.init.p0) +
         " tau=" + num(t.tau) + ")";
}

oracle::QuantityReport random_coefficients(const std::vector<Tuple>& tuples, const VerifyOptions& opt) {
  struct Result {
    double error = 0;
    std::string where;
  };
  std::vector<Result> results(tuples.size());
  const auto n = static_cast<std::ptrdiff_t>(tuples.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const Tuple& t = tuples[i];
    const std::string label = tuple_label(static_cast<int>(i), t);
    try {
      auto cmp = compare(eval_diagonal(t.p, t.init, t.tau),
                         oracle::characteristic_diagonal(t.p, t.init, t.tau),
                         eval_offdiagonal(t.p, t.init, t.tau),
                         oracle::characteristic_offdiagonal(t.p, t.init, t.tau));
      corrupt(cmp, opt);
      for (const auto& c : cmp) {
        const double e = relative_error(c.closed, c.oracle, c.scale);
        if (e >= results[i].error) results[i] = {e, std::string(c.name) + " at " + label};
      }
    } catch (const std::exception& e) {
      results[i] = {INFINITY, label + ": " + e.what()};
    }
  }
  ErrorAccumulator acc("coefficients_vs_characteristics", opt.coefficient_tolerance);
  for (const auto& r : results) acc.add(r.error, r.where);
  return acc.finish();
}

oracle::QuantityReport random_basis(const std::vector<Tuple>& tuples, const VerifyOptions& opt) {
  ErrorAccumulator acc("basis_vs_characteristics", opt.coefficient_tolerance);
  const int n = std::min<int>(opt.basis_tuples, static_cast<int>(tuples.size()));
  std::vector<std::pair<double, std::string>> results(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    const Tuple& t = tuples[static_cast<std::size_t>(i)];
    const std::string label = tuple_label(i, t);
    try {
      const auto a = eval_basis(t.p, t.tau);
      const auto b = oracle::characteristic_basis(t.p, t.tau);
      const std::pair<const char*, std::pair<double, double>> v[] = {
          {"q1", {a.q1, b.q1}},
          {"q2", {a.q2, b.q2}},
          {"q3", {a.q3, b.q3}},
          {"p1", {a.p1, b.p1}},
          {"p2", {a.p2, b.p2}},
          {"p3", {a.p3, b.p3}},
          {"damped_cap_f1", {a.damped_cap_f1, b.damped_cap_f1}},
          {"damped_cap_f2", {a.damped_cap_f2, b.damped_cap_f2}},
          {"damped_cap_f3", {a.damped_cap_f3, b.damped_cap_f3}},
          {"damped_cap_g1", {a.damped_cap_g1, b.damped_cap_g1}},
          {"damped_cap_g2", {a.damped_cap_g2, b.damped_cap_g2}}};
      for (const auto& [name, pair] : v) {
        const double e = relative_error(pair.first, pair.second);
        if (e >= results[i].first) results[i] = {e, std::string(name) + " at " + label};
      }
    } catch (const std::exception& e) {
      results[i] = {INFINITY, label + ": " + e.what()};
    }
  }
  for (const auto& [e, w] : results) acc.add(e, w);
  return acc.finish();
}

oracle::QuantityReport rk4_order() {
  const Case c = reference_case();
  const double steps[] = {0.2, 0.1, 0.05};
  const auto m = oracle::measure_rk4_order(c.p, c.init, 3.7, steps);
  ErrorAccumulator acc("rk4_order", 0.3);
  acc.add(std::fabs(m.order - 4.0), "measured order " + num(m.order) + " at " + describe(c, 3.7));
  return acc.finish();
}

oracle::QuantityReport reference_polys(const VerifyOptions& opt) {
  const Case c = reference_case();
  ErrorAccumulator acc("reference_cases", opt.coefficient_tolerance);
  const std::pair<Block, double> runs[] = {{Block::up_up, 3.7},   {Block::down_down, 3.7},
                                           {Block::up_down, 3.7}, {Block::down_up, 3.7},
                                           {Block::up_down, 1.3}, {Block::down_up, 1.3}};
  for (const auto& [block, tau] : runs) {
    const std::string where = std::string(block_name(block)) + " at " + describe(c, tau);
    try {
      acc.add(poly_error(oracle::closed_form_poly(c.p, c.init, block, tau),
                         oracle::characteristic_poly(c.p, c.init, block, tau)),
              where);
    } catch (const std::exception& e) {
      acc.add(INFINITY, where + ": " + e.what());
    }
  }
  return acc.finish();
}

oracle::QuantityReport inverse_transform(const VerifyOptions& opt) {
  const Case c = reference_case();
  ErrorAccumulator acc("inverse_transform_quadrature", opt.coefficient_tolerance);
  for (double tau : {1.3, 3.7}) {
    const auto d = eval_diagonal(c.p, c.init, tau);
    const auto o = eval_offdiagonal(c.p, c.init, tau);
    for (Block b : kAllBlocks) {
      const LogDensityPoly poly = oracle::closed_form_poly(c.p, c.init, b, tau);
      const auto peak = oracle::modulus_peak(poly);
      const double amp = std::abs(b == Block::up_up     ? c.init.amp_up * std::conj(c.init.amp_up)
                                  : b == Block::down_down ? c.init.amp_down * std::conj(c.init.amp_down)
                                  : c.init.amp_up * std::conj(c.init.amp_down));
      for (double dr : {-1.0, 0.0, 0.7})
        for (double dbig : {-0.8, 0.0, 1.1}) {
          const double big_r = peak.big_r + dbig, r = peak.r + dr;
          std::complex<double> rho;
          if (b == Block::up_up || b == Block::down_down)
            rho = rho_diag(d, c.init, b == Block::up_up ? 0.5 : -0.5, big_r, r);
          else
            rho = rho_offdiag(o, c.p, c.init, b, big_r, r);
          const double quad = oracle::log_modulus_by_quadrature(poly, big_r, r);
          acc.add(std::fabs(std::log(std::abs(rho) / amp) - quad),
                  std::string(block_name(b)) + " R=" + num(big_r) + " r=" + num(r) + " at " +
                      describe(c, tau));
        }
    }
  }
  return acc.finish();
}

// ---------------------------------------------------------------- limits

oracle::QuantityReport limit_tau_zero(const std::vector<Case>& cases) {
  ErrorAccumulator acc("limit_tau_zero", 1e-12);
  for (const auto& c : cases) {
    const auto d = eval_diagonal(c.p, c.init, 0.0);
    const std::pair<const char*, double> errs[] = {
        {"sigma_star_sq", d.sigma_star_sq - 0.25}, {"b1", d.b1},
        {"b2_up", d.b2_up - c.init.z0},         {"b2_down", d.b2_down - c.init.z0},
        {"c1", d.c1 - 0.25},                    {"c2_up", d.c2_up - c.init.p0},
        {"c2_down", d.c2_down - c.init.p0}};
    for (const auto& [name, e] : errs) acc.add(std::fabs(e), std::string(name) + " at " + describe(c, 0));
  }
  return acc.finish();
}

oracle::QuantityReport limit_undamped(const std::vector<Case>& cases) {
  ErrorAccumulator acc("limit_undamped_trajectory", 1e-10);
  for (const auto& base : cases) {
    Case c = base;
    c.p = DimensionlessParams::make(c.p.eta, 0.0, c.p.big_d);
    for (double tau : {0.3, 1.0, constants::pi, 5.0, 10.0, 30.0}) {
      const auto d = eval_diagonal(c.p, c.init, tau);
      for (double s : {0.5, -0.5}) {
        const double exact = c.init.z0 * std::cos(tau) + c.init.p0 * std::sin(tau) +
                             2 * c.p.eta * s * (1 - std::cos(tau));
        acc.add(relative_error(d.b2(s), exact), "s=" + num(s) + " at " + describe(c, tau));
      }
    }
  }
  return acc.finish();
}

oracle::QuantityReport limit_long_time() {
  ErrorAccumulator acc("limit_long_time", 1e-2);
  const Case c{"long-time", DimensionlessParams::make(2.0, 0.05, 10.0), InitialState::make(1.0, 0.5, {1 / std::sqrt(2.0), 0}, {1 / std::sqrt(2.0), 0})};
  const double tau = 20.0 / c.p.beta;
  const PeakGeometry g = peak_geometry(c.p, c.init, tau);
  acc.add(std::fabs(g.delta_d / (2 * c.p.eta) - 1), "delta_d/(2 eta) at " + describe(c, tau));
  acc.add(std::fabs(g.sigma_d / std::sqrt(c.p.big_d) - 1), "sigma_d/sqrt(D) at " + describe(c, tau));
  return acc.finish();
}

// ------------------------------------------------------------- properties

const double kPropertyTaus[] = {0.5, 1.3, 3.7};

oracle::QuantityReport hermiticity(const std::vector<Case>& cases) {
  ErrorAccumulator acc("hermiticity", 1e-12);
  for (const auto& c : cases)
    for (double tau : kPropertyTaus) {
      RunConfig rc;
      rc.mode = ParamMode::dimensionless;
      rc.params = c.p;
      rc.init = c.init;
      rc.snapshot_tau = tau;
      GridSpec g = default_snapshot_grid(rc);
      g.a_count = g.b_count = 41;
      const DensityField f = sample_field(c.p, c.init, tau, g);
      double scale = 0;
      for (const auto& b : f.blocks) scale = std::max(scale, b.abs().maxCoeff());
      acc.add(f.hermiticity_residual() / std::max(scale, 1e-300), describe(c, tau));
    }
  return acc.finish();
}

oracle::QuantityReport trace(const std::vector<Case>& cases, double tol) {
  ErrorAccumulator acc("trace_conservation", tol);
  for (const auto& c : cases)
    for (double tau : kPropertyTaus) {
      const auto d = eval_diagonal(c.p, c.init, tau);
      const double width = std::sqrt(2 * d.sigma_star_sq);
      for (double s : {0.5, -0.5}) {
        const double centre = d.b2(s);
        const int n = 4001;
        const double lo = centre - 14 * width, h = 28 * width / (n - 1);
        double sum = 0;
        for (int i = 0; i < n; ++i) {
          const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
          sum += w * rho_diag(d, c.init, s, lo + h * i, 0.0).real();
        }
        const double expected = std::norm(s > 0 ? c.init.amp_up : c.init.amp_down);
        acc.add(relative_error(sum * h, expected), "s=" + num(s) + " at " + describe(c, tau));
      }
    }
  return acc.finish();
}

oracle::QuantityReport cauchy_schwarz(const std::vector<Case>& cases, std::vector<std::string>& notes) {
  ErrorAccumulator acc("cauchy_schwarz", 1e-9);
  for (const auto& c : cases) {
    if (c.p.big_d < 1.0) {
      notes.push_back("cauchy_schwarz: skipped " + c.label + " (D < 1, the high-temperature equation is not positivity preserving there)");
      continue;
    }
    for (double tau : kPropertyTaus) {
      const auto d = eval_diagonal(c.p, c.init, tau);
      const auto o = eval_offdiagonal(c.p, c.init, tau);
      const double w = std::sqrt(2 * d.sigma_star_sq);
      for (int a = -3; a <= 3; ++a)
        for (int b = -3; b <= 3; ++b) {
          const double z = d.b2_up + a * w, zp = d.b2_down + b * w;
          const double off = rho_offdiag_modulus(o, c.p, c.init, Block::up_down, 0.5 * (z + zp), z - zp);
          const double up = rho_diag_modulus(d, c.init, 0.5, z, 0.0);
          const double down = rho_diag_modulus(d, c.init, -0.5, zp, 0.0);
          if (!(up > 0 && down > 0)) continue;
          const double ratio = off * off / (up * down);
          acc.add(std::max(0.0, ratio - 1.0), "z=" + num(z) + " z'=" + num(zp) + " at " + describe(c, tau));
        }
    }
  }
  return acc.finish();
}

oracle::QuantityReport ehrenfest(const std::vector<Case>& cases, double tol) {
  ErrorAccumulator acc("ehrenfest_first_moment", tol);
  const std::vector<double> taus = {0.5, 1.0, 2.0, 3.7, 7.0, 12.0};
  for (const auto& c : cases)
    for (double s : {0.5, -0.5}) {
      const auto ref = oracle::ehrenfest_reference(c.p, s, c.init, taus);
      for (const auto& m : ref) {
        const auto d = eval_diagonal(c.p, c.init, m.tau);
        acc.add(relative_error(d.b2(s), m.z), "s=" + num(s) + " at " + describe(c, m.tau));
      }
    }
  return acc.finish();
}

oracle::QuantityReport beta_continuity(const std::vector<Case>& cases, double tol) {
  ErrorAccumulator acc("beta_zero_continuity", tol);
  for (const auto& c : cases) {
    const double eps = 1e-9 / std::max(1.0, c.p.big_d);
    const auto p0 = DimensionlessParams::make(c.p.eta, 0.0, c.p.big_d);
    const auto p1 = DimensionlessParams::make(c.p.eta, eps, c.p.big_d);
    for (double tau : {0.5, 3.0, 10.0}) {
      auto cmp = compare(eval_diagonal(p1, c.init, tau), eval_diagonal(p0, c.init, tau),
                         eval_offdiagonal(p1, c.init, tau), eval_offdiagonal(p0, c.init, tau));
      for (const auto& n : cmp)
        acc.add(relative_error(n.closed, n.oracle, n.scale),
                std::string(n.name) + " beta=" + num(eps) + " vs 0 at " + describe(c, tau));
    }
  }
  return acc.finish();
}

oracle::QuantityReport determinism(const RunConfig& c) {
  ErrorAccumulator acc("cli_determinism", 0.0);
  RunConfig rc = c;
  if (rc.mode == ParamMode::none) {
    const Case ref = reference_case();
    rc.mode = ParamMode::dimensionless;
    rc.params = ref.p;
    rc.init = ref.init;
  }
  if (rc.axes.empty()) {
    if (rc.physical())
      rc.axes = {{"quality_factor", {rc.setup->quality_factor, 10 * rc.setup->quality_factor}},
                 {"temperature_K", {rc.setup->temperature, 2 * rc.setup->temperature}}};
    else
      rc.axes = {{"D", {rc.params.big_d, 2 * rc.params.big_d}}, {"eta", {rc.params.eta, 2 * rc.params.eta}}};
  }
  GridSpec g = rc.snapshot_grid ? *rc.snapshot_grid : default_snapshot_grid(rc);
  g.a_count = std::min<Eigen::Index>(g.a_count, 33);
  g.b_count = std::min<Eigen::Index>(g.b_count, 33);
  rc.snapshot_grid = g;

  const std::vector<std::pair<const char*, std::function<std::string()>>> artifacts = {
      {"evolve", [&] { return evolve_csv(rc); }},
      {"sweep", [&] { return sweep_csv(rc); }},
      {"snapshot", [&] { return snapshot_csv(rc, snapshot_field(rc)); }},
      {"thresholds", [&] { return thresholds_report(rc).dump(); }}};
  const int threads = omp_get_max_threads();
  for (const auto& [name, make] : artifacts) {
    omp_set_num_threads(1);
    const std::string a = make();
    omp_set_num_threads(std::max(threads, 2));
    const std::string b = make();
    omp_set_num_threads(threads);
    const std::string again = make();
    acc.add(a == b && b == again ? 0.0 : 1.0, std::string(name) + " output");
  }
  return acc.finish();
}

oracle::QuantityReport grid_fields(long points) {
  ErrorAccumulator acc("grid_vs_closed_form", 1e-3);
  const auto p = DimensionlessParams::make(2.0, 0.05, 10.0);
  const InitialState init;
  oracle::GridRunSpec spec;
  spec.points = points;
  spec.output_taus = {1.0, 2.0};
  spec.field_taus = spec.output_taus;
  const auto run = oracle::grid_solver(p, init, spec);
  for (const auto& f : run.frames) {
    if (!f.fields) continue;
    for (Block b : kAllBlocks) {
      const auto& m = (*f.fields)[static_cast<int>(b)];
      double worst = 0;
      for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
          const double z = run.z_at(i), zp = run.z_at(j);
          const auto exact = rho_block(p, init, f.tau, b, 0.5 * (z + zp), z - zp);
          worst = std::max(worst, std::abs(exact - m(i, j)));
        }
      acc.add(worst, std::string(block_name(b)) + " at tau=" + num(f.tau) + ", " +
                         std::to_string(points) + "^2 grid");
    }
  }
  return acc.finish();
}

}  // namespace

VerifyReport run_verification(const RunConfig& c) {
  const auto& opt = c.verify;
  if (!opt.corrupt.empty()) {
    const auto& n = coefficient_names();
    if (std::find(n.begin(), n.end(), opt.corrupt) == n.end())
      throw DomainError("/verify/corrupt/coefficient", "unknown coefficient \"" + opt.corrupt + "\"");
  }
  VerifyReport r;
  const auto tuples = random_tuples(c.seed, std::max(opt.random_tuples, opt.basis_tuples));
  const std::vector<Tuple> coefficient_tuples(tuples.begin(), tuples.begin() + opt.random_tuples);
  const auto cases = property_cases(c);

  std::vector<std::string> notes;
  r.quantities = {random_coefficients(coefficient_tuples, opt),
                  random_basis(tuples, opt),
                  rk4_order(),
                  reference_polys(opt),
                  inverse_transform(opt),
                  limit_tau_zero(cases),
                  limit_undamped(cases),
                  limit_long_time(),
                  hermiticity(cases),
                  trace(cases, opt.property_tolerance),
                  cauchy_schwarz(cases, notes),
                  ehrenfest(cases, opt.property_tolerance),
                  beta_continuity(cases, opt.property_tolerance),
                  determinism(c)};
  if (opt.grid_points > 0) r.quantities.push_back(grid_fields(opt.grid_points));
  r.notes = notes;

  r.worst_ratio = -1;
  bool worst_fails = false;
  for (const auto& q : r.quantities) {
    if (!q.pass) r.pass = false;
    const double ratio = q.tolerance > 0 ? q.max_error / q.tolerance : (q.max_error > 0 ? INFINITY : 0.0);
    // A failing quantity always outranks a passing one.
    if ((!q.pass && !worst_fails) || (!q.pass == worst_fails && ratio > r.worst_ratio)) {
      worst_fails = !q.pass;
      r.worst_ratio = ratio;
      r.worst = q.name;
      r.worst_case = q.worst_case;
    }
  }
  return r;
}

json to_json(const VerifyReport& r, const RunConfig& c) {
  json q = json::array();
  for (const auto& x : r.quantities) q.push_back(oracle::to_json(x));
  return {{"tool", "spincant"},
          {"version", version()},
          {"command", "verify"},
          {"config", c.echo()},
          {"seed", c.seed},
          {"pass", r.pass},
          {"worst", {{"quantity", r.worst},
                     {"case", r.worst_case},
                     {"ratio_to_tolerance", std::isfinite(r.worst_ratio) ? json(r.worst_ratio) : json()}}},
          {"quantities", q},
          {"notes", r.notes}};
}

}  // namespace spincant::app
