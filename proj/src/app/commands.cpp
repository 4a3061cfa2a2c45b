#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>

#include "spincant/app.hpp"
#include "spincant/constants.hpp"
#include "spincant/errors.hpp"
#include "spincant/io.hpp"
#include "spincant/verify.hpp"

namespace spincant::app {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string fmt(double v) { return io::format_double(v); }

std::string header(const RunConfig& c, const char* command) {
  std::string h = "# spincant " + std::string(version()) + "\n";
  h += "# command: " + std::string(command) + "\n";
  h += "# config: " + c.echo().dump() + "\n";
  return h;
}

double decoherence_time(const DimensionlessParams& p) {
  const double rate = 4.0 * p.eta * p.eta * p.big_d * p.beta;
  return rate > 0.0 ? 1.0 / rate : INFINITY;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(); }

fs::path prepare(const fs::path& out, const char* name) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) throw DomainError("--out", "cannot create directory " + out.string());
  return out / name;
}

CommandResult written(CommandResult r, std::initializer_list<fs::path> paths) {
  r.written.insert(r.written.end(), paths);
  return r;
}

}  // namespace

// ---------------------------------------------------------------- thresholds

json thresholds_report(const RunConfig& c) {
  c.require_params();
  const auto& p = c.params;
  json j;
  j["tool"] = "spincant";
  j["version"] = version();
  j["command"] = "thresholds";
  j["config"] = c.echo();
  j["dimensionless"] = to_json(p);
  const ResolutionTime rt = resolution_time(p);
  j["resolution_time"] = {{"tau0_exact", rt.exact ? json(*rt.exact) : json()},
                          {"tau0_approx", finite_or_null(rt.approx)}};
  j["tau_d"] = finite_or_null(decoherence_time(p));
  json warnings = json::array();
  for (const auto& w : validate_regime(p, constants::pi)) warnings.push_back(to_json(w));
  j["regime_warnings"] = warnings;

  if (c.physical()) {
    const auto& s = *c.setup;
    const Quanta q = derive_quanta(s);
    const Thresholds t = temperature_thresholds(s, c.mscs_margin);
    j["quanta"] = {{"z_q_m", q.z_q}, {"p_q_kg_m_per_s", q.p_q}, {"f_q_N", q.f_q}, {"mass_kg", q.mass}};
    j["spin_force_N"] = s.spin_force();
    j["D_per_K"] = constants::k_boltzmann / (constants::hbar * s.angular_frequency);
    j["thresholds"] = to_json(t);
    j["thresholds"]["transient_to_static_ratio"] = t.t_transient / t.t_static;
    const QuantumLimit ql = quantum_limit(s);
    j["quantum_limit"] = {{"position_m", ql.position}, {"velocity_m_per_s", ql.velocity}};
    if (c.distance) {
      const PhysicalSetup moved = rescale_distance(s, *c.distance);
      j["distance_scaling"] = {{"heuristic", true},
                               {"ratio", c.distance->ratio},
                               {"gradient_exponent", c.distance->gradient_exponent},
                               {"field_gradient_T_per_m", moved.field_gradient},
                               {"thresholds", to_json(temperature_thresholds(moved, c.mscs_margin))}};
    }
  }
  return j;
}

CommandResult cmd_thresholds(const RunConfig& c, const fs::path& out) {
  const json j = thresholds_report(c);
  const fs::path path = prepare(out, "thresholds.json");
  io::write_file_atomic(path, j.dump(2) + "\n");

  std::ostringstream s;
  const auto& d = j["dimensionless"];
  s << "eta = " << fmt(d["eta"].get<double>()) << ", beta = " << fmt(d["beta"].get<double>())
    << ", D = " << fmt(d["D"].get<double>()) << "\n";
  if (j.contains("thresholds")) {
    const auto& t = j["thresholds"];
    s << "t_static    = " << fmt(t["t_static_K"].get<double>()) << " K\n";
    s << "t_transient = " << fmt(t["t_transient_K"].get<double>()) << " K\n";
    s << "t_mscs      = " << fmt(t["t_mscs_K"].get<double>()) << " K\n";
    if (!t["t0_s"].is_null()) s << "t0          = " << fmt(t["t0_s"].get<double>()) << " s\n";
  }
  for (const auto& w : j["regime_warnings"])
    s << "warning: " << w["code"].get<std::string>() << ": " << w["inequality"].get<std::string>() << "\n";
  return written({0, s.str(), {}}, {path});
}

// -------------------------------------------------------------------- evolve

std::string evolve_csv(const RunConfig& c) {
  c.require_params();
  const auto& p = c.params;
  const double tau_d = decoherence_time(p);
  const double z_q = c.physical() ? derive_quanta(*c.setup).z_q : 0.0;
  const double omega = c.physical() ? c.setup->angular_frequency : 0.0;

  std::vector<PeakGeometry> rows(c.taus.size());
  const auto n = static_cast<std::ptrdiff_t>(c.taus.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) rows[i] = peak_geometry(p, c.init, c.taus[i]);

  std::string out = header(c, "evolve");
  out += "# tau_d: " + fmt(tau_d) + "\n";
  for (const auto& w : validate_regime(p, c.taus.back()))
    out += "# warning: " + w.code + ": " + w.message + " (" + w.inequality + ")\n";
  out += "tau,delta_d,sigma_d,sigma_d_prime,delta_nd,b2_up,b2_down,xi_eta2,coherence,past_tau_d";
  if (c.physical()) out += ",t_s,delta_d_m,sigma_d_m,sigma_d_prime_m,delta_nd_m";
  out += "\n";
  for (const auto& g : rows) {
    const double vals[] = {g.tau,     g.delta_d, g.sigma_d,       g.sigma_d_prime,
                           g.delta_nd, g.m_pp,   g.m_mm,          g.coherence_log,
                           std::exp(g.coherence_log)};
    for (double v : vals) out += fmt(v) + ",";
    out += g.tau >= tau_d ? "1" : "0";
    if (c.physical()) {
      const double dim[] = {g.tau / omega, g.delta_d * z_q, g.sigma_d * z_q,
                            g.sigma_d_prime * z_q, g.delta_nd * z_q};
      for (double v : dim) out += "," + fmt(v);
    }
    out += "\n";
  }
  return out;
}

CommandResult cmd_evolve(const RunConfig& c, const fs::path& out) {
  const std::string csv = evolve_csv(c);
  const fs::path path = prepare(out, "evolve.csv");
  io::write_file_atomic(path, csv);
  return written({0, "wrote " + std::to_string(c.taus.size()) + " rows to " + path.string() + "\n", {}},
                 {path});
}

// ------------------------------------------------------------------ snapshot

GridSpec default_snapshot_grid(const RunConfig& c) {
  c.require_params();
  const PeakGeometry g = peak_geometry(c.params, c.init, c.snapshot_tau);
  const auto d = eval_diagonal(c.params, c.init, c.snapshot_tau);
  const auto o = eval_offdiagonal(c.params, c.init, c.snapshot_tau);
  const double r_std = std::sqrt(2.0) * std::sqrt(d.sigma_star_sq);
  const double lo = std::min({g.m_pp, g.m_mm, o.b20});
  const double hi = std::max({g.m_pp, g.m_mm, o.b20});
  const double r_half = c.params.eta * std::fabs(o.r0) + 6.0 * g.sigma_d_prime;
  GridSpec s;
  s.kind = AxisKind::centre_relative;
  s.a_min = lo - 6.0 * r_std;
  s.a_max = hi + 6.0 * r_std;
  s.b_min = -r_half;
  s.b_max = r_half;
  s.a_count = 201;
  s.b_count = 201;
  return s;
}

DensityField snapshot_field(const RunConfig& c) {
  c.require_params();
  const GridSpec grid = c.snapshot_grid ? *c.snapshot_grid : default_snapshot_grid(c);
  return sample_field(c.params, c.init, c.snapshot_tau, grid, c.max_grid_points);
}

double sampled_peak_separation(const DensityField& f) {
  const auto& g = f.grid;
  const auto centre = [&](Block b) {
    const Eigen::ArrayXXd m = f.modulus(b);
    std::vector<double> line;
    std::vector<double> pos;
    if (g.kind == AxisKind::centre_relative) {
      Eigen::Index j0 = 0;
      for (Eigen::Index j = 1; j < g.b_count; ++j)
        if (std::fabs(g.b_at(j)) < std::fabs(g.b_at(j0))) j0 = j;
      for (Eigen::Index i = 0; i < g.a_count; ++i) {
        line.push_back(m(i, j0));
        pos.push_back(g.a_at(i));
      }
    } else {
      if (g.a_count != g.b_count || g.a_min != g.b_min || g.a_max != g.b_max)
        throw DomainError("grid", "peak separation on (z, z') grids needs identical axes");
      for (Eigen::Index i = 0; i < g.a_count; ++i) {
        line.push_back(m(i, i));
        pos.push_back(g.a_at(i));
      }
    }
    const auto it = std::max_element(line.begin(), line.end());
    const auto i = static_cast<std::size_t>(it - line.begin());
    if (i == 0 || i + 1 == line.size() || line[i - 1] <= 0 || line[i + 1] <= 0) return pos[i];
    const double l0 = std::log(line[i - 1]), l1 = std::log(line[i]), l2 = std::log(line[i + 1]);
    const double denom = l0 - 2 * l1 + l2;
    if (!(denom < 0)) return pos[i];
    return pos[i] + 0.5 * (l0 - l2) / denom * (pos[i + 1] - pos[i]);
  };
  return centre(Block::up_up) - centre(Block::down_down);
}

json snapshot_extra(const RunConfig& c, const DensityField& f) {
  json j;
  j["tool"] = "spincant";
  j["version"] = version();
  j["command"] = "snapshot";
  j["config"] = c.echo();
  const PeakGeometry g = peak_geometry(c.params, c.init, f.tau);
  j["peak_geometry"] = to_json(g);
  const double sep = sampled_peak_separation(f);
  j["sampled_peak_separation"] = sep;
  if (c.physical()) {
    const double z_q = derive_quanta(*c.setup).z_q;
    j["z_q_m"] = z_q;
    j["t_s"] = f.tau / c.setup->angular_frequency;
    j["delta_d_m"] = g.delta_d * z_q;
    j["delta_nd_m"] = g.delta_nd * z_q;
    j["sampled_peak_separation_m"] = sep * z_q;
  }
  return j;
}

std::string snapshot_csv(const RunConfig& c, const DensityField& f) {
  return header(c, "snapshot") + density_csv(f, json());
}

CommandResult cmd_snapshot(const RunConfig& c, const fs::path& out) {
  const DensityField f = snapshot_field(c);
  const json extra = snapshot_extra(c, f);
  const fs::path csv = prepare(out, "snapshot.csv");
  const fs::path bin = out / "snapshot.bin";
  const fs::path side = out / "snapshot.json";
  io::write_file_atomic(csv, snapshot_csv(c, f));
  write_density_binary(f, bin, side, extra);
  std::ostringstream s;
  s << "tau = " << fmt(f.tau) << ", grid " << f.grid.a_count << " x " << f.grid.b_count
    << ", peak separation = " << fmt(extra["sampled_peak_separation"].get<double>());
  if (c.physical()) s << " (" << fmt(extra["sampled_peak_separation_m"].get<double>()) << " m)";
  s << "\n";
  return written({0, s.str(), {}}, {csv, bin, side});
}

// --------------------------------------------------------------------- sweep

std::string sweep_csv(const RunConfig& c) {
  c.require_params();
  if (c.axes.empty()) throw DomainError("/sweep/axes", "no sweep axes declared");
  double total = 1;
  for (const auto& a : c.axes) total *= static_cast<double>(a.values.size());
  if (total > static_cast<double>(c.max_sweep_points))
    throw ResourceError("sweep of " + fmt(total) + " points exceeds the cap of " +
                        std::to_string(c.max_sweep_points));
  const auto count = static_cast<std::ptrdiff_t>(total);

  std::vector<std::string> rows(static_cast<std::size_t>(count));
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t idx = 0; idx < count; ++idx) {
    try {
      // Last axis varies fastest.
      std::vector<double> point(c.axes.size());
      std::ptrdiff_t rest = idx;
      for (std::size_t a = c.axes.size(); a-- > 0;) {
        const auto n = static_cast<std::ptrdiff_t>(c.axes[a].values.size());
        point[a] = c.axes[a].values[static_cast<std::size_t>(rest % n)];
        rest /= n;
      }
      std::string row;
      for (double v : point) row += fmt(v) + ",";
      if (c.physical()) {
        json in = c.physical_input;
        for (std::size_t a = 0; a < point.size(); ++a) {
          const std::string& name = c.axes[a].name;
          if (name == "spin_force_N") in.erase("field_gradient_T_per_m");
          if (name == "field_gradient_T_per_m") in.erase("spin_force_N");
          in[name] = point[a];
        }
        PhysicalSetup s;
        try {
          s = physical_setup_from_json(in);
        } catch (const DomainError& e) {
          throw DomainError("/sweep/axes" + e.field(), std::string(e.what()).substr(e.field().size() + 2));
        }
        const DimensionlessParams p = derive_dimensionless(s);
        const Thresholds t = temperature_thresholds(s, c.mscs_margin);
        const double vals[] = {p.eta,         p.beta,         p.big_d,        t.t_static,
                               t.t_transient, t.t_mscs,       t.tau0_exact,   t.tau0_approx,
                               t.t0_seconds,  t.tau_d};
        for (double v : vals) row += fmt(v) + ",";
        row += t.mscs_window.satisfied() ? "1" : "0";
      } else {
        double eta = c.params.eta, beta = c.params.beta, big_d = c.params.big_d;
        for (std::size_t a = 0; a < point.size(); ++a) {
          if (c.axes[a].name == "eta") eta = point[a];
          if (c.axes[a].name == "beta") beta = point[a];
          if (c.axes[a].name == "D") big_d = point[a];
        }
        DimensionlessParams p;
        try {
          p = DimensionlessParams::make(eta, beta, big_d);
        } catch (const DomainError& e) {
          throw DomainError("/sweep/axes/" + e.field(), std::string(e.what()).substr(e.field().size() + 2));
        }
        const ResolutionTime rt = resolution_time(p);
        const double vals[] = {p.eta, p.beta, p.big_d, rt.exact.value_or(NAN), rt.approx,
                               decoherence_time(p)};
        for (std::size_t k = 0; k < std::size(vals); ++k) row += (k ? "," : "") + fmt(vals[k]);
      }
      rows[static_cast<std::size_t>(idx)] = row + "\n";
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  std::string out = header(c, "sweep");
  for (const auto& a : c.axes) out += a.name + ",";
  out += c.physical() ? "eta,beta,D,t_static_K,t_transient_K,t_mscs_K,tau0_exact,tau0_approx,t0_s,"
                        "tau_d,mscs_window_ok\n"
                      : "eta,beta,D,tau0_exact,tau0_approx,tau_d\n";
  for (const auto& r : rows) out += r;
  return out;
}

CommandResult cmd_sweep(const RunConfig& c, const fs::path& out) {
  const std::string csv = sweep_csv(c);
  const fs::path path = prepare(out, "sweep.csv");
  io::write_file_atomic(path, csv);
  std::size_t rows = 1;
  for (const auto& a : c.axes) rows *= a.values.size();
  return written({0, "wrote " + std::to_string(rows) + " rows to " + path.string() + "\n", {}}, {path});
}

// -------------------------------------------------------------------- verify

CommandResult cmd_verify(const RunConfig& c, const fs::path& out) {
  const VerifyReport r = run_verification(c);
  const fs::path path = prepare(out, "verify.json");
  io::write_file_atomic(path, to_json(r, c).dump(2) + "\n");
  std::ostringstream s;
  for (const auto& q : r.quantities)
    s << (q.pass ? "PASS " : "FAIL ") << q.name << "  max " << fmt(q.max_error) << " / tol "
      << fmt(q.tolerance) << "\n";
  if (r.pass)
    s << "all " << r.quantities.size() << " checks passed\n";
  else
    s << "worst offender: " << r.worst << " (" << r.worst_case << ")\n";
  return written({r.pass ? 0 : 1, s.str(), {}}, {path});
}

}  // namespace spincant::app
