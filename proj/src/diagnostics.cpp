#include "spincant/diagnostics.hpp"

#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "spincant/constants.hpp"
#include "spincant/errors.hpp"

namespace spincant {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

double decoherence_time(const DimensionlessParams& p) {
  const double rate = 4.0 * p.eta * p.eta * p.big_d * p.beta;
  return rate > 0.0 ? 1.0 / rate : kInf;
}

}  // namespace

PeakGeometry peak_geometry(const DimensionlessParams& p, const InitialState& init, double tau) {
  const auto basis = eval_basis(p, tau);
  const auto d = eval_diagonal(p, init, basis);
  const auto o = eval_offdiagonal(p, init, basis);
  PeakGeometry g;
  g.tau = tau;
  g.m_pp = d.b2_up;
  g.m_mm = d.b2_down;
  g.delta_d = d.b2_up - d.b2_down;
  g.sigma_d = std::sqrt(2.0 * d.sigma_star_sq);
  const double s2 = d.sigma_star_sq;
  g.sigma_d_prime = std::sqrt(2.0 * s2 / (4.0 * s2 * d.c1 - d.b1 * d.b1));
  const double half_split = 0.5 * p.eta * o.r0;
  g.m_pm_z = o.b20 - half_split;
  g.m_pm_zp = o.b20 + half_split;
  g.m_mp_z = o.b20 + half_split;
  g.m_mp_zp = o.b20 - half_split;
  g.delta_nd = std::sqrt(2.0) * p.eta * std::fabs(o.r0);
  g.coherence_log = o.xi * p.eta * p.eta;
  return g;
}

double resolution_margin(const DimensionlessParams& p, double tau) {
  // Peak separation and width do not depend on (z0, p0).
  const auto d = eval_diagonal(p, InitialState{}, tau);
  return (d.b2_up - d.b2_down) - 2.0 * std::sqrt(2.0 * d.sigma_star_sq);
}

ResolutionTime resolution_time(const DimensionlessParams& p) {
  ResolutionTime out;
  out.approx = p.eta > 0.0 ? std::pow(2.0, 0.25) / std::sqrt(p.eta) : kInf;
  if (p.eta <= 0.0) return out;

  constexpr int kScan = 4096;
  double lo = 0.0;
  for (int i = 1; i <= kScan; ++i) {
    const double hi = constants::pi * i / kScan;
    if (resolution_margin(p, hi) > 0.0) {
      double a = lo, b = hi;
      while (b - a > 1e-12) {
        const double mid = 0.5 * (a + b);
        (resolution_margin(p, mid) > 0.0 ? b : a) = mid;
      }
      out.exact = 0.5 * (a + b);
      return out;
    }
    lo = hi;
  }
  return out;
}

Thresholds temperature_thresholds(const PhysicalSetup& setup, double mscs_margin) {
  const Quanta q = derive_quanta(setup);
  const DimensionlessParams p = derive_dimensionless(setup);
  const double f = setup.spin_force();
  const double k = setup.spring_constant;
  const double qf = setup.quality_factor;
  const double kb = constants::k_boltzmann;
  const double hw = constants::hbar * setup.angular_frequency;

  Thresholds t;
  t.t_static = f * f / (kb * k);
  t.t_transient = 4.0 * qf * f * f / (constants::pi * kb * k);
  t.t_mscs = qf / kb * std::pow(hw, 1.75) * std::pow(k, 0.75) / std::pow(f, 1.5);
  t.t_mscs_mass_form = std::pow(constants::hbar, 1.75) * qf * std::pow(k, 13.0 / 8.0) /
                       (kb * std::pow(f, 1.5) * std::pow(q.mass, 7.0 / 8.0));

  const ResolutionTime rt = resolution_time(p);
  t.tau0_approx = rt.approx;
  t.tau0_exact = rt.exact.value_or(kNaN);
  t.t0_seconds = t.tau0_exact / setup.angular_frequency;
  t.tau_d = decoherence_time(p);
  t.max_transient_separation_m = peak_geometry(p, InitialState{}, constants::pi).delta_d * q.z_q;

  t.mscs_window.eta_sq = p.eta * p.eta;
  t.mscs_window.quality_factor = qf;
  t.mscs_window.margin = mscs_margin;
  t.mscs_window.lower_ok = t.mscs_window.eta_sq > mscs_margin;
  t.mscs_window.upper_ok = qf / t.mscs_window.eta_sq > mscs_margin;
  return t;
}

std::vector<DecoherenceSample> decoherence_profile(const DimensionlessParams& p,
                                                   const InitialState& init,
                                                   std::span<const double> taus) {
  for (std::size_t i = 0; i < taus.size(); ++i) {
    if (!(taus[i] >= 0.0)) throw DomainError("taus", "must be non-negative");
    if (i > 0 && !(taus[i] > taus[i - 1])) throw DomainError("taus", "must be strictly ascending");
  }
  std::vector<DecoherenceSample> out(taus.size());
  const double tau_d = decoherence_time(p);
  const auto n = static_cast<std::ptrdiff_t>(taus.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto o = eval_offdiagonal(p, init, taus[i]);
    const double log_c = o.xi * p.eta * p.eta;
    out[i] = {taus[i], log_c, std::exp(log_c), tau_d};
  }
  return out;
}

PhysicalSetup rescale_distance(const PhysicalSetup& setup, const DistanceScaling& scaling) {
  if (!(scaling.ratio > 0.0) || !std::isfinite(scaling.ratio))
    throw DomainError("distance_ratio", "must be finite and > 0");
  if (!std::isfinite(scaling.gradient_exponent))
    throw DomainError("gradient_exponent", "must be finite");
  PhysicalSetup out = setup;
  out.field_gradient = setup.field_gradient * std::pow(scaling.ratio, scaling.gradient_exponent);
  out.validate();
  return out;
}

Thresholds distance_scaling_note(const PhysicalSetup& setup, const DistanceScaling& scaling) {
  return temperature_thresholds(rescale_distance(setup, scaling));
}

namespace {

nlohmann::json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

nlohmann::json to_json(const PeakGeometry& g) {
  return {{"tau", g.tau},
          {"delta_d", g.delta_d},
          {"sigma_d", g.sigma_d},
          {"sigma_d_prime", g.sigma_d_prime},
          {"m_pp", g.m_pp},
          {"m_mm", g.m_mm},
          {"delta_nd", g.delta_nd},
          {"m_pm", {g.m_pm_z, g.m_pm_zp}},
          {"m_mp", {g.m_mp_z, g.m_mp_zp}},
          {"coherence_log", g.coherence_log}};
}

nlohmann::json to_json(const Thresholds& t) {
  return {{"t_static_K", t.t_static},
          {"t_transient_K", t.t_transient},
          {"t_mscs_K", t.t_mscs},
          {"t_mscs_mass_form_K", t.t_mscs_mass_form},
          {"tau0_exact", finite_or_null(t.tau0_exact)},
          {"tau0_approx", finite_or_null(t.tau0_approx)},
          {"t0_s", finite_or_null(t.t0_seconds)},
          {"tau_d", finite_or_null(t.tau_d)},
          {"max_transient_separation_m", t.max_transient_separation_m},
          {"mscs_window",
           {{"eta_sq", t.mscs_window.eta_sq},
            {"quality_factor", t.mscs_window.quality_factor},
            {"margin", t.mscs_window.margin},
            {"lower_ok", t.mscs_window.lower_ok},
            {"upper_ok", t.mscs_window.upper_ok},
            {"satisfied", t.mscs_window.satisfied()}}}};
}

}  // namespace spincant
