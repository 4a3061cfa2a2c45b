#pragma once

#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "spincant/coefficients.hpp"
#include "spincant/initial_state.hpp"
#include "spincant/params.hpp"

namespace spincant {

/// Geometry of the four Gaussian peaks at one instant (dimensionless units).
struct PeakGeometry {
  double tau = 0.0;
  double delta_d = 0.0;        // B2(+1/2) - B2(-1/2)
  double sigma_d = 0.0;        // sqrt(2) sigma_*, along the diagonal
  double sigma_d_prime = 0.0;  // across the diagonal
  double m_pp = 0.0;           // z = z' centre of rho_{++}
  double m_mm = 0.0;
  double delta_nd = 0.0;       // sqrt(2) eta |r0|
  double m_pm_z = 0.0, m_pm_zp = 0.0;
  double m_mp_z = 0.0, m_mp_zp = 0.0;
  double coherence_log = 0.0;  // xi eta^2
};

PeakGeometry peak_geometry(const DimensionlessParams& p, const InitialState& init, double tau);

/// First tau in (0, pi] with Delta_d = 2 sigma_d, and the eta^{-1/2} estimate.
struct ResolutionTime {
  std::optional<double> exact;  // empty: peaks never resolve within (0, pi]
  double approx = 0.0;          // 2^{1/4}/sqrt(eta); +inf for eta = 0
};

ResolutionTime resolution_time(const DimensionlessParams& p);

/// Separation criterion Delta_d - 2 sigma_d; positive once the peaks resolve.
double resolution_margin(const DimensionlessParams& p, double tau);

/// Inputs to the "1 << eta^2 << Q" window; "<<" means a ratio above `margin`.
struct MscsWindow {
  double eta_sq = 0.0;
  double quality_factor = 0.0;
  double margin = 10.0;
  bool lower_ok = false;  // eta^2 > margin
  bool upper_ok = false;  // Q / eta^2 > margin
  bool satisfied() const { return lower_ok && upper_ok; }
};

struct Thresholds {
  double t_static = 0.0;     // K
  double t_transient = 0.0;  // K
  double t_mscs = 0.0;       // K
  double t_mscs_mass_form = 0.0;  // K, same quantity via m = k_c / omega_c^2
  double tau0_exact = 0.0;   // NaN when unresolvable
  double tau0_approx = 0.0;
  double t0_seconds = 0.0;   // tau0_exact / omega_c (NaN when unresolvable)
  double tau_d = 0.0;        // 1 / (4 eta^2 D beta); +inf without a bath
  double max_transient_separation_m = 0.0;  // Delta_d(pi) z_q
  MscsWindow mscs_window;
};

Thresholds temperature_thresholds(const PhysicalSetup& setup, double mscs_margin = 10.0);

struct DecoherenceSample {
  double tau = 0.0;
  double coherence_log = 0.0;     // xi eta^2
  double coherence_factor = 0.0;  // exp(xi eta^2)
  double tau_d = 0.0;
};

/// Throws DomainError unless `taus` is strictly ascending and non-negative.
std::vector<DecoherenceSample> decoherence_profile(const DimensionlessParams& p,
                                                   const InitialState& init,
                                                   std::span<const double> taus);

/// Heuristic rescaling of the coupling with tip-spin distance:
/// dB/dz -> dB/dz * ratio^exponent, then all thresholds recomputed.
/// Temperatures scaling with F^2 move by ratio^(2 exponent).
struct DistanceScaling {
  double ratio = 1.0;
  double gradient_exponent = -4.0;  // point-dipole gradient
};

PhysicalSetup rescale_distance(const PhysicalSetup& setup, const DistanceScaling& scaling);
Thresholds distance_scaling_note(const PhysicalSetup& setup, const DistanceScaling& scaling);

nlohmann::json to_json(const PeakGeometry& g);
nlohmann::json to_json(const Thresholds& t);

}  // namespace spincant
