#pragma once

// Independent numerical checks of the closed forms.
//
//  * Characteristics: the Fourier-space master equation is first order, so
//    rho_hat(k, r, tau) is the initial Gaussian evaluated at the foot of the
//    characteristic through (k, r) times the exponential of the source
//    integrated along it. Both are obtained here by RK4, backwards in time.
//  * Grid: explicit RK4 + centred differences on the (z, z') master equation.
//  * Ehrenfest: RK4 on the first-moment equations.

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "spincant/coefficients.hpp"
#include "spincant/density.hpp"
#include "spincant/initial_state.hpp"
#include "spincant/params.hpp"

namespace spincant::oracle {

// ---------------------------------------------------------------- characteristics

struct CharacteristicState {
  double r = 0.0;
  double k = 0.0;
  std::complex<double> log_amp;  // log rho_hat accumulated along the curve
};

/// Follows the characteristic through (k, r) at tau_end back to tau = 0.
/// Returns the foot (r, k) and log rho_hat(k, r, tau_end) without the spin
/// prefactor a_s a_{s'}^*.
CharacteristicState trace_characteristic(const DimensionlessParams& p, const InitialState& init,
                                         Block block, double k, double r, double tau_end,
                                         double step);

/// log rho_hat(k, r) = c0 + ck k + cr r + ckk k^2 + ckr k r + crr r^2.
struct LogDensityPoly {
  std::complex<double> c0, ck, cr, ckk, ckr, crr;
  std::complex<double> operator()(double k, double r) const {
    return c0 + ck * k + cr * r + ckk * k * k + ckr * k * r + crr * r * r;
  }
};

struct CharacteristicOptions {
  double step = 1e-3;
  double tolerance = 1e-10;  // relative change allowed under step halving
  bool certify = true;
};

/// The quadratic is recovered exactly (up to round-off) from six traced
/// characteristics. With `certify`, the step-halved result must agree to
/// `tolerance`, else AccuracyError carrying the measured order.
LogDensityPoly characteristic_poly(const DimensionlessParams& p, const InitialState& init,
                                   Block block, double tau, const CharacteristicOptions& opt = {});

DiagonalCoefficients<double> characteristic_diagonal(const DimensionlessParams& p,
                                                     const InitialState& init, double tau,
                                                     const CharacteristicOptions& opt = {});

/// sigma_tilde_sq, r0, xi come from maximising log|rho_{+-}(R, r)| of the
/// Gaussian inverse transform of the traced polynomial (modulus_peak).
OffDiagonalCoefficients<double> characteristic_offdiagonal(const DimensionlessParams& p,
                                                           const InitialState& init, double tau,
                                                           const CharacteristicOptions& opt = {});

/// Basis functions from forward RK4 of the homogeneous characteristic system
/// with quadrature of u_i u_j; raw growth terms filled when beta > 0.
BasisCoefficients<double> characteristic_basis(const DimensionlessParams& p, double tau,
                                               double step = 1e-3);

/// Peak of |rho(R, r)| for rho_hat = exp(poly): log|rho| is a quadratic in
/// (R, r); its maximiser is found with a 2x2 solve.
struct ModulusPeak {
  double log_peak = 0.0;     // log|rho| at the maximum, minus log(1/(2 sqrt(pi) sigma_*))
  double big_r = 0.0;        // R at the maximum
  double r = 0.0;            // r at the maximum
  double curvature_rr = 0.0; // d^2 log|rho| / dr^2 at fixed R
  double curvature_rR = 0.0; // cross term; zero for a separable peak
  double curvature_RR = 0.0;
};
ModulusPeak modulus_peak(const LogDensityPoly& poly);

/// log|rho(R, r)| with |rho| = |(1/2pi) int exp(poly(k, r) - i k R) dk|, by
/// trapezoid quadrature around the maximum of the real part. Cross-checks
/// modulus_peak.
double log_modulus_by_quadrature(const LogDensityPoly& poly, double big_r, double r,
                                 int points = 801);

/// The closed-form coefficients rewritten as a LogDensityPoly (no spin prefactor).
LogDensityPoly closed_form_poly(const DimensionlessParams& p, const InitialState& init,
                                Block block, double tau);

/// Error of RK4-traced polynomials against the closed form for each step,
/// and the least-squares slope of log(error) against log(step).
struct OrderMeasurement {
  std::vector<double> steps;
  std::vector<double> errors;
  double order = 0.0;
};
OrderMeasurement measure_rk4_order(const DimensionlessParams& p, const InitialState& init,
                                   double tau, std::span<const double> steps);

// ----------------------------------------------------------------- Ehrenfest

struct MomentSample {
  double tau = 0.0;
  double z = 0.0;
  double p = 0.0;
};

/// RK4 on z'' + beta z' + z = 2 eta s from (z0, p0). `taus` ascending.
std::vector<MomentSample> ehrenfest_reference(const DimensionlessParams& p, double s,
                                              const InitialState& init,
                                              std::span<const double> taus, double step = 1e-3);

// ---------------------------------------------------------------------- grid

struct GridRunSpec {
  double half_width = 11.0;         // domain [-L, L] in both z and z'
  Eigen::Index points = 128;        // per axis
  std::vector<double> output_taus;  // ascending, >= 0
  double dtau = 0.0;                // 0: automatic (stability estimate, halved)
  bool keep_fields = false;         // store all four blocks in every frame
  std::vector<double> field_taus;   // or only in frames at these tau values
  double max_eta = 3.0;
};

struct GridFrame {
  double tau = 0.0;
  double trace_up = 0.0, trace_down = 0.0;
  double mean_z_up = 0.0, mean_z_down = 0.0;  // first moments of the diagonal
  double hermiticity_residual = 0.0;          // incl. max |Im rho_ss(z, z)|
  double offdiag_peak = 0.0;                  // max |rho_{+-}| over the grid
  double offdiag_peak_z = 0.0, offdiag_peak_zp = 0.0;
  // Local maximum of |rho_{+-}| reached by steepest ascent from the previous
  // frame's tracked peak. Unlike the global maximum it is not captured by
  // round-off residue near z = z' once the coherence has decayed.
  double tracked_peak = 0.0;
  double tracked_peak_z = 0.0, tracked_peak_zp = 0.0;
  std::optional<std::array<Eigen::ArrayXXcd, 4>> fields;  // rows z, cols z'
};

struct GridRun {
  GridRunSpec spec;
  double dz = 0.0;
  double dtau = 0.0;
  double stability_estimate = 0.0;  // bound on the spectral radius used for dtau
  long steps = 0;
  std::vector<GridFrame> frames;
  double z_at(Eigen::Index i) const { return -spec.half_width + dz * static_cast<double>(i); }
  double max_trace_drift_rate() const;  // max |trace(tau) - trace(0)| / tau
};

/// Throws DomainError when the domain cannot hold the peaks,
/// InstabilityError when |rho| exceeds 10x its initial maximum.
GridRun grid_solver(const DimensionlessParams& p, const InitialState& init,
                    const GridRunSpec& spec);

/// Smallest admissible half-width for grid_solver.
double grid_required_half_width(const DimensionlessParams& p, const InitialState& init);

// ------------------------------------------------------------------- reports

struct QuantityReport {
  std::string name;
  double max_error = 0.0;
  double mean_error = 0.0;
  double tolerance = 0.0;
  long samples = 0;
  bool pass = true;
  std::string worst_case;  // human-readable description of the worst sample
};

/// Accumulates errors for one named quantity.
class ErrorAccumulator {
public:
  ErrorAccumulator(std::string name, double tolerance) {
    report_.name = std::move(name);
    report_.tolerance = tolerance;
  }
  void add(double error, const std::string& where);
  QuantityReport finish() const;

private:
  QuantityReport report_;
  double sum_ = 0.0;
};

/// |a - b| / max(|b|, floor).
double relative_error(double value, double reference, double floor = 1.0);

nlohmann::json to_json(const QuantityReport& r);

}  // namespace spincant::oracle
