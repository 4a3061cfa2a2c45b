#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace spincant {

/// Dimensional description of the cantilever + spin experiment (SI units).
///
/// The spin-cantilever coupling is stored as the field gradient; the force
/// F = g mu_B |dB_z/dz| / 2 is derived. Construct through the factories so
/// that validation always runs.
struct PhysicalSetup {
  double spring_constant = 0.0;    // N/m
  double angular_frequency = 0.0;  // rad/s
  double quality_factor = 0.0;
  double temperature = 0.0;        // K
  double field_gradient = 0.0;     // T/m, magnitude
  double g_factor = 2.0;

  static PhysicalSetup from_gradient(double spring_constant, double frequency_hz,
                                     double quality_factor, double temperature,
                                     double field_gradient, double g_factor = 2.0);
  static PhysicalSetup from_force(double spring_constant, double frequency_hz,
                                  double quality_factor, double temperature,
                                  double spin_force, double g_factor = 2.0);

  double frequency_hz() const;
  double spin_force() const;  // N

  /// Throws DomainError naming the first invalid field.
  void validate() const;
};

/// Natural units of coordinate, momentum and force of the cantilever.
struct Quanta {
  double z_q = 0.0;   // m
  double p_q = 0.0;   // kg m / s
  double f_q = 0.0;   // N
  double mass = 0.0;  // kg
};

/// eta (coupling), beta = 1/Q, D = k_B T / (hbar omega_c), theta = sqrt(1 - beta^2/4).
struct DimensionlessParams {
  double eta = 0.0;
  double beta = 0.0;
  double big_d = 0.0;
  double theta = 1.0;

  /// Validates 0 <= eta, 0 <= beta < 2, D >= 0 and fills theta.
  /// eta = 0 and beta = 0 are accepted as limits.
  static DimensionlessParams make(double eta, double beta, double big_d);
};

Quanta derive_quanta(const PhysicalSetup& setup);
DimensionlessParams derive_dimensionless(const PhysicalSetup& setup);

struct RegimeWarning {
  std::string code;
  std::string message;
  std::string inequality;  // the inequality that should hold
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Codes emitted by validate_regime.
namespace warning_code {
inline constexpr const char* kHighTemperature = "high_temperature_limit";
inline constexpr const char* kTimeHorizon = "master_equation_time_horizon";
inline constexpr const char* kTau0Coupling = "tau0_weak_coupling";
inline constexpr const char* kTau0Thermal = "tau0_thermal";
}  // namespace warning_code

/// Never throws; returns one record per violated assumption.
std::vector<RegimeWarning> validate_regime(const DimensionlessParams& p, double tau_max);

/// Quantum-limit spreads of the coherent state, z_q/sqrt(2) and p_q/(sqrt(2) m).
struct QuantumLimit {
  double position = 0.0;  // m
  double velocity = 0.0;  // m/s
};
QuantumLimit quantum_limit(const PhysicalSetup& setup);

// JSON schema keys: spring_constant_N_per_m, frequency_Hz, quality_factor,
// temperature_K, exactly one of field_gradient_T_per_m / spin_force_N, and
// optional g_factor. Errors are DomainError with field set to the JSON pointer.
PhysicalSetup physical_setup_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PhysicalSetup& setup);
nlohmann::json to_json(const DimensionlessParams& p);
nlohmann::json to_json(const RegimeWarning& w);

}  // namespace spincant
