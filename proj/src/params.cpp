#include "spincant/params.hpp"

#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "spincant/constants.hpp"
#include "spincant/errors.hpp"

namespace spincant {

namespace {

void require_positive(double v, const char* field) {
  if (!std::isfinite(v) || v <= 0.0) throw DomainError(field, "must be finite and > 0");
}

std::string format_inequality(double lhs, const char* op, double rhs) {
  std::ostringstream os;
  os.precision(6);
  os << lhs << ' ' << op << ' ' << rhs;
  return os.str();
}

}  // namespace

PhysicalSetup PhysicalSetup::from_gradient(double spring_constant, double frequency_hz,
                                           double quality_factor, double temperature,
                                           double field_gradient, double g_factor) {
  PhysicalSetup s;
  s.spring_constant = spring_constant;
  s.angular_frequency = 2.0 * constants::pi * frequency_hz;
  s.quality_factor = quality_factor;
  s.temperature = temperature;
  s.field_gradient = std::fabs(field_gradient);
  s.g_factor = g_factor;
  require_positive(frequency_hz, "frequency");
  s.validate();
  return s;
}

PhysicalSetup PhysicalSetup::from_force(double spring_constant, double frequency_hz,
                                        double quality_factor, double temperature,
                                        double spin_force, double g_factor) {
  require_positive(spin_force, "spin_force");
  require_positive(g_factor, "g_factor");
  const double gradient = 2.0 * spin_force / (g_factor * constants::bohr_magneton);
  return from_gradient(spring_constant, frequency_hz, quality_factor, temperature, gradient,
                       g_factor);
}

double PhysicalSetup::frequency_hz() const { return angular_frequency / (2.0 * constants::pi); }

double PhysicalSetup::spin_force() const {
  return g_factor * constants::bohr_magneton * field_gradient / 2.0;
}

void PhysicalSetup::validate() const {
  require_positive(spring_constant, "spring_constant");
  require_positive(angular_frequency, "frequency");
  require_positive(quality_factor, "quality_factor");
  if (!std::isfinite(temperature) || temperature < 0.0)
    throw DomainError("temperature", "must be finite and >= 0");
  require_positive(field_gradient, "field_gradient");
  require_positive(g_factor, "g_factor");
}

DimensionlessParams DimensionlessParams::make(double eta, double beta, double big_d) {
  if (!std::isfinite(eta) || eta < 0.0) throw DomainError("eta", "must be finite and >= 0");
  if (!std::isfinite(beta) || beta < 0.0) throw DomainError("beta", "must be finite and >= 0");
  if (beta >= 2.0)
    throw UnsupportedRegimeError("beta", "beta >= 2 (overdamped, Q <= 1/2) is not supported");
  if (!std::isfinite(big_d) || big_d < 0.0) throw DomainError("D", "must be finite and >= 0");
  DimensionlessParams p;
  p.eta = eta;
  p.beta = beta;
  p.big_d = big_d;
  p.theta = std::sqrt((1.0 - beta / 2.0) * (1.0 + beta / 2.0));
  return p;
}

Quanta derive_quanta(const PhysicalSetup& setup) {
  setup.validate();
  const double k = setup.spring_constant;
  const double w = setup.angular_frequency;
  Quanta q;
  q.z_q = std::sqrt(constants::hbar * w / k);
  q.p_q = constants::hbar / q.z_q;
  q.f_q = k * q.z_q;
  q.mass = k / (w * w);
  return q;
}

DimensionlessParams derive_dimensionless(const PhysicalSetup& setup) {
  const Quanta q = derive_quanta(setup);
  const double eta = setup.spin_force() / q.f_q;
  const double beta = 1.0 / setup.quality_factor;
  const double big_d =
      constants::k_boltzmann * setup.temperature / (constants::hbar * setup.angular_frequency);
  if (beta >= 2.0)
    throw UnsupportedRegimeError("quality_factor",
                                 "Q <= 1/2 gives beta >= 2 (overdamped), not supported");
  return DimensionlessParams::make(eta, beta, big_d);
}

std::vector<RegimeWarning> validate_regime(const DimensionlessParams& p, double tau_max) {
  std::vector<RegimeWarning> out;
  if (p.big_d <= 10.0) {
    out.push_back({warning_code::kHighTemperature,
                   "high-temperature master equation needs D >> 1",
                   format_inequality(p.big_d, ">", 10.0), p.big_d, 10.0});
  }
  const double horizon = p.big_d > 0.0 ? 10.0 / p.big_d : INFINITY;
  if (!(tau_max > horizon)) {
    out.push_back({warning_code::kTimeHorizon,
                   "times of interest must exceed the hbar/k_B T validity horizon",
                   format_inequality(tau_max, ">", horizon), tau_max, horizon});
  }
  if (p.eta <= 10.0) {
    out.push_back({warning_code::kTau0Coupling, "tau0 approximation needs eta >> 1",
                   format_inequality(p.eta, ">", 10.0), p.eta, 10.0});
  }
  const double db = p.big_d * p.beta;
  const double thermal = db * db / std::sqrt(8.0);
  if (p.eta <= thermal) {
    out.push_back({warning_code::kTau0Thermal, "tau0 approximation needs eta >> (D beta)^2/sqrt(8)",
                   format_inequality(p.eta, ">", thermal), p.eta, thermal});
  }
  return out;
}

QuantumLimit quantum_limit(const PhysicalSetup& setup) {
  const Quanta q = derive_quanta(setup);
  return {q.z_q / std::sqrt(2.0), q.p_q / (std::sqrt(2.0) * q.mass)};
}

namespace {

double number_at(const nlohmann::json& j, const char* key, bool required, double fallback) {
  const auto it = j.find(key);
  if (it == j.end()) {
    if (required) throw DomainError(std::string("/") + key, "missing required key");
    return fallback;
  }
  if (!it->is_number()) throw DomainError(std::string("/") + key, "must be a number");
  return it->get<double>();
}

}  // namespace

PhysicalSetup physical_setup_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw DomainError("/", "configuration must be a JSON object");
  const double k = number_at(j, "spring_constant_N_per_m", true, 0.0);
  const double f = number_at(j, "frequency_Hz", true, 0.0);
  const double q = number_at(j, "quality_factor", true, 0.0);
  const double t = number_at(j, "temperature_K", true, 0.0);
  const double g = number_at(j, "g_factor", false, 2.0);
  const bool has_gradient = j.contains("field_gradient_T_per_m");
  const bool has_force = j.contains("spin_force_N");
  if (has_gradient == has_force)
    throw DomainError("/field_gradient_T_per_m",
                      "exactly one of field_gradient_T_per_m or spin_force_N is required");
  // Re-map DomainError field names onto JSON pointers.
  try {
    if (has_gradient)
      return PhysicalSetup::from_gradient(k, f, q, t, number_at(j, "field_gradient_T_per_m", true, 0),
                                          g);
    return PhysicalSetup::from_force(k, f, q, t, number_at(j, "spin_force_N", true, 0), g);
  } catch (const DomainError& e) {
    static const std::pair<const char*, const char*> keys[] = {
        {"spring_constant", "/spring_constant_N_per_m"},
        {"frequency", "/frequency_Hz"},
        {"quality_factor", "/quality_factor"},
        {"temperature", "/temperature_K"},
        {"field_gradient", "/field_gradient_T_per_m"},
        {"spin_force", "/spin_force_N"},
        {"g_factor", "/g_factor"}};
    for (const auto& [field, pointer] : keys)
      if (e.field() == field) throw DomainError(pointer, std::string(e.what()).substr(e.field().size() + 2));
    throw;
  }
}

nlohmann::json to_json(const PhysicalSetup& s) {
  return {{"spring_constant_N_per_m", s.spring_constant},
          {"frequency_Hz", s.frequency_hz()},
          {"quality_factor", s.quality_factor},
          {"temperature_K", s.temperature},
          {"field_gradient_T_per_m", s.field_gradient},
          {"spin_force_N", s.spin_force()},
          {"g_factor", s.g_factor}};
}

nlohmann::json to_json(const DimensionlessParams& p) {
  return {{"eta", p.eta}, {"beta", p.beta}, {"D", p.big_d}, {"theta", p.theta}};
}

nlohmann::json to_json(const RegimeWarning& w) {
  return {{"code", w.code}, {"message", w.message}, {"inequality", w.inequality},
          {"lhs", w.lhs}, {"rhs", w.rhs}};
}

}  // namespace spincant
