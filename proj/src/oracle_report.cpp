#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "spincant/errors.hpp"
#include "spincant/oracle.hpp"

namespace spincant::oracle {

std::vector<MomentSample> ehrenfest_reference(const DimensionlessParams& p, double s,
                                              const InitialState& init,
                                              std::span<const double> taus, double step) {
  if (!(step > 0)) throw DomainError("step", "must be > 0");
  for (size_t i = 0; i < taus.size(); ++i)
    if (!(taus[i] >= 0) || !std::isfinite(taus[i]) || (i > 0 && !(taus[i] > taus[i - 1])))
      throw DomainError("taus", "must be finite, >= 0 and strictly ascending");

  const double force = 2.0 * p.eta * s;
  const auto rhs = [&](double z, double q) { return std::pair{q, -z - p.beta * q + force}; };
  std::vector<MomentSample> out;
  double tau = 0.0, z = init.z0, q = init.p0;
  for (double target : taus) {
    const double span = target - tau;
    if (span > 0) {
      const long n = std::max(1L, static_cast<long>(std::ceil(span / step - 1e-12)));
      const double h = span / static_cast<double>(n);
      for (long i = 0; i < n; ++i) {
        const auto [a1, b1] = rhs(z, q);
        const auto [a2, b2] = rhs(z + h / 2 * a1, q + h / 2 * b1);
        const auto [a3, b3] = rhs(z + h / 2 * a2, q + h / 2 * b2);
        const auto [a4, b4] = rhs(z + h * a3, q + h * b3);
        z += h / 6 * (a1 + 2 * a2 + 2 * a3 + a4);
        q += h / 6 * (b1 + 2 * b2 + 2 * b3 + b4);
      }
      tau = target;
    }
    out.push_back({target, z, q});
  }
  return out;
}

double relative_error(double value, double reference, double floor) {
  if (std::isnan(value) != std::isnan(reference)) return INFINITY;
  if (std::isnan(value)) return 0.0;
  return std::fabs(value - reference) / std::max(std::fabs(reference), floor);
}

void ErrorAccumulator::add(double error, const std::string& where) {
  const double e = std::isnan(error) ? INFINITY : error;
  if (report_.samples == 0 || e > report_.max_error) {
    report_.max_error = e;
    report_.worst_case = where;
  }
  sum_ += e;
  ++report_.samples;
}

QuantityReport ErrorAccumulator::finish() const {
  QuantityReport r = report_;
  r.mean_error = r.samples > 0 ? sum_ / static_cast<double>(r.samples) : 0.0;
  r.pass = r.max_error <= r.tolerance;
  return r;
}

nlohmann::json to_json(const QuantityReport& r) {
  const auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); };
  return {{"name", r.name},         {"max_error", num(r.max_error)},
          {"mean_error", num(r.mean_error)}, {"tolerance", r.tolerance},
          {"samples", r.samples},   {"pass", r.pass},
          {"worst_case", r.worst_case}};
}

}  // namespace spincant::oracle
