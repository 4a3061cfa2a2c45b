#include "spincant/initial_state.hpp"

#include <cmath>

#include "spincant/errors.hpp"

namespace spincant {

void InitialState::validate() const {
  if (!std::isfinite(z0)) throw DomainError("z0", "must be finite");
  if (!std::isfinite(p0)) throw DomainError("p0", "must be finite");
  const double norm = std::norm(amp_up) + std::norm(amp_down);
  if (!std::isfinite(norm) || std::fabs(norm - 1.0) > 1e-12)
    throw DomainError("amp_up", "spin amplitudes must satisfy |a|^2 + |b|^2 = 1");
}

InitialState InitialState::make(double z0, double p0, std::complex<double> up,
                                std::complex<double> down) {
  InitialState s{z0, p0, up, down};
  s.validate();
  return s;
}

}  // namespace spincant
