#pragma once

#include <complex>

namespace spincant {

/// Coherent state centred at (z0, p0) times the spin spinor (amp_up, amp_down).
struct InitialState {
  double z0 = 0.0;
  double p0 = 0.0;
  std::complex<double> amp_up{1.0 / 1.4142135623730951, 0.0};
  std::complex<double> amp_down{1.0 / 1.4142135623730951, 0.0};

  /// Throws DomainError unless |a|^2 + |b|^2 = 1 to 1e-12 and all fields are finite.
  void validate() const;

  static InitialState make(double z0, double p0, std::complex<double> up,
                           std::complex<double> down);
};

}  // namespace spincant
