#pragma once

// CODATA 2018 exact/recommended values, SI units.
namespace spincant::constants {

inline constexpr double hbar = 1.054571817e-34;      // J s
inline constexpr double k_boltzmann = 1.380649e-23;  // J / K
inline constexpr double bohr_magneton = 9.2740100783e-24;  // J / T
inline constexpr double pi = 3.141592653589793238462643383279502884;

}  // namespace spincant::constants
