#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "spincant/coefficients.hpp"
#include "spincant/initial_state.hpp"
#include "spincant/params.hpp"

namespace spincant {

using cdouble = std::complex<double>;

/// Spin blocks rho_{s s'} in storage order.
enum class Block : int { up_up = 0, up_down = 1, down_up = 2, down_down = 3 };
inline constexpr std::array<Block, 4> kAllBlocks{Block::up_up, Block::up_down, Block::down_up,
                                                 Block::down_down};
std::string_view block_name(Block b);
Block block_from_name(std::string_view name);
double spin_value(bool up);  // +1/2 or -1/2

// Point evaluation. (R, r) are centre-of-mass and relative coordinates,
// R = (z + z')/2, r = z - z'. The solution is exactly normalised: the r = 0
// slice of rho_ss integrates over R to |a_s|^2, and off-diagonal blocks keep
// the prefactor a b^* of the initial product state.

cdouble rho_diag(const DiagonalCoefficients<double>& c, const InitialState& init, double s,
                 double big_r, double r);
cdouble rho_offdiag(const OffDiagonalCoefficients<double>& c, const DimensionlessParams& p,
                    const InitialState& init, Block branch, double big_r, double r);

cdouble rho_diag(const DimensionlessParams& p, const InitialState& init, double tau, double s,
                 double big_r, double r);
cdouble rho_offdiag(const DimensionlessParams& p, const InitialState& init, double tau,
                    Block branch, double big_r, double r);
cdouble rho_block(const DimensionlessParams& p, const InitialState& init, double tau, Block b,
                  double big_r, double r);

/// Closed-form moduli (squeezed-Gaussian form); must equal |rho_*|.
double rho_diag_modulus(const DiagonalCoefficients<double>& c, const InitialState& init, double s,
                        double big_r, double r);
double rho_offdiag_modulus(const OffDiagonalCoefficients<double>& c, const DimensionlessParams& p,
                           const InitialState& init, Block branch, double big_r, double r);

enum class AxisKind { centre_relative, position_pair };  // (R, r) or (z, z')

struct GridSpec {
  AxisKind kind = AxisKind::centre_relative;
  double a_min = -1.0, a_max = 1.0;  // R or z
  double b_min = -1.0, b_max = 1.0;  // r or z'
  Eigen::Index a_count = 2, b_count = 2;

  double a_at(Eigen::Index i) const;
  double b_at(Eigen::Index j) const;
  /// Throws DomainError on non-finite or inverted ranges or counts < 2.
  void validate() const;
};

inline constexpr std::int64_t kDefaultMaxGridPoints = std::int64_t{4096} * 4096;

struct DensityField {
  GridSpec grid;
  double tau = 0.0;
  DimensionlessParams params;
  InitialState init;
  std::string provenance;  // hex hash of params + initial state
  std::array<Eigen::ArrayXXcd, 4> blocks;  // rows: a axis, cols: b axis

  const Eigen::ArrayXXcd& block(Block b) const { return blocks[static_cast<int>(b)]; }
  Eigen::ArrayXXd modulus(Block b) const { return block(b).abs(); }

  /// Largest |rho_{s s'}(R, r) - conj(rho_{s' s}(R, -r))| (or the (z, z')
  /// transpose) over grid points whose mirror is also on the grid.
  double hermiticity_residual() const;
};

/// Throws DomainError for a bad grid, ResourceError when a_count * b_count > max_points.
DensityField sample_field(const DimensionlessParams& p, const InitialState& init, double tau,
                          const GridSpec& grid,
                          std::int64_t max_points = kDefaultMaxGridPoints);

std::string provenance_hash(const DimensionlessParams& p, const InitialState& init);

// Export formats. CSV is long format (a, b, block, re, im) with '#' metadata
// lines. The binary file is row-major little-endian float64: for each block in
// storage order, for each a row, for each b column, (re, im). The JSON sidecar
// describes grid, tau and provenance and may carry an extra echo object.
std::string density_csv(const DensityField& field, const nlohmann::json& metadata);
nlohmann::json density_sidecar(const DensityField& field, const nlohmann::json& extra);
void write_density_binary(const DensityField& field, const std::filesystem::path& bin_path,
                          const std::filesystem::path& json_path, const nlohmann::json& extra);
DensityField read_density_binary(const std::filesystem::path& bin_path,
                                 const std::filesystem::path& json_path);

nlohmann::json to_json(const GridSpec& g);
GridSpec grid_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const InitialState& s);
InitialState initial_state_from_json(const nlohmann::json& j);

}  // namespace spincant
