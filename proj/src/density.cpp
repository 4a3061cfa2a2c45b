#include "spincant/density.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "spincant/constants.hpp"
#include "spincant/errors.hpp"
#include "spincant/io.hpp"

namespace spincant {

namespace {

const double kInvTwoSqrtPi = 0.5 / std::sqrt(constants::pi);

cdouble spin_amp(const InitialState& init, double s) { return s > 0 ? init.amp_up : init.amp_down; }

cdouble offdiag_plus_minus(const OffDiagonalCoefficients<double>& c, double eta, cdouble prefactor,
                           double big_r, double r) {
  const double s2 = c.sigma_star_sq;
  const cdouble lead(-r * r * c.c12 - r * eta * c.c11 - eta * eta * c.c10,
                     r * c.c21 + eta * c.c20);
  const cdouble inner(-r * c.b11 - eta * c.b10, c.b20 - big_r);
  return prefactor * kInvTwoSqrtPi / std::sqrt(s2) * std::exp(lead + inner * inner / (4.0 * s2));
}

}  // namespace

std::string_view block_name(Block b) {
  switch (b) {
    case Block::up_up: return "up_up";
    case Block::up_down: return "up_down";
    case Block::down_up: return "down_up";
    case Block::down_down: return "down_down";
  }
  return "?";
}

Block block_from_name(std::string_view name) {
  for (Block b : kAllBlocks)
    if (block_name(b) == name) return b;
  throw DomainError("block", "unknown block name '" + std::string(name) + "'");
}

double spin_value(bool up) { return up ? 0.5 : -0.5; }

cdouble rho_diag(const DiagonalCoefficients<double>& c, const InitialState& init, double s,
                 double big_r, double r) {
  const double s2 = c.sigma_star_sq;
  const cdouble lead(-r * r * c.c1, r * c.c2(s));
  const cdouble inner(-r * c.b1, c.b2(s) - big_r);
  return std::norm(spin_amp(init, s)) * kInvTwoSqrtPi / std::sqrt(s2) *
         std::exp(lead + inner * inner / (4.0 * s2));
}

cdouble rho_offdiag(const OffDiagonalCoefficients<double>& c, const DimensionlessParams& p,
                    const InitialState& init, Block branch, double big_r, double r) {
  const cdouble ab = init.amp_up * std::conj(init.amp_down);
  if (branch == Block::up_down) return offdiag_plus_minus(c, p.eta, ab, big_r, r);
  if (branch == Block::down_up) return std::conj(offdiag_plus_minus(c, p.eta, ab, big_r, -r));
  throw DomainError("branch", "rho_offdiag needs up_down or down_up");
}

cdouble rho_diag(const DimensionlessParams& p, const InitialState& init, double tau, double s,
                 double big_r, double r) {
  return rho_diag(eval_diagonal(p, init, tau), init, s, big_r, r);
}

cdouble rho_offdiag(const DimensionlessParams& p, const InitialState& init, double tau,
                    Block branch, double big_r, double r) {
  return rho_offdiag(eval_offdiagonal(p, init, tau), p, init, branch, big_r, r);
}

cdouble rho_block(const DimensionlessParams& p, const InitialState& init, double tau, Block b,
                  double big_r, double r) {
  switch (b) {
    case Block::up_up: return rho_diag(p, init, tau, 0.5, big_r, r);
    case Block::down_down: return rho_diag(p, init, tau, -0.5, big_r, r);
    default: return rho_offdiag(p, init, tau, b, big_r, r);
  }
}

double rho_diag_modulus(const DiagonalCoefficients<double>& c, const InitialState& init, double s,
                        double big_r, double r) {
  const double s2 = c.sigma_star_sq;
  const double dr = c.b2(s) - big_r;
  return std::norm(spin_amp(init, s)) * kInvTwoSqrtPi / std::sqrt(s2) *
         std::exp(-r * r * (c.c1 - c.b1 * c.b1 / (4.0 * s2)) - dr * dr / (4.0 * s2));
}

double rho_offdiag_modulus(const OffDiagonalCoefficients<double>& c, const DimensionlessParams& p,
                           const InitialState& init, Block branch, double big_r, double r) {
  const double sign = branch == Block::up_down ? 1.0 : -1.0;
  const double s2 = c.sigma_star_sq;
  const double shift = r + sign * c.r0 * p.eta;
  const double dr = c.b20 - big_r;
  return std::abs(init.amp_up * std::conj(init.amp_down)) * kInvTwoSqrtPi / std::sqrt(s2) *
         std::exp(c.xi * p.eta * p.eta - shift * shift / (2.0 * c.sigma_tilde_sq) -
                  dr * dr / (4.0 * s2));
}

double GridSpec::a_at(Eigen::Index i) const {
  return a_min + (a_max - a_min) * static_cast<double>(i) / static_cast<double>(a_count - 1);
}

double GridSpec::b_at(Eigen::Index j) const {
  return b_min + (b_max - b_min) * static_cast<double>(j) / static_cast<double>(b_count - 1);
}

void GridSpec::validate() const {
  if (a_count < 2) throw DomainError("grid.a_count", "must be >= 2");
  if (b_count < 2) throw DomainError("grid.b_count", "must be >= 2");
  if (!std::isfinite(a_min) || !std::isfinite(a_max) || !(a_max > a_min))
    throw DomainError("grid.a_range", "must be finite with a_max > a_min");
  if (!std::isfinite(b_min) || !std::isfinite(b_max) || !(b_max > b_min))
    throw DomainError("grid.b_range", "must be finite with b_max > b_min");
}

double DensityField::hermiticity_residual() const {
  const Eigen::Index na = grid.a_count, nb = grid.b_count;
  const auto close = [](double x, double y) {
    return std::fabs(x - y) <= 1e-12 * std::max({1.0, std::fabs(x), std::fabs(y)});
  };
  const auto residual = [&](auto mirror) {
    double worst = 0.0;
    const std::pair<Block, Block> pairs[] = {{Block::up_up, Block::up_up},
                                             {Block::down_down, Block::down_down},
                                             {Block::up_down, Block::down_up}};
    for (const auto& [x, y] : pairs) {
      const auto& bx = block(x);
      const auto& by = block(y);
      for (Eigen::Index i = 0; i < na; ++i)
        for (Eigen::Index j = 0; j < nb; ++j) {
          const auto [mi, mj] = mirror(i, j);
          worst = std::max(worst, std::abs(bx(i, j) - std::conj(by(mi, mj))));
        }
    }
    return worst;
  };
  if (grid.kind == AxisKind::centre_relative) {
    if (!close(grid.b_min, -grid.b_max)) return 0.0;  // no mirrored points
    return residual([nb](Eigen::Index i, Eigen::Index j) { return std::pair{i, nb - 1 - j}; });
  }
  if (na != nb || !close(grid.a_min, grid.b_min) || !close(grid.a_max, grid.b_max)) return 0.0;
  return residual([](Eigen::Index i, Eigen::Index j) { return std::pair{j, i}; });
}

DensityField sample_field(const DimensionlessParams& p, const InitialState& init, double tau,
                          const GridSpec& grid, std::int64_t max_points) {
  grid.validate();
  init.validate();
  if (static_cast<double>(grid.a_count) * static_cast<double>(grid.b_count) >
      static_cast<double>(max_points))
    throw ResourceError("grid of " + std::to_string(grid.a_count) + " x " +
                        std::to_string(grid.b_count) + " exceeds the cap of " +
                        std::to_string(max_points) + " points");

  const auto diag = eval_diagonal(p, init, tau);
  const auto off = eval_offdiagonal(p, init, tau);

  DensityField f;
  f.grid = grid;
  f.tau = tau;
  f.params = p;
  f.init = init;
  f.provenance = provenance_hash(p, init);
  for (auto& b : f.blocks) b.resize(grid.a_count, grid.b_count);

  const Eigen::Index na = grid.a_count, nb = grid.b_count;
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < na; ++i) {
    for (Eigen::Index j = 0; j < nb; ++j) {
      double big_r = grid.a_at(i), r = grid.b_at(j);
      if (grid.kind == AxisKind::position_pair) {
        const double z = big_r, zp = r;
        big_r = 0.5 * (z + zp);
        r = z - zp;
      }
      f.blocks[0](i, j) = rho_diag(diag, init, 0.5, big_r, r);
      f.blocks[1](i, j) = rho_offdiag(off, p, init, Block::up_down, big_r, r);
      f.blocks[2](i, j) = rho_offdiag(off, p, init, Block::down_up, big_r, r);
      f.blocks[3](i, j) = rho_diag(diag, init, -0.5, big_r, r);
    }
  }
  return f;
}

std::string provenance_hash(const DimensionlessParams& p, const InitialState& init) {
  const double values[] = {p.eta,           p.beta,           p.big_d,
                           p.theta,         init.z0,          init.p0,
                           init.amp_up.real(), init.amp_up.imag(), init.amp_down.real(),
                           init.amp_down.imag()};
  std::string bytes(sizeof(values), '\0');
  std::memcpy(bytes.data(), values, sizeof(values));
  return io::hex64(io::fnv1a(bytes));
}

namespace {

const char* axis_names(AxisKind k, int which) {
  if (k == AxisKind::centre_relative) return which == 0 ? "R" : "r";
  return which == 0 ? "z" : "zp";
}

}  // namespace

nlohmann::json to_json(const GridSpec& g) {
  return {{"axes", g.kind == AxisKind::centre_relative ? "R_r" : "z_zp"},
          {"a_min", g.a_min},
          {"a_max", g.a_max},
          {"a_count", g.a_count},
          {"b_min", g.b_min},
          {"b_max", g.b_max},
          {"b_count", g.b_count}};
}

GridSpec grid_spec_from_json(const nlohmann::json& j) {
  GridSpec g;
  const std::string axes = j.value("axes", std::string("R_r"));
  if (axes == "R_r")
    g.kind = AxisKind::centre_relative;
  else if (axes == "z_zp")
    g.kind = AxisKind::position_pair;
  else
    throw DomainError("/axes", "must be \"R_r\" or \"z_zp\"");
  const auto num = [&](const char* key) {
    if (!j.contains(key) || !j.at(key).is_number())
      throw DomainError(std::string("/") + key, "missing or not a number");
    return j.at(key).get<double>();
  };
  const auto count = [&](const char* key) {
    if (!j.contains(key) || !j.at(key).is_number_integer())
      throw DomainError(std::string("/") + key, "missing or not an integer");
    return j.at(key).get<Eigen::Index>();
  };
  g.a_min = num("a_min");
  g.a_max = num("a_max");
  g.b_min = num("b_min");
  g.b_max = num("b_max");
  g.a_count = count("a_count");
  g.b_count = count("b_count");
  g.validate();
  return g;
}

nlohmann::json to_json(const InitialState& s) {
  return {{"z0", s.z0},
          {"p0", s.p0},
          {"amp_up", {s.amp_up.real(), s.amp_up.imag()}},
          {"amp_down", {s.amp_down.real(), s.amp_down.imag()}}};
}

InitialState initial_state_from_json(const nlohmann::json& j) {
  InitialState s;
  if (!j.is_object()) throw DomainError("/initial_state", "must be an object");
  const auto amp = [&](const char* key, cdouble fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (v.is_number()) return cdouble(v.get<double>(), 0.0);
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
      return cdouble(v[0].get<double>(), v[1].get<double>());
    throw DomainError(std::string("/initial_state/") + key, "must be a number or [re, im]");
  };
  if (j.contains("z0")) s.z0 = j.at("z0").get<double>();
  if (j.contains("p0")) s.p0 = j.at("p0").get<double>();
  s.amp_up = amp("amp_up", s.amp_up);
  s.amp_down = amp("amp_down", s.amp_down);
  try {
    s.validate();
  } catch (const DomainError& e) {
    throw DomainError("/initial_state/" + e.field(), std::string(e.what()).substr(e.field().size() + 2));
  }
  return s;
}

std::string density_csv(const DensityField& field, const nlohmann::json& metadata) {
  std::string out;
  out.reserve(static_cast<std::size_t>(field.grid.a_count * field.grid.b_count) * 4 * 64);
  out += "# spincant density field\n";
  out += "# tau=" + io::format_double(field.tau) + "\n";
  out += "# provenance=" + field.provenance + "\n";
  if (!metadata.is_null()) out += "# metadata=" + metadata.dump() + "\n";
  out += axis_names(field.grid.kind, 0);
  out += ',';
  out += axis_names(field.grid.kind, 1);
  out += ",block,re,im\n";
  for (Block b : kAllBlocks) {
    const auto& m = field.block(b);
    const std::string name(block_name(b));
    for (Eigen::Index i = 0; i < field.grid.a_count; ++i)
      for (Eigen::Index j = 0; j < field.grid.b_count; ++j) {
        out += io::format_double(field.grid.a_at(i));
        out += ',';
        out += io::format_double(field.grid.b_at(j));
        out += ',';
        out += name;
        out += ',';
        out += io::format_double(m(i, j).real());
        out += ',';
        out += io::format_double(m(i, j).imag());
        out += '\n';
      }
  }
  return out;
}

nlohmann::json density_sidecar(const DensityField& field, const nlohmann::json& extra) {
  nlohmann::json j;
  j["format"] = "spincant-density";
  j["format_version"] = 1;
  j["dtype"] = "float64";
  j["endianness"] = "little";
  j["layout"] = "block-major, then a row, then b column, then (re, im)";
  j["block_order"] = {"up_up", "up_down", "down_up", "down_down"};
  j["grid"] = to_json(field.grid);
  j["tau"] = field.tau;
  j["params"] = to_json(field.params);
  j["initial_state"] = to_json(field.init);
  j["param_hash"] = field.provenance;
  j["byte_count"] = 4 * 2 * 8 * field.grid.a_count * field.grid.b_count;
  if (!extra.is_null()) j["extra"] = extra;
  return j;
}

void write_density_binary(const DensityField& field, const std::filesystem::path& bin_path,
                          const std::filesystem::path& json_path, const nlohmann::json& extra) {
  static_assert(sizeof(double) == 8);
  const Eigen::Index na = field.grid.a_count, nb = field.grid.b_count;
  std::string bytes(static_cast<std::size_t>(4 * 2 * na * nb) * sizeof(double), '\0');
  char* out = bytes.data();
  for (Block b : kAllBlocks) {
    const auto& m = field.block(b);
    for (Eigen::Index i = 0; i < na; ++i)
      for (Eigen::Index j = 0; j < nb; ++j) {
        const double pair[2] = {m(i, j).real(), m(i, j).imag()};
        std::memcpy(out, pair, sizeof(pair));
        out += sizeof(pair);
      }
  }
  io::write_file_atomic(bin_path, bytes);
  io::write_file_atomic(json_path, density_sidecar(field, extra).dump(2) + "\n");
}

DensityField read_density_binary(const std::filesystem::path& bin_path,
                                 const std::filesystem::path& json_path) {
  const auto meta = nlohmann::json::parse(io::read_file(json_path));
  if (meta.value("format", std::string()) != "spincant-density")
    throw std::runtime_error(json_path.string() + ": not a spincant density sidecar");
  DensityField f;
  f.grid = grid_spec_from_json(meta.at("grid"));
  f.tau = meta.at("tau").get<double>();
  const auto& pj = meta.at("params");
  f.params = DimensionlessParams::make(pj.at("eta"), pj.at("beta"), pj.at("D"));
  f.init = initial_state_from_json(meta.at("initial_state"));
  f.provenance = meta.at("param_hash").get<std::string>();

  const std::string bytes = io::read_file(bin_path);
  const Eigen::Index na = f.grid.a_count, nb = f.grid.b_count;
  if (bytes.size() != static_cast<std::size_t>(4 * 2 * na * nb) * sizeof(double))
    throw std::runtime_error(bin_path.string() + ": size does not match sidecar grid");
  const char* in = bytes.data();
  for (auto& m : f.blocks) {
    m.resize(na, nb);
    for (Eigen::Index i = 0; i < na; ++i)
      for (Eigen::Index j = 0; j < nb; ++j) {
        double pair[2];
        std::memcpy(pair, in, sizeof(pair));
        in += sizeof(pair);
        m(i, j) = cdouble(pair[0], pair[1]);
      }
  }
  return f;
}

}  // namespace spincant
