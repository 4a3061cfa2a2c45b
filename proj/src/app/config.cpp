#include <algorithm>
#include <cmath>
#include <set>

#include "spincant/app.hpp"
#include "spincant/errors.hpp"
#include "spincant/io.hpp"

namespace spincant::app {

using nlohmann::json;

const char* version() { return SPINCANT_VERSION; }

namespace {

// Re-throws a DomainError with its field resolved under `prefix`.
template <typename F>
auto under(const std::string& prefix, F&& f) {
  try {
    return f();
  } catch (const DomainError& e) {
    std::string field = e.field();
    const std::string msg = std::string(e.what()).substr(field.size() + 2);
    if (field.empty() || field[0] != '/') field = "/" + field;
    if (field == "/") field.clear();
    throw DomainError(prefix + field, msg);
  }
}

void check_keys(const json& j, const std::string& ptr, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw DomainError(ptr.empty() ? "/" : ptr, "must be an object");
  for (const auto& [key, value] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      throw DomainError(ptr + "/" + key, "unknown key");
  }
}

double number(const json& j, const std::string& ptr, const char* key, double fallback) {
  const auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number() || !std::isfinite(it->get<double>()))
    throw DomainError(ptr + "/" + key, "must be a finite number");
  return it->get<double>();
}

std::int64_t integer(const json& j, const std::string& ptr, const char* key, std::int64_t fallback,
                     std::int64_t min) {
  const auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number_integer()) throw DomainError(ptr + "/" + key, "must be an integer");
  const auto v = it->get<std::int64_t>();
  if (v < min) throw DomainError(ptr + "/" + key, "must be >= " + std::to_string(min));
  return v;
}

std::vector<double> number_list(const json& j, const std::string& ptr) {
  if (!j.is_array() || j.empty()) throw DomainError(ptr, "must be a non-empty array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number() || !std::isfinite(j[i].get<double>()))
      throw DomainError(ptr + "/" + std::to_string(i), "must be a finite number");
    out.push_back(j[i].get<double>());
  }
  return out;
}

std::vector<double> linspace(double a, double b, std::int64_t n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i)
    v[static_cast<std::size_t>(i)] =
        n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  if (n > 1) v.back() = b;
  return v;
}

void parse_evolve(const json& j, RunConfig& c) {
  const std::string ptr = "/evolve";
  check_keys(j, ptr, {"tau_start", "tau_stop", "tau_count", "taus"});
  if (j.contains("taus")) {
    if (j.contains("tau_start") || j.contains("tau_stop") || j.contains("tau_count"))
      throw DomainError(ptr + "/taus", "give either taus or tau_start/tau_stop/tau_count");
    c.taus = number_list(j["taus"], ptr + "/taus");
    c.tau_spec = {{"taus", c.taus}};
  } else {
    const double a = number(j, ptr, "tau_start", 0.0);
    const double b = number(j, ptr, "tau_stop", 2 * M_PI);
    const auto n = integer(j, ptr, "tau_count", 201, 1);
    if (n > 10'000'000) throw DomainError(ptr + "/tau_count", "must be <= 10000000");
    if (n > 1 && !(b > a)) throw DomainError(ptr + "/tau_stop", "must exceed tau_start");
    c.taus = linspace(a, b, n);
    c.tau_spec = {{"tau_start", a}, {"tau_stop", b}, {"tau_count", n}};
  }
  for (std::size_t i = 0; i < c.taus.size(); ++i) {
    if (c.taus[i] < 0) throw DomainError(ptr, "tau values must be >= 0");
    if (i > 0 && !(c.taus[i] > c.taus[i - 1]))
      throw DomainError(ptr, "tau values must be strictly ascending");
  }
}

void parse_snapshot(const json& j, RunConfig& c) {
  const std::string ptr = "/snapshot";
  check_keys(j, ptr, {"tau", "grid", "max_points"});
  c.snapshot_tau = number(j, ptr, "tau", 0.0);
  if (c.snapshot_tau < 0) throw DomainError(ptr + "/tau", "must be >= 0");
  c.max_grid_points = integer(j, ptr, "max_points", c.max_grid_points, 4);
  if (j.contains("grid")) c.snapshot_grid = under(ptr + "/grid", [&] { return grid_spec_from_json(j["grid"]); });
}

const std::set<std::string>& physical_axes() {
  static const std::set<std::string> s = {"spring_constant_N_per_m", "frequency_Hz",
                                          "quality_factor",          "temperature_K",
                                          "field_gradient_T_per_m",  "spin_force_N",
                                          "g_factor"};
  return s;
}

void parse_sweep(const json& j, RunConfig& c) {
  const std::string ptr = "/sweep";
  check_keys(j, ptr, {"axes", "max_points"});
  c.max_sweep_points = integer(j, ptr, "max_points", c.max_sweep_points, 1);
  if (!j.contains("axes")) return;
  const json& axes = j["axes"];
  if (!axes.is_array()) throw DomainError(ptr + "/axes", "must be an array");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < axes.size(); ++i) {
    const std::string ap = ptr + "/axes/" + std::to_string(i);
    const json& a = axes[i];
    check_keys(a, ap, {"name", "values", "start", "stop", "count", "scale"});
    if (!a.contains("name") || !a["name"].is_string()) throw DomainError(ap + "/name", "must be a string");
    SweepAxis axis;
    axis.name = a["name"].get<std::string>();
    if (!seen.insert(axis.name).second) throw DomainError(ap + "/name", "duplicate axis");
    const bool known = c.mode == ParamMode::physical
                           ? physical_axes().count(axis.name) > 0
                           : axis.name == "eta" || axis.name == "beta" || axis.name == "D";
    if (!known) throw DomainError(ap + "/name", "\"" + axis.name + "\" is not a sweepable parameter in this mode");
    if (a.contains("values")) {
      axis.values = number_list(a["values"], ap + "/values");
    } else {
      if (!a.contains("start") || !a.contains("stop") || !a.contains("count"))
        throw DomainError(ap, "needs values or start/stop/count");
      const double lo = number(a, ap, "start", 0), hi = number(a, ap, "stop", 0);
      const auto n = integer(a, ap, "count", 1, 1);
      const std::string scale = a.value("scale", std::string("linear"));
      if (scale == "log") {
        if (!(lo > 0 && hi > 0)) throw DomainError(ap + "/start", "log axes need positive bounds");
        axis.values = linspace(std::log(lo), std::log(hi), n);
        for (auto& v : axis.values) v = std::exp(v);
        axis.values.front() = lo;
        if (n > 1) axis.values.back() = hi;
      } else if (scale == "linear") {
        axis.values = linspace(lo, hi, n);
      } else {
        throw DomainError(ap + "/scale", "must be \"linear\" or \"log\"");
      }
    }
    c.axes.push_back(std::move(axis));
  }
  std::sort(c.axes.begin(), c.axes.end(),
            [](const SweepAxis& a, const SweepAxis& b) { return a.name < b.name; });
}

void parse_verify(const json& j, RunConfig& c) {
  const std::string ptr = "/verify";
  check_keys(j, ptr, {"random_tuples", "basis_tuples", "coefficient_tolerance",
                      "property_tolerance", "corrupt", "grid_points"});
  auto& v = c.verify;
  v.random_tuples = static_cast<int>(integer(j, ptr, "random_tuples", v.random_tuples, 0));
  v.basis_tuples = static_cast<int>(integer(j, ptr, "basis_tuples", v.basis_tuples, 0));
  v.coefficient_tolerance = number(j, ptr, "coefficient_tolerance", v.coefficient_tolerance);
  v.property_tolerance = number(j, ptr, "property_tolerance", v.property_tolerance);
  if (!(v.coefficient_tolerance > 0)) throw DomainError(ptr + "/coefficient_tolerance", "must be > 0");
  if (!(v.property_tolerance > 0)) throw DomainError(ptr + "/property_tolerance", "must be > 0");
  v.grid_points = integer(j, ptr, "grid_points", 0, 0);
  if (v.grid_points != 0 && v.grid_points < 16) throw DomainError(ptr + "/grid_points", "must be 0 or >= 16");
  if (j.contains("corrupt")) {
    const json& k = j["corrupt"];
    check_keys(k, ptr + "/corrupt", {"coefficient", "factor"});
    if (!k.contains("coefficient") || !k["coefficient"].is_string())
      throw DomainError(ptr + "/corrupt/coefficient", "must be a string");
    v.corrupt = k["coefficient"].get<std::string>();
    v.corrupt_factor = number(k, ptr + "/corrupt", "factor", v.corrupt_factor);
  }
}

}  // namespace

void RunConfig::require_params() const {
  if (mode == ParamMode::none)
    throw DomainError("/", "exactly one of \"physical\" or \"dimensionless\" is required");
}

RunConfig parse_config(const json& j) {
  check_keys(j, "", {"physical", "dimensionless", "initial_state", "seed", "mscs_margin",
                     "distance_scaling", "evolve", "snapshot", "sweep", "verify"});
  RunConfig c;
  if (j.contains("physical") && j.contains("dimensionless"))
    throw DomainError("/dimensionless", "exactly one of \"physical\" or \"dimensionless\" is allowed");
  if (j.contains("physical")) {
    c.mode = ParamMode::physical;
    c.physical_input = j["physical"];
    c.setup = under("/physical", [&] { return physical_setup_from_json(j["physical"]); });
    c.params = derive_dimensionless(*c.setup);
  } else if (j.contains("dimensionless")) {
    const json& d = j["dimensionless"];
    check_keys(d, "/dimensionless", {"eta", "beta", "D"});
    for (const char* key : {"eta", "beta", "D"})
      if (!d.contains(key)) throw DomainError(std::string("/dimensionless/") + key, "missing required key");
    c.mode = ParamMode::dimensionless;
    c.params = under("/dimensionless", [&] {
      return DimensionlessParams::make(number(d, "/dimensionless", "eta", 0),
                                       number(d, "/dimensionless", "beta", 0),
                                       number(d, "/dimensionless", "D", 0));
    });
  }
  if (j.contains("initial_state")) {
    check_keys(j["initial_state"], "/initial_state", {"z0", "p0", "amp_up", "amp_down"});
    c.init = initial_state_from_json(j["initial_state"]);
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw DomainError("/seed", "must be a non-negative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  c.mscs_margin = number(j, "", "mscs_margin", c.mscs_margin);
  if (!(c.mscs_margin > 1)) throw DomainError("/mscs_margin", "must be > 1");
  if (j.contains("distance_scaling")) {
    const json& d = j["distance_scaling"];
    check_keys(d, "/distance_scaling", {"ratio", "gradient_exponent"});
    DistanceScaling s;
    s.ratio = number(d, "/distance_scaling", "ratio", s.ratio);
    s.gradient_exponent = number(d, "/distance_scaling", "gradient_exponent", s.gradient_exponent);
    if (!(s.ratio > 0)) throw DomainError("/distance_scaling/ratio", "must be > 0");
    c.distance = s;
  }
  parse_evolve(j.value("evolve", json::object()), c);
  parse_snapshot(j.value("snapshot", json::object()), c);
  parse_sweep(j.value("sweep", json::object()), c);
  parse_verify(j.value("verify", json::object()), c);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = io::read_file(path);
  } catch (const std::exception& e) {
    throw DomainError("--config", e.what());
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DomainError("/", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

json RunConfig::echo() const {
  json j;
  j["version"] = version();
  if (mode == ParamMode::physical) j["physical"] = physical_input;
  if (mode == ParamMode::dimensionless)
    j["dimensionless"] = {{"eta", params.eta}, {"beta", params.beta}, {"D", params.big_d}};
  j["initial_state"] = to_json(init);
  j["seed"] = seed;
  j["mscs_margin"] = mscs_margin;
  if (distance)
    j["distance_scaling"] = {{"ratio", distance->ratio},
                             {"gradient_exponent", distance->gradient_exponent}};
  j["evolve"] = tau_spec;
  j["snapshot"] = {{"tau", snapshot_tau}, {"max_points", max_grid_points}};
  if (snapshot_grid) j["snapshot"]["grid"] = to_json(*snapshot_grid);
  json axes = json::array();
  for (const auto& a : this->axes) axes.push_back({{"name", a.name}, {"values", a.values}});
  j["sweep"] = {{"axes", axes}, {"max_points", max_sweep_points}};
  j["verify"] = {{"random_tuples", verify.random_tuples},
                 {"basis_tuples", verify.basis_tuples},
                 {"coefficient_tolerance", verify.coefficient_tolerance},
                 {"property_tolerance", verify.property_tolerance},
                 {"grid_points", verify.grid_points}};
  if (!verify.corrupt.empty())
    j["verify"]["corrupt"] = {{"coefficient", verify.corrupt}, {"factor", verify.corrupt_factor}};
  return j;
}

}  // namespace spincant::app
