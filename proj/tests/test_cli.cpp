#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "spincant/density.hpp"
#include "spincant/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const json kGedanken = {
    {"physical",
     {{"spring_constant_N_per_m", 6.5e-6},
      {"frequency_Hz", 1700},
      {"quality_factor", 6700},
      {"temperature_K", 1e-3},
      {"field_gradient_T_per_m", 4.21167854924877e7}}},
    {"evolve", {{"tau_stop", 3.141592653589793}, {"tau_count", 65}}},
    {"snapshot", {{"tau", 1.0}, {"grid", {{"axes", "R_r"}, {"a_min", -6}, {"a_max", 6}, {"a_count", 41}, {"b_min", -3}, {"b_max", 3}, {"b_count", 21}}}}}};

const json kReference = {{"dimensionless", {{"eta", 2}, {"beta", 0.05}, {"D", 10}}},
                         {"initial_state", {{"z0", 1}, {"p0", 0.5}}},
                         {"evolve", {{"tau_stop", 5}, {"tau_count", 51}}},
                         {"verify", {{"random_tuples", 20}, {"basis_tuples", 4}}}};

struct Sandbox {
  fs::path dir;
  Sandbox() {
    static int counter = 0;
    dir = fs::temp_directory_path() /
          ("spincant_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Sandbox() { fs::remove_all(dir); }

  fs::path config(const json& j, const std::string& name = "config.json") const {
    const fs::path p = dir / name;
    std::ofstream(p) << j.dump(2);
    return p;
  }

  // Exit status of the CLI; stdout and stderr go to files in the sandbox.
  int run(const std::string& args, const std::string& env = "") const {
    const std::string cmd = env + " '" SPINCANT_CLI "' " + args + " >'" + (dir / "stdout").string() +
                            "' 2>'" + (dir / "stderr").string() + "'";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string read(const std::string& name) const { return spincant::io::read_file(dir / name); }
};

std::string quoted(const fs::path& p) { return "'" + p.string() + "'"; }

std::vector<std::string> data_lines(const std::string& csv) {
  std::vector<std::string> out;
  std::istringstream in(csv);
  for (std::string line; std::getline(in, line);)
    if (!line.empty() && line[0] != '#') out.push_back(line);
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string cell; std::getline(in, cell, ',');) out.push_back(cell);
  return out;
}

double column(const std::string& csv, const std::string& name, std::size_t row) {
  const auto lines = data_lines(csv);
  const auto head = split(lines.at(0));
  for (std::size_t i = 0; i < head.size(); ++i)
    if (head[i] == name) return std::stod(split(lines.at(row + 1)).at(i));
  throw std::runtime_error("no column " + name);
}

}  // namespace

TEST_CASE("cli: usage errors") {
  Sandbox s;
  CHECK(s.run("") == 2);
  CHECK(s.run("frobnicate") == 2);
  CHECK(s.run("--threads -1 thresholds") == 2);
  CHECK(s.run("--version") == 0);
  CHECK(s.read("stdout").find("0.1.0") != std::string::npos);
  CHECK(s.run("--help") == 0);
}

TEST_CASE("cli: config errors name the field") {
  Sandbox s;
  json bad = kGedanken;
  bad["physical"]["spring_constant_N_per_m"] = -1;
  CHECK(s.run("--config " + quoted(s.config(bad)) + " --out " + quoted(s.dir) + " thresholds") == 2);
  CHECK(s.read("stderr").find("/physical/spring_constant_N_per_m") != std::string::npos);

  json typo = kReference;
  typo["evolv"] = json::object();
  CHECK(s.run("--config " + quoted(s.config(typo)) + " evolve") == 2);
  CHECK(s.read("stderr").find("/evolv") != std::string::npos);

  json both = kReference;
  both["physical"] = kGedanken["physical"];
  CHECK(s.run("--config " + quoted(s.config(both)) + " evolve") == 2);

  std::ofstream(s.dir / "broken.json") << "{ not json";
  CHECK(s.run("--config " + quoted(s.dir / "broken.json") + " evolve") == 2);
  CHECK(s.run("--config " + quoted(s.dir / "missing.json") + " evolve") == 2);
  CHECK(s.run("thresholds") == 2);
}

TEST_CASE("cli: resource limits") {
  Sandbox s;
  json big = kReference;
  big["snapshot"] = {{"grid", {{"axes", "R_r"}, {"a_min", -5}, {"a_max", 5}, {"a_count", 5000}, {"b_min", -5}, {"b_max", 5}, {"b_count", 5000}}}};
  CHECK(s.run("--config " + quoted(s.config(big)) + " --out " + quoted(s.dir) + " snapshot") == 3);
  json sweep = kReference;
  sweep["sweep"] = {{"axes", {{{"name", "eta"}, {"start", 1}, {"stop", 2}, {"count", 1000}},
                              {{"name", "D"}, {"start", 1}, {"stop", 2}, {"count", 1000}}}}};
  CHECK(s.run("--config " + quoted(s.config(sweep)) + " --out " + quoted(s.dir) + " sweep") == 3);
}

TEST_CASE("cli: thresholds report") {
  Sandbox s;
  CHECK(s.run("--config " + quoted(s.config(kGedanken)) + " --out " + quoted(s.dir) + " thresholds") == 0);
  const json j = json::parse(s.read("thresholds.json"));
  CHECK(j["thresholds"]["t_static_K"].get<double>() == doctest::Approx(1.7e-3).epsilon(1e-12));
  CHECK(j["dimensionless"]["eta"].get<double>() == doctest::Approx(144.348949203292).epsilon(1e-12));
  CHECK(j["config"]["physical"]["quality_factor"] == 6700);
  CHECK(j["version"] == "0.1.0");
  CHECK(s.read("stdout").find("t_static") != std::string::npos);
  CHECK(s.run("--quiet --config " + quoted(s.dir / "config.json") + " --out " + quoted(s.dir) +
              " thresholds") == 0);
  CHECK(s.read("stdout").empty());
  CHECK(s.run("thresholds --quiet --config " + quoted(s.dir / "config.json") + " --out " +
              quoted(s.dir / "after")) == 0);
  CHECK(fs::exists(s.dir / "after" / "thresholds.json"));
}

TEST_CASE("cli: outputs are byte-identical across runs and thread counts") {
  Sandbox s;
  const auto cfg = quoted(s.config(kReference));
  for (const std::string cmd : {"evolve", "snapshot", "thresholds"}) {
    const fs::path a = s.dir / ("a_" + cmd), b = s.dir / ("b_" + cmd), c = s.dir / ("c_" + cmd);
    CHECK(s.run("--threads 1 --config " + cfg + " --out " + quoted(a) + " " + cmd) == 0);
    CHECK(s.run("--threads 4 --config " + cfg + " --out " + quoted(b) + " " + cmd) == 0);
    CHECK(s.run("--config " + cfg + " --out " + quoted(c) + " " + cmd) == 0);
    for (const auto& e : fs::directory_iterator(a)) {
      const auto name = e.path().filename();
      CHECK(spincant::io::read_file(e.path()) == spincant::io::read_file(b / name));
      CHECK(spincant::io::read_file(e.path()) == spincant::io::read_file(c / name));
    }
  }
}

TEST_CASE("cli: evolve echoes the config") {
  Sandbox s;
  CHECK(s.run("--config " + quoted(s.config(kReference)) + " --out " + quoted(s.dir) + " evolve") == 0);
  const std::string csv = s.read("evolve.csv");
  CHECK(csv.rfind("# spincant 0.1.0\n", 0) == 0);
  CHECK(csv.find("# config: {") != std::string::npos);
  CHECK(data_lines(csv).size() == 52);
  CHECK(column(csv, "tau", 0) == 0.0);
  CHECK(column(csv, "delta_d", 0) == doctest::Approx(0.0));
  CHECK(column(csv, "coherence", 0) == doctest::Approx(1.0));
}

TEST_CASE("cli: one-point sweep equals the thresholds report") {
  Sandbox s;
  json cfg = kGedanken;
  cfg["sweep"] = {{"axes", {{{"name", "quality_factor"}, {"values", {6700, 67000}}},
                            {{"name", "field_gradient_T_per_m"},
                             {"values", {4.21167854924877e7, 2 * 4.21167854924877e7}}}}}};
  const auto path = quoted(s.config(cfg));
  CHECK(s.run("--config " + path + " --out " + quoted(s.dir) + " thresholds") == 0);
  CHECK(s.run("--config " + path + " --out " + quoted(s.dir) + " sweep") == 0);
  const json t = json::parse(s.read("thresholds.json"))["thresholds"];
  const std::string csv = s.read("sweep.csv");
  REQUIRE(data_lines(csv).size() == 5);
  // axes sorted by name, last fastest: (g, Q) = (1,6700) (1,67000) (2,6700) (2,67000)
  CHECK(column(csv, "t_static_K", 0) == t["t_static_K"].get<double>());
  CHECK(column(csv, "t_transient_K", 0) == t["t_transient_K"].get<double>());
  CHECK(column(csv, "t_mscs_K", 0) == t["t_mscs_K"].get<double>());
  CHECK(column(csv, "t_transient_K", 1) / column(csv, "t_transient_K", 0) ==
        doctest::Approx(10).epsilon(1e-12));
  CHECK(column(csv, "t_static_K", 1) == doctest::Approx(column(csv, "t_static_K", 0)).epsilon(1e-14));
  CHECK(column(csv, "t_static_K", 2) / column(csv, "t_static_K", 0) == doctest::Approx(4).epsilon(1e-12));
  CHECK(column(csv, "eta", 2) / column(csv, "eta", 0) == doctest::Approx(2).epsilon(1e-12));
}

TEST_CASE("cli: snapshot at tau = 0 and binary round trip") {
  Sandbox s;
  json cfg = kReference;
  cfg["snapshot"] = {{"tau", 0}, {"grid", {{"axes", "R_r"}, {"a_min", -4}, {"a_max", 4}, {"a_count", 33}, {"b_min", -2}, {"b_max", 2}, {"b_count", 17}}}};
  CHECK(s.run("--config " + quoted(s.config(cfg)) + " --out " + quoted(s.dir) + " snapshot") == 0);
  const auto f = spincant::read_density_binary(s.dir / "snapshot.bin", s.dir / "snapshot.json");
  // rho_{++}(R, 0) of the coherent state at z0 = 1 peaks at R = 1 with |a|^2 / sqrt(pi), |a|^2 = 1/2
  REQUIRE(f.grid.a_at(20) == 1.0);
  REQUIRE(f.grid.b_at(8) == 0.0);
  const auto v = f.blocks[0](20, 8);
  CHECK(std::abs(v) == doctest::Approx(0.5 / std::sqrt(3.141592653589793)).epsilon(1e-12));
  const json side = json::parse(s.read("snapshot.json"));
  CHECK(side["tau"] == 0.0);
  CHECK(s.read("snapshot.csv").find("# config: {") != std::string::npos);
}

TEST_CASE("cli: environment overrides") {
  Sandbox s;
  const auto cfg = s.config(kReference);
  const fs::path out = s.dir / "env_out";
  CHECK(s.run("evolve", "SPINCANT_CONFIG=" + quoted(cfg) + " SPINCANT_OUT=" + quoted(out)) == 0);
  CHECK(fs::exists(out / "evolve.csv"));
  CHECK(s.run("evolve", "SPINCANT_CONFIG=" + quoted(cfg) + " SPINCANT_OUT=" + quoted(out) +
                            " SPINCANT_QUIET=1") == 0);
  CHECK(s.read("stdout").empty());
}

TEST_CASE("cli: verify exit codes") {
  Sandbox s;
  CHECK(s.run("--config " + quoted(s.config(kReference)) + " --out " + quoted(s.dir) + " verify") == 0);
  const json ok = json::parse(s.read("verify.json"));
  CHECK(ok["pass"] == true);

  json corrupt = kReference;
  corrupt["verify"]["corrupt"] = {{"coefficient", "b20"}, {"factor", 1.0001}};
  CHECK(s.run("--config " + quoted(s.config(corrupt)) + " --out " + quoted(s.dir) + " verify") == 1);
  CHECK(s.read("stderr").find("worst offender") != std::string::npos);

  json still = kReference;
  still["dimensionless"]["eta"] = 0;
  CHECK(s.run("--config " + quoted(s.config(still)) + " --out " + quoted(s.dir) + " verify") == 0);
}
