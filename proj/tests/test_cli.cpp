#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "freelyap/cli.hpp"
#include "freelyap/io.hpp"

namespace fs = std::filesystem;
using freelyap::io::json;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("freelyap_cli_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& f) const { return (path / f).string(); }
};

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = freelyap::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("measure writes schema JSON plus a manifest with matching hashes") {
  TempDir d("measure");
  const auto r = run({"measure", "--mp", "2", "-o", d.path.string()});
  REQUIRE(r.code == 0);
  const json m = json::parse(slurp(d / "measure.json"));
  CHECK(m.at("schema_version") == 1);
  const json man = json::parse(slurp(d / "measure.manifest.json"));
  bool found = false;
  for (const auto& o : man.at("outputs"))
    if (fs::path(o.at("path").get<std::string>()).filename() == "measure.json") {
      CHECK(o.at("hash") == freelyap::io::hex64(freelyap::io::fnv1a64(slurp(d / "measure.json"))));
      found = true;
    }
  CHECK(found);
  CHECK(man.contains("config_hash"));
  CHECK(man.contains("tool_version"));
}

TEST_CASE("identical runs reproduce identical output bytes and config hashes") {
  TempDir a("rep_a"), b("rep_b");
  REQUIRE(run({"measure", "--compressed", "0.5", "2", "-o", a.path.string()}).code == 0);
  REQUIRE(run({"measure", "--compressed", "0.5", "2", "-o", b.path.string()}).code == 0);
  CHECK(slurp(a / "measure.json") == slurp(b / "measure.json"));
  CHECK(json::parse(slurp(a / "measure.manifest.json")).at("config_hash") ==
        json::parse(slurp(b / "measure.manifest.json")).at("config_hash"));
}

TEST_CASE("-o with an extension names the primary output") {
  TempDir d("named");
  REQUIRE(run({"measure", "--atoms", "1:0.5", "4:0.5", "-o", d / "two.json"}).code == 0);
  CHECK(fs::exists(d / "two.json"));
  CHECK(fs::exists(d / "two.manifest.json"));
}

TEST_CASE("transform, lyapunov, det and newman run on a measure file") {
  TempDir d("pipeline");
  REQUIRE(run({"measure", "--mp", "2", "-o", d / "mp2.json"}).code == 0);
  const std::string in = d / "mp2.json";

  auto t = run({"transform", "-i", in, "--kind", "s_transform", "--at", "-0.5,-0.25", "-o", d / "s.csv"});
  REQUIRE(t.code == 0);
  const std::string csv = slurp(d / "s.csv");
  CHECK(csv.rfind("argument,value,achieved_error\n", 0) == 0);
  CHECK(csv.find("-0.5,0.6666666666666") != std::string::npos);

  REQUIRE(run({"lyapunov", "-i", in, "--dist", "--format", "json", "-o", d / "prof.json"}).code == 0);
  const json prof = json::parse(slurp(d / "prof.json"));
  CHECK(prof.contains("meta"));
  CHECK(fs::exists(d / "prof_distribution.json"));

  auto det = run({"det", "-i", in, "--method", "both", "-o", d / "det.csv"});
  CHECK(det.code == 0);
  CHECK(det.out.find("1.21306131942526") != std::string::npos);

  CHECK(run({"newman", "-i", in, "--format", "svg", "-o", d / "nm.csv"}).code == 0);
  CHECK(slurp(d / "nm.svg").rfind("<svg", 0) == 0);
}

TEST_CASE("input and domain errors exit with 2") {
  TempDir d("errors");
  CHECK(run({}).code == 2);
  CHECK(run({"measure", "--mp", "-1", "-o", d.path.string()}).code == 2);
  CHECK(run({"lyapunov", "-i", d / "missing.json", "-o", d.path.string()}).code == 2);
  CHECK(run({"measure", "--mp", "1", "-o", d / "mp1.json"}).code == 0);
  CHECK(run({"det", "-i", d / "mp1.json", "--method", "s_integral", "-o", d.path.string()}).code == 2);
  CHECK(run({"transform", "-i", d / "mp1.json", "--kind", "psi_inverse", "--at", "-2", "-o", d.path.string()}).code == 2);
  {
    std::ofstream bad(d / "bad.json");
    bad << "{\"atoms\": [{\"x\": 1, \"mass\": 0.5}]}";
  }
  const auto r = run({"lyapunov", "-i", d / "bad.json", "-o", d.path.string()});
  CHECK(r.code == 2);
  CHECK_FALSE(r.err.empty());
  CHECK(run({"measure", "--mp", "1", "--format", "xml"}).code == 2);
}

TEST_CASE("a failed KS gate exits with 3") {
  TempDir d("gate");
  {
    std::ofstream cfg(d / "cfg.json");
    cfg << R"({"N": 8, "steps_n": 5, "trials": 1, "seed": 1, "singular_law": {"mp": 2}})";
  }
  CHECK(run({"mc", "-c", d / "cfg.json", "--ks-gate", "1e-9", "-o", d.path.string()}).code == 3);
  CHECK(run({"mc", "-c", d / "cfg.json", "--ks-gate", "1", "-o", d.path.string()}).code == 0);
  CHECK(fs::exists(d / "mc_exponents.csv"));
}

TEST_CASE("NO_COLOR disables colour") {
  setenv("NO_COLOR", "1", 1);
  CHECK_FALSE(freelyap::cli::color_enabled());
  const auto r = run({"measure", "--mp", "-1"});
  CHECK(r.err.find('\x1b') == std::string::npos);
  unsetenv("NO_COLOR");
}
