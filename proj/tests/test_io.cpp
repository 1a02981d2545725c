#include <doctest.h>

#include <clocale>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "freelyap/errors.hpp"
#include "freelyap/io.hpp"
#include "oracles.hpp"

using namespace freelyap;
using io::json;

TEST_CASE("FNV-1a 64 reference vectors") {
  CHECK(io::hex64(io::fnv1a64("")) == "cbf29ce484222325");
  CHECK(io::hex64(io::fnv1a64("a")) == "af63dc4c8601ec8c");
  CHECK(io::hex64(io::fnv1a64("foobar")) == "85944171f73967e8");
}

TEST_CASE("measure JSON round trip preserves the measure exactly") {
  for (const SpectralMeasure& mu : {mp_measure(0.5), compressed_mp_measure(0.3, 2.0),
                                    discrete_measure({{0.1, 0.25}, {3.0, 0.75}}, "two atoms")}) {
    const json j = io::measure_to_json(mu);
    CHECK(j.at("schema_version") == io::kSchemaVersion);
    const SpectralMeasure back = io::measure_from_json(json::parse(j.dump()));
    CHECK(io::measure_hash(back) == io::measure_hash(mu));
    CHECK(back.label() == mu.label());
    CHECK(moment(back, 2) == moment(mu, 2));
  }
}

TEST_CASE("malformed measure JSON raises InvalidMeasure") {
  CHECK_THROWS_AS(io::measure_from_json(json::array()), InvalidMeasure);
  CHECK_THROWS_AS(io::measure_from_json(json{{"schema_version", 99}}), InvalidMeasure);
  CHECK_THROWS_AS(io::measure_from_json(json{{"atoms", {{{"x", 1.0}, {"mass", 0.5}}}}}), InvalidMeasure);
  CHECK_THROWS_AS(io::measure_from_json(json{{"atoms", {{{"x", "one"}, {"mass", 1.0}}}}}), InvalidMeasure);
  CHECK_THROWS_AS(io::measure_from_json(json{{"atoms", 3}}), InvalidMeasure);
}

TEST_CASE("format_double round-trips and ignores the C locale") {
  oracle::Gen gen(9);
  for (int i = 0; i < 1000; ++i) {
    const double x = gen.uniform(-1, 1) * std::pow(10.0, gen.integer(-300, 300));
    CHECK(std::stod(io::format_double(x)) == x);
  }
  const char* old = std::setlocale(LC_NUMERIC, nullptr);
  const std::string saved = old ? old : "C";
  if (std::setlocale(LC_NUMERIC, "de_DE.UTF-8")) {
    CHECK(io::format_double(0.5) == "0.5");
    CHECK(io::csv_table({"x"}, {{1.25}}) == "x\n1.25\n");
  }
  std::setlocale(LC_NUMERIC, saved.c_str());
  CHECK(io::csv_table({"a", "b"}, {{1.0, 2.0}, {0.5, -3.0}}) == "a,b\n1,0.5\n2,-3\n");
}

TEST_CASE("SVG output is deterministic and well formed") {
  io::PlotSpec p{"title <&>", "x", "y", {{"s", {0, 1, 2}, {0, 1, 4}, false}, {"t", {0, 2}, {1, 1}, true}}};
  const std::string a = io::render_svg(p);
  CHECK(a == io::render_svg(p));
  CHECK(a.rfind("<svg", 0) == 0);
  CHECK(a.find("</svg>") != std::string::npos);
  CHECK(a.find("<&>") == std::string::npos);
}

TEST_CASE("ensemble configs parse, resolve relative files and reject bad input") {
  const auto dir = std::filesystem::temp_directory_path() / "freelyap_test_io";
  std::filesystem::create_directories(dir);
  io::write_text(dir / "law.json", io::measure_to_json(point_mass(2.0)).dump());
  const auto c = io::ensemble_from_json(json{{"N", 8}, {"singular_law", {{"measure_file", "law.json"}}}}, dir);
  CHECK(c.N == 8);
  CHECK(moment(c.law, 1) == 2.0);
  const auto m = io::ensemble_from_json(json{{"singular_law", {{"mp", 0.4}}}, {"t_list", {0.3}}, {"mode", "iid"}});
  CHECK(m.mp_lambda.value() == 0.4);
  CHECK(m.mode == rmt::SingularMode::iid);
  const auto back = io::ensemble_from_json(io::ensemble_to_json(m));
  CHECK(back.t_list == m.t_list);
  CHECK_THROWS_AS(io::ensemble_from_json(json{{"N", 8}}), DomainError);
  CHECK_THROWS_AS(io::ensemble_from_json(json{{"N", "x"}, {"singular_law", {{"mp", 1}}}}), DomainError);
  CHECK_THROWS_AS(io::ensemble_from_json(json{{"singular_law", {{"mp", -1}}}}), DomainError);
  CHECK_THROWS_AS(io::ensemble_from_json(json{{"mode", "gue"}, {"singular_law", {{"mp", 1}}}}), DomainError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("write_text returns the hash of what it wrote") {
  const auto p = std::filesystem::temp_directory_path() / "freelyap_test_io_text.txt";
  CHECK(io::write_text(p, "hello") == io::fnv1a64("hello"));
  std::ifstream in(p);
  std::string s;
  std::getline(in, s);
  CHECK(s == "hello");
  std::filesystem::remove(p);
}
