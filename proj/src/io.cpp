#include "freelyap/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "freelyap/errors.hpp"

namespace freelyap::io {

namespace {

double number_field(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw InvalidMeasure(std::string("missing or non-numeric field '") + key + "'");
  return j.at(key).get<double>();
}

// Fixed-point text with `digits` decimals, for SVG coordinates and ticks.
std::string fixed(double x, int digits) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed, digits);
  std::string s(buf, res.ptr);
  if (s == "-0.00" || s == "-0.0" || s == "-0") s.erase(0, 1);
  return s;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

std::string_view tool_version() { return FREELYAP_VERSION; }

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  auto res = std::to_chars(buf, buf + 16, h, 16);
  std::string s(buf, res.ptr);
  return std::string(16 - s.size(), '0') + s;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

json measure_to_json(const SpectralMeasure& mu) {
  json atoms = json::array();
  for (const Atom& a : mu.atoms()) atoms.push_back({{"x", a.x}, {"mass", a.mass}});
  json segs = json::array();
  for (const ContinuousSegment& s : mu.segments()) {
    segs.push_back({{"a", s.a()},
                    {"b", s.b()},
                    {"edge_exponent_left", s.alpha_left()},
                    {"edge_exponent_right", s.alpha_right()},
                    {"values", s.values()}});
  }
  return {{"schema_version", kSchemaVersion},
          {"label", mu.label()},
          {"atoms", atoms},
          {"segments", segs}};
}

SpectralMeasure measure_from_json(const json& j) {
  if (!j.is_object()) throw InvalidMeasure("measure JSON must be an object");
  if (j.contains("schema_version") && j.at("schema_version") != kSchemaVersion)
    throw InvalidMeasure("unsupported measure schema_version");
  std::vector<Atom> atoms;
  std::vector<ContinuousSegment> segments;
  try {
    if (j.contains("atoms")) {
      if (!j.at("atoms").is_array()) throw InvalidMeasure("'atoms' must be an array");
      for (const json& a : j.at("atoms")) atoms.push_back({number_field(a, "x"), number_field(a, "mass")});
    }
    if (j.contains("segments")) {
      if (!j.at("segments").is_array()) throw InvalidMeasure("'segments' must be an array");
      for (const json& s : j.at("segments")) {
        if (!s.contains("values") || !s.at("values").is_array())
          throw InvalidMeasure("segment needs a 'values' array");
        std::vector<double> values;
        for (const json& v : s.at("values")) {
          if (!v.is_number()) throw InvalidMeasure("segment values must be numbers");
          values.push_back(v.get<double>());
        }
        const double al = s.contains("edge_exponent_left") ? number_field(s, "edge_exponent_left") : 0.5;
        const double ar = s.contains("edge_exponent_right") ? number_field(s, "edge_exponent_right") : 0.5;
        segments.emplace_back(number_field(s, "a"), number_field(s, "b"), al, ar, std::move(values));
      }
    }
  } catch (const json::exception& e) {
    throw InvalidMeasure(std::string("malformed measure JSON: ") + e.what());
  }
  const std::string label = j.contains("label") && j.at("label").is_string() ? j.at("label").get<std::string>() : "";
  return SpectralMeasure(std::move(atoms), std::move(segments), label);
}

std::uint64_t measure_hash(const SpectralMeasure& mu) { return fnv1a64(measure_to_json(mu).dump()); }

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DomainError("invalid JSON in '" + path.string() + "': " + e.what());
  }
}

SpectralMeasure load_measure(const std::filesystem::path& path) {
  return measure_from_json(read_json_file(path));
}

std::uint64_t write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DomainError("cannot write '" + path.string() + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw DomainError("write failed for '" + path.string() + "'");
  return fnv1a64(text);
}

std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& columns) {
  if (header.size() != columns.size()) throw DomainError("CSV header and column count differ");
  std::string out;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c) out += ',';
    out += header[c];
  }
  out += '\n';
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (const auto& col : columns)
    if (col.size() != rows) throw DomainError("CSV columns differ in length");
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) out += ',';
      out += format_double(columns[c][r]);
    }
    out += '\n';
  }
  return out;
}

json meta_json(const SpectralMeasure& mu, double tol) {
  return {{"source_measure_hash", hex64(measure_hash(mu))},
          {"source_label", mu.label()},
          {"tolerance", tol},
          {"version", std::string(tool_version())}};
}

json profile_to_json(const LyapunovProfile& p) {
  json F = json::array();
  for (double v : p.F_values) F.push_back(finite_or_null(v));
  return {{"t", p.t_grid}, {"F", F}, {"f", p.f_values}, {"rank_r", p.rank_r},
          {"source_label", p.source_label}};
}

json distribution_to_json(const ExponentDistribution& d) {
  return {{"x", d.x_grid}, {"cdf", d.cdf_values}};
}

rmt::EnsembleConfig ensemble_from_json(const json& j, const std::filesystem::path& base_dir) {
  rmt::EnsembleConfig c;
  try {
    if (!j.is_object()) throw DomainError("ensemble config must be a JSON object");
    if (j.contains("schema_version") && j.at("schema_version") != kSchemaVersion)
      throw DomainError("unsupported config schema_version");
    c.N = j.value("N", c.N);
    c.steps_n = j.value("steps_n", c.steps_n);
    c.trials = j.value("trials", c.trials);
    c.seed = j.value("seed", c.seed);
    const std::string mode = j.value("mode", std::string("quantile"));
    if (mode == "quantile") c.mode = rmt::SingularMode::quantile;
    else if (mode == "iid") c.mode = rmt::SingularMode::iid;
    else throw DomainError("mode must be 'quantile' or 'iid'");
    if (j.contains("t_list")) c.t_list = j.at("t_list").get<std::vector<double>>();
    if (!j.contains("singular_law")) throw DomainError("config needs 'singular_law'");
    const json& law = j.at("singular_law");
    if (law.contains("mp")) {
      const double lambda = law.at("mp").get<double>();
      if (!(lambda > 0.0)) throw DomainError("MP rate must be positive");
      c.law = mp_measure(lambda);
      c.mp_lambda = lambda;
    } else if (law.contains("measure")) {
      c.law = measure_from_json(law.at("measure"));
    } else if (law.contains("measure_file")) {
      std::filesystem::path p = law.at("measure_file").get<std::string>();
      if (p.is_relative()) p = base_dir / p;
      c.law = load_measure(p);
    } else {
      throw DomainError("singular_law needs one of 'mp', 'measure', 'measure_file'");
    }
  } catch (const json::exception& e) {
    throw DomainError(std::string("malformed ensemble config: ") + e.what());
  }
  c.validate();
  return c;
}

json ensemble_to_json(const rmt::EnsembleConfig& c) {
  json law = c.mp_lambda ? json{{"mp", *c.mp_lambda}} : json{{"measure", measure_to_json(c.law)}};
  return {{"schema_version", kSchemaVersion},
          {"N", c.N},
          {"steps_n", c.steps_n},
          {"trials", c.trials},
          {"seed", c.seed},
          {"mode", c.mode == rmt::SingularMode::quantile ? "quantile" : "iid"},
          {"t_list", c.t_list},
          {"singular_law", law}};
}

json report_to_json(const rmt::McReport& r) {
  json growth = json::object();
  for (const auto& [t, v] : r.growth_rates) growth[format_double(t)] = finite_or_null(v);
  json comp = json::object();
  for (const auto& [t, v] : r.compression_ks) comp[format_double(t)] = v;
  return {{"schema_version", kSchemaVersion},
          {"empirical_exponents", r.empirical_exponents},
          {"exponent_stderr", r.exponent_stderr},
          {"growth_rates", growth},
          {"ks_distance", r.ks_distance},
          {"compression_ks", comp},
          {"wall_time", r.wall_time}};
}

json RunManifest::to_json() const {
  json outs = json::array();
  for (const ManifestEntry& e : outputs) outs.push_back({{"path", e.path}, {"hash", hex64(e.hash)}});
  return {{"schema_version", kSchemaVersion},
          {"command_line", command_line},
          {"config_hash", hex64(config_hash)},
          {"tool_version", tool_version},
          {"outputs", outs}};
}

std::string render_svg(const PlotSpec& spec) {
  constexpr double W = 640, H = 420, L = 70, R = 20, T = 40, B = 55;
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const Series& s : spec.series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 - x0 <= 0) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 <= 0) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.04 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" viewBox=\"0 0 " << W << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
    << xml_escape(spec.title) << "</text>\n";
  o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\""
    << H - T - B << "\" fill=\"none\" stroke=\"#333\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0;
    const double yv = y0 + (y1 - y0) * k / 4.0;
    o << "<line x1=\"" << fixed(px(xv), 2) << "\" y1=\"" << H - B << "\" x2=\"" << fixed(px(xv), 2)
      << "\" y2=\"" << H - B + 5 << "\" stroke=\"#333\"/>\n";
    o << "<text x=\"" << fixed(px(xv), 2) << "\" y=\"" << H - B + 18
      << "\" text-anchor=\"middle\">" << fixed(xv, 3) << "</text>\n";
    o << "<line x1=\"" << L - 5 << "\" y1=\"" << fixed(py(yv), 2) << "\" x2=\"" << L << "\" y2=\""
      << fixed(py(yv), 2) << "\" stroke=\"#333\"/>\n";
    o << "<text x=\"" << L - 8 << "\" y=\"" << fixed(py(yv) + 4, 2) << "\" text-anchor=\"end\">"
      << fixed(yv, 3) << "</text>\n";
  }
  o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">"
    << xml_escape(spec.x_label) << "</text>\n";
  o << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << (T + H - B) / 2 << ")\">" << xml_escape(spec.y_label) << "</text>\n";

  for (std::size_t si = 0; si < spec.series.size(); ++si) {
    const Series& s = spec.series[si];
    const char* color = palette[si % std::size(palette)];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\" points=\"";
    bool first = true;
    double prev_y = 0.0;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if (!first) o << ' ';
      if (s.steps && !first) o << fixed(px(s.x[i]), 2) << ',' << fixed(py(prev_y), 2) << ' ';
      o << fixed(px(s.x[i]), 2) << ',' << fixed(py(s.y[i]), 2);
      prev_y = s.y[i];
      first = false;
    }
    o << "\"/>\n";
    const double ly = T + 16 + 16 * static_cast<double>(si);
    o << "<line x1=\"" << L + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << L + 36 << "\" y2=\""
      << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << L + 42 << "\" y=\"" << ly << "\">" << xml_escape(s.name) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace freelyap::io
