#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "freelyap/lyapunov.hpp"
#include "freelyap/rmt.hpp"
#include "freelyap/spectral_measure.hpp"

namespace freelyap::io {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

std::string_view tool_version();

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t h);

/// Shortest round-trip decimal form, independent of the C locale.
std::string format_double(double x);

json measure_to_json(const SpectralMeasure& mu);
/// Throws InvalidMeasure on schema or validation errors.
SpectralMeasure measure_from_json(const json& j);

/// Hash of the canonical JSON form.
std::uint64_t measure_hash(const SpectralMeasure& mu);

json read_json_file(const std::filesystem::path& path);
SpectralMeasure load_measure(const std::filesystem::path& path);

/// Writes text and returns its FNV-1a hash.
std::uint64_t write_text(const std::filesystem::path& path, std::string_view text);

/// Columns of equal length, one header per column, '\n' line ends.
std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& columns);

json meta_json(const SpectralMeasure& mu, double tol);

json profile_to_json(const LyapunovProfile& p);
json distribution_to_json(const ExponentDistribution& d);

/// Accepts {"mp": lambda}, {"measure": {...}} or {"measure_file": path}
/// under "singular_law"; relative files resolve against `base_dir`.
rmt::EnsembleConfig ensemble_from_json(const json& j, const std::filesystem::path& base_dir = {});
json ensemble_to_json(const rmt::EnsembleConfig& c);
json report_to_json(const rmt::McReport& r);

struct ManifestEntry {
  std::string path;
  std::uint64_t hash;
};

struct RunManifest {
  std::string command_line;
  std::uint64_t config_hash = 0;
  std::string tool_version;
  std::vector<ManifestEntry> outputs;

  json to_json() const;
};

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  bool steps = false;  // draw as a step function
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
};

/// Static SVG line plot with fixed styling; identical input gives identical
/// bytes.
std::string render_svg(const PlotSpec& spec);

}  // namespace freelyap::io
