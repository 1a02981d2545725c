#include "freelyap/cli.hpp"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "freelyap/acceptance.hpp"
#include "freelyap/errors.hpp"
#include "freelyap/io.hpp"
#include "freelyap/lyapunov.hpp"
#include "freelyap/rmt.hpp"
#include "freelyap/spectral_measure.hpp"
#include "freelyap/transforms.hpp"

namespace freelyap::cli {

namespace fs = std::filesystem;
using io::json;

namespace {

struct GlobalOptions {
  std::string out = "freelyap-out";
  std::uint64_t seed = 0;
  bool seed_set = false;
  double tol = 1e-8;
  std::string format = "csv";
  std::string config_args;
};

class GateFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Collects outputs and writes the manifest at the end of a run.
class Run {
 public:
  Run(const GlobalOptions& g, std::string command_line, std::string primary_name)
      : g_(g), command_line_(std::move(command_line)) {
    config_ = {{"args", g.config_args}, {"seed", g.seed}, {"tol", g.tol}, {"format", g.format}};
    fs::path p = g.out;
    if (p.has_extension()) {
      dir_ = p.has_parent_path() ? p.parent_path() : fs::path(".");
      primary_ = p.filename().string();
    } else {
      dir_ = p;
      primary_ = primary_name;
    }
  }

  // Output path for `name`; the primary output may be renamed by -o.
  fs::path path(const std::string& name) const { return dir_ / name; }
  const std::string& primary() const { return primary_; }
  std::string stem() const { return fs::path(primary_).stem().string(); }
  std::string sibling(const std::string& suffix) const { return stem() + suffix; }

  void add_input(const std::string& path, std::uint64_t hash) {
    config_["inputs"].push_back({{"path", path}, {"hash", io::hex64(hash)}});
  }
  void add_config(const std::string& key, const json& v) { config_[key] = v; }

  void write(const std::string& name, const std::string& text) {
    const fs::path p = path(name);
    outputs_.push_back({p.string(), io::write_text(p, text)});
  }

  void finish(std::ostream& out, const json& extra = json::object()) {
    io::RunManifest m;
    m.command_line = command_line_;
    m.config_hash = io::fnv1a64(config_.dump());
    m.tool_version = std::string(io::tool_version());
    m.outputs = outputs_;
    json j = m.to_json();
    for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
    const fs::path mp = path(sibling(".manifest.json"));
    io::write_text(mp, j.dump(2) + "\n");
    for (const auto& o : outputs_) out << "wrote " << o.path << "\n";
    out << "wrote " << mp.string() << "\n";
  }

  bool want(const char* fmt) const { return g_.format == fmt; }

 private:
  const GlobalOptions& g_;
  std::string command_line_;
  fs::path dir_;
  std::string primary_;
  json config_ = json::object();
  std::vector<io::ManifestEntry> outputs_;
};

// The command line without the output location, for the config hash.
std::string config_args(const std::vector<std::string>& args) {
  std::string s;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "-o" || args[i] == "--out") {
      ++i;
      continue;
    }
    if (args[i].rfind("--out=", 0) == 0) continue;
    s += " " + args[i];
  }
  return s;
}

std::string join_args(const std::vector<std::string>& args) {
  std::string s = "freelyap";
  for (const auto& a : args) s += " " + a;
  return s;
}

SpectralMeasure load_input(Run& run, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  run.add_input(path, io::fnv1a64(ss.str()));
  json j;
  try {
    j = json::parse(ss.str());
  } catch (const json::exception& e) {
    throw InvalidMeasure("invalid JSON in '" + path + "': " + e.what());
  }
  return io::measure_from_json(j);
}

// "lo:hi:n" -> n uniform points.
std::vector<double> parse_grid(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 3) throw DomainError("grid must look like lo:hi:n");
  double lo, hi;
  int n;
  try {
    lo = std::stod(parts[0]);
    hi = std::stod(parts[1]);
    n = std::stoi(parts[2]);
  } catch (const std::exception&) {
    throw DomainError("grid must look like lo:hi:n");
  }
  if (n < 1 || !(hi >= lo)) throw DomainError("grid needs n >= 1 and hi >= lo");
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return g;
}

// ---- measure -------------------------------------------------------------

struct MeasureArgs {
  std::optional<double> mp;
  std::vector<double> compressed;  // t, lambda
  std::vector<std::string> atoms;  // "x:mass"
  std::string input;
  int nodes = kDefaultNodeCount;
};

int cmd_measure(const GlobalOptions& g, const MeasureArgs& a, const std::string& cmdline,
                std::ostream& out) {
  Run run(g, cmdline, "measure.json");
  const int sources = (a.mp ? 1 : 0) + (a.compressed.empty() ? 0 : 1) + (a.atoms.empty() ? 0 : 1) +
                      (a.input.empty() ? 0 : 1);
  if (sources != 1) throw DomainError("give exactly one of --mp, --compressed, --atoms, -i");
  std::optional<SpectralMeasure> mu;
  if (a.mp) {
    if (!(*a.mp > 0.0) || !std::isfinite(*a.mp)) throw DomainError("MP rate must be positive");
    mu = mp_measure(*a.mp, a.nodes);
  } else if (!a.compressed.empty()) {
    if (a.compressed.size() != 2) throw DomainError("--compressed takes T LAMBDA");
    mu = compressed_mp_measure(a.compressed[0], a.compressed[1], a.nodes);
  } else if (!a.atoms.empty()) {
    std::vector<Atom> atoms;
    for (const auto& s : a.atoms) {
      const auto c = s.find(':');
      if (c == std::string::npos) throw DomainError("atoms are given as x:mass");
      try {
        atoms.push_back({std::stod(s.substr(0, c)), std::stod(s.substr(c + 1))});
      } catch (const std::exception&) {
        throw DomainError("atoms are given as x:mass");
      }
    }
    mu = discrete_measure(std::move(atoms), "atoms");
  } else {
    mu = load_input(run, a.input);
  }
  run.add_config("measure_hash", io::hex64(io::measure_hash(*mu)));
  run.write(run.primary(), io::measure_to_json(*mu).dump(2) + "\n");
  if (run.want("csv") || run.want("svg")) {
    std::vector<double> xs, ds;
    for (const auto& seg : mu->segments()) {
      for (int i = 1; i < 400; ++i) {
        const double x = seg.a() + (seg.b() - seg.a()) * i / 400.0;
        xs.push_back(x);
        ds.push_back(seg.density(x));
      }
    }
    run.write(run.sibling("_density.csv"), io::csv_table({"x", "density"}, {xs, ds}));
    if (run.want("svg")) {
      io::PlotSpec p{"density of " + mu->label(), "x", "density", {{"density", xs, ds, false}}};
      run.write(run.sibling("_density.svg"), io::render_svg(p));
    }
  }
  out << "label " << mu->label() << "  atoms " << mu->atoms().size() << "  segments "
      << mu->segments().size() << "  rank " << io::format_double(mu->off_kernel_mass()) << "\n";
  run.finish(out);
  return kOk;
}

// ---- transform -----------------------------------------------------------

int cmd_transform(const GlobalOptions& g, const std::string& input, const std::string& kind_name,
                  const std::vector<double>& at, const std::string& grid, const std::string& cmdline,
                  std::ostream& out) {
  Run run(g, cmdline, "transform.csv");
  const SpectralMeasure mu = load_input(run, input);
  const TransformKind kind = transform_kind_from_string(kind_name);
  std::vector<double> args = at;
  if (!grid.empty()) {
    const auto gpts = parse_grid(grid);
    args.insert(args.end(), gpts.begin(), gpts.end());
  }
  if (args.empty()) throw DomainError("give --at values or --grid lo:hi:n");
  std::vector<double> vals, errs;
  for (double z : args) {
    TransformPoint p{};
    switch (kind) {
      case TransformKind::cauchy: p = cauchy(mu, z); break;
      case TransformKind::psi: p = psi(mu, z); break;
      case TransformKind::psi_inverse: p = psi_inverse(mu, z); break;
      case TransformKind::s_transform: p = s_transform(mu, z); break;
    }
    vals.push_back(p.value);
    errs.push_back(p.achieved_error);
  }
  const std::string kname(to_string(kind));
  if (run.want("json")) {
    json j = {{"schema_version", io::kSchemaVersion},
              {"transform", {{"kind", kname}, {"argument", args}, {"value", vals}, {"achieved_error", errs}}},
              {"meta", io::meta_json(mu, g.tol)}};
    run.write(run.stem() + ".json", j.dump(2) + "\n");
  } else {
    run.write(run.stem() + ".csv", io::csv_table({"argument", "value", "achieved_error"}, {args, vals, errs}));
    if (run.want("svg")) {
      io::PlotSpec p{kname + " of " + mu.label(), "argument", kname, {{kname, args, vals, false}}};
      run.write(run.stem() + ".svg", io::render_svg(p));
    }
  }
  for (std::size_t i = 0; i < args.size() && i < 10; ++i)
    out << kname << "(" << io::format_double(args[i]) << ") = " << io::format_double(vals[i]) << "\n";
  if (args.size() > 10) out << "... " << args.size() - 10 << " more rows\n";
  run.finish(out);
  return kOk;
}

// ---- lyapunov ------------------------------------------------------------

int cmd_lyapunov(const GlobalOptions& g, const std::string& input, bool dist, int points,
                 const std::string& x_grid, const std::string& cmdline, std::ostream& out) {
  Run run(g, cmdline, "profile.csv");
  const SpectralMeasure mu = load_input(run, input);
  const LyapunovProfile prof = lyapunov_profile(mu, default_t_grid(mu.off_kernel_mass(), points));
  std::optional<ExponentDistribution> d;
  if (dist) {
    const std::vector<double> xs = x_grid.empty() ? default_x_grid(mu) : parse_grid(x_grid);
    d = exponent_distribution(mu, xs);
  }
  const std::string stem = run.stem();
  if (run.want("json")) {
    json j = {{"schema_version", io::kSchemaVersion},
              {"profile", io::profile_to_json(prof)},
              {"meta", io::meta_json(mu, g.tol)}};
    run.write(stem + ".json", j.dump(2) + "\n");
    if (d) {
      json jd = {{"schema_version", io::kSchemaVersion},
                 {"distribution", io::distribution_to_json(*d)},
                 {"meta", io::meta_json(mu, g.tol)}};
      run.write(stem + "_distribution.json", jd.dump(2) + "\n");
    }
  } else {
    run.write(stem + ".csv", io::csv_table({"t", "F", "f"}, {prof.t_grid, prof.F_values, prof.f_values}));
    if (d) run.write(stem + "_distribution.csv", io::csv_table({"x", "cdf"}, {d->x_grid, d->cdf_values}));
    if (run.want("svg")) {
      io::PlotSpec p{"exponents of " + mu.label(), "t", "nats",
                     {{"F(t)", prof.t_grid, prof.F_values, false}, {"f(t)", prof.t_grid, prof.f_values, false}}};
      run.write(stem + ".svg", io::render_svg(p));
      if (d) {
        io::PlotSpec q{"exponent distribution of " + mu.label(), "x", "cdf",
                       {{"cdf", d->x_grid, d->cdf_values, true}}};
        run.write(stem + "_distribution.svg", io::render_svg(q));
      }
    }
  }
  const LargestExponent top = largest_exponent(mu);
  out << "rank " << io::format_double(prof.rank_r) << "  F(1) "
      << io::format_double(integrated_exponent(mu, 1.0).value) << "  largest exponent "
      << io::format_double(top.value) << (top.within_hypothesis ? "" : " (atom at 0: sup of f on (0, r))")
      << "\n";
  run.finish(out);
  return kOk;
}

// ---- det -----------------------------------------------------------------

int cmd_det(const GlobalOptions& g, const std::string& input, const std::string& method,
            const std::string& cmdline, std::ostream& out) {
  Run run(g, cmdline, "det.csv");
  const SpectralMeasure mu = load_input(run, input);
  std::vector<DeterminantMethod> methods;
  if (method == "definition") methods = {DeterminantMethod::definition};
  else if (method == "s_integral") methods = {DeterminantMethod::s_integral};
  else if (method == "both") methods = {DeterminantMethod::definition, DeterminantMethod::s_integral};
  else if (method == "auto") {
    methods = {DeterminantMethod::definition};
    if (mu.invertible()) methods.push_back(DeterminantMethod::s_integral);
  } else {
    throw DomainError("method must be definition, s_integral, both or auto");
  }
  std::vector<DeterminantResult> res;
  for (auto m : methods) res.push_back(fk_determinant(mu, m));

  json rows = json::array();
  std::string csv = "method,log_det,det,achieved_error\n";
  for (const auto& r : res) {
    const std::string name(to_string(r.method));
    rows.push_back({{"method", name},
                    {"log_det", std::isfinite(r.log_det) ? json(r.log_det) : json("-inf")},
                    {"det", r.value()},
                    {"achieved_error", r.achieved_error}});
    csv += name + "," + io::format_double(r.log_det) + "," + io::format_double(r.value()) + "," +
           io::format_double(r.achieved_error) + "\n";
    out << name << ": det = " << io::format_double(r.value()) << "  log det = "
        << io::format_double(r.log_det) << "\n";
  }
  if (run.want("json")) {
    json j = {{"schema_version", io::kSchemaVersion}, {"determinant", rows}, {"meta", io::meta_json(mu, g.tol)}};
    run.write(run.stem() + ".json", j.dump(2) + "\n");
  } else {
    run.write(run.stem() + ".csv", csv);
  }
  run.finish(out);
  if (res.size() == 2 && std::isfinite(res[0].log_det)) {
    const double rel = std::abs(res[0].value() - res[1].value()) / std::abs(res[0].value());
    out << "relative difference " << io::format_double(rel) << "\n";
    const double gate = std::max(g.tol, res[0].achieved_error + res[1].achieved_error);
    if (rel > gate) throw GateFailure("determinant routes disagree beyond tolerance");
  }
  return kOk;
}

// ---- newman --------------------------------------------------------------

int cmd_newman(const GlobalOptions& g, const std::string& input, const std::string& grid,
               const std::string& cmdline, std::ostream& out) {
  Run run(g, cmdline, "newman.csv");
  const SpectralMeasure mu = load_input(run, input);
  std::vector<double> xs;
  if (grid.empty()) {
    const double hi = 1.1 * std::exp(largest_exponent(mu).value);
    for (int i = 1; i <= 50; ++i) xs.push_back(hi * i / 50.0);
  } else {
    xs = parse_grid(grid);
  }
  std::vector<double> h, f, diff;
  double worst = 0.0;
  for (double x : xs) {
    h.push_back(newman_solve(mu, x));
    f.push_back(distribution_at(mu, std::log(x)));
    diff.push_back(std::abs(h.back() - f.back()));
    worst = std::max(worst, diff.back());
  }
  if (run.want("json")) {
    json j = {{"schema_version", io::kSchemaVersion},
              {"newman", {{"x", xs}, {"H", h}, {"cdf_at_log_x", f}, {"abs_diff", diff}}},
              {"meta", io::meta_json(mu, g.tol)}};
    run.write(run.stem() + ".json", j.dump(2) + "\n");
  } else {
    run.write(run.stem() + ".csv", io::csv_table({"x", "H", "cdf_at_log_x", "abs_diff"}, {xs, h, f, diff}));
    if (run.want("svg")) {
      io::PlotSpec p{"integral equation vs exponent CDF, " + mu.label(), "x", "H(x)",
                     {{"H(x)", xs, h, false}, {"cdf(log x)", xs, f, false}}};
      run.write(run.stem() + ".svg", io::render_svg(p));
    }
  }
  out << "max |H(x) - cdf(log x)| = " << io::format_double(worst) << "\n";
  run.finish(out);
  // The two sides are equal up to quadrature error; 1e-6 is the floor.
  if (worst > std::max(g.tol, 1e-6)) throw GateFailure("integral equation and exponent CDF disagree");
  return kOk;
}

// ---- mc ------------------------------------------------------------------

int cmd_mc(const GlobalOptions& g, const std::string& config_path, double ks_gate, bool no_spectrum,
           const std::string& cmdline, std::ostream& out) {
  Run run(g, cmdline, "mc.json");
  std::ifstream in(config_path, std::ios::binary);
  if (!in) throw DomainError("cannot open '" + config_path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  run.add_input(config_path, io::fnv1a64(ss.str()));
  json j;
  try {
    j = json::parse(ss.str());
  } catch (const json::exception& e) {
    throw DomainError("invalid JSON in '" + config_path + "': " + e.what());
  }
  rmt::EnsembleConfig c = io::ensemble_from_json(j, fs::path(config_path).parent_path());
  if (g.seed_set) c.seed = g.seed;
  run.add_config("ensemble", io::ensemble_to_json(c));

  const rmt::McReport r = rmt::run_mc(c, !no_spectrum);
  json rep = io::report_to_json(r);
  rep.erase("wall_time");  // kept in the manifest so outputs hash identically
  rep["config"] = io::ensemble_to_json(c);
  rep["meta"] = io::meta_json(c.law, g.tol);
  const std::string stem = run.stem();
  run.write(stem + ".json", rep.dump(2) + "\n");

  if (!no_spectrum) {
    const std::size_t n = r.empirical_exponents.size();
    const double rank = c.law.off_kernel_mass();
    std::vector<double> idx, kn, emp, ana, err;
    for (std::size_t i = 0; i < n; ++i) {
      const double k = static_cast<double>(i + 1);
      // Analytic value at the cell centre (k - 1/2)/N keeps t off 1 and off r.
      double tc = (k - 0.5) / static_cast<double>(n);
      if (tc == rank) tc = std::nextafter(tc, 0.0);
      const double f = marginal_exponent(c.law, tc);
      idx.push_back(k);
      kn.push_back(k / static_cast<double>(n));
      emp.push_back(r.empirical_exponents[i]);
      ana.push_back(f);
      err.push_back(std::abs(f - r.empirical_exponents[i]));
    }
    run.write(stem + "_exponents.csv",
              io::csv_table({"index", "k_over_N", "empirical", "analytic_f", "abs_error"}, {idx, kn, emp, ana, err}));
    if (run.want("svg")) {
      std::vector<double> sorted(emp.rbegin(), emp.rend());
      std::vector<double> ecdf;
      for (std::size_t i = 0; i < n; ++i) ecdf.push_back(static_cast<double>(i + 1) / static_cast<double>(n));
      std::vector<double> xs = default_x_grid(c.law);
      std::vector<double> fx = exponent_distribution(c.law, xs).cdf_values;
      io::PlotSpec p{"exponent CDF: N = " + std::to_string(c.N) + ", " + std::to_string(c.steps_n) + " steps",
                     "x", "cdf", {{"empirical", sorted, ecdf, true}, {"analytic", xs, fx, false}}};
      run.write(stem + "_cdf.svg", io::render_svg(p));
    }
  }
  out << "ks_distance " << io::format_double(r.ks_distance) << "\n";
  for (const auto& [t, v] : r.growth_rates) {
    out << "growth t=" << io::format_double(t) << " " << io::format_double(v) << "  analytic F "
        << io::format_double(integrated_exponent(c.law, t).value) << "\n";
  }
  for (const auto& [t, v] : r.compression_ks) out << "compression_ks t=" << io::format_double(t) << " " << io::format_double(v) << "\n";
  out << "wall_time " << r.wall_time << " s\n";
  run.finish(out, {{"wall_time", r.wall_time}});

  bool gate_ok = no_spectrum || r.ks_distance <= ks_gate;
  for (const auto& [t, v] : r.compression_ks) gate_ok = gate_ok && v <= ks_gate;
  if (!gate_ok) throw GateFailure("KS distance above " + io::format_double(ks_gate));
  return kOk;
}

// ---- verify --------------------------------------------------------------

int cmd_verify(const GlobalOptions& g, bool skip_mc, const std::vector<int>& only,
               const std::string& cmdline, std::ostream& out) {
  Run run(g, cmdline, "acceptance.json");
  acceptance::Options opts;
  if (g.seed_set) opts.seed = g.seed;
  opts.skip_mc = skip_mc;
  opts.only.insert(only.begin(), only.end());
  int failed = 0;
  const auto results = acceptance::run(opts, [&](const acceptance::CriterionResult& r) {
    out << acceptance::format_line(r) << "\n" << std::flush;
    if (!r.passed) ++failed;
  });
  json rows = json::array();
  for (const auto& r : results) {
    rows.push_back({{"id", r.id},
                    {"name", r.name},
                    {"passed", r.passed},
                    {"measured", std::isfinite(r.measured) ? json(r.measured) : json(nullptr)},
                    {"threshold", std::isfinite(r.threshold) ? json(r.threshold) : json(nullptr)},
                    {"detail", r.detail}});
  }
  run.write(run.stem() + ".json", json{{"schema_version", io::kSchemaVersion}, {"criteria", rows}}.dump(2) + "\n");
  run.finish(out);
  out << failed << " of " << results.size() << " criteria failed\n";
  if (failed) throw GateFailure(std::to_string(failed) + " acceptance criteria failed");
  return kOk;
}

void diagnostic(std::ostream& err, const char* tag, const std::string& msg) {
  if (color_enabled() && &err == &std::cerr) err << "\033[31m" << tag << "\033[0m: " << msg << "\n";
  else err << tag << ": " << msg << "\n";
}

}  // namespace

bool color_enabled() {
  const char* nc = std::getenv("NO_COLOR");
  if (nc && *nc) return false;
  return isatty(fileno(stderr)) != 0;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lyapunov exponents of free operators: spectral measures, S-transforms, Monte Carlo checks"};
  app.set_version_flag("--version", std::string(io::tool_version()));
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("-o,--out", g.out, "Output directory, or a file path for the primary output");
  auto* seed_opt = app.add_option("--seed", g.seed, "Seed for Monte Carlo runs");
  app.add_option("--tol", g.tol, "Tolerance for consistency gates")->check(CLI::PositiveNumber);
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json", "svg"}));

  MeasureArgs ma;
  auto* measure = app.add_subcommand("measure", "Build a spectral measure and write it as JSON");
  measure->add_option("--mp", ma.mp, "Marchenko-Pastur rate lambda");
  measure->add_option("--compressed", ma.compressed, "Compressed MP law: T LAMBDA")->expected(2);
  measure->add_option("--atoms", ma.atoms, "Atoms as x:mass")->expected(1, 1000);
  measure->add_option("-i,--input", ma.input, "Re-validate a measure file");
  measure->add_option("--nodes", ma.nodes, "Nodes per segment")->check(CLI::Range(3, 32769));

  std::string input, kind = "s_transform", grid, x_grid, method = "auto", config;
  std::vector<double> at;
  auto* transform = app.add_subcommand("transform", "Evaluate G, psi, psi^-1 or S on real arguments");
  transform->add_option("-i,--input", input, "Measure JSON")->required();
  transform->add_option("--kind", kind, "cauchy | psi | psi_inverse | s_transform");
  transform->add_option("--at", at, "Arguments")->delimiter(',');
  transform->add_option("--grid", grid, "Argument grid lo:hi:n");

  bool dist = false;
  int points = 199;
  auto* lyap = app.add_subcommand("lyapunov", "Integrated and marginal exponents, exponent CDF");
  lyap->add_option("-i,--input", input, "Measure JSON of X*X")->required();
  lyap->add_flag("--dist", dist, "Also compute the exponent distribution");
  lyap->add_option("--points", points, "Interior t points")->check(CLI::Range(1, 100000));
  lyap->add_option("--x-grid", x_grid, "Distribution grid lo:hi:n");

  auto* det = app.add_subcommand("det", "Extended Fuglede-Kadison determinant");
  det->add_option("-i,--input", input, "Measure JSON of X*X")->required();
  det->add_option("--method", method, "definition | s_integral | both | auto");

  auto* newman = app.add_subcommand("newman", "Solve the integral equation for the exponent CDF");
  newman->add_option("-i,--input", input, "Measure JSON of X*X")->required();
  newman->add_option("--x-grid", grid, "x grid lo:hi:n");

  double ks_gate = 0.08;
  bool no_spectrum = false;
  auto* mc = app.add_subcommand("mc", "Finite-N Monte Carlo check");
  mc->add_option("-c,--config", config, "EnsembleConfig JSON")->required();
  mc->add_option("--ks-gate", ks_gate, "Largest acceptable KS distance");
  mc->add_flag("--no-spectrum", no_spectrum, "Only growth rates and compressions");

  bool skip_mc = false;
  std::vector<int> only;
  auto* verify = app.add_subcommand("verify", "Run the acceptance suite");
  verify->add_flag("--skip-mc", skip_mc, "Leave out the Monte Carlo criteria");
  verify->add_option("--only", only, "Criterion ids")->delimiter(',');

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << io::tool_version() << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    diagnostic(err, "error", e.what());
    return kInputError;
  }
  g.seed_set = seed_opt->count() > 0;
  g.config_args = config_args(args);

  const std::string cmdline = join_args(args);
  try {
    if (*measure) return cmd_measure(g, ma, cmdline, out);
    if (*transform) return cmd_transform(g, input, kind, at, grid, cmdline, out);
    if (*lyap) return cmd_lyapunov(g, input, dist, points, x_grid, cmdline, out);
    if (*det) return cmd_det(g, input, method, cmdline, out);
    if (*newman) return cmd_newman(g, input, grid, cmdline, out);
    if (*mc) return cmd_mc(g, config, ks_gate, no_spectrum, cmdline, out);
    if (*verify) return cmd_verify(g, skip_mc, only, cmdline, out);
  } catch (const GateFailure& e) {
    diagnostic(err, "gate failed", e.what());
    return kGateFailure;
  } catch (const BoundaryError& e) {
    diagnostic(err, "boundary error", e.what());
    return kInputError;
  } catch (const DomainError& e) {
    diagnostic(err, "domain error", e.what());
    return kInputError;
  } catch (const PreconditionError& e) {
    diagnostic(err, "precondition error", e.what());
    return kInputError;
  } catch (const InvalidMeasure& e) {
    diagnostic(err, "invalid measure", e.what());
    return kInputError;
  } catch (const std::exception& e) {
    diagnostic(err, "error", e.what());
    return kInputError;
  }
  return kInputError;
}

}  // namespace freelyap::cli
