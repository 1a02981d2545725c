#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "freelyap/lyapunov.hpp"
#include "freelyap/spectral_measure.hpp"

namespace freelyap::rmt {

using Matrix = Eigen::MatrixXd;
using Rng = std::mt19937_64;

enum class SingularMode { quantile, iid };

/// Monte Carlo setup. The factor law is the law of X*X; factors are
/// X = U D with U Haar orthogonal and D^2 drawn from `law`.
struct EnsembleConfig {
  int N = 64;
  int steps_n = 100;
  int trials = 1;
  std::uint64_t seed = 0;
  SpectralMeasure law = point_mass(1.0);
  SingularMode mode = SingularMode::quantile;
  std::vector<double> t_list;
  /// Set when the law is MP(lambda); enables the compression oracle.
  std::optional<double> mp_lambda;

  void validate() const;
};

struct McReport {
  std::vector<double> empirical_exponents;  // descending, averaged over trials
  std::vector<double> exponent_stderr;      // spread across trials, per index
  std::map<double, double> growth_rates;
  double ks_distance = 0.0;
  std::map<double, double> compression_ks;
  double wall_time = 0.0;
};

/// Independent generator for one trial; depends only on (seed, trial).
Rng trial_rng(std::uint64_t seed, std::uint64_t trial);

/// Squared singular values: deterministic quantiles at (i + 1/2)/N, or
/// i.i.d. draws through the quantile function.
std::vector<double> squared_singular_values(const EnsembleConfig& config, Rng& rng);

/// Haar orthogonal matrix: QR of a Gaussian with sign-fixed diagonal.
Matrix haar_orthogonal(int n, Rng& rng);

/// U diag(sqrt(q)) with U Haar.
Matrix sample_factor(const EnsembleConfig& config, Rng& rng);

/// Exponents of the product by QR re-orthogonalization, descending and
/// averaged over trials. Exponents of kernel directions are reported as 0.
std::vector<double> lyapunov_spectrum_qr(const EnsembleConfig& config,
                                         std::vector<double>* stderr_out = nullptr);

struct GrowthResult {
  double rate;  // (1/(n N)) log det of the projected product
  int rank;     // rank of the first projected factor
};

/// Log-volume growth of a Haar frame of floor(tN) columns.
GrowthResult projected_growth(const EnsembleConfig& config, double t);

/// Eigenvalues of the top-left floor(tN) block of V diag(q) V^T, pooled over
/// trials and sorted.
std::vector<double> compress_spectrum(const EnsembleConfig& config, double t);

/// Numerical rank of X P_t for one factor and one Haar projection.
int projected_rank(const EnsembleConfig& config, double t);

/// Sup distance between the empirical CDF of a sorted sample and a reference
/// CDF; `cdf_left` gives the left limits so that reference atoms are exact.
double ks_distance_with_left(const std::vector<double>& sorted,
                             const std::function<double(double)>& cdf,
                             const std::function<double(double)>& cdf_left);

/// For continuous reference CDFs.
inline double ks_distance(const std::vector<double>& sorted,
                          const std::function<double(double)>& cdf) {
  return ks_distance_with_left(sorted, cdf, cdf);
}

/// Full run: exponent spectrum with KS against the exponent CDF, growth
/// rates and compression KS for every t in t_list.
McReport run_mc(const EnsembleConfig& config, bool with_spectrum = true);

}  // namespace freelyap::rmt
