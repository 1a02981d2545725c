#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "freelyap/spectral_measure.hpp"
#include "freelyap/transforms.hpp"

namespace freelyap {

/// Integrated exponent F and marginal exponent f sampled on a t-grid.
struct LyapunovProfile {
  std::vector<double> t_grid;
  std::vector<double> F_values;
  std::vector<double> f_values;
  double rank_r = 1.0;
  std::string source_label;
};

/// CDF of the Lyapunov exponents, x -> Lebesgue measure of {t : f(t) <= x}.
struct ExponentDistribution {
  std::vector<double> x_grid;
  std::vector<double> cdf_values;
};

enum class DeterminantMethod { definition, s_integral };

std::string_view to_string(DeterminantMethod method);

struct DeterminantResult {
  double log_det;  // -inf when the log-integral diverges
  DeterminantMethod method;
  double achieved_error;

  double value() const;
};

struct IntegratedExponent {
  double value;
  double achieved_error;
  bool diverged = false;
};

struct LargestExponent {
  double value;
  /// False when mu has an atom at zero; value is then the sup of f on (0, r).
  bool within_hypothesis;
};

/// f(t) = -1/2 log S(-t) for t < r and 0 for t > r.
double marginal_exponent(const SpectralMeasure& mu_y, double t);
double marginal_exponent(const SEvaluator& s, double t);

/// F(t) through the log of -psi^{-1} integrated over (-t, 0); constant for
/// t > r.
IntegratedExponent integrated_exponent(const SpectralMeasure& mu_y, double t);

/// The exponent CDF at a single point.
double distribution_at(const SpectralMeasure& mu_y, double x);

ExponentDistribution exponent_distribution(const SpectralMeasure& mu_y,
                                           std::span<const double> x_grid);

/// `points` uniform interior points of (0, 1), without t = rank.
std::vector<double> default_t_grid(double rank, int points = 199);

/// Uniform grid covering the range of f with 2% padding (and 0 when the
/// measure has an atom at zero).
std::vector<double> default_x_grid(const SpectralMeasure& mu_y, int points = 200);

LyapunovProfile lyapunov_profile(const SpectralMeasure& mu_y, std::span<const double> t_grid = {});

LargestExponent largest_exponent(const SpectralMeasure& mu_y);

DeterminantResult fk_determinant(const SpectralMeasure& mu, DeterminantMethod method);

/// Central difference of F recovering log S(-t).
double s_from_determinant(const SpectralMeasure& mu_y, double t, double dt);

/// Solves the integral equation of the large-N exponent CDF H(x).
double newman_solve(const SpectralMeasure& mu_y, double x);

}  // namespace freelyap
