#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "freelyap/quadrature.hpp"

namespace freelyap {

inline constexpr int kDefaultNodeCount = 257;

struct Atom {
  double x;
  double mass;
};

/// Continuous part of a spectral measure on [a, b].
///
/// The density is stored as
///
///     density(x) = (x - a)^alpha_left * (b - x)^alpha_right * g(x)
///
/// with the smooth part g sampled at the interior nodes of the substitution
/// x = a + (b - a)(1 + cos theta)/2, theta_k = k pi / (n + 1), k = 1..n,
/// listed in increasing x. Between nodes g is the polynomial interpolant
/// (barycentric form). Edge exponents of +-1/2 make the integrand in theta
/// smooth, so square-root edges and the 1/sqrt(x) edge of MP(1) are
/// integrated to full precision.
///
/// Construction precomputes a tanh-sinh rule in theta with g folded into the
/// weights. Instances are immutable.
class ContinuousSegment {
 public:
  ContinuousSegment(double a, double b, double alpha_left, double alpha_right,
                    std::vector<double> values);

  static ContinuousSegment from_function(double a, double b, double alpha_left,
                                         double alpha_right,
                                         const std::function<double(double)>& smooth,
                                         int nodes = kDefaultNodeCount);

  double a() const { return a_; }
  double b() const { return b_; }
  double alpha_left() const { return alpha_left_; }
  double alpha_right() const { return alpha_right_; }
  const std::vector<double>& values() const { return values_; }
  int node_count() const { return static_cast<int>(values_.size()); }

  /// Location of node i (increasing in i).
  double node(int i) const;
  double smooth_part(double x) const;
  double density(double x) const;

  double mass() const { return mass_; }
  double mass_error() const { return mass_error_; }

  /// Integral of h(x) * density(x) over [a, b].
  template <class H>
  quad::Estimate integrate(H&& h, const quad::Tolerance& tol = {}) const {
    return rule_->integrate(std::forward<H>(h), tol);
  }

  /// Integral of h(x) * density(x) over [lo, hi] intersected with [a, b].
  quad::Estimate integrate_between(const std::function<double(double)>& h, double lo, double hi,
                                   const quad::Tolerance& tol = {}) const;

  /// Mass on [a, x].
  double cdf(double x) const;
  /// Smallest x with mass on [a, x] equal to m (clamped to [a, b]).
  double quantile(double m) const;

 private:
  struct ThetaPoint {
    double x;
    double xi;   // cos theta
    double jac;  // weight function times dx/dtheta
  };

  ThetaPoint at_theta(double from_zero, double from_pi) const;
  double interpolate(double xi) const;
  double mass_above_theta(double theta) const;
  void build_rule();

  double a_, b_, alpha_left_, alpha_right_;
  std::vector<double> values_;
  std::shared_ptr<const std::vector<double>> xi_;
  std::shared_ptr<const std::vector<double>> bary_;
  std::shared_ptr<const quad::WeightedRule> rule_;
  double mass_ = 0.0;
  double mass_error_ = 0.0;
};

/// Probability measure of a positive operator: atoms plus continuous segments.
class SpectralMeasure {
 public:
  SpectralMeasure(std::vector<Atom> atoms, std::vector<ContinuousSegment> segments,
                  std::string label = {});

  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<ContinuousSegment>& segments() const { return segments_; }
  const std::string& label() const { return label_; }

  double total_mass() const { return total_mass_; }
  double mass_at_zero() const { return mass_at_zero_; }
  /// r = 1 - mu({0}).
  double off_kernel_mass() const { return 1.0 - mass_at_zero_; }
  double support_min() const { return support_min_; }
  double support_max() const { return support_max_; }
  /// No atom at zero and zero outside the closure of the support.
  bool invertible() const { return mass_at_zero_ == 0.0 && support_min_ > 0.0; }

  /// Integral of h over the whole measure.
  template <class H>
  quad::Estimate integrate(H&& h, const quad::Tolerance& tol = {}) const {
    return integrate_impl(h, tol, false);
  }

  /// Integral of h over (0, inf), i.e. with the atom at zero removed.
  template <class H>
  quad::Estimate integrate_off_zero(H&& h, const quad::Tolerance& tol = {}) const {
    return integrate_impl(h, tol, true);
  }

  /// mu([0, x]).
  double cdf(double x) const;
  /// mu([0, x)).
  double cdf_left(double x) const;
  /// inf{x : cdf(x) >= p}.
  double quantile(double p) const;

 private:
  template <class H>
  quad::Estimate integrate_impl(H& h, const quad::Tolerance& tol, bool skip_zero) const {
    quad::Estimate total{0.0, 0.0, 0, true};
    for (const Atom& at : atoms_) {
      if (skip_zero && at.x == 0.0) continue;
      total.value += at.mass * h(at.x);
    }
    for (const ContinuousSegment& seg : segments_) {
      const quad::Estimate e = seg.integrate(h, tol);
      total.value += e.value;
      total.error += e.error;
      total.level = std::max(total.level, e.level);
      total.converged = total.converged && e.converged;
    }
    return total;
  }

  std::vector<Atom> atoms_;
  std::vector<ContinuousSegment> segments_;
  std::string label_;
  double total_mass_ = 0.0;
  double mass_at_zero_ = 0.0;
  double support_min_ = 0.0;
  double support_max_ = 0.0;
};

/// Marchenko-Pastur (free Poisson) law with rate lambda.
SpectralMeasure mp_measure(double lambda, int nodes = kDefaultNodeCount);

/// Law of P_t Y P_t for Y ~ MP(lambda) and a free projection of trace t.
SpectralMeasure compressed_mp_measure(double t, double lambda, int nodes = kDefaultNodeCount);

SpectralMeasure point_mass(double x);

/// Purely atomic measure; masses must sum to one.
SpectralMeasure discrete_measure(std::vector<Atom> atoms, std::string label = {});

/// Integral of x^k.
double moment(const SpectralMeasure& mu, int k);

/// Integral of 1/x; +inf unless the measure is invertible.
double inverse_moment(const SpectralMeasure& mu);

struct LogIntegral {
  double value;  // -inf when the cutoff sequence diverges
  double achieved_error;
  std::vector<double> partials;  // one per cutoff

  bool diverges() const { return value == -std::numeric_limits<double>::infinity(); }
};

/// Decreasing cutoffs 1e-1, 1e-2, ..., 1e-15.
std::vector<double> default_cutoffs();

/// lim over the cutoff sequence of the integral of log^{+c}(x).
LogIntegral log_integral(const SpectralMeasure& mu,
                         std::span<const double> cutoffs = {});

}  // namespace freelyap
