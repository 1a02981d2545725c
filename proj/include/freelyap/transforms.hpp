#pragma once

#include <functional>
#include <string>
#include <string_view>

#include "freelyap/spectral_measure.hpp"

namespace freelyap {

enum class TransformKind { cauchy, psi, psi_inverse, s_transform };

std::string_view to_string(TransformKind kind);
TransformKind transform_kind_from_string(std::string_view name);

/// One evaluation of G, psi, psi^{-1} or S at a real argument.
struct TransformPoint {
  double argument;
  double value;
  TransformKind kind;
  double achieved_error;
};

/// Requested accuracy for transform evaluations.
inline constexpr double kTransformTolerance = 1e-10;

/// Evaluations of psi^{-1} closer than this to -r are refused.
inline constexpr double kEdgeGuard = 1e-9;

struct RankInfo {
  double r;  // 1 - mu({0})
};

RankInfo rank_info(const SpectralMeasure& mu);

/// G(z) = total_mass * integral of 1/(z - x), for z off the support hull.
TransformPoint cauchy(const SpectralMeasure& mu, double z, double total_mass = 1.0);

/// psi(z) = integral of z x / (1 - z x); z < 0 or 0 <= z < 1/sup(support).
TransformPoint psi(const SpectralMeasure& mu, double z);

/// The unique z < 0 with psi(z) = w, for w in (-r, 0).
TransformPoint psi_inverse(const SpectralMeasure& mu, double w);

/// S(w) = (1 + 1/w) psi^{-1}(w); S(0) = 1 / E(Y).
TransformPoint s_transform(const SpectralMeasure& mu, double w);

/// An S-transform as a function on [-rank, 0].
class SEvaluator {
 public:
  SEvaluator(std::function<double(double)> fn, double rank, std::string label)
      : fn_(std::move(fn)), rank_(rank), label_(std::move(label)) {}

  double operator()(double w) const { return fn_(w); }
  double rank() const { return rank_; }
  const std::string& label() const { return label_; }

 private:
  std::function<double(double)> fn_;
  double rank_;
  std::string label_;
};

SEvaluator s_evaluator(const SpectralMeasure& mu);

/// S-transform of the free multiplicative convolution: the pointwise product.
SEvaluator s_product(const SEvaluator& s1, const SEvaluator& s2);

namespace detail {

/// Phi(z) = integral over (0, inf) of 1/(1 - z x) = psi(z) + r, for z < 0.
quad::Estimate psi_complement(const SpectralMeasure& mu, double z);

struct InverseResult {
  double z;
  double residual;
};

/// Solves psi(z) = w where w_plus_r = w + r is supplied separately so that
/// points near -r keep full relative accuracy. No edge guard.
InverseResult solve_psi(const SpectralMeasure& mu, double w, double w_plus_r);

/// S as a function of z = psi^{-1}(w): z (1 + psi(z)) / psi(z), evaluated
/// through the complement so that it stays accurate as z -> -inf.
double s_of_z(const SpectralMeasure& mu, double z);

}  // namespace detail

}  // namespace freelyap
