#include "freelyap/transforms.hpp"

#include <algorithm>
#include <cmath>

#include "freelyap/errors.hpp"

namespace freelyap {

namespace {

// Largest log|z| the root finder will try; beyond this the mass near the
// left edge sits below the quadrature's resolution.
constexpr double kVMax = 250.0;
constexpr double kBisectWidth = 1e-13;
constexpr double kSeriesRadius = 1e-6;

}  // namespace

std::string_view to_string(TransformKind kind) {
  switch (kind) {
    case TransformKind::cauchy: return "cauchy";
    case TransformKind::psi: return "psi";
    case TransformKind::psi_inverse: return "psi_inverse";
    case TransformKind::s_transform: return "s_transform";
  }
  return "unknown";
}

TransformKind transform_kind_from_string(std::string_view name) {
  if (name == "cauchy" || name == "G") return TransformKind::cauchy;
  if (name == "psi") return TransformKind::psi;
  if (name == "psi_inverse" || name == "psi_inv") return TransformKind::psi_inverse;
  if (name == "s_transform" || name == "S" || name == "s") return TransformKind::s_transform;
  throw DomainError("unknown transform kind '" + std::string(name) + "'");
}

RankInfo rank_info(const SpectralMeasure& mu) { return {mu.off_kernel_mass()}; }

TransformPoint cauchy(const SpectralMeasure& mu, double z, double total_mass) {
  if (!(total_mass > 0.0 && total_mass <= 1.0))
    throw DomainError("total mass must lie in (0, 1]");
  if (!(z < mu.support_min() || z > mu.support_max()))
    throw DomainError("Cauchy transform argument lies inside the support hull");
  const quad::Estimate e = mu.integrate([z](double x) { return 1.0 / (z - x); });
  return {z, total_mass * e.value, TransformKind::cauchy, total_mass * e.error};
}

TransformPoint psi(const SpectralMeasure& mu, double z) {
  if (z == 0.0) return {z, 0.0, TransformKind::psi, 0.0};
  if (!std::isfinite(z)) throw DomainError("psi argument must be finite");
  if (z > 0.0 && z * mu.support_max() >= 1.0)
    throw DomainError("psi argument must satisfy z < 1/sup(support) on the positive side");
  const quad::Estimate e = mu.integrate([z](double x) { return z * x / (1.0 - z * x); });
  return {z, e.value, TransformKind::psi, e.error};
}

namespace detail {

quad::Estimate psi_complement(const SpectralMeasure& mu, double z) {
  return mu.integrate_off_zero([z](double x) { return 1.0 / (1.0 - z * x); });
}

InverseResult solve_psi(const SpectralMeasure& mu, double w, double w_plus_r) {
  const double r = mu.off_kernel_mass();
  if (!(r > 0.0)) throw DomainError("psi is identically zero: the measure has no mass off zero");
  if (!(w < 0.0) || !(w_plus_r > 0.0)) throw DomainError("psi^{-1} needs w in (-r, 0)");

  const double m1 = moment(mu, 1);
  if (std::abs(w) < kSeriesRadius) {
    const double m2 = moment(mu, 2);
    const double z = w / m1 - m2 * w * w / (m1 * m1 * m1);
    return {z, std::abs(psi(mu, z).value - w)};
  }

  // Both forms decrease in v = log(-z). Near -r the complement keeps the
  // target w + r at full relative precision.
  const bool use_complement = w < -0.5 * r;
  auto f = [&](double v) {
    const double z = -std::exp(v);
    if (use_complement) return psi_complement(mu, z).value - w_plus_r;
    return psi(mu, z).value - w;
  };

  double lo = std::log(-w / m1);
  double hi = lo;
  double flo = f(lo);
  double fhi = flo;
  double step = 1.0;
  if (flo > 0.0) {
    while (fhi > 0.0) {
      lo = hi;
      flo = fhi;
      if (hi >= kVMax) throw DomainError("psi^{-1}(w) lies beyond the resolvable range");
      hi = std::min(hi + step, kVMax);
      step *= 2.0;
      fhi = f(hi);
    }
  } else {
    while (flo <= 0.0) {
      hi = lo;
      fhi = flo;
      if (lo <= -kVMax) throw DomainError("psi^{-1}(w) lies beyond the resolvable range");
      lo = std::max(lo - step, -kVMax);
      step *= 2.0;
      flo = f(lo);
    }
  }

  while (hi - lo > kBisectWidth) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) {
      lo = hi = mid;
      flo = fhi = 0.0;
      break;
    }
    if (fm > 0.0) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }

  // Secant polish on the final bracket.
  double v = 0.5 * (lo + hi);
  if (flo > 0.0 && fhi < 0.0) v = lo + flo * (hi - lo) / (flo - fhi);
  return {-std::exp(v), std::abs(f(v))};
}

double s_of_z(const SpectralMeasure& mu, double z) {
  const double r = mu.off_kernel_mass();
  const quad::Estimate phi = psi_complement(mu, z);
  if (phi.value < 0.5 * r) return z * (1.0 - r + phi.value) / (phi.value - r);
  const double p = psi(mu, z).value;
  return z * (1.0 + p) / p;
}

}  // namespace detail

TransformPoint psi_inverse(const SpectralMeasure& mu, double w) {
  const double r = mu.off_kernel_mass();
  if (!(w > -r && w < 0.0))
    throw DomainError("psi^{-1} is defined on (-r, 0); r = " + std::to_string(r));
  if (w + r < kEdgeGuard) throw DomainError("psi^{-1} argument within 1e-9 of -r");
  const detail::InverseResult res = detail::solve_psi(mu, w, w + r);
  return {w, res.z, TransformKind::psi_inverse, res.residual};
}

TransformPoint s_transform(const SpectralMeasure& mu, double w) {
  const double r = mu.off_kernel_mass();
  if (w == 0.0) {
    const double m1 = moment(mu, 1);
    return {w, 1.0 / m1, TransformKind::s_transform, 0.0};
  }
  if (!(w >= -r && w < 0.0))
    throw DomainError("S-transform is defined on [-r, 0]; r = " + std::to_string(r));
  const double delta = w + r;
  if (mu.invertible() && delta == 0.0)
    return {w, inverse_moment(mu), TransformKind::s_transform, 0.0};
  if (delta < kEdgeGuard && !mu.invertible())
    throw DomainError("S-transform argument within 1e-9 of -r");
  const detail::InverseResult res = detail::solve_psi(mu, w, delta);
  const double s = (1.0 + w) / w * res.z;
  const double err = std::abs(s) * res.residual / std::min(std::abs(w), delta);
  return {w, s, TransformKind::s_transform, err};
}

SEvaluator s_evaluator(const SpectralMeasure& mu) {
  return SEvaluator([mu](double w) { return s_transform(mu, w).value; }, mu.off_kernel_mass(),
                    mu.label());
}

SEvaluator s_product(const SEvaluator& s1, const SEvaluator& s2) {
  return SEvaluator([s1, s2](double w) { return s1(w) * s2(w); }, std::min(s1.rank(), s2.rank()),
                    s1.label() + "*" + s2.label());
}

}  // namespace freelyap
