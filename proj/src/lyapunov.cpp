#include "freelyap/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "freelyap/errors.hpp"
#include "freelyap/quadrature.hpp"

namespace freelyap {

namespace {

constexpr double kVMax = 250.0;
constexpr double kBisectWidth = 1e-13;

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

// log(-psi^{-1}(w)) with w + r supplied separately.
double log_neg_inverse(const SpectralMeasure& mu, double w, double w_plus_r) {
  return std::log(-detail::solve_psi(mu, w, w_plus_r).z);
}

}  // namespace

std::string_view to_string(DeterminantMethod method) {
  switch (method) {
    case DeterminantMethod::definition: return "definition";
    case DeterminantMethod::s_integral: return "s_integral";
  }
  return "unknown";
}

double DeterminantResult::value() const { return std::exp(log_det); }

double marginal_exponent(const SpectralMeasure& mu_y, double t) {
  if (!(t > 0.0 && t < 1.0)) throw DomainError("t must lie in (0, 1)");
  const double r = mu_y.off_kernel_mass();
  if (t == r) throw BoundaryError("f is undefined at t = rank");
  if (t > r) return 0.0;
  return -0.5 * std::log(s_transform(mu_y, -t).value);
}

double marginal_exponent(const SEvaluator& s, double t) {
  if (!(t > 0.0 && t < 1.0)) throw DomainError("t must lie in (0, 1)");
  const double r = s.rank();
  if (t == r) throw BoundaryError("f is undefined at t = rank");
  if (t > r) return 0.0;
  return -0.5 * std::log(s(-t));
}

IntegratedExponent integrated_exponent(const SpectralMeasure& mu_y, double t) {
  if (!(t > 0.0 && t <= 1.0)) throw DomainError("t must lie in (0, 1]");
  const double r = mu_y.off_kernel_mass();
  if (!(r > 0.0)) return {0.0, 0.0, false};
  const double tt = std::min(t, r);
  const double half = 0.5 * tt;

  // Right half: w near 0, the distance to 0 is exact.
  const quad::Estimate right = quad::integrate(
      [&](double, double, double dhi) { return log_neg_inverse(mu_y, -dhi, r - dhi); }, -half, 0.0);

  // Left half: w near -tt, w + r = (r - tt) + dist.
  const double gap = r - tt;
  double inner = right.value;
  double err = right.error;
  const bool exact_edge = mu_y.invertible() || gap >= kEdgeGuard;
  if (exact_edge) {
    const quad::Estimate left = quad::integrate(
        [&](double, double dlo, double) { return log_neg_inverse(mu_y, -tt + dlo, gap + dlo); },
        -tt, -half);
    inner += left.value;
    err += left.error;
  } else {
    // psi^{-1} diverges logarithmically at -r. Below delta = eps the integrand
    // is modelled as A - p log(delta) from two samples and integrated exactly.
    const double eps = kEdgeGuard;
    const double lo = -r + eps;
    const quad::Estimate left = quad::integrate(
        [&](double, double dlo, double) { return log_neg_inverse(mu_y, lo + dlo, eps + dlo); }, lo,
        -half);
    const double y1 = log_neg_inverse(mu_y, -r + eps, eps);
    const double y2 = log_neg_inverse(mu_y, -r + 2.0 * eps, 2.0 * eps);
    const double p = (y1 - y2) / std::log(2.0);
    const double a = y1 + p * std::log(eps);
    // Integral over delta in [gap, eps] of a - p log(delta).
    auto prim = [&](double d) { return a * d - p * (xlogx(d) - d); };
    const double tail = prim(eps) - prim(gap);
    inner += left.value + tail;
    err += left.error + 1e-3 * std::abs(tail);
  }

  const double value = 0.5 * (-inner + xlogx(1.0 - tt) + xlogx(tt));
  if (!std::isfinite(value))
    return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(), true};
  return {value, 0.5 * err, false};
}

double distribution_at(const SpectralMeasure& mu_y, double x) {
  if (!std::isfinite(x)) {
    if (std::isnan(x)) throw DomainError("x must not be NaN");
    return x > 0.0 ? 1.0 : 0.0;
  }
  const double r = mu_y.off_kernel_mass();
  const double jump = x >= 0.0 ? 1.0 - r : 0.0;
  if (!(r > 0.0)) return jump;
  const double fsup = 0.5 * std::log(moment(mu_y, 1));
  if (x >= fsup) return r + jump;

  // f decreases along the inverse branch; in v = log(-z) find where it
  // crosses x. The Lebesgue part is then r - t* = Phi(z*).
  auto g = [&](double v) { return -0.5 * std::log(detail::s_of_z(mu_y, -std::exp(v))) - x; };
  double lo = 0.0;
  double hi = 0.0;
  double step = 1.0;
  double g0 = g(0.0);
  if (g0 > 0.0) {
    double gh = g0;
    while (gh > 0.0) {
      lo = hi;
      hi += step;
      step *= 2.0;
      if (hi > kVMax) return jump;
      gh = g(hi);
    }
  } else {
    double gl = g0;
    while (gl <= 0.0) {
      hi = lo;
      lo -= step;
      step *= 2.0;
      if (lo < -kVMax) return r + jump;
      gl = g(lo);
    }
  }
  while (hi - lo > kBisectWidth) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (g(mid) > 0.0) lo = mid;
    else hi = mid;
  }
  const double z = -std::exp(0.5 * (lo + hi));
  const double leb = std::clamp(detail::psi_complement(mu_y, z).value, 0.0, r);
  return leb + jump;
}

ExponentDistribution exponent_distribution(const SpectralMeasure& mu_y,
                                           std::span<const double> x_grid) {
  ExponentDistribution out;
  out.x_grid.assign(x_grid.begin(), x_grid.end());
  out.cdf_values.reserve(x_grid.size());
  for (double x : x_grid) out.cdf_values.push_back(distribution_at(mu_y, x));
  return out;
}

std::vector<double> default_t_grid(double rank, int points) {
  if (points < 1) throw DomainError("grid needs at least one point");
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(points));
  for (int k = 1; k <= points; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(points + 1);
    if (std::abs(t - rank) < kEdgeGuard) continue;
    grid.push_back(t);
  }
  return grid;
}

std::vector<double> default_x_grid(const SpectralMeasure& mu_y, int points) {
  if (points < 2) throw DomainError("grid needs at least two points");
  const double r = mu_y.off_kernel_mass();
  double hi = 0.0;
  double lo = 0.0;
  if (r > 0.0) {
    hi = 0.5 * std::log(moment(mu_y, 1));
    const double t_low = r * (1.0 - 1e-3);
    lo = marginal_exponent(mu_y, std::min(t_low, 1.0 - 1e-3));
  }
  if (r < 1.0) {
    lo = std::min(lo, 0.0);
    hi = std::max(hi, 0.0);
  }
  double span = hi - lo;
  if (!(span > 0.0)) span = 1.0;
  lo -= 0.02 * span;
  hi += 0.02 * span;
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i)
    grid[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (points - 1);
  return grid;
}

LyapunovProfile lyapunov_profile(const SpectralMeasure& mu_y, std::span<const double> t_grid) {
  LyapunovProfile p;
  p.rank_r = mu_y.off_kernel_mass();
  p.source_label = mu_y.label();
  std::vector<double> grid =
      t_grid.empty() ? default_t_grid(p.rank_r) : std::vector<double>(t_grid.begin(), t_grid.end());
  for (double t : grid) {
    if (!(t > 0.0 && t < 1.0)) throw DomainError("profile grid points must lie in (0, 1)");
    if (t == p.rank_r) throw BoundaryError("profile grid contains t = rank");
  }
  p.t_grid = grid;
  p.F_values.reserve(grid.size());
  p.f_values.reserve(grid.size());
  for (double t : grid) {
    p.F_values.push_back(integrated_exponent(mu_y, t).value);
    p.f_values.push_back(marginal_exponent(mu_y, t));
  }
  return p;
}

LargestExponent largest_exponent(const SpectralMeasure& mu_y) {
  return {0.5 * std::log(moment(mu_y, 1)), mu_y.mass_at_zero() == 0.0};
}

DeterminantResult fk_determinant(const SpectralMeasure& mu, DeterminantMethod method) {
  if (method == DeterminantMethod::definition) {
    const LogIntegral li = log_integral(mu);
    if (li.diverges()) return {-std::numeric_limits<double>::infinity(), method, 0.0};
    return {0.5 * li.value, method, 0.5 * li.achieved_error};
  }
  if (!mu.invertible())
    throw PreconditionError("the S-transform route needs an invertible measure (no mass near 0)");
  // log S(-t) on (0, 1); 1 - t is exact from the node offsets so the end
  // t -> 1 goes through the same edge-accurate inversion as psi^{-1}.
  const quad::Estimate e = quad::integrate(
      [&](double t, double, double dhi) {
        const double z = detail::solve_psi(mu, -t, dhi).z;
        return std::log(dhi / t * -z);
      },
      0.0, 1.0);
  return {-0.5 * e.value, method, 0.5 * e.error};
}

double s_from_determinant(const SpectralMeasure& mu_y, double t, double dt) {
  const double r = mu_y.off_kernel_mass();
  if (!(dt > 0.0)) throw DomainError("dt must be positive");
  if (!(t - dt > 0.0 && t + dt < r)) throw DomainError("need 0 < t - dt and t + dt < rank");
  const double fp = integrated_exponent(mu_y, t + dt).value;
  const double fm = integrated_exponent(mu_y, t - dt).value;
  return -2.0 * (fp - fm) / (2.0 * dt);
}

double newman_solve(const SpectralMeasure& mu_y, double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("x must be positive and finite");
  const double x2 = x * x;
  if (moment(mu_y, 1) <= x2) return 1.0;
  // R(H) = integral of (s - x^2) / (H x^2 + (1 - H) s); negative for small H,
  // positive at H = 1. The root is the solution.
  auto residual = [&](double h) {
    return mu_y.integrate([&](double s) { return (s - x2) / (h * x2 + (1.0 - h) * s); }).value;
  };
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > kBisectWidth) {
    const double mid = 0.5 * (lo + hi);
    if (residual(mid) > 0.0) hi = mid;
    else lo = mid;
  }
  if (hi <= kBisectWidth) return 0.0;
  return 0.5 * (lo + hi);
}

}  // namespace freelyap
