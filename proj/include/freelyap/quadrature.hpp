#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace freelyap::quad {

// Tanh-sinh (double exponential) quadrature with nested levels.
//
// Abscissas carry their distance to the nearer endpoint so that integrands
// with endpoint singularities (x^alpha, log x) can be evaluated without
// cancellation right up to the edge.

struct Node {
  double u;       // abscissa in (-1, 1)
  double comp;    // 1 - |u|
  double weight;  // du/dt
};

struct Tolerance {
  double rel = 1e-13;  // relative to the L1 norm of the integrand
  double abs = 1e-300;
};

struct Estimate {
  double value = 0.0;
  double error = 0.0;  // difference between the last two levels
  int level = 0;
  bool converged = false;
};

class TanhSinhTable {
 public:
  static const TanhSinhTable& get();

  int max_level() const { return static_cast<int>(levels_.size()) - 1; }
  double step(int level) const { return h0_ / static_cast<double>(1 << level); }
  std::span<const Node> level(int k) const { return levels_[static_cast<std::size_t>(k)]; }

  static constexpr int kMinLevel = 3;

 private:
  TanhSinhTable();

  double h0_;
  std::vector<std::vector<Node>> levels_;
};

/// Drives the nested trapezoid sums. `level_sum(k)` returns the plain and the
/// absolute sum of weighted integrand values over the nodes new at level k.
template <class LevelSum>
Estimate nested_sum(LevelSum&& level_sum, const Tolerance& tol) {
  const auto& table = TanhSinhTable::get();
  auto [s0, a0] = level_sum(0);
  double value = table.step(0) * s0;
  double l1 = table.step(0) * a0;
  Estimate est{value, std::numeric_limits<double>::infinity(), 0, false};
  for (int k = 1; k <= table.max_level(); ++k) {
    auto [s, a] = level_sum(k);
    const double h = table.step(k);
    const double next = 0.5 * value + h * s;
    l1 = 0.5 * l1 + h * a;
    est.error = std::abs(next - value);
    est.level = k;
    value = next;
    est.value = value;
    if (!std::isfinite(value)) return est;
    if (k >= TanhSinhTable::kMinLevel && est.error <= std::max(tol.abs, tol.rel * l1)) {
      est.converged = true;
      return est;
    }
  }
  return est;
}

/// Integrates f over [lo, hi]. f is called as f(x, dist_to_lo, dist_to_hi).
template <class F>
Estimate integrate(F&& f, double lo, double hi, const Tolerance& tol = {}) {
  const auto& table = TanhSinhTable::get();
  const double half = 0.5 * (hi - lo);
  auto level_sum = [&](int k) {
    double s = 0.0;
    double a = 0.0;
    for (const Node& n : table.level(k)) {
      const double d = half * n.comp;
      double x, dlo, dhi;
      if (n.u < 0.0) {
        dlo = d;
        dhi = 2.0 * half - d;
        x = lo + d;
      } else {
        dhi = d;
        dlo = 2.0 * half - d;
        x = hi - d;
      }
      const double v = n.weight * f(x, dlo, dhi);
      s += v;
      a += std::abs(v);
    }
    return std::pair{half * s, half * a};
  };
  return nested_sum(level_sum, tol);
}

/// A tanh-sinh rule with the weight function folded into precomputed node
/// weights. Integrating h then costs one h evaluation per node.
class WeightedRule {
 public:
  struct Point {
    double x;
    double w;
  };

  WeightedRule() = default;
  explicit WeightedRule(std::vector<std::vector<Point>> levels) : levels_(std::move(levels)) {}

  bool empty() const { return levels_.empty(); }

  template <class H>
  Estimate integrate(H&& h, const Tolerance& tol = {}) const {
    auto level_sum = [&](int k) {
      double s = 0.0;
      double a = 0.0;
      for (const Point& p : levels_[static_cast<std::size_t>(k)]) {
        const double v = p.w * h(p.x);
        s += v;
        a += std::abs(v);
      }
      return std::pair{s, a};
    };
    return nested_sum(level_sum, tol);
  }

 private:
  std::vector<std::vector<Point>> levels_;
};

}  // namespace freelyap::quad
