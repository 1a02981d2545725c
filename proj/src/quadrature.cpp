#include "freelyap/quadrature.hpp"

#include <numbers>

namespace freelyap::quad {

namespace {

// Abscissas with |t| <= kTMax keep 1 - |u| above 1e-60, so endpoint distances
// stay representable after squaring.
constexpr double kTMax = 4.5;
constexpr double kH0 = 0.5;
constexpr int kMaxLevel = 8;

Node make_node(double t) {
  const double s = 0.5 * std::numbers::pi * std::sinh(std::abs(t));
  const double e = std::exp(-2.0 * s);
  const double u = (1.0 - e) / (1.0 + e);
  const double comp = 2.0 * e / (1.0 + e);
  const double weight = 0.5 * std::numbers::pi * std::cosh(t) * 4.0 * e / ((1.0 + e) * (1.0 + e));
  return Node{t < 0.0 ? -u : u, comp, weight};
}

}  // namespace

TanhSinhTable::TanhSinhTable() : h0_(kH0) {
  levels_.resize(kMaxLevel + 1);
  const int n0 = static_cast<int>(kTMax / kH0);
  for (int j = -n0; j <= n0; ++j) levels_[0].push_back(make_node(j * kH0));
  for (int k = 1; k <= kMaxLevel; ++k) {
    const double h = step(k);
    const int n = static_cast<int>(kTMax / h);
    for (int j = -n; j <= n; ++j) {
      if (j % 2 == 0) continue;
      levels_[static_cast<std::size_t>(k)].push_back(make_node(j * h));
    }
  }
}

const TanhSinhTable& TanhSinhTable::get() {
  static const TanhSinhTable table;
  return table;
}

}  // namespace freelyap::quad
