#include "freelyap/spectral_measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "freelyap/errors.hpp"

namespace freelyap {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMassTolerance = 1e-10;
constexpr int kMaxNodeCount = 32769;

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Nodes needed so that interpolating 1/x on [a, b] reaches ~1e-17: the pole
// at 0 sits on a Bernstein ellipse with parameter rho.
int nodes_for_inverse_x(double a, double b, int requested) {
  if (a <= 0.0) return requested;
  const double d = 2.0 * a / (b - a);
  const double rho = 1.0 + d + std::sqrt(d * (2.0 + d));
  const double needed = std::ceil(40.0 / std::log(rho)) + 16.0;
  if (needed <= requested) return requested;
  return static_cast<int>(std::min<double>(needed, kMaxNodeCount));
}

}  // namespace

// ---------------------------------------------------------------------------
// ContinuousSegment

ContinuousSegment::ContinuousSegment(double a, double b, double alpha_left, double alpha_right,
                                     std::vector<double> values)
    : a_(a), b_(b), alpha_left_(alpha_left), alpha_right_(alpha_right), values_(std::move(values)) {
  if (!(std::isfinite(a) && std::isfinite(b)) || !(a < b))
    throw InvalidMeasure("segment needs finite endpoints with a < b, got [" + fmt_double(a) + ", " +
                         fmt_double(b) + "]");
  if (a < 0.0) throw InvalidMeasure("segment starts below zero: a = " + fmt_double(a));
  if (!(alpha_left > -1.0) || !(alpha_right > -1.0))
    throw InvalidMeasure("edge exponents must exceed -1");
  if (values_.size() < 2) throw InvalidMeasure("segment needs at least two node values");
  for (double v : values_)
    if (!std::isfinite(v) || v < 0.0)
      throw InvalidMeasure("smooth part must be finite and nonnegative at every node");

  const int n = node_count();
  auto xi = std::make_shared<std::vector<double>>(n);
  auto bary = std::make_shared<std::vector<double>>(n);
  for (int i = 0; i < n; ++i) {
    const int k = n - i;
    const double th = k * kPi / (n + 1);
    (*xi)[i] = std::cos(th);
    const double s = std::sin(th);
    (*bary)[i] = ((k % 2) ? -1.0 : 1.0) * s * s;
  }
  xi_ = std::move(xi);
  bary_ = std::move(bary);
  build_rule();

  if (!std::isfinite(mass_) || !(mass_ > 0.0))
    throw InvalidMeasure("segment integral must be finite and positive");
}

ContinuousSegment ContinuousSegment::from_function(double a, double b, double alpha_left,
                                                   double alpha_right,
                                                   const std::function<double(double)>& smooth,
                                                   int nodes) {
  if (nodes < 2) throw InvalidMeasure("node count must be at least 2");
  std::vector<double> values(static_cast<std::size_t>(nodes));
  for (int i = 0; i < nodes; ++i) {
    const int k = nodes - i;
    const double th = k * kPi / (nodes + 1);
    values[static_cast<std::size_t>(i)] = smooth(a + (b - a) * 0.5 * (1.0 + std::cos(th)));
  }
  return ContinuousSegment(a, b, alpha_left, alpha_right, std::move(values));
}

double ContinuousSegment::node(int i) const {
  return a_ + (b_ - a_) * 0.5 * (1.0 + (*xi_)[static_cast<std::size_t>(i)]);
}

double ContinuousSegment::interpolate(double xi) const {
  const auto& nodes = *xi_;
  const auto& w = *bary_;
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double diff = xi - nodes[i];
    if (diff == 0.0) return values_[i];
    const double c = w[i] / diff;
    num += c * values_[i];
    den += c;
  }
  return num / den;
}

double ContinuousSegment::smooth_part(double x) const {
  if (x < a_ || x > b_) return 0.0;
  return interpolate(2.0 * (x - a_) / (b_ - a_) - 1.0);
}

double ContinuousSegment::density(double x) const {
  if (x <= a_ || x >= b_) return 0.0;
  return std::pow(x - a_, alpha_left_) * std::pow(b_ - x, alpha_right_) * smooth_part(x);
}

// theta measured from 0 (the b end) and from pi (the a end); whichever is
// small is the accurate one.
ContinuousSegment::ThetaPoint ContinuousSegment::at_theta(double from_zero, double from_pi) const {
  const double len = b_ - a_;
  const double s = std::sin(0.5 * from_zero);
  const double c = std::sin(0.5 * from_pi);
  const double from_a = len * c * c;
  const double from_b = len * s * s;
  const double x = from_a <= from_b ? a_ + from_a : b_ - from_b;
  const double jac = std::pow(len, alpha_left_ + alpha_right_ + 1.0) *
                     std::pow(c, 2.0 * alpha_left_ + 1.0) * std::pow(s, 2.0 * alpha_right_ + 1.0);
  return {x, c * c - s * s, jac};
}

void ContinuousSegment::build_rule() {
  const auto& table = quad::TanhSinhTable::get();
  const double half = 0.5 * kPi;
  std::vector<std::vector<quad::WeightedRule::Point>> levels(
      static_cast<std::size_t>(table.max_level() + 1));
  for (int k = 0; k <= table.max_level(); ++k) {
    auto& out = levels[static_cast<std::size_t>(k)];
    for (const quad::Node& n : table.level(k)) {
      double from_zero, from_pi;
      if (n.u < 0.0) {
        from_zero = half * n.comp;
        from_pi = kPi - from_zero;
      } else {
        from_pi = half * n.comp;
        from_zero = kPi - from_pi;
      }
      const ThetaPoint p = at_theta(from_zero, from_pi);
      const double w = n.weight * half * p.jac * interpolate(p.xi);
      if (w == 0.0) continue;
      out.push_back({p.x, w});
    }
  }
  rule_ = std::make_shared<const quad::WeightedRule>(std::move(levels));
  const quad::Estimate m = rule_->integrate([](double) { return 1.0; });
  mass_ = m.value;
  mass_error_ = m.error;
}

quad::Estimate ContinuousSegment::integrate_between(const std::function<double(double)>& h,
                                                    double lo, double hi,
                                                    const quad::Tolerance& tol) const {
  lo = std::max(lo, a_);
  hi = std::min(hi, b_);
  if (!(lo < hi)) return {0.0, 0.0, 0, true};
  const bool touches_a = lo <= a_;
  const bool touches_b = hi >= b_;
  const double len = b_ - a_;
  auto theta_of = [&](double x) {
    return 2.0 * std::acos(std::sqrt(std::clamp((x - a_) / len, 0.0, 1.0)));
  };
  const double th_lo = touches_b ? 0.0 : theta_of(hi);
  const double th_hi = touches_a ? kPi : theta_of(lo);
  auto f = [&](double th, double dlo, double dhi) {
    const double from_zero = touches_b ? dlo : th;
    const double from_pi = touches_a ? dhi : kPi - th;
    const ThetaPoint p = at_theta(from_zero, from_pi);
    const double g = interpolate(p.xi);
    if (g == 0.0 || p.jac == 0.0) return 0.0;
    return p.jac * g * h(p.x);
  };
  return quad::integrate(f, th_lo, th_hi, tol);
}

double ContinuousSegment::cdf(double x) const {
  if (x <= a_) return 0.0;
  if (x >= b_) return mass_;
  return integrate_between([](double) { return 1.0; }, a_, x).value;
}

double ContinuousSegment::mass_above_theta(double theta) const {
  // mass on [a, x(theta)], i.e. theta' in [theta, pi]
  if (theta <= 0.0) return mass_;
  if (theta >= kPi) return 0.0;
  auto f = [&](double, double, double dhi) {
    const double from_pi = dhi;
    const ThetaPoint p = at_theta(kPi - from_pi, from_pi);
    return p.jac * interpolate(p.xi);
  };
  return quad::integrate(f, theta, kPi).value;
}

double ContinuousSegment::quantile(double m) const {
  if (m <= 0.0) return a_;
  if (m >= mass_) return b_;
  // Safeguarded Newton on theta; mass_above_theta decreases in theta.
  double lo = 0.0;
  double hi = kPi;
  double th = 0.5 * kPi;
  for (int it = 0; it < 100; ++it) {
    const double f = mass_above_theta(th) - m;
    if (f > 0.0)
      lo = th;
    else
      hi = th;
    const ThetaPoint p = at_theta(th, kPi - th);
    const double deriv = p.jac * interpolate(p.xi);
    double next = deriv > 0.0 ? th + f / deriv : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - th) <= 1e-15 * kPi || hi - lo <= 1e-15 * kPi) {
      th = next;
      break;
    }
    th = next;
  }
  const ThetaPoint p = at_theta(th, kPi - th);
  return p.x;
}

// ---------------------------------------------------------------------------
// SpectralMeasure

SpectralMeasure::SpectralMeasure(std::vector<Atom> atoms, std::vector<ContinuousSegment> segments,
                                 std::string label)
    : atoms_(std::move(atoms)), segments_(std::move(segments)), label_(std::move(label)) {
  std::sort(atoms_.begin(), atoms_.end(), [](const Atom& l, const Atom& r) { return l.x < r.x; });
  std::sort(segments_.begin(), segments_.end(),
            [](const ContinuousSegment& l, const ContinuousSegment& r) { return l.a() < r.a(); });
  if (atoms_.empty() && segments_.empty()) throw InvalidMeasure("measure has no mass");

  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const Atom& at = atoms_[i];
    if (!std::isfinite(at.x) || at.x < 0.0)
      throw InvalidMeasure("atom location must be finite and nonnegative: " + fmt_double(at.x));
    if (!(at.mass > 0.0 && at.mass <= 1.0))
      throw InvalidMeasure("atom mass must lie in (0, 1]: " + fmt_double(at.mass));
    if (i > 0 && atoms_[i - 1].x == at.x)
      throw InvalidMeasure("duplicate atom location " + fmt_double(at.x));
    for (const auto& seg : segments_)
      if (at.x > seg.a() && at.x < seg.b())
        throw InvalidMeasure("atom at " + fmt_double(at.x) + " lies inside a segment");
  }
  for (std::size_t i = 1; i < segments_.size(); ++i)
    if (segments_[i].a() < segments_[i - 1].b()) throw InvalidMeasure("segments overlap");

  total_mass_ = 0.0;
  support_min_ = std::numeric_limits<double>::infinity();
  support_max_ = 0.0;
  for (const Atom& at : atoms_) {
    total_mass_ += at.mass;
    if (at.x == 0.0) mass_at_zero_ = at.mass;
    support_min_ = std::min(support_min_, at.x);
    support_max_ = std::max(support_max_, at.x);
  }
  for (const auto& seg : segments_) {
    total_mass_ += seg.mass();
    support_min_ = std::min(support_min_, seg.a());
    support_max_ = std::max(support_max_, seg.b());
  }
  if (std::abs(total_mass_ - 1.0) > kMassTolerance)
    throw InvalidMeasure("total mass " + fmt_double(total_mass_) + " differs from 1 by more than 1e-10");
}

double SpectralMeasure::cdf(double x) const {
  double c = 0.0;
  for (const Atom& at : atoms_)
    if (at.x <= x) c += at.mass;
  for (const auto& seg : segments_) c += seg.cdf(x);
  return std::min(c, 1.0);
}

double SpectralMeasure::cdf_left(double x) const {
  double c = 0.0;
  for (const Atom& at : atoms_)
    if (at.x < x) c += at.mass;
  for (const auto& seg : segments_) c += seg.cdf(x);
  return std::min(c, 1.0);
}

double SpectralMeasure::quantile(double p) const {
  // Walk atoms and segments in order of location; an atom sitting on a
  // segment's left endpoint comes first.
  struct Piece {
    double where;
    int kind;  // 0 atom, 1 segment
    std::size_t index;
  };
  std::vector<Piece> pieces;
  for (std::size_t i = 0; i < atoms_.size(); ++i) pieces.push_back({atoms_[i].x, 0, i});
  for (std::size_t i = 0; i < segments_.size(); ++i) pieces.push_back({segments_[i].a(), 1, i});
  std::sort(pieces.begin(), pieces.end(), [](const Piece& l, const Piece& r) {
    return l.where < r.where || (l.where == r.where && l.kind < r.kind);
  });
  double cum = 0.0;
  for (const Piece& pc : pieces) {
    if (pc.kind == 0) {
      cum += atoms_[pc.index].mass;
      if (cum >= p) return atoms_[pc.index].x;
    } else {
      const auto& seg = segments_[pc.index];
      if (cum + seg.mass() >= p) return seg.quantile(p - cum);
      cum += seg.mass();
    }
  }
  return support_max_;
}

// ---------------------------------------------------------------------------
// Constructors for the closed-form laws

namespace {

ContinuousSegment mp_segment(double a, double b, int nodes) {
  constexpr double inv2pi = 1.0 / (2.0 * kPi);
  if (a == 0.0) {
    // sqrt(x (b - x)) / (2 pi x) = x^{-1/2} (b - x)^{1/2} / (2 pi)
    return ContinuousSegment::from_function(0.0, b, -0.5, 0.5, [](double) { return inv2pi; },
                                            nodes);
  }
  return ContinuousSegment::from_function(a, b, 0.5, 0.5,
                                          [](double x) { return inv2pi / x; },
                                          nodes_for_inverse_x(a, b, nodes));
}

}  // namespace

SpectralMeasure mp_measure(double lambda, int nodes) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw DomainError("Marchenko-Pastur rate must be positive, got " + fmt_double(lambda));
  const double sl = std::sqrt(lambda);
  const double a = (1.0 - sl) * (1.0 - sl);
  const double b = (1.0 + sl) * (1.0 + sl);
  std::vector<Atom> atoms;
  if (lambda < 1.0) atoms.push_back({0.0, 1.0 - lambda});
  return SpectralMeasure(std::move(atoms), {mp_segment(a, b, nodes)},
                         "mp(lambda=" + fmt_double(lambda) + ")");
}

SpectralMeasure compressed_mp_measure(double t, double lambda, int nodes) {
  if (!(t > 0.0 && t <= 1.0))
    throw DomainError("compression dimension t must lie in (0, 1], got " + fmt_double(t));
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw DomainError("Marchenko-Pastur rate must be positive, got " + fmt_double(lambda));
  if (t == 1.0) return mp_measure(lambda, nodes);
  const double st = std::sqrt(t);
  const double sl = std::sqrt(lambda);
  const double a = (st - sl) * (st - sl);
  const double b = (st + sl) * (st + sl);
  std::vector<Atom> atoms{{0.0, std::max(1.0 - lambda, 1.0 - t)}};
  return SpectralMeasure(std::move(atoms), {mp_segment(a, b, nodes)},
                         "mp(lambda=" + fmt_double(lambda) + ",t=" + fmt_double(t) + ")");
}

SpectralMeasure point_mass(double x) {
  return SpectralMeasure({{x, 1.0}}, {}, "delta(" + fmt_double(x) + ")");
}

SpectralMeasure discrete_measure(std::vector<Atom> atoms, std::string label) {
  return SpectralMeasure(std::move(atoms), {}, std::move(label));
}

double moment(const SpectralMeasure& mu, int k) {
  if (k < 0) throw DomainError("moment order must be nonnegative");
  if (k == 0) return 1.0;
  return mu.integrate([k](double x) { return std::pow(x, k); }).value;
}

double inverse_moment(const SpectralMeasure& mu) {
  if (!mu.invertible()) return std::numeric_limits<double>::infinity();
  return mu.integrate([](double x) { return 1.0 / x; }).value;
}

std::vector<double> default_cutoffs() {
  std::vector<double> c;
  for (int k = 1; k <= 15; ++k) c.push_back(std::pow(10.0, -k));
  return c;
}

LogIntegral log_integral(const SpectralMeasure& mu, std::span<const double> cutoffs) {
  std::vector<double> owned;
  if (cutoffs.empty()) {
    owned = default_cutoffs();
    cutoffs = owned;
  }
  for (std::size_t i = 0; i < cutoffs.size(); ++i) {
    if (!(cutoffs[i] > 0.0)) throw DomainError("cutoffs must be positive");
    if (i > 0 && !(cutoffs[i] < cutoffs[i - 1]))
      throw DomainError("cutoffs must be strictly decreasing");
  }

  auto log_fn = [](double x) { return std::log(x); };
  LogIntegral out{0.0, 0.0, {}};
  std::vector<double> seg_full;
  for (const Atom& at : mu.atoms())
    if (at.x > 0.0) out.value += at.mass * std::log(at.x);
  for (const auto& seg : mu.segments()) {
    const quad::Estimate e = seg.integrate(log_fn);
    seg_full.push_back(e.value);
    out.value += e.value;
    out.achieved_error += e.error;
  }

  for (double c : cutoffs) {
    double p = 0.0;
    for (const Atom& at : mu.atoms())
      if (at.x > c) p += at.mass * std::log(at.x);
    for (std::size_t i = 0; i < mu.segments().size(); ++i) {
      const auto& seg = mu.segments()[i];
      if (c <= seg.a())
        p += seg_full[i];
      else if (c < seg.b())
        p += seg_full[i] - seg.integrate_between(log_fn, seg.a(), c).value;
    }
    out.partials.push_back(p);
  }

  // Three successive partial values each dropping by more than 1 means the
  // limit is -inf rather than an integrable log singularity.
  constexpr double kDrop = 1.0;
  for (std::size_t i = 2; i < out.partials.size(); ++i) {
    if (out.partials[i - 2] - out.partials[i - 1] > kDrop &&
        out.partials[i - 1] - out.partials[i] > kDrop) {
      out.value = -std::numeric_limits<double>::infinity();
      break;
    }
  }
  return out;
}

}  // namespace freelyap
