#include "freelyap/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>

#include "freelyap/lyapunov.hpp"
#include "freelyap/rmt.hpp"
#include "freelyap/spectral_measure.hpp"
#include "freelyap/transforms.hpp"

namespace freelyap::acceptance {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Fills in pass/fail from an error bound and a time limit.
CriterionResult finish(int id, const std::string& name, double measured, double threshold,
                       Clock::time_point t0, double limit, std::string detail = {}) {
  const double s = seconds_since(t0);
  return {id, name, measured <= threshold && s < limit, measured, threshold, s, limit,
          std::move(detail)};
}

double fmt_closed(double lambda, double x) {
  // Piecewise exponent CDF of MP(lambda), written branch by branch.
  if (lambda >= 1.0) {
    const double lo = lambda > 1.0 ? 0.5 * std::log(lambda - 1.0) : -INFINITY;
    if (x < lo) return 0.0;
    if (x < 0.5 * std::log(lambda)) return std::exp(2.0 * x) + 1.0 - lambda;
    return 1.0;
  }
  if (x < 0.5 * std::log(lambda)) return std::exp(2.0 * x);
  if (x < 0.0) return lambda;
  return 1.0;
}

CriterionResult c1(const Options&) {
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (double lambda : {0.5, 1.0, 2.0, 5.0}) {
    const SpectralMeasure mu = mp_measure(lambda);
    const double top = std::min(1.0, lambda);
    for (int k = 1; k <= 19; ++k) {
      const double t = top * k / 20.0;
      const double f = -0.5 * std::log(s_transform(mu, -t).value);
      worst = std::max(worst, std::abs(f - 0.5 * std::log(lambda - t)));
    }
  }
  return finish(1, "marginal-exponent-closed-form", worst, 1e-8, t0, 2.0,
                "lambda in {0.5,1,2,5}, 19 t each");
}

CriterionResult c2(const Options&) {
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (double lambda : {2.0, 0.5, 1.0}) {
    const SpectralMeasure mu = mp_measure(lambda);
    for (int k = 0; k < 100; ++k) {
      const double x = -2.0 + (k + 0.5) * 3.0 / 100.0;
      worst = std::max(worst, std::abs(distribution_at(mu, x) - fmt_closed(lambda, x)));
    }
  }
  return finish(2, "exponent-distribution-piecewise", worst, 1e-8, t0, 2.0,
                "MP(2), MP(0.5), MP(1) at 100 points in (-2, 1)");
}

CriterionResult c3(const Options&) {
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (double lambda : {1.5, 2.0, 4.0}) {
    const SpectralMeasure mu = mp_measure(lambda);
    const double a = fk_determinant(mu, DeterminantMethod::definition).value();
    const double b = fk_determinant(mu, DeterminantMethod::s_integral).value();
    worst = std::max(worst, std::abs(a - b) / std::abs(a));
    if (lambda == 2.0) {
      const double exact = std::exp(0.5 * (2.0 * std::log(2.0) - 1.0));
      worst = std::max({worst, std::abs(a - exact) / exact, std::abs(b - exact) / exact});
    }
  }
  return finish(3, "determinant-two-routes", worst, 1e-6, t0, 2.0,
                "relative; MP(1.5), MP(2), MP(4); MP(2) also vs closed form");
}

CriterionResult c4(const Options&) {
  const auto t0 = Clock::now();
  const SpectralMeasure mu = mp_measure(2.0);
  double worst = 0.0;
  for (double t : {0.25, 0.5, 0.75})
    worst = std::max(worst, std::abs(s_from_determinant(mu, t, 1e-4) + std::log(2.0 - t)));
  return finish(4, "s-from-determinant", worst, 1e-6, t0, 1.0, "MP(2), dt = 1e-4");
}

CriterionResult c5(const Options&) {
  const auto t0 = Clock::now();
  const SEvaluator prod = s_product(s_evaluator(mp_measure(2.0)), s_evaluator(mp_measure(3.0)));
  double worst = 0.0;
  for (int k = 1; k <= 19; ++k) {
    const double t = k / 20.0;
    const double f = marginal_exponent(prod, t);
    worst = std::max(worst, std::abs(f - 0.5 * std::log(2.0 - t) - 0.5 * std::log(3.0 - t)));
  }
  return finish(5, "additivity-under-product", worst, 1e-8, t0, 2.0, "MP(2) x MP(3), 19 t");
}

CriterionResult c6(const Options&) {
  const auto t0 = Clock::now();
  struct Case {
    SpectralMeasure mu;
    bool atomless;
  };
  std::vector<Case> cases;
  for (double lambda : {0.5, 1.0, 2.0, 5.0}) cases.push_back({mp_measure(lambda), lambda >= 1.0});
  cases.push_back({discrete_measure({{1.0, 0.3}, {2.0, 0.4}, {5.0, 0.3}}, "three-atom"), true});
  cases.push_back({point_mass(1.0), true});
  double violation = 0.0;
  double top_err = 0.0;
  for (const Case& c : cases) {
    // f runs down to -inf at t = r and is the constant 0 beyond it, so
    // monotonicity is checked on (0, r) and the flat part separately.
    const double r = c.mu.off_kernel_mass();
    double prev = INFINITY;
    for (double t : default_t_grid(r)) {
      const double f = marginal_exponent(c.mu, t);
      if (t > r) {
        violation = std::max(violation, std::abs(f));
        continue;
      }
      violation = std::max(violation, f - prev);
      prev = f;
    }
    if (c.atomless)
      top_err = std::max(top_err, std::abs(marginal_exponent(c.mu, 1e-6) -
                                           0.5 * std::log(moment(c.mu, 1))));
  }
  // Both parts share one pass/fail: the worse relative to its own bound.
  const double measured = std::max(violation / 1e-10, top_err / 1e-6);
  char detail[160];
  std::snprintf(detail, sizeof detail, "max increase %.2e (<= 1e-10), top exponent error %.2e (<= 1e-6)",
                violation, top_err);
  return finish(6, "monotone-and-top-exponent", measured, 1.0, t0, 1.0, detail);
}

CriterionResult c7(const Options&) {
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (double lambda : {1.0, 2.0}) {
    const SpectralMeasure mu = mp_measure(lambda);
    for (int k = 0; k < 50; ++k) {
      const double x = 0.05 + k * (1.6 - 0.05) / 49.0;
      worst = std::max(worst, std::abs(newman_solve(mu, x) - distribution_at(mu, std::log(x))));
    }
  }
  const SpectralMeasure mp1 = mp_measure(1.0);
  double tri = 0.0;
  for (int k = 0; k < 50; ++k) {
    const double x = 0.05 + k * 0.9 / 49.0;
    tri = std::max(tri, std::abs(newman_solve(mp1, x) - x * x));
  }
  return finish(7, "integral-equation-equivalence", std::max(worst, tri), 1e-6, t0, 2.0,
                "MP(1), MP(2) at 50 x in [0.05, 1.6]; MP(1) vs x^2 on [0.05, 0.95]");
}

CriterionResult c8(const Options& opts) {
  const auto t0 = Clock::now();
  rmt::EnsembleConfig c;
  c.N = 256;
  c.steps_n = 200;
  c.seed = opts.seed;
  double worst = 0.0;
  std::string detail;
  auto check = [&](double lambda, double t) {
    c.law = mp_measure(lambda);
    const double g = rmt::projected_growth(c, t).rate;
    const double f = integrated_exponent(c.law, t).value;
    worst = std::max(worst, std::abs(g - f));
    char buf[96];
    std::snprintf(buf, sizeof buf, "%sMP(%g) t=%g: %.4f vs %.4f", detail.empty() ? "" : "; ", lambda,
                  t, g, f);
    detail += buf;
  };
  check(1.0, 0.25);
  check(1.0, 0.5);
  check(2.0, 0.25);
  return finish(8, "mc-projected-growth", worst, 0.02, t0, 60.0, detail);
}

CriterionResult c9(const Options& opts) {
  const auto t0 = Clock::now();
  rmt::EnsembleConfig c;
  c.N = 256;
  c.steps_n = 2000;
  c.trials = 4;
  c.seed = opts.seed;
  c.law = mp_measure(1.0);
  const rmt::McReport r = rmt::run_mc(c);
  // 1-based index N/2 in descending order.
  const double mid = r.empirical_exponents[static_cast<std::size_t>(c.N / 2 - 1)];
  const double mid_err = std::abs(mid - 0.5 * std::log(0.5));
  const double measured = std::max(r.ks_distance / 0.08, mid_err / 0.03);
  char detail[128];
  std::snprintf(detail, sizeof detail, "KS %.4f (<= 0.08), exponent k=N/2 %.4f (target %.4f +- 0.03)",
                r.ks_distance, mid, 0.5 * std::log(0.5));
  return finish(9, "mc-triangle-law", measured, 1.0, t0, 300.0, detail);
}

CriterionResult c10(const Options& opts) {
  const auto t0 = Clock::now();
  rmt::EnsembleConfig c;
  c.N = 512;
  c.trials = 8;
  c.seed = opts.seed;
  c.law = mp_measure(2.0);
  const double t = 0.5;
  const std::vector<double> eig = rmt::compress_spectrum(c, t);
  const SpectralMeasure ref = compressed_mp_measure(t, 2.0);
  auto cond = [&](double x) { return std::clamp((ref.cdf(x) - (1.0 - t)) / t, 0.0, 1.0); };
  auto cond_left = [&](double x) { return std::clamp((ref.cdf_left(x) - (1.0 - t)) / t, 0.0, 1.0); };
  const double ks = rmt::ks_distance_with_left(eig, cond, cond_left);
  const double edge = std::max(std::abs(eig.front() - 0.5), std::abs(eig.back() - 4.5));
  const double measured = std::max(ks / 0.08, edge / 0.1);
  char detail[128];
  std::snprintf(detail, sizeof detail, "KS %.4f (<= 0.08), support [%.3f, %.3f] vs [0.5, 4.5] +- 0.1",
                ks, eig.front(), eig.back());
  return finish(10, "mc-compression", measured, 1.0, t0, 60.0, detail);
}

CriterionResult c11(const Options& opts) {
  const auto t0 = Clock::now();
  rmt::EnsembleConfig c;
  c.N = 500;
  c.seed = opts.seed;
  c.law = mp_measure(0.4);
  const int rank = rmt::projected_rank(c, 0.3);
  const int expected = 150;
  const auto s = seconds_since(t0);
  return {11, "kernel-rank", rank == expected && s < 5.0, static_cast<double>(rank), expected, s, 5.0,
          "rank of X P_t, MP(0.4), N = 500, t = 0.3, must equal 150"};
}

}  // namespace

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {1, "marginal-exponent-closed-form", false, c1},
      {2, "exponent-distribution-piecewise", false, c2},
      {3, "determinant-two-routes", false, c3},
      {4, "s-from-determinant", false, c4},
      {5, "additivity-under-product", false, c5},
      {6, "monotone-and-top-exponent", false, c6},
      {7, "integral-equation-equivalence", false, c7},
      {8, "mc-projected-growth", true, c8},
      {9, "mc-triangle-law", true, c9},
      {10, "mc-compression", true, c10},
      {11, "kernel-rank", true, c11},
  };
  return all;
}

std::vector<CriterionResult> run(const Options& opts,
                                 const std::function<void(const CriterionResult&)>& on_result) {
  std::vector<CriterionResult> out;
  for (const Criterion& c : criteria()) {
    if (!opts.only.empty() && !opts.only.count(c.id)) continue;
    if (opts.skip_mc && c.monte_carlo) continue;
    CriterionResult r;
    try {
      r = c.run(opts);
    } catch (const std::exception& e) {
      r = {c.id, c.name, false, NAN, NAN, 0.0, 0.0, std::string("error: ") + e.what()};
    }
    if (on_result) on_result(r);
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_line(const CriterionResult& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%s C%-2d %-32s measured=%-10.3g threshold=%-8.3g time=%.2fs (limit %gs)  %s",
                r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(), r.measured, r.threshold, r.seconds,
                r.time_limit, r.detail.c_str());
  return buf;
}

}  // namespace freelyap::acceptance
