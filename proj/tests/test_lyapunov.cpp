#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "freelyap/errors.hpp"
#include "freelyap/lyapunov.hpp"
#include "oracles.hpp"

using namespace freelyap;

namespace {

// F for MP(lambda), lambda >= 1: integral over (0, t) of log(lambda - s) / 2.
double mp_F(double lambda, double t) {
  auto xlogx = [](double x) { return x > 0.0 ? x * std::log(x) : 0.0; };
  return 0.5 * (xlogx(lambda) - xlogx(lambda - t) - t);
}

SpectralMeasure random_invertible(oracle::Gen& gen) {
  const int n = gen.integer(1, 5);
  std::vector<Atom> atoms;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    atoms.push_back({gen.uniform(0.2, 1.0) * std::pow(3.0, i), gen.uniform(0.1, 1.0)});
    total += atoms.back().mass;
  }
  for (auto& a : atoms) a.mass /= total;
  return discrete_measure(atoms);
}

}  // namespace

TEST_CASE("marginal exponent of MP is half log(lambda - t)") {
  for (double lambda : {1.0, 2.0, 5.0}) {
    const SpectralMeasure mu = mp_measure(lambda);
    for (double t : {0.01, 0.2, 0.5, 0.8, 0.99}) CHECK(std::abs(marginal_exponent(mu, t) - 0.5 * std::log(lambda - t)) < 1e-10);
  }
  const SpectralMeasure half = mp_measure(0.5);
  CHECK(std::abs(marginal_exponent(half, 0.25) - 0.5 * std::log(0.25)) < 1e-10);
  CHECK(marginal_exponent(half, 0.75) == 0.0);
  CHECK_THROWS_AS(marginal_exponent(half, 0.5), BoundaryError);
  CHECK_THROWS_AS(marginal_exponent(half, 1.5), DomainError);
}

TEST_CASE("integrated exponent of MP against its closed form") {
  for (double lambda : {1.0, 2.0, 5.0})
    for (double t : {0.1, 0.5, 0.9, 1.0}) {
      CAPTURE(lambda);
      CAPTURE(t);
      CHECK(std::abs(integrated_exponent(mp_measure(lambda), t).value - mp_F(lambda, t)) < 1e-9);
    }
}

TEST_CASE("F' = f checked with independent adaptive quadrature") {
  const std::vector<SpectralMeasure> ms = {discrete_measure({{0.5, 0.3}, {2.0, 0.7}}), compressed_mp_measure(0.6, 2.0),
                                           mp_measure(3.0)};
  for (const auto& mu : ms) {
    const double r = mu.off_kernel_mass();
    for (double frac : {0.3, 0.7, 0.95}) {
      const double t = frac * r;
      const double ref = oracle::adaptive_simpson([&](double s) { return marginal_exponent(mu, s); }, 1e-9, t, 1e-10);
      CHECK(std::abs(integrated_exponent(mu, t).value - ref) < 1e-6);
    }
  }
}

TEST_CASE("profile: grid avoids r, F constant beyond r, central differences of F match f") {
  const SpectralMeasure mu = compressed_mp_measure(0.5, 2.0);
  const LyapunovProfile p = lyapunov_profile(mu);
  CHECK(p.rank_r == doctest::Approx(0.5));
  for (double t : p.t_grid) CHECK(std::abs(t - 0.5) > 1e-9);
  for (std::size_t i = 0; i < p.t_grid.size(); ++i) {
    if (p.t_grid[i] > 0.5) {
      CHECK(p.f_values[i] == 0.0);
      CHECK(std::abs(p.F_values[i] - integrated_exponent(mu, 0.5).value) < 1e-10);
    }
  }
  for (double t : {0.1, 0.25, 0.4}) {
    const double h = 1e-4;
    const double d = (integrated_exponent(mu, t + h).value - integrated_exponent(mu, t - h).value) / (2 * h);
    CHECK(std::abs(d - marginal_exponent(mu, t)) < 1e-6);
  }
}

TEST_CASE("exponent distribution of MP(2) is clamp(exp(2x) - 1)") {
  const SpectralMeasure mu = mp_measure(2.0);
  for (double x : {-3.0, -0.2, 0.0, 0.1, 0.3, 0.34, 0.5}) {
    const double ref = std::clamp(std::exp(2 * x) - 1.0, 0.0, 1.0);
    CHECK(std::abs(distribution_at(mu, x) - ref) < 1e-9);
  }
}

TEST_CASE("distribution with an atom at zero jumps by 1 - r at x = 0") {
  const SpectralMeasure mu = mp_measure(0.5);
  CHECK(distribution_at(mu, -1e-12) < 0.5 + 1e-12);
  CHECK(distribution_at(mu, 0.0) >= 0.5);
  const auto grid = default_x_grid(mu);
  const ExponentDistribution d = exponent_distribution(mu, grid);
  CHECK(grid.front() < 0.0);
  CHECK(grid.back() > 0.0);
  for (std::size_t i = 1; i < d.cdf_values.size(); ++i) CHECK(d.cdf_values[i] >= d.cdf_values[i - 1]);
  CHECK(d.cdf_values.back() == doctest::Approx(1.0));
  CHECK(d.cdf_values.front() >= 0.0);
}

TEST_CASE("largest exponent is half the log of the first moment") {
  CHECK(std::abs(largest_exponent(mp_measure(2.0)).value - 0.5 * std::log(2.0)) < 1e-6);
  CHECK(largest_exponent(mp_measure(2.0)).within_hypothesis);
  CHECK_FALSE(largest_exponent(mp_measure(0.5)).within_hypothesis);
}

TEST_CASE("determinant: definition and S-integral agree for MP(2)") {
  const SpectralMeasure mu = mp_measure(2.0);
  const double ref = std::log(2.0) - 0.5;
  const auto a = fk_determinant(mu, DeterminantMethod::definition);
  const auto b = fk_determinant(mu, DeterminantMethod::s_integral);
  CHECK(std::abs(a.log_det - ref) < 1e-10);
  CHECK(std::abs(b.log_det - ref) < 1e-10);
  CHECK(std::abs(a.value() - 1.2130613194252668) < 1e-10);
  CHECK_THROWS_AS(fk_determinant(mp_measure(1.0), DeterminantMethod::s_integral), PreconditionError);
  CHECK(fk_determinant(point_mass(0.0), DeterminantMethod::definition).value() == doctest::Approx(1.0));
}

TEST_CASE("log S recovered from F by central differences") {
  const SpectralMeasure mu = mp_measure(2.0);
  for (double t : {0.1, 0.3, 0.7}) CHECK(std::abs(s_from_determinant(mu, t, 1e-3) + std::log(2.0 - t)) < 1e-6);
}

TEST_CASE("Newman solution against an independent bisection with Simpson integrals") {
  const double lambda = 2.0;
  const SpectralMeasure mu = mp_measure(lambda);
  for (double x : {1.05, 1.2, 1.35}) {
    const double x2 = x * x;
    const double ref = oracle::bisect(
        [&](double h) { return oracle::mp_integral(lambda, [&](double s) { return (s - x2) / (h * x2 + (1 - h) * s); }); },
        1e-12, 1.0);
    CHECK(std::abs(newman_solve(mu, x) - ref) < 1e-6);
    CHECK(std::abs(newman_solve(mu, x) - distribution_at(mu, std::log(x))) < 1e-6);
  }
  CHECK(newman_solve(mu, 2.0) == 1.0);
  CHECK_THROWS_AS(newman_solve(mu, -1.0), DomainError);
}

TEST_CASE("additivity of marginal exponents under products of S-transforms") {
  const SEvaluator a = s_evaluator(mp_measure(2.0));
  const SEvaluator b = s_evaluator(compressed_mp_measure(0.7, 3.0));
  const SEvaluator p = s_product(a, b);
  for (double t : {0.1, 0.4, 0.65})
    CHECK(std::abs(marginal_exponent(p, t) - marginal_exponent(a, t) - marginal_exponent(b, t)) < 1e-12);
  CHECK(marginal_exponent(p, 0.9) == 0.0);
}

TEST_CASE("property: random invertible atomic measures") {
  oracle::Gen gen(3);
  for (int trial = 0; trial < 25; ++trial) {
    const SpectralMeasure mu = random_invertible(gen);
    CAPTURE(trial);
    double prev = INFINITY;
    for (int k = 1; k < 40; ++k) {
      const double f = marginal_exponent(mu, k / 40.0);
      CHECK(f <= prev + 1e-10);
      prev = f;
    }
    CHECK(marginal_exponent(mu, 1e-9) <= largest_exponent(mu).value + 1e-8);
    CHECK(std::abs(largest_exponent(mu).value - 0.5 * std::log(moment(mu, 1))) < 1e-6);
    const double half_log = 0.5 * log_integral(mu).value;
    CHECK(std::abs(integrated_exponent(mu, 1.0).value - half_log) < 1e-8);
    CHECK(std::abs(fk_determinant(mu, DeterminantMethod::s_integral).log_det - half_log) < 1e-8);
    const double x = gen.uniform(marginal_exponent(mu, 0.99), largest_exponent(mu).value);
    const double h = distribution_at(mu, x);
    CHECK(h >= 0.0);
    CHECK(h <= 1.0);
  }
}
