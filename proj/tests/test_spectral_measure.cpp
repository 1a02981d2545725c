#include <doctest.h>

#include <cmath>

#include "freelyap/errors.hpp"
#include "freelyap/spectral_measure.hpp"
#include "oracles.hpp"

using namespace freelyap;

TEST_CASE("MP measures have unit mass and free Poisson moments") {
  for (double lambda : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0}) {
    CAPTURE(lambda);
    const SpectralMeasure mu = mp_measure(lambda);
    CHECK(std::abs(mu.total_mass() - 1.0) < 1e-10);
    CHECK(std::abs(moment(mu, 1) - lambda) < 1e-8);
    CHECK(std::abs(moment(mu, 2) - (lambda * lambda + lambda)) < 1e-7);
    CHECK(std::abs(moment(mu, 3) - (lambda * lambda * lambda + 3 * lambda * lambda + lambda)) < 1e-7);
  }
}

TEST_CASE("MP atom and support") {
  const SpectralMeasure mp2 = mp_measure(2.0);
  CHECK(mp2.atoms().empty());
  REQUIRE(mp2.segments().size() == 1);
  CHECK(mp2.segments()[0].a() == doctest::Approx(3.0 - 2.0 * std::sqrt(2.0)).epsilon(1e-14));
  CHECK(mp2.segments()[0].b() == doctest::Approx(3.0 + 2.0 * std::sqrt(2.0)).epsilon(1e-14));
  const SpectralMeasure mp05 = mp_measure(0.5);
  REQUIRE(mp05.atoms().size() == 1);
  CHECK(mp05.atoms()[0].x == 0.0);
  CHECK(mp05.atoms()[0].mass == doctest::Approx(0.5));
  CHECK(mp05.off_kernel_mass() == doctest::Approx(0.5));
  CHECK_FALSE(mp05.invertible());
  CHECK(mp2.invertible());
  CHECK_FALSE(mp_measure(1.0).invertible());
}

TEST_CASE("density agrees with the closed-form MP density") {
  for (double lambda : {0.5, 1.0, 2.0, 5.0}) {
    const SpectralMeasure mu = mp_measure(lambda);
    const auto& seg = mu.segments()[0];
    for (int i = 1; i < 50; ++i) {
      const double x = seg.a() + (seg.b() - seg.a()) * i / 50.0;
      CHECK(std::abs(seg.density(x) - oracle::mp_density(lambda, x)) < 1e-9 * (1 + oracle::mp_density(lambda, x)));
    }
  }
}

TEST_CASE("cdf matches an independent Simpson integration and quantile inverts it") {
  const double lambda = 2.0;
  const SpectralMeasure mu = mp_measure(lambda);
  for (double x : {0.3, 1.0, 2.0, 3.5, 5.5}) {
    const double ref = oracle::mp_integral(lambda, [x](double s) { return s <= x ? 1.0 : 0.0; }, 400000);
    CHECK(std::abs(mu.cdf(x) - ref) < 1e-5);
  }
  for (double p : {1e-6, 0.01, 0.25, 0.5, 0.9, 0.999999}) CHECK(std::abs(mu.cdf(mu.quantile(p)) - p) < 1e-10);
  const SpectralMeasure mp05 = mp_measure(0.5);
  CHECK(mp05.quantile(0.3) == 0.0);
  CHECK(mp05.quantile(0.75) > 0.0);
  CHECK(std::abs(mp05.cdf(mp05.quantile(0.75)) - 0.75) < 1e-10);
}

TEST_CASE("compression with t = 1 reproduces the MP law") {
  for (double lambda : {0.5, 2.0}) {
    const SpectralMeasure a = compressed_mp_measure(1.0, lambda);
    const SpectralMeasure b = mp_measure(lambda);
    REQUIRE(a.atoms().size() == b.atoms().size());
    CHECK(std::abs(a.segments()[0].a() - b.segments()[0].a()) < 1e-12);
    CHECK(std::abs(a.segments()[0].b() - b.segments()[0].b()) < 1e-12);
    for (int i = 1; i <= 50; ++i) {
      const double x = b.segments()[0].a() + (b.segments()[0].b() - b.segments()[0].a()) * i / 51.0;
      CHECK(std::abs(a.segments()[0].density(x) - b.segments()[0].density(x)) < 1e-9);
    }
  }
}

TEST_CASE("compressed MP support and atom") {
  const SpectralMeasure c = compressed_mp_measure(0.5, 2.0);
  REQUIRE(c.segments().size() == 1);
  CHECK(c.segments()[0].a() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(c.segments()[0].b() == doctest::Approx(4.5).epsilon(1e-12));
  CHECK(c.mass_at_zero() == doctest::Approx(0.5));
  CHECK(compressed_mp_measure(0.3, 0.4).mass_at_zero() == doctest::Approx(0.7));
  CHECK(compressed_mp_measure(0.7, 0.4).mass_at_zero() == doctest::Approx(0.6));
  CHECK(std::abs(compressed_mp_measure(0.4, 0.4).total_mass() - 1.0) < 1e-10);
  CHECK_THROWS_AS(compressed_mp_measure(0.0, 1.0), DomainError);
}

TEST_CASE("invalid measures are rejected") {
  CHECK_THROWS_AS(discrete_measure({{-1.0, 1.0}}), InvalidMeasure);
  CHECK_THROWS_AS(discrete_measure({{1.0, 0.5}}), InvalidMeasure);
  CHECK_THROWS_AS(discrete_measure({{1.0, 0.5}, {1.0, 0.5}}), InvalidMeasure);
  CHECK_THROWS_AS(discrete_measure({{NAN, 1.0}}), InvalidMeasure);
  CHECK_THROWS_AS(discrete_measure({}), InvalidMeasure);
  CHECK_THROWS_AS(ContinuousSegment(1.0, 0.5, 0.5, 0.5, {1.0, 1.0, 1.0}), InvalidMeasure);
  CHECK_THROWS_AS(ContinuousSegment(0.0, 1.0, -1.5, 0.5, {1.0, 1.0, 1.0}), InvalidMeasure);
  CHECK_THROWS_AS(mp_measure(-1.0), DomainError);
  CHECK_THROWS_AS(mp_measure(0.0), DomainError);
}

TEST_CASE("log-integral values") {
  CHECK(std::abs(log_integral(mp_measure(1.0)).value + 1.0) < 1e-10);
  CHECK(std::abs(log_integral(mp_measure(2.0)).value - (2.0 * std::log(2.0) - 1.0)) < 1e-10);
  // Nonzero part of MP(0.5) is 0.5 times MP(2) scaled by 0.5.
  const double ref = 0.5 * (std::log(0.5) + 2.0 * std::log(2.0) - 1.0);
  CHECK(std::abs(log_integral(mp_measure(0.5)).value - ref) < 1e-10);
  CHECK(log_integral(point_mass(0.0)).value == 0.0);
  CHECK(std::abs(log_integral(discrete_measure({{4.0, 0.5}, {0.0, 0.5}})).value - 0.5 * std::log(4.0)) < 1e-15);
}

TEST_CASE("log-integral partials are non-increasing and stable under refinement") {
  for (double lambda : {0.5, 1.0, 3.0}) {
    const LogIntegral li = log_integral(mp_measure(lambda));
    for (std::size_t i = 1; i < li.partials.size(); ++i) CHECK(li.partials[i] <= li.partials[i - 1] + 1e-14);
    const LogIntegral fine = log_integral(mp_measure(lambda, 2 * kDefaultNodeCount + 1));
    CHECK(std::abs(fine.value - li.value) < 1e-9);
    CHECK(std::abs(moment(mp_measure(lambda, 2 * kDefaultNodeCount + 1), 2) - moment(mp_measure(lambda), 2)) < 1e-9);
  }
}

TEST_CASE("property: random discrete measures have consistent cdf, quantile and moments") {
  oracle::Gen gen(5);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = gen.integer(1, 6);
    std::vector<Atom> atoms;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      atoms.push_back({gen.uniform(0.0, 10.0) + i * 10.0, gen.uniform(0.1, 1.0)});
      total += atoms.back().mass;
    }
    for (auto& a : atoms) a.mass /= total;
    const SpectralMeasure mu = discrete_measure(atoms);
    double m1 = 0.0;
    for (const auto& a : atoms) m1 += a.x * a.mass;
    CHECK(std::abs(moment(mu, 1) - m1) < 1e-12 * (1 + m1));
    double prev = -1.0;
    for (int k = 0; k <= 60; ++k) {
      const double c = mu.cdf(k);
      CHECK(c >= prev);
      prev = c;
    }
    double qprev = -1.0;
    for (int k = 1; k < 20; ++k) {
      const double q = mu.quantile(k / 20.0);
      CHECK(q >= qprev);
      CHECK(mu.cdf(q) >= k / 20.0 - 1e-12);
      qprev = q;
    }
  }
}
