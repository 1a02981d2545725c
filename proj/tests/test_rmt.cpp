#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "freelyap/errors.hpp"
#include "freelyap/rmt.hpp"
#include "oracles.hpp"

using namespace freelyap;
using namespace freelyap::rmt;

namespace {

EnsembleConfig small(SpectralMeasure law, int N = 32, int n = 20) {
  EnsembleConfig c;
  c.N = N;
  c.steps_n = n;
  c.trials = 1;
  c.seed = 7;
  c.law = std::move(law);
  return c;
}

}  // namespace

TEST_CASE("Haar samples are orthogonal with determinant of modulus one") {
  Rng rng = trial_rng(1, 0);
  for (int n : {1, 5, 40}) {
    const Matrix q = haar_orthogonal(n, rng);
    CHECK((q.transpose() * q - Matrix::Identity(n, n)).norm() < 1e-12 * n);
    CHECK(std::abs(std::abs(q.determinant()) - 1.0) < 1e-10);
  }
}

TEST_CASE("trial streams depend only on seed and trial") {
  Rng a = trial_rng(42, 3), b = trial_rng(42, 3), c = trial_rng(42, 4), d = trial_rng(43, 3);
  const auto x = a();
  CHECK(x == b());
  CHECK(x != c());
  CHECK(x != d());
}

TEST_CASE("quantile singular values follow the law and are sorted") {
  EnsembleConfig c = small(mp_measure(0.4), 100);
  Rng rng = trial_rng(0, 0);
  const auto q = squared_singular_values(c, rng);
  REQUIRE(q.size() == 100);
  CHECK(std::is_sorted(q.rbegin(), q.rend()));
  CHECK(std::count(q.begin(), q.end(), 0.0) == 60);
  c.mode = SingularMode::iid;
  const auto qi = squared_singular_values(c, rng);
  CHECK(std::is_sorted(qi.rbegin(), qi.rend()));
}

TEST_CASE("scaled isometry has every exponent equal to log c") {
  const double c = 1.7;
  const auto ex = lyapunov_spectrum_qr(small(point_mass(c * c), 16, 30));
  REQUIRE(ex.size() == 16);
  for (double e : ex) CHECK(std::abs(e - std::log(c)) < 1e-12);
}

TEST_CASE("scaling the law shifts the exponents by half the log of the scale") {
  EnsembleConfig a = small(discrete_measure({{1.0, 0.5}, {4.0, 0.5}}), 16, 40);
  EnsembleConfig b = small(discrete_measure({{3.0, 0.5}, {12.0, 0.5}}), 16, 40);
  const auto ea = lyapunov_spectrum_qr(a);
  const auto eb = lyapunov_spectrum_qr(b);
  for (std::size_t i = 0; i < ea.size(); ++i) CHECK(std::abs(eb[i] - ea[i] - 0.5 * std::log(3.0)) < 1e-10);
}

TEST_CASE("kernel directions get exponent zero and the rank matches") {
  EnsembleConfig c = small(discrete_measure({{0.0, 0.5}, {2.0, 0.5}}), 20, 10);
  const auto ex = lyapunov_spectrum_qr(c);
  CHECK(std::count(ex.begin(), ex.end(), 0.0) >= 10);
  CHECK(projected_rank(c, 1.0) == 10);
  CHECK(projected_rank(c, 0.3) == 6);
}

TEST_CASE("runs are deterministic for a fixed seed") {
  EnsembleConfig c = small(mp_measure(2.0), 24, 15);
  c.trials = 2;
  std::vector<double> s1, s2;
  CHECK(lyapunov_spectrum_qr(c, &s1) == lyapunov_spectrum_qr(c, &s2));
  CHECK(s1 == s2);
  EnsembleConfig d = c;
  d.seed = 8;
  CHECK(lyapunov_spectrum_qr(c) != lyapunov_spectrum_qr(d));
}

TEST_CASE("compression at t = 1 returns the factor spectrum") {
  EnsembleConfig c = small(mp_measure(2.0), 40);
  Rng rng = trial_rng(c.seed, 0);
  auto q = squared_singular_values(c, rng);
  std::sort(q.begin(), q.end());
  const auto e = compress_spectrum(c, 1.0);
  REQUIRE(e.size() == q.size());
  for (std::size_t i = 0; i < q.size(); ++i) CHECK(std::abs(e[i] - q[i]) < 1e-10);
}

TEST_CASE("compressions of MP(0.4) have the full-space kernel fraction of the free law") {
  EnsembleConfig c = small(mp_measure(0.4), 200);
  c.trials = 3;
  for (double t : {0.3, 0.7}) {
    const auto e = compress_spectrum(c, t);
    const double k = std::floor(t * c.N);
    const double zeros = static_cast<double>(std::count_if(e.begin(), e.end(), [](double v) { return v < 1e-8; })) / c.trials;
    // Complement of the block plus kernel vectors inside it.
    const double fraction = (c.N - k + zeros) / c.N;
    CHECK(std::abs(fraction - compressed_mp_measure(t, 0.4).mass_at_zero()) < 1e-12);
  }
  CHECK(compressed_mp_measure(0.3, 0.4).mass_at_zero() == doctest::Approx(0.7));
}

TEST_CASE("KS distance examples") {
  auto uniform = [](double x) { return std::clamp(x, 0.0, 1.0); };
  CHECK(ks_distance({0.5}, uniform) == doctest::Approx(0.5));
  CHECK(ks_distance({0.25, 0.75}, uniform) == doctest::Approx(0.25));
  const SpectralMeasure delta = point_mass(1.0);
  auto cdf = [&](double x) { return delta.cdf(x); };
  auto left = [&](double x) { return delta.cdf_left(x); };
  CHECK(ks_distance_with_left({1.0, 1.0, 1.0}, cdf, left) == 0.0);
  CHECK(ks_distance_with_left({1.0 + 1e-14, 1.0 - 1e-14}, cdf, left) == 0.0);
  CHECK(ks_distance_with_left({0.5, 1.0}, cdf, left) == doctest::Approx(0.5));
}

TEST_CASE("growth rates of the projected product match F") {
  EnsembleConfig c = small(mp_measure(2.0), 64, 60);
  for (double t : {0.25, 0.5, 1.0}) {
    const auto g = projected_growth(c, t);
    CHECK(std::abs(g.rate - integrated_exponent(c.law, t).value) < 0.01);
  }
}

TEST_CASE("exponent spectrum converges toward the triangle law as N grows") {
  auto err = [](int N) {
    EnsembleConfig c = small(mp_measure(1.0), N, 60);
    const auto ex = lyapunov_spectrum_qr(c);
    double worst = 0.0;
    for (int k = N / 8; k < N - N / 8; ++k)
      worst = std::max(worst, std::abs(ex[static_cast<std::size_t>(k)] - marginal_exponent(c.law, (k + 0.5) / N)));
    return worst;
  };
  const double e64 = err(64);
  const double e256 = err(256);
  CHECK(e256 < e64);
  CHECK(e256 < 0.05);
}

TEST_CASE("config validation") {
  EnsembleConfig c;
  c.N = 0;
  CHECK_THROWS_AS(c.validate(), DomainError);
  c.N = 4;
  c.t_list = {1.5};
  CHECK_THROWS_AS(c.validate(), DomainError);
  c.t_list = {0.5};
  CHECK_NOTHROW(c.validate());
}
