#include "freelyap/rmt.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "freelyap/errors.hpp"

namespace freelyap::rmt {

namespace {

constexpr double kRankTol = 1e-10;
constexpr double kKsSlack = 1e-9;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

Matrix gaussian(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Matrix g(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) g(i, j) = nd(rng);
  return g;
}

// Haar-distributed orthonormal N x k frame.
Matrix haar_frame(int n, int k, Rng& rng) {
  Eigen::HouseholderQR<Matrix> qr(gaussian(n, k, rng));
  Matrix q = qr.householderQ() * Matrix::Identity(n, k);
  const Matrix& r = qr.matrixQR();
  for (int j = 0; j < k; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

struct QrStep {
  Matrix q;                  // orthonormal basis for the surviving columns
  std::vector<double> logs;  // log |R_ii| of the surviving columns
};

// Thin QR of m. Trailing columns with vanishing R_ii (kernel directions) are
// dropped; a generic frame puts them last.
QrStep orthonormalize(const Matrix& m) {
  const int k = static_cast<int>(m.cols());
  Eigen::HouseholderQR<Matrix> qr(m);
  const Matrix& r = qr.matrixQR();
  double scale = 0.0;
  for (int i = 0; i < k; ++i) scale = std::max(scale, std::abs(r(i, i)));
  int keep = 0;
  while (keep < k && std::abs(r(keep, keep)) > kRankTol * scale) ++keep;
  QrStep out;
  out.q = qr.householderQ() * Matrix::Identity(m.rows(), keep);
  out.logs.resize(static_cast<std::size_t>(keep));
  for (int i = 0; i < keep; ++i) out.logs[static_cast<std::size_t>(i)] = std::log(std::abs(r(i, i)));
  return out;
}

}  // namespace

void EnsembleConfig::validate() const {
  if (N < 2) throw DomainError("N must be at least 2");
  if (steps_n < 1) throw DomainError("steps_n must be positive");
  if (trials < 1) throw DomainError("trials must be positive");
  for (double t : t_list)
    if (!(t > 0.0 && t <= 1.0)) throw DomainError("t_list entries must lie in (0, 1]");
}

Rng trial_rng(std::uint64_t seed, std::uint64_t trial) {
  const std::uint64_t s = splitmix64(splitmix64(seed) ^ (trial + 1) * 0xD1B54A32D192ED03ull);
  return Rng(s);
}

std::vector<double> squared_singular_values(const EnsembleConfig& config, Rng& rng) {
  std::vector<double> q(static_cast<std::size_t>(config.N));
  if (config.mode == SingularMode::quantile) {
    for (int i = 0; i < config.N; ++i)
      q[static_cast<std::size_t>(i)] = config.law.quantile((i + 0.5) / config.N);
  } else {
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    for (double& v : q) {
      double p = ud(rng);
      while (p <= 0.0) p = ud(rng);
      v = config.law.quantile(p);
    }
  }
  std::sort(q.begin(), q.end(), std::greater<>());
  return q;
}

Matrix haar_orthogonal(int n, Rng& rng) { return haar_frame(n, n, rng); }

namespace {

Eigen::VectorXd sqrt_values(const std::vector<double>& q) {
  Eigen::VectorXd d(static_cast<Eigen::Index>(q.size()));
  for (std::size_t j = 0; j < q.size(); ++j) d(static_cast<Eigen::Index>(j)) = std::sqrt(q[j]);
  return d;
}

// Applies fresh factors X = U D to frames. Quantile-mode singular values are
// computed once; U is applied as its Householder sequence without forming it.
class FactorSource {
 public:
  FactorSource(const EnsembleConfig& config, const Eigen::VectorXd& fixed)
      : config_(config), fixed_(fixed) {}

  Matrix apply(const Matrix& m, Rng& rng) const {
    const Eigen::VectorXd d = config_.mode == SingularMode::quantile
                                  ? fixed_
                                  : sqrt_values(squared_singular_values(config_, rng));
    Eigen::HouseholderQR<Matrix> qr(gaussian(config_.N, config_.N, rng));
    Matrix dm = d.asDiagonal() * m;
    const Matrix& r = qr.matrixQR();
    for (int i = 0; i < config_.N; ++i)
      if (r(i, i) < 0.0) dm.row(i) = -dm.row(i);
    return qr.householderQ() * dm;
  }

 private:
  const EnsembleConfig& config_;
  const Eigen::VectorXd& fixed_;
};

Eigen::VectorXd fixed_values(const EnsembleConfig& config) {
  if (config.mode != SingularMode::quantile) return {};
  Rng unused(0);
  return sqrt_values(squared_singular_values(config, unused));
}

}  // namespace

Matrix sample_factor(const EnsembleConfig& config, Rng& rng) {
  const Eigen::VectorXd fixed = fixed_values(config);
  return FactorSource(config, fixed).apply(Matrix::Identity(config.N, config.N), rng);
}

std::vector<double> lyapunov_spectrum_qr(const EnsembleConfig& config,
                                         std::vector<double>* stderr_out) {
  config.validate();
  const auto n = static_cast<std::size_t>(config.N);
  std::vector<double> mean(n, 0.0);
  std::vector<double> sq(n, 0.0);
  const Eigen::VectorXd fixed = fixed_values(config);
  const FactorSource source(config, fixed);
  for (int trial = 0; trial < config.trials; ++trial) {
    Rng rng = trial_rng(config.seed, static_cast<std::uint64_t>(trial));
    Matrix q = haar_orthogonal(config.N, rng);
    std::vector<double> acc(n, 0.0);
    for (int step = 0; step < config.steps_n; ++step) {
      QrStep s = orthonormalize(source.apply(q, rng));
      q = std::move(s.q);
      for (std::size_t i = 0; i < s.logs.size(); ++i) acc[i] += s.logs[i];
    }
    // Columns that fell into the kernel carry no finite exponent; by the
    // analytic convention they count as 0.
    const auto alive = static_cast<std::size_t>(q.cols());
    std::vector<double> ex(n, 0.0);
    for (std::size_t i = 0; i < alive; ++i) ex[i] = acc[i] / config.steps_n;
    std::sort(ex.begin(), ex.end(), std::greater<>());
    for (std::size_t i = 0; i < n; ++i) {
      mean[i] += ex[i];
      sq[i] += ex[i] * ex[i];
    }
  }
  const double tr = config.trials;
  for (std::size_t i = 0; i < n; ++i) {
    mean[i] /= tr;
    sq[i] = config.trials > 1
                ? std::sqrt(std::max(0.0, sq[i] / tr - mean[i] * mean[i]) / (tr - 1.0))
                : 0.0;
  }
  if (stderr_out) *stderr_out = sq;
  return mean;
}

GrowthResult projected_growth(const EnsembleConfig& config, double t) {
  config.validate();
  const int k = static_cast<int>(std::floor(t * config.N));
  if (k < 1) throw DomainError("t N must be at least 1");
  double total = 0.0;
  int rank = k;
  const Eigen::VectorXd fixed = fixed_values(config);
  const FactorSource source(config, fixed);
  for (int trial = 0; trial < config.trials; ++trial) {
    Rng rng = trial_rng(config.seed, static_cast<std::uint64_t>(trial));
    Matrix q = haar_frame(config.N, k, rng);
    double acc = 0.0;
    for (int step = 0; step < config.steps_n; ++step) {
      QrStep s = orthonormalize(source.apply(q, rng));
      if (step == 0 && trial == 0) rank = static_cast<int>(s.logs.size());
      q = std::move(s.q);
      acc += std::accumulate(s.logs.begin(), s.logs.end(), 0.0);
    }
    total += acc / (static_cast<double>(config.steps_n) * config.N);
  }
  return {total / config.trials, rank};
}

std::vector<double> compress_spectrum(const EnsembleConfig& config, double t) {
  config.validate();
  const int k = static_cast<int>(std::floor(t * config.N));
  if (k < 2) throw DomainError("t N must be at least 2");
  std::vector<double> pooled;
  pooled.reserve(static_cast<std::size_t>(k) * static_cast<std::size_t>(config.trials));
  std::vector<double> fixed;
  if (config.mode == SingularMode::quantile) {
    Rng unused(0);
    fixed = squared_singular_values(config, unused);
  }
  for (int trial = 0; trial < config.trials; ++trial) {
    Rng rng = trial_rng(config.seed, static_cast<std::uint64_t>(trial));
    const std::vector<double> q =
        config.mode == SingularMode::quantile ? fixed : squared_singular_values(config, rng);
    // The top-left k x k block of V diag(q) V^T is W^T diag(q) W for the
    // first k rows of V transposed, a Haar N x k frame.
    const Matrix w = haar_frame(config.N, k, rng);
    const Eigen::Map<const Eigen::VectorXd> qv(q.data(), config.N);
    const Matrix b = w.transpose() * qv.asDiagonal() * w;
    Eigen::SelfAdjointEigenSolver<Matrix> es(b, Eigen::EigenvaluesOnly);
    for (int i = 0; i < k; ++i) pooled.push_back(es.eigenvalues()(i));
  }
  std::sort(pooled.begin(), pooled.end());
  return pooled;
}

int projected_rank(const EnsembleConfig& config, double t) {
  config.validate();
  const int k = static_cast<int>(std::floor(t * config.N));
  if (k < 1) throw DomainError("t N must be at least 1");
  Rng rng = trial_rng(config.seed, 0);
  const Matrix x = sample_factor(config, rng);
  const Matrix p = haar_frame(config.N, k, rng);
  Eigen::BDCSVD<Matrix> svd(x * p);
  const auto& s = svd.singularValues();
  const double tol = s(0) * config.N * std::numeric_limits<double>::epsilon() * 10.0;
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > tol) ++rank;
  return rank;
}

double ks_distance_with_left(const std::vector<double>& sorted,
                             const std::function<double(double)>& cdf,
                             const std::function<double(double)>& cdf_left) {
  const std::size_t n = sorted.size();
  if (n == 0) throw DomainError("KS distance needs a non-empty sample");
  const double nd = static_cast<double>(n);
  double d = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && sorted[j + 1] == sorted[i]) ++j;
    // Reference atoms are matched within a relative 1e-9 so that samples
    // carrying round-off at a jump still count as sitting on it.
    const double x = sorted[i];
    const double eps = kKsSlack * std::max(1.0, std::abs(x));
    d = std::max(d, static_cast<double>(j + 1) / nd - cdf(x + eps));
    d = std::max(d, cdf_left(x - eps) - static_cast<double>(i) / nd);
    i = j + 1;
  }
  return std::min(d, 1.0);
}

McReport run_mc(const EnsembleConfig& config, bool with_spectrum) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  McReport report;
  if (with_spectrum) {
    report.empirical_exponents = lyapunov_spectrum_qr(config, &report.exponent_stderr);
    std::vector<double> asc(report.empirical_exponents.rbegin(), report.empirical_exponents.rend());
    report.ks_distance = ks_distance_with_left(
        asc, [&](double x) { return distribution_at(config.law, x); },
        [&](double x) {
          return distribution_at(config.law, std::nextafter(x, -std::numeric_limits<double>::infinity()));
        });
  }
  for (double t : config.t_list) {
    report.growth_rates[t] = projected_growth(config, t).rate;
    if (config.mp_lambda && t < 1.0) {
      const SpectralMeasure c = compressed_mp_measure(t, *config.mp_lambda);
      const std::vector<double> eig = compress_spectrum(config, t);
      auto cond = [&](double x) { return std::clamp((c.cdf(x) - (1.0 - t)) / t, 0.0, 1.0); };
      auto cond_left = [&](double x) { return std::clamp((c.cdf_left(x) - (1.0 - t)) / t, 0.0, 1.0); };
      report.compression_ks[t] = ks_distance_with_left(eig, cond, cond_left);
    }
  }
  report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace freelyap::rmt
