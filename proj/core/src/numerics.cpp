#include "oofsk/numerics.hpp"

#include <Eigen/Eigenvalues>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace oofsk::numerics {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Branch crossover for log_bessel_i0; both expansions reach <1e-12 relative
// error here.
constexpr double kBesselCrossover = 20.0;

}  // namespace

double log_bessel_i0(double x) {
  if (!(x >= 0.0) || !std::isfinite(x))
    throw std::domain_error("log_bessel_i0: argument must be finite and >= 0, got " +
                            std::to_string(x));
  if (x == 0.0) return 0.0;
  if (x < kBesselCrossover) {
    // I0(x) - 1 = sum_{k>=1} (x^2/4)^k / (k!)^2, summed until it stops moving.
    const double q = 0.25 * x * x;
    double term = q;
    double tail = q;
    for (int k = 2; k <= 80; ++k) {
      term *= q / (static_cast<double>(k) * k);
      tail += term;
      if (term < 1e-17 * (1.0 + tail)) break;
    }
    return std::log1p(tail);
  }
  // I0(x) ~ e^x / sqrt(2 pi x) * sum_k a_k x^{-k},  a_k = ((2k-1)!!)^2/(k! 8^k).
  // The series is asymptotic; stop at the smallest term (error ~ e^{-2x}).
  double sum = 1.0;
  double term = 1.0;
  double prev = 1e300;
  for (int k = 1; k <= 40; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= odd * odd / (8.0 * k * x);
    if (term >= prev) break;
    sum += term;
    prev = term;
    if (term < 1e-18 * sum) break;
  }
  return x - 0.5 * std::log(kTwoPi * x) + std::log(sum);
}

// ---------------------------------------------------------------------------
// Quadrature via Golub-Welsch: eigen-decomposition of the Jacobi matrix of
// the orthogonal polynomial recurrence; weights are mu0 * (first eigenvector
// component)^2.
// ---------------------------------------------------------------------------

namespace {

QuadratureRule golub_welsch(QuadKind kind, int order,
                            const std::vector<double>& diag,
                            const std::vector<double>& offdiag, double mu0) {
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
  for (int i = 0; i < order; ++i) jacobi(i, i) = diag[i];
  for (int i = 0; i + 1 < order; ++i) {
    jacobi(i, i + 1) = offdiag[i];
    jacobi(i + 1, i) = offdiag[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  QuadratureRule rule{kind, order, {}, {}};
  rule.nodes.resize(order);
  rule.weights.resize(order);
  for (int i = 0; i < order; ++i) {
    rule.nodes[i] = solver.eigenvalues()(i);
    const double v0 = solver.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v0 * v0;
  }
  return rule;  // eigenvalues come out sorted ascending
}

void check_order(int order) {
  if (order < 1 || order > 256)
    throw std::invalid_argument("quadrature order must lie in [1, 256], got " +
                                std::to_string(order));
}

}  // namespace

QuadratureRule gauss_laguerre(int order) {
  check_order(order);
  std::vector<double> diag(order), off(order > 1 ? order - 1 : 0);
  for (int k = 0; k < order; ++k) diag[k] = 2.0 * k + 1.0;
  for (int k = 1; k < order; ++k) off[k - 1] = static_cast<double>(k);
  return golub_welsch(QuadKind::kGaussLaguerre, order, diag, off, 1.0);
}

QuadratureRule gauss_hermite(int order) {
  check_order(order);
  std::vector<double> diag(order, 0.0), off(order > 1 ? order - 1 : 0);
  for (int k = 1; k < order; ++k) off[k - 1] = std::sqrt(0.5 * k);
  return golub_welsch(QuadKind::kGaussHermite, order, diag, off,
                      std::sqrt(3.14159265358979323846));
}

// ---------------------------------------------------------------------------
// Monte Carlo
// ---------------------------------------------------------------------------

namespace {

inline std::uint64_t splitmix64(std::uint64_t& s) {
  std::uint64_t z = (s += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

SampleStream::SampleStream(std::uint64_t seed, std::uint64_t index, std::uint64_t salt) {
  // Mix (seed, salt, index) into one well-spread 64-bit state.
  std::uint64_t s = seed;
  std::uint64_t a = splitmix64(s);
  s = a ^ (salt * 0xD1B54A32D192ED03ull + 0x8BB84B93962EACC9ull);
  a = splitmix64(s);
  s = a ^ (index * 0x2545F4914F6CDD1Dull + 1ull);
  state_ = splitmix64(s);
  if (state_ == 0) state_ = 0x9E3779B97F4A7C15ull;
}

std::uint64_t SampleStream::next_u64() { return splitmix64(state_); }

double SampleStream::next_uniform() {
  // 53-bit mantissa, shifted away from 0 so log() is safe.
  return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
}

double SampleStream::next_normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  const double u1 = next_uniform();
  const double u2 = next_uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  cached_normal_ = r * std::sin(kTwoPi * u2);
  has_cached_normal_ = true;
  return r * std::cos(kTwoPi * u2);
}

double SampleStream::next_exp() { return -std::log(next_uniform()); }

void parallel_for_chunks(std::uint64_t n_chunks,
                         const std::function<void(std::uint64_t)>& fn) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("OOFSK_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1 && static_cast<unsigned long>(cap) < hw) hw = static_cast<unsigned>(cap);
  }
  const unsigned n_workers =
      static_cast<unsigned>(std::min<std::uint64_t>(hw, n_chunks));
  if (n_workers <= 1) {
    for (std::uint64_t c = 0; c < n_chunks; ++c) fn(c);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (;;) {
      const std::uint64_t c = next.fetch_add(1);
      if (c >= n_chunks || failed.load(std::memory_order_relaxed)) return;
      try {
        fn(c);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (unsigned i = 0; i < n_workers; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

Estimate mc_sample_mean(const McConfig& cfg, std::uint64_t salt,
                        const std::function<double(SampleStream&)>& sample) {
  if (cfg.sample_count < 1)
    throw std::invalid_argument("mc_sample_mean: sample_count must be >= 1");
  const std::uint64_t n = cfg.sample_count;
  const std::uint64_t batch = std::max<std::uint64_t>(1, cfg.batch_size);
  const std::uint64_t n_chunks = (n + batch - 1) / batch;
  struct ChunkMoments {
    double sum = 0.0;
    double sum_sq = 0.0;
  };
  std::vector<ChunkMoments> partials(n_chunks);
  std::atomic<std::uint64_t> bad_index{~0ull};

  parallel_for_chunks(n_chunks, [&](std::uint64_t c) {
    ChunkMoments m;
    const std::uint64_t lo = c * batch;
    const std::uint64_t hi = std::min(n, lo + batch);
    for (std::uint64_t k = lo; k < hi; ++k) {
      SampleStream stream(cfg.seed, k, salt);
      const double v = sample(stream);
      if (!std::isfinite(v)) {
        std::uint64_t expected = ~0ull;
        bad_index.compare_exchange_strong(expected, k);
        return;
      }
      m.sum += v;
      m.sum_sq += v * v;
    }
    partials[c] = m;
  });

  if (bad_index.load() != ~0ull)
    throw EstimationError("non-finite integrand sample at index " +
                              std::to_string(bad_index.load()),
                          bad_index.load());

  // Reduce in chunk order so the result is schedule-independent.
  double sum = 0.0, sum_sq = 0.0;
  for (const auto& m : partials) {
    sum += m.sum;
    sum_sq += m.sum_sq;
  }
  const double mean = sum / static_cast<double>(n);
  double var = sum_sq / static_cast<double>(n) - mean * mean;
  if (var < 0.0) var = 0.0;
  const double se = n > 1 ? std::sqrt(var / static_cast<double>(n)) : 0.0;
  return Estimate::mc(mean, se);
}

Estimate mc_expectation(const Sampler& sampler,
                        const std::function<double(std::span<const double>)>& integrand,
                        const McConfig& cfg) {
  auto scalar_mc = [&](auto draw) {
    return mc_sample_mean(cfg, 0, [&](SampleStream& g) {
      const double x = draw(g);
      return integrand(std::span<const double>(&x, 1));
    });
  };
  return std::visit(
      [&](const auto& s) -> Estimate {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Exp1Vector>) {
          if (s.m < 1) throw std::invalid_argument("Exp1Vector: m must be >= 1");
          return mc_sample_mean(cfg, 0, [&](SampleStream& g) {
            thread_local std::vector<double> x;
            x.resize(static_cast<std::size_t>(s.m));
            for (auto& v : x) v = g.next_exp();
            return integrand(std::span<const double>(x));
          });
        } else if constexpr (std::is_same_v<T, RicianMagnitude>) {
          if (s.gamma_sq < 0 || s.d_mag < 0)
            throw std::invalid_argument("RicianMagnitude: parameters must be >= 0");
          const double sigma = std::sqrt(0.5 * s.gamma_sq);
          return scalar_mc([d = s.d_mag, sigma](SampleStream& g) {
            const double re = d + sigma * g.next_normal();
            const double im = sigma * g.next_normal();
            return std::sqrt(re * re + im * im);
          });
        } else {
          static_assert(std::is_same_v<T, NoncentralChiSq>);
          if (s.lambda < 0 || s.scale <= 0)
            throw std::invalid_argument("NoncentralChiSq: lambda >= 0 and scale > 0 required");
          const double mean = std::sqrt(s.lambda);
          const double sigma = std::sqrt(0.5 * s.scale);
          return scalar_mc([mean, sigma](SampleStream& g) {
            const double re = mean + sigma * g.next_normal();
            const double im = sigma * g.next_normal();
            return re * re + im * im;
          });
        }
      },
      sampler);
}

// ---------------------------------------------------------------------------
// Finite differences
// ---------------------------------------------------------------------------

double central_difference(const std::function<double(double)>& f, double x0,
                          double h, int order, StencilSide side) {
  if (!(h > 0.0)) throw std::invalid_argument("central_difference: h must be > 0");
  if (order != 1 && order != 2)
    throw std::invalid_argument("central_difference: order must be 1 or 2");
  auto eval = [&](double x) {
    const double v = f(x);
    if (!std::isfinite(v))
      throw EstimationError("central_difference: non-finite f(" + std::to_string(x) + ")", 0);
    return v;
  };
  if (side == StencilSide::kCentral) {
    if (order == 1) return (eval(x0 + h) - eval(x0 - h)) / (2.0 * h);
    return (eval(x0 + h) - 2.0 * eval(x0) + eval(x0 - h)) / (h * h);
  }
  if (order == 1)
    return (-3.0 * eval(x0) + 4.0 * eval(x0 + h) - eval(x0 + 2.0 * h)) / (2.0 * h);
  return (2.0 * eval(x0) - 5.0 * eval(x0 + h) + 4.0 * eval(x0 + 2.0 * h) -
          eval(x0 + 3.0 * h)) /
         (h * h);
}

}  // namespace oofsk::numerics
