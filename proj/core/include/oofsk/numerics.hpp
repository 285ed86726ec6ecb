#ifndef OOFSK_NUMERICS_HPP
#define OOFSK_NUMERICS_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "oofsk/estimate.hpp"

namespace oofsk::numerics {

/// Raised when a Monte Carlo integrand produces a non-finite sample.
class EstimationError : public std::runtime_error {
 public:
  EstimationError(const std::string& what, std::uint64_t sample_index)
      : std::runtime_error(what), sample_index_(sample_index) {}
  std::uint64_t sample_index() const { return sample_index_; }

 private:
  std::uint64_t sample_index_;
};

// ---------------------------------------------------------------------------
// log I0
// ---------------------------------------------------------------------------

/// log of the modified Bessel function I0(x) for x >= 0, evaluated without
/// overflow (I0(700) alone would exceed double range). Power series below
/// x = 20, asymptotic expansion above; both branches are accurate to better
/// than 1e-12 relative at the crossover.
double log_bessel_i0(double x);

// ---------------------------------------------------------------------------
// Gaussian quadrature
// ---------------------------------------------------------------------------

enum class QuadKind { kGaussLaguerre, kGaussHermite };

/// Nodes/weights of an n-point Gaussian rule. Laguerre integrates
/// \int_0^inf e^{-x} g(x) dx, Hermite \int e^{-x^2} g(x) dx; the weight
/// function is folded into `weights`.
struct QuadratureRule {
  QuadKind kind;
  int order;
  std::vector<double> nodes;
  std::vector<double> weights;

  double integrate(const std::function<double(double)>& g) const {
    double acc = 0.0;
    for (int i = 0; i < order; ++i) acc += weights[i] * g(nodes[i]);
    return acc;
  }
};

/// Gauss-Laguerre rule, exact for polynomials of degree <= 2*order-1
/// against e^{-x} on [0, inf). order must lie in [1, 256].
QuadratureRule gauss_laguerre(int order);

/// Gauss-Hermite rule against e^{-x^2} on (-inf, inf). order in [1, 256].
QuadratureRule gauss_hermite(int order);

// ---------------------------------------------------------------------------
// Seeded Monte Carlo
// ---------------------------------------------------------------------------

struct McConfig {
  std::uint64_t sample_count = 1'000'000;
  std::uint64_t seed = 0x5eed;
  std::uint64_t batch_size = 4096;
};

/// Counter-based per-sample random stream: every sample index gets its own
/// statistically independent generator, so results do not depend on how
/// samples are scheduled across threads.
class SampleStream {
 public:
  SampleStream(std::uint64_t seed, std::uint64_t index, std::uint64_t salt = 0);

  std::uint64_t next_u64();
  /// Uniform on (0, 1].
  double next_uniform();
  /// Standard normal (Box-Muller; draws come in pairs internally).
  double next_normal();
  /// Exp(1).
  double next_exp();

 private:
  std::uint64_t state_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

struct Exp1Vector { int m = 1; };
struct RicianMagnitude { double d_mag = 0.0; double gamma_sq = 1.0; };
/// R = |sqrt(lambda) + sqrt(scale) w|^2 with w ~ CN(0,1); mean scale+lambda.
struct NoncentralChiSq { double lambda = 0.0; double scale = 1.0; };

using Sampler = std::variant<Exp1Vector, RicianMagnitude, NoncentralChiSq>;

/// Mean and standard error of integrand(x) with x drawn from `sampler`.
/// Deterministic for a given (seed, sample_count) and independent of the
/// thread schedule. Scalar samplers present a 1-element span.
Estimate mc_expectation(const Sampler& sampler,
                        const std::function<double(std::span<const double>)>& integrand,
                        const McConfig& cfg);

/// Mean/standard error of sample(stream_k) over per-index streams k in
/// [0, cfg.sample_count). The building block under mc_expectation, exposed
/// for estimators that need joint draws. `salt` separates independent
/// estimators sharing one seed.
Estimate mc_sample_mean(const McConfig& cfg, std::uint64_t salt,
                        const std::function<double(SampleStream&)>& sample);

/// Runs fn(chunk_index) over [0, n_chunks) on a small thread pool capped by
/// the OOFSK_THREADS environment variable. fn must only write to
/// chunk-indexed slots.
void parallel_for_chunks(std::uint64_t n_chunks,
                         const std::function<void(std::uint64_t)>& fn);

// ---------------------------------------------------------------------------
// Finite differences
// ---------------------------------------------------------------------------

enum class StencilSide { kCentral, kForward };

/// Finite-difference derivative of order 1 or 2 at x0 with step h.
/// kForward uses one-sided stencils on [x0, x0+4h] (for derivatives at a
/// domain boundary such as SNR = 0); both variants are O(h^2) accurate.
double central_difference(const std::function<double(double)>& f, double x0,
                          double h, int order,
                          StencilSide side = StencilSide::kCentral);

}  // namespace oofsk::numerics

#endif  // OOFSK_NUMERICS_HPP
