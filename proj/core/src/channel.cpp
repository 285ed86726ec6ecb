#include "oofsk/channel.hpp"

#include <algorithm>
#include <cmath>

namespace oofsk::channel {

namespace {

void check_nonneg(double v, const char* name) {
  if (!std::isfinite(v) || v < 0.0)
    throw std::domain_error(std::string(name) + " must be finite and >= 0");
}

}  // namespace

double log_f_perfect(double r_i, double h_mag, const SignalingConfig& cfg) {
  check_nonneg(r_i, "r_i");
  check_nonneg(h_mag, "h_mag");
  const double lam = cfg.alpha_sq() * h_mag * h_mag;
  if (lam == 0.0) return 0.0;
  return -lam + numerics::log_bessel_i0(2.0 * std::sqrt(lam * r_i));
}

double log_f_imperfect(double r_i, const ChannelParams& ch, const SignalingConfig& cfg) {
  check_nonneg(r_i, "r_i");
  const double a2 = cfg.alpha_sq();
  if (a2 == 0.0) return 0.0;
  const double s = ch.gamma_sq * a2 + 1.0;
  return -std::log(s) + a2 * (ch.gamma_sq * r_i - ch.d_mag_sq) / s +
         numerics::log_bessel_i0(2.0 * std::sqrt(a2 * ch.d_mag_sq * r_i) / s);
}

double log_mixture_density(std::span<const double> per_tone_log_f, double nu) {
  const std::size_t m = per_tone_log_f.size();
  if (m == 0) throw std::invalid_argument("log_mixture_density: empty tone list");
  // log-sum-exp over the M on-tone terms, then fold in the (1-nu) mass.
  double peak = per_tone_log_f[0];
  for (double v : per_tone_log_f) peak = std::max(peak, v);
  double acc = 0.0;
  for (double v : per_tone_log_f) acc += std::exp(v - peak);
  const double log_on = std::log(nu / static_cast<double>(m)) + peak + std::log(acc);
  if (nu >= 1.0) return log_on;
  const double log_off = std::log1p(-nu);
  const double hi = std::max(log_on, log_off);
  return hi + std::log(std::exp(log_on - hi) + std::exp(log_off - hi));
}

EnergyVector sample_output_given_input(int x, double h_mag_sq,
                                       const ChannelParams& ch,
                                       const SignalingConfig& cfg, CsiMode mode,
                                       numerics::SampleStream& rng) {
  if (x < 0 || x > cfg.m)
    throw std::invalid_argument("sample_output_given_input: x must lie in {0..M}");
  EnergyVector r(static_cast<std::size_t>(cfg.m));
  for (auto& v : r) v = rng.next_exp();
  if (x >= 1) {
    const double a2 = cfg.alpha_sq();
    double lambda, scale;
    if (mode == CsiMode::kPerfect) {
      lambda = a2 * h_mag_sq;
      scale = 1.0;
    } else {
      scale = ch.gamma_sq * a2 + 1.0;
      lambda = a2 * ch.d_mag_sq / scale;
    }
    const double mean = std::sqrt(lambda);
    const double sig = std::sqrt(0.5);
    const double re = mean + sig * rng.next_normal();
    const double im = sig * rng.next_normal();
    r[static_cast<std::size_t>(x - 1)] = scale * (re * re + im * im);
  }
  return r;
}

}  // namespace oofsk::channel
