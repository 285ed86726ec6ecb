#ifndef OOFSK_CHANNEL_HPP
#define OOFSK_CHANNEL_HPP

#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "oofsk/numerics.hpp"

namespace oofsk::channel {

/// Rician fading description: h ~ CN(d, gamma^2). Only |d|^2 matters
/// anywhere, so the specular mean is stored as a power. gamma_sq = 0 is the
/// unfaded Gaussian channel.
struct ChannelParams {
  double d_mag_sq = 0.0;
  double gamma_sq = 1.0;

  ChannelParams() = default;
  ChannelParams(double d2, double g2) : d_mag_sq(d2), gamma_sq(g2) {
    if (d_mag_sq < 0 || gamma_sq < 0 || !(d_mag_sq + gamma_sq > 0))
      throw std::invalid_argument("ChannelParams: need d_mag_sq, gamma_sq >= 0 and not both zero");
  }

  /// K = |d|^2 / gamma^2; +inf for the unfaded channel.
  double rician_k() const {
    return gamma_sq > 0 ? d_mag_sq / gamma_sq
                        : std::numeric_limits<double>::infinity();
  }
  /// Normalized so E{|h|^2} = 1.
  static ChannelParams from_rician_k(double k) {
    if (!(k >= 0)) throw std::invalid_argument("rician K must be >= 0");
    if (std::isinf(k)) return ChannelParams(1.0, 0.0);
    return ChannelParams(k / (1.0 + k), 1.0 / (1.0 + k));
  }

  double mean_sq() const { return gamma_sq + d_mag_sq; }       // E{|h|^2}
  double fourth_moment() const {                               // E{|h|^4}
    return 2.0 * gamma_sq * gamma_sq + 4.0 * gamma_sq * d_mag_sq + d_mag_sq * d_mag_sq;
  }
  /// kappa(|h|) = E{|h|^4} / (E{|h|^2})^2.
  double kurtosis_mag() const {
    const double m2 = mean_sq();
    return fourth_moment() / (m2 * m2);
  }
};

/// On-Off M-ary signaling: silence with probability 1-nu, one of m tones
/// (amplitude sqrt(SNR/nu)) with probability nu.
struct SignalingConfig {
  int m = 2;
  double nu = 1.0;
  double snr = 0.0;  // linear, per symbol

  SignalingConfig() = default;
  SignalingConfig(int m_, double nu_, double snr_) : m(m_), nu(nu_), snr(snr_) {
    if (m < 1) throw std::invalid_argument("SignalingConfig: m must be >= 1");
    if (!(nu > 0.0) || nu > 1.0)
      throw std::invalid_argument("SignalingConfig: nu must lie in (0, 1]");
    if (!(snr >= 0.0)) throw std::invalid_argument("SignalingConfig: snr must be >= 0");
  }

  double alpha_sq() const { return snr / nu; }  // on-symbol (peak) SNR
  double par() const { return 1.0 / nu; }
};

enum class RegimeKind { kFixedPar, kFixedPeak };

/// Low-SNR regime selector: fixed duty factor (PAR = 1/nu held) or fixed
/// normalized peak power eta = A*T/N0 (then nu = SNR/eta per point).
struct PeakConstraint {
  RegimeKind kind = RegimeKind::kFixedPar;
  double eta = 0.0;

  static PeakConstraint fixed_par() { return {RegimeKind::kFixedPar, 0.0}; }
  static PeakConstraint fixed_peak(double eta) {
    if (!(eta > 0)) throw std::invalid_argument("PeakConstraint: eta must be > 0");
    return {RegimeKind::kFixedPeak, eta};
  }
};

using EnergyVector = std::vector<double>;

/// log f(R_i, |h|, SNR) = -(SNR/nu)|h|^2 + log I0(2 sqrt((SNR/nu)|h|^2 R_i)),
/// the on/off density ratio with the fading magnitude known.
double log_f_perfect(double r_i, double h_mag, const SignalingConfig& cfg);

/// log f(R_i, SNR) for unknown Rician fading:
///   -log(g2 a2 + 1) + a2 (g2 R_i - |d|^2)/(g2 a2 + 1)
///   + log I0(2 sqrt(a2 |d|^2 R_i) / (g2 a2 + 1)),   a2 = SNR/nu.
double log_f_imperfect(double r_i, const ChannelParams& ch, const SignalingConfig& cfg);

/// log[(1-nu) + (nu/M) sum_i exp(per_tone_log_f[i])] via log-sum-exp.
/// This is log(p_R / p_{R|X=0}); the common e^{-sum R_j} factor is excluded
/// because it cancels in every capacity integrand.
double log_mixture_density(std::span<const double> per_tone_log_f, double nu);

enum class CsiMode { kPerfect, kImperfect };

/// One energy vector drawn from p_{R|X=x}: off tones Exp(1); the on tone is
/// noncentral chi-square — unit scale with noncentrality a2 |h|^2 when the
/// fading realization is given (perfect), scale g2 a2 + 1 with noncentrality
/// a2 |d|^2 / (g2 a2 + 1) when only statistics are known (imperfect).
EnergyVector sample_output_given_input(int x, double h_mag_sq,
                                       const ChannelParams& ch,
                                       const SignalingConfig& cfg, CsiMode mode,
                                       numerics::SampleStream& rng);

}  // namespace oofsk::channel

#endif  // OOFSK_CHANNEL_HPP
