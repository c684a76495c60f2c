#pragma once

#include <random>

namespace mcs {

using Rng = std::mt19937_64;

enum class Blocklength { finite, infinite };

const char* to_string(Blocklength mode);

double dbm_to_watts(double dbm);

// Radio constants shared by every link of an instance.
struct ChannelParams {
  double b0_hz = 180e3;         // bandwidth of one unit
  double slot_s = 1e-3;         // transmission slot T
  int n_max = 64;               // bandwidth units in the coherence band
  double sigma2 = 3.981071705534972e-21;  // noise PSD, W/Hz (-174 dBm/Hz)
  double epsilon = 1e-3;        // target decoding error probability
  Blocklength mode = Blocklength::finite;

  // Throws ValidationError / DomainError.
  void validate() const;

  double coherence_bandwidth_hz() const { return n_max * b0_hz; }
  // Channel uses available to a link holding n units: L = n * B0 * T.
  double channel_uses(int n_units) const { return n_units * b0_hz * slot_s; }
};

struct LinkState {
  double gain_mag_sq = 0.0;  // |h|^2
  double tx_power_w = 0.0;
  int n_units = 1;
  double normalized_gain = 0.0;  // |h|^2 / (B0 sigma^2)

  // SNR per bandwidth unit, P g / n.
  double snr_per_unit() const { return tx_power_w * normalized_gain / n_units; }
};

// Builds a link and fills in the normalized gain from the params.
LinkState make_link(const ChannelParams& params, double gain_mag_sq, double tx_power_w,
                    int n_units);

// Gaussian tail probability Q(x).
double q_function(double x);

// x with Q(x) = eps. Throws DomainError unless 0 < eps < 1.
double inverse_q(double eps);

// U = 1 - (1 + P g / n)^-2.
double channel_dispersion(const LinkState& link);

// Bits delivered per slot over the link, clamped at zero. Finite mode applies
// the normal-approximation penalty; infinite mode is plain Shannon capacity.
double transmission_rate(const ChannelParams& params, const LinkState& link);

// Rayleigh power gain with power-law path loss: Exp(1) * d^-eta.
double sample_rayleigh_gain(Rng& rng, double distance_m, double path_loss_exp);

}  // namespace mcs
