#include "mcs/channel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mcs/errors.hpp"

namespace mcs {

const char* to_string(Blocklength mode) {
  return mode == Blocklength::finite ? "finite" : "infinite";
}

double dbm_to_watts(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }

void ChannelParams::validate() const {
  if (!(b0_hz > 0.0) || !std::isfinite(b0_hz)) throw ValidationError("b0 must be positive");
  if (!(slot_s > 0.0) || !std::isfinite(slot_s)) throw ValidationError("t must be positive");
  if (n_max < 1) throw ValidationError("n_max must be at least 1");
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw ValidationError("sigma2 must be positive");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in (0, 1)");
}

LinkState make_link(const ChannelParams& params, double gain_mag_sq, double tx_power_w,
                    int n_units) {
  if (!(gain_mag_sq >= 0.0) || !std::isfinite(gain_mag_sq))
    throw ValidationError("channel gain must be finite and non-negative");
  if (!(tx_power_w > 0.0)) throw ValidationError("transmit power must be positive");
  if (n_units < 1) throw ValidationError("a link needs at least one bandwidth unit");
  LinkState link;
  link.gain_mag_sq = gain_mag_sq;
  link.tx_power_w = tx_power_w;
  link.n_units = n_units;
  link.normalized_gain = gain_mag_sq / (params.b0_hz * params.sigma2);
  return link;
}

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

namespace {

// Acklam's rational approximation of the standard normal quantile, relative
// error about 1.15e-9 before refinement.
double normal_quantile_approx(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  const double q = std::sqrt(-2.0 * std::log1p(-p));
  return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

// Q^-1 for eps in (0, 0.5]; the root is non-negative there, where erfc keeps
// full relative precision in the tail.
double upper_tail_inverse(double eps) {
  double x = -normal_quantile_approx(eps);
  // Bracket: Q(0) = 0.5 >= eps, Q(40) underflows below any representable eps.
  double lo = 0.0;
  double hi = 40.0;
  for (int iter = 0; iter < 100; ++iter) {
    const double f = q_function(x) - eps;
    if (f == 0.0) break;
    if (f > 0.0)
      lo = x;
    else
      hi = x;
    const double density = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    double next;
    if (density > 0.0) {
      // Halley step on Q(x) - eps.
      const double u = f / density;
      next = x + u / (1.0 - 0.5 * x * u);
    } else {
      next = 0.5 * (lo + hi);
    }
    // A converged Newton-type step may land on the bracket edge itself.
    if (std::abs(next - x) <= 1e-15 * (1.0 + std::abs(x))) {
      x = next;
      break;
    }
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    x = next;
  }
  return x;
}

}  // namespace

double inverse_q(double eps) {
  if (!(eps > 0.0 && eps < 1.0))
    throw DomainError("inverse_q: argument must lie in (0, 1), got " + std::to_string(eps));
  if (eps == 0.5) return 0.0;
  if (eps < 0.5) return upper_tail_inverse(eps);
  return -upper_tail_inverse(1.0 - eps);
}

double channel_dispersion(const LinkState& link) {
  const double snr = link.snr_per_unit();
  const double root = 1.0 + snr;
  return 1.0 - 1.0 / (root * root);
}

double transmission_rate(const ChannelParams& params, const LinkState& link) {
  if (link.n_units < 1) throw ValidationError("a link needs at least one bandwidth unit");
  const double uses = params.channel_uses(link.n_units);
  const double capacity = std::log2(1.0 + link.snr_per_unit());
  if (params.mode == Blocklength::infinite) return uses * capacity;

  const double penalty = std::sqrt(channel_dispersion(link) / uses) * inverse_q(params.epsilon) /
                         std::numbers::ln2;
  const double rate = uses * (capacity - penalty);
  return rate > 0.0 ? rate : 0.0;
}

double sample_rayleigh_gain(Rng& rng, double distance_m, double path_loss_exp) {
  if (!(distance_m > 0.0) || !std::isfinite(distance_m))
    throw ValidationError("distance must be positive");
  std::exponential_distribution<double> fading(1.0);
  return fading(rng) * std::pow(distance_m, -path_loss_exp);
}

}  // namespace mcs
