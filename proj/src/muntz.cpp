#include "steklov/muntz.hpp"

#include <cmath>
#include <limits>

namespace steklov {

unsigned ScopedPrecision::digits10_for_bits(unsigned bits) {
  return static_cast<unsigned>(std::ceil(bits * std::log10(2.0)));
}

ScopedPrecision::ScopedPrecision(unsigned bits) : saved_digits10_(mp_real::default_precision()) {
  if (bits < 53) throw ValidationError("muntz", "precision must be at least 53 bits");
  mp_real::default_precision(digits10_for_bits(bits));
}

ScopedPrecision::~ScopedPrecision() { mp_real::default_precision(saved_digits10_); }

namespace {

double log_g(double t, double M0) {
  const double b = 4.5 * M0;
  return std::log(1.5) - 0.5 * std::log(b * b - 1.0) + 0.5 * std::log(2.0 * t + 1.0) + (t + 1.0) * std::log(b);
}

}  // namespace

double g_function(double t, double M0) {
  if (!(t >= 0.0)) throw ValidationError("muntz", "g needs t >= 0");
  if (!(M0 >= 2.0)) throw ValidationError("muntz", "M0 must be >= 2");
  return std::exp(log_g(t, M0));
}

NOfEps n_of_eps(double eps, double M0) {
  if (!(eps > 0.0)) throw ValidationError("muntz", "eps must be positive");
  if (!(M0 >= 2.0)) throw ValidationError("muntz", "M0 must be >= 2");
  const double target = -0.5 * std::log(eps);  // log(1 / sqrt(eps))
  NOfEps out;
  if (log_g(0.0, M0) > target) {
    out.flagged = true;
    return out;
  }
  double lo = 0.0, hi = 1.0;
  while (log_g(hi, M0) < target) hi *= 2.0;
  while (hi - lo > 1e-12 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    (log_g(mid, M0) < target ? lo : hi) = mid;
  }
  out.t_exact = lo;
  out.n = static_cast<int>(std::floor(lo));
  return out;
}

double still_bound(double eps, double R, const SpectralParams& params, double B) {
  if (!(eps >= 0.0)) throw ValidationError("muntz", "eps must be >= 0");
  if (!(R > 1.0)) throw ValidationError("muntz", "R must exceed 1");
  if (!(B > 0.0)) throw ValidationError("muntz", "B must be positive");
  if (eps == 0.0) return 0.0;
  double out = B * B * eps;
  if (std::isfinite(R)) {
    const double expo = std::log(R) / std::log(params.growth_base());
    out += std::pow(R, 1.0 - params.d - params.delta) * std::pow(eps, expo);
  }
  return out;
}

}  // namespace steklov
