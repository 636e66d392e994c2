#pragma once

#include "steklov/errors.hpp"
#include "steklov/perturbation.hpp"
#include "steklov/radial_model.hpp"

#include <string>
#include <type_traits>
#include <vector>

namespace steklov {

enum class WTRoute { ode, laplace, closed_form };

std::string to_string(WTRoute route);

/// One value of M(-kappa^2).
struct WTEvaluation {
  double kappa = 0.0;
  double value = 0.0;
  WTRoute route = WTRoute::ode;
  double est_error = 0.0;
};

struct OdeOptions {
  double x_max = 12.0;      // raised to 23 / kappa when smaller
  double step = 1.0 / 64;   // initial step, refined further for large kappa
  double tolerance = 1e-10;
  int max_halvings = 10;
};

/// Backward RK4 from X = max(x_max, 23/kappa) with the decaying seed
/// (u, u') = (1, -kappa), halving the step until two successive values of
/// u'(0)/u(0) agree to `tolerance`.
WTEvaluation wt_from_ode(const RadialPotential& Q, double kappa, const OdeOptions& opts = {});

/// u'(0)/u(0) from a single backward RK4 pass with n_steps equal steps on [0, x_end].
double wt_ode_fixed_step(const RadialPotential& Q, double kappa, double x_end, int n_steps);

/// M(-kappa^2) = -kappa - int_0^inf A(alpha) e^{-2 kappa alpha} d alpha. The base part
/// is integrated adaptively, the series part summed in closed form.
WTEvaluation wt_from_amplitude(const Amplitude& A, double kappa);

/// Exact M(-kappa^2) for the analytic bases.
WTEvaluation wt_closed_form(const ClosedForm& base, double kappa);

/// Smallest kappa above which the Laplace integral of the base amplitude converges
/// (kappa1 for bargmann2, 0 otherwise).
double laplace_abscissa(const ClosedForm& base);

/// beta_2 = sup_{y>0} int_y^{y+1} max(Q, 0) dx for an analytic potential.
double beta2(const ClosedForm& base);

/// 2 max{sqrt(2 beta_2), e beta_2}.
double simon_threshold(const ClosedForm& base);

struct SteklovSpectrum {
  int d = 3;
  int K = 0;
  std::vector<double> sigma;
};

namespace detail {
inline double wt_value(double v) { return v; }
inline double wt_value(const WTEvaluation& e) { return e.value; }
}  // namespace detail

/// sigma_k = -(d - 2)/2 - M(-kappa_k^2) for k = 0..K. `evaluator(kappa)` returns a
/// double or a WTEvaluation; failures are rethrown with the offending k.
template <class Evaluator>
SteklovSpectrum steklov_spectrum(Evaluator&& evaluator, const SpectralParams& params, int K) {
  if (K < 0) throw ValidationError("weyl_titchmarsh", "K must be >= 0");
  SteklovSpectrum s;
  s.d = params.d;
  s.K = K;
  s.sigma.reserve(K + 1);
  for (int k = 0; k <= K; ++k) {
    const double kappa = params.kappa_at(k);
    try {
      const double M = detail::wt_value(evaluator(kappa));
      s.sigma.push_back(-0.5 * (params.d - 2) - M);
    } catch (const ValidationError& e) {
      throw ValidationError("weyl_titchmarsh", "at k=" + std::to_string(k) + ": " + e.what());
    } catch (const NumericalError& e) {
      throw NumericalError("weyl_titchmarsh", "at k=" + std::to_string(k) + ": " + e.what());
    }
  }
  return s;
}

struct DNGap {
  double eps = 0.0;  // max_{k<=K} |sigma_k - sigma~_k|
  int argmax = 0;
  double tail_bound = 0.0;
  bool certified = true;  // tail_bound < 0.01 eps (or both vanish)
};

DNGap dn_gap(const SteklovSpectrum& sigma, const SteklovSpectrum& sigma_tilde, double tail_bound);

/// Bound on sup_{k>K} |sigma_k - sigma~_k| for the series part of A:
/// sum |c_n| / (2 kappa_{K+1}) + 2 sum_{n<N_neg} |c_n mu_n| / (4 kappa_{K+1}^2 - mu_n^2).
double spectral_tail_bound(const Amplitude& A, int K);

/// psi(0, kappa) for the analytic bases; throws at the pole kappa = -beta or -kappa1.
double jost_closed_form(const ClosedForm& base, double kappa);

/// Real roots of psi(0, .) located by bracketing on [lo, hi] (toms748).
std::vector<double> jost_roots(const ClosedForm& base, double lo, double hi);

}  // namespace steklov
