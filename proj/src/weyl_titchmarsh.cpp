#include "steklov/weyl_titchmarsh.hpp"

#include "steklov/numerics.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace steklov {

std::string to_string(WTRoute route) {
  switch (route) {
    case WTRoute::ode: return "ode";
    case WTRoute::laplace: return "laplace";
    case WTRoute::closed_form: return "closed_form";
  }
  return "unknown";
}

namespace {

// Backward RK4 along a decreasing mesh ending at 0, seed (1, -kappa) at mesh[0].
double integrate_mesh(const RadialPotential& Q, double kappa, const std::vector<double>& mesh) {
  const double k2 = kappa * kappa;
  double u = 1.0, v = -kappa;
  double q0 = Q(mesh.front());
  for (std::size_t i = 0; i + 1 < mesh.size(); ++i) {
    const double x = mesh[i];
    const double h = mesh[i + 1] - x;
    const double qh = Q(x + 0.5 * h);
    const double q1 = Q(mesh[i + 1]);
    const double a0 = q0 + k2, ah = qh + k2, a1 = q1 + k2;
    // y' = (v, a u)
    const double ku1 = v, kv1 = a0 * u;
    const double ku2 = v + 0.5 * h * kv1, kv2 = ah * (u + 0.5 * h * ku1);
    const double ku3 = v + 0.5 * h * kv2, kv3 = ah * (u + 0.5 * h * ku2);
    const double ku4 = v + h * kv3, kv4 = a1 * (u + h * ku3);
    u += h / 6.0 * (ku1 + 2.0 * ku2 + 2.0 * ku3 + ku4);
    v += h / 6.0 * (kv1 + 2.0 * kv2 + 2.0 * kv3 + kv4);
    q0 = q1;
    if (!std::isfinite(u) || !std::isfinite(v)) {
      throw NumericalError("weyl_titchmarsh", "solution overflowed during backward integration");
    }
    const double mag = std::max(std::abs(u), std::abs(v));
    if (mag > 1e150) {
      u /= mag;
      v /= mag;
    }
  }
  const double ref = std::max(std::abs(v) / std::max(kappa, 1.0), 1e-300);
  if (std::abs(u) < 1e-12 * ref) {
    throw NumericalError("weyl_titchmarsh", "u(0) vanishes at kappa=" + std::to_string(kappa) +
                                                "; -kappa^2 sits at a Dirichlet eigenvalue");
  }
  return v / u;
}

// Breakpoints are 0, X and, for sampled potentials, every grid node below X (the
// interpolant is smooth only between nodes). Each gap is cut into pieces <= step.
std::vector<double> ode_mesh(const RadialPotential& Q, double X, double step) {
  std::vector<double> brk{0.0};
  if (!Q.closed_form()) {
    for (Eigen::Index i = 1; i < Q.grid().size() && Q.grid()[i] < X; ++i) brk.push_back(Q.grid()[i]);
  }
  brk.push_back(X);
  std::vector<double> mesh;
  for (std::size_t b = brk.size() - 1; b > 0; --b) {
    const double hi = brk[b], lo = brk[b - 1];
    const int pieces = std::max(1, static_cast<int>(std::ceil((hi - lo) / step - 1e-9)));
    for (int j = 0; j < pieces; ++j) mesh.push_back(hi - (hi - lo) * j / pieces);
  }
  mesh.push_back(0.0);
  return mesh;
}

}  // namespace

double wt_ode_fixed_step(const RadialPotential& Q, double kappa, double x_end, int n_steps) {
  if (n_steps < 1) throw ValidationError("weyl_titchmarsh", "need at least one step");
  std::vector<double> mesh(n_steps + 1);
  for (int i = 0; i <= n_steps; ++i) mesh[i] = x_end * (n_steps - i) / n_steps;
  return integrate_mesh(Q, kappa, mesh);
}

WTEvaluation wt_from_ode(const RadialPotential& Q, double kappa, const OdeOptions& opts) {
  if (!(kappa > 0.0)) throw ValidationError("weyl_titchmarsh", "kappa must be positive");
  if (!(opts.step > 0.0) || !(opts.tolerance > 0.0) || !(opts.x_max > 0.0)) {
    throw ValidationError("weyl_titchmarsh", "ODE options need positive x_max, step and tolerance");
  }
  const double X = std::max(opts.x_max, 23.0 / kappa);
  double step = std::min(opts.step, 0.25 / kappa);
  double prev = integrate_mesh(Q, kappa, ode_mesh(Q, X, step));
  for (int i = 0; i < opts.max_halvings; ++i) {
    step *= 0.5;
    const double cur = integrate_mesh(Q, kappa, ode_mesh(Q, X, step));
    const double diff = std::abs(cur - prev);
    if (diff <= opts.tolerance) return {kappa, cur, WTRoute::ode, diff / 15.0};
    prev = cur;
  }
  throw NumericalError("weyl_titchmarsh", "step halving did not reach the tolerance at kappa=" +
                                              std::to_string(kappa));
}

double laplace_abscissa(const ClosedForm& base) {
  return base.kind == ClosedFormKind::bargmann2 ? base.second : 0.0;
}

WTEvaluation wt_from_amplitude(const Amplitude& A, double kappa) {
  if (!(kappa > 0.0)) throw ValidationError("weyl_titchmarsh", "kappa must be positive");
  const auto& base = A.base();
  if (kappa <= laplace_abscissa(base)) {
    throw ValidationError("weyl_titchmarsh", "kappa=" + std::to_string(kappa) +
                                                 " is below the convergence abscissa of the base amplitude");
  }
  if (!std::isfinite(A.abs_coefficient_sum())) {
    throw ValidationError("weyl_titchmarsh", "series coefficients are not absolutely summable");
  }
  const auto& params = A.params();
  const double four_k2 = 4.0 * kappa * kappa;
  double series = 0.0;
  for (int k = 0; k < A.term_count(); ++k) {
    const double c = A.coefficient(k);
    if (c == 0.0) continue;
    const double mu = params.mu_at(k);
    const double m = std::abs(mu);
    if (mu < 0.0) {
      if (std::abs(four_k2 - mu * mu) < 1e-8) {
        throw ValidationError("weyl_titchmarsh", "kappa=" + std::to_string(kappa) + " sits on the pole of term " +
                                                     std::to_string(k));
      }
      if (2.0 * kappa < m) {
        throw ValidationError("weyl_titchmarsh", "2 kappa must exceed |mu_" + std::to_string(k) +
                                                     "| for the Laplace integral to converge");
      }
      series += -2.0 * c * m / (four_k2 - mu * mu);
    }
    series += -c / (2.0 * kappa + m);
  }

  double base_part = 0.0;
  double err = 0.0;
  if (base.kind != ClosedFormKind::zero) {
    // decay rate of |A(alpha)| e^{-2 kappa alpha} and its size at alpha = 0
    double rate = 0.0, scale = 0.0;
    if (base.kind == ClosedFormKind::bargmann1) {
      rate = 2.0 * (kappa + base.second);
      scale = 2.0 * std::abs(base.second * base.second - base.first * base.first);
    } else {
      rate = 2.0 * (kappa - base.second);
      scale = base.first / base.second;
    }
    const double alpha_max = std::log(std::max(scale, 1.0) * 1e16) / rate;
    auto f = [&](double a) { return A.base_value(a) * std::exp(-2.0 * kappa * a); };
    base_part = adaptive_integrate(f, 0.0, alpha_max, 1e-13);
    err = 1e-13 * std::max(1.0, std::abs(base_part));
  }
  return {kappa, -kappa - base_part + series, WTRoute::laplace, err};
}

WTEvaluation wt_closed_form(const ClosedForm& base, double kappa) {
  double M = -kappa;
  switch (base.kind) {
    case ClosedFormKind::bargmann1: {
      const double b = base.first, g = base.second;
      M -= (g * g - b * b) / (kappa + g);
      break;
    }
    case ClosedFormKind::bargmann2: {
      const double c1 = base.first, k1 = base.second;
      if (std::abs(kappa - k1) < 1e-14 * std::max(1.0, k1)) {
        throw ValidationError("weyl_titchmarsh", "kappa equals the bound-state parameter kappa1");
      }
      M += c1 / (kappa * kappa - k1 * k1);
      break;
    }
    case ClosedFormKind::external:
      throw ValidationError("weyl_titchmarsh", "no closed form for an external potential");
    default:
      break;
  }
  return {kappa, M, WTRoute::closed_form, 0.0};
}

double beta2(const ClosedForm& base) {
  validate(base);
  if (base.kind == ClosedFormKind::zero || base.kind == ClosedFormKind::bargmann1) return 0.0;  // Q <= 0
  if (base.kind == ClosedFormKind::external) {
    throw ValidationError("weyl_titchmarsh", "beta_2 needs an analytic potential");
  }
  const double y_hi = 40.0 / base.second;
  auto Q = [&](double x) { return closed_form_potential(base, x); };
  // split points: sign changes of Q, so every piece of a window is smooth
  std::vector<double> zeros;
  const int n_scan = 8000;
  const double x_end = y_hi + 1.0;
  for (int i = 0; i < n_scan; ++i) {
    const double a = x_end * i / n_scan, b = x_end * (i + 1) / n_scan;
    const double fa = Q(a), fb = Q(b);
    if (fa * fb < 0.0) {
      std::uintmax_t iters = 200;
      const auto r = boost::math::tools::toms748_solve(Q, a, b, fa, fb,
                                                       boost::math::tools::eps_tolerance<double>(52), iters);
      zeros.push_back(0.5 * (r.first + r.second));
    }
  }
  auto window = [&](double y) {
    std::vector<double> cuts{y};
    for (double z : zeros) {
      if (z > y && z < y + 1.0) cuts.push_back(z);
    }
    cuts.push_back(y + 1.0);
    double total = 0.0;
    for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
      if (Q(0.5 * (cuts[j] + cuts[j + 1])) > 0.0) total += adaptive_integrate(Q, cuts[j], cuts[j + 1], 1e-13);
    }
    return total;
  };
  const int n = 400;
  double best_y = 0.0, best = window(0.0);
  for (int i = 1; i <= n; ++i) {
    const double y = y_hi * i / n;
    const double v = window(y);
    if (v > best) {
      best = v;
      best_y = y;
    }
  }
  const double dy = y_hi / n;
  const auto r = boost::math::tools::brent_find_minima([&](double y) { return -window(y); },
                                                      std::max(0.0, best_y - dy), best_y + dy, 40);
  return std::max(best, -r.second);
}

double simon_threshold(const ClosedForm& base) {
  const double b = beta2(base);
  return 2.0 * std::max(std::sqrt(2.0 * b), std::numbers::e * b);
}

DNGap dn_gap(const SteklovSpectrum& sigma, const SteklovSpectrum& sigma_tilde, double tail_bound) {
  if (sigma.d != sigma_tilde.d) throw ValidationError("weyl_titchmarsh", "spectra have different dimensions");
  if (sigma.K != sigma_tilde.K || sigma.sigma.size() != sigma_tilde.sigma.size()) {
    throw ValidationError("weyl_titchmarsh", "spectra have different truncations");
  }
  if (!(tail_bound >= 0.0)) throw ValidationError("weyl_titchmarsh", "tail bound must be >= 0");
  DNGap g;
  for (std::size_t k = 0; k < sigma.sigma.size(); ++k) {
    const double diff = std::abs(sigma.sigma[k] - sigma_tilde.sigma[k]);
    if (diff > g.eps) {
      g.eps = diff;
      g.argmax = static_cast<int>(k);
    }
  }
  g.tail_bound = tail_bound;
  g.certified = tail_bound < 0.01 * g.eps || tail_bound == 0.0;
  return g;
}

double spectral_tail_bound(const Amplitude& A, int K) {
  const auto& params = A.params();
  const double kap = params.kappa_at(K + 1);
  double bound = 0.0;
  for (int n = 0; n < A.term_count(); ++n) {
    const double c = std::abs(A.coefficient(n));
    if (c == 0.0) continue;
    bound += c / (2.0 * kap);
    const double mu = params.mu_at(n);
    if (mu < 0.0) bound += 2.0 * c * std::abs(mu) / (4.0 * kap * kap - mu * mu);
  }
  return bound;
}

double jost_closed_form(const ClosedForm& base, double kappa) {
  switch (base.kind) {
    case ClosedFormKind::bargmann1:
      if (kappa == -base.first) throw ValidationError("weyl_titchmarsh", "Jost function pole at kappa = -beta");
      break;
    case ClosedFormKind::bargmann2:
      if (kappa == -base.second) throw ValidationError("weyl_titchmarsh", "Jost function pole at kappa = -kappa1");
      break;
    case ClosedFormKind::external:
      throw ValidationError("weyl_titchmarsh", "no closed-form Jost function for an external potential");
    default:
      break;
  }
  return jost_value(base, kappa);
}

std::vector<double> jost_roots(const ClosedForm& base, double lo, double hi) {
  std::vector<double> roots;
  if (base.kind == ClosedFormKind::zero) return roots;
  auto psi = [&](double k) { return jost_value(base, k); };
  const int n = 2000;
  const double dk = (hi - lo) / n;
  for (int i = 0; i < n; ++i) {
    const double a = lo + i * dk, b = (i + 1 == n) ? hi : lo + (i + 1) * dk;
    const double fa = psi(a), fb = psi(b);
    if (fa == 0.0) {
      roots.push_back(a);
      continue;
    }
    if (fb == 0.0 || !(fa * fb < 0.0)) continue;
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(psi, a, b, fa, fb,
                                                     boost::math::tools::eps_tolerance<double>(52), iters);
    const double root = 0.5 * (r.first + r.second);
    if (std::abs(psi(root)) < 1e-8) roots.push_back(root);  // rejects sign changes across a pole
  }
  if (psi(hi) == 0.0) roots.push_back(hi);
  return roots;
}

}  // namespace steklov
