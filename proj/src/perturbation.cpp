#include "steklov/perturbation.hpp"

#include "steklov/errors.hpp"
#include "steklov/numerics.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace steklov {
namespace {

constexpr int kMaxTerms = 1000000;

double generator_coefficient(const GeometricTail& g, double lambda) {
  return -g.a * std::pow(g.rho, lambda);
}

bool has_generator(const std::optional<GeometricTail>& tail) {
  return tail && tail->a != 0.0;
}

void check_base(const ClosedForm& base) {
  if (base.kind == ClosedFormKind::external) {
    throw ValidationError("perturbation", "amplitude base must be zero, bargmann1 or bargmann2");
  }
  validate(base);
}

// int_0^t c e^{-mu a} da, valid for every sign of mu
double exp_term_integral(double c, double mu, double t) {
  if (mu == 0.0) return c * t;
  return c * (-std::expm1(-mu * t)) / mu;
}

}  // namespace

Amplitude Amplitude::base_only(const ClosedForm& base, const SpectralParams& params) {
  return unchecked(base, {}, std::nullopt, params);
}

Amplitude Amplitude::unchecked(const ClosedForm& base, std::vector<double> coeffs,
                               std::optional<GeometricTail> tail, const SpectralParams& params) {
  check_base(base);
  Amplitude A;
  A.base_ = base;
  A.coeffs_ = std::move(coeffs);
  A.tail_ = tail;
  A.params_ = params;
  A.finalize();
  A.radius_ = estimate_radius(A.coeffs_, A.tail_, params);
  return A;
}

void Amplitude::finalize() {
  int n = static_cast<int>(coeffs_.size());
  if (has_generator(tail_)) {
    const auto& g = *tail_;
    if (!(g.rho >= 0.0 && g.rho < 1.0)) {
      // no finite truncation exists; keep the stored list and let validation reject it
      term_count_ = n;
    } else if (g.rho == 0.0) {
      // rho^lambda vanishes except at lambda = 0
      n = std::max(n, 1);
    } else {
      // remainder of the generator past index m is a rho^{lambda_m} / (1 - rho^2)
      double head = 0.0;
      for (int k = 0; k < 64; ++k) head += std::abs(generator_coefficient(g, params_.lambda_at(k)));
      const double target = 1e-16 * (head + 1e-300);
      int m = 0;
      while (m < kMaxTerms &&
             std::abs(g.a) * std::pow(g.rho, params_.lambda_at(m)) / (1.0 - g.rho * g.rho) > target) {
        ++m;
      }
      if (m >= kMaxTerms) throw NumericalError("perturbation", "geometric tail needs too many terms");
      n = std::max(n, m);
    }
  }
  term_count_ = n;
  abs_sum_ = 0.0;
  for (int k = 0; k < term_count_; ++k) abs_sum_ += std::abs(coefficient(k));
}

double Amplitude::coefficient(int k) const {
  double c = k < static_cast<int>(coeffs_.size()) ? coeffs_[k] : 0.0;
  if (has_generator(tail_)) c += generator_coefficient(*tail_, params_.lambda_at(k));
  return c;
}

double Amplitude::base_value(double alpha) const {
  switch (base_.kind) {
    case ClosedFormKind::bargmann1: {
      const double b = base_.first, g = base_.second;
      return 2.0 * (g * g - b * b) * std::exp(-2.0 * g * alpha);
    }
    case ClosedFormKind::bargmann2:
      return -2.0 * base_.first / base_.second * std::sinh(2.0 * base_.second * alpha);
    default:
      return 0.0;
  }
}

double Amplitude::perturbation_value(double alpha) const {
  double sum = 0.0;
  for (int k = 0; k < term_count_; ++k) {
    const double c = coefficient(k);
    if (c == 0.0) continue;
    const double mu = params_.mu_at(k);
    const double m = std::abs(mu);
    if (mu < 0.0) sum += 2.0 * c * std::sinh(m * alpha);
    sum += c * std::exp(-m * alpha);
  }
  return sum;
}

double Amplitude::base_integral(double t) const {
  switch (base_.kind) {
    case ClosedFormKind::bargmann1: {
      const double b = base_.first, g = base_.second;
      const double factor = 2.0 * (g * g - b * b);
      if (g == 0.0) return factor * t;
      return factor * (-std::expm1(-2.0 * g * t)) / (2.0 * g);
    }
    case ClosedFormKind::bargmann2: {
      const double c1 = base_.first, k1 = base_.second;
      const double sh = std::sinh(k1 * t);
      return -2.0 * c1 / (k1 * k1) * sh * sh;  // -(c1/k1^2)(cosh(2 k1 t) - 1)
    }
    default:
      return 0.0;
  }
}

double Amplitude::perturbation_integral(double t) const {
  double sum = 0.0;
  for (int k = 0; k < term_count_; ++k) {
    const double c = coefficient(k);
    if (c != 0.0) sum += exp_term_integral(c, params_.mu_at(k), t);
  }
  return sum;
}

Amplitude Amplitude::scaled(double s) const {
  Amplitude out = *this;
  for (auto& c : out.coeffs_) c *= s;
  if (out.tail_) out.tail_->a *= s;
  out.finalize();
  if (s == 0.0) out.radius_ = RadiusEstimate{std::numeric_limits<double>::infinity(), 0.0, true};
  return out;
}

RadiusEstimate estimate_radius(std::span<const double> coeffs, const std::optional<GeometricTail>& tail,
                               const SpectralParams& params) {
  const double inf = std::numeric_limits<double>::infinity();
  if (has_generator(tail)) {
    if (tail->rho <= 0.0) return {inf, 0.0, true};
    return {1.0 / tail->rho, 0.0, true};
  }
  std::vector<int> idx;
  for (int k = 0; k < static_cast<int>(coeffs.size()); ++k) {
    if (coeffs[k] != 0.0) idx.push_back(k);
  }
  if (idx.size() < 4) return {inf, 0.0, true};

  // rho_i = (|c_{k_{i+1}}| / |c_{k_i}|)^{1 / (lambda_{k_{i+1}} - lambda_{k_i})}
  const int n = static_cast<int>(idx.size()) - 1;
  Eigen::VectorXd logk(n), logrho(n);
  for (int i = 0; i < n; ++i) {
    const int a = idx[i], b = idx[i + 1];
    const double dl = params.lambda_at(b) - params.lambda_at(a);
    logrho[i] = (std::log(std::abs(coeffs[b])) - std::log(std::abs(coeffs[a]))) / dl;
    logk[i] = std::log(static_cast<double>(b));
  }
  // trend over the second half of the ratio sequence
  const int start = n / 2;
  const int len = n - start;
  double R = 0.0, unc = 0.0;
  if (len >= 2) {
    const auto fit = fit_line(logk.tail(len), logrho.tail(len));
    if (fit.slope < -0.25) return {inf, 0.0, false};
  }
  const double last = logrho[n - 1];
  const double mid = logrho[start];
  R = std::exp(-last);
  unc = std::abs(std::exp(-last) - std::exp(-mid));
  return {R, unc, false};
}

Amplitude build_perturbed_amplitude(const ClosedForm& base, std::vector<double> coeffs,
                                    std::optional<GeometricTail> tail, const SpectralParams& params) {
  check_base(base);
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    if (!std::isfinite(coeffs[k])) throw ValidationError("perturbation", "coefficient c_" + std::to_string(k) + " is not finite");
    if (coeffs[k] > 0.0) {
      throw ValidationError("perturbation", "coefficient c_" + std::to_string(k) + " is positive; c_k <= 0 is required");
    }
  }
  if (tail) {
    if (!(tail->a >= 0.0) || !std::isfinite(tail->a)) {
      throw ValidationError("perturbation", "geometric tail needs a >= 0 so that c_k = -a rho^lambda_k <= 0");
    }
    if (!(tail->rho >= 0.0)) throw ValidationError("perturbation", "geometric tail needs rho >= 0");
    if (tail->a != 0.0 && tail->rho >= 1.0) {
      throw ValidationError("perturbation", "radius of convergence 1/rho must exceed 1");
    }
  }
  Amplitude A = Amplitude::unchecked(base, std::move(coeffs), tail, params);
  if (!(A.radius() > 1.0)) {
    throw ValidationError("perturbation", "estimated radius of convergence " + std::to_string(A.radius()) +
                                              " does not exceed 1");
  }
  if (!std::isfinite(A.abs_coefficient_sum())) {
    throw ValidationError("perturbation", "coefficients are not absolutely summable");
  }
  // pole guard: 2 kappa_k = |mu_j| for some eigenvalue index j
  for (int j = 0; j < std::min(params.n_neg, A.term_count()); ++j) {
    if (A.coefficient(j) == 0.0) continue;
    const double m = std::abs(params.mu_at(j));
    const double k_real = 0.5 * m - 0.5 * (params.d - 2);
    const double k_near = std::round(k_real);
    if (k_near >= 0.0 && std::abs(2.0 * params.kappa_at(static_cast<int>(k_near)) - m) < 1e-8) {
      throw ValidationError("perturbation", "pole collision: 2 kappa_" + std::to_string(static_cast<int>(k_near)) +
                                                " = |mu_" + std::to_string(j) + "|");
    }
  }
  return A;
}

double holder_exponent(double R, const SpectralParams& params) {
  if (!(R > 1.0)) throw ValidationError("perturbation", "Hoelder exponent needs R > 1");
  if (std::isinf(R)) return 0.5;
  return 0.5 * std::min(1.0, std::log(R) / std::log(params.growth_base()));
}

double SpectralMeasureDiff::density_diff(double E) const {
  if (E <= 0.0) return 0.0;
  return std::sqrt(E) / std::numbers::pi * ratio_diff(E);
}

double SpectralMeasureDiff::ratio_diff(double E) const {
  double sum = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) sum += c[k] / (4.0 * E + mu[k] * mu[k]);
  return -2.0 * sum;
}

SpectralMeasureDiff spectral_measure_diff(const Amplitude& A) {
  SpectralMeasureDiff out;
  const auto& params = A.params();
  for (int k = 0; k < A.term_count(); ++k) {
    const double c = A.coefficient(k);
    const double mu = params.mu_at(k);
    out.c.push_back(c);
    out.mu.push_back(mu);
    if (c == 0.0) continue;
    out.resonances.push_back({k, -0.5 * std::abs(mu)});
    if (mu < 0.0) out.point_masses.push_back({k, -0.25 * mu * mu, -0.5 * c * std::abs(mu)});
  }
  return out;
}

double base_ratio_minus_one(const ClosedForm& base, double E) {
  if (base.kind == ClosedFormKind::bargmann1) {
    const double b = base.first, g = base.second;
    return (b * b - g * g) / (E + g * g);
  }
  if (base.kind == ClosedFormKind::external) {
    throw ValidationError("perturbation", "no closed-form spectral density for an external base");
  }
  return 0.0;  // |psi(0, sqrt E)| = 1 for the zero and bargmann2 bases
}

double base_density(const ClosedForm& base, double E) {
  if (E <= 0.0) return 0.0;
  return std::sqrt(E) / std::numbers::pi * (1.0 + base_ratio_minus_one(base, E));
}

double base_nu_density(const ClosedForm& base, double k) {
  if (base.kind == ClosedFormKind::bargmann1) {
    const double b = base.first, g = base.second;
    return (b * b - g * g) * k / (g * g + k * k);
  }
  if (base.kind == ClosedFormKind::external) {
    throw ValidationError("perturbation", "no closed-form spectral density for an external base");
  }
  return 0.0;
}

PositivityReport ks_check_positivity(const Amplitude& A, const Eigen::VectorXd& E_grid) {
  const auto diff = spectral_measure_diff(A);
  PositivityReport rep;
  rep.min_density = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < E_grid.size(); ++i) {
    const double E = E_grid[i];
    const double v = base_density(A.base(), E) + diff.density_diff(E);
    if (v < rep.min_density) {
      rep.min_density = v;
      rep.argmin_E = E;
    }
  }
  rep.min_point_mass_weight = 0.0;
  for (const auto& pm : diff.point_masses) rep.min_point_mass_weight = std::min(rep.min_point_mass_weight, pm.weight);
  rep.ok = rep.min_density >= 0.0 && rep.min_point_mass_weight >= 0.0;
  return rep;
}

QuasiSzegoReport ks_check_quasi_szego(const Amplitude& A, const Eigen::VectorXd& E_grid, double fit_lo,
                                      double fit_hi) {
  const auto diff = spectral_measure_diff(A);
  QuasiSzegoReport rep;
  std::vector<double> lx, ly;
  bool all_zero = true;
  for (Eigen::Index i = 0; i < E_grid.size(); ++i) {
    const double E = E_grid[i];
    if (E <= 0.0) continue;
    const double rm1 = base_ratio_minus_one(A.base(), E) + diff.ratio_diff(E);
    const double r = 1.0 + rm1;
    // log[r/4 + 1/2 + 1/(4r)] = log(1 + (r - 1)^2 / (4r))
    const double term = std::log1p(rm1 * rm1 / (4.0 * r));
    if (term != 0.0) all_zero = false;
    rep.max_abs_integrand = std::max(rep.max_abs_integrand, std::abs(term * std::sqrt(E)));
    if (E >= fit_lo && E <= fit_hi && term > 0.0) {
      lx.push_back(std::log(E));
      ly.push_back(std::log(term));
    }
  }
  rep.identically_zero = all_zero;
  if (all_zero || lx.size() < 2) return rep;
  const auto fit = fit_line(Eigen::Map<Eigen::VectorXd>(lx.data(), lx.size()),
                            Eigen::Map<Eigen::VectorXd>(ly.data(), ly.size()));
  rep.log_term_exponent = fit.slope;
  rep.integrand_exponent = fit.slope + 0.5;
  rep.fit_residual = fit.residual;
  return rep;
}

Eigen::VectorXd default_L_grid() {
  Eigen::VectorXd L(7);
  for (int i = 0; i < 7; ++i) L[i] = std::ldexp(1.0, i - 6);
  return L;
}

double maximal_function(const Amplitude& A, double k, const Eigen::VectorXd& L_grid, bool perturbed) {
  const auto diff = spectral_measure_diff(A);
  auto density = [&](double s) {
    double v = base_nu_density(A.base(), s);
    if (perturbed) {
      double sum = 0.0;
      for (std::size_t j = 0; j < diff.c.size(); ++j) sum += diff.c[j] * s / (4.0 * s * s + diff.mu[j] * diff.mu[j]);
      v -= 2.0 * sum;
    }
    return std::abs(v);
  };
  double best = 0.0;
  for (Eigen::Index i = 0; i < L_grid.size(); ++i) {
    const double L = L_grid[i];
    const double a = std::max(0.0, k - L), b = k + L;
    const double mass = boost::math::quadrature::gauss<double, 20>::integrate(density, a, b);
    best = std::max(best, mass / (2.0 * L));
  }
  return best;
}

NormalizationReport ks_check_normalization(const Amplitude& A, const Eigen::VectorXd& k_grid,
                                           const Eigen::VectorXd& L_grid) {
  NormalizationReport rep;
  std::vector<double> lx, ly;
  bool all_zero = true;
  for (Eigen::Index i = 0; i < k_grid.size(); ++i) {
    const double k = k_grid[i];
    const double drift = maximal_function(A, k, L_grid, true) - maximal_function(A, k, L_grid, false);
    if (drift != 0.0) all_zero = false;
    if (std::abs(drift) > 0.0) {
      lx.push_back(std::log(k));
      ly.push_back(std::log(std::abs(drift)));
    }
  }
  rep.identically_zero = all_zero && !A.has_perturbation();
  if (lx.size() >= 2) {
    const auto fit = fit_line(Eigen::Map<Eigen::VectorXd>(lx.data(), lx.size()),
                              Eigen::Map<Eigen::VectorXd>(ly.data(), ly.size()));
    rep.drift_exponent = fit.slope;
    rep.drift_fit_residual = fit.residual;
  }

  // partial integrals of log[1 + (M_s nu~ / k)^2] k^2 over [1, k_max], k_max doubling
  auto integrand = [&](double k) {
    const double m = maximal_function(A, k, L_grid, true) / k;
    return std::log1p(m * m) * k * k;
  };
  double total = 0.0;
  double lo = 1.0;
  std::vector<double> increments;
  for (double kmax = 2.0; kmax <= 8192.0; kmax *= 2.0) {
    const double inc = adaptive_integrate(integrand, lo, kmax, 1e-10);
    total += inc;
    increments.push_back(inc);
    rep.k_max.push_back(kmax);
    rep.partial_integrals.push_back(total);
    lo = kmax;
  }
  // Cauchy criterion: the late increments shrink geometrically and are small next to the total
  const std::size_t n = increments.size();
  rep.cauchy_ok = true;
  for (std::size_t i = n - 4; i + 1 < n; ++i) {
    if (std::abs(increments[i + 1]) > 0.75 * std::abs(increments[i]) + 1e-300) rep.cauchy_ok = false;
  }
  if (std::abs(increments.back()) > 1e-2 * std::abs(total) + 1e-300) rep.cauchy_ok = false;
  return rep;
}

}  // namespace steklov
