#pragma once

#include "steklov/radial_model.hpp"

#include <Eigen/Core>

#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace steklov {

/// Coefficient generator c_k = -a * rho^{lambda_k}; radius of convergence 1 / rho.
struct GeometricTail {
  double a = 0.0;
  double rho = 0.0;
};

struct RadiusEstimate {
  double R = std::numeric_limits<double>::infinity();
  double uncertainty = 0.0;
  bool exact = false;  // from a generator or a finite polynomial
};

/// Simon amplitude A~(alpha) = A_base(alpha) + sum_k c_k e^{-mu_k alpha}.
///
/// The stored coefficients are c_k = coeffs[k] (for k < coeffs.size()) plus the
/// generator term when present. Only `build_perturbed_amplitude` validates the
/// admissibility hypotheses; `unchecked` exists for diagnostics that must see
/// inadmissible data.
class Amplitude {
 public:
  Amplitude() = default;

  static Amplitude base_only(const ClosedForm& base, const SpectralParams& params);
  static Amplitude unchecked(const ClosedForm& base, std::vector<double> coeffs,
                             std::optional<GeometricTail> tail, const SpectralParams& params);

  const ClosedForm& base() const { return base_; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  const std::optional<GeometricTail>& tail() const { return tail_; }
  const SpectralParams& params() const { return params_; }
  double radius() const { return radius_.R; }
  const RadiusEstimate& radius_estimate() const { return radius_; }

  /// c_k including the generator contribution.
  double coefficient(int k) const;
  /// Number of series terms kept; the remainder sum_{k>=n} |c_k| is below
  /// 1e-16 * (sum |c_k| + 1e-300).
  int term_count() const { return term_count_; }
  double abs_coefficient_sum() const { return abs_sum_; }
  bool has_perturbation() const { return term_count_ > 0 && abs_sum_ > 0.0; }

  double base_value(double alpha) const;
  /// Series part in the split form sum_{k<N} 2 c_k sinh(|mu_k| alpha) + sum_k c_k e^{-|mu_k| alpha}.
  double perturbation_value(double alpha) const;
  double operator()(double alpha) const { return base_value(alpha) + perturbation_value(alpha); }

  /// Closed-form integral from 0 to t of the base part and of the series part.
  double base_integral(double t) const;
  double perturbation_integral(double t) const;

  /// Same base and parameters, series scaled by s.
  Amplitude scaled(double s) const;

 private:
  void finalize();

  ClosedForm base_;
  std::vector<double> coeffs_;
  std::optional<GeometricTail> tail_;
  SpectralParams params_;
  RadiusEstimate radius_;
  int term_count_ = 0;
  double abs_sum_ = 0.0;
};

/// R = 1 / limsup |c_k|^{1/lambda_k}. Exact for a generator (1/rho) and for
/// fewer than four nonzero coefficients (a polynomial, R = +inf). Otherwise the
/// consecutive-ratio sequence over the stored tail is used; a clearly
/// power-law decaying ratio sequence is reported as R = +inf.
RadiusEstimate estimate_radius(std::span<const double> coeffs, const std::optional<GeometricTail>& tail,
                               const SpectralParams& params);

/// Validated constructor: c_k <= 0, R > 1, and no Steklov point kappa_k sits on a
/// pole 2 kappa_k = |mu_j| of an eigenvalue term (j < N_neg).
Amplitude build_perturbed_amplitude(const ClosedForm& base, std::vector<double> coeffs,
                                    std::optional<GeometricTail> tail, const SpectralParams& params);

/// theta = 1/2 min(1, log R / log(9 M0 / 2)).
double holder_exponent(double R, const SpectralParams& params);

struct PointMass {
  int k = 0;
  double location = 0.0;  // E = -mu_k^2 / 4
  double weight = 0.0;    // -c_k |mu_k| / 2
};

struct Resonance {
  int k = 0;
  double location = 0.0;  // -|mu_k| / 2
};

/// Change of the spectral measure induced by the series part.
struct SpectralMeasureDiff {
  std::vector<double> c;   // c_k, k < term_count
  std::vector<double> mu;  // mu_k, k < term_count
  std::vector<PointMass> point_masses;
  std::vector<Resonance> resonances;

  /// -(2/pi) sum_k c_k sqrt(E) / (4E + mu_k^2), for E > 0.
  double density_diff(double E) const;
  /// -2 sum_k c_k / (4E + mu_k^2): change of d rho / d rho_0.
  double ratio_diff(double E) const;
};

SpectralMeasureDiff spectral_measure_diff(const Amplitude& A);

/// d rho / dE of the base potential for E > 0 (sqrt(E)/pi times 1/|psi(0, sqrt E)|^2).
double base_density(const ClosedForm& base, double E);
/// d rho / d rho_0 - 1 of the base, computed without cancellation.
double base_ratio_minus_one(const ClosedForm& base, double E);
/// d nu / dk = Im M(k^2 + i0) - k of the base.
double base_nu_density(const ClosedForm& base, double k);

struct PositivityReport {
  double min_density = 0.0;
  double argmin_E = 0.0;
  double min_point_mass_weight = 0.0;
  bool ok = true;
};

PositivityReport ks_check_positivity(const Amplitude& A, const Eigen::VectorXd& E_grid);

struct QuasiSzegoReport {
  bool identically_zero = false;
  double log_term_exponent = 0.0;   // fitted decay exponent of log[1/4 r + 1/2 + 1/(4r)]
  double integrand_exponent = 0.0;  // same with the sqrt(E) factor
  double fit_residual = 0.0;
  double max_abs_integrand = 0.0;
};

/// Fit window defaults to E in [1e2, 1e6] on the supplied grid.
QuasiSzegoReport ks_check_quasi_szego(const Amplitude& A, const Eigen::VectorXd& E_grid,
                                      double fit_lo = 1e2, double fit_hi = 1e6);

struct NormalizationReport {
  bool identically_zero = false;
  double drift_exponent = 0.0;  // fitted exponent of (M_s nu~)(k) - (M_s nu)(k)
  double drift_fit_residual = 0.0;
  std::vector<double> k_max;             // cut-offs, doubling
  std::vector<double> partial_integrals;  // int_1^{k_max} log[1 + (M_s nu~ / k)^2] k^2 dk
  bool cauchy_ok = true;
};

/// Hardy-Littlewood maximal function sup_{L in L_grid} (1/2L) |nu|([k - L, k + L]).
double maximal_function(const Amplitude& A, double k, const Eigen::VectorXd& L_grid, bool perturbed);

/// Default L grid {2^-6, ..., 1}.
Eigen::VectorXd default_L_grid();

NormalizationReport ks_check_normalization(const Amplitude& A, const Eigen::VectorXd& k_grid,
                                           const Eigen::VectorXd& L_grid);

}  // namespace steklov
