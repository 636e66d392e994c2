#pragma once

#include <Eigen/Core>

#include <functional>

namespace steklov {

/// n_intervals + 1 equally spaced nodes on [a, b].
Eigen::VectorXd uniform_grid(double a, double b, int n_intervals);

/// n points equally spaced in log10 between a and b (both > 0).
Eigen::VectorXd log_grid(double a, double b, int n);

/// Fourth-order Newton-Cotes weights for n equal intervals of width h.
///
/// Even n uses composite Simpson. Odd n >= 3 uses Simpson on the first n - 3
/// intervals and the 3/8 rule on the last three. n == 1 falls back to the
/// trapezoid rule; n == 0 gives a single zero weight.
Eigen::VectorXd newton_cotes_weights(int n, double h);

/// Integral of uniformly sampled values with spacing h.
double integrate_uniform(const Eigen::Ref<const Eigen::VectorXd>& f, double h);

/// Composite Simpson on an arbitrary increasing grid (piecewise quadratic
/// through consecutive node triples; a trailing odd interval reuses the last
/// three nodes).
double simpson_nonuniform(const Eigen::Ref<const Eigen::VectorXd>& x,
                          const Eigen::Ref<const Eigen::VectorXd>& f);

/// Local 4-point Lagrange interpolation on an increasing grid. The stencil is
/// clamped at the ends, so evaluation slightly outside the grid extrapolates.
double cubic_interpolate(const Eigen::Ref<const Eigen::VectorXd>& x,
                         const Eigen::Ref<const Eigen::VectorXd>& f, double at);

/// Adaptive Gauss-Kronrod quadrature on a finite interval.
double adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                          double tolerance = 1e-14);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // root-mean-square residual
};

/// Ordinary least squares y ~ slope * x + intercept.
LinearFit fit_line(const Eigen::Ref<const Eigen::VectorXd>& x,
                   const Eigen::Ref<const Eigen::VectorXd>& y);

}  // namespace steklov
