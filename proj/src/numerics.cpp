#include "steklov/numerics.hpp"

#include "steklov/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace steklov {

Eigen::VectorXd uniform_grid(double a, double b, int n_intervals) {
  if (n_intervals < 1) throw ValidationError("numerics", "grid needs at least one interval");
  Eigen::VectorXd x(n_intervals + 1);
  const double h = (b - a) / n_intervals;
  for (int i = 0; i <= n_intervals; ++i) x[i] = a + i * h;
  x[n_intervals] = b;
  return x;
}

Eigen::VectorXd log_grid(double a, double b, int n) {
  if (!(a > 0.0 && b > a) || n < 2) throw ValidationError("numerics", "log grid needs 0 < a < b and n >= 2");
  Eigen::VectorXd x(n);
  const double la = std::log10(a), lb = std::log10(b);
  for (int i = 0; i < n; ++i) x[i] = std::pow(10.0, la + (lb - la) * i / (n - 1));
  return x;
}

Eigen::VectorXd newton_cotes_weights(int n, double h) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n + 1);
  if (n == 0) return w;
  if (n == 1) {
    w[0] = w[1] = 0.5 * h;
    return w;
  }
  const int simpson_end = (n % 2 == 0) ? n : n - 3;
  for (int j = 0; j < simpson_end; j += 2) {
    w[j] += h / 3.0;
    w[j + 1] += 4.0 * h / 3.0;
    w[j + 2] += h / 3.0;
  }
  if (n % 2 == 1) {
    const int j = n - 3;
    w[j] += 3.0 * h / 8.0;
    w[j + 1] += 9.0 * h / 8.0;
    w[j + 2] += 9.0 * h / 8.0;
    w[j + 3] += 3.0 * h / 8.0;
  }
  return w;
}

double integrate_uniform(const Eigen::Ref<const Eigen::VectorXd>& f, double h) {
  if (f.size() < 2) return 0.0;
  return newton_cotes_weights(static_cast<int>(f.size()) - 1, h).dot(f);
}

double simpson_nonuniform(const Eigen::Ref<const Eigen::VectorXd>& x,
                          const Eigen::Ref<const Eigen::VectorXd>& f) {
  const Eigen::Index n = x.size();
  if (n != f.size()) throw ValidationError("numerics", "grid and values differ in length");
  if (n < 2) return 0.0;
  if (n == 2) return 0.5 * (x[1] - x[0]) * (f[0] + f[1]);

  double sum = 0.0;
  Eigen::Index i = 0;
  for (; i + 2 < n; i += 2) {
    const double h0 = x[i + 1] - x[i];
    const double h1 = x[i + 2] - x[i + 1];
    const double hs = h0 + h1;
    sum += hs / 6.0 *
           ((2.0 - h1 / h0) * f[i] + hs * hs / (h0 * h1) * f[i + 1] + (2.0 - h0 / h1) * f[i + 2]);
  }
  if (i + 1 == n - 1) {
    // one interval left: quadratic through the last three nodes
    const double h0 = x[n - 2] - x[n - 3];
    const double h1 = x[n - 1] - x[n - 2];
    sum += -h1 * h1 * h1 / (6.0 * h0 * (h0 + h1)) * f[n - 3] +
           h1 * (h1 + 3.0 * h0) / (6.0 * h0) * f[n - 2] +
           h1 * (2.0 * h1 + 3.0 * h0) / (6.0 * (h0 + h1)) * f[n - 1];
  }
  return sum;
}

double cubic_interpolate(const Eigen::Ref<const Eigen::VectorXd>& x,
                         const Eigen::Ref<const Eigen::VectorXd>& f, double at) {
  const Eigen::Index n = x.size();
  if (n == 0) throw ValidationError("numerics", "cannot interpolate on an empty grid");
  if (n == 1) return f[0];
  if (n < 4) {
    // linear on short grids
    const auto it = std::upper_bound(x.data(), x.data() + n, at);
    Eigen::Index j = std::clamp<Eigen::Index>(it - x.data() - 1, 0, n - 2);
    const double t = (at - x[j]) / (x[j + 1] - x[j]);
    return (1.0 - t) * f[j] + t * f[j + 1];
  }
  const auto it = std::upper_bound(x.data(), x.data() + n, at);
  const Eigen::Index j = std::clamp<Eigen::Index>(it - x.data() - 1, 0, n - 2);
  const Eigen::Index start = std::clamp<Eigen::Index>(j - 1, 0, n - 4);
  double value = 0.0;
  for (Eigen::Index a = start; a < start + 4; ++a) {
    double basis = 1.0;
    for (Eigen::Index b = start; b < start + 4; ++b) {
      if (b != a) basis *= (at - x[b]) / (x[a] - x[b]);
    }
    value += basis * f[a];
  }
  return value;
}

double adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                          double tolerance) {
  if (b <= a) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 20, tolerance);
}

LinearFit fit_line(const Eigen::Ref<const Eigen::VectorXd>& x,
                   const Eigen::Ref<const Eigen::VectorXd>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ValidationError("numerics", "line fit needs at least two paired samples");
  }
  Eigen::MatrixXd design(x.size(), 2);
  design.col(0) = x;
  design.col(1).setOnes();
  const Eigen::Vector2d beta = design.colPivHouseholderQr().solve(y);
  LinearFit fit;
  fit.slope = beta[0];
  fit.intercept = beta[1];
  fit.residual = std::sqrt((design * beta - y).squaredNorm() / static_cast<double>(x.size()));
  return fit;
}

}  // namespace steklov
