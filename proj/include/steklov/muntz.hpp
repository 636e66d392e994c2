#pragma once

#include "steklov/errors.hpp"
#include "steklov/radial_model.hpp"

#include <Eigen/Core>
#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <string>
#include <vector>

namespace steklov {

/// Arbitrary-precision real used for Müntz computations. Precision is the
/// thread's current default, see ScopedPrecision.
using mp_real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                              boost::multiprecision::et_off>;

/// Sets the default mp_real precision (in bits) for the lifetime of the object.
class ScopedPrecision {
 public:
  explicit ScopedPrecision(unsigned bits);
  ~ScopedPrecision();
  ScopedPrecision(const ScopedPrecision&) = delete;
  ScopedPrecision& operator=(const ScopedPrecision&) = delete;

  static unsigned digits10_for_bits(unsigned bits);

 private:
  unsigned saved_digits10_;
};

namespace muntz_detail {

template <class Scalar>
double decimal_digits() {
  if constexpr (std::is_same_v<Scalar, mp_real>) {
    return static_cast<double>(mp_real::default_precision());
  } else {
    return std::numeric_limits<Scalar>::digits10;
  }
}

template <class Scalar>
Scalar abs_(const Scalar& x) {
  using std::abs;
  return abs(x);
}

}  // namespace muntz_detail

template <class Scalar>
using MuntzMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// C_mj = sqrt(2 lambda_m + 1) prod_{r<m}(lambda_j + lambda_r + 1) / prod_{r<=m, r!=j}(lambda_j - lambda_r)
/// for 0 <= j <= m < size, lower triangular. The products are accumulated as
/// log-magnitudes with the sign (-1)^{m-j} tracked separately.
template <class Scalar>
MuntzMatrix<Scalar> muntz_coeffs(const std::vector<Scalar>& lambda) {
  using std::exp;
  using std::log;
  using std::sqrt;
  const int n = static_cast<int>(lambda.size());
  if (n == 0) throw ValidationError("muntz", "exponent list is empty");
  if (lambda[0] < 0) throw ValidationError("muntz", "exponents must be >= 0");
  for (int i = 1; i < n; ++i) {
    if (!(lambda[i] > lambda[i - 1])) {
      throw ValidationError("muntz", "exponents must be strictly increasing (repeated exponent at index " +
                                         std::to_string(i) + ")");
    }
  }
  MuntzMatrix<Scalar> C = MuntzMatrix<Scalar>::Zero(n, n);
  for (int m = 0; m < n; ++m) {
    const Scalar log_lead = log(Scalar(2) * lambda[m] + 1) / 2;
    for (int j = 0; j <= m; ++j) {
      Scalar lg = log_lead;
      for (int r = 0; r < m; ++r) lg += log(lambda[j] + lambda[r] + 1);
      for (int r = 0; r <= m; ++r) {
        if (r != j) lg -= log(muntz_detail::abs_<Scalar>(lambda[j] - lambda[r]));
      }
      const Scalar mag = exp(lg);
      C(m, j) = ((m - j) % 2 == 0) ? mag : Scalar(-mag);
    }
  }
  return C;
}

/// Orthonormal Müntz system L_m(t) = sum_j C_mj t^{lambda_j} on [0, 1].
template <class Scalar>
class MuntzSystem {
 public:
  MuntzSystem() = default;
  explicit MuntzSystem(std::vector<Scalar> lambda)
      : lambda_(std::move(lambda)), C_(muntz_coeffs(lambda_)), digits_(muntz_detail::decimal_digits<Scalar>()) {}

  const std::vector<Scalar>& exponents() const { return lambda_; }
  const MuntzMatrix<Scalar>& coefficients() const { return C_; }
  int size() const { return static_cast<int>(lambda_.size()); }
  double digits() const { return digits_; }

  /// sum_p |C_mp|, the loss-of-precision proxy for L_m.
  Scalar condition_proxy(int m) const {
    Scalar s = 0;
    for (int p = 0; p <= m; ++p) s += muntz_detail::abs_<Scalar>(C_(m, p));
    return s;
  }

  /// Largest m such that every proxy up to m stays below 10^{digits - 8}.
  int certified_degree() const {
    using std::log10;
    int ok = -1;
    for (int m = 0; m < size(); ++m) {
      const double lg = static_cast<double>(log10(condition_proxy(m)));
      if (lg > digits_ - 8.0) break;
      ok = m;
    }
    return ok;
  }

  /// Gram matrix <L_m, L_k> for m, k <= n, from <t^a, t^b> = 1 / (a + b + 1).
  MuntzMatrix<Scalar> gram(int n) const {
    check_degree(n);
    MuntzMatrix<Scalar> H(n + 1, n + 1);
    for (int a = 0; a <= n; ++a) {
      for (int b = 0; b <= n; ++b) H(a, b) = Scalar(1) / (lambda_[a] + lambda_[b] + 1);
    }
    const MuntzMatrix<Scalar> Cn = C_.topLeftCorner(n + 1, n + 1);
    return Cn * H * Cn.transpose();
  }

  /// max |G - I| over the Gram matrix of L_0..L_n.
  Scalar gram_residual(int n) const {
    const MuntzMatrix<Scalar> G = gram(n);
    Scalar worst = 0;
    for (int a = 0; a <= n; ++a) {
      for (int b = 0; b <= n; ++b) {
        const Scalar e = muntz_detail::abs_<Scalar>(G(a, b) - (a == b ? Scalar(1) : Scalar(0)));
        if (e > worst) worst = e;
      }
    }
    return worst;
  }

  /// L_m(t).
  Scalar evaluate(int m, const Scalar& t) const {
    using std::pow;
    Scalar s = 0;
    for (int j = 0; j <= m; ++j) s += C_(m, j) * pow(t, lambda_[j]);
    return s;
  }

  void check_degree(int n) const {
    if (n < 0 || n >= size()) throw ValidationError("muntz", "degree " + std::to_string(n) + " outside the system");
  }

 private:
  std::vector<Scalar> lambda_;
  MuntzMatrix<Scalar> C_;
  double digits_ = 0.0;
};

/// h(t) = sum_j a_j t^{e_j}.
template <class Scalar>
struct MuntzSeries {
  std::vector<Scalar> exponents;
  std::vector<Scalar> coeffs;
};

/// int_0^1 h(t) t^lambda dt = sum_j a_j / (e_j + lambda + 1).
template <class Scalar>
Scalar moment(const MuntzSeries<Scalar>& h, const Scalar& lambda) {
  if (h.exponents.size() != h.coeffs.size()) throw ValidationError("muntz", "series exponents and coefficients differ in length");
  Scalar s = 0;
  for (std::size_t j = 0; j < h.coeffs.size(); ++j) s += h.coeffs[j] / (h.exponents[j] + lambda + 1);
  return s;
}

template <class Scalar>
Scalar inner_product(const MuntzSeries<Scalar>& f, const MuntzSeries<Scalar>& g) {
  Scalar s = 0;
  for (std::size_t i = 0; i < f.coeffs.size(); ++i) {
    for (std::size_t j = 0; j < g.coeffs.size(); ++j) {
      s += f.coeffs[i] * g.coeffs[j] / (f.exponents[i] + g.exponents[j] + 1);
    }
  }
  return s;
}

template <class Scalar>
Scalar l2_norm(const MuntzSeries<Scalar>& h) {
  using std::sqrt;
  const Scalar s = inner_product(h, h);
  return s > 0 ? Scalar(sqrt(s)) : Scalar(0);
}

template <class Scalar>
struct Projection {
  std::vector<Scalar> coeffs;  // <h, L_m>, m = 0..n
  Scalar norm = 0;             // ||pi_n h||
  Scalar residual_norm = 0;    // ||h - pi_n h|| from ||h||^2 - ||pi_n h||^2
};

/// Orthogonal projection onto span(t^{lambda_0}, ..., t^{lambda_n}).
/// Refuses degrees beyond the certified range of the system.
template <class Scalar>
Projection<Scalar> project(const MuntzSeries<Scalar>& h, const MuntzSystem<Scalar>& sys, int n) {
  using std::sqrt;
  sys.check_degree(n);
  if (n > sys.certified_degree()) {
    throw NumericalError("muntz", "degree " + std::to_string(n) + " exceeds the certified range " +
                                      std::to_string(sys.certified_degree()) + " at this precision");
  }
  std::vector<Scalar> mom(n + 1);
  for (int j = 0; j <= n; ++j) mom[j] = moment(h, sys.exponents()[j]);
  Projection<Scalar> out;
  Scalar sq = 0;
  for (int m = 0; m <= n; ++m) {
    Scalar c = 0;
    for (int j = 0; j <= m; ++j) c += sys.coefficients()(m, j) * mom[j];
    out.coeffs.push_back(c);
    sq += c * c;
  }
  out.norm = sqrt(sq);
  const Scalar rest = inner_product(h, h) - sq;
  out.residual_norm = rest > 0 ? Scalar(sqrt(rest)) : Scalar(0);
  return out;
}

/// lambda_k = 2k + d - 3 + delta for k = 0..n, converted exactly from the double parameters.
template <class Scalar>
std::vector<Scalar> exponent_sequence(const SpectralParams& params, int n) {
  std::vector<Scalar> out;
  out.reserve(n + 1);
  for (int k = 0; k <= n; ++k) out.push_back(Scalar(2 * k + params.d - 3) + Scalar(params.delta));
  return out;
}

/// g(t) = (3/2) sqrt(2t + 1) (9 M0 / 2)^{t + 1} / sqrt((9 M0 / 2)^2 - 1).
double g_function(double t, double M0);

struct NOfEps {
  int n = 0;
  double t_exact = 0.0;  // solution of g(t) = 1 / sqrt(eps)
  bool flagged = false;  // eps too large: g(0) already exceeds 1 / sqrt(eps)
};

/// n(eps) = floor(g^{-1}(1 / sqrt(eps))), solved by bisection to 1e-12 in t.
NOfEps n_of_eps(double eps, double M0);

/// B^2 eps + R^{1 - d - delta} eps^{log R / log(9 M0 / 2)}.
double still_bound(double eps, double R, const SpectralParams& params, double B);

}  // namespace steklov
