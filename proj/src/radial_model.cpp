#include "steklov/radial_model.hpp"

#include "steklov/errors.hpp"
#include "steklov/numerics.hpp"

#include <cmath>
#include <sstream>

namespace steklov {

SpectralParams make_spectral_params(int d, double delta, int K) {
  if (d < 3) throw ValidationError("radial_model", "dimension d must be >= 3");
  if (!std::isfinite(delta) || delta < 3.0 - d) {
    throw ValidationError("radial_model", "delta must satisfy delta >= 3 - d so that lambda_k >= 0");
  }
  if (K < 1) throw ValidationError("radial_model", "truncation K must be >= 1");

  SpectralParams p;
  p.d = d;
  p.delta = delta;
  p.K = K;
  for (int k = 0; k <= K; ++k) {
    p.kappa.push_back(p.kappa_at(k));
    p.lambda.push_back(p.lambda_at(k));
    p.mu.push_back(p.mu_at(k));
  }
  // mu_k < 0  <=>  k < -(d - 3 + 2 delta) / 2
  while (p.mu_at(p.n_neg) < 0.0) ++p.n_neg;
  p.M0 = std::max(2.0, 4.0 * (d - 3 + delta) + 1.0);
  return p;
}

std::string ClosedForm::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case ClosedFormKind::zero: os << "zero"; break;
    case ClosedFormKind::bargmann1: os << "bargmann1(beta=" << first << ",gamma=" << second << ")"; break;
    case ClosedFormKind::bargmann2: os << "bargmann2(c1=" << first << ",kappa1=" << second << ")"; break;
    case ClosedFormKind::external: os << "external"; break;
  }
  return os.str();
}

void validate(const ClosedForm& form) {
  switch (form.kind) {
    case ClosedFormKind::bargmann1:
      if (!(form.first > 0.0)) throw ValidationError("radial_model", "bargmann1 needs beta > 0");
      if (!(form.second >= 0.0 && form.second < form.first)) {
        throw ValidationError("radial_model", "bargmann1 needs 0 <= gamma < beta");
      }
      break;
    case ClosedFormKind::bargmann2:
      if (!(form.first > 0.0)) throw ValidationError("radial_model", "bargmann2 needs c1 > 0");
      if (!(form.second > 0.0)) throw ValidationError("radial_model", "bargmann2 needs kappa1 > 0");
      break;
    default:
      break;
  }
}

double closed_form_potential(const ClosedForm& form, double x) {
  switch (form.kind) {
    case ClosedFormKind::zero:
      return 0.0;
    case ClosedFormKind::bargmann1: {
      const double beta = form.first, gamma = form.second;
      const double ratio = (beta - gamma) / (beta + gamma);
      const double e = std::exp(-2.0 * beta * x);
      const double denom = 1.0 + ratio * e;
      return -8.0 * beta * beta * ratio * e / (denom * denom);
    }
    case ClosedFormKind::bargmann2: {
      // Q = -2 (log F)'' with F = 1 + (c1/k1^2) int_0^x sinh^2(k1 y) dy
      const double c1 = form.first, k1 = form.second;
      if (2.0 * k1 * x > 600.0) return 0.0;  // |Q| ~ x e^{-2 k1 x}, negligible, and sinh stays finite
      const double F = 1.0 + c1 / (k1 * k1) * (std::sinh(2.0 * k1 * x) / (4.0 * k1) - 0.5 * x);
      // F F'' - F'^2 with the sinh^2 cosh^2 - sinh^4 cancellation done by hand
      const double sh = std::sinh(k1 * x), s2 = std::sinh(2.0 * k1 * x);
      const double N = c1 / k1 * s2 + c1 * c1 / (k1 * k1 * k1 * k1) * sh * sh -
                       0.5 * c1 * c1 / (k1 * k1 * k1) * x * s2;
      return -2.0 * (N / F) / F;
    }
    case ClosedFormKind::external:
      break;
  }
  throw ValidationError("radial_model", "external potentials have no closed form");
}

RadialPotential::RadialPotential(Eigen::VectorXd grid, Eigen::VectorXd values,
                                 std::optional<ClosedForm> closed_form)
    : grid_(std::move(grid)), values_(std::move(values)), closed_form_(closed_form) {
  if (grid_.size() < 2 || grid_.size() != values_.size()) {
    throw ValidationError("radial_model", "potential needs >= 2 samples with matching grid");
  }
  if (grid_[0] != 0.0) throw ValidationError("radial_model", "potential grid must start at x = 0");
  for (Eigen::Index i = 1; i < grid_.size(); ++i) {
    if (!(grid_[i] > grid_[i - 1])) {
      throw ValidationError("radial_model", "potential grid must be strictly increasing");
    }
  }
  if (!values_.allFinite()) throw ValidationError("radial_model", "potential values must be finite");
  if (closed_form_) {
    validate(*closed_form_);
    if (closed_form_->kind == ClosedFormKind::external) closed_form_.reset();
  }
}

RadialPotential RadialPotential::sampled(const ClosedForm& form, double x_max, int n_intervals) {
  validate(form);
  if (!(x_max > 0.0)) throw ValidationError("radial_model", "X_max must be positive");
  Eigen::VectorXd x = uniform_grid(0.0, x_max, n_intervals);
  Eigen::VectorXd v(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) v[i] = closed_form_potential(form, x[i]);
  return RadialPotential(std::move(x), std::move(v), form);
}

double RadialPotential::operator()(double x) const {
  if (closed_form_) return closed_form_potential(*closed_form_, x);
  if (x > x_max()) return tail_ ? closed_form_potential(*tail_, x) : 0.0;
  return cubic_interpolate(grid_, values_, x);
}

RadialPotential RadialPotential::with_tail(const ClosedForm& form) const {
  validate(form);
  RadialPotential copy = *this;
  copy.tail_ = form;
  return copy;
}

RadialPotential ball_to_halfline(const BallPotential& q) {
  const Eigen::Index n = q.grid.size();
  if (n < 2 || n != q.values.size()) throw ValidationError("radial_model", "ball potential needs >= 2 samples");
  if (!(q.grid[0] > 0.0) || q.grid[n - 1] != 1.0) {
    throw ValidationError("radial_model", "ball grid must lie in (0, 1] and end at r = 1");
  }
  Eigen::VectorXd x(n), v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = q.grid[n - 1 - i];
    x[i] = (i == 0) ? 0.0 : -std::log(r);
    v[i] = r * r * q.values[n - 1 - i];
  }
  return RadialPotential(std::move(x), std::move(v));
}

BallPotential halfline_to_ball(const RadialPotential& Q) {
  const Eigen::Index n = Q.grid().size();
  BallPotential q{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = Q.grid()[n - 1 - i];
    q.grid[i] = std::exp(-x);
    q.values[i] = std::exp(2.0 * x) * Q.values()[n - 1 - i];
  }
  q.grid[n - 1] = 1.0;
  return q;
}

BallPotential halfline_to_ball(const RadialPotential& Q, const Eigen::VectorXd& r_grid) {
  BallPotential q{r_grid, Eigen::VectorXd(r_grid.size())};
  for (Eigen::Index i = 0; i < r_grid.size(); ++i) {
    const double r = r_grid[i];
    if (!(r > 0.0 && r <= 1.0)) throw ValidationError("radial_model", "r-grid must lie in (0, 1]");
    q.values[i] = Q(-std::log(r)) / (r * r);
  }
  return q;
}

std::pair<double, double> weighted_norm_equivalence(const BallPotential& q,
                                                    const BallPotential& q_tilde, double T) {
  if (!(T > 0.0)) throw ValidationError("radial_model", "T must be positive");
  if (q.grid.size() != q_tilde.grid.size() || q.grid != q_tilde.grid) {
    throw ValidationError("radial_model", "ball potentials must share their r-grid");
  }
  const double r_min = std::exp(-T);
  const double slack = 1e-12;
  std::vector<double> r, diff;
  for (Eigen::Index i = 0; i < q.grid.size(); ++i) {
    if (q.grid[i] >= r_min * (1.0 - slack)) {
      r.push_back(q.grid[i]);
      diff.push_back(q.values[i] - q_tilde.values[i]);
    }
  }
  if (r.size() < 2 || r.front() > r_min * (1.0 + 1e-9) || r.back() != 1.0) {
    throw ValidationError("radial_model", "r-grid must cover [e^{-T}, 1] with nodes at both ends");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(r.size());

  Eigen::VectorXd rr(n), ball_integrand(n), x(n), line_integrand(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    rr[i] = r[i];
    ball_integrand[i] = diff[i] * diff[i] * r[i] * r[i] * r[i];
    // node i of the half-line grid is the image of r[n - 1 - i]
    const double rj = r[n - 1 - i];
    x[i] = (i == 0) ? 0.0 : -std::log(rj);
    const double dQ = rj * rj * diff[n - 1 - i];
    line_integrand[i] = dQ * dQ;
  }
  return {std::sqrt(simpson_nonuniform(x, line_integrand)), std::sqrt(simpson_nonuniform(rr, ball_integrand))};
}

}  // namespace steklov
